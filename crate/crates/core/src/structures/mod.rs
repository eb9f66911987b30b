//! Type D structures, type A modules, DA bimodules and chain complexes over
//! strand algebras, with coefficients in F₂ or in F₂(x₁,…,xₙ).
//!
//! A type DD structure over A(𝒵₁) and A(−𝒵₂) is a type D structure over the
//! tensor algebra, so `TypeD` covers both.

mod check;
mod mor;
mod reduce;
mod serial;
mod tensor;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::coeff::{FracScalar, Scalar, F2};
use crate::strandalg::{AlgRef, AlgebraMap};

pub use check::Diagnostics;
pub use mor::{homology_rank, mor_complex, ChainComplex, MorBasis};
pub use reduce::reduce;
pub use serial::{AlgebraSpec, AnyTypeD, DaFile, TypeDFile, SCHEMA_DA, SCHEMA_TYPED};
pub use tensor::{box_tensor, box_tensor_ad, box_tensor_da, DEFAULT_ITERATION_CAP};

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("acting algebras differ: {0} vs {1}")]
    AlgebraMismatch(String, String),
    #[error("box tensor did not terminate within {0} iterated δ steps")]
    IterationCap(usize),
    #[error("generator {0} has idempotent {1} which is not basic")]
    NotIdempotent(String, String),
    #[error("algebra map sends idempotent of {0} to a non-basic element")]
    BadInduction(String),
    #[error("schema: {0}")]
    Schema(String),
    #[error("structure check failed: {0}")]
    Check(String),
}

/// A linear combination of algebra basis elements with scalar coefficients.
pub type Lin<K> = BTreeMap<usize, K>;

pub(crate) fn lin_add<K: Scalar>(acc: &mut Lin<K>, key: usize, c: K) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&key) {
        Some(v) => {
            *v = v.add(&c);
            if v.is_zero() {
                acc.remove(&key);
            }
        }
        None => {
            acc.insert(key, c);
        }
    }
}

pub(crate) fn map_add<Key: Ord, K: Scalar>(acc: &mut BTreeMap<Key, K>, key: Key, c: K) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&key) {
        Some(v) => {
            *v = v.add(&c);
            if v.is_zero() {
                acc.remove(&key);
            }
        }
        None => {
            acc.insert(key, c);
        }
    }
}

/// A generator of a type D structure: a name and a basic idempotent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub idem: usize,
}

/// Outgoing arrows of one generator, keyed by (algebra element, target).
pub type Arrows<K> = BTreeMap<(usize, usize), K>;

/// A left type D structure (twisted complex) over `alg`.
#[derive(Clone, Debug)]
pub struct TypeD<K: Scalar> {
    pub alg: AlgRef,
    pub gens: Vec<Generator>,
    pub delta: Vec<Arrows<K>>,
}

/// A type DD structure is a type D structure over a tensor algebra.
pub type TypeDD<K> = TypeD<K>;

impl<K: Scalar> TypeD<K> {
    pub fn new(alg: AlgRef) -> Self {
        TypeD {
            alg,
            gens: Vec::new(),
            delta: Vec::new(),
        }
    }

    pub fn add_generator(&mut self, name: impl Into<String>, idem: usize) -> usize {
        self.gens.push(Generator {
            name: name.into(),
            idem,
        });
        self.delta.push(BTreeMap::new());
        self.gens.len() - 1
    }

    /// Add c·(a ⊗ y) to δ¹(x).
    pub fn add_arrow(&mut self, x: usize, a: usize, y: usize, c: K) {
        map_add(&mut self.delta[x], (a, y), c);
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn arrow_count(&self) -> usize {
        self.delta.iter().map(|d| d.len()).sum()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    /// Number of generators per idempotent.
    pub fn idempotent_profile(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for g in &self.gens {
            *m.entry(g.idem).or_default() += 1;
        }
        m
    }

    /// Induction along an algebra map: relabel every arrow through the map.
    pub fn induct(&self, f: &AlgebraMap) -> Result<TypeD<K>, StructureError> {
        if f.source.key() != self.alg.key() {
            return Err(StructureError::AlgebraMismatch(
                f.source.key(),
                self.alg.key(),
            ));
        }
        let mut out = TypeD::new(f.target.clone());
        for g in &self.gens {
            let img = f.apply(g.idem);
            if img.len() != 1 || !f.target.is_idempotent(img[0]) {
                return Err(StructureError::BadInduction(g.name.clone()));
            }
            out.add_generator(g.name.clone(), img[0]);
        }
        for (x, arrows) in self.delta.iter().enumerate() {
            for (&(a, y), c) in arrows {
                for &b in f.apply(a) {
                    out.add_arrow(x, b, y, c.clone());
                }
            }
        }
        Ok(out)
    }

    /// Rewrite coefficients through a scalar homomorphism.
    pub fn map_scalars<L: Scalar>(&self, f: impl Fn(&K) -> L) -> TypeD<L> {
        TypeD {
            alg: self.alg.clone(),
            gens: self.gens.clone(),
            delta: self
                .delta
                .iter()
                .map(|d| {
                    d.iter()
                        .map(|(k, c)| (*k, f(c)))
                        .filter(|(_, c)| !c.is_zero())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_frac(&self) -> TypeD<FracScalar> {
        self.map_scalars(|c| c.to_frac())
    }

    /// The dual structure over the opposite algebra: each arrow
    /// x → a ⊗ y becomes y → op(a) ⊗ x.
    pub fn dual(&self, op: &AlgebraMap) -> Result<TypeD<K>, StructureError> {
        if op.source.key() != self.alg.key() {
            return Err(StructureError::AlgebraMismatch(
                op.source.key(),
                self.alg.key(),
            ));
        }
        let mut out = TypeD::new(op.target.clone());
        for g in &self.gens {
            let img = op.apply(g.idem);
            out.add_generator(g.name.clone(), img[0]);
        }
        for (x, arrows) in self.delta.iter().enumerate() {
            for (&(a, y), c) in arrows {
                for &b in op.apply(a) {
                    out.add_arrow(y, b, x, c.clone());
                }
            }
        }
        Ok(out)
    }

    /// Identity morphism cocycle data: the Mor basis element (x ↦ ι(x) ⊗ x)
    /// for each generator.
    pub fn identity_morphism(&self) -> Vec<(usize, usize, usize)> {
        self.gens
            .iter()
            .enumerate()
            .map(|(i, g)| (i, g.idem, i))
            .collect()
    }

    /// Tensor product over F₂ of a structure over A with one over B: a
    /// structure over A ⊗ B.
    pub fn tensor_product(&self, other: &TypeD<K>) -> TypeD<K> {
        let alg = Arc::new(crate::strandalg::TensorAlgebra::new(
            self.alg.clone(),
            other.alg.clone(),
        ));
        let mut out = TypeD::new(alg.clone());
        let n2 = other.len();
        for g in &self.gens {
            for h in &other.gens {
                out.add_generator(format!("{}|{}", g.name, h.name), alg.pair(g.idem, h.idem));
            }
        }
        // δ(x ⊗ y) = δx ⊗ ι(y) + ι(x) ⊗ δy
        for (x, g) in self.gens.iter().enumerate() {
            for (y, h) in other.gens.iter().enumerate() {
                let src = x * n2 + y;
                for (&(a, x2), c) in &self.delta[x] {
                    out.add_arrow(src, alg.pair(a, h.idem), x2 * n2 + y, c.clone());
                }
                for (&(b, y2), c) in &other.delta[y] {
                    out.add_arrow(src, alg.pair(g.idem, b), x * n2 + y2, c.clone());
                }
            }
        }
        out
    }

    /// Swap the tensor factors of a DD structure.
    pub fn swap_sides(&self) -> Result<TypeD<K>, StructureError> {
        let t = self
            .alg
            .as_tensor()
            .ok_or_else(|| StructureError::Check("swap_sides needs a tensor algebra".into()))?;
        let swapped = Arc::new(crate::strandalg::TensorAlgebra::new(
            t.right.clone(),
            t.left.clone(),
        ));
        let sw = |a: usize| {
            let (l, r) = t.split(a);
            swapped.pair(r, l)
        };
        let mut out = TypeD::new(swapped.clone());
        for g in &self.gens {
            out.add_generator(g.name.clone(), sw(g.idem));
        }
        for (x, arrows) in self.delta.iter().enumerate() {
            for (&(a, y), c) in arrows {
                out.add_arrow(x, sw(a), y, c.clone());
            }
        }
        Ok(out)
    }

    /// Sub-structure on the generators satisfying the predicate (arrows to
    /// dropped generators are discarded).
    pub fn restrict_generators(&self, keep: impl Fn(usize) -> bool) -> TypeD<K> {
        let mut map = vec![usize::MAX; self.len()];
        let mut out = TypeD::new(self.alg.clone());
        for (i, g) in self.gens.iter().enumerate() {
            if keep(i) {
                map[i] = out.add_generator(g.name.clone(), g.idem);
            }
        }
        for (x, arrows) in self.delta.iter().enumerate() {
            if map[x] == usize::MAX {
                continue;
            }
            for (&(a, y), c) in arrows {
                if map[y] != usize::MAX {
                    out.add_arrow(map[x], a, map[y], c.clone());
                }
            }
        }
        out
    }
}

impl TypeD<F2> {
    /// Add the arrow x → a ⊗ y over F₂ (toggling).
    pub fn toggle_arrow(&mut self, x: usize, a: usize, y: usize) {
        self.add_arrow(x, a, y, F2(true));
    }
}

/// A DA bimodule: type D over `left`, A∞ action by `right`.
///
/// `ops[(x, [a₁,…,a_j])]` stores δ¹_{1+j}(x, a₁,…,a_j) as a sum of
/// (output, target) with coefficients. Inputs are never idempotents; the
/// operations are strictly unital, δ¹₂(x, ι) = ι ⊗ x.
#[derive(Clone, Debug)]
pub struct TypeDA<K: Scalar> {
    pub left: AlgRef,
    pub right: AlgRef,
    pub gens: Vec<DaGenerator>,
    pub ops: BTreeMap<(usize, Vec<usize>), Arrows<K>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DaGenerator {
    pub name: String,
    pub left_idem: usize,
    pub right_idem: usize,
}

impl<K: Scalar> TypeDA<K> {
    pub fn new(left: AlgRef, right: AlgRef) -> Self {
        TypeDA {
            left,
            right,
            gens: Vec::new(),
            ops: BTreeMap::new(),
        }
    }

    pub fn add_generator(
        &mut self,
        name: impl Into<String>,
        left_idem: usize,
        right_idem: usize,
    ) -> usize {
        self.gens.push(DaGenerator {
            name: name.into(),
            left_idem,
            right_idem,
        });
        self.gens.len() - 1
    }

    pub fn add_op(&mut self, x: usize, inputs: Vec<usize>, out: usize, y: usize, c: K) {
        if c.is_zero() {
            return;
        }
        let entry = self.ops.entry((x, inputs.clone())).or_default();
        map_add(entry, (out, y), c);
        if entry.is_empty() {
            self.ops.remove(&(x, inputs));
        }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.ops.keys().map(|(_, v)| v.len()).max().unwrap_or(0)
    }

    /// The identity DA bimodule of an algebra with unit given by its basic
    /// idempotents: δ¹₂(ι ⊗ a) = a ⊗ ι′.
    pub fn identity(alg: AlgRef) -> Self {
        let mut da = TypeDA::new(alg.clone(), alg.clone());
        let idems = alg.idempotents();
        let mut index = BTreeMap::new();
        for &e in &idems {
            index.insert(e, da.add_generator(alg.label(e), e, e));
        }
        for a in 0..alg.dim() {
            if alg.is_idempotent(a) {
                continue;
            }
            let x = index[&alg.left_idem(a)];
            let y = index[&alg.right_idem(a)];
            da.add_op(x, vec![a], a, y, K::one());
        }
        da
    }

    /// The rank-one DA bimodule [f] of an algebra map f: A → B, with
    /// δ¹₂(ι ⊗ a) = f(a) ⊗ ι′. Generators are the basic idempotents of A.
    pub fn from_algebra_map(f: &AlgebraMap) -> Result<Self, StructureError> {
        let mut da = TypeDA::new(f.target.clone(), f.source.clone());
        let mut index = BTreeMap::new();
        for e in f.source.idempotents() {
            let img = f.apply(e);
            if img.len() != 1 || !f.target.is_idempotent(img[0]) {
                return Err(StructureError::BadInduction(f.source.label(e)));
            }
            index.insert(e, da.add_generator(f.source.label(e), img[0], e));
        }
        for a in 0..f.source.dim() {
            if f.source.is_idempotent(a) {
                continue;
            }
            let x = index[&f.source.left_idem(a)];
            let y = index[&f.source.right_idem(a)];
            for &b in f.apply(a) {
                da.add_op(x, vec![a], b, y, K::one());
            }
        }
        Ok(da)
    }

    pub fn map_scalars<L: Scalar>(&self, f: impl Fn(&K) -> L) -> TypeDA<L> {
        TypeDA {
            left: self.left.clone(),
            right: self.right.clone(),
            gens: self.gens.clone(),
            ops: self
                .ops
                .iter()
                .map(|(k, v)| {
                    (
                        k.clone(),
                        v.iter()
                            .map(|(kk, c)| (*kk, f(c)))
                            .filter(|(_, c)| !c.is_zero())
                            .collect(),
                    )
                })
                .filter(|(_, v): &(_, Arrows<L>)| !v.is_empty())
                .collect(),
        }
    }

    pub fn to_frac(&self) -> TypeDA<FracScalar> {
        self.map_scalars(|c| c.to_frac())
    }
}

/// A right A∞-module over `alg`. `ops[(x, [a₁,…,a_j])]` stores
/// m_{1+j}(x, a₁,…,a_j) as a combination of generators; inputs are never
/// idempotents and m₂(x, ι) = x for the matching idempotent.
#[derive(Clone, Debug)]
pub struct TypeA<K: Scalar> {
    pub alg: AlgRef,
    pub gens: Vec<Generator>,
    pub ops: BTreeMap<(usize, Vec<usize>), BTreeMap<usize, K>>,
}

impl<K: Scalar> TypeA<K> {
    pub fn new(alg: AlgRef) -> Self {
        TypeA {
            alg,
            gens: Vec::new(),
            ops: BTreeMap::new(),
        }
    }

    pub fn add_generator(&mut self, name: impl Into<String>, idem: usize) -> usize {
        self.gens.push(Generator {
            name: name.into(),
            idem,
        });
        self.gens.len() - 1
    }

    pub fn add_op(&mut self, x: usize, inputs: Vec<usize>, y: usize, c: K) {
        if c.is_zero() {
            return;
        }
        let entry = self.ops.entry((x, inputs.clone())).or_default();
        map_add(entry, y, c);
        if entry.is_empty() {
            self.ops.remove(&(x, inputs));
        }
    }

    pub fn max_arity(&self) -> usize {
        self.ops.keys().map(|(_, v)| v.len()).max().unwrap_or(0)
    }

    /// The dg module P̄ = P* ⊗ A associated with a type D structure P: its
    /// box tensor with a type D structure Q is the morphism complex
    /// Mor(P, Q). Generators are pairs (p, a) with ι(p)·a = a; the
    /// differential combines d(a) with the dual of δ¹_P; A acts on the right.
    pub fn from_dual(p: &TypeD<K>) -> TypeA<K> {
        let alg = p.alg.clone();
        let mut m = TypeA::new(alg.clone());
        let mut index = BTreeMap::new();
        for (i, g) in p.gens.iter().enumerate() {
            for a in 0..alg.dim() {
                if alg.left_idem(a) == g.idem {
                    let id =
                        m.add_generator(format!("{}*·{}", g.name, alg.label(a)), alg.right_idem(a));
                    index.insert((i, a), id);
                }
            }
        }
        for (&(i, a), &id) in &index {
            for b in alg.d(a) {
                m.add_op(id, vec![], index[&(i, b)], K::one());
            }
        }
        // pre-composition with δ¹_P: (p ↦ a) contributes to (p′ ↦ b·a)
        for (pp, arrows) in p.delta.iter().enumerate() {
            for (&(b, pt), c) in arrows {
                for a in 0..alg.dim() {
                    if alg.left_idem(a) != p.gens[pt].idem {
                        continue;
                    }
                    for ba in alg.mul(b, a) {
                        m.add_op(index[&(pt, a)], vec![], index[&(pp, ba)], c.clone());
                    }
                }
            }
        }
        for (&(i, a), &id) in &index {
            for b in 0..alg.dim() {
                if alg.is_idempotent(b) {
                    continue;
                }
                for ab in alg.mul(a, b) {
                    m.add_op(id, vec![b], index[&(i, ab)], K::one());
                }
            }
        }
        m
    }

    /// Restriction of scalars along f: B → A, giving a module over B.
    pub fn restrict(&self, f: &AlgebraMap) -> Result<TypeA<K>, StructureError> {
        if f.target.key() != self.alg.key() {
            return Err(StructureError::AlgebraMismatch(
                f.target.key(),
                self.alg.key(),
            ));
        }
        let src = f.source.clone();
        let mut out = TypeA::new(src.clone());
        let mut idem_pre: BTreeMap<usize, usize> = BTreeMap::new();
        for e in src.idempotents() {
            if let [img] = f.apply(e) {
                idem_pre.insert(*img, e);
            }
        }
        for g in &self.gens {
            let e = idem_pre.get(&g.idem).copied().ok_or_else(|| {
                StructureError::BadInduction(format!("no preimage for idempotent of {}", g.name))
            })?;
            out.add_generator(g.name.clone(), e);
        }
        let max = self.max_arity();
        for ((x, inputs), targets) in &self.ops {
            if inputs.is_empty() {
                for (y, c) in targets {
                    out.add_op(*x, vec![], *y, c.clone());
                }
            }
        }
        // m_{1+j}(x, b₁…b_j) = Σ m(x, f(b₁)…f(b_j)) for non-idempotent b's
        let non_idem: Vec<usize> = (0..src.dim()).filter(|&b| !src.is_idempotent(b)).collect();
        for j in 1..=max {
            for x in 0..self.gens.len() {
                let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), out.gens[x].idem)];
                while let Some((seq, idem)) = stack.pop() {
                    if seq.len() == j {
                        let choices: Vec<&[usize]> = seq.iter().map(|&b| f.apply(b)).collect();
                        let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
                        for ch in choices {
                            let mut next = Vec::new();
                            for c in &combos {
                                for &a in ch {
                                    let mut v = c.clone();
                                    v.push(a);
                                    next.push(v);
                                }
                            }
                            combos = next;
                        }
                        for combo in combos {
                            let images_idem = combo.iter().any(|&a| self.alg.is_idempotent(a));
                            if images_idem {
                                if j == 1 {
                                    for (y, c) in self.ops_or_unit(x, &combo) {
                                        out.add_op(x, seq.clone(), y, c);
                                    }
                                }
                                continue;
                            }
                            if let Some(t) = self.ops.get(&(x, combo)) {
                                for (y, c) in t {
                                    out.add_op(x, seq.clone(), *y, c.clone());
                                }
                            }
                        }
                        continue;
                    }
                    for &b in &non_idem {
                        if src.left_idem(b) == idem {
                            let mut s = seq.clone();
                            s.push(b);
                            stack.push((s, src.right_idem(b)));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn ops_or_unit(&self, x: usize, combo: &[usize]) -> Vec<(usize, K)> {
        if combo.len() == 1 && self.alg.is_idempotent(combo[0]) {
            if combo[0] == self.gens[x].idem {
                return vec![(x, K::one())];
            }
            return Vec::new();
        }
        self.ops
            .get(&(x, combo.to_vec()))
            .map(|t| t.iter().map(|(y, c)| (*y, c.clone())).collect())
            .unwrap_or_default()
    }
}

/// Coerce an algebra reference to its strand algebra.
pub fn strand_of(alg: &AlgRef) -> Option<&crate::strandalg::StrandAlgebra> {
    alg.as_strand()
}

/// Convenience: the structure check, failing with an error.
pub fn ensure_valid<K: Scalar>(m: &TypeD<K>) -> Result<(), StructureError> {
    let d = m.check();
    if d.ok() {
        Ok(())
    } else {
        Err(StructureError::Check(d.to_string()))
    }
}
