//! Bimodules of the basic bordered-sutured pieces: identity DD and AA,
//! DD→DA conversion, arcslides, interior handles, R±-handles, cups and caps,
//! pointless caps, the F̄rac bimodule and composed boundary twists.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::arcdiagram::{ArcDiagram, ArcDiagramFile, Flavor};
use crate::coeff::{nu, FracScalar, Scalar, F2};
use crate::heegaard::{self, HeegaardError, NiceDiagram};
use crate::strandalg::{
    complement_mask, hom_add_pair, hom_i_bc, hom_i_empty, hom_inclusion, hom_projection, opposite,
    reverse_mask, AlgRef, Algebra, AlgebraError, AlgebraMap, StrandAlgebra, StrandDiagram,
    TensorAlgebra,
};
use crate::structures::{
    box_tensor, reduce, StructureError, TypeA, TypeD, TypeDA, DEFAULT_ITERATION_CAP,
};

#[derive(Debug, Error)]
pub enum BimodError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Heegaard(#[from] HeegaardError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("illegal arcslide: {0}")]
    IllegalSlide(String),
    #[error("no shipped template for this arcslide: {0}")]
    NoTemplate(String),
    #[error("the near-chord backend is disabled: its chord tables are not available")]
    BackendDisabled,
    #[error("arcslide backends disagree: {0}")]
    BackendDisagreement(String),
    #[error("configuration mismatch: {0}")]
    Configuration(String),
    #[error("the F̄rac bimodule needs a pointed matched circle")]
    NotCircle,
    #[error("unpaired boundary data: {0}")]
    Unpaired(String),
}

fn strand(alg: &AlgRef) -> Result<Arc<StrandAlgebra>, BimodError> {
    let s = alg
        .as_strand()
        .ok_or_else(|| BimodError::Configuration("expected a strand algebra".into()))?;
    Ok(StrandAlgebra::shared(s.diagram()))
}

fn tensor_parts(alg: &AlgRef) -> Result<(Arc<StrandAlgebra>, Arc<StrandAlgebra>), BimodError> {
    let t = alg
        .as_tensor()
        .ok_or_else(|| BimodError::Configuration("expected a DD structure".into()))?;
    Ok((strand(&t.left)?, strand(&t.right)?))
}

/// The identity DD bimodule over A(𝒵) ⊗ A(−𝒵): generators are the
/// complementary idempotent pairs, δ¹ sums a(ρ) ⊗ a(ρ′) over all chords.
pub fn dd_identity(z: &ArcDiagram) -> TypeD<F2> {
    let rz = z.reverse();
    let (l, r) = (StrandAlgebra::shared(z), StrandAlgebra::shared(&rz));
    let alg = Arc::new(TensorAlgebra::new(l.clone(), r.clone()));
    let mut m = TypeD::new(alg.clone());
    let n = z.num_pairs();
    let right_of = |s: u64| reverse_mask(z, &rz, complement_mask(z, s));
    for s in 0..(1u64 << n) {
        let name = format!("I{s:0w$b}", w = n.max(1));
        m.add_generator(name, alg.pair(l.idempotent(s), r.idempotent(right_of(s))));
    }
    let chords = z.chords();
    for s in 0..(1u64 << n) {
        for c in &chords {
            let Some(a) = l.chord_with_left(c, s) else {
                continue;
            };
            let Some(b) = r.chord_with_left(&z.reverse_chord(c), right_of(s)) else {
                continue;
            };
            let t = l.right_mask(a);
            if r.right_mask(b) != right_of(t) {
                continue;
            }
            m.toggle_arrow(s as usize, alg.pair(a, b), t as usize);
        }
    }
    m
}

/// The identity AA bimodule as the dual module of the identity DD
/// bimodule: a right module over A(𝒵) ⊗ A(−𝒵) whose box tensor with a DD
/// structure is its morphism complex from the identity.
pub fn aa_identity(z: &ArcDiagram) -> TypeA<F2> {
    TypeA::from_dual(&dd_identity(z))
}

/// Convert a DD bimodule over A(𝒵₁) ⊗ A(−𝒵₂) into the DA bimodule
/// Mor(A(𝒵₂) ⊠ DDId(𝒵₂), dd), type D over A(𝒵₁) and acted on by A(𝒵₂).
pub fn dd_to_da(dd: &TypeD<F2>) -> Result<TypeDA<F2>, BimodError> {
    let t = dd
        .alg
        .as_tensor()
        .ok_or_else(|| BimodError::Configuration("dd_to_da needs a DD structure".into()))?;
    let left = t.left.clone();
    let rr = strand(&t.right)?;
    let z2 = rr.diagram().reverse();
    let a2 = StrandAlgebra::shared(&z2);
    let id2 = dd_identity(&z2);
    let tid = id2.alg.as_tensor().expect("identity is a DD structure");
    if tid.right.key() != rr.key() {
        return Err(BimodError::Configuration(
            "−(−𝒵) does not reproduce the right diagram".into(),
        ));
    }
    let dd_split = |a: usize| t.split(a);
    let id_split = |a: usize| tid.split(a);

    // M = A(𝒵₂) ⊠ DDId(𝒵₂): a type D structure over A(−𝒵₂)
    let mut mgens: Vec<(usize, usize)> = Vec::new();
    let mut midx: HashMap<(usize, usize), usize> = HashMap::new();
    for (x, g) in id2.gens.iter().enumerate() {
        let (e2, _) = id_split(g.idem);
        for b in 0..a2.dim() {
            if a2.right_idem(b) == e2 {
                midx.insert((b, x), mgens.len());
                mgens.push((b, x));
            }
        }
    }
    let m_idem = |m: usize| id_split(id2.gens[mgens[m].1].idem).1;
    // incoming arrows of M: m ← (m′, label)
    let mut m_in: Vec<Vec<(usize, usize)>> = vec![Vec::new(); mgens.len()];
    for (mi, &(b, x)) in mgens.iter().enumerate() {
        let lbl = m_idem(mi);
        for c in a2.d(b) {
            m_in[midx[&(c, x)]].push((mi, lbl));
        }
        for &(a, x2) in id2.delta[x].keys() {
            let (a_l, a_r) = id_split(a);
            for p in a2.mul(b, a_l) {
                m_in[midx[&(p, x2)]].push((mi, a_r));
            }
        }
    }

    // generators f = (m, a′, y) of the morphism complex
    let mut between: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for a in 0..rr.dim() {
        between
            .entry((rr.left_idem(a), rr.right_idem(a)))
            .or_default()
            .push(a);
    }
    let mut da = TypeDA::new(left.clone(), a2.clone());
    let mut fidx: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut fgens: Vec<(usize, usize, usize)> = Vec::new();
    for (mi, &(b, x)) in mgens.iter().enumerate() {
        for (y, gy) in dd.gens.iter().enumerate() {
            let (yl, yr) = dd_split(gy.idem);
            let Some(list) = between.get(&(m_idem(mi), yr)) else {
                continue;
            };
            for &a in list {
                let name = format!(
                    "{}·{}|{}·{}",
                    a2.label(b),
                    id2.gens[x].name,
                    rr.label(a),
                    gy.name
                );
                let id = da.add_generator(name, yl, a2.left_idem(b));
                fidx.insert((mi, a, y), id);
                fgens.push((mi, a, y));
            }
        }
    }
    for (&(mi, a, y), &f) in &fidx {
        let out = da.gens[f].left_idem;
        for c in rr.d(a) {
            da.add_op(f, vec![], out, fidx[&(mi, c, y)], F2(true));
        }
        for &(lbl, y2) in dd.delta[y].keys() {
            let (cl, cr) = dd_split(lbl);
            for p in rr.mul(a, cr) {
                da.add_op(f, vec![], cl, fidx[&(mi, p, y2)], F2(true));
            }
        }
        for &(m2, lbl) in &m_in[mi] {
            for p in rr.mul(lbl, a) {
                da.add_op(f, vec![], out, fidx[&(m2, p, y)], F2(true));
            }
        }
    }
    // right action: (f·c)(b″, x) = f(c·b″, x)
    for (m2, &(b2, x)) in mgens.iter().enumerate() {
        for c in 0..a2.dim() {
            if a2.is_idempotent(c) || a2.right_idem(c) != a2.left_idem(b2) {
                continue;
            }
            for p in a2.mul(c, b2) {
                let mi = midx[&(p, x)];
                for &(mm, a, y) in fgens.iter().filter(|g| g.0 == mi) {
                    let f = fidx[&(mm, a, y)];
                    let out = da.gens[f].left_idem;
                    da.add_op(f, vec![c], out, fidx[&(m2, a, y)], F2(true));
                }
            }
        }
    }
    Ok(da)
}

/// Which construction produces an arcslide bimodule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcslideBackend {
    NiceDiagram,
    NearChord,
}

/// An arcslide of the foot `moving` over the adjacent foot `over` in
/// `source`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcslideDatum {
    pub source: ArcDiagram,
    pub moving: u32,
    pub over: u32,
}

impl ArcslideDatum {
    pub fn check(&self) -> Result<(), BimodError> {
        let z = &self.source;
        let bad = |s: &str| BimodError::IllegalSlide(s.to_string());
        let p = z
            .position_of(self.moving)
            .ok_or_else(|| bad("moving foot is not a point"))?;
        let q = z
            .position_of(self.over)
            .ok_or_else(|| bad("fixed foot is not a point"))?;
        if p.abs_diff(q) != 1 || z.interval_of(p) != z.interval_of(q) {
            return Err(bad("feet are not adjacent"));
        }
        if z.pair_of(p) == z.pair_of(q) {
            return Err(bad("a foot cannot slide over its own partner"));
        }
        Ok(())
    }
}

/// Shipped arcslide templates: (source diagram, moving id, fixed id, json).
pub fn arcslide_templates() -> Vec<(ArcDiagram, u32, u32, &'static str)> {
    vec![
        (
            ArcDiagram::genus1(),
            1,
            2,
            heegaard::templates::GENUS1_ARCSLIDE,
        ),
        (
            ArcDiagram::genus1(),
            4,
            3,
            heegaard::templates::GENUS1_ARCSLIDE43,
        ),
        (
            ArcDiagram::genus1(),
            3,
            2,
            heegaard::templates::GENUS1_ARCSLIDE32,
        ),
    ]
}

/// The genus-1 arc diagram cut open along the segment between points 1 and 2:
/// intervals [1] and [2, 3, 4], matching {1,3}, {2,4}.
pub fn cut1_diagram() -> ArcDiagram {
    ArcDiagram::new(ArcDiagramFile {
        flavor: Flavor::Arc,
        intervals: vec![vec![1], vec![2, 3, 4]],
        matching: vec![[1, 3], [2, 4]],
        basepoint_after: None,
    })
    .expect("valid arc diagram")
}

/// DD bimodule of an arcslide over A(𝒵) ⊗ A(−𝒵′).
pub fn arcslide_dd(s: &ArcslideDatum, backend: ArcslideBackend) -> Result<TypeD<F2>, BimodError> {
    s.check()?;
    match backend {
        ArcslideBackend::NearChord => Err(BimodError::BackendDisabled),
        ArcslideBackend::NiceDiagram => {
            let key = s.source.content_key();
            let (_, _, _, json) = arcslide_templates()
                .into_iter()
                .find(|(z, m, o, _)| z.content_key() == key && *m == s.moving && *o == s.over)
                .ok_or_else(|| {
                    BimodError::NoTemplate(format!("slide {} over {} in {}", s.moving, s.over, key))
                })?;
            Ok(NiceDiagram::from_json(json)?.bsd()?)
        }
    }
}

/// The inverse of a DD bimodule of a mapping cylinder: the dual with its
/// two actions exchanged.
pub fn inverse_dd(dd: &TypeD<F2>) -> Result<TypeD<F2>, BimodError> {
    let (l, r) = tensor_parts(&dd.alg)?;
    let (_, fl) = opposite(&l);
    let (_, fr) = opposite(&r);
    let op = AlgebraMap::tensor(&fl, &fr);
    Ok(dd.dual(&op)?.swap_sides()?)
}

/// DA bimodule of an arcslide.
pub fn arcslide_da(s: &ArcslideDatum) -> Result<TypeDA<F2>, BimodError> {
    dd_to_da(&arcslide_dd(s, ArcslideBackend::NiceDiagram)?)
}

/// DA bimodule of the inverse arcslide.
pub fn arcslide_inverse_da(s: &ArcslideDatum) -> Result<TypeDA<F2>, BimodError> {
    dd_to_da(&inverse_dd(&arcslide_dd(s, ArcslideBackend::NiceDiagram)?)?)
}

/// Concatenate two arc diagrams: pointed matched circles are joined into
/// one circle (first block at the bottom), arc diagrams are placed side by
/// side. The second diagram's ids are shifted on collision.
pub fn block_sum(z1: &ArcDiagram, z2: &ArcDiagram) -> ArcDiagram {
    if !(z1.is_pmc() && z2.is_pmc()) {
        return z1.disjoint_union(z2);
    }
    let f1 = z1.as_arc().to_file();
    let f2 = z2.as_arc().to_file();
    let max1 = f1.intervals.iter().flatten().max().copied().unwrap_or(0);
    let collide = f2
        .intervals
        .iter()
        .flatten()
        .any(|i| f1.intervals.iter().flatten().any(|j| i == j));
    let shift = if collide { max1 + 1 } else { 0 };
    let mut circle: Vec<u32> = f1.intervals.concat();
    circle.extend(f2.intervals.concat().iter().map(|x| x + shift));
    let mut matching = f1.matching.clone();
    matching.extend(f2.matching.iter().map(|[a, b]| [a + shift, b + shift]));
    let n = circle.len();
    ArcDiagram::new(ArcDiagramFile {
        flavor: Flavor::Pmc,
        intervals: vec![circle],
        matching,
        basepoint_after: Some(n - 1),
    })
    .expect("block sum of pointed matched circles is a pointed matched circle")
}

/// The element of A(𝒵₁ ⊞ 𝒵₂) made of a ∈ A(𝒵₁) in the first block and
/// b ∈ A(𝒵₂) in the second.
fn block_element(
    a1: &StrandAlgebra,
    a2: &StrandAlgebra,
    u: &StrandAlgebra,
    a: usize,
    b: usize,
) -> usize {
    let n1 = a1.diagram().num_points() as u8;
    let (g, h) = (a1.element(a), a2.element(b));
    let mut moving = g.moving.clone();
    moving.extend(h.moving.iter().map(|&(s, t)| (s + n1, t + n1)));
    moving.sort_unstable();
    let horizontal = g.horizontal | h.horizontal << a1.diagram().num_pairs();
    u.index_of(&StrandDiagram { moving, horizontal })
        .expect("block elements are strand diagrams")
}

/// The inclusion A(𝒵₁) ⊗ A(𝒵₂) ↪ A(𝒵₁ ⊞ 𝒵₂).
pub fn hom_block(a1: &Arc<StrandAlgebra>, a2: &Arc<StrandAlgebra>) -> AlgebraMap {
    let u = StrandAlgebra::shared(&block_sum(a1.diagram(), a2.diagram()));
    let t = Arc::new(TensorAlgebra::new(a1.clone(), a2.clone()));
    let images = (0..t.dim())
        .map(|i| {
            let (a, b) = t.split(i);
            vec![block_element(a1, a2, &u, a, b)]
        })
        .collect();
    AlgebraMap {
        source: t,
        target: u,
        images,
    }
}

/// CFD of the ∞-framed solid torus: one generator r with δ¹r = ρ₂₃ ⊗ r.
pub fn cfd_h_inf() -> TypeD<F2> {
    let z = ArcDiagram::genus1();
    let a = StrandAlgebra::shared(&z);
    let c = crate::arcdiagram::Chord {
        interval: 0,
        start: 1,
        end: 3,
    };
    let rho23 = a.chord_with_left(&c, 0b10).expect("ρ₂₃ exists");
    let mut m = TypeD::new(a.clone());
    let r = m.add_generator("r", a.idempotent(0b10));
    m.toggle_arrow(r, rho23, r);
    m
}

/// Interior handle kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HandleKind {
    OneHandle,
    TwoHandle,
}

/// DD bimodule of an interior handle attachment. 𝒵_L is the block sum of
/// the genus-1 circle and 𝒵_R (torus block first when `torus_first`): the
/// result is DDId(𝒵_R) ⊗ CFD(H_∞) extended along A(T²) ⊗ A(𝒵_R) ↪ A(𝒵_L).
/// A one-handle exchanges the two actions.
pub fn interior_handle_dd(
    kind: HandleKind,
    z_right: &ArcDiagram,
    torus_first: bool,
) -> Result<TypeD<F2>, BimodError> {
    if !z_right.is_pmc() {
        return Err(BimodError::Configuration(
            "interior handles connect pointed matched circles".into(),
        ));
    }
    let id = dd_identity(z_right);
    let h = cfd_h_inf();
    let (ar, arr) = tensor_parts(&id.alg)?;
    let at = strand(&h.alg)?;
    let (b1, b2) = if torus_first {
        (at.clone(), ar.clone())
    } else {
        (ar.clone(), at.clone())
    };
    let inc = hom_block(&b1, &b2);
    let al = strand(&inc.target)?;
    let out_alg = Arc::new(TensorAlgebra::new(al.clone(), arr.clone()));
    let tid = id.alg.as_tensor().expect("tensor");
    let place = |r: usize, t: usize| {
        let (x, y) = if torus_first { (t, r) } else { (r, t) };
        block_element(&b1, &b2, &al, x, y)
    };
    let mut m = TypeD::new(out_alg.clone());
    for g in &id.gens {
        for k in &h.gens {
            let (l, r) = tid.split(g.idem);
            m.add_generator(
                format!("{}|{}", g.name, k.name),
                out_alg.pair(place(l, k.idem), r),
            );
        }
    }
    let nh = h.len();
    for (x, g) in id.gens.iter().enumerate() {
        for (y, k) in h.gens.iter().enumerate() {
            let src = x * nh + y;
            for &(a, x2) in id.delta[x].keys() {
                let (l, r) = tid.split(a);
                m.toggle_arrow(src, out_alg.pair(place(l, k.idem), r), x2 * nh + y);
            }
            let (gl, gr) = tid.split(g.idem);
            for &(a, y2) in h.delta[y].keys() {
                m.toggle_arrow(src, out_alg.pair(place(gl, a), gr), x * nh + y2);
            }
        }
    }
    match kind {
        HandleKind::TwoHandle => Ok(m),
        HandleKind::OneHandle => Ok(m.swap_sides()?),
    }
}

/// 𝒵 with the matched pair {b, c} deleted.
fn remove_pair(z: &ArcDiagram, b: u32, c: u32) -> Result<ArcDiagram, BimodError> {
    let f = z.to_file();
    let intervals: Vec<Vec<u32>> = f
        .intervals
        .iter()
        .map(|i| i.iter().copied().filter(|&x| x != b && x != c).collect())
        .collect();
    let matching = f
        .matching
        .iter()
        .copied()
        .filter(|p| !p.contains(&b) && !p.contains(&c))
        .collect();
    ArcDiagram::new(ArcDiagramFile {
        flavor: Flavor::Arc,
        intervals,
        matching,
        basepoint_after: None,
    })
    .map_err(|e| BimodError::Configuration(e.to_string()))
}

fn induct_left(dd: &TypeD<F2>, f: &AlgebraMap) -> Result<TypeD<F2>, BimodError> {
    let (_, r) = tensor_parts(&dd.alg)?;
    let map = AlgebraMap::tensor(f, &AlgebraMap::identity(r));
    Ok(dd.induct(&map)?)
}

fn induct_right(dd: &TypeD<F2>, f: &AlgebraMap) -> Result<TypeD<F2>, BimodError> {
    let (l, _) = tensor_parts(&dd.alg)?;
    let map = AlgebraMap::tensor(&AlgebraMap::identity(l), f);
    Ok(dd.induct(&map)?)
}

/// R₋ 1-handle: (i_∅ ⊗ Id)_* DDId(𝒵′) over A(𝒵) ⊗ A(−𝒵′), where {b, c}
/// is a matched pair of 𝒵 sitting just below two terminal endpoints.
pub fn r_minus_handle_dd(z: &ArcDiagram, b: u32, c: u32) -> Result<TypeD<F2>, BimodError> {
    let zp = remove_pair(z, b, c)?;
    let f = hom_i_empty(&StrandAlgebra::shared(&zp), &StrandAlgebra::shared(z), b, c)?;
    induct_left(&dd_identity(&zp), &f)
}

/// R₊ 1-handle: (i_bc ⊗ Id)_* DDId(𝒵′).
pub fn r_plus_handle_dd(z: &ArcDiagram, b: u32, c: u32) -> Result<TypeD<F2>, BimodError> {
    let zp = remove_pair(z, b, c)?;
    let f = hom_i_bc(&StrandAlgebra::shared(&zp), &StrandAlgebra::shared(z), b, c)?;
    induct_left(&dd_identity(&zp), &f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CupSign {
    RPlus,
    RMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CupKind {
    Cup,
    Cap,
}

/// 𝒵′ = 𝒵 ⊔ Z₀: a new point b at the top of interval `interval`, a new
/// one-point interval {c}, and b matched with c. Returns (𝒵′, b, c).
pub fn cup_diagram(z: &ArcDiagram, interval: usize) -> Result<(ArcDiagram, u32, u32), BimodError> {
    let f = z.as_arc().to_file();
    if interval >= f.intervals.len() {
        return Err(BimodError::Configuration(format!("no interval {interval}")));
    }
    let top = f.intervals.iter().flatten().max().copied().unwrap_or(0);
    let (b, c) = (top + 1, top + 2);
    let mut intervals = f.intervals.clone();
    intervals[interval].push(b);
    intervals.push(vec![c]);
    let mut matching = f.matching.clone();
    matching.push([b, c]);
    let zp = ArcDiagram::new(ArcDiagramFile {
        flavor: Flavor::Arc,
        intervals,
        matching,
        basepoint_after: None,
    })
    .map_err(|e| BimodError::Configuration(e.to_string()))?;
    Ok((zp, b, c))
}

/// Cup or cap bimodule at the top of interval `interval` of 𝒵. The R₊-cup
/// is (Id ⊗ i_∅)_* DDId(𝒵), the R₋-cup is (Id ⊗ i_bc)_* DDId(𝒵), both over
/// A(𝒵) ⊗ A(−𝒵′); caps are the same with the actions exchanged.
pub fn cup_cap_dd(
    z: &ArcDiagram,
    interval: usize,
    sign: CupSign,
    kind: CupKind,
) -> Result<TypeD<F2>, BimodError> {
    let (zp, b, c) = cup_diagram(z, interval)?;
    let small = StrandAlgebra::shared(&z.as_arc().reverse());
    let big = StrandAlgebra::shared(&zp.reverse());
    let f = hom_add_pair(&small, &big, b, c, sign == CupSign::RMinus)?;
    let id = dd_identity(&z.as_arc());
    let m = induct_right(&id, &f)?;
    match kind {
        CupKind::Cup => Ok(m),
        CupKind::Cap => Ok(m.swap_sides()?),
    }
}

/// Capping a pointless bordered arc: DDId(𝒵) with its right algebra
/// relabeled along A(−𝒵) ≅ A(−𝒵′), 𝒵′ being 𝒵 without empty intervals.
pub fn pointless_cap_dd(z: &ArcDiagram) -> Result<TypeD<F2>, BimodError> {
    let f = z.to_file();
    if !f.intervals.iter().any(|i| i.is_empty()) {
        return Err(BimodError::Configuration("no pointless interval".into()));
    }
    let zp = ArcDiagram::new(ArcDiagramFile {
        intervals: f
            .intervals
            .iter()
            .filter(|i| !i.is_empty())
            .cloned()
            .collect(),
        ..f.clone()
    })
    .map_err(|e| BimodError::Configuration(e.to_string()))?;
    let src = StrandAlgebra::shared(&z.reverse());
    let dst = StrandAlgebra::shared(&zp.reverse());
    let images = (0..src.dim())
        .map(|a| {
            dst.index_of(src.element(a))
                .map(|i| vec![i])
                .ok_or_else(|| {
                    BimodError::Configuration("algebras are not canonically isomorphic".into())
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let iso = AlgebraMap {
        source: src,
        target: dst,
        images,
    };
    induct_right(&dd_identity(z), &iso)
}

/// F̄rac(𝒵): one generator per basic idempotent, δ¹₂(i ⊗ a) = a ⊗ ν([a])·j.
pub fn frac_bimodule(z: &ArcDiagram) -> Result<TypeDA<FracScalar>, BimodError> {
    if !z.is_pmc() {
        return Err(BimodError::NotCircle);
    }
    let a = StrandAlgebra::shared(z);
    let alg: AlgRef = a.clone();
    let mut da = TypeDA::new(alg.clone(), alg.clone());
    let mut index = BTreeMap::new();
    for e in a.idempotents() {
        index.insert(e, da.add_generator(a.label(e), e, e));
    }
    let n = z.num_segments();
    for x in 0..a.dim() {
        if a.is_idempotent(x) {
            continue;
        }
        let w = nu(&a.support(x), n).map_err(|e| BimodError::Configuration(e.to_string()))?;
        da.add_op(
            index[&a.left_idem(x)],
            vec![x],
            x,
            index[&a.right_idem(x)],
            FracScalar::from_monomial(&w),
        );
    }
    Ok(da)
}

/// A boundary twist given as a composition of DA bimodules, applied right
/// to left with reduction after every step.
#[derive(Clone, Debug)]
pub struct TwistingBimodule {
    /// Pieces in application order: `pieces[0]` acts first.
    pub pieces: Vec<TypeDA<F2>>,
    pub algebra: AlgRef,
}

impl TwistingBimodule {
    pub fn identity(alg: AlgRef) -> Self {
        TwistingBimodule {
            pieces: Vec::new(),
            algebra: alg,
        }
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// τ̄ ⊠ M, reduced.
    pub fn apply<K: Scalar>(&self, m: &TypeD<K>) -> Result<TypeD<K>, BimodError> {
        let mut cur = m.clone();
        for p in &self.pieces {
            let pk: TypeDA<K> = p.map_scalars(|c| if c.0 { K::one() } else { K::zero() });
            cur = reduce(&box_tensor(&pk, &cur, DEFAULT_ITERATION_CAP)?);
        }
        Ok(cur)
    }

    /// The composite as a single DA bimodule.
    pub fn compose(&self) -> Result<TypeDA<F2>, BimodError> {
        let mut acc = TypeDA::identity(self.algebra.clone());
        for p in &self.pieces {
            acc = crate::structures::box_tensor_da(p, &acc, DEFAULT_ITERATION_CAP)?;
        }
        Ok(acc)
    }
}

/// A boundary Dehn twist τ̄ⁱ written as its arcslide factorization.
#[derive(Clone, Debug)]
pub struct TwistFactorization {
    pub slides: Vec<ArcslideDatum>,
    /// Whether each slide is used inverted.
    pub inverted: Vec<bool>,
    /// When set, the slides act on this larger diagram, of which 𝒵 is a full
    /// subdiagram under the given point map, and the twist is conjugated by
    /// the inclusion and projection of algebras.
    pub ambient: Option<(ArcDiagram, BTreeMap<u32, u32>)>,
}

impl TwistFactorization {
    /// The Dehn twist about the core of the annulus F(𝒵) for the diagram of
    /// [`cut1_diagram`]: the inverse of the genus-1 slide 3 over 2, restricted
    /// through the full-subdiagram inclusion.
    pub fn cut1_core() -> Self {
        TwistFactorization {
            slides: vec![ArcslideDatum {
                source: ArcDiagram::genus1(),
                moving: 3,
                over: 2,
            }],
            inverted: vec![true],
            ambient: Some((ArcDiagram::genus1(), (1..=4).map(|i| (i, i)).collect())),
        }
    }
}

/// The twisting bimodule on 𝒵 for the given boundary pairing. Each entry of
/// `twists` is the arcslide factorization of one paired twist; an empty
/// list gives the identity.
pub fn twisting_bimodule(
    z: &ArcDiagram,
    pairing: &[(usize, usize)],
    twists: &[TwistFactorization],
) -> Result<TwistingBimodule, BimodError> {
    if pairing.len() != twists.len() {
        return Err(BimodError::Unpaired(format!(
            "{} pairs but {} twist factorizations",
            pairing.len(),
            twists.len()
        )));
    }
    let comps = z.boundary_cycles().len();
    for &(i, j) in pairing {
        if i == j || i >= comps || j >= comps {
            return Err(BimodError::Unpaired(format!(
                "pair ({i}, {j}) of {comps} components"
            )));
        }
    }
    let small = StrandAlgebra::shared(z);
    let alg: AlgRef = small.clone();
    let mut pieces = Vec::new();
    for t in twists {
        if t.inverted.len() != t.slides.len() {
            return Err(BimodError::Configuration(
                "one inversion flag per slide".into(),
            ));
        }
        let conj = match &t.ambient {
            Some((big, map)) => {
                let big = StrandAlgebra::shared(big);
                let inc = TypeDA::from_algebra_map(&hom_inclusion(&small, &big, map)?)?;
                let proj = TypeDA::from_algebra_map(&hom_projection(&small, &big, map)?)?;
                Some((inc, proj))
            }
            None => None,
        };
        if let Some((inc, _)) = &conj {
            pieces.push(inc.clone());
        }
        for (s, &inv) in t.slides.iter().zip(&t.inverted) {
            pieces.push(if inv {
                arcslide_inverse_da(s)?
            } else {
                arcslide_da(s)?
            });
        }
        if let Some((_, proj)) = conj {
            pieces.push(proj);
        }
    }
    let mut expect = alg.key();
    for p in &pieces {
        if p.right.key() != expect {
            return Err(BimodError::Configuration(
                "twist pieces do not compose".into(),
            ));
        }
        expect = p.left.key();
    }
    if expect != alg.key() {
        return Err(BimodError::Configuration(
            "twist pieces must return to A(𝒵)".into(),
        ));
    }
    Ok(TwistingBimodule {
        pieces,
        algebra: alg,
    })
}
