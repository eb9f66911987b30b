//! Chain complexes, morphism complexes and homology ranks.

use std::collections::BTreeMap;

use super::{map_add, StructureError, TypeD};
use crate::coeff::{f2_rank, poly_gcd, rank_over_fraction_field, LaurentPoly, RankMode, Scalar};

/// A finitely generated chain complex; `d[i]` is the image of generator i.
#[derive(Clone, Debug, Default)]
pub struct ChainComplex<K: Scalar> {
    pub names: Vec<String>,
    pub d: Vec<BTreeMap<usize, K>>,
}

impl<K: Scalar> ChainComplex<K> {
    pub fn new() -> Self {
        ChainComplex {
            names: Vec::new(),
            d: Vec::new(),
        }
    }

    pub fn add_generator(&mut self, name: String) -> usize {
        self.names.push(name);
        self.d.push(BTreeMap::new());
        self.names.len() - 1
    }

    pub fn add_term(&mut self, from: usize, to: usize, c: K) {
        map_add(&mut self.d[from], to, c);
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Generators i for which d²(i) ≠ 0.
    pub fn d_squared_failures(&self) -> Vec<usize> {
        let mut bad = Vec::new();
        for (i, img) in self.d.iter().enumerate() {
            let mut acc: BTreeMap<usize, K> = BTreeMap::new();
            for (&j, c) in img {
                for (&k, c2) in &self.d[j] {
                    map_add(&mut acc, k, c.mul(c2));
                }
            }
            if !acc.is_empty() {
                bad.push(i);
            }
        }
        bad
    }

    /// True when every nonzero entry of d is 1.
    pub fn is_constant(&self) -> bool {
        self.d
            .iter()
            .all(|img| img.values().all(|c| c.to_frac().is_one()))
    }

    /// Rank of d over the coefficient field.
    pub fn rank_d(&self, mode: RankMode, seed: u64) -> usize {
        let n = self.len();
        if n == 0 {
            return 0;
        }
        if self.is_constant() {
            let words = n.div_ceil(64);
            let rows: Vec<Vec<u64>> = self
                .d
                .iter()
                .map(|img| {
                    let mut r = vec![0u64; words];
                    for &j in img.keys() {
                        r[j / 64] |= 1 << (j % 64);
                    }
                    r
                })
                .collect();
            return f2_rank(rows);
        }
        rank_over_fraction_field(&self.laurent_rows(), mode, seed)
    }

    /// Rows of d with denominators cleared row by row.
    pub fn laurent_rows(&self) -> Vec<Vec<LaurentPoly>> {
        let n = self.len();
        self.d
            .iter()
            .map(|img| {
                let fr: Vec<(usize, crate::coeff::FracScalar)> =
                    img.iter().map(|(&j, c)| (j, c.to_frac())).collect();
                let mut l = LaurentPoly::one();
                for (_, f) in &fr {
                    let den = f.denominator();
                    let g = poly_gcd(&l, den);
                    l = l.mul(&den.div_exact(&g).expect("gcd divides"));
                }
                let mut row = vec![LaurentPoly::zero(); n];
                for (j, f) in fr {
                    let scale = l.div_exact(f.denominator()).expect("lcm is a multiple");
                    row[j] = f.numerator().mul(&scale);
                }
                row
            })
            .collect()
    }

    /// dim H_* = n − 2·rank(d), valid once d² = 0.
    pub fn homology_rank(&self, mode: RankMode, seed: u64) -> usize {
        self.len() - 2 * self.rank_d(mode, seed)
    }
}

/// Basis of a morphism complex: (p, a, q) stands for p ↦ a ⊗ q.
pub type MorBasis = Vec<(usize, usize, usize)>;

/// The complex Mor(P, Q) of type D morphisms over a common algebra.
pub fn mor_complex<K: Scalar>(
    p: &TypeD<K>,
    q: &TypeD<K>,
) -> Result<(ChainComplex<K>, MorBasis), StructureError> {
    if p.alg.key() != q.alg.key() {
        return Err(StructureError::AlgebraMismatch(p.alg.key(), q.alg.key()));
    }
    let alg = &p.alg;
    let mut between: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for a in 0..alg.dim() {
        between
            .entry((alg.left_idem(a), alg.right_idem(a)))
            .or_default()
            .push(a);
    }
    let mut cx = ChainComplex::new();
    let mut basis = Vec::new();
    let mut index = BTreeMap::new();
    for (i, gp) in p.gens.iter().enumerate() {
        for (j, gq) in q.gens.iter().enumerate() {
            if let Some(list) = between.get(&(gp.idem, gq.idem)) {
                for &a in list {
                    let id = cx.add_generator(format!("{}->{}·{}", gp.name, alg.label(a), gq.name));
                    index.insert((i, a, j), id);
                    basis.push((i, a, j));
                }
            }
        }
    }
    for (&(i, a, j), &src) in &index {
        for b in alg.d(a) {
            cx.add_term(src, index[&(i, b, j)], K::one());
        }
        for (&(b, j2), c) in &q.delta[j] {
            for ab in alg.mul(a, b) {
                cx.add_term(src, index[&(i, ab, j2)], c.clone());
            }
        }
    }
    // pre-composition with δ¹_P
    for (i2, arrows) in p.delta.iter().enumerate() {
        for (&(b, i), c) in arrows {
            for (&(ii, a, j), &src) in index.range((i, 0, 0)..(i + 1, 0, 0)) {
                debug_assert_eq!(ii, i);
                for ba in alg.mul(b, a) {
                    cx.add_term(src, index[&(i2, ba, j)], c.clone());
                }
            }
        }
    }
    Ok((cx, basis))
}

/// dim H_*(Mor(P, Q)).
pub fn homology_rank<K: Scalar>(
    p: &TypeD<K>,
    q: &TypeD<K>,
    mode: RankMode,
    seed: u64,
) -> Result<usize, StructureError> {
    let (cx, _) = mor_complex(p, q)?;
    Ok(cx.homology_rank(mode, seed))
}
