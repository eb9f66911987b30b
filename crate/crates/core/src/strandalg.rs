//! The strands algebra A(𝒵) of an arc diagram.
//!
//! Computation happens in the big strands algebra on the points of 𝐚, whose
//! generators are increasing partial bijections. A basis element of A(𝒵) is a
//! set of moving strands together with a set of horizontal matched pairs, and
//! stands for the sum over all ways of placing each horizontal pair's strand
//! on one of its two points.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::arcdiagram::{ArcDiagram, Chord, SubdiagramKind};
use crate::coeff::ExponentVector;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("elements belong to different algebras ({0} vs {1})")]
    AmbientMismatch(String, String),
    #[error("invalid chord {0}")]
    InvalidChord(String),
    #[error("embedding is not a subdiagram")]
    NotSubdiagram,
    #[error("embedding is not full")]
    NotFull,
    #[error("points {0} and {1} are not a matched pair adjacent to terminal endpoints")]
    BadBcPair(u32, u32),
    #[error("unknown strand diagram {0}")]
    UnknownElement(String),
}

type Strands = SmallVec<[(u8, u8); 6]>;

/// A basis element of A(𝒵): moving strands (start < end, sorted by start) and
/// a bitmask of horizontal matched pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrandDiagram {
    pub moving: Strands,
    pub horizontal: u64,
}

/// Serialized strand diagram: point identifiers of moving strands and of
/// horizontal pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrandDiagramFile {
    #[serde(default)]
    pub moving: Vec<[u32; 2]>,
    #[serde(default)]
    pub horizontal: Vec<[u32; 2]>,
}

fn inversions(strands: &[(u8, u8)]) -> u32 {
    let mut inv = 0;
    for i in 0..strands.len() {
        for j in (i + 1)..strands.len() {
            let (s1, t1) = strands[i];
            let (s2, t2) = strands[j];
            if (s1 < s2) != (t1 < t2) {
                inv += 1;
            }
        }
    }
    inv
}

/// Product in the big strands algebra, or None when it vanishes.
fn big_mul(a: &[(u8, u8)], b: &[(u8, u8)]) -> Option<Strands> {
    if a.len() != b.len() {
        return None;
    }
    let mut out = Strands::new();
    for &(s, t) in a {
        let &(_, u) = b.iter().find(|&&(s2, _)| s2 == t)?;
        out.push((s, u));
    }
    out.sort_unstable();
    if inversions(&out) != inversions(a) + inversions(b) {
        return None;
    }
    Some(out)
}

/// Differential in the big strands algebra: resolve one crossing at a time,
/// keeping resolutions that drop the crossing number by exactly one.
fn big_d(a: &[(u8, u8)]) -> Vec<Strands> {
    let inv = inversions(a);
    let mut out = Vec::new();
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let (s1, t1) = a[i];
            let (s2, t2) = a[j];
            if (s1 < s2) != (t1 < t2) {
                let mut r: Strands = a.into();
                r[i] = (s1, t2);
                r[j] = (s2, t1);
                if inversions(&r) + 1 == inv {
                    out.push(r);
                }
            }
        }
    }
    out
}

fn toggle<T: Eq + std::hash::Hash>(set: &mut HashSet<T>, x: T) {
    if !set.remove(&x) {
        set.insert(x);
    }
}

/// Operations every algebra acting on a module provides: a finite basis
/// with structure constants in F₂, basic idempotents, and a differential.
pub trait Algebra: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn mul(&self, a: usize, b: usize) -> Vec<usize>;
    fn d(&self, a: usize) -> Vec<usize>;
    /// Basis index of the basic idempotent e with e·a = a.
    fn left_idem(&self, a: usize) -> usize;
    /// Basis index of the basic idempotent e with a·e = a.
    fn right_idem(&self, a: usize) -> usize;
    fn is_idempotent(&self, a: usize) -> bool {
        self.left_idem(a) == a && self.right_idem(a) == a
    }
    fn idempotents(&self) -> Vec<usize>;
    fn label(&self, a: usize) -> String;
    /// Stable key identifying the algebra.
    fn key(&self) -> String;
    fn to_json(&self, a: usize) -> serde_json::Value;
    fn from_json(&self, v: &serde_json::Value) -> Result<usize, AlgebraError>;
    /// Downcast helper for strand algebras.
    fn as_strand(&self) -> Option<&StrandAlgebra> {
        None
    }
    /// Downcast helper for tensor algebras.
    fn as_tensor(&self) -> Option<&TensorAlgebra> {
        None
    }
}

pub type AlgRef = Arc<dyn Algebra>;

/// Multiply two linear combinations.
pub fn mul_sums(alg: &dyn Algebra, a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut acc = HashSet::new();
    for &x in a {
        for &y in b {
            for z in alg.mul(x, y) {
                toggle(&mut acc, z);
            }
        }
    }
    let mut v: Vec<usize> = acc.into_iter().collect();
    v.sort_unstable();
    v
}

/// A(𝒵) for an arc diagram 𝒵, with lazily cached multiplication.
pub struct StrandAlgebra {
    z: ArcDiagram,
    basis: Vec<StrandDiagram>,
    index: HashMap<StrandDiagram, usize>,
    left: Vec<usize>,
    right: Vec<usize>,
    idems: Vec<usize>,
    idem_of_mask: HashMap<u64, usize>,
    d_table: Vec<Vec<usize>>,
    mul_cache: RwLock<HashMap<(u32, u32), Arc<[usize]>>>,
}

impl fmt::Debug for StrandAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "StrandAlgebra(dim {}, {})",
            self.basis.len(),
            self.z.content_key()
        )
    }
}

impl StrandAlgebra {
    pub fn new(z: &ArcDiagram) -> Self {
        assert!(z.num_points() <= 64, "at most 64 points supported");
        let basis = enumerate_basis(z);
        let index: HashMap<StrandDiagram, usize> = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, g)| (g, i))
            .collect();
        let mut idem_of_mask = HashMap::new();
        let mut idems = Vec::new();
        for (i, g) in basis.iter().enumerate() {
            if g.moving.is_empty() {
                idem_of_mask.insert(g.horizontal, i);
                idems.push(i);
            }
        }
        let left = basis
            .iter()
            .map(|g| idem_of_mask[&left_mask(z, g)])
            .collect();
        let right = basis
            .iter()
            .map(|g| idem_of_mask[&right_mask(z, g)])
            .collect();
        let mut alg = StrandAlgebra {
            z: z.clone(),
            basis,
            index,
            left,
            right,
            idems,
            idem_of_mask,
            d_table: Vec::new(),
            mul_cache: RwLock::new(HashMap::new()),
        };
        alg.d_table = (0..alg.basis.len()).map(|i| alg.compute_d(i)).collect();
        alg
    }

    pub fn shared(z: &ArcDiagram) -> Arc<StrandAlgebra> {
        static CACHE: std::sync::OnceLock<RwLock<HashMap<String, Arc<StrandAlgebra>>>> =
            std::sync::OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        let key = z.content_key();
        if let Some(a) = cache.read().unwrap().get(&key) {
            return a.clone();
        }
        let a = Arc::new(StrandAlgebra::new(z));
        cache.write().unwrap().entry(key).or_insert(a).clone()
    }

    pub fn diagram(&self) -> &ArcDiagram {
        &self.z
    }

    pub fn basis(&self) -> &[StrandDiagram] {
        &self.basis
    }

    pub fn element(&self, i: usize) -> &StrandDiagram {
        &self.basis[i]
    }

    pub fn index_of(&self, g: &StrandDiagram) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Basic idempotent I(𝐬) for a bitmask of matched pairs.
    pub fn idempotent(&self, mask: u64) -> usize {
        self.idem_of_mask[&mask]
    }

    pub fn idempotent_mask(&self, e: usize) -> u64 {
        self.basis[e].horizontal
    }

    /// Number of strands (|S|) of a basis element.
    pub fn strand_count(&self, a: usize) -> usize {
        let g = &self.basis[a];
        g.moving.len() + g.horizontal.count_ones() as usize
    }

    /// Basis indices of the summand with exactly `k` strands.
    pub fn summand(&self, k: usize) -> Vec<usize> {
        (0..self.basis.len())
            .filter(|&i| self.strand_count(i) == k)
            .collect()
    }

    fn expand(&self, g: &StrandDiagram) -> Vec<Strands> {
        let pairs: Vec<usize> = (0..self.z.num_pairs())
            .filter(|k| g.horizontal >> k & 1 == 1)
            .collect();
        let mut out = Vec::with_capacity(1 << pairs.len());
        for choice in 0..(1u32 << pairs.len()) {
            let mut s: Strands = g.moving.clone();
            for (bit, &k) in pairs.iter().enumerate() {
                let p = self.z.pair(k)[(choice >> bit & 1) as usize] as u8;
                s.push((p, p));
            }
            s.sort_unstable();
            out.push(s);
        }
        out
    }

    /// Regroup a sum of big-algebra generators into A(𝒵) basis elements.
    fn collapse(&self, terms: HashSet<Strands>) -> Vec<usize> {
        let mut groups: BTreeMap<StrandDiagram, usize> = BTreeMap::new();
        for s in &terms {
            let mut moving = Strands::new();
            let mut horizontal = 0u64;
            for &(a, b) in s {
                if a == b {
                    let k = self.z.pair_of(a as usize);
                    assert!(
                        horizontal >> k & 1 == 0,
                        "two horizontal strands on one pair"
                    );
                    horizontal |= 1 << k;
                } else {
                    moving.push((a, b));
                }
            }
            *groups
                .entry(StrandDiagram { moving, horizontal })
                .or_default() += 1;
        }
        let mut out = Vec::new();
        for (g, count) in groups {
            let full = 1usize << g.horizontal.count_ones();
            assert_eq!(count, full, "result is not a sum of complete sections");
            out.push(
                *self
                    .index
                    .get(&g)
                    .expect("product of basis elements lies in the subalgebra"),
            );
        }
        out.sort_unstable();
        out
    }

    fn compute_mul(&self, a: usize, b: usize) -> Vec<usize> {
        if self.right[a] != self.left[b] {
            return Vec::new();
        }
        let ea = self.expand(&self.basis[a]);
        let eb = self.expand(&self.basis[b]);
        let mut acc = HashSet::new();
        for x in &ea {
            for y in &eb {
                if let Some(p) = big_mul(x, y) {
                    toggle(&mut acc, p);
                }
            }
        }
        self.collapse(acc)
    }

    fn compute_d(&self, a: usize) -> Vec<usize> {
        let mut acc = HashSet::new();
        for x in self.expand(&self.basis[a]) {
            for y in big_d(&x) {
                toggle(&mut acc, y);
            }
        }
        self.collapse(acc)
    }

    /// a(ρ): the sum of all strand diagrams whose only moving strand is ρ.
    pub fn chord_element(&self, c: &Chord) -> Result<Vec<usize>, AlgebraError> {
        self.z
            .check_chord(c)
            .map_err(|_| AlgebraError::InvalidChord(format!("{c:?}")))?;
        let blocked = (1u64 << self.z.pair_of(c.start)) | (1u64 << self.z.pair_of(c.end));
        let free: Vec<usize> = (0..self.z.num_pairs())
            .filter(|k| blocked >> k & 1 == 0)
            .collect();
        let mut out = Vec::new();
        for sub in 0..(1u64 << free.len()) {
            let mut h = 0u64;
            for (bit, &k) in free.iter().enumerate() {
                if sub >> bit & 1 == 1 {
                    h |= 1 << k;
                }
            }
            let g = StrandDiagram {
                moving: smallvec::smallvec![(c.start as u8, c.end as u8)],
                horizontal: h,
            };
            out.push(self.index[&g]);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// The basis element with single moving strand ρ and idempotent data
    /// given by the left idempotent mask.
    pub fn chord_with_left(&self, c: &Chord, left_mask: u64) -> Option<usize> {
        let k = self.z.pair_of(c.start);
        if left_mask >> k & 1 == 0 {
            return None;
        }
        let h = left_mask & !(1u64 << k);
        if h >> self.z.pair_of(c.end) & 1 == 1 {
            return None;
        }
        self.index_of(&StrandDiagram {
            moving: smallvec::smallvec![(c.start as u8, c.end as u8)],
            horizontal: h,
        })
    }

    /// Support of a basis element: total coverage of its moving strands.
    pub fn support(&self, a: usize) -> ExponentVector {
        let mut v = vec![0; self.z.num_segments()];
        for &(s, t) in &self.basis[a].moving {
            let w = self.z.strand_support(s as usize, t as usize);
            for (x, y) in v.iter_mut().zip(w.0) {
                *x += y;
            }
        }
        ExponentVector(v)
    }

    /// Left idempotent as a matched-pair bitmask.
    pub fn left_mask(&self, a: usize) -> u64 {
        left_mask(&self.z, &self.basis[a])
    }

    pub fn right_mask(&self, a: usize) -> u64 {
        right_mask(&self.z, &self.basis[a])
    }

    pub fn element_to_file(&self, a: usize) -> StrandDiagramFile {
        let g = &self.basis[a];
        StrandDiagramFile {
            moving: g
                .moving
                .iter()
                .map(|&(s, t)| [self.z.point_id(s as usize), self.z.point_id(t as usize)])
                .collect(),
            horizontal: (0..self.z.num_pairs())
                .filter(|k| g.horizontal >> k & 1 == 1)
                .map(|k| {
                    let [p, q] = self.z.pair(k);
                    [self.z.point_id(p), self.z.point_id(q)]
                })
                .collect(),
        }
    }

    pub fn element_from_file(&self, f: &StrandDiagramFile) -> Result<usize, AlgebraError> {
        let bad = || AlgebraError::UnknownElement(format!("{f:?}"));
        let mut moving = Strands::new();
        for &[s, t] in &f.moving {
            let s = self.z.position_of(s).ok_or_else(bad)?;
            let t = self.z.position_of(t).ok_or_else(bad)?;
            moving.push((s as u8, t as u8));
        }
        moving.sort_unstable();
        let mut horizontal = 0u64;
        for &[p, q] in &f.horizontal {
            let p = self.z.position_of(p).ok_or_else(bad)?;
            let q = self.z.position_of(q).ok_or_else(bad)?;
            if self.z.partner(p) != q {
                return Err(bad());
            }
            horizontal |= 1 << self.z.pair_of(p);
        }
        self.index_of(&StrandDiagram { moving, horizontal })
            .ok_or_else(bad)
    }
}

fn left_mask(z: &ArcDiagram, g: &StrandDiagram) -> u64 {
    g.moving
        .iter()
        .fold(g.horizontal, |m, &(s, _)| m | 1 << z.pair_of(s as usize))
}

fn right_mask(z: &ArcDiagram, g: &StrandDiagram) -> u64 {
    g.moving
        .iter()
        .fold(g.horizontal, |m, &(_, t)| m | 1 << z.pair_of(t as usize))
}

fn enumerate_basis(z: &ArcDiagram) -> Vec<StrandDiagram> {
    let n = z.num_points();
    let mut moving_sets = Vec::new();
    let mut cur = Strands::new();
    fn rec(
        z: &ArcDiagram,
        s: usize,
        n: usize,
        start_pairs: u64,
        end_pairs: u64,
        cur: &mut Strands,
        out: &mut Vec<(Strands, u64, u64)>,
    ) {
        if s == n {
            out.push((cur.clone(), start_pairs, end_pairs));
            return;
        }
        rec(z, s + 1, n, start_pairs, end_pairs, cur, out);
        let ps = z.pair_of(s);
        if start_pairs >> ps & 1 == 1 {
            return;
        }
        let r = z.interval_range(z.interval_of(s));
        for t in (s + 1)..r.end {
            let pt = z.pair_of(t);
            if end_pairs >> pt & 1 == 1 {
                continue;
            }
            cur.push((s as u8, t as u8));
            rec(
                z,
                s + 1,
                n,
                start_pairs | 1 << ps,
                end_pairs | 1 << pt,
                cur,
                out,
            );
            cur.pop();
        }
    }
    rec(z, 0, n, 0, 0, &mut cur, &mut moving_sets);
    let all_pairs = if z.num_pairs() == 64 {
        u64::MAX
    } else {
        (1u64 << z.num_pairs()) - 1
    };
    let mut basis = Vec::new();
    for (moving, sp, ep) in moving_sets {
        let free = all_pairs & !(sp | ep);
        // iterate over all submasks of `free`
        let mut sub = free;
        loop {
            basis.push(StrandDiagram {
                moving: moving.clone(),
                horizontal: sub,
            });
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
    }
    basis.sort_by(|a, b| {
        (a.moving.len() + a.horizontal.count_ones() as usize)
            .cmp(&(b.moving.len() + b.horizontal.count_ones() as usize))
            .then_with(|| a.cmp(b))
    });
    basis
}

impl Algebra for StrandAlgebra {
    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn mul(&self, a: usize, b: usize) -> Vec<usize> {
        if self.right[a] != self.left[b] {
            return Vec::new();
        }
        if self.basis[a].moving.is_empty() {
            return vec![b];
        }
        if self.basis[b].moving.is_empty() {
            return vec![a];
        }
        let key = (a as u32, b as u32);
        if let Some(v) = self.mul_cache.read().unwrap().get(&key) {
            return v.to_vec();
        }
        let v: Arc<[usize]> = self.compute_mul(a, b).into();
        self.mul_cache.write().unwrap().insert(key, v.clone());
        v.to_vec()
    }

    fn d(&self, a: usize) -> Vec<usize> {
        self.d_table[a].clone()
    }

    fn left_idem(&self, a: usize) -> usize {
        self.left[a]
    }

    fn right_idem(&self, a: usize) -> usize {
        self.right[a]
    }

    fn idempotents(&self) -> Vec<usize> {
        self.idems.clone()
    }

    fn label(&self, a: usize) -> String {
        let g = &self.basis[a];
        let mut parts: Vec<String> = g
            .moving
            .iter()
            .map(|&(s, t)| {
                format!(
                    "{}->{}",
                    self.z.point_id(s as usize),
                    self.z.point_id(t as usize)
                )
            })
            .collect();
        for k in 0..self.z.num_pairs() {
            if g.horizontal >> k & 1 == 1 {
                let [p, q] = self.z.pair(k);
                parts.push(format!("[{},{}]", self.z.point_id(p), self.z.point_id(q)));
            }
        }
        if parts.is_empty() {
            "1∅".to_string()
        } else {
            parts.join(" ")
        }
    }

    fn key(&self) -> String {
        format!("A({})", self.z.content_key())
    }

    fn to_json(&self, a: usize) -> serde_json::Value {
        serde_json::to_value(self.element_to_file(a)).expect("serializable")
    }

    fn from_json(&self, v: &serde_json::Value) -> Result<usize, AlgebraError> {
        let f: StrandDiagramFile = serde_json::from_value(v.clone())
            .map_err(|e| AlgebraError::UnknownElement(e.to_string()))?;
        self.element_from_file(&f)
    }

    fn as_strand(&self) -> Option<&StrandAlgebra> {
        Some(self)
    }
}

/// A ⊗ B with basis pairs indexed as i·dim(B) + j.
#[derive(Debug)]
pub struct TensorAlgebra {
    pub left: AlgRef,
    pub right: AlgRef,
    dr: usize,
}

impl TensorAlgebra {
    pub fn new(left: AlgRef, right: AlgRef) -> Self {
        let dr = right.dim();
        TensorAlgebra { left, right, dr }
    }

    pub fn pair(&self, i: usize, j: usize) -> usize {
        i * self.dr + j
    }

    pub fn split(&self, a: usize) -> (usize, usize) {
        (a / self.dr, a % self.dr)
    }
}

impl Algebra for TensorAlgebra {
    fn dim(&self) -> usize {
        self.left.dim() * self.dr
    }

    fn mul(&self, a: usize, b: usize) -> Vec<usize> {
        let (a1, a2) = self.split(a);
        let (b1, b2) = self.split(b);
        let l = self.left.mul(a1, b1);
        if l.is_empty() {
            return l;
        }
        let r = self.right.mul(a2, b2);
        let mut out = Vec::with_capacity(l.len() * r.len());
        for &x in &l {
            for &y in &r {
                out.push(self.pair(x, y));
            }
        }
        out.sort_unstable();
        out
    }

    fn d(&self, a: usize) -> Vec<usize> {
        let (a1, a2) = self.split(a);
        let mut acc = HashSet::new();
        for x in self.left.d(a1) {
            toggle(&mut acc, self.pair(x, a2));
        }
        for y in self.right.d(a2) {
            toggle(&mut acc, self.pair(a1, y));
        }
        let mut v: Vec<usize> = acc.into_iter().collect();
        v.sort_unstable();
        v
    }

    fn left_idem(&self, a: usize) -> usize {
        let (a1, a2) = self.split(a);
        self.pair(self.left.left_idem(a1), self.right.left_idem(a2))
    }

    fn right_idem(&self, a: usize) -> usize {
        let (a1, a2) = self.split(a);
        self.pair(self.left.right_idem(a1), self.right.right_idem(a2))
    }

    fn idempotents(&self) -> Vec<usize> {
        let ri = self.right.idempotents();
        let mut out = Vec::new();
        for i in self.left.idempotents() {
            for &j in &ri {
                out.push(self.pair(i, j));
            }
        }
        out
    }

    fn label(&self, a: usize) -> String {
        let (a1, a2) = self.split(a);
        format!("({}) ⊗ ({})", self.left.label(a1), self.right.label(a2))
    }

    fn key(&self) -> String {
        format!("{} ⊗ {}", self.left.key(), self.right.key())
    }

    fn to_json(&self, a: usize) -> serde_json::Value {
        let (a1, a2) = self.split(a);
        serde_json::json!({"left": self.left.to_json(a1), "right": self.right.to_json(a2)})
    }

    fn from_json(&self, v: &serde_json::Value) -> Result<usize, AlgebraError> {
        let bad = || AlgebraError::UnknownElement(v.to_string());
        let l = self.left.from_json(v.get("left").ok_or_else(bad)?)?;
        let r = self.right.from_json(v.get("right").ok_or_else(bad)?)?;
        Ok(self.pair(l, r))
    }

    fn as_tensor(&self) -> Option<&TensorAlgebra> {
        Some(self)
    }
}

/// The trivial algebra F₂ (one idempotent), acting on ordinary complexes.
#[derive(Debug, Default)]
pub struct GroundField;

impl Algebra for GroundField {
    fn dim(&self) -> usize {
        1
    }
    fn mul(&self, _: usize, _: usize) -> Vec<usize> {
        vec![0]
    }
    fn d(&self, _: usize) -> Vec<usize> {
        Vec::new()
    }
    fn left_idem(&self, _: usize) -> usize {
        0
    }
    fn right_idem(&self, _: usize) -> usize {
        0
    }
    fn idempotents(&self) -> Vec<usize> {
        vec![0]
    }
    fn label(&self, _: usize) -> String {
        "1".into()
    }
    fn key(&self) -> String {
        "F2".into()
    }
    fn to_json(&self, _: usize) -> serde_json::Value {
        serde_json::json!("1")
    }
    fn from_json(&self, _: &serde_json::Value) -> Result<usize, AlgebraError> {
        Ok(0)
    }
}

/// An F₂-linear map between algebras, stored by its values on basis
/// elements.
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    pub source: AlgRef,
    pub target: AlgRef,
    pub images: Vec<Vec<usize>>,
}

impl AlgebraMap {
    pub fn identity(a: AlgRef) -> Self {
        let images = (0..a.dim()).map(|i| vec![i]).collect();
        AlgebraMap {
            source: a.clone(),
            target: a,
            images,
        }
    }

    pub fn apply(&self, a: usize) -> &[usize] {
        &self.images[a]
    }

    pub fn apply_sum(&self, xs: &[usize]) -> Vec<usize> {
        let mut acc = HashSet::new();
        for &x in xs {
            for &y in &self.images[x] {
                toggle(&mut acc, y);
            }
        }
        let mut v: Vec<usize> = acc.into_iter().collect();
        v.sort_unstable();
        v
    }

    /// f ⊗ g between tensor algebras.
    pub fn tensor(f: &AlgebraMap, g: &AlgebraMap) -> AlgebraMap {
        let source = Arc::new(TensorAlgebra::new(f.source.clone(), g.source.clone()));
        let target = Arc::new(TensorAlgebra::new(f.target.clone(), g.target.clone()));
        let mut images = Vec::with_capacity(source.dim());
        for i in 0..f.source.dim() {
            for j in 0..g.source.dim() {
                let mut v = Vec::new();
                for &x in &f.images[i] {
                    for &y in &g.images[j] {
                        v.push(target.pair(x, y));
                    }
                }
                v.sort_unstable();
                images.push(v);
            }
        }
        AlgebraMap {
            source,
            target,
            images,
        }
    }

    /// Check f(ab) = f(a)f(b) and f(da) = d f(a) on all basis pairs.
    pub fn check_homomorphism(&self) -> Result<(), String> {
        let s = &self.source;
        let t = &self.target;
        for a in 0..s.dim() {
            let lhs = self.apply_sum(&s.d(a));
            let mut rhs = HashSet::new();
            for &x in &self.images[a] {
                for y in t.d(x) {
                    toggle(&mut rhs, y);
                }
            }
            let mut rhs: Vec<usize> = rhs.into_iter().collect();
            rhs.sort_unstable();
            if lhs != rhs {
                return Err(format!("d fails on {}", s.label(a)));
            }
            for b in 0..s.dim() {
                let lhs = self.apply_sum(&s.mul(a, b));
                let rhs = mul_sums(t.as_ref(), &self.images[a], &self.images[b]);
                if lhs != rhs {
                    return Err(format!("product fails on {} · {}", s.label(a), s.label(b)));
                }
            }
        }
        Ok(())
    }
}

/// The inclusion A(𝒵) → A(𝒵′) of a subdiagram, given a map of point ids.
pub fn hom_inclusion(
    small: &Arc<StrandAlgebra>,
    big: &Arc<StrandAlgebra>,
    map: &BTreeMap<u32, u32>,
) -> Result<AlgebraMap, AlgebraError> {
    let (kind, emb) = ArcDiagram::subdiagram_embed(small.diagram(), big.diagram(), map);
    if kind == SubdiagramKind::NotASubdiagram {
        return Err(AlgebraError::NotSubdiagram);
    }
    let emb = emb.unwrap();
    let images = (0..small.dim())
        .map(|a| vec![push_forward(small, big, &emb.positions, a, 0)])
        .collect();
    Ok(AlgebraMap {
        source: small.clone(),
        target: big.clone(),
        images,
    })
}

fn push_forward(
    small: &StrandAlgebra,
    big: &StrandAlgebra,
    positions: &[usize],
    a: usize,
    extra_horizontal: u64,
) -> usize {
    let g = small.element(a);
    let mut moving: Strands = g
        .moving
        .iter()
        .map(|&(s, t)| (positions[s as usize] as u8, positions[t as usize] as u8))
        .collect();
    moving.sort_unstable();
    let mut horizontal = extra_horizontal;
    for k in 0..small.diagram().num_pairs() {
        if g.horizontal >> k & 1 == 1 {
            let p = small.diagram().pair(k)[0];
            horizontal |= 1 << big.diagram().pair_of(positions[p]);
        }
    }
    big.index_of(&StrandDiagram { moving, horizontal })
        .expect("image of a strand diagram under an embedding")
}

/// The projection A(𝒵′) → A(𝒵) for a full subdiagram 𝒵 ⊂ 𝒵′: the identity
/// on strand diagrams contained in 𝒵 and zero on the rest.
pub fn hom_projection(
    small: &Arc<StrandAlgebra>,
    big: &Arc<StrandAlgebra>,
    map: &BTreeMap<u32, u32>,
) -> Result<AlgebraMap, AlgebraError> {
    let (kind, emb) = ArcDiagram::subdiagram_embed(small.diagram(), big.diagram(), map);
    match kind {
        SubdiagramKind::NotASubdiagram => return Err(AlgebraError::NotSubdiagram),
        SubdiagramKind::Subdiagram => return Err(AlgebraError::NotFull),
        SubdiagramKind::FullSubdiagram => {}
    }
    let positions = emb.unwrap().positions;
    let mut inverse = vec![0usize; big.diagram().num_points()];
    for (p, &q) in positions.iter().enumerate() {
        inverse[q] = p;
    }
    let zs = small.diagram();
    let images = (0..big.dim())
        .map(|a| {
            let g = big.element(a);
            let mut moving = Strands::new();
            for &(s, t) in &g.moving {
                let (s2, t2) = (inverse[s as usize], inverse[t as usize]);
                if zs.interval_of(s2) != zs.interval_of(t2) || s2 >= t2 {
                    return Vec::new();
                }
                moving.push((s2 as u8, t2 as u8));
            }
            moving.sort_unstable();
            let mut horizontal = 0u64;
            for k in 0..big.diagram().num_pairs() {
                if g.horizontal >> k & 1 == 1 {
                    let p = big.diagram().pair(k)[0];
                    horizontal |= 1 << zs.pair_of(inverse[p]);
                }
            }
            match small.index_of(&StrandDiagram { moving, horizontal }) {
                Some(i) => vec![i],
                None => Vec::new(),
            }
        })
        .collect();
    Ok(AlgebraMap {
        source: big.clone(),
        target: small.clone(),
        images,
    })
}

/// Check that points b, c of 𝒵 form a matched pair with each point adjacent
/// to the terminal (top) endpoint of its interval, and return the embedding
/// of 𝒵′ = 𝒵 ∖ {b, c} identified by point ids.
fn bc_embedding(
    small: &StrandAlgebra,
    big: &StrandAlgebra,
    b: u32,
    c: u32,
    require_terminal: bool,
) -> Result<(Vec<usize>, usize), AlgebraError> {
    let zb = big.diagram();
    let bad = || AlgebraError::BadBcPair(b, c);
    let pb = zb.position_of(b).ok_or_else(bad)?;
    let pc = zb.position_of(c).ok_or_else(bad)?;
    if zb.partner(pb) != pc {
        return Err(bad());
    }
    if require_terminal {
        for p in [pb, pc] {
            let r = zb.interval_range(zb.interval_of(p));
            if p + 1 != r.end {
                return Err(bad());
            }
        }
    }
    let zs = small.diagram();
    if zs.num_points() + 2 != zb.num_points() {
        return Err(bad());
    }
    let mut positions = Vec::with_capacity(zs.num_points());
    for p in 0..zs.num_points() {
        positions.push(zb.position_of(zs.point_id(p)).ok_or_else(bad)?);
    }
    Ok((positions, zb.pair_of(pb)))
}

/// i_∅: A(𝒵′) → A(𝒵) viewing a strand diagram of 𝒵′ inside 𝒵, leaving the
/// new pair {b, c} unoccupied.
pub fn hom_i_empty(
    small: &Arc<StrandAlgebra>,
    big: &Arc<StrandAlgebra>,
    b: u32,
    c: u32,
) -> Result<AlgebraMap, AlgebraError> {
    let (positions, _) = bc_embedding(small, big, b, c, true)?;
    let images = (0..small.dim())
        .map(|a| vec![push_forward(small, big, &positions, a, 0)])
        .collect();
    Ok(AlgebraMap {
        source: small.clone(),
        target: big.clone(),
        images,
    })
}

/// i_bc: A(𝒵′) → A(𝒵) placing a horizontal pair at {b, c}.
pub fn hom_i_bc(
    small: &Arc<StrandAlgebra>,
    big: &Arc<StrandAlgebra>,
    b: u32,
    c: u32,
) -> Result<AlgebraMap, AlgebraError> {
    let (positions, k) = bc_embedding(small, big, b, c, true)?;
    let images = (0..small.dim())
        .map(|a| vec![push_forward(small, big, &positions, a, 1 << k)])
        .collect();
    Ok(AlgebraMap {
        source: small.clone(),
        target: big.clone(),
        images,
    })
}

/// The inclusion A(𝒵′) → A(𝒵) of 𝒵′ = 𝒵 ∖ {b, c} for a matched pair
/// {b, c} anywhere in 𝒵, leaving the pair empty or placing a horizontal
/// pair on it.
pub fn hom_add_pair(
    small: &Arc<StrandAlgebra>,
    big: &Arc<StrandAlgebra>,
    b: u32,
    c: u32,
    occupied: bool,
) -> Result<AlgebraMap, AlgebraError> {
    let (positions, k) = bc_embedding(small, big, b, c, false)?;
    let extra = if occupied { 1 << k } else { 0 };
    let images = (0..small.dim())
        .map(|a| vec![push_forward(small, big, &positions, a, extra)])
        .collect();
    Ok(AlgebraMap {
        source: small.clone(),
        target: big.clone(),
        images,
    })
}

/// The identification A(𝒵) → A(−𝒵) = A(𝒵)^op that reflects every strand
/// diagram; it reverses products and commutes with differentials.
pub fn opposite(a: &Arc<StrandAlgebra>) -> (Arc<StrandAlgebra>, AlgebraMap) {
    let z = a.diagram();
    let rz = z.reverse();
    let ra = StrandAlgebra::shared(&rz);
    let n = z.num_points();
    let images = (0..a.dim())
        .map(|i| {
            let g = a.element(i);
            let mut moving: Strands = g
                .moving
                .iter()
                .map(|&(s, t)| ((n - 1 - t as usize) as u8, (n - 1 - s as usize) as u8))
                .collect();
            moving.sort_unstable();
            let mut horizontal = 0u64;
            for k in 0..z.num_pairs() {
                if g.horizontal >> k & 1 == 1 {
                    horizontal |= 1 << rz.pair_of(n - 1 - z.pair(k)[0]);
                }
            }
            vec![ra.index_of(&StrandDiagram { moving, horizontal }).unwrap()]
        })
        .collect();
    (
        ra.clone(),
        AlgebraMap {
            source: a.clone(),
            target: ra,
            images,
        },
    )
}

/// Complement of an idempotent mask among all matched pairs.
pub fn complement_mask(z: &ArcDiagram, mask: u64) -> u64 {
    let all = if z.num_pairs() == 64 {
        u64::MAX
    } else {
        (1u64 << z.num_pairs()) - 1
    };
    all & !mask
}

/// Pair index in −𝒵 of pair k of 𝒵.
pub fn reverse_pair(z: &ArcDiagram, rz: &ArcDiagram, k: usize) -> usize {
    rz.pair_of(z.reverse_position(z.pair(k)[0]))
}

/// Map a pair mask of 𝒵 to the corresponding mask in −𝒵.
pub fn reverse_mask(z: &ArcDiagram, rz: &ArcDiagram, mask: u64) -> u64 {
    (0..z.num_pairs())
        .filter(|k| mask >> k & 1 == 1)
        .fold(0, |m, k| m | 1 << reverse_pair(z, rz, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chord(z: &ArcDiagram, s: u32, t: u32) -> Chord {
        let (s, t) = (z.position_of(s).unwrap(), z.position_of(t).unwrap());
        Chord {
            interval: z.interval_of(s),
            start: s,
            end: t,
        }
    }

    #[test]
    fn genus1_middle_summand() {
        let z = ArcDiagram::genus1();
        let a = StrandAlgebra::new(&z);
        assert_eq!(a.summand(1).len(), 8);
        let r1 = a.chord_with_left(&chord(&z, 1, 2), 0b01).unwrap();
        let r2 = a.chord_with_left(&chord(&z, 2, 3), 0b10).unwrap();
        let r3 = a.chord_with_left(&chord(&z, 3, 4), 0b01).unwrap();
        assert!(a.mul(r2, r1).is_empty());
        assert!(a.mul(r3, r2).is_empty());
        assert_eq!(a.mul(r2, r3).len(), 1);
        assert_eq!(a.mul(r1, r2).len(), 1);
    }
}
