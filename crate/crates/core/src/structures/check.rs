//! Structure equations for type D structures, DA bimodules and A∞-modules,
//! reported term by term.

use std::collections::BTreeMap;
use std::fmt;

use super::{map_add, Arrows, TypeA, TypeD, TypeDA};
use crate::coeff::Scalar;
use crate::strandalg::Algebra;

/// Violations found by a structure check, each naming the generator and
/// inputs where the equation fails.
#[derive(Clone, Debug, Default)]
pub struct Diagnostics {
    pub problems: Vec<String>,
}

impl Diagnostics {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }

    fn push(&mut self, s: String) {
        // keep reports readable on badly broken inputs
        if self.problems.len() < 64 {
            self.problems.push(s);
        }
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "ok");
        }
        write!(f, "{}", self.problems.join("; "))
    }
}

impl<K: Scalar> TypeD<K> {
    /// Check idempotent compatibility and (μ₁ ⊗ 𝕀)δ¹ + (μ₂ ⊗ 𝕀)(𝕀 ⊗ δ¹)δ¹ = 0.
    pub fn check(&self) -> Diagnostics {
        let alg = &self.alg;
        let mut diag = Diagnostics::default();
        for g in &self.gens {
            if !alg.is_idempotent(g.idem) {
                diag.push(format!("generator {} has non-idempotent label", g.name));
            }
        }
        for (x, arrows) in self.delta.iter().enumerate() {
            for &(a, y) in arrows.keys() {
                if alg.left_idem(a) != self.gens[x].idem || alg.right_idem(a) != self.gens[y].idem {
                    diag.push(format!(
                        "arrow {} -> {} ⊗ {} violates idempotents",
                        self.gens[x].name,
                        alg.label(a),
                        self.gens[y].name
                    ));
                }
            }
        }
        if !diag.ok() {
            return diag;
        }
        for (x, arrows) in self.delta.iter().enumerate() {
            let mut acc: Arrows<K> = BTreeMap::new();
            for (&(a, y), c) in arrows {
                for b in alg.d(a) {
                    map_add(&mut acc, (b, y), c.clone());
                }
                for (&(b, w), c2) in &self.delta[y] {
                    let cc = c.mul(c2);
                    for ab in alg.mul(a, b) {
                        map_add(&mut acc, (ab, w), cc.clone());
                    }
                }
            }
            for ((a, w), c) in acc {
                diag.push(format!(
                    "δ² of {} has term {}·{} ⊗ {}",
                    self.gens[x].name,
                    c.to_text(),
                    alg.label(a),
                    self.gens[w].name
                ));
            }
        }
        diag
    }
}

/// Sequences of non-idempotent elements a₁,…,aₙ composable from `start`.
fn sequences(alg: &dyn Algebra, start: usize, n: usize) -> Vec<Vec<usize>> {
    let mut by_left: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for a in 0..alg.dim() {
        if !alg.is_idempotent(a) {
            by_left.entry(alg.left_idem(a)).or_default().push(a);
        }
    }
    let mut out = Vec::new();
    let mut stack = vec![(Vec::new(), start)];
    while let Some((seq, e)) = stack.pop() {
        if seq.len() == n {
            out.push(seq);
            continue;
        }
        if let Some(list) = by_left.get(&e) {
            for &a in list {
                let mut s = seq.clone();
                s.push(a);
                stack.push((s, alg.right_idem(a)));
            }
        }
    }
    out
}

impl<K: Scalar> TypeDA<K> {
    /// Check the DA structure relations on all input sequences of length at
    /// most `max_inputs`.
    pub fn check(&self, max_inputs: usize) -> Diagnostics {
        let mut diag = Diagnostics::default();
        let (la, ra) = (&self.left, &self.right);
        for ((x, inputs), arrows) in &self.ops {
            let mut e = self.gens[*x].right_idem;
            for &a in inputs {
                if ra.is_idempotent(a) || ra.left_idem(a) != e {
                    diag.push(format!(
                        "op of {} has incompatible inputs",
                        self.gens[*x].name
                    ));
                }
                e = ra.right_idem(a);
            }
            for &(b, y) in arrows.keys() {
                if la.left_idem(b) != self.gens[*x].left_idem
                    || la.right_idem(b) != self.gens[y].left_idem
                    || self.gens[y].right_idem != e
                {
                    diag.push(format!(
                        "op {} -> {} ⊗ {} violates idempotents",
                        self.gens[*x].name,
                        la.label(b),
                        self.gens[y].name
                    ));
                }
            }
        }
        if !diag.ok() {
            return diag;
        }
        let empty = BTreeMap::new();
        let op = |x: usize, seq: &[usize]| -> &Arrows<K> {
            self.ops.get(&(x, seq.to_vec())).unwrap_or(&empty)
        };
        for x in 0..self.gens.len() {
            for n in 0..=max_inputs {
                for seq in sequences(ra.as_ref(), self.gens[x].right_idem, n) {
                    let mut acc: Arrows<K> = BTreeMap::new();
                    for i in 0..=n {
                        for (&(b, y), c) in op(x, &seq[..i]) {
                            for (&(b2, w), c2) in op(y, &seq[i..]) {
                                let cc = c.mul(c2);
                                for p in la.mul(b, b2) {
                                    map_add(&mut acc, (p, w), cc.clone());
                                }
                            }
                        }
                    }
                    for (&(b, y), c) in op(x, &seq) {
                        for db in la.d(b) {
                            map_add(&mut acc, (db, y), c.clone());
                        }
                    }
                    for k in 0..n {
                        for da in ra.d(seq[k]) {
                            let mut s = seq.clone();
                            s[k] = da;
                            for (&key, c) in op(x, &s) {
                                map_add(&mut acc, key, c.clone());
                            }
                        }
                        if k + 1 < n {
                            for p in ra.mul(seq[k], seq[k + 1]) {
                                let mut s = seq[..k].to_vec();
                                s.push(p);
                                s.extend_from_slice(&seq[k + 2..]);
                                for (&key, c) in op(x, &s) {
                                    map_add(&mut acc, key, c.clone());
                                }
                            }
                        }
                    }
                    for ((b, w), c) in acc {
                        let labels: Vec<String> = seq.iter().map(|&a| ra.label(a)).collect();
                        diag.push(format!(
                            "relation at {} with inputs [{}] has term {}·{} ⊗ {}",
                            self.gens[x].name,
                            labels.join(", "),
                            c.to_text(),
                            la.label(b),
                            self.gens[w].name
                        ));
                    }
                }
            }
        }
        diag
    }
}

impl<K: Scalar> TypeA<K> {
    /// Check the A∞ relations on all input sequences of length at most
    /// `max_inputs`.
    pub fn check(&self, max_inputs: usize) -> Diagnostics {
        let mut diag = Diagnostics::default();
        let alg = &self.alg;
        let empty = BTreeMap::new();
        let op = |x: usize, seq: &[usize]| -> &BTreeMap<usize, K> {
            self.ops.get(&(x, seq.to_vec())).unwrap_or(&empty)
        };
        for x in 0..self.gens.len() {
            for n in 0..=max_inputs {
                for seq in sequences(alg.as_ref(), self.gens[x].idem, n) {
                    let mut acc: BTreeMap<usize, K> = BTreeMap::new();
                    for i in 0..=n {
                        for (&y, c) in op(x, &seq[..i]) {
                            for (&w, c2) in op(y, &seq[i..]) {
                                map_add(&mut acc, w, c.mul(c2));
                            }
                        }
                    }
                    for k in 0..n {
                        for da in alg.d(seq[k]) {
                            let mut s = seq.clone();
                            s[k] = da;
                            for (&w, c) in op(x, &s) {
                                map_add(&mut acc, w, c.clone());
                            }
                        }
                        if k + 1 < n {
                            for p in alg.mul(seq[k], seq[k + 1]) {
                                let mut s = seq[..k].to_vec();
                                s.push(p);
                                s.extend_from_slice(&seq[k + 2..]);
                                for (&w, c) in op(x, &s) {
                                    map_add(&mut acc, w, c.clone());
                                }
                            }
                        }
                    }
                    for (w, c) in acc {
                        diag.push(format!(
                            "A∞ relation at {} (n = {}) has term {}·{}",
                            self.gens[x].name,
                            n,
                            c.to_text(),
                            self.gens[w].name
                        ));
                    }
                }
            }
        }
        diag
    }
}
