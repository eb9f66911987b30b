//! Cancellation of idempotent arrows in type D structures.

use std::collections::BTreeMap;

use super::{lin_add, Lin, TypeD};
use crate::coeff::Scalar;
use crate::strandalg::Algebra;

fn lin_mul<K: Scalar>(alg: &dyn Algebra, a: &Lin<K>, b: &Lin<K>) -> Lin<K> {
    let mut out = BTreeMap::new();
    for (&x, c) in a {
        for (&y, c2) in b {
            let cc = c.mul(c2);
            for p in alg.mul(x, y) {
                lin_add(&mut out, p, cc.clone());
            }
        }
    }
    out
}

/// Inverse of c·ι + n with ι idempotent and n nilpotent:
/// c⁻¹ Σₖ (c⁻¹n)ᵏ in characteristic two.
fn unit_inverse<K: Scalar>(alg: &dyn Algebra, u: &Lin<K>, e: usize) -> Option<Lin<K>> {
    let c = u.get(&e)?.clone();
    let cinv = c.inv().ok()?;
    let mut n: Lin<K> = u.clone();
    n.remove(&e);
    for v in n.values_mut() {
        *v = v.mul(&cinv);
    }
    let mut result: Lin<K> = BTreeMap::new();
    let mut power: Lin<K> = BTreeMap::from([(e, K::one())]);
    for _ in 0..=alg.dim() {
        if power.is_empty() {
            break;
        }
        for (&k, v) in &power {
            lin_add(&mut result, k, v.clone());
        }
        power = lin_mul(alg, &power, &n);
    }
    if !power.is_empty() {
        return None;
    }
    for v in result.values_mut() {
        *v = v.mul(&cinv);
    }
    Some(result)
}

/// Repeatedly cancel pairs x → c·ι ⊗ y (x ≠ y), replacing δ¹ on the
/// remaining generators by δ¹ + δ¹_{·y} (c·ι + …)⁻¹ δ¹_{x·}. The result is
/// homotopy equivalent to the input.
pub fn reduce<K: Scalar>(m: &TypeD<K>) -> TypeD<K> {
    let alg = m.alg.clone();
    let n = m.len();
    let mut alive = vec![true; n];
    let mut delta: Vec<BTreeMap<usize, Lin<K>>> = (0..n)
        .map(|x| {
            let mut t: BTreeMap<usize, Lin<K>> = BTreeMap::new();
            for (&(a, y), c) in &m.delta[x] {
                lin_add(t.entry(y).or_default(), a, c.clone());
            }
            t
        })
        .collect();
    loop {
        let mut found = None;
        'search: for x in 0..n {
            if !alive[x] {
                continue;
            }
            for (&y, u) in &delta[x] {
                if y == x || !alive[y] {
                    continue;
                }
                if let Some(e) = u.keys().copied().find(|&a| alg.is_idempotent(a)) {
                    if let Some(inv) = unit_inverse(alg.as_ref(), u, e) {
                        found = Some((x, y, inv));
                        break 'search;
                    }
                }
            }
        }
        let Some((x, y, inv)) = found else { break };
        alive[x] = false;
        alive[y] = false;
        let out_x: Vec<(usize, Lin<K>)> = delta[x]
            .iter()
            .filter(|(w, _)| alive[**w])
            .map(|(w, l)| (*w, l.clone()))
            .collect();
        for z in 0..n {
            if !alive[z] {
                continue;
            }
            let Some(to_y) = delta[z].get(&y).cloned() else {
                continue;
            };
            let pre = lin_mul(alg.as_ref(), &to_y, &inv);
            for (w, b) in &out_x {
                let add = lin_mul(alg.as_ref(), &pre, b);
                let entry = delta[z].entry(*w).or_default();
                for (k, c) in add {
                    lin_add(entry, k, c);
                }
                if entry.is_empty() {
                    delta[z].remove(w);
                }
            }
        }
        for z in 0..n {
            delta[z].remove(&x);
            delta[z].remove(&y);
        }
    }
    let mut out = TypeD::new(alg.clone());
    let mut map = vec![usize::MAX; n];
    for i in 0..n {
        if alive[i] {
            map[i] = out.add_generator(m.gens[i].name.clone(), m.gens[i].idem);
        }
    }
    for i in 0..n {
        if !alive[i] {
            continue;
        }
        for (&w, l) in &delta[i] {
            for (&a, c) in l {
                out.add_arrow(map[i], a, map[w], c.clone());
            }
        }
    }
    out
}
