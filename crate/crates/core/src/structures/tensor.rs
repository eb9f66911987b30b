//! Box tensor products.

use std::collections::{BTreeMap, HashSet};

use super::{map_add, Arrows, ChainComplex, StructureError, TypeA, TypeD, TypeDA};
use crate::coeff::Scalar;

/// Maximum number of algebra inputs fed to a single operation while forming
/// a box tensor product.
pub const DEFAULT_ITERATION_CAP: usize = 64;

fn prefixes<V>(ops: &BTreeMap<(usize, Vec<usize>), V>) -> HashSet<(usize, Vec<usize>)> {
    let mut set = HashSet::new();
    for (x, seq) in ops.keys() {
        for i in 0..=seq.len() {
            set.insert((*x, seq[..i].to_vec()));
        }
    }
    set
}

/// Walk δ¹-paths of a type D structure from `y`, feeding the non-idempotent
/// labels to `visit(seq, end, coeff)` while `keep(seq)` holds.
fn walk_paths<K: Scalar>(
    n: &TypeD<K>,
    y: usize,
    cap: usize,
    keep: &dyn Fn(&[usize]) -> bool,
    visit: &mut dyn FnMut(&[usize], usize, &K),
) -> Result<(), StructureError> {
    let mut stack: Vec<(Vec<usize>, usize, K)> = vec![(Vec::new(), y, K::one())];
    while let Some((seq, cur, c)) = stack.pop() {
        visit(&seq, cur, &c);
        for (&(a, next), c2) in &n.delta[cur] {
            if n.alg.is_idempotent(a) {
                continue;
            }
            let mut s = seq.clone();
            s.push(a);
            if !keep(&s) {
                continue;
            }
            if s.len() > cap {
                return Err(StructureError::IterationCap(cap));
            }
            stack.push((s, next, c.mul(c2)));
        }
    }
    Ok(())
}

/// M ⊠ N for a DA bimodule M and a type D structure N over its right algebra.
pub fn box_tensor<K: Scalar>(
    m: &TypeDA<K>,
    n: &TypeD<K>,
    cap: usize,
) -> Result<TypeD<K>, StructureError> {
    if m.right.key() != n.alg.key() {
        return Err(StructureError::AlgebraMismatch(m.right.key(), n.alg.key()));
    }
    let mut out = TypeD::new(m.left.clone());
    let mut index = BTreeMap::new();
    for (x, g) in m.gens.iter().enumerate() {
        for (y, h) in n.gens.iter().enumerate() {
            if g.right_idem == h.idem {
                let id = out.add_generator(format!("{}⊠{}", g.name, h.name), g.left_idem);
                index.insert((x, y), id);
            }
        }
    }
    let pre = prefixes(&m.ops);
    for (&(x, y), &src) in &index {
        let mut terms: Arrows<K> = BTreeMap::new();
        let keep = |s: &[usize]| pre.contains(&(x, s.to_vec()));
        walk_paths(n, y, cap, &keep, &mut |seq, end, c| {
            if let Some(arrows) = m.ops.get(&(x, seq.to_vec())) {
                for (&(b, x2), c2) in arrows {
                    if let Some(&t) = index.get(&(x2, end)) {
                        map_add(&mut terms, (b, t), c.mul(c2));
                    }
                }
            }
        })?;
        for (&(a, y1), c) in &n.delta[y] {
            if n.alg.is_idempotent(a) {
                if let Some(&t) = index.get(&(x, y1)) {
                    map_add(&mut terms, (m.gens[x].left_idem, t), c.clone());
                }
            }
        }
        for ((b, t), c) in terms {
            out.add_arrow(src, b, t, c);
        }
    }
    Ok(out)
}

/// M₁ ⊠ M₂ for DA bimodules, where the right algebra of M₁ is the left
/// algebra of M₂.
pub fn box_tensor_da<K: Scalar>(
    m1: &TypeDA<K>,
    m2: &TypeDA<K>,
    cap: usize,
) -> Result<TypeDA<K>, StructureError> {
    if m1.right.key() != m2.left.key() {
        return Err(StructureError::AlgebraMismatch(
            m1.right.key(),
            m2.left.key(),
        ));
    }
    let mid = m1.right.clone();
    let mut out = TypeDA::new(m1.left.clone(), m2.right.clone());
    let mut index = BTreeMap::new();
    for (x1, g1) in m1.gens.iter().enumerate() {
        for (x2, g2) in m2.gens.iter().enumerate() {
            if g1.right_idem == g2.left_idem {
                let id = out.add_generator(
                    format!("{}⊠{}", g1.name, g2.name),
                    g1.left_idem,
                    g2.right_idem,
                );
                index.insert((x1, x2), id);
            }
        }
    }
    let pre1 = prefixes(&m1.ops);
    let mut by_source: BTreeMap<usize, Vec<(&Vec<usize>, &Arrows<K>)>> = BTreeMap::new();
    for ((x, seq), arrows) in &m2.ops {
        by_source.entry(*x).or_default().push((seq, arrows));
    }
    struct State<K> {
        consumed: Vec<usize>,
        outputs: Vec<usize>,
        cur: usize,
        coeff: K,
        unit: bool,
    }
    for (&(x1, x2), &src) in &index {
        let mut stack = vec![State {
            consumed: Vec::new(),
            outputs: Vec::new(),
            cur: x2,
            coeff: K::one(),
            unit: false,
        }];
        while let Some(st) = stack.pop() {
            // feed the collected outputs to M₁
            if st.unit {
                if let Some(&t) = index.get(&(x1, st.cur)) {
                    out.add_op(
                        src,
                        st.consumed.clone(),
                        m1.gens[x1].left_idem,
                        t,
                        st.coeff.clone(),
                    );
                }
                continue;
            }
            if let Some(arrows) = m1.ops.get(&(x1, st.outputs.clone())) {
                for (&(b, y1), c) in arrows {
                    if let Some(&t) = index.get(&(y1, st.cur)) {
                        out.add_op(src, st.consumed.clone(), b, t, st.coeff.mul(c));
                    }
                }
            }
            let Some(list) = by_source.get(&st.cur) else {
                continue;
            };
            for (seq, arrows) in list {
                for (&(a, next), c) in *arrows {
                    let mut consumed = st.consumed.clone();
                    consumed.extend_from_slice(seq);
                    if consumed.len() > cap {
                        return Err(StructureError::IterationCap(cap));
                    }
                    if mid.is_idempotent(a) {
                        if st.outputs.is_empty() && a == m1.gens[x1].right_idem {
                            stack.push(State {
                                consumed,
                                outputs: Vec::new(),
                                cur: next,
                                coeff: st.coeff.mul(c),
                                unit: true,
                            });
                        }
                        continue;
                    }
                    let mut outputs = st.outputs.clone();
                    outputs.push(a);
                    if outputs.len() > cap {
                        return Err(StructureError::IterationCap(cap));
                    }
                    if !pre1.contains(&(x1, outputs.clone())) {
                        continue;
                    }
                    stack.push(State {
                        consumed,
                        outputs,
                        cur: next,
                        coeff: st.coeff.mul(c),
                        unit: false,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// M ⊠ N for a right A∞-module M and a type D structure N: a chain complex.
pub fn box_tensor_ad<K: Scalar>(
    m: &TypeA<K>,
    n: &TypeD<K>,
    cap: usize,
) -> Result<ChainComplex<K>, StructureError> {
    if m.alg.key() != n.alg.key() {
        return Err(StructureError::AlgebraMismatch(m.alg.key(), n.alg.key()));
    }
    let mut cx = ChainComplex::new();
    let mut index = BTreeMap::new();
    for (x, g) in m.gens.iter().enumerate() {
        for (y, h) in n.gens.iter().enumerate() {
            if g.idem == h.idem {
                index.insert((x, y), cx.add_generator(format!("{}⊠{}", g.name, h.name)));
            }
        }
    }
    let pre = prefixes(&m.ops);
    for (&(x, y), &src) in &index {
        let mut terms: BTreeMap<usize, K> = BTreeMap::new();
        let keep = |s: &[usize]| pre.contains(&(x, s.to_vec()));
        walk_paths(n, y, cap, &keep, &mut |seq, end, c| {
            if let Some(targets) = m.ops.get(&(x, seq.to_vec())) {
                for (&x2, c2) in targets {
                    if let Some(&t) = index.get(&(x2, end)) {
                        map_add(&mut terms, t, c.mul(c2));
                    }
                }
            }
        })?;
        for (&(a, y1), c) in &n.delta[y] {
            if n.alg.is_idempotent(a) {
                if let Some(&t) = index.get(&(x, y1)) {
                    map_add(&mut terms, t, c.clone());
                }
            }
        }
        for (t, c) in terms {
            cx.add_term(src, t, c);
        }
    }
    Ok(cx)
}
