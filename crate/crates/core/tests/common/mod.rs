#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use bsfloer::arcdiagram::{ArcDiagram, ArcDiagramFile, Flavor};
use bsfloer::coeff::{RankMode, F2};
use bsfloer::heegaard::NiceDiagram;
use bsfloer::strandalg::{mul_sums, Algebra, StrandAlgebra};
use bsfloer::structures::{homology_rank, AnyTypeD, TypeD};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixtures().join(name)).unwrap()
}

pub fn typed(name: &str) -> TypeD<F2> {
    match AnyTypeD::from_json(&fixture(name)).unwrap() {
        AnyTypeD::F2(m) => m,
        AnyTypeD::Frac(_) => panic!("F2 fixture expected"),
    }
}

pub fn nice(src: &str) -> TypeD<F2> {
    NiceDiagram::from_json(src).unwrap().bsd().unwrap()
}

pub fn exact_rank(p: &TypeD<F2>, q: &TypeD<F2>) -> usize {
    homology_rank(p, q, RankMode::Exact, 0).unwrap()
}

fn matchings(points: &[u32]) -> Vec<Vec<[u32; 2]>> {
    if points.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for j in 1..points.len() {
        let rest: Vec<u32> = points[1..]
            .iter()
            .copied()
            .filter(|&p| p != points[j])
            .collect();
        for mut m in matchings(&rest) {
            m.insert(0, [points[0], points[j]]);
            out.push(m);
        }
    }
    out
}

/// Every valid arc diagram (both flavors) on at most `max_points` points,
/// with points labelled 1..n in order.
pub fn all_diagrams(max_points: usize) -> Vec<ArcDiagram> {
    let mut out = Vec::new();
    for n in (2..=max_points).step_by(2) {
        let points: Vec<u32> = (1..=n as u32).collect();
        for m in matchings(&points) {
            for cuts in 0u32..(1 << (n - 1)) {
                let mut intervals = vec![vec![1]];
                for p in 2..=n as u32 {
                    if cuts >> (p - 2) & 1 == 1 {
                        intervals.push(vec![]);
                    }
                    intervals.last_mut().unwrap().push(p);
                }
                let file = ArcDiagramFile {
                    flavor: Flavor::Arc,
                    intervals: intervals.clone(),
                    matching: m.clone(),
                    basepoint_after: None,
                };
                if let Ok(z) = ArcDiagram::new(file) {
                    out.push(z);
                }
            }
            if n % 4 == 0 {
                for b in 0..n {
                    let file = ArcDiagramFile {
                        flavor: Flavor::Pmc,
                        intervals: vec![points.clone()],
                        matching: m.clone(),
                        basepoint_after: Some(b),
                    };
                    if let Ok(z) = ArcDiagram::new(file) {
                        out.push(z);
                    }
                }
            }
        }
    }
    out
}

fn xor(a: &[usize], b: &[usize]) -> Vec<usize> {
    let s: BTreeSet<usize> = a.iter().copied().collect();
    let t: BTreeSet<usize> = b.iter().copied().collect();
    s.symmetric_difference(&t).copied().collect()
}

/// Number of basis elements violating d² = 0 plus basis pairs violating
/// the Leibniz rule.
pub fn dg_failures(alg: &StrandAlgebra) -> usize {
    let n = alg.dim();
    let ds: Vec<Vec<usize>> = (0..n).map(|a| alg.d(a)).collect();
    let mut bad = 0;
    for a in 0..n {
        let mut dd: Vec<usize> = Vec::new();
        for &x in &ds[a] {
            dd = xor(&dd, &ds[x]);
        }
        bad += usize::from(!dd.is_empty());
    }
    for a in 0..n {
        for b in 0..n {
            let ab = alg.mul(a, b);
            let mut lhs: Vec<usize> = Vec::new();
            for &x in &ab {
                lhs = xor(&lhs, &ds[x]);
            }
            let rhs = xor(&mul_sums(alg, &ds[a], &[b]), &mul_sums(alg, &[a], &ds[b]));
            bad += usize::from(!xor(&lhs, &rhs).is_empty());
        }
    }
    bad
}

/// Whether two F₂ type D structures over the same algebra are isomorphic
/// by a bijection of generators preserving idempotents and every arrow.
pub fn isomorphic(a: &TypeD<F2>, b: &TypeD<F2>) -> bool {
    use std::collections::BTreeSet as Set;
    if a.alg.key() != b.alg.key() || a.len() != b.len() || a.arrow_count() != b.arrow_count() {
        return false;
    }
    let arrows = |m: &TypeD<F2>| -> Set<(usize, usize, usize)> {
        m.delta
            .iter()
            .enumerate()
            .flat_map(|(x, out)| out.keys().map(move |&(e, y)| (x, e, y)))
            .collect()
    };
    let (ea, eb) = (arrows(a), arrows(b));
    fn extend(
        i: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        a: &TypeD<F2>,
        b: &TypeD<F2>,
        ea: &BTreeSet<(usize, usize, usize)>,
        eb: &BTreeSet<(usize, usize, usize)>,
    ) -> bool {
        if i == a.len() {
            return ea
                .iter()
                .all(|&(x, e, y)| eb.contains(&(map[x], e, map[y])));
        }
        for j in 0..b.len() {
            if used[j] || b.gens[j].idem != a.gens[i].idem {
                continue;
            }
            map.push(j);
            let consistent = ea
                .iter()
                .filter(|&&(x, _, y)| x <= i && y <= i && (x == i || y == i))
                .all(|&(x, e, y)| eb.contains(&(map[x], e, map[y])));
            if consistent {
                used[j] = true;
                if extend(i + 1, map, used, a, b, ea, eb) {
                    return true;
                }
                used[j] = false;
            }
            map.pop();
        }
        false
    }
    extend(
        0,
        &mut Vec::new(),
        &mut vec![false; b.len()],
        a,
        b,
        &ea,
        &eb,
    )
}
