mod common;

use std::time::Instant;

use bsfloer::strandalg::{Algebra, StrandAlgebra};

#[test]
fn dg_axioms_exhaustive_up_to_six_points() {
    let t = Instant::now();
    let diagrams = common::all_diagrams(6);
    let mut total = 0;
    for z in &diagrams {
        let alg = StrandAlgebra::new(z);
        total += alg.dim();
        assert_eq!(common::dg_failures(&alg), 0, "{}", z.to_json());
    }
    eprintln!(
        "{} diagrams, {} basis elements, {:?}",
        diagrams.len(),
        total,
        t.elapsed()
    );
}

fn associativity_failures(
    alg: &StrandAlgebra,
    triples: impl Iterator<Item = (usize, usize, usize)>,
) -> usize {
    use bsfloer::strandalg::mul_sums;
    triples
        .filter(|&(a, b, c)| {
            mul_sums(alg, &alg.mul(a, b), &[c]) != mul_sums(alg, &[a], &alg.mul(b, c))
        })
        .count()
}

#[test]
fn associativity_exhaustive_up_to_four_points() {
    for z in common::all_diagrams(4) {
        let alg = StrandAlgebra::new(&z);
        let n = alg.dim();
        let triples =
            (0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))));
        assert_eq!(associativity_failures(&alg, triples), 0, "{}", z.to_json());
    }
}

#[test]
fn associativity_sampled_at_six_points() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
    for z in common::all_diagrams(6)
        .into_iter()
        .filter(|z| z.num_points() == 6)
    {
        let alg = StrandAlgebra::new(&z);
        let n = alg.dim();
        let triples: Vec<_> = (0..200)
            .map(|_| {
                (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                )
            })
            .collect();
        assert_eq!(
            associativity_failures(&alg, triples.into_iter()),
            0,
            "{}",
            z.to_json()
        );
    }
}

#[test]
fn genus1_relations() {
    use bsfloer::arcdiagram::{ArcDiagram, Chord};
    let z = ArcDiagram::genus1();
    let a = StrandAlgebra::new(&z);
    assert_eq!(a.summand(1).len(), 8);
    let chord = |s: u32, t: u32| {
        let (s, t) = (z.position_of(s).unwrap(), z.position_of(t).unwrap());
        Chord {
            interval: z.interval_of(s),
            start: s,
            end: t,
        }
    };
    let rho = |s, t, left| a.chord_with_left(&chord(s, t), left).unwrap();
    let (r1, r2, r3) = (rho(1, 2, 0b01), rho(2, 3, 0b10), rho(3, 4, 0b01));
    assert!(a.mul(r2, r1).is_empty());
    assert!(a.mul(r3, r2).is_empty());
    assert_eq!(a.mul(r1, r2), vec![rho(1, 3, 0b01)]);
    assert_eq!(a.mul(r2, r3), vec![rho(2, 4, 0b10)]);
    assert_eq!(a.mul(a.mul(r1, r2)[0], r3), vec![rho(1, 4, 0b01)]);
    for x in a.summand(1) {
        assert!(a.d(x).is_empty());
    }
}

#[test]
fn shared_algebras_are_cached() {
    let z = bsfloer::arcdiagram::ArcDiagram::genus1();
    let a = StrandAlgebra::shared(&z);
    let b = StrandAlgebra::shared(&z);
    assert!(std::sync::Arc::ptr_eq(&a, &b));
    assert_eq!(a.key(), b.key());
}
