//! Acceptance suite: one pass/fail line per criterion, each within its
//! runtime budget.

mod common;

use std::time::{Duration, Instant};

use bsfloer::arcdiagram::{ArcDiagram, Chord};
use bsfloer::bimodlib::*;
use bsfloer::coeff::*;
use bsfloer::heegaard::templates;
use bsfloer::pipeline::*;
use bsfloer::strandalg::{Algebra, StrandAlgebra};
use bsfloer::structures::{box_tensor, reduce, TypeD, TypeDA, DEFAULT_ITERATION_CAP};
use common::{exact_rank, isomorphic, nice, typed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exact-mode rank of the trefoil-exterior detector, pinned when the
/// fixture was created.
const TREFOIL_FRAC_RANK: usize = 4;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn apply(d: &TypeDA<F2>, m: &TypeD<F2>) -> TypeD<F2> {
    reduce(&box_tensor(d, m, DEFAULT_ITERATION_CAP).unwrap())
}

fn h0() -> TypeD<F2> {
    nice(&common::fixture("solid_torus_zero.json"))
}

fn algebra() -> Check {
    let z = ArcDiagram::genus1();
    let a = StrandAlgebra::new(&z);
    ensure(
        a.summand(1).len() == 8,
        format!("dimension {}", a.summand(1).len()),
    )?;
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
    ensure(a.mul(r2, r1).is_empty(), "rho2 rho1 != 0")?;
    ensure(a.mul(r3, r2).is_empty(), "rho3 rho2 != 0")?;
    ensure(!a.mul(r2, r3).is_empty(), "rho2 rho3 = 0")?;
    ensure(a.mul(r1, r2) == vec![rho(1, 3, 0b01)], "rho1 rho2 != rho12")?;
    let diagrams = common::all_diagrams(6);
    for z in &diagrams {
        let f = common::dg_failures(&StrandAlgebra::new(z));
        ensure(f == 0, format!("{f} dg failures on {}", z.to_json()))?;
    }
    Ok(format!(
        "dim 8, relations hold, d^2 and Leibniz on {} diagrams",
        diagrams.len()
    ))
}

fn identity_dd() -> Check {
    for (name, z, src) in [
        ("genus-1", ArcDiagram::genus1(), templates::GENUS1_IDENTITY),
        ("Z_b", ArcDiagram::zb(), templates::ZB_IDENTITY),
    ] {
        let dd = dd_identity(&z);
        ensure(dd.check().ok(), format!("{name}: {}", dd.check()))?;
        let t = nice(src);
        ensure(
            isomorphic(&dd, &t),
            format!("{name}: differs from the template"),
        )?;
    }
    Ok("genus-1 and Z_b identity DD match their templates".into())
}

fn pairing() -> Check {
    let hinf = cfd_h_inf();
    let r = exact_rank(&hinf, &hinf);
    ensure(r == 2, format!("Mor(H_inf, H_inf) = {r}"))?;
    let s3 = sutured_pairing_dual(&hinf, &h0()).map_err(|e| e.to_string())?;
    ensure(s3 == 1, format!("S^3 pairing = {s3}"))?;
    let m = exact_rank(&hinf, &h0());
    ensure(m == 1, format!("Mor(H_inf, H_0) = {m}"))?;
    Ok("Mor(H_inf, H_inf) = 2, S^3 = 1".into())
}

fn compressible() -> Check {
    for (name, m) in [("H_inf", cfd_h_inf()), ("H_0", h0())] {
        let mut modes = vec![RankMode::Exact];
        modes.extend((1..=5).map(|_| RankMode::DEFAULT_PROBABILISTIC));
        for (i, mode) in modes.into_iter().enumerate() {
            let seed = i as u64;
            let v = detect_compressing_disk(&m, mode, seed).map_err(|e| e.to_string())?;
            ensure(
                v.rank == 0 && v.answer == Answer::Compressible,
                format!("{name} {} seed {seed}: rank {}", mode.label(), v.rank),
            )?;
        }
    }
    Ok("H_inf and H_0 give rank 0 (exact, seeds 1..5)".into())
}

fn incompressible() -> Check {
    let m = typed("trefoil_exterior.json");
    let exact = detect_compressing_disk(&m, RankMode::Exact, 0).map_err(|e| e.to_string())?;
    let prob = detect_compressing_disk(&m, RankMode::DEFAULT_PROBABILISTIC, 1)
        .map_err(|e| e.to_string())?;
    ensure(exact.rank > 0 && prob.rank > 0, "rank 0")?;
    ensure(
        exact.rank == TREFOIL_FRAC_RANK && prob.rank == TREFOIL_FRAC_RANK,
        format!(
            "ranks {} / {}, pinned {TREFOIL_FRAC_RANK}",
            exact.rank, prob.rank
        ),
    )?;
    Ok(format!(
        "trefoil exterior rank {TREFOIL_FRAC_RANK} in both modes"
    ))
}

fn functoriality() -> Check {
    let golden = [cfd_h_inf(), h0(), typed("trefoil_exterior.json")];
    let probe = |m: &TypeD<F2>| golden.iter().map(|p| exact_rank(p, m)).collect::<Vec<_>>();
    let mut count = 0;
    for (z, moving, over, _) in arcslide_templates() {
        let s = ArcslideDatum {
            source: z,
            moving,
            over,
        };
        let t = arcslide_da(&s).map_err(|e| e.to_string())?;
        let ti = arcslide_inverse_da(&s).map_err(|e| e.to_string())?;
        for m in &golden {
            let w = apply(&t, &apply(&ti, m));
            ensure(
                probe(&w) == probe(m),
                format!("{moving} over {over} changes probe ranks"),
            )?;
        }
        count += 1;
    }
    for m in &golden {
        let base = detect_compressing_disk(m, RankMode::Exact, 0).map_err(|e| e.to_string())?;
        let id = TypeDA::identity(m.alg.clone());
        for variant in [reduce(m), apply(&id, m)] {
            let v =
                detect_compressing_disk(&variant, RankMode::Exact, 0).map_err(|e| e.to_string())?;
            ensure(
                (v.answer, v.rank) == (base.answer, base.rank),
                "verdict changed under reduce or identity insertion",
            )?;
        }
    }
    Ok(format!("{count} slides, probes and verdicts invariant"))
}

fn random_poly(rng: &mut ChaCha8Rng, max_deg: i32) -> LaurentPoly {
    let terms = rng.gen_range(0..4);
    LaurentPoly::from_monomials((0..terms).map(|_| {
        let mut e = [0i32; 3];
        for _ in 0..rng.gen_range(0..=max_deg) {
            e[rng.gen_range(0..3)] += if rng.gen() { 1 } else { -1 };
        }
        LaurentMonomial::from_exponents(&e)
    }))
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Vec<Vec<LaurentPoly>> {
    let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
    if rng.gen() {
        return (0..r)
            .map(|_| (0..c).map(|_| random_poly(rng, 4)).collect())
            .collect();
    }
    // a product through a smaller inner dimension, so rank drops are common
    let k = rng.gen_range(1..=6);
    let a: Vec<Vec<_>> = (0..r)
        .map(|_| (0..k).map(|_| random_poly(rng, 2)).collect())
        .collect();
    let b: Vec<Vec<_>> = (0..k)
        .map(|_| (0..c).map(|_| random_poly(rng, 2)).collect())
        .collect();
    a.iter()
        .map(|row| {
            (0..c)
                .map(|j| {
                    let mut acc = LaurentPoly::zero();
                    for (l, x) in row.iter().enumerate() {
                        acc.add_assign(&x.mul(&b[l][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn coefficients() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut deficient = 0;
    for i in 0..1000 {
        let m = random_matrix(&mut rng);
        let exact = rank_over_fraction_field(&m, RankMode::Exact, 0);
        let prob = rank_over_fraction_field(&m, RankMode::DEFAULT_PROBABILISTIC, i);
        ensure(
            prob == exact,
            format!("matrix {i}: probabilistic {prob}, exact {exact}"),
        )?;
        deficient += usize::from(exact < m.len().min(m[0].len()));
    }
    for _ in 0..1000 {
        let a = ExponentVector((0..7).map(|_| rng.gen_range(-5..=5)).collect());
        let b = ExponentVector((0..7).map(|_| rng.gen_range(-5..=5)).collect());
        let lhs = nu(&a.checked_add(&b).unwrap(), 7).unwrap();
        ensure(
            lhs == nu(&a, 7).unwrap().mul(&nu(&b, 7).unwrap()),
            "nu(a + b) != nu(a) nu(b)",
        )?;
    }
    Ok(format!(
        "1000 matrices agree ({deficient} rank-deficient), nu homomorphic on 1000 pairs"
    ))
}

fn nonvanishing() -> Check {
    let mods = [
        ("h_inf_cfd", typed("h_inf_cfd.json")),
        ("trefoil_exterior", typed("trefoil_exterior.json")),
        ("trefoil_arc", typed("trefoil_arc.json")),
        (
            "solid_torus_inf",
            nice(&common::fixture("solid_torus_inf.json")),
        ),
        ("solid_torus_zero", h0()),
        (
            "trivial_arc_hd",
            nice(&common::fixture("trivial_arc_hd.json")),
        ),
    ];
    let mut parts = Vec::new();
    for (name, m) in &mods {
        let r = exact_rank(m, m);
        ensure(r > 0, format!("{name}: rank 0"))?;
        parts.push(format!("{name} {r}"));
    }
    Ok(parts.join(", "))
}

fn tangle() -> Check {
    let core = [TwistFactorization::cut1_core()];
    let triv = nice(&common::fixture("trivial_arc_hd.json"));
    let knotted = typed("trefoil_arc.json");
    let mut ranks = Vec::new();
    for m in [&triv, &knotted] {
        let mut r = None;
        for mode in [RankMode::Exact, RankMode::DEFAULT_PROBABILISTIC] {
            let v = detect_boundary_parallel(m, &[(0, 1)], &core, mode, 1)
                .map_err(|e| e.to_string())?;
            ensure(r.is_none_or(|x| x == v.rank), "modes disagree")?;
            r = Some(v.rank);
        }
        ranks.push(r.unwrap());
    }
    ensure(ranks[0] == 0, format!("trivial arc rank {}", ranks[0]))?;
    ensure(ranks[1] > 0, "knotted arc rank 0")?;
    Ok(format!("trivial arc rank 0, knotted arc rank {}", ranks[1]))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 9] = [
        ("algebra correctness", Duration::from_secs(10), algebra),
        ("identity DD", Duration::from_secs(30), identity_dd),
        ("pairing oracle", Duration::from_secs(10), pairing),
        (
            "detector, compressible side",
            Duration::from_secs(30),
            compressible,
        ),
        (
            "detector, incompressible side",
            Duration::from_secs(300),
            incompressible,
        ),
        ("functoriality", Duration::from_secs(300), functoriality),
        ("coefficient layer", Duration::from_secs(60), coefficients),
        ("nonvanishing sanity", Duration::from_secs(60), nonvanishing),
        ("tangle detector", Duration::from_secs(600), tangle),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > *budget => Err(format!("{detail}; over budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{took:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} [{took:.2?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
