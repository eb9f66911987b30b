mod common;

use bsfloer::arcdiagram::ArcDiagram;
use bsfloer::bimodlib::{arcslide_da, cfd_h_inf, cut1_diagram, ArcslideDatum};
use bsfloer::coeff::{RankMode, F2};
use bsfloer::heegaard::templates;
use bsfloer::strandalg::{Algebra, StrandAlgebra};
use bsfloer::structures::*;
use common::{exact_rank, isomorphic, nice, typed};

const TYPED_FIXTURES: [&str; 3] = [
    "h_inf_cfd.json",
    "trefoil_exterior.json",
    "trefoil_arc.json",
];

#[test]
fn typed_fixtures_round_trip() {
    for name in TYPED_FIXTURES {
        let m = typed(name);
        assert!(m.check().ok(), "{name}");
        let back = match AnyTypeD::from_json(&m.to_json().unwrap()).unwrap() {
            AnyTypeD::F2(b) => b,
            AnyTypeD::Frac(_) => unreachable!(),
        };
        assert!(isomorphic(&m, &back), "{name}");
    }
}

#[test]
fn frac_structures_round_trip() {
    let m = typed("trefoil_exterior.json").to_frac();
    let s = m.to_json().unwrap();
    match AnyTypeD::from_json(&s).unwrap() {
        AnyTypeD::Frac(b) => {
            assert_eq!(b.len(), m.len());
            assert_eq!(b.arrow_count(), m.arrow_count());
        }
        AnyTypeD::F2(_) => panic!("coefficients lost"),
    }
}

#[test]
fn da_files_round_trip() {
    let t = arcslide_da(&ArcslideDatum {
        source: ArcDiagram::genus1(),
        moving: 1,
        over: 2,
    })
    .unwrap();
    let f: DaFile = serde_json::from_str(&t.to_json().unwrap()).unwrap();
    let back = TypeDA::<F2>::from_file(&f).unwrap();
    assert_eq!(back.len(), t.len());
    assert_eq!(back.ops.len(), t.ops.len());
    let m = typed("trefoil_exterior.json");
    let a = reduce(&box_tensor(&t, &m, DEFAULT_ITERATION_CAP).unwrap());
    let b = reduce(&box_tensor(&back, &m, DEFAULT_ITERATION_CAP).unwrap());
    assert_eq!(exact_rank(&m, &a), exact_rank(&m, &b));
}

#[test]
fn schema_errors() {
    assert!(matches!(
        AnyTypeD::from_json("{}"),
        Err(StructureError::Schema(_))
    ));
    let bad = common::fixture("h_inf_cfd.json").replace("bsfloer.typed/1", "bsfloer.typed/9");
    assert!(matches!(
        AnyTypeD::from_json(&bad),
        Err(StructureError::Schema(_))
    ));
}

#[test]
fn acyclic_pair_cancels() {
    let alg = StrandAlgebra::shared(&ArcDiagram::genus1());
    let i = alg.idempotents()[0];
    let mut m = TypeD::<F2>::new(alg);
    let x = m.add_generator("x", i);
    let y = m.add_generator("y", i);
    m.add_arrow(x, i, y, F2(true));
    assert!(m.check().ok());
    assert_eq!(reduce(&m).len(), 0);
}

#[test]
fn reduce_preserves_mor_ranks() {
    let mods = [
        typed("trefoil_exterior.json"),
        nice(templates::SOLID_TORUS_ZERO),
        cfd_h_inf(),
    ];
    for m in &mods {
        let r = reduce(m);
        assert!(r.check().ok());
        assert!(r.len() <= m.len());
        for p in &mods {
            assert_eq!(exact_rank(p, &r), exact_rank(p, m));
            assert_eq!(exact_rank(&r, p), exact_rank(m, p));
        }
    }
}

#[test]
fn identity_bimodule_is_a_unit() {
    let m = typed("trefoil_exterior.json");
    let id = TypeDA::identity(m.alg.clone());
    let out = box_tensor(&id, &m, DEFAULT_ITERATION_CAP).unwrap();
    assert!(isomorphic(&out, &m));
}

#[test]
fn mismatched_algebras_are_rejected() {
    let id = TypeDA::<F2>::identity(StrandAlgebra::shared(&cut1_diagram()));
    assert!(matches!(
        box_tensor(&id, &cfd_h_inf(), DEFAULT_ITERATION_CAP),
        Err(StructureError::AlgebraMismatch(..))
    ));
    assert!(mor_complex(&cfd_h_inf(), &typed("trefoil_arc.json")).is_err());
}

#[test]
fn mor_of_h_inf() {
    let (cx, basis) = mor_complex(&cfd_h_inf(), &cfd_h_inf()).unwrap();
    assert_eq!(cx.len(), basis.len());
    assert!(cx.d_squared_failures().is_empty());
    assert_eq!(cx.homology_rank(RankMode::Exact, 0), 2);
}

#[test]
fn mor_complexes_square_to_zero() {
    let mods = [
        typed("trefoil_exterior.json"),
        nice(templates::SOLID_TORUS_ZERO),
        cfd_h_inf(),
    ];
    for p in &mods {
        for q in &mods {
            let (cx, _) = mor_complex(p, q).unwrap();
            assert!(cx.d_squared_failures().is_empty());
        }
    }
}

#[test]
fn modes_agree_on_frac_complexes() {
    let m = typed("trefoil_exterior.json").to_frac();
    for seed in 1..=5 {
        assert_eq!(
            homology_rank(&m, &m, RankMode::DEFAULT_PROBABILISTIC, seed).unwrap(),
            homology_rank(&m, &m, RankMode::Exact, 0).unwrap()
        );
    }
}

#[test]
fn type_a_dual_pairs_with_type_d() {
    let a = TypeA::from_dual(&cfd_h_inf());
    let cx = box_tensor_ad(&a, &cfd_h_inf(), DEFAULT_ITERATION_CAP).unwrap();
    assert_eq!(cx.homology_rank(RankMode::Exact, 0), 2);
}

#[test]
fn broken_structure_is_diagnosed() {
    let mut m = cfd_h_inf();
    let e = m.gens[0].idem;
    // an idempotent self-arrow makes δ¹ fail its structure equation
    m.add_arrow(0, e, 0, F2(true));
    assert!(!m.check().ok());
    assert!(ensure_valid(&m).is_err());
}
