use std::path::{Path, PathBuf};

use bsfloer::bimodlib::{cfd_h_inf, cut1_diagram, TwistFactorization};
use bsfloer::coeff::{RankMode, F2};
use bsfloer::heegaard::{templates, NiceDiagram};
use bsfloer::pipeline::*;
use bsfloer::structures::{homology_rank, reduce, AnyTypeD, TypeD};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn typed(name: &str) -> TypeD<F2> {
    match AnyTypeD::from_json(&std::fs::read_to_string(fixtures().join(name)).unwrap()).unwrap() {
        AnyTypeD::F2(m) => m,
        AnyTypeD::Frac(_) => panic!("F2 fixture expected"),
    }
}

fn nice(src: &str) -> TypeD<F2> {
    NiceDiagram::from_json(src).unwrap().bsd().unwrap()
}

fn description(name: &str) -> FactoredDescription {
    FactoredDescription::from_json(&std::fs::read_to_string(fixtures().join(name)).unwrap())
        .unwrap()
}

fn rank(p: &TypeD<F2>, q: &TypeD<F2>) -> usize {
    homology_rank(p, q, RankMode::Exact, 0).unwrap()
}

/// Ranks of Mor(probe, M) for the genus-1 golden probes.
fn probes(m: &TypeD<F2>) -> Vec<usize> {
    let h0 = reduce(&nice(templates::SOLID_TORUS_ZERO));
    vec![rank(&cfd_h_inf(), m), rank(&h0, m), rank(m, m)]
}

#[test]
fn single_raw_piece_is_returned_verbatim() {
    let d = FactoredDescription::new(vec![Piece::Typed {
        path: "h_inf_cfd.json".into(),
    }]);
    let a = assemble(&d, &fixtures()).unwrap();
    let raw = typed("h_inf_cfd.json");
    assert_eq!(a.module.len(), raw.len());
    assert_eq!(a.module.arrow_count(), raw.arrow_count());
    assert_eq!(a.pieces, vec!["typed h_inf_cfd.json".to_string()]);
}

#[test]
fn slide_then_inverse_keeps_probe_ranks() {
    let a = assemble(&description("factored_slide_pair.json"), &fixtures()).unwrap();
    assert_eq!(probes(&a.module), probes(&cfd_h_inf()));
}

#[test]
fn identity_piece_keeps_probe_ranks() {
    let a = assemble(&description("factored_identity.json"), &fixtures()).unwrap();
    assert_eq!(probes(&a.module), probes(&nice(templates::SOLID_TORUS_INF)));
}

#[test]
fn interface_mismatch_is_reported() {
    let e = assemble(&description("factored_mismatch.json"), &fixtures())
        .err()
        .unwrap();
    assert!(
        matches!(e, PipelineError::Interface { index: 0, .. }),
        "{e}"
    );
}

#[test]
fn module_before_last_piece_is_rejected() {
    let d = FactoredDescription::new(vec![
        Piece::Typed {
            path: "h_inf_cfd.json".into(),
        },
        Piece::Typed {
            path: "h_inf_cfd.json".into(),
        },
    ]);
    assert!(matches!(
        assemble(&d, &fixtures()),
        Err(PipelineError::Interface { .. })
    ));
}

#[test]
fn wrong_schema_is_rejected() {
    let e = FactoredDescription::from_json(r#"{"schema":"other/1","pieces":[]}"#)
        .err()
        .unwrap();
    assert!(matches!(e, PipelineError::Schema(_)));
}

#[test]
fn compressing_disk_on_solid_tori() {
    for m in [cfd_h_inf(), nice(templates::SOLID_TORUS_ZERO)] {
        for mode in [RankMode::Exact, RankMode::DEFAULT_PROBABILISTIC] {
            let v = detect_compressing_disk(&m, mode, 1).unwrap();
            assert_eq!(v.rank, 0);
            assert_eq!(v.answer, Answer::Compressible);
            assert_eq!(v.modes_agree, Some(true));
        }
    }
}

#[test]
fn compressing_disk_verdict_ignores_reduce() {
    let m = nice(templates::SOLID_TORUS_ZERO);
    let a = detect_compressing_disk(&m, RankMode::Exact, 0).unwrap();
    let b = detect_compressing_disk(&reduce(&m), RankMode::Exact, 0).unwrap();
    assert_eq!(a.answer, b.answer);
    assert_eq!(a.rank, b.rank);
}

#[test]
fn compressing_disk_on_trefoil_exterior() {
    let v = detect_compressing_disk(&typed("trefoil_exterior.json"), RankMode::Exact, 0).unwrap();
    assert_eq!(v.answer, Answer::Incompressible);
    assert_eq!(v.rank, 4);
}

#[test]
fn compressing_disk_needs_a_circle() {
    let m = typed("trefoil_arc.json");
    assert!(detect_compressing_disk(&m, RankMode::Exact, 0).is_err());
}

#[test]
fn tangle_detector_on_fixtures() {
    let core = [TwistFactorization::cut1_core()];
    let triv = nice(&std::fs::read_to_string(fixtures().join("trivial_arc_hd.json")).unwrap());
    let v = detect_boundary_parallel(&triv, &[(0, 1)], &core, RankMode::Exact, 0).unwrap();
    assert_eq!((v.answer, v.rank), (Answer::PartlyBoundaryParallel, 0));
    let v = detect_boundary_parallel(&reduce(&triv), &[(0, 1)], &core, RankMode::Exact, 0).unwrap();
    assert_eq!(v.rank, 0);
    let knotted = typed("trefoil_arc.json");
    let v = detect_boundary_parallel(&knotted, &[(0, 1)], &core, RankMode::Exact, 0).unwrap();
    assert_eq!(v.answer, Answer::NotBoundaryParallel);
    assert_eq!(v.rank, 8);
    assert_eq!(
        cut1_diagram(),
        bsfloer::structures::strand_of(&knotted.alg)
            .unwrap()
            .diagram()
            .clone()
    );
}

#[test]
fn sutured_pairing_of_solid_tori() {
    let h0 = reduce(&nice(templates::SOLID_TORUS_ZERO));
    assert_eq!(sutured_pairing_dual(&cfd_h_inf(), &h0).unwrap(), 1);
    assert_eq!(sutured_pairing_dual(&cfd_h_inf(), &cfd_h_inf()).unwrap(), 2);
}

#[test]
fn empty_gluing_is_rejected() {
    let empty = TypeD::<F2>::new(cfd_h_inf().alg.clone());
    assert!(sutured_pairing_dual(&cfd_h_inf(), &empty).is_err());
    assert!(sutured_pairing_dual(&empty, &cfd_h_inf()).is_err());
}

#[test]
fn verdicts_serialize_deterministically() {
    let v = detect_compressing_disk(&cfd_h_inf(), RankMode::DEFAULT_PROBABILISTIC, 3).unwrap();
    let w = detect_compressing_disk(&cfd_h_inf(), RankMode::DEFAULT_PROBABILISTIC, 3).unwrap();
    assert_eq!(v.to_json(), w.to_json());
    assert!(!v.to_json().contains("timing"));
    let back: Verdict = serde_json::from_str(&v.to_json()).unwrap();
    assert_eq!(back, v);
}
