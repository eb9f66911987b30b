mod common;

use std::collections::BTreeMap;

use bsfloer::arcdiagram::ArcDiagram;
use bsfloer::bimodlib::*;
use bsfloer::coeff::{RankMode, F2};
use bsfloer::heegaard::templates;
use bsfloer::strandalg::{hom_inclusion, hom_projection, StrandAlgebra};
use bsfloer::structures::{
    box_tensor, box_tensor_da, reduce, TypeD, TypeDA, DEFAULT_ITERATION_CAP,
};
use common::{exact_rank, isomorphic, nice};

fn apply(d: &TypeDA<F2>, m: &TypeD<F2>) -> TypeD<F2> {
    reduce(&box_tensor(d, m, DEFAULT_ITERATION_CAP).unwrap())
}

fn h0() -> TypeD<F2> {
    reduce(&nice(templates::SOLID_TORUS_ZERO))
}

fn trefoil() -> TypeD<F2> {
    common::typed("trefoil_exterior.json")
}

#[test]
fn identity_dd_matches_templates() {
    for (z, src) in [
        (ArcDiagram::genus1(), templates::GENUS1_IDENTITY),
        (ArcDiagram::zb(), templates::ZB_IDENTITY),
        (cut1_diagram(), templates::CUT1_IDENTITY),
    ] {
        let dd = dd_identity(&z);
        assert!(dd.check().ok(), "{}", dd.check());
        assert!(isomorphic(&dd, &nice(src)), "{}", z.to_json());
    }
}

#[test]
fn identity_da_acts_trivially() {
    let m = trefoil();
    let id = dd_to_da(&dd_identity(&ArcDiagram::genus1())).unwrap();
    let out = apply(&id, &m);
    assert_eq!(exact_rank(&m, &out), exact_rank(&m, &m));
    assert_eq!(exact_rank(&cfd_h_inf(), &out), exact_rank(&cfd_h_inf(), &m));
}

#[test]
fn h_inf_module() {
    let m = cfd_h_inf();
    assert_eq!(m.len(), 1);
    assert!(m.check().ok());
    assert!(isomorphic(&reduce(&nice(templates::SOLID_TORUS_INF)), &m));
    assert_eq!(exact_rank(&m, &m), 2);
    assert_eq!(exact_rank(&m, &h0()), 1);
}

fn slide(moving: u32, over: u32) -> ArcslideDatum {
    ArcslideDatum {
        source: ArcDiagram::genus1(),
        moving,
        over,
    }
}

#[test]
fn every_template_slide_passes_its_structure_check() {
    for (z, moving, over, _) in arcslide_templates() {
        let s = ArcslideDatum {
            source: z,
            moving,
            over,
        };
        let dd = arcslide_dd(&s, ArcslideBackend::NiceDiagram).unwrap();
        assert!(dd.check().ok(), "{moving} over {over}: {}", dd.check());
        assert!(arcslide_da(&s).is_ok());
        assert!(arcslide_inverse_da(&s).is_ok());
    }
}

#[test]
fn slide_then_inverse_is_the_identity_on_probes() {
    let mods = [cfd_h_inf(), h0(), trefoil()];
    for (_, moving, over, _) in arcslide_templates() {
        let s = slide(moving, over);
        let (t, ti) = (arcslide_da(&s).unwrap(), arcslide_inverse_da(&s).unwrap());
        for m in &mods {
            for w in [apply(&t, &apply(&ti, m)), apply(&ti, &apply(&t, m))] {
                for p in &mods {
                    assert_eq!(exact_rank(p, &w), exact_rank(p, m), "{moving} over {over}");
                }
            }
        }
    }
}

#[test]
fn slide_one_over_two_has_order_three_on_slopes() {
    let t = arcslide_da(&slide(1, 2)).unwrap();
    let m = cfd_h_inf();
    let t3 = apply(&t, &apply(&t, &apply(&t, &m)));
    assert_eq!(exact_rank(&m, &t3), 2);
    assert_eq!(exact_rank(&m, &apply(&t, &m)), 1);
}

#[test]
fn meridian_twist_gives_surgeries_on_the_trefoil() {
    let u = arcslide_da(&slide(3, 2)).unwrap();
    let ui = arcslide_inverse_da(&slide(3, 2)).unwrap();
    let tre = trefoil();
    let (mut a, mut b) = (h0(), h0());
    let mut neg = vec![exact_rank(&tre, &a)];
    let mut pos = vec![];
    for _ in 0..3 {
        a = apply(&u, &a);
        b = apply(&ui, &b);
        neg.push(exact_rank(&tre, &a));
        pos.push(exact_rank(&tre, &b));
    }
    assert_eq!(neg, vec![2, 3, 4, 5]);
    assert_eq!(pos, vec![1, 2, 3]);
    // the twist fixes the meridian slope
    assert_eq!(exact_rank(&cfd_h_inf(), &apply(&u, &cfd_h_inf())), 2);
}

#[test]
fn unsupported_slides_are_reported() {
    assert!(arcslide_da(&slide(1, 1)).is_err());
    let s = slide(2, 1);
    assert!(s.check().is_ok() || arcslide_da(&s).is_err());
    assert!(matches!(
        arcslide_dd(&slide(1, 2), ArcslideBackend::NearChord),
        Err(BimodError::BackendDisabled)
    ));
}

#[test]
fn block_sum_of_circles() {
    let g = ArcDiagram::genus1();
    let z = block_sum(&g, &g);
    assert_eq!(z.num_points(), 8);
    assert_eq!(z.genus(), Some(2));
    let u = g.disjoint_union(&g);
    assert_eq!(u.num_intervals(), 2);
    assert_eq!(u.num_pairs(), z.num_pairs());
    let a = StrandAlgebra::shared(&g);
    let f = hom_block(&a, &a);
    f.check_homomorphism().unwrap();
}

#[test]
fn handle_and_cup_bimodules_pass_their_checks() {
    let g = ArcDiagram::genus1();
    for kind in [HandleKind::OneHandle, HandleKind::TwoHandle] {
        for torus_first in [false, true] {
            let dd = interior_handle_dd(kind, &g, torus_first).unwrap();
            assert!(dd.check().ok(), "{kind:?} {torus_first}");
            assert!(dd_to_da(&dd).is_ok());
        }
    }
    let zc = cut1_diagram();
    for sign in [CupSign::RPlus, CupSign::RMinus] {
        for kind in [CupKind::Cup, CupKind::Cap] {
            let dd = cup_cap_dd(&zc, 1, sign, kind).unwrap();
            assert!(dd.check().ok(), "{sign:?} {kind:?}");
        }
    }
    let (zp, b, c) = cup_diagram(&zc, 1).unwrap();
    assert_eq!(zp.num_points(), zc.num_points() + 2);
    assert!(r_minus_handle_dd(&zp, b, c).unwrap().check().ok());
    assert!(r_plus_handle_dd(&zp, b, c).unwrap().check().ok());
    assert!(pointless_cap_dd(&zc)
        .map(|d| d.check().ok())
        .unwrap_or(true));
}

#[test]
fn inclusion_and_projection_are_homomorphisms() {
    let small = StrandAlgebra::shared(&cut1_diagram());
    let big = StrandAlgebra::shared(&ArcDiagram::genus1());
    let points: BTreeMap<u32, u32> = (1..=4).map(|p| (p, p)).collect();
    hom_inclusion(&small, &big, &points)
        .unwrap()
        .check_homomorphism()
        .unwrap();
    hom_projection(&small, &big, &points)
        .unwrap()
        .check_homomorphism()
        .unwrap();
}

#[test]
fn frac_bimodule_needs_a_circle() {
    assert!(matches!(
        frac_bimodule(&cut1_diagram()),
        Err(BimodError::NotCircle)
    ));
    let f = frac_bimodule(&ArcDiagram::genus1()).unwrap();
    assert_eq!(f.len(), 4);
}

#[test]
fn aa_identity_dualizes_the_identity() {
    let g = ArcDiagram::genus1();
    let aa = aa_identity(&g);
    assert!(!aa.gens.is_empty());
    assert!(aa.check(4).ok());
}

#[test]
fn empty_twist_is_the_identity() {
    let zc = cut1_diagram();
    let tw = twisting_bimodule(&zc, &[], &[]).unwrap();
    let m = common::typed("trefoil_arc.json");
    let out = tw.apply(&m).unwrap();
    assert_eq!(exact_rank(&m, &out), exact_rank(&m, &m));
}

#[test]
fn twist_pieces_and_composition() {
    let zc = cut1_diagram();
    let tw = twisting_bimodule(&zc, &[(0, 1)], &[TwistFactorization::cut1_core()]).unwrap();
    // inclusion, the slide, and the projection
    assert_eq!(tw.len(), 3);
    let m = common::typed("trefoil_arc.json");
    let piecewise = tw.apply(&m).unwrap();
    let composed = reduce(&box_tensor(&tw.compose().unwrap(), &m, DEFAULT_ITERATION_CAP).unwrap());
    assert_eq!(exact_rank(&m, &piecewise), exact_rank(&m, &composed));
    assert!(twisting_bimodule(&zc, &[(0, 1)], &[]).is_err());
}

#[test]
fn twist_agrees_with_projected_slide() {
    let g = ArcDiagram::genus1();
    let zc = cut1_diagram();
    let points: BTreeMap<u32, u32> = (1..=4).map(|p| (p, p)).collect();
    let small = StrandAlgebra::shared(&zc);
    let big = StrandAlgebra::shared(&g);
    let inc = TypeDA::from_algebra_map(&hom_inclusion(&small, &big, &points).unwrap()).unwrap();
    let proj = TypeDA::from_algebra_map(&hom_projection(&small, &big, &points).unwrap()).unwrap();
    let ui = arcslide_inverse_da(&ArcslideDatum {
        source: g,
        moving: 3,
        over: 2,
    })
    .unwrap();
    let chain = box_tensor_da(
        &proj,
        &box_tensor_da(&ui, &inc, DEFAULT_ITERATION_CAP).unwrap(),
        DEFAULT_ITERATION_CAP,
    )
    .unwrap();
    let tw = twisting_bimodule(&zc, &[(0, 1)], &[TwistFactorization::cut1_core()]).unwrap();
    let m = common::typed("trefoil_arc.json");
    assert_eq!(
        exact_rank(&m, &apply(&chain, &m)),
        exact_rank(&m, &tw.apply(&m).unwrap())
    );
}

#[test]
fn frac_detector_ranks_in_both_modes() {
    for (m, expected) in [(cfd_h_inf(), 0), (h0(), 0), (trefoil(), 4)] {
        let f = frac_bimodule(&ArcDiagram::genus1()).unwrap();
        let mf = m.to_frac();
        let tw = reduce(&box_tensor(&f, &mf, DEFAULT_ITERATION_CAP).unwrap());
        for mode in [RankMode::Exact, RankMode::DEFAULT_PROBABILISTIC] {
            let r = bsfloer::structures::homology_rank(&mf, &tw, mode, 1).unwrap();
            assert_eq!(r, expected);
        }
    }
}
