mod common;

use bsfloer::bimodlib::{cfd_h_inf, dd_identity};
use bsfloer::heegaard::*;
use bsfloer::structures::reduce;
use common::{exact_rank, isomorphic, nice};

const ALL: [(&str, &str); 8] = [
    ("zb_identity", templates::ZB_IDENTITY),
    ("genus1_identity", templates::GENUS1_IDENTITY),
    ("solid_torus_inf", templates::SOLID_TORUS_INF),
    ("solid_torus_zero", templates::SOLID_TORUS_ZERO),
    ("genus1_arcslide", templates::GENUS1_ARCSLIDE),
    ("cut1_identity", templates::CUT1_IDENTITY),
    ("genus1_arcslide43", templates::GENUS1_ARCSLIDE43),
    ("genus1_arcslide32", templates::GENUS1_ARCSLIDE32),
];

#[test]
fn templates_validate_and_give_valid_structures() {
    for (name, src) in ALL {
        let d = NiceDiagram::from_json(src).unwrap_or_else(|e| panic!("{name}: {e}"));
        let m = d.bsd().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(m.check().ok(), "{name}: {}", m.check());
        assert_eq!(m.len(), d.generators().len(), "{name}");
    }
}

#[test]
fn solid_tori() {
    let inf = nice(templates::SOLID_TORUS_INF);
    let zero = nice(templates::SOLID_TORUS_ZERO);
    assert!(isomorphic(&reduce(&inf), &cfd_h_inf()));
    assert_eq!(exact_rank(&inf, &zero), 1);
    assert_eq!(exact_rank(&zero, &zero), 2);
}

#[test]
fn fixture_diagram_of_the_trivial_arc() {
    let d = NiceDiagram::from_json(&common::fixture("trivial_arc_hd.json")).unwrap();
    let m = d.bsd().unwrap();
    assert!(m.check().ok());
    assert_eq!(exact_rank(&m, &m), 1);
}

#[test]
fn mirror_is_an_involution() {
    for (name, src) in ALL {
        let f = HeegaardFile::from_json(src).unwrap();
        let mut back = f.mirror().mirror();
        back.name = f.name.clone();
        assert_eq!(back, f, "{name}");
    }
}

#[test]
fn mirrored_diagrams_stay_valid() {
    for (name, src) in ALL {
        let d = NiceDiagram::from_json(src).unwrap();
        let m = mirror(&d).unwrap_or_else(|e| panic!("{name}: {e}"));
        let s = m.bsd().unwrap();
        assert!(s.check().ok(), "{name}");
        assert_eq!(s.len(), d.bsd().unwrap().len(), "{name}");
    }
}

#[test]
fn identity_template_is_the_identity_dd() {
    let g = bsfloer::arcdiagram::ArcDiagram::genus1();
    assert!(isomorphic(
        &nice(templates::GENUS1_IDENTITY),
        &dd_identity(&g)
    ));
}

#[test]
fn euler_measure_matches_surface() {
    for (name, src) in ALL {
        let d = NiceDiagram::from_json(src).unwrap();
        assert!(d.num_regions() > 0, "{name}");
        assert!(d.euler_characteristic() <= 1, "{name}");
    }
}

fn edit(src: &str, f: impl FnOnce(&mut serde_json::Value)) -> String {
    let mut v: serde_json::Value = serde_json::from_str(src).unwrap();
    f(&mut v);
    v.to_string()
}

#[test]
fn malformed_diagrams_are_rejected() {
    let src = templates::SOLID_TORUS_INF;
    let cases = [
        edit(src, |v| v["schema"] = "other/1".into()),
        edit(src, |v| v["edges"][0]["to"] = "NOWHERE".into()),
        edit(src, |v| {
            let e = v["edges"][0].clone();
            v["edges"].as_array_mut().unwrap().push(e);
        }),
        edit(src, |v| {
            v["regions"].as_array_mut().unwrap().pop();
        }),
        "{".to_string(),
    ];
    for (i, c) in cases.iter().enumerate() {
        assert!(NiceDiagram::from_json(c).is_err(), "case {i} accepted");
    }
}

#[test]
fn unknown_identifier_is_localized() {
    let bad = edit(templates::SOLID_TORUS_INF, |v| {
        v["edges"][0]["to"] = "NOWHERE".into()
    });
    let e = NiceDiagram::from_json(&bad).err().unwrap();
    assert!(e.to_string().contains("NOWHERE"), "{e}");
}

#[test]
fn file_round_trips() {
    for (name, src) in ALL {
        let f = HeegaardFile::from_json(src).unwrap();
        assert_eq!(HeegaardFile::from_json(&f.to_json()).unwrap(), f, "{name}");
    }
}
