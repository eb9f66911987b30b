use bsfloer::coeff::*;
use proptest::prelude::*;

const NVARS: usize = 3;

/// A product of at most `max_deg` factors x_i^{±1}, so the total degree is bounded.
fn monomial(max_deg: i32) -> impl Strategy<Value = LaurentMonomial> {
    prop::collection::vec((0..NVARS, prop::bool::ANY), 0..=max_deg as usize).prop_map(|steps| {
        let mut e = vec![0; NVARS];
        for (i, up) in steps {
            e[i] += if up { 1 } else { -1 };
        }
        LaurentMonomial::from_exponents(&e)
    })
}

fn poly(max_deg: i32) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(monomial(max_deg), 0..4).prop_map(LaurentPoly::from_monomials)
}

fn product(a: &[Vec<LaurentPoly>], b: &[Vec<LaurentPoly>]) -> Vec<Vec<LaurentPoly>> {
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = LaurentPoly::zero();
                    for (k, x) in row.iter().enumerate() {
                        acc.add_assign(&x.mul(&b[k][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn matrix(rows: usize, cols: usize, deg: i32) -> impl Strategy<Value = Vec<Vec<LaurentPoly>>> {
    prop::collection::vec(prop::collection::vec(poly(deg), cols), rows)
}

/// Laurent matrices up to 6×6 with entries of degree ≤ 4; half are built as
/// products through a smaller inner dimension so that rank deficiency is common.
fn laurent_matrix() -> impl Strategy<Value = Vec<Vec<LaurentPoly>>> {
    (1usize..=6, 1usize..=6, 1usize..=6).prop_flat_map(|(r, c, inner)| {
        prop_oneof![
            matrix(r, c, 4),
            (matrix(r, inner, 2), matrix(inner, c, 2)).prop_map(|(a, b)| product(&a, &b)),
        ]
    })
}

fn support() -> impl Strategy<Value = ExponentVector> {
    prop::collection::vec(-5i32..=5, 7).prop_map(ExponentVector)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn probabilistic_rank_matches_exact(m in laurent_matrix(), seed in any::<u64>()) {
        let exact = rank_over_fraction_field(&m, RankMode::Exact, 0);
        let prob = rank_over_fraction_field(&m, RankMode::DEFAULT_PROBABILISTIC, seed);
        prop_assert_eq!(prob, exact);
    }

    #[test]
    fn nu_is_a_monoid_homomorphism(a in support(), b in support()) {
        let sum = a.checked_add(&b).unwrap();
        prop_assert_eq!(nu(&sum, 7).unwrap(), nu(&a, 7).unwrap().mul(&nu(&b, 7).unwrap()));
        prop_assert!(nu(&ExponentVector::zero(7), 7).unwrap().is_one());
    }
}

proptest! {
    #[test]
    fn gf2m_inverse(a in 1u64..u32::MAX as u64) {
        let f = Gf2m::new(32).unwrap();
        prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
    }

    #[test]
    fn gf2m_distributes(a in 0u64..1 << 32, b in 0u64..1 << 32, c in 0u64..1 << 32) {
        let f = Gf2m::new(32).unwrap();
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
    }

    #[test]
    fn laurent_text_round_trips(p in poly(4)) {
        prop_assert_eq!(LaurentPoly::parse(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn fractions_form_a_field(p in poly(3), q in poly(3).prop_filter("nonzero", |q| !q.is_zero())) {
        let x = FracScalar::new(p.clone(), q.clone()).unwrap();
        let y = FracScalar::from_laurent(&q);
        prop_assert_eq!(x.mul(&y), FracScalar::from_laurent(&p));
        prop_assert!(x.add(&x).is_zero());
        if !p.is_zero() {
            prop_assert!(x.mul(&x.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn f2_rank_bounded(rows in prop::collection::vec(prop::collection::vec(0u64..2, 5), 1..6)) {
        let r = f2_rank(rows.clone());
        prop_assert!(r <= rows.len().min(5));
    }
}

#[test]
fn rank_of_identity_and_zero() {
    let one = LaurentPoly::one();
    let z = LaurentPoly::zero();
    let id = vec![vec![one.clone(), z.clone()], vec![z.clone(), one.clone()]];
    assert_eq!(rank_over_fraction_field(&id, RankMode::Exact, 0), 2);
    assert_eq!(
        rank_over_fraction_field(&[vec![z.clone(), z]], RankMode::Exact, 0),
        0
    );
}

#[test]
fn symbolic_rank_drop() {
    let p = |s: &str| LaurentPoly::parse(s).unwrap();
    // det = (x1 + 1)(x1 + 1) + (x1^2 + 1) = 0 over F₂
    let m = vec![vec![p("x1 + 1"), p("x1^2 + 1")], vec![p("1"), p("x1 + 1")]];
    assert_eq!(rank_over_fraction_field(&m, RankMode::Exact, 0), 1);
    for seed in 1..=5 {
        assert_eq!(
            rank_over_fraction_field(&m, RankMode::DEFAULT_PROBABILISTIC, seed),
            1
        );
    }
}

#[test]
fn irreducible_moduli() {
    for m in [1, 8, 16, 32, 64] {
        let f = Gf2m::new(m).unwrap();
        assert!(is_irreducible(f.modulus()), "m = {m}");
        assert_eq!(f.degree(), m);
    }
    assert!(Gf2m::new(0).is_err());
    assert!(Gf2m::new(65).is_err());
}

#[test]
fn nu_rejects_wrong_length() {
    assert!(nu(&ExponentVector::zero(3), 7).is_err());
}

#[test]
fn fractions_accept_laurent_parts() {
    let p = |s: &str| LaurentPoly::parse(s).unwrap();
    let x = FracScalar::new(p("x1^-1 + x2"), p("x2^-2")).unwrap();
    assert_eq!(x, FracScalar::new(p("x2^2 + x1*x2^3"), p("x1")).unwrap());
    assert!(x.mul(&x.inv().unwrap()).is_one());
}
