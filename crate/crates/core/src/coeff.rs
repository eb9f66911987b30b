//! Exact coefficient arithmetic: F₂, the extension fields F₂ᵐ, multivariate
//! Laurent polynomials over F₂, the rational function field F₂(x₁,…,xₙ), and
//! matrix rank over that field.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoeffError {
    #[error("support length {got} does not match the ambient length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("extension degree {0} outside 1..=64")]
    BadDegree(u32),
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

// ---------------------------------------------------------------------------
// F₂ᵐ

/// Carry-less product of two polynomials over F₂ of degree < 64.
fn clmul(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let a = a as u128;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

fn deg128(p: u128) -> i32 {
    127 - p.leading_zeros() as i32
}

fn polymod(mut a: u128, f: u128) -> u128 {
    let df = deg128(f);
    while a != 0 && deg128(a) >= df {
        a ^= f << (deg128(a) - df);
    }
    a
}

fn polygcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = polymod(a, b);
        a = b;
        b = r;
    }
    a
}

fn mulmod(a: u128, b: u128, f: u128) -> u128 {
    polymod(clmul(a as u64, b as u64), f)
}

/// x^(2^k) mod f by repeated squaring.
fn frob_power(k: u32, f: u128) -> u128 {
    let mut x = polymod(2, f);
    for _ in 0..k {
        x = mulmod(x, x, f);
    }
    x
}

/// Rabin's irreducibility test for a polynomial of degree m over F₂.
pub fn is_irreducible(f: u128) -> bool {
    let m = deg128(f);
    if m < 1 {
        return false;
    }
    let m = m as u32;
    let x = polymod(2, f);
    if frob_power(m, f) != x {
        return false;
    }
    let mut n = m;
    let mut q = 2;
    let mut primes = Vec::new();
    while q * q <= n {
        if n.is_multiple_of(q) {
            primes.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    primes
        .into_iter()
        .all(|q| polygcd(f, frob_power(m / q, f) ^ x) == 1)
}

fn irreducible_table() -> &'static [u128; 65] {
    static TABLE: OnceLock<[u128; 65]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0u128; 65];
        for (m, slot) in t.iter_mut().enumerate().skip(1) {
            let top = 1u128 << m;
            let mut low = 1u128;
            loop {
                let f = top | low;
                if is_irreducible(f) {
                    *slot = f;
                    break;
                }
                low += 2;
            }
        }
        t
    })
}

/// The field F₂ᵐ realised as F₂[x]/(f) where f is the lexicographically
/// smallest irreducible polynomial of degree m.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2m {
    m: u32,
    modulus: u128,
}

impl Gf2m {
    pub fn new(m: u32) -> Result<Self, CoeffError> {
        if !(1..=64).contains(&m) {
            return Err(CoeffError::BadDegree(m));
        }
        Ok(Gf2m {
            m,
            modulus: irreducible_table()[m as usize],
        })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// The defining polynomial, with bit i holding the coefficient of xⁱ.
    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    /// Number of field elements minus one, saturating at u64::MAX for m = 64.
    pub fn max_element(&self) -> u64 {
        if self.m == 64 {
            u64::MAX
        } else {
            (1u64 << self.m) - 1
        }
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        a ^ b
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        polymod(clmul(a, b), self.modulus) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u128) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64, CoeffError> {
        if a == 0 {
            return Err(CoeffError::ZeroInverse);
        }
        Ok(self.pow(a, (1u128 << self.m) - 2))
    }

    /// Uniformly random nonzero element.
    pub fn random_nonzero<R: Rng>(&self, rng: &mut R) -> u64 {
        rng.gen_range(1..=self.max_element())
    }

    /// Rank of a dense matrix over this field by Gaussian elimination.
    pub fn rank(&self, mut rows: Vec<Vec<u64>>) -> usize {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for col in 0..ncols {
            let Some(p) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let inv = self.inv(rows[rank][col]).expect("pivot is nonzero");
            for j in col..ncols {
                rows[rank][j] = self.mul(rows[rank][j], inv);
            }
            let pivot = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && row[col] != 0 {
                    let c = row[col];
                    for j in col..ncols {
                        row[j] ^= self.mul(c, pivot[j]);
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

// ---------------------------------------------------------------------------
// Exponent vectors and Laurent monomials

pub type Exps = SmallVec<[i32; 6]>;

fn trim(mut e: Exps) -> Exps {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

fn exps_add(a: &[i32], b: &[i32]) -> Exps {
    let n = a.len().max(b.len());
    let e: Exps = (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0))
        .collect();
    trim(e)
}

fn exps_sub(a: &[i32], b: &[i32]) -> Exps {
    let n = a.len().max(b.len());
    let e: Exps = (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0) - b.get(i).copied().unwrap_or(0))
        .collect();
    trim(e)
}

fn exps_ge(a: &[i32], b: &[i32]) -> bool {
    let n = a.len().max(b.len());
    (0..n).all(|i| a.get(i).copied().unwrap_or(0) >= b.get(i).copied().unwrap_or(0))
}

fn exps_min(a: &[i32], b: &[i32]) -> Exps {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                a.get(i)
                    .copied()
                    .unwrap_or(0)
                    .min(b.get(i).copied().unwrap_or(0))
            })
            .collect(),
    )
}

/// A fixed-length integer vector, used for supports in ℤ^{4k−1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExponentVector(pub Vec<i32>);

impl ExponentVector {
    pub fn zero(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CoeffError> {
        if self.len() != other.len() {
            return Err(CoeffError::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(ExponentVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }
}

/// x₁^{e₁}⋯xₙ^{eₙ} with integer exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentMonomial(Exps);

impl LaurentMonomial {
    pub fn one() -> Self {
        LaurentMonomial(Exps::new())
    }

    pub fn from_exponents(e: &[i32]) -> Self {
        LaurentMonomial(trim(e.iter().copied().collect()))
    }

    /// x_i (zero-based index).
    pub fn var(i: usize) -> Self {
        let mut e = Exps::from_elem(0, i + 1);
        e[i] = 1;
        LaurentMonomial(e)
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> i32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        LaurentMonomial(exps_add(&self.0, &other.0))
    }

    pub fn inv(&self) -> Self {
        LaurentMonomial(self.0.iter().map(|e| -e).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for LaurentMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", mono_string(&self.0))
    }
}

/// ν: ℤⁿ → monomials, ν(a₁,…,aₙ) = x₁^{a₁}⋯xₙ^{aₙ}.
pub fn nu(support: &ExponentVector, expected_len: usize) -> Result<LaurentMonomial, CoeffError> {
    if support.len() != expected_len {
        return Err(CoeffError::LengthMismatch {
            expected: expected_len,
            got: support.len(),
        });
    }
    Ok(LaurentMonomial::from_exponents(&support.0))
}

fn mono_string(e: &[i32]) -> String {
    if e.is_empty() {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(format!("x{}", i + 1)),
            _ => parts.push(format!("x{}^{}", i + 1, k)),
        }
    }
    parts.join("*")
}

fn parse_mono(s: &str) -> Result<Exps, CoeffError> {
    let s = s.trim();
    if s == "1" {
        return Ok(Exps::new());
    }
    let mut e = Exps::new();
    for factor in s.split('*') {
        let factor = factor.trim();
        let bad = || CoeffError::Parse(s.to_string());
        let rest = factor.strip_prefix('x').ok_or_else(bad)?;
        let (idx, pow) = match rest.split_once('^') {
            Some((i, p)) => (i, p.parse::<i32>().map_err(|_| bad())?),
            None => (rest, 1),
        };
        let idx: usize = idx.parse().map_err(|_| bad())?;
        if idx == 0 {
            return Err(bad());
        }
        if e.len() < idx {
            e.resize(idx, 0);
        }
        e[idx - 1] += pow;
    }
    Ok(trim(e))
}

// ---------------------------------------------------------------------------
// Laurent polynomials over F₂

/// A finite set of Laurent monomials, read as their F₂-sum.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    terms: BTreeSet<Exps>,
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|t| mono_string(t)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(&LaurentMonomial::one())
    }

    pub fn monomial(m: &LaurentMonomial) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(m.0.clone());
        LaurentPoly { terms }
    }

    pub fn from_monomials<I: IntoIterator<Item = LaurentMonomial>>(it: I) -> Self {
        let mut p = LaurentPoly::zero();
        for m in it {
            p.toggle(m.0);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().unwrap().is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn as_monomial(&self) -> Option<LaurentMonomial> {
        if self.terms.len() == 1 {
            Some(LaurentMonomial(self.terms.iter().next().unwrap().clone()))
        } else {
            None
        }
    }

    pub fn monomials(&self) -> impl Iterator<Item = LaurentMonomial> + '_ {
        self.terms.iter().map(|e| LaurentMonomial(e.clone()))
    }

    fn toggle(&mut self, e: Exps) {
        if !self.terms.remove(&e) {
            self.terms.insert(e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for t in &other.terms {
            out.toggle(t.clone());
        }
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for t in &other.terms {
            self.toggle(t.clone());
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = LaurentPoly::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(exps_add(a, b));
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &LaurentMonomial) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|t| exps_add(t, &m.0)).collect(),
        }
    }

    /// True when every exponent is nonnegative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|t| t.iter().all(|&e| e >= 0))
    }

    /// Componentwise minimum of all exponents (the largest monomial dividing
    /// every term).
    pub fn monomial_content(&self) -> LaurentMonomial {
        let mut it = self.terms.iter();
        let Some(first) = it.next() else {
            return LaurentMonomial::one();
        };
        let mut m = first.clone();
        for t in it {
            m = exps_min(&m, t);
        }
        LaurentMonomial(m)
    }

    pub fn max_var(&self) -> usize {
        self.terms.iter().map(|t| t.len()).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> i32 {
        self.terms
            .iter()
            .map(|t| t.iter().sum::<i32>())
            .max()
            .unwrap_or(0)
    }

    fn leading(&self) -> Option<&Exps> {
        self.terms.iter().next_back()
    }

    /// Exact division of polynomials (nonnegative exponents) under lex order.
    /// Returns None when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let ld = d.leading()?.clone();
        let mut r = self.clone();
        let mut q = LaurentPoly::zero();
        while let Some(lr) = r.leading().cloned() {
            if !exps_ge(&lr, &ld) {
                return None;
            }
            let t = exps_sub(&lr, &ld);
            let tm = LaurentMonomial(t.clone());
            q.toggle(t);
            r.add_assign(&d.mul_monomial(&tm));
        }
        Some(q)
    }

    /// Evaluate at a point of (F₂ᵐ)^×ⁿ.
    pub fn eval(&self, field: &Gf2m, point: &[u64], inverses: &[u64]) -> u64 {
        let mut acc = 0u64;
        for t in &self.terms {
            let mut v = 1u64;
            for (i, &e) in t.iter().enumerate() {
                if e > 0 {
                    v = field.mul(v, field.pow(point[i], e as u128));
                } else if e < 0 {
                    v = field.mul(v, field.pow(inverses[i], (-e) as u128));
                }
            }
            acc ^= v;
        }
        acc
    }

    /// Compact textual form, for example `x1*x2^2 + x3 + 1`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(s: &str) -> Result<Self, CoeffError> {
        let s = s.trim();
        if s == "0" {
            return Ok(LaurentPoly::zero());
        }
        let mut p = LaurentPoly::zero();
        for term in s.split('+') {
            p.toggle(parse_mono(term)?);
        }
        Ok(p)
    }

    fn main_var(&self) -> Option<usize> {
        self.terms
            .iter()
            .filter_map(|t| t.iter().position(|&e| e != 0))
            .min()
    }

    fn degree_in(&self, v: usize) -> i32 {
        self.terms
            .iter()
            .map(|t| t.get(v).copied().unwrap_or(0))
            .max()
            .unwrap_or(-1)
    }

    /// Coefficient of x_v^k as a polynomial not involving x_v.
    fn coeff_in(&self, v: usize, k: i32) -> Self {
        let mut out = LaurentPoly::zero();
        for t in &self.terms {
            if t.get(v).copied().unwrap_or(0) == k {
                let mut e = t.clone();
                if v < e.len() {
                    e[v] = 0;
                }
                out.toggle(trim(e));
            }
        }
        out
    }
}

fn var_power(v: usize, k: i32) -> LaurentMonomial {
    let mut e = Exps::from_elem(0, v + 1);
    e[v] = k;
    LaurentMonomial(trim(e))
}

fn main_var_of(a: &LaurentPoly, b: &LaurentPoly) -> Option<usize> {
    match (a.main_var(), b.main_var()) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

fn content_in(a: &LaurentPoly, v: usize) -> LaurentPoly {
    let mut g = LaurentPoly::zero();
    for k in 0..=a.degree_in(v) {
        let c = a.coeff_in(v, k);
        if !c.is_zero() {
            g = poly_gcd(&g, &c);
            if g.is_one() {
                break;
            }
        }
    }
    g
}

fn prem(a: &LaurentPoly, b: &LaurentPoly, v: usize) -> LaurentPoly {
    let db = b.degree_in(v);
    let lcb = b.coeff_in(v, db);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lcr = r.coeff_in(v, dr);
        let shifted = b.mul(&lcr).mul_monomial(&var_power(v, dr - db));
        r = r.mul(&lcb).add(&shifted);
    }
    r
}

/// Greatest common divisor of two polynomials with nonnegative exponents.
/// Over F₂ the only unit is 1, so the result is canonical.
pub fn poly_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mono = LaurentMonomial(exps_min(&ma.0, &mb.0));
    let a = a.mul_monomial(&ma.inv());
    let b = b.mul_monomial(&mb.inv());
    let Some(v) = main_var_of(&a, &b) else {
        return LaurentPoly::monomial(&mono);
    };
    let ca = content_in(&a, v);
    let cb = content_in(&b, v);
    let cont = poly_gcd(&ca, &cb);
    let mut x = a.div_exact(&ca).expect("content divides");
    let mut y = b.div_exact(&cb).expect("content divides");
    if x.degree_in(v) < y.degree_in(v) {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_zero() {
        let r = prem(&x, &y, v);
        x = y;
        y = if r.is_zero() {
            r
        } else {
            let c = content_in(&r, v);
            r.div_exact(&c).expect("content divides")
        };
    }
    if x.degree_in(v) <= 0 {
        x = LaurentPoly::one();
    } else {
        let c = content_in(&x, v);
        x = x.div_exact(&c).expect("content divides");
    }
    x.mul(&cont).mul_monomial(&mono)
}

// ---------------------------------------------------------------------------
// The fraction field

/// An element num/den of F₂(x₁,…,xₙ), kept in lowest terms with both parts
/// polynomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FracScalar {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl fmt::Debug for FracScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FracScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl FracScalar {
    pub fn zero() -> Self {
        FracScalar {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        FracScalar {
            num: LaurentPoly::one(),
            den: LaurentPoly::one(),
        }
    }

    pub fn from_laurent(p: &LaurentPoly) -> Self {
        if p.is_zero() {
            return Self::zero();
        }
        let c = p.monomial_content();
        let shift = LaurentMonomial(exps_min(&c.0, &Exps::new()));
        // multiply through by x^{-shift} so that both parts are polynomials
        let num = p.mul_monomial(&shift.inv());
        let den = LaurentPoly::monomial(&shift.inv());
        Self::new(num, den).expect("monomial denominator")
    }

    pub fn from_monomial(m: &LaurentMonomial) -> Self {
        Self::from_laurent(&LaurentPoly::monomial(m))
    }

    /// Build num/den from polynomials and reduce to lowest terms.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, CoeffError> {
        if den.is_zero() {
            return Err(CoeffError::ZeroInverse);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        // strip monomial factors, then put the quotient x^{cn - cd} back with
        // nonnegative exponents on each side
        let (cn, cd) = (num.monomial_content(), den.monomial_content());
        let q = cn.mul(&cd.inv());
        let up: Vec<i32> = q.exponents().iter().map(|&e| e.max(0)).collect();
        let down: Vec<i32> = q.exponents().iter().map(|&e| (-e).max(0)).collect();
        let (up, down) = (
            LaurentMonomial::from_exponents(&up),
            LaurentMonomial::from_exponents(&down),
        );
        let num = num.mul_monomial(&cn.inv()).mul_monomial(&up);
        let den = den.mul_monomial(&cd.inv()).mul_monomial(&down);
        let g = poly_gcd(&num, &den);
        Ok(FracScalar {
            num: num.div_exact(&g).expect("gcd divides"),
            den: den.div_exact(&g).expect("gcd divides"),
        })
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::new(self.num.add(&other.num), self.den.clone()).unwrap();
        }
        Self::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
        .unwrap()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den)).unwrap()
    }

    pub fn inv(&self) -> Result<Self, CoeffError> {
        if self.is_zero() {
            return Err(CoeffError::ZeroInverse);
        }
        Ok(FracScalar {
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    pub fn to_text(&self) -> String {
        if self.den.is_one() {
            self.num.to_text()
        } else {
            format!("({})/({})", self.num.to_text(), self.den.to_text())
        }
    }

    pub fn parse(s: &str) -> Result<Self, CoeffError> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once(")/(") {
            let n = n
                .strip_prefix('(')
                .ok_or_else(|| CoeffError::Parse(s.into()))?;
            let d = d
                .strip_suffix(')')
                .ok_or_else(|| CoeffError::Parse(s.into()))?;
            let num = FracScalar::from_laurent(&LaurentPoly::parse(n)?);
            let den = FracScalar::from_laurent(&LaurentPoly::parse(d)?);
            Ok(num.mul(&den.inv()?))
        } else {
            Ok(FracScalar::from_laurent(&LaurentPoly::parse(s)?))
        }
    }
}

// ---------------------------------------------------------------------------
// Coefficient fields used by module structures

/// Scalars that can decorate arrows of a type D structure.
pub trait Scalar:
    Clone + PartialEq + Eq + std::hash::Hash + fmt::Debug + Send + Sync + 'static
{
    const NAME: &'static str;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn inv(&self) -> Result<Self, CoeffError>;
    fn to_frac(&self) -> FracScalar;
    fn to_text(&self) -> String;
    fn parse(s: &str) -> Result<Self, CoeffError>;
}

/// The prime field F₂.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2(pub bool);

impl Scalar for F2 {
    const NAME: &'static str = "F2";
    fn zero() -> Self {
        F2(false)
    }
    fn one() -> Self {
        F2(true)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
    fn add(&self, other: &Self) -> Self {
        F2(self.0 ^ other.0)
    }
    fn mul(&self, other: &Self) -> Self {
        F2(self.0 & other.0)
    }
    fn inv(&self) -> Result<Self, CoeffError> {
        if self.0 {
            Ok(*self)
        } else {
            Err(CoeffError::ZeroInverse)
        }
    }
    fn to_frac(&self) -> FracScalar {
        if self.0 {
            FracScalar::one()
        } else {
            FracScalar::zero()
        }
    }
    fn to_text(&self) -> String {
        if self.0 { "1" } else { "0" }.to_string()
    }
    fn parse(s: &str) -> Result<Self, CoeffError> {
        match s.trim() {
            "1" => Ok(F2(true)),
            "0" => Ok(F2(false)),
            other => Err(CoeffError::Parse(other.to_string())),
        }
    }
}

impl Scalar for FracScalar {
    const NAME: &'static str = "Frac";
    fn zero() -> Self {
        FracScalar::zero()
    }
    fn one() -> Self {
        FracScalar::one()
    }
    fn is_zero(&self) -> bool {
        FracScalar::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        FracScalar::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        FracScalar::mul(self, other)
    }
    fn inv(&self) -> Result<Self, CoeffError> {
        FracScalar::inv(self)
    }
    fn to_frac(&self) -> FracScalar {
        self.clone()
    }
    fn to_text(&self) -> String {
        FracScalar::to_text(self)
    }
    fn parse(s: &str) -> Result<Self, CoeffError> {
        FracScalar::parse(s)
    }
}

// ---------------------------------------------------------------------------
// Rank over the fraction field

/// How ranks over F₂(x₁,…,xₙ) are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMode {
    /// Evaluate at random points of (F₂ᵐ)^× and take the maximal rank over
    /// `reps` repetitions.
    Probabilistic { m: u32, reps: u32 },
    /// Fraction-free elimination over the polynomial ring.
    Exact,
}

impl RankMode {
    pub const DEFAULT_PROBABILISTIC: RankMode = RankMode::Probabilistic { m: 32, reps: 3 };

    pub fn label(&self) -> &'static str {
        match self {
            RankMode::Probabilistic { .. } => "probabilistic",
            RankMode::Exact => "exact",
        }
    }
}

impl Default for RankMode {
    fn default() -> Self {
        Self::DEFAULT_PROBABILISTIC
    }
}

/// One nonzero assignment per variable, reproducible from a seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalPoint {
    pub assignments: Vec<u64>,
    pub seed: u64,
}

impl EvalPoint {
    pub fn from_seed(field: &Gf2m, nvars: usize, seed: u64, repetition: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(repetition as u64);
        let assignments = (0..nvars).map(|_| field.random_nonzero(&mut rng)).collect();
        EvalPoint { assignments, seed }
    }
}

fn matrix_nvars(rows: &[Vec<LaurentPoly>]) -> usize {
    rows.iter()
        .flat_map(|r| r.iter())
        .map(|p| p.max_var())
        .max()
        .unwrap_or(0)
}

/// Rank of a matrix of Laurent polynomials viewed over the fraction field.
pub fn rank_over_fraction_field(rows: &[Vec<LaurentPoly>], mode: RankMode, seed: u64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    match mode {
        RankMode::Probabilistic { m, reps } => probabilistic_rank(rows, m, reps, seed),
        RankMode::Exact => exact_rank(rows.to_vec()),
    }
}

fn probabilistic_rank(rows: &[Vec<LaurentPoly>], m: u32, reps: u32, seed: u64) -> usize {
    let field = Gf2m::new(m).expect("valid extension degree");
    let nvars = matrix_nvars(rows);
    let mut best = 0;
    for rep in 0..reps.max(1) {
        let pt = EvalPoint::from_seed(&field, nvars, seed, rep);
        let inv: Vec<u64> = pt
            .assignments
            .iter()
            .map(|&a| field.inv(a).expect("nonzero"))
            .collect();
        let dense: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|p| p.eval(&field, &pt.assignments, &inv))
                    .collect()
            })
            .collect();
        best = best.max(field.rank(dense));
    }
    best
}

/// Exact rank: eliminate on monomial pivots (units of the Laurent ring)
/// while any exist, then finish with Bareiss on the polynomial remainder.
fn exact_rank(mut m: Vec<Vec<LaurentPoly>>) -> usize {
    let mut rank = 0;
    loop {
        if m.is_empty() || m[0].is_empty() {
            return rank;
        }
        let mut pivot = None;
        let mut best = usize::MAX;
        for (i, row) in m.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.term_count() == 1 {
                    let fill = row.iter().filter(|x| !x.is_zero()).count()
                        * m.iter().filter(|r| !r[j].is_zero()).count();
                    if fill < best {
                        best = fill;
                        pivot = Some((i, j));
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        let p_inv = m[pi][pj].as_monomial().unwrap().inv();
        let prow = m.swap_remove(pi);
        for row in m.iter_mut() {
            if row[pj].is_zero() {
                continue;
            }
            let factor = row[pj].mul_monomial(&p_inv);
            for (j, e) in prow.iter().enumerate() {
                if j != pj && !e.is_zero() {
                    row[j].add_assign(&factor.mul(e));
                }
            }
            row[pj] = LaurentPoly::zero();
        }
        for row in m.iter_mut() {
            row.swap_remove(pj);
        }
        m.retain(|r| r.iter().any(|e| !e.is_zero()));
        rank += 1;
    }
    // clear Laurent denominators row by row
    for row in m.iter_mut() {
        let mut c = Exps::new();
        for e in row.iter().filter(|e| !e.is_zero()) {
            c = exps_min(&c, &e.monomial_content().0);
        }
        let shift = LaurentMonomial(c).inv();
        for e in row.iter_mut() {
            *e = e.mul_monomial(&shift);
        }
    }
    rank + bareiss_rank(m)
}

fn bareiss_rank(mut m: Vec<Vec<LaurentPoly>>) -> usize {
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut prev = LaurentPoly::one();
    let mut k = 0;
    while k < nrows.min(ncols) {
        let mut pivot = None;
        let mut best = usize::MAX;
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, e) in row.iter().enumerate().skip(k) {
                if !e.is_zero() && e.term_count() < best {
                    best = e.term_count();
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        let pk = m[k][k].clone();
        for i in (k + 1)..nrows {
            let lead = m[i][k].clone();
            for j in (k + 1)..ncols {
                let v = pk.mul(&m[i][j]).add(&lead.mul(&m[k][j]));
                m[i][j] = v.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = LaurentPoly::zero();
        }
        prev = pk;
        k += 1;
    }
    k
}

/// Rank of a matrix over F₂ given as rows of packed bits.
pub fn f2_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let words = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for w in 0..words {
        for bit in 0..64 {
            let mask = 1u64 << bit;
            let Some(p) = (rank..rows.len()).find(|&i| rows[i][w] & mask != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && row[w] & mask != 0 {
                    for (x, y) in row.iter_mut().zip(&pivot).skip(w) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                return rank;
            }
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aes_polynomial_is_the_degree_8_modulus() {
        assert_eq!(Gf2m::new(8).unwrap().modulus(), 0x11b);
        assert_eq!(Gf2m::new(1).unwrap().modulus(), 0b11);
        assert_eq!(Gf2m::new(2).unwrap().modulus(), 0b111);
    }

    #[test]
    fn gcd_of_shared_factor() {
        let a = LaurentPoly::parse("x1 + x2").unwrap();
        let b = LaurentPoly::parse("x1*x3 + 1").unwrap();
        let c = LaurentPoly::parse("x2^2 + x3").unwrap();
        let g = poly_gcd(&a.mul(&b), &a.mul(&c));
        assert_eq!(g, a);
    }

    #[test]
    fn laurent_text_round_trip() {
        let p = LaurentPoly::parse("x1*x2^-1 + x3^2 + 1").unwrap();
        assert_eq!(LaurentPoly::parse(&p.to_text()).unwrap(), p);
    }
}
