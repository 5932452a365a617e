//! The Lubin–Tate formal group with logarithm `f(T) = Σ_k T^{p^{kh}}/p^k`,
//! computed exactly over `Q` and truncated at total degree `D`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::padic::{make_field, PadicElement, PadicError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormalGroupError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("height must be at least 1")]
    ZeroHeight,
    #[error("truncation degree {found} is below the minimum {min}")]
    DegreeTooSmall { found: u32, min: u32 },
    #[error("truncation degree {0} exceeds the supported maximum 255")]
    DegreeTooLarge(u32),
    #[error("coefficient of {monomial:?} is {value}, which is not p-integral")]
    NotIntegral { monomial: [u8; 3], value: String },
    #[error("truncation degree {found} is too small to see T^{need}")]
    TruncationTooSmall { found: u32, need: u64 },
    #[error("ζ is not a root of unity of order dividing p^h − 1")]
    NotARootOfUnity,
    #[error("ζ must live in the unramified extension of degree h")]
    WrongField,
}

/// A power series in up to three variables, truncated above total degree `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series<T> {
    d: u32,
    terms: BTreeMap<[u8; 3], T>,
}

fn total(e: &[u8; 3]) -> u32 {
    e.iter().map(|&x| u32::from(x)).sum()
}

impl<T: Clone + Num> Series<T> {
    pub fn zero(d: u32) -> Self {
        Series { d, terms: BTreeMap::new() }
    }

    pub fn monomial(d: u32, e: [u8; 3], c: T) -> Self {
        let mut s = Self::zero(d);
        s.add_term(e, c);
        s
    }

    /// The variable with index `i`.
    pub fn var(d: u32, i: usize) -> Self {
        let mut e = [0u8; 3];
        e[i] = 1;
        Self::monomial(d, e, T::one())
    }

    pub fn constant(d: u32, c: T) -> Self {
        Self::monomial(d, [0; 3], c)
    }

    pub fn degree_bound(&self) -> u32 {
        self.d
    }

    fn add_term(&mut self, e: [u8; 3], c: T) {
        if total(&e) > self.d || c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(T::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn coeff(&self, e: [u8; 3]) -> T {
        self.terms.get(&e).cloned().unwrap_or_else(T::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8; 3], &T)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, T::zero() - c.clone());
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.d);
        for (e, x) in &self.terms {
            out.add_term(*e, x.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.d.min(other.d);
        let mut out = Self::zero(d);
        for (a, x) in &self.terms {
            let ta = total(a);
            for (b, y) in &other.terms {
                if ta + total(b) > d {
                    continue;
                }
                let e = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                out.add_term(e, x.clone() * y.clone());
            }
        }
        out
    }

    /// `g(s)` for univariate `g` (in variable 0) and `s` without constant term.
    pub fn compose(g: &Self, s: &Self) -> Self {
        debug_assert!(s.coeff([0; 3]).is_zero());
        let top = g.terms.keys().map(|e| e[0]).max().unwrap_or(0);
        let mut acc = Self::zero(s.d);
        for k in (0..=top).rev() {
            acc = acc.mul(s);
            acc.add_term([0; 3], g.coeff([k, 0, 0]));
        }
        acc
    }

    /// `Σ c_{ij} u^i v^j` for a bivariate series in variables 0, 1.
    pub fn substitute2(&self, u: &Self, v: &Self) -> Self {
        let d = u.d.min(v.d);
        let pu = powers(u, d);
        let pv = powers(v, d);
        let mut out = Self::zero(d);
        for (e, c) in &self.terms {
            let t = pu[e[0] as usize].mul(&pv[e[1] as usize]).scale(c);
            out = out.add(&t);
        }
        out
    }

    /// Drops terms above total degree `d` (and lowers the bound to `d`).
    pub fn truncate(&self, d: u32) -> Self {
        let mut out = Self::zero(d);
        for (e, c) in &self.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

fn powers<T: Clone + Num>(s: &Series<T>, d: u32) -> Vec<Series<T>> {
    let mut out = vec![Series::constant(d, T::one())];
    for k in 1..=d as usize {
        let next = out[k - 1].mul(s);
        out.push(next);
    }
    out
}

pub type RationalSeries = Series<BigRational>;
pub type IntegerSeries = Series<BigInt>;

fn check_inputs(p: u64, h: u32) -> Result<(), FormalGroupError> {
    if !crate::padic::residue::is_prime(p) {
        return Err(FormalGroupError::NotPrime(p));
    }
    if h == 0 {
        return Err(FormalGroupError::ZeroHeight);
    }
    Ok(())
}

/// `f(T) = Σ_{k ≥ 0} T^{p^{kh}}/p^k`, truncated at degree `d`.
pub fn lubin_tate_log(p: u64, h: u32, d: u32) -> Result<RationalSeries, FormalGroupError> {
    check_inputs(p, h)?;
    if d < 1 {
        return Err(FormalGroupError::DegreeTooSmall { found: d, min: 1 });
    }
    if d > 255 {
        return Err(FormalGroupError::DegreeTooLarge(d));
    }
    let mut f = Series::zero(d);
    let q = p.pow(h);
    let (mut e, mut den) = (1u64, BigInt::one());
    while e <= u64::from(d) {
        f.add_term([e as u8, 0, 0], BigRational::new(BigInt::one(), den.clone()));
        e *= q;
        den *= BigInt::from(p);
    }
    Ok(f)
}

/// The compositional inverse of a univariate `f = T + …`.
pub fn series_inverse(f: &RationalSeries) -> RationalSeries {
    let d = f.degree_bound();
    let t = Series::var(d, 0);
    let mut g = t.clone();
    for _ in 0..=d {
        let err = Series::compose(f, &g).sub(&t);
        if err.terms.is_empty() {
            break;
        }
        g = g.sub(&err);
    }
    g
}

fn to_integral(s: &RationalSeries) -> Result<IntegerSeries, FormalGroupError> {
    let mut out = Series::zero(s.d);
    for (e, c) in &s.terms {
        if !c.denom().is_one() {
            return Err(FormalGroupError::NotIntegral { monomial: *e, value: format!("{}/{}", c.numer(), c.denom()) });
        }
        out.add_term(*e, c.numer().clone());
    }
    Ok(out)
}

fn to_rational(s: &IntegerSeries) -> RationalSeries {
    let mut out = Series::zero(s.d);
    for (e, c) in &s.terms {
        out.add_term(*e, BigRational::from_integer(c.clone()));
    }
    out
}

/// `F(X, Y) = f⁻¹(f(X) + f(Y))` with integer coefficients.
#[derive(Clone, Debug)]
pub struct FormalGroupLaw {
    p: u64,
    h: u32,
    d: u32,
    log: RationalSeries,
    exp: RationalSeries,
    law: IntegerSeries,
}

pub fn group_law(p: u64, h: u32, d: u32) -> Result<FormalGroupLaw, FormalGroupError> {
    check_inputs(p, h)?;
    if d < 2 {
        return Err(FormalGroupError::DegreeTooSmall { found: d, min: 2 });
    }
    let log = lubin_tate_log(p, h, d)?;
    let exp = series_inverse(&log);
    let y = Series::var(d, 1);
    let fx = log.clone();
    let fy = Series::compose(&log, &y);
    let law = to_integral(&Series::compose(&exp, &fx.add(&fy).truncate(d)).truncate(d))?;
    debug_assert_eq!(law.coeff([1, 0, 0]), BigInt::one());
    Ok(FormalGroupLaw { p, h, d, log, exp, law })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub left_unit: bool,
    pub right_unit: bool,
    pub commutative: bool,
    pub associative: bool,
    pub log_additive: bool,
}

impl AxiomReport {
    pub fn all(&self) -> bool {
        self.left_unit && self.right_unit && self.commutative && self.associative && self.log_additive
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeightCertificate {
    /// Coefficient of `T` in `[p](T)` equals `p`.
    pub linear_term_is_p: bool,
    /// Lowest degree whose coefficient is nonzero mod `p`.
    pub lowest_unit_degree: Option<u64>,
    pub expected_degree: u64,
    pub height: Option<u32>,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZetaReport {
    pub order_divides: bool,
    pub log_equivariant: bool,
    pub endomorphism: bool,
    pub commutes_with_p: bool,
}

impl ZetaReport {
    pub fn all(&self) -> bool {
        self.order_divides && self.log_equivariant && self.endomorphism && self.commutes_with_p
    }
}

impl FormalGroupLaw {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn log(&self) -> &RationalSeries {
        &self.log
    }

    pub fn law(&self) -> &IntegerSeries {
        &self.law
    }

    /// `[p](T) = f⁻¹(p·f(T))`.
    pub fn p_series(&self) -> Result<IntegerSeries, FormalGroupError> {
        let pf = self.log.scale(&BigRational::from_integer(self.p.into()));
        to_integral(&Series::compose(&self.exp, &pf))
    }

    /// `F(F(X,Y),Z) = F(X,F(Y,Z))`, units, symmetry and `f(F) = f(X) + f(Y)`.
    pub fn check_axioms(&self) -> AxiomReport {
        let d = self.d;
        let (x, y, z) = (Series::var(d, 0), Series::var(d, 1), Series::var(d, 2));
        let zero = Series::zero(d);
        let left_unit = self.law.substitute2(&zero, &y) == y;
        let right_unit = self.law.substitute2(&x, &zero) == x;
        let commutative = self.law.substitute2(&y, &x) == self.law;
        let fxy = self.law.clone();
        let fyz = self.law.substitute2(&y, &z);
        let associative = self.law.substitute2(&fxy, &z) == self.law.substitute2(&x, &fyz);
        let lhs = Series::compose(&self.log, &to_rational(&self.law));
        let rhs = self.log.add(&Series::compose(&self.log, &Series::var(d, 1)));
        AxiomReport { left_unit, right_unit, commutative, associative, log_additive: lhs == rhs }
    }

    /// The height read off `[p](T) mod p`.
    pub fn height_certificate(&self) -> Result<HeightCertificate, FormalGroupError> {
        let expected = self.p.pow(self.h);
        if u64::from(self.d) < expected {
            return Err(FormalGroupError::TruncationTooSmall { found: self.d, need: expected });
        }
        let ps = self.p_series()?;
        let p = BigInt::from(self.p);
        let linear_term_is_p = ps.coeff([1, 0, 0]) == p;
        let lowest = ps
            .terms()
            .filter(|(_, c)| !c.mod_floor(&p).is_zero())
            .map(|(e, _)| u64::from(e[0]))
            .min();
        let height = lowest.and_then(|k| {
            let mut h = 0;
            let mut q = 1;
            while q < k {
                q *= self.p;
                h += 1;
            }
            (q == k).then_some(h)
        });
        Ok(HeightCertificate {
            linear_term_is_p,
            lowest_unit_degree: lowest,
            expected_degree: expected,
            certified: linear_term_is_p && lowest == Some(expected),
            height,
        })
    }

    /// Checks `[ζ](T) = ζT` against the law, given `ζ ∈ μ_{p^h−1} ⊂ Z_{p^h}`.
    ///
    /// Since `[ζ]` is linear, each identity reduces to `ζ^{k−1} = 1` for the
    /// total degrees `k` of nonzero coefficients of `f`, `F` and `[p]`.
    pub fn zeta_action(&self, zeta: &PadicElement) -> Result<ZetaReport, FormalGroupError> {
        let field = zeta.field();
        if field.p() != self.p || field.degree() != self.h as usize {
            return Err(FormalGroupError::WrongField);
        }
        let one = PadicElement::one(field);
        let order = self.p.pow(self.h) - 1;
        let order_divides = zeta.pow(order).approx_eq(&one);
        if !order_divides {
            return Err(FormalGroupError::NotARootOfUnity);
        }
        let fixes = |degrees: Vec<u32>| degrees.into_iter().all(|k| zeta.pow(u64::from(k) - 1).approx_eq(&one));
        let log_equivariant = fixes(self.log.terms().map(|(e, _)| total(e)).collect());
        let endomorphism = fixes(self.law.terms().map(|(e, _)| total(e)).collect());
        let ps = self.p_series()?;
        let commutes_with_p = fixes(ps.terms().map(|(e, _)| total(e)).collect());
        Ok(ZetaReport { order_divides, log_equivariant, endomorphism, commutes_with_p })
    }

    /// The Teichmüller generator of `μ_{p^h−1}` lifting the class of `x`
    /// (for `h = 1`, of the least primitive root mod `p`).
    pub fn default_zeta(&self, precision: u32) -> Result<PadicElement, FormalGroupError> {
        let field = make_field(self.p, self.h as usize, precision)?;
        if self.h == 1 {
            let g = (1..self.p).find(|&g| is_primitive_root(g, self.p)).unwrap_or(1);
            return Ok(PadicElement::teichmueller(&field, &[g]));
        }
        let mut residue = vec![0u64; self.h as usize];
        residue[1] = 1;
        Ok(PadicElement::teichmueller(&field, &residue))
    }
}

fn is_primitive_root(g: u64, p: u64) -> bool {
    let mut x = 1u64;
    for k in 1..p {
        x = x * g % p;
        if x == 1 {
            return k == p - 1;
        }
    }
    false
}

/// `[[exponents or degree, "num/den"]]` pairs for JSON output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesJson {
    pub p: u64,
    pub h: u32,
    #[serde(rename = "D")]
    pub d: u32,
    pub series: Vec<(serde_json::Value, String)>,
}

pub fn series_json<T: Clone + Num + std::fmt::Display + Signed>(
    p: u64,
    h: u32,
    s: &Series<T>,
    nvars: usize,
) -> SeriesJson {
    let series = s
        .terms()
        .map(|(e, c)| {
            let key = if nvars == 1 {
                serde_json::json!(e[0])
            } else {
                serde_json::json!(e[..nvars].to_vec())
            };
            (key, fraction_string(c))
        })
        .collect();
    SeriesJson { p, h, d: s.degree_bound(), series }
}

fn fraction_string<T: std::fmt::Display>(c: &T) -> String {
    let s = c.to_string();
    if s.contains('/') {
        s
    } else {
        format!("{s}/1")
    }
}
