//! Exact rational valuation bookkeeping (normalized `v(p) = 1`): the period
//! `t` with `v(t) = 1/(p−1)`, valuations of CM periods, determinant laws for
//! period matrices and the height-transfer statement.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use serde::{Serialize, Serializer};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LedgerError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("height must be at least 1")]
    ZeroHeight,
    #[error("critical index {i0} out of range for height {h}")]
    IndexOutOfRange { i0: usize, h: u32 },
    #[error("CM type has {found} entries, expected {h}")]
    TypeLength { found: usize, h: u32 },
    #[error("only dimension d = 1 is computed (got d = {0})")]
    DimensionNotOne(u32),
    #[error("n must be at least 1")]
    ZeroN,
    #[error("ht(Δ) = {found}, but the transfer needs n(n−1)/2 = {expected}")]
    DeltaHeight { expected: String, found: String },
    #[error("ht(ρ_G) = {ht_g} is not divisible by n = {n}")]
    NotDivisible { ht_g: i64, n: u32 },
}

/// An exact rational valuation. Serializes as `"num/den"`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValuationExpr(BigRational);

impl ValuationExpr {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        ValuationExpr(BigRational::new(num.into(), den.into()))
    }

    pub fn integer(k: i64) -> Self {
        ValuationExpr(BigRational::from_integer(k.into()))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }
}

impl fmt::Display for ValuationExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Serialize for ValuationExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Add for ValuationExpr {
    type Output = ValuationExpr;
    fn add(self, rhs: Self) -> Self {
        ValuationExpr(self.0 + rhs.0)
    }
}

impl Sub for ValuationExpr {
    type Output = ValuationExpr;
    fn sub(self, rhs: Self) -> Self {
        ValuationExpr(self.0 - rhs.0)
    }
}

impl Mul<i64> for ValuationExpr {
    type Output = ValuationExpr;
    fn mul(self, rhs: i64) -> Self {
        ValuationExpr(self.0 * BigRational::from_integer(rhs.into()))
    }
}

impl Neg for ValuationExpr {
    type Output = ValuationExpr;
    fn neg(self) -> Self {
        ValuationExpr(-self.0)
    }
}

impl std::iter::Sum for ValuationExpr {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

fn check_prime(p: u64) -> Result<(), LedgerError> {
    if crate::padic::residue::is_prime(p) {
        Ok(())
    } else {
        Err(LedgerError::NotPrime(p))
    }
}

fn pow_big(p: u64, e: u32) -> BigInt {
    Pow::pow(BigInt::from(p), e)
}

/// `v(t) = 1/(p−1)`.
pub fn t_valuation(p: u64) -> Result<ValuationExpr, LedgerError> {
    check_prime(p)?;
    Ok(ValuationExpr::new(1, p - 1))
}

/// `p^i/(p^h−1)`.
pub fn lt_character_valuation(i: u32, p: u64, h: u32) -> Result<ValuationExpr, LedgerError> {
    check_prime(p)?;
    if h == 0 {
        return Err(LedgerError::ZeroHeight);
    }
    if i >= h {
        return Err(LedgerError::IndexOutOfRange { i0: i as usize, h });
    }
    Ok(ValuationExpr::new(pow_big(p, i), pow_big(p, h) - 1u32))
}

/// `v(y_i) = p^{h+i−i_0}/(p^h−1)` for `i < i_0` and `p^{i−i_0}/(p^h−1)` for `i ≥ i_0`.
pub fn cm_period_valuations(p: u64, h: u32, i0: usize) -> Result<Vec<ValuationExpr>, LedgerError> {
    check_prime(p)?;
    if h == 0 {
        return Err(LedgerError::ZeroHeight);
    }
    if i0 >= h as usize {
        return Err(LedgerError::IndexOutOfRange { i0, h });
    }
    let den: BigInt = pow_big(p, h) - 1;
    Ok((0..h as usize)
        .map(|i| {
            let e = if i < i0 { h as usize + i - i0 } else { i - i0 };
            ValuationExpr::new(pow_big(p, e as u32), den.clone())
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CmType {
    DimensionOne { i0: usize },
    /// Exponents `a_i` with `Σ a_i = d`.
    General { a: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CmDatum {
    pub p: u64,
    pub h: u32,
    pub cm_type: CmType,
}

impl CmDatum {
    pub fn dimension_one(p: u64, h: u32, i0: usize) -> Result<Self, LedgerError> {
        check_prime(p)?;
        if h == 0 {
            return Err(LedgerError::ZeroHeight);
        }
        if i0 >= h as usize {
            return Err(LedgerError::IndexOutOfRange { i0, h });
        }
        Ok(CmDatum { p, h, cm_type: CmType::DimensionOne { i0 } })
    }

    pub fn general(p: u64, h: u32, a: Vec<u32>) -> Result<Self, LedgerError> {
        check_prime(p)?;
        if h == 0 {
            return Err(LedgerError::ZeroHeight);
        }
        if a.len() != h as usize {
            return Err(LedgerError::TypeLength { found: a.len(), h });
        }
        Ok(CmDatum { p, h, cm_type: CmType::General { a } })
    }

    pub fn d(&self) -> u32 {
        match &self.cm_type {
            CmType::DimensionOne { .. } => 1,
            CmType::General { a } => a.iter().sum(),
        }
    }

    /// The critical index of a dimension-one type.
    pub fn i0(&self) -> Result<usize, LedgerError> {
        match &self.cm_type {
            CmType::DimensionOne { i0 } => Ok(*i0),
            CmType::General { a } => match (self.d(), a.iter().position(|&x| x == 1)) {
                (1, Some(i)) => Ok(i),
                (d, _) => Err(LedgerError::DimensionNotOne(d)),
            },
        }
    }

    pub fn y_valuations(&self) -> Result<Vec<ValuationExpr>, LedgerError> {
        cm_period_valuations(self.p, self.h, self.i0()?)
    }
}

/// `Σ v(y_i) = 1/(p−1)`.
pub fn check_sum_identity(cm: &CmDatum) -> Result<bool, LedgerError> {
    let sum: ValuationExpr = cm.y_valuations()?.into_iter().sum();
    Ok(sum == t_valuation(cm.p)?)
}

/// `p·v(y_i) = v(y_{i+1}) + [i+1 ≡ i_0 mod h]` for every `i`.
pub fn functional_equation_valuations(cm: &CmDatum) -> Result<bool, LedgerError> {
    let y = cm.y_valuations()?;
    let i0 = cm.i0()?;
    let h = y.len();
    Ok((0..h).all(|i| {
        let next = (i + 1) % h;
        let jump = ValuationExpr::integer(i64::from(next == i0));
        y[i].clone() * cm.p as i64 == y[next].clone() + jump
    }))
}

/// `v(β) = Σ v(y_i) − 1/(p−1)`; integrality of `β` means this is 0.
pub fn beta_integrality(cm: &CmDatum) -> Result<ValuationExpr, LedgerError> {
    let sum: ValuationExpr = cm.y_valuations()?.into_iter().sum();
    Ok(sum - t_valuation(cm.p)?)
}

/// Heights of the quasi-isogenies `ρ_H`, `ρ_G` and of `Δ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeightLedger {
    pub n: u32,
    pub ht_rho_h: i64,
    pub ht_rho_g: i64,
    pub ht_delta: i64,
    /// `[F:Q_p]`.
    pub degree: u32,
}

impl HeightLedger {
    pub fn new(n: u32, ht_rho_h: i64, ht_rho_g: i64, ht_delta: i64) -> Result<Self, LedgerError> {
        if n == 0 {
            return Err(LedgerError::ZeroN);
        }
        Ok(HeightLedger { n, ht_rho_h, ht_rho_g, ht_delta, degree: 1 })
    }

    /// `ht_O(f) = ht(f)/[F:Q_p]`.
    pub fn ht_o(&self, ht: i64) -> ValuationExpr {
        ValuationExpr::new(ht, self.degree)
    }

    fn half_n_n1(&self) -> ValuationExpr {
        let n = i64::from(self.n);
        ValuationExpr::new(n * (n - 1), 2)
    }
}

/// `v_p(λ) = −ht(ρ_H) − n(n−1)/2`.
pub fn det_valuation_lt(l: &HeightLedger) -> ValuationExpr {
    -l.ht_o(l.ht_rho_h) - l.half_n_n1()
}

/// `v_p(λ) = −ht(ρ_G)/n − ht(Δ)`.
pub fn det_valuation_dr(l: &HeightLedger) -> ValuationExpr {
    let g = l.ht_o(l.ht_rho_g);
    -ValuationExpr(g.0 / BigRational::from_integer(l.n.into())) - l.ht_o(l.ht_delta)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeightTransfer {
    #[serde(rename = "det_valuation_LT")]
    pub det_lt: ValuationExpr,
    #[serde(rename = "det_valuation_Dr")]
    pub det_dr: ValuationExpr,
    /// The two determinant laws give the same `v_p(λ)`.
    pub consistent: bool,
    /// `ht(ρ_H) = ht(ρ_G)/n`.
    pub heights_match: bool,
    /// `consistent ⟺ heights_match`.
    pub corollary_holds: bool,
    /// `ht(ρ_G)/n` when it is an integer.
    pub transferred_height: Option<i64>,
}

/// Compares the two determinant laws when `ht_O(Δ) = n(n−1)/2`.
pub fn height_transfer(l: &HeightLedger) -> Result<HeightTransfer, LedgerError> {
    let expected = l.half_n_n1();
    let found = l.ht_o(l.ht_delta);
    if found != expected {
        return Err(LedgerError::DeltaHeight { expected: expected.to_string(), found: found.to_string() });
    }
    let det_lt = det_valuation_lt(l);
    let det_dr = det_valuation_dr(l);
    let consistent = det_lt == det_dr;
    let heights_match = l.ht_o(l.ht_rho_h).0 * BigRational::from_integer(l.n.into()) == l.ht_o(l.ht_rho_g).0;
    let n = i64::from(l.n);
    let transferred_height = (l.ht_rho_g % n == 0).then(|| l.ht_rho_g / n);
    Ok(HeightTransfer {
        det_lt,
        det_dr,
        consistent,
        heights_match,
        corollary_holds: consistent == heights_match,
        transferred_height,
    })
}

/// `ht(ρ_G) = n·ht(ρ_H)`.
pub fn transfer_lt_to_dr(n: u32, ht_rho_h: i64) -> i64 {
    i64::from(n) * ht_rho_h
}

/// `ht(ρ_H) = ht(ρ_G)/n`, which must be an integer.
pub fn transfer_dr_to_lt(n: u32, ht_rho_g: i64) -> Result<i64, LedgerError> {
    let k = i64::from(n);
    if n == 0 {
        return Err(LedgerError::ZeroN);
    }
    if ht_rho_g % k != 0 {
        return Err(LedgerError::NotDivisible { ht_g: ht_rho_g, n });
    }
    Ok(ht_rho_g / k)
}

/// One verified identity: `{check, inputs, expected, computed, pass}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub inputs: serde_json::Value,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

impl CheckReport {
    fn new(check: &str, inputs: serde_json::Value, expected: impl ToString, computed: impl ToString) -> Self {
        let (expected, computed) = (expected.to_string(), computed.to_string());
        let pass = expected == computed;
        CheckReport { check: check.into(), inputs, expected, computed, pass }
    }
}

fn join(v: &[ValuationExpr]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

/// Reports for a dimension-one CM datum.
pub fn cm_reports(cm: &CmDatum) -> Result<Vec<CheckReport>, LedgerError> {
    let i0 = cm.i0()?;
    let (p, h) = (cm.p, cm.h);
    let inputs = json!({ "p": p, "h": h, "i0": i0 });
    let y = cm.y_valuations()?;
    let sum: ValuationExpr = y.iter().cloned().sum();
    let mut out = vec![CheckReport::new("sum_identity", inputs.clone(), t_valuation(p)?, sum)];

    let h_us = y.len();
    let lhs: Vec<ValuationExpr> = y.iter().map(|v| v.clone() * p as i64).collect();
    let rhs: Vec<ValuationExpr> = (0..h_us)
        .map(|i| {
            let next = (i + 1) % h_us;
            y[next].clone() + ValuationExpr::integer(i64::from(next == i0))
        })
        .collect();
    out.push(CheckReport::new("functional_equation", inputs.clone(), join(&lhs), join(&rhs)));
    out.push(CheckReport::new("beta_integrality", inputs.clone(), ValuationExpr::zero(), beta_integrality(cm)?));

    let chars = (0..h).map(|i| lt_character_valuation(i, p, h)).collect::<Result<Vec<_>, _>>()?;
    let base = cm_period_valuations(p, h, 0)?;
    out.push(CheckReport::new("character_valuations", json!({ "p": p, "h": h }), join(&chars), join(&base)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: i64, b: i64) -> ValuationExpr {
        ValuationExpr::new(a, b)
    }

    #[test]
    fn cm_tables() {
        assert_eq!(cm_period_valuations(2, 3, 0).unwrap(), vec![v(1, 7), v(2, 7), v(4, 7)]);
        assert_eq!(cm_period_valuations(2, 3, 1).unwrap(), vec![v(4, 7), v(1, 7), v(2, 7)]);
        assert_eq!(cm_period_valuations(5, 1, 0).unwrap(), vec![v(1, 4)]);
        assert_eq!(cm_period_valuations(2, 3, 3).unwrap_err(), LedgerError::IndexOutOfRange { i0: 3, h: 3 });
    }

    #[test]
    fn characters() {
        assert_eq!(lt_character_valuation(0, 3, 1).unwrap(), v(1, 2));
        assert_eq!(lt_character_valuation(2, 2, 3).unwrap(), v(4, 7));
        assert_eq!(lt_character_valuation(1, 3, 2).unwrap(), v(3, 8));
    }

    #[test]
    fn identities() {
        for (p, h, i0) in [(2, 3, 0), (3, 2, 1), (7, 1, 0), (5, 4, 2)] {
            let cm = CmDatum::dimension_one(p, h, i0).unwrap();
            assert!(check_sum_identity(&cm).unwrap());
            assert!(functional_equation_valuations(&cm).unwrap());
            assert!(beta_integrality(&cm).unwrap().is_zero());
        }
    }

    #[test]
    fn general_type_of_dimension_one() {
        let cm = CmDatum::general(2, 3, vec![0, 1, 0]).unwrap();
        assert_eq!(cm.i0().unwrap(), 1);
        let cm = CmDatum::general(2, 3, vec![1, 1, 0]).unwrap();
        assert_eq!(cm.i0().unwrap_err(), LedgerError::DimensionNotOne(2));
    }

    #[test]
    fn determinant_laws() {
        let l = |n, h, g, d| HeightLedger::new(n, h, g, d).unwrap();
        assert_eq!(det_valuation_lt(&l(2, 0, 0, 1)), v(-1, 1));
        assert_eq!(det_valuation_lt(&l(3, 2, 0, 3)), v(-5, 1));
        assert_eq!(det_valuation_lt(&l(1, 0, 0, 0)), v(0, 1));
        assert_eq!(det_valuation_dr(&l(2, 0, 0, 1)), v(-1, 1));
        assert_eq!(det_valuation_dr(&l(3, 0, 3, 3)), v(-4, 1));
        assert_eq!(det_valuation_dr(&l(1, 0, 0, 0)), v(0, 1));
    }

    #[test]
    fn transfer_examples() {
        let t = height_transfer(&HeightLedger::new(2, 3, 6, 1).unwrap()).unwrap();
        assert!(t.consistent && t.heights_match && t.corollary_holds);
        assert_eq!(t.transferred_height, Some(3));
        let t = height_transfer(&HeightLedger::new(2, 3, 4, 1).unwrap()).unwrap();
        assert!(!t.consistent && t.corollary_holds);
        let t = height_transfer(&HeightLedger::new(1, 4, 4, 0).unwrap()).unwrap();
        assert!(t.consistent && t.heights_match);
        assert!(matches!(height_transfer(&HeightLedger::new(2, 0, 0, 0).unwrap()), Err(LedgerError::DeltaHeight { .. })));
        assert_eq!(transfer_dr_to_lt(3, 7).unwrap_err(), LedgerError::NotDivisible { ht_g: 7, n: 3 });
        assert_eq!(transfer_dr_to_lt(3, transfer_lt_to_dr(3, -2)).unwrap(), -2);
    }

    #[test]
    fn serializes_as_fraction_strings() {
        assert_eq!(serde_json::to_string(&v(4, 7)).unwrap(), "\"4/7\"");
        assert_eq!(serde_json::to_string(&v(-2, 1)).unwrap(), "\"-2/1\"");
        let reports = cm_reports(&CmDatum::dimension_one(2, 3, 0).unwrap()).unwrap();
        assert!(reports.iter().all(|r| r.pass));
    }
}
