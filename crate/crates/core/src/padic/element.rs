use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::field::FieldDescriptor;
use super::residue::{self, Coeffs};
use super::PadicError;

/// A `p`-adic valuation as far as the precision can tell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Valuation {
    Exact(i64),
    /// The element is indistinguishable from zero; its valuation is at least this.
    AtLeast(i64),
}

impl Valuation {
    pub fn exact(self) -> Option<i64> {
        match self {
            Valuation::Exact(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// Lower bound in both cases.
    pub fn bound(self) -> i64 {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, "≥ {v}"),
        }
    }
}

/// An element of `Q_{p^m}` known modulo `p^prec`.
///
/// Stored as `p^val · u` with `u` a polynomial in `x` whose coefficients are
/// reduced modulo `p^(prec - val)`. For nonzero elements at least one
/// coefficient of `u` is prime to `p`, so `val` is the exact valuation. An
/// element indistinguishable from zero has `val == prec` and `u = 0`.
#[derive(Clone)]
pub struct PadicElement {
    field: Arc<FieldDescriptor>,
    val: i64,
    prec: i64,
    unit: Coeffs,
}

impl PadicElement {
    /// Zero known to the full working precision.
    pub fn zero(field: &Arc<FieldDescriptor>) -> Self {
        Self::zero_to(field, field.precision() as i64)
    }

    /// Zero known modulo `p^prec`.
    pub fn zero_to(field: &Arc<FieldDescriptor>, prec: i64) -> Self {
        PadicElement {
            field: Arc::clone(field),
            val: prec,
            prec,
            unit: Coeffs::from_elem(0, field.degree()),
        }
    }

    pub fn one(field: &Arc<FieldDescriptor>) -> Self {
        Self::from_i64(field, 1)
    }

    pub fn from_i64(field: &Arc<FieldDescriptor>, value: i64) -> Self {
        let mut coeffs = vec![0i64; field.degree()];
        coeffs[0] = value;
        Self::from_integer_coeffs(field, &coeffs)
    }

    /// `p^k` exactly (relative precision `N`).
    pub fn p_power(field: &Arc<FieldDescriptor>, k: i64) -> Self {
        let mut unit = Coeffs::from_elem(0, field.degree());
        unit[0] = 1;
        PadicElement {
            field: Arc::clone(field),
            val: k,
            prec: k + field.precision() as i64,
            unit,
        }
    }

    /// Integral element from signed integer coordinates in the basis `1, x, …, x^{m-1}`.
    pub fn from_integer_coeffs(field: &Arc<FieldDescriptor>, coeffs: &[i64]) -> Self {
        assert_eq!(coeffs.len(), field.degree(), "coefficient count must equal the degree");
        let q = field.p_to_precision();
        let reduced: Coeffs = coeffs
            .iter()
            .map(|&c| (c as i128).rem_euclid(q as i128) as u64)
            .collect();
        Self::from_parts(field, 0, field.precision() as i64, reduced)
    }

    /// Integral element from residues modulo `p^N`.
    pub fn from_residues(field: &Arc<FieldDescriptor>, coeffs: &[u64]) -> Self {
        assert_eq!(coeffs.len(), field.degree(), "coefficient count must equal the degree");
        let q = field.p_to_precision();
        Self::from_parts(field, 0, field.precision() as i64, coeffs.iter().map(|c| c % q).collect())
    }

    /// `p^val · Σ coeffs[i] x^i` modulo `p^prec`; normalizes the representation.
    pub fn from_parts(field: &Arc<FieldDescriptor>, val: i64, prec: i64, coeffs: Coeffs) -> Self {
        let r = prec - val;
        if r <= 0 {
            return Self::zero_to(field, prec);
        }
        assert!(r <= field.precision() as i64, "relative precision exceeds the field precision");
        let p = field.p();
        let q = field.p_to(r as u32);
        let coeffs: Coeffs = coeffs.iter().map(|c| c % q).collect();
        let shift = coeffs
            .iter()
            .map(|&c| residue::val_u64(c, p, r as u32))
            .min()
            .unwrap_or(r as u32);
        if shift as i64 >= r {
            return Self::zero_to(field, prec);
        }
        let d = field.p_to(shift);
        let q2 = field.p_to(r as u32 - shift);
        PadicElement {
            field: Arc::clone(field),
            val: val + shift as i64,
            prec,
            unit: coeffs.iter().map(|&c| (c / d) % q2).collect(),
        }
    }

    /// Assembles an element from its `Q_p`-coordinates in the basis `1, x, …`.
    pub fn from_coordinates(field: &Arc<FieldDescriptor>, coords: &[PadicElement]) -> Self {
        assert_eq!(coords.len(), field.degree());
        let prec = coords.iter().map(|c| c.prec).min().unwrap();
        let v0 = coords.iter().map(|c| c.val).min().unwrap();
        if v0 >= prec {
            return Self::zero_to(field, prec);
        }
        let q = field.p_to((prec - v0) as u32);
        let coeffs = coords
            .iter()
            .map(|c| {
                if c.val >= prec {
                    0
                } else {
                    let scale = field.p_to((c.val - v0) as u32);
                    residue::mul_mod(c.unit[0] % q, scale % q, q)
                }
            })
            .collect();
        Self::from_parts(field, v0, prec, coeffs)
    }

    /// Image of a `Q_p` element under the inclusion `Q_p ⊂ Q_{p^m}`.
    pub fn embed(field: &Arc<FieldDescriptor>, base: &PadicElement) -> Self {
        assert_eq!(base.field.degree(), 1, "embedding expects a prime-field element");
        if base.is_zero() {
            return Self::zero_to(field, base.prec);
        }
        let mut coeffs = Coeffs::from_elem(0, field.degree());
        coeffs[0] = base.unit[0];
        Self::from_parts(field, base.val, base.prec, coeffs)
    }

    /// Teichmüller lift of a residue given by coordinates mod `p`.
    pub fn teichmueller(field: &Arc<FieldDescriptor>, residue_coeffs: &[u64]) -> Self {
        let p = field.p();
        let reduced: Vec<u64> = residue_coeffs.iter().map(|c| c % p).collect();
        let mut y = Self::from_residues(field, &reduced);
        if y.is_zero() {
            return Self::zero(field);
        }
        for _ in 0..field.precision() {
            for _ in 0..field.degree() {
                y = y.pow(p);
            }
        }
        y
    }

    pub fn field(&self) -> &Arc<FieldDescriptor> {
        &self.field
    }

    pub fn valuation(&self) -> Valuation {
        if self.is_zero() {
            Valuation::AtLeast(self.prec)
        } else {
            Valuation::Exact(self.val)
        }
    }

    /// Absolute precision: the element is known modulo `p^precision`.
    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn relative_precision(&self) -> i64 {
        self.prec - self.val
    }

    /// Indistinguishable from zero at this element's precision.
    pub fn is_zero(&self) -> bool {
        self.val >= self.prec
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.val == 0
    }

    /// Valuation bound `>= 0`.
    pub fn is_integral(&self) -> bool {
        self.val >= 0
    }

    /// Unit part coefficients, reduced modulo `p^(prec - val)`.
    pub fn unit_coeffs(&self) -> &[u64] {
        &self.unit
    }

    /// Valuation offset of the stored representation (`prec` for zero).
    pub fn offset(&self) -> i64 {
        self.val
    }

    /// Lowers the absolute precision to `min(prec, k)`.
    pub fn truncate(&self, k: i64) -> Self {
        if k >= self.prec {
            return self.clone();
        }
        if k <= self.val {
            return Self::zero_to(&self.field, k);
        }
        let q = self.field.p_to((k - self.val) as u32);
        PadicElement {
            field: Arc::clone(&self.field),
            val: self.val,
            prec: k,
            unit: self.unit.iter().map(|c| c % q).collect(),
        }
    }

    /// Residue class modulo `p` of an integral element.
    pub fn residue(&self) -> Option<Vec<u64>> {
        if self.val < 0 {
            return None;
        }
        if self.val > 0 || self.is_zero() {
            return Some(vec![0; self.field.degree()]);
        }
        let p = self.field.p();
        Some(self.unit.iter().map(|c| c % p).collect())
    }

    /// `Q_p`-coordinates in the basis `1, x, …, x^{m-1}`.
    pub fn coordinates(&self) -> Vec<PadicElement> {
        let base = self.field.prime_subfield();
        self.unit
            .iter()
            .map(|&c| {
                if self.is_zero() {
                    PadicElement::zero_to(&base, self.prec)
                } else {
                    PadicElement::from_parts(&base, self.val, self.prec, std::iter::once(c).collect())
                }
            })
            .collect()
    }

    /// `σ^j(self)` for any integer `j`; negative `j` gives powers of `σ^{-1}`.
    pub fn frobenius_pow(&self, j: i64) -> Self {
        if self.is_zero() || self.field.degree() == 1 {
            return self.clone();
        }
        let q = self.field.p_to((self.prec - self.val) as u32);
        PadicElement {
            field: Arc::clone(&self.field),
            val: self.val,
            prec: self.prec,
            unit: self.field.apply_frobenius(j, &self.unit, q),
        }
    }

    pub fn frobenius(&self) -> Self {
        self.frobenius_pow(1)
    }

    pub fn inverse(&self) -> Result<Self, PadicError> {
        if self.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        let r = (self.prec - self.val) as u32;
        let unit = residue::unit_inverse(&self.unit, self.field.modulus(), self.field.p(), r)
            .ok_or_else(|| PadicError::Internal("unit part is not invertible".into()))?;
        Ok(PadicElement {
            field: Arc::clone(&self.field),
            val: -self.val,
            prec: -self.val + r as i64,
            unit,
        })
    }

    pub fn checked_div(&self, rhs: &PadicElement) -> Result<Self, PadicError> {
        Ok(self * &rhs.inverse()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = PadicElement::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Equal at the smaller of the two precisions.
    pub fn approx_eq(&self, other: &PadicElement) -> bool {
        (self - other).is_zero()
    }

    fn assert_same_field(&self, other: &PadicElement) {
        assert!(
            self.field.same_as(&other.field),
            "operands live in different fields: {:?} vs {:?}",
            self.field,
            other.field
        );
    }

    fn add_impl(&self, rhs: &PadicElement) -> PadicElement {
        self.assert_same_field(rhs);
        let prec = self.prec.min(rhs.prec);
        if self.is_zero() {
            return rhs.truncate(prec);
        }
        if rhs.is_zero() {
            return self.truncate(prec);
        }
        let v0 = self.val.min(rhs.val);
        if v0 >= prec {
            return Self::zero_to(&self.field, prec);
        }
        let q = self.field.p_to((prec - v0) as u32);
        let scale = |x: &PadicElement| -> Coeffs {
            let s = self.field.p_to(((x.val - v0).min(prec - v0)) as u32) % q;
            x.unit.iter().map(|&c| residue::mul_mod(c % q, s, q)).collect()
        };
        let a = scale(self);
        let b = scale(rhs);
        let sum = a.iter().zip(b.iter()).map(|(&x, &y)| residue::add_mod(x, y, q)).collect();
        Self::from_parts(&self.field, v0, prec, sum)
    }

    fn mul_impl(&self, rhs: &PadicElement) -> PadicElement {
        self.assert_same_field(rhs);
        if self.is_zero() || rhs.is_zero() {
            let prec = (self.prec + rhs.val).min(rhs.prec + self.val);
            return Self::zero_to(&self.field, prec);
        }
        let r = (self.prec - self.val).min(rhs.prec - rhs.val);
        let q = self.field.p_to(r as u32);
        let a: Coeffs = self.unit.iter().map(|c| c % q).collect();
        let b: Coeffs = rhs.unit.iter().map(|c| c % q).collect();
        let unit = residue::poly_mulmod(&a, &b, self.field.modulus(), q);
        let val = self.val + rhs.val;
        PadicElement {
            field: Arc::clone(&self.field),
            val,
            prec: val + r,
            unit,
        }
    }

    fn neg_impl(&self) -> PadicElement {
        if self.is_zero() {
            return self.clone();
        }
        let q = self.field.p_to((self.prec - self.val) as u32);
        PadicElement {
            field: Arc::clone(&self.field),
            val: self.val,
            prec: self.prec,
            unit: self.unit.iter().map(|&c| residue::neg_mod(c, q)).collect(),
        }
    }
}

impl PartialEq for PadicElement {
    /// Representation equality: same field, valuation, precision and digits.
    fn eq(&self, other: &Self) -> bool {
        self.field.same_as(&other.field)
            && self.val == other.val
            && self.prec == other.prec
            && self.unit == other.unit
    }
}

impl fmt::Debug for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O(p^{})", self.prec);
        }
        let terms: Vec<String> = self
            .unit
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}x"),
                _ => format!("{c}x^{i}"),
            })
            .collect();
        let body = if terms.len() == 1 { terms[0].clone() } else { format!("({})", terms.join(" + ")) };
        if self.val == 0 {
            write!(f, "{body} + O(p^{})", self.prec)
        } else {
            write!(f, "p^{}·{body} + O(p^{})", self.val, self.prec)
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<&PadicElement> for &PadicElement {
            type Output = PadicElement;
            fn $method(self, rhs: &PadicElement) -> PadicElement {
                self.$imp(rhs)
            }
        }
        impl $trait<PadicElement> for PadicElement {
            type Output = PadicElement;
            fn $method(self, rhs: PadicElement) -> PadicElement {
                (&self).$imp(&rhs)
            }
        }
        impl $trait<&PadicElement> for PadicElement {
            type Output = PadicElement;
            fn $method(self, rhs: &PadicElement) -> PadicElement {
                (&self).$imp(rhs)
            }
        }
        impl $trait<PadicElement> for &PadicElement {
            type Output = PadicElement;
            fn $method(self, rhs: PadicElement) -> PadicElement {
                self.$imp(&rhs)
            }
        }
    };
}

impl PadicElement {
    fn sub_impl(&self, rhs: &PadicElement) -> PadicElement {
        self.add_impl(&rhs.neg_impl())
    }

    fn div_impl(&self, rhs: &PadicElement) -> PadicElement {
        self.checked_div(rhs).expect("division by an element indistinguishable from zero")
    }
}

forward_binop!(Add, add, add_impl);
forward_binop!(Sub, sub, sub_impl);
forward_binop!(Mul, mul, mul_impl);
forward_binop!(Div, div, div_impl);

impl Neg for &PadicElement {
    type Output = PadicElement;
    fn neg(self) -> PadicElement {
        self.neg_impl()
    }
}

impl Neg for PadicElement {
    type Output = PadicElement;
    fn neg(self) -> PadicElement {
        self.neg_impl()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_field;

    #[test]
    fn valuation_of_scaled_unit() {
        let k = make_field(3, 2, 10).unwrap();
        let u = PadicElement::from_integer_coeffs(&k, &[2, 1]);
        let x = &PadicElement::p_power(&k, 3) * &u;
        assert_eq!(x.valuation(), Valuation::Exact(3));
        assert_eq!(PadicElement::zero_to(&k, 8).valuation(), Valuation::AtLeast(8));
    }

    #[test]
    fn one_plus_omega_is_a_unit() {
        let k = make_field(2, 2, 16).unwrap();
        let x = PadicElement::from_integer_coeffs(&k, &[1, 1]);
        assert_eq!(x.valuation(), Valuation::Exact(0));
        // 1 + ω = -ω²
        let omega = PadicElement::from_integer_coeffs(&k, &[0, 1]);
        assert!(x.approx_eq(&-(&omega * &omega)));
    }

    #[test]
    fn sigma_swaps_the_roots_of_x2_x_1() {
        let k = make_field(2, 2, 16).unwrap();
        let omega = PadicElement::from_integer_coeffs(&k, &[0, 1]);
        let expected = PadicElement::from_integer_coeffs(&k, &[-1, -1]);
        assert_eq!(omega.frobenius(), expected);
        assert_eq!(omega.frobenius(), &omega * &omega);
    }

    #[test]
    fn teichmueller_lifts() {
        let k = make_field(2, 2, 16).unwrap();
        assert_eq!(PadicElement::teichmueller(&k, &[1, 0]), PadicElement::one(&k));
        assert!(PadicElement::teichmueller(&k, &[0, 0]).is_zero());
        let w = PadicElement::teichmueller(&k, &[0, 1]);
        assert_eq!(w.pow(3), PadicElement::one(&k));
        assert_eq!(w.residue().unwrap(), vec![0, 1]);
        // Frobenius on Teichmüller lifts is the p-th power
        assert_eq!(w.frobenius(), w.pow(2));
    }

    #[test]
    fn division_tracks_precision() {
        let k = make_field(2, 1, 20).unwrap();
        let a = PadicElement::from_i64(&k, 12);
        let b = PadicElement::from_i64(&k, 4);
        let c = &a / &b;
        assert!(c.approx_eq(&PadicElement::from_i64(&k, 3)));
        // 4 has relative precision 18, so 12/4 is known mod 2^18
        assert_eq!(c.precision(), 18);
        let inv_p = PadicElement::p_power(&k, 1).inverse().unwrap();
        assert_eq!(inv_p.valuation(), Valuation::Exact(-1));
    }

    #[test]
    fn zero_times_element_precision() {
        let k = make_field(5, 1, 10).unwrap();
        let z = PadicElement::zero_to(&k, 6);
        let x = PadicElement::from_i64(&k, 25);
        assert_eq!((&z * &x).valuation(), Valuation::AtLeast(8));
    }

    #[test]
    fn coordinates_roundtrip() {
        let k = make_field(3, 3, 12).unwrap();
        let x = &PadicElement::from_integer_coeffs(&k, &[5, -2, 9]) * &PadicElement::p_power(&k, -2);
        let back = PadicElement::from_coordinates(&k, &x.coordinates());
        assert_eq!(back, x);
    }
}
