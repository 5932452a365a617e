//! JSON forms for elements and matrices. Integers are decimal strings.
//!
//! An entry `{valuation: v, precision: k, digits: [u_0, …]}` denotes
//! `p^v · Σ u_i x^i + O(p^k)`; an entry indistinguishable from zero has
//! `valuation == precision` and zero digits.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FieldDescriptor, PadicElement, PadicError, PadicMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub valuation: i64,
    pub precision: i64,
    pub digits: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub p: String,
    pub m: usize,
    pub modulus: Vec<String>,
    pub precision: u32,
    pub coeffs: EntryJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub p: String,
    pub m: usize,
    pub modulus: Vec<String>,
    pub precision: u32,
    pub rows: usize,
    pub cols: usize,
    pub coeffs: Vec<Vec<EntryJson>>,
}

fn modulus_strings(field: &FieldDescriptor) -> Vec<String> {
    field.modulus().iter().map(u64::to_string).collect()
}

fn parse_u64(s: &str) -> Result<u64, PadicError> {
    s.trim().parse::<u64>().map_err(|e| PadicError::Malformed(format!("{s:?}: {e}")))
}

fn field_from(p: &str, m: usize, modulus: &[String], precision: u32) -> Result<Arc<FieldDescriptor>, PadicError> {
    let p = parse_u64(p)?;
    let modulus = modulus.iter().map(|s| parse_u64(s)).collect::<Result<Vec<_>, _>>()?;
    if modulus.len() != m + 1 {
        return Err(PadicError::Malformed(format!("modulus of length {} for degree {m}", modulus.len())));
    }
    FieldDescriptor::with_modulus(p, modulus, precision)
}

impl EntryJson {
    pub fn from_element(x: &PadicElement) -> Self {
        EntryJson {
            valuation: x.offset(),
            precision: x.precision(),
            digits: x.unit_coeffs().iter().map(u64::to_string).collect(),
        }
    }

    pub fn to_element(&self, field: &Arc<FieldDescriptor>) -> Result<PadicElement, PadicError> {
        if self.digits.len() != field.degree() {
            return Err(PadicError::Malformed(format!(
                "{} digits for a degree-{} field",
                self.digits.len(),
                field.degree()
            )));
        }
        let r = self.precision - self.valuation;
        if r > field.precision() as i64 {
            return Err(PadicError::Malformed(format!(
                "relative precision {r} exceeds field precision {}",
                field.precision()
            )));
        }
        let digits = self.digits.iter().map(|s| parse_u64(s)).collect::<Result<_, _>>()?;
        Ok(PadicElement::from_parts(field, self.valuation, self.precision, digits))
    }
}

impl ElementJson {
    pub fn from_element(x: &PadicElement) -> Self {
        let f = x.field();
        ElementJson {
            p: f.p().to_string(),
            m: f.degree(),
            modulus: modulus_strings(f),
            precision: f.precision(),
            coeffs: EntryJson::from_element(x),
        }
    }

    pub fn to_element(&self) -> Result<PadicElement, PadicError> {
        let field = field_from(&self.p, self.m, &self.modulus, self.precision)?;
        self.coeffs.to_element(&field)
    }
}

impl MatrixJson {
    pub fn from_matrix(a: &PadicMatrix) -> Self {
        let f = a.field();
        MatrixJson {
            p: f.p().to_string(),
            m: f.degree(),
            modulus: modulus_strings(f),
            precision: f.precision(),
            rows: a.rows(),
            cols: a.cols(),
            coeffs: (0..a.rows())
                .map(|i| (0..a.cols()).map(|j| EntryJson::from_element(a.get(i, j))).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<PadicMatrix, PadicError> {
        let field = field_from(&self.p, self.m, &self.modulus, self.precision)?;
        self.to_matrix_in(&field)
    }

    /// Decodes into an existing field (which must match the declared one).
    pub fn to_matrix_in(&self, field: &Arc<FieldDescriptor>) -> Result<PadicMatrix, PadicError> {
        if self.coeffs.len() != self.rows || self.coeffs.iter().any(|r| r.len() != self.cols) {
            return Err(PadicError::Malformed("shape does not match rows/cols".into()));
        }
        let rows = self
            .coeffs
            .iter()
            .map(|r| r.iter().map(|e| e.to_element(field)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        if rows.is_empty() {
            return Ok(PadicMatrix::zeros(field, 0, 0));
        }
        Ok(PadicMatrix::from_rows(field, rows))
    }
}

impl PadicElement {
    pub fn to_json(&self) -> ElementJson {
        ElementJson::from_element(self)
    }
}

impl PadicMatrix {
    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from_matrix(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_field;

    #[test]
    fn matrix_json_shape() {
        let k = make_field(2, 2, 16).unwrap();
        let a = PadicMatrix::from_i64_rows(&k, &[vec![1, -1], vec![4, 0]]);
        let j = a.to_json();
        assert_eq!(j.modulus, vec!["1", "1", "1"]);
        assert_eq!(j.coeffs[1][0].valuation, 2);
        assert_eq!(j.coeffs[0][1].digits, vec!["65535", "0"]);
        let text = serde_json::to_string(&j).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap(), a);
    }

    #[test]
    fn rejects_reducible_modulus() {
        let j = ElementJson {
            p: "2".into(),
            m: 2,
            modulus: vec!["1".into(), "0".into(), "1".into()],
            precision: 8,
            coeffs: EntryJson { valuation: 0, precision: 8, digits: vec!["1".into(), "0".into()] },
        };
        assert_eq!(j.to_element().unwrap_err(), PadicError::ModulusNotIrreducible);
    }
}
