use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::{FieldDescriptor, PadicElement, PadicError};

/// Dense matrix over one `Q_{p^m}`.
#[derive(Clone)]
pub struct PadicMatrix {
    field: Arc<FieldDescriptor>,
    rows: usize,
    cols: usize,
    data: Vec<PadicElement>,
}

impl PadicMatrix {
    pub fn zeros(field: &Arc<FieldDescriptor>, rows: usize, cols: usize) -> Self {
        PadicMatrix {
            field: Arc::clone(field),
            rows,
            cols,
            data: vec![PadicElement::zero(field); rows * cols],
        }
    }

    pub fn identity(field: &Arc<FieldDescriptor>, n: usize) -> Self {
        Self::from_fn(field, n, n, |i, j| {
            if i == j {
                PadicElement::one(field)
            } else {
                PadicElement::zero(field)
            }
        })
    }

    pub fn from_fn(
        field: &Arc<FieldDescriptor>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> PadicElement,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        PadicMatrix { field: Arc::clone(field), rows, cols, data }
    }

    /// Image of a matrix over the prime field under `Q_p ⊂ K`.
    pub fn embed(field: &Arc<FieldDescriptor>, base: &PadicMatrix) -> Self {
        Self::from_fn(field, base.rows, base.cols, |i, j| PadicElement::embed(field, base.get(i, j)))
    }

    /// Integer matrix, embedded with full precision.
    pub fn from_i64_rows(field: &Arc<FieldDescriptor>, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self::from_fn(field, r, c, |i, j| PadicElement::from_i64(field, rows[i][j]))
    }

    pub fn from_rows(field: &Arc<FieldDescriptor>, rows: Vec<Vec<PadicElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        PadicMatrix { field: Arc::clone(field), rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn column_vector(field: &Arc<FieldDescriptor>, entries: Vec<PadicElement>) -> Self {
        let n = entries.len();
        PadicMatrix { field: Arc::clone(field), rows: n, cols: 1, data: entries }
    }

    pub fn row_vector(field: &Arc<FieldDescriptor>, entries: Vec<PadicElement>) -> Self {
        let n = entries.len();
        PadicMatrix { field: Arc::clone(field), rows: 1, cols: n, data: entries }
    }

    /// Block-diagonal matrix from square blocks.
    pub fn block_diagonal(field: &Arc<FieldDescriptor>, blocks: &[PadicMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = Self::zeros(field, n, n);
        let mut offset = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(offset + i, offset + j, b.get(i, j).clone());
                }
            }
            offset += b.rows;
        }
        out
    }

    pub fn field(&self) -> &Arc<FieldDescriptor> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &PadicElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: PadicElement) {
        self.data[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[PadicElement] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<PadicElement> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<PadicElement> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(&self.field, self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(&self.field, rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &PadicMatrix) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(&self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&PadicElement) -> PadicElement) -> Self {
        PadicMatrix {
            field: Arc::clone(&self.field),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Entrywise `σ^j`.
    pub fn frobenius_pow(&self, j: i64) -> Self {
        self.map(|x| x.frobenius_pow(j))
    }

    pub fn scale(&self, c: &PadicElement) -> Self {
        self.map(|x| x * c)
    }

    pub fn truncate(&self, k: i64) -> Self {
        self.map(|x| x.truncate(k))
    }

    /// Smallest absolute precision among the entries.
    pub fn precision(&self) -> i64 {
        self.data
            .iter()
            .map(PadicElement::precision)
            .min()
            .unwrap_or(self.field.precision() as i64)
    }

    /// Smallest valuation bound among the entries.
    pub fn min_valuation(&self) -> i64 {
        self.data.iter().map(|x| x.valuation().bound()).min().unwrap_or(i64::MAX)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(PadicElement::is_integral)
    }

    /// Every entry indistinguishable from zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(PadicElement::is_zero)
    }

    pub fn approx_eq(&self, other: &PadicMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b))
    }

    pub fn checked_mul(&self, rhs: &PadicMatrix) -> Result<Self, PadicError> {
        if self.cols != rhs.rows {
            return Err(PadicError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc: Option<PadicElement> = None;
                for k in 0..self.cols {
                    let term = self.get(i, k) * rhs.get(k, j);
                    acc = Some(match acc {
                        None => term,
                        Some(a) => &a + &term,
                    });
                }
                out.push(acc.unwrap_or_else(|| PadicElement::zero(&self.field)));
            }
        }
        Ok(PadicMatrix { field: Arc::clone(&self.field), rows: self.rows, cols: rhs.cols, data: out })
    }

    fn zip_with(&self, rhs: &PadicMatrix, f: impl Fn(&PadicElement, &PadicElement) -> PadicElement) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        PadicMatrix {
            field: Arc::clone(&self.field),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(&self.field, self.rows);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse by Gauss–Jordan elimination, pivoting on minimal valuation.
    pub fn inverse(&self) -> Result<Self, PadicError> {
        if !self.is_square() {
            return Err(PadicError::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(&self.field, n);
        for k in 0..n {
            let pivot_row = (k..n)
                .filter(|&i| !a.get(i, k).is_zero())
                .min_by_key(|&i| a.get(i, k).valuation().bound())
                .ok_or(PadicError::Singular)?;
            a.swap_rows(k, pivot_row);
            inv.swap_rows(k, pivot_row);
            let pivot_inv = a.get(k, k).inverse()?;
            for j in 0..n {
                let x = a.get(k, j) * &pivot_inv;
                a.set(k, j, x);
                let y = inv.get(k, j) * &pivot_inv;
                inv.set(k, j, y);
            }
            for i in 0..n {
                if i == k || a.get(i, k).is_zero() {
                    continue;
                }
                let factor = a.get(i, k).clone();
                for j in 0..n {
                    let x = a.get(i, j) - &(&factor * a.get(k, j));
                    a.set(i, j, x);
                    let y = inv.get(i, j) - &(&factor * inv.get(k, j));
                    inv.set(i, j, y);
                }
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Coefficients of `det(T·I − self)`, constant term first (division-free
    /// Berkowitz recursion, so integral input loses no precision).
    pub fn charpoly(&self) -> Vec<PadicElement> {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let n = self.rows;
        let f = &self.field;
        // highest degree first while building
        let mut poly = vec![PadicElement::one(f)];
        for r in 0..n {
            let a = self.get(r, r).clone();
            // toeplitz column: 1, -a, -R C, -R S C, ..., -R S^{r-1} C
            let mut col = Vec::with_capacity(r + 2);
            col.push(PadicElement::one(f));
            col.push(-&a);
            if r > 0 {
                let mut v: Vec<PadicElement> = (0..r).map(|i| self.get(i, r).clone()).collect();
                for _ in 0..r {
                    let dot = (0..r)
                        .map(|j| self.get(r, j) * &v[j])
                        .reduce(|x, y| &x + &y)
                        .unwrap();
                    col.push(-&dot);
                    v = (0..r)
                        .map(|i| (0..r).map(|j| self.get(i, j) * &v[j]).reduce(|x, y| &x + &y).unwrap())
                        .collect();
                }
            }
            let mut next = Vec::with_capacity(r + 2);
            for i in 0..r + 2 {
                let mut acc: Option<PadicElement> = None;
                for (j, pj) in poly.iter().enumerate() {
                    if i >= j && i - j < col.len() {
                        let t = &col[i - j] * pj;
                        acc = Some(match acc {
                            None => t,
                            Some(s) => &s + &t,
                        });
                    }
                }
                next.push(acc.unwrap_or_else(|| PadicElement::zero(f)));
            }
            poly = next;
        }
        poly.reverse();
        poly
    }

    pub fn det(&self) -> PadicElement {
        let cp = self.charpoly();
        if self.rows.is_multiple_of(2) {
            cp[0].clone()
        } else {
            -&cp[0]
        }
    }

    /// Expands each entry into its `Q_p`-coordinates: an `r × c` matrix over
    /// `Q_{p^m}` becomes `r × (c·m)`, column block `j` holding entry `(i, j)`'s coordinates.
    pub fn expand_columns_over_qp(&self) -> PadicMatrix {
        let m = self.field.degree();
        let base = self.field.prime_subfield();
        let mut out = PadicMatrix::zeros(&base, self.rows, self.cols * m);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for (t, c) in self.get(i, j).coordinates().into_iter().enumerate() {
                    out.set(i, j * m + t, c);
                }
            }
        }
        out
    }
}

impl PartialEq for PadicMatrix {
    /// Representation equality of every entry.
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl fmt::Debug for PadicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{} over Q_{}^{}]", self.rows, self.cols, self.field.p(), self.field.degree())?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Mul<&PadicMatrix> for &PadicMatrix {
    type Output = PadicMatrix;
    fn mul(self, rhs: &PadicMatrix) -> PadicMatrix {
        self.checked_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl Add<&PadicMatrix> for &PadicMatrix {
    type Output = PadicMatrix;
    fn add(self, rhs: &PadicMatrix) -> PadicMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub<&PadicMatrix> for &PadicMatrix {
    type Output = PadicMatrix;
    fn sub(self, rhs: &PadicMatrix) -> PadicMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &PadicMatrix {
    type Output = PadicMatrix;
    fn neg(self) -> PadicMatrix {
        self.map(|x| -x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{make_field, Valuation};

    #[test]
    fn charpoly_matches_hand_computation() {
        let k = make_field(5, 1, 12).unwrap();
        let a = PadicMatrix::from_i64_rows(&k, &[vec![2, 1, 0], vec![0, 3, 4], vec![1, 0, 1]]);
        // det(T - A) = T^3 - 6T^2 + 11T - 10
        let cp = a.charpoly();
        let expected = [-10, 11, -6, 1];
        for (c, e) in cp.iter().zip(expected) {
            assert!(c.approx_eq(&PadicElement::from_i64(&k, e)), "{c} vs {e}");
        }
        assert!(a.det().approx_eq(&PadicElement::from_i64(&k, 10)));
    }

    #[test]
    fn inverse_of_unimodular() {
        let k = make_field(2, 2, 20).unwrap();
        let a = PadicMatrix::from_i64_rows(&k, &[vec![1, 2, 3], vec![0, 1, 4], vec![5, 6, 0]]);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).approx_eq(&PadicMatrix::identity(&k, 3)));
        assert_eq!(inv.precision(), 20);
    }

    #[test]
    fn inverse_of_phi_shape() {
        let k = make_field(3, 1, 10).unwrap();
        let phi = PadicMatrix::from_i64_rows(&k, &[vec![0, 3], vec![1, 0]]);
        let inv = phi.inverse().unwrap();
        assert_eq!(inv.get(0, 1).valuation(), Valuation::Exact(0));
        assert_eq!(inv.get(1, 0).valuation(), Valuation::Exact(-1));
    }
}
