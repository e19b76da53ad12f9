//! Exact dense linear algebra over a [`Field`].
//!
//! Everything here is deterministic: row reduction always picks the leftmost
//! nonzero column and the topmost candidate row, so reduced forms (and
//! therefore every decoder and oracle built on top) are reproducible
//! bit-for-bit across runs.
//!
//! Payload-carrying systems get a parallel treatment: a right-hand side is a
//! byte string per row. Over the binary field each payload byte packs eight
//! symbol lanes and row operations are plain XOR; over larger fields each
//! byte holds a single symbol.

use crate::field::{Field, FieldError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("system has no solution")]
    NoSolution,
}

/// A dense rows x cols matrix over a finite field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from explicit rows, validating entries against the field.
    pub fn from_rows(field: Field, rows: &[Vec<u8>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::ShapeMismatch(format!(
                    "ragged rows: expected {cols} columns, found {}",
                    row.len()
                )));
            }
            for &v in row {
                data.push(field.check(v)?);
            }
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// The first `j` rows, as a new matrix.
    pub fn first_rows(&self, j: usize) -> Matrix {
        assert!(j <= self.rows);
        Matrix {
            field: self.field,
            rows: j,
            cols: self.cols,
            data: self.data[..j * self.cols].to_vec(),
        }
    }

    /// The last `j` rows, as a new matrix.
    pub fn last_rows(&self, j: usize) -> Matrix {
        assert!(j <= self.rows);
        Matrix {
            field: self.field,
            rows: j,
            cols: self.cols,
            data: self.data[(self.rows - j) * self.cols..].to_vec(),
        }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.cols || self.field != other.field {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot stack {}x{} over GF({}) with {}x{} over GF({})",
                self.rows,
                self.cols,
                self.field.order(),
                other.rows,
                other.cols,
                other.field.order()
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Entrywise sum.
    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols || self.field != other.field {
            return Err(LinalgError::ShapeMismatch(
                "entrywise sum of mismatched matrices".into(),
            ));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect();
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn mat_mul(&self, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != rhs.rows || self.field != rhs.field {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    let cur = out.get(r, c);
                    out.set(r, c, f.add(cur, f.mul(a, rhs.get(k, c))));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u8]) -> Result<Vec<u8>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "vector length {} does not match {} columns",
                v.len(),
                self.cols
            )));
        }
        let f = self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0u8, |acc, (&a, &x)| f.add(acc, f.mul(a, x)))
            })
            .collect())
    }

    /// Reduced row-echelon form and rank.
    ///
    /// Pivot selection is the leftmost nonzero column, topmost candidate row;
    /// pivots are normalized to 1 and cleared above and below.
    pub fn rref_with_rank(&self) -> (Matrix, usize) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            let Some(src) = (pivot_row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if src != pivot_row {
                for c in 0..m.cols {
                    let a = m.get(src, c);
                    let b = m.get(pivot_row, c);
                    m.set(src, c, b);
                    m.set(pivot_row, c, a);
                }
            }
            let scale = f.inv(m.get(pivot_row, col)).expect("pivot is nonzero");
            if scale != 1 {
                for c in 0..m.cols {
                    let v = m.get(pivot_row, c);
                    m.set(pivot_row, c, f.mul(v, scale));
                }
            }
            for r in 0..m.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                let neg = f.neg(factor);
                for c in 0..m.cols {
                    let v = m.get(r, c);
                    m.set(r, c, f.add(v, f.mul(neg, m.get(pivot_row, c))));
                }
            }
            pivot_row += 1;
            if pivot_row == m.rows {
                break;
            }
        }
        (m, pivot_row)
    }

    pub fn rank(&self) -> usize {
        self.rref_with_rank().1
    }
}

/// In-place `dst += scale * src` on payload bytes.
///
/// Over GF(2) the payload bytes pack eight symbol lanes each, so the only
/// scales are 0 and 1 and the update is a bytewise XOR. Over larger fields
/// each byte is one symbol.
pub fn payload_addmul(field: Field, dst: &mut [u8], src: &[u8], scale: u8) {
    debug_assert_eq!(dst.len(), src.len());
    if scale == 0 {
        return;
    }
    if field.order() == 2 {
        for (d, s) in dst.iter_mut().zip(src) {
            *d ^= s;
        }
    } else {
        for (d, s) in dst.iter_mut().zip(src) {
            *d = field.add(*d, field.mul(scale, *s));
        }
    }
}

/// In-place `dst *= scale` on payload bytes (no-op over GF(2), where the only
/// nonzero scale is 1).
pub fn payload_scale(field: Field, dst: &mut [u8], scale: u8) {
    if field.order() == 2 || scale == 1 {
        return;
    }
    for d in dst.iter_mut() {
        *d = field.mul(scale, *d);
    }
}

/// Combines payloads by a coefficient vector: `sum_j coeffs[j] * payloads[j]`.
pub fn combine_payloads(
    field: Field,
    coeffs: &[u8],
    payloads: &[Vec<u8>],
    payload_len: usize,
) -> Vec<u8> {
    debug_assert_eq!(coeffs.len(), payloads.len());
    let mut out = vec![0u8; payload_len];
    for (c, p) in coeffs.iter().zip(payloads) {
        payload_addmul(field, &mut out, p, *c);
    }
    out
}

/// Solves `A * X = Y` where each row of `Y` is a payload byte string.
///
/// Returns one payload per column of `A` (free columns come back as zero
/// payloads). Fails with [`LinalgError::NoSolution`] when the system is
/// inconsistent.
pub fn solve_with_payloads(a: &Matrix, rhs: &[Vec<u8>]) -> Result<Vec<Vec<u8>>, LinalgError> {
    if rhs.len() != a.rows() {
        return Err(LinalgError::ShapeMismatch(format!(
            "{} right-hand payloads for {} rows",
            rhs.len(),
            a.rows()
        )));
    }
    let payload_len = rhs.first().map_or(0, Vec::len);
    if rhs.iter().any(|p| p.len() != payload_len) {
        return Err(LinalgError::ShapeMismatch(
            "right-hand payloads have unequal lengths".into(),
        ));
    }
    let f = a.field();
    let mut coef = a.clone();
    let mut pay: Vec<Vec<u8>> = rhs.to_vec();
    let mut pivot_cols = Vec::new();
    let mut pivot_row = 0;
    for col in 0..coef.cols() {
        let Some(src) = (pivot_row..coef.rows()).find(|&r| coef.get(r, col) != 0) else {
            continue;
        };
        if src != pivot_row {
            for c in 0..coef.cols() {
                let t = coef.get(src, c);
                let u = coef.get(pivot_row, c);
                coef.set(src, c, u);
                coef.set(pivot_row, c, t);
            }
            pay.swap(src, pivot_row);
        }
        let scale = f.inv(coef.get(pivot_row, col))?;
        if scale != 1 {
            for c in 0..coef.cols() {
                let v = coef.get(pivot_row, c);
                coef.set(pivot_row, c, f.mul(v, scale));
            }
            payload_scale(f, &mut pay[pivot_row], scale);
        }
        for r in 0..coef.rows() {
            if r == pivot_row {
                continue;
            }
            let factor = coef.get(r, col);
            if factor == 0 {
                continue;
            }
            let neg = f.neg(factor);
            for c in 0..coef.cols() {
                let v = coef.get(r, c);
                coef.set(r, c, f.add(v, f.mul(neg, coef.get(pivot_row, c))));
            }
            let (pivot_pay, row_pay) = if r < pivot_row {
                let (lo, hi) = pay.split_at_mut(pivot_row);
                (&hi[0], &mut lo[r])
            } else {
                let (lo, hi) = pay.split_at_mut(r);
                (&lo[pivot_row], &mut hi[0])
            };
            payload_addmul(f, row_pay, pivot_pay, neg);
        }
        pivot_cols.push(col);
        pivot_row += 1;
        if pivot_row == coef.rows() {
            break;
        }
    }
    // Any leftover all-zero coefficient row with a nonzero payload is a
    // contradiction.
    for (r, payload) in pay.iter().enumerate().skip(pivot_row) {
        if coef.row(r).iter().all(|&v| v == 0) && payload.iter().any(|&b| b != 0) {
            return Err(LinalgError::NoSolution);
        }
    }
    let mut solution = vec![vec![0u8; payload_len]; coef.cols()];
    for (r, &col) in pivot_cols.iter().enumerate() {
        // With free columns zeroed the pivot row reads x[col] = payload[r].
        solution[col] = pay[r].clone();
    }
    Ok(solution)
}

/// Solves `A x = y` for a single field-element right-hand side.
pub fn solve(a: &Matrix, y: &[u8]) -> Result<Vec<u8>, LinalgError> {
    let rhs: Vec<Vec<u8>> = y.iter().map(|&v| vec![v]).collect();
    let cols = solve_with_payloads(a, &rhs)?;
    Ok(cols.into_iter().map(|p| p[0]).collect())
}

/// True when `v` lies in the row space of `basis`.
pub fn span_membership(v: &[u8], basis: &Matrix) -> Result<bool, LinalgError> {
    if v.len() != basis.cols() {
        return Err(LinalgError::ShapeMismatch(format!(
            "vector length {} against {} columns",
            v.len(),
            basis.cols()
        )));
    }
    let mut b = EchelonBasis::new(basis.field(), basis.cols());
    for r in 0..basis.rows() {
        b.insert(basis.row(r));
    }
    Ok(b.contains(v))
}

/// An incrementally maintained row space in reduced echelon form.
///
/// Rows are kept normalized (pivot 1, pivot column cleared elsewhere) and
/// sorted by pivot column, so two equal subspaces always hold identical rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EchelonBasis {
    field: Field,
    width: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(field: Field, width: usize) -> Self {
        EchelonBasis {
            field,
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows<'a>(
        field: Field,
        width: usize,
        rows: impl IntoIterator<Item = &'a [u8]>,
    ) -> Self {
        let mut b = EchelonBasis::new(field, width);
        for r in rows {
            b.insert(r);
        }
        b
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.width
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Reinterprets the stored rows over another field.
    ///
    /// Only meaningful when every stored entry is a valid element of `field`
    /// and the arithmetic agrees on those entries, which holds for the one
    /// use in this crate: lifting an all-{0,1} basis from GF(2) to GF(256).
    pub fn reinterpret(&mut self, field: Field) {
        debug_assert!(self.rows.iter().flatten().all(|&v| field.contains(v)));
        self.field = field;
    }

    /// Reduces `v` against the basis, returning the remainder.
    pub fn reduce(&self, v: &[u8]) -> Vec<u8> {
        debug_assert_eq!(v.len(), self.width);
        let f = self.field;
        let mut rem = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let factor = rem[p];
            if factor != 0 {
                let neg = f.neg(factor);
                for (r, &s) in rem.iter_mut().zip(row) {
                    *r = f.add(*r, f.mul(neg, s));
                }
            }
        }
        rem
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.reduce(v).iter().all(|&b| b == 0)
    }

    /// Inserts `v`, returning true when the dimension grew.
    pub fn insert(&mut self, v: &[u8]) -> bool {
        let f = self.field;
        let mut rem = self.reduce(v);
        let Some(pivot) = rem.iter().position(|&b| b != 0) else {
            return false;
        };
        let scale = f.inv(rem[pivot]).expect("pivot entry is nonzero");
        if scale != 1 {
            for b in rem.iter_mut() {
                *b = f.mul(scale, *b);
            }
        }
        // Clear the new pivot column from existing rows to stay reduced.
        for row in self.rows.iter_mut() {
            let factor = row[pivot];
            if factor != 0 {
                let neg = f.neg(factor);
                for (r, &s) in row.iter_mut().zip(&rem) {
                    *r = f.add(*r, f.mul(neg, s));
                }
            }
        }
        let at = self.pivots.partition_point(|&p| p < pivot);
        self.pivots.insert(at, pivot);
        self.rows.insert(at, rem);
        true
    }

    /// Columns touched by any basis row; a superset of the support of every
    /// vector in the span.
    pub fn column_support(&self) -> Vec<usize> {
        let mut cols = vec![false; self.width];
        for row in &self.rows {
            for (c, &v) in row.iter().enumerate() {
                if v != 0 {
                    cols[c] = true;
                }
            }
        }
        cols.iter()
            .enumerate()
            .filter_map(|(c, &hit)| hit.then_some(c))
            .collect()
    }
}
