use std::fmt;
use std::ops::{Add, Mul, Sub};

use super::context::PrecisionContext;
use super::element::OFElement;
use crate::error::{Error, Result};

/// Dense matrix over `O_F / p^N`, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct OFMatrix {
    ctx: PrecisionContext,
    rows: usize,
    cols: usize,
    entries: Vec<OFElement>,
}

impl OFMatrix {
    pub fn zeros(ctx: &PrecisionContext, rows: usize, cols: usize) -> Self {
        Self {
            ctx: ctx.clone(),
            rows,
            cols,
            entries: vec![OFElement::zero(ctx); rows * cols],
        }
    }

    pub fn identity(ctx: &PrecisionContext, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, OFElement::one(ctx));
        }
        m
    }

    pub fn from_fn(
        ctx: &PrecisionContext,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> OFElement,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            ctx: ctx.clone(),
            rows,
            cols,
            entries,
        }
    }

    pub fn from_i64_rows(ctx: &PrecisionContext, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(Self::from_fn(ctx, r, c, |i, j| {
            OFElement::from_i64(ctx, rows[i][j])
        }))
    }

    /// Diagonal matrix `diag(p^{e_1}, ..., p^{e_d})`.
    pub fn p_power_diagonal(ctx: &PrecisionContext, exps: &[u32]) -> Self {
        let mut m = Self::zeros(ctx, exps.len(), exps.len());
        for (i, &e) in exps.iter().enumerate() {
            m.set(i, i, OFElement::one(ctx).mul_p_pow(e));
        }
        m
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
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

    pub fn get(&self, i: usize, j: usize) -> &OFElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: OFElement) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> &[OFElement] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[OFElement] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(OFElement::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.ctx, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&OFElement) -> OFElement) -> Self {
        Self {
            ctx: self.ctx.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Entrywise Frobenius `sigma(M)`.
    pub fn frobenius(&self) -> Self {
        self.map(OFElement::frobenius)
    }

    pub fn frobenius_pow(&self, k: i64) -> Self {
        self.map(|x| x.frobenius_pow(k))
    }

    pub fn scale(&self, s: &OFElement) -> Self {
        self.map(|x| x * s)
    }

    pub fn mul_p_pow(&self, k: u32) -> Self {
        self.map(|x| x.mul_p_pow(k))
    }

    /// Minimum valuation over all entries; `None` if the matrix is zero.
    pub fn valuation(&self) -> Option<u32> {
        self.entries.iter().filter_map(OFElement::valuation).min()
    }

    /// Submatrix of the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(&self.ctx, rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        })
    }

    /// Stack `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack column counts differ".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(Self {
            ctx: self.ctx.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Place `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        Ok(Self::from_fn(&self.ctx, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        }))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        if !self.ctx.same(&rhs.ctx) {
            return Err(Error::ContextMismatch);
        }
        let ring = self.ctx.ring();
        let width = 2 * ring.f - 1;
        let flush_every = (super::ring::ACCUMULATION_LIMIT / ring.f).max(1);
        let pn = ring.pn as u128;
        let mut out = Vec::with_capacity(self.rows * rhs.cols);
        let mut acc = vec![0u128; width];
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                acc.iter_mut().for_each(|a| *a = 0);
                for k in 0..self.cols {
                    if k > 0 && k % flush_every == 0 {
                        acc.iter_mut().for_each(|a| *a %= pn);
                    }
                    ring.mul_acc(&mut acc, self.get(i, k).raw(), rhs.get(k, j).raw());
                }
                out.push(OFElement::from_raw(&self.ctx, ring.reduce_wide(&acc)));
            }
        }
        Ok(Self {
            ctx: self.ctx.clone(),
            rows: self.rows,
            cols: rhs.cols,
            entries: out,
        })
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&OFElement, &OFElement) -> OFElement) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Self {
            ctx: self.ctx.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[target] -= t * row[source]`.
    pub(crate) fn row_axpy(&mut self, target: usize, source: usize, t: &OFElement) {
        for j in 0..self.cols {
            let s = self.get(source, j) * t;
            let v = self.get(target, j) - &s;
            self.set(target, j, v);
        }
    }

    /// `col[target] -= t * col[source]`.
    pub(crate) fn col_axpy(&mut self, target: usize, source: usize, t: &OFElement) {
        for i in 0..self.rows {
            let s = self.get(i, source) * t;
            let v = self.get(i, target) - &s;
            self.set(i, target, v);
        }
    }

    pub(crate) fn scale_row(&mut self, i: usize, t: &OFElement) {
        for j in 0..self.cols {
            let v = self.get(i, j) * t;
            self.set(i, j, v);
        }
    }

    /// Determinant by elimination with minimal-valuation pivots. Every row
    /// operation is an elementary transvection, so the result is exact mod `p^N`.
    pub fn det(&self) -> Result<OFElement> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = OFElement::one(&self.ctx);
        for k in 0..n {
            let pivot = (k..n)
                .filter_map(|i| a.get(i, k).valuation().map(|v| (v, i)))
                .min();
            let Some((_, pr)) = pivot else {
                return Ok(OFElement::zero(&self.ctx));
            };
            if pr != k {
                a.swap_rows(pr, k);
                det = -det;
            }
            let (v, unit) = a.get(k, k).split_unit().unwrap();
            let unit_inv = unit.inverse()?;
            for i in k + 1..n {
                if let Some((w, u)) = a.get(i, k).split_unit() {
                    let t = (&u * &unit_inv).mul_p_pow(w - v);
                    a.row_axpy(i, k, &t);
                }
            }
            det = &det * a.get(k, k);
        }
        Ok(det)
    }

    /// Inverse of a matrix whose determinant is a unit.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(&self.ctx, n);
        for k in 0..n {
            let pr = (k..n)
                .find(|&i| a.get(i, k).is_unit())
                .ok_or_else(|| Error::NotAUnit("matrix determinant is not a unit".into()))?;
            a.swap_rows(pr, k);
            inv.swap_rows(pr, k);
            let t = a.get(k, k).inverse()?;
            a.scale_row(k, &t);
            inv.scale_row(k, &t);
            for i in 0..n {
                if i != k && !a.get(i, k).is_zero() {
                    let c = a.get(i, k).clone();
                    a.row_axpy(i, k, &c);
                    inv.row_axpy(i, k, &c);
                }
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.det().map(|d| d.is_unit()).unwrap_or(false)
    }
}

impl fmt::Debug for OFMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl<'a> Mul<&'a OFMatrix> for &'a OFMatrix {
    type Output = OFMatrix;
    fn mul(self, rhs: &OFMatrix) -> OFMatrix {
        self.try_mul(rhs).expect("matrix product")
    }
}

impl<'a> Add<&'a OFMatrix> for &'a OFMatrix {
    type Output = OFMatrix;
    fn add(self, rhs: &OFMatrix) -> OFMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a OFMatrix> for &'a OFMatrix {
    type Output = OFMatrix;
    fn sub(self, rhs: &OFMatrix) -> OFMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let ctx = PrecisionContext::unramified_base(5, 12).unwrap();
        let m = OFMatrix::from_i64_rows(&ctx, &[vec![1, 2, 0], vec![0, 1, 3], vec![1, 0, 1]]).unwrap();
        assert_eq!(m.det().unwrap().to_signed_i128(), Some(7));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, OFMatrix::identity(&ctx, 3));
    }
}
