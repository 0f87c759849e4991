//! Smith normal form over the local ring `O_F / p^N`.
//!
//! Every nonzero element is `p^v` times a unit, so a pivot of minimal
//! valuation divides every remaining entry and elimination never needs gcd
//! steps. Pivots are chosen by minimal valuation, ties broken in row-major order.

use super::matrix::OFMatrix;
use crate::error::{Error, Result};

/// `U * M * V = D` with `D` diagonal, `D_ii = p^{e_i}`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: OFMatrix,
    pub d: OFMatrix,
    pub v: OFMatrix,
    /// `e_i` for `i < min(rows, cols)`; `None` when the entry is zero at precision.
    pub exponents: Vec<Option<u32>>,
}

impl SmithForm {
    /// Number of diagonal entries nonzero at precision.
    pub fn rank(&self) -> usize {
        self.exponents.iter().filter(|e| e.is_some()).count()
    }

    /// Sum of the finite exponents, i.e. the length of the torsion of the cokernel.
    pub fn exponent_sum(&self) -> u64 {
        self.exponents.iter().flatten().map(|&e| e as u64).sum()
    }

    /// Fail with `PrecisionLoss` unless the rank is at least `needed`.
    pub fn require_rank(&self, needed: usize) -> Result<()> {
        if self.rank() < needed {
            return Err(Error::PrecisionLoss(format!(
                "rank {} at precision p^{} but {} required",
                self.rank(),
                self.d.ctx().precision(),
                needed
            )));
        }
        Ok(())
    }
}

pub fn smith_normal_form(m: &OFMatrix) -> SmithForm {
    let ctx = m.ctx().clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = OFMatrix::identity(&ctx, rows);
    let mut v = OFMatrix::identity(&ctx, cols);
    let steps = rows.min(cols);
    let mut exponents = Vec::with_capacity(steps);

    for k in 0..steps {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if let Some(val) = d.get(i, j).valuation() {
                    if best.map_or(true, |(b, _, _)| val < b) {
                        best = Some((val, i, j));
                    }
                }
            }
        }
        let Some((val, pi, pj)) = best else {
            exponents.extend(std::iter::repeat(None).take(steps - k));
            break;
        };
        d.swap_rows(k, pi);
        u.swap_rows(k, pi);
        d.swap_cols(k, pj);
        v.swap_cols(k, pj);

        let (_, unit) = d.get(k, k).split_unit().unwrap();
        let unit_inv = unit.inverse().expect("split unit is a unit");
        // normalise the pivot to p^val
        d.scale_row(k, &unit_inv);
        u.scale_row(k, &unit_inv);

        for i in k + 1..rows {
            if let Some((w, ui)) = d.get(i, k).split_unit() {
                let t = ui.mul_p_pow(w - val);
                d.row_axpy(i, k, &t);
                u.row_axpy(i, k, &t);
            }
        }
        for j in k + 1..cols {
            if let Some((w, uj)) = d.get(k, j).split_unit() {
                let t = uj.mul_p_pow(w - val);
                d.col_axpy(j, k, &t);
                v.col_axpy(j, k, &t);
            }
        }
        exponents.push(Some(val));
    }
    debug_assert!((0..rows).all(|i| (0..cols).all(|j| i == j || d.get(i, j).is_zero())));
    SmithForm { u, d, v, exponents }
}

/// Elementary-divisor exponents only.
pub fn elementary_divisors(m: &OFMatrix) -> Vec<Option<u32>> {
    smith_normal_form(m).exponents
}
