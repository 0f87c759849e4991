use num_rational::Ratio;

use super::element::OFElement;
use super::matrix::OFMatrix;
use super::ring::ResidueField;
use crate::error::{Error, Result};

pub type Slope = Ratio<i64>;

/// Characteristic polynomial `det(x I - M)`, coefficients low degree first
/// (so `c[n] = 1`). Berkowitz's algorithm, division free.
pub fn characteristic_polynomial(m: &OFMatrix) -> Result<Vec<OFElement>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("characteristic polynomial of non-square matrix".into()));
    }
    let ctx = m.ctx();
    let n = m.rows();
    if n == 0 {
        return Ok(vec![OFElement::one(ctx)]);
    }
    // v holds coefficients highest degree first
    let mut v = vec![OFElement::one(ctx), -m.get(0, 0)];
    for r in 1..n {
        let a = m.get(r, r);
        // column C = M[0..r][r], row R = M[r][0..r], principal block A = M[0..r][0..r]
        let mut t = Vec::with_capacity(r + 2);
        t.push(OFElement::one(ctx));
        t.push(-a);
        let mut col: Vec<OFElement> = (0..r).map(|i| m.get(i, r).clone()).collect();
        for _ in 0..r {
            let rc = (0..r).fold(OFElement::zero(ctx), |acc, j| &acc + &(m.get(r, j) * &col[j]));
            t.push(-rc);
            col = (0..r)
                .map(|i| {
                    (0..r).fold(OFElement::zero(ctx), |acc, j| &acc + &(m.get(i, j) * &col[j]))
                })
                .collect();
        }
        // new v = T v, T lower-triangular Toeplitz (r+2) x (r+1)
        let mut next = Vec::with_capacity(r + 2);
        for i in 0..r + 2 {
            let mut s = OFElement::zero(ctx);
            for j in 0..=r.min(i) {
                if i - j < t.len() && j < v.len() {
                    s = &s + &(&t[i - j] * &v[j]);
                }
            }
            next.push(s);
        }
        v = next;
    }
    v.reverse();
    Ok(v)
}

/// Lower convex hull slopes of the points `(i, v_i)`; returns the multiset of
/// root valuations (negated hull slopes), sorted ascending.
pub(crate) fn newton_polygon(points: &[(i64, i64)]) -> Vec<Slope> {
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop (x2,y2) if it lies on or above segment (x1,y1)-(pt)
            let cross = (y2 - y1) * (pt.0 - x1) - (pt.1 - y1) * (x2 - x1);
            if cross >= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut out = Vec::new();
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        let s = Ratio::new(y1 - y2, x2 - x1);
        for _ in 0..(x2 - x1) {
            out.push(s);
        }
    }
    out.sort();
    out
}

/// `M * sigma(M) * ... * sigma^{f-1}(M)`.
pub fn frobenius_norm_product(m: &OFMatrix) -> OFMatrix {
    let f = m.ctx().degree();
    let mut acc = m.clone();
    let mut conj = m.clone();
    for _ in 1..f {
        conj = conj.frobenius();
        acc = &acc * &conj;
    }
    acc
}

/// Slopes of the sigma-semilinear operator with matrix `m`, normalised by `f`.
pub fn newton_slopes(m: &OFMatrix) -> Result<Vec<Slope>> {
    let f = m.ctx().degree() as i64;
    let prod = frobenius_norm_product(m);
    let cp = characteristic_polynomial(&prod)?;
    if cp[0].is_zero() {
        return Err(Error::PrecisionLoss(
            "determinant vanishes at working precision; Newton polygon undetermined".into(),
        ));
    }
    let points: Vec<(i64, i64)> = cp
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.valuation().map(|v| (i as i64, v as i64)))
        .collect();
    Ok(newton_polygon(&points)
        .into_iter()
        .map(|s| s / Ratio::from_integer(f))
        .collect())
}

fn residue_matrix(m: &OFMatrix) -> Vec<Vec<Vec<u64>>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(OFElement::residue).collect())
        .collect()
}

fn field_mat_mul(k: &ResidueField, a: &[Vec<Vec<u64>>], b: &[Vec<Vec<u64>>]) -> Vec<Vec<Vec<u64>>> {
    let n = a.len();
    let m = b.first().map(|r| r.len()).unwrap_or(0);
    let inner = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..inner).fold(k.zero(), |acc, l| k.add(&acc, &k.mul(&a[i][l], &b[l][j])))
                })
                .collect()
        })
        .collect()
}

pub(crate) fn field_rank(k: &ResidueField, mut a: Vec<Vec<Vec<u64>>>) -> usize {
    let rows = a.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..rows).find(|&i| !k.is_zero(&a[i][c])) else {
            continue;
        };
        a.swap(rank, pr);
        let inv = k.inverse(&a[rank][c]).unwrap();
        for i in 0..rows {
            if i != rank && !k.is_zero(&a[i][c]) {
                let factor = k.mul(&a[i][c], &inv);
                for j in 0..cols {
                    let t = k.mul(&factor, &a[rank][j]);
                    a[i][j] = k.sub(&a[i][j], &t);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn field_frobenius(k: &ResidueField, a: &[Vec<Vec<u64>>], times: usize) -> Vec<Vec<Vec<u64>>> {
    a.iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let mut y = x.clone();
                    for _ in 0..times {
                        y = k.frobenius(&y);
                    }
                    y
                })
                .collect()
        })
        .collect()
}

/// Stable rank of the sigma-semilinear map `x -> sigma(x) B` on row vectors
/// over the residue field, where `B = M mod p`: the rank of
/// `sigma^{n-1}(B) ... sigma(B) B` for `n = d f`. Zero certifies that the
/// operator has no slope-0 part.
pub fn semilinear_stable_rank(m: &OFMatrix) -> usize {
    stable_rank(m, false)
}

/// Stable rank of the sigma^{-1}-semilinear map `y -> sigma^{-1}(y) sigma^{-1}(B)`;
/// equals the rank of `B sigma(B) ... sigma^{n-1}(B)`.
pub fn inverse_semilinear_stable_rank(m: &OFMatrix) -> usize {
    stable_rank(m, true)
}

fn stable_rank(m: &OFMatrix, reversed: bool) -> usize {
    assert!(m.is_square(), "stable rank needs a square matrix");
    let k = m.ctx().residue_field();
    let f = m.ctx().degree();
    let d = m.rows();
    if d == 0 {
        return 0;
    }
    let b = residue_matrix(m);
    let steps = d * f;
    let mut acc = b.clone();
    for s in 1..steps {
        let conj = field_frobenius(&k, &b, s % f);
        acc = if reversed {
            field_mat_mul(&k, &acc, &conj)
        } else {
            field_mat_mul(&k, &conj, &acc)
        };
    }
    field_rank(&k, acc)
}

/// Rank of `M mod p` over the residue field.
pub fn residue_rank(m: &OFMatrix) -> usize {
    field_rank(&m.ctx().residue_field(), residue_matrix(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrecisionContext;

    fn m(ctx: &PrecisionContext, rows: &[Vec<i64>]) -> OFMatrix {
        OFMatrix::from_i64_rows(ctx, rows).unwrap()
    }

    #[test]
    fn charpoly_two_by_two() {
        let ctx = PrecisionContext::unramified_base(7, 6).unwrap();
        let cp = characteristic_polynomial(&m(&ctx, &[vec![1, 2], vec![3, 4]])).unwrap();
        let ints: Vec<i128> = cp.iter().map(|c| c.to_signed_i128().unwrap()).collect();
        assert_eq!(ints, vec![-2, -5, 1]);
    }

    #[test]
    fn charpoly_three_by_three() {
        let ctx = PrecisionContext::unramified_base(7, 8).unwrap();
        let a = m(&ctx, &[vec![2, 1, 0], vec![-1, 3, 4], vec![5, 0, 1]]);
        let cp = characteristic_polynomial(&a).unwrap();
        // trace 6, sum of principal 2-minors 7+2+3 = 12, det 2*3 - 1*(-1-20) = 27
        let ints: Vec<i128> = cp.iter().map(|c| c.to_signed_i128().unwrap()).collect();
        assert_eq!(ints, vec![-27, 12, -6, 1]);
    }

    #[test]
    fn slopes_examples() {
        let ctx = PrecisionContext::unramified_base(3, 10).unwrap();
        let s = newton_slopes(&m(&ctx, &[vec![1, 0], vec![0, 3]])).unwrap();
        assert_eq!(s, vec![Slope::from_integer(0), Slope::from_integer(1)]);
        let s = newton_slopes(&m(&ctx, &[vec![0, 1], vec![3, 0]])).unwrap();
        assert_eq!(s, vec![Slope::new(1, 2), Slope::new(1, 2)]);
        let z = OFMatrix::zeros(&ctx, 2, 2);
        assert!(matches!(newton_slopes(&z), Err(Error::PrecisionLoss(_))));
    }

    #[test]
    fn polygon_hull() {
        let s = newton_polygon(&[(0, 3), (1, 1), (2, 2), (3, 0)]);
        assert_eq!(s, vec![Slope::new(1, 2), Slope::new(1, 2), Slope::from_integer(2)]);
    }

    #[test]
    fn stable_rank_examples() {
        let ctx = PrecisionContext::unramified_base(3, 4).unwrap();
        assert_eq!(semilinear_stable_rank(&m(&ctx, &[vec![1, 0], vec![0, 0]])), 1);
        assert_eq!(semilinear_stable_rank(&m(&ctx, &[vec![0, 1], vec![0, 0]])), 0);
        assert_eq!(semilinear_stable_rank(&m(&ctx, &[vec![0, 1], vec![1, 0]])), 2);
        assert_eq!(residue_rank(&m(&ctx, &[vec![0, 1], vec![0, 0]])), 1);
    }

    #[test]
    fn slopes_over_extension_divided_by_f() {
        let ctx = PrecisionContext::new(3, 2, 8).unwrap();
        let a = OFMatrix::p_power_diagonal(&ctx, &[0, 1]);
        let s = newton_slopes(&a).unwrap();
        assert_eq!(s, vec![Slope::from_integer(0), Slope::from_integer(1)]);
        assert_eq!(semilinear_stable_rank(&a), 1);
    }
}
