use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational square or rectangular matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        Self::from_fn(r, c, |i, j| BigRational::from_integer(BigInt::from(rows[i][j])))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { BigRational::one() } else { BigRational::zero() })
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(BigRational::zero(), |acc, k| acc + self.get(i, k) * rhs.get(k, j))
        })
    }

    pub fn sub_scalar(&self, alpha: &BigRational) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            if i == j {
                self.get(i, j) - alpha
            } else {
                self.get(i, j).clone()
            }
        })
    }

    /// Row-reduced echelon form together with the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            let Some(pr) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            for j in 0..a.cols {
                a.entries.swap(r * a.cols + j, pr * a.cols + j);
            }
            let inv = a.get(r, c).recip();
            for j in 0..a.cols {
                a.entries[r * a.cols + j] = a.get(r, j) * &inv;
            }
            for i in 0..a.rows {
                if i != r && !a.get(i, c).is_zero() {
                    let factor = a.get(i, c).clone();
                    for j in 0..a.cols {
                        let t = &factor * a.get(r, j);
                        a.entries[i * a.cols + j] = a.get(i, j) - t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == a.rows {
                break;
            }
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
}

/// Whether `f = M` is semisimple at `alpha`, i.e. `ker(f - alpha) ∩ im(f - alpha) = 0`,
/// tested as `rank(M - alpha) = rank((M - alpha)^2)`.
pub fn is_semisimple_at(m: &RationalMatrix, alpha: &BigRational) -> bool {
    assert_eq!(m.rows, m.cols, "semisimplicity needs a square matrix");
    let n = m.sub_scalar(alpha);
    n.rank() == n.mul(&n).rank()
}
