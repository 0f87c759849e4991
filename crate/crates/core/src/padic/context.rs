use std::fmt;
use std::sync::Arc;

use super::ring::{fp_poly, RawRing, ResidueField, MODULUS_LIMIT};
use crate::error::{Error, Result};

/// Shared arithmetic context for `O_F = W(F_{p^f})` truncated at `p^N`.
///
/// Cloning is cheap; all elements created from one context share the same
/// modulus and Frobenius table.
#[derive(Clone)]
pub struct PrecisionContext {
    inner: Arc<Inner>,
}

struct Inner {
    ring: RawRing,
    /// `sigma(X^i)` for `0 <= i < f`.
    frobenius_images: Vec<Vec<u64>>,
    /// `sigma^{-1}(X^i) = sigma^{f-1}(X^i)`.
    inverse_frobenius_images: Vec<Vec<u64>>,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Lexicographically smallest monic irreducible polynomial of degree `f` over `F_p`.
fn default_modulus(p: u64, f: usize) -> Vec<u64> {
    if f == 1 {
        return vec![0];
    }
    let mut low = vec![0u64; f];
    loop {
        let mut m = low.clone();
        m.push(1);
        if low[0] != 0 && fp_poly::is_irreducible(&m, p) {
            return low;
        }
        // odometer increment
        let mut i = 0;
        loop {
            low[i] += 1;
            if low[i] < p {
                break;
            }
            low[i] = 0;
            i += 1;
            assert!(i < f, "no irreducible polynomial found");
        }
    }
}

impl PrecisionContext {
    /// Context for `F = Q_p` (`f = 1`) at absolute precision `n`.
    pub fn unramified_base(p: u64, n: u32) -> Result<Self> {
        Self::new(p, 1, n)
    }

    /// Context for the unramified extension of degree `f`, using the smallest
    /// monic irreducible polynomial as the defining modulus.
    pub fn new(p: u64, f: usize, n: u32) -> Result<Self> {
        Self::check_params(p, f, n)?;
        let modulus = default_modulus(p, f);
        Self::build(p, f, n, modulus)
    }

    /// Context with an explicit monic modulus given by its low coefficients
    /// `m_0, ..., m_{f-1}` (the leading coefficient 1 is implicit).
    pub fn with_modulus(p: u64, n: u32, low_coeffs: &[i64]) -> Result<Self> {
        let f = low_coeffs.len();
        Self::check_params(p, f, n)?;
        let pn = p.pow(n);
        let modulus: Vec<u64> = low_coeffs
            .iter()
            .map(|&c| c.rem_euclid(pn as i64) as u64)
            .collect();
        let mut mbar: Vec<u64> = modulus.iter().map(|&c| c % p).collect();
        mbar.push(1);
        if !fp_poly::is_irreducible(&mbar, p) {
            return Err(Error::InvalidContext(format!(
                "modulus {:?} is not irreducible mod {}",
                low_coeffs, p
            )));
        }
        Self::build(p, f, n, modulus)
    }

    fn check_params(p: u64, f: usize, n: u32) -> Result<()> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidContext(format!("p = {} must be an odd prime", p)));
        }
        if f == 0 {
            return Err(Error::InvalidContext("residue degree must be >= 1".into()));
        }
        if n == 0 {
            return Err(Error::InvalidContext("precision must be >= 1".into()));
        }
        let fits = p
            .checked_pow(n)
            .map(|pn| pn < MODULUS_LIMIT)
            .unwrap_or(false);
        if !fits {
            return Err(Error::InvalidContext(format!(
                "p^N = {}^{} exceeds the supported bound 2^57",
                p, n
            )));
        }
        if (f as f64) * (p as f64).log2() > 60.0 {
            return Err(Error::InvalidContext(format!(
                "residue field of size {}^{} is too large",
                p, f
            )));
        }
        Ok(())
    }

    fn build(p: u64, f: usize, n: u32, modulus: Vec<u64>) -> Result<Self> {
        let ring = RawRing {
            p,
            f,
            n,
            pn: p.pow(n),
            modulus,
        };
        let xi = frobenius_root(&ring)?;
        let mut frobenius_images = Vec::with_capacity(f);
        let mut power = ring.one();
        for _ in 0..f {
            frobenius_images.push(power.clone());
            power = ring.mul(&power, &xi);
        }
        // sigma^{f-1}(X^i): apply the table f-1 times.
        let apply = |a: &[u64], table: &[Vec<u64>]| -> Vec<u64> {
            let mut out = ring.zero();
            for (i, &c) in a.iter().enumerate() {
                if c != 0 {
                    out = ring.add(&out, &ring.scale(&table[i], c));
                }
            }
            out
        };
        let mut inverse_frobenius_images = Vec::with_capacity(f);
        for i in 0..f {
            let mut x = ring.zero();
            x[i] = 1 % ring.pn;
            for _ in 0..f.saturating_sub(1) {
                x = apply(&x, &frobenius_images);
            }
            inverse_frobenius_images.push(x);
        }
        Ok(Self {
            inner: Arc::new(Inner {
                ring,
                frobenius_images,
                inverse_frobenius_images,
            }),
        })
    }

    pub fn p(&self) -> u64 {
        self.inner.ring.p
    }

    /// Residue degree `f = [F : Q_p]`.
    pub fn degree(&self) -> usize {
        self.inner.ring.f
    }

    /// Absolute precision `N`.
    pub fn precision(&self) -> u32 {
        self.inner.ring.n
    }

    /// `p^N`.
    pub fn modulus_pn(&self) -> u64 {
        self.inner.ring.pn
    }

    /// Low coefficients of the monic defining polynomial.
    pub fn defining_polynomial(&self) -> &[u64] {
        &self.inner.ring.modulus
    }

    pub(crate) fn ring(&self) -> &RawRing {
        &self.inner.ring
    }

    pub(crate) fn residue_field(&self) -> ResidueField {
        self.inner.ring.residue_field()
    }

    pub(crate) fn frobenius_raw(&self, a: &[u64]) -> Vec<u64> {
        if self.degree() == 1 {
            return a.to_vec();
        }
        self.apply_table(a, &self.inner.frobenius_images)
    }

    pub(crate) fn inverse_frobenius_raw(&self, a: &[u64]) -> Vec<u64> {
        if self.degree() == 1 {
            return a.to_vec();
        }
        self.apply_table(a, &self.inner.inverse_frobenius_images)
    }

    fn apply_table(&self, a: &[u64], table: &[Vec<u64>]) -> Vec<u64> {
        let ring = self.ring();
        let mut acc = vec![0u128; ring.f];
        for (i, &c) in a.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (slot, &t) in acc.iter_mut().zip(&table[i]) {
                *slot += c as u128 * t as u128;
            }
        }
        acc.iter().map(|&x| (x % ring.pn as u128) as u64).collect()
    }

    /// Same context up to identity of parameters.
    pub fn same(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.ring == other.inner.ring
    }
}

impl PartialEq for PrecisionContext {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

impl Eq for PrecisionContext {}

impl fmt::Debug for PrecisionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrecisionContext")
            .field("p", &self.p())
            .field("f", &self.degree())
            .field("N", &self.precision())
            .field("modulus", &self.defining_polynomial())
            .finish()
    }
}

/// Hensel-lift the root `X^p` of `m mod p` to a root of `m` in `O_F / p^N`.
fn frobenius_root(ring: &RawRing) -> Result<Vec<u64>> {
    let f = ring.f;
    if f == 1 {
        return Ok(ring.one());
    }
    let mut x = ring.zero();
    x[1] = 1;
    let mut xi = ring.pow(&x, ring.p);
    // m(y) and m'(y) evaluated in O_F.
    let eval = |y: &[u64]| -> (Vec<u64>, Vec<u64>) {
        let mut value = ring.one();
        let mut deriv = ring.from_i128(f as i128);
        for j in (0..f).rev() {
            value = ring.add(&ring.mul(&value, y), &ring.from_i128(ring.modulus[j] as i128));
            if j > 0 {
                deriv = ring.add(
                    &ring.mul(&deriv, y),
                    &ring.from_i128(j as i128 * ring.modulus[j] as i128),
                );
            }
        }
        (value, deriv)
    };
    for _ in 0..=ring.n {
        let (value, deriv) = eval(&xi);
        if ring.is_zero(&value) {
            return Ok(xi);
        }
        let inv = ring.inverse(&deriv).ok_or_else(|| {
            Error::InvalidContext("modulus is not separable mod p".into())
        })?;
        xi = ring.sub(&xi, &ring.mul(&value, &inv));
    }
    let (value, _) = eval(&xi);
    if ring.is_zero(&value) {
        Ok(xi)
    } else {
        Err(Error::InvalidContext("Frobenius lift did not converge".into()))
    }
}
