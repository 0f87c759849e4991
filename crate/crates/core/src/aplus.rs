//! The ring `A+_F = O_F[[pi]]`, truncated at `pi^M`, with its Frobenius
//! `phi(pi) = (1+pi)^p - 1` and the action `gamma_c(pi) = (1+pi)^c - 1`.
//!
//! Coefficients are stored flat: coefficient `i` occupies
//! `coeffs[i*f .. (i+1)*f]` in the polynomial basis of `O_F`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::ring::{addmod, mulmod, submod, ACCUMULATION_LIMIT};
use crate::padic::{OFElement, OFMatrix, PrecisionContext};

#[derive(Clone, PartialEq, Eq)]
pub struct APlusSeries {
    ctx: PrecisionContext,
    order: usize,
    coeffs: Vec<u64>,
}

fn check_order(ctx: &PrecisionContext, order: usize) {
    assert!(
        order * ctx.degree() <= ACCUMULATION_LIMIT,
        "truncation order {} too large for degree {}",
        order,
        ctx.degree()
    );
}

impl APlusSeries {
    pub fn zero(ctx: &PrecisionContext, order: usize) -> Self {
        check_order(ctx, order);
        Self {
            ctx: ctx.clone(),
            order,
            coeffs: vec![0; order * ctx.degree()],
        }
    }

    pub fn constant(x: &OFElement, order: usize) -> Self {
        let mut s = Self::zero(x.ctx(), order);
        if order > 0 {
            s.set_coeff(0, x);
        }
        s
    }

    pub fn one(ctx: &PrecisionContext, order: usize) -> Self {
        Self::constant(&OFElement::one(ctx), order)
    }

    /// The monomial `pi^k`.
    pub fn pi_pow(ctx: &PrecisionContext, k: usize, order: usize) -> Self {
        let mut s = Self::zero(ctx, order);
        if k < order {
            s.coeffs[k * ctx.degree()] = 1;
        }
        s
    }

    pub fn from_elements(ctx: &PrecisionContext, order: usize, elems: &[OFElement]) -> Self {
        let mut s = Self::zero(ctx, order);
        for (i, x) in elems.iter().take(order).enumerate() {
            s.set_coeff(i, x);
        }
        s
    }

    /// Series with integer coefficients `c_0 + c_1 pi + ...`.
    pub fn from_i64s(ctx: &PrecisionContext, order: usize, cs: &[i64]) -> Self {
        let elems: Vec<OFElement> = cs.iter().map(|&c| OFElement::from_i64(ctx, c)).collect();
        Self::from_elements(ctx, order, &elems)
    }

    fn from_base_coeffs(ctx: &PrecisionContext, order: usize, base: &[u64]) -> Self {
        let f = ctx.degree();
        let mut s = Self::zero(ctx, order);
        for (i, &c) in base.iter().take(order).enumerate() {
            s.coeffs[i * f] = c;
        }
        s
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize) -> OFElement {
        let f = self.ctx.degree();
        OFElement::from_raw(&self.ctx, self.coeffs[i * f..(i + 1) * f].to_vec())
    }

    pub fn coeffs(&self) -> Vec<OFElement> {
        (0..self.order).map(|i| self.coeff(i)).collect()
    }

    pub fn set_coeff(&mut self, i: usize, x: &OFElement) {
        let f = self.ctx.degree();
        self.coeffs[i * f..(i + 1) * f].copy_from_slice(x.coeffs());
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Index of the first nonzero coefficient.
    pub fn pi_valuation(&self) -> Option<usize> {
        let f = self.ctx.degree();
        (0..self.order).find(|&i| self.coeffs[i * f..(i + 1) * f].iter().any(|&c| c != 0))
    }

    /// Combined `(p, pi)`-valuation `min_k (v_p(a_k) + k)`.
    pub fn weight(&self) -> Option<u64> {
        (0..self.order)
            .filter_map(|k| self.coeff(k).valuation().map(|v| v as u64 + k as u64))
            .min()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let f = self.ctx.degree();
        Self {
            ctx: self.ctx.clone(),
            order,
            coeffs: self.coeffs[..order * f].to_vec(),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.order > 0 && self.coeff(0).is_unit()
    }

    fn pair(&self, rhs: &Self) -> (usize, u64) {
        assert!(self.ctx.same(&rhs.ctx), "series from different contexts");
        (self.order.min(rhs.order), self.ctx.modulus_pn())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let (order, pn) = self.pair(rhs);
        let f = self.ctx.degree();
        let coeffs = (0..order * f)
            .map(|i| addmod(self.coeffs[i], rhs.coeffs[i], pn))
            .collect();
        Self { ctx: self.ctx.clone(), order, coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let (order, pn) = self.pair(rhs);
        let f = self.ctx.degree();
        let coeffs = (0..order * f)
            .map(|i| submod(self.coeffs[i], rhs.coeffs[i], pn))
            .collect();
        Self { ctx: self.ctx.clone(), order, coeffs }
    }

    pub fn neg(&self) -> Self {
        let pn = self.ctx.modulus_pn();
        Self {
            ctx: self.ctx.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|&c| submod(0, c, pn)).collect(),
        }
    }

    /// Multiply by a constant of `O_F`.
    pub fn scale(&self, x: &OFElement) -> Self {
        let f = self.ctx.degree();
        if f == 1 {
            let s = x.coeffs()[0];
            return self.scale_base(s);
        }
        let ring = self.ctx.ring();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for i in 0..self.order {
            coeffs.extend(ring.mul(&self.coeffs[i * f..(i + 1) * f], x.coeffs()));
        }
        Self { ctx: self.ctx.clone(), order: self.order, coeffs }
    }

    /// Multiply by an element of `Z / p^N`, given as a residue.
    fn scale_base(&self, s: u64) -> Self {
        let pn = self.ctx.modulus_pn();
        Self {
            ctx: self.ctx.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|&c| mulmod(c, s, pn)).collect(),
        }
    }

    pub fn mul_p_pow(&self, k: u32) -> Self {
        self.scale(&OFElement::one(&self.ctx).mul_p_pow(k))
    }

    /// Multiply by `pi^k`, keeping the truncation order.
    pub fn shift_up(&self, k: usize) -> Self {
        let f = self.ctx.degree();
        let mut out = Self::zero(&self.ctx, self.order);
        if k < self.order {
            out.coeffs[k * f..].copy_from_slice(&self.coeffs[..(self.order - k) * f]);
        }
        out
    }

    /// Truncated product; the order of the result is the smaller of the two.
    pub fn mul(&self, rhs: &Self) -> Self {
        let (order, pn) = self.pair(rhs);
        let f = self.ctx.degree();
        let pn128 = pn as u128;
        if f == 1 {
            let a = &self.coeffs;
            let b = &rhs.coeffs;
            let lo_a = a.iter().take(order).position(|&x| x != 0).unwrap_or(order);
            let lo_b = b.iter().take(order).position(|&x| x != 0).unwrap_or(order);
            let mut coeffs = vec![0u64; order];
            for (k, out) in coeffs.iter_mut().enumerate().skip(lo_a + lo_b) {
                let mut acc = 0u128;
                for i in lo_a..=k - lo_b {
                    acc += a[i] as u128 * b[k - i] as u128;
                }
                *out = (acc % pn128) as u64;
            }
            return Self { ctx: self.ctx.clone(), order, coeffs };
        }
        let ring = self.ctx.ring();
        let width = 2 * f - 1;
        let mut coeffs = Vec::with_capacity(order * f);
        let mut acc = vec![0u128; width];
        for k in 0..order {
            acc.iter_mut().for_each(|x| *x = 0);
            for i in 0..=k {
                ring.mul_acc(
                    &mut acc,
                    &self.coeffs[i * f..(i + 1) * f],
                    &rhs.coeffs[(k - i) * f..(k - i + 1) * f],
                );
            }
            coeffs.extend(ring.reduce_wide(&acc));
        }
        Self { ctx: self.ctx.clone(), order, coeffs }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(&self.ctx, self.order);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Inverse of a series whose constant term is a unit.
    pub fn invert(&self) -> Result<Self> {
        if self.order == 0 {
            return Ok(self.clone());
        }
        let a0 = self.coeff(0);
        let inv0 = a0
            .inverse()
            .map_err(|_| Error::NotAUnit("constant term of the series is not a unit".into()))?;
        let ring = self.ctx.ring();
        let f = self.ctx.degree();
        let mut out = Self::zero(&self.ctx, self.order);
        out.set_coeff(0, &inv0);
        let width = 2 * f - 1;
        let mut acc = vec![0u128; width];
        for k in 1..self.order {
            acc.iter_mut().for_each(|x| *x = 0);
            for i in 1..=k {
                ring.mul_acc(
                    &mut acc,
                    &self.coeffs[i * f..(i + 1) * f],
                    &out.coeffs[(k - i) * f..(k - i + 1) * f],
                );
            }
            let s = ring.reduce_wide(&acc);
            let b = ring.mul(&ring.neg(&s), inv0.coeffs());
            out.coeffs[k * f..(k + 1) * f].copy_from_slice(&b);
        }
        Ok(out)
    }

    /// Divide by `pi^k`; the coefficients of `pi^0 .. pi^{k-1}` must vanish.
    /// The result has order `M - k`.
    pub fn exact_div_pi(&self, k: usize) -> Result<Self> {
        let f = self.ctx.degree();
        let k_eff = k.min(self.order);
        if let Some(index) =
            (0..k_eff).find(|&i| self.coeffs[i * f..(i + 1) * f].iter().any(|&c| c != 0))
        {
            return Err(Error::ExactDivisionFailure { k, index });
        }
        Ok(Self {
            ctx: self.ctx.clone(),
            order: self.order - k_eff,
            coeffs: self.coeffs[k_eff * f..].to_vec(),
        })
    }

    /// Apply `sigma` to every coefficient.
    pub fn frobenius_coeffs(&self) -> Self {
        if self.ctx.degree() == 1 {
            return self.clone();
        }
        let f = self.ctx.degree();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for i in 0..self.order {
            coeffs.extend(self.ctx.frobenius_raw(&self.coeffs[i * f..(i + 1) * f]));
        }
        Self { ctx: self.ctx.clone(), order: self.order, coeffs }
    }

    /// Reduction modulo `pi`.
    pub fn constant_term(&self) -> OFElement {
        if self.order == 0 {
            OFElement::zero(&self.ctx)
        } else {
            self.coeff(0)
        }
    }
}

impl fmt::Debug for APlusSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + O(pi^{})", self.coeffs(), self.order)
    }
}

/// Generalised binomial coefficient `C(c, k)` for an integer `c` (possibly negative).
pub fn binomial(c: &BigInt, k: usize) -> BigInt {
    let mut b = BigInt::one();
    for j in 0..k {
        b *= c - BigInt::from(j);
        b = b.div_floor(&BigInt::from(j + 1));
    }
    b
}

/// The coefficients `C(c, 0), ..., C(c, order-1)` of `(1+pi)^c`, reduced mod `p^N`.
fn binomial_row(ctx: &PrecisionContext, c: &BigInt, order: usize) -> Vec<u64> {
    let pn = BigInt::from(ctx.modulus_pn());
    let mut out = Vec::with_capacity(order);
    let mut b = BigInt::one();
    for j in 0..order {
        out.push(u64::try_from(b.mod_floor(&pn)).expect("residue fits"));
        b *= c - BigInt::from(j);
        b = b.div_floor(&BigInt::from(j + 1));
        if b.is_zero() && !c.is_negative() {
            out.resize(order, 0);
            break;
        }
    }
    out
}

/// `(1+pi)^c` as a series.
pub fn one_plus_pi_pow(ctx: &PrecisionContext, c: &BigInt, order: usize) -> APlusSeries {
    APlusSeries::from_base_coeffs(ctx, order, &binomial_row(ctx, c, order))
}

/// `q = phi(pi)/pi = sum_{k=1}^p C(p,k) pi^{k-1}`.
pub fn q_series(ctx: &PrecisionContext, order: usize) -> APlusSeries {
    let p = ctx.p() as usize;
    let row = binomial_row(ctx, &BigInt::from(p), p + 1);
    APlusSeries::from_base_coeffs(ctx, order, &row[1..])
}

/// `mu = p / (q - pi^{p-1})`, a unit of `A+_F`.
pub fn mu_series(ctx: &PrecisionContext, order: usize) -> APlusSeries {
    let p = ctx.p();
    // u = (q - pi^{p-1}) / p has integer coefficients C(p,k)/p, k = 1..p-1
    let pn = BigInt::from(ctx.modulus_pn());
    let u: Vec<u64> = (1..p as usize)
        .map(|k| {
            let c = binomial(&BigInt::from(p), k) / BigInt::from(p);
            u64::try_from(c.mod_floor(&pn)).unwrap()
        })
        .collect();
    APlusSeries::from_base_coeffs(ctx, order, &u)
        .invert()
        .expect("u(0) = 1")
}

/// `lambda_c = ((1+pi)^c - 1)/pi`, so that `gamma_c(pi) = pi * lambda_c`.
pub fn lambda_series(ctx: &PrecisionContext, c: &BigInt, order: usize) -> APlusSeries {
    let row = binomial_row(ctx, c, order + 1);
    APlusSeries::from_base_coeffs(ctx, order, &row[1..])
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum SubstitutionKind {
    Phi,
    Gamma(BigInt),
}

/// Precomputed powers of the image of `pi` under `phi` or `gamma_c`.
///
/// `table[i][k - i]` is the coefficient of `pi^k` in `image(pi)^i`; every
/// image has integer coefficients and `pi`-valuation one.
#[derive(Debug, Clone)]
pub struct Substitution {
    ctx: PrecisionContext,
    order: usize,
    kind: SubstitutionKind,
    table: Vec<Vec<u64>>,
}

impl Substitution {
    pub fn phi(ctx: &PrecisionContext, order: usize) -> Self {
        let p = ctx.p() as usize;
        let pn = ctx.modulus_pn();
        let row = binomial_row(ctx, &BigInt::from(p), p + 1);
        // phi(pi) = sum_{j=1}^p C(p,j) pi^j, sparse
        let img: Vec<(usize, u64)> = (1..=p).map(|j| (j, row[j])).collect();
        let mut table: Vec<Vec<u64>> = Vec::with_capacity(order);
        let mut cur = vec![0u64; order];
        if order > 0 {
            cur[0] = 1;
        }
        for i in 0..order {
            table.push(cur[i..].to_vec());
            let mut next = vec![0u64; order];
            for (k, &c) in cur.iter().enumerate().skip(i) {
                if c == 0 {
                    continue;
                }
                for &(j, b) in &img {
                    if k + j < order {
                        next[k + j] = addmod(next[k + j], mulmod(c, b, pn), pn);
                    }
                }
            }
            cur = next;
        }
        Self { ctx: ctx.clone(), order, kind: SubstitutionKind::Phi, table }
    }

    /// `gamma_c`; fails with `NotAUnit` when `p | c`.
    pub fn gamma(ctx: &PrecisionContext, order: usize, c: &BigInt) -> Result<Self> {
        if (c % BigInt::from(ctx.p())).is_zero() {
            return Err(Error::NotAUnit(format!("gamma parameter {} is divisible by p", c)));
        }
        let pn = ctx.modulus_pn() as u128;
        let lam = binomial_row(ctx, c, order + 1);
        // gamma_c(pi) = sum_{j>=1} C(c,j) pi^j
        let mut table: Vec<Vec<u64>> = Vec::with_capacity(order);
        let mut cur = vec![0u64; order];
        if order > 0 {
            cur[0] = 1;
        }
        for i in 0..order {
            table.push(cur[i..].to_vec());
            let mut next = vec![0u64; order];
            for (k, slot) in next.iter_mut().enumerate().skip(i + 1) {
                let mut acc = 0u128;
                for m in i..k {
                    acc += cur[m] as u128 * lam[k - m] as u128;
                }
                *slot = (acc % pn) as u64;
            }
            cur = next;
        }
        Ok(Self { ctx: ctx.clone(), order, kind: SubstitutionKind::Gamma(c.clone()), table })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Apply the substitution; orders above the table order are truncated.
    pub fn apply(&self, s: &APlusSeries) -> APlusSeries {
        assert!(self.ctx.same(s.ctx()), "series from a different context");
        let order = s.order().min(self.order);
        let src = match self.kind {
            SubstitutionKind::Phi => s.frobenius_coeffs(),
            SubstitutionKind::Gamma(_) => s.clone(),
        };
        let f = self.ctx.degree();
        let pn = self.ctx.modulus_pn() as u128;
        let mut out = APlusSeries::zero(&self.ctx, order);
        for t in 0..f {
            for k in 0..order {
                let mut acc = 0u128;
                for i in 0..=k {
                    let a = src.coeffs[i * f + t];
                    if a != 0 {
                        acc += a as u128 * self.table[i][k - i] as u128;
                    }
                }
                out.coeffs[k * f + t] = (acc % pn) as u64;
            }
        }
        out
    }

    pub fn apply_matrix(&self, m: &SeriesMatrix) -> SeriesMatrix {
        m.map(|s| self.apply(s))
    }
}

pub fn phi_series(s: &APlusSeries) -> APlusSeries {
    Substitution::phi(s.ctx(), s.order()).apply(s)
}

pub fn gamma_series(s: &APlusSeries, c: &BigInt) -> Result<APlusSeries> {
    Ok(Substitution::gamma(s.ctx(), s.order(), c)?.apply(s))
}

/// Matrix with entries in `A+_F`, all of the same truncation order.
#[derive(Clone, PartialEq, Eq)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<APlusSeries>,
}

impl SeriesMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> APlusSeries) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn zeros(ctx: &PrecisionContext, rows: usize, cols: usize, order: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| APlusSeries::zero(ctx, order))
    }

    pub fn identity(ctx: &PrecisionContext, n: usize, order: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                APlusSeries::one(ctx, order)
            } else {
                APlusSeries::zero(ctx, order)
            }
        })
    }

    /// Constant matrix.
    pub fn from_matrix(m: &OFMatrix, order: usize) -> Self {
        Self::from_fn(m.rows(), m.cols(), |i, j| APlusSeries::constant(m.get(i, j), order))
    }

    pub fn diagonal(diag: &[APlusSeries]) -> Self {
        let ctx = diag[0].ctx().clone();
        let order = diag[0].order();
        Self::from_fn(diag.len(), diag.len(), |i, j| {
            if i == j {
                diag[i].clone()
            } else {
                APlusSeries::zero(&ctx, order)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &APlusSeries {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: APlusSeries) {
        self.entries[i * self.cols + j] = s;
    }

    pub fn entries(&self) -> &[APlusSeries] {
        &self.entries
    }

    pub fn order(&self) -> usize {
        self.entries.iter().map(APlusSeries::order).min().unwrap_or(0)
    }

    pub fn map(&self, f: impl Fn(&APlusSeries) -> APlusSeries) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&APlusSeries) -> Result<APlusSeries>) -> Result<Self> {
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect::<Result<_>>()?,
        })
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&APlusSeries, &APlusSeries) -> APlusSeries) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, APlusSeries::add)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, APlusSeries::sub)
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, rhs: &Self) -> Self {
        self.zip(rhs, APlusSeries::mul)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = self.get(i, 0).mul(rhs.get(0, j));
            for k in 1..self.cols {
                acc = acc.add(&self.get(i, k).mul(rhs.get(k, j)));
            }
            acc
        })
    }

    /// `C * self` for a constant matrix `C`.
    pub fn left_mul_const(&self, c: &OFMatrix) -> Self {
        assert_eq!(c.cols(), self.rows, "shape mismatch");
        Self::from_fn(c.rows(), self.cols, |i, j| {
            let mut acc = self.get(0, j).scale(c.get(i, 0));
            for k in 1..self.rows {
                acc = acc.add(&self.get(k, j).scale(c.get(i, k)));
            }
            acc
        })
    }

    /// `self * C` for a constant matrix `C`.
    pub fn right_mul_const(&self, c: &OFMatrix) -> Self {
        assert_eq!(self.cols, c.rows(), "shape mismatch");
        Self::from_fn(self.rows, c.cols(), |i, j| {
            let mut acc = self.get(i, 0).scale(c.get(0, j));
            for k in 1..self.cols {
                acc = acc.add(&self.get(i, k).scale(c.get(k, j)));
            }
            acc
        })
    }

    pub fn scale(&self, s: &APlusSeries) -> Self {
        self.map(|x| x.mul(s))
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|x| x.truncate(order))
    }

    pub fn shift_up(&self, k: usize) -> Self {
        self.map(|x| x.shift_up(k))
    }

    pub fn exact_div_pi(&self, k: usize) -> Result<Self> {
        self.try_map(|x| x.exact_div_pi(k))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(APlusSeries::is_zero)
    }

    /// Minimal combined `(p, pi)`-valuation over the entries.
    pub fn weight(&self) -> Option<u64> {
        self.entries.iter().filter_map(APlusSeries::weight).min()
    }

    /// Reduction modulo `pi`.
    pub fn constant_terms(&self) -> OFMatrix {
        let ctx = self.entries[0].ctx();
        OFMatrix::from_fn(ctx, self.rows, self.cols, |i, j| self.get(i, j).constant_term())
    }
}

impl fmt::Debug for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| &self.entries[i * self.cols..(i + 1) * self.cols]))
            .finish()
    }
}
