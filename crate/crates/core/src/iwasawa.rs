//! Truncated arithmetic in `Λ = Z_p[Δ][[T]]` and its rational enlargement.
//!
//! An element is stored through its idempotent decomposition
//! `x = Σ_i e_i x_i(T)`, `i ∈ Z/(p-1)`, where `e_i` is attached to the `i`-th
//! power of the Teichmüller character of `Δ` and `T = γ_1 - 1` with
//! `χ(γ_1) = 1 + p`. Each `x_i` is a polynomial of degree `< order` with exact
//! rational coefficients, so p-power denominators are carried exactly.
//!
//! The twist `γ ↦ χ(γ)γ` is affine in `T` and therefore exact on polynomials,
//! but it does not preserve the ideal `(T^order)`: it commutes with
//! [`IwasawaElement::mul_exact`] and not with the truncated product.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IwasawaElement {
    p: u64,
    components: Vec<Vec<BigRational>>,
}

fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `Σ c_k ((α + βT)/δ)^k`, evaluated by Horner's rule over the integers after
/// clearing all denominators.
fn affine_substitute(coeffs: &[BigRational], alpha: &BigInt, beta: &BigInt, delta: &BigInt) -> Vec<BigRational> {
    let n = coeffs.len();
    if n == 0 {
        return Vec::new();
    }
    let common = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut delta_pows = vec![BigInt::one(); n];
    for k in 1..n {
        delta_pows[k] = &delta_pows[k - 1] * delta;
    }
    let mut acc = vec![BigInt::zero(); n];
    for (k, c) in coeffs.iter().enumerate().rev() {
        let mut next = vec![BigInt::zero(); n];
        for (m, v) in acc.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            next[m] += v * alpha;
            if m + 1 < n {
                next[m + 1] += v * beta;
            }
        }
        next[0] += c.numer() * (&common / c.denom()) * &delta_pows[n - 1 - k];
        acc = next;
    }
    let denominator = common * &delta_pows[n - 1];
    acc.into_iter().map(|v| BigRational::new(v, denominator.clone())).collect()
}

fn poly_mul(x: &[BigRational], y: &[BigRational], len: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); len];
    for (i, a) in x.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in y.iter().enumerate().take(len.saturating_sub(i)) {
            out[i + j] += a * b;
        }
    }
    out
}

fn p_valuation(x: &BigInt, p: &BigInt) -> u64 {
    let mut v = 0;
    let mut n = x.abs();
    while !n.is_zero() && n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

impl IwasawaElement {
    pub fn zero(p: u64, order: usize) -> Self {
        Self { p, components: vec![vec![BigRational::zero(); order]; (p - 1) as usize] }
    }

    /// The same polynomial in every component, i.e. an element of `Z_p[[Γ_1]]`.
    pub fn from_series(p: u64, series: &[BigRational]) -> Self {
        Self { p, components: vec![series.to_vec(); (p - 1) as usize] }
    }

    pub fn constant(p: u64, c: BigRational, order: usize) -> Self {
        let mut s = vec![BigRational::zero(); order];
        if order > 0 {
            s[0] = c;
        }
        Self::from_series(p, &s)
    }

    pub fn one(p: u64, order: usize) -> Self {
        Self::constant(p, BigRational::one(), order)
    }

    /// `γ_1 = 1 + T`.
    pub fn gamma_one(p: u64, order: usize) -> Self {
        let mut s = vec![BigRational::zero(); order];
        s[0] = BigRational::one();
        if order > 1 {
            s[1] = BigRational::one();
        }
        Self::from_series(p, &s)
    }

    pub fn from_components(p: u64, components: Vec<Vec<BigRational>>) -> Result<Self> {
        if components.len() != (p - 1) as usize {
            return Err(Error::DimensionMismatch(format!(
                "{} components for p = {p}, expected {}",
                components.len(),
                p - 1
            )));
        }
        let order = components[0].len();
        if components.iter().any(|c| c.len() != order) {
            return Err(Error::DimensionMismatch("components of unequal length".into()));
        }
        Ok(Self { p, components })
    }

    pub fn from_i64_components(p: u64, components: &[Vec<i64>]) -> Result<Self> {
        Self::from_components(p, components.iter().map(|c| c.iter().map(|&x| rational(x)).collect()).collect())
    }

    /// `e_i = (p-1)^{-1} Σ_δ ω^{-i}(δ) δ`, the indicator of component `i`.
    pub fn idempotent(p: u64, i: usize, order: usize) -> Self {
        let mut x = Self::zero(p, order);
        if order > 0 {
            x.components[i % (p - 1) as usize][0] = BigRational::one();
        }
        x
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn order(&self) -> usize {
        self.components[0].len()
    }

    pub fn components(&self) -> &[Vec<BigRational>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &[BigRational] {
        &self.components[i % self.components.len()]
    }

    pub fn coeff(&self, i: usize, k: usize) -> &BigRational {
        &self.component(i)[k]
    }

    pub fn set_coeff(&mut self, i: usize, k: usize, value: BigRational) {
        let n = self.components.len();
        self.components[i % n][k] = value;
    }

    pub fn truncate(&self, order: usize) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.resize(order, BigRational::zero());
                c
            })
            .collect();
        Self { p: self.p, components }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Self {
        assert_eq!(self.p, rhs.p, "elements over different primes");
        let order = self.order().min(rhs.order());
        let components = self
            .components
            .iter()
            .zip(&rhs.components)
            .map(|(a, b)| (0..order).map(|k| f(&a[k], &b[k])).collect())
            .collect();
        Self { p: self.p, components }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        let components = self.components.iter().map(|c| c.iter().map(|x| -x).collect()).collect();
        Self { p: self.p, components }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let components = self.components.iter().map(|s| s.iter().map(|x| x * c).collect()).collect();
        Self { p: self.p, components }
    }

    /// Product modulo `T^order`, `order` the smaller of the two.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.p, rhs.p, "elements over different primes");
        let order = self.order().min(rhs.order());
        let components = self.components.iter().zip(&rhs.components).map(|(a, b)| poly_mul(a, b, order)).collect();
        Self { p: self.p, components }
    }

    /// Polynomial product without truncation; the order grows to `m + n - 1`.
    pub fn mul_exact(&self, rhs: &Self) -> Self {
        assert_eq!(self.p, rhs.p, "elements over different primes");
        let len = (self.order() + rhs.order()).saturating_sub(1);
        let components = self.components.iter().zip(&rhs.components).map(|(a, b)| poly_mul(a, b, len)).collect();
        Self { p: self.p, components }
    }

    /// Whether every coefficient is p-integral, i.e. the element lies in `Λ`.
    pub fn is_integral(&self) -> bool {
        self.p_denominator_exponent() == 0
    }

    /// Largest power of `p` dividing a denominator.
    pub fn p_denominator_exponent(&self) -> u64 {
        let p = BigInt::from(self.p);
        self.components
            .iter()
            .flatten()
            .map(|x| p_valuation(x.denom(), &p))
            .max()
            .unwrap_or(0)
    }

    fn twist_series(&self, k: i64, alpha: &BigInt, beta: &BigInt, delta: &BigInt) -> Self {
        let n = self.components.len() as i64;
        let components = (0..n)
            .map(|i| affine_substitute(&self.components[(i + k).rem_euclid(n) as usize], alpha, beta, delta))
            .collect();
        Self { p: self.p, components }
    }

    /// `Tw_1`, induced by `γ ↦ χ(γ)γ`. Since `Tw_1(e_{i+1}) = e_i`, component
    /// `i` of the result is `x_{i+1}(p + (1+p)T)`.
    pub fn twist1(&self) -> Self {
        let p = BigInt::from(self.p);
        self.twist_series(1, &p, &(&p + 1), &BigInt::one())
    }

    /// `Tw_{-1}`: component `i` of the result is `x_{i-1}((T - p)/(1+p))`.
    pub fn twist_inverse(&self) -> Self {
        let p = BigInt::from(self.p);
        self.twist_series(-1, &-&p, &BigInt::one(), &(&p + 1))
    }

    /// Projection to `e_0 Λ/(γ_1 - 1)`: the constant term of component 0.
    pub fn eval_at_zero(&self) -> BigRational {
        self.components[0].first().cloned().unwrap_or_else(BigRational::zero)
    }

    /// Value at the character `χ^k`: component `k mod (p-1)` at `T = (1+p)^k - 1`.
    pub fn eval_at_character(&self, k: i64) -> BigRational {
        let base = rational(1 + self.p as i64);
        let t = base.pow(k as i32) - BigRational::one();
        let n = self.components.len() as i64;
        self.components[k.rem_euclid(n) as usize]
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * &t + c)
    }

    /// Unit of `Λ` iff every component has a p-adic unit constant term.
    pub fn is_lambda_unit(&self) -> Result<bool> {
        if !self.is_integral() {
            return Err(Error::NotIntegral(format!(
                "denominator divisible by p^{}",
                self.p_denominator_exponent()
            )));
        }
        let p = BigInt::from(self.p);
        Ok(self.components.iter().all(|c| {
            c.first().is_some_and(|x| !x.is_zero() && !x.numer().is_multiple_of(&p))
        }))
    }
}

/// `log_p(1+p) = Σ_{k ≥ 1} (-1)^{k+1} p^k / k`, summed until every omitted
/// term has valuation at least `precision`.
pub fn log_one_plus_p(p: u64, precision: u32) -> BigRational {
    let pb = BigInt::from(p);
    let mut total = BigRational::zero();
    let mut power = BigInt::one();
    // `k - floor(log_p k)` bounds v_p(p^k / k) from below and never decreases.
    let mut k: u64 = 1;
    while k - u64::from(k.ilog(p)) < u64::from(precision) {
        power *= &pb;
        let term = BigRational::new(power.clone(), BigInt::from(k));
        total = if k % 2 == 1 { total + term } else { total - term };
        k += 1;
    }
    total
}

/// `ℓ_j = log(1+T)/log_p(1+p) - j`, the same series in every component.
/// `log_p(1+p)` is replaced by its partial sum from [`log_one_plus_p`], so the
/// result is exact for that constant and agrees with `ℓ_j` up to `p^precision`
/// relative error.
pub fn ell(p: u64, j: i64, order: usize, precision: u32) -> Result<IwasawaElement> {
    if order == 0 {
        return Err(Error::InvalidModule("T-truncation order must be at least 1".into()));
    }
    let inv_log = log_one_plus_p(p, precision).recip();
    let series: Vec<BigRational> = (0..order)
        .map(|k| {
            if k == 0 {
                rational(-j)
            } else {
                let sign = if k % 2 == 1 { 1 } else { -1 };
                BigRational::new(BigInt::from(sign), BigInt::from(k)) * &inv_log
            }
        })
        .collect();
    Ok(IwasawaElement::from_series(p, &series))
}

/// Check `Tw_1 δ_V = δ_{V(1)}` and, component by component,
/// `e_i δ_{V(1)} = Tw_1(e_{i+1} δ_V)`.
pub fn delta_twist_consistency(delta_v: &IwasawaElement, delta_v1: &IwasawaElement) -> bool {
    if delta_v.p != delta_v1.p || delta_v.order() != delta_v1.order() {
        return false;
    }
    if delta_v.twist1() != *delta_v1 {
        return false;
    }
    let (p, order) = (delta_v.p, delta_v.order());
    (0..(p - 1) as usize).all(|i| {
        let lhs = IwasawaElement::idempotent(p, i, order).mul(delta_v1);
        let rhs = IwasawaElement::idempotent(p, i + 1, order).mul(delta_v).twist1();
        lhs == rhs
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn idempotent_algebra() {
        let p = 5;
        let sum = (0..4).fold(IwasawaElement::zero(p, 3), |acc, i| acc.add(&IwasawaElement::idempotent(p, i, 3)));
        assert_eq!(sum, IwasawaElement::one(p, 3));
        for i in 0..4 {
            let e = IwasawaElement::idempotent(p, i, 3);
            assert_eq!(e.mul(&e), e);
            for j in 0..4 {
                if i != j {
                    assert_eq!(e.mul(&IwasawaElement::idempotent(p, j, 3)), IwasawaElement::zero(p, 3));
                }
            }
        }
    }

    #[test]
    fn twist_examples() {
        let p = 3;
        assert_eq!(IwasawaElement::one(p, 4).twist1(), IwasawaElement::one(p, 4));
        let g = IwasawaElement::gamma_one(p, 4);
        assert_eq!(g.twist1(), g.scale(&rational(4)));
        let e0 = IwasawaElement::idempotent(p, 0, 4);
        assert_eq!(IwasawaElement::idempotent(p, 1, 4).twist1(), e0);
        let x = IwasawaElement::from_i64_components(p, &[vec![1, 2, 0, 5], vec![3, -1, 7, 0]]).unwrap();
        assert_eq!(x.twist1().twist_inverse(), x);
        assert_eq!(x.twist_inverse().twist1(), x);
    }

    #[test]
    fn eval_examples() {
        let p = 3;
        assert_eq!(IwasawaElement::one(p, 3).eval_at_zero(), BigRational::one());
        let x = IwasawaElement::from_i64_components(p, &[vec![2, 1, 1], vec![5, 0, 1]]).unwrap();
        assert!(IwasawaElement::idempotent(p, 1, 3).mul(&x).eval_at_zero().is_zero());
        // x_1(3) = 5 + 9.
        assert_eq!(x.twist1().eval_at_zero(), rational(14));
        assert_eq!(x.eval_at_character(1), rational(14));
    }

    #[test]
    fn unit_examples() {
        let p = 3;
        let one_plus_pt = IwasawaElement::from_series(p, &[rational(1), rational(3)]);
        assert!(one_plus_pt.is_lambda_unit().unwrap());
        let p_plus_t = IwasawaElement::from_series(p, &[rational(3), rational(1)]);
        assert!(!p_plus_t.is_lambda_unit().unwrap());
        assert!(one_plus_pt.twist1().is_lambda_unit().unwrap());
        let bad = IwasawaElement::from_series(p, &[q(1, 3)]);
        assert!(matches!(bad.is_lambda_unit(), Err(Error::NotIntegral(_))));
    }

    #[test]
    fn ell_examples() {
        let p = 3;
        let l0 = ell(p, 0, 4, 20).unwrap();
        let l2 = ell(p, 2, 4, 20).unwrap();
        assert!(l0.eval_at_zero().is_zero());
        assert_eq!(l2.sub(&l0), IwasawaElement::constant(p, rational(-2), 4));
        let log = log_one_plus_p(p, 20);
        assert_eq!(p_valuation(log.numer(), &BigInt::from(3)), 1);
        assert!(!log.denom().is_multiple_of(&BigInt::from(3)));
        let expected = [rational(0), rational(1), q(-1, 2), q(1, 3)];
        for (k, c) in expected.iter().enumerate() {
            assert_eq!(l0.coeff(0, k), &(c / &log));
        }
    }

    #[test]
    fn delta_consistency_examples() {
        let p = 5;
        let d = IwasawaElement::from_i64_components(p, &[vec![1, 2], vec![3, 4], vec![1, 0], vec![2, 2]]).unwrap();
        assert!(delta_twist_consistency(&d, &d.twist1()));
        let mut off = d.twist1();
        let c = off.coeff(2, 1) + BigRational::from_integer(BigInt::from(5).pow(11));
        off.set_coeff(2, 1, c);
        assert!(!delta_twist_consistency(&d, &off));
    }
}
