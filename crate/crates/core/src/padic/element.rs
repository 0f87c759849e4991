use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::context::PrecisionContext;
use crate::error::{Error, Result};

/// Element of `O_F / p^N`.
#[derive(Clone)]
pub struct OFElement {
    ctx: PrecisionContext,
    coeffs: Vec<u64>,
}

impl OFElement {
    pub(crate) fn from_raw(ctx: &PrecisionContext, coeffs: Vec<u64>) -> Self {
        debug_assert_eq!(coeffs.len(), ctx.degree());
        Self {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    pub fn zero(ctx: &PrecisionContext) -> Self {
        Self::from_raw(ctx, ctx.ring().zero())
    }

    pub fn one(ctx: &PrecisionContext) -> Self {
        Self::from_raw(ctx, ctx.ring().one())
    }

    pub fn from_i64(ctx: &PrecisionContext, x: i64) -> Self {
        Self::from_raw(ctx, ctx.ring().from_i128(x as i128))
    }

    pub fn from_bigint(ctx: &PrecisionContext, x: &BigInt) -> Self {
        let pn = BigInt::from(ctx.modulus_pn());
        let r = x.mod_floor(&pn).to_u64().expect("residue fits in u64");
        let mut coeffs = ctx.ring().zero();
        coeffs[0] = r;
        Self::from_raw(ctx, coeffs)
    }

    /// Element `sum_i c_i X^i` in the polynomial basis of `O_F`.
    pub fn from_coeffs(ctx: &PrecisionContext, coeffs: &[i64]) -> Result<Self> {
        if coeffs.len() != ctx.degree() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients, got {}",
                ctx.degree(),
                coeffs.len()
            )));
        }
        let pn = ctx.modulus_pn() as i128;
        Ok(Self::from_raw(
            ctx,
            coeffs
                .iter()
                .map(|&c| (c as i128).rem_euclid(pn) as u64)
                .collect(),
        ))
    }

    pub fn from_bigint_coeffs(ctx: &PrecisionContext, coeffs: &[BigInt]) -> Result<Self> {
        if coeffs.len() != ctx.degree() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients, got {}",
                ctx.degree(),
                coeffs.len()
            )));
        }
        let pn = BigInt::from(ctx.modulus_pn());
        Ok(Self::from_raw(
            ctx,
            coeffs
                .iter()
                .map(|c| c.mod_floor(&pn).to_u64().unwrap())
                .collect(),
        ))
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    /// Canonical coefficients, each in `[0, p^N)`.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub(crate) fn raw(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.ctx.ring().is_zero(&self.coeffs)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == self.ctx.ring().one()
    }

    /// `v_p` of the element; `None` when it is zero at precision `N`.
    pub fn valuation(&self) -> Option<u32> {
        self.ctx.ring().valuation(&self.coeffs)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.ctx
            .ring()
            .inverse(&self.coeffs)
            .map(|c| Self::from_raw(&self.ctx, c))
            .ok_or_else(|| Error::NotAUnit(format!("{:?}", self)))
    }

    /// Split `x = p^v * u`. The unit `u` is the representative `x / p^v`,
    /// meaningful modulo `p^{N - v}`.
    pub fn split_unit(&self) -> Option<(u32, Self)> {
        let v = self.valuation()?;
        let u = self.ctx.ring().shift_down(&self.coeffs, v);
        Some((v, Self::from_raw(&self.ctx, u)))
    }

    /// `p^k * x`.
    pub fn mul_p_pow(&self, k: u32) -> Self {
        let ring = self.ctx.ring();
        if k >= ring.n {
            return Self::zero(&self.ctx);
        }
        Self::from_raw(&self.ctx, ring.scale(&self.coeffs, ring.p.pow(k)))
    }

    pub fn pow(&self, exp: u64) -> Self {
        Self::from_raw(&self.ctx, self.ctx.ring().pow(&self.coeffs, exp))
    }

    /// The Frobenius lift `sigma`.
    pub fn frobenius(&self) -> Self {
        Self::from_raw(&self.ctx, self.ctx.frobenius_raw(&self.coeffs))
    }

    /// `sigma^{-1} = sigma^{f-1}`.
    pub fn inverse_frobenius(&self) -> Self {
        Self::from_raw(&self.ctx, self.ctx.inverse_frobenius_raw(&self.coeffs))
    }

    /// `sigma^k` for any integer `k`.
    pub fn frobenius_pow(&self, k: i64) -> Self {
        let f = self.ctx.degree() as i64;
        let k = k.rem_euclid(f);
        let mut x = self.clone();
        for _ in 0..k {
            x = x.frobenius();
        }
        x
    }

    /// Reduction modulo `p`, as coefficients in `[0, p)`.
    pub fn residue(&self) -> Vec<u64> {
        self.ctx.ring().residue(&self.coeffs)
    }

    /// Constant coefficient as a signed integer in `(-p^N/2, p^N/2]`.
    pub fn to_signed_i128(&self) -> Option<i128> {
        if self.coeffs[1..].iter().any(|&c| c != 0) {
            return None;
        }
        let pn = self.ctx.modulus_pn() as i128;
        let c = self.coeffs[0] as i128;
        Some(if c > pn / 2 { c - pn } else { c })
    }

    pub fn to_bigints(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }

    pub fn scale_i64(&self, s: i64) -> Self {
        self * &Self::from_i64(&self.ctx, s)
    }

    fn check(&self, other: &Self) {
        assert!(self.ctx.same(&other.ctx), "{}", Error::ContextMismatch);
    }
}

/// Teichmuller representative of `u`: the `(p^f - 1)`-th root of unity congruent to `u` mod `p`.
pub fn teichmuller(ctx: &PrecisionContext, u: &BigInt) -> Result<OFElement> {
    let p = BigInt::from(ctx.p());
    if (u % &p).is_zero() {
        return Err(Error::NotAUnit(format!("{} is divisible by p = {}", u, ctx.p())));
    }
    let x = OFElement::from_bigint(ctx, u);
    Ok(teichmuller_lift(&x))
}

/// Teichmuller representative of a unit of `O_F`, by iterating `x -> x^{p^f}`.
pub fn teichmuller_lift(x: &OFElement) -> OFElement {
    let ctx = x.ctx();
    let q = ctx.p().pow(ctx.degree() as u32);
    let mut y = x.clone();
    for _ in 0..ctx.precision() {
        let next = if ctx.degree() == 1 {
            y.pow(q)
        } else {
            // (p^f)-th power as f successive p-th powers
            let mut z = y.clone();
            for _ in 0..ctx.degree() {
                z = z.pow(ctx.p());
            }
            z
        };
        if next == y {
            break;
        }
        y = next;
    }
    y
}

impl PartialEq for OFElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx) && self.coeffs == other.coeffs
    }
}

impl Eq for OFElement {}

impl fmt::Debug for OFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() == 1 {
            write!(f, "{}", self.coeffs[0])
        } else {
            write!(f, "{:?}", self.coeffs)
        }
    }
}

impl fmt::Display for OFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<'a> Add<&'a OFElement> for &'a OFElement {
    type Output = OFElement;
    fn add(self, rhs: &OFElement) -> OFElement {
        self.check(rhs);
        OFElement::from_raw(&self.ctx, self.ctx.ring().add(&self.coeffs, &rhs.coeffs))
    }
}

impl<'a> Sub<&'a OFElement> for &'a OFElement {
    type Output = OFElement;
    fn sub(self, rhs: &OFElement) -> OFElement {
        self.check(rhs);
        OFElement::from_raw(&self.ctx, self.ctx.ring().sub(&self.coeffs, &rhs.coeffs))
    }
}

impl<'a> Mul<&'a OFElement> for &'a OFElement {
    type Output = OFElement;
    fn mul(self, rhs: &OFElement) -> OFElement {
        self.check(rhs);
        OFElement::from_raw(&self.ctx, self.ctx.ring().mul(&self.coeffs, &rhs.coeffs))
    }
}

impl Neg for &OFElement {
    type Output = OFElement;
    fn neg(self) -> OFElement {
        OFElement::from_raw(&self.ctx, self.ctx.ring().neg(&self.coeffs))
    }
}

macro_rules! forward_owned {
    ($Op:ident, $op:ident) => {
        impl $Op<OFElement> for OFElement {
            type Output = OFElement;
            fn $op(self, rhs: OFElement) -> OFElement {
                (&self).$op(&rhs)
            }
        }
        impl<'a> $Op<&'a OFElement> for OFElement {
            type Output = OFElement;
            fn $op(self, rhs: &OFElement) -> OFElement {
                (&self).$op(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for OFElement {
    type Output = OFElement;
    fn neg(self) -> OFElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
        let mut r = 1u64;
        b %= m;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % m;
            }
            b = b * b % m;
            e >>= 1;
        }
        r
    }

    #[test]
    fn frobenius_trivial_over_qp() {
        let ctx = PrecisionContext::unramified_base(3, 4).unwrap();
        let x = OFElement::from_i64(&ctx, 7);
        assert_eq!(x.frobenius(), x);
    }

    #[test]
    fn frobenius_lifts_pth_power() {
        let ctx = PrecisionContext::new(3, 2, 6).unwrap();
        let x = OFElement::from_coeffs(&ctx, &[0, 1]).unwrap();
        let diff = &x.frobenius() - &x.pow(3);
        assert!(diff.valuation().map_or(true, |v| v >= 1));
        assert_eq!(x.frobenius().frobenius(), x);
        assert_eq!(x.frobenius().inverse_frobenius(), x);
    }

    #[test]
    fn teichmuller_small_cases() {
        let ctx = PrecisionContext::unramified_base(3, 4).unwrap();
        let t = teichmuller(&ctx, &BigInt::from(2)).unwrap();
        assert_eq!(t.coeffs(), &[80]);

        let ctx = PrecisionContext::unramified_base(5, 3).unwrap();
        assert!(teichmuller(&ctx, &BigInt::from(1)).unwrap().is_one());

        // independent oracle: iterate x -> x^5 on plain integers mod 5^4
        let ctx = PrecisionContext::unramified_base(5, 4).unwrap();
        let mut x = 2u64;
        for _ in 0..8 {
            x = int_pow_mod(x, 5, 625);
        }
        assert_eq!(x, 182);
        let t = teichmuller(&ctx, &BigInt::from(2)).unwrap();
        assert_eq!(t.coeffs(), &[182]);
        assert!(t.pow(4).is_one());

        assert!(matches!(
            teichmuller(&ctx, &BigInt::from(10)),
            Err(Error::NotAUnit(_))
        ));
    }

    #[test]
    fn teichmuller_unramified_extension() {
        let ctx = PrecisionContext::new(5, 2, 5).unwrap();
        let x = OFElement::from_coeffs(&ctx, &[2, 3]).unwrap();
        let t = teichmuller_lift(&x);
        assert!(t.pow(24).is_one());
        assert_eq!(t.residue(), x.residue());
        assert_eq!(t.frobenius(), t.pow(5));
    }

    #[test]
    fn inverse_and_split_unit() {
        let ctx = PrecisionContext::new(7, 3, 5).unwrap();
        let u = OFElement::from_coeffs(&ctx, &[3, 1, 4]).unwrap();
        assert!((&u * &u.inverse().unwrap()).is_one());
        let x = u.mul_p_pow(2);
        let (v, w) = x.split_unit().unwrap();
        assert_eq!(v, 2);
        assert_eq!(w.mul_p_pow(2), x);
        assert!(matches!(x.inverse(), Err(Error::NotAUnit(_))));
    }
}
