//! Raw coefficient arithmetic for `O_F / p^N = (Z / p^N)[X] / (m(X))`.
//!
//! Elements are little-endian coefficient vectors of length `f`, every
//! coefficient in `[0, p^N)`. The modulus `m` is monic of degree `f`.
//! Products are accumulated unreduced in `u128`; with `p^N < 2^57` a sum of
//! up to `2^14` products cannot overflow.

/// Largest admissible `p^N` (exclusive).
pub(crate) const MODULUS_LIMIT: u64 = 1 << 57;
/// Number of unreduced products that may be summed into one `u128`.
pub(crate) const ACCUMULATION_LIMIT: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawRing {
    pub p: u64,
    pub f: usize,
    pub n: u32,
    pub pn: u64,
    /// Low coefficients `m_0 .. m_{f-1}` of the monic modulus.
    pub modulus: Vec<u64>,
}

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub(crate) fn addmod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub(crate) fn submod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

pub(crate) fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// `v_p(x)` for a nonzero integer.
pub(crate) fn vp_u64(mut x: u64, p: u64) -> u32 {
    debug_assert!(x != 0);
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

impl RawRing {
    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.f]
    }

    pub fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = 1 % self.pn;
        v
    }

    pub fn from_i128(&self, x: i128) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = x.rem_euclid(self.pn as i128) as u64;
        v
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| addmod(x, y, self.pn)).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| submod(x, y, self.pn)).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| submod(0, x, self.pn)).collect()
    }

    pub fn scale(&self, a: &[u64], s: u64) -> Vec<u64> {
        a.iter().map(|&x| mulmod(x, s, self.pn)).collect()
    }

    /// Accumulate the unreduced product `a * b` into `acc` (length `2f - 1`).
    #[inline]
    pub fn mul_acc(&self, acc: &mut [u128], a: &[u64], b: &[u64]) {
        if self.f == 1 {
            acc[0] += a[0] as u128 * b[0] as u128;
            return;
        }
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                acc[i + j] += x as u128 * y as u128;
            }
        }
    }

    /// Reduce an accumulator of length `2f - 1` to a canonical element.
    pub fn reduce_wide(&self, acc: &[u128]) -> Vec<u64> {
        let pn = self.pn as u128;
        let mut r: Vec<u64> = acc.iter().map(|&x| (x % pn) as u64).collect();
        let f = self.f;
        for k in (f..r.len()).rev() {
            let c = r[k];
            if c == 0 {
                continue;
            }
            r[k] = 0;
            for j in 0..f {
                let t = mulmod(c, self.modulus[j], self.pn);
                r[k - f + j] = submod(r[k - f + j], t, self.pn);
            }
        }
        r.truncate(f);
        r
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if self.f == 1 {
            return vec![mulmod(a[0], b[0], self.pn)];
        }
        let mut acc = vec![0u128; 2 * self.f - 1];
        self.mul_acc(&mut acc, a, b);
        self.reduce_wide(&acc)
    }

    pub fn pow(&self, a: &[u64], mut exp: u64) -> Vec<u64> {
        let mut acc = self.one();
        let mut base = a.to_vec();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// Minimum p-adic valuation of the coefficients; `None` for zero.
    pub fn valuation(&self, a: &[u64]) -> Option<u32> {
        a.iter()
            .filter(|&&x| x != 0)
            .map(|&x| vp_u64(x, self.p))
            .min()
    }

    /// Divide every coefficient by `p^k` as integers. Caller guarantees divisibility.
    pub fn shift_down(&self, a: &[u64], k: u32) -> Vec<u64> {
        let pk = self.p.pow(k);
        a.iter()
            .map(|&x| {
                debug_assert!(x % pk == 0);
                x / pk
            })
            .collect()
    }

    pub fn residue(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| x % self.p).collect()
    }

    /// The residue field `F_{p^f}` attached to this ring.
    pub fn residue_field(&self) -> ResidueField {
        ResidueField {
            p: self.p,
            f: self.f,
            modulus: self.modulus.iter().map(|&x| x % self.p).collect(),
        }
    }

    /// Inverse of a unit, lifted from the residue field by Newton iteration.
    pub fn inverse(&self, a: &[u64]) -> Option<Vec<u64>> {
        let field = self.residue_field();
        let abar = field.inverse(&self.residue(a))?;
        let mut v = abar;
        let two = self.from_i128(2);
        let mut prec = 1u32;
        while prec < self.n {
            let av = self.mul(a, &v);
            v = self.mul(&v, &self.sub(&two, &av));
            prec *= 2;
        }
        Some(v)
    }
}

/// `F_{p^f} = F_p[X] / (m mod p)`; elements are coefficient vectors in `[0, p)`.
#[derive(Debug, Clone)]
pub(crate) struct ResidueField {
    pub p: u64,
    pub f: usize,
    pub modulus: Vec<u64>,
}

impl ResidueField {
    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.f]
    }

    pub fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = 1;
        v
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x + self.p - y) % self.p)
            .collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let f = self.f;
        let mut r = vec![0u64; 2 * f - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x * y) % self.p;
            }
        }
        for k in (f..r.len()).rev() {
            let c = r[k];
            if c == 0 {
                continue;
            }
            r[k] = 0;
            for j in 0..f {
                r[k - f + j] = (r[k - f + j] + self.p - (c * self.modulus[j]) % self.p) % self.p;
            }
        }
        r.truncate(f);
        r
    }

    pub fn pow(&self, a: &[u64], mut exp: u128) -> Vec<u64> {
        let mut acc = self.one();
        let mut base = a.to_vec();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.f as u32)
    }

    pub fn inverse(&self, a: &[u64]) -> Option<Vec<u64>> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.order() - 2))
    }

    /// Absolute Frobenius `x -> x^p`.
    pub fn frobenius(&self, a: &[u64]) -> Vec<u64> {
        self.pow(a, self.p as u128)
    }
}

/// Polynomials over `F_p` as little-endian coefficient vectors without trailing zeros.
pub(crate) mod fp_poly {
    fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv_mod_p(a: u64, p: u64) -> u64 {
        super::powmod(a, p - 2, p)
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let b = trim(b.to_vec());
        let lead_inv = inv_mod_p(*b.last().expect("division by zero polynomial"), p);
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = r.last().copied().unwrap() * lead_inv % p;
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * bi % p) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x * y) % p;
            }
        }
        rem(&r, m, p)
    }

    pub fn powmod(a: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = rem(&[1], m, p);
        let mut base = rem(a, m, p);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mulmod(&acc, &base, m, p);
            }
            base = mulmod(&base, &base, m, p);
            exp >>= 1;
        }
        acc
    }

    /// `X^{p^k} mod m`.
    pub fn x_pow_p_pow(k: usize, m: &[u64], p: u64) -> Vec<u64> {
        let mut x = rem(&[0, 1], m, p);
        for _ in 0..k {
            x = powmod(&x, p, m, p);
        }
        x
    }

    fn prime_divisors(mut n: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                out.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    /// Rabin's irreducibility test for a monic polynomial of degree `f`.
    pub fn is_irreducible(m: &[u64], p: u64) -> bool {
        let m = trim(m.to_vec());
        let f = m.len() - 1;
        if f == 0 {
            return false;
        }
        if f == 1 {
            return true;
        }
        let x = vec![0, 1];
        let full = x_pow_p_pow(f, &m, p);
        if trim(full) != rem(&x, &m, p) {
            return false;
        }
        for r in prime_divisors(f) {
            let h = x_pow_p_pow(f / r, &m, p);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            let g = gcd(&m, &diff, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}
