//! Wach lattice of a strongly divisible module: the matrices `P` of `φ` and
//! `G_c = Id + π^{p-1} H_c` of `γ_c` on `N = ⊕ A+ e_i`, with
//! `φ(e) = P e`, `γ_c(e) = G_c e` and `γ_c(P) G_c = φ(G_c) P`.
//!
//! `H` is the fixed point of `H = Q + L(H)` where
//! `L(X) = q^{p-1} γ(P^{-1}) φ(X) P` and `γ(P^{-1}) P = Id + π^{p-1} Q`.
//! `P^{-1}` is not integral, so both `Q` and `L` are assembled from the
//! integral factors
//!
//! * `γ(P^{-1}) P = A^{-1} diag(u^{r_i}) A`, `u = qμ / γ(qμ) = (λ/φ(λ)) (μ/γ(μ))`,
//! * `L(X) = A^{-1} (K ∘ φ(X)) A`, `K_ij = w_i (qμ)^{r_j}`,
//!   `w_i = (λ/φ(λ))^{r_i} q^{p-1-r_i} γ(μ)^{-r_i}`,
//!
//! where `λ = γ_c(π)/π` and `∘` is the entrywise product.

use num_bigint::BigInt;

use crate::aplus::{lambda_series, mu_series, q_series, APlusSeries, SeriesMatrix, Substitution};
use crate::error::{Error, Result};
use crate::filmod::FilPhiModule;
use crate::padic::{OFElement, OFMatrix, PrecisionContext};

/// `P = diag((qμ)^{r_i}) A`.
pub fn build_p(module: &FilPhiModule, order: usize) -> SeriesMatrix {
    let ctx = module.ctx();
    let qmu = q_series(ctx, order).mul(&mu_series(ctx, order));
    let diag: Vec<APlusSeries> = module.jumps().iter().map(|&r| qmu.pow(r as u64)).collect();
    SeriesMatrix::diagonal(&diag).right_mul_const(module.a())
}

/// Everything about a module that does not depend on `c`.
#[derive(Debug, Clone)]
pub struct WachBuilder {
    module: FilPhiModule,
    order: usize,
    phi: Substitution,
    p_matrix: SeriesMatrix,
    a_inv: OFMatrix,
    q: APlusSeries,
    mu: APlusSeries,
    qmu: APlusSeries,
}

/// Output of the fixed-point solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HSolution {
    pub h: SeriesMatrix,
    pub iterations: usize,
}

/// The data of the `γ_c`-action on the Wach lattice.
#[derive(Debug, Clone)]
pub struct WachData {
    pub module: FilPhiModule,
    pub c: BigInt,
    /// `π`-adic truncation order of `P` and `G`.
    pub order: usize,
    pub p: SeriesMatrix,
    /// Order `order - (p-1)`.
    pub q: SeriesMatrix,
    /// Order `order - (p-1)`.
    pub h: SeriesMatrix,
    pub g: SeriesMatrix,
    pub iterations: usize,
    /// `min_k (v_p + k)` of `γ(P) G - φ(G) P`; `None` when it vanishes at truncation.
    pub residual_weight: Option<u64>,
    gamma: Substitution,
}

impl WachData {
    pub fn relation_holds(&self) -> bool {
        self.residual_weight.is_none()
    }

    pub fn gamma_substitution(&self) -> &Substitution {
        &self.gamma
    }
}

impl WachBuilder {
    pub fn new(module: &FilPhiModule, order: usize) -> Result<Self> {
        let ctx = module.ctx();
        let p = ctx.p() as usize;
        if order < p {
            return Err(Error::InvalidContext(format!(
                "truncation order {} must exceed p - 1 = {}",
                order,
                p - 1
            )));
        }
        let q = q_series(ctx, order);
        let mu = mu_series(ctx, order);
        let qmu = q.mul(&mu);
        let p_matrix = build_p(module, order);
        Ok(Self {
            module: module.clone(),
            order,
            phi: Substitution::phi(ctx, order),
            p_matrix,
            a_inv: module.a().inverse()?,
            q,
            mu,
            qmu,
        })
    }

    pub fn module(&self) -> &FilPhiModule {
        &self.module
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn ctx(&self) -> &PrecisionContext {
        self.module.ctx()
    }

    fn reduced_order(&self) -> usize {
        self.order - (self.ctx().p() as usize - 1)
    }

    pub fn p_matrix(&self) -> &SeriesMatrix {
        &self.p_matrix
    }

    pub fn gamma(&self, c: &BigInt) -> Result<Substitution> {
        Substitution::gamma(self.ctx(), self.order, c)
    }

    /// `λ/φ(λ) = q / γ(q)`.
    fn q_ratio(&self, c: &BigInt) -> Result<APlusSeries> {
        let lam = lambda_series(self.ctx(), c, self.order);
        Ok(lam.mul(&self.phi.apply(&lam).invert()?))
    }

    /// `Q = (γ(P^{-1}) P - Id) / π^{p-1}`.
    pub fn compute_q(&self, c: &BigInt, gamma: &Substitution) -> Result<SeriesMatrix> {
        let ctx = self.ctx();
        let d = self.module.rank();
        let gamma_mu = gamma.apply(&self.mu);
        let u = self.q_ratio(c)?.mul(&self.mu).mul(&gamma_mu.invert()?);
        let diag: Vec<APlusSeries> = self.module.jumps().iter().map(|&r| u.pow(r as u64)).collect();
        let conj = SeriesMatrix::diagonal(&diag)
            .left_mul_const(&self.a_inv)
            .right_mul_const(self.module.a());
        let k = ctx.p() as usize - 1;
        conj.sub(&SeriesMatrix::identity(ctx, d, self.order))
            .exact_div_pi(k)
            .map_err(|e| match e {
                Error::ExactDivisionFailure { index, .. } => Error::CongruenceFailure(format!(
                    "γ(P^-1)P - Id has a nonzero coefficient of π^{} below π^{}",
                    index, k
                )),
                other => other,
            })
    }

    /// `K_ij = w_i (qμ)^{r_j}` at the reduced order.
    fn kernel(&self, c: &BigInt, gamma: &Substitution) -> Result<SeriesMatrix> {
        let p = self.ctx().p();
        let m = self.reduced_order();
        let ratio = self.q_ratio(c)?.truncate(m);
        let gamma_mu_inv = gamma.apply(&self.mu).invert()?.truncate(m);
        let q = self.q.truncate(m);
        let qmu = self.qmu.truncate(m);
        let jumps = self.module.jumps();
        let w: Vec<APlusSeries> = jumps
            .iter()
            .map(|&r| {
                let r = r as u64;
                ratio.pow(r).mul(&q.pow(p - 1 - r)).mul(&gamma_mu_inv.pow(r))
            })
            .collect();
        let s: Vec<APlusSeries> = jumps.iter().map(|&r| qmu.pow(r as u64)).collect();
        Ok(SeriesMatrix::from_fn(jumps.len(), jumps.len(), |i, j| w[i].mul(&s[j])))
    }

    fn apply_l(&self, kernel: &SeriesMatrix, x: &SeriesMatrix) -> SeriesMatrix {
        self.phi
            .apply_matrix(x)
            .hadamard(kernel)
            .left_mul_const(&self.a_inv)
            .right_mul_const(self.module.a())
    }

    /// Solve `H - L(H) = Q` by iterating `H <- Q + L(H)` from `start` (zero by
    /// default) until the iterate is stationary at truncation.
    pub fn solve_h(&self, c: &BigInt, start: Option<&SeriesMatrix>) -> Result<HSolution> {
        let gamma = self.gamma(c)?;
        let q = self.compute_q(c, &gamma)?;
        self.iterate(c, &gamma, &q, start)
    }

    fn iterate(
        &self,
        c: &BigInt,
        gamma: &Substitution,
        q: &SeriesMatrix,
        start: Option<&SeriesMatrix>,
    ) -> Result<HSolution> {
        let ctx = self.ctx();
        let d = self.module.rank();
        let m = self.reduced_order();
        let kernel = self.kernel(c, gamma)?;
        let window = (d * ctx.degree() * ctx.precision() as usize).max(1);
        let mut h = match start {
            Some(s) => s.truncate(m),
            None => SeriesMatrix::zeros(ctx, d, d, m),
        };
        let mut best: Option<u64> = None;
        let mut stall = 0usize;
        let mut iterations = 0usize;
        loop {
            let next = q.add(&self.apply_l(&kernel, &h));
            iterations += 1;
            let diff = next.sub(&h);
            h = next;
            let Some(w) = diff.weight() else {
                return Ok(HSolution { h, iterations });
            };
            if best.map_or(true, |b| w > b) {
                best = Some(w);
                stall = 0;
            } else {
                stall += 1;
                if stall >= window {
                    return Err(Error::NonConvergence { iterations, valuation: best.unwrap_or(0) });
                }
            }
        }
    }

    /// Assemble `G = Id + π^{p-1} H` and check `γ(P) G = φ(G) P`.
    pub fn gamma_matrix(&self, c: &BigInt) -> Result<WachData> {
        self.gamma_matrix_from(c, None)
    }

    pub fn gamma_matrix_from(&self, c: &BigInt, start: Option<&SeriesMatrix>) -> Result<WachData> {
        let ctx = self.ctx();
        let d = self.module.rank();
        let k = ctx.p() as usize - 1;
        let gamma = self.gamma(c)?;
        let q = self.compute_q(c, &gamma)?;
        let sol = self.iterate(c, &gamma, &q, start)?;
        let widened = SeriesMatrix::from_fn(d, d, |i, j| {
            let mut s = APlusSeries::zero(ctx, self.order);
            for (t, x) in sol.h.get(i, j).coeffs().iter().enumerate() {
                s.set_coeff(t + k, x);
            }
            s
        });
        let g = SeriesMatrix::identity(ctx, d, self.order).add(&widened);
        let lhs = gamma.apply_matrix(&self.p_matrix).mul(&g);
        let rhs = self.phi.apply_matrix(&g).mul(&self.p_matrix);
        let residual_weight = lhs.sub(&rhs).weight();
        Ok(WachData {
            module: self.module.clone(),
            c: c.clone(),
            order: self.order,
            p: self.p_matrix.clone(),
            q,
            h: sol.h,
            g,
            iterations: sol.iterations,
            residual_weight,
            gamma,
        })
    }

    /// `G_{c1 c2} = γ_{c2}(G_{c1}) G_{c2}` at truncation.
    pub fn check_cocycle(&self, c1: &BigInt, c2: &BigInt) -> Result<bool> {
        let w1 = self.gamma_matrix(c1)?;
        let w2 = self.gamma_matrix(c2)?;
        let w12 = self.gamma_matrix(&(c1 * c2))?;
        let composed = w2.gamma.apply_matrix(&w1.g).mul(&w2.g);
        Ok(composed == w12.g)
    }
}

/// `q^{r_d} P^{-1} = A^{-1} diag(q^{r_d - r_i} μ^{-r_i})` is integral; the check
/// verifies that this integral matrix really inverts `P` up to `q^{r_d}`.
pub fn check_q_cokernel(w: &WachData) -> Result<bool> {
    let module = &w.module;
    let ctx = module.ctx();
    let d = module.rank();
    let rd = module.top_jump() as u64;
    let q = q_series(ctx, w.order);
    let mu_inv = mu_series(ctx, w.order).invert()?;
    let diag: Vec<APlusSeries> = module
        .jumps()
        .iter()
        .map(|&r| q.pow(rd - r as u64).mul(&mu_inv.pow(r as u64)))
        .collect();
    let c = SeriesMatrix::diagonal(&diag).left_mul_const(&module.a().inverse()?);
    let expected = SeriesMatrix::identity(ctx, d, w.order).scale(&q.pow(rd));
    Ok(c.mul(&w.p) == expected && w.p.mul(&c) == expected)
}

/// Matrix of `T_i(γ) = Π_{k=1}^{i-1} (1 - c^{-k} γ)` on the basis of `N`,
/// with the scalar it reduces to modulo `π`.
#[derive(Debug, Clone)]
pub struct TiAction {
    pub matrix: SeriesMatrix,
    pub scalar: OFElement,
    pub scalar_valuation: Option<u32>,
}

pub fn apply_ti(w: &WachData, i: u32) -> Result<TiAction> {
    let ctx = w.module.ctx();
    let p = ctx.p() as u32;
    if i < 1 || i > p - 1 {
        return Err(Error::InvalidModule(format!("T_i needs 1 <= i <= p-1, got {}", i)));
    }
    let d = w.module.rank();
    let c_inv = OFElement::from_bigint(ctx, &w.c).inverse()?;
    // coefficients of Π (1 - c^{-k} X), low degree first
    let mut poly = vec![OFElement::one(ctx)];
    for k in 1..i {
        let a = c_inv.pow(k as u64);
        let mut next = vec![OFElement::zero(ctx); poly.len() + 1];
        for (n, coef) in poly.iter().enumerate() {
            next[n] = &next[n] + coef;
            next[n + 1] = &next[n + 1] - &(coef * &a);
        }
        poly = next;
    }
    let mut power = SeriesMatrix::identity(ctx, d, w.order);
    let mut matrix = SeriesMatrix::zeros(ctx, d, d, w.order);
    for (n, coef) in poly.iter().enumerate() {
        if n > 0 {
            power = w.gamma.apply_matrix(&power).mul(&w.g);
        }
        matrix = matrix.add(&power.map(|s| s.scale(coef)));
    }
    let scalar = poly.iter().fold(OFElement::zero(ctx), |acc, x| &acc + x);
    Ok(TiAction { matrix, scalar_valuation: scalar.valuation(), scalar })
}
