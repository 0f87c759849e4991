//! Strongly divisible filtered φ-modules with Hodge–Tate weights in a window
//! of length at most `p - 1`.
//!
//! A module is stored in an adapted basis `e_1, ..., e_d` with jumps
//! `r_1 <= ... <= r_d` in `[0, p-1]`, so that `Fil^i D` is spanned by the
//! `e_j` with `r_j >= i`, and `φ(e_j) = p^{r_j} sum_k A_jk e_k`. Coordinates
//! are row vectors: `φ(x) = σ(x) Φ` with `Φ = diag(p^{r_j}) A`. The shift `s`
//! records a Tate twist: the represented object has jumps `r_j + s` and
//! Frobenius matrix `p^s Φ`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::padic::{
    inverse_semilinear_stable_rank, semilinear_stable_rank, smith_normal_form, OFElement,
    OFMatrix, PrecisionContext,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilPhiModule {
    ctx: PrecisionContext,
    jumps: Vec<u32>,
    a: OFMatrix,
    shift: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeInvariants {
    /// `h_j`: multiplicity of the jump `j` (after the shift).
    pub h: BTreeMap<i64, usize>,
    pub t_h: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CategoryFlags {
    /// No slope-0 part: the lattice constructor converges.
    pub ab_star: bool,
    /// No part of slope equal to the top jump.
    pub a_star_b: bool,
    pub both: bool,
}

impl FilPhiModule {
    pub fn new(ctx: &PrecisionContext, jumps: Vec<u32>, a: OFMatrix, shift: i64) -> Result<Self> {
        let d = jumps.len();
        if a.rows() != d || a.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{} jumps but matrix is {}x{}",
                d,
                a.rows(),
                a.cols()
            )));
        }
        if !a.ctx().same(ctx) {
            return Err(Error::ContextMismatch);
        }
        if jumps.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidModule("jumps must be sorted ascending".into()));
        }
        let limit = ctx.p() as i64 - 1;
        if let Some(&top) = jumps.last() {
            if top as i64 > limit {
                return Err(Error::WindowOverflow { length: top as i64, limit });
            }
        }
        if !a.is_invertible() {
            return Err(Error::InvalidModule("A is not invertible over O_F".into()));
        }
        Ok(Self { ctx: ctx.clone(), jumps, a, shift })
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.jumps.len()
    }

    pub fn jumps(&self) -> &[u32] {
        &self.jumps
    }

    pub fn a(&self) -> &OFMatrix {
        &self.a
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// Jumps of the represented (twisted) object, `r_j + s`.
    pub fn actual_jumps(&self) -> Vec<i64> {
        self.jumps.iter().map(|&r| r as i64 + self.shift).collect()
    }

    /// Hodge–Tate weights with the convention that `Q_p(1)` has weight 1,
    /// i.e. the negated jumps.
    pub fn hodge_tate_weights(&self) -> Vec<i64> {
        self.actual_jumps().iter().map(|j| -j).collect()
    }

    pub fn top_jump(&self) -> u32 {
        self.jumps.last().copied().unwrap_or(0)
    }

    /// `Φ = diag(p^{r_j}) A` of the normalised presentation.
    pub fn phi_matrix(&self) -> OFMatrix {
        &OFMatrix::p_power_diagonal(&self.ctx, &self.jumps) * &self.a
    }

    pub fn hodge_invariants(&self) -> HodgeInvariants {
        let mut h = BTreeMap::new();
        for j in self.actual_jumps() {
            *h.entry(j).or_insert(0) += 1;
        }
        let t_h = h.iter().map(|(j, n)| j * *n as i64).sum();
        HodgeInvariants { h, t_h }
    }

    /// Stable rank of `Φ mod p`; zero iff there is no slope-0 part.
    pub fn unit_root_rank(&self) -> usize {
        semilinear_stable_rank(&self.phi_matrix())
    }

    /// `p^{r_d} Φ^{-1} = A^{-1} diag(p^{r_d - r_j})`, an integral matrix.
    pub fn top_inverse_matrix(&self) -> OFMatrix {
        let rd = self.top_jump();
        let exps: Vec<u32> = self.jumps.iter().map(|&r| rd - r).collect();
        let a_inv = self.a.inverse().expect("A is invertible");
        &a_inv * &OFMatrix::p_power_diagonal(&self.ctx, &exps)
    }

    /// True iff `Φ` has no slope equal to `r_d`.
    pub fn top_slope_absent(&self) -> bool {
        inverse_semilinear_stable_rank(&self.top_inverse_matrix()) == 0
    }

    pub fn category_membership(&self) -> CategoryFlags {
        let ab_star = self.unit_root_rank() == 0;
        let a_star_b = self.top_slope_absent();
        CategoryFlags { ab_star, a_star_b, both: ab_star && a_star_b }
    }

    /// The module of `V*(k)`: jumps `k - r_{d+1-i}`, Frobenius `p^k (Φ^T)^{-1}`,
    /// written in the reversed dual basis and renormalised.
    pub fn dual_twist(&self, k: i64) -> Result<Self> {
        let d = self.rank();
        let rd = self.top_jump();
        let new_jumps: Vec<u32> = (0..d).map(|i| rd - self.jumps[d - 1 - i]).collect();
        let length = new_jumps.last().copied().unwrap_or(0) as i64 - new_jumps.first().copied().unwrap_or(0) as i64;
        let limit = self.ctx.p() as i64 - 1;
        if length > limit {
            return Err(Error::WindowOverflow { length, limit });
        }
        let inv_t = self.a.inverse()?.transpose();
        let a = OFMatrix::from_fn(&self.ctx, d, d, |i, j| inv_t.get(d - 1 - i, d - 1 - j).clone());
        Self::new(&self.ctx, new_jumps, a, k - self.shift - rd as i64)
    }

    /// Raw presentation in a new basis in which the adapted basis vectors have
    /// coordinates given by the rows of `basis`: `Φ_raw = σ(B)^{-1} Φ B`, and
    /// `Fil^i` is generated by the rows of `B` with jump at least `i`. The
    /// shift is dropped.
    pub fn to_raw(&self, basis: &OFMatrix) -> Result<RawFilPhiModule> {
        let d = self.rank();
        if basis.rows() != d || basis.cols() != d {
            return Err(Error::DimensionMismatch("basis change must be d x d".into()));
        }
        let sigma_b_inv = basis.frobenius().inverse()?;
        let phi = &(&sigma_b_inv * &self.phi_matrix()) * basis;
        let top = self.top_jump() as usize;
        let filtration = (0..=top)
            .map(|i| {
                let rows: Vec<usize> = (0..d).filter(|&j| self.jumps[j] as usize >= i).collect();
                basis.select(&rows, &(0..d).collect::<Vec<_>>())
            })
            .collect();
        RawFilPhiModule::new(&self.ctx, phi, filtration)
    }
}

/// A filtered φ-module in an arbitrary basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawFilPhiModule {
    ctx: PrecisionContext,
    phi: OFMatrix,
    /// `filtration[i]` holds generators (rows) of `Fil^i`, for `0 <= i <= R`;
    /// `Fil^{R+1} = 0`.
    filtration: Vec<OFMatrix>,
}

/// Outcome of the strong divisibility test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongDivisibility {
    pub divisible: bool,
    /// Adapted-basis presentation, present when `divisible` holds.
    pub module: Option<FilPhiModule>,
}

impl RawFilPhiModule {
    pub fn new(ctx: &PrecisionContext, phi: OFMatrix, filtration: Vec<OFMatrix>) -> Result<Self> {
        let d = phi.rows();
        if !phi.is_square() || filtration.iter().any(|g| g.cols() != d) {
            return Err(Error::DimensionMismatch("raw module shapes".into()));
        }
        let limit = ctx.p() as i64 - 1;
        let length = filtration.len() as i64 - 1;
        if length > limit {
            return Err(Error::WindowOverflow { length, limit });
        }
        for w in filtration.windows(2) {
            // Fil^{i+1} inside Fil^i: adding its generators does not change the lattice
            let alone = smith_normal_form(&w[0]).exponents;
            let both = smith_normal_form(&w[0].vstack(&w[1])?).exponents;
            let trim = |e: Vec<Option<u32>>| e.into_iter().flatten().collect::<Vec<_>>();
            if trim(alone) != trim(both) {
                return Err(Error::InvalidModule("filtration is not decreasing".into()));
            }
        }
        Ok(Self { ctx: ctx.clone(), phi, filtration })
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.phi.rows()
    }

    pub fn phi(&self) -> &OFMatrix {
        &self.phi
    }

    pub fn filtration(&self) -> &[OFMatrix] {
        &self.filtration
    }

    /// Generators of `p^R Σ_i p^{-i} φ(Fil^i)`, one row per `σ(g) Φ`.
    pub fn lattice_sum_generators(&self) -> OFMatrix {
        let d = self.rank();
        let top = self.filtration.len().saturating_sub(1) as u32;
        let mut out = OFMatrix::zeros(&self.ctx, 0, d);
        for (i, gens) in self.filtration.iter().enumerate() {
            let images = (&gens.frobenius() * &self.phi).mul_p_pow(top - i as u32);
            out = out.vstack(&images).expect("same width");
        }
        out
    }

    /// Whether `D = Σ_i p^{-i} φ(Fil^i D)`, together with an adapted-basis
    /// presentation when it holds.
    pub fn strong_divisibility_check(&self) -> Result<StrongDivisibility> {
        let d = self.rank();
        let top = self.filtration.len().saturating_sub(1) as u32;
        if top >= self.ctx.precision() {
            return Err(Error::PrecisionLoss(format!(
                "filtration length {} needs precision above p^{}",
                top,
                self.ctx.precision()
            )));
        }
        let snf = smith_normal_form(&self.lattice_sum_generators());
        let divisible = snf.rank() == d && snf.exponents.iter().take(d).all(|&e| e == Some(top));
        if !divisible {
            return Ok(StrongDivisibility { divisible, module: None });
        }
        let module = self.adapted_presentation()?;
        Ok(StrongDivisibility { divisible, module: Some(module) })
    }

    /// Basis of `D` adapted to the filtration, built from the top level down,
    /// and the resulting `(jumps, A)`.
    fn adapted_presentation(&self) -> Result<FilPhiModule> {
        let ctx = &self.ctx;
        let d = self.rank();
        let mut basis = OFMatrix::zeros(ctx, 0, d);
        let mut jumps_desc: Vec<u32> = Vec::new();
        for (level, gens) in self.filtration.iter().enumerate().rev() {
            let level_basis = saturated_basis(gens)?;
            if level_basis.rows() < basis.rows() {
                return Err(Error::InvalidModule("filtration is not decreasing".into()));
            }
            let added = extend_basis(&basis, &level_basis)?;
            jumps_desc.extend(std::iter::repeat(level as u32).take(added.rows()));
            basis = basis.vstack(&added)?;
        }
        if basis.rows() != d {
            return Err(Error::InvalidModule("Fil^0 is not the whole module".into()));
        }
        // ascending jumps
        let order: Vec<usize> = (0..d).rev().collect();
        let all: Vec<usize> = (0..d).collect();
        let e = basis.select(&order, &all);
        let jumps: Vec<u32> = jumps_desc.into_iter().rev().collect();
        let phi_adapted = &(&e.frobenius() * &self.phi) * &e.inverse()?;
        let mut a = OFMatrix::zeros(ctx, d, d);
        for i in 0..d {
            for j in 0..d {
                let x = divide_by_p_pow(phi_adapted.get(i, j), jumps[i]).ok_or_else(|| {
                    Error::InvalidModule("φ(Fil^i) is not divisible by p^i".into())
                })?;
                a.set(i, j, x);
            }
        }
        FilPhiModule::new(ctx, jumps, a, 0)
    }
}

fn divide_by_p_pow(x: &OFElement, k: u32) -> Option<OFElement> {
    if k == 0 {
        return Some(x.clone());
    }
    match x.split_unit() {
        None => Some(OFElement::zero(x.ctx())),
        Some((v, u)) if v >= k => Some(u.mul_p_pow(v - k)),
        Some(_) => None,
    }
}

/// Basis (as rows) of the lattice spanned by `gens`, which must be saturated.
fn saturated_basis(gens: &OFMatrix) -> Result<OFMatrix> {
    let snf = smith_normal_form(gens);
    let n = snf.rank();
    if snf.exponents.iter().flatten().any(|&e| e > 0) {
        return Err(Error::InvalidModule("filtration step is not a direct summand".into()));
    }
    let v_inv = snf.v.inverse()?;
    let cols: Vec<usize> = (0..gens.cols()).collect();
    Ok(v_inv.select(&(0..n).collect::<Vec<_>>(), &cols))
}

/// Rows completing `sub` (a saturated sublattice) to a basis of the lattice
/// with basis `full`.
fn extend_basis(sub: &OFMatrix, full: &OFMatrix) -> Result<OFMatrix> {
    let n = full.rows();
    let cols: Vec<usize> = (0..full.cols()).collect();
    if sub.rows() == 0 {
        return Ok(full.clone());
    }
    // coordinates of sub in terms of full: sub = C full
    let coords = solve_rows(sub, full)?;
    let snf = smith_normal_form(&coords);
    if snf.rank() != sub.rows() || snf.exponents.iter().flatten().any(|&e| e > 0) {
        return Err(Error::InvalidModule("filtration step is not a direct summand".into()));
    }
    let v_inv = snf.v.inverse()?;
    let rest: Vec<usize> = (sub.rows()..n).collect();
    let complement = v_inv.select(&rest, &(0..n).collect::<Vec<_>>());
    Ok((&complement * full).select(&(0..complement.rows()).collect::<Vec<_>>(), &cols))
}

/// `C` with `x = C b`, where the rows of `b` are a basis of a saturated lattice containing those of `x`.
fn solve_rows(x: &OFMatrix, b: &OFMatrix) -> Result<OFMatrix> {
    // b = U^{-1} [I 0] V^{-1}; x V = C U^{-1} [I 0]
    let snf = smith_normal_form(b);
    let n = b.rows();
    if snf.rank() != n || snf.exponents.iter().flatten().any(|&e| e > 0) {
        return Err(Error::InvalidModule("filtration step is not a direct summand".into()));
    }
    let xv = x * &snf.v;
    let cols: Vec<usize> = (0..n).collect();
    let rows: Vec<usize> = (0..x.rows()).collect();
    // the trailing columns of x V must vanish for x to lie in the span
    if (0..x.rows()).any(|i| (n..b.cols()).any(|j| !xv.get(i, j).is_zero())) {
        return Err(Error::InvalidModule("filtration is not decreasing".into()));
    }
    Ok(&xv.select(&rows, &cols) * &snf.u)
}
