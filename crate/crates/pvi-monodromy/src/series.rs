//! Truncated power-series engine: branch generation for the Painlevé VI
//! transcendents holomorphic at x = 0, the explicit matrix family Ω(x)
//! attached to a transcendent, and the residual checks (PVI, isomonodromy
//! ODE, eigenvalue conservation, quadrature consistency) that validate it.

use thiserror::Error;

use crate::classify::{BranchFamily, BranchSpec, BranchVariant};
use crate::util::{as_int, c, cr, C64, CMat3};

/// Relative threshold below which a leading coefficient counts as zero
/// when normalizing a series (pole/zero order detection).
const STRIP_TOL: f64 = 1e-9;
/// Tolerance for recognizing an exponent difference as an integer.
const RHO_INT_TOL: f64 = 1e-8;
/// Relative tolerance for resonance detection in the branch recurrence.
const RESONANCE_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("series division by an identically vanishing divisor")]
    DivisionByZero,
    #[error("nonvanishing x^-1 coefficient ({coeff:.3e}) blocks term-wise integration")]
    NonIntegrableResidue { coeff: f64 },
    #[error("leading exponent shift by {shift} blocked: coefficient {index} has relative size {magnitude:.3e}")]
    LeadingExponentMismatch { shift: i64, index: usize, magnitude: f64 },
    #[error("theta_inf must avoid 0 and ±(θ1+θ2+θ3) (distinct eigenvalues)")]
    DegenerateEigenvalues,
    #[error("branch data inconsistent with the theta parameters: {0}")]
    BadBranch(String),
    #[error("resonance at order {order} not resolved by the free parameter (|λ|={lambda:.3e}, |rhs|={rhs:.3e})")]
    UnresolvedResonance { order: usize, lambda: f64, rhs: f64 },
    #[error("quadrature integrand has a pole of order {order} > 1")]
    NonIntegrableQuadrature { order: i64 },
    #[error("recovery of y degenerate: numerator and denominator both vanish")]
    DegenerateRecovery,
}

/// The four parameters (θ₁, θ₂, θ₃, θ∞) of PVI in the convention
/// 2β = −θ₁², 2δ = 1 − θ₂², 2γ = θ₃², 2α = (θ∞ − 1)².
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaParams {
    pub theta1: C64,
    pub theta2: C64,
    pub theta3: C64,
    pub theta_inf: C64,
}

impl ThetaParams {
    /// Requires θ∞ ∉ {0, ±(θ₁+θ₂+θ₃)} so that the eigenvalues
    /// (0, μ₁, μ₃) of the associated matrix family are pairwise distinct.
    pub fn new(theta1: C64, theta2: C64, theta3: C64, theta_inf: C64) -> Result<Self, SeriesError> {
        let s = theta1 + theta2 + theta3;
        if theta_inf.norm() < 1e-12
            || (theta_inf - s).norm() < 1e-12
            || (theta_inf + s).norm() < 1e-12
        {
            return Err(SeriesError::DegenerateEigenvalues);
        }
        Ok(ThetaParams { theta1, theta2, theta3, theta_inf })
    }

    pub fn real(t1: f64, t2: f64, t3: f64, tinf: f64) -> Result<Self, SeriesError> {
        Self::new(cr(t1), cr(t2), cr(t3), cr(tinf))
    }

    pub fn mu1(&self) -> C64 {
        (self.theta_inf - self.theta1 - self.theta2 - self.theta3) / 2.0
    }

    pub fn mu3(&self) -> C64 {
        (-self.theta_inf - self.theta1 - self.theta2 - self.theta3) / 2.0
    }

    /// θ_k for k = 1, 2, 3.
    pub fn theta(&self, k: usize) -> C64 {
        match k {
            1 => self.theta1,
            2 => self.theta2,
            3 => self.theta3,
            _ => panic!("theta index {k} out of range"),
        }
    }

    /// PVI coefficients (α, β, γ, δ).
    pub fn pvi_coeffs(&self) -> (C64, C64, C64, C64) {
        let one = cr(1.0);
        (
            (self.theta_inf - one) * (self.theta_inf - one) / 2.0,
            -self.theta1 * self.theta1 / 2.0,
            self.theta3 * self.theta3 / 2.0,
            (one - self.theta2 * self.theta2) / 2.0,
        )
    }
}

/// A truncated series x^ρ · (c₀ + c₁ x + … + c_K x^K) with complex leading
/// exponent ρ. Coefficients beyond index K are unknown, not zero; binary
/// operations truncate to the honestly known range.
#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    pub rho: C64,
    pub coeffs: Vec<C64>,
}

impl TruncatedSeries {
    pub fn new(rho: C64, coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        TruncatedSeries { rho, coeffs }
    }

    pub fn taylor(coeffs: Vec<C64>) -> Self {
        Self::new(cr(0.0), coeffs)
    }

    pub fn constant(v: C64, k: usize) -> Self {
        let mut coeffs = vec![cr(0.0); k + 1];
        coeffs[0] = v;
        Self::taylor(coeffs)
    }

    pub fn zero(k: usize) -> Self {
        Self::taylor(vec![cr(0.0); k + 1])
    }

    /// The identity series x (as a Taylor series of length k+1).
    pub fn var(k: usize) -> Self {
        let mut coeffs = vec![cr(0.0); k + 1];
        if k >= 1 {
            coeffs[1] = cr(1.0);
        }
        Self::taylor(coeffs)
    }

    /// Highest known coefficient index K.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| z.norm() == 0.0)
    }

    pub fn truncated(&self, k: usize) -> Self {
        let n = usize::min(k + 1, self.coeffs.len());
        Self::new(self.rho, self.coeffs[..n].to_vec())
    }

    /// Index of the first coefficient exceeding STRIP_TOL relative to the
    /// largest coefficient; None for the (numerically) zero series.
    pub fn lowest_nonzero(&self) -> Option<usize> {
        let scale = self.max_abs();
        if scale == 0.0 {
            return None;
        }
        self.coeffs.iter().position(|z| z.norm() > STRIP_TOL * scale)
    }

    /// Strips numerically vanishing leading coefficients into the exponent.
    pub fn normalized(&self) -> Self {
        match self.lowest_nonzero() {
            None | Some(0) => self.clone(),
            Some(m) => Self::new(self.rho + cr(m as f64), self.coeffs[m..].to_vec()),
        }
    }

    /// Rewrites the series with the prescribed leading exponent, shifting
    /// coefficients; fails when a demanded-leading-zero slot is not zero.
    pub fn with_leading_exponent(&self, target: C64) -> Result<Self, SeriesError> {
        let delta = target - self.rho;
        let shift = as_int(delta, RHO_INT_TOL).unwrap_or_else(|| {
            panic!("exponent shift {delta} is not an integer")
        });
        if shift == 0 {
            return Ok(Self::new(target, self.coeffs.clone()));
        }
        if shift > 0 {
            let m = shift as usize;
            let scale = self.max_abs().max(1e-300);
            for i in 0..usize::min(m, self.coeffs.len()) {
                let rel = self.coeffs[i].norm() / scale;
                if rel > STRIP_TOL {
                    return Err(SeriesError::LeadingExponentMismatch {
                        shift,
                        index: i,
                        magnitude: rel,
                    });
                }
            }
            if m >= self.coeffs.len() {
                return Ok(Self::new(target, vec![cr(0.0)]));
            }
            Ok(Self::new(target, self.coeffs[m..].to_vec()))
        } else {
            let m = (-shift) as usize;
            let mut coeffs = vec![cr(0.0); m];
            coeffs.extend_from_slice(&self.coeffs);
            Ok(Self::new(target, coeffs))
        }
    }

    /// Multiplies by x^m without touching coefficients.
    pub fn mul_xpow(&self, m: i64) -> Self {
        Self::new(self.rho + cr(m as f64), self.coeffs.clone())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.rho, self.coeffs.iter().map(|z| -z).collect())
    }

    pub fn scale(&self, a: C64) -> Self {
        Self::new(self.rho, self.coeffs.iter().map(|z| z * a).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let delta = other.rho - self.rho;
        let shift = as_int(delta, RHO_INT_TOL)
            .unwrap_or_else(|| panic!("adding series with exponents differing by {delta}"));
        let (lo, hi, m) = if shift >= 0 {
            (self, other, shift as usize)
        } else {
            (other, self, (-shift) as usize)
        };
        // hi starts m slots above lo's leading exponent
        let known = usize::min(lo.coeffs.len(), m + hi.coeffs.len());
        let mut coeffs = lo.coeffs[..known].to_vec();
        for (i, v) in hi.coeffs.iter().enumerate() {
            let idx = i + m;
            if idx < known {
                coeffs[idx] += v;
            }
        }
        Self::new(lo.rho, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            let k = usize::min(self.coeffs.len(), other.coeffs.len());
            return Self::new(self.rho + other.rho, vec![cr(0.0); k]);
        }
        let n = usize::min(self.coeffs.len(), other.coeffs.len());
        let mut coeffs = vec![cr(0.0); n];
        for i in 0..n {
            for j in 0..=i {
                coeffs[i] += self.coeffs[j] * other.coeffs[i - j];
            }
        }
        Self::new(self.rho + other.rho, coeffs)
    }

    /// Divides after normalizing both operands, so pole/zero orders are
    /// resolved automatically into the exponent.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        let b = other.normalized();
        if b.is_zero() {
            return Err(SeriesError::DivisionByZero);
        }
        let a = self.normalized();
        if a.is_zero() {
            return Ok(Self::new(a.rho - b.rho, vec![cr(0.0); a.coeffs.len()]));
        }
        let n = usize::min(a.coeffs.len(), b.coeffs.len());
        let mut q = vec![cr(0.0); n];
        let b0 = b.coeffs[0];
        for i in 0..n {
            let mut s = a.coeffs[i];
            for j in 0..i {
                s -= q[j] * b.coeffs[i - j];
            }
            q[i] = s / b0;
        }
        Ok(Self::new(a.rho - b.rho, q))
    }

    /// d/dx of x^ρ Σ cₙ xⁿ  =  x^{ρ−1} Σ (ρ+n) cₙ xⁿ.
    pub fn diff(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, z)| (self.rho + cr(n as f64)) * z)
            .collect();
        Self::new(self.rho - cr(1.0), coeffs)
    }

    /// Differentiation specialized to Taylor input; shortens by one term.
    pub fn diff_taylor(&self) -> Self {
        assert!(as_int(self.rho, RHO_INT_TOL) == Some(0), "diff_taylor needs ρ = 0");
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        let coeffs = (1..self.coeffs.len())
            .map(|n| cr(n as f64) * self.coeffs[n])
            .collect();
        Self::taylor(coeffs)
    }

    /// Term-wise antiderivative with zero integration constant; errors when
    /// a slot at total exponent −1 carries a nonvanishing coefficient.
    pub fn integrate(&self) -> Result<Self, SeriesError> {
        let scale = self.max_abs().max(1e-300);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (n, z) in self.coeffs.iter().enumerate() {
            let e = self.rho + cr(n as f64) + cr(1.0);
            if e.norm() < RHO_INT_TOL {
                if z.norm() > STRIP_TOL * scale {
                    return Err(SeriesError::NonIntegrableResidue { coeff: z.norm() });
                }
                coeffs.push(cr(0.0));
            } else {
                coeffs.push(z / e);
            }
        }
        Ok(Self::new(self.rho + cr(1.0), coeffs))
    }

    /// exp of a Taylor series (ρ must be 0).
    pub fn exp(&self) -> Self {
        assert!(as_int(self.rho, RHO_INT_TOL) == Some(0), "exp needs ρ = 0");
        let n = self.coeffs.len();
        let head = self.coeffs[0].exp();
        let mut e = vec![cr(0.0); n];
        e[0] = cr(1.0);
        for k in 1..n {
            let mut s = cr(0.0);
            for j in 1..=k {
                s += cr(j as f64) * self.coeffs[j] * e[k - j];
            }
            e[k] = s / cr(k as f64);
        }
        Self::taylor(e.into_iter().map(|z| z * head).collect())
    }

    /// Principal log of a Taylor series with nonzero constant term.
    pub fn log(&self) -> Result<Self, SeriesError> {
        assert!(as_int(self.rho, RHO_INT_TOL) == Some(0), "log needs ρ = 0");
        let s0 = self.coeffs[0];
        if s0.norm() == 0.0 {
            return Err(SeriesError::DivisionByZero);
        }
        let n = self.coeffs.len();
        let mut l = vec![cr(0.0); n];
        l[0] = s0.ln();
        for k in 1..n {
            let mut s = cr(k as f64) * self.coeffs[k];
            for j in 1..k {
                s -= cr(j as f64) * l[j] * self.coeffs[k - j];
            }
            l[k] = s / (cr(k as f64) * s0);
        }
        Ok(Self::taylor(l))
    }

    /// Principal power (x^ρ T(x))^α = x^{ρα} exp(α log T).
    pub fn powc(&self, alpha: C64) -> Result<Self, SeriesError> {
        let t = Self::taylor(self.coeffs.clone());
        let l = t.log()?;
        let mut out = l.scale(alpha).exp();
        out.rho = self.rho * alpha;
        Ok(out)
    }

    pub fn sqrt(&self) -> Result<Self, SeriesError> {
        self.powc(cr(0.5))
    }

    /// Composition self ∘ inner for Taylor self and inner with inner(0)=0.
    pub fn compose(&self, inner: &Self) -> Self {
        assert!(as_int(self.rho, RHO_INT_TOL) == Some(0), "compose needs outer ρ = 0");
        assert!(as_int(inner.rho, RHO_INT_TOL) == Some(0), "compose needs inner ρ = 0");
        let scale = inner.max_abs().max(1e-300);
        assert!(
            inner.coeffs[0].norm() <= STRIP_TOL * scale,
            "compose needs inner(0) = 0"
        );
        let n = usize::min(self.coeffs.len(), inner.coeffs.len());
        let mut acc = Self::constant(self.coeffs[n - 1], n - 1);
        for k in (0..n - 1).rev() {
            acc = acc.mul(&inner.truncated(n - 1));
            acc.coeffs[0] += self.coeffs[k];
        }
        acc
    }

    /// Horner evaluation of x^ρ Σ cₙ xⁿ (principal branch of x^ρ).
    pub fn eval(&self, x: C64) -> C64 {
        let mut acc = cr(0.0);
        for z in self.coeffs.iter().rev() {
            acc = acc * x + z;
        }
        if self.rho.norm() == 0.0 {
            return acc;
        }
        if x.norm() == 0.0 {
            return match as_int(self.rho, RHO_INT_TOL) {
                Some(0) => acc,
                Some(m) if m > 0 => cr(0.0),
                _ => c(f64::INFINITY, 0.0),
            };
        }
        acc * (self.rho * x.ln()).exp()
    }

    /// Value at x = 0; requires a nonnegative-integer exponent.
    pub fn eval0(&self) -> Result<C64, SeriesError> {
        match as_int(self.rho, RHO_INT_TOL) {
            Some(0) => Ok(self.coeffs[0]),
            Some(m) if m > 0 => Ok(cr(0.0)),
            _ => {
                let n = self.normalized();
                match as_int(n.rho, RHO_INT_TOL) {
                    Some(0) => Ok(n.coeffs[0]),
                    Some(m) if m > 0 => Ok(cr(0.0)),
                    _ => Err(SeriesError::LeadingExponentMismatch {
                        shift: 0,
                        index: 0,
                        magnitude: n.rho.norm(),
                    }),
                }
            }
        }
    }
}

/// Residual of PVI in polynomial form. With M = 2x²(x−1)²y(y−1)(y−x) the
/// equation is cleared of denominators:
///   R(y) = M y″ − MA (y′)² + MB y′ − MC,
/// where MA = M·(sum of half-reciprocals), MB = M·(1/x + 1/(x−1) + 1/(y−x)),
/// MC = M·(the α…δ block). R vanishes identically on solutions, is
/// polynomial of degree ≤ 6 in y, and its coefficients are computed through
/// order K−2 when y is known through order K.
pub fn pvi_residual_series(y: &TruncatedSeries, th: &ThetaParams) -> TruncatedSeries {
    let k = y.order();
    let (alpha, beta, gamma, delta) = th.pvi_coeffs();
    let x = TruncatedSeries::var(k);
    let one = TruncatedSeries::constant(cr(1.0), k);
    let xm1 = x.sub(&one);
    let x2 = x.mul(&x);
    let xm1_2 = xm1.mul(&xm1);
    let ym1 = y.sub(&one);
    let ymx = y.sub(&x);
    let yp = y.diff_taylor();
    let ypp = yp.diff_taylor();

    let y_ym1 = y.mul(&ym1);
    let y_ymx = y.mul(&ymx);
    let ym1_ymx = ym1.mul(&ymx);
    let cubic = y_ym1.mul(&ymx); // y(y−1)(y−x)

    let m = x2.mul(&xm1_2).mul(&cubic).scale(cr(2.0));
    let bracket = ym1_ymx.add(&y_ymx).add(&y_ym1);
    let ma = x2.mul(&xm1_2).mul(&bracket);
    let mb = x
        .mul(&xm1_2)
        .mul(&cubic)
        .add(&x2.mul(&xm1).mul(&cubic))
        .add(&x2.mul(&xm1_2).mul(&y_ym1))
        .scale(cr(2.0));
    let ym1_ymx_2 = ym1_ymx.mul(&ym1_ymx);
    let mc = y_ym1
        .mul(&y_ym1)
        .mul(&ymx)
        .mul(&ymx)
        .scale(alpha)
        .add(&x.mul(&ym1_ymx_2).scale(beta))
        .add(&xm1.mul(&y_ymx).mul(&y_ymx).scale(gamma))
        .add(&x.mul(&xm1).mul(&y_ym1).mul(&y_ym1).scale(delta))
        .scale(cr(2.0));

    m.mul(&ypp)
        .sub(&ma.mul(&yp).mul(&yp))
        .add(&mb.mul(&yp))
        .sub(&mc)
}

/// Exact directional derivative of the PVI residual at y in direction xⁿ.
/// R(y + ε xⁿ) is polynomial of degree ≤ 6 in ε, so the 7-point central
/// stencil [45(R₁−R₋₁) − 9(R₂−R₋₂) + (R₃−R₋₃)]/60 is exact.
fn pvi_frechet(y: &TruncatedSeries, n: usize, th: &ThetaParams) -> TruncatedSeries {
    let len = y.order();
    let mut acc = TruncatedSeries::zero(len.saturating_sub(2));
    for (step, w) in [(1.0, 45.0), (2.0, -9.0), (3.0, 1.0)] {
        let mut plus = y.clone();
        plus.coeffs[n] += cr(step);
        let mut minus = y.clone();
        minus.coeffs[n] -= cr(step);
        let d = pvi_residual_series(&plus, th).sub(&pvi_residual_series(&minus, th));
        acc = acc.add(&d.scale(cr(w)));
    }
    acc.scale(cr(1.0 / 60.0))
}

pub(crate) fn factorial(n: u64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

struct BranchSeedPlan {
    seeds: Vec<C64>,
    // resonant order expecting the free parameter, checked in-loop
    free_slot: Option<(usize, C64)>,
}

fn seed_plan(branch: &BranchSpec, th: &ThetaParams) -> Result<BranchSeedPlan, SeriesError> {
    let one = cr(1.0);
    let need_free = || {
        branch
            .free
            .ok_or_else(|| SeriesError::BadBranch("family needs a free parameter".into()))
    };
    match branch.family {
        BranchFamily::GenericY0 => {
            if let BranchVariant::Free = branch.variant {
                // θ₃ = 0, θ∞ = 1 row: y₀ itself is the free parameter
                return Ok(BranchSeedPlan { seeds: vec![need_free()?], free_slot: None });
            }
            if (th.theta_inf - one).norm() < 1e-12 {
                return Err(SeriesError::BadBranch("θ∞ = 1 excludes the generic y₀ branch".into()));
            }
            let y0 = match branch.variant {
                BranchVariant::Plus => (th.theta_inf - one + th.theta3) / (th.theta_inf - one),
                BranchVariant::Minus => (th.theta_inf - one - th.theta3) / (th.theta_inf - one),
                _ => return Err(SeriesError::BadBranch("generic y₀ branch needs ± variant".into())),
            };
            Ok(BranchSeedPlan { seeds: vec![y0], free_slot: None })
        }
        BranchFamily::T1 => {
            let n = branch
                .n
                .filter(|m| *m != 0)
                .ok_or_else(|| SeriesError::BadBranch("T1 needs N ∈ ℤ∖{0}".into()))?;
            if (th.theta_inf - one).norm() < 1e-12 {
                return Err(SeriesError::BadBranch("T1 needs θ∞ ≠ 1".into()));
            }
            let b0 = cr(n as f64) / (th.theta_inf - one);
            let slot = n.unsigned_abs() as usize;
            let b_slot = need_free()? / cr(factorial(slot as u64));
            Ok(BranchSeedPlan { seeds: vec![b0], free_slot: Some((slot, b_slot)) })
        }
        BranchFamily::T2 => {
            let denom = match branch.variant {
                BranchVariant::Minus => th.theta1 - th.theta2,
                BranchVariant::Plus => th.theta1 + th.theta2,
                _ => return Err(SeriesError::BadBranch("T2 needs ± variant".into())),
            };
            if denom.norm() < 1e-12 {
                return Err(SeriesError::BadBranch("T2 slope denominator vanishes".into()));
            }
            Ok(BranchSeedPlan { seeds: vec![cr(0.0), th.theta1 / denom], free_slot: None })
        }
        BranchFamily::T3 | BranchFamily::Frobenius => {
            if th.theta1.norm() > 1e-12 || th.theta2.norm() > 1e-12 {
                return Err(SeriesError::BadBranch("T3 needs θ₁ = θ₂ = 0".into()));
            }
            if branch.family == BranchFamily::Frobenius && th.theta3.norm() > 1e-12 {
                return Err(SeriesError::BadBranch("Frobenius branch needs θ₃ = 0".into()));
            }
            Ok(BranchSeedPlan { seeds: vec![cr(0.0), need_free()?], free_slot: None })
        }
        BranchFamily::T4 => {
            let n = branch
                .n
                .filter(|m| *m != 0)
                .ok_or_else(|| SeriesError::BadBranch("T4 needs N ∈ ℤ∖{0}".into()))?;
            let combo = match branch.variant {
                BranchVariant::Minus => th.theta1 - th.theta2,
                BranchVariant::Plus => th.theta1 + th.theta2,
                _ => return Err(SeriesError::BadBranch("T4 needs ± variant".into())),
            };
            if (combo - cr(n as f64)).norm() > 1e-9 {
                return Err(SeriesError::BadBranch(format!(
                    "T4 requires the signed θ₁, θ₂ combination to equal N = {n}"
                )));
            }
            let slot = n.unsigned_abs() as usize + 1;
            let b_slot = need_free()? / cr(factorial(slot as u64));
            let b1 = th.theta1 / cr(n as f64);
            // θ₁ ∈ {0, N} collapses the recurrence below the free slot
            // (y = A x^{|N|+1} resp. y = x + A x^{|N|+1}); the intermediate
            // coefficients are part of the family definition there.
            if th.theta1.norm() < 1e-12 || (th.theta1 - cr(n as f64)).norm() < 1e-12 {
                let mut seeds = vec![cr(0.0); slot + 1];
                seeds[1] = b1;
                seeds[slot] = b_slot;
                Ok(BranchSeedPlan { seeds, free_slot: None })
            } else {
                Ok(BranchSeedPlan { seeds: vec![cr(0.0), b1], free_slot: Some((slot, b_slot)) })
            }
        }
    }
}

/// Taylor coefficients b₀…b_K of the PVI transcendent selected by `branch`.
/// The ansatz seeds the prescribed leading coefficients; every later
/// coefficient is solved from the order-by-order linearization of the
/// polynomial residual. At the resonant order the linear coefficient λ must
/// vanish together with the accumulated residual (kernel of dimension one),
/// and the free parameter is inserted there.
pub fn pvi_branch_coeffs(
    branch: &BranchSpec,
    th: &ThetaParams,
    k: usize,
) -> Result<TruncatedSeries, SeriesError> {
    let plan = seed_plan(branch, th)?;
    let pad = k + 7; // residual orders needed: up to K + q₀ with q₀ ≤ 2, plus stencil margin
    let mut y = TruncatedSeries::zero(pad);
    for (i, s) in plan.seeds.iter().enumerate() {
        y.coeffs[i] = *s;
    }
    let first_unknown = plan.seeds.len();
    if y.is_zero() {
        return Err(SeriesError::BadBranch(
            "seed coefficients vanish identically (singular solution)".into(),
        ));
    }

    // offset q₀ of the equation index: the linearization in direction xⁿ
    // first acts at order n + q₀; probed at a non-resonant order.
    let mut q0: Option<usize> = None;
    for n in first_unknown..=k {
        if q0.is_none() {
            let probe = match plan.free_slot {
                Some((slot, _)) if slot == n => n + 1,
                _ => n,
            };
            let d = pvi_frechet(&y, probe, th);
            let lead = d.lowest_nonzero().ok_or_else(|| {
                SeriesError::BadBranch("degenerate linearization: branch data inconsistent".into())
            })?;
            if lead < probe {
                return Err(SeriesError::BadBranch(
                    "linearization acts below the probe order".into(),
                ));
            }
            q0 = Some(lead - probe);
        }
        let q = n + q0.unwrap();
        let resid = pvi_residual_series(&y, th);
        let d = pvi_frechet(&y, n, th);
        let lambda = d.coeffs[q];
        let rhs = resid.coeffs[q];
        let scale = d.max_abs().max(1.0);
        match plan.free_slot {
            Some((slot, value)) if slot == n => {
                if lambda.norm() > RESONANCE_TOL * scale
                    || rhs.norm() > RESONANCE_TOL * scale.max(resid.max_abs())
                {
                    return Err(SeriesError::UnresolvedResonance {
                        order: n,
                        lambda: lambda.norm(),
                        rhs: rhs.norm(),
                    });
                }
                y.coeffs[n] = value;
            }
            _ => {
                if lambda.norm() <= RESONANCE_TOL * scale {
                    return Err(SeriesError::UnresolvedResonance {
                        order: n,
                        lambda: lambda.norm(),
                        rhs: rhs.norm(),
                    });
                }
                y.coeffs[n] = -rhs / lambda;
            }
        }
    }
    Ok(y.truncated(k))
}

/// Auxiliary function z(x) of the Hamiltonian description:
///   z = ½ [ x(x−1) y′ / (y(y−1)(y−x)) + θ₁/y + (θ₂−1)/(y−x) + θ₃/(y−1) ].
/// Returned with whatever leading exponent the branch produces (a simple
/// pole at worst on Taylor branches).
pub fn z_aux(y: &TruncatedSeries, th: &ThetaParams) -> Result<TruncatedSeries, SeriesError> {
    let k = y.order();
    let x = TruncatedSeries::var(k);
    let one = TruncatedSeries::constant(cr(1.0), k);
    let ym1 = y.sub(&one);
    let ymx = y.sub(&x);
    let yp = y.diff_taylor();
    let t_deriv = x.mul(&x.sub(&one)).mul(&yp).div(&y.mul(&ym1).mul(&ymx))?;
    let t1 = TruncatedSeries::constant(th.theta1, k).div(y)?;
    let t2 = TruncatedSeries::constant(th.theta2 - cr(1.0), k).div(&ymx)?;
    let t3 = TruncatedSeries::constant(th.theta3, k).div(&ym1)?;
    Ok(t_deriv.add(&t1).add(&t2).add(&t3).scale(cr(0.5)))
}

/// The matrix family Ω(x) attached to a transcendent, its gauge functions
/// k₁(x), k₂(x) and the quadrature integrands they solve.
#[derive(Clone, Debug)]
pub struct OmegaSeries {
    pub entries: [[TruncatedSeries; 3]; 3],
    pub k1: TruncatedSeries,
    pub k2: TruncatedSeries,
    pub l1: TruncatedSeries,
    pub l2: TruncatedSeries,
    pub theta: ThetaParams,
    pub k1_0: C64,
    pub k2_0: C64,
}

impl OmegaSeries {
    pub fn entry(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i - 1][j - 1]
    }

    /// Value of Ω at x = 0 (requires every entry to extend holomorphically).
    pub fn eval0(&self) -> Result<CMat3, SeriesError> {
        let mut m = CMat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = self.entries[i][j].eval0()?;
            }
        }
        Ok(m)
    }

    pub fn eval(&self, x: C64) -> CMat3 {
        let mut m = CMat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = self.entries[i][j].eval(x);
            }
        }
        m
    }

    /// Gauge action Ω ↦ diag(c₁,c₂,1) Ω diag(c₁,c₂,1)⁻¹ (k's rescale along).
    pub fn conjugated(&self, c1: C64, c2: C64) -> Self {
        let cs = [c1, c2, cr(1.0)];
        let mut out = self.clone();
        for i in 0..3 {
            for j in 0..3 {
                out.entries[i][j] = self.entries[i][j].scale(cs[i] / cs[j]);
            }
        }
        out.k1 = self.k1.scale(c1);
        out.k2 = self.k2.scale(c2);
        out.k1_0 = self.k1_0 * c1;
        out.k2_0 = self.k2_0 * c2;
        out
    }
}

/// Builds Ω(x) from a Taylor transcendent. The six off-diagonal entries are
/// the explicit rational expressions in (x, y, y′) scaled by k₁, k₂; the
/// gauge functions are obtained by quadrature, k_j = k_j⁰ x^{ρ_j} exp(L_j)
/// with L_j the term-wise primitive of the regular part of l_j and ρ_j the
/// residue of l_j at 0. The constants are normalized so that
/// k_j(x) x^{−ρ_j} → k_j⁰ as x → 0.
pub fn omega_from_y(
    y: &TruncatedSeries,
    th: &ThetaParams,
    k1_0: C64,
    k2_0: C64,
    k: usize,
) -> Result<OmegaSeries, SeriesError> {
    if k1_0.norm() == 0.0 || k2_0.norm() == 0.0 {
        return Err(SeriesError::BadBranch("gauge constants must be nonzero".into()));
    }
    let kk = usize::min(k + 2, y.order());
    let y = y.truncated(kk);
    let x = TruncatedSeries::var(kk);
    let one = TruncatedSeries::constant(cr(1.0), kk);
    let xm1 = x.sub(&one);
    let x2mx = x.mul(&xm1); // x² − x
    let ym1 = y.sub(&one);
    let yp = y.diff_taylor();
    let (t1, t2, t3, ti) = (th.theta1, th.theta2, th.theta3, th.theta_inf);
    let lin = |a: C64, b: C64| {
        // a + b·x as a series
        let mut s = TruncatedSeries::constant(a, kk);
        if kk >= 1 {
            s.coeffs[1] = b;
        }
        s
    };

    // numerators of the six rational kernels
    let w = x2mx.mul(&yp); // (x²−x) y′
    let y2 = y.mul(&y);
    let n12 = w
        .add(&y2.scale(ti - cr(1.0)))
        .add(&lin(t2 - t1 + cr(1.0), -(ti + t2)).mul(&y))
        .add(&x.scale(t1));
    let n21 = w
        .add(&y2.scale(ti - cr(1.0)))
        .add(&lin(t1 - t2 + cr(1.0), -(ti - t2)).mul(&y))
        .sub(&x.scale(t1));
    let wneg = w.neg(); // (x−x²) y′
    let n13 = wneg
        .add(&y2.scale(cr(1.0) - ti))
        .add(&lin(ti + t3 - cr(1.0), t1 - t3).mul(&y))
        .sub(&x.scale(t1));
    let n31 = wneg
        .add(&y2.scale(cr(1.0) - ti))
        .add(&lin(ti - t3 - cr(1.0), t3 - t1).mul(&y))
        .add(&x.scale(t1));
    let n23 = wneg
        .add(&y2.scale(cr(1.0) - ti))
        .add(&lin(ti + t3 - cr(1.0), ti - t2).mul(&y))
        .sub(&x.scale(ti - t2 + t3));
    let n32 = wneg
        .add(&y2.scale(cr(1.0) - ti))
        .add(&lin(ti - t3 - cr(1.0), ti + t2).mul(&y))
        .sub(&x.scale(ti + t2 - t3));

    let f12 = n12.div(&xm1.mul(&y).scale(cr(2.0)))?;
    let f21 = n21.div(&x.sub(&y).scale(cr(2.0)))?;
    let f13 = n13.div(&xm1.mul(&y).scale(cr(2.0)))?;
    let f31 = n31.div(&x.mul(&ym1).scale(cr(2.0)))?;
    let f23 = n23.div(&x.sub(&y).scale(cr(2.0)))?;
    let f32 = n32.div(&x.mul(&one.sub(&y)).scale(cr(2.0)))?;

    // quadrature integrands
    let l1_num = x
        .mul(&one.sub(&x))
        .mul(&yp)
        .add(&y2.scale(t2 - t1 - t3 + cr(1.0)))
        .add(&lin(t1 - t2 - cr(1.0), t1 + t3).mul(&y))
        .sub(&x.scale(t1));
    let l1 = l1_num.div(&x.mul(&xm1).mul(&ym1).mul(&y).scale(cr(2.0)))?;

    let xm1_2 = xm1.mul(&xm1);
    let l2_num = x
        .mul(&xm1_2)
        .mul(&yp)
        .neg()
        .add(&lin(-t1 + t2 + t3 - cr(1.0), t1 - cr(3.0) * t2 + t3 + cr(1.0)).mul(&y2))
        .add(
            &lin(t1 - t2 + cr(1.0), cr(3.0) * t2 - cr(3.0) * t3 - cr(1.0))
                .add(&x.mul(&x).scale(cr(2.0) * t2 - t1 - t3))
                .mul(&y),
        )
        .add(&lin(-t1, t1 - cr(2.0) * t2 + cr(2.0) * t3).mul(&x));
    let l2 = l2_num.div(
        &x.mul(&one.sub(&x))
            .mul(&one.sub(&y))
            .mul(&x.sub(&y))
            .scale(cr(2.0)),
    )?;

    let gauge_from_l = |l: &TruncatedSeries, k0: C64| -> Result<TruncatedSeries, SeriesError> {
        let ln = l.normalized();
        if ln.is_zero() {
            // l ≡ 0 happens on degenerate families (e.g. the μ = 1 rational
            // solutions); the gauge factor is then the constant k₀
            return Ok(TruncatedSeries::constant(k0, l.coeffs.len().saturating_sub(1)));
        }
        let lead = as_int(ln.rho, RHO_INT_TOL).ok_or(SeriesError::NonIntegrableQuadrature {
            order: 99,
        })?;
        if lead < -1 {
            return Err(SeriesError::NonIntegrableQuadrature { order: -lead });
        }
        let aligned = ln.with_leading_exponent(cr(-1.0))?;
        let pole = aligned.coeffs[0];
        let mut regular = aligned.clone();
        regular.coeffs[0] = cr(0.0);
        let big_l = regular.integrate()?; // vanishes at 0
        let big_l0 = big_l.with_leading_exponent(cr(0.0))?;
        let mut kser = big_l0.exp().scale(k0);
        kser.rho = pole;
        Ok(kser)
    };
    let k1s = gauge_from_l(&l1, k1_0)?;
    let k2s = gauge_from_l(&l2, k2_0)?;

    let o12 = k1s.mul(&f12).div(&k2s)?.truncated(k);
    let o21 = k2s.mul(&f21).div(&k1s)?.truncated(k);
    let o13 = k1s.mul(&f13).truncated(k);
    let o31 = f31.div(&k1s)?.truncated(k);
    let o23 = k2s.mul(&f23).truncated(k);
    let o32 = f32.div(&k2s)?.truncated(k);
    let diag = |t: C64| TruncatedSeries::constant(-t, k);

    Ok(OmegaSeries {
        entries: [[diag(t1), o12, o13], [o21, diag(t2), o23], [o31, o32, diag(t3)]],
        k1: k1s.truncated(k),
        k2: k2s.truncated(k),
        l1: l1.truncated(k),
        l2: l2.truncated(k),
        theta: th.clone(),
        k1_0,
        k2_0,
    })
}

/// Max coefficient residual of the deformation equation dΩ/dx = [Ω, Ω̂₂],
/// where Ω̂₂ collects the (2,3),(3,2) entries over 1−x minus the
/// (1,2),(2,1) entries over x. Checked through order K−2.
pub fn ode_residual(omega: &OmegaSeries) -> f64 {
    let k = omega.entries[0][1].order();
    let keep = k.saturating_sub(1);
    let geom = TruncatedSeries::taylor(vec![cr(1.0); k + 1]); // 1/(1−x)
    let zero = TruncatedSeries::zero(k);
    let hat = [
        [
            zero.clone(),
            omega.entries[0][1].mul_xpow(-1).neg(),
            zero.clone(),
        ],
        [
            omega.entries[1][0].mul_xpow(-1).neg(),
            zero.clone(),
            omega.entries[1][2].mul(&geom),
        ],
        [
            zero.clone(),
            omega.entries[2][1].mul(&geom),
            zero.clone(),
        ],
    ];
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let mut comm = TruncatedSeries::zero(k);
            for m in 0..3 {
                comm = comm
                    .add(&omega.entries[i][m].mul(&hat[m][j]))
                    .sub(&hat[i][m].mul(&omega.entries[m][j]));
            }
            let resid = omega.entries[i][j].diff().sub(&comm);
            worst = worst.max(resid.truncated(keep).max_abs());
        }
    }
    worst
}

/// Coefficients (c₁, c₂, c₃) of det(λ − Ω(x)) = λ³ − c₁λ² + c₂λ − c₃ as
/// series in x. Constancy at (−θ₁−θ₂−θ₃, μ₁μ₃, 0) is eigenvalue
/// conservation.
pub fn char_poly_series(
    omega: &OmegaSeries,
) -> (TruncatedSeries, TruncatedSeries, TruncatedSeries) {
    let e = &omega.entries;
    let c1 = e[0][0].add(&e[1][1]).add(&e[2][2]);
    let minor = |a: usize, b: usize| {
        e[a][a]
            .mul(&e[b][b])
            .sub(&e[a][b].mul(&e[b][a]))
    };
    let c2 = minor(0, 1).add(&minor(0, 2)).add(&minor(1, 2));
    let det = e[0][0]
        .mul(&minor_2(e, 1, 2, 1, 2))
        .sub(&e[0][1].mul(&minor_2(e, 1, 2, 0, 2)))
        .add(&e[0][2].mul(&minor_2(e, 1, 2, 0, 1)));
    (c1, c2, det)
}

fn minor_2(
    e: &[[TruncatedSeries; 3]; 3],
    r1: usize,
    r2: usize,
    c1: usize,
    c2: usize,
) -> TruncatedSeries {
    e[r1][c1].mul(&e[r2][c2]).sub(&e[r1][c2].mul(&e[r2][c1]))
}

/// Max deviation of the characteristic polynomial from its constant value.
pub fn eigenvalue_residual(omega: &OmegaSeries) -> f64 {
    let th = &omega.theta;
    let (c1, c2, c3) = char_poly_series(omega);
    let tr = -(th.theta1 + th.theta2 + th.theta3);
    let prod = th.mu1() * th.mu3();
    let keep = omega.entries[0][1].order().saturating_sub(1);
    let d1 = c1.sub(&TruncatedSeries::constant(tr, c1.order()));
    let d2 = c2.sub(&TruncatedSeries::constant(prod, c2.order()));
    d1.truncated(keep)
        .max_abs()
        .max(d2.truncated(keep).max_abs())
        .max(c3.truncated(keep).max_abs())
}

/// Max coefficient residual of k_j′ − l_j k_j = 0 for j = 1, 2.
pub fn quadrature_residual(omega: &OmegaSeries) -> f64 {
    let keep = omega.k1.order().saturating_sub(1);
    let r1 = omega.k1.diff().sub(&omega.l1.mul(&omega.k1));
    let r2 = omega.k2.diff().sub(&omega.l2.mul(&omega.k2));
    r1.truncated(keep).max_abs().max(r2.truncated(keep).max_abs())
}

/// Recovers the transcendent from Ω via the gauge-free combinations
/// Z₃₁ = k₁Ω₃₁ and Z₁₃ = Ω₁₃/k₁:
///   y = x R / (x(1+R) − 1),  R = −(θ₁ + Z₃₁)/(θ₃ + Z₁₃).
pub fn y_from_omega(omega: &OmegaSeries) -> Result<TruncatedSeries, SeriesError> {
    let k = omega.entries[0][1].order();
    let th = &omega.theta;
    // Z₃₁/Z₁₃ may carry genuine poles on branches with y(0) ≠ 0; they cancel
    // in R and y itself is coerced back to a Taylor series at the end.
    let z31 = omega.k1.mul(&omega.entries[2][0]);
    let z13 = omega.entries[0][2].div(&omega.k1)?;
    let num = z31.add(&TruncatedSeries::constant(th.theta1, z31.order())).neg();
    let den = z13.add(&TruncatedSeries::constant(th.theta3, z13.order()));
    if num.is_zero() && den.is_zero() {
        return Err(SeriesError::DegenerateRecovery);
    }
    let r = num.div(&den)?;
    let x = TruncatedSeries::var(k);
    let xr = x.mul(&r).with_leading_exponent(cr(0.0))?;
    let den2 = xr.add(&x).sub(&TruncatedSeries::constant(cr(1.0), k));
    xr.div(&den2)?.with_leading_exponent(cr(0.0))
}
