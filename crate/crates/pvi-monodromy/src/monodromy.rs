//! Monodromy data of the 3×3 irregular system at the coalescence point:
//! the Stokes pair (𝕊₁, 𝕊₂), the connection coefficients c_jk of the 2×2
//! Fuchsian reduction, and the trace invariants p_jk = tr(𝓜_j𝓜_k) tying
//! them together.
//!
//! Closed-form Stokes matrices exist for three worked families (T1 with
//! N = −1 and θ₁ = θ₂, T3, and the θ = 0 family); every other branch must
//! go through the numeric oracle.

use crate::classify::{omega0_closed_form, validate_branch, BranchFamily, BranchSpec, ClassifyError};
use crate::series::ThetaParams;
use crate::specfun::rgamma_c;
use crate::util::{as_int, c, cr, mat_max_abs, C64, CMat3, I};
use std::f64::consts::PI;
use thiserror::Error;

const INT_TOL: f64 = 1e-9;
/// |u_j − u_k| below this counts as a coalesced pair.
const COALESCE_TOL: f64 = 1e-12;
/// Admissibility margin for Re(e^{iτ}(u_j−u_k)), relative to |u_j−u_k|.
const ADMISSIBLE_TOL: f64 = 1e-10;
/// Pattern tolerance of `StokesPair::validate`, relative to the matrix scale;
/// loose enough to accept numerically extracted pairs.
pub const PATTERN_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum MonodromyError {
    #[error("non-admissible direction τ: {0}")]
    NonAdmissible(String),
    #[error("Stokes pattern violation: {0}")]
    PatternViolation(String),
    #[error("no closed-form Stokes matrices here: {0}")]
    Unsupported(String),
    #[error("degenerate monodromy data: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

// ---------------------------------------------------------------------------
// ordering relation

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Before,
    After,
    Unordered,
}

/// The partial order j ≺ k ⟺ Re(e^{iτ}(u_j−u_k)) < 0 on {1,2,3},
/// with coalesced pairs left unordered.
#[derive(Clone, Copy, Debug)]
pub struct PartialOrder {
    rel: [[Rel; 3]; 3],
}

impl PartialOrder {
    /// Relation of j to k, 1-based.
    pub fn rel(&self, j: usize, k: usize) -> Rel {
        self.rel[j - 1][k - 1]
    }

    pub fn before(&self, j: usize, k: usize) -> bool {
        self.rel(j, k) == Rel::Before
    }

    pub fn unordered(&self, j: usize, k: usize) -> bool {
        self.rel(j, k) == Rel::Unordered
    }
}

/// The limit of u = (0, x, 1) as x → 0: first two points coalesced.
pub fn coalesced_u() -> [C64; 3] {
    [cr(0.0), cr(0.0), cr(1.0)]
}

pub fn ordering(u: [C64; 3], tau: f64) -> Result<PartialOrder, MonodromyError> {
    let rot = c(0.0, tau).exp();
    let mut rel = [[Rel::Unordered; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            if j == k {
                continue;
            }
            let d = u[j] - u[k];
            if d.norm() <= COALESCE_TOL {
                continue;
            }
            let re = (rot * d).re;
            if re.abs() <= ADMISSIBLE_TOL * d.norm() {
                return Err(MonodromyError::NonAdmissible(format!(
                    "Re(e^(iτ)(u{}−u{})) = {:.3e} vanishes",
                    j + 1,
                    k + 1,
                    re
                )));
            }
            rel[j][k] = if re < 0.0 { Rel::Before } else { Rel::After };
        }
    }
    Ok(PartialOrder { rel })
}

// ---------------------------------------------------------------------------
// Stokes pair

/// Stokes matrices (𝕊₁, 𝕊₂) of the sector pair anchored at the admissible
/// direction τ in the z-plane (η = 3π/2 − τ in the λ-plane): Y₂ = Y₁𝕊₁,
/// Y₃ = Y₂𝕊₂.
#[derive(Clone, Debug)]
pub struct StokesPair {
    pub s1: CMat3,
    pub s2: CMat3,
    pub tau: f64,
}

impl StokesPair {
    pub fn new(s1: CMat3, s2: CMat3, tau: f64) -> Self {
        StokesPair { s1, s2, tau }
    }

    pub fn eta(&self) -> f64 {
        1.5 * PI - self.tau
    }

    /// Unit diagonals; (𝕊₁)_{jk} ≠ 0 only for j ≺ k, (𝕊₂)_{jk} ≠ 0 only for
    /// j ≻ k; both vanish on unordered (coalesced) pairs.
    pub fn validate(&self, order: &PartialOrder, tol: f64) -> Result<(), MonodromyError> {
        let scale = mat_max_abs(&self.s1).max(mat_max_abs(&self.s2)).max(1.0);
        let bad = |e: C64| e.norm() > tol * scale;
        for j in 1..=3usize {
            if bad(self.s1[(j - 1, j - 1)] - cr(1.0)) || bad(self.s2[(j - 1, j - 1)] - cr(1.0)) {
                return Err(MonodromyError::PatternViolation(format!(
                    "diagonal entry ({j},{j}) is not 1"
                )));
            }
            for k in 1..=3usize {
                if j == k {
                    continue;
                }
                if order.rel(j, k) != Rel::Before && bad(self.s1[(j - 1, k - 1)]) {
                    return Err(MonodromyError::PatternViolation(format!(
                        "(S1)_{j}{k} must vanish unless {j} ≺ {k}"
                    )));
                }
                if order.rel(j, k) != Rel::After && bad(self.s2[(j - 1, k - 1)]) {
                    return Err(MonodromyError::PatternViolation(format!(
                        "(S2)_{j}{k} must vanish unless {j} ≻ {k}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Re-anchor at τ + π: the sector pair becomes (𝕊₂, 𝕊₃), with
/// 𝕊₃ = e^{2πiΘ} 𝕊₁ e^{−2πiΘ}, Θ = diag(θ₁,θ₂,θ₃).
pub fn opposite_anchor(s: &StokesPair, th: &ThetaParams) -> StokesPair {
    let t = [th.theta1, th.theta2, th.theta3];
    let mut s3 = s.s1;
    for j in 0..3 {
        for k in 0..3 {
            if j != k {
                s3[(j, k)] *= ((t[j] - t[k]) * c(0.0, 2.0 * PI)).exp();
            }
        }
    }
    StokesPair::new(s.s2, s3, s.tau + PI)
}

// ---------------------------------------------------------------------------
// trace invariants

pub fn two_cos_pi(z: C64) -> C64 {
    (z * PI).cos() * 2.0
}

#[derive(Clone, Copy, Debug)]
pub struct TraceInvariants {
    pub p12: C64,
    pub p13: C64,
    pub p23: C64,
    pub p1: C64,
    pub p2: C64,
    pub p3: C64,
    pub p_inf: C64,
}

impl TraceInvariants {
    pub fn new(th: &ThetaParams, p12: C64, p13: C64, p23: C64) -> Self {
        TraceInvariants {
            p12,
            p13,
            p23,
            p1: two_cos_pi(th.theta1),
            p2: two_cos_pi(th.theta2),
            p3: two_cos_pi(th.theta3),
            p_inf: two_cos_pi(th.theta_inf),
        }
    }

    /// p_{jk} = p_{kj}, 1-based, j ≠ k.
    pub fn pjk(&self, j: usize, k: usize) -> C64 {
        match (j.min(k), j.max(k)) {
            (1, 2) => self.p12,
            (1, 3) => self.p13,
            (2, 3) => self.p23,
            _ => panic!("pjk indices must be a pair from {{1,2,3}}"),
        }
    }
}

/// p_{jk} = 2cosπ(θ_j−θ_k) − e^{iπ(θ_j−θ_k)} (𝕊₁)_{jk} (𝕊₂⁻¹)_{kj} for j ≺ k,
/// mirrored for j ≻ k; unordered pairs give the pure cosine.
pub fn pjk_from_stokes(
    s: &StokesPair,
    th: &ThetaParams,
    order: &PartialOrder,
) -> Result<TraceInvariants, MonodromyError> {
    s.validate(order, PATTERN_TOL)?;
    let s2inv = s
        .s2
        .try_inverse()
        .ok_or_else(|| MonodromyError::PatternViolation("S2 is singular".into()))?;
    let t = [th.theta1, th.theta2, th.theta3];
    let mut p = [cr(0.0); 3];
    for (slot, (j, k)) in [(1usize, 2usize), (1, 3), (2, 3)].iter().enumerate() {
        let d = t[j - 1] - t[k - 1];
        p[slot] = match order.rel(*j, *k) {
            Rel::Unordered => two_cos_pi(d),
            Rel::Before => {
                two_cos_pi(d) - (I * PI * d).exp() * s.s1[(j - 1, k - 1)] * s2inv[(k - 1, j - 1)]
            }
            Rel::After => {
                two_cos_pi(d) - (-I * PI * d).exp() * s.s1[(k - 1, j - 1)] * s2inv[(j - 1, k - 1)]
            }
        };
    }
    Ok(TraceInvariants::new(th, p[0], p[1], p[2]))
}

// ---------------------------------------------------------------------------
// connection coefficients

/// α_j = e^{2πiθ_j} − 1 for θ_j ∉ ℤ, and 2πi for θ_j ∈ ℤ.
pub fn alpha_theta(theta: C64) -> C64 {
    if as_int(theta, INT_TOL).is_some() {
        c(0.0, 2.0 * PI)
    } else {
        (theta * c(0.0, 2.0 * PI)).exp() - cr(1.0)
    }
}

#[derive(Clone, Debug)]
pub struct ConnectionCoeffs {
    pub c: CMat3,
    pub alpha: [C64; 3],
}

pub fn stokes_to_cjk(
    s: &StokesPair,
    th: &ThetaParams,
    order: &PartialOrder,
) -> Result<ConnectionCoeffs, MonodromyError> {
    s.validate(order, PATTERN_TOL)?;
    let s2inv = s
        .s2
        .try_inverse()
        .ok_or_else(|| MonodromyError::PatternViolation("S2 is singular".into()))?;
    let t = [th.theta1, th.theta2, th.theta3];
    let alpha = [alpha_theta(t[0]), alpha_theta(t[1]), alpha_theta(t[2])];
    let mut cm = CMat3::zeros();
    for k in 1..=3usize {
        if as_int(t[k - 1], INT_TOL).is_none() {
            cm[(k - 1, k - 1)] = cr(1.0);
        }
        for j in 1..=3usize {
            if j == k {
                continue;
            }
            cm[(j - 1, k - 1)] = match order.rel(j, k) {
                Rel::Unordered => cr(0.0),
                Rel::Before => {
                    (t[k - 1] * c(0.0, 2.0 * PI)).exp() / alpha[k - 1] * s.s1[(j - 1, k - 1)]
                }
                Rel::After => {
                    -s2inv[(j - 1, k - 1)]
                        / (((t[j - 1] - t[k - 1]) * c(0.0, 2.0 * PI)).exp() * alpha[k - 1])
                }
            };
        }
    }
    Ok(ConnectionCoeffs { c: cm, alpha })
}

pub fn cjk_to_stokes(
    cc: &ConnectionCoeffs,
    th: &ThetaParams,
    order: &PartialOrder,
    tau: f64,
) -> Result<StokesPair, MonodromyError> {
    let t = [th.theta1, th.theta2, th.theta3];
    let mut s1 = CMat3::identity();
    let mut s2inv = CMat3::identity();
    for j in 1..=3usize {
        for k in 1..=3usize {
            if j == k {
                continue;
            }
            match order.rel(j, k) {
                Rel::Unordered => {}
                Rel::Before => {
                    s1[(j - 1, k - 1)] = cc.alpha[k - 1] * cc.c[(j - 1, k - 1)]
                        * (-t[k - 1] * c(0.0, 2.0 * PI)).exp();
                }
                Rel::After => {
                    s2inv[(j - 1, k - 1)] = -cc.alpha[k - 1]
                        * cc.c[(j - 1, k - 1)]
                        * ((t[j - 1] - t[k - 1]) * c(0.0, 2.0 * PI)).exp();
                }
            }
        }
    }
    let s2 = s2inv
        .try_inverse()
        .ok_or_else(|| MonodromyError::Degenerate("rebuilt S2^(-1) is singular".into()))?;
    Ok(StokesPair::new(s1, s2, tau))
}

/// p_{jk} = e^{−iπ(θ_j+θ_k)} α_j α_k c_{jk} c_{kj} + 2cosπ(θ_j−θ_k).
pub fn pjk_from_cjk(cc: &ConnectionCoeffs, th: &ThetaParams) -> TraceInvariants {
    let t = [th.theta1, th.theta2, th.theta3];
    let p = |j: usize, k: usize| {
        (-I * PI * (t[j - 1] + t[k - 1])).exp()
            * cc.alpha[j - 1]
            * cc.alpha[k - 1]
            * cc.c[(j - 1, k - 1)]
            * cc.c[(k - 1, j - 1)]
            + two_cos_pi(t[j - 1] - t[k - 1])
    };
    TraceInvariants::new(th, p(1, 2), p(1, 3), p(2, 3))
}

// ---------------------------------------------------------------------------
// closed-form Stokes matrices (anchor τ = 0)

/// Closed-form pair in the same gauge as `omega0_closed_form` for the same
/// branch (k̃ constants included).
pub fn stokes_closed_form(th: &ThetaParams, br: &BranchSpec) -> Result<StokesPair, MonodromyError> {
    let om = omega0_closed_form(th, br)?;
    closed_form_entries(th, br, om.kt1, om.kt2)
}

/// Same with explicit gauge constants k̃₁⁰, k̃₂⁰.
pub fn stokes_closed_form_with(
    th: &ThetaParams,
    br: &BranchSpec,
    kt1: C64,
    kt2: C64,
) -> Result<StokesPair, MonodromyError> {
    validate_branch(th, br)?;
    closed_form_entries(th, br, kt1, kt2)
}

fn closed_form_entries(
    th: &ThetaParams,
    br: &BranchSpec,
    kt1: C64,
    kt2: C64,
) -> Result<StokesPair, MonodromyError> {
    match br.family {
        BranchFamily::T1 => t1_stokes(th, br, kt1, kt2),
        BranchFamily::T3 => t3_stokes(th, br, kt1, kt2),
        BranchFamily::Frobenius => frobenius_stokes(th, br, kt1, kt2),
        _ => Err(MonodromyError::Unsupported(format!(
            "{:?} branches have no closed-form Stokes matrices; use the numeric oracle",
            br.family
        ))),
    }
}

fn free_of(br: &BranchSpec) -> Result<C64, MonodromyError> {
    br.free
        .ok_or_else(|| MonodromyError::Unsupported("branch carries no free parameter".into()))
}

/// T1, N = −1, θ₁ = θ₂, θ₃ = ±θ∞ (both signs give the same pair: the two
/// systems are gauge equivalent under the coordinate flip 1 ↔ 3).
fn t1_stokes(
    th: &ThetaParams,
    br: &BranchSpec,
    kt1: C64,
    kt2: C64,
) -> Result<StokesPair, MonodromyError> {
    if br.n != Some(-1) {
        return Err(MonodromyError::Unsupported(
            "the T1 closed form covers N = −1 only".into(),
        ));
    }
    if (th.theta1 - th.theta2).norm() > INT_TOL {
        return Err(MonodromyError::Unsupported(
            "the T1 closed form covers θ₁ = θ₂ only".into(),
        ));
    }
    if as_int(th.theta1, INT_TOL).is_some() || as_int(th.theta_inf, INT_TOL).is_some() {
        return Err(MonodromyError::Unsupported(
            "the T1 closed form needs θ₁, θ∞ ∉ ℤ".into(),
        ));
    }
    let y0p = free_of(br)?;
    let t1 = th.theta1;
    let ti = th.theta_inf;
    let sq = ti.sqrt();
    // sin(πθ₁) Γ(θ₁) = π / Γ(1−θ₁), kept in reciprocal-gamma form
    let f = cr(PI) * rgamma_c(cr(1.0) - t1) * rgamma_c(ti) / sq;
    let s1 = CMat3::new(
        cr(1.0),
        cr(0.0),
        c(0.0, 2.0) * kt1 * f,
        cr(0.0),
        cr(1.0),
        c(0.0, -2.0) * kt2 * f,
        cr(0.0),
        cr(0.0),
        cr(1.0),
    );
    let g = c(0.0, PI)
        * (-I * PI * (t1 - ti)).exp()
        * rgamma_c(cr(1.0) + t1)
        * rgamma_c(cr(1.0) - ti)
        / sq;
    let bp = cr(2.0) * y0p * (ti - cr(1.0)) + ti * (t1 - cr(1.0));
    let bm = cr(2.0) * y0p * (ti - cr(1.0)) - ti * (t1 + cr(1.0));
    let s2 = CMat3::new(
        cr(1.0),
        cr(0.0),
        cr(0.0),
        cr(0.0),
        cr(1.0),
        cr(0.0),
        g * bp / kt1,
        g * bm / kt2,
        cr(1.0),
    );
    Ok(StokesPair::new(s1, s2, 0.0))
}

/// T3: θ₁ = θ₂ = 0, slope y₀′ free, θ₃, θ∞ ∉ ℤ.
fn t3_stokes(
    th: &ThetaParams,
    br: &BranchSpec,
    kt1: C64,
    kt2: C64,
) -> Result<StokesPair, MonodromyError> {
    if as_int(th.theta3, INT_TOL).is_some() || as_int(th.theta_inf, INT_TOL).is_some() {
        return Err(MonodromyError::Unsupported(
            "the T3 closed form needs θ₃, θ∞ ∉ ℤ".into(),
        ));
    }
    let y0p = free_of(br)?;
    let a = (th.theta_inf - th.theta3) / 2.0;
    let b = (th.theta_inf + th.theta3) / 2.0;
    // Γ(a) sin(πa) / Γ(b) = π / (Γ(1−a) Γ(b))
    let f = cr(PI) * rgamma_c(cr(1.0) - a) * rgamma_c(b);
    let s1 = CMat3::new(
        cr(1.0),
        cr(0.0),
        c(0.0, -2.0) * kt1 * f,
        cr(0.0),
        cr(1.0),
        c(0.0, -2.0) * kt2 * f,
        cr(0.0),
        cr(0.0),
        cr(1.0),
    );
    let g = c(0.0, -2.0 * PI)
        * (I * PI * th.theta3).exp()
        * rgamma_c(cr(1.0) - b)
        * rgamma_c(a);
    let s2 = CMat3::new(
        cr(1.0),
        cr(0.0),
        cr(0.0),
        cr(0.0),
        cr(1.0),
        cr(0.0),
        g * y0p / kt1,
        g * (cr(1.0) - y0p) / kt2,
        cr(1.0),
    );
    Ok(StokesPair::new(s1, s2, 0.0))
}

/// θ = 0, θ∞ = 2μ: the T3 shape specialized to θ₃ = 0, where the gamma
/// factors collapse to sin(πμ). Valid for every μ ≠ 0; integer μ gives the
/// identity pair.
fn frobenius_stokes(
    th: &ThetaParams,
    br: &BranchSpec,
    kt1: C64,
    kt2: C64,
) -> Result<StokesPair, MonodromyError> {
    let y0p = free_of(br)?;
    let mu = th.theta_inf / 2.0;
    if as_int(mu, INT_TOL).is_some() {
        return Ok(StokesPair::new(CMat3::identity(), CMat3::identity(), 0.0));
    }
    let s = (mu * PI).sin();
    let s1 = CMat3::new(
        cr(1.0),
        cr(0.0),
        c(0.0, -2.0) * kt1 * s,
        cr(0.0),
        cr(1.0),
        c(0.0, -2.0) * kt2 * s,
        cr(0.0),
        cr(0.0),
        cr(1.0),
    );
    let s2 = CMat3::new(
        cr(1.0),
        cr(0.0),
        cr(0.0),
        cr(0.0),
        cr(1.0),
        cr(0.0),
        c(0.0, -2.0) * y0p * s / kt1,
        c(0.0, -2.0) * (cr(1.0) - y0p) * s / kt2,
        cr(1.0),
    );
    Ok(StokesPair::new(s1, s2, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::BranchVariant;
    use crate::specfun::gamma_c;
    use crate::util::{mat_max_diff, SplitMix64};

    fn th_t1(t1: f64, ti: f64) -> ThetaParams {
        ThetaParams::real(t1, t1, ti, ti).unwrap()
    }

    fn th_t3(t3: f64, ti: f64) -> ThetaParams {
        ThetaParams::real(0.0, 0.0, t3, ti).unwrap()
    }

    fn th_frob(ti: f64) -> ThetaParams {
        ThetaParams::real(0.0, 0.0, 0.0, ti).unwrap()
    }

    #[test]
    fn ordering_examples() {
        let ord = ordering(coalesced_u(), 0.0).unwrap();
        assert!(ord.before(1, 3) && ord.before(2, 3));
        assert!(ord.unordered(1, 2) && ord.unordered(2, 1));
        assert_eq!(ord.rel(3, 1), Rel::After);

        let ord = ordering(coalesced_u(), PI).unwrap();
        assert!(ord.before(3, 1) && ord.before(3, 2));
        assert!(ord.unordered(1, 2));

        let ord = ordering([cr(0.0), cr(0.5), cr(1.0)], 0.0).unwrap();
        assert!(ord.before(1, 2) && ord.before(2, 3) && ord.before(1, 3));

        // u₁ − u₂ = −i is orthogonal to the ray τ = 0
        let err = ordering([cr(0.0), c(0.0, 1.0), cr(1.0)], 0.0).unwrap_err();
        assert!(matches!(err, MonodromyError::NonAdmissible(_)));
    }

    #[test]
    fn identity_stokes_gives_cosine_traces() {
        let th = ThetaParams::real(0.3, 0.7, 1.3, 2.9).unwrap();
        let ord = ordering(coalesced_u(), 0.0).unwrap();
        let s = StokesPair::new(CMat3::identity(), CMat3::identity(), 0.0);
        let p = pjk_from_stokes(&s, &th, &ord).unwrap();
        assert!((p.p12 - two_cos_pi(th.theta1 - th.theta2)).norm() < 1e-15);
        assert!((p.p13 - two_cos_pi(th.theta1 - th.theta3)).norm() < 1e-15);
        assert!((p.p23 - two_cos_pi(th.theta2 - th.theta3)).norm() < 1e-15);
        assert!((p.p_inf - two_cos_pi(th.theta_inf)).norm() < 1e-15);
    }

    #[test]
    fn t1_stokes_entries_match_gamma_form() {
        let th = th_t1(0.3, 1.7);
        let br = BranchSpec::t1(BranchVariant::Minus, -1, cr(0.41));
        let s = stokes_closed_form(&th, &br).unwrap();
        // canonical gauge of the non-Frobenius families is k̃ = 1
        let t1 = cr(0.3);
        let ti = cr(1.7);
        let direct13 = c(0.0, 2.0) * (PI * t1).sin() * gamma_c(t1) / (ti.sqrt() * gamma_c(ti));
        assert!((s.s1[(0, 2)] - direct13).norm() < 1e-14);
        assert!((s.s1[(1, 2)] + direct13).norm() < 1e-14);
        let bracket = cr(2.0 * 0.41) * (ti - cr(1.0)) + ti * (t1 - cr(1.0));
        let direct31 = c(0.0, PI) * (-I * PI * (t1 - ti)).exp() * bracket
            / (ti.sqrt() * gamma_c(cr(1.0) + t1) * gamma_c(cr(1.0) - ti));
        assert!((s.s2[(2, 0)] - direct31).norm() < 1e-14);
        assert_eq!(s.s1[(0, 1)], cr(0.0));
        assert_eq!(s.s2[(0, 1)], cr(0.0));
    }

    #[test]
    fn t1_traces_match_known_formulas() {
        let ord = ordering(coalesced_u(), 0.0).unwrap();
        let mut rng = SplitMix64::new(0x7a11_5701);
        for _ in 0..50 {
            let t1 = rng.uniform(0.05, 0.95);
            let ti = rng.uniform(1.05, 1.95);
            let y0p = rng.uniform(-1.5, 1.5);
            let th = th_t1(t1, ti);
            let br = BranchSpec::t1(BranchVariant::Minus, -1, cr(y0p));
            let s = stokes_closed_form(&th, &br).unwrap();
            let p = pjk_from_stokes(&s, &th, &ord).unwrap();
            // y₀′ = θ∞(2s+θ₁+1)/(2(θ∞−1)) inverted for the parameter s
            let sp = (2.0 * (ti - 1.0) * y0p / ti - t1 - 1.0) / 2.0;
            let swing = 4.0 * sp * (PI * t1).sin() * (PI * ti).sin() / t1;
            let p13 = cr(-swing + 2.0 * (PI * (t1 + ti)).cos());
            let p23 = cr(swing + 2.0 * (PI * (t1 - ti)).cos());
            assert!((p.p12 - cr(2.0)).norm() < 1e-10, "p12 residual too large");
            assert!((p.p13 - p13).norm() < 1e-10, "p13 residual {:.3e}", (p.p13 - p13).norm());
            assert!((p.p23 - p23).norm() < 1e-10, "p23 residual {:.3e}", (p.p23 - p23).norm());
        }
    }

    #[test]
    fn t1_theta3_sign_flip_keeps_the_pair() {
        let br = BranchSpec::t1(BranchVariant::Minus, -1, cr(0.27));
        let s = stokes_closed_form(&th_t1(0.35, 1.55), &br).unwrap();
        let th_neg = ThetaParams::real(0.35, 0.35, -1.55, 1.55).unwrap();
        let br_neg = BranchSpec::t1(BranchVariant::Plus, -1, cr(0.27));
        let s_neg = stokes_closed_form(&th_neg, &br_neg).unwrap();
        assert!(mat_max_diff(&s.s1, &s_neg.s1) < 1e-15);
        assert!(mat_max_diff(&s.s2, &s_neg.s2) < 1e-15);
    }

    #[test]
    fn t3_traces_match_closed_formulas() {
        let ord = ordering(coalesced_u(), 0.0).unwrap();
        let mut rng = SplitMix64::new(0x7a11_5703);
        for _ in 0..50 {
            let t3 = rng.uniform(0.05, 0.95);
            let ti = rng.uniform(1.05, 1.95);
            let y0p = rng.uniform(0.05, 0.95);
            let th = th_t3(t3, ti);
            let br = BranchSpec::t3(cr(y0p));
            let s = stokes_closed_form(&th, &br).unwrap();
            let p = pjk_from_stokes(&s, &th, &ord).unwrap();
            let sines = (PI * (ti - t3) / 2.0).sin() * (PI * (ti + t3) / 2.0).sin();
            let p13 = cr(2.0 * (PI * t3).cos() - 4.0 * y0p * sines);
            let p23 = cr(2.0 * (PI * t3).cos() - 4.0 * (1.0 - y0p) * sines);
            assert!((p.p12 - cr(2.0)).norm() < 1e-10);
            assert!((p.p13 - p13).norm() < 1e-10, "p13 residual {:.3e}", (p.p13 - p13).norm());
            assert!((p.p23 - p23).norm() < 1e-10, "p23 residual {:.3e}", (p.p23 - p23).norm());
        }
    }

    #[test]
    fn frobenius_stokes_and_traces() {
        let th = th_frob(0.74); // μ = 0.37
        let y0p = 0.3;
        let br = BranchSpec::frobenius(cr(y0p));
        let s = stokes_closed_form(&th, &br).unwrap();
        let mu = 0.37;
        assert!((s.s1[(0, 2)] - cr(2.0 * y0p.sqrt() * (PI * mu).sin())).norm() < 1e-15);
        assert!((s.s1[(1, 2)] - cr(2.0 * (1.0 - y0p).sqrt() * (PI * mu).sin())).norm() < 1e-15);
        // Pfaffian symmetry of the distinguished skew gauge
        let s1_inv_t = s.s1.try_inverse().unwrap().transpose();
        assert!(mat_max_diff(&s.s2, &s1_inv_t) < 1e-15);

        let ord = ordering(coalesced_u(), 0.0).unwrap();
        let p = pjk_from_stokes(&s, &th, &ord).unwrap();
        let sin2 = (PI * mu).sin().powi(2);
        assert!((p.p12 - cr(2.0)).norm() < 1e-12);
        assert!((p.p13 - cr(2.0 - 4.0 * y0p * sin2)).norm() < 1e-12);
        assert!((p.p23 - cr(2.0 - 4.0 * (1.0 - y0p) * sin2)).norm() < 1e-12);
        // p₁₃ = 2 − [(𝕊₁)₁₃]² in this gauge
        assert!((p.p13 - (cr(2.0) - s.s1[(0, 2)] * s.s1[(0, 2)])).norm() < 1e-12);

        let s_half = stokes_closed_form(&th_frob(1.0), &BranchSpec::frobenius(cr(0.5))).unwrap();
        assert!((s_half.s1[(0, 2)] - cr(2.0f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn frobenius_integer_mu_is_trivial() {
        for ti in [2.0, 4.0, -2.0] {
            let th = th_frob(ti);
            let s = stokes_closed_form(&th, &BranchSpec::frobenius(cr(0.3))).unwrap();
            assert_eq!(mat_max_diff(&s.s1, &CMat3::identity()), 0.0);
            assert_eq!(mat_max_diff(&s.s2, &CMat3::identity()), 0.0);
            let ord = ordering(coalesced_u(), 0.0).unwrap();
            let p = pjk_from_stokes(&s, &th, &ord).unwrap();
            assert!((p.p12 - cr(2.0)).norm() < 1e-15);
            assert!((p.p13 - cr(2.0)).norm() < 1e-15);
            assert!((p.p23 - cr(2.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn dictionary_round_trip_and_consistency() {
        let ord = ordering(coalesced_u(), 0.0).unwrap();

        // non-integer θ throughout
        let th = th_t1(0.3, 1.7);
        let br = BranchSpec::t1(BranchVariant::Minus, -1, cr(0.41));
        let s = stokes_closed_form(&th, &br).unwrap();
        let cc = stokes_to_cjk(&s, &th, &ord).unwrap();
        assert!((cc.c[(0, 0)] - cr(1.0)).norm() < 1e-15);
        let back = cjk_to_stokes(&cc, &th, &ord, 0.0).unwrap();
        assert!(mat_max_diff(&back.s1, &s.s1) < 1e-12);
        assert!(mat_max_diff(&back.s2, &s.s2) < 1e-12);
        let p_a = pjk_from_stokes(&s, &th, &ord).unwrap();
        let p_b = pjk_from_cjk(&cc, &th);
        assert!((p_a.p12 - p_b.p12).norm() < 1e-12);
        assert!((p_a.p13 - p_b.p13).norm() < 1e-12);
        assert!((p_a.p23 - p_b.p23).norm() < 1e-12);

        // integer θ_k path: the θ = 0 family has α_k = 2πi and c_kk = 0
        let th = th_frob(0.74);
        let s = stokes_closed_form(&th, &BranchSpec::frobenius(cr(0.3))).unwrap();
        let cc = stokes_to_cjk(&s, &th, &ord).unwrap();
        for k in 0..3 {
            assert_eq!(cc.c[(k, k)], cr(0.0));
            assert!((cc.alpha[k] - c(0.0, 2.0 * PI)).norm() < 1e-15);
        }
        let back = cjk_to_stokes(&cc, &th, &ord, 0.0).unwrap();
        assert!(mat_max_diff(&back.s1, &s.s1) < 1e-12);
        assert!(mat_max_diff(&back.s2, &s.s2) < 1e-12);
        let p_a = pjk_from_stokes(&s, &th, &ord).unwrap();
        let p_b = pjk_from_cjk(&cc, &th);
        assert!((p_a.p13 - p_b.p13).norm() < 1e-12);
        assert!((p_a.p23 - p_b.p23).norm() < 1e-12);
    }

    #[test]
    fn alpha_cases() {
        assert!((alpha_theta(cr(2.0)) - c(0.0, 2.0 * PI)).norm() < 1e-15);
        assert!((alpha_theta(cr(0.0)) - c(0.0, 2.0 * PI)).norm() < 1e-15);
        let a = alpha_theta(cr(0.3));
        assert!((a - ((cr(0.3) * c(0.0, 2.0 * PI)).exp() - cr(1.0))).norm() < 1e-15);
    }

    #[test]
    fn gauge_rescaling_leaves_traces() {
        let ord = ordering(coalesced_u(), 0.0).unwrap();
        let th = th_t3(0.4, 1.45);
        let br = BranchSpec::t3(cr(0.62));
        let s = stokes_closed_form(&th, &br).unwrap();
        let s_g = stokes_closed_form_with(&th, &br, c(0.7, 0.2), c(-1.3, 0.5)).unwrap();
        assert!((s.s1[(0, 2)] - s_g.s1[(0, 2)]).norm() > 1e-3);
        let p = pjk_from_stokes(&s, &th, &ord).unwrap();
        let p_g = pjk_from_stokes(&s_g, &th, &ord).unwrap();
        assert!((p.p12 - p_g.p12).norm() < 1e-12);
        assert!((p.p13 - p_g.p13).norm() < 1e-12);
        assert!((p.p23 - p_g.p23).norm() < 1e-12);
    }

    #[test]
    fn opposite_anchor_reproduces_traces() {
        let ord0 = ordering(coalesced_u(), 0.0).unwrap();
        let ord_pi = ordering(coalesced_u(), PI).unwrap();

        let th = th_t1(0.3, 1.7);
        let s = stokes_closed_form(&th, &BranchSpec::t1(BranchVariant::Minus, -1, cr(0.41))).unwrap();
        let s_pi = opposite_anchor(&s, &th);
        assert!((s_pi.eta() - PI / 2.0).abs() < 1e-15);
        let p0 = pjk_from_stokes(&s, &th, &ord0).unwrap();
        let p1 = pjk_from_stokes(&s_pi, &th, &ord_pi).unwrap();
        assert!((p0.p13 - p1.p13).norm() < 1e-12);
        assert!((p0.p23 - p1.p23).norm() < 1e-12);
        assert!((p0.p12 - p1.p12).norm() < 1e-12);

        let th = th_t3(0.4, 1.45);
        let s = stokes_closed_form(&th, &BranchSpec::t3(cr(0.62))).unwrap();
        let s_pi = opposite_anchor(&s, &th);
        let p0 = pjk_from_stokes(&s, &th, &ord0).unwrap();
        let p1 = pjk_from_stokes(&s_pi, &th, &ord_pi).unwrap();
        assert!((p0.p13 - p1.p13).norm() < 1e-12);
        assert!((p0.p23 - p1.p23).norm() < 1e-12);
    }

    #[test]
    fn invalid_inputs_rejected() {
        let ord = ordering(coalesced_u(), 0.0).unwrap();
        let th = th_t1(0.3, 1.7);
        let br = BranchSpec::t1(BranchVariant::Minus, -1, cr(0.41));
        let s = stokes_closed_form(&th, &br).unwrap();

        let mut bad = s.clone();
        bad.s1[(2, 0)] = cr(0.5); // 3 ≻ 1: S1 must vanish there
        assert!(matches!(
            pjk_from_stokes(&bad, &th, &ord),
            Err(MonodromyError::PatternViolation(_))
        ));
        let mut bad = s.clone();
        bad.s1[(0, 1)] = cr(0.5); // coalesced pair
        assert!(matches!(
            pjk_from_stokes(&bad, &th, &ord),
            Err(MonodromyError::PatternViolation(_))
        ));
        let mut bad = s;
        bad.s2[(1, 1)] = cr(2.0);
        assert!(matches!(
            pjk_from_stokes(&bad, &th, &ord),
            Err(MonodromyError::PatternViolation(_))
        ));

        // no closed form outside the worked families
        let th = ThetaParams::real(0.21, 0.4, 0.33, 1.6).unwrap();
        let err = stokes_closed_form_with(
            &th,
            &BranchSpec::generic_y0(BranchVariant::Plus),
            cr(1.0),
            cr(1.0),
        )
        .unwrap_err();
        assert!(matches!(err, MonodromyError::Unsupported(_)));

        // T1 with N ≠ −1 is refused even though the branch itself is fine
        let th = ThetaParams::real(0.3, 0.3, 0.6, 2.6).unwrap();
        let br = BranchSpec::t1(BranchVariant::Minus, 1, cr(0.2));
        let err = stokes_closed_form_with(&th, &br, cr(1.0), cr(1.0)).unwrap_err();
        assert!(matches!(err, MonodromyError::Unsupported(_)));

        // θ₁ ≠ θ₂ T1 data is refused
        let th = ThetaParams::real(0.3, 0.5, 1.7, 1.7).unwrap();
        let br = BranchSpec::t1(BranchVariant::Minus, -1, cr(0.2));
        let err = stokes_closed_form_with(&th, &br, cr(1.0), cr(1.0)).unwrap_err();
        assert!(matches!(err, MonodromyError::Unsupported(_)));
    }
}
