//! Classification of Taylor branches at x = 0: which one-parameter families
//! admit a holomorphic limit Ω(x) → Ω₀ with vanishing (1,2)/(2,1) entries,
//! and the closed forms (Ω₀, diagonalizer G₀, reduced ODE parameters) for
//! every admissible case.
//!
//! The table is encoded as data (`CASE_TABLE`): each row carries a guard on
//! (θ, branch), the verdict, and constructors for the closed forms. Scalars
//! that are defined through an |N|-th derivative of a rational expression in
//! y(x) are evaluated with the series engine rather than transcribed.

use crate::series::{self, SeriesError, ThetaParams, TruncatedSeries};
use crate::specfun::HypParams22;
use crate::util::{as_int, cr, C64, CMat3};
use thiserror::Error;

const INT_TOL: f64 = 1e-9;
const DEGEN_TOL: f64 = 1e-12;
/// Relative tolerance for the built-in eigenvector self-check of (Ω₀, G₀).
const EIG_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("branch data inconsistent with θ: {0}")]
    InvalidBranch(String),
    #[error("no closed form for this (θ, branch) combination: {0}")]
    Unsupported(String),
    #[error("the vanishing condition does not hold: {0}")]
    VanishingFails(String),
    #[error("degenerate parameters in closed form: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Families of Taylor branches y(x) holomorphic at x = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchFamily {
    /// y(0) = (θ∞−1±θ₃)/(θ∞−1) ∉ {0, 1}, exponent data non-integer.
    GenericY0,
    /// y(0) = N/(θ∞−1) with θ∞−1∓θ₃ = N ∈ ℤ∖{0}; free parameter y₀^(|N|).
    T1,
    /// y(0) = 0, y′(0) = θ₁/(θ₁∓θ₂) determined.
    T2,
    /// θ₁ = θ₂ = 0, y(0) = 0 with free slope y′(0).
    T3,
    /// θ₁∓θ₂ = N ∈ ℤ∖{0}, y(0) = 0, slope θ₁/N; free parameter y₀^(|N|+1).
    T4,
    /// θ₁ = θ₂ = θ₃ = 0, θ∞ = 2μ: the T3 shape with extra symmetry.
    Frobenius,
}

/// Sign/shape selector inside a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchVariant {
    /// "+" sign in the defining θ-relation.
    Plus,
    /// "−" sign in the defining θ-relation.
    Minus,
    /// Free y(0) subfamily of GenericY0 (θ₃ = 0, θ∞ = 1).
    Free,
    /// Families without a sign choice (T3, Frobenius).
    Std,
}

/// A Taylor branch at x = 0, as selected by the caller.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchSpec {
    pub family: BranchFamily,
    pub variant: BranchVariant,
    pub n: Option<i64>,
    pub free: Option<C64>,
}

impl BranchSpec {
    pub fn generic_y0(variant: BranchVariant) -> Self {
        Self { family: BranchFamily::GenericY0, variant, n: None, free: None }
    }

    pub fn generic_y0_free(y0: C64) -> Self {
        Self { family: BranchFamily::GenericY0, variant: BranchVariant::Free, n: None, free: Some(y0) }
    }

    /// n = θ∞−1−θ₃ (Minus) or θ∞−1+θ₃ (Plus); `free` is y₀^(|n|).
    pub fn t1(variant: BranchVariant, n: i64, free: C64) -> Self {
        Self { family: BranchFamily::T1, variant, n: Some(n), free: Some(free) }
    }

    pub fn t2(variant: BranchVariant) -> Self {
        Self { family: BranchFamily::T2, variant, n: None, free: None }
    }

    pub fn t3(y0p: C64) -> Self {
        Self { family: BranchFamily::T3, variant: BranchVariant::Std, n: None, free: Some(y0p) }
    }

    /// n = θ₁−θ₂ (Minus) or θ₁+θ₂ (Plus); `free` is y₀^(|n|+1).
    pub fn t4(variant: BranchVariant, n: i64, free: C64) -> Self {
        Self { family: BranchFamily::T4, variant, n: Some(n), free: Some(free) }
    }

    pub fn frobenius(y0p: C64) -> Self {
        Self { family: BranchFamily::Frobenius, variant: BranchVariant::Std, n: Some(0), free: Some(y0p) }
    }
}

// ---------------------------------------------------------------------------
// admissibility sets

/// 𝒩_N: integers m with |m| ≤ |N|−1 and m ≡ N−1 (mod 2).
pub fn mathcal_n(n: i64) -> Vec<i64> {
    let a = n.abs();
    (-(a - 1)..=(a - 1))
        .filter(|m| (m - (n - 1)).rem_euclid(2) == 0)
        .collect()
}

pub fn in_mathcal_n(z: C64, n: i64) -> bool {
    match as_int(z, INT_TOL) {
        Some(m) => (m - (n - 1)).rem_euclid(2) == 0 && m.abs() <= n.abs() - 1,
        None => false,
    }
}

/// θ∞−1 ∈ {−1, −2, …, N+1} (N < 0) or {1, 2, …, N−1} (N > 0).
pub fn condizione1_holds(theta_inf: C64, n: i64) -> bool {
    match as_int(theta_inf - cr(1.0), INT_TOL) {
        Some(t) => {
            if n < 0 {
                (n + 1..=-1).contains(&t)
            } else {
                (1..=n - 1).contains(&t)
            }
        }
        None => false,
    }
}

/// θ₁ ∈ {0, 1, …, N} (N > 0) or {0, −1, …, N} (N < 0).
pub fn cond_holds(theta1: C64, n: i64) -> bool {
    match as_int(theta1, INT_TOL) {
        Some(k) => {
            if n > 0 {
                (0..=n).contains(&k)
            } else {
                (n..=0).contains(&k)
            }
        }
        None => false,
    }
}

/// {θ₃+θ∞−1, −θ₃+θ∞−1} ∩ 𝒩_N ≠ ∅.
pub fn condd_holds(th: &ThetaParams, n: i64) -> bool {
    in_mathcal_n(th.theta3 + th.theta_inf - cr(1.0), n)
        || in_mathcal_n(-th.theta3 + th.theta_inf - cr(1.0), n)
}

// ---------------------------------------------------------------------------
// reduced equations

/// Coefficients of z²w‴ + z(b₂+a₂z)w″ + (b₁+a₁z)w′ + a₀w = 0 with a₂ = −1,
/// the ODE solved by ₂F₂(A₁,A₂;B₁,B₂;z).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyp22Coeffs {
    pub a0: C64,
    pub a1: C64,
    pub a2: C64,
    pub b1: C64,
    pub b2: C64,
}

impl Hyp22Coeffs {
    /// Function parameters: A₁+A₂ = −1−a₁, A₁A₂ = −a₀, B₁+B₂ = b₂−1, B₁B₂ = b₁.
    pub fn function_params(&self) -> HypParams22 {
        let (a1, a2) = quadratic_roots(-cr(1.0) - self.a1, -self.a0);
        let (b1, b2) = quadratic_roots(self.b2 - cr(1.0), self.b1);
        HypParams22::new(a1, a2, b1, b2)
    }
}

/// Roots of t² − s·t + p = 0.
fn quadratic_roots(s: C64, p: C64) -> (C64, C64) {
    let d = (s * s - cr(4.0) * p).sqrt();
    ((s + d) / cr(2.0), (s - d) / cr(2.0))
}

/// The classical equation a column of the reduced system satisfies.
///
/// `ConfluentInhomogeneous` means z w″ + (b−z) w′ − a w = strength·z^exponent,
/// with the free constant of the reduction normalized to 1.
#[derive(Clone, Debug, PartialEq)]
pub enum ReductionSpec {
    Confluent { a: C64, b: C64 },
    ConfluentInhomogeneous { a: C64, b: C64, exponent: C64, strength: C64 },
    Hyp22(Hyp22Coeffs),
}

impl ReductionSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ReductionSpec::Confluent { .. } => "confluent",
            ReductionSpec::ConfluentInhomogeneous { .. } => "confluent-inhomogeneous",
            ReductionSpec::Hyp22(_) => "hyp22",
        }
    }
}

// ---------------------------------------------------------------------------
// closed forms

/// Scalars entering some closed forms; `None` when a case does not use them.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CaseScalars {
    /// K: −½(d/dx)^|N| [(x(x−1)y′+θ₃y(y−x))/(y−1)]₀ + |N|A.
    pub k_deriv: Option<C64>,
    /// H: +½(same derivative) − |N|A.
    pub h_deriv: Option<C64>,
    /// H̃: ½(d/dx)^|N| [(x(x−1)y′−(1−θ₂)y(y−1))/(y−x)]₀ − (θ₂+θ₃+|N|−1)A.
    pub h_tilde: Option<C64>,
    /// K̃: ½(d/dx)^|N| [x((x−1)y′+θ₂−|N|+1)/y]₀ − (θ₃+|N|)A.
    pub k_tilde: Option<C64>,
    /// A: y₀^(|N|)/2 for the y(0) ≠ 0 families, y₀^(|N|+1)/(|N|+1)! otherwise.
    pub a_free: Option<C64>,
}

/// A matched closed-form limit: Ω(x) → Ω₀ as x → 0 with diagonalizer G₀.
#[derive(Clone, Debug)]
pub struct Omega0Case {
    pub case: &'static str,
    pub omega0: CMat3,
    pub g0: CMat3,
    pub kt1: C64,
    pub kt2: C64,
    /// Eigenvalue of Ω₀ attached to each column of G₀ (a permutation of 0, μ₁, μ₃).
    pub eig_order: [C64; 3],
    pub scalars: CaseScalars,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseOutcome {
    Holds { special_function: &'static str },
    Fails { reason: &'static str },
}

type BuildFn = fn(&ThetaParams, &BranchSpec, C64, C64) -> Result<Omega0Case, ClassifyError>;
type ReduceFn = fn(&ThetaParams, &BranchSpec) -> Result<ReductionSpec, ClassifyError>;

pub struct CaseRow {
    pub id: &'static str,
    pub family: BranchFamily,
    /// Human-readable guard description.
    pub condition: &'static str,
    pub outcome: CaseOutcome,
    guard: fn(&ThetaParams, &BranchSpec) -> bool,
    build: Option<BuildFn>,
    reduce: Option<ReduceFn>,
}

/// Verdict of the holomorphic-vanishing test for a branch.
#[derive(Clone, Debug)]
pub struct CoalVerdict {
    pub holds: bool,
    pub case_id: Option<&'static str>,
    pub reason: String,
}

// ---------------------------------------------------------------------------
// guards

fn is_zero_int(z: C64) -> bool {
    z.norm() <= INT_TOL
}

fn theta_diff_int(th: &ThetaParams) -> Option<i64> {
    as_int(th.theta1 - th.theta2, INT_TOL)
}

/// Consistency of the branch selector with θ. Errors never classify.
pub fn validate_branch(th: &ThetaParams, br: &BranchSpec) -> Result<(), ClassifyError> {
    let bad = |msg: String| Err(ClassifyError::InvalidBranch(msg));
    match br.family {
        BranchFamily::GenericY0 => match br.variant {
            BranchVariant::Free => {
                if !is_zero_int(th.theta3) || !is_zero_int(th.theta_inf - cr(1.0)) {
                    return bad("free-y(0) subfamily requires θ₃ = 0 and θ∞ = 1".into());
                }
                if br.free.is_none() {
                    return bad("free-y(0) subfamily needs its y(0) parameter".into());
                }
            }
            BranchVariant::Plus | BranchVariant::Minus => {
                if is_zero_int(th.theta_inf - cr(1.0)) {
                    return bad("y(0) = (θ∞−1±θ₃)/(θ∞−1) needs θ∞ ≠ 1".into());
                }
            }
            _ => return bad("GenericY0 admits Plus/Minus/Free variants only".into()),
        },
        BranchFamily::T1 => {
            let n = match br.n {
                Some(n) if n != 0 => n,
                _ => return bad("T1 needs N ∈ ℤ∖{0}".into()),
            };
            let sign = match br.variant {
                BranchVariant::Minus => cr(-1.0),
                BranchVariant::Plus => cr(1.0),
                _ => return bad("T1 admits Plus/Minus variants only".into()),
            };
            let combo = th.theta_inf - cr(1.0) + sign * th.theta3;
            if as_int(combo, INT_TOL) != Some(n) {
                return bad(format!("θ∞−1{}θ₃ = {} is not the declared N = {}",
                    if sign.re > 0.0 { "+" } else { "−" }, combo, n));
            }
            if br.free.is_none() {
                return bad("T1 needs the free parameter y₀^(|N|)".into());
            }
        }
        BranchFamily::T2 => {
            let combo = match br.variant {
                BranchVariant::Minus => th.theta1 - th.theta2,
                BranchVariant::Plus => th.theta1 + th.theta2,
                _ => return bad("T2 admits Plus/Minus variants only".into()),
            };
            if combo.norm() <= DEGEN_TOL {
                return bad("T2 slope θ₁/(θ₁∓θ₂) undefined".into());
            }
        }
        BranchFamily::T3 => {
            if !is_zero_int(th.theta1) || !is_zero_int(th.theta2) {
                return bad("T3 requires θ₁ = θ₂ = 0".into());
            }
            if br.free.is_none() {
                return bad("T3 needs the free slope y′(0)".into());
            }
        }
        BranchFamily::T4 => {
            let n = match br.n {
                Some(n) if n != 0 => n,
                _ => return bad("T4 needs N ∈ ℤ∖{0}".into()),
            };
            let combo = match br.variant {
                BranchVariant::Minus => th.theta1 - th.theta2,
                BranchVariant::Plus => th.theta1 + th.theta2,
                _ => return bad("T4 admits Plus/Minus variants only".into()),
            };
            if as_int(combo, INT_TOL) != Some(n) {
                return bad(format!("θ₁∓θ₂ = {combo} is not the declared N = {n}"));
            }
            if br.free.is_none() {
                return bad("T4 needs the free parameter y₀^(|N|+1)".into());
            }
        }
        BranchFamily::Frobenius => {
            if !is_zero_int(th.theta1) || !is_zero_int(th.theta2) || !is_zero_int(th.theta3) {
                return bad("this family requires θ₁ = θ₂ = θ₃ = 0".into());
            }
            if br.free.is_none() {
                return bad("the family needs the free slope y′(0)".into());
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// derivative-based scalars

enum KernelKind {
    /// (x(x−1)y′ + θ₃ y(y−x))/(y−1)
    KH,
    /// (x(x−1)y′ − (1−θ₂) y(y−1))/(y−x)
    HTilde,
    /// x((x−1)y′ + θ₂ − |N| + 1)/y
    KTilde,
}

fn nth_deriv_at0(f: &TruncatedSeries, n: usize) -> Result<C64, ClassifyError> {
    let f0 = f.with_leading_exponent(cr(0.0))?;
    let cn = f0.coeffs.get(n).copied().ok_or_else(|| {
        ClassifyError::Unsupported(format!("series too short for a {n}-th derivative"))
    })?;
    Ok(cr(series::factorial(n as u64)) * cn)
}

fn t1_kernel_deriv(th: &ThetaParams, br: &BranchSpec, kind: KernelKind) -> Result<C64, ClassifyError> {
    let n_abs = br.n.unwrap().unsigned_abs() as usize;
    let y = series::pvi_branch_coeffs(br, th, n_abs + 4)?;
    let k = y.order();
    let x = TruncatedSeries::var(k);
    let one = TruncatedSeries::constant(cr(1.0), k);
    let xm1 = x.sub(&one);
    let yp = y.diff_taylor();
    let xx = x.mul(&xm1).mul(&yp);
    let (num, den) = match kind {
        KernelKind::KH => (
            xx.add(&y.mul(&y.sub(&x)).scale(th.theta3)),
            y.sub(&one),
        ),
        KernelKind::HTilde => (
            xx.sub(&y.mul(&y.sub(&one)).scale(cr(1.0) - th.theta2)),
            y.sub(&x),
        ),
        KernelKind::KTilde => (
            x.mul(&xm1.mul(&yp).add(&TruncatedSeries::constant(
                th.theta2 - cr(n_abs as f64) + cr(1.0),
                k,
            ))),
            y.clone(),
        ),
    };
    nth_deriv_at0(&num.div(&den)?, n_abs)
}

// ---------------------------------------------------------------------------
// eigen structure of a built case

fn mat_scale(m: &CMat3) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Attach to each column of G₀ its eigenvalue from {0, μ₁, μ₃}; errors if G₀
/// does not diagonalize Ω₀ or the eigenvalues are not a permutation.
fn eigenvalue_order(omega0: &CMat3, g0: &CMat3, th: &ThetaParams) -> Result<[C64; 3], ClassifyError> {
    let cands = [cr(0.0), th.mu1(), th.mu3()];
    let prod = omega0 * g0;
    let omega_scale = mat_scale(omega0) + 1.0;
    let mut out = [cr(0.0); 3];
    let mut used = [false; 3];
    for j in 0..3 {
        let col_scale = (0..3).map(|i| g0[(i, j)].norm()).fold(0.0, f64::max);
        if col_scale <= DEGEN_TOL {
            return Err(ClassifyError::Degenerate(format!("diagonalizer column {j} vanishes")));
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, lam) in cands.iter().enumerate() {
            if used[i] {
                continue;
            }
            let r = (0..3)
                .map(|t| (prod[(t, j)] - lam * g0[(t, j)]).norm())
                .fold(0.0, f64::max)
                / (col_scale * omega_scale);
            if best.map_or(true, |(_, rb)| r < rb) {
                best = Some((i, r));
            }
        }
        let (i, r) = best.unwrap();
        if r > EIG_CHECK_TOL {
            return Err(ClassifyError::Degenerate(format!(
                "column {j} of the diagonalizer is not an eigenvector (residual {r:.3e})"
            )));
        }
        used[i] = true;
        out[j] = cands[i];
    }
    Ok(out)
}

fn finish_case(
    case: &'static str,
    th: &ThetaParams,
    omega0: CMat3,
    g0: CMat3,
    kt1: C64,
    kt2: C64,
    scalars: CaseScalars,
) -> Result<Omega0Case, ClassifyError> {
    let eig_order = eigenvalue_order(&omega0, &g0, th)?;
    Ok(Omega0Case { case, omega0, g0, kt1, kt2, eig_order, scalars })
}

fn nonzero(z: C64, what: &str) -> Result<C64, ClassifyError> {
    if z.norm() <= DEGEN_TOL {
        Err(ClassifyError::Degenerate(format!("{what} vanishes")))
    } else {
        Ok(z)
    }
}

// ---------------------------------------------------------------------------
// builders — T1, θ∞ = θ₃ + N + 1

fn build_t1_minus_n1(th: &ThetaParams, br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let (t2, t3) = (th.theta2, th.theta3);
    let y0p = br.free.unwrap();
    let s3 = nonzero(t3, "θ₃")?.sqrt();
    let qm = t3 * (cr(1.0) - t2) / cr(2.0) + (cr(1.0) - t3) * y0p;
    let qp = t3 * (cr(1.0) + t2) / cr(2.0) + (cr(1.0) - t3) * y0p;
    nonzero(qm, "θ₃(1−θ₂)/2 + (1−θ₃)y′(0)")?;
    nonzero(t2, "θ₂")?;
    let omega0 = CMat3::new(
        -t2, cr(0.0), -kt1 * s3,
        cr(0.0), -t2, kt2 * s3,
        qm / (kt1 * s3), qp / (kt2 * s3), -t3,
    );
    let g0 = CMat3::new(
        -(kt1 / kt2) * qp / qm, -kt1 * s3 / t2, kt1 / s3,
        cr(1.0), kt2 * s3 / t2, -kt2 / s3,
        cr(0.0), cr(1.0), cr(1.0),
    );
    finish_case("T1.N-1.theta3eq", th, omega0, g0, kt1, kt2,
        CaseScalars { a_free: Some(y0p / cr(2.0)), ..Default::default() })
}

fn build_t1_minus_dpos(th: &ThetaParams, br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let (t2, t3) = (th.theta2, th.theta3);
    let na = cr(br.n.unwrap().unsigned_abs() as f64);
    let a = br.free.unwrap() / cr(2.0);
    let d = t1_kernel_deriv(th, br, KernelKind::KH)?;
    let k_big = nonzero(-d / cr(2.0) + na * a, "K")?;
    let r = nonzero(t3 / na, "θ₃/|N|")?.sqrt(); // √(θ₃/|N|); √(|N|θ₃) := |N|·r
    let omega0 = CMat3::new(
        cr(1.0) - na - t2, cr(0.0), cr(0.0),
        cr(0.0), -t2, kt2 * na * r,
        r * k_big / kt1, t2 * r / kt2, -t3,
    );
    let g0 = CMat3::new(
        (kt1 / k_big) / r * (t2 * t3 / (na - cr(1.0)) + t3 - t2 - na + cr(1.0)), cr(0.0), cr(0.0),
        -kt2 * na * r / (na - cr(1.0)), cr(1.0), -kt2 / r,
        cr(1.0), t2 / (kt2 * na * r), cr(1.0),
    );
    finish_case("T1.theta3eq.dpos", th, omega0, g0, kt1, kt2,
        CaseScalars { k_deriv: Some(k_big), a_free: Some(a), ..Default::default() })
}

fn build_t1_minus_dneg(th: &ThetaParams, br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let (t2, t3) = (th.theta2, th.theta3);
    let na = cr(br.n.unwrap().unsigned_abs() as f64);
    let a = br.free.unwrap() / cr(2.0);
    let d = t1_kernel_deriv(th, br, KernelKind::KH)?;
    let h_big = nonzero(d / cr(2.0) - na * a, "H")?;
    let r = nonzero(t3 / na, "θ₃/|N|")?.sqrt();
    let omega0 = CMat3::new(
        -t2 + na - cr(1.0), cr(0.0), -kt1 * na * r,
        cr(0.0), -t2, cr(0.0),
        -r * (t2 - na + cr(1.0)) / kt1, -r * h_big / kt2, -t3,
    );
    let g0 = CMat3::new(
        kt1 * na * r / (na - cr(1.0)), cr(1.0), kt1 / r,
        (kt2 * t2 / h_big) / r * (cr(1.0) - t3 / (na - cr(1.0))), cr(0.0), cr(0.0),
        cr(1.0), -(t2 - na + cr(1.0)) / (kt1 * na * r), cr(1.0),
    );
    finish_case("T1.theta3eq.dneg", th, omega0, g0, kt1, kt2,
        CaseScalars { h_deriv: Some(h_big), a_free: Some(a), ..Default::default() })
}

// builders — T1, θ∞ = −θ₃ + N + 1

fn build_t1_plus_n1(th: &ThetaParams, br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let (t2, t3) = (th.theta2, th.theta3);
    let y0p = br.free.unwrap();
    let s3 = nonzero(t3, "θ₃")?.sqrt();
    // y₀' coefficient fixed by the gauge-invariant products Ω₁₃Ω₃₁ = qp,
    // Ω₂₃Ω₃₂ = -qm of the series engine (y₀ = 1/(1+θ₃) on this branch)
    let qp = t3 * (cr(1.0) + t2) / cr(2.0) - (cr(1.0) + t3) * y0p;
    let qm = t3 * (cr(1.0) - t2) / cr(2.0) - (cr(1.0) + t3) * y0p;
    nonzero(t2, "θ₂")?;
    let omega0 = CMat3::new(
        -t2, cr(0.0), kt1 / s3 * qp,
        cr(0.0), -t2, kt2 / s3 * qm,
        s3 / kt1, -s3 / kt2, -t3,
    );
    let g0 = CMat3::new(
        -kt1 / (t3 * s3) * qp, kt1 / (t2 * s3) * qp, cr(1.0),
        -kt2 / (t3 * s3) * qm, kt2 / (t2 * s3) * qm, kt2 / kt1,
        cr(1.0), cr(1.0), cr(0.0),
    );
    finish_case("T1.N-1.theta3neg", th, omega0, g0, kt1, kt2,
        CaseScalars { a_free: Some(y0p / cr(2.0)), ..Default::default() })
}

fn build_t1_plus_dpos(th: &ThetaParams, br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let (t2, t3) = (th.theta2, th.theta3);
    let na = cr(br.n.unwrap().unsigned_abs() as f64);
    let a = br.free.unwrap() / cr(2.0);
    let d = t1_kernel_deriv(th, br, KernelKind::HTilde)?;
    let h_tilde = nonzero(d / cr(2.0) - (t2 + t3 + na - cr(1.0)) * a, "H̃")?;
    let r = nonzero(t3 / na, "θ₃/|N|")?.sqrt();
    nonzero(t2, "θ₂")?;
    let omega0 = CMat3::new(
        cr(1.0) - na - t2, cr(0.0), -kt1 * r * (t2 + na - cr(1.0)),
        cr(0.0), -t2, -kt2 / r * h_tilde,
        -na * r / kt1, cr(0.0), -t3,
    );
    let g0 = CMat3::new(
        kt1 / (na * r) * (t2 + na - cr(1.0)), -kt1 * r, cr(0.0),
        kt2 / r * h_tilde / (t3 + na - cr(1.0)), -(kt2 / t2) / r * h_tilde, cr(1.0),
        cr(1.0), cr(1.0), cr(0.0),
    );
    finish_case("T1.theta3neg.dpos", th, omega0, g0, kt1, kt2,
        CaseScalars { h_tilde: Some(h_tilde), a_free: Some(a), ..Default::default() })
}

fn build_t1_plus_dneg(th: &ThetaParams, br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let (t2, t3) = (th.theta2, th.theta3);
    let na = cr(br.n.unwrap().unsigned_abs() as f64);
    let a = br.free.unwrap() / cr(2.0);
    let d = t1_kernel_deriv(th, br, KernelKind::KTilde)?;
    let k_tilde = nonzero(d / cr(2.0) - (t3 + na) * a, "K̃")?;
    let r = nonzero(t3 / na, "θ₃/|N|")?.sqrt();
    nonzero(t2, "θ₂")?;
    let omega0 = CMat3::new(
        -t2 + na - cr(1.0), cr(0.0), -kt1 / r * k_tilde,
        cr(0.0), -t2, kt2 * t2 * r,
        cr(0.0), na * r / kt2, -t3,
    );
    let g0 = CMat3::new(
        kt1 / r * k_tilde / (t3 + na - cr(1.0)), -kt1 / r * k_tilde / (t2 - na + cr(1.0)), cr(1.0),
        -kt2 * t2 / (na * r), kt2 * r, cr(0.0),
        cr(1.0), cr(1.0), cr(0.0),
    );
    finish_case("T1.theta3neg.dneg", th, omega0, g0, kt1, kt2,
        CaseScalars { k_tilde: Some(k_tilde), a_free: Some(a), ..Default::default() })
}

// builders — order-one families

fn build_t2(th: &ThetaParams, _br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let (t1, t2, t3, ti) = (th.theta1, th.theta2, th.theta3, th.theta_inf);
    let d = nonzero(t1 - t2, "θ₁−θ₂")?;
    nonzero(t1, "θ₁")?;
    let omega0 = CMat3::new(
        -t1, cr(0.0), kt1 / cr(2.0) * (d - t3 - ti),
        cr(0.0), -t2, -kt2 / cr(2.0) * (d + t3 + ti),
        -(d - t3 + ti) * t1 / (cr(2.0) * kt1 * d), -(d + t3 - ti) * t2 / (cr(2.0) * kt2 * d), -t3,
    );
    // θ₂ = 0 collapses the Plus family onto this one; column 2 of Ω₀ then
    // vanishes identically and the middle eigenvector rescales to e₂.
    let g0 = if t2.norm() > DEGEN_TOL {
        CMat3::new(
            kt1 * (d - t3 - ti) / (d - t3 + ti), kt1 * (d - t3 - ti) / (cr(2.0) * t1), kt1,
            kt2 * (d + t3 + ti) / (d + t3 - ti), -kt2 * (d + t3 + ti) / (cr(2.0) * t2), kt2,
            cr(1.0), cr(1.0), cr(1.0),
        )
    } else {
        CMat3::new(
            kt1 * (d - t3 - ti) / (d - t3 + ti), cr(0.0), kt1,
            kt2 * (d + t3 + ti) / (d + t3 - ti), cr(1.0), kt2,
            cr(1.0), cr(0.0), cr(1.0),
        )
    };
    finish_case("T2", th, omega0, g0, kt1, kt2, CaseScalars::default())
}

fn build_t3(th: &ThetaParams, br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let (t3, ti) = (th.theta3, th.theta_inf);
    let y0p = br.free.unwrap();
    nonzero(y0p, "y′(0)")?;
    let omega0 = t3_omega0(th, y0p, kt1, kt2);
    let g0 = CMat3::new(
        -kt1 * (t3 + ti) / (t3 - ti), -(kt1 / kt2) * (cr(1.0) - y0p) / y0p, -kt1,
        -kt2 * (t3 + ti) / (t3 - ti), cr(1.0), -kt2,
        cr(1.0), cr(0.0), cr(1.0),
    );
    finish_case("T3", th, omega0, g0, kt1, kt2, CaseScalars::default())
}

fn t3_omega0(th: &ThetaParams, y0p: C64, kt1: C64, kt2: C64) -> CMat3 {
    let (t3, ti) = (th.theta3, th.theta_inf);
    CMat3::new(
        cr(0.0), cr(0.0), kt1 / cr(2.0) * (t3 + ti),
        cr(0.0), cr(0.0), kt2 / cr(2.0) * (t3 + ti),
        (ti - t3) * y0p / (cr(2.0) * kt1), (ti - t3) * (cr(1.0) - y0p) / (cr(2.0) * kt2), -t3,
    )
}

fn build_frobenius(th: &ThetaParams, br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let y0p = br.free.unwrap();
    nonzero(y0p, "y′(0)")?;
    nonzero(cr(1.0) - y0p, "1 − y′(0)")?;
    let omega0 = t3_omega0(th, y0p, kt1, kt2);
    let g0 = CMat3::new(
        kt1, -(kt1 / kt2) * (cr(1.0) - y0p) / y0p, -kt1,
        kt2, cr(1.0), -kt2,
        cr(1.0), cr(0.0), cr(1.0),
    );
    finish_case("Frobenius", th, omega0, g0, kt1, kt2, CaseScalars::default())
}

// builders — T4

fn t4_n_eff(th: &ThetaParams) -> i64 {
    as_int(th.theta1 - th.theta2, INT_TOL).unwrap_or(0)
}

fn build_t4_interior(th: &ThetaParams, _br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let (t3, ti) = (th.theta3, th.theta_inf);
    let n = cr(t4_n_eff(th) as f64);
    let k = th.theta1;
    let omega0 = CMat3::new(
        -k, cr(0.0), kt1 / cr(2.0) * (t3 + ti - n),
        cr(0.0), n - k, kt2 / cr(2.0) * (t3 + ti + n),
        k * (ti - t3 + n) / (cr(2.0) * kt1 * n), (n - k) * (ti - t3 - n) / (cr(2.0) * kt2 * n), -t3,
    );
    // Eigenvector columns for (μ₁, 0, μ₃): v = (ω₁₃/(λ+k), ω₂₃/(λ+k−N), 1).
    // On the resonance loci θ∞ = θ₃ ∓ N an eigenvalue collides with −k or
    // N−k; there Ω₀(3,1) resp. Ω₀(3,2) vanishes too and v limits to e₁/e₂.
    let col = |lam: C64| -> Result<[C64; 3], ClassifyError> {
        if (lam + k).norm() <= DEGEN_TOL {
            return Ok([cr(1.0), cr(0.0), cr(0.0)]);
        }
        if (lam + k - n).norm() <= DEGEN_TOL {
            return Ok([cr(0.0), cr(1.0), cr(0.0)]);
        }
        Ok([omega0[(0, 2)] / (lam + k), omega0[(1, 2)] / (lam + k - n), cr(1.0)])
    };
    let (c1, c2, c3) = (col(th.mu1())?, col(cr(0.0))?, col(th.mu3())?);
    let g0 = CMat3::new(c1[0], c2[0], c3[0], c1[1], c2[1], c3[1], c1[2], c2[2], c3[2]);
    finish_case("T4.interior", th, omega0, g0, kt1, kt2, CaseScalars::default())
}

fn build_t4_k0_nneg(th: &ThetaParams, br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let (t3, ti) = (th.theta3, th.theta_inf);
    let n_eff = t4_n_eff(th);
    let na = cr(n_eff.unsigned_abs() as f64);
    let a = br.free.unwrap() / cr(series::factorial(n_eff.unsigned_abs() + 1));
    let omega0 = CMat3::new(
        cr(0.0), cr(0.0), -kt1 / cr(2.0) * (t3 + ti + na),
        cr(0.0), -na, -kt2 / cr(2.0) * (t3 + ti - na),
        cr(0.0), (t3 - ti - na) / (cr(2.0) * kt2), -t3,
    );
    let g0 = CMat3::new(
        kt1 * (t3 + ti + na) / (t3 - ti + na), cr(1.0), kt1,
        kt2 * (t3 + ti - na) / (t3 - ti - na), cr(0.0), kt2,
        cr(1.0), cr(0.0), cr(1.0),
    );
    finish_case("T4.k0.Nneg", th, omega0, g0, kt1, kt2,
        CaseScalars { a_free: Some(a), ..Default::default() })
}

fn build_t4_k0_npos(th: &ThetaParams, br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let (t3, ti) = (th.theta3, th.theta_inf);
    let n_eff = t4_n_eff(th);
    let na = cr(n_eff.unsigned_abs() as f64);
    let a = nonzero(br.free.unwrap() / cr(series::factorial(n_eff.unsigned_abs() + 1)), "A")?;
    let omega0 = CMat3::new(
        cr(0.0), cr(0.0), cr(0.0),
        cr(0.0), na, -kt2 * (t3 + ti + na) / cr(2.0),
        a * (t3 - ti - na) / (cr(2.0) * kt1), (t3 - ti + na) / (cr(2.0) * kt2), -t3,
    );
    // The (1,2) entry is the 0-eigenvector component solving row 3; the
    // quadratic θ₃²−θ∞²+|N|² seen in some transcriptions fails the eigenvector
    // identity, the correct numerator is (θ₃−|N|)²−θ∞².
    let g12 = -(kt1 / cr(2.0)) * ((t3 - na) * (t3 - na) - ti * ti)
        / (a * na * (t3 - ti - na));
    let g0 = CMat3::new(
        cr(0.0), g12, cr(0.0),
        kt2 * (t3 + ti + na) / (t3 - ti + na), kt2 / cr(2.0) * (t3 + ti + na) / na, kt2,
        cr(1.0), cr(1.0), cr(1.0),
    );
    finish_case("T4.k0.Npos", th, omega0, g0, kt1, kt2,
        CaseScalars { a_free: Some(a), ..Default::default() })
}

fn build_t4_kn_npos(th: &ThetaParams, br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let (t3, ti) = (th.theta3, th.theta_inf);
    let n_eff = t4_n_eff(th);
    let na = cr(n_eff.unsigned_abs() as f64);
    let a = br.free.unwrap() / cr(series::factorial(n_eff.unsigned_abs() + 1));
    let omega0 = CMat3::new(
        -na, cr(0.0), -kt1 * (t3 + ti - na) / cr(2.0),
        cr(0.0), cr(0.0), -kt2 * (t3 + ti + na) / cr(2.0),
        (t3 - ti - na) / (cr(2.0) * kt1), cr(0.0), -t3,
    );
    // Permuting rows 1,2 maps this onto the k = 0, N ≤ −1 structure with the
    // gauge constants swapped; G₀ is that diagonalizer pulled back.
    let g0 = CMat3::new(
        kt1 * (t3 + ti - na) / (t3 - ti - na), cr(0.0), kt1,
        kt2 * (t3 + ti + na) / (t3 - ti + na), cr(1.0), kt2,
        cr(1.0), cr(0.0), cr(1.0),
    );
    finish_case("T4.kN.Npos", th, omega0, g0, kt1, kt2,
        CaseScalars { a_free: Some(a), ..Default::default() })
}

fn build_t4_kn_nneg(th: &ThetaParams, br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let (t3, ti) = (th.theta3, th.theta_inf);
    let n_eff = t4_n_eff(th);
    let na = cr(n_eff.unsigned_abs() as f64);
    let a = nonzero(br.free.unwrap() / cr(series::factorial(n_eff.unsigned_abs() + 1)), "A")?;
    let omega0 = CMat3::new(
        na, cr(0.0), -kt1 / cr(2.0) * (t3 + ti + na),
        cr(0.0), cr(0.0), cr(0.0),
        (t3 - ti + na) / (cr(2.0) * kt1), -a * (t3 - ti - na) / (cr(2.0) * kt2), -t3,
    );
    let g12 = (kt1 / cr(2.0)) * (t3 + ti + na) / na;
    // sign fixed by the 0-eigenvector condition on row 3 (row 2 of Ω₀ vanishes,
    // so this column carries eigenvalue 0)
    let g22 = (kt2 / cr(2.0)) * ((t3 - na) * (t3 - na) - ti * ti)
        / (a * na * (t3 - ti - na));
    let g0 = CMat3::new(
        kt1 * (t3 + ti + na) / (t3 - ti + na), g12, kt1,
        cr(0.0), g22, cr(0.0),
        cr(1.0), cr(1.0), cr(1.0),
    );
    finish_case("T4.kN.Nneg", th, omega0, g0, kt1, kt2,
        CaseScalars { a_free: Some(a), ..Default::default() })
}

fn build_t4_condd(th: &ThetaParams, br: &BranchSpec, kt1: C64, kt2: C64) -> Result<Omega0Case, ClassifyError> {
    let (t2, t3, ti) = (th.theta2, th.theta3, th.theta_inf);
    let n = cr(br.n.unwrap() as f64);
    nonzero(t2, "θ₂")?;
    nonzero(n + t2, "θ₂+N")?;
    let omega0 = CMat3::new(
        -(n + t2), cr(0.0), kt1 / cr(2.0) * (t3 + ti - n),
        cr(0.0), -t2, -kt2 / cr(2.0) * (t3 + ti + n),
        (n + t2) * (ti - t3 + n) / (cr(2.0) * kt1 * n), t2 * (ti - t3 - n) / (cr(2.0) * kt2 * n), -t3,
    );
    // column 1 has removable singularities exactly on the resonance loci
    // θ∞ = θ₃ ± N; after rescaling it limits to e₂ (resp. e₁), consistent
    // with the vanishing of Ω₀(3,2) (resp. Ω₀(3,1)) there
    let col1 = if (t3 - ti + n).norm() <= DEGEN_TOL {
        [cr(0.0), cr(1.0), cr(0.0)]
    } else if (t3 - ti - n).norm() <= DEGEN_TOL {
        [cr(1.0), cr(0.0), cr(0.0)]
    } else {
        [
            -kt1 * (t3 + ti - n) / (t3 - ti - n),
            kt2 * (t3 + ti + n) / (t3 - ti + n),
            cr(1.0),
        ]
    };
    let g0 = CMat3::new(
        col1[0], kt1 / cr(2.0) * (t3 + ti - n) / (t2 + n), -kt1,
        col1[1], -kt2 / cr(2.0) * (t3 + ti + n) / t2, kt2,
        col1[2], cr(1.0), cr(1.0),
    );
    finish_case("T4.condd", th, omega0, g0, kt1, kt2, CaseScalars::default())
}

// ---------------------------------------------------------------------------
// reductions

fn red_t1_n1(th: &ThetaParams, _br: &BranchSpec) -> Result<ReductionSpec, ClassifyError> {
    Ok(ReductionSpec::Confluent { a: th.theta2, b: th.theta2 + th.theta3 })
}

fn red_t1_minus_dpos(th: &ThetaParams, br: &BranchSpec) -> Result<ReductionSpec, ClassifyError> {
    let (t2, t3) = (th.theta2, th.theta3);
    let na = cr(br.n.unwrap().unsigned_abs() as f64);
    let r = nonzero(t3 / na, "θ₃/|N|")?.sqrt();
    let strength = (cr(1.0) - na + t3) * na * r / nonzero(t2 + t3, "θ₂+θ₃")?;
    Ok(ReductionSpec::ConfluentInhomogeneous {
        a: t2,
        b: t2 + t3,
        exponent: cr(1.0) - na - t2,
        strength,
    })
}

fn red_t1_minus_dneg(th: &ThetaParams, br: &BranchSpec) -> Result<ReductionSpec, ClassifyError> {
    let (t2, t3) = (th.theta2, th.theta3);
    let na = cr(br.n.unwrap().unsigned_abs() as f64);
    let r = nonzero(t3 / na, "θ₃/|N|")?.sqrt();
    let l = na * r * (t3 - na + cr(1.0)) / nonzero(t2 + t3 - na + cr(1.0), "θ₂+θ₃−|N|+1")?;
    Ok(ReductionSpec::ConfluentInhomogeneous {
        a: t2 - na + cr(1.0),
        b: t2 + t3 - na + cr(1.0),
        exponent: -t2,
        strength: -l,
    })
}

fn red_t1_plus_dpos(th: &ThetaParams, br: &BranchSpec) -> Result<ReductionSpec, ClassifyError> {
    let na = cr(br.n.unwrap().unsigned_abs() as f64);
    Ok(ReductionSpec::Confluent {
        a: th.theta2 + na - cr(1.0),
        b: th.theta2 + th.theta3 + na - cr(1.0),
    })
}

fn red_t2(th: &ThetaParams, _br: &BranchSpec) -> Result<ReductionSpec, ClassifyError> {
    let (t1, t2, t3, ti) = (th.theta1, th.theta2, th.theta3, th.theta_inf);
    Ok(ReductionSpec::Hyp22(Hyp22Coeffs {
        a0: (t1 + t2 + t3 - ti) * (t1 + t2 - t3 + ti) / cr(4.0) - t1 * t2,
        a1: t3 - ti - cr(1.0),
        a2: cr(-1.0),
        b1: -ti / cr(2.0) * (t1 + t2 + t3 - ti),
        b2: (cr(2.0) + cr(3.0) * ti - t1 - t2 - t3) / cr(2.0),
    }))
}

fn red_t3(th: &ThetaParams, _br: &BranchSpec) -> Result<ReductionSpec, ClassifyError> {
    Ok(ReductionSpec::Confluent { a: (th.theta_inf - th.theta3) / cr(2.0), b: th.theta_inf })
}

/// Common (2,2)-reduction for the integer θ₁−θ₂ = N families; θ₂ may itself be
/// the integer k−N of the all-integer case.
fn t4_hyp22(n: C64, t2: C64, t3: C64, ti: C64) -> Hyp22Coeffs {
    Hyp22Coeffs {
        a0: (n * n
            + cr(2.0) * t2 * (cr(-2.0) + t2 + t3 - ti)
            + n * (cr(-2.0) + cr(2.0) * t2 + t3 - ti))
            / cr(2.0),
        a1: (cr(-4.0) + n + cr(2.0) * t2 + cr(3.0) * t3 - cr(3.0) * ti) / cr(2.0),
        a2: cr(-1.0),
        b1: (cr(2.0) + ti) * (cr(2.0) - n - cr(2.0) * t2 - t3 + ti) / cr(2.0),
        b2: (cr(8.0) - n - cr(2.0) * t2 - t3 + cr(3.0) * ti) / cr(2.0),
    }
}

fn red_t4_interior(th: &ThetaParams, _br: &BranchSpec) -> Result<ReductionSpec, ClassifyError> {
    let n = cr(t4_n_eff(th) as f64);
    Ok(ReductionSpec::Hyp22(t4_hyp22(n, th.theta2, th.theta3, th.theta_inf)))
}

fn red_t4_condd(th: &ThetaParams, br: &BranchSpec) -> Result<ReductionSpec, ClassifyError> {
    let n = cr(br.n.unwrap() as f64);
    Ok(ReductionSpec::Hyp22(t4_hyp22(n, th.theta2, th.theta3, th.theta_inf)))
}

fn red_t4_conf_plus(th: &ThetaParams, _br: &BranchSpec) -> Result<ReductionSpec, ClassifyError> {
    let na = cr(t4_n_eff(th).unsigned_abs() as f64);
    Ok(ReductionSpec::Confluent { a: (th.theta_inf - th.theta3 + na) / cr(2.0), b: th.theta_inf })
}

fn red_t4_inhom(th: &ThetaParams, _br: &BranchSpec) -> Result<ReductionSpec, ClassifyError> {
    let (t3, ti) = (th.theta3, th.theta_inf);
    let na = cr(t4_n_eff(th).unsigned_abs() as f64);
    Ok(ReductionSpec::ConfluentInhomogeneous {
        a: (ti - t3 - na) / cr(2.0),
        b: ti,
        exponent: cr(0.0),
        strength: -(t3 + ti - na) * (t3 - ti + na) / cr(2.0),
    })
}

fn red_frobenius(th: &ThetaParams, _br: &BranchSpec) -> Result<ReductionSpec, ClassifyError> {
    Ok(ReductionSpec::Confluent { a: th.theta_inf / cr(2.0), b: th.theta_inf })
}

// ---------------------------------------------------------------------------
// the table

const FAIL_GENERIC: &str = "The vanishing condition does not hold: with y(0) = (θ∞−1±θ₃)/(θ∞−1) \
the limits of Ω₁₂ and Ω₂₁ would force θ∞ = θ₃−1, a contradiction";
const FAIL_GENERIC_FREE: &str = "The vanishing condition does not hold: the limits would force \
θ₁−θ₂ = 1 and θ₁−θ₂ = −1 simultaneously";
const FAIL_T1: &str = "The vanishing condition does not hold: holomorphic vanishing of Ω₁₂ and \
Ω₂₁ on this family requires θ₁−θ₂ = ±(|N|−1) with N ≤ −1";
const FAIL_T2_PLUS: &str = "The vanishing condition does not hold: the limits force θ₂ = 0, \
which collapses this branch onto the θ₁−θ₂ slope family";
const FAIL_T4_PLUS: &str = "The vanishing condition does not hold: a branch with θ₁+θ₂ = N \
admits the limit only for θ₁ ∈ {0, N}";
const FAIL_T4_MINUS: &str = "No Taylor family: θ₁−θ₂ = N requires θ₁ ∈ {0,…,N} or \
{θ₃+θ∞−1, −θ₃+θ∞−1} ∩ 𝒩_N ≠ ∅";

fn g_generic(_th: &ThetaParams, br: &BranchSpec) -> bool {
    matches!(br.variant, BranchVariant::Plus | BranchVariant::Minus)
}

fn g_generic_free(_th: &ThetaParams, br: &BranchSpec) -> bool {
    br.variant == BranchVariant::Free
}

fn t1_diff(th: &ThetaParams) -> Option<i64> {
    theta_diff_int(th)
}

fn g_t1_minus_n1(th: &ThetaParams, br: &BranchSpec) -> bool {
    br.variant == BranchVariant::Minus && br.n == Some(-1) && t1_diff(th) == Some(0)
}

fn g_t1_plus_n1(th: &ThetaParams, br: &BranchSpec) -> bool {
    br.variant == BranchVariant::Plus && br.n == Some(-1) && t1_diff(th) == Some(0)
}

fn g_t1_minus_dpos(th: &ThetaParams, br: &BranchSpec) -> bool {
    br.variant == BranchVariant::Minus
        && br.n.is_some_and(|n| n <= -2 && t1_diff(th) == Some(n.abs() - 1))
}

fn g_t1_minus_dneg(th: &ThetaParams, br: &BranchSpec) -> bool {
    br.variant == BranchVariant::Minus
        && br.n.is_some_and(|n| n <= -2 && t1_diff(th) == Some(1 - n.abs()))
}

fn g_t1_plus_dpos(th: &ThetaParams, br: &BranchSpec) -> bool {
    br.variant == BranchVariant::Plus
        && br.n.is_some_and(|n| n <= -2 && t1_diff(th) == Some(n.abs() - 1))
}

fn g_t1_plus_dneg(th: &ThetaParams, br: &BranchSpec) -> bool {
    br.variant == BranchVariant::Plus
        && br.n.is_some_and(|n| n <= -2 && t1_diff(th) == Some(1 - n.abs()))
}

fn g_t1_rest(_th: &ThetaParams, _br: &BranchSpec) -> bool {
    true
}

fn g_t2(th: &ThetaParams, br: &BranchSpec) -> bool {
    match br.variant {
        BranchVariant::Minus => as_int(th.theta1 - th.theta2, INT_TOL).is_none(),
        // θ₂ = 0 makes the two slope families coincide.
        BranchVariant::Plus => is_zero_int(th.theta2) && as_int(th.theta1, INT_TOL).is_none(),
        _ => false,
    }
}

fn g_t2_plus(th: &ThetaParams, br: &BranchSpec) -> bool {
    br.variant == BranchVariant::Plus && as_int(th.theta1 + th.theta2, INT_TOL).is_none()
}

fn g_t3(_th: &ThetaParams, _br: &BranchSpec) -> bool {
    true
}

fn t4_k_pattern(th: &ThetaParams) -> Option<(i64, i64)> {
    // (k, N) with θ₁ = k, θ₂ = k − N, both integers
    let k = as_int(th.theta1, INT_TOL)?;
    let km = as_int(th.theta2, INT_TOL)?;
    let n = k - km;
    if n == 0 {
        None
    } else {
        Some((k, n))
    }
}

fn g_t4_k0_nneg(th: &ThetaParams, _br: &BranchSpec) -> bool {
    matches!(t4_k_pattern(th), Some((0, n)) if n <= -1)
}

fn g_t4_k0_npos(th: &ThetaParams, _br: &BranchSpec) -> bool {
    matches!(t4_k_pattern(th), Some((0, n)) if n >= 1)
}

fn g_t4_kn_npos(th: &ThetaParams, _br: &BranchSpec) -> bool {
    matches!(t4_k_pattern(th), Some((k, n)) if k == n && n >= 1)
}

fn g_t4_kn_nneg(th: &ThetaParams, _br: &BranchSpec) -> bool {
    matches!(t4_k_pattern(th), Some((k, n)) if k == n && n <= -1)
}

fn g_t4_interior(th: &ThetaParams, br: &BranchSpec) -> bool {
    br.variant == BranchVariant::Minus
        && matches!(t4_k_pattern(th), Some((k, n)) if k != 0 && k != n && cond_holds(th.theta1, n))
}

fn g_t4_condd(th: &ThetaParams, br: &BranchSpec) -> bool {
    br.variant == BranchVariant::Minus && br.n.is_some_and(|n| condd_holds(th, n))
}

fn g_t4_plus_rest(_th: &ThetaParams, br: &BranchSpec) -> bool {
    br.variant == BranchVariant::Plus
}

fn g_t4_rest(_th: &ThetaParams, _br: &BranchSpec) -> bool {
    true
}

const CONFLUENT: &str = "confluent hypergeometric";
const CONFLUENT_INHOM: &str = "inhomogeneous confluent hypergeometric";
const HYP22: &str = "generalized hypergeometric (2,2)";

pub static CASE_TABLE: &[CaseRow] = &[
    CaseRow {
        id: "GenericY0.free",
        family: BranchFamily::GenericY0,
        condition: "θ₃ = 0, θ∞ = 1, y(0) free",
        outcome: CaseOutcome::Fails { reason: FAIL_GENERIC_FREE },
        guard: g_generic_free,
        build: None,
        reduce: None,
    },
    CaseRow {
        id: "GenericY0",
        family: BranchFamily::GenericY0,
        condition: "y(0) = (θ∞−1±θ₃)/(θ∞−1), θ∞±θ₃ ∉ ℤ",
        outcome: CaseOutcome::Fails { reason: FAIL_GENERIC },
        guard: g_generic,
        build: None,
        reduce: None,
    },
    CaseRow {
        id: "T1.N-1.theta3eq",
        family: BranchFamily::T1,
        condition: "θ∞ = θ₃ + N + 1, N = −1, θ₁ = θ₂",
        outcome: CaseOutcome::Holds { special_function: CONFLUENT },
        guard: g_t1_minus_n1,
        build: Some(build_t1_minus_n1),
        reduce: Some(red_t1_n1),
    },
    CaseRow {
        id: "T1.N-1.theta3neg",
        family: BranchFamily::T1,
        condition: "θ∞ = −θ₃ + N + 1, N = −1, θ₁ = θ₂",
        outcome: CaseOutcome::Holds { special_function: CONFLUENT },
        guard: g_t1_plus_n1,
        build: Some(build_t1_plus_n1),
        reduce: Some(red_t1_n1),
    },
    CaseRow {
        id: "T1.theta3eq.dpos",
        family: BranchFamily::T1,
        condition: "θ∞ = θ₃ + N + 1, N ≤ −2, θ₁−θ₂ = |N|−1",
        outcome: CaseOutcome::Holds { special_function: CONFLUENT_INHOM },
        guard: g_t1_minus_dpos,
        build: Some(build_t1_minus_dpos),
        reduce: Some(red_t1_minus_dpos),
    },
    CaseRow {
        id: "T1.theta3eq.dneg",
        family: BranchFamily::T1,
        condition: "θ∞ = θ₃ + N + 1, N ≤ −2, θ₁−θ₂ = −(|N|−1)",
        outcome: CaseOutcome::Holds { special_function: CONFLUENT_INHOM },
        guard: g_t1_minus_dneg,
        build: Some(build_t1_minus_dneg),
        reduce: Some(red_t1_minus_dneg),
    },
    CaseRow {
        id: "T1.theta3neg.dpos",
        family: BranchFamily::T1,
        condition: "θ∞ = −θ₃ + N + 1, N ≤ −2, θ₁−θ₂ = |N|−1",
        outcome: CaseOutcome::Holds { special_function: CONFLUENT },
        guard: g_t1_plus_dpos,
        build: Some(build_t1_plus_dpos),
        reduce: Some(red_t1_plus_dpos),
    },
    CaseRow {
        id: "T1.theta3neg.dneg",
        family: BranchFamily::T1,
        condition: "θ∞ = −θ₃ + N + 1, N ≤ −2, θ₁−θ₂ = −(|N|−1)",
        outcome: CaseOutcome::Holds { special_function: CONFLUENT },
        guard: g_t1_plus_dneg,
        build: Some(build_t1_plus_dneg),
        reduce: Some(red_t1_n1),
    },
    CaseRow {
        id: "T1.fails",
        family: BranchFamily::T1,
        condition: "remaining T1 data (interior 𝒩_N member, θ₁+θ₂ route, θ∞−1 ∈ condizione1, N > 0)",
        outcome: CaseOutcome::Fails { reason: FAIL_T1 },
        guard: g_t1_rest,
        build: None,
        reduce: None,
    },
    CaseRow {
        id: "T2",
        family: BranchFamily::T2,
        condition: "y′(0) = θ₁/(θ₁−θ₂), θ₁−θ₂ ∉ ℤ",
        outcome: CaseOutcome::Holds { special_function: HYP22 },
        guard: g_t2,
        build: Some(build_t2),
        reduce: Some(red_t2),
    },
    CaseRow {
        id: "T2.plus",
        family: BranchFamily::T2,
        condition: "y′(0) = θ₁/(θ₁+θ₂), θ₁+θ₂ ∉ ℤ, θ₂ ≠ 0",
        outcome: CaseOutcome::Fails { reason: FAIL_T2_PLUS },
        guard: g_t2_plus,
        build: None,
        reduce: None,
    },
    CaseRow {
        id: "T3",
        family: BranchFamily::T3,
        condition: "θ₁ = θ₂ = 0, y′(0) free",
        outcome: CaseOutcome::Holds { special_function: CONFLUENT },
        guard: g_t3,
        build: Some(build_t3),
        reduce: Some(red_t3),
    },
    CaseRow {
        id: "T4.k0.Nneg",
        family: BranchFamily::T4,
        condition: "θ₁ = 0, θ₂ = |N|, N ≤ −1",
        outcome: CaseOutcome::Holds { special_function: CONFLUENT },
        guard: g_t4_k0_nneg,
        build: Some(build_t4_k0_nneg),
        reduce: Some(red_t4_conf_plus),
    },
    CaseRow {
        id: "T4.k0.Npos",
        family: BranchFamily::T4,
        condition: "θ₁ = 0, θ₂ = −N, N ≥ 1",
        outcome: CaseOutcome::Holds { special_function: CONFLUENT_INHOM },
        guard: g_t4_k0_npos,
        build: Some(build_t4_k0_npos),
        reduce: Some(red_t4_inhom),
    },
    CaseRow {
        id: "T4.kN.Npos",
        family: BranchFamily::T4,
        condition: "θ₁ = N, θ₂ = 0, N ≥ 1",
        outcome: CaseOutcome::Holds { special_function: CONFLUENT },
        guard: g_t4_kn_npos,
        build: Some(build_t4_kn_npos),
        reduce: Some(red_t4_conf_plus),
    },
    CaseRow {
        id: "T4.kN.Nneg",
        family: BranchFamily::T4,
        condition: "θ₁ = N, θ₂ = 0, N ≤ −1",
        outcome: CaseOutcome::Holds { special_function: CONFLUENT_INHOM },
        guard: g_t4_kn_nneg,
        build: Some(build_t4_kn_nneg),
        reduce: Some(red_t4_inhom),
    },
    CaseRow {
        id: "T4.interior",
        family: BranchFamily::T4,
        condition: "θ₁−θ₂ = N, θ₁ = k ∈ {0,…,N}, k ∉ {0, N}",
        outcome: CaseOutcome::Holds { special_function: HYP22 },
        guard: g_t4_interior,
        build: Some(build_t4_interior),
        reduce: Some(red_t4_interior),
    },
    CaseRow {
        id: "T4.condd",
        family: BranchFamily::T4,
        condition: "θ₁−θ₂ = N, {θ₃+θ∞−1, −θ₃+θ∞−1} ∩ 𝒩_N ≠ ∅",
        outcome: CaseOutcome::Holds { special_function: HYP22 },
        guard: g_t4_condd,
        build: Some(build_t4_condd),
        reduce: Some(red_t4_condd),
    },
    CaseRow {
        id: "T4.plus.fails",
        family: BranchFamily::T4,
        condition: "θ₁+θ₂ = N with θ₁ ∉ {0, N}",
        outcome: CaseOutcome::Fails { reason: FAIL_T4_PLUS },
        guard: g_t4_plus_rest,
        build: None,
        reduce: None,
    },
    CaseRow {
        id: "T4.fails",
        family: BranchFamily::T4,
        condition: "θ₁−θ₂ = N with neither integer-θ₁ pattern nor the 𝒩_N resonance condition",
        outcome: CaseOutcome::Fails { reason: FAIL_T4_MINUS },
        guard: g_t4_rest,
        build: None,
        reduce: None,
    },
    CaseRow {
        id: "Frobenius",
        family: BranchFamily::Frobenius,
        condition: "θ₁ = θ₂ = θ₃ = 0, θ∞ = 2μ, y′(0) free",
        outcome: CaseOutcome::Holds { special_function: CONFLUENT },
        guard: g_t3,
        build: Some(build_frobenius),
        reduce: Some(red_frobenius),
    },
];

// ---------------------------------------------------------------------------
// public operations

pub fn case_by_id(id: &str) -> Option<&'static CaseRow> {
    CASE_TABLE.iter().find(|r| r.id == id)
}

pub fn all_case_ids() -> Vec<&'static str> {
    CASE_TABLE.iter().map(|r| r.id).collect()
}

/// First table row whose guard accepts (θ, branch). Rows are ordered so that
/// within a family the specific constructive cases precede the catch-alls;
/// where two constructive rows overlap (the all-integer T4 pattern may also
/// satisfy the 𝒩_N resonance condition) the integer pattern wins and the
/// other row stays reachable through [`case_by_id`] / [`omega0_for_case`].
pub fn match_case(th: &ThetaParams, br: &BranchSpec) -> Result<&'static CaseRow, ClassifyError> {
    validate_branch(th, br)?;
    CASE_TABLE
        .iter()
        .find(|r| r.family == br.family && (r.guard)(th, br))
        .ok_or_else(|| ClassifyError::Unsupported("no table row matches".into()))
}

/// Does Ω(x) extend holomorphically to x = 0 with Ω₁₂, Ω₂₁ → 0 on this branch?
pub fn coalcond_holds(th: &ThetaParams, br: &BranchSpec) -> CoalVerdict {
    match match_case(th, br) {
        Ok(row) => match row.outcome {
            CaseOutcome::Holds { special_function } => CoalVerdict {
                holds: true,
                case_id: Some(row.id),
                reason: format!("reduces to {special_function}"),
            },
            CaseOutcome::Fails { reason } => CoalVerdict {
                holds: false,
                case_id: Some(row.id),
                reason: reason.to_string(),
            },
        },
        Err(e) => CoalVerdict { holds: false, case_id: None, reason: e.to_string() },
    }
}

/// Default gauge constants: the distinguished skew choice for the θ = 0
/// family, 1 otherwise.
fn canonical_kt(br: &BranchSpec) -> (C64, C64) {
    if br.family == BranchFamily::Frobenius {
        let y0p = br.free.unwrap_or_else(|| cr(0.5));
        (C64::i() * y0p.sqrt(), C64::i() * (cr(1.0) - y0p).sqrt())
    } else {
        (cr(1.0), cr(1.0))
    }
}

pub fn omega0_closed_form(th: &ThetaParams, br: &BranchSpec) -> Result<Omega0Case, ClassifyError> {
    let (kt1, kt2) = canonical_kt(br);
    omega0_closed_form_with(th, br, kt1, kt2)
}

pub fn omega0_closed_form_with(
    th: &ThetaParams,
    br: &BranchSpec,
    kt1: C64,
    kt2: C64,
) -> Result<Omega0Case, ClassifyError> {
    let row = match_case(th, br)?;
    build_row(row, th, br, kt1, kt2)
}

/// Closed form for an explicitly selected table row (needed where rows overlap).
pub fn omega0_for_case(
    id: &str,
    th: &ThetaParams,
    br: &BranchSpec,
    kt1: C64,
    kt2: C64,
) -> Result<Omega0Case, ClassifyError> {
    let row = case_by_id(id)
        .ok_or_else(|| ClassifyError::Unsupported(format!("unknown case id {id:?}")))?;
    validate_branch(th, br)?;
    if row.family != br.family || !(row.guard)(th, br) {
        return Err(ClassifyError::Unsupported(format!(
            "case {id:?} does not apply to this (θ, branch)"
        )));
    }
    build_row(row, th, br, kt1, kt2)
}

fn build_row(
    row: &'static CaseRow,
    th: &ThetaParams,
    br: &BranchSpec,
    kt1: C64,
    kt2: C64,
) -> Result<Omega0Case, ClassifyError> {
    if kt1.norm() <= DEGEN_TOL || kt2.norm() <= DEGEN_TOL {
        return Err(ClassifyError::Degenerate("gauge constants must be nonzero".into()));
    }
    match (row.build, row.outcome) {
        (Some(f), _) => f(th, br, kt1, kt2),
        (None, CaseOutcome::Fails { reason }) => {
            Err(ClassifyError::VanishingFails(reason.to_string()))
        }
        (None, _) => Err(ClassifyError::Unsupported(format!("case {:?} has no closed form", row.id))),
    }
}

pub fn reduction_params(th: &ThetaParams, br: &BranchSpec) -> Result<ReductionSpec, ClassifyError> {
    let row = match_case(th, br)?;
    reduction_for_row(row, th, br)
}

pub fn reduction_for_case(
    id: &str,
    th: &ThetaParams,
    br: &BranchSpec,
) -> Result<ReductionSpec, ClassifyError> {
    let row = case_by_id(id)
        .ok_or_else(|| ClassifyError::Unsupported(format!("unknown case id {id:?}")))?;
    validate_branch(th, br)?;
    if row.family != br.family || !(row.guard)(th, br) {
        return Err(ClassifyError::Unsupported(format!(
            "case {id:?} does not apply to this (θ, branch)"
        )));
    }
    reduction_for_row(row, th, br)
}

fn reduction_for_row(
    row: &'static CaseRow,
    th: &ThetaParams,
    br: &BranchSpec,
) -> Result<ReductionSpec, ClassifyError> {
    match (row.reduce, row.outcome) {
        (Some(f), _) => f(th, br),
        (None, CaseOutcome::Fails { reason }) => {
            Err(ClassifyError::VanishingFails(reason.to_string()))
        }
        (None, _) => Err(ClassifyError::Unsupported(format!("case {:?} has no reduction", row.id))),
    }
}

// ---------------------------------------------------------------------------
