//! Variational formulas on a finite alphabet.
//!
//! The central object is the objective
//!
//! ```text
//! J_α(μ) = D(μ‖θ)/α − D(μ‖ν)/(α−1)
//! ```
//!
//! whose supremum (α > 1 over μ ⪯ ν, α < 0 over μ ⪯ θ) or infimum
//! (0 < α < 1 over μ ⪯ ν, μ ⪯ θ) is the Rényi divergence `R_α(ν‖θ)`. The
//! extremum is attained by the geometric mixture `μ* ∝ ν^α θ^{1−α}`.
//!
//! The same module carries the Gibbs-tilt formula for `log Σ e^g μ` and the
//! pair of exponential-integral formulas that mix a Rényi penalty with
//! tilted log-moment generating functions.

use serde::Serialize;

use crate::dist::{abs_cont, expectation, log_mgf, rel_entropy, renyi_div, scaled_log_sum};
use crate::numeric::{ln0, logsumexp};
use crate::tol;
use crate::{Alpha, Dist, Error, ExtReal, Result};

/// Which of the three α-ranges a problem falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    #[serde(rename = "alpha_gt_1")]
    AlphaGt1,
    #[serde(rename = "alpha_in_01")]
    AlphaIn01,
    #[serde(rename = "alpha_lt_0")]
    AlphaLt0,
}

impl Regime {
    pub fn of(alpha: Alpha) -> Regime {
        let a = alpha.value();
        if a > 1.0 {
            Regime::AlphaGt1
        } else if a > 0.0 {
            Regime::AlphaIn01
        } else {
            Regime::AlphaLt0
        }
    }

    /// True when the variational problem is a supremum.
    pub fn is_sup(self) -> bool {
        self != Regime::AlphaIn01
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::AlphaGt1 => "alpha_gt_1",
            Regime::AlphaIn01 => "alpha_in_01",
            Regime::AlphaLt0 => "alpha_lt_0",
        }
    }
}

/// Solved variational problem.
#[derive(Debug, Clone, PartialEq)]
pub struct VarSolution {
    pub value: ExtReal,
    /// Absent when the extremum is not attained (empty feasible set).
    pub optimizer: Option<Dist>,
    /// `None` for the α-free Gibbs formula.
    pub regime: Option<Regime>,
    /// `|value − objective(optimizer)|`, recomputed independently of the construction.
    pub residual: f64,
}

/// Outcome of a one-sided inequality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertResult {
    /// Signed slack; nonnegative when the inequality holds.
    pub slack: ExtReal,
    pub tolerance: f64,
    pub pass: bool,
}

impl CertResult {
    pub fn new(slack: ExtReal, tolerance: f64) -> Self {
        Self { slack, tolerance, pass: slack >= ExtReal::Finite(-tolerance) }
    }

    /// Re-judge the same slack against a different tolerance.
    pub fn with_tolerance(self, tolerance: f64) -> Self {
        Self::new(self.slack, tolerance)
    }
}

/// Bounded function on the alphabet (all entries finite).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedFn {
    values: Vec<f64>,
}

impl BoundedFn {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if let Some((idx, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { idx, value });
        }
        Ok(Self { values })
    }

    pub fn constant(d: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; d])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    fn scaled(&self, c: f64) -> Vec<f64> {
        self.values.iter().map(|v| c * v).collect()
    }

    fn ensure_dim(&self, p: &Dist) -> Result<()> {
        if self.dim() != p.dim() {
            return Err(Error::DimensionMismatch(self.dim(), p.dim()));
        }
        Ok(())
    }
}

/// `D(μ‖θ)/α − D(μ‖ν)/(α−1)`.
///
/// Returns [`Error::Indeterminate`] if both entropies are infinite with
/// opposing signs, which cannot happen for μ in the regime's feasible set.
pub fn objective(alpha: Alpha, mu: &Dist, nu: &Dist, theta: &Dist) -> Result<ExtReal> {
    let a = alpha.value();
    let to_theta = rel_entropy(mu, theta)?.scale(1.0 / a);
    let to_nu = rel_entropy(mu, nu)?.scale(-1.0 / (a - 1.0));
    to_theta.checked_add(to_nu)
}

/// Closed-form extremum of the objective, which equals `R_α(ν‖θ)`.
///
/// * α > 1, `ν ⋠ θ`: value `+∞`, witnessed by the point mass on the smallest
///   state with `θ(x) = 0 < ν(x)`.
/// * 0 < α < 1, disjoint supports: value `+∞`, no optimizer (nothing is feasible).
/// * otherwise the geometric mixture `μ* ∝ ν^α θ^{1−α}` on `{νθ > 0}`.
/// * α < 0 is solved as the α' = 1 − α problem with ν and θ exchanged.
pub fn solve_variational(alpha: Alpha, nu: &Dist, theta: &Dist) -> Result<VarSolution> {
    nu.ensure_same_dim(theta)?;
    let regime = Regime::of(alpha);
    let (optimizer, value) = match regime {
        Regime::AlphaLt0 => {
            let swapped = solve_variational(alpha.dual(), theta, nu)?;
            (swapped.optimizer, swapped.value)
        }
        _ => geometric_mixture(alpha, nu, theta)?,
    };
    let residual = match &optimizer {
        Some(mu) => objective(alpha, mu, nu, theta)?.distance(value),
        None => 0.0,
    };
    Ok(VarSolution { value, optimizer, regime: Some(regime), residual })
}

/// Regimes α > 0 only.
fn geometric_mixture(alpha: Alpha, nu: &Dist, theta: &Dist) -> Result<(Option<Dist>, ExtReal)> {
    let a = alpha.value();
    if a > 1.0 && !abs_cont(nu, theta)? {
        let x = (0..nu.dim())
            .find(|&x| theta.get(x) == 0.0 && nu.get(x) > 0.0)
            .expect("a violating state exists");
        return Ok((Some(Dist::point_mass(nu.dim(), x)?), ExtReal::PosInf));
    }
    let logs = tilted_log_weights(a, nu, theta);
    let log_z = logsumexp(logs.iter().copied());
    if log_z == f64::NEG_INFINITY {
        return Ok((None, ExtReal::PosInf));
    }
    Ok((Some(Dist::from_log_weights(&logs)?), scaled_log_sum(alpha, log_z)))
}

/// `log(ν^α θ^{1−α})` on the common support, `-inf` elsewhere.
fn tilted_log_weights(a: f64, nu: &Dist, theta: &Dist) -> Vec<f64> {
    nu.weights()
        .iter()
        .zip(theta.weights())
        .map(|(&n, &t)| {
            if n > 0.0 && t > 0.0 {
                t.ln() + a * (n.ln() - t.ln())
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect()
}

/// One member of the truncated family `μ_K ∝ ν^α θ^{1−α} 1(t ≤ K)`, where
/// `t = (ν/θ)^α` is the tilted density with respect to θ.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedStep {
    /// `log K`.
    pub log_k: f64,
    pub mu: Dist,
    pub log_z: f64,
    /// `log Z_K / (α(α−1))`.
    pub value: f64,
}

/// Truncated optimizer at threshold `exp(log_k)`. Only defined for α > 1 and ν ⪯ θ.
pub fn truncated_optimizer(alpha: Alpha, nu: &Dist, theta: &Dist, log_k: f64) -> Result<TruncatedStep> {
    let log_t = truncation_log_densities(alpha, nu, theta)?;
    let logs: Vec<f64> = log_t
        .iter()
        .zip(theta.weights())
        .map(|(&lt, &th)| if lt <= log_k { lt + ln0(th) } else { f64::NEG_INFINITY })
        .collect();
    let log_z = logsumexp(logs.iter().copied());
    if log_z == f64::NEG_INFINITY {
        return Err(Error::Infeasible(format!("truncation level log K = {log_k} leaves no mass")));
    }
    Ok(TruncatedStep { log_k, mu: Dist::from_log_weights(&logs)?, log_z, value: log_z / alpha.scale() })
}

/// The truncated family on a doubling grid of thresholds, starting at the
/// median tilted density and ending at the largest one.
pub fn truncation_family(alpha: Alpha, nu: &Dist, theta: &Dist) -> Result<Vec<TruncatedStep>> {
    const MAX_STEPS: usize = 256;
    let mut log_t: Vec<f64> = truncation_log_densities(alpha, nu, theta)?
        .into_iter()
        .filter(|l| *l > f64::NEG_INFINITY)
        .collect();
    log_t.sort_by(f64::total_cmp);
    let top = *log_t.last().expect("ν has at least one atom");
    let mut log_k = log_t[log_t.len() / 2];
    let mut steps = Vec::new();
    while log_k < top && steps.len() < MAX_STEPS {
        steps.push(truncated_optimizer(alpha, nu, theta, log_k)?);
        log_k += std::f64::consts::LN_2;
    }
    steps.push(truncated_optimizer(alpha, nu, theta, top)?);
    Ok(steps)
}

fn truncation_log_densities(alpha: Alpha, nu: &Dist, theta: &Dist) -> Result<Vec<f64>> {
    nu.ensure_same_dim(theta)?;
    if Regime::of(alpha) != Regime::AlphaGt1 {
        return Err(Error::Invalid("the truncated family is defined for alpha > 1".into()));
    }
    if !abs_cont(nu, theta)? {
        return Err(Error::NotAbsolutelyContinuous("truncation needs nu absolutely continuous w.r.t. theta"));
    }
    let a = alpha.value();
    Ok(nu
        .weights()
        .iter()
        .zip(theta.weights())
        .map(|(&n, &t)| if n > 0.0 { a * (n.ln() - t.ln()) } else { f64::NEG_INFINITY })
        .collect())
}

fn ensure_feasible(alpha: Alpha, mu: &Dist, nu: &Dist, theta: &Dist) -> Result<()> {
    let ok = match Regime::of(alpha) {
        Regime::AlphaGt1 => abs_cont(mu, nu)?,
        Regime::AlphaIn01 => abs_cont(mu, nu)? && abs_cont(mu, theta)?,
        Regime::AlphaLt0 => abs_cont(mu, theta)?,
    };
    if !ok {
        return Err(Error::Infeasible(format!(
            "mu is outside the feasible set of regime {}",
            Regime::of(alpha).as_str()
        )));
    }
    Ok(())
}

/// Check `R_α(ν‖θ) ≥ J_α(μ)` (sup regimes) or `R_α(ν‖θ) ≤ J_α(μ)` (0 < α < 1)
/// at a feasible μ. The slack is oriented so that it is nonnegative when the
/// inequality holds.
pub fn certify_inequality(alpha: Alpha, mu: &Dist, nu: &Dist, theta: &Dist) -> Result<CertResult> {
    mu.ensure_same_dim(nu)?;
    ensure_feasible(alpha, mu, nu, theta)?;
    let r = renyi_div(alpha, nu, theta)?;
    let j = objective(alpha, mu, nu, theta)?;
    let slack = if Regime::of(alpha).is_sup() { r.gap(j) } else { j.gap(r) };
    Ok(CertResult::new(slack, tol::IID_CERTIFY))
}

/// `log Σ_x e^{g(x)} μ(x)`.
pub fn log_exp_integral(g: &BoundedFn, mu: &Dist) -> Result<f64> {
    g.ensure_dim(mu)?;
    Ok(log_mgf(g.values(), mu))
}

/// Gibbs tilt `θ* ∝ e^g μ`, which attains `sup_θ (Σ g θ − D(θ‖μ)) = log Σ e^g μ`.
pub fn dv_solve(g: &BoundedFn, mu: &Dist) -> Result<VarSolution> {
    let value = log_exp_integral(g, mu)?;
    let theta = tilt(g.values(), mu)?;
    let achieved = gibbs_objective(g, &theta, mu)?;
    Ok(VarSolution {
        value: ExtReal::Finite(value),
        optimizer: Some(theta),
        regime: None,
        residual: achieved.distance(ExtReal::Finite(value)),
    })
}

/// `Σ g θ − D(θ‖μ)`.
pub fn gibbs_objective(g: &BoundedFn, theta: &Dist, mu: &Dist) -> Result<ExtReal> {
    g.ensure_dim(theta)?;
    ExtReal::Finite(expectation(g.values(), theta)).checked_sub(rel_entropy(theta, mu)?)
}

fn tilt(f: &[f64], p: &Dist) -> Result<Dist> {
    let logs: Vec<f64> = f.iter().zip(p.weights()).map(|(&v, &w)| v + ln0(w)).collect();
    Dist::from_log_weights(&logs)
}

/// `(1/α) log Σ e^{αg} θ`, the value of the supremum form.
pub fn acd_sup_value(alpha: Alpha, g: &BoundedFn, theta: &Dist) -> Result<f64> {
    g.ensure_dim(theta)?;
    Ok(log_mgf(&g.scaled(alpha.value()), theta) / alpha.value())
}

/// `(1/(α−1)) log Σ e^{(α−1)g} ν`, the value of the infimum form.
pub fn acd_inf_value(alpha: Alpha, g: &BoundedFn, nu: &Dist) -> Result<f64> {
    g.ensure_dim(nu)?;
    let am1 = alpha.value() - 1.0;
    Ok(log_mgf(&g.scaled(am1), nu) / am1)
}

/// Objective of the supremum form at ν: `(1/(α−1)) log Σ e^{(α−1)g} ν − R_α(ν‖θ)`.
pub fn acd_sup_objective(alpha: Alpha, g: &BoundedFn, nu: &Dist, theta: &Dist) -> Result<ExtReal> {
    ExtReal::Finite(acd_inf_value(alpha, g, nu)?).checked_sub(renyi_div(alpha, nu, theta)?)
}

/// Objective of the infimum form at θ: `(1/α) log Σ e^{αg} θ + R_α(ν‖θ)`.
pub fn acd_inf_objective(alpha: Alpha, g: &BoundedFn, nu: &Dist, theta: &Dist) -> Result<ExtReal> {
    ExtReal::Finite(acd_sup_value(alpha, g, theta)?).checked_add(renyi_div(alpha, nu, theta)?)
}

/// Supremum form: `(1/α) log Σ e^{αg} θ = sup_ν [(1/(α−1)) log Σ e^{(α−1)g} ν − R_α(ν‖θ)]`,
/// attained at `ν* ∝ e^g θ`.
pub fn acd_sup(alpha: Alpha, g: &BoundedFn, theta: &Dist) -> Result<VarSolution> {
    let value = acd_sup_value(alpha, g, theta)?;
    let nu = tilt(g.values(), theta)?;
    let achieved = acd_sup_objective(alpha, g, &nu, theta)?;
    Ok(VarSolution {
        value: ExtReal::Finite(value),
        residual: achieved.distance(ExtReal::Finite(value)),
        optimizer: Some(nu),
        regime: Some(Regime::of(alpha)),
    })
}

/// Infimum form: `(1/(α−1)) log Σ e^{(α−1)g} ν = inf_θ [(1/α) log Σ e^{αg} θ + R_α(ν‖θ)]`.
///
/// The optimizer is the supremum-form optimizer of the dual problem
/// `(1 − α, −g, ν)`, i.e. `θ* ∝ e^{−g} ν`.
pub fn acd_inf(alpha: Alpha, g: &BoundedFn, nu: &Dist) -> Result<VarSolution> {
    let value = acd_inf_value(alpha, g, nu)?;
    let neg_g = BoundedFn::new(g.scaled(-1.0))?;
    let dual = acd_sup(alpha.dual(), &neg_g, nu)?;
    let theta = dual.optimizer.expect("supremum form is always attained");
    let achieved = acd_inf_objective(alpha, g, nu, &theta)?;
    Ok(VarSolution {
        value: ExtReal::Finite(value),
        residual: achieved.distance(ExtReal::Finite(value)),
        optimizer: Some(theta),
        regime: Some(Regime::of(alpha)),
    })
}

/// Check `(1/α) log Σ e^{αg} θ ≥ (1/(α−1)) log Σ e^{(α−1)g} ν − R_α(ν‖θ)`.
pub fn acd_certify(alpha: Alpha, g: &BoundedFn, nu: &Dist, theta: &Dist) -> Result<CertResult> {
    nu.ensure_same_dim(theta)?;
    let lhs = ExtReal::Finite(acd_sup_value(alpha, g, theta)?);
    let rhs = acd_sup_objective(alpha, g, nu, theta)?;
    Ok(CertResult::new(lhs.gap(rhs), tol::IID_CERTIFY))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(w: &[f64]) -> Dist {
        Dist::new(w.to_vec()).unwrap()
    }
    fn a(x: f64) -> Alpha {
        Alpha::new(x).unwrap()
    }
    fn g(v: &[f64]) -> BoundedFn {
        BoundedFn::new(v.to_vec()).unwrap()
    }

    #[test]
    fn objective_examples() {
        let nu = d(&[0.5, 0.5]);
        let theta = d(&[0.25, 0.75]);
        assert_eq!(objective(a(2.0), &nu, &nu, &nu).unwrap(), ExtReal::ZERO);
        let kl = rel_entropy(&nu, &theta).unwrap().finite().unwrap();
        for x in [-2.0, 0.5, 3.0] {
            let j = objective(a(x), &nu, &nu, &theta).unwrap().finite().unwrap();
            assert_abs_diff_eq!(j, kl / x, epsilon = 1e-15);
        }
        // α=2, μ=ν: ½·D(ν‖θ) with D by direct summation
        let direct = 0.5 * (0.5 * (2.0f64).ln() + 0.5 * (2.0f64 / 3.0).ln());
        let j = objective(a(2.0), &nu, &nu, &theta).unwrap().finite().unwrap();
        assert_abs_diff_eq!(j, direct, epsilon = 1e-15);
    }

    #[test]
    fn objective_rejects_inf_minus_inf() {
        // α > 1: both coefficients push in the same direction only when μ ⪯ ν
        let mu = d(&[0.0, 0.0, 1.0]);
        let nu = d(&[0.5, 0.5, 0.0]);
        let theta = d(&[0.5, 0.5, 0.0]);
        assert_eq!(objective(a(2.0), &mu, &nu, &theta), Err(Error::Indeterminate));
    }

    #[test]
    fn solve_identical_inputs() {
        let nu = d(&[0.2, 0.3, 0.5]);
        for x in [-3.0, 0.25, 2.0] {
            let s = solve_variational(a(x), &nu, &nu).unwrap();
            assert_abs_diff_eq!(s.value.finite().unwrap(), 0.0, epsilon = 1e-15);
            let mu = s.optimizer.unwrap();
            for i in 0..3 {
                assert_abs_diff_eq!(mu.get(i), nu.get(i), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn solve_infinite_alpha_gt_1_uses_point_mass() {
        let s = solve_variational(a(2.0), &d(&[0.5, 0.5]), &d(&[1.0, 0.0])).unwrap();
        assert_eq!(s.value, ExtReal::PosInf);
        assert_eq!(s.optimizer.unwrap().weights(), &[0.0, 1.0]);
        assert_eq!(s.residual, 0.0);
        assert_eq!(s.regime, Some(Regime::AlphaGt1));
    }

    #[test]
    fn solve_infinite_alpha_lt_0_mirrors() {
        let s = solve_variational(a(-1.0), &d(&[1.0, 0.0]), &d(&[0.5, 0.5])).unwrap();
        assert_eq!(s.value, ExtReal::PosInf);
        assert_eq!(s.optimizer.unwrap().weights(), &[0.0, 1.0]);
        assert_eq!(s.regime, Some(Regime::AlphaLt0));
    }

    #[test]
    fn solve_disjoint_small_alpha_has_no_optimizer() {
        let s = solve_variational(a(0.5), &d(&[1.0, 0.0]), &d(&[0.0, 1.0])).unwrap();
        assert_eq!(s.value, ExtReal::PosInf);
        assert!(s.optimizer.is_none());
    }

    #[test]
    fn solve_half_example() {
        let nu = d(&[0.5, 0.5]);
        let theta = d(&[0.25, 0.75]);
        let s = solve_variational(a(0.5), &nu, &theta).unwrap();
        let bc: f64 = (0.5f64 * 0.25).sqrt() + (0.5f64 * 0.75).sqrt();
        let expect = bc.ln() / (0.5 * -0.5);
        assert_abs_diff_eq!(s.value.finite().unwrap(), expect, epsilon = 1e-14);
        let mu = s.optimizer.unwrap();
        assert_abs_diff_eq!(mu.get(0), (0.125f64).sqrt() / bc, epsilon = 1e-15);
        assert!(s.residual <= 1e-12);
    }

    #[test]
    fn certify_at_optimizer_and_at_nu() {
        let nu = d(&[0.1, 0.6, 0.3]);
        let theta = d(&[0.3, 0.3, 0.4]);
        for x in [-2.0, 0.3, 0.9, 1.1, 4.0] {
            let s = solve_variational(a(x), &nu, &theta).unwrap();
            let c = certify_inequality(a(x), s.optimizer.as_ref().unwrap(), &nu, &theta).unwrap();
            assert!(c.pass && c.slack.finite().unwrap().abs() < 1e-9, "{x} {c:?}");
        }
        let c = certify_inequality(a(3.0), &nu, &nu, &theta).unwrap();
        let r = renyi_div(a(3.0), &nu, &theta).unwrap().finite().unwrap();
        let kl = rel_entropy(&nu, &theta).unwrap().finite().unwrap();
        assert_abs_diff_eq!(c.slack.finite().unwrap(), r - kl / 3.0, epsilon = 1e-14);
        assert!(c.slack.finite().unwrap() >= 0.0);
    }

    #[test]
    fn certify_rejects_infeasible() {
        let nu = d(&[0.5, 0.5, 0.0]);
        let theta = d(&[0.0, 0.5, 0.5]);
        let mu = d(&[0.0, 0.0, 1.0]);
        assert!(matches!(certify_inequality(a(2.0), &mu, &nu, &theta), Err(Error::Infeasible(_))));
        assert!(matches!(certify_inequality(a(0.5), &mu, &nu, &theta), Err(Error::Infeasible(_))));
        assert!(certify_inequality(a(-1.0), &mu, &nu, &theta).unwrap().pass);
    }

    #[test]
    fn certify_infinite_tie_passes() {
        // α>1, μ ⪯ ν but μ ⋠ θ: objective and R are both +∞
        let nu = d(&[0.5, 0.5]);
        let theta = d(&[1.0, 0.0]);
        let mu = d(&[0.0, 1.0]);
        let c = certify_inequality(a(2.0), &mu, &nu, &theta).unwrap();
        assert!(c.pass);
        assert_eq!(c.slack, ExtReal::ZERO);
        let c = certify_inequality(a(2.0), &d(&[1.0, 0.0]), &nu, &theta).unwrap();
        assert_eq!(c.slack, ExtReal::PosInf);
    }

    #[test]
    fn truncated_family_matches_log_z_and_converges() {
        let nu = d(&[0.1, 0.2, 0.3, 0.4]);
        let theta = d(&[0.4, 0.3, 0.2, 0.1]);
        let al = a(2.5);
        let fam = truncation_family(al, &nu, &theta).unwrap();
        assert!(fam.len() >= 2);
        let r = renyi_div(al, &nu, &theta).unwrap().finite().unwrap();
        let mut prev = f64::NEG_INFINITY;
        for step in &fam {
            let j = objective(al, &step.mu, &nu, &theta).unwrap().finite().unwrap();
            assert_abs_diff_eq!(j, step.log_z / al.scale(), epsilon = 1e-10);
            assert!(step.value >= prev - 1e-15);
            assert!(step.value <= r + 1e-12);
            prev = step.value;
        }
        assert_abs_diff_eq!(fam.last().unwrap().value, r, epsilon = 1e-12);
    }

    #[test]
    fn truncation_requires_alpha_gt_1() {
        let nu = d(&[0.5, 0.5]);
        assert!(truncation_family(a(0.5), &nu, &nu).is_err());
        assert!(truncation_family(a(2.0), &nu, &d(&[1.0, 0.0])).is_err());
        assert!(truncated_optimizer(a(2.0), &nu, &d(&[0.25, 0.75]), -100.0).is_err());
    }

    #[test]
    fn log_exp_integral_examples() {
        let mu = d(&[0.5, 0.5]);
        assert_abs_diff_eq!(log_exp_integral(&g(&[1.7, 1.7]), &mu).unwrap(), 1.7, epsilon = 1e-15);
        let v = log_exp_integral(&g(&[0.0, 2f64.ln()]), &mu).unwrap();
        assert_abs_diff_eq!(v, (0.5f64 + 1.0).ln(), epsilon = 1e-15);
        let v = log_exp_integral(&g(&[500.0, -500.0]), &mu).unwrap();
        assert!(v.is_finite());
        assert_abs_diff_eq!(v, 500.0 + 0.5f64.ln(), epsilon = 1e-12);
        assert!(log_exp_integral(&g(&[1.0]), &mu).is_err());
        assert!(BoundedFn::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn dv_solve_examples() {
        let mu = d(&[0.2, 0.8]);
        let s = dv_solve(&g(&[0.0, 0.0]), &mu).unwrap();
        assert_eq!(s.optimizer.as_ref().unwrap(), &mu);
        assert_abs_diff_eq!(s.value.finite().unwrap(), 0.0, epsilon = 1e-15);
        let s = dv_solve(&g(&[3.0, 3.0]), &mu).unwrap();
        assert_abs_diff_eq!(s.value.finite().unwrap(), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.optimizer.unwrap().get(0), 0.2, epsilon = 1e-15);
        // e^g μ = (½, 1), normalized (1/3, 2/3)
        let s = dv_solve(&g(&[0.0, 2f64.ln()]), &d(&[0.5, 0.5])).unwrap();
        let th = s.optimizer.unwrap();
        assert_abs_diff_eq!(th.get(0), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.value.finite().unwrap(), 1.5f64.ln(), epsilon = 1e-15);
        assert!(s.residual <= 1e-12);
    }

    #[test]
    fn acd_sup_examples() {
        let theta = d(&[0.5, 0.5]);
        let s = acd_sup(a(2.0), &g(&[0.0, 0.0]), &theta).unwrap();
        assert_eq!(s.optimizer.as_ref().unwrap(), &theta);
        assert_abs_diff_eq!(s.value.finite().unwrap(), 0.0, epsilon = 1e-15);
        let s = acd_sup(a(-0.7), &g(&[1.25, 1.25]), &theta).unwrap();
        assert_abs_diff_eq!(s.value.finite().unwrap(), 1.25, epsilon = 1e-14);
        // α=2: ½ log(½·1 + ½·4) = ½ log(5/2); ν* ∝ (½, 1)
        let s = acd_sup(a(2.0), &g(&[0.0, 2f64.ln()]), &theta).unwrap();
        assert_abs_diff_eq!(s.value.finite().unwrap(), 0.5 * 2.5f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.optimizer.as_ref().unwrap().get(1), 2.0 / 3.0, epsilon = 1e-15);
        // direct check of the other side: log(½·1 + ½·2·... ) with ν*=(1/3,2/3)
        let nu = s.optimizer.unwrap();
        let lhs: f64 = (nu.get(0) * 1.0 + nu.get(1) * 2.0).ln();
        let r = renyi_div(a(2.0), &nu, &theta).unwrap().finite().unwrap();
        assert_abs_diff_eq!(lhs - r, 0.5 * 2.5f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn acd_inf_examples_and_duality() {
        let nu = d(&[1.0 / 3.0, 2.0 / 3.0]);
        let s = acd_inf(a(0.5), &g(&[0.0, 0.0]), &nu).unwrap();
        assert_abs_diff_eq!(s.value.finite().unwrap(), 0.0, epsilon = 1e-15);
        assert_eq!(s.optimizer.as_ref().unwrap(), &nu);
        let s = acd_inf(a(3.0), &g(&[-2.0, -2.0]), &nu).unwrap();
        assert_abs_diff_eq!(s.value.finite().unwrap(), -2.0, epsilon = 1e-14);

        let gg = g(&[1.0, 0.0]);
        let s = acd_inf(a(0.5), &gg, &nu).unwrap();
        let neg = g(&[-1.0, 0.0]);
        let dual = acd_sup(a(0.5), &neg, &nu).unwrap();
        assert_abs_diff_eq!(s.value.finite().unwrap(), -dual.value.finite().unwrap(), epsilon = 1e-12);
        assert!(s.residual <= 1e-12);
        // direct value: 2·log(⅓e^{-½} + ⅔)·(-1)
        let direct = -2.0 * ((-0.5f64).exp() / 3.0 + 2.0 / 3.0).ln();
        assert_abs_diff_eq!(s.value.finite().unwrap(), direct, epsilon = 1e-14);
    }

    #[test]
    fn acd_certify_cases() {
        let theta = d(&[0.2, 0.3, 0.5]);
        let gg = g(&[0.4, -1.0, 2.0]);
        for x in [-1.5, 0.5, 2.0] {
            let s = acd_sup(a(x), &gg, &theta).unwrap();
            let c = acd_certify(a(x), &gg, s.optimizer.as_ref().unwrap(), &theta).unwrap();
            assert!(c.pass && c.slack.finite().unwrap().abs() < 1e-9);
        }
        let c = acd_certify(a(0.5), &gg, &d(&[1.0, 0.0, 0.0]), &d(&[0.0, 0.5, 0.5])).unwrap();
        assert_eq!(c.slack, ExtReal::PosInf);
        assert!(c.pass);
    }

    #[test]
    fn acd_value_tends_to_log_exp_integral_near_one() {
        let theta = d(&[0.2, 0.3, 0.5]);
        let gg = g(&[0.4, -1.0, 2.0]);
        let target = log_exp_integral(&gg, &theta).unwrap();
        for x in [1.0 + 1e-6, 1.0 - 1e-6] {
            let v = acd_sup(a(x), &gg, &theta).unwrap().value.finite().unwrap();
            assert!((v - target).abs() < 1e-4);
        }
    }
}
