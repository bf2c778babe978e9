//! Variational formulas for divergence rates between stationary chains.
//!
//! Optimizers are eigenvector twists: for a nonnegative matrix `M` and the
//! Perron data `(λ, u, w)` of one of its classes,
//!
//! ```text
//! μ(i,j) = u(i) M_ij w(j) / Z        (i, j in the class)
//! ```
//!
//! is a stationary pair measure, because `Σ_j μ(i,j) = λ u(i) w(i) / Z = Σ_j μ(j,i)`.
//! Twists are assembled in the log domain.

use crate::markov::{abs_cont_pair, rel_entropy_rate, renyi_rate, tilted_kernel_log, PairMeasure};
use crate::numeric::logsumexp;
use crate::spectral::{dominant_class, log_growth_rate, log_perron, maximal_abs_cont, LogMatrix, PerronData};
use crate::tol;
use crate::var_iid::{CertResult, Regime};
use crate::{Alpha, Error, ExtReal, Result};

/// Real function on edges, `G = [g(i,j)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFn {
    d: usize,
    values: Vec<f64>,
}

impl EdgeFn {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::Empty);
        }
        let mut values = Vec::with_capacity(d * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch(d, row.len()));
            }
            values.extend(row);
        }
        if let Some((idx, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { idx, value });
        }
        Ok(Self { d, values })
    }

    pub fn constant(d: usize, c: f64) -> Result<Self> {
        Self::new(vec![vec![c; d]; d])
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.d + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.d).map(<[f64]>::to_vec).collect()
    }

    pub fn scaled(&self, c: f64) -> EdgeFn {
        EdgeFn { d: self.d, values: self.values.iter().map(|v| c * v).collect() }
    }

    fn ensure_dim(&self, mu: &PairMeasure) -> Result<()> {
        if self.d != mu.dim() {
            return Err(Error::DimensionMismatch(self.d, mu.dim()));
        }
        Ok(())
    }
}

/// Solved rate variational problem.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovVarSolution {
    pub value: ExtReal,
    /// Absent when the extremum is not attained.
    pub optimizer: Option<PairMeasure>,
    /// States of the class carrying the optimizer (empty when there is none).
    pub class_used: Vec<usize>,
    /// Perron data behind the twist, when one was built.
    pub perron: Option<PerronData>,
    pub regime: Option<Regime>,
    /// `|value − objective(optimizer)|`, recomputed from rate definitions.
    pub residual: f64,
}

impl MarkovVarSolution {
    fn infinite(value: ExtReal, regime: Regime) -> Self {
        Self { value, optimizer: None, class_used: Vec::new(), perron: None, regime: Some(regime), residual: 0.0 }
    }
}

/// `u(i) M_ij w(j) / Z` on the class of `p`.
fn twist(m: &LogMatrix, p: &PerronData) -> Result<PairMeasure> {
    let d = m.dim();
    let in_class = |s: usize| p.class.binary_search(&s).is_ok();
    let logs: Vec<f64> = (0..d * d)
        .map(|k| {
            let (i, j) = (k / d, k % d);
            if in_class(i) && in_class(j) && m.has_edge(i, j) {
                p.left[i].ln() + m.get(i, j) + p.right[j].ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let log_z = logsumexp(logs.iter().copied());
    let rows = logs
        .chunks(d)
        .map(|r| r.iter().map(|&l| if l == f64::NEG_INFINITY { 0.0 } else { (l - log_z).exp() }).collect())
        .collect();
    PairMeasure::new(rows)
}

/// `D(μ‖θ)/α − D(μ‖ν)/(α−1)` with relative entropy rates.
pub fn markov_objective(alpha: Alpha, mu: &PairMeasure, nu: &PairMeasure, theta: &PairMeasure) -> Result<ExtReal> {
    let a = alpha.value();
    let to_theta = rel_entropy_rate(mu, theta)?.scale(1.0 / a);
    let to_nu = rel_entropy_rate(mu, nu)?.scale(-1.0 / (a - 1.0));
    to_theta.checked_add(to_nu)
}

/// Closed-form extremum of [`markov_objective`], equal to `R_α(ν‖θ)`.
///
/// * α > 1, `ν ⋠ θ`: value `+∞`, optimizer `ν` (objective `+∞` there).
/// * α > 1 otherwise: twist of `M = [ν(j|i)^α θ(j|i)^{1−α}]` on the class of
///   `S_ν` with the largest Perron root.
/// * 0 < α < 1: same twist over the classes of the maximal pair measure
///   absolutely continuous w.r.t. `M`; `+∞` with no optimizer if `M` has no cycle.
/// * α < 0: the `1 − α` problem with `ν` and `θ` exchanged.
pub fn solve_markov_variational(alpha: Alpha, nu: &PairMeasure, theta: &PairMeasure) -> Result<MarkovVarSolution> {
    nu.ensure_same_dim(theta)?;
    let regime = Regime::of(alpha);
    let mut sol = match regime {
        Regime::AlphaLt0 => solve_markov_variational(alpha.dual(), theta, nu)?,
        Regime::AlphaGt1 if !abs_cont_pair(nu, theta)? => MarkovVarSolution {
            optimizer: Some(nu.clone()),
            ..MarkovVarSolution::infinite(ExtReal::PosInf, regime)
        },
        _ => {
            let m = tilted_kernel_log(alpha.value(), nu, theta)?;
            let states = if regime == Regime::AlphaGt1 {
                nu.support()
            } else {
                match maximal_abs_cont(&support_of(&m)) {
                    Some(tau) => tau.support(),
                    None => return Ok(MarkovVarSolution::infinite(ExtReal::PosInf, regime)),
                }
            };
            let p = dominant_class(&m, &states)?.expect("the restricted support carries a cycle");
            MarkovVarSolution {
                value: ExtReal::Finite(p.log_lambda / alpha.scale()),
                optimizer: Some(twist(&m, &p)?),
                class_used: p.class.clone(),
                perron: Some(p),
                regime: Some(regime),
                residual: 0.0,
            }
        }
    };
    sol.regime = Some(regime);
    sol.residual = match &sol.optimizer {
        Some(mu) => markov_objective(alpha, mu, nu, theta)?.distance(sol.value),
        None => 0.0,
    };
    Ok(sol)
}

/// 0/1 matrix with the support of `m`, for support-only computations.
fn support_of(m: &LogMatrix) -> crate::NonnegMatrix {
    crate::NonnegMatrix::from_fn(m.dim(), |i, j| if m.has_edge(i, j) { 1.0 } else { 0.0 })
        .expect("indicator entries are valid")
}

fn ensure_feasible(alpha: Alpha, mu: &PairMeasure, nu: &PairMeasure, theta: &PairMeasure) -> Result<()> {
    let ok = match Regime::of(alpha) {
        Regime::AlphaGt1 => abs_cont_pair(mu, nu)?,
        Regime::AlphaIn01 => abs_cont_pair(mu, nu)? && abs_cont_pair(mu, theta)?,
        Regime::AlphaLt0 => abs_cont_pair(mu, theta)?,
    };
    if !ok {
        return Err(Error::Infeasible(format!(
            "mu is outside the feasible set of regime {}",
            Regime::of(alpha).as_str()
        )));
    }
    Ok(())
}

/// Check the rate inequality at a feasible `μ`; slack is nonnegative when it holds.
pub fn certify_markov_inequality(
    alpha: Alpha,
    mu: &PairMeasure,
    nu: &PairMeasure,
    theta: &PairMeasure,
) -> Result<CertResult> {
    mu.ensure_same_dim(nu)?;
    mu.ensure_same_dim(theta)?;
    ensure_feasible(alpha, mu, nu, theta)?;
    let r = renyi_rate(alpha, nu, theta)?;
    let j = markov_objective(alpha, mu, nu, theta)?;
    let slack = if Regime::of(alpha).is_sup() { r.gap(j) } else { j.gap(r) };
    Ok(CertResult::new(slack, tol::MARKOV_CERTIFY))
}

/// `log e^{c g(i,j)} κ(j|i)` on the support of `κ`.
fn weighted_kernel_log(c: f64, g: &EdgeFn, kappa: &PairMeasure) -> Result<LogMatrix> {
    g.ensure_dim(kappa)?;
    LogMatrix::from_fn(g.dim(), |i, j| {
        if kappa.has_edge(i, j) {
            c * g.get(i, j) + kappa.log_kernel(i, j)
        } else {
            f64::NEG_INFINITY
        }
    })
}

fn finite_growth(m: &LogMatrix) -> Result<f64> {
    log_growth_rate(m)?
        .finite()
        .ok_or_else(|| Error::Invalid("kernel support has no cycle".into()))
}

/// `ρ([e^{g(i,j)} μ(j|i)])`.
pub fn varadhan_growth(g: &EdgeFn, mu: &PairMeasure) -> Result<ExtReal> {
    log_growth_rate(&weighted_kernel_log(1.0, g, mu)?)
}

/// `Σ g θ − D(θ‖μ)` with `D` the relative entropy rate.
pub fn varadhan_objective(g: &EdgeFn, theta: &PairMeasure, mu: &PairMeasure) -> Result<ExtReal> {
    g.ensure_dim(theta)?;
    let d = g.dim();
    let mean: f64 = (0..d * d).map(|k| theta.get(k / d, k % d) * g.get(k / d, k % d)).sum();
    ExtReal::Finite(mean).checked_sub(rel_entropy_rate(theta, mu)?)
}

/// Optimizer of `sup_θ [Σ g θ − D(θ‖μ)] = ρ([e^g μ(j|i)])`: the twist of
/// `[e^g μ(j|i)]` on its Perron-maximizing class in `S_μ`.
pub fn varadhan_solve(g: &EdgeFn, mu: &PairMeasure) -> Result<MarkovVarSolution> {
    let m = weighted_kernel_log(1.0, g, mu)?;
    let p = dominant_class(&m, &mu.support())?.expect("pair measure supports carry cycles");
    let theta = twist(&m, &p)?;
    let value = ExtReal::Finite(p.log_lambda);
    let residual = varadhan_objective(g, &theta, mu)?.distance(value);
    Ok(MarkovVarSolution {
        value,
        optimizer: Some(theta),
        class_used: p.class.clone(),
        perron: Some(p),
        regime: None,
        residual,
    })
}

/// `(1/(α−1)) ρ([e^{(α−1)g} ν(j|i)]) − R_α(ν‖θ)`.
pub fn markov_acd_sup_objective(alpha: Alpha, g: &EdgeFn, nu: &PairMeasure, theta: &PairMeasure) -> Result<ExtReal> {
    let am1 = alpha.value() - 1.0;
    let lhs = finite_growth(&weighted_kernel_log(am1, g, nu)?)? / am1;
    ExtReal::Finite(lhs).checked_sub(renyi_rate(alpha, nu, theta)?)
}

/// `(1/α) ρ([e^{αg} θ(j|i)]) + R_α(ν‖θ)`.
pub fn markov_acd_inf_objective(alpha: Alpha, g: &EdgeFn, nu: &PairMeasure, theta: &PairMeasure) -> Result<ExtReal> {
    let a = alpha.value();
    let lhs = finite_growth(&weighted_kernel_log(a, g, theta)?)? / a;
    ExtReal::Finite(lhs).checked_add(renyi_rate(alpha, nu, theta)?)
}

/// Supremum form
/// `(1/α) ρ([e^{αg} θ(j|i)]) = sup_ν [(1/(α−1)) ρ([e^{(α−1)g} ν(j|i)]) − R_α(ν‖θ)]`.
///
/// With `N = [e^{αg} θ(j|i)]` and `M = [e^g θ(j|i)]`, the optimizer twists
/// `M`'s Perron vectors on the class of `S_θ` maximizing `ρ(N)`.
///
/// For `α < 0` the twist is supported on one class, while a finite
/// `R_α(ν‖θ)` needs `θ ⪯ ν`. When `θ` has more than one class the supremum
/// is therefore not attained by a twist, and no optimizer is reported.
pub fn markov_acd_sup(alpha: Alpha, g: &EdgeFn, theta: &PairMeasure) -> Result<MarkovVarSolution> {
    let a = alpha.value();
    let n = weighted_kernel_log(a, g, theta)?;
    let m = weighted_kernel_log(1.0, g, theta)?;
    let top = dominant_class(&n, &theta.support())?.expect("pair measure supports carry cycles");
    let value = ExtReal::Finite(top.log_lambda / a);
    let regime = Some(Regime::of(alpha));
    if a < 0.0 && theta.classes().classes.len() > 1 {
        return Ok(MarkovVarSolution {
            value,
            optimizer: None,
            class_used: top.class.clone(),
            perron: None,
            regime,
            residual: 0.0,
        });
    }
    let pm = log_perron(&m, &top.class)?;
    let nu = twist(&m, &pm)?;
    let residual = markov_acd_sup_objective(alpha, g, &nu, theta)?.distance(value);
    Ok(MarkovVarSolution { value, optimizer: Some(nu), class_used: pm.class.clone(), perron: Some(pm), regime, residual })
}

/// Infimum form
/// `(1/(α−1)) ρ([e^{(α−1)g} ν(j|i)]) = inf_θ [(1/α) ρ([e^{αg} θ(j|i)]) + R_α(ν‖θ)]`,
/// solved through the supremum form with `(1 − α, −G, ν)`.
pub fn markov_acd_inf(alpha: Alpha, g: &EdgeFn, nu: &PairMeasure) -> Result<MarkovVarSolution> {
    let am1 = alpha.value() - 1.0;
    let value = ExtReal::Finite(finite_growth(&weighted_kernel_log(am1, g, nu)?)? / am1);
    let dual = markov_acd_sup(alpha.dual(), &g.scaled(-1.0), nu)?;
    let residual = match &dual.optimizer {
        Some(theta) => markov_acd_inf_objective(alpha, g, nu, theta)?.distance(value),
        None => 0.0,
    };
    Ok(MarkovVarSolution { value, residual, regime: Some(Regime::of(alpha)), ..dual })
}

/// Outcome of [`rho_identities_check`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RhoReport {
    /// `ρ(N)` on the selected class.
    pub rho_n: f64,
    /// `ρ(M)` on the selected class.
    pub rho_m: f64,
    /// `ρ([ν*(j|i)^α θ(j|i)^{1−α}])`.
    pub rho_tilted: f64,
    /// `ρ([e^{(α−1)g} ν*(j|i)])`.
    pub rho_weighted: f64,
    /// `|ρ_tilted − (ρ(N) − αρ(M))|`.
    pub drift_tilted: f64,
    /// `|ρ_weighted − (ρ(N) − ρ(M))|`.
    pub drift_weighted: f64,
    pub pass: bool,
}

/// Check the two spectral identities satisfied by the supremum-form optimizer `ν*`:
/// `ρ([ν*^α θ^{1−α}]) = ρ(N) − αρ(M)` and `ρ([e^{(α−1)g} ν*]) = ρ(N) − ρ(M)`.
///
/// `ρ(N)` and `ρ(M)` are the Perron roots on the class carrying `ν*`.
pub fn rho_identities_check(alpha: Alpha, g: &EdgeFn, theta: &PairMeasure) -> Result<RhoReport> {
    let a = alpha.value();
    let sol = markov_acd_sup(alpha, g, theta)?;
    let nu = sol
        .optimizer
        .ok_or_else(|| Error::Infeasible("the supremum form has no optimizer for this input".into()))?;
    let rho_n = a * sol.value.to_f64();
    let rho_m = sol.perron.expect("twist carries Perron data").log_lambda;
    let rho_tilted = finite_growth(&tilted_kernel_log(a, &nu, theta)?)?;
    let rho_weighted = finite_growth(&weighted_kernel_log(a - 1.0, g, &nu)?)?;
    let drift_tilted = (rho_tilted - (rho_n - a * rho_m)).abs();
    let drift_weighted = (rho_weighted - (rho_n - rho_m)).abs();
    Ok(RhoReport {
        rho_n,
        rho_m,
        rho_tilted,
        rho_weighted,
        drift_tilted,
        drift_weighted,
        pass: drift_tilted <= tol::MARKOV_CERTIFY && drift_weighted <= tol::MARKOV_CERTIFY,
    })
}

/// Check `(1/α) ρ(N) ≥ (1/(α−1)) ρ([e^{(α−1)g} ν(j|i)]) − R_α(ν‖θ)` at `ν`.
pub fn certify_markov_acd(alpha: Alpha, g: &EdgeFn, nu: &PairMeasure, theta: &PairMeasure) -> Result<CertResult> {
    nu.ensure_same_dim(theta)?;
    let a = alpha.value();
    let lhs = ExtReal::Finite(finite_growth(&weighted_kernel_log(a, g, theta)?)? / a);
    let rhs = markov_acd_sup_objective(alpha, g, nu, theta)?;
    Ok(CertResult::new(lhs.gap(rhs), tol::MARKOV_CERTIFY))
}
