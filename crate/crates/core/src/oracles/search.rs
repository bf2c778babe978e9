//! Random search over feasible sets, used to falsify closed-form extrema.
//!
//! Objectives are evaluated from divergence definitions only. Each trial
//! owns a ChaCha stream derived from `(seed, trial)`, trials run in
//! parallel, and results are merged in trial order, so a report depends
//! only on its inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::generators::{mix, stationary_law, random_cyclic_pair_within, random_dist_on, random_pair_on_edges, random_subset};
use crate::dist::{rel_entropy, renyi_div};
use crate::markov::{rel_entropy_rate, renyi_rate, PairMeasure};
use crate::numeric::{logsumexp, softmax};
use crate::spectral::{log_growth_rate, LogMatrix};
use crate::var_iid::BoundedFn;
use crate::var_markov::EdgeFn;
use crate::{Alpha, Dist, Error, ExtReal, Result};

/// Largest amount by which a sample may beat the closed-form extremum.
pub const SEARCH_TOLERANCE: f64 = 1e-8;

/// Largest accepted gap between the hill climber and the closed-form extremum
/// on full-support instances.
pub const HILL_CLIMB_TOLERANCE: f64 = 1e-3;

/// Sweeps of coordinate tilts performed by the hill climber.
pub const HILL_CLIMB_SWEEPS: usize = 200;

/// One variational problem: the closed form on the left, the optimization on the right.
#[derive(Debug, Clone, PartialEq)]
pub enum SearchProblem {
    /// `R_α(ν‖θ)` vs `D(μ‖θ)/α − D(μ‖ν)/(α−1)` over the regime's feasible μ.
    IidRenyi { alpha: Alpha, nu: Dist, theta: Dist },
    /// `log Σ e^g μ` vs `Σ g θ − D(θ‖μ)` over θ ⪯ μ.
    IidExpIntegral { g: BoundedFn, mu: Dist },
    /// `(1/α) log Σ e^{αg} θ` vs `(1/(α−1)) log Σ e^{(α−1)g} ν − R_α(ν‖θ)` over ν.
    IidAcd { alpha: Alpha, g: BoundedFn, theta: Dist },
    /// Rate version of `IidRenyi`.
    MarkovRenyi { alpha: Alpha, nu: PairMeasure, theta: PairMeasure },
    /// `ρ([e^g μ(j|i)])` vs `Σ g θ − D(θ‖μ)` over stationary θ ⪯ μ.
    MarkovExpIntegral { g: EdgeFn, mu: PairMeasure },
    /// Rate version of `IidAcd`.
    MarkovAcd { alpha: Alpha, g: EdgeFn, theta: PairMeasure },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HillClimb {
    pub value: f64,
    /// `|reference − value|`.
    pub gap: f64,
    pub sweeps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub trials: usize,
    /// Whether the closed form is a supremum (otherwise an infimum).
    pub is_sup: bool,
    /// Closed-form extremum.
    pub reference: ExtReal,
    /// Best sampled objective value.
    pub best: ExtReal,
    pub best_trial: Option<usize>,
    /// Largest amount by which any sample beat the reference, in the
    /// direction of the extremum; negative when none did.
    pub violation: f64,
    /// Present on full-support instances.
    pub hill_climb: Option<HillClimb>,
    /// `violation ≤ SEARCH_TOLERANCE`.
    pub pass: bool,
}

fn pos(w: &[f64]) -> Vec<usize> {
    w.iter().enumerate().filter(|(_, &x)| x > 0.0).map(|(i, _)| i).collect()
}

fn iid_objective(a: f64, mu: &Dist, nu: &Dist, theta: &Dist) -> ExtReal {
    let to_theta = rel_entropy(mu, theta).expect("same dimension").scale(1.0 / a);
    let to_nu = rel_entropy(mu, nu).expect("same dimension").scale(-1.0 / (a - 1.0));
    to_theta.checked_add(to_nu).unwrap_or(ExtReal::NegInf)
}

fn markov_objective(a: f64, mu: &PairMeasure, nu: &PairMeasure, theta: &PairMeasure) -> ExtReal {
    let to_theta = rel_entropy_rate(mu, theta).expect("same dimension").scale(1.0 / a);
    let to_nu = rel_entropy_rate(mu, nu).expect("same dimension").scale(-1.0 / (a - 1.0));
    to_theta.checked_add(to_nu).unwrap_or(ExtReal::NegInf)
}

fn log_mgf(c: f64, g: &BoundedFn, p: &Dist) -> f64 {
    logsumexp(g.values().iter().zip(p.weights()).filter(|(_, &w)| w > 0.0).map(|(&v, &w)| c * v + w.ln()))
}

/// `ρ([e^{c g(i,j)} p(j|i)])`.
fn weighted_growth(c: f64, g: &EdgeFn, p: &PairMeasure) -> f64 {
    let d = p.dim();
    let m = LogMatrix::from_fn(d, |i, j| {
        let row: f64 = (0..d).map(|k| p.get(i, k)).sum();
        if p.get(i, j) > 0.0 {
            c * g.get(i, j) + p.get(i, j).ln() - row.ln()
        } else {
            f64::NEG_INFINITY
        }
    })
    .expect("finite logs");
    log_growth_rate(&m).expect("Perron iteration converges").to_f64()
}

fn iid_acd_objective(a: f64, alpha: Alpha, g: &BoundedFn, nu: &Dist, theta: &Dist) -> ExtReal {
    let lhs = log_mgf(a - 1.0, g, nu) / (a - 1.0);
    let r = renyi_div(alpha, nu, theta).expect("same dimension");
    ExtReal::Finite(lhs).checked_sub(r).expect("finite minus extended real")
}

fn markov_acd_objective(a: f64, alpha: Alpha, g: &EdgeFn, nu: &PairMeasure, theta: &PairMeasure) -> ExtReal {
    let lhs = weighted_growth(a - 1.0, g, nu) / (a - 1.0);
    let r = renyi_rate(alpha, nu, theta).expect("same dimension");
    ExtReal::Finite(lhs).checked_sub(r).expect("finite minus extended real")
}

fn iid_gibbs(g: &BoundedFn, theta: &Dist, mu: &Dist) -> ExtReal {
    let mean: f64 = g.values().iter().zip(theta.weights()).map(|(v, w)| v * w).sum();
    ExtReal::Finite(mean).checked_sub(rel_entropy(theta, mu).expect("same dimension")).expect("finite mean")
}

fn markov_gibbs(g: &EdgeFn, theta: &PairMeasure, mu: &PairMeasure) -> ExtReal {
    let d = theta.dim();
    let mean: f64 = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| g.get(i, j) * theta.get(i, j)).sum();
    ExtReal::Finite(mean)
        .checked_sub(rel_entropy_rate(theta, mu).expect("same dimension"))
        .expect("finite mean")
}

fn edges_where(d: usize, keep: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
    (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).filter(|&(i, j)| keep(i, j)).collect()
}

fn full_pair(p: &PairMeasure) -> bool {
    (0..p.dim()).all(|i| (0..p.dim()).all(|j| p.get(i, j) > 0.0))
}

fn full_dist(p: &Dist) -> bool {
    p.weights().iter().all(|&w| w > 0.0)
}

impl SearchProblem {
    fn dim(&self) -> usize {
        match self {
            SearchProblem::IidRenyi { nu, .. } => nu.dim(),
            SearchProblem::IidExpIntegral { mu, .. } => mu.dim(),
            SearchProblem::IidAcd { theta, .. } => theta.dim(),
            SearchProblem::MarkovRenyi { nu, .. } => nu.dim(),
            SearchProblem::MarkovExpIntegral { mu, .. } => mu.dim(),
            SearchProblem::MarkovAcd { theta, .. } => theta.dim(),
        }
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim();
        let other = match self {
            SearchProblem::IidRenyi { theta, .. } => theta.dim(),
            SearchProblem::IidExpIntegral { g, .. } | SearchProblem::IidAcd { g, .. } => g.dim(),
            SearchProblem::MarkovRenyi { theta, .. } => theta.dim(),
            SearchProblem::MarkovExpIntegral { g, .. } | SearchProblem::MarkovAcd { g, .. } => g.dim(),
        };
        if d != other {
            return Err(Error::DimensionMismatch(d, other));
        }
        let empty = match self {
            SearchProblem::IidRenyi { alpha, nu, theta } => iid_feasible(alpha.value(), nu, theta).is_empty(),
            SearchProblem::MarkovRenyi { alpha, nu, theta } => {
                let allowed = markov_allowed(alpha.value(), nu, theta);
                super::generators::cyclic_edges(d, &|i, j| allowed(i, j)).is_empty()
            }
            _ => false,
        };
        if empty {
            return Err(Error::Infeasible("the feasible set is empty".into()));
        }
        Ok(())
    }

    fn is_sup(&self) -> bool {
        match self {
            SearchProblem::IidRenyi { alpha, .. } | SearchProblem::MarkovRenyi { alpha, .. } => {
                !(0.0..1.0).contains(&alpha.value())
            }
            _ => true,
        }
    }

    fn reference(&self) -> Result<ExtReal> {
        Ok(match self {
            SearchProblem::IidRenyi { alpha, nu, theta } => renyi_div(*alpha, nu, theta)?,
            SearchProblem::IidExpIntegral { g, mu } => ExtReal::Finite(log_mgf(1.0, g, mu)),
            SearchProblem::IidAcd { alpha, g, theta } => {
                ExtReal::Finite(log_mgf(alpha.value(), g, theta) / alpha.value())
            }
            SearchProblem::MarkovRenyi { alpha, nu, theta } => renyi_rate(*alpha, nu, theta)?,
            SearchProblem::MarkovExpIntegral { g, mu } => ExtReal::Finite(weighted_growth(1.0, g, mu)),
            SearchProblem::MarkovAcd { alpha, g, theta } => {
                ExtReal::Finite(weighted_growth(alpha.value(), g, theta) / alpha.value())
            }
        })
    }

    /// Objective at one random feasible point.
    fn sample(&self, rng: &mut ChaCha8Rng) -> ExtReal {
        let d = self.dim();
        let all: Vec<usize> = (0..d).collect();
        match self {
            SearchProblem::IidRenyi { alpha, nu, theta } => {
                let support = random_subset(rng, &iid_feasible(alpha.value(), nu, theta));
                iid_objective(alpha.value(), &random_dist_on(rng, d, &support), nu, theta)
            }
            SearchProblem::IidExpIntegral { g, mu } => {
                let support = random_subset(rng, &mu.support());
                iid_gibbs(g, &random_dist_on(rng, d, &support), mu)
            }
            SearchProblem::IidAcd { alpha, g, theta } => {
                let a = alpha.value();
                let base = theta.support();
                let support = if a > 1.0 {
                    random_subset(rng, &base)
                } else if a < 0.0 && rng.random_bool(0.75) {
                    let mut s = random_subset(rng, &all);
                    s.extend(&base);
                    s.sort_unstable();
                    s.dedup();
                    s
                } else {
                    random_subset(rng, &all)
                };
                iid_acd_objective(a, *alpha, g, &random_dist_on(rng, d, &support), theta)
            }
            SearchProblem::MarkovRenyi { alpha, nu, theta } => {
                let allowed = markov_allowed(alpha.value(), nu, theta);
                let mu = random_cyclic_pair_within(rng, d, &|i, j| allowed(i, j)).expect("validated feasible");
                markov_objective(alpha.value(), &mu, nu, theta)
            }
            SearchProblem::MarkovExpIntegral { g, mu } => {
                let th = random_cyclic_pair_within(rng, d, &|i, j| mu.get(i, j) > 0.0).expect("supports carry cycles");
                markov_gibbs(g, &th, mu)
            }
            SearchProblem::MarkovAcd { alpha, g, theta } => {
                let a = alpha.value();
                let nu = if a > 1.0 || rng.random_bool(0.5) {
                    random_cyclic_pair_within(rng, d, &|i, j| theta.get(i, j) > 0.0).expect("supports carry cycles")
                } else {
                    let other = random_cyclic_pair_within(rng, d, &|_, _| true).expect("complete graph");
                    if a < 0.0 {
                        let cover = random_pair_on_edges(rng, d, &edges_where(d, |i, j| theta.get(i, j) > 0.0));
                        mix(&cover, &other, rng.random_range(0.05..1.0))
                    } else {
                        other
                    }
                };
                markov_acd_objective(a, *alpha, g, &nu, theta)
            }
        }
    }

    fn full_support(&self) -> bool {
        match self {
            SearchProblem::IidRenyi { nu, theta, .. } => full_dist(nu) && full_dist(theta),
            SearchProblem::IidExpIntegral { mu, .. } => full_dist(mu),
            SearchProblem::IidAcd { theta, .. } => full_dist(theta),
            SearchProblem::MarkovRenyi { nu, theta, .. } => full_pair(nu) && full_pair(theta),
            SearchProblem::MarkovExpIntegral { mu, .. } => full_pair(mu),
            SearchProblem::MarkovAcd { theta, .. } => full_pair(theta),
        }
    }

    fn is_markov(&self) -> bool {
        matches!(
            self,
            SearchProblem::MarkovRenyi { .. } | SearchProblem::MarkovExpIntegral { .. } | SearchProblem::MarkovAcd { .. }
        )
    }

    /// Objective at the point encoded by logits: a distribution (i.i.d.) or a
    /// positive kernel turned into its stationary pair measure (Markov).
    fn at_logits(&self, x: &[f64]) -> ExtReal {
        let d = self.dim();
        if self.is_markov() {
            let Some(p) = pair_from_logits(d, x) else { return ExtReal::NegInf };
            match self {
                SearchProblem::MarkovRenyi { alpha, nu, theta } => markov_objective(alpha.value(), &p, nu, theta),
                SearchProblem::MarkovExpIntegral { g, mu } => markov_gibbs(g, &p, mu),
                SearchProblem::MarkovAcd { alpha, g, theta } => markov_acd_objective(alpha.value(), *alpha, g, &p, theta),
                _ => unreachable!(),
            }
        } else {
            let Ok(p) = Dist::new(softmax(x)) else { return ExtReal::NegInf };
            match self {
                SearchProblem::IidRenyi { alpha, nu, theta } => iid_objective(alpha.value(), &p, nu, theta),
                SearchProblem::IidExpIntegral { g, mu } => iid_gibbs(g, &p, mu),
                SearchProblem::IidAcd { alpha, g, theta } => iid_acd_objective(alpha.value(), *alpha, g, &p, theta),
                _ => unreachable!(),
            }
        }
    }

    /// Coordinate-wise tilting of logits with per-coordinate step sizes
    /// that grow on success and halve on failure.
    fn hill_climb(&self, reference: f64) -> HillClimb {
        let d = self.dim();
        let n = if self.is_markov() { d * d } else { d };
        let sign = if self.is_sup() { 1.0 } else { -1.0 };
        let score = |x: &[f64]| sign * self.at_logits(x).to_f64();
        let mut x = vec![0.0; n];
        let mut best = score(&x);
        let mut steps = vec![1.0; n];
        let mut sweeps = 0;
        while sweeps < HILL_CLIMB_SWEEPS && steps.iter().any(|&s| s > 1e-12) {
            sweeps += 1;
            for k in 0..n {
                let mut improved = false;
                for dir in [1.0, -1.0] {
                    x[k] += dir * steps[k];
                    let s = score(&x);
                    if s > best {
                        best = s;
                        improved = true;
                        break;
                    }
                    x[k] -= dir * steps[k];
                }
                steps[k] *= if improved { 2.0 } else { 0.5 };
            }
        }
        let value = sign * best;
        HillClimb { value, gap: (reference - value).abs(), sweeps }
    }
}

fn iid_feasible(a: f64, nu: &Dist, theta: &Dist) -> Vec<usize> {
    let (n, t) = (nu.weights(), theta.weights());
    if a > 1.0 {
        pos(n)
    } else if a > 0.0 {
        (0..n.len()).filter(|&i| n[i] > 0.0 && t[i] > 0.0).collect()
    } else {
        pos(t)
    }
}

fn markov_allowed<'a>(a: f64, nu: &'a PairMeasure, theta: &'a PairMeasure) -> impl Fn(usize, usize) -> bool + 'a {
    move |i, j| {
        let (n, t) = (nu.get(i, j) > 0.0, theta.get(i, j) > 0.0);
        if a > 1.0 {
            n
        } else if a > 0.0 {
            n && t
        } else {
            t
        }
    }
}

/// Stationary pair measure of the positive kernel `softmax` of each logit row.
fn pair_from_logits(d: usize, x: &[f64]) -> Option<PairMeasure> {
    let k: Vec<Vec<f64>> = x.chunks(d).map(softmax).collect();
    let p = nalgebra::DMatrix::from_fn(d, d, |r, c| k[r][c]);
    let pi = stationary_law(&p);
    let pi = Dist::new(pi).ok()?;
    PairMeasure::from_kernel(&pi, &k).ok()
}

/// Sample `trials` random feasible points, evaluate the objective at each,
/// and compare the best against the closed-form extremum. On full-support
/// instances a hill climber additionally checks that the extremum is approached.
pub fn random_search_extremum(problem: &SearchProblem, trials: usize, seed: u64) -> Result<SearchReport> {
    if trials == 0 {
        return Err(Error::Invalid("at least one trial is required".into()));
    }
    problem.validate()?;
    let reference = problem.reference()?;
    let is_sup = problem.is_sup();
    let values: Vec<ExtReal> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            problem.sample(&mut rng)
        })
        .collect();
    let oriented = |v: ExtReal| if is_sup { v } else { -v };
    let mut best_trial = None;
    let mut best = oriented(ExtReal::NegInf);
    for (t, &v) in values.iter().enumerate() {
        if best_trial.is_none() || oriented(v) > oriented(best) {
            best = v;
            best_trial = Some(t);
        }
    }
    let violation = match oriented(best).gap(oriented(reference)) {
        ExtReal::Finite(x) => x,
        // best and reference both infinite in the same direction: a tie
        other => other.to_f64(),
    };
    let hill_climb = match reference {
        ExtReal::Finite(r) if problem.full_support() => Some(problem.hill_climb(r)),
        _ => None,
    };
    Ok(SearchReport {
        trials,
        is_sup,
        reference,
        best,
        best_trial,
        violation,
        hill_climb,
        pass: violation <= SEARCH_TOLERANCE,
    })
}
