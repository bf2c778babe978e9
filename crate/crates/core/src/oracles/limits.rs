//! Finite-n path-space quantities computed by log-domain recursions over
//! the last coordinate, never by enumerating paths.

use serde::Serialize;

use crate::markov::{rel_entropy_rate, renyi_rate, PairMeasure};
use crate::numeric::logsumexp;
use crate::spectral::{log_growth_rate, LogMatrix};
use crate::var_markov::EdgeFn;
use crate::{Alpha, Error, ExtReal, Result};

/// How a finite-n sequence estimates its limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `(1/n) F_n`.
    Cesaro,
    /// `F_n − F_{n−1}`.
    Difference,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// `(n, value)` pairs, strictly increasing in `n`.
    pub sequence: Vec<(usize, ExtReal)>,
    pub limit_claim: ExtReal,
    /// `|last value − limit_claim|`; equal infinities count as 0.
    pub final_gap: f64,
    pub mode: Mode,
}

impl ConvergenceReport {
    fn new(sequence: Vec<(usize, ExtReal)>, limit_claim: ExtReal, mode: Mode) -> Self {
        let final_gap = sequence.last().map_or(f64::INFINITY, |(_, v)| v.distance(limit_claim));
        Self { sequence, limit_claim, final_gap, mode }
    }

    /// Largest `|value − limit_claim|` over entries with `n ≥ from`.
    pub fn max_gap_from(&self, from: usize) -> f64 {
        self.sequence
            .iter()
            .filter(|(n, _)| *n >= from)
            .map(|(_, v)| v.distance(self.limit_claim))
            .fold(0.0, f64::max)
    }
}

/// Both estimates of one limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub cesaro: ConvergenceReport,
    pub difference: ConvergenceReport,
}

fn ensure_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Invalid("path length must be at least 2".into()));
    }
    Ok(())
}

fn ensure_dim(d1: usize, d2: usize) -> Result<()> {
    if d1 != d2 {
        return Err(Error::DimensionMismatch(d1, d2));
    }
    Ok(())
}

/// `log p(j|i)` from raw pair-measure entries, `-inf` where the edge is absent.
fn log_cond(p: &PairMeasure, i: usize, j: usize) -> f64 {
    let row: f64 = (0..p.dim()).map(|k| p.get(i, k)).sum();
    if p.get(i, j) > 0.0 {
        p.get(i, j).ln() - row.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Runs `v ← v ⊗ L` (log-semiring vector–matrix product) and returns
/// `log Σ v` after each step; `out[k]` is the mass after `k` steps.
fn log_masses(init: Vec<f64>, step: impl Fn(usize, usize) -> f64, steps: usize) -> Vec<f64> {
    let d = init.len();
    let mut v = init;
    let mut out = vec![logsumexp(v.iter().copied())];
    for _ in 0..steps {
        v = (0..d).map(|j| logsumexp((0..d).map(|i| v[i] + step(i, j)))).collect();
        out.push(logsumexp(v.iter().copied()));
    }
    out
}

fn finite_or_inf(x: f64) -> ExtReal {
    ExtReal::new(x).unwrap_or(ExtReal::PosInf)
}

/// `(1/n) R_α(ν_n‖θ_n)` for `n = 2..=n_max`, from
/// `Σ_paths ν_n^α θ_n^{1−α} = 1ᵀ A M^{n−2} 1` with `A = [ν(i,j)^α θ(i,j)^{1−α}]`
/// and `M = [ν(j|i)^α θ(j|i)^{1−α}]`, plus successive differences.
/// The limit claim is [`renyi_rate`].
pub fn renyi_rate_oracle(alpha: Alpha, nu: &PairMeasure, theta: &PairMeasure, n_max: usize) -> Result<LimitReport> {
    ensure_n(n_max)?;
    ensure_dim(nu.dim(), theta.dim())?;
    let claim = renyi_rate(alpha, nu, theta)?;
    let (a, p, q) = if alpha.value() < 0.0 { (alpha.dual(), theta, nu) } else { (alpha, nu, theta) };
    let av = a.value();
    let d = p.dim();
    let violated = (0..d).any(|i| (0..d).any(|j| p.get(i, j) > 0.0 && q.get(i, j) == 0.0));
    let (cesaro, difference) = if av > 1.0 && violated {
        let inf: Vec<(usize, ExtReal)> = (2..=n_max).map(|n| (n, ExtReal::PosInf)).collect();
        (inf.clone(), inf[1..].to_vec())
    } else {
        let both = |x: f64, y: f64| x > 0.0 && y > 0.0;
        let init: Vec<f64> = (0..d)
            .map(|j| {
                logsumexp((0..d).filter(|&i| both(p.get(i, j), q.get(i, j))).map(|i| {
                    let (lp, lq) = (p.get(i, j).ln(), q.get(i, j).ln());
                    lq + av * (lp - lq)
                }))
            })
            .collect();
        let step = |i: usize, j: usize| {
            let (lp, lq) = (log_cond(p, i, j), log_cond(q, i, j));
            if lp > f64::NEG_INFINITY && lq > f64::NEG_INFINITY {
                lq + av * (lp - lq)
            } else {
                f64::NEG_INFINITY
            }
        };
        let logs = log_masses(init, step, n_max - 2);
        let scale = a.scale();
        let to_value = |l: f64| if l == f64::NEG_INFINITY { ExtReal::PosInf } else { finite_or_inf(l / scale) };
        let ces = logs.iter().enumerate().map(|(k, &l)| (k + 2, to_value(l).scale(1.0 / (k + 2) as f64))).collect();
        let dif = logs
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                let v = if w[0] == f64::NEG_INFINITY || w[1] == f64::NEG_INFINITY {
                    ExtReal::PosInf
                } else {
                    finite_or_inf((w[1] - w[0]) / scale)
                };
                (k + 3, v)
            })
            .collect();
        (ces, dif)
    };
    Ok(LimitReport {
        cesaro: ConvergenceReport::new(cesaro, claim, Mode::Cesaro),
        difference: ConvergenceReport::new(difference, claim, Mode::Difference),
    })
}

/// `(1/n) D(ν_n‖θ_n)` for `n = 2..=n_max`, via the chain rule
/// `D(ν_{n+1}‖θ_{n+1}) = D(ν_n‖θ_n) + Σ_i m_n(i) Σ_j ν(j|i) log(ν(j|i)/θ(j|i))`,
/// where `m_n` is the law of the last coordinate, propagated through the kernel.
/// The limit claim is [`rel_entropy_rate`].
pub fn rel_entropy_rate_oracle(nu: &PairMeasure, theta: &PairMeasure, n_max: usize) -> Result<LimitReport> {
    ensure_n(n_max)?;
    ensure_dim(nu.dim(), theta.dim())?;
    let claim = rel_entropy_rate(nu, theta)?;
    let d = nu.dim();
    if (0..d).any(|i| (0..d).any(|j| nu.get(i, j) > 0.0 && theta.get(i, j) == 0.0)) {
        let inf: Vec<(usize, ExtReal)> = (2..=n_max).map(|n| (n, ExtReal::PosInf)).collect();
        return Ok(LimitReport {
            cesaro: ConvergenceReport::new(inf.clone(), claim, Mode::Cesaro),
            difference: ConvergenceReport::new(inf[1..].to_vec(), claim, Mode::Difference),
        });
    }
    let kern = |i: usize, j: usize| log_cond(nu, i, j).exp();
    let mut total: f64 = 0.0;
    let mut m = vec![0.0; d];
    for i in 0..d {
        for j in 0..d {
            let w = nu.get(i, j);
            if w > 0.0 {
                total += w * (w.ln() - theta.get(i, j).ln());
                m[j] += w;
            }
        }
    }
    let mut ces = vec![(2, ExtReal::Finite(total / 2.0))];
    let mut dif = Vec::new();
    for n in 3..=n_max {
        let mut step = 0.0;
        let mut next = vec![0.0; d];
        for i in 0..d {
            if m[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let (lp, lq) = (log_cond(nu, i, j), log_cond(theta, i, j));
                if lp > f64::NEG_INFINITY {
                    step += m[i] * lp.exp() * (lp - lq);
                    next[j] += m[i] * kern(i, j);
                }
            }
        }
        total += step;
        m = next;
        ces.push((n, ExtReal::Finite(total / n as f64)));
        dif.push((n, ExtReal::Finite(step)));
    }
    Ok(LimitReport {
        cesaro: ConvergenceReport::new(ces, claim, Mode::Cesaro),
        difference: ConvergenceReport::new(dif, claim, Mode::Difference),
    })
}

fn easyvar_log_masses(g: &EdgeFn, mu: &PairMeasure, n: usize) -> Result<Vec<f64>> {
    ensure_n(n)?;
    ensure_dim(g.dim(), mu.dim())?;
    let d = mu.dim();
    let init: Vec<f64> = (0..d)
        .map(|j| logsumexp((0..d).filter(|&i| mu.get(i, j) > 0.0).map(|i| mu.get(i, j).ln() + g.get(i, j))))
        .collect();
    Ok(log_masses(init, |i, j| g.get(i, j) + log_cond(mu, i, j), n - 2))
}

/// `(1/n) log Σ_paths μ_n(path) exp(Σ_{k<n} g(i_k, i_{k+1}))`.
pub fn easyvar_finite_n_oracle(g: &EdgeFn, mu: &PairMeasure, n: usize) -> Result<f64> {
    let logs = easyvar_log_masses(g, mu, n)?;
    Ok(logs.last().expect("n >= 2") / n as f64)
}

/// [`easyvar_finite_n_oracle`] for `n = 2..=n_max` and successive differences,
/// against the growth rate of `[e^g μ(j|i)]`.
pub fn easyvar_oracle(g: &EdgeFn, mu: &PairMeasure, n_max: usize) -> Result<LimitReport> {
    let logs = easyvar_log_masses(g, mu, n_max)?;
    let d = mu.dim();
    let m = LogMatrix::from_fn(d, |i, j| g.get(i, j) + log_cond(mu, i, j))?;
    let claim = log_growth_rate(&m)?;
    let ces = logs.iter().enumerate().map(|(k, &l)| (k + 2, finite_or_inf(l / (k + 2) as f64))).collect();
    let dif = logs.windows(2).enumerate().map(|(k, w)| (k + 3, finite_or_inf(w[1] - w[0]))).collect();
    Ok(LimitReport {
        cesaro: ConvergenceReport::new(ces, claim, Mode::Cesaro),
        difference: ConvergenceReport::new(dif, claim, Mode::Difference),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Dist;
    use approx::assert_abs_diff_eq;

    fn coin(p: f64) -> PairMeasure {
        PairMeasure::iid(&Dist::new(vec![p, 1.0 - p]).unwrap())
    }
    fn a(x: f64) -> Alpha {
        Alpha::new(x).unwrap()
    }

    #[test]
    fn renyi_oracle_equal_inputs_is_zero() {
        let nu = PairMeasure::new(vec![vec![0.2, 0.1, 0.0], vec![0.0, 0.2, 0.2], vec![0.1, 0.1, 0.1]]).unwrap();
        let r = renyi_rate_oracle(a(2.0), &nu, &nu, 20).unwrap();
        for (_, v) in r.cesaro.sequence.iter().chain(&r.difference.sequence) {
            assert!(v.to_f64().abs() < 1e-13);
        }
    }

    #[test]
    fn renyi_oracle_iid_is_constant() {
        // i.i.d. coins: Σ over n-paths factorizes, so (1/n)R_α(ν_n‖θ_n) is R_α of the marginals
        let (p, q): (f64, f64) = (0.5, 0.2);
        let expect = ((p * p / q) + ((1.0 - p) * (1.0 - p) / (1.0 - q))).ln() / 2.0;
        let r = renyi_rate_oracle(a(2.0), &coin(p), &coin(q), 30).unwrap();
        for (_, v) in &r.cesaro.sequence {
            assert_abs_diff_eq!(v.to_f64(), expect, epsilon = 1e-13);
        }
        assert!(r.cesaro.final_gap < 1e-12);
        assert_eq!(r.difference.sequence.first().unwrap().0, 3);
    }

    #[test]
    fn renyi_oracle_infinite_claims() {
        let cycle = PairMeasure::new(vec![vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap();
        let loops = PairMeasure::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        for x in [0.5, 2.0, -1.0] {
            let r = renyi_rate_oracle(a(x), &cycle, &loops, 10).unwrap();
            assert!(r.cesaro.sequence.iter().all(|(_, v)| v.is_pos_inf()));
            assert_eq!(r.cesaro.final_gap, 0.0);
        }
    }

    #[test]
    fn rel_entropy_oracle_examples() {
        let nu = coin(0.5);
        let r = rel_entropy_rate_oracle(&nu, &nu, 10).unwrap();
        assert!(r.cesaro.sequence.iter().all(|(_, v)| v.to_f64() == 0.0));
        let loops = PairMeasure::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let r = rel_entropy_rate_oracle(&nu, &loops, 10).unwrap();
        assert!(r.cesaro.sequence.iter().all(|(_, v)| v.is_pos_inf()));
        let theta = PairMeasure::new(vec![vec![0.2, 0.1, 0.1], vec![0.1, 0.1, 0.1], vec![0.1, 0.1, 0.1]]).unwrap();
        let nu = PairMeasure::new(vec![vec![0.2, 0.1, 0.0], vec![0.0, 0.2, 0.2], vec![0.1, 0.1, 0.1]]).unwrap();
        let r = rel_entropy_rate_oracle(&nu, &theta, 50).unwrap();
        assert!(r.difference.max_gap_from(3) <= 1e-10);
    }

    #[test]
    fn easyvar_examples() {
        let mu = PairMeasure::new(vec![vec![0.2, 0.1, 0.0], vec![0.0, 0.2, 0.2], vec![0.1, 0.1, 0.1]]).unwrap();
        for n in [2, 5, 40] {
            let v0 = easyvar_finite_n_oracle(&EdgeFn::constant(3, 0.0).unwrap(), &mu, n).unwrap();
            assert!(v0.abs() < 1e-14);
            let c = 1.3;
            let vc = easyvar_finite_n_oracle(&EdgeFn::constant(3, c).unwrap(), &mu, n).unwrap();
            assert_abs_diff_eq!(vc, c * (n - 1) as f64 / n as f64, epsilon = 1e-13);
        }
        assert!(easyvar_finite_n_oracle(&EdgeFn::constant(3, 0.0).unwrap(), &mu, 1).is_err());
    }
}
