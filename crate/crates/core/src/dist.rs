//! Finite probability distributions, relative entropy and Rényi divergence.
//!
//! Zero handling follows the usual conventions: `0·log 0 = 0`, and the Rényi
//! sum runs over the common support `{ν > 0, θ > 0}` only. No smoothing is
//! ever applied.

use serde::{Serialize, Serializer};

use crate::numeric::{ln0, logsumexp, softmax};
use crate::tol;
use crate::{Error, ExtReal, Result};

/// Probability mass function on `{0, .., d-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist {
    weights: Vec<f64>,
}

impl Dist {
    /// Validate and normalize nonnegative weights.
    ///
    /// Input is divided by its sum, so slightly drifted vectors (e.g. after a
    /// JSON round-trip) are accepted. All-zero input is rejected.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        for (idx, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { idx, value });
            }
            if value < 0.0 {
                return Err(Error::Negative { idx, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::ZeroMass);
        }
        Ok(Self { weights: weights.into_iter().map(|w| w / sum).collect() })
    }

    /// Distribution proportional to `exp(log_weights)`; `-inf` entries get mass 0.
    pub fn from_log_weights(log_weights: &[f64]) -> Result<Self> {
        if log_weights.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
            return Err(Error::Invalid("log-weights must be < +inf and not NaN".into()));
        }
        Self::new(softmax(log_weights))
    }

    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(vec![1.0; d])
    }

    pub fn point_mass(d: usize, at: usize) -> Result<Self> {
        if at >= d {
            return Err(Error::Invalid(format!("state {at} outside alphabet of size {d}")));
        }
        let mut w = vec![0.0; d];
        w[at] = 1.0;
        Self::new(w)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, x: usize) -> f64 {
        self.weights[x]
    }

    /// Indices with positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&x| self.weights[x] > 0.0).collect()
    }

    pub(crate) fn ensure_same_dim(&self, other: &Dist) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.weights.serialize(s)
    }
}

/// Order parameter of a Rényi divergence: any real except 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite()
            || value.abs() > tol::ALPHA_CAP
            || value.abs() < tol::ALPHA_GAP
            || (value - 1.0).abs() < tol::ALPHA_GAP
        {
            return Err(Error::InvalidAlpha(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The dual order `1 - α`. Skips the magnitude cap, which `1 - α` may
    /// exceed by one.
    pub fn dual(self) -> Alpha {
        Alpha(1.0 - self.0)
    }

    /// `α(α - 1)`, the normalization of the Rényi divergence.
    pub fn scale(self) -> f64 {
        self.0 * (self.0 - 1.0)
    }
}

/// `ν ⪯ θ`: every θ-null state is ν-null.
pub fn abs_cont(nu: &Dist, theta: &Dist) -> Result<bool> {
    nu.ensure_same_dim(theta)?;
    Ok(nu.weights.iter().zip(&theta.weights).all(|(&n, &t)| t > 0.0 || n == 0.0))
}

/// Relative entropy `D(ν‖θ)`, `+∞` unless `ν ⪯ θ`.
pub fn rel_entropy(nu: &Dist, theta: &Dist) -> Result<ExtReal> {
    if !abs_cont(nu, theta)? {
        return Ok(ExtReal::PosInf);
    }
    let d: f64 = nu
        .weights
        .iter()
        .zip(&theta.weights)
        .filter(|(&n, _)| n > 0.0)
        .map(|(&n, &t)| n * (n.ln() - t.ln()))
        .sum();
    ExtReal::new(d)
}

/// Rényi divergence `R_α(ν‖θ)`, normalized so that it is nonnegative for every α.
///
/// * `α > 1` and `ν ⋠ θ`: `+∞`.
/// * `α < 0`: `R_{1-α}(θ‖ν)`.
/// * otherwise `log Σ ν^α θ^{1-α} / (α(α-1))` over the common support, `+∞`
///   when the supports are disjoint.
pub fn renyi_div(alpha: Alpha, nu: &Dist, theta: &Dist) -> Result<ExtReal> {
    nu.ensure_same_dim(theta)?;
    let a = alpha.value();
    if a < 0.0 {
        return renyi_div(alpha.dual(), theta, nu);
    }
    if a > 1.0 && !abs_cont(nu, theta)? {
        return Ok(ExtReal::PosInf);
    }
    let terms = nu
        .weights
        .iter()
        .zip(&theta.weights)
        .filter(|(&n, &t)| n > 0.0 && t > 0.0)
        .map(|(&n, &t)| t.ln() + a * (n.ln() - t.ln()));
    Ok(scaled_log_sum(alpha, logsumexp(terms)))
}

/// `log Z / (α(α-1))` with `log Z = -∞` (empty common support) giving `+∞`.
pub(crate) fn scaled_log_sum(alpha: Alpha, log_z: f64) -> ExtReal {
    if log_z == f64::NEG_INFINITY {
        ExtReal::PosInf
    } else {
        ExtReal::Finite(log_z / alpha.scale())
    }
}

/// `R_α(ν‖θ)` evaluated through the densities `ν/η`, `θ/η` on `{η > 0}`.
///
/// The value does not depend on the reference `η` as long as `ν ⪯ η` and `θ ⪯ η`.
pub fn renyi_via_reference(alpha: Alpha, nu: &Dist, theta: &Dist, eta: &Dist) -> Result<ExtReal> {
    nu.ensure_same_dim(theta)?;
    nu.ensure_same_dim(eta)?;
    if !abs_cont(nu, eta)? {
        return Err(Error::NotAbsolutelyContinuous("nu must be absolutely continuous w.r.t. eta"));
    }
    if !abs_cont(theta, eta)? {
        return Err(Error::NotAbsolutelyContinuous("theta must be absolutely continuous w.r.t. eta"));
    }
    let (a, p, q) = if alpha.value() < 0.0 {
        (alpha.dual(), theta, nu)
    } else {
        (alpha, nu, theta)
    };
    let av = a.value();
    let mut terms = Vec::new();
    for x in eta.support() {
        let e = eta.get(x);
        let p_dens = p.get(x) / e;
        let q_dens = q.get(x) / e;
        if av > 1.0 && p_dens > 0.0 && q_dens == 0.0 {
            return Ok(ExtReal::PosInf);
        }
        if p_dens > 0.0 && q_dens > 0.0 {
            terms.push(e.ln() + q_dens.ln() + av * (p_dens.ln() - q_dens.ln()));
        }
    }
    Ok(scaled_log_sum(a, logsumexp(terms)))
}

/// `Σ_x f(x) p(x)` for finite `f`.
pub(crate) fn expectation(f: &[f64], p: &Dist) -> f64 {
    f.iter().zip(p.weights()).filter(|(_, &w)| w > 0.0).map(|(&v, &w)| v * w).sum()
}

/// `log Σ_x exp(f(x)) p(x)`.
pub(crate) fn log_mgf(f: &[f64], p: &Dist) -> f64 {
    logsumexp(f.iter().zip(p.weights()).map(|(&v, &w)| v + ln0(w)))
}
