//! Log-domain helpers.

/// `log Σ exp(x_i)`; `-inf` for an empty input or all `-inf` entries.
pub(crate) fn logsumexp<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let s: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}

/// Natural log with `ln 0 = -inf` spelled out.
#[inline]
pub(crate) fn ln0(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Normalize log-weights into probabilities; entries at `-inf` become 0.
pub(crate) fn softmax(logs: &[f64]) -> Vec<f64> {
    let lz = logsumexp(logs.iter().copied());
    logs.iter()
        .map(|&l| if l == f64::NEG_INFINITY { 0.0 } else { (l - lz).exp() })
        .collect()
}
