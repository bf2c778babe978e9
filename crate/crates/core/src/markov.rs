//! Stationary pair measures and divergence rates between stationary chains.
//!
//! A pair measure `ν` on `S × S` with equal row and column marginals is the
//! edge law of a stationary Markov chain. Its kernel `ν(j|i) = ν(i,j)/ν(i,·)`
//! is set to zero on rows outside the support `S_ν = {i : ν(i,·) > 0}`, and
//! every matrix built from kernels inherits those zero rows.

use serde::{Serialize, Serializer};

use crate::dist::abs_cont;
use crate::numeric::ln0;
use crate::spectral::{log_growth_rate, ClassDecomposition, LogMatrix, NonnegMatrix};
use crate::tol;
use crate::{Alpha, Dist, Error, ExtReal, Result};

/// Probability measure on `S × S` with equal marginals, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMeasure {
    d: usize,
    entries: Vec<f64>,
}

impl PairMeasure {
    /// Validate, normalize to total mass 1, and check marginal balance.
    ///
    /// Imbalance above [`tol::BALANCE`] is rejected rather than projected away.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = NonnegMatrix::new(rows)?;
        let d = m.dim();
        let flat: Vec<f64> = m.rows().into_iter().flatten().collect();
        let total: f64 = flat.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let pm = Self { d, entries: flat.into_iter().map(|x| x / total).collect() };
        let (state, gap) = pm.worst_balance();
        if gap > tol::BALANCE {
            return Err(Error::Unbalanced { state, gap });
        }
        Ok(pm)
    }

    /// The pair law `p(i) p(j)` of an i.i.d. sequence.
    pub fn iid(p: &Dist) -> Self {
        let d = p.dim();
        let entries = (0..d * d).map(|k| p.get(k / d) * p.get(k % d)).collect();
        Self { d, entries }
    }

    /// `π(i) k(j|i)` for a row-stochastic `k` with stationary law `π`.
    pub fn from_kernel(pi: &Dist, kernel: &[Vec<f64>]) -> Result<Self> {
        if kernel.len() != pi.dim() {
            return Err(Error::DimensionMismatch(pi.dim(), kernel.len()));
        }
        let rows = kernel
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().map(|k| pi.get(i) * k).collect())
            .collect();
        Self::new(rows)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.d + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.d).map(<[f64]>::to_vec).collect()
    }

    /// Flattened `d²`-point distribution, index `i·d + j`.
    pub fn flattened(&self) -> Dist {
        Dist::new(self.entries.clone()).expect("pair measures have mass 1")
    }

    /// Row marginal `ν(i,·)`, equal to the column marginal.
    pub fn marginal(&self) -> Vec<f64> {
        self.entries.chunks(self.d).map(|r| r.iter().sum()).collect()
    }

    /// `S_ν`: states with positive marginal.
    pub fn support(&self) -> Vec<usize> {
        self.marginal().iter().enumerate().filter(|(_, &m)| m > 0.0).map(|(i, _)| i).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.get(i, j) > 0.0
    }

    /// Largest gap between row and column marginals.
    pub fn balance_error(&self) -> f64 {
        self.worst_balance().1
    }

    fn worst_balance(&self) -> (usize, f64) {
        let d = self.d;
        (0..d)
            .map(|k| {
                let row: f64 = (0..d).map(|j| self.get(k, j)).sum();
                let col: f64 = (0..d).map(|i| self.get(i, k)).sum();
                (k, (row - col).abs())
            })
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best })
    }

    /// The support digraph's classes on `S_ν`; every class is cyclic and no
    /// edge joins two classes.
    pub fn classes(&self) -> ClassDecomposition {
        crate::spectral::classes(&self.as_matrix(), &self.support())
    }

    pub fn as_matrix(&self) -> NonnegMatrix {
        NonnegMatrix::from_flat(self.d, self.entries.clone()).expect("entries are validated")
    }

    /// `log ν(j|i)`, `-inf` off the support.
    pub fn log_kernel(&self, i: usize, j: usize) -> f64 {
        let row: f64 = (0..self.d).map(|k| self.get(i, k)).sum();
        if row > 0.0 {
            ln0(self.get(i, j)) - row.ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    pub(crate) fn ensure_same_dim(&self, other: &PairMeasure) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(self.d, other.d));
        }
        Ok(())
    }
}

impl Serialize for PairMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

/// Conditional next-state law of a pair measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    d: usize,
    rows: Vec<f64>,
    support_states: Vec<usize>,
}

impl Kernel {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i * self.d + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.d..(i + 1) * self.d]
    }

    pub fn support_states(&self) -> &[usize] {
        &self.support_states
    }

    pub fn dim(&self) -> usize {
        self.d
    }
}

/// `ν(j|i)`: rows normalized on `S_ν`, identically zero off it.
pub fn kernel(nu: &PairMeasure) -> Kernel {
    let d = nu.dim();
    let marg = nu.marginal();
    let rows = (0..d * d)
        .map(|k| {
            let (i, j) = (k / d, k % d);
            if marg[i] > 0.0 {
                nu.get(i, j) / marg[i]
            } else {
                0.0
            }
        })
        .collect();
    Kernel { d, rows, support_states: nu.support() }
}

/// Entrywise support containment `θ(i,j) = 0 ⇒ ν(i,j) = 0`.
pub fn abs_cont_pair(nu: &PairMeasure, theta: &PairMeasure) -> Result<bool> {
    nu.ensure_same_dim(theta)?;
    Ok(nu.entries.iter().zip(&theta.entries).all(|(&n, &t)| n == 0.0 || t > 0.0))
}

/// `Σ_{i,j} ν(i,j) log(ν(j|i)/θ(j|i))`, `+∞` when `ν ⋠ θ`.
pub fn rel_entropy_rate(nu: &PairMeasure, theta: &PairMeasure) -> Result<ExtReal> {
    if !abs_cont_pair(nu, theta)? {
        return Ok(ExtReal::PosInf);
    }
    let d = nu.dim();
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            let w = nu.get(i, j);
            if w > 0.0 {
                sum += w * (nu.log_kernel(i, j) - theta.log_kernel(i, j));
            }
        }
    }
    Ok(ExtReal::Finite(sum))
}

fn path_space_size(d: usize, n: usize) -> Result<usize> {
    let size = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > tol::PATH_SIZE_GUARD {
        return Err(Error::SizeGuard { size, limit: tol::PATH_SIZE_GUARD });
    }
    Ok(size as usize)
}

/// `ν_n(i_1..i_n) = ν(i_1,i_2) Π_{k=2}^{n-1} ν(i_{k+1}|i_k)` as an explicit
/// distribution on `S^n`, paths indexed in base `d` with `i_1` most significant.
pub fn path_distribution(nu: &PairMeasure, n: usize) -> Result<Dist> {
    if n < 2 {
        return Err(Error::Invalid("paths need at least two coordinates".into()));
    }
    let d = nu.dim();
    let size = path_space_size(d, n)?;
    let k = kernel(nu);
    let mut probs: Vec<f64> = (0..d * d).map(|p| nu.get(p / d, p % d)).collect();
    for _ in 2..n {
        let mut next = Vec::with_capacity(probs.len() * d);
        for (p, &w) in probs.iter().enumerate() {
            let last = p % d;
            next.extend(k.row(last).iter().map(|&q| w * q));
        }
        probs = next;
    }
    debug_assert_eq!(probs.len(), size);
    Dist::new(probs)
}

/// Whether `ν ⪯ θ ⇔ ν_n ⪯ θ_n` holds at level `n`. Always true; exposed for testing.
pub fn check_abs_cont_lift(nu: &PairMeasure, theta: &PairMeasure, n: usize) -> Result<bool> {
    let pair = abs_cont_pair(nu, theta)?;
    let lifted = abs_cont(&path_distribution(nu, n)?, &path_distribution(theta, n)?)?;
    Ok(pair == lifted)
}

/// `log(ν(j|i)^α θ(j|i)^{1−α})` on edges where both kernels are positive.
pub fn tilted_kernel_log(alpha: f64, nu: &PairMeasure, theta: &PairMeasure) -> Result<LogMatrix> {
    nu.ensure_same_dim(theta)?;
    LogMatrix::from_fn(nu.dim(), |i, j| {
        if nu.has_edge(i, j) && theta.has_edge(i, j) {
            let (ln_nu, ln_th) = (nu.log_kernel(i, j), theta.log_kernel(i, j));
            ln_th + alpha * (ln_nu - ln_th)
        } else {
            f64::NEG_INFINITY
        }
    })
}

/// Rényi divergence rate
/// `R_α(ν‖θ) = ρ([ν(j|i)^α θ(j|i)^{1−α}]) / (α(α−1))`.
///
/// `+∞` when `α > 1` and `ν ⋠ θ`, and when `0 < α < 1` and the common
/// support has no cycle. For `α < 0` this is `R_{1−α}(θ‖ν)`.
pub fn renyi_rate(alpha: Alpha, nu: &PairMeasure, theta: &PairMeasure) -> Result<ExtReal> {
    nu.ensure_same_dim(theta)?;
    let a = alpha.value();
    if a < 0.0 {
        return renyi_rate(alpha.dual(), theta, nu);
    }
    if a > 1.0 && !abs_cont_pair(nu, theta)? {
        return Ok(ExtReal::PosInf);
    }
    Ok(match log_growth_rate(&tilted_kernel_log(a, nu, theta)?)? {
        ExtReal::Finite(rho) => ExtReal::Finite(rho / alpha.scale()),
        _ => ExtReal::PosInf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pm(rows: &[&[f64]]) -> PairMeasure {
        PairMeasure::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }
    fn coin(p: f64) -> PairMeasure {
        PairMeasure::iid(&Dist::new(vec![p, 1.0 - p]).unwrap())
    }
    fn a(x: f64) -> Alpha {
        Alpha::new(x).unwrap()
    }

    #[test]
    fn construction_checks_balance() {
        assert!(matches!(
            PairMeasure::new(vec![vec![0.0, 1.0], vec![0.0, 0.0]]),
            Err(Error::Unbalanced { .. })
        ));
        let m = pm(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(m.get(0, 1), 0.25);
        assert!(PairMeasure::new(vec![vec![0.0; 2]; 2]).is_err());
    }

    #[test]
    fn support_examples() {
        assert_eq!(coin(0.5).support(), vec![0, 1]);
        assert_eq!(pm(&[&[1.0, 0.0], &[0.0, 0.0]]).support(), vec![0]);
        assert_eq!(pm(&[&[0.0, 0.5], &[0.5, 0.0]]).support(), vec![0, 1]);
    }

    #[test]
    fn kernel_examples() {
        let k = kernel(&coin(0.5));
        assert!((0..2).all(|i| k.row(i) == [0.5, 0.5]));
        let k = kernel(&pm(&[&[1.0, 0.0, 0.0], &[0.0; 3], &[0.0; 3]]));
        assert_eq!(k.row(0), &[1.0, 0.0, 0.0]);
        assert_eq!(k.row(1), &[0.0; 3]);
        assert_eq!(k.support_states(), &[0]);
        let k = kernel(&pm(&[&[0.0, 0.5], &[0.5, 0.0]]));
        assert_eq!(k.row(0), &[0.0, 1.0]);
        assert_eq!(k.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn abs_cont_examples() {
        let delta = pm(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let full = coin(0.5);
        assert!(abs_cont_pair(&delta, &full).unwrap());
        assert!(!abs_cont_pair(&full, &delta).unwrap());
        assert!(abs_cont_pair(&full, &full).unwrap());
    }

    #[test]
    fn rel_entropy_rate_examples() {
        let nu = coin(0.5);
        assert_eq!(rel_entropy_rate(&nu, &nu).unwrap(), ExtReal::ZERO);
        let p: f64 = 0.3;
        let expect = 0.5 * (1.0 / (2.0 * p)).ln() + 0.5 * (1.0 / (2.0 * (1.0 - p))).ln();
        let got = rel_entropy_rate(&nu, &coin(p)).unwrap().finite().unwrap();
        assert_abs_diff_eq!(got, expect, epsilon = 1e-15);
        let delta = pm(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(rel_entropy_rate(&nu, &delta).unwrap(), ExtReal::PosInf);
    }

    #[test]
    fn path_distribution_examples() {
        let nu = pm(&[&[0.1, 0.2], &[0.2, 0.5]]);
        assert_eq!(path_distribution(&nu, 2).unwrap().weights(), nu.flattened().weights());
        let p = path_distribution(&coin(0.5), 3).unwrap();
        assert!(p.weights().iter().all(|w| (w - 0.125).abs() < 1e-15));
        let p = path_distribution(&pm(&[&[0.0, 0.5], &[0.5, 0.0]]), 3).unwrap();
        // paths 0→1→0 (index 2) and 1→0→1 (index 5)
        assert_eq!(p.support(), vec![2, 5]);
        assert_abs_diff_eq!(p.get(2), 0.5, epsilon = 1e-15);
        assert!(matches!(path_distribution(&coin(0.5), 30), Err(Error::SizeGuard { .. })));
        assert!(path_distribution(&coin(0.5), 1).is_err());
    }

    #[test]
    fn path_marginal_consistency() {
        let nu = pm(&[&[0.1, 0.2, 0.0], &[0.1, 0.1, 0.1], &[0.1, 0.0, 0.3]]);
        let p3 = path_distribution(&nu, 3).unwrap();
        let p4 = path_distribution(&nu, 4).unwrap();
        for (idx, &w) in p3.weights().iter().enumerate() {
            let summed: f64 = (0..3).map(|l| p4.get(idx * 3 + l)).sum();
            assert_abs_diff_eq!(summed, w, epsilon = 1e-15);
        }
    }

    #[test]
    fn lift_examples() {
        let a_ = pm(&[&[0.1, 0.2, 0.0], &[0.1, 0.1, 0.1], &[0.1, 0.0, 0.3]]);
        let b = PairMeasure::iid(&Dist::uniform(3).unwrap());
        let c = pm(&[&[0.5, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.5]]);
        for (x, y) in [(&a_, &b), (&b, &a_), (&c, &a_)] {
            for n in [3, 4] {
                assert!(check_abs_cont_lift(x, y, n).unwrap());
            }
        }
    }

    #[test]
    fn renyi_rate_examples() {
        let nu = coin(0.5);
        for x in [-2.0, 0.5, 3.0] {
            assert_abs_diff_eq!(renyi_rate(a(x), &nu, &nu).unwrap().to_f64(), 0.0, epsilon = 1e-14);
        }
        let p: f64 = 0.2;
        let expect = 0.5 * (0.25 * (1.0 / p + 1.0 / (1.0 - p))).ln();
        let got = renyi_rate(a(2.0), &nu, &coin(p)).unwrap().finite().unwrap();
        assert_abs_diff_eq!(got, expect, epsilon = 1e-13);
        let cycle = pm(&[&[0.0, 0.5], &[0.5, 0.0]]);
        let loops = pm(&[&[0.5, 0.0], &[0.0, 0.5]]);
        assert_eq!(renyi_rate(a(0.5), &cycle, &loops).unwrap(), ExtReal::PosInf);
        assert_eq!(renyi_rate(a(2.0), &cycle, &loops).unwrap(), ExtReal::PosInf);
        assert_eq!(renyi_rate(a(-1.0), &cycle, &loops).unwrap(), ExtReal::PosInf);
    }

    #[test]
    fn renyi_rate_of_iid_matches_renyi_div() {
        let p = Dist::new(vec![0.2, 0.5, 0.3]).unwrap();
        let q = Dist::new(vec![0.4, 0.4, 0.2]).unwrap();
        for x in [-1.0, 0.3, 2.5] {
            let r = renyi_rate(a(x), &PairMeasure::iid(&p), &PairMeasure::iid(&q)).unwrap();
            let r0 = crate::dist::renyi_div(a(x), &p, &q).unwrap();
            assert!(r.distance(r0) < 1e-12);
        }
    }

    fn pair_from_weights(d: usize, k: &[f64]) -> PairMeasure {
        // symmetric weights have the uniform law as a stationary law
        PairMeasure::new((0..d).map(|i| (0..d).map(|j| k[i * d + j] + k[j * d + i]).collect()).collect()).unwrap()
    }

    fn arb_full_pair() -> impl Strategy<Value = PairMeasure> {
        (2usize..5).prop_flat_map(|d| {
            prop::collection::vec(0.05f64..1.0, d * d).prop_map(move |k| pair_from_weights(d, &k))
        })
    }

    fn arb_two_pairs() -> impl Strategy<Value = (PairMeasure, PairMeasure)> {
        (2usize..5).prop_flat_map(|d| {
            (prop::collection::vec(0.05f64..1.0, d * d), prop::collection::vec(0.05f64..1.0, d * d))
                .prop_map(move |(k1, k2)| (pair_from_weights(d, &k1), pair_from_weights(d, &k2)))
        })
    }

    proptest! {
        #[test]
        fn kernel_rows_sum_to_one_on_support(nu in arb_full_pair()) {
            let k = kernel(&nu);
            for i in 0..nu.dim() {
                prop_assert!((k.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn renyi_rate_skew_symmetric((nu, theta) in arb_two_pairs(), x in -3.0f64..5.0) {
            prop_assume!(x.abs() > 1e-3 && (x - 1.0).abs() > 1e-3);
            let r1 = renyi_rate(a(x), &nu, &theta).unwrap().to_f64();
            let r2 = renyi_rate(a(1.0 - x), &theta, &nu).unwrap().to_f64();
            prop_assert!(r1 >= -1e-12);
            prop_assert!((r1 - r2).abs() <= 1e-10);
        }

        #[test]
        fn rel_entropy_rate_nonnegative((nu, theta) in arb_two_pairs()) {
            prop_assert!(rel_entropy_rate(&nu, &theta).unwrap().to_f64() >= -1e-12);
        }
    }
}
