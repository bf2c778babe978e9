//! Nonnegative matrices: support digraph, classes, Perron data, growth rate.
//!
//! Classes are the strongly connected components of the support digraph
//! `{(i, j) : m_ij > 0}`. A class is cyclic when it contains at least one
//! edge (a self-loop counts). The growth rate
//!
//! ```text
//! ρ(M) = lim (1/n) log Σ_ij (M^n)_ij
//! ```
//!
//! is the log of the largest Perron root over cyclic classes, or `-∞` when
//! the digraph has no cycle.
//!
//! Matrices whose entries live in the log domain ([`LogMatrix`]) are scaled
//! class by class before any exponentiation, so entries like `e^{αg}` with
//! large `α` never overflow.

use nalgebra::{DMatrix, DVector};
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::markov::PairMeasure;
use crate::numeric::{ln0, logsumexp};
use crate::tol;
use crate::{Error, ExtReal, Result};

/// Square matrix with finite nonnegative entries, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegMatrix {
    d: usize,
    entries: Vec<f64>,
}

impl NonnegMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::Empty);
        }
        let mut entries = Vec::with_capacity(d * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch(d, row.len()));
            }
            entries.extend(row);
        }
        Self::from_flat(d, entries)
    }

    /// Build from a row-major slice of length `d * d`.
    pub fn from_flat(d: usize, entries: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Empty);
        }
        if entries.len() != d * d {
            return Err(Error::DimensionMismatch(d * d, entries.len()));
        }
        for (idx, &value) in entries.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { idx, value });
            }
            if value < 0.0 {
                return Err(Error::Negative { idx, value });
            }
        }
        Ok(Self { d, entries })
    }

    pub fn from_fn(d: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let entries = (0..d * d).map(|k| f(k / d, k % d)).collect();
        Self::from_flat(d, entries)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.d + j]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.get(i, j) > 0.0
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.d).map(<[f64]>::to_vec).collect()
    }

    /// Copy with every entry outside `keep` set to zero.
    pub fn masked(&self, keep: impl Fn(usize, usize) -> bool) -> NonnegMatrix {
        let d = self.d;
        let entries = (0..d * d)
            .map(|k| if keep(k / d, k % d) { self.entries[k] } else { 0.0 })
            .collect();
        NonnegMatrix { d, entries }
    }

    pub fn to_log(&self) -> LogMatrix {
        LogMatrix { d: self.d, logs: self.entries.iter().map(|&x| ln0(x)).collect() }
    }
}

impl Serialize for NonnegMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

/// Nonnegative matrix given by entrywise logarithms (`-inf` marks a zero entry).
#[derive(Debug, Clone, PartialEq)]
pub struct LogMatrix {
    d: usize,
    logs: Vec<f64>,
}

impl LogMatrix {
    /// Entries must be finite or `-inf`.
    pub fn from_fn(d: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Empty);
        }
        let logs: Vec<f64> = (0..d * d).map(|k| f(k / d, k % d)).collect();
        if let Some((idx, &value)) = logs.iter().enumerate().find(|(_, l)| l.is_nan() || **l == f64::INFINITY) {
            return Err(Error::NonFinite { idx, value });
        }
        Ok(Self { d, logs })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.logs[i * self.d + j]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.get(i, j) > f64::NEG_INFINITY
    }

    /// Entrywise exponential. Fails if an entry overflows.
    pub fn exp(&self) -> Result<NonnegMatrix> {
        NonnegMatrix::from_flat(self.d, self.logs.iter().map(|l| l.exp()).collect())
    }
}

/// Strongly connected components restricted to a set of states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassDecomposition {
    /// Sorted states of each class; classes ordered by their smallest state.
    pub classes: Vec<Vec<usize>>,
    /// Class index of each state, `None` for states outside the restriction.
    pub class_of: Vec<Option<usize>>,
    /// Whether each class contains an edge.
    pub cyclic: Vec<bool>,
}

impl ClassDecomposition {
    pub fn cyclic_classes(&self) -> impl Iterator<Item = (usize, &[usize])> {
        self.classes
            .iter()
            .enumerate()
            .filter(|(k, _)| self.cyclic[*k])
            .map(|(k, c)| (k, c.as_slice()))
    }
}

/// Perron eigendata of one irreducible class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerronData {
    /// Perron root. May be `+inf` for log-domain inputs whose root overflows; see `log_lambda`.
    pub lambda: f64,
    pub log_lambda: f64,
    /// Left eigenvector, zero off the class. `Σ left_i right_i = 1`.
    pub left: Vec<f64>,
    /// Right eigenvector, zero off the class. `Σ right_i = 1`.
    pub right: Vec<f64>,
    pub class_index: usize,
    pub class: Vec<usize>,
}

impl PerronData {
    /// `max(‖uM − λu‖_∞, ‖Mw − λw‖_∞)` restricted to the class.
    pub fn residual(&self, m: &NonnegMatrix) -> f64 {
        let mut worst = 0.0f64;
        for &i in &self.class {
            let mw: f64 = self.class.iter().map(|&j| m.get(i, j) * self.right[j]).sum();
            let um: f64 = self.class.iter().map(|&j| self.left[j] * m.get(j, i)).sum();
            worst = worst
                .max((mw - self.lambda * self.right[i]).abs())
                .max((um - self.lambda * self.left[i]).abs());
        }
        worst
    }
}

fn decompose(d: usize, states: &[usize], edge: impl Fn(usize, usize) -> bool) -> ClassDecomposition {
    let mut inside = vec![false; d];
    for &s in states {
        inside[s] = true;
    }
    let mut graph = DiGraph::<(), ()>::with_capacity(d, d);
    for _ in 0..d {
        graph.add_node(());
    }
    for i in (0..d).filter(|&i| inside[i]) {
        for j in (0..d).filter(|&j| inside[j]) {
            if edge(i, j) {
                graph.add_edge(NodeIndex::new(i), NodeIndex::new(j), ());
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = petgraph::algo::tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(NodeIndex::index).collect();
            c.sort_unstable();
            c
        })
        .filter(|c| inside[c[0]])
        .collect();
    classes.sort_unstable_by_key(|c| c[0]);
    let mut class_of = vec![None; d];
    for (k, c) in classes.iter().enumerate() {
        for &s in c {
            class_of[s] = Some(k);
        }
    }
    let cyclic = classes.iter().map(|c| c.len() > 1 || edge(c[0], c[0])).collect();
    ClassDecomposition { classes, class_of, cyclic }
}

/// Whether the support digraph (self-loops included) has a directed cycle.
pub fn has_cycle(m: &NonnegMatrix) -> bool {
    let all: Vec<usize> = (0..m.dim()).collect();
    classes(m, &all).cyclic.iter().any(|&c| c)
}

/// Classes of the support digraph restricted to `states`.
///
/// # Panics
/// If a state is out of range.
pub fn classes(m: &NonnegMatrix, states: &[usize]) -> ClassDecomposition {
    decompose(m.dim(), states, |i, j| m.has_edge(i, j))
}

/// [`classes`] for a log-domain matrix.
pub fn log_classes(m: &LogMatrix, states: &[usize]) -> ClassDecomposition {
    decompose(m.dim(), states, |i, j| m.has_edge(i, j))
}

/// Perron data of `m` on `class`, which must be a cyclic class of the full support digraph.
pub fn perron(m: &NonnegMatrix, class: &[usize]) -> Result<PerronData> {
    log_perron(&m.to_log(), class)
}

/// [`perron`] for a log-domain matrix. Eigenvectors are those of the
/// matrix itself; `lambda` is recovered through `log_lambda`.
pub fn log_perron(m: &LogMatrix, class: &[usize]) -> Result<PerronData> {
    let all: Vec<usize> = (0..m.dim()).collect();
    let dec = log_classes(m, &all);
    let mut sorted = class.to_vec();
    sorted.sort_unstable();
    let k = dec
        .cyclic_classes()
        .find(|(_, c)| *c == sorted.as_slice())
        .map(|(k, _)| k)
        .ok_or(Error::NotIrreducible)?;
    class_perron(m, &dec.classes[k], k)
}

/// Perron data for a class known to be cyclic and irreducible.
fn class_perron(m: &LogMatrix, class: &[usize], class_index: usize) -> Result<PerronData> {
    let n = class.len();
    let shift = class
        .iter()
        .flat_map(|&i| class.iter().map(move |&j| m.get(i, j)))
        .fold(f64::NEG_INFINITY, f64::max);
    let a = DMatrix::from_fn(n, n, |r, c| {
        let l = m.get(class[r], class[c]);
        if l == f64::NEG_INFINITY {
            0.0
        } else {
            (l - shift).exp().max(f64::MIN_POSITIVE)
        }
    });
    let (lambda_scaled, right_c) = noda(&a)?;
    let (_, left_c) = noda(&a.transpose())?;
    let norm: f64 = left_c.dot(&right_c);
    let mut left = vec![0.0; m.dim()];
    let mut right = vec![0.0; m.dim()];
    for (r, &s) in class.iter().enumerate() {
        right[s] = right_c[r];
        left[s] = left_c[r] / norm;
    }
    let log_lambda = lambda_scaled.ln() + shift;
    Ok(PerronData {
        lambda: log_lambda.exp(),
        log_lambda,
        left,
        right,
        class_index,
        class: class.to_vec(),
    })
}

/// Perron root and right eigenvector (summing to 1) of an irreducible matrix.
///
/// Noda's inverse iteration with the Collatz–Wielandt upper bound as shift.
/// Each step works on `X⁻¹AX` with `X = diag(x)` the current estimate, whose
/// Perron vector is close to all-ones, so eigenvector entries spanning many
/// orders of magnitude keep full relative precision. The estimate is kept
/// in the log domain.
fn noda(a: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    const MAX_ITERATIONS: usize = 200;
    const ACCEPT_SPREAD: f64 = 1e-11;
    let n = a.nrows();
    if n == 1 {
        return Ok((a[(0, 0)], DVector::from_element(1, 1.0)));
    }
    let ones = DVector::from_element(n, 1.0);
    let mut log_x = vec![0.0f64; n];
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    for _ in 0..MAX_ITERATIONS {
        let b = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * (log_x[j] - log_x[i]).exp());
        let ratios = &b * &ones;
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        let spread = (hi - lo) / hi;
        if best.as_ref().is_none_or(|(s, _, _)| spread < *s) {
            best = Some((spread, 0.5 * (lo + hi), log_x.clone()));
        }
        if spread <= tol::PERRON_SPREAD {
            break;
        }
        // fall back to a shift strictly above the root if the bound is numerically singular
        let step = [hi, hi + (hi - lo)].into_iter().find_map(|shift| {
            let z = (DMatrix::identity(n, n) * shift - &b).lu().solve(&ones)?;
            z.iter().all(|v| v.is_finite() && *v > 0.0).then_some(z)
        });
        let Some(z) = step else { break };
        for (l, zi) in log_x.iter_mut().zip(z.iter()) {
            *l += zi.ln();
        }
        let top = log_x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        log_x.iter_mut().for_each(|l| *l -= top);
    }
    let (spread, lambda, log_x) = best.expect("at least one iteration runs");
    if spread > ACCEPT_SPREAD {
        return Err(Error::PerronNotConverged { iterations: MAX_ITERATIONS, spread });
    }
    let total = logsumexp(log_x.iter().copied());
    Ok((lambda, DVector::from_iterator(n, log_x.iter().map(|l| (l - total).exp()))))
}

/// Perron data of every cyclic class of `m` restricted to `states`.
pub fn class_perrons(m: &LogMatrix, states: &[usize]) -> Result<Vec<PerronData>> {
    let dec = log_classes(m, states);
    dec.cyclic_classes().map(|(k, c)| class_perron(m, c, k)).collect()
}

/// The cyclic class of `m` restricted to `states` with the largest Perron
/// root; ties within [`tol::CLASS_TIE`] go to the class holding the smallest state.
pub fn dominant_class(m: &LogMatrix, states: &[usize]) -> Result<Option<PerronData>> {
    let all = class_perrons(m, states)?;
    let top = all.iter().map(|p| p.log_lambda).fold(f64::NEG_INFINITY, f64::max);
    Ok(all.into_iter().find(|p| p.log_lambda >= top - tol::CLASS_TIE * top.abs().max(1.0)))
}

/// `ρ(M)`: log of the largest Perron root over cyclic classes, `-∞` without cycles.
pub fn growth_rate(m: &NonnegMatrix) -> Result<ExtReal> {
    log_growth_rate(&m.to_log())
}

/// [`growth_rate`] for a log-domain matrix.
pub fn log_growth_rate(m: &LogMatrix) -> Result<ExtReal> {
    let all: Vec<usize> = (0..m.dim()).collect();
    Ok(match dominant_class(m, &all)? {
        Some(p) => ExtReal::Finite(p.log_lambda),
        None => ExtReal::NegInf,
    })
}

fn log_matmul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; d * d];
    for i in 0..d {
        for j in 0..d {
            out[i * d + j] = logsumexp((0..d).map(|k| a[i * d + k] + b[k * d + j]));
        }
    }
    out
}

/// `(1/n) log Σ_ij (M^n)_ij`, with `M^n` formed by log-domain repeated squaring.
pub fn growth_rate_bruteforce(m: &NonnegMatrix, n: u64) -> Result<ExtReal> {
    if n == 0 {
        return Err(Error::Invalid("matrix power must be at least 1".into()));
    }
    let d = m.dim();
    let mut base = m.to_log().logs;
    let mut acc: Option<Vec<f64>> = None;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(p) => log_matmul(&p, &base, d),
            });
        }
        e >>= 1;
        if e > 0 {
            base = log_matmul(&base, &base, d);
        }
    }
    let total = logsumexp(acc.expect("n >= 1"));
    ExtReal::new(total / n as f64)
}

/// `log Σ_ij (M^n)_ij` for `n = 1..=n_max`, by direct iteration of `1ᵀ M^n`.
pub fn log_mass_sequence(m: &NonnegMatrix, n_max: usize) -> Vec<f64> {
    let d = m.dim();
    let lm = m.to_log();
    let mut v = vec![0.0; d];
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        v = (0..d).map(|j| logsumexp((0..d).map(|i| v[i] + lm.get(i, j)))).collect();
        out.push(logsumexp(v.iter().copied()));
    }
    out
}

/// `m_ij > 0 ⇔ μ(i,j) > 0` for all entries.
pub fn compatible(m: &NonnegMatrix, mu: &PairMeasure) -> Result<bool> {
    if m.dim() != mu.dim() {
        return Err(Error::DimensionMismatch(m.dim(), mu.dim()));
    }
    let d = m.dim();
    Ok((0..d).all(|i| (0..d).all(|j| m.has_edge(i, j) == (mu.get(i, j) > 0.0))))
}

/// A pair measure whose support is exactly the set of edges of `m` lying
/// inside cyclic classes; every pair measure absolutely continuous w.r.t.
/// `m` is absolutely continuous w.r.t. it. `None` when `m` has no cycle.
///
/// Built by averaging uniform cycle measures: for each intra-class edge
/// `(i, j)`, the cycle closing it along a shortest path `j → i`. Only the
/// support of the result is canonical.
pub fn maximal_abs_cont(m: &NonnegMatrix) -> Option<PairMeasure> {
    let d = m.dim();
    let all: Vec<usize> = (0..d).collect();
    let dec = classes(m, &all);
    let cyclic: Vec<&[usize]> = dec.cyclic_classes().map(|(_, c)| c).collect();
    if cyclic.is_empty() {
        return None;
    }
    let mut total = vec![0.0; d * d];
    for class in &cyclic {
        let in_class = |s: usize| class.binary_search(&s).is_ok();
        let mut acc = vec![0.0; d * d];
        let mut cycles = 0usize;
        for &i in class.iter() {
            for &j in class.iter().filter(|&&j| m.has_edge(i, j)) {
                let path = shortest_path(m, j, i, &in_class);
                let len = path.len();
                acc[i * d + j] += 1.0 / len as f64;
                for w in path.windows(2) {
                    acc[w[0] * d + w[1]] += 1.0 / len as f64;
                }
                cycles += 1;
            }
        }
        for (t, a) in total.iter_mut().zip(&acc) {
            *t += a / (cycles as f64 * cyclic.len() as f64);
        }
    }
    let rows = total.chunks(d).map(<[f64]>::to_vec).collect();
    Some(PairMeasure::new(rows).expect("cycle averages are balanced"))
}

/// Vertices of a shortest path `from → to` using edges inside the class.
/// Returns `[from]` when `from == to`.
fn shortest_path(m: &NonnegMatrix, from: usize, to: usize, in_class: &impl Fn(usize) -> bool) -> Vec<usize> {
    let d = m.dim();
    let mut prev = vec![usize::MAX; d];
    let mut queue = std::collections::VecDeque::from([from]);
    prev[from] = from;
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for w in (0..d).filter(|&w| in_class(w) && m.has_edge(v, w)) {
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut v = to;
    while v != from {
        v = prev[v];
        path.push(v);
    }
    path.reverse();
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn mat(rows: &[&[f64]]) -> NonnegMatrix {
        NonnegMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(NonnegMatrix::new(vec![vec![1.0, -1.0], vec![0.0, 0.0]]).is_err());
        assert!(NonnegMatrix::new(vec![vec![1.0, f64::NAN], vec![0.0, 0.0]]).is_err());
        assert!(NonnegMatrix::new(vec![vec![1.0, 1.0], vec![0.0]]).is_err());
        assert!(NonnegMatrix::new(vec![]).is_err());
    }

    #[test]
    fn cycle_detection() {
        assert!(!has_cycle(&mat(&[&[0.0, 1.0], &[0.0, 0.0]])));
        assert!(has_cycle(&mat(&[&[0.0, 1.0], &[1.0, 0.0]])));
        assert!(has_cycle(&mat(&[&[0.0, 0.0], &[0.0, 0.5]])));
    }

    #[test]
    fn class_examples() {
        let c = classes(&mat(&[&[1.0, 1.0], &[0.0, 1.0]]), &[0, 1]);
        assert_eq!(c.classes, vec![vec![0], vec![1]]);
        assert_eq!(c.cyclic, vec![true, true]);
        let c = classes(&mat(&[&[0.0, 1.0], &[1.0, 0.0]]), &[0, 1]);
        assert_eq!(c.classes, vec![vec![0, 1]]);
        let c = classes(&mat(&[&[0.0, 1.0], &[0.0, 0.0]]), &[0, 1]);
        assert_eq!(c.classes.len(), 2);
        assert_eq!(c.cyclic, vec![false, false]);
    }

    #[test]
    fn classes_respect_restriction() {
        let m = mat(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]]);
        let c = classes(&m, &[0, 1]);
        assert_eq!(c.classes, vec![vec![0], vec![1]]);
        assert_eq!(c.class_of, vec![Some(0), Some(1), None]);
        assert_eq!(c.cyclic, vec![false, false]);
        assert_eq!(classes(&m, &[0, 1, 2]).classes, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn perron_examples() {
        let p = perron(&mat(&[&[2.0]]), &[0]).unwrap();
        assert_abs_diff_eq!(p.lambda, 2.0, epsilon = 1e-15);
        let m = mat(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let p = perron(&m, &[0, 1]).unwrap();
        assert_abs_diff_eq!(p.lambda, 1.0, epsilon = 1e-13);
        // right sums to 1 and left·right = 1
        for s in 0..2 {
            assert_abs_diff_eq!(p.right[s], 0.5, epsilon = 1e-13);
            assert_abs_diff_eq!(p.left[s], 1.0, epsilon = 1e-13);
        }
        let m = mat(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert_abs_diff_eq!(perron(&m, &[0, 1]).unwrap().lambda, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn perron_normalization_and_residual() {
        let m = mat(&[&[0.1, 3.0, 0.0], &[0.0, 0.2, 1.0], &[4.0, 0.0, 0.0]]);
        let p = perron(&m, &[0, 1, 2]).unwrap();
        assert_abs_diff_eq!(p.right.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        let dot: f64 = p.left.iter().zip(&p.right).map(|(a, b)| a * b).sum();
        assert_abs_diff_eq!(dot, 1.0, epsilon = 1e-14);
        assert!(p.residual(&m) <= 1e-10 * p.lambda);
    }

    #[test]
    fn perron_rejects_non_class() {
        let m = mat(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert_eq!(perron(&m, &[0, 1]), Err(Error::NotIrreducible));
        let m = mat(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(perron(&m, &[0]), Err(Error::NotIrreducible));
    }

    #[test]
    fn perron_on_badly_scaled_class() {
        let m = mat(&[&[0.0, 1e3, 0.0], &[0.0, 0.0, 1e-3], &[1e-3, 0.0, 1e-6]]);
        let p = perron(&m, &[0, 1, 2]).unwrap();
        assert!(p.residual(&m) <= 1e-10 * p.lambda, "{}", p.residual(&m));
    }

    #[test]
    fn periodic_class_converges() {
        // 3-cycle with weights: λ = (2·3·4)^{1/3}
        let m = mat(&[&[0.0, 2.0, 0.0], &[0.0, 0.0, 3.0], &[4.0, 0.0, 0.0]]);
        let p = perron(&m, &[0, 1, 2]).unwrap();
        assert_abs_diff_eq!(p.lambda, 24f64.powf(1.0 / 3.0), epsilon = 1e-12);
    }

    #[test]
    fn growth_examples() {
        assert_eq!(growth_rate(&mat(&[&[0.0, 1.0], &[0.0, 0.0]])).unwrap(), ExtReal::NegInf);
        assert_abs_diff_eq!(growth_rate(&mat(&[&[2.0]])).unwrap().to_f64(), 2f64.ln(), epsilon = 1e-15);
        let m = mat(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let g = growth_rate(&m).unwrap().to_f64();
        assert_abs_diff_eq!(g, 2f64.ln(), epsilon = 1e-13);
        // Σ M^n = 4·2^{n-1} so (1/n)log = log 2 + log 2 / n
        let b = growth_rate_bruteforce(&m, 64).unwrap().to_f64();
        assert_abs_diff_eq!(b, 2f64.ln() + 2f64.ln() / 64.0, epsilon = 1e-13);
    }

    #[test]
    fn bruteforce_examples() {
        let b = growth_rate_bruteforce(&mat(&[&[2.0]]), 10).unwrap().to_f64();
        assert_abs_diff_eq!(b, 2f64.ln(), epsilon = 1e-15);
        assert_eq!(growth_rate_bruteforce(&mat(&[&[0.0, 1.0], &[0.0, 0.0]]), 2).unwrap(), ExtReal::NegInf);
        assert!(growth_rate_bruteforce(&mat(&[&[2.0]]), 0).is_err());
    }

    #[test]
    fn mass_sequence_matches_bruteforce() {
        let m = mat(&[&[0.3, 1.2, 0.0], &[0.0, 0.5, 0.7], &[1.1, 0.0, 0.2]]);
        let seq = log_mass_sequence(&m, 20);
        for n in [1usize, 7, 20] {
            let b = growth_rate_bruteforce(&m, n as u64).unwrap().to_f64();
            assert_abs_diff_eq!(seq[n - 1] / n as f64, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn dominant_class_ties_go_to_smallest_state() {
        let m = mat(&[&[2.0, 0.0], &[0.0, 2.0]]).to_log();
        let p = dominant_class(&m, &[0, 1]).unwrap().unwrap();
        assert_eq!(p.class, vec![0]);
        let m = mat(&[&[1.0, 0.0], &[0.0, 2.0]]).to_log();
        assert_eq!(dominant_class(&m, &[0, 1]).unwrap().unwrap().class, vec![1]);
        assert_eq!(dominant_class(&m, &[0]).unwrap().unwrap().class, vec![0]);
    }

    #[test]
    fn log_domain_handles_huge_entries() {
        let m = LogMatrix::from_fn(2, |i, j| if i == j { 2000.0 } else { 1990.0 }).unwrap();
        let g = log_growth_rate(&m).unwrap().to_f64();
        assert_abs_diff_eq!(g, 2000.0 + (1.0 + (-10f64).exp()).ln(), epsilon = 1e-10);
        assert!(m.exp().is_err());
    }

    #[test]
    fn compatibility() {
        let mu = PairMeasure::new(vec![vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        let m = mat(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert!(compatible(&m, &mu).unwrap());
        let mu = PairMeasure::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert!(!compatible(&m, &mu).unwrap());
        assert!(!compatible(&mat(&[&[1.0, 0.0], &[0.0, 0.0]]), &mu).unwrap());
        assert!(compatible(&mat(&[&[1.0, 0.0], &[0.0, 7.0]]), &mu).unwrap());
    }

    #[test]
    fn maximal_abs_cont_examples() {
        assert!(maximal_abs_cont(&mat(&[&[0.0, 1.0], &[0.0, 0.0]])).is_none());
        let tau = maximal_abs_cont(&mat(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap();
        assert!((0..2).all(|i| (0..2).all(|j| tau.get(i, j) > 0.0)));
        let tau = maximal_abs_cont(&mat(&[&[1.0, 1.0], &[0.0, 1.0]])).unwrap();
        assert_eq!(tau.get(0, 1), 0.0);
        assert_eq!(tau.get(1, 0), 0.0);
        assert_abs_diff_eq!(tau.get(0, 0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(tau.get(1, 1), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn restriction_keeps_growth_rate() {
        let m = mat(&[
            &[0.0, 2.0, 0.5, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 3.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        let tau = maximal_abs_cont(&m).unwrap();
        let restricted = m.masked(|i, j| tau.get(i, j) > 0.0);
        assert_eq!(growth_rate(&m).unwrap(), growth_rate(&restricted).unwrap());
        assert_eq!(tau.get(0, 2), 0.0);
    }

    fn arb_matrix() -> impl Strategy<Value = NonnegMatrix> {
        (1usize..6).prop_flat_map(|d| {
            prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..2.0], d * d)
                .prop_map(move |e| NonnegMatrix::from_flat(d, e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn perron_residuals_small(m in arb_matrix()) {
            let all: Vec<usize> = (0..m.dim()).collect();
            for (_, c) in classes(&m, &all).cyclic_classes() {
                let p = perron(&m, c).unwrap();
                prop_assert!(p.residual(&m) <= 1e-10 * p.lambda);
                prop_assert!(p.class.iter().all(|&s| p.left[s] > 0.0 && p.right[s] > 0.0));
            }
        }

        #[test]
        fn growth_monotone_under_increase(m in arb_matrix(), bump in 0.0f64..1.0) {
            let bigger = NonnegMatrix::from_fn(m.dim(), |i, j| m.get(i, j) * (1.0 + bump)).unwrap();
            let (a, b) = (growth_rate(&m).unwrap(), growth_rate(&bigger).unwrap());
            prop_assert!(a.to_f64() <= b.to_f64() + 1e-12);
        }

        #[test]
        fn tau_support_is_cyclic_class_edges(m in arb_matrix()) {
            let all: Vec<usize> = (0..m.dim()).collect();
            let dec = classes(&m, &all);
            match maximal_abs_cont(&m) {
                None => prop_assert!(!has_cycle(&m)),
                Some(tau) => {
                    prop_assert!(tau.balance_error() <= 1e-12);
                    for i in 0..m.dim() {
                        for j in 0..m.dim() {
                            let intra = m.has_edge(i, j)
                                && dec.class_of[i] == dec.class_of[j]
                                && dec.cyclic[dec.class_of[i].unwrap()];
                            prop_assert_eq!(tau.get(i, j) > 0.0, intra);
                        }
                    }
                }
            }
        }
    }
}
