//! Random instances: distributions, stationary pair measures, edge functions, matrices.
//!
//! Pair measures are built as `π(i) k(j|i)` from a random kernel and its
//! stationary law, so balance holds by construction. Graph structure
//! (reachability, classes) is recomputed here from scratch.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::Exp1;

use crate::markov::PairMeasure;
use crate::spectral::NonnegMatrix;
use crate::var_iid::BoundedFn;
use crate::var_markov::EdgeFn;
use crate::Dist;

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let x: f64 = rng.sample(Exp1);
    x.max(1e-300)
}

/// Uniform point of the simplex (flat Dirichlet) with full support.
pub fn random_dist<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Dist {
    Dist::new((0..d).map(|_| exp1(rng)).collect()).expect("positive weights")
}

/// Flat Dirichlet point supported exactly on `support` (nonempty).
pub fn random_dist_on<R: Rng + ?Sized>(rng: &mut R, d: usize, support: &[usize]) -> Dist {
    let mut w = vec![0.0; d];
    for &s in support {
        w[s] = exp1(rng);
    }
    Dist::new(w).expect("nonempty support")
}

/// Random nonempty subset, each element kept with probability 1/2.
pub fn random_subset<R: Rng + ?Sized>(rng: &mut R, items: &[usize]) -> Vec<usize> {
    assert!(!items.is_empty(), "cannot draw from an empty set");
    let mut out: Vec<usize> = items.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
    if out.is_empty() {
        out.push(items[rng.random_range(0..items.len())]);
    }
    out
}

pub fn random_bounded_fn<R: Rng + ?Sized>(rng: &mut R, d: usize, lo: f64, hi: f64) -> BoundedFn {
    BoundedFn::new((0..d).map(|_| rng.random_range(lo..hi)).collect()).expect("finite values")
}

pub fn random_edge_fn<R: Rng + ?Sized>(rng: &mut R, d: usize, lo: f64, hi: f64) -> EdgeFn {
    EdgeFn::new((0..d).map(|_| (0..d).map(|_| rng.random_range(lo..hi)).collect()).collect()).expect("finite values")
}

/// Entries uniform in `[0, 2)`, each zeroed with probability `sparsity`.
pub fn random_nonneg_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize, sparsity: f64) -> NonnegMatrix {
    let entries = (0..d * d)
        .map(|_| if rng.random_bool(sparsity) { 0.0 } else { rng.random_range(0.0..2.0) })
        .collect();
    NonnegMatrix::from_flat(d, entries).expect("entries in range")
}

/// `reach[i][j]`: there is a path of length ≥ 1 from `i` to `j`.
fn reachability(d: usize, edge: &dyn Fn(usize, usize) -> bool) -> Vec<Vec<bool>> {
    let mut reach: Vec<Vec<bool>> = (0..d).map(|i| (0..d).map(|j| edge(i, j)).collect()).collect();
    for k in 0..d {
        for i in 0..d {
            if reach[i][k] {
                for j in 0..d {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    reach
}

/// Edges of `allowed` that lie on a directed cycle.
pub fn cyclic_edges(d: usize, allowed: &dyn Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
    let reach = reachability(d, allowed);
    let mut out = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if allowed(i, j) && (i == j || reach[j][i]) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Stationary law of an irreducible row-stochastic matrix.
pub(crate) fn stationary_law(p: &DMatrix<f64>) -> Vec<f64> {
    let n = p.nrows();
    let mut a = p.transpose() - DMatrix::identity(n, n);
    for c in 0..n {
        a[(n - 1, c)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let pi = a.lu().solve(&b).expect("irreducible kernels have a unique stationary law");
    pi.iter().map(|x| x.max(0.0)).collect()
}

/// Random kernel on `edges`, where every edge lies on a cycle inside `edges`,
/// turned into a pair measure with random weights on its classes.
pub fn random_pair_on_edges<R: Rng + ?Sized>(rng: &mut R, d: usize, edges: &[(usize, usize)]) -> PairMeasure {
    let mut k = vec![vec![0.0; d]; d];
    for &(i, j) in edges {
        k[i][j] = exp1(rng);
    }
    for row in &mut k {
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            row.iter_mut().for_each(|x| *x /= s);
        }
    }
    let edge = |i: usize, j: usize| k[i][j] > 0.0;
    let reach = reachability(d, &edge);
    let mut assigned = vec![false; d];
    let mut mu = vec![vec![0.0; d]; d];
    for s in 0..d {
        if assigned[s] || !reach[s][s] {
            continue;
        }
        let class: Vec<usize> = (0..d).filter(|&t| t == s || (reach[s][t] && reach[t][s])).collect();
        let p = DMatrix::from_fn(class.len(), class.len(), |r, c| k[class[r]][class[c]]);
        let pi = stationary_law(&p);
        let weight = exp1(rng);
        for (r, &i) in class.iter().enumerate() {
            assigned[i] = true;
            for &j in &class {
                mu[i][j] = weight * pi[r] * k[i][j];
            }
        }
    }
    PairMeasure::new(mu).expect("stationary edge laws are balanced")
}

/// Full-support pair measure from a positive random kernel.
pub fn random_full_support_pair<R: Rng + ?Sized>(rng: &mut R, d: usize) -> PairMeasure {
    let edges: Vec<(usize, usize)> = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).collect();
    random_pair_on_edges(rng, d, &edges)
}

/// Random stationary pair measure supported on a union of random cycles of
/// `allowed` (sometimes together with every cyclic edge of one class).
/// `None` when `allowed` has no cycle.
pub fn random_cyclic_pair_within<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    allowed: &dyn Fn(usize, usize) -> bool,
) -> Option<PairMeasure> {
    let core = cyclic_edges(d, allowed);
    if core.is_empty() {
        return None;
    }
    let out_edges: Vec<Vec<usize>> = (0..d)
        .map(|i| core.iter().filter(|e| e.0 == i).map(|e| e.1).collect())
        .collect();
    let mut chosen = vec![vec![false; d]; d];
    for _ in 0..rng.random_range(1..=3) {
        let (i, j) = core[rng.random_range(0..core.len())];
        let mut walk = vec![i];
        let mut next = j;
        let start = loop {
            if let Some(p) = walk.iter().position(|&v| v == next) {
                break p;
            }
            walk.push(next);
            let succ = &out_edges[next];
            next = succ[rng.random_range(0..succ.len())];
        };
        let cycle = &walk[start..];
        for (a, b) in cycle.iter().zip(cycle.iter().cycle().skip(1)) {
            chosen[*a][*b] = true;
        }
    }
    if rng.random_bool(1.0 / 3.0) {
        // widen to all cyclic edges sharing a class with a random core edge
        let reach = reachability(d, allowed);
        let (i, _) = core[rng.random_range(0..core.len())];
        for &(a, b) in &core {
            let same = |s: usize| s == i || (reach[i][s] && reach[s][i]);
            if same(a) && same(b) {
                chosen[a][b] = true;
            }
        }
    }
    let edges: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .filter(|&(i, j)| chosen[i][j])
        .collect();
    Some(random_pair_on_edges(rng, d, &edges))
}

/// Convex combination `w·p + (1−w)·q`; stays balanced.
pub fn mix(p: &PairMeasure, q: &PairMeasure, w: f64) -> PairMeasure {
    let d = p.dim();
    PairMeasure::new((0..d).map(|i| (0..d).map(|j| w * p.get(i, j) + (1.0 - w) * q.get(i, j)).collect()).collect())
        .expect("mixtures of pair measures are pair measures")
}
