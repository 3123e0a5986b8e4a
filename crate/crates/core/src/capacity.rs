//! Spectral-radius estimation of the coding digraph.
//!
//! The capacity of a constrained system presented by a digraph is
//! `log2(rho)`, `rho` the largest eigenvalue modulus of its adjacency
//! matrix. [`approximate_capacity`] estimates it by power iteration over the
//! accessor, one strongly connected component at a time (the spectral radius
//! of a digraph is the largest radius among its components, and each
//! component is irreducible, so normalized iteration on it settles into a
//! cycle of period equal to the component's period).

use nalgebra::{DMatrix, Schur};
use rayon::prelude::*;
use serde::Serialize;

use crate::digraph::{Accessor, ABSENT};
use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

/// Longest period looked for in the sequence of iterate maxima.
const MAX_PERIOD: usize = 64;

/// Largest observed length for the dense oracle (4096 x 4096 matrix).
pub const DENSE_ORACLE_MAX_K: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityResult {
    pub rho: f64,
    /// `log2(rho)` bits per nucleotide; 0 when the digraph has no cycle.
    pub capacity: f64,
    /// Power-iteration steps summed over all components.
    pub iterations: usize,
    pub tolerance: f64,
    /// Period of the dominant component's iterate cycle.
    pub period: usize,
    pub strongly_connected: bool,
}

/// Power-iteration estimate of `log2(rho)`.
///
/// Within a component the iterate is `g[v] <- sum of g[u] over arcs u -> v`,
/// rescaled so that its maximum is 1; the rescaling factors `m_t` are
/// recorded. Iteration stops once, for some period `p <= 64`, the geometric
/// means of the last two blocks of `p` factors agree within `tolerance` and
/// the iterate itself returns to within `sqrt(tolerance)` of its value `p`
/// steps earlier. The estimate of `rho` is the geometric mean of the last
/// `p` factors. The bare "consecutive maxima agree" rule is not enough: the
/// all-ones start can reproduce its maximum on the first step without being
/// anywhere near the eigenvector.
pub fn approximate_capacity(acc: &Accessor, tolerance: f64, max_iterations: usize) -> Result<CapacityResult> {
    if !(tolerance > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tolerance}")));
    }
    if acc.arc_count() == 0 {
        return Err(Error::invalid("capacity of a digraph without arcs"));
    }
    let comps = components(acc);
    let strongly_connected = comps.len() == 1 && comps[0].len() == acc.present_count();
    let mut best = (0.0f64, 1usize);
    let mut iterations = 0;
    for comp in &comps {
        if comp.len() == 1 {
            let v = comp[0];
            if acc.row(v).contains(&v) && best.0 < 1.0 {
                best = (1.0, 1);
            }
            continue;
        }
        let (rho, period, steps) = iterate_component(acc, comp, tolerance, max_iterations)?;
        iterations += steps;
        if rho > best.0 {
            best = (rho, period);
        }
    }
    let (rho, period) = best;
    let capacity = if rho > 0.0 { rho.log2().max(0.0) } else { 0.0 };
    Ok(CapacityResult { rho, capacity, iterations, tolerance, period, strongly_connected })
}

pub fn approximate_capacity_default(acc: &Accessor) -> Result<CapacityResult> {
    approximate_capacity(acc, DEFAULT_TOLERANCE, DEFAULT_MAX_ITERATIONS)
}

fn iterate_component(acc: &Accessor, comp: &[u32], tol: f64, max_iterations: usize) -> Result<(f64, usize, usize)> {
    // local CSR of in-arcs restricted to the component
    let mut local = vec![u32::MAX; acc.vertex_count()];
    for (i, &v) in comp.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let mut offsets = Vec::with_capacity(comp.len() + 1);
    let mut preds = Vec::new();
    offsets.push(0u32);
    for &v in comp {
        for u in acc.predecessors(v) {
            let lu = local[u as usize];
            if lu != u32::MAX {
                preds.push(lu);
            }
        }
        offsets.push(preds.len() as u32);
    }
    drop(local);

    let n = comp.len();
    let mut g = vec![1.0f64; n];
    let mut next = vec![0.0f64; n];
    let mut log_m: Vec<f64> = Vec::new();
    let mut snapshot: Option<(usize, Vec<f64>)> = None;
    let sup_tol = tol.sqrt();

    for t in 0..max_iterations {
        next.par_iter_mut().enumerate().with_min_len(4096).for_each(|(v, out)| {
            let (a, b) = (offsets[v] as usize, offsets[v + 1] as usize);
            *out = preds[a..b].iter().map(|&u| g[u as usize]).sum();
        });
        let m = next.iter().copied().fold(0.0f64, f64::max);
        if m == 0.0 {
            return Ok((0.0, 1, t + 1));
        }
        let inv = 1.0 / m;
        next.par_iter_mut().with_min_len(4096).for_each(|x| *x *= inv);
        std::mem::swap(&mut g, &mut next);
        log_m.push(m.ln());
        let len = log_m.len();

        if let Some((at, snap)) = &snapshot {
            let q = len - at;
            if block_means_agree(&log_m, q, tol) && sup_diff(&g, snap) <= sup_tol {
                let rho = (log_m[len - q..].iter().sum::<f64>() / q as f64).exp();
                return Ok((rho, q, t + 1));
            }
            if q >= MAX_PERIOD {
                snapshot = None;
            }
        } else if (1..=MAX_PERIOD).any(|p| block_means_agree(&log_m, p, tol)) {
            snapshot = Some((len, g.clone()));
        }
    }
    let last = log_m.iter().rev().take(MAX_PERIOD).copied().collect::<Vec<_>>();
    let last_estimate = (last.iter().sum::<f64>() / last.len().max(1) as f64).exp();
    Err(Error::Convergence { iterations: max_iterations, last_estimate })
}

/// Relative agreement of the geometric means of the last two blocks of `p`.
fn block_means_agree(log_m: &[f64], p: usize, tol: f64) -> bool {
    let len = log_m.len();
    if len < 2 * p {
        return false;
    }
    let recent: f64 = log_m[len - p..].iter().sum::<f64>() / p as f64;
    let before: f64 = log_m[len - 2 * p..len - p].iter().sum::<f64>() / p as f64;
    ((recent - before).exp() - 1.0).abs() <= tol
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Strongly connected components over present vertices (iterative Tarjan).
/// Vertices whose rows are empty but which are reached by arcs also count.
pub fn components(acc: &Accessor) -> Vec<Vec<u32>> {
    let n = acc.vertex_count();
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, u8)> = Vec::new();
    let mut counter = 0u32;
    let mut out = Vec::new();

    for root in acc.vertices() {
        if index[root as usize] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = counter;
        low[root as usize] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root as usize] = true;
        while let Some(&mut (v, ref mut c)) = call.last_mut() {
            if (*c as usize) < 4 {
                let w = acc.row(v)[*c as usize];
                *c += 1;
                if w == ABSENT {
                    continue;
                }
                let wi = w as usize;
                if index[wi] == UNSEEN {
                    index[wi] = counter;
                    low[wi] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[wi] = true;
                    call.push((w, 0));
                } else if on_stack[wi] {
                    low[v as usize] = low[v as usize].min(index[wi]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w as usize] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

/// Largest eigenvalue modulus. Unshifted starts such as permutation blocks
/// can stall the QR iteration; those are retried after an orthogonal
/// similarity transform, which keeps the spectrum.
fn eigen_radius(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let radius = |a: DMatrix<f64>| {
        Schur::try_new(a, f64::EPSILON, 1000 * n.max(1)).map(|s| s.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0f64, f64::max))
    };
    radius(m.clone()).unwrap_or_else(|| {
        let q = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 13) % 11) as f64 + if i == j { n as f64 } else { 0.0 }).qr().q();
        radius(q.transpose() * m * &q).expect("rotated matrix converges")
    })
}

/// Spectral radius from a dense eigensolver, taken per strongly connected
/// component so that defective eigenvalues of the whole matrix do not blur
/// the result; independent of the power iteration and limited to `k <= 6`.
pub fn dense_spectral_radius(acc: &Accessor) -> Result<f64> {
    if acc.k() > DENSE_ORACLE_MAX_K {
        return Err(Error::Unsupported(format!("dense oracle needs k <= {DENSE_ORACLE_MAX_K}, got {}", acc.k())));
    }
    let mut rho = 0.0f64;
    for comp in components(acc) {
        let mut m = DMatrix::<f64>::zeros(comp.len(), comp.len());
        for (i, &v) in comp.iter().enumerate() {
            for &j in acc.row(v) {
                if let Ok(col) = comp.binary_search(&j) {
                    m[(i, col)] += 1.0;
                }
            }
        }
        rho = rho.max(eigen_radius(&m));
    }
    // a 0/1 matrix has spectral radius 0 or at least 1
    Ok(if rho < 0.5 { 0.0 } else { rho })
}

/// `log2` of [`dense_spectral_radius`], 0 for an acyclic digraph.
pub fn capacity_oracle_dense(acc: &Accessor) -> Result<f64> {
    let rho = dense_spectral_radius(acc)?;
    Ok(if rho > 0.0 { rho.log2().max(0.0) } else { 0.0 })
}
