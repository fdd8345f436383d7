//! Sequential minimal optimization for the C-SVC dual
//!
//!   min 1/2 a'Qa - e'a   s.t.  0 <= a_i <= C,  y'a = 0,
//!
//! with `Q_ij = y_i y_j K(x_i, x_j)`. Each step picks the maximal violating
//! pair and solves the two-variable subproblem analytically.

use super::cache::RowCache;
use super::kernel::KernelSpec;

const TAU: f64 = 1e-12;

pub(crate) struct Solution {
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct Problem<'a> {
    points: &'a [&'a [f64]],
    y: &'a [f64],
    kernel: KernelSpec,
    diag: Vec<f64>,
    cache: RowCache,
}

impl Problem<'_> {
    /// Row `i` of Q.
    fn q_row(&mut self, i: usize) -> std::rc::Rc<[f64]> {
        let (points, y, kernel) = (self.points, self.y, self.kernel);
        self.cache.get_or_insert_with(i, || {
            let xi = points[i];
            points
                .iter()
                .zip(y)
                .map(|(xj, &yj)| y[i] * yj * kernel.eval_unchecked(xi, xj))
                .collect()
        })
    }
}

pub(crate) fn solve(
    points: &[&[f64]],
    y: &[f64],
    kernel: KernelSpec,
    c: f64,
    eps: f64,
    max_iter: usize,
    cache_bytes: usize,
) -> Solution {
    let n = points.len();
    let diag = points.iter().map(|x| kernel.eval_unchecked(x, x)).collect();
    let mut prob = Problem {
        points,
        y,
        kernel,
        diag,
        cache: RowCache::new(cache_bytes, n),
    };
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];

    let is_upper = |a: f64| a >= c;
    let is_lower = |a: f64| a <= 0.0;
    let in_up = |t: usize, a: &[f64]| (y[t] > 0.0 && !is_upper(a[t])) || (y[t] < 0.0 && !is_lower(a[t]));
    let in_low = |t: usize, a: &[f64]| (y[t] > 0.0 && !is_lower(a[t])) || (y[t] < 0.0 && !is_upper(a[t]));

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let (mut i, mut j) = (usize::MAX, usize::MAX);
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(t, &alpha) && v > gmax {
                gmax = v;
                i = t;
            }
            if in_low(t, &alpha) && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < eps {
            converged = true;
            break;
        }
        iterations += 1;

        let q_i = prob.q_row(i);
        let q_j = prob.q_row(j);
        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let (mut ai, mut aj) = (old_ai, old_aj);
        if y[i] != y[j] {
            let quad = (prob.diag[i] + prob.diag[j] + 2.0 * q_i[j]).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let quad = (prob.diag[i] + prob.diag[j] - 2.0 * q_i[j]).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;
        let (di, dj) = (ai - old_ai, aj - old_aj);
        for t in 0..n {
            grad[t] += q_i[t] * di + q_j[t] * dj;
        }
    }

    let rho = compute_rho(&alpha, &grad, y, c);
    Solution {
        alpha,
        rho,
        iterations,
        converged,
    }
}

/// Offset from the free support vectors, or the midpoint of the feasible
/// interval when every multiplier sits at a bound.
fn compute_rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut n_free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            free_sum += yg;
        }
    }
    if n_free > 0 {
        free_sum / n_free as f64
    } else {
        (ub + lb) / 2.0
    }
}
