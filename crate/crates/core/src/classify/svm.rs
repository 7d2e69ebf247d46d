use std::collections::VecDeque;
use std::rc::Rc;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::ClassifyError;

/// Hyperparameters of the RBF soft-margin SVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    /// Box constraint.
    pub c: f64,
    /// Kernel width; `1 / active features` when unset.
    pub gamma: Option<f64>,
    /// Stopping tolerance on the maximal KKT violation.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            gamma: None,
            tol: 1e-3,
            max_iter: 100_000,
        }
    }
}

/// A trained SVM. Support vectors are stored after column selection and
/// weighting, so scoring only needs the original feature layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub n_features: usize,
    /// Input columns kept (non-zero multiplier) and their multipliers.
    pub active: Vec<usize>,
    pub weights: Vec<f64>,
    pub support_vectors: Array2<f64>,
    /// `alpha_i * y_i` for each support vector.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn rbf(gamma: f64, a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    let d: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d).exp()
}

/// Selects the active columns and applies their multipliers.
fn transform(x: ArrayView2<f64>, active: &[usize], weights: &[f64]) -> Array2<f64> {
    let mut out = x.select(Axis(1), active);
    for (mut col, &w) in out.axis_iter_mut(Axis(1)).zip(weights) {
        if w != 1.0 {
            col.mapv_inplace(|v| v * w);
        }
    }
    out
}

/// Lazily computed kernel rows with a bounded LRU cache.
struct KernelRows<'a> {
    x: &'a Array2<f64>,
    gamma: f64,
    rows: Vec<Option<Rc<[f64]>>>,
    order: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelRows<'a> {
    fn new(x: &'a Array2<f64>, gamma: f64) -> Self {
        let n = x.nrows();
        // about 64 MiB of cached rows
        let capacity = ((64usize << 20) / (8 * n.max(1))).clamp(2, n.max(2));
        Self {
            x,
            gamma,
            rows: vec![None; n],
            order: VecDeque::new(),
            capacity,
        }
    }

    fn row(&mut self, i: usize) -> Rc<[f64]> {
        if let Some(r) = &self.rows[i] {
            return Rc::clone(r);
        }
        let xi = self.x.row(i);
        let row: Rc<[f64]> = self
            .x
            .rows()
            .into_iter()
            .map(|xk| rbf(self.gamma, xi, xk))
            .collect();
        if self.order.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.rows[old] = None;
            }
        }
        self.order.push_back(i);
        self.rows[i] = Some(Rc::clone(&row));
        row
    }
}

/// Trains an RBF SVM with SMO using second-order working-set selection.
///
/// The dual `min ½αᵀQα − eᵀα` s.t. `yᵀα = 0`, `0 ≤ α ≤ C` is solved until the
/// maximal violating pair gap drops below `tol`. Working-set selection is
/// deterministic, so repeated training gives identical models.
pub fn train_svm_rbf(
    features: ArrayView2<f64>,
    labels: &[bool],
    multipliers: &[f64],
    params: &SvmParams,
) -> Result<SvmModel, ClassifyError> {
    if !(params.c > 0.0) || !(params.tol > 0.0) || params.gamma.is_some_and(|g| !(g > 0.0)) {
        return Err(ClassifyError::InvalidParameter("C, gamma and tol must be positive"));
    }
    if features.nrows() != labels.len() {
        return Err(ClassifyError::LengthMismatch(features.nrows(), labels.len()));
    }
    if multipliers.len() != features.ncols() {
        return Err(ClassifyError::WidthMismatch {
            expected: features.ncols(),
            found: multipliers.len(),
        });
    }
    if features.iter().chain(multipliers).any(|v| !v.is_finite()) {
        return Err(ClassifyError::NonFinite);
    }
    let pos = labels.iter().filter(|&&l| l).count();
    if pos == 0 || pos == labels.len() {
        return Err(ClassifyError::SingleClass);
    }
    let (active, weights): (Vec<usize>, Vec<f64>) = multipliers
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0.0)
        .map(|(j, &w)| (j, w))
        .unzip();
    if active.is_empty() {
        return Err(ClassifyError::NoActiveFeatures);
    }
    let gamma = params.gamma.unwrap_or(1.0 / active.len() as f64);
    let x = transform(features, &active, &weights);
    let n = x.nrows();
    let c = params.c;
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut kernel = KernelRows::new(&x, gamma);
    const TAU: f64 = 1e-12;

    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iter {
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if in_up(alpha[t], y[t]) {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i = t;
                }
            }
        }
        if i == usize::MAX {
            converged = true;
            break;
        }
        let ki = kernel.row(i);
        let mut gmax2 = f64::NEG_INFINITY;
        let mut best_obj = f64::INFINITY;
        let mut j = usize::MAX;
        for t in 0..n {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let yg = y[t] * grad[t];
            if yg > gmax2 {
                gmax2 = yg;
            }
            let grad_diff = gmax + yg;
            if grad_diff > 0.0 {
                let mut quad = 2.0 - 2.0 * ki[t];
                if quad <= 0.0 {
                    quad = TAU;
                }
                let obj = -(grad_diff * grad_diff) / quad;
                if obj < best_obj {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        if gmax + gmax2 < params.tol || j == usize::MAX {
            converged = true;
            break;
        }
        iterations += 1;

        let kj = kernel.row(j);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let mut quad = 2.0 - 2.0 * ki[j];
        if quad <= 0.0 {
            quad = TAU;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for k in 0..n {
            grad[k] += y[k] * (y[i] * ki[k] * di + y[j] * kj[k] * dj);
        }
    }

    // bias from free vectors, or the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free_sum, mut free) = (0.0, 0usize);
    for t in 0..n {
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
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 {
        free_sum / free as f64
    } else {
        (ub + lb) / 2.0
    };

    let support: Vec<usize> = (0..n).filter(|&t| alpha[t] > 0.0).collect();
    Ok(SvmModel {
        n_features: features.ncols(),
        support_vectors: x.select(Axis(0), &support),
        dual_coef: support.iter().map(|&t| alpha[t] * y[t]).collect(),
        active,
        weights,
        bias: -rho,
        gamma,
        c,
        iterations,
        converged,
    })
}

impl SvmModel {
    /// Raw decision values `Σ αᵢyᵢ K(xᵢ, x) + b`.
    pub fn decision_scores(&self, samples: ArrayView2<f64>) -> Result<Vec<f64>, ClassifyError> {
        if samples.ncols() != self.n_features {
            return Err(ClassifyError::WidthMismatch {
                expected: self.n_features,
                found: samples.ncols(),
            });
        }
        let x = transform(samples, &self.active, &self.weights);
        Ok(x.rows()
            .into_iter()
            .map(|row| {
                self.support_vectors
                    .rows()
                    .into_iter()
                    .zip(&self.dual_coef)
                    .map(|(sv, &coef)| coef * rbf(self.gamma, sv, row))
                    .sum::<f64>()
                    + self.bias
            })
            .collect())
    }

    pub fn alphas(&self) -> impl Iterator<Item = f64> + '_ {
        self.dual_coef.iter().map(|c| c.abs())
    }
}
