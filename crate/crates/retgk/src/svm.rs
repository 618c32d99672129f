//! Soft-margin SVM on precomputed kernels, with one-vs-one multiclass and
//! repeated stratified cross-validation.
//!
//! The binary dual is solved by sequential minimal optimization with
//! maximal-violating-pair working-set selection, as in the standard
//! C-SVC formulation: minimize ½αᵀQα − eᵀα over 0 ≤ α ≤ C, yᵀα = 0,
//! with Q_ij = y_i·y_j·K_ij. Everything is deterministic: the solver uses
//! no randomness and fold assignments are derived from the seed before any
//! parallel dispatch.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gram::GramMatrix;
use crate::matrix::Matrix;
use crate::rng::Rng;

const KKT_TOL: f64 = 1e-3;
const MAX_ITER: usize = 10_000_000;
const QUAD_FLOOR: f64 = 1e-12;
const RIDGE_SCALE: f64 = 1e-8;
const INNER_FOLDS: usize = 3;

/// One trained binary subproblem: sparse dual coefficients over the
/// training set plus a bias.
#[derive(Clone, Debug)]
pub struct BinaryModel {
    /// Index into the model's class list voted for when the decision is ≥ 0.
    pub pos_class: usize,
    pub neg_class: usize,
    /// Positions (into the training set) of the support vectors.
    pub support: Vec<usize>,
    /// α_t·y_t for each support vector.
    pub coeffs: Vec<f64>,
    pub bias: f64,
}

impl BinaryModel {
    /// Decision value from one row of test-vs-train kernel values.
    pub fn decision(&self, kernel_row: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coeffs)
            .map(|(&t, &a)| a * kernel_row[t])
            .sum::<f64>()
            + self.bias
    }
}

#[derive(Clone, Debug)]
enum ModelKind {
    /// Degenerate single-class training set.
    Constant(i64),
    OneVsOne(Vec<BinaryModel>),
}

#[derive(Clone, Debug)]
pub struct SvmModel {
    pub classes: Vec<i64>,
    pub train_size: usize,
    /// Diagonal shift that was added to the kernel before solving.
    pub ridge: f64,
    kind: ModelKind,
}

impl SvmModel {
    pub fn binary_models(&self) -> &[BinaryModel] {
        match &self.kind {
            ModelKind::OneVsOne(ms) => ms,
            ModelKind::Constant(_) => &[],
        }
    }
}

/// Train on a precomputed kernel matrix over the training set.
pub fn train_svm_precomputed(gram: &GramMatrix, labels: &[i64], c: f64) -> Result<SvmModel> {
    if gram.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "gram of size {} with {} labels",
            gram.len(),
            labels.len()
        )));
    }
    let all: Vec<usize> = (0..gram.len()).collect();
    train_on_indices(gram, &all, labels, c)
}

/// Train using `train` as row/column indices into a larger Gram matrix.
fn train_on_indices(
    gram: &GramMatrix,
    train: &[usize],
    labels: &[i64],
    c: f64,
) -> Result<SvmModel> {
    assert!(c > 0.0, "C must be positive");
    let n = train.len();
    assert!(n > 0, "empty training set");
    let mut classes: Vec<i64> = train.iter().map(|&t| labels[t]).collect();
    classes.sort_unstable();
    classes.dedup();
    let ridge =
        RIDGE_SCALE * train.iter().map(|&t| gram.get(t, t)).sum::<f64>() / n as f64;
    if classes.len() == 1 {
        return Ok(SvmModel {
            classes: classes.clone(),
            train_size: n,
            ridge,
            kind: ModelKind::Constant(classes[0]),
        });
    }

    let mut binaries = Vec::with_capacity(classes.len() * (classes.len() - 1) / 2);
    for a in 0..classes.len() {
        for b in a + 1..classes.len() {
            // Local problem over the members of classes a and b.
            let members: Vec<usize> = (0..n)
                .filter(|&t| {
                    let l = labels[train[t]];
                    l == classes[a] || l == classes[b]
                })
                .collect();
            let y: Vec<f64> = members
                .iter()
                .map(|&t| if labels[train[t]] == classes[a] { 1.0 } else { -1.0 })
                .collect();
            let kernel = |s: usize, t: usize| {
                let v = gram.get(train[members[s]], train[members[t]]);
                if s == t {
                    v + ridge
                } else {
                    v
                }
            };
            let solution = solve_binary(&kernel, &y, c)?;
            let mut support = Vec::new();
            let mut coeffs = Vec::new();
            for (local, &alpha) in solution.alpha.iter().enumerate() {
                if alpha > 0.0 {
                    support.push(members[local]);
                    coeffs.push(alpha * y[local]);
                }
            }
            binaries.push(BinaryModel {
                pos_class: a,
                neg_class: b,
                support,
                coeffs,
                bias: -solution.rho,
            });
        }
    }
    Ok(SvmModel {
        classes,
        train_size: n,
        ridge,
        kind: ModelKind::OneVsOne(binaries),
    })
}

struct BinarySolution {
    alpha: Vec<f64>,
    rho: f64,
}

/// SMO with maximal-violating-pair selection. `kernel` is the (ridged)
/// kernel over local indices; `y` holds ±1.
fn solve_binary<K: Fn(usize, usize) -> f64>(
    kernel: &K,
    y: &[f64],
    c: f64,
) -> Result<BinarySolution> {
    let n = y.len();
    let mut alpha = vec![0.0f64; n];
    let mut grad = vec![-1.0f64; n];
    let diag: Vec<f64> = (0..n).map(|t| kernel(t, t)).collect();

    #[cfg(debug_assertions)]
    let mut prev_objective = f64::INFINITY;

    let mut iterations = 0usize;
    loop {
        iterations += 1;
        if iterations > MAX_ITER {
            return Err(Error::NotConverged(MAX_ITER));
        }

        // Working-set selection: the maximal violating pair.
        let mut i = usize::MAX;
        let mut m_up = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut m_low = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let in_up = (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
            let in_low = (y[t] > 0.0 && alpha[t] > 0.0) || (y[t] < 0.0 && alpha[t] < c);
            if in_up && v > m_up {
                m_up = v;
                i = t;
            }
            if in_low && v < m_low {
                m_low = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || m_up - m_low <= KKT_TOL {
            break;
        }

        let kij = kernel(i, j);
        let mut quad = diag[i] + diag[j] - 2.0 * y[i] * y[j] * kij;
        if quad <= 0.0 {
            quad = QUAD_FLOOR;
        }
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if (y[i] - y[j]).abs() > 0.5 {
            // Opposite labels: α_i − α_j is conserved.
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
            // Same labels: α_i + α_j is conserved.
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

        let di = alpha[i] - old_i;
        let dj = alpha[j] - old_j;
        if di == 0.0 && dj == 0.0 {
            break;
        }
        for t in 0..n {
            grad[t] += y[t] * (y[i] * kernel(i, t) * di + y[j] * kernel(j, t) * dj);
        }

        #[cfg(debug_assertions)]
        {
            // ½αᵀQα − eᵀα, rebuilt from the maintained gradient.
            let objective = 0.5
                * alpha
                    .iter()
                    .zip(&grad)
                    .map(|(&a, &g)| a * g)
                    .sum::<f64>()
                - 0.5 * alpha.iter().sum::<f64>();
            debug_assert!(
                objective <= prev_objective + 1e-9 * (1.0 + prev_objective.abs()),
                "dual objective increased: {prev_objective} -> {objective}"
            );
            prev_objective = objective;
        }
    }

    // Bias from the free support vectors, or the KKT interval midpoint.
    let mut sum_free = 0.0;
    let mut n_free = 0usize;
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    for t in 0..y.len() {
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
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        0.5 * (ub + lb)
    };
    Ok(BinarySolution { alpha, rho })
}

/// Predict labels from test-vs-train kernel rows by one-vs-one voting;
/// ties go to the lowest class index.
pub fn predict(model: &SvmModel, kernel_rows: &Matrix) -> Result<Vec<i64>> {
    if kernel_rows.cols() != model.train_size {
        return Err(Error::DimensionMismatch(format!(
            "kernel rows have {} columns for a model trained on {} points",
            kernel_rows.cols(),
            model.train_size
        )));
    }
    let mut out = Vec::with_capacity(kernel_rows.rows());
    for r in 0..kernel_rows.rows() {
        let row = kernel_rows.row(r);
        let label = match &model.kind {
            ModelKind::Constant(l) => *l,
            ModelKind::OneVsOne(binaries) => {
                let mut votes = vec![0usize; model.classes.len()];
                for m in binaries {
                    if m.decision(row) >= 0.0 {
                        votes[m.pos_class] += 1;
                    } else {
                        votes[m.neg_class] += 1;
                    }
                }
                let mut best = 0;
                for (k, &v) in votes.iter().enumerate() {
                    if v > votes[best] {
                        best = k;
                    }
                }
                model.classes[best]
            }
        };
        out.push(label);
    }
    Ok(out)
}

/// Cross-validation protocol settings.
#[derive(Clone, Debug)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub c_grid: Vec<f64>,
    pub seed: u64,
}

pub fn default_c_grid() -> Vec<f64> {
    vec![1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0]
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            repeats: 10,
            c_grid: default_c_grid(),
            seed: 0,
        }
    }
}

/// Result of repeated cross-validation.
#[derive(Clone, Debug)]
pub struct CvOutcome {
    pub mean_accuracy: f64,
    /// Sample standard deviation over the repeats' accuracies.
    pub std_accuracy: f64,
    pub per_repeat: Vec<f64>,
    /// How often each (gram, C) candidate won the inner selection,
    /// indexed `[gram][c]`, summed over all outer folds and repeats.
    pub selection_counts: Vec<Vec<usize>>,
    pub ridge: f64,
}

/// Repeated stratified k-fold cross-validation on one Gram matrix, with C
/// selected per outer training split by an inner 3-fold loop.
pub fn cross_validate(gram: &GramMatrix, labels: &[i64], config: &CvConfig) -> Result<CvOutcome> {
    cross_validate_grid(&[gram], labels, config)
}

/// Stratified fold assignment: within each class, indices are shuffled and
/// dealt round-robin, so per-fold class counts differ by at most one.
fn stratified_folds(labels: &[i64], indices: &[usize], folds: usize, rng: &mut Rng) -> Vec<usize> {
    let mut classes: Vec<i64> = indices.iter().map(|&i| labels[i]).collect();
    classes.sort_unstable();
    classes.dedup();
    let mut fold_of = vec![0usize; indices.len()];
    for class in classes {
        let mut members: Vec<usize> = (0..indices.len())
            .filter(|&k| labels[indices[k]] == class)
            .collect();
        rng.shuffle(&mut members);
        for (k, &m) in members.iter().enumerate() {
            fold_of[m] = k % folds;
        }
    }
    fold_of
}

fn check_class_counts(labels: &[i64], indices: &[usize], folds: usize) -> Result<()> {
    let mut counts = std::collections::BTreeMap::new();
    for &i in indices {
        *counts.entry(labels[i]).or_insert(0usize) += 1;
    }
    for (class, count) in counts {
        if count < folds {
            return Err(Error::FoldTooSmall {
                class,
                count,
                folds,
            });
        }
    }
    Ok(())
}

fn accuracy_of(
    gram: &GramMatrix,
    labels: &[i64],
    train: &[usize],
    test: &[usize],
    c: f64,
) -> Result<usize> {
    let model = train_on_indices(gram, train, labels, c)?;
    let mut rows = Matrix::zeros(test.len(), train.len());
    for (r, &ti) in test.iter().enumerate() {
        let row = rows.row_mut(r);
        for (col, &tr) in train.iter().enumerate() {
            row[col] = gram.get(ti, tr);
        }
    }
    let predicted = predict(&model, &rows)?;
    Ok(predicted
        .iter()
        .zip(test)
        .filter(|(p, &t)| **p == labels[t])
        .count())
}

/// Cross-validation selecting jointly over several Gram matrices (for
/// example one per exponent p) and the C grid. Candidates are ranked by
/// inner accuracy; ties keep the earlier candidate in (gram, C-ascending)
/// order, which realizes the smaller-C preference.
pub fn cross_validate_grid(
    grams: &[&GramMatrix],
    labels: &[i64],
    config: &CvConfig,
) -> Result<CvOutcome> {
    assert!(!grams.is_empty(), "need at least one gram matrix");
    let n = labels.len();
    for g in grams {
        if g.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "gram of size {} with {n} labels",
                g.len()
            )));
        }
    }
    assert!(config.folds >= 2, "need at least two folds");
    assert!(!config.c_grid.is_empty(), "empty C grid");
    let all: Vec<usize> = (0..n).collect();
    check_class_counts(labels, &all, config.folds)?;

    let mut candidates = Vec::new();
    for (gi, _) in grams.iter().enumerate() {
        for (ci, &c) in config.c_grid.iter().enumerate() {
            candidates.push((gi, ci, c));
        }
    }

    // Fold assignments for every repeat, fixed before parallel dispatch.
    let fold_tables: Vec<Vec<usize>> = (0..config.repeats)
        .map(|r| {
            let mut rng = Rng::stream(config.seed, "cv-folds", &[r as u64]);
            stratified_folds(labels, &all, config.folds, &mut rng)
        })
        .collect();

    let tasks: Vec<(usize, usize)> = (0..config.repeats)
        .flat_map(|r| (0..config.folds).map(move |f| (r, f)))
        .collect();

    struct FoldOutcome {
        repeat: usize,
        correct: usize,
        chosen: (usize, usize),
    }

    let results: Vec<FoldOutcome> = tasks
        .par_iter()
        .map(|&(repeat, fold)| {
            let fold_of = &fold_tables[repeat];
            let train: Vec<usize> = (0..n).filter(|&i| fold_of[i] != fold).collect();
            let test: Vec<usize> = (0..n).filter(|&i| fold_of[i] == fold).collect();

            let chosen = if candidates.len() == 1 {
                candidates[0]
            } else {
                check_class_counts(labels, &train, INNER_FOLDS)?;
                let mut inner_rng =
                    Rng::stream(config.seed, "cv-inner", &[repeat as u64, fold as u64]);
                let inner_of = stratified_folds(labels, &train, INNER_FOLDS, &mut inner_rng);
                let mut best = candidates[0];
                let mut best_correct = 0usize;
                let mut first = true;
                for &(gi, ci, c) in &candidates {
                    let mut correct = 0usize;
                    for inner in 0..INNER_FOLDS {
                        let itrain: Vec<usize> = train
                            .iter()
                            .enumerate()
                            .filter(|(k, _)| inner_of[*k] != inner)
                            .map(|(_, &i)| i)
                            .collect();
                        let itest: Vec<usize> = train
                            .iter()
                            .enumerate()
                            .filter(|(k, _)| inner_of[*k] == inner)
                            .map(|(_, &i)| i)
                            .collect();
                        correct += accuracy_of(grams[gi], labels, &itrain, &itest, c)?;
                    }
                    if first || correct > best_correct {
                        best = (gi, ci, c);
                        best_correct = correct;
                        first = false;
                    }
                }
                best
            };

            let correct = accuracy_of(grams[chosen.0], labels, &train, &test, chosen.2)?;
            Ok(FoldOutcome {
                repeat,
                correct,
                chosen: (chosen.0, chosen.1),
            })
        })
        .collect::<Result<_>>()?;

    let mut per_repeat = vec![0.0f64; config.repeats];
    let mut selection_counts = vec![vec![0usize; config.c_grid.len()]; grams.len()];
    for r in &results {
        per_repeat[r.repeat] += r.correct as f64;
        selection_counts[r.chosen.0][r.chosen.1] += 1;
    }
    for acc in &mut per_repeat {
        *acc /= n as f64;
    }
    let mean = per_repeat.iter().sum::<f64>() / config.repeats as f64;
    let std = if config.repeats > 1 {
        (per_repeat
            .iter()
            .map(|a| (a - mean) * (a - mean))
            .sum::<f64>()
            / (config.repeats - 1) as f64)
            .sqrt()
    } else {
        0.0
    };
    let ridge = RIDGE_SCALE * grams[0].trace() / n as f64;
    Ok(CvOutcome {
        mean_accuracy: mean,
        std_accuracy: std,
        per_repeat,
        selection_counts,
        ridge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn gram_from(rows: Vec<Vec<f64>>) -> GramMatrix {
        GramMatrix::from_upper(Matrix::from_rows(rows))
    }

    #[test]
    fn separable_two_points() {
        let gram = gram_from(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let labels = vec![1, -1];
        let model = train_svm_precomputed(&gram, &labels, 1.0).unwrap();
        let binary = &model.binary_models()[0];
        assert_eq!(binary.support.len(), 2);
        let rows = gram_from(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let predicted = predict(&model, rows.as_matrix()).unwrap();
        assert_eq!(predicted, labels);
    }

    #[test]
    fn single_test_row_matching_a_support_vector() {
        // A test row identical to a training support vector's kernel row
        // lands on that vector's side of the margin.
        let gram = gram_from(vec![
            vec![1.0, 0.2, 0.1, 0.0],
            vec![0.2, 1.0, 0.0, 0.1],
            vec![0.1, 0.0, 1.0, 0.2],
            vec![0.0, 0.1, 0.2, 1.0],
        ]);
        let labels = vec![1, 1, -1, -1];
        let model = train_svm_precomputed(&gram, &labels, 10.0).unwrap();
        for (t, &label) in labels.iter().enumerate() {
            let row = Matrix::from_rows(vec![gram.row(t).to_vec()]);
            assert_eq!(predict(&model, &row).unwrap(), vec![label]);
        }
    }

    #[test]
    fn single_class_gives_constant_predictor() {
        let gram = gram_from(vec![vec![1.0, 0.5], vec![0.5, 1.0]]);
        let labels = vec![3, 3];
        let model = train_svm_precomputed(&gram, &labels, 1.0).unwrap();
        let predicted = predict(&model, gram.as_matrix()).unwrap();
        assert_eq!(predicted, labels);
    }

    #[test]
    fn dual_constraints_hold() {
        let mut rng = Rng::from_seed(2);
        let pts: Vec<(f64, f64, i64)> = (0..30)
            .map(|k| {
                let cls = if k % 2 == 0 { 1 } else { -1 };
                let cx = if cls == 1 { 0.0 } else { 1.5 };
                (
                    cx + 0.8 * rng.next_f64(),
                    0.8 * rng.next_f64(),
                    cls,
                )
            })
            .collect();
        let mut m = Matrix::zeros(30, 30);
        for i in 0..30 {
            for j in 0..30 {
                let d2 = (pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2);
                m[(i, j)] = (-d2).exp();
            }
        }
        let gram = GramMatrix::from_upper(m);
        let labels: Vec<i64> = pts.iter().map(|p| p.2).collect();
        for c in [0.1, 1.0, 10.0] {
            let model = train_svm_precomputed(&gram, &labels, c).unwrap();
            let binary = &model.binary_models()[0];
            let mut sum = 0.0;
            for &coef in &binary.coeffs {
                assert!(coef.abs() <= c + 1e-12, "coefficient {coef} exceeds C={c}");
                sum += coef;
            }
            assert!(sum.abs() <= 1e-6, "Σ α·y = {sum}");
        }
    }

    /// Projected-gradient solver for the same dual, used as an independent
    /// check of the SMO path. Projection onto the box intersected with the
    /// equality constraint is computed by bisection on the multiplier.
    fn projected_gradient_dual(k: &Matrix, y: &[f64], c: f64, iters: usize) -> Vec<f64> {
        let n = y.len();
        let project = |z: &[f64]| -> Vec<f64> {
            let clip = |nu: f64| -> Vec<f64> {
                z.iter()
                    .zip(y)
                    .map(|(&zi, &yi)| (zi - nu * yi).clamp(0.0, c))
                    .collect()
            };
            let residual = |nu: f64| -> f64 {
                clip(nu).iter().zip(y).map(|(&a, &yi)| a * yi).sum()
            };
            let (mut lo, mut hi) = (-1e6, 1e6);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if residual(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            clip(0.5 * (lo + hi))
        };
        // Step size from a row-sum bound on the largest eigenvalue of Q.
        let mut lmax: f64 = 0.0;
        for i in 0..n {
            let row: f64 = (0..n).map(|j| k[(i, j)].abs()).sum();
            lmax = lmax.max(row);
        }
        let step = 1.0 / lmax.max(1e-9);
        let mut alpha = project(&vec![0.0; n]);
        for _ in 0..iters {
            let mut grad = vec![0.0; n];
            for i in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    s += y[i] * y[j] * k[(i, j)] * alpha[j];
                }
                grad[i] = 1.0 - s;
            }
            let z: Vec<f64> = alpha
                .iter()
                .zip(&grad)
                .map(|(&a, &g)| a + step * g)
                .collect();
            alpha = project(&z);
        }
        alpha
    }

    #[test]
    fn smo_agrees_in_sign_with_projected_gradient_oracle() {
        // Two interleaved crescents with an RBF kernel.
        let mut rng = Rng::from_seed(7);
        let n_per = 20;
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for k in 0..n_per {
            let t = std::f64::consts::PI * (k as f64 + 0.5) / n_per as f64;
            let jx = 0.08 * (rng.next_f64() - 0.5);
            let jy = 0.08 * (rng.next_f64() - 0.5);
            pts.push((t.cos() + jx, t.sin() + jy));
            labels.push(1i64);
            pts.push((1.0 - t.cos() + jx, 0.35 - t.sin() + jy));
            labels.push(-1i64);
        }
        let n = pts.len();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let d2 = (pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2);
                m[(i, j)] = (-1.5 * d2).exp();
            }
        }
        let gram = GramMatrix::from_upper(m);
        let c = 10.0;
        let model = train_svm_precomputed(&gram, &labels, c).unwrap();
        let binary = &model.binary_models()[0];

        // Match the model's orientation: its positive side is the class at
        // `pos_class` (classes sort ascending, so that is label −1 here).
        let pos_label = model.classes[binary.pos_class];
        let y: Vec<f64> = labels
            .iter()
            .map(|&l| if l == pos_label { 1.0 } else { -1.0 })
            .collect();
        // The oracle solves the identical (ridged) dual.
        let mut ridged = gram.as_matrix().clone();
        for i in 0..n {
            ridged[(i, i)] += model.ridge;
        }
        let alpha = projected_gradient_dual(&ridged, &y, c, 100_000);
        // Oracle bias from its free support vectors.
        let mut bias_terms = Vec::new();
        for t in 0..n {
            if alpha[t] > 1e-6 * c && alpha[t] < c * (1.0 - 1e-6) {
                let f: f64 = (0..n).map(|s| alpha[s] * y[s] * ridged[(t, s)]).sum();
                bias_terms.push(y[t] - f);
            }
        }
        let bias: f64 = bias_terms.iter().sum::<f64>() / bias_terms.len() as f64;

        for t in 0..n {
            let oracle: f64 =
                (0..n).map(|s| alpha[s] * y[s] * ridged[(t, s)]).sum::<f64>() + bias;
            let mut row = vec![0.0; n];
            for (s, slot) in row.iter_mut().enumerate() {
                *slot = gram.get(t, s) + if s == t { model.ridge } else { 0.0 };
            }
            let ours = binary.decision(&row);
            assert!(
                oracle.signum() == ours.signum() || oracle.abs() < 1e-3,
                "point {t}: oracle {oracle}, smo {ours}"
            );
            assert!((oracle - ours).abs() < 0.05, "point {t}: {oracle} vs {ours}");
        }
    }

    #[test]
    fn three_class_votes_match_recount_oracle() {
        // Three well-separated clusters through an RBF-like gram.
        let mut rng = Rng::from_seed(11);
        let centers = [(0.0, 0.0), (4.0, 0.0), (0.0, 4.0)];
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for (ci, &(cx, cy)) in centers.iter().enumerate() {
            for _ in 0..8 {
                pts.push((cx + rng.next_f64(), cy + rng.next_f64()));
                labels.push(ci as i64 + 10);
            }
        }
        let n = pts.len();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let d2 = (pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2);
                m[(i, j)] = (-0.5 * d2).exp();
            }
        }
        let gram = GramMatrix::from_upper(m);
        let model = train_svm_precomputed(&gram, &labels, 10.0).unwrap();
        let predicted = predict(&model, gram.as_matrix()).unwrap();
        assert_eq!(predicted, labels);

        // Recount the votes by hand from the binary decisions.
        for (t, &pred) in predicted.iter().enumerate() {
            let mut votes = vec![0usize; model.classes.len()];
            for b in model.binary_models() {
                if b.decision(gram.row(t)) >= 0.0 {
                    votes[b.pos_class] += 1;
                } else {
                    votes[b.neg_class] += 1;
                }
            }
            let mut best = 0;
            for (k, &v) in votes.iter().enumerate() {
                if v > votes[best] {
                    best = k;
                }
            }
            assert_eq!(pred, model.classes[best]);
        }
    }

    #[test]
    fn identity_gram_gives_chance_level_cv() {
        let n = 40;
        let gram = GramMatrix::from_upper(Matrix::identity(n));
        let labels: Vec<i64> = (0..n).map(|i| (i % 2) as i64).collect();
        let config = CvConfig {
            folds: 2,
            repeats: 10,
            c_grid: vec![1.0],
            seed: 5,
        };
        let outcome = cross_validate(&gram, &labels, &config).unwrap();
        assert!(
            (0.3..=0.7).contains(&outcome.mean_accuracy),
            "mean accuracy {}",
            outcome.mean_accuracy
        );
    }

    #[test]
    fn separated_clusters_reach_perfect_cv_accuracy() {
        let n = 24;
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let same = (i < n / 2) == (j < n / 2);
                m[(i, j)] = if i == j {
                    1.0
                } else if same {
                    0.9
                } else {
                    0.05
                };
            }
        }
        let gram = GramMatrix::from_upper(m);
        let labels: Vec<i64> = (0..n).map(|i| i64::from(i >= n / 2)).collect();
        let config = CvConfig {
            folds: 4,
            repeats: 3,
            c_grid: default_c_grid(),
            seed: 1,
        };
        let outcome = cross_validate(&gram, &labels, &config).unwrap();
        for acc in &outcome.per_repeat {
            assert_eq!(*acc, 1.0);
        }
        assert_eq!(outcome.std_accuracy, 0.0);
    }

    #[test]
    fn cross_validation_is_deterministic() {
        let n = 30;
        let mut rng = Rng::from_seed(13);
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = if i == j { 1.0 } else { 0.4 * rng.next_f64() };
                m[(i, j)] = v;
            }
        }
        let gram = GramMatrix::from_upper(m);
        let labels: Vec<i64> = (0..n).map(|i| (i % 2) as i64).collect();
        let config = CvConfig {
            folds: 3,
            repeats: 4,
            c_grid: vec![0.1, 1.0],
            seed: 21,
        };
        let a = cross_validate(&gram, &labels, &config).unwrap();
        let b = cross_validate(&gram, &labels, &config).unwrap();
        assert_eq!(a.per_repeat, b.per_repeat);
        assert_eq!(a.selection_counts, b.selection_counts);
    }

    #[test]
    fn folds_are_disjoint_covering_and_stratified() {
        let labels: Vec<i64> = (0..50).map(|i| i64::from(i % 5 == 0)).collect();
        let all: Vec<usize> = (0..50).collect();
        let mut rng = Rng::stream(3, "cv-folds", &[0]);
        let fold_of = stratified_folds(&labels, &all, 5, &mut rng);
        assert_eq!(fold_of.len(), 50);
        // 10 positives and 40 negatives over 5 folds: exactly 2 and 8 each.
        for fold in 0..5 {
            let members: Vec<usize> = (0..50).filter(|&i| fold_of[i] == fold).collect();
            let pos = members.iter().filter(|&&i| labels[i] == 1).count();
            assert_eq!(pos, 2, "fold {fold}");
            assert_eq!(members.len(), 10, "fold {fold}");
        }
    }

    #[test]
    fn small_classes_are_rejected() {
        let gram = GramMatrix::from_upper(Matrix::identity(8));
        let labels = vec![0, 0, 0, 0, 0, 0, 1, 1];
        let config = CvConfig {
            folds: 4,
            repeats: 1,
            c_grid: vec![1.0],
            seed: 0,
        };
        match cross_validate(&gram, &labels, &config) {
            Err(Error::FoldTooSmall {
                class: 1,
                count: 2,
                folds: 4,
            }) => {}
            other => panic!("expected FoldTooSmall, got {other:?}"),
        }
    }
}
