//! Return probability features.
//!
//! The s-step return probability of node i is the (i,i) entry of the s-th
//! power of the transition matrix P = D⁻¹A. Stacking steps 1..S gives each
//! node an S-dimensional structural descriptor and each graph an n×S
//! feature matrix.
//!
//! P is similar to the symmetric B = D^(-1/2)·A·D^(-1/2), which shares its
//! diagonal powers: Pˢ(i,i) = Bˢ(i,i) = Σ_k λ_k^s·u_k(i)². One
//! eigendecomposition of B therefore yields all S return probabilities in
//! O(n³ + (S+1)n²) instead of the O((S−1)n³) of repeated dense
//! multiplication. For graphs too large to eigendecompose, simulated walks
//! estimate the same quantities.
//!
//! The spectral identity also runs the other way: connected graphs of
//! equal size and volume whose length-n return probability profiles
//! coincide share the eigenvalue multiset of B (and, where eigenvalue
//! magnitudes are simple, the eigenvector magnitudes up to relabeling).
//! No procedure is known for constructing non-isomorphic witnesses of
//! that situation, so the tests exercise the relation on isomorphic
//! pairs, where the correspondence is exact.

use rayon::prelude::*;

use crate::eigen::{symmetric_eigen, EigenSystem};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::Matrix;
use crate::rng::{derive_stream, Rng};

/// Per-node return probabilities; row i holds [P¹(i,i), …, Pˢ(i,i)].
#[derive(Clone, Debug)]
pub struct RpfMatrix {
    values: Matrix,
    steps: usize,
}

impl RpfMatrix {
    pub(crate) fn from_matrix(values: Matrix, steps: usize) -> Self {
        debug_assert_eq!(values.cols(), steps);
        RpfMatrix { values, steps }
    }

    pub fn node_count(&self) -> usize {
        self.values.rows()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// The S return probabilities of node `i`, step 1 first.
    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    /// P^s(i,i) for 1-based step `s`.
    pub fn value(&self, i: usize, s: usize) -> f64 {
        assert!((1..=self.steps).contains(&s));
        self.values[(i, s - 1)]
    }
}

/// Which computation path produces the RPF.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RpfMethod {
    Spectral,
    BruteForce,
    MonteCarlo,
}

/// Settings for computing RPF over a dataset.
#[derive(Clone, Copy, Debug)]
pub struct RpfConfig {
    pub steps: usize,
    pub method: RpfMethod,
    pub mc_trials: usize,
    pub seed: u64,
}

impl Default for RpfConfig {
    fn default() -> Self {
        RpfConfig {
            steps: 50,
            method: RpfMethod::Spectral,
            mc_trials: 200,
            seed: 0,
        }
    }
}

/// Dense B = D^(-1/2)·A·D^(-1/2).
fn build_b(g: &Graph, degrees: &[f64]) -> Matrix {
    let n = g.node_count();
    let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut b = Matrix::zeros(n, n);
    for &(i, j, w) in g.edges() {
        let v = w * inv_sqrt[i] * inv_sqrt[j];
        b[(i, j)] = v;
        b[(j, i)] = v;
    }
    b
}

/// Dense transition matrix P = D⁻¹A; oracle-side only.
fn build_p(g: &Graph, degrees: &[f64]) -> Matrix {
    let n = g.node_count();
    let mut p = Matrix::zeros(n, n);
    for &(i, j, w) in g.edges() {
        p[(i, j)] = w / degrees[i];
        if i != j {
            p[(j, i)] = w / degrees[j];
        }
    }
    p
}

const EIGENVALUE_SLACK: f64 = 1e-8;
const PROBABILITY_SLACK: f64 = 1e-10;

fn clamp_eigenvalues(values: &mut [f64]) -> Result<()> {
    for v in values.iter_mut() {
        if v.abs() > 1.0 + EIGENVALUE_SLACK {
            return Err(Error::EigenFailure(format!(
                "eigenvalue {v} exceeds 1 beyond tolerance; B should be similar to a stochastic matrix"
            )));
        }
        *v = v.clamp(-1.0, 1.0);
    }
    Ok(())
}

/// Exact RPF via the eigendecomposition of B.
pub fn rpf_exact(g: &Graph, steps: usize) -> Result<RpfMatrix> {
    assert!(steps >= 1);
    let degrees = g.degree_vector()?;
    let n = g.node_count();
    let b = build_b(g, &degrees);
    let mut es = symmetric_eigen(&b)?;
    clamp_eigenvalues(&mut es.values)?;

    // v[(i,k)] = u_k(i)²; probabilities come out as V·Λ_s.
    let mut squared = Matrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let u = es.vectors[(i, k)];
            squared[(i, k)] = u * u;
        }
    }
    let mut powers = es.values.clone();
    let mut out = Matrix::zeros(n, steps);
    for s in 0..steps {
        if s > 0 {
            for (pw, lam) in powers.iter_mut().zip(&es.values) {
                *pw *= lam;
            }
        }
        for i in 0..n {
            let p: f64 = squared
                .row(i)
                .iter()
                .zip(&powers)
                .map(|(v, pw)| v * pw)
                .sum();
            if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
                return Err(Error::EigenFailure(format!(
                    "computed return probability {p} for node {i}, step {} is outside [0,1] beyond roundoff",
                    s + 1
                )));
            }
            out[(i, s)] = p.clamp(0.0, 1.0);
        }
    }
    Ok(RpfMatrix::from_matrix(out, steps))
}

/// RPF from repeated dense multiplication by P. Quadratic in memory and
/// cubic per step; retained as the independent oracle for the spectral path.
pub fn rpf_bruteforce(g: &Graph, steps: usize) -> Result<RpfMatrix> {
    assert!(steps >= 1);
    let degrees = g.degree_vector()?;
    let n = g.node_count();
    let p = build_p(g, &degrees);
    let mut out = Matrix::zeros(n, steps);
    let mut power = p.clone();
    for s in 0..steps {
        if s > 0 {
            power = power.matmul(&p);
        }
        for i in 0..n {
            out[(i, s)] = power[(i, i)];
        }
    }
    Ok(RpfMatrix::from_matrix(out, steps))
}

/// Cumulative-weight tables for inverse-transform sampling of one walk step.
struct WalkSampler {
    cumulative: Vec<Vec<f64>>,
    targets: Vec<Vec<usize>>,
    totals: Vec<f64>,
}

impl WalkSampler {
    fn new(g: &Graph) -> Result<Self> {
        let n = g.node_count();
        let mut cumulative = Vec::with_capacity(n);
        let mut targets = Vec::with_capacity(n);
        let mut totals = Vec::with_capacity(n);
        for i in 0..n {
            let nbrs = g.neighbors(i);
            if nbrs.is_empty() {
                return Err(Error::ZeroDegreeNode(i));
            }
            let mut cum = Vec::with_capacity(nbrs.len());
            let mut tgt = Vec::with_capacity(nbrs.len());
            let mut acc = 0.0;
            for &(j, w) in nbrs {
                acc += w;
                cum.push(acc);
                tgt.push(j);
            }
            cumulative.push(cum);
            targets.push(tgt);
            totals.push(acc);
        }
        Ok(WalkSampler {
            cumulative,
            targets,
            totals,
        })
    }

    #[inline]
    fn step(&self, at: usize, rng: &mut Rng) -> usize {
        let cum = &self.cumulative[at];
        let u = rng.uniform(self.totals[at]);
        let idx = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
        self.targets[at][idx]
    }
}

/// RPF estimated from `trials` simulated walks per node.
///
/// The walk for trial m from node i draws from a stream keyed by
/// (seed, i, m), so the result is identical no matter how the work is
/// scheduled across threads. Callers processing many graphs derive a
/// distinct seed per graph; see [`dataset_rpf`].
pub fn rpf_monte_carlo(g: &Graph, steps: usize, trials: usize, seed: u64) -> Result<RpfMatrix> {
    assert!(steps >= 1 && trials >= 1);
    let sampler = WalkSampler::new(g)?;
    let n = g.node_count();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut counts = vec![0u32; steps];
            for m in 0..trials {
                let mut rng = Rng::stream(seed, "walk", &[i as u64, m as u64]);
                let mut at = i;
                for count in counts.iter_mut() {
                    at = sampler.step(at, &mut rng);
                    if at == i {
                        *count += 1;
                    }
                }
            }
            counts
                .iter()
                .map(|&c| f64::from(c) / trials as f64)
                .collect()
        })
        .collect();
    Ok(RpfMatrix::from_matrix(Matrix::from_rows(rows), steps))
}

const RESIDUAL_TOL: f64 = 1e-8;
const ORTHONORMALITY_TOL: f64 = 1e-8;

/// Validated eigensystem of B = D^(-1/2)·A·D^(-1/2): residuals within
/// 1e-8·‖B‖, orthonormal vectors, eigenvalue magnitudes at most 1.
pub fn spectrum(g: &Graph) -> Result<EigenSystem> {
    let degrees = g.degree_vector()?;
    let b = build_b(g, &degrees);
    let mut es = symmetric_eigen(&b)?;
    clamp_eigenvalues(&mut es.values)?;
    let norm: f64 = b.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
    let residual = es.max_residual(&b);
    if residual > RESIDUAL_TOL * norm.max(f64::MIN_POSITIVE) {
        return Err(Error::EigenFailure(format!(
            "residual {residual:e} exceeds {RESIDUAL_TOL:e}·‖B‖"
        )));
    }
    let defect = es.orthonormality_defect();
    if defect > ORTHONORMALITY_TOL {
        return Err(Error::EigenFailure(format!(
            "eigenvector orthonormality defect {defect:e}"
        )));
    }
    Ok(es)
}

/// RPF for every graph of a dataset, in parallel. Monte Carlo runs derive
/// one seed per graph from the configured seed, so the output is
/// independent of the parallel schedule.
pub fn dataset_rpf(graphs: &[Graph], config: &RpfConfig) -> Result<Vec<RpfMatrix>> {
    graphs
        .par_iter()
        .enumerate()
        .map(|(gi, g)| match config.method {
            RpfMethod::Spectral => rpf_exact(g, config.steps),
            RpfMethod::BruteForce => rpf_bruteforce(g, config.steps),
            RpfMethod::MonteCarlo => {
                let graph_seed = derive_stream(config.seed, "rpf-mc", &[gi as u64]);
                rpf_monte_carlo(g, config.steps, config.mc_trials, graph_seed)
            }
        })
        .collect()
}
