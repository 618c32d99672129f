//! Exact graph kernels via kernel mean embeddings.
//!
//! A graph is treated as the empirical distribution of its node triples
//! (return probability vector, label, attribute vector). The inner product
//! of two graphs' mean embeddings is the mean of the pairwise node-kernel
//! matrix, and the embedding distance is the maximum mean discrepancy;
//! both reduce to sums over node pairs, which is what this module
//! evaluates. Cost per graph pair is quadratic in node counts, the price
//! of exactness.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gram::GramMatrix;
use crate::graph::Graph;
use crate::kernels::{median_of, node_kernel, NodeKernelSpec, NodeRef};
use crate::matrix::Matrix;
use crate::rpf::RpfMatrix;

/// A graph as a set of node triples: RPF rows plus optional labels and
/// attributes, all with one row per node.
#[derive(Clone, Debug)]
pub struct GraphSetRep {
    rpf: RpfMatrix,
    labels: Option<Vec<usize>>,
    attrs: Option<Vec<Vec<f64>>>,
}

impl GraphSetRep {
    pub fn new(
        rpf: RpfMatrix,
        labels: Option<Vec<usize>>,
        attrs: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let n = rpf.node_count();
        if labels.as_ref().is_some_and(|l| l.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "label count does not match {n} nodes"
            )));
        }
        if attrs.as_ref().is_some_and(|a| a.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "attribute count does not match {n} nodes"
            )));
        }
        Ok(GraphSetRep { rpf, labels, attrs })
    }

    /// Pair a graph's labels/attributes with its computed RPF.
    pub fn from_graph(g: &Graph, rpf: RpfMatrix) -> Result<Self> {
        if rpf.node_count() != g.node_count() {
            return Err(Error::DimensionMismatch(format!(
                "rpf has {} rows for a graph of {} nodes",
                rpf.node_count(),
                g.node_count()
            )));
        }
        Self::new(
            rpf,
            g.discrete_labels().map(<[usize]>::to_vec),
            g.cont_attrs().map(<[Vec<f64>]>::to_vec),
        )
    }

    pub fn node_count(&self) -> usize {
        self.rpf.node_count()
    }

    pub fn rpf(&self) -> &RpfMatrix {
        &self.rpf
    }

    pub fn node(&self, i: usize) -> NodeRef<'_> {
        NodeRef {
            rpf: self.rpf.row(i),
            label: self.labels.as_ref().map(|l| l[i]),
            attr: self.attrs.as_ref().map(|a| a[i].as_slice()),
        }
    }
}

/// Graph-kernel functional form on top of the mean embeddings.
#[derive(Clone, Copy, Debug)]
pub enum GraphKernelParams {
    /// (c + ⟨m_G, m_H⟩)^d
    Polynomial { c: f64, degree: u32 },
    /// exp(−γ·dist^p); `gamma = None` means 1/median(dist)^p over the dataset.
    Exponential { gamma: Option<f64>, p: f64 },
}

impl GraphKernelParams {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GraphKernelParams::Polynomial { c, degree } => {
                if c >= 0.0 && degree >= 1 {
                    Ok(())
                } else {
                    Err(Error::DimensionMismatch(format!(
                        "polynomial graph kernel needs c ≥ 0, d ≥ 1; got c={c}, d={degree}"
                    )))
                }
            }
            GraphKernelParams::Exponential { gamma, p } => {
                if !(0.0 < p && p <= 2.0) {
                    return Err(Error::DimensionMismatch(format!(
                        "exponential graph kernel needs 0 < p ≤ 2, got {p}"
                    )));
                }
                if gamma.is_some_and(|g| !(g > 0.0 && g.is_finite())) {
                    return Err(Error::DimensionMismatch(
                        "exponential graph kernel needs γ > 0".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// A Gram matrix plus the bandwidth the exponential form ended up using.
#[derive(Clone, Debug)]
pub struct GramOutcome {
    pub gram: GramMatrix,
    pub gamma: Option<f64>,
}

/// Full pairwise node-kernel matrix between two graphs.
pub fn cross_kernel_matrix(
    spec: &NodeKernelSpec,
    g: &GraphSetRep,
    h: &GraphSetRep,
) -> Result<Matrix> {
    let (ng, nh) = (g.node_count(), h.node_count());
    let mut out = Matrix::zeros(ng, nh);
    for i in 0..ng {
        let u = g.node(i);
        let row = out.row_mut(i);
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = node_kernel(spec, u, h.node(j))?;
        }
    }
    Ok(out)
}

/// Mean of the cross kernel matrix without materializing it.
fn mean_cross(spec: &NodeKernelSpec, g: &GraphSetRep, h: &GraphSetRep) -> Result<f64> {
    let (ng, nh) = (g.node_count(), h.node_count());
    let mut total = 0.0;
    for i in 0..ng {
        let u = g.node(i);
        for j in 0..nh {
            total += node_kernel(spec, u, h.node(j))?;
        }
    }
    Ok(total / (ng as f64 * nh as f64))
}

const MMD_RADICAND_SLACK: f64 = -1e-10;

/// Maximum mean discrepancy between the two node distributions under the
/// given node kernel (biased V-statistic, as a distance).
pub fn mmd(spec: &NodeKernelSpec, g: &GraphSetRep, h: &GraphSetRep) -> Result<f64> {
    let radicand = mean_cross(spec, g, g)? + mean_cross(spec, h, h)?
        - 2.0 * mean_cross(spec, g, h)?;
    if radicand < MMD_RADICAND_SLACK {
        return Err(Error::NegativeRadicand(radicand));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Gram matrix of the exact graph kernel over a dataset.
///
/// The polynomial form maps mean inner products through (c + ·)^d. The
/// exponential form computes every pairwise MMD first, derives γ from the
/// median when not supplied, and exponentiates; its diagonal is exactly 1.
pub fn retgk1_gram(
    reps: &[GraphSetRep],
    spec: &NodeKernelSpec,
    params: &GraphKernelParams,
) -> Result<GramOutcome> {
    params.validate()?;
    let n = reps.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect();
    match *params {
        GraphKernelParams::Polynomial { c, degree } => {
            let entries: Vec<f64> = pairs
                .par_iter()
                .map(|&(i, j)| {
                    mean_cross(spec, &reps[i], &reps[j]).map(|m| (c + m).powi(degree as i32))
                })
                .collect::<Result<_>>()?;
            let mut m = Matrix::zeros(n, n);
            for (&(i, j), &v) in pairs.iter().zip(&entries) {
                m[(i, j)] = v;
            }
            Ok(GramOutcome {
                gram: GramMatrix::from_upper(m),
                gamma: None,
            })
        }
        GraphKernelParams::Exponential { gamma, p } => {
            let distances: Vec<f64> = pairs
                .par_iter()
                .map(|&(i, j)| {
                    if i == j {
                        Ok(0.0)
                    } else {
                        mmd(spec, &reps[i], &reps[j])
                    }
                })
                .collect::<Result<_>>()?;
            let gamma = match gamma {
                Some(g) => g,
                None => {
                    let mut off: Vec<f64> = pairs
                        .iter()
                        .zip(&distances)
                        .filter(|((i, j), _)| i != j)
                        .map(|(_, &d)| d)
                        .collect();
                    if off.is_empty() {
                        return Err(Error::DegenerateDistances);
                    }
                    let med = median_of(&mut off);
                    if med <= 0.0 {
                        return Err(Error::DegenerateDistances);
                    }
                    1.0 / med.powf(p)
                }
            };
            let mut m = Matrix::zeros(n, n);
            for (&(i, j), &d) in pairs.iter().zip(&distances) {
                m[(i, j)] = if i == j { 1.0 } else { (-gamma * d.powf(p)).exp() };
            }
            Ok(GramOutcome {
                gram: GramMatrix::from_upper(m),
                gamma: Some(gamma),
            })
        }
    }
}
