//! Base kernels on node attribute domains, the tensor-product node kernel,
//! and bandwidth selection rules.

use crate::error::{Error, Result};
use crate::rng::Rng;

/// A base kernel on one attribute domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelSpec {
    /// exp(−γ‖x−y‖₂²)
    GaussianRbf { gamma: f64 },
    /// exp(−γ‖x−y‖₂)
    LaplacianRbf { gamma: f64 },
    /// (c + ⟨x,y⟩)^d
    Polynomial { c: f64, degree: u32 },
    /// 1 iff the symbols match.
    Delta,
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::GaussianRbf { gamma } | KernelSpec::LaplacianRbf { gamma } => {
                if gamma > 0.0 && gamma.is_finite() {
                    Ok(())
                } else {
                    Err(Error::DimensionMismatch(format!(
                        "rbf bandwidth must be positive, got {gamma}"
                    )))
                }
            }
            KernelSpec::Polynomial { c, degree } => {
                if c >= 0.0 && degree >= 1 {
                    Ok(())
                } else {
                    Err(Error::DimensionMismatch(format!(
                        "polynomial kernel needs c ≥ 0 and degree ≥ 1, got c={c}, d={degree}"
                    )))
                }
            }
            KernelSpec::Delta => Ok(()),
        }
    }
}

/// One value from an attribute domain: a Euclidean vector or a symbol.
#[derive(Clone, Copy, Debug)]
pub enum Feature<'a> {
    Vector(&'a [f64]),
    Symbol(usize),
}

fn squared_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum())
}

pub fn eval_kernel(spec: &KernelSpec, x: Feature, y: Feature) -> Result<f64> {
    match (spec, x, y) {
        (KernelSpec::GaussianRbf { gamma }, Feature::Vector(x), Feature::Vector(y)) => {
            Ok((-gamma * squared_distance(x, y)?).exp())
        }
        (KernelSpec::LaplacianRbf { gamma }, Feature::Vector(x), Feature::Vector(y)) => {
            Ok((-gamma * squared_distance(x, y)?.sqrt()).exp())
        }
        (KernelSpec::Polynomial { c, degree }, Feature::Vector(x), Feature::Vector(y)) => {
            if x.len() != y.len() {
                return Err(Error::DimensionMismatch(format!(
                    "vectors of length {} and {}",
                    x.len(),
                    y.len()
                )));
            }
            let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            Ok((c + dot).powi(*degree as i32))
        }
        (KernelSpec::Delta, Feature::Symbol(a), Feature::Symbol(b)) => {
            Ok(if a == b { 1.0 } else { 0.0 })
        }
        _ => Err(Error::DimensionMismatch(
            "kernel domain does not match the feature kind".into(),
        )),
    }
}

/// The tensor-product kernel over (structural role, discrete label,
/// continuous attribute) node triples. Components are multiplied; absent
/// optional components simply contribute no factor.
#[derive(Clone, Debug)]
pub struct NodeKernelSpec {
    pub k0: KernelSpec,
    pub kd: Option<KernelSpec>,
    pub kc: Option<KernelSpec>,
}

impl NodeKernelSpec {
    pub fn new(k0: KernelSpec, kd: Option<KernelSpec>, kc: Option<KernelSpec>) -> Result<Self> {
        k0.validate()?;
        if matches!(k0, KernelSpec::Delta) {
            return Err(Error::DimensionMismatch(
                "the structural-role kernel acts on vectors, not symbols".into(),
            ));
        }
        if let Some(kd) = &kd {
            if !matches!(kd, KernelSpec::Delta) {
                return Err(Error::DimensionMismatch(
                    "the discrete-label kernel must be the delta kernel".into(),
                ));
            }
        }
        if let Some(kc) = &kc {
            kc.validate()?;
            if matches!(kc, KernelSpec::Delta) {
                return Err(Error::DimensionMismatch(
                    "the continuous-attribute kernel acts on vectors".into(),
                ));
            }
        }
        Ok(NodeKernelSpec { k0, kd, kc })
    }

    /// Structural-role kernel only.
    pub fn structural(k0: KernelSpec) -> Result<Self> {
        Self::new(k0, None, None)
    }
}

/// One node's view for kernel evaluation.
#[derive(Clone, Copy, Debug)]
pub struct NodeRef<'a> {
    pub rpf: &'a [f64],
    pub label: Option<usize>,
    pub attr: Option<&'a [f64]>,
}

pub fn node_kernel(spec: &NodeKernelSpec, u: NodeRef, v: NodeRef) -> Result<f64> {
    let mut value = eval_kernel(&spec.k0, Feature::Vector(u.rpf), Feature::Vector(v.rpf))?;
    if let Some(kd) = &spec.kd {
        let (a, b) = match (u.label, v.label) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::MissingAttribute("discrete label")),
        };
        value *= eval_kernel(kd, Feature::Symbol(a), Feature::Symbol(b))?;
        if value == 0.0 {
            return Ok(0.0);
        }
    }
    if let Some(kc) = &spec.kc {
        let (a, b) = match (u.attr, v.attr) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::MissingAttribute("continuous attribute")),
        };
        value *= eval_kernel(kc, Feature::Vector(a), Feature::Vector(b))?;
    }
    Ok(value)
}

/// Which distance feeds the median heuristic. The Laplacian RBF pairs
/// with plain Euclidean distances, the Gaussian RBF with squared ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceMetric {
    Euclidean,
    SquaredEuclidean,
}

pub const DEFAULT_PAIR_SAMPLE_CAP: usize = 100_000;

/// Bandwidth as the inverse of the median pairwise distance. When the
/// number of pairs exceeds `sample_cap` the median is taken over
/// `sample_cap` uniformly drawn pairs, deterministically in `seed`.
pub fn median_heuristic(
    points: &[&[f64]],
    metric: DistanceMetric,
    sample_cap: usize,
    seed: u64,
) -> Result<f64> {
    let n = points.len();
    if n < 2 {
        return Err(Error::DegenerateDistances);
    }
    assert!(sample_cap >= 1);
    let distance = |a: &[f64], b: &[f64]| -> Result<f64> {
        let sq = squared_distance(a, b)?;
        Ok(match metric {
            DistanceMetric::Euclidean => sq.sqrt(),
            DistanceMetric::SquaredEuclidean => sq,
        })
    };
    let total_pairs = n * (n - 1) / 2;
    let mut dists = Vec::with_capacity(total_pairs.min(sample_cap));
    if total_pairs <= sample_cap {
        for i in 0..n {
            for j in i + 1..n {
                dists.push(distance(points[i], points[j])?);
            }
        }
    } else {
        let mut rng = Rng::stream(seed, "median-pairs", &[]);
        while dists.len() < sample_cap {
            let i = rng.next_index(n);
            let j = rng.next_index(n);
            if i == j {
                continue;
            }
            dists.push(distance(points[i], points[j])?);
        }
    }
    let median = median_of(&mut dists);
    if median <= 0.0 {
        return Err(Error::DegenerateDistances);
    }
    Ok(1.0 / median)
}

/// Median of a scratch buffer; mean of the two central values when the
/// count is even.
pub(crate) fn median_of(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).expect("distances are not NaN"));
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// Bandwidth for the continuous-attribute kernel: 1/√d.
pub fn gamma_c_rule(attr_dim: usize) -> f64 {
    assert!(attr_dim >= 1);
    1.0 / (attr_dim as f64).sqrt()
}

/// Published bandwidth for the FRANKENSTEIN attribute space, used instead
/// of the dimension rule on that dataset.
pub fn frankenstein_gamma_c() -> f64 {
    0.0073_f64.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::symmetric_eigen;
    use crate::matrix::Matrix;

    #[test]
    fn rbf_at_zero_distance_is_one() {
        let k = KernelSpec::LaplacianRbf { gamma: 1.0 };
        let x = [0.3, -1.2];
        assert_eq!(
            eval_kernel(&k, Feature::Vector(&x), Feature::Vector(&x)).unwrap(),
            1.0
        );
    }

    #[test]
    fn delta_kernel_matches_symbols() {
        assert_eq!(
            eval_kernel(&KernelSpec::Delta, Feature::Symbol(2), Feature::Symbol(2)).unwrap(),
            1.0
        );
        assert_eq!(
            eval_kernel(&KernelSpec::Delta, Feature::Symbol(2), Feature::Symbol(5)).unwrap(),
            0.0
        );
    }

    #[test]
    fn gaussian_direct_evaluation() {
        let k = KernelSpec::GaussianRbf { gamma: 0.5 };
        let got = eval_kernel(&k, Feature::Vector(&[0.0]), Feature::Vector(&[2.0])).unwrap();
        assert!((got - (-2.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn polynomial_direct_evaluation() {
        let k = KernelSpec::Polynomial { c: 1.0, degree: 2 };
        let got = eval_kernel(
            &k,
            Feature::Vector(&[1.0, 2.0]),
            Feature::Vector(&[3.0, 4.0]),
        )
        .unwrap();
        assert_eq!(got, 144.0);
    }

    #[test]
    fn kernels_are_symmetric() {
        let mut rng = Rng::from_seed(42);
        let specs = [
            KernelSpec::GaussianRbf { gamma: 0.7 },
            KernelSpec::LaplacianRbf { gamma: 1.3 },
            KernelSpec::Polynomial { c: 0.5, degree: 3 },
        ];
        for _ in 0..50 {
            let x: Vec<f64> = (0..4).map(|_| rng.next_f64() * 4.0 - 2.0).collect();
            let y: Vec<f64> = (0..4).map(|_| rng.next_f64() * 4.0 - 2.0).collect();
            for spec in &specs {
                let a = eval_kernel(spec, Feature::Vector(&x), Feature::Vector(&y)).unwrap();
                let b = eval_kernel(spec, Feature::Vector(&y), Feature::Vector(&x)).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn domain_mismatch_is_an_error() {
        assert!(eval_kernel(
            &KernelSpec::Delta,
            Feature::Vector(&[1.0]),
            Feature::Vector(&[1.0])
        )
        .is_err());
        assert!(eval_kernel(
            &KernelSpec::GaussianRbf { gamma: 1.0 },
            Feature::Vector(&[1.0]),
            Feature::Vector(&[1.0, 2.0])
        )
        .is_err());
    }

    #[test]
    fn node_kernel_is_the_product_of_components() {
        let spec = NodeKernelSpec::new(
            KernelSpec::LaplacianRbf { gamma: 0.8 },
            Some(KernelSpec::Delta),
            Some(KernelSpec::GaussianRbf { gamma: 0.3 }),
        )
        .unwrap();
        let mut rng = Rng::from_seed(17);
        for trial in 0..30 {
            let p: Vec<f64> = (0..5).map(|_| rng.next_f64()).collect();
            let q: Vec<f64> = (0..5).map(|_| rng.next_f64()).collect();
            let a: Vec<f64> = (0..3).map(|_| rng.next_f64()).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.next_f64()).collect();
            let (lu, lv) = (trial % 3, trial % 2);
            let u = NodeRef {
                rpf: &p,
                label: Some(lu),
                attr: Some(&a),
            };
            let v = NodeRef {
                rpf: &q,
                label: Some(lv),
                attr: Some(&b),
            };
            let got = node_kernel(&spec, u, v).unwrap();
            let want = eval_kernel(&spec.k0, Feature::Vector(&p), Feature::Vector(&q)).unwrap()
                * eval_kernel(&KernelSpec::Delta, Feature::Symbol(lu), Feature::Symbol(lv))
                    .unwrap()
                * eval_kernel(
                    spec.kc.as_ref().unwrap(),
                    Feature::Vector(&a),
                    Feature::Vector(&b),
                )
                .unwrap();
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn identical_triples_give_one_and_delta_annihilates() {
        let spec = NodeKernelSpec::new(
            KernelSpec::GaussianRbf { gamma: 1.0 },
            Some(KernelSpec::Delta),
            None,
        )
        .unwrap();
        let p = [0.1, 0.2];
        let u = NodeRef {
            rpf: &p,
            label: Some(4),
            attr: None,
        };
        assert_eq!(node_kernel(&spec, u, u).unwrap(), 1.0);
        let v = NodeRef {
            rpf: &p,
            label: Some(5),
            attr: None,
        };
        assert_eq!(node_kernel(&spec, u, v).unwrap(), 0.0);
    }

    #[test]
    fn missing_label_is_reported() {
        let spec = NodeKernelSpec::new(
            KernelSpec::GaussianRbf { gamma: 1.0 },
            Some(KernelSpec::Delta),
            None,
        )
        .unwrap();
        let p = [0.1];
        let u = NodeRef {
            rpf: &p,
            label: None,
            attr: None,
        };
        assert!(matches!(
            node_kernel(&spec, u, u),
            Err(Error::MissingAttribute("discrete label"))
        ));
    }

    #[test]
    fn median_heuristic_two_points() {
        let pts: Vec<Vec<f64>> = vec![vec![0.0], vec![2.0]];
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let gamma = median_heuristic(&refs, DistanceMetric::Euclidean, 10, 0).unwrap();
        assert_eq!(gamma, 0.5);
        let gamma_sq = median_heuristic(&refs, DistanceMetric::SquaredEuclidean, 10, 0).unwrap();
        assert_eq!(gamma_sq, 0.25);
    }

    #[test]
    fn median_heuristic_rejects_constant_points() {
        let pts: Vec<Vec<f64>> = vec![vec![1.0, 1.0]; 5];
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        assert!(matches!(
            median_heuristic(&refs, DistanceMetric::Euclidean, 10, 0),
            Err(Error::DegenerateDistances)
        ));
    }

    #[test]
    fn median_heuristic_matches_exhaustive_oracle() {
        let mut rng = Rng::from_seed(23);
        let pts: Vec<Vec<f64>> = (0..100)
            .map(|_| (0..6).map(|_| rng.next_f64() * 3.0).collect())
            .collect();
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let gamma =
            median_heuristic(&refs, DistanceMetric::Euclidean, usize::MAX, 0).unwrap();
        let mut all = Vec::new();
        for i in 0..100 {
            for j in i + 1..100 {
                let d: f64 = pts[i]
                    .iter()
                    .zip(&pts[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                all.push(d);
            }
        }
        let want = 1.0 / median_of(&mut all);
        assert_eq!(gamma, want);
    }

    #[test]
    fn median_heuristic_subsampling_is_deterministic() {
        let mut rng = Rng::from_seed(29);
        let pts: Vec<Vec<f64>> = (0..200)
            .map(|_| vec![rng.next_f64(), rng.next_f64()])
            .collect();
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let a = median_heuristic(&refs, DistanceMetric::Euclidean, 500, 7).unwrap();
        let b = median_heuristic(&refs, DistanceMetric::Euclidean, 500, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gamma_c_rule_values() {
        assert_eq!(gamma_c_rule(1), 1.0);
        assert_eq!(gamma_c_rule(4), 0.5);
        assert!((frankenstein_gamma_c() - 0.0854400374531753).abs() < 1e-15);
    }

    #[test]
    fn small_gram_matrices_are_psd() {
        let mut rng = Rng::from_seed(31);
        let pts: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..3).map(|_| rng.next_f64() * 2.0).collect())
            .collect();
        for spec in [
            KernelSpec::GaussianRbf { gamma: 0.9 },
            KernelSpec::LaplacianRbf { gamma: 0.9 },
        ] {
            let n = pts.len();
            let mut gram = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    gram[(i, j)] =
                        eval_kernel(&spec, Feature::Vector(&pts[i]), Feature::Vector(&pts[j]))
                            .unwrap();
                }
            }
            let es = symmetric_eigen(&gram).unwrap();
            let max = es.values.iter().cloned().fold(f64::MIN, f64::max);
            let min = es.values.iter().cloned().fold(f64::MAX, f64::min);
            assert!(min >= -1e-8 * max, "{spec:?}: min {min}, max {max}");
        }
        // Delta kernel over random symbols.
        let symbols: Vec<usize> = (0..40).map(|_| rng.next_index(5)).collect();
        let mut gram = Matrix::zeros(40, 40);
        for i in 0..40 {
            for j in 0..40 {
                gram[(i, j)] = if symbols[i] == symbols[j] { 1.0 } else { 0.0 };
            }
        }
        let es = symmetric_eigen(&gram).unwrap();
        let max = es.values.iter().cloned().fold(f64::MIN, f64::max);
        let min = es.values.iter().cloned().fold(f64::MAX, f64::min);
        assert!(min >= -1e-8 * max);
    }
}
