//! Approximate graph embeddings via explicit feature maps.
//!
//! Random Fourier features approximate a shift-invariant kernel on each
//! Euclidean attribute domain, the delta kernel on labels is reproduced
//! exactly by one-hot vectors, and a graph becomes the average over its
//! nodes of the Kronecker product of the per-domain features. Kernel
//! values between graphs are then plain inner products or distances of
//! fixed-size vectors, independent of node counts.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::embed_exact::{GraphKernelParams, GraphSetRep, GramOutcome};
use crate::error::{Error, Result};
use crate::gram::GramMatrix;
use crate::kernels::median_of;
use crate::matrix::Matrix;
use crate::rng::Rng;

/// Frequency law for sampling random Fourier features. Gaussian
/// frequencies make ⟨φ(x),φ(y)⟩ estimate exp(−γ‖x−y‖²); Cauchy
/// frequencies estimate exp(−γ‖x−y‖₂) instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrequencyDist {
    Gaussian,
    Cauchy,
}

/// A sampled random Fourier feature map x ↦ √(2/D)·cos(Ωx + b).
#[derive(Clone, Debug)]
pub struct RffMap {
    /// D rows of length `dim_in`.
    pub frequencies: Vec<Vec<f64>>,
    /// D phase offsets in [0, 2π].
    pub offsets: Vec<f64>,
    /// Bandwidth of the kernel being approximated.
    pub gamma: f64,
    pub dim_in: usize,
    pub dim_out: usize,
}

/// Sample a Gaussian-frequency map approximating exp(−γ‖x−y‖²).
pub fn rff_sample(dim_in: usize, dim_out: usize, gamma: f64, seed: u64) -> RffMap {
    rff_sample_with(FrequencyDist::Gaussian, dim_in, dim_out, gamma, seed)
}

pub fn rff_sample_with(
    dist: FrequencyDist,
    dim_in: usize,
    dim_out: usize,
    gamma: f64,
    seed: u64,
) -> RffMap {
    assert!(dim_in >= 1 && dim_out >= 1);
    assert!(gamma > 0.0 && gamma.is_finite());
    let mut rng = Rng::stream(seed, "rff", &[]);
    let mut frequencies = Vec::with_capacity(dim_out);
    for _ in 0..dim_out {
        let row = match dist {
            // Per-coordinate variance 2γ matches the Fourier transform of
            // the Gaussian kernel exp(−γ‖δ‖²).
            FrequencyDist::Gaussian => {
                let std = (2.0 * gamma).sqrt();
                (0..dim_in).map(|_| std * rng.next_gaussian()).collect()
            }
            // Multivariate Cauchy with scale γ: γ·z/|t| for standard
            // normal z and scalar t; its characteristic function is
            // exp(−γ‖δ‖₂).
            FrequencyDist::Cauchy => {
                let mut t = rng.next_gaussian();
                while t == 0.0 {
                    t = rng.next_gaussian();
                }
                let scale = gamma / t.abs();
                (0..dim_in).map(|_| scale * rng.next_gaussian()).collect()
            }
        };
        frequencies.push(row);
    }
    let offsets = (0..dim_out)
        .map(|_| rng.uniform(2.0 * std::f64::consts::PI))
        .collect();
    RffMap {
        frequencies,
        offsets,
        gamma,
        dim_in,
        dim_out,
    }
}

/// Evaluate the cosine feature vector; ‖result‖₂² ≤ 2.
pub fn rff_apply(map: &RffMap, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != map.dim_in {
        return Err(Error::DimensionMismatch(format!(
            "input of dimension {} for a map over ℝ^{}",
            x.len(),
            map.dim_in
        )));
    }
    let scale = (2.0 / map.dim_out as f64).sqrt();
    Ok(map
        .frequencies
        .iter()
        .zip(&map.offsets)
        .map(|(w, &b)| {
            let dot: f64 = w.iter().zip(x).map(|(a, c)| a * c).sum();
            scale * (dot + b).cos()
        })
        .collect())
}

/// Indicator vector of `symbol` in a dense alphabet of the given size.
/// Inner products of one-hot vectors reproduce the delta kernel exactly.
pub fn one_hot(symbol: usize, alphabet_size: usize) -> Result<Vec<f64>> {
    if symbol >= alphabet_size {
        return Err(Error::UnknownSymbol(symbol, alphabet_size));
    }
    let mut v = vec![0.0; alphabet_size];
    v[symbol] = 1.0;
    Ok(v)
}

pub const DEFAULT_TENSOR_DIM_CAP: usize = 10_000_000;

/// Per-domain feature maps for embedding one dataset's graphs.
#[derive(Clone, Debug)]
pub struct EmbeddingMaps {
    pub structural: RffMap,
    /// Alphabet size when graphs carry discrete labels.
    pub label_alphabet: Option<usize>,
    /// Map for continuous attributes when present.
    pub attribute: Option<RffMap>,
    /// Refuse to build embeddings larger than this many entries.
    pub dim_cap: usize,
}

impl EmbeddingMaps {
    pub fn new(
        structural: RffMap,
        label_alphabet: Option<usize>,
        attribute: Option<RffMap>,
    ) -> Self {
        EmbeddingMaps {
            structural,
            label_alphabet,
            attribute,
            dim_cap: DEFAULT_TENSOR_DIM_CAP,
        }
    }

    /// Factor dimensions in tensor order: structural, label, attribute.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.structural.dim_out];
        if let Some(a) = self.label_alphabet {
            dims.push(a);
        }
        if let Some(m) = &self.attribute {
            dims.push(m.dim_out);
        }
        dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims().iter().product()
    }
}

/// A graph embedded as the flattened average of per-node rank-one tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorEmbedding {
    pub vector: Vec<f64>,
    pub dims: Vec<usize>,
}

impl TensorEmbedding {
    pub fn norm(&self) -> f64 {
        self.vector.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &TensorEmbedding) -> Result<f64> {
        if self.vector.len() != other.vector.len() {
            return Err(Error::DimensionMismatch(format!(
                "embeddings of length {} and {}",
                self.vector.len(),
                other.vector.len()
            )));
        }
        Ok(self
            .vector
            .iter()
            .zip(&other.vector)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn distance(&self, other: &TensorEmbedding) -> Result<f64> {
        if self.vector.len() != other.vector.len() {
            return Err(Error::DimensionMismatch(format!(
                "embeddings of length {} and {}",
                self.vector.len(),
                other.vector.len()
            )));
        }
        Ok(self
            .vector
            .iter()
            .zip(&other.vector)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }
}

/// Kronecker product of `factors`, scaled by `weight`, accumulated into
/// `out` (which must have length = product of factor lengths).
pub(crate) fn kron_accumulate(out: &mut [f64], factors: &[&[f64]], weight: f64) {
    match factors {
        [] => out[0] += weight,
        [single] => {
            for (o, &a) in out.iter_mut().zip(*single) {
                *o += weight * a;
            }
        }
        [head, rest @ ..] => {
            let block = out.len() / head.len();
            for (i, &a) in head.iter().enumerate() {
                kron_accumulate(&mut out[i * block..(i + 1) * block], rest, weight * a);
            }
        }
    }
}

/// Embed one graph: (1/n)·Σᵢ φ₀(p⃗ᵢ) ⊗ onehot(ℓᵢ) ⊗ φ_c(a⃗ᵢ), flattened.
///
/// Nodes are summed in ascending index order so repeated runs are
/// bit-identical.
pub fn tensor_embed_graph(rep: &GraphSetRep, maps: &EmbeddingMaps) -> Result<TensorEmbedding> {
    let dims = maps.dims();
    let total: usize = dims.iter().product();
    if total > maps.dim_cap {
        return Err(Error::EmbeddingTooLarge(total, maps.dim_cap));
    }
    let n = rep.node_count();
    let mut vector = vec![0.0; total];
    let weight = 1.0 / n as f64;
    for i in 0..n {
        let node = rep.node(i);
        let phi0 = rff_apply(&maps.structural, node.rpf)?;
        let phic = match &maps.attribute {
            Some(map) => {
                let attr = node.attr.ok_or(Error::MissingAttribute("continuous attribute"))?;
                Some(rff_apply(map, attr)?)
            }
            None => None,
        };
        match maps.label_alphabet {
            None => {
                let mut factors: Vec<&[f64]> = vec![&phi0];
                if let Some(pc) = &phic {
                    factors.push(pc);
                }
                kron_accumulate(&mut vector, &factors, weight);
            }
            Some(alphabet) => {
                // The one-hot factor selects a single block of the output;
                // skipping the explicit zero factor keeps the work at
                // D₀·D_c per node instead of D₀·|alphabet|·D_c.
                let label = node.label.ok_or(Error::MissingAttribute("discrete label"))?;
                if label >= alphabet {
                    return Err(Error::UnknownSymbol(label, alphabet));
                }
                let tail: usize = dims[2..].iter().product::<usize>().max(1);
                let block = alphabet * tail;
                for (k, &a) in phi0.iter().enumerate() {
                    let offset = k * block + label * tail;
                    match &phic {
                        Some(pc) => {
                            kron_accumulate(&mut vector[offset..offset + tail], &[pc], weight * a)
                        }
                        None => vector[offset] += weight * a,
                    }
                }
            }
        }
    }
    Ok(TensorEmbedding { vector, dims })
}

/// Embed every graph of a dataset in parallel.
pub fn embed_dataset(reps: &[GraphSetRep], maps: &EmbeddingMaps) -> Result<Vec<TensorEmbedding>> {
    reps.par_iter()
        .map(|rep| tensor_embed_graph(rep, maps))
        .collect()
}

/// Gram matrix of the approximate graph kernel over embedded graphs.
/// Forms mirror the exact module: polynomial of inner products, or
/// exponential of distances with the median-based bandwidth default.
pub fn retgk2_gram(
    embeddings: &[TensorEmbedding],
    params: &GraphKernelParams,
) -> Result<GramOutcome> {
    params.validate()?;
    let n = embeddings.len();
    if let Some(bad) = embeddings
        .iter()
        .position(|e| e.vector.len() != embeddings[0].vector.len())
    {
        return Err(Error::DimensionMismatch(format!(
            "embedding {bad} has length {} but embedding 0 has {}",
            embeddings[bad].vector.len(),
            embeddings[0].vector.len()
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect();
    match *params {
        GraphKernelParams::Polynomial { c, degree } => {
            let entries: Vec<f64> = pairs
                .par_iter()
                .map(|&(i, j)| {
                    embeddings[i]
                        .dot(&embeddings[j])
                        .map(|d| (c + d).powi(degree as i32))
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
                        embeddings[i].distance(&embeddings[j])
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

const EMBEDDING_MAGIC: &[u8; 8] = b"RETGKEMB";

/// Binary embedding file: 8-byte magic, u32 rank, rank u32 dims, then the
/// flat payload as little-endian f64. Round-trips bit-exactly.
pub fn write_embedding(emb: &TensorEmbedding, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(EMBEDDING_MAGIC)?;
    w.write_all(&(emb.dims.len() as u32).to_le_bytes())?;
    for &d in &emb.dims {
        w.write_all(&(d as u32).to_le_bytes())?;
    }
    for &v in &emb.vector {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_embedding(path: &Path) -> Result<TensorEmbedding> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != EMBEDDING_MAGIC {
        return Err(Error::MalformedLine {
            file: path.display().to_string(),
            line: 0,
            reason: "bad magic for embedding file".into(),
        });
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let rank = u32::from_le_bytes(u32buf) as usize;
    let mut dims = Vec::with_capacity(rank);
    for _ in 0..rank {
        r.read_exact(&mut u32buf)?;
        dims.push(u32::from_le_bytes(u32buf) as usize);
    }
    let total: usize = dims.iter().product();
    let mut vector = Vec::with_capacity(total);
    let mut f64buf = [0u8; 8];
    for _ in 0..total {
        r.read_exact(&mut f64buf)?;
        vector.push(f64::from_le_bytes(f64buf));
    }
    Ok(TensorEmbedding { vector, dims })
}

/// Readable alternative for small embeddings: dims on the first line,
/// values on the second.
pub fn write_embedding_csv(emb: &TensorEmbedding, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let dims: Vec<String> = emb.dims.iter().map(ToString::to_string).collect();
    writeln!(w, "{}", dims.join(","))?;
    let vals: Vec<String> = emb.vector.iter().map(|v| format!("{v:.17e}")).collect();
    writeln!(w, "{}", vals.join(","))?;
    w.flush()?;
    Ok(())
}
