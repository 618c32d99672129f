//! Graph kernels from return probabilities of random walks.
//!
//! Every node of a graph gets an S-dimensional feature: the probabilities
//! that a random walk started there is back home after 1, 2, …, S steps.
//! These features are invariant under graph isomorphism and carry rich
//! connectivity information, so a graph can be compared to another by
//! comparing the distributions of its node features. Two routes are
//! provided:
//!
//! * [`embed_exact`]: kernel mean embeddings compared through pairwise
//!   node-kernel sums (MMD); exact but quadratic in node counts.
//! * [`embed_approx`]: random Fourier features and one-hot label vectors
//!   combined into fixed-size tensor embeddings; kernel values become
//!   inner products or distances of flat vectors.
//!
//! A precomputed-kernel SVM with the accompanying cross-validation
//! protocol ([`svm`]), a TU-format dataset reader ([`dataset`]), and
//! synthetic generators ([`synth`]) complete the classification pipeline.
//!
//! ```
//! use retgk::{rpf, synth};
//!
//! let (graph, _, _, _) = synth::three_centers_toy();
//! let features = rpf::rpf_exact(&graph, 50).unwrap();
//! assert_eq!(features.steps(), 50);
//! ```

pub mod dataset;
pub mod eigen;
pub mod embed_approx;
pub mod embed_exact;
mod error;
pub mod gram;
pub mod graph;
pub mod kernels;
pub mod matrix;
pub mod pipeline;
pub mod rng;
pub mod rpf;
pub mod svm;
pub mod synth;

pub use error::{Error, Result};
pub use gram::GramMatrix;
pub use graph::{Graph, GraphDataset, SelfLoopPolicy};
pub use rpf::{RpfConfig, RpfMatrix, RpfMethod};
