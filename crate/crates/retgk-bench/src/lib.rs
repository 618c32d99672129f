//! Shared inputs for the criterion benchmarks.

use retgk::graph::{Graph, GraphDataset};
use retgk::synth;

/// A two-class set of random connected graphs with `nodes`±3 nodes each.
pub fn structural_dataset(count: usize, nodes: usize, seed: u64) -> GraphDataset {
    let graphs: Vec<Graph> = (0..count)
        .map(|i| {
            let extra = if i % 2 == 0 { 0.15 } else { 0.3 };
            synth::random_connected_graph(nodes - 3 + i % 7, extra, false, seed + i as u64)
        })
        .collect();
    let labels = (0..count).map(|i| (i % 2) as i64).collect();
    GraphDataset::new(graphs, labels, vec![]).expect("valid dataset")
}
