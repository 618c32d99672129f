//! Weighted undirected graphs with optional node labels and attributes.
//!
//! Graphs are immutable after construction and stored as adjacency lists;
//! dense matrices are materialized only by the spectral code and by test
//! oracles. Node indices are 0-based everywhere inside the library; the
//! 1-based convention of the on-disk format is translated at the parsing
//! boundary.

use crate::error::{Error, Result};

/// How `apply_self_loops` picks the nodes to receive a loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelfLoopPolicy {
    /// Only zero-degree nodes get a self-loop.
    IsolatedOnly,
    /// Every node without one gets a self-loop.
    AllNodes,
}

#[derive(Clone, Debug)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize, f64)>,
    adjacency: Vec<Vec<(usize, f64)>>,
    discrete_labels: Option<Vec<usize>>,
    cont_attrs: Option<Vec<Vec<f64>>>,
}

impl Graph {
    /// Build a graph from an undirected edge list. Endpoints are 0-based.
    /// A self-loop is the pair `(i, i, w)` and its weight counts once
    /// toward the degree.
    pub fn new(node_count: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        Self::with_attributes(node_count, edges, None, None)
    }

    pub fn with_attributes(
        node_count: usize,
        edges: Vec<(usize, usize, f64)>,
        discrete_labels: Option<Vec<usize>>,
        cont_attrs: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidGraph("graph must have at least one node".into()));
        }
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for &(i, j, w) in &edges {
            if i >= node_count || j >= node_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for {node_count} nodes"
                )));
            }
            if w <= 0.0 || w.is_nan() || !w.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) has non-positive weight {w}"
                )));
            }
            let key = (i.min(j), i.max(j));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate undirected edge ({}, {})",
                    key.0, key.1
                )));
            }
        }
        if let Some(labels) = &discrete_labels {
            if labels.len() != node_count {
                return Err(Error::InvalidGraph(format!(
                    "{} labels for {node_count} nodes",
                    labels.len()
                )));
            }
        }
        if let Some(attrs) = &cont_attrs {
            if attrs.len() != node_count {
                return Err(Error::InvalidGraph(format!(
                    "{} attribute rows for {node_count} nodes",
                    attrs.len()
                )));
            }
            let dim = attrs[0].len();
            if dim == 0 || attrs.iter().any(|a| a.len() != dim) {
                return Err(Error::InvalidGraph(
                    "attribute vectors must share one nonzero dimension".into(),
                ));
            }
        }
        let mut adjacency = vec![Vec::new(); node_count];
        for &(i, j, w) in &edges {
            adjacency[i].push((j, w));
            if i != j {
                adjacency[j].push((i, w));
            }
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable_by_key(|&(j, _)| j);
        }
        Ok(Graph {
            node_count,
            edges,
            adjacency,
            discrete_labels,
            cont_attrs,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Neighbors of `i` with edge weights, sorted by neighbor index.
    /// A self-loop appears once.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn discrete_labels(&self) -> Option<&[usize]> {
        self.discrete_labels.as_deref()
    }

    pub fn cont_attrs(&self) -> Option<&[Vec<f64>]> {
        self.cont_attrs.as_deref()
    }

    pub fn cont_attr_dim(&self) -> Option<usize> {
        self.cont_attrs.as_ref().map(|a| a[0].len())
    }

    /// Sum of incident edge weights per node; a self-loop counts once.
    pub fn degree_vector(&self) -> Result<Vec<f64>> {
        let mut degrees = Vec::with_capacity(self.node_count);
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            let d: f64 = nbrs.iter().map(|&(_, w)| w).sum();
            if d <= 0.0 {
                return Err(Error::ZeroDegreeNode(i));
            }
            degrees.push(d);
        }
        Ok(degrees)
    }

    /// Sum of all node degrees.
    pub fn volume(&self) -> Result<f64> {
        Ok(self.degree_vector()?.iter().sum())
    }

    /// Add self-loops of the given weight according to `policy`. Idempotent.
    pub fn apply_self_loops(&self, policy: SelfLoopPolicy, weight: f64) -> Graph {
        assert!(weight > 0.0, "self-loop weight must be positive");
        let mut edges = self.edges.clone();
        for i in 0..self.node_count {
            let has_loop = self.adjacency[i].iter().any(|&(j, _)| j == i);
            let wants_loop = match policy {
                SelfLoopPolicy::IsolatedOnly => self.adjacency[i].is_empty(),
                SelfLoopPolicy::AllNodes => !has_loop,
            };
            if wants_loop && !has_loop {
                edges.push((i, i, weight));
            }
        }
        Graph::with_attributes(
            self.node_count,
            edges,
            self.discrete_labels.clone(),
            self.cont_attrs.clone(),
        )
        .expect("adding self-loops preserves validity")
    }

    /// Relabel nodes by the bijection `tau`: node `i` becomes `tau[i]`.
    pub fn permute(&self, tau: &[usize]) -> Result<Graph> {
        let n = self.node_count;
        if tau.len() != n {
            return Err(Error::InvalidPermutation(format!(
                "length {} does not match {n} nodes",
                tau.len()
            )));
        }
        let mut hit = vec![false; n];
        for &t in tau {
            if t >= n || hit[t] {
                return Err(Error::InvalidPermutation(
                    "map is not a bijection on the node set".into(),
                ));
            }
            hit[t] = true;
        }
        let edges = self
            .edges
            .iter()
            .map(|&(i, j, w)| (tau[i], tau[j], w))
            .collect();
        let labels = self.discrete_labels.as_ref().map(|ls| {
            let mut out = vec![0; n];
            for (i, &l) in ls.iter().enumerate() {
                out[tau[i]] = l;
            }
            out
        });
        let attrs = self.cont_attrs.as_ref().map(|xs| {
            let mut out = vec![Vec::new(); n];
            for (i, x) in xs.iter().enumerate() {
                out[tau[i]] = x.clone();
            }
            out
        });
        Graph::with_attributes(n, edges, labels, attrs)
    }

    /// One application of the random-walk transition operator P = D⁻¹A,
    /// computed edge by edge in O(|E|).
    pub fn transition_matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.node_count {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} vs {} nodes",
                v.len(),
                self.node_count
            )));
        }
        let degrees = self.degree_vector()?;
        let mut out = vec![0.0; self.node_count];
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            let mut acc = 0.0;
            for &(j, w) in nbrs {
                acc += w * v[j];
            }
            out[i] = acc / degrees[i];
        }
        Ok(out)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &(j, _) in &self.adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == self.node_count
    }

    /// Two-coloring check; self-loops make a graph non-bipartite.
    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![u8::MAX; self.node_count];
        for start in 0..self.node_count {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                for &(j, _) in &self.adjacency[i] {
                    if j == i {
                        return false;
                    }
                    if color[j] == u8::MAX {
                        color[j] = 1 - color[i];
                        stack.push(j);
                    } else if color[j] == color[i] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// A classification dataset: graphs, one class label per graph, and the
/// dataset-wide node-label alphabet (dense ids index into it).
#[derive(Clone, Debug)]
pub struct GraphDataset {
    pub graphs: Vec<Graph>,
    pub class_labels: Vec<i64>,
    pub label_alphabet: Vec<i64>,
}

impl GraphDataset {
    pub fn new(graphs: Vec<Graph>, class_labels: Vec<i64>, label_alphabet: Vec<i64>) -> Result<Self> {
        if graphs.len() != class_labels.len() {
            return Err(Error::InvalidGraph(format!(
                "{} graphs but {} class labels",
                graphs.len(),
                class_labels.len()
            )));
        }
        let alpha = label_alphabet.len();
        let labelled = graphs.iter().filter(|g| g.discrete_labels().is_some()).count();
        if labelled != 0 && labelled != graphs.len() {
            return Err(Error::InvalidGraph(
                "either all graphs carry discrete labels or none do".into(),
            ));
        }
        let dims: std::collections::HashSet<usize> =
            graphs.iter().filter_map(|g| g.cont_attr_dim()).collect();
        if dims.len() > 1 {
            return Err(Error::InvalidGraph(
                "continuous attribute dimension differs across graphs".into(),
            ));
        }
        for g in &graphs {
            if let Some(labels) = g.discrete_labels() {
                if let Some(&bad) = labels.iter().find(|&&l| l >= alpha) {
                    return Err(Error::UnknownSymbol(bad, alpha));
                }
            }
        }
        Ok(GraphDataset {
            graphs,
            class_labels,
            label_alphabet,
        })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn has_discrete_labels(&self) -> bool {
        self.graphs.first().is_some_and(|g| g.discrete_labels().is_some())
    }

    pub fn cont_attr_dim(&self) -> Option<usize> {
        self.graphs.iter().find_map(|g| g.cont_attr_dim())
    }

    /// Apply one self-loop policy to every graph.
    pub fn apply_self_loops(&self, policy: SelfLoopPolicy, weight: f64) -> GraphDataset {
        GraphDataset {
            graphs: self
                .graphs
                .iter()
                .map(|g| g.apply_self_loops(policy, weight))
                .collect(),
            class_labels: self.class_labels.clone(),
            label_alphabet: self.label_alphabet.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::rng::Rng;
    use crate::synth;

    pub fn triangle() -> Graph {
        Graph::new(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn dense_adjacency(g: &Graph) -> Matrix {
        let n = g.node_count();
        let mut a = Matrix::zeros(n, n);
        for &(i, j, w) in g.edges() {
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
        a
    }

    #[test]
    fn triangle_degrees_and_volume() {
        let g = triangle();
        assert_eq!(g.degree_vector().unwrap(), vec![2.0, 2.0, 2.0]);
        assert_eq!(g.volume().unwrap(), 6.0);
    }

    #[test]
    fn single_self_loop_degree() {
        let g = Graph::new(1, vec![(0, 0, 1.0)]).unwrap();
        assert_eq!(g.degree_vector().unwrap(), vec![1.0]);
        assert_eq!(g.volume().unwrap(), 1.0);
    }

    #[test]
    fn random_degrees_match_dense_row_sums() {
        let g = synth::random_weighted_graph(25, 0.3, 77);
        let a = dense_adjacency(&g);
        let degrees = g.degree_vector().unwrap();
        for (i, &deg) in degrees.iter().enumerate() {
            let row_sum: f64 = a.row(i).iter().sum();
            assert!((deg - row_sum).abs() < 1e-12);
        }
        assert!((g.volume().unwrap() - degrees.iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn zero_degree_node_is_reported() {
        let g = Graph::new(3, vec![(0, 1, 1.0)]).unwrap();
        match g.degree_vector() {
            Err(Error::ZeroDegreeNode(2)) => {}
            other => panic!("expected ZeroDegreeNode(2), got {other:?}"),
        }
    }

    #[test]
    fn self_loops_isolated_only() {
        let g = Graph::new(4, vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let fixed = g.apply_self_loops(SelfLoopPolicy::IsolatedOnly, 1.0);
        assert_eq!(fixed.degree_vector().unwrap(), vec![1.0, 2.0, 1.0, 1.0]);
        // Idempotent and a no-op on graphs without isolated nodes.
        let again = fixed.apply_self_loops(SelfLoopPolicy::IsolatedOnly, 1.0);
        assert_eq!(again.edges().len(), fixed.edges().len());
        let t = triangle().apply_self_loops(SelfLoopPolicy::IsolatedOnly, 1.0);
        assert_eq!(t.edges().len(), 3);
    }

    #[test]
    fn self_loops_all_nodes() {
        let t = triangle().apply_self_loops(SelfLoopPolicy::AllNodes, 1.0);
        assert_eq!(t.degree_vector().unwrap(), vec![3.0, 3.0, 3.0]);
        let again = t.apply_self_loops(SelfLoopPolicy::AllNodes, 1.0);
        assert_eq!(again.edges().len(), t.edges().len());
    }

    #[test]
    fn duplicate_edges_rejected() {
        let r = Graph::new(3, vec![(0, 1, 1.0), (1, 0, 2.0)]);
        assert!(matches!(r, Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn nonpositive_weight_rejected() {
        assert!(Graph::new(2, vec![(0, 1, 0.0)]).is_err());
        assert!(Graph::new(2, vec![(0, 1, -1.0)]).is_err());
    }

    #[test]
    fn permute_identity_and_inverse() {
        let g = synth::random_weighted_graph(12, 0.4, 5);
        let id: Vec<usize> = (0..12).collect();
        let same = g.permute(&id).unwrap();
        assert_eq!(same.edges(), g.edges());

        let tau = synth::random_permutation(12, 9);
        let mut inv = vec![0; 12];
        for (i, &t) in tau.iter().enumerate() {
            inv[t] = i;
        }
        let back = g.permute(&tau).unwrap().permute(&inv).unwrap();
        let mut a: Vec<_> = g
            .edges()
            .iter()
            .map(|&(i, j, w)| (i.min(j), i.max(j), w))
            .collect();
        let mut b: Vec<_> = back
            .edges()
            .iter()
            .map(|&(i, j, w)| (i.min(j), i.max(j), w))
            .collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn permute_preserves_degree_multiset_and_volume() {
        // Unit weights: degrees are small integers, so sums are exact.
        let g = synth::random_connected_graph(15, 0.3, false, 21);
        let tau = synth::random_permutation(15, 8);
        let h = g.permute(&tau).unwrap();
        let mut dg = g.degree_vector().unwrap();
        let mut dh = h.degree_vector().unwrap();
        dg.sort_by(|a, b| a.partial_cmp(b).unwrap());
        dh.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(dg, dh);
        assert_eq!(g.volume().unwrap(), h.volume().unwrap());

        // Mixed weights: the weight multiset is exact; degree sums are
        // only reassociated, so compare to machine precision.
        let g = synth::random_weighted_graph(15, 0.3, 22);
        let h = g.permute(&tau).unwrap();
        let mut wg: Vec<f64> = g.edges().iter().map(|e| e.2).collect();
        let mut wh: Vec<f64> = h.edges().iter().map(|e| e.2).collect();
        wg.sort_by(|a, b| a.partial_cmp(b).unwrap());
        wh.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(wg, wh);
        let mut dg = g.degree_vector().unwrap();
        let mut dh = h.degree_vector().unwrap();
        dg.sort_by(|a, b| a.partial_cmp(b).unwrap());
        dh.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in dg.iter().zip(&dh) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn permute_rejects_non_bijections() {
        let g = triangle();
        assert!(matches!(
            g.permute(&[0, 0, 1]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(matches!(
            g.permute(&[0, 1]),
            Err(Error::InvalidPermutation(_))
        ));
    }

    #[test]
    fn transition_matvec_stochastic_rows() {
        let g = triangle();
        let out = g.transition_matvec(&[1.0, 1.0, 1.0]).unwrap();
        for x in out {
            assert!((x - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn transition_matvec_path_of_two() {
        let g = Graph::new(2, vec![(0, 1, 1.0)]).unwrap();
        assert_eq!(g.transition_matvec(&[1.0, 0.0]).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn transition_matvec_matches_dense_oracle() {
        let mut rng = Rng::from_seed(3);
        for seed in 0..6 {
            let n = if seed < 3 { 20 } else { 50 };
            let g = synth::random_weighted_graph(n, 0.4, 1000 + seed)
                .apply_self_loops(SelfLoopPolicy::IsolatedOnly, 1.0);
            let n = g.node_count();
            let a = dense_adjacency(&g);
            let degrees = g.degree_vector().unwrap();
            let v: Vec<f64> = (0..n).map(|_| rng.next_f64() * 2.0 - 1.0).collect();
            let fast = g.transition_matvec(&v).unwrap();
            for i in 0..n {
                let slow: f64 = (0..n).map(|j| a[(i, j)] * v[j]).sum::<f64>() / degrees[i];
                assert!((fast[i] - slow).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bipartite_and_connected_checks() {
        assert!(!triangle().is_bipartite());
        assert!(triangle().is_connected());
        let p2 = Graph::new(2, vec![(0, 1, 1.0)]).unwrap();
        assert!(p2.is_bipartite());
        let square = synth::cycle(4);
        assert!(square.is_bipartite());
        let with_loop = p2.apply_self_loops(SelfLoopPolicy::AllNodes, 1.0);
        assert!(!with_loop.is_bipartite());
        let split = Graph::new(4, vec![(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(!split.is_connected());
    }

    #[test]
    fn dataset_validation() {
        let g = triangle();
        assert!(GraphDataset::new(vec![g.clone()], vec![0, 1], vec![]).is_err());
        let labelled =
            Graph::with_attributes(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], Some(vec![0, 1, 5]), None)
                .unwrap();
        assert!(matches!(
            GraphDataset::new(vec![labelled], vec![0], vec![10, 20]),
            Err(Error::UnknownSymbol(5, 2))
        ));
    }
}
