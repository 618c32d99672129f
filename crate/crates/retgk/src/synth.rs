//! Synthetic graph generators for tests, benchmarks, and demos.

use crate::graph::Graph;
use crate::rng::Rng;

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j, 1.0));
        }
    }
    Graph::new(n, edges).expect("complete graph is valid")
}

pub fn path(n: usize) -> Graph {
    let edges = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    Graph::new(n, edges).expect("path graph is valid")
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3);
    let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    edges.push((n - 1, 0, 1.0));
    Graph::new(n, edges).expect("cycle graph is valid")
}

/// Erdős–Rényi G(n, p) with unit weights. May be disconnected.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = Rng::stream(seed, "synth-er", &[]);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.next_f64() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    Graph::new(n, edges).expect("sampled edges are valid")
}

/// Connected random graph: a uniform random attachment tree plus extra
/// edges with probability `extra_edge_prob`. Weights are 1 when
/// `weighted` is false, otherwise uniform in [0.5, 2).
pub fn random_connected_graph(n: usize, extra_edge_prob: f64, weighted: bool, seed: u64) -> Graph {
    assert!(n >= 1);
    let mut rng = Rng::stream(seed, "synth-conn", &[]);
    let weight = |rng: &mut Rng| {
        if weighted {
            0.5 + 1.5 * rng.next_f64()
        } else {
            1.0
        }
    };
    let mut edges = Vec::new();
    let mut present = std::collections::HashSet::new();
    for i in 1..n {
        let parent = rng.next_index(i);
        present.insert((parent, i));
        let w = weight(&mut rng);
        edges.push((parent, i, w));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !present.contains(&(i, j)) && rng.next_f64() < extra_edge_prob {
                let w = weight(&mut rng);
                edges.push((i, j, w));
            }
        }
    }
    Graph::new(n, edges).expect("sampled edges are valid")
}

pub fn random_weighted_graph(n: usize, extra_edge_prob: f64, seed: u64) -> Graph {
    random_connected_graph(n, extra_edge_prob, true, seed)
}

/// A large sparse graph: a ring plus `chords` random chords. Stays cheap
/// to walk on even at 10⁵ nodes.
pub fn ring_with_chords(n: usize, chords: usize, seed: u64) -> Graph {
    let mut rng = Rng::stream(seed, "synth-ring", &[]);
    let mut present = std::collections::HashSet::new();
    let mut edges: Vec<_> = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            present.insert((i.min(j), i.max(j)));
            (i, (i + 1) % n, 1.0)
        })
        .collect();
    let mut added = 0;
    while added < chords {
        let i = rng.next_index(n);
        let j = rng.next_index(n);
        if i == j {
            continue;
        }
        let key = (i.min(j), i.max(j));
        if present.insert(key) {
            edges.push((key.0, key.1, 1.0));
            added += 1;
        }
    }
    Graph::new(n, edges).expect("ring with chords is valid")
}

pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut tau: Vec<usize> = (0..n).collect();
    let mut rng = Rng::stream(seed, "synth-perm", &[]);
    rng.shuffle(&mut tau);
    tau
}

/// A single connected graph holding three "center" nodes whose return
/// probability curves separate at different walk lengths.
///
/// The centers all have degree 3 and all their neighbors have degree 3,
/// so their 1- and 2-step return probabilities agree. The first two
/// centers sit on trees that are identical out to distance 3 and differ
/// only in how the distance-4 shell is wired, so their curves part ways
/// at step 8. The third center closes a triangle with its neighbors and
/// its curve already deviates at step 3.
///
/// Returns the graph and the indices of the three centers.
pub fn three_centers_toy() -> (Graph, usize, usize, usize) {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut next = 0usize;
    let mut fresh = || {
        let id = next;
        next += 1;
        id
    };

    // Tree rooted at `center`: 3 children at depth 1, two children per node
    // down to depth 4. `tie_leaves` joins each depth-3 node's two children.
    // Returns (center, one depth-4 leaf to attach a bridge to).
    let mut tree = |edges: &mut Vec<(usize, usize, f64)>, tie_leaves: bool| {
        let center = fresh();
        let mut frontier = vec![center];
        let mut leaf_pairs = Vec::new();
        for depth in 1..=4 {
            let fanout = if depth == 1 { 3 } else { 2 };
            let mut nxt = Vec::new();
            for &node in &frontier {
                let kids: Vec<usize> = (0..fanout).map(|_| fresh()).collect();
                for &k in &kids {
                    edges.push((node, k, 1.0));
                }
                if depth == 4 {
                    leaf_pairs.push((kids[0], kids[1]));
                }
                nxt.extend(kids);
            }
            frontier = nxt;
        }
        if tie_leaves {
            for &(a, b) in &leaf_pairs {
                edges.push((a, b, 1.0));
            }
        }
        (center, leaf_pairs[0].0)
    };

    let (c1, t1_leaf) = tree(&mut edges, false);
    let (c2, t2_leaf) = tree(&mut edges, true);

    // Third center: triangle against two of its neighbors.
    let c3 = fresh();
    let v1 = fresh();
    let v2 = fresh();
    let v3 = fresh();
    edges.push((c3, v1, 1.0));
    edges.push((c3, v2, 1.0));
    edges.push((c3, v3, 1.0));
    edges.push((v1, v2, 1.0));
    let w1 = fresh();
    let w2 = fresh();
    edges.push((v1, w1, 1.0));
    edges.push((v2, w2, 1.0));
    let w3a = fresh();
    let w3b = fresh();
    edges.push((v3, w3a, 1.0));
    edges.push((v3, w3b, 1.0));

    // Bridges far from every center keep the graph connected without
    // touching any center's radius-3 ball.
    let mut bridge = |edges: &mut Vec<(usize, usize, f64)>, a: usize, b: usize| {
        let m1 = fresh();
        let m2 = fresh();
        edges.push((a, m1, 1.0));
        edges.push((m1, m2, 1.0));
        edges.push((m2, b, 1.0));
    };
    bridge(&mut edges, w1, t1_leaf);
    bridge(&mut edges, w2, t2_leaf);

    let g = Graph::new(next, edges).expect("toy graph is valid");
    (g, c1, c2, c3)
}
