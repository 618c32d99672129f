//! Property-based checks of the structural invariants.

use proptest::prelude::*;

use retgk::embed_exact::{mmd, GraphSetRep};
use retgk::graph::{Graph, SelfLoopPolicy};
use retgk::kernels::{eval_kernel, Feature, KernelSpec, NodeKernelSpec};
use retgk::matrix::Matrix;
use retgk::rpf::{rpf_bruteforce, rpf_exact};

/// Random weighted graph with every node given a self-loop when isolated,
/// so degrees are always positive.
fn arb_graph() -> impl Strategy<Value = Graph> {
    (2usize..=14)
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                proptest::collection::vec(
                    proptest::option::weighted(0.35, 0.25f64..4.0),
                    pairs,
                ),
            )
        })
        .prop_map(|(n, slots)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if let Some(w) = slots[k] {
                        edges.push((i, j, w));
                    }
                    k += 1;
                }
            }
            Graph::new(n, edges)
                .unwrap()
                .apply_self_loops(SelfLoopPolicy::IsolatedOnly, 1.0)
        })
}

fn arb_graph_and_permutation() -> impl Strategy<Value = (Graph, Vec<usize>)> {
    arb_graph().prop_flat_map(|g| {
        let n = g.node_count();
        let idx: Vec<usize> = (0..n).collect();
        (Just(g), Just(idx).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transition_rows_sum_to_one((g, _) in arb_graph_and_permutation()) {
        let ones = vec![1.0; g.node_count()];
        let out = g.transition_matvec(&ones).unwrap();
        for x in out {
            prop_assert!((x - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn transition_matvec_matches_dense((g, _) in arb_graph_and_permutation()) {
        let n = g.node_count();
        let degrees = g.degree_vector().unwrap();
        let mut p = Matrix::zeros(n, n);
        for &(i, j, w) in g.edges() {
            p[(i, j)] = w / degrees[i];
            if i != j {
                p[(j, i)] = w / degrees[j];
            }
        }
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let fast = g.transition_matvec(&v).unwrap();
        let slow = p.matvec(&v);
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn permutation_roundtrip_and_invariants((g, tau) in arb_graph_and_permutation()) {
        let h = g.permute(&tau).unwrap();
        let mut inv = vec![0usize; tau.len()];
        for (i, &t) in tau.iter().enumerate() {
            inv[t] = i;
        }
        let back = h.permute(&inv).unwrap();
        let canon = |g: &Graph| {
            let mut e: Vec<_> = g
                .edges()
                .iter()
                .map(|&(i, j, w)| (i.min(j), i.max(j), w.to_bits()))
                .collect();
            e.sort_unstable();
            e
        };
        prop_assert_eq!(canon(&back), canon(&g));

        // Sorted edge-weight multiset is preserved bit for bit.
        let mut wg: Vec<u64> = g.edges().iter().map(|e| e.2.to_bits()).collect();
        let mut wh: Vec<u64> = h.edges().iter().map(|e| e.2.to_bits()).collect();
        wg.sort_unstable();
        wh.sort_unstable();
        prop_assert_eq!(wg, wh);
    }

    #[test]
    fn rpf_is_isomorphism_invariant((g, tau) in arb_graph_and_permutation()) {
        let steps = 12;
        let rg = rpf_exact(&g, steps).unwrap();
        let rh = rpf_exact(&g.permute(&tau).unwrap(), steps).unwrap();
        for (i, &ti) in tau.iter().enumerate() {
            for (a, b) in rg.row(i).iter().zip(rh.row(ti)) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn rpf_entries_are_probabilities((g, _) in arb_graph_and_permutation()) {
        let rpf = rpf_exact(&g, 20).unwrap();
        for i in 0..g.node_count() {
            for &v in rpf.row(i) {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn spectral_equals_bruteforce((g, _) in arb_graph_and_permutation()) {
        let exact = rpf_exact(&g, 30).unwrap();
        let brute = rpf_bruteforce(&g, 30).unwrap();
        for i in 0..g.node_count() {
            for (a, b) in exact.row(i).iter().zip(brute.row(i)) {
                prop_assert!((a - b).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn rbf_kernels_are_symmetric_and_bounded(
        x in proptest::collection::vec(-5.0f64..5.0, 4),
        y in proptest::collection::vec(-5.0f64..5.0, 4),
        gamma in 0.05f64..4.0,
    ) {
        for spec in [KernelSpec::GaussianRbf { gamma }, KernelSpec::LaplacianRbf { gamma }] {
            let a = eval_kernel(&spec, Feature::Vector(&x), Feature::Vector(&y)).unwrap();
            let b = eval_kernel(&spec, Feature::Vector(&y), Feature::Vector(&x)).unwrap();
            prop_assert_eq!(a, b);
            // Mathematically the value lies in (0, 1]; huge exponents
            // underflow to +0, which is the closest representable value.
            prop_assert!((0.0..=1.0).contains(&a));
            if x == y {
                prop_assert_eq!(a, 1.0);
            }
        }
    }

    #[test]
    fn mmd_is_symmetric_and_nonnegative(
        (g, tau) in arb_graph_and_permutation(),
    ) {
        let h = g.permute(&tau).unwrap();
        let spec = NodeKernelSpec::structural(KernelSpec::GaussianRbf { gamma: 0.7 }).unwrap();
        let rg = GraphSetRep::from_graph(&g, rpf_exact(&g, 10).unwrap()).unwrap();
        let rh = GraphSetRep::from_graph(&h, rpf_exact(&h, 10).unwrap()).unwrap();
        let ab = mmd(&spec, &rg, &rh).unwrap();
        let ba = mmd(&spec, &rh, &rg).unwrap();
        prop_assert!(ab >= 0.0);
        // Swapping the arguments reassociates the pairwise sums, so compare
        // the squared values, which differ only by accumulated roundoff.
        prop_assert!((ab * ab - ba * ba).abs() <= 1e-12);
    }
}
