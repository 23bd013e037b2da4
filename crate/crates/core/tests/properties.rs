use proptest::prelude::*;

use incentive::baselines::{min_budget, Baseline};
use incentive::oracle::{brute_force_tpi, brute_force_wtss, tree_optimal_cost};
use incentive::thresholds::{constant_thresholds, proportional_thresholds, random_thresholds};
use incentive::tpi::{tpi_trace, TpiCase};
use incentive::wtss::wtss_trace;
use incentive::{
    diffuse_incentives, diffuse_set, is_target_set, is_target_vector, load_edge_list, tpi, wtss, CostMap, Graph,
    IncentiveVector, TargetSet, ThresholdMap,
};

/// Random simple graph on 1..=max_n vertices.
fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut i = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[i] {
                        edges.push((u, v));
                    }
                    i += 1;
                }
            }
            Graph::new(n, &edges).unwrap()
        })
    })
}

/// Graph with thresholds in `1..=max(1, d)` and costs in `0..8`.
fn instance(max_n: usize) -> impl Strategy<Value = (Graph, ThresholdMap, CostMap)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::collection::vec(0.0..1.0f64, n), proptest::collection::vec(0u32..8, n)).prop_map(
            |(g, u, c)| {
                let t = g.vertices().map(|v| 1 + (u[v] * g.degree(v).max(1) as f64) as u32).collect();
                (g, ThresholdMap::new(t).unwrap(), CostMap::new(c))
            },
        )
    })
}

/// Random labeled tree by attaching each vertex to an earlier one.
fn tree(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(0.0..1.0f64, n).prop_map(move |u| {
            let edges: Vec<_> = (1..n).map(|v| ((u[v] * v as f64) as usize, v)).collect();
            Graph::new(n, &edges).unwrap()
        })
    })
}

fn subset(g: &Graph, mask: &[bool]) -> TargetSet {
    g.vertices().filter(|&v| mask[v % mask.len()]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn degree_sum_is_twice_edges(g in graph(30)) {
        let total: usize = g.vertices().map(|v| g.degree(v)).sum();
        prop_assert_eq!(total, 2 * g.m());
    }

    #[test]
    fn edge_list_reloads(g in graph(20)) {
        prop_assume!(g.m() > 0);
        let mut text = Vec::new();
        g.write_edge_list(&mut text).unwrap();
        let h = load_edge_list(&text[..]).unwrap();
        prop_assert_eq!(h.m(), g.m());
        let back: Vec<(u64, u64)> = {
            let mut e: Vec<_> = h.edges().map(|(u, v)| {
                let (a, b) = (h.label(u), h.label(v));
                (a.min(b), a.max(b))
            }).collect();
            e.sort();
            e
        };
        let orig: Vec<(u64, u64)> = g.edges().map(|(u, v)| (u as u64, v as u64)).collect();
        prop_assert_eq!(back, orig);
    }

    #[test]
    fn generated_thresholds_stay_in_range(g in graph(25), seed in any::<u64>(), k in 1u32..12, alpha in 0.05..0.95f64) {
        for t in [random_thresholds(&g, seed), constant_thresholds(&g, k), proportional_thresholds(&g, alpha)] {
            prop_assert!(t.within_degree(&g));
            prop_assert!(t.as_slice().iter().all(|&x| x >= 1));
        }
        prop_assert_eq!(random_thresholds(&g, seed), random_thresholds(&g, seed));
    }

    #[test]
    fn diffusion_is_monotone_in_seeds((g, t, _) in instance(14), a in proptest::collection::vec(any::<bool>(), 14), b in proptest::collection::vec(any::<bool>(), 14)) {
        let small = subset(&g, &a);
        let large: TargetSet = small.members().iter().copied().chain(subset(&g, &b).members().iter().copied()).collect();
        let lo = diffuse_set(&g, &t, &small);
        let hi = diffuse_set(&g, &t, &large);
        for v in g.vertices() {
            prop_assert!(!lo.is_active(v) || hi.is_active(v));
        }
    }

    #[test]
    fn diffusion_is_monotone_in_incentives((g, t, _) in instance(14), s in proptest::collection::vec(0u32..3, 14), extra in proptest::collection::vec(0u32..3, 14)) {
        let n = g.n();
        let lo = IncentiveVector::new(s[..n].to_vec());
        let hi = IncentiveVector::new((0..n).map(|v| s[v] + extra[v]).collect());
        let (lo, hi) = (diffuse_incentives(&g, &t, &lo), diffuse_incentives(&g, &t, &hi));
        for v in g.vertices() {
            prop_assert!(!lo.is_active(v) || hi.is_active(v));
        }
    }

    #[test]
    fn target_sets_embed_as_vectors((g, t, _) in instance(14), mask in proptest::collection::vec(any::<bool>(), 14)) {
        let s = subset(&g, &mask);
        let as_set = diffuse_set(&g, &t, &s);
        let as_vec = diffuse_incentives(&g, &t, &s.as_incentives(&t));
        prop_assert_eq!(as_set.rounds, as_vec.rounds);
    }

    #[test]
    fn rounds_partition_the_active_set((g, t, _) in instance(20), s in proptest::collection::vec(0u32..3, 20)) {
        let trace = diffuse_incentives(&g, &t, &IncentiveVector::new(s[..g.n()].to_vec()));
        let mut seen: Vec<usize> = trace.rounds.iter().flatten().copied().collect();
        let count = seen.len();
        seen.sort();
        seen.dedup();
        prop_assert_eq!(seen.len(), count);
        prop_assert_eq!(count, trace.active_count());
    }

    #[test]
    fn wtss_is_valid_and_bounded((g, t, c) in instance(40)) {
        let (s, log) = wtss_trace(&g, &t, &c).unwrap();
        prop_assert!(is_target_set(&g, &t, &s));
        prop_assert!(s.cost(&c) as f64 <= incentive::wtss::cost_bound(&g, &t, &c) + 1e-9);
        prop_assert_eq!(log.len(), g.n());
    }

    #[test]
    fn tpi_is_valid_and_bounded((g, t, _) in instance(40)) {
        let (s, log) = tpi_trace(&g, &t).unwrap();
        prop_assert!(is_target_vector(&g, &t, &s));
        prop_assert!(s.cost() as f64 <= incentive::tpi::cost_bound(&g, &t) + 1e-9);
        // unit increments: cost equals the number of rule-1 iterations
        let raises = log.iter().filter(|st| st.case == TpiCase::Incentive).count();
        prop_assert!(log.iter().all(|st| st.case == TpiCase::Pruned || st.sigma == 1));
        prop_assert_eq!(s.cost(), raises as u64);
    }

    #[test]
    fn tpi_handles_thresholds_above_degree(g in graph(15), t in proptest::collection::vec(1u32..20, 15)) {
        let t = ThresholdMap::new(t[..g.n()].to_vec()).unwrap();
        let s = tpi(&g, &t).unwrap();
        prop_assert!(is_target_vector(&g, &t, &s));
        let c = CostMap::uniform(g.n(), 1);
        prop_assert!(is_target_set(&g, &t, &wtss(&g, &t, &c).unwrap()));
    }

    #[test]
    fn heuristics_never_beat_the_optimum((g, t, c) in instance(8)) {
        let (opt, _) = brute_force_tpi(&g, &t).unwrap();
        prop_assert!(tpi(&g, &t).unwrap().cost() >= opt);
        let (opt_set, _) = brute_force_wtss(&g, &t, &c).unwrap();
        prop_assert!(wtss(&g, &t, &c).unwrap().cost(&c) >= opt_set);
        for h in Baseline::ALL {
            match min_budget(h, &g, &t, &c) {
                Ok(found) => {
                    let floor = if h.is_fractional() { opt } else { opt_set };
                    prop_assert!(found.beta >= floor, "{} {} < {}", h, found.beta, floor);
                    prop_assert!(found.solution.diffuse(&g, &t).is_complete());
                }
                Err(_) => prop_assert!(h == Baseline::DegreeFrac && g.vertices().any(|v| g.degree(v) == 0)),
            }
        }
    }

    #[test]
    fn tree_formula_matches_exhaustive_search(g in tree(10), u in proptest::collection::vec(0.0..1.0f64, 10)) {
        let t = ThresholdMap::new(g.vertices().map(|v| 1 + (u[v] * g.degree(v).max(1) as f64) as u32).collect()).unwrap();
        let formula = tree_optimal_cost(&g, &t).unwrap();
        prop_assert_eq!(formula, brute_force_tpi(&g, &t).unwrap().0);
        prop_assert_eq!(formula, tpi(&g, &t).unwrap().cost());
    }

    #[test]
    fn optimum_ignores_vertex_names((g, t, c) in instance(8), rot in 0usize..8) {
        let n = g.n();
        let p = |v: usize| (v + rot) % n;
        let edges: Vec<_> = g.edges().map(|(u, v)| (p(u), p(v))).collect();
        let h = Graph::new(n, &edges).unwrap();
        let mut tv = vec![0; n];
        let mut cv = vec![0; n];
        for v in 0..n {
            tv[p(v)] = t.get(v);
            cv[p(v)] = c.get(v);
        }
        let (th, ch) = (ThresholdMap::new(tv).unwrap(), CostMap::new(cv));
        prop_assert_eq!(brute_force_tpi(&g, &t).unwrap().0, brute_force_tpi(&h, &th).unwrap().0);
        prop_assert_eq!(brute_force_wtss(&g, &t, &c).unwrap().0, brute_force_wtss(&h, &th, &ch).unwrap().0);
    }
}
