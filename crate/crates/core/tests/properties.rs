use std::sync::Arc;

use l3c::branch::{
    branch_b3, branch_b4, branch_b5, branch_on_vertex, fix_anchors, find_b1, find_b2, find_b3, find_b4,
};
use l3c::gen::{gen_diameter3, gen_lists, gen_planted_3col_diam3, ListProfile};
use l3c::io::{parse_instance, write_instance};
use l3c::lab::{classify_deducing, verify_outcome2, verify_outcome3, MagicContext};
use l3c::oracle::{brute_force, check_branchset, is_feasible};
use l3c::reduce::{
    choose_forcing_colour, forcing_target, reduce_fixpoint, rule_r1, rule_r2, rule_r3_fixpoint, rule_r3_random_order,
    rule_r4, Decision, ReduceKind, RuleId,
};
use l3c::twosat::solve_two_list;
use l3c::{solve, Answer, BranchConfig, Colour, ColourSet, Coloring, DiameterPolicy, Graph, Instance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn set(bits: u8) -> ColourSet {
    ColourSet::from_colours(Colour::ALL.into_iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, c)| c))
}

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

/// Lists drawn from `min_bits..8` as bitmasks.
fn instance_strategy(max_n: usize, min_bits: u8, max_len: usize) -> impl Strategy<Value = Instance> {
    graph_strategy(max_n).prop_flat_map(move |g| {
        let n = g.vertex_count();
        proptest::collection::vec(min_bits..8u8, n).prop_map(move |bits| {
            let lists = bits
                .into_iter()
                .map(|b| {
                    let mut l = set(b);
                    while l.len() > max_len {
                        l = l.without(l.iter().last().unwrap());
                    }
                    l
                })
                .collect();
            Instance::new(g.clone(), lists).unwrap()
        })
    })
}

fn diameter3_instance() -> impl Strategy<Value = Instance> {
    (4usize..=11, any::<u64>(), 0usize..4, any::<bool>()).prop_map(|(n, seed, profile, planted)| {
        let g = if planted { gen_planted_3col_diam3(n, seed).unwrap().graph } else { gen_diameter3(n, seed).unwrap() };
        let p = [
            ListProfile::FULL,
            ListProfile::new(0.0, 0.3, 0.7).unwrap(),
            ListProfile::new(0.1, 0.3, 0.6).unwrap(),
            ListProfile::new(0.0, 0.6, 0.4).unwrap(),
        ][profile];
        gen_lists(&g, p, seed ^ 0x5555).unwrap()
    })
}

fn any_colouring(n: usize) -> impl Strategy<Value = Coloring> {
    proptest::collection::vec(0usize..3, n).prop_map(|v| Coloring(v.into_iter().map(|i| Colour::ALL[i]).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    #[test]
    fn neighbourhood_layers_partition(g in graph_strategy(10), k in 1u32..4) {
        for v in g.vertices() {
            let mut union = Vec::new();
            for i in 1..=k {
                let layer = g.neighbourhood_exact(v, i).unwrap();
                prop_assert!(layer.iter().all(|x| !union.contains(x)));
                union.extend(layer);
            }
            union.sort_unstable();
            prop_assert_eq!(union, g.neighbourhood_within(v, k, false).unwrap());
        }
    }

    #[test]
    fn diameter_three_iff_closed_ball_covers(g in graph_strategy(9)) {
        let all: Vec<_> = g.vertices().collect();
        let covers = g.vertices().all(|v| g.neighbourhood_within(v, 3, true).unwrap() == all);
        prop_assert_eq!(g.diameter().unwrap().at_most(3), covers);
    }

    #[test]
    fn merge_lifts_colourings(g in graph_strategy(7), u in 0usize..7, v in 0usize..7) {
        let n = g.vertex_count();
        let (u, v) = (u % n, v % n);
        prop_assume!(u != v && !g.adjacent(u, v));
        let (merged, x, mapping) = g.merge_vertices(u, v).unwrap();
        let m = merged.vertex_count();
        // every proper colouring of the merged graph
        let mut idx = vec![0usize; m];
        loop {
            let c = Coloring(idx.iter().map(|&i| Colour::ALL[i]).collect());
            if Instance::full(merged.clone()).verify_coloring(&c) {
                let lifted = c.lift(&mapping);
                prop_assert!(Instance::full(g.clone()).verify_coloring(&lifted));
                prop_assert_eq!(lifted.colour(u), lifted.colour(v));
                prop_assert_eq!(lifted.colour(u), c.colour(x));
            }
            let mut i = 0;
            while i < m && idx[i] == 2 {
                idx[i] = 0;
                i += 1;
            }
            if i == m {
                break;
            }
            idx[i] += 1;
        }
    }

    #[test]
    fn potential_never_increases(inst in instance_strategy(9, 1, 3), v in 0usize..9, c in 0usize..3) {
        let v = v % inst.vertex_count();
        let c = Colour::ALL[c];
        let r3 = rule_r3_fixpoint(&inst);
        prop_assert!(r3.potential() <= inst.potential());
        if inst.list(v).contains(c) {
            let after = inst.assign_colour(v, c).unwrap();
            prop_assert!(after.potential() <= inst.potential());
            if inst.list(v).len() >= 2 {
                prop_assert!(after.potential() < inst.potential());
            }
        }
    }

    #[test]
    fn colourings_survive_larger_lists(inst in instance_strategy(8, 1, 3), c in any_colouring(8)) {
        let c = Coloring(c.0[..inst.vertex_count()].to_vec());
        if inst.verify_coloring(&c) {
            prop_assert!(Instance::full(inst.shared_graph().clone()).verify_coloring(&c));
        }
    }

    #[test]
    fn two_sat_agrees_with_oracle(inst in instance_strategy(12, 0, 2)) {
        let oracle = brute_force(&inst, None).unwrap();
        let two = solve_two_list(&inst).unwrap();
        prop_assert_eq!(oracle.feasible, two.is_some());
        if let Some(c) = two {
            prop_assert!(inst.verify_coloring(&c));
        }
    }

    #[test]
    fn oracle_ignores_vertex_order(inst in instance_strategy(9, 1, 3), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let n = inst.vertex_count();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let g = Graph::from_edges(n, inst.graph().edges().map(|(u, v)| (perm[u], perm[v]))).unwrap();
        let mut lists = vec![ColourSet::EMPTY; n];
        for v in 0..n {
            lists[perm[v]] = inst.list(v);
        }
        let permuted = Instance::new(g, lists).unwrap();
        prop_assert_eq!(is_feasible(&inst).unwrap(), is_feasible(&permuted).unwrap());
    }

    #[test]
    fn reduction_rules_preserve_feasibility(inst in instance_strategy(10, 0, 3)) {
        let feasible = is_feasible(&inst).unwrap();
        if rule_r1(&inst).is_some() {
            prop_assert!(!feasible);
        }
        prop_assert_eq!(is_feasible(&rule_r3_fixpoint(&inst)).unwrap(), feasible);
        for d in [rule_r2(&inst), rule_r4(&inst, 12)] {
            match d {
                Decision::Yes(c) => prop_assert!(inst.verify_coloring(&c)),
                Decision::No => prop_assert!(!feasible),
                Decision::NotApplicable => {}
            }
        }
        let out = reduce_fixpoint(&inst, 4);
        match &out.kind {
            ReduceKind::SolvedYes(c) => prop_assert!(inst.verify_coloring(c)),
            ReduceKind::SolvedNo => prop_assert!(!feasible),
            ReduceKind::Reduced(r) => {
                prop_assert_eq!(is_feasible(r).unwrap(), feasible);
                prop_assert!(r.potential() <= inst.potential());
            }
        }
    }

    #[test]
    fn r3_is_confluent(inst in instance_strategy(10, 0, 3), seed in any::<u64>()) {
        let fixed = rule_r3_fixpoint(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..4 {
            let other = rule_r3_random_order(&inst, &mut rng);
            prop_assert_eq!(other.lists(), fixed.lists());
        }
    }

    #[test]
    fn forcing_colour_meets_third(inst in instance_strategy(11, 3, 3)) {
        for u in inst.level(l3c::Level::L3) {
            let target = forcing_target(&inst, u).len();
            let (_, drop) = choose_forcing_colour(&inst, u).unwrap();
            prop_assert!(3 * drop >= target, "u={} drop={} target={}", u, drop, target);
        }
    }

    #[test]
    fn file_format_round_trips(inst in instance_strategy(9, 1, 3)) {
        let text = write_instance(&inst).unwrap();
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(write_instance(&back).unwrap(), text);
    }

    #[test]
    fn solver_agrees_with_oracle(inst in diameter3_instance(), scaled in any::<bool>()) {
        let cfg = if scaled {
            BranchConfig { threshold_scale: 10.0, r4_cutoff: 3, ..Default::default() }
        } else {
            BranchConfig::default()
        };
        let (answer, stats) = solve(&inst, &cfg).unwrap();
        let oracle = brute_force(&inst, None).unwrap();
        prop_assert_eq!(answer.is_yes(), oracle.feasible);
        if let Answer::Yes(c) = &answer {
            prop_assert!(inst.verify_coloring(c));
        }
        prop_assert_eq!(stats.invariant_violations, 0, "{:?}", stats.violations);
    }

    #[test]
    fn fallback_policy_agrees_with_oracle(inst in instance_strategy(9, 1, 3)) {
        let cfg = BranchConfig { diameter_policy: DiameterPolicy::Fallback, r4_cutoff: 3, ..Default::default() };
        let (answer, _) = solve(&inst, &cfg).unwrap();
        prop_assert_eq!(answer.is_yes(), is_feasible(&inst).unwrap());
    }

    #[test]
    fn branch_sets_are_sound(inst in diameter3_instance(), scale in prop_oneof![Just(0.3), Just(0.6), Just(1.0)]) {
        let cfg = BranchConfig { threshold_scale: scale, ..Default::default() };
        let red = match reduce_fixpoint(&inst, 2).kind {
            ReduceKind::Reduced(r) => r,
            _ => return Ok(()),
        };
        if let Some(v) = find_b1(&red, &cfg) {
            prop_assert!(check_branchset(&red, &branch_on_vertex(&red, v, RuleId::B1).unwrap()).unwrap());
        }
        if let Some(v) = find_b2(&red, &cfg) {
            prop_assert!(check_branchset(&red, &branch_on_vertex(&red, v, RuleId::B2).unwrap()).unwrap());
        }
        if let Some((v, c)) = find_b3(&red, &cfg) {
            prop_assert!(check_branchset(&red, &branch_b3(&red, v, c).unwrap()).unwrap());
        }
        if let Some((u, v)) = find_b4(&red, &cfg) {
            prop_assert!(check_branchset(&red, &branch_b4(&red, u, v).unwrap()).unwrap());
        }
        if red.graph().diameter().unwrap().at_most(3) && red.mu() > 0 {
            let anchors = fix_anchors(&red).unwrap();
            let out = branch_b5(&red, &cfg, &anchors).unwrap();
            if out.certified {
                prop_assert!(check_branchset(&red, &out.branch).unwrap());
            }
        }
    }

    #[test]
    fn lab_predicates_are_structural(g in graph_strategy(10), phi_seed in any::<u64>()) {
        let ctx = MagicContext::with_oracle_colouring(g, 0.02).unwrap();
        prop_assume!(ctx.phi.is_some());
        let h = ctx.graph().clone();
        for v in h.vertices() {
            let rep = classify_deducing(&ctx, v).unwrap();
            let total: usize = rep.buckets.values().map(Vec::len).sum();
            prop_assert_eq!(total, h.neighbourhood_exact(v, 2).unwrap().len());
            for (&a, b) in &rep.buckets {
                prop_assert!(b.iter().all(|&x| h.adjacent(a, x)));
            }
            for a in &rep.fruitful {
                prop_assert!(ctx.anchors.in_third_layer(*a));
            }
            prop_assert_eq!(verify_outcome3(&ctx, v).unwrap(), verify_outcome3(&ctx, v).unwrap());
        }
        let t = [(phi_seed % h.vertex_count() as u64) as usize];
        prop_assert!(!verify_outcome2(&ctx, &t, &t).unwrap());
    }

    #[test]
    fn generators_are_pure(n in 4usize..30, seed in any::<u64>()) {
        let a = gen_diameter3(n, seed).unwrap();
        prop_assert_eq!(&a, &gen_diameter3(n, seed).unwrap());
        prop_assert_eq!(a.diameter().unwrap(), l3c::Diameter::Finite(3));
        let p = gen_planted_3col_diam3(n, seed).unwrap();
        prop_assert_eq!(&p, &gen_planted_3col_diam3(n, seed).unwrap());
        prop_assert!(p.graph.diameter().unwrap().at_most(3));
        prop_assert!(Instance::full(Arc::new(p.graph.clone())).verify_coloring(&p.colouring));
    }
}
