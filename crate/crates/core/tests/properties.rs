mod common;

use std::collections::HashSet;

use proptest::prelude::*;

use lambda3::community::{louvain, modularity};
use lambda3::experiments::node_correlations;
use lambda3::generator::{edge_bounds, generate, Generator, GeneratorConfig, RoleDraw};
use lambda3::graph::{read_edge_list, read_log, write_edge_list, write_log, Interaction};
use lambda3::ingest::{build_coauthorship_network, classify_stream, coauthor_histogram, PublicationRecord};
use lambda3::metrics::{degree_assortativity, MetricsReport};
use lambda3::rng::RngState;
use lambda3::stats::pearson;
use lambda3::TemporalGraph;

use common::*;

fn small_config() -> impl Strategy<Value = GeneratorConfig> {
    (0.0..3.0f64, 0.05..3.0f64, 0.0..3.0f64, 1usize..400, any::<u64>()).prop_map(|(l1, l2, l3, extra, seed)| {
        let s0 = GeneratorConfig::new(1, (l1, l2, l3), seed).genesis_size();
        GeneratorConfig::new(s0 + extra, (l1, l2, l3), seed)
    })
}

fn edges_strategy(max_n: usize) -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(u32, u32)> =
            (0..n as u32).flat_map(|u| (u + 1..n as u32).map(move |v| (u, v))).collect();
        let len = pairs.len();
        (Just(n), proptest::sample::subsequence(pairs, 1..=len))
    })
}

fn permute(edges: &[(u32, u32)], perm: &[u32]) -> Vec<(u32, u32)> {
    edges.iter().map(|&(u, v)| (perm[u as usize], perm[v as usize])).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn equal_seeds_give_equal_streams(seed in any::<u64>()) {
        let mut a = RngState::new(seed);
        let mut b = RngState::new(seed);
        for i in 0..10_000u32 {
            match i % 5 {
                0 => prop_assert_eq!(a.next_u64(), b.next_u64()),
                1 => prop_assert_eq!(a.uniform().to_bits(), b.uniform().to_bits()),
                2 => prop_assert_eq!(a.below(17), b.below(17)),
                3 => prop_assert_eq!(a.poisson(1.6).unwrap(), b.poisson(1.6).unwrap()),
                _ => prop_assert_eq!(a.sample_indices(9, 3), b.sample_indices(9, 3)),
            }
        }
    }

    #[test]
    fn generated_graph_invariants(cfg in small_config()) {
        let out = generate(cfg).unwrap();
        let g = &out.graph;
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
        prop_assert_eq!(g.component_count(), 1);
        prop_assert!(g.node_count() >= cfg.n_target);
        if let Some(last) = out.growth().last() {
            prop_assert!(g.node_count() - last.newbies.len() < cfg.n_target);
        }
        let report = MetricsReport::compute(g, None);
        let two_m = 2.0 * report.m as f64;
        prop_assert!((report.mean_degree * report.n as f64 - two_m).abs() <= 1e-12 * two_m);

        let again = generate(cfg).unwrap();
        prop_assert_eq!(&again.graph, g);
        prop_assert_eq!(&again.log, &out.log);

        prop_assert_eq!(&TemporalGraph::replay(&out.log).unwrap(), g);
        let mut buf = Vec::new();
        write_log(&out.log, &mut buf).unwrap();
        let log: Vec<Interaction> = read_log(buf.as_slice()).unwrap();
        prop_assert_eq!(&log, &out.log);

        let mut buf = Vec::new();
        write_edge_list(g, &mut buf).unwrap();
        let back = read_edge_list(buf.as_slice()).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn growth_only_adds(cfg in small_config()) {
        let mut gen = Generator::new(cfg).unwrap();
        let mut prev = gen.graph().clone();
        while !gen.is_done() {
            let it = gen.step().unwrap().clone();
            let g = gen.graph();
            let r = RoleDraw::of(&it);
            prop_assert!(r.b <= prev.degree(it.proactive).unwrap());
            let (lo, hi) = edge_bounds(r.b, r.n, r.e);
            let added = g.edge_count() - prev.edge_count();
            prop_assert!(lo <= added && added <= hi, "{added} not in [{lo}, {hi}]");
            prop_assert_eq!(g.total_weight() - prev.total_weight(), (it.size() * (it.size() - 1) / 2) as u64);
            for (u, v, w) in prev.edges() {
                prop_assert!(g.edge_weight(u, v).unwrap() >= w);
            }
            prev = g.clone();
        }
    }

    #[test]
    fn bounds_are_attained((b, n, e) in (0usize..6, 0usize..6, 0usize..6)) {
        // Star around 0 with b leaves plus e isolated nodes: every optional pair is new.
        let sparse_nodes = 1 + b + e;
        let star: Vec<(u32, u32, u32)> = (1..=b as u32).map(|v| (0, v, 1)).collect();
        let it = Interaction {
            t: 1,
            proactive: 0,
            neighbors: (1..=b as u32).collect(),
            newbies: (sparse_nodes as u32..(sparse_nodes + n) as u32).collect(),
            new_connections: ((1 + b) as u32..sparse_nodes as u32).collect(),
        };
        let mut g = TemporalGraph::from_weighted_edges(star.iter().copied(), sparse_nodes).unwrap();
        prop_assert_eq!(g.apply_interaction(&it).unwrap().new_edges, edge_bounds(b, n, e).1);

        // Same roles, but neighbours and new connections already form a clique.
        let mut dense = star;
        for u in 1..sparse_nodes as u32 {
            for v in u + 1..sparse_nodes as u32 {
                dense.push((u, v, 1));
            }
        }
        let mut g = TemporalGraph::from_weighted_edges(dense, sparse_nodes).unwrap();
        prop_assert_eq!(g.apply_interaction(&it).unwrap().new_edges, edge_bounds(b, n, e).0);
    }

    #[test]
    fn assortativity_ignores_labels((n, edges) in edges_strategy(12), seed in any::<u64>()) {
        let mut perm: Vec<u32> = (0..n as u32).collect();
        RngState::new(seed).shuffle(&mut perm);
        let a = degree_assortativity(&graph_of(n, &edges)).unwrap();
        let b = degree_assortativity(&graph_of(n, &permute(&edges, &perm))).unwrap();
        match (a, b) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-12),
            (x, y) => prop_assert_eq!(x, y),
        }
    }

    #[test]
    fn louvain_partition_is_valid_and_reproducible((n, edges) in edges_strategy(30), seed in any::<u64>()) {
        let g = graph_of(n, &edges);
        let p = louvain(&g, seed);
        prop_assert_eq!(p.assignment().len(), n);
        let labels: HashSet<u32> = p.assignment().iter().copied().collect();
        prop_assert_eq!(labels, (0..p.community_count() as u32).collect::<HashSet<_>>());
        prop_assert_eq!(&louvain(&g, seed), &p);
        let singletons = lambda3::Partition::singletons(n);
        prop_assert!(modularity(&g, &p).unwrap() >= modularity(&g, &singletons).unwrap() - 1e-12);
        let q = modularity(&g, &p).unwrap();
        prop_assert!((-0.5..1.0).contains(&q));
    }

    #[test]
    fn correlations_ignore_id_shift(values in proptest::collection::vec((0u32..50, 0u32..50), 3..60), shift in -1e6..1e6f64) {
        let ids: Vec<f64> = (0..values.len()).map(|v| v as f64).collect();
        let shifted: Vec<f64> = ids.iter().map(|v| v + shift).collect();
        let k: Vec<f64> = values.iter().map(|p| p.0 as f64).collect();
        match (pearson(&ids, &k), pearson(&shifted, &k)) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-6),
            (a, b) => prop_assert_eq!(a, b),
        }
    }
}

fn stream_strategy() -> impl Strategy<Value = Vec<PublicationRecord>> {
    let record = (0u8..12, proptest::sample::subsequence((0..10).collect::<Vec<u32>>(), 1..5), any::<u64>());
    proptest::collection::vec(record, 1..40).prop_map(|mut recs| {
        recs.sort_by_key(|r| r.0);
        recs.into_iter()
            .map(|(month, authors, salt)| {
                let mut names: Vec<String> = authors.iter().map(|a| format!("au{a}")).collect();
                RngState::new(salt).shuffle(&mut names);
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                PublicationRecord::new(2000, Some(month + 1), &refs)
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn classification_partitions_coauthors(stream in stream_strategy()) {
        let c = classify_stream(&stream).unwrap();
        prop_assert_eq!(c.publications.len() + c.dropped, stream.len());

        let mut seen_before: HashSet<&str> = HashSet::new();
        let mut month_authors: HashSet<&str> = HashSet::new();
        let mut current = None;
        let mut retained = c.publications.iter().peekable();
        for (i, r) in stream.iter().enumerate() {
            if current != r.month {
                seen_before.extend(month_authors.drain());
                current = r.month;
            }
            let existing: Vec<&str> = r.authors.iter().map(String::as_str).filter(|a| seen_before.contains(a)).collect();
            match retained.peek() {
                Some(p) if p.index == i => {
                    prop_assert_eq!(p.main_author.as_str(), existing[0]);
                    let mut groups: Vec<&str> = p
                        .prior_coauthors
                        .iter()
                        .chain(&p.existing_non_coauthors)
                        .chain(&p.new_authors)
                        .map(String::as_str)
                        .collect();
                    groups.sort_unstable();
                    let mut others: Vec<&str> =
                        r.authors.iter().map(String::as_str).filter(|a| *a != p.main_author).collect();
                    others.sort_unstable();
                    prop_assert_eq!(groups, others);
                    for a in &p.new_authors {
                        prop_assert!(!seen_before.contains(a.as_str()));
                    }
                    for a in p.prior_coauthors.iter().chain(&p.existing_non_coauthors) {
                        prop_assert!(seen_before.contains(a.as_str()));
                    }
                    retained.next();
                }
                _ => prop_assert!(existing.is_empty()),
            }
            month_authors.extend(r.authors.iter().map(String::as_str));
        }

        if let Ok(h) = coauthor_histogram(&c.publications) {
            let total: u64 = h.counts.values().sum();
            let weighted: u64 = h.counts.iter().map(|(&k, &v)| k as u64 * v).sum();
            prop_assert_eq!(total as usize, c.publications.len());
            prop_assert_eq!(h.lambda_hat, weighted as f64 / total as f64);
        }

        let (g, names) = build_coauthorship_network(&stream);
        let pairs: u64 = stream.iter().map(|r| (r.authors.len() * (r.authors.len() - 1) / 2) as u64).sum();
        prop_assert_eq!(g.total_weight(), pairs);
        prop_assert_eq!(g.node_count(), names.len());
    }
}

#[test]
fn louvain_is_stable_under_relabeling() {
    for (preset, n) in [
        (lambda3::experiments::SETTING_1, 3000),
        (lambda3::experiments::SETTING_2, 3000),
        (lambda3::experiments::SETTING_3, 3000),
    ] {
        let g = generate(preset.config(n, 3)).unwrap().graph;
        let edges: Vec<(u32, u32)> = g.edges().into_iter().map(|(u, v, _)| (u, v)).collect();
        let q = modularity(&g, &louvain(&g, 3)).unwrap();
        assert!(q > 0.0);
        for s in 0..3u64 {
            let mut perm: Vec<u32> = (0..g.node_count() as u32).collect();
            RngState::new(1000 + s).shuffle(&mut perm);
            let h = graph_of(g.node_count(), &permute(&edges, &perm));
            let qp = modularity(&h, &louvain(&h, 100 + s)).unwrap();
            assert!((q - qp).abs() < 0.02, "{}: {q} vs {qp}", preset.name);
        }
    }
}

#[test]
fn node_correlation_signs_and_id_shift() {
    let g = generate(lambda3::experiments::SETTING_1.config(2000, 5)).unwrap().graph;
    let (id_k, id_i, k_i) = node_correlations(&g);
    assert!(id_k.unwrap() < 0.0 && id_i.unwrap() < 0.0 && k_i.unwrap() > 0.0);
    let ids: Vec<f64> = (0..g.node_count()).map(|v| v as f64 + 1e4).collect();
    let k: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
    assert!((pearson(&ids, &k).unwrap() - id_k.unwrap()).abs() < 1e-9);
}
