use rand::Rng;

use pagraph_core::baseline::{
    generate_configuration, generate_holme_kim, sample_power_law_degrees, GdsParams, HkParams,
};
use pagraph_core::fitting::loglog_regression;
use pagraph_core::pa::{generate_bo_chain, map_bo_samples, AttachmentState, BoParams};
use pagraph_core::rng;
use pagraph_core::stats::{log_grid, multigraph_statistics, DegreeHistogram};
use pagraph_core::theory::{expected_degree_count, expected_edge_count, TheoryParams};

#[test]
fn second_step_joins_the_first_vertex_two_thirds_of_the_time() {
    let trials = 1_000_000u64;
    let hits = (0..trials).filter(|&s| generate_bo_chain(1.0, 2, s).unwrap().edges()[1] == (1, 0)).count();
    let freq = hits as f64 / trials as f64;
    assert!((freq - 2.0 / 3.0).abs() < 0.002, "{freq}");
}

#[test]
fn urn_mixture_reproduces_the_attachment_law() {
    let trials = 1_000_000;
    let mut rng = rng::from_seed(21);
    for &a in &[0.3, 1.0, 2.5] {
        let mut state = AttachmentState::new();
        for _ in 0..4 {
            state.step(a, &mut rng);
            let law = state.attachment_distribution(a).unwrap();
            let mut counts = vec![0u64; law.len()];
            for _ in 0..trials {
                let mut s = state.clone();
                counts[s.step(a, &mut rng) as usize] += 1;
            }
            for (p, c) in law.iter().zip(&counts) {
                let f = *c as f64 / trials as f64;
                assert!((f - p).abs() < 0.002, "a={a}, t={}: {f} vs {p}", state.t());
            }
        }
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

#[test]
fn degree_counts_match_the_expectation() {
    let n = 10_000;
    for (a, m) in [(1.0, 1u32), (0.5, 2), (0.276, 3)] {
        let p = BoParams::new(a, m, n, 31).unwrap();
        let hist = map_bo_samples(&p, 100, |g| DegreeHistogram::from_degrees(&g.degrees())).unwrap();
        let theory = TheoryParams::new(a, m, n as f64).unwrap();
        for d in m as u64..=20 {
            let xs: Vec<f64> = hist.iter().map(|h| h.count(d) as f64).collect();
            let (mean, se) = mean_and_se(&xs);
            let want = expected_degree_count(&theory, d).unwrap();
            assert!((mean - want).abs() < 3.0 * se, "a={a}, m={m}, d={d}: {mean} ± {se} vs {want}");
        }
    }
}

#[test]
fn edge_counts_match_the_expectation_in_coarse_bins() {
    let (a, m, n) = (0.5, 2u32, 100_000u64);
    let p = BoParams::new(a, m, n, 32).unwrap();
    let bins = [((60u64, 120u64), (2u64, 6u64)), ((100, 300), (4, 10)), ((200, 600), (2, 20))];
    let sums = map_bo_samples(&p, 20, |g| {
        let (_, x) = multigraph_statistics(&g);
        bins.map(|((l1, h1), (l2, h2))| {
            x.cells()
                .iter()
                .filter(|&&((d1, d2), _)| (l1..=h1).contains(&d1) && (l2..=h2).contains(&d2))
                .map(|&(_, c)| c as f64)
                .sum::<f64>()
        })
    })
    .unwrap();
    let theory = TheoryParams::new(a, m, n as f64).unwrap();
    for (i, &((l1, h1), (l2, h2))) in bins.iter().enumerate() {
        let observed = sums.iter().map(|s| s[i]).sum::<f64>() / sums.len() as f64;
        let mut expected = 0.0;
        for d1 in l1..=h1 {
            for d2 in l2..=h2 {
                expected += expected_edge_count(&theory, d1, d2).unwrap();
            }
        }
        let ratio = observed / expected;
        assert!((0.5..=2.0).contains(&ratio), "bin {i}: {observed} vs {expected}");
    }
}

/// `(D, #{d > D})` on a log grid over `[lo, hi]`.
fn tail_points(degrees: &[u64], lo: u64, hi: u64) -> Vec<(f64, f64)> {
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let grid = log_grid(1.1, hi).unwrap();
    grid.points()
        .iter()
        .filter(|&&d| d >= lo)
        .map(|&d| (d as f64, (sorted.len() - sorted.partition_point(|&x| x <= d)) as f64))
        .collect()
}

#[test]
fn power_law_sequence_has_the_requested_tail() {
    let p = GdsParams { n: 1_000_000, gamma: 2.276, target_edges: None, seed: 33 };
    let s = sample_power_law_degrees(&p).unwrap();
    let (slope, _) = loglog_regression(&tail_points(&s.degrees, 5, 1000)).unwrap();
    assert!((slope + 1.276).abs() < 0.05, "{slope}");
}

#[test]
fn four_stubs_give_each_matching_a_third_of_the_time() {
    let trials = 1_000_000u64;
    let mut counts = [0u64; 3];
    for seed in 0..trials {
        let g = generate_configuration(&[1, 1, 1, 1], seed).unwrap();
        let partner = g.edges().iter().find_map(|&(u, v)| match (u, v) {
            (0, w) | (w, 0) => Some(w),
            _ => None,
        });
        counts[partner.unwrap() as usize - 1] += 1;
    }
    for c in counts {
        assert!((c as f64 / trials as f64 - 1.0 / 3.0).abs() < 0.01, "{counts:?}");
    }
}

/// Plain Barabási–Albert growth from `K_{m+1}`: `m` distinct targets drawn
/// with probability proportional to degree.
fn barabasi_albert(n: usize, m: usize, seed: u64) -> Vec<u64> {
    let mut rng = rng::from_seed(seed);
    let mut deg = vec![0u64; n];
    let mut weighted: Vec<usize> = Vec::with_capacity(2 * m * n);
    for u in 0..=m {
        for v in u + 1..=m {
            weighted.extend([u, v]);
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    for v in m + 1..n {
        let mut targets = Vec::with_capacity(m);
        while targets.len() < m {
            let t = weighted[rng.random_range(0..weighted.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            weighted.extend([v, t]);
            deg[v] += 1;
            deg[t] += 1;
        }
    }
    deg
}

#[test]
fn holme_kim_without_triads_is_barabasi_albert() {
    let (n, m, samples) = (100_000usize, 3usize, 10u64);
    let thresholds = [5u64, 10, 30, 100];
    let tails = |deg: &[u64]| thresholds.map(|t| deg.iter().filter(|&&d| d > t).count() as f64);
    let hk: Vec<[f64; 4]> = (0..samples)
        .map(|s| {
            let g = generate_holme_kim(&HkParams { n: n as u64, m: m as u32, p_t: 0.0, seed: 100 + s }).unwrap();
            tails(&g.degrees())
        })
        .collect();
    let ba: Vec<[f64; 4]> = (0..samples).map(|s| tails(&barabasi_albert(n, m, 200 + s))).collect();
    for i in 0..thresholds.len() {
        let (m1, s1) = mean_and_se(&hk.iter().map(|t| t[i]).collect::<Vec<_>>());
        let (m2, s2) = mean_and_se(&ba.iter().map(|t| t[i]).collect::<Vec<_>>());
        let z = (m1 - m2) / (s1 * s1 + s2 * s2).sqrt();
        assert!(z.abs() < 4.0, "#{{d > {}}}: HK {m1} ± {s1}, BA {m2} ± {s2}", thresholds[i]);
    }
}

#[test]
fn holme_kim_degrees_follow_an_inverse_cube() {
    let g = generate_holme_kim(&HkParams { n: 1_000_000, m: 3, p_t: 0.5, seed: 34 }).unwrap();
    let (slope, _) = loglog_regression(&tail_points(&g.degrees(), 20, 1000)).unwrap();
    // the tail count falls one power slower than the density
    let exponent = slope - 1.0;
    assert!((-3.3..=-2.7).contains(&exponent), "{exponent}");
}
