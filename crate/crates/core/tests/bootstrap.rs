use pagraph_core::bootstrap::{bootstrap_edges, bootstrap_vertices, BootstrapOptions};
use pagraph_core::fitting::{select_range, DegreeRange, PairDomain, RangeSelectionOptions};
use pagraph_core::pa::{generate_bo, BoParams};
use pagraph_core::stats::{log_grid, multigraph_statistics, rho_surface};

fn opts(iterations: usize, seed: u64) -> BootstrapOptions {
    BootstrapOptions { iterations, seed, ..Default::default() }
}

#[test]
fn spread_shrinks_as_the_graph_grows() {
    let mut spreads = Vec::new();
    for n in [10_000u64, 100_000, 1_000_000] {
        let mut total = 0.0;
        for rep in 0..5 {
            let g = generate_bo(&BoParams::new(0.5, 3, n, 40 + rep).unwrap()).unwrap();
            let (h, _) = multigraph_statistics(&g);
            let grid = log_grid(1.01, h.max_degree()).unwrap();
            let range = DegreeRange::new(10, 60, &grid).unwrap();
            total += bootstrap_vertices(&h, &range, &opts(50, rep)).unwrap().sigma_s2;
        }
        spreads.push(total / 5.0);
    }
    assert!(spreads.windows(2).all(|w| w[1] < w[0]), "{spreads:?}");
}

#[test]
fn original_estimates_lie_inside_the_bootstrap_cloud() {
    let g = generate_bo(&BoParams::new(0.5, 3, 1_000_000, 41).unwrap()).unwrap();
    let (h, x) = multigraph_statistics(&g);
    drop(g);
    let grid = log_grid(1.01, h.max_degree()).unwrap();
    let surface = rho_surface(&h, &x, &grid);
    let choice = select_range(&surface, &RangeSelectionOptions::default()).unwrap();
    let domain = PairDomain::new(&choice.range, 10.0).unwrap();

    let v = bootstrap_vertices(&h, &choice.range, &opts(200, 1)).unwrap();
    let e = bootstrap_edges(&x, &surface, &domain, &opts(200, 2)).unwrap();
    for r in [&v, &e] {
        assert!(r.diverged < 10, "{} of 200 refits diverged", r.diverged);
        assert!((r.mean() - r.original).abs() < 3.0 * r.sigma_s(), "{} vs {} ± {}", r.original, r.mean(), r.sigma_s());
        // a gap of 0.3 between the two estimates is far outside the noise
        assert!(3.0 * r.sigma_s() < 0.3, "{}", r.sigma_s());
    }
    assert_eq!(v.original, choice.degree_fit.a);
    assert_eq!(e.original, choice.edge_fit.a);
}
