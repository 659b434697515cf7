use std::f64::consts::PI;

use cohgrav_core::curvature::{
    greens_oracle, metric_from_source, ricci_field, ricci_scalar, sample_field, solve_static_poisson, source_fields,
    Field3D, Grid,
};
use cohgrav_core::quadrature::QuadratureSpec;
use cohgrav_core::stress_energy::{assemble_source, point_terms, PointTerms, StateWeights};
use cohgrav_core::wavepacket::{Profile, SitePair};
use cohgrav_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn state(alpha: f64, beta: f64) -> StateWeights {
    StateWeights::new(alpha, Complex64::new(beta, 0.0)).unwrap()
}

fn sparse_source(grid: Grid, seed: u64, count: usize) -> Field3D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = vec![0.0; grid.len()];
    for _ in 0..count {
        let p = rng.random_range(0..grid.len());
        data[p] = rng.random_range(-1.0..1.0);
    }
    Field3D::new(grid, data, "sparse").unwrap()
}

fn rel_max_diff(a: &Field3D, b: &Field3D) -> f64 {
    let d = a.data().iter().zip(b.data()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    d / b.max_abs()
}

#[test]
fn spectral_solve_matches_direct_sum_on_sparse_sources() {
    let grid = Grid::cube(-4.0, 4.0, 16).unwrap();
    for seed in 0..3 {
        let s = sparse_source(grid, seed, 40);
        let fft = solve_static_poisson(&s).unwrap().field;
        let direct = greens_oracle(&s).unwrap();
        let r = rel_max_diff(&fft, &direct);
        assert!(r <= 1e-6, "seed {seed}: {r:e}");
    }
}

#[test]
fn oracle_is_linear() {
    let grid = Grid::cube(-1.0, 1.0, 12).unwrap();
    let a = sparse_source(grid, 1, 10);
    let b = sparse_source(grid, 2, 10);
    let sum: Vec<f64> = a.data().iter().zip(b.data()).map(|(x, y)| x + y).collect();
    let ab = greens_oracle(&Field3D::new(grid, sum, "a+b").unwrap()).unwrap();
    let (oa, ob) = (greens_oracle(&a).unwrap(), greens_oracle(&b).unwrap());
    for i in 0..grid.len() {
        assert!((ab.data()[i] - oa.data()[i] - ob.data()[i]).abs() <= 1e-12 * ab.max_abs());
    }
}

#[test]
fn point_source_gives_the_coulomb_potential() {
    // unit charge in one cell: density 1 / h^3
    let n = 32;
    let grid = Grid::cube(-1.0, 1.0, n).unwrap();
    let h = grid.cubic_spacing().unwrap();
    let c = 10;
    let mut data = vec![0.0; grid.len()];
    data[grid.index(c, c, c)] = 1.0 / (h * h * h);
    let phi = solve_static_poisson(&Field3D::new(grid, data, "point").unwrap()).unwrap().field;
    let centre = grid.point(grid.index(c, c, c));
    let mut worst = 0.0f64;
    for p in 0..grid.len() {
        let x = grid.point(p);
        let r = ((x[0] - centre[0]).powi(2) + (x[1] - centre[1]).powi(2) + (x[2] - centre[2]).powi(2)).sqrt();
        if r > 4.0 * h {
            let exact = 1.0 / (4.0 * PI * r);
            worst = worst.max((phi.data()[p] - exact).abs() / exact);
        }
    }
    assert!(worst <= 0.02, "{worst}");
}

/// Fourth-order 13-point Laplacian.
fn laplacian4(f: &Field3D, i: usize, j: usize, k: usize, h: f64) -> f64 {
    let mut acc = 0.0;
    for axis in 0..3 {
        let at = |d: isize| {
            let mut ijk = [i as isize, j as isize, k as isize];
            ijk[axis] += d;
            f.get(ijk[0] as usize, ijk[1] as usize, ijk[2] as usize)
        };
        acc += (-at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1) - at(-2)) / 12.0;
    }
    acc / (h * h)
}

#[test]
fn poisson_residual_is_small_in_the_interior() {
    // the piecewise-constant source costs about (h^2 / 24) lap(s), so the
    // source must be resolved with h well below its width
    let n = 128;
    let grid = Grid::cube(-4.5, 4.5, n).unwrap();
    let h = grid.cubic_spacing().unwrap();
    let s = sample_field(
        |x| {
            let r2 = x[0] * x[0] + x[1] * x[1] + (x[2] - 0.3).powi(2);
            (-r2 / 2.0).exp() * (1.0 + 0.3 * x[0])
        },
        &grid,
        "smooth",
    )
    .unwrap();
    let sol = solve_static_poisson(&s).unwrap();
    assert!(!sol.non_decaying);
    // lap(16 pi phi) = -16 pi s
    let hbar: Vec<f64> = sol.field.data().iter().map(|v| 16.0 * PI * v).collect();
    let hbar = Field3D::new(grid, hbar, "hbar").unwrap();
    let scale = 16.0 * PI * s.max_abs();
    let mut worst = 0.0f64;
    for i in 2..n - 2 {
        for j in 2..n - 2 {
            for k in 2..n - 2 {
                let res = laplacian4(&hbar, i, j, k, h) + 16.0 * PI * s.get(i, j, k);
                worst = worst.max(res.abs() / scale);
            }
        }
    }
    assert!(worst <= 1e-3, "{worst:e}");
}

#[test]
fn solver_flags_sources_that_do_not_decay() {
    let grid = Grid::cube(-1.0, 1.0, 8).unwrap();
    let s = sample_field(|x| 1.0 + x[0], &grid, "ramp").unwrap();
    assert!(solve_static_poisson(&s).unwrap().non_decaying);
}

fn grid_terms(pair: &SitePair, grid: &Grid) -> Vec<PointTerms> {
    let spec = QuadratureSpec::default();
    grid.points().map(|x| point_terms(pair, x, 0.0, &spec).unwrap()).collect()
}

#[test]
fn ricci_is_eight_pi_times_the_trace() {
    let pair = SitePair::new(Profile::boxed(0.0).unwrap(), PI, 100.0).unwrap();
    let grid = Grid::cube(-5.0, 5.0, 8).unwrap();
    let terms = grid_terms(&pair, &grid);
    let st = state(0.5, 0.5);
    let r = ricci_field(&terms, &st, &grid).unwrap();
    for (p, pt) in terms.iter().enumerate() {
        assert_eq!(r.data()[p], 8.0 * PI * assemble_source(pt, &st).trace);
    }
    let x = grid.point(100);
    let single = ricci_scalar(&st, &pair, x, 0.0, &QuadratureSpec::default()).unwrap();
    assert_eq!(single, r.data()[100]);

    // separable mixture: average of the two site traces
    let mixed = ricci_field(&terms, &state(0.5, 0.0), &grid).unwrap();
    for (p, pt) in terms.iter().enumerate() {
        assert!((mixed.data()[p] - 8.0 * PI * 0.5 * (pt.trace_a + pt.trace_b)).abs() <= 1e-15 * mixed.max_abs());
    }
    // entangled minus mixed is the coherence alone
    for (p, pt) in terms.iter().enumerate() {
        let expect = 8.0 * PI * 2.0 * 0.5 * pt.trace_cross.re;
        assert!((r.data()[p] - mixed.data()[p] - expect).abs() <= 1e-12 * r.max_abs());
    }
}

#[test]
fn vacuum_has_no_curvature() {
    let grid = Grid::cube(-1.0, 1.0, 8).unwrap();
    let zero = PointTerms {
        x: [0.0; 3],
        t: 0.0,
        diag_a: [[0.0; 4]; 4],
        diag_b: [[0.0; 4]; 4],
        cross: [[Complex64::new(0.0, 0.0); 4]; 4],
        trace_a: 0.0,
        trace_b: 0.0,
        trace_cross: Complex64::new(0.0, 0.0),
        error: 0.0,
        converged: true,
    };
    let terms = vec![zero; grid.len()];
    let r = ricci_field(&terms, &state(0.5, 0.5), &grid).unwrap();
    assert!(r.data().iter().all(|&v| v == 0.0));
    let h = metric_from_source(&source_fields(&terms, &state(0.5, 0.5), &grid).unwrap()).unwrap();
    assert!(h.components.iter().all(|c| c.max_abs() == 0.0));
}

#[test]
fn static_metric_tracks_the_coherence() {
    let pair = SitePair::new(Profile::boxed(0.0).unwrap(), PI, 100.0).unwrap();
    let grid = Grid::cube(-6.0, 6.0, 12).unwrap();
    let terms = grid_terms(&pair, &grid);
    let metric = |beta: f64| metric_from_source(&source_fields(&terms, &state(0.5, beta), &grid).unwrap()).unwrap();
    let (h0, hq, hh) = (metric(0.0), metric(0.25), metric(0.5));
    let d_half = hh.component(0, 0).unwrap().difference(h0.component(0, 0).unwrap(), "d").unwrap();
    let d_quarter = hq.component(0, 0).unwrap().difference(h0.component(0, 0).unwrap(), "d").unwrap();
    assert!(d_half.max_abs() > 0.0);
    for (a, b) in d_half.data().iter().zip(d_quarter.data()) {
        assert!((a - 2.0 * b).abs() <= 1e-10 * d_half.max_abs());
    }
    // largest change between the sites
    let at = grid.point(d_half.argmax_abs());
    assert!(at[2].abs() < PI, "{at:?}");

    // energy dominates stresses by about m^2 at the centre
    let c = grid.index(6, 6, 6);
    let h00 = hh.component(0, 0).unwrap().data()[c].abs();
    for i in 1..4 {
        let hii = hh.component(i, i).unwrap().data()[c].abs();
        assert!(h00 > 1e3 * hii, "hbar_{i}{i} = {hii}, hbar_00 = {h00}");
    }
}
