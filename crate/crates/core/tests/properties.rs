use std::f64::consts::PI;

use hyperheat::evolution::{solve, solve_via_convolution, HeatKernel, SolveConfig, Window};
use hyperheat::grid::{d_x, d_xx, integrate};
use hyperheat::oracle::BoundaryCondition;
use hyperheat::transform::{forward, inverse};
use hyperheat::{Complex64, GridFunction, GridParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_slice(params: GridParams, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridFunction::from_index_fn(params, |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn grid_sizes() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![1usize, 2, 3, 4, 8, 16])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn second_difference_is_composition(n in grid_sizes(), seed in any::<u64>()) {
        let f = random_slice(GridParams::new(n).unwrap(), seed);
        prop_assert_eq!(d_xx(&f), d_x(&d_x(&f)));
    }

    #[test]
    fn difference_is_linear(n in grid_sizes(), seed in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let p = GridParams::new(n).unwrap();
        let (f, g) = (random_slice(p, seed), random_slice(p, seed ^ 0x9e37));
        let (alpha, beta) = (Complex64::new(a, b), Complex64::new(b, -a));
        let lhs = d_x(&(&(&f * alpha) + &(&g * beta)));
        let rhs = &(&d_x(&f) * alpha) + &(&d_x(&g) * beta);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn difference_telescopes(n in grid_sizes(), seed in any::<u64>()) {
        let p = GridParams::new(n).unwrap();
        let f = random_slice(p, seed);
        let expect = f[p.max_index()] - f[p.min_index()];
        prop_assert!((integrate(&d_x(&f)) - expect).norm() <= 1e-12 * (1.0 + n as f64));
    }

    #[test]
    fn parseval_with_half(n in prop::sample::select(vec![1usize, 2, 4, 8]), seed in any::<u64>()) {
        let p = GridParams::new(n).unwrap();
        let (f, g) = (random_slice(p, seed), random_slice(p, seed.wrapping_add(1)));
        let lhs = integrate(&(&f * &g.conj()));
        let rhs = 0.5 * integrate(&(&forward(&f) * &forward(&g).conj()));
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
    }

    #[test]
    fn real_input_has_hermitian_transform(n in grid_sizes(), seed in any::<u64>()) {
        let p = GridParams::new(n).unwrap();
        let f = random_slice(p, seed).map(|z| Complex64::new(z.re, 0.0));
        let h = forward(&f);
        for k in (p.min_index() + 1)..=p.max_index() {
            prop_assert!((h[-k] - h[k].conj()).norm() <= 1e-12);
        }
    }
}

#[test]
fn inverse_then_forward_doubles() {
    for n in [3, 5, 16] {
        let f = random_slice(GridParams::new(n).unwrap(), n as u64);
        let back = forward(&inverse(&f));
        assert!(back.max_abs_diff(&(&f * 2.0)).unwrap() <= 1e-9 * (1.0 + f.max_abs()));
    }
}

#[test]
fn kernel_peak_near_gaussian() {
    let p = GridParams::new(256).unwrap();
    let k = HeatKernel::new(0.5, &Window::new(p, 3.0).unwrap()).unwrap();
    assert!((k.at(0).re - 1.0 / (2.0 * PI).sqrt()).abs() <= 5e-3);
}

#[test]
fn kernel_absolute_mass_bounded() {
    for n in [128, 256] {
        let p = GridParams::new(n).unwrap();
        let w = Window::new(p, 3.0).unwrap();
        for t in [0.25, 0.5, 1.0] {
            let values = HeatKernel::new(t, &w).unwrap().values();
            assert!(values.values().iter().all(|v| v.re.is_finite() && v.im.is_finite()));
            let abs_mass = integrate(&values.map(|v| Complex64::new(v.norm(), 0.0))).re;
            assert!(abs_mass <= 1.1, "n={n} t={t}: {abs_mass}");
        }
    }
}

fn sampled_on_grid(n: usize, omega: f64, seed: u64) -> BoundaryCondition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach = (omega * n as f64) as i64;
    let points = (-reach..reach)
        .map(|j| {
            let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (j as f64 / n as f64, v)
        })
        .collect();
    BoundaryCondition::sampled(points).unwrap()
}

fn config(n: usize, boundary: BoundaryCondition) -> SolveConfig {
    SolveConfig {
        n,
        omega: 2.0,
        omega_prime: 2.0,
        boundary,
        times: vec![0.5],
        xs: (-24..24).map(|i| i as f64 / 8.0).collect(),
    }
}

#[test]
fn convolution_route_matches_spectral_route() {
    for seed in 0..4 {
        let cfg = config(16, sampled_on_grid(16, 2.0, seed));
        let a = solve(&cfg).unwrap();
        let b = solve_via_convolution(&cfg).unwrap();
        let scale = a.points.iter().map(|p| p.u.norm()).fold(0.0, f64::max);
        for (p, q) in a.points.iter().zip(&b.points) {
            assert!((p.u - q.u).norm() <= 1e-8 * (1.0 + scale), "seed={seed} x={}", p.x);
        }
    }
}

#[test]
fn delta_boundary_reproduces_kernel() {
    let n = 16;
    let delta = BoundaryCondition::sampled(vec![(0.0, Complex64::new(n as f64, 0.0))]).unwrap();
    let cfg = config(n, delta);
    let p = GridParams::new(n).unwrap();
    let kernel = HeatKernel::new(0.5, &Window::new(p, 2.0).unwrap()).unwrap();
    for route in [solve(&cfg).unwrap(), solve_via_convolution(&cfg).unwrap()] {
        for pt in &route.points {
            let m = p.cell_of(pt.x);
            assert!((pt.u - kernel.at(m)).norm() <= 1e-12, "x={}", pt.x);
        }
    }
}

#[test]
fn solve_is_linear_in_boundary() {
    let n = 32;
    let (alpha, beta) = (Complex64::new(1.5, -0.5), Complex64::new(-0.25, 2.0));
    let (g1, g2) = (sampled_on_grid(n, 2.0, 7), sampled_on_grid(n, 2.0, 8));
    let combo = match (&g1, &g2) {
        (BoundaryCondition::Sampled { points: a }, BoundaryCondition::Sampled { points: b }) => {
            let pts = a.iter().zip(b).map(|(p, q)| (p.0, alpha * p.1 + beta * q.1)).collect();
            BoundaryCondition::sampled(pts).unwrap()
        }
        _ => unreachable!(),
    };
    let u = |g: BoundaryCondition| solve(&config(n, g)).unwrap().points;
    let (u1, u2, uc) = (u(g1), u(g2), u(combo));
    for ((a, b), c) in u1.iter().zip(&u2).zip(&uc) {
        let expect = alpha * a.u + beta * b.u;
        assert!((c.u - expect).norm() <= 1e-10 * (1.0 + expect.norm()));
    }
}

#[test]
fn gaussian_solution_near_closed_form() {
    let g = BoundaryCondition::gaussian(1.0, 1.0).unwrap();
    let cfg = SolveConfig {
        n: 256,
        omega: 4.0,
        omega_prime: 3.0,
        boundary: g.clone(),
        times: vec![0.5],
        xs: (-20..=20).map(|i| i as f64 / 10.0).collect(),
    };
    let out = solve(&cfg).unwrap();
    assert!(!out.sufficient_regime);
    assert!(out.warnings.is_empty());
    for p in &out.points {
        let exact = (-p.x * p.x / 3.0).exp() / 3f64.sqrt();
        assert!((p.u.re - exact).abs() <= 2e-2);
        assert!(p.u.im.abs() <= 1e-12);
    }
}
