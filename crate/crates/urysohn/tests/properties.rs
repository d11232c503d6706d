//! Property and oracle tests that do not depend on any published table data.

mod common;

use common::{brute_force_linear_solution, fixed_point_map};
use proptest::prelude::*;

use urysohn::operator::{nystrom_apply, nystrom_jacobian, UrysohnProblem};
use urysohn::projection::{CollocationGrid, PiecewisePolynomial};
use urysohn::quadrature::{CompositeQuadrature, QuadratureRule};
use urysohn::solver::{richardson, solve_modified_projection, solve_nystrom, NewtonSettings};

fn composite(rho: usize, m: usize) -> CompositeQuadrature {
    CompositeQuadrature::new(QuadratureRule::gauss_legendre(rho).unwrap(), m).unwrap()
}

fn eval_poly(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // composite rules integrate polynomials within their degree of precision
    #[test]
    fn quadrature_exact_on_polynomials(
        rho in 1usize..=5,
        m in 1usize..=8,
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..=10),
    ) {
        let degree = (coeffs.len() - 1).min(2 * rho - 1);
        let coeffs = &coeffs[..=degree];
        let quad = composite(rho, m);
        let exact: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c / (k as f64 + 1.0))
            .sum();
        let got = quad.integrate(|t| eval_poly(coeffs, t));
        prop_assert!((got - exact).abs() <= 1e-13, "got {got}, want {exact}");
    }

    // projecting an element of the space returns it
    #[test]
    fn projection_is_idempotent(
        n in 1usize..=6,
        r in 1usize..=4,
        seed in any::<u64>(),
    ) {
        let grid = CollocationGrid::new(n, r).unwrap();
        let values: Vec<f64> = (0..grid.len())
            .map(|i| {
                let x = seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64);
                (x >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
            })
            .collect();
        let p = PiecewisePolynomial::interpolate(grid.clone(), values.clone()).unwrap();
        let reprojected = urysohn::projection::project(&grid, |s| p.evaluate(s)).unwrap();
        for (a, b) in reprojected.values().iter().zip(&values) {
            prop_assert!((a - b).abs() <= 1e-13);
        }
        // collocation exactness
        for (node, want) in grid.nodes().iter().zip(&values) {
            prop_assert!((p.evaluate(*node) - want).abs() <= 1e-14);
        }
    }

    // extrapolation with equal inputs returns the input exactly, any r
    #[test]
    fn richardson_identity(r in 1usize..=4, a in -10.0f64..10.0, b in -3.0f64..3.0) {
        let g = move |s: f64| a * s + b * (1.0 + s).sqrt();
        let extrap = richardson(g, g, r);
        for i in 0..=20 {
            let s = i as f64 / 20.0;
            prop_assert_eq!(extrap(s), g(s));
        }
    }

    // the Nyström derivative matrix matches finite differences of the sum
    #[test]
    fn jacobian_consistent_with_finite_differences(
        c0 in 0.2f64..1.5,
        c1 in -0.5f64..0.5,
        c2 in -0.5f64..0.5,
    ) {
        let prob = UrysohnProblem::new(
            move |s, t, u| (c0 + c1 * s * t + c2 * u * u).sin(),
            move |s, t, u| 2.0 * c2 * u * (c0 + c1 * s * t + c2 * u * u).cos(),
            |_| 0.0,
        );
        let quad = composite(2, 3);
        let x: Vec<f64> = quad.nodes().iter().map(|&t| 0.3 + t).collect();
        let pts = [0.0, 0.5, 1.0];
        let jac = nystrom_jacobian(&prob, &quad, &x, &pts);
        let step = 1e-6;
        for (a, &s) in pts.iter().enumerate() {
            for l in 0..quad.len() {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[l] += step;
                xm[l] -= step;
                let fd = (nystrom_apply(&prob, &quad, &xp, s)
                    - nystrom_apply(&prob, &quad, &xm, s))
                    / (2.0 * step);
                let analytic = jac.get(a, l);
                let scale = analytic.abs().max(fd.abs()).max(1e-9);
                prop_assert!((analytic - fd).abs() <= 1e-6 * scale);
            }
        }
    }

    // for kernels linear in the state the solver must agree with a directly
    // assembled dense linear system
    #[test]
    fn linear_kernel_matches_brute_force(
        k0 in -0.3f64..0.3,
        k1 in -0.3f64..0.3,
        k2 in -0.3f64..0.3,
        n in 1usize..=4,
        p in 1usize..=4,
        r in 1usize..=2,
    ) {
        let m = n * p;
        prop_assume!(m <= 16);
        let kernel = move |s: f64, t: f64| k0 + k1 * s + k2 * t * t;
        let prob = UrysohnProblem::new(
            move |s, t, u| kernel(s, t) * u,
            move |s, t, _| kernel(s, t),
            |s| 1.0 + s,
        );
        let quad = composite(2, m);
        let grid = CollocationGrid::new(n, r).unwrap();
        let bundle =
            solve_modified_projection(&prob, &quad, &grid, &NewtonSettings::default()).unwrap();

        let reference = brute_force_linear_solution(&prob, &quad, &grid);
        let nq = quad.len();
        for (i, &want) in reference[..nq].iter().enumerate() {
            prop_assert!(
                (bundle.z_mod().values_quad[i] - want).abs() <= 1e-10,
                "quad node {i}: {} vs {want}",
                bundle.z_mod().values_quad[i]
            );
        }
        for (i, &want) in reference[nq..].iter().enumerate() {
            prop_assert!(
                (bundle.z_mod().values_coll[i] - want).abs() <= 1e-10,
                "collocation node {i}: {} vs {want}",
                bundle.z_mod().values_coll[i]
            );
        }
    }
}

/// Nonlinear cross-check: a from-scratch Picard iteration on the same
/// fixed-point equation must land on the Newton solution.
#[test]
fn picard_iteration_agrees_with_newton_solution() {
    let prob = urysohn::problems::inverse_sum();
    let quad = composite(2, 4);
    let grid = CollocationGrid::new(2, 2).unwrap();
    let phi = |t: f64| 1.0 / (1.0 + t);

    let mut xq: Vec<f64> = quad.nodes().iter().map(|&t| phi(t)).collect();
    let mut xc: Vec<f64> = grid.nodes().iter().map(|&t| phi(t)).collect();
    let mut converged = false;
    for _ in 0..400 {
        let new_q: Vec<f64> = quad
            .nodes()
            .iter()
            .map(|&s| fixed_point_map(&prob, &quad, &grid, &xq, &xc, s))
            .collect();
        let new_c: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&s| fixed_point_map(&prob, &quad, &grid, &xq, &xc, s))
            .collect();
        let delta = new_q
            .iter()
            .zip(&xq)
            .chain(new_c.iter().zip(&xc))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        xq = new_q;
        xc = new_c;
        if delta < 1e-14 {
            converged = true;
            break;
        }
    }
    assert!(converged, "Picard iteration failed to converge");

    let bundle =
        solve_modified_projection(&prob, &quad, &grid, &NewtonSettings::default()).unwrap();
    for i in 0..=200 {
        let s = i as f64 / 200.0;
        let picard = fixed_point_map(&prob, &quad, &grid, &xq, &xc, s);
        let newton = bundle.eval_modified(s);
        assert!(
            (picard - newton).abs() <= 1e-12,
            "solutions disagree at s={s}: {picard} vs {newton}"
        );
    }
}

/// The iterated solution reproduces the modified solution at the collocation
/// nodes: at those nodes the projection terms of the fixed point cancel.
#[test]
fn iterated_solution_interpolates_at_collocation_nodes() {
    let prob = urysohn::problems::inverse_sum();
    let quad = composite(2, 16);
    let grid = CollocationGrid::new(4, 2).unwrap();
    let bundle =
        solve_modified_projection(&prob, &quad, &grid, &NewtonSettings::default()).unwrap();
    for (i, &node) in grid.nodes().iter().enumerate() {
        let diff = bundle.eval_iterated(node) - bundle.z_mod().values_coll[i];
        assert!(diff.abs() <= 1e-12, "node {i}: difference {diff}");
    }
}

/// Fixed-point identity of the Nyström natural extension at the nodes.
#[test]
fn nystrom_extension_fixed_point_identity() {
    let prob = urysohn::problems::inverse_sum();
    let quad = composite(2, 32);
    let sol = solve_nystrom(&prob, &quad, &NewtonSettings::default()).unwrap();
    for (i, &node) in quad.nodes().iter().enumerate() {
        assert!((sol.eval(node) - sol.node_values()[i]).abs() <= 1e-12);
    }
}

/// The iterated error at matched mesh orders is dominated by the quadrature
/// bias of the Nyström solution, so the two must agree closely.
#[test]
fn iterated_error_tracks_nystrom_bias() {
    let prob = urysohn::problems::inverse_sum();
    let phi = prob.exact_solution().unwrap();
    let quad = composite(2, 32);
    let grid = CollocationGrid::new(8, 2).unwrap();
    let bundle =
        solve_modified_projection(&prob, &quad, &grid, &NewtonSettings::default()).unwrap();
    let err_iter = urysohn::sup_error(|s| bundle.eval_iterated(s), phi, &grid, &quad, 1001);
    let bias = urysohn::sup_error(|s| bundle.eval_nystrom(s), phi, &grid, &quad, 1001);
    assert!(
        (err_iter - bias).abs() <= 0.15 * bias,
        "iterated error {err_iter:.3e} should track the quadrature bias {bias:.3e}"
    );
}
