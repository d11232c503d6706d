//! Helpers shared between the integration test targets.

use urysohn::operator::{nystrom_apply, UrysohnProblem};
use urysohn::projection::{CollocationGrid, PiecewisePolynomial};
use urysohn::quadrature::CompositeQuadrature;

/// The modified projection fixed-point map evaluated from raw node samples,
/// built here from the low-level primitives only (no solver assembly code):
/// G(x)(s) = f(s) + Q(Kx)(s) + K(Qx)(s) - Q(K(Qx))(s).
pub fn fixed_point_map(
    prob: &UrysohnProblem,
    quad: &CompositeQuadrature,
    grid: &CollocationGrid,
    x_quad: &[f64],
    x_coll: &[f64],
    s: f64,
) -> f64 {
    let q_x = PiecewisePolynomial::interpolate(grid.clone(), x_coll.to_vec()).unwrap();
    let qx_quad: Vec<f64> = quad.nodes().iter().map(|&t| q_x.evaluate(t)).collect();
    let k_x: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&t| nystrom_apply(prob, quad, x_quad, t))
        .collect();
    let k_qx: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&t| nystrom_apply(prob, quad, &qx_quad, t))
        .collect();
    let q_k_x = PiecewisePolynomial::interpolate(grid.clone(), k_x).unwrap();
    let q_k_qx = PiecewisePolynomial::interpolate(grid.clone(), k_qx).unwrap();
    prob.rhs(s) + q_k_x.evaluate(s) + nystrom_apply(prob, quad, &qx_quad, s)
        - q_k_qx.evaluate(s)
}

/// Independent oracle for kernels linear in the state: probe the affine
/// fixed-point map with unit vectors and solve (I - L) x = c by Gauss-Jordan
/// elimination written out here, sharing no assembly code with the solver.
/// Returns the stacked solution [quadrature values, collocation values].
pub fn brute_force_linear_solution(
    prob: &UrysohnProblem,
    quad: &CompositeQuadrature,
    grid: &CollocationGrid,
) -> Vec<f64> {
    let nq = quad.len();
    let nc = grid.len();
    let dim = nq + nc;
    let all_nodes: Vec<f64> = quad
        .nodes()
        .iter()
        .chain(grid.nodes())
        .copied()
        .collect();
    let apply = |x: &[f64], s: f64| {
        let (xq, xc) = x.split_at(nq);
        fixed_point_map(prob, quad, grid, xq, xc, s)
    };

    let zero = vec![0.0; dim];
    let c: Vec<f64> = all_nodes.iter().map(|&s| apply(&zero, s)).collect();
    let mut system = vec![vec![0.0f64; dim + 1]; dim];
    for j in 0..dim {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        for (i, &s) in all_nodes.iter().enumerate() {
            let l_ij = apply(&e, s) - c[i];
            system[i][j] = if i == j { 1.0 - l_ij } else { -l_ij };
        }
    }
    for i in 0..dim {
        system[i][dim] = c[i];
    }

    for col in 0..dim {
        let pivot_row = (col..dim)
            .max_by(|&a, &b| {
                system[a][col]
                    .abs()
                    .partial_cmp(&system[b][col].abs())
                    .unwrap()
            })
            .unwrap();
        system.swap(col, pivot_row);
        let pivot = system[col][col];
        assert!(pivot.abs() > 1e-12, "oracle system is singular");
        for j in col..=dim {
            system[col][j] /= pivot;
        }
        for i in 0..dim {
            if i != col {
                let factor = system[i][col];
                for j in col..=dim {
                    system[i][j] -= factor * system[col][j];
                }
            }
        }
    }
    (0..dim).map(|i| system[i][dim]).collect()
}
