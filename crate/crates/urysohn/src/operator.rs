//! The Urysohn problem definition, the Nyström discretization of its integral
//! operator, and the dual-grid sample representation shared by the solvers.
//!
//! The integral operator K(x)(s) = ∫ κ(s,t,x(t)) dt is replaced by the
//! weighted sum over a composite quadrature; that sum needs x only at the
//! quadrature nodes, while the interpolatory projection needs x only at the
//! collocation nodes, so a pair of sample vectors closes every equation the
//! solvers assemble.

use std::sync::Arc;

use crate::linalg::DenseMatrix;
use crate::projection::CollocationGrid;
use crate::quadrature::CompositeQuadrature;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("expected {expected} values at {which} nodes, got {got}")]
    LengthMismatch {
        which: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("quadrature mesh m = {m} is not a multiple of collocation mesh n = {n}")]
    MeshesNotNested { m: usize, n: usize },
    #[error(
        "kernel derivative disagrees with finite differences at (s,t,u)=({s},{t},{u}): \
         analytic {analytic:.6e}, numeric {numeric:.6e}"
    )]
    DerivativeMismatch {
        s: f64,
        t: f64,
        u: f64,
        analytic: f64,
        numeric: f64,
    },
}

type KernelFn = dyn Fn(f64, f64, f64) -> f64 + Send + Sync;
type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A Urysohn integral equation x - K(x) = f on [0,1].
///
/// Holds the kernel κ(s,t,u), its partial derivative in u, the right-hand
/// side f, and optionally the exact solution for error studies. Cloning is
/// cheap; the closures are shared.
#[derive(Clone)]
pub struct UrysohnProblem {
    kappa: Arc<KernelFn>,
    dkappa_du: Arc<KernelFn>,
    rhs: Arc<ScalarFn>,
    exact_solution: Option<Arc<ScalarFn>>,
}

impl std::fmt::Debug for UrysohnProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UrysohnProblem")
            .field("has_exact_solution", &self.exact_solution.is_some())
            .finish()
    }
}

impl UrysohnProblem {
    pub fn new(
        kappa: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        dkappa_du: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        rhs: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            kappa: Arc::new(kappa),
            dkappa_du: Arc::new(dkappa_du),
            rhs: Arc::new(rhs),
            exact_solution: None,
        }
    }

    pub fn with_exact_solution(
        mut self,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.exact_solution = Some(Arc::new(phi));
        self
    }

    #[inline]
    pub fn kappa(&self, s: f64, t: f64, u: f64) -> f64 {
        (self.kappa)(s, t, u)
    }

    #[inline]
    pub fn dkappa_du(&self, s: f64, t: f64, u: f64) -> f64 {
        (self.dkappa_du)(s, t, u)
    }

    #[inline]
    pub fn rhs(&self, s: f64) -> f64 {
        (self.rhs)(s)
    }

    pub fn exact_solution(&self) -> Option<&ScalarFn> {
        self.exact_solution.as_deref()
    }

    /// Shared handle to the right-hand side, for building extensions that
    /// outlive this borrow.
    pub(crate) fn rhs_arc(&self) -> Arc<ScalarFn> {
        Arc::clone(&self.rhs)
    }

    /// Sanity check: compare `dkappa_du` against a central difference of the
    /// kernel at a fixed sample of points. Catches sign slips and copy-paste
    /// mistakes, not a proof of correctness.
    pub fn verify_derivative(&self, u_range: (f64, f64)) -> Result<(), OperatorError> {
        let step = 1e-6;
        let probes = [0.07, 0.31, 0.52, 0.77, 0.96];
        let (ulo, uhi) = u_range;
        for (i, &s) in probes.iter().enumerate() {
            for (j, &t) in probes.iter().enumerate() {
                let u = ulo + (uhi - ulo) * probes[(i + 2 * j) % probes.len()];
                let analytic = self.dkappa_du(s, t, u);
                let numeric =
                    (self.kappa(s, t, u + step) - self.kappa(s, t, u - step)) / (2.0 * step);
                let scale = analytic.abs().max(numeric.abs()).max(1.0);
                if (analytic - numeric).abs() > 1e-6 * scale {
                    return Err(OperatorError::DerivativeMismatch {
                        s,
                        t,
                        u,
                        analytic,
                        numeric,
                    });
                }
            }
        }
        Ok(())
    }
}

/// A function on [0,1] represented by its samples at the quadrature nodes and
/// at the collocation nodes.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub quad: CompositeQuadrature,
    pub grid: CollocationGrid,
    pub values_quad: Vec<f64>,
    pub values_coll: Vec<f64>,
}

impl GridFunction {
    pub fn new(
        quad: CompositeQuadrature,
        grid: CollocationGrid,
        values_quad: Vec<f64>,
        values_coll: Vec<f64>,
    ) -> Result<Self, OperatorError> {
        if quad.m() % grid.n() != 0 {
            return Err(OperatorError::MeshesNotNested {
                m: quad.m(),
                n: grid.n(),
            });
        }
        if values_quad.len() != quad.len() {
            return Err(OperatorError::LengthMismatch {
                which: "quadrature",
                expected: quad.len(),
                got: values_quad.len(),
            });
        }
        if values_coll.len() != grid.len() {
            return Err(OperatorError::LengthMismatch {
                which: "collocation",
                expected: grid.len(),
                got: values_coll.len(),
            });
        }
        Ok(Self {
            quad,
            grid,
            values_quad,
            values_coll,
        })
    }

    /// Sample `f` at both node families.
    pub fn sample<F: Fn(f64) -> f64>(
        quad: CompositeQuadrature,
        grid: CollocationGrid,
        f: F,
    ) -> Result<Self, OperatorError> {
        let values_quad = quad.nodes().iter().map(|&t| f(t)).collect();
        let values_coll = grid.nodes().iter().map(|&t| f(t)).collect();
        Self::new(quad, grid, values_quad, values_coll)
    }
}

/// The Nyström operator applied to the sample vector `x_quad`, evaluated at
/// `s`: the quadrature sum of κ(s, node, value) in flat node order.
pub fn nystrom_apply(
    prob: &UrysohnProblem,
    quad: &CompositeQuadrature,
    x_quad: &[f64],
    s: f64,
) -> f64 {
    assert_eq!(
        x_quad.len(),
        quad.len(),
        "x_quad must hold one value per quadrature node"
    );
    let mut sum = 0.0;
    for ((&t, &w), &u) in quad.nodes().iter().zip(quad.weights()).zip(x_quad) {
        sum += w * prob.kappa(s, t, u);
    }
    sum
}

/// Matrix of the Fréchet derivative of the Nyström operator at `x_quad`,
/// sampled at `eval_points`: entry (a, l) is weight_l * ∂κ/∂u(point_a,
/// node_l, x_quad_l).
pub fn nystrom_jacobian(
    prob: &UrysohnProblem,
    quad: &CompositeQuadrature,
    x_quad: &[f64],
    eval_points: &[f64],
) -> DenseMatrix {
    assert_eq!(
        x_quad.len(),
        quad.len(),
        "x_quad must hold one value per quadrature node"
    );
    let mut out = DenseMatrix::zeros(eval_points.len(), quad.len());
    for (a, &s) in eval_points.iter().enumerate() {
        let row = out.row_mut(a);
        for (l, ((&t, &w), &u)) in quad
            .nodes()
            .iter()
            .zip(quad.weights())
            .zip(x_quad)
            .enumerate()
        {
            row[l] = w * prob.dkappa_du(s, t, u);
        }
    }
    out
}

/// Natural extension of node values to all of [0,1]:
/// s ↦ f(s) + (Nyström sum of κ against `x_quad`)(s).
///
/// When `x_quad` solves the Nyström node system this reproduces the node
/// values and extends the solution everywhere; it works for any sample
/// vector and any `f_eval`.
pub fn natural_extension(
    prob: &UrysohnProblem,
    quad: &CompositeQuadrature,
    x_quad: &[f64],
    f_eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    let prob = prob.clone();
    let quad = quad.clone();
    let x_quad = x_quad.to_vec();
    move |s| f_eval(s) + nystrom_apply(&prob, &quad, &x_quad, s)
}
