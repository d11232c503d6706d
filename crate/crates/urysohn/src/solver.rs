//! Newton solvers for the Nyström equation and for the discrete modified
//! projection equation, the iterated solution built from one extra operator
//! application, and Richardson extrapolation of the iterated solutions.
//!
//! The modified projection fixed point
//!
//!   x = f + Q(K(x)) + K(Q(x)) - Q(K(Q(x)))
//!
//! (with K the Nyström operator and Q the interpolatory projection) closes
//! into a finite system over the stacked unknown [values at quadrature nodes,
//! values at collocation nodes]: Q needs only collocation values and K needs
//! only quadrature values. At a collocation node the projection terms cancel
//! and the equation reduces to x = f + K(x) there.

use crate::linalg::{lu_factor, DenseMatrix, LinalgError};
use crate::operator::{natural_extension, nystrom_apply, nystrom_jacobian, GridFunction, UrysohnProblem};
use crate::projection::{interpolation_matrix, CollocationGrid, PiecewisePolynomial};
use crate::quadrature::CompositeQuadrature;
use thiserror::Error;

/// Relative pivot threshold below which the Newton matrix is reported
/// singular.
const PIVOT_TOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("quadrature mesh m = {m} must be a positive multiple of collocation mesh n = {n}")]
    MNotMultipleOfN { m: usize, n: usize },
    #[error(
        "Newton iteration did not converge within {iterations} iterations \
         (last step norm {last_step_norm:.3e})"
    )]
    NonConvergence {
        iterations: usize,
        last_step_norm: f64,
    },
    #[error("Newton matrix is numerically singular: {0}")]
    SingularLinearSystem(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("initial guess has length {got}, expected {expected}")]
    InitialGuessLength { expected: usize, got: usize },
}

/// Starting point for the Newton iteration.
#[derive(Debug, Clone, Default, PartialEq)]
pub enum InitialGuess {
    /// Start the modified-projection solve from samples of the Nyström
    /// solution on the same quadrature mesh. That solution is within the
    /// quadrature error of the exact one, so the Newton iteration starts deep
    /// inside its contraction region; the Nyström solve itself starts from
    /// the right-hand side. For [`solve_nystrom`] this behaves like
    /// [`RhsSamples`](Self::RhsSamples).
    #[default]
    NystromSamples,
    /// Right-hand side sampled at the unknown's nodes. Sufficient for the
    /// Nyström system, but for kernels with a pole near the solution path
    /// (such as 1/(s+t+u)) the full modified-projection system can overshoot
    /// past the pole from here and diverge.
    RhsSamples,
    Zero,
    Given(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSettings {
    /// Stop once the sup norm of the Newton step falls to this value.
    pub tol: f64,
    pub max_iters: usize,
    pub initial_guess: InitialGuess,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_iters: 50,
            initial_guess: InitialGuess::default(),
        }
    }
}

/// What the Newton iteration did: steps applied and their sup norms.
#[derive(Debug, Clone)]
pub struct NewtonReport {
    pub iterations: usize,
    pub step_norms: Vec<f64>,
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Damped-free exact-Newton loop over a residual and its Jacobian, shared by
/// both solvers. On success the final residual is re-checked against
/// `10 * tol`.
fn newton_solve(
    mut x: Vec<f64>,
    settings: &NewtonSettings,
    residual: impl Fn(&[f64]) -> Vec<f64>,
    jacobian: impl Fn(&[f64]) -> DenseMatrix,
) -> Result<(Vec<f64>, NewtonReport), SolveError> {
    let mut step_norms = Vec::new();
    for iter in 1..=settings.max_iters {
        let res = residual(&x);
        if res.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::NonFinite("Newton residual"));
        }
        let jac = jacobian(&x);
        let lu = lu_factor(jac, PIVOT_TOL).map_err(|e| match e {
            LinalgError::Singular { .. } => SolveError::SingularLinearSystem(e.to_string()),
            other => SolveError::SingularLinearSystem(other.to_string()),
        })?;
        let step = lu.solve(&res);
        let norm = sup_norm(&step);
        if !norm.is_finite() {
            return Err(SolveError::NonFinite("Newton step"));
        }
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi -= si;
        }
        step_norms.push(norm);
        if norm <= settings.tol {
            let final_res = sup_norm(&residual(&x));
            if final_res > 10.0 * settings.tol {
                return Err(SolveError::NonConvergence {
                    iterations: iter,
                    last_step_norm: norm.max(final_res),
                });
            }
            return Ok((
                x,
                NewtonReport {
                    iterations: iter,
                    step_norms,
                },
            ));
        }
    }
    Err(SolveError::NonConvergence {
        iterations: settings.max_iters,
        last_step_norm: step_norms.last().copied().unwrap_or(f64::INFINITY),
    })
}

fn initial_vector(
    guess: &InitialGuess,
    rhs_samples: &[f64],
) -> Result<Vec<f64>, SolveError> {
    match guess {
        InitialGuess::NystromSamples | InitialGuess::RhsSamples => Ok(rhs_samples.to_vec()),
        InitialGuess::Zero => Ok(vec![0.0; rhs_samples.len()]),
        InitialGuess::Given(v) => {
            if v.len() != rhs_samples.len() {
                return Err(SolveError::InitialGuessLength {
                    expected: rhs_samples.len(),
                    got: v.len(),
                });
            }
            Ok(v.clone())
        }
    }
}

/// The Nyström solution: node values of x = f + K(x) at the quadrature nodes,
/// with its natural extension to all of [0,1].
#[derive(Debug, Clone)]
pub struct NystromSolution {
    problem: UrysohnProblem,
    quad: CompositeQuadrature,
    x_quad: Vec<f64>,
    report: NewtonReport,
}

impl NystromSolution {
    pub fn node_values(&self) -> &[f64] {
        &self.x_quad
    }

    pub fn quad(&self) -> &CompositeQuadrature {
        &self.quad
    }

    pub fn report(&self) -> &NewtonReport {
        &self.report
    }

    /// Natural extension f(s) + K(x)(s).
    pub fn eval(&self, s: f64) -> f64 {
        self.problem.rhs(s) + nystrom_apply(&self.problem, &self.quad, &self.x_quad, s)
    }

    /// Owned evaluator, convenient for passing into extrapolation.
    pub fn to_eval(&self) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
        let f = self.problem.rhs_arc();
        natural_extension(&self.problem, &self.quad, &self.x_quad, move |s| f(s))
    }
}

/// Solve the Nyström node system x = f + K(x) at the quadrature nodes by
/// Newton's method.
pub fn solve_nystrom(
    prob: &UrysohnProblem,
    quad: &CompositeQuadrature,
    settings: &NewtonSettings,
) -> Result<NystromSolution, SolveError> {
    let f_q: Vec<f64> = quad.nodes().iter().map(|&t| prob.rhs(t)).collect();
    let x0 = initial_vector(&settings.initial_guess, &f_q)?;
    let nodes = quad.nodes().to_vec();

    let residual = |x: &[f64]| -> Vec<f64> {
        nodes
            .iter()
            .enumerate()
            .map(|(i, &s)| x[i] - f_q[i] - nystrom_apply(prob, quad, x, s))
            .collect()
    };
    let jacobian = |x: &[f64]| -> DenseMatrix {
        let mut jac = nystrom_jacobian(prob, quad, x, &nodes);
        for i in 0..nodes.len() {
            let row = jac.row_mut(i);
            for v in row.iter_mut() {
                *v = -*v;
            }
            row[i] += 1.0;
        }
        jac
    };

    let (x_quad, report) = newton_solve(x0, settings, residual, jacobian)?;
    Ok(NystromSolution {
        problem: prob.clone(),
        quad: quad.clone(),
        x_quad,
        report,
    })
}

/// Everything produced by one modified-projection solve: the solution's node
/// values, the pieces needed to evaluate it anywhere, and the Nyström
/// solution on the same quadrature mesh for comparison studies.
#[derive(Debug, Clone)]
pub struct SolutionBundle {
    problem: UrysohnProblem,
    quad: CompositeQuadrature,
    grid: CollocationGrid,
    z_mod: GridFunction,
    nystrom: NystromSolution,
    newton: NewtonReport,
    // precomputed pieces of the natural extension of z
    interp_k_of_z: PiecewisePolynomial,
    projected_z_quad: Vec<f64>,
    interp_k_of_projected: PiecewisePolynomial,
}

impl SolutionBundle {
    pub fn problem(&self) -> &UrysohnProblem {
        &self.problem
    }

    pub fn quad(&self) -> &CompositeQuadrature {
        &self.quad
    }

    pub fn grid(&self) -> &CollocationGrid {
        &self.grid
    }

    /// Node values of the modified projection solution.
    pub fn z_mod(&self) -> &GridFunction {
        &self.z_mod
    }

    /// The Nyström solution on the same quadrature mesh.
    pub fn nystrom(&self) -> &NystromSolution {
        &self.nystrom
    }

    pub fn newton_report(&self) -> &NewtonReport {
        &self.newton
    }

    /// The modified projection solution at any s, via its defining equation:
    /// f(s) + Q(K z)(s) + K(Q z)(s) - Q(K Q z)(s).
    pub fn eval_modified(&self, s: f64) -> f64 {
        self.problem.rhs(s) + self.interp_k_of_z.evaluate(s)
            + nystrom_apply(&self.problem, &self.quad, &self.projected_z_quad, s)
            - self.interp_k_of_projected.evaluate(s)
    }

    /// The iterated solution f(s) + K(z)(s).
    pub fn eval_iterated(&self, s: f64) -> f64 {
        self.problem.rhs(s)
            + nystrom_apply(&self.problem, &self.quad, &self.z_mod.values_quad, s)
    }

    /// The Nyström solution at any s.
    pub fn eval_nystrom(&self, s: f64) -> f64 {
        self.nystrom.eval(s)
    }
}

/// Solve the discrete modified projection equation on the given mesh pair by
/// Newton's method on the stacked node system, then solve the plain Nyström
/// system on the same quadrature mesh.
pub fn solve_modified_projection(
    prob: &UrysohnProblem,
    quad: &CompositeQuadrature,
    grid: &CollocationGrid,
    settings: &NewtonSettings,
) -> Result<SolutionBundle, SolveError> {
    let m = quad.m();
    let n = grid.n();
    if m % n != 0 {
        return Err(SolveError::MNotMultipleOfN { m, n });
    }
    let nq = quad.len();
    let nc = grid.len();

    let f_q: Vec<f64> = quad.nodes().iter().map(|&t| prob.rhs(t)).collect();
    let f_c: Vec<f64> = grid.nodes().iter().map(|&t| prob.rhs(t)).collect();
    let mut f_all = f_q.clone();
    f_all.extend_from_slice(&f_c);

    // projection matrix from collocation values to the quadrature nodes
    let proj = interpolation_matrix(grid, quad.nodes());
    let coll_nodes = grid.nodes().to_vec();
    let quad_nodes = quad.nodes().to_vec();

    // residual of the stacked system [x_quad; x_coll]
    let residual = |x: &[f64]| -> Vec<f64> {
        let (a, b) = x.split_at(nq);
        let qb = proj.matvec(b); // (Q x) at quadrature nodes
        let k_a_coll: Vec<f64> = coll_nodes
            .iter()
            .map(|&s| nystrom_apply(prob, quad, a, s))
            .collect();
        let k_qb_coll: Vec<f64> = coll_nodes
            .iter()
            .map(|&s| nystrom_apply(prob, quad, &qb, s))
            .collect();
        let mut res = Vec::with_capacity(nq + nc);
        for (i, &s) in quad_nodes.iter().enumerate() {
            let q_of_k_a: f64 = proj.row(i).iter().zip(&k_a_coll).map(|(p, v)| p * v).sum();
            let q_of_k_qb: f64 = proj
                .row(i)
                .iter()
                .zip(&k_qb_coll)
                .map(|(p, v)| p * v)
                .sum();
            res.push(
                a[i] - f_q[i] - q_of_k_a - nystrom_apply(prob, quad, &qb, s) + q_of_k_qb,
            );
        }
        for (i, k_a) in k_a_coll.iter().enumerate() {
            res.push(b[i] - f_c[i] - k_a);
        }
        res
    };

    let jacobian = |x: &[f64]| -> DenseMatrix {
        let (a, b) = x.split_at(nq);
        let qb = proj.matvec(b);
        // derivative blocks of the Nyström operator
        let d_k_a_coll = nystrom_jacobian(prob, quad, a, &coll_nodes); // nc x nq
        let d_k_qb_quad = nystrom_jacobian(prob, quad, &qb, &quad_nodes); // nq x nq
        let d_k_qb_coll = nystrom_jacobian(prob, quad, &qb, &coll_nodes); // nc x nq
        let p_dka = proj.matmul(&d_k_a_coll); // nq x nq
        let dkqb_p = d_k_qb_quad.matmul(&proj); // nq x nc
        let p_dkqb_p = proj.matmul(&d_k_qb_coll.matmul(&proj)); // nq x nc

        let dim = nq + nc;
        let mut jac = DenseMatrix::zeros(dim, dim);
        for i in 0..nq {
            let row = jac.row_mut(i);
            for j in 0..nq {
                row[j] = -p_dka.get(i, j);
            }
            row[i] += 1.0;
            for j in 0..nc {
                row[nq + j] = -dkqb_p.get(i, j) + p_dkqb_p.get(i, j);
            }
        }
        for i in 0..nc {
            let row = jac.row_mut(nq + i);
            for j in 0..nq {
                row[j] = -d_k_a_coll.get(i, j);
            }
            row[nq + i] += 1.0;
        }
        jac
    };

    // the Nyström solution on the same mesh: part of the bundle and the
    // default warm start for the stacked system
    let inner_guess = match &settings.initial_guess {
        InitialGuess::Zero => InitialGuess::Zero,
        InitialGuess::Given(v) => {
            if v.len() != nq + nc {
                return Err(SolveError::InitialGuessLength {
                    expected: nq + nc,
                    got: v.len(),
                });
            }
            InitialGuess::Given(v[..nq].to_vec())
        }
        _ => InitialGuess::RhsSamples,
    };
    let nystrom = solve_nystrom(
        prob,
        quad,
        &NewtonSettings {
            initial_guess: inner_guess,
            ..settings.clone()
        },
    )?;

    let x0 = match &settings.initial_guess {
        InitialGuess::NystromSamples => {
            let mut v = nystrom.node_values().to_vec();
            v.extend(coll_nodes.iter().map(|&s| nystrom.eval(s)));
            v
        }
        other => initial_vector(other, &f_all)?,
    };
    let (solution, newton) = newton_solve(x0, settings, residual, jacobian)?;

    let (a, b) = solution.split_at(nq);
    let z_mod = GridFunction::new(quad.clone(), grid.clone(), a.to_vec(), b.to_vec())
        .expect("solver meshes are nested by construction");

    // pieces for evaluating z anywhere
    let k_a_coll: Vec<f64> = coll_nodes
        .iter()
        .map(|&s| nystrom_apply(prob, quad, a, s))
        .collect();
    let projected_z_quad = proj.matvec(b);
    let k_qb_coll: Vec<f64> = coll_nodes
        .iter()
        .map(|&s| nystrom_apply(prob, quad, &projected_z_quad, s))
        .collect();
    let interp_k_of_z = PiecewisePolynomial::interpolate(grid.clone(), k_a_coll)
        .map_err(|_| SolveError::NonFinite("operator values at collocation nodes"))?;
    let interp_k_of_projected = PiecewisePolynomial::interpolate(grid.clone(), k_qb_coll)
        .map_err(|_| SolveError::NonFinite("operator values at collocation nodes"))?;

    Ok(SolutionBundle {
        problem: prob.clone(),
        quad: quad.clone(),
        grid: grid.clone(),
        z_mod,
        nystrom,
        newton,
        interp_k_of_z,
        projected_z_quad,
        interp_k_of_projected,
    })
}

/// The iterated solution as an owned evaluator: s ↦ f(s) + K(z)(s) using the
/// solution's quadrature-node values.
pub fn iterate(bundle: &SolutionBundle) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    let f = bundle.problem.rhs_arc();
    natural_extension(
        &bundle.problem,
        &bundle.quad,
        &bundle.z_mod.values_quad,
        move |s| f(s),
    )
}

/// One step of Richardson extrapolation of the iterated solutions at mesh
/// counts n and 2n: (2^{4r} z_{2n} - z_n) / (2^{4r} - 1).
///
/// Computed as z_n + 2^{4r} (z_{2n} - z_n) / (2^{4r} - 1) so equal inputs
/// return exactly their common value.
pub fn richardson<F, G>(z_n: F, z_2n: G, r: usize) -> impl Fn(f64) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let weight = (2.0f64).powi(4 * r as i32);
    move |s| {
        let coarse = z_n(s);
        let fine = z_2n(s);
        coarse + weight * (fine - coarse) / (weight - 1.0)
    }
}
