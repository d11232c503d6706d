//! Gauss–Legendre quadrature on [0,1] and its composite form on a uniform
//! partition.
//!
//! A basic rule with `rho` nodes integrates polynomials up to degree
//! `2*rho - 1` exactly. The composite rule applies the basic rule on each of
//! `m` equal subintervals; its nodes are laid out flat, subinterval-major, so
//! downstream operators can treat it as one long weighted dot product.

use thiserror::Error;

/// Largest supported node count for the basic rule. The Newton iteration on
/// the Legendre recurrence is accurate to ~1e-15 in this range.
pub const MAX_RHO: usize = 20;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("number of Gauss nodes must be between 1 and {MAX_RHO}, got {0}")]
    InvalidNodeCount(usize),
    #[error("composite rule needs at least one subinterval")]
    EmptyPartition,
}

/// A basic quadrature rule on [0,1]: nodes, weights and degree of precision.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    rho: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    degree_of_precision: usize,
}

impl QuadratureRule {
    /// The `rho`-point Gauss–Legendre rule mapped to [0,1].
    ///
    /// Nodes are the roots of the Legendre polynomial of degree `rho`, found
    /// by Newton iteration from Chebyshev-angle starting guesses and mirrored
    /// about 0.5 so the node/weight symmetry is exact.
    pub fn gauss_legendre(rho: usize) -> Result<Self, QuadratureError> {
        if rho == 0 || rho > MAX_RHO {
            return Err(QuadratureError::InvalidNodeCount(rho));
        }
        let mut nodes = vec![0.0; rho];
        let mut weights = vec![0.0; rho];
        // Roots come in +/- pairs on [-1,1]; compute the positive half.
        for i in 0..(rho + 1) / 2 {
            // i-th root counted from the right end of [-1,1]
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (rho as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(rho, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-15 {
                    // one polishing step after convergence
                    let (p2, d2) = legendre_with_derivative(rho, x);
                    x -= p2 / d2;
                    dp = d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map x in [-1,1] to [0,1]; mirror to fill the lower half
            let hi = rho - 1 - i;
            let lo = i;
            nodes[hi] = 0.5 * (1.0 + x);
            nodes[lo] = 0.5 * (1.0 - x);
            weights[hi] = 0.5 * w;
            weights[lo] = 0.5 * w;
        }
        if rho % 2 == 1 {
            // center node of an odd rule sits exactly at the midpoint
            let mid = rho / 2;
            nodes[mid] = 0.5;
            if rho == 1 {
                weights[mid] = 1.0;
            }
        }
        Ok(Self {
            rho,
            nodes,
            weights,
            degree_of_precision: 2 * rho - 1,
        })
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Largest polynomial degree integrated exactly (`2*rho - 1`).
    pub fn degree_of_precision(&self) -> usize {
        self.degree_of_precision
    }

    /// Apply the basic rule to `f` on [0,1].
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Legendre polynomial of degree `n` and its derivative at `x`, by the
/// three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

/// The basic rule repeated on `m` equal subintervals of [0,1].
///
/// Node `(j-1)*rho + i` is the i-th Gauss node of subinterval j; the matching
/// weight already carries the subinterval length `h_tilde = 1/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeQuadrature {
    base: QuadratureRule,
    m: usize,
    h_tilde: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    breakpoints: Vec<f64>,
}

impl CompositeQuadrature {
    pub fn new(base: QuadratureRule, m: usize) -> Result<Self, QuadratureError> {
        if m == 0 {
            return Err(QuadratureError::EmptyPartition);
        }
        let h_tilde = 1.0 / m as f64;
        let breakpoints: Vec<f64> = (0..=m).map(|j| j as f64 / m as f64).collect();
        let mut nodes = Vec::with_capacity(m * base.rho());
        let mut weights = Vec::with_capacity(m * base.rho());
        for j in 0..m {
            let left = breakpoints[j];
            for (&mu, &w) in base.nodes().iter().zip(base.weights()) {
                nodes.push(left + mu * h_tilde);
                weights.push(w * h_tilde);
            }
        }
        Ok(Self {
            base,
            m,
            h_tilde,
            nodes,
            weights,
            breakpoints,
        })
    }

    pub fn base(&self) -> &QuadratureRule {
        &self.base
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h_tilde(&self) -> f64 {
        self.h_tilde
    }

    /// Flat node vector, subinterval-major.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Flat weight vector matching [`nodes`](Self::nodes); sums to 1.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Total number of nodes, `m * rho`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Apply the composite rule to `f`, accumulating in flat index order.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut sum = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(x);
        }
        sum
    }
}
