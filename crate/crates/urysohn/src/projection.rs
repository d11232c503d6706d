//! Piecewise polynomials of degree <= r-1 on a uniform partition and the
//! interpolatory projection at the r Gauss points of each subinterval.
//!
//! An element of the space is stored by its values at the collocation nodes;
//! evaluation uses the barycentric Lagrange form on the local Gauss points,
//! which is well conditioned for the small r used here.

use crate::linalg::DenseMatrix;
use crate::quadrature::QuadratureRule;
use thiserror::Error;

/// Largest supported local polynomial order parameter.
pub const MAX_ORDER: usize = 10;

/// Distance in the local coordinate below which a query point is treated as
/// coinciding with a Gauss node, so collocation values are returned exactly.
const NODE_SNAP: f64 = 1e-13;

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("polynomial order parameter r must be between 1 and {MAX_ORDER}, got {0}")]
    InvalidOrder(usize),
    #[error("partition needs at least one subinterval")]
    EmptyPartition,
    #[error("expected {expected} collocation values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("collocation value at flat index {0} is not finite")]
    NonFinite(usize),
}

/// Uniform partition of [0,1] into `n` subintervals with `r` Gauss collocation
/// nodes per subinterval.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid {
    n: usize,
    r: usize,
    h: f64,
    breakpoints: Vec<f64>,
    gauss_points: Vec<f64>,
    nodes: Vec<f64>,
    /// Barycentric weights of the local Gauss points.
    bary: Vec<f64>,
}

impl CollocationGrid {
    pub fn new(n: usize, r: usize) -> Result<Self, ProjectionError> {
        if n == 0 {
            return Err(ProjectionError::EmptyPartition);
        }
        if r == 0 || r > MAX_ORDER {
            return Err(ProjectionError::InvalidOrder(r));
        }
        let rule = QuadratureRule::gauss_legendre(r).expect("r is within the supported range");
        let gauss_points = rule.nodes().to_vec();
        let h = 1.0 / n as f64;
        let breakpoints: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
        let mut nodes = Vec::with_capacity(n * r);
        for k in 0..n {
            for &q in &gauss_points {
                nodes.push(breakpoints[k] + q * h);
            }
        }
        let mut bary = vec![1.0; r];
        for i in 0..r {
            for j in 0..r {
                if i != j {
                    bary[i] /= gauss_points[i] - gauss_points[j];
                }
            }
        }
        Ok(Self {
            n,
            r,
            h,
            breakpoints,
            gauss_points,
            nodes,
            bary,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Gauss–Legendre points of order `r` on the reference interval [0,1].
    pub fn gauss_points(&self) -> &[f64] {
        &self.gauss_points
    }

    /// All `n * r` collocation nodes, subinterval-major and increasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Total number of collocation nodes, `n * r`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the subinterval owning `s`: subintervals are half-open,
    /// `[t_k, t_{k+1})`, except the last which includes 1.
    pub fn subinterval_index(&self, s: f64) -> usize {
        assert!((0.0..=1.0).contains(&s), "point {s} outside [0,1]");
        let mut k = ((s * self.n as f64).floor() as usize).min(self.n - 1);
        // settle ties against the stored breakpoints so ownership follows
        // the stated convention even when s*n rounds across an integer
        if s < self.breakpoints[k] {
            k -= 1;
        } else if k + 1 < self.n && s >= self.breakpoints[k + 1] {
            k += 1;
        }
        k
    }

    /// Local coordinate of `s` within its subinterval, in [0,1].
    fn local_coordinate(&self, s: f64, k: usize) -> f64 {
        (s - self.breakpoints[k]) * self.n as f64
    }

    /// Values of the r local Lagrange cardinal functions at local coordinate
    /// `u`, written into `out`.
    fn cardinals(&self, u: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.r);
        if self.r == 1 {
            out[0] = 1.0;
            return;
        }
        for (i, &q) in self.gauss_points.iter().enumerate() {
            if (u - q).abs() < NODE_SNAP {
                out.fill(0.0);
                out[i] = 1.0;
                return;
            }
        }
        let mut den = 0.0;
        for i in 0..self.r {
            let t = self.bary[i] / (u - self.gauss_points[i]);
            out[i] = t;
            den += t;
        }
        for t in out.iter_mut() {
            *t /= den;
        }
    }
}

/// An element of the piecewise polynomial space, stored by its values at the
/// collocation nodes of its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    grid: CollocationGrid,
    values: Vec<f64>,
}

impl PiecewisePolynomial {
    /// The unique element of the space matching `values` at the collocation
    /// nodes.
    pub fn interpolate(
        grid: CollocationGrid,
        values: Vec<f64>,
    ) -> Result<Self, ProjectionError> {
        if values.len() != grid.len() {
            return Err(ProjectionError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(ProjectionError::NonFinite(idx));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &CollocationGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at `s` in [0,1]. Panics if `s` lies outside the interval.
    pub fn evaluate(&self, s: f64) -> f64 {
        let k = self.grid.subinterval_index(s);
        let u = self.grid.local_coordinate(s, k);
        let r = self.grid.r;
        let local = &self.values[k * r..(k + 1) * r];
        if r == 1 {
            return local[0];
        }
        let mut card = [0.0; MAX_ORDER];
        self.grid.cardinals(u, &mut card[..r]);
        local.iter().zip(&card[..r]).map(|(v, c)| v * c).sum()
    }
}

/// Interpolatory projection of `x`: sample at the collocation nodes and
/// interpolate.
pub fn project<F: Fn(f64) -> f64>(
    grid: &CollocationGrid,
    x: F,
) -> Result<PiecewisePolynomial, ProjectionError> {
    let values: Vec<f64> = grid.nodes().iter().map(|&t| x(t)).collect();
    PiecewisePolynomial::interpolate(grid.clone(), values)
}

/// Matrix applying the projection to collocation values and evaluating the
/// result at `points`: row `a` holds the local cardinal values for
/// `points[a]`, placed in the block of the owning subinterval.
pub fn interpolation_matrix(grid: &CollocationGrid, points: &[f64]) -> DenseMatrix {
    let r = grid.r();
    let mut out = DenseMatrix::zeros(points.len(), grid.len());
    let mut card = [0.0; MAX_ORDER];
    for (a, &s) in points.iter().enumerate() {
        let k = grid.subinterval_index(s);
        let u = grid.local_coordinate(s, k);
        grid.cardinals(u, &mut card[..r]);
        let row = out.row_mut(a);
        row[k * r..(k + 1) * r].copy_from_slice(&card[..r]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize, r: usize) -> CollocationGrid {
        CollocationGrid::new(n, r).unwrap()
    }

    #[test]
    fn grid_nodes_are_nested_gauss_points() {
        let g = grid(2, 1);
        assert_eq!(g.nodes(), &[0.25, 0.75]);
        let g = grid(4, 2);
        assert_eq!(g.len(), 8);
        assert!(g.nodes().windows(2).all(|p| p[0] < p[1]));
        for (k, w) in g.breakpoints().windows(2).enumerate() {
            for i in 0..2 {
                let node = g.nodes()[k * 2 + i];
                assert!(node > w[0] && node < w[1]);
            }
        }
        assert_eq!(
            g.gauss_points(),
            QuadratureRule::gauss_legendre(2).unwrap().nodes()
        );
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(CollocationGrid::new(0, 1).is_err());
        assert!(CollocationGrid::new(2, 0).is_err());
        assert!(CollocationGrid::new(2, MAX_ORDER + 1).is_err());
    }

    #[test]
    fn midpoint_interpolation_of_identity() {
        let p = PiecewisePolynomial::interpolate(grid(2, 1), vec![0.25, 0.75]).unwrap();
        assert_abs_diff_eq!(p.evaluate(0.1), 0.25, epsilon = 0.0);
        assert_abs_diff_eq!(p.evaluate(0.49), 0.25, epsilon = 0.0);
        // the right subinterval owns the breakpoint
        assert_abs_diff_eq!(p.evaluate(0.5), 0.75, epsilon = 0.0);
        assert_abs_diff_eq!(p.evaluate(1.0), 0.75, epsilon = 0.0);
    }

    #[test]
    fn reproduces_degree_one_functions_with_two_points() {
        let g = grid(4, 2);
        let p = project(&g, |t| 2.0 * t + 1.0).unwrap();
        assert_abs_diff_eq!(p.evaluate(0.3), 1.6, epsilon = 1e-14);
        for i in 0..=1000 {
            let s = i as f64 / 1000.0;
            assert_abs_diff_eq!(p.evaluate(s), 2.0 * s + 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn constant_projection_is_constant() {
        let g = grid(3, 2);
        let p = project(&g, |_| 3.0).unwrap();
        for i in 0..=100 {
            let s = i as f64 / 100.0;
            assert_abs_diff_eq!(p.evaluate(s), 3.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn midpoint_interpolation_error_of_square() {
        // oracle: dense scan of |t^2 - midpoint value| over 10^4 + 1 points
        let g = grid(2, 1);
        let p = project(&g, |t| t * t).unwrap();
        let mut max_err = 0.0f64;
        let mut arg = 0.0;
        for i in 0..=10_000 {
            let s = i as f64 / 10_000.0;
            let e = (s * s - p.evaluate(s)).abs();
            if e > max_err {
                max_err = e;
                arg = s;
            }
        }
        assert_abs_diff_eq!(max_err, 0.4375, epsilon = 1e-12);
        assert_abs_diff_eq!(arg, 1.0, epsilon = 0.0);
    }

    #[test]
    fn projection_fixes_the_space() {
        // deterministic values standing in for an arbitrary element
        let g = grid(3, 3);
        let values: Vec<f64> = (0..g.len()).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let p = PiecewisePolynomial::interpolate(g.clone(), values.clone()).unwrap();
        let reprojected = project(&g, |s| p.evaluate(s)).unwrap();
        for (a, b) in reprojected.values().iter().zip(&values) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
        for i in 0..=500 {
            let s = i as f64 / 500.0;
            assert_abs_diff_eq!(reprojected.evaluate(s), p.evaluate(s), epsilon = 1e-13);
        }
    }

    #[test]
    fn collocation_values_are_reproduced_exactly() {
        let g = grid(5, 4);
        let values: Vec<f64> = (0..g.len()).map(|i| (i as f64 * 0.37).sin()).collect();
        let p = PiecewisePolynomial::interpolate(g.clone(), values.clone()).unwrap();
        for (node, want) in g.nodes().iter().zip(&values) {
            assert_abs_diff_eq!(p.evaluate(*node), *want, epsilon = 1e-14);
        }
    }

    #[test]
    fn pieces_are_polynomials_of_the_right_degree() {
        let g = grid(2, 3);
        let values: Vec<f64> = (0..g.len()).map(|i| ((i * 5 + 1) % 7) as f64).collect();
        let p = PiecewisePolynomial::interpolate(g, values).unwrap();
        // r-th finite differences of equally spaced samples inside one
        // subinterval vanish for a polynomial of degree <= r-1
        let samples: Vec<f64> = (0..20)
            .map(|i| p.evaluate(0.01 + i as f64 * 0.02))
            .collect();
        let mut diffs = samples.clone();
        for _ in 0..3 {
            diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        }
        let scale = samples.iter().fold(1.0f64, |a, x| a.max(x.abs()));
        for d in diffs {
            assert!(
                d.abs() <= 1e-10 * scale,
                "third difference {d} too large for degree-2 piece"
            );
        }
    }

    #[test]
    fn interpolation_error_order_for_smooth_function() {
        for r in 1..=3usize {
            let sup_err = |n: usize| {
                let p = project(&grid(n, r), f64::sin).unwrap();
                let mut e = 0.0f64;
                for i in 0..=2000 {
                    let s = i as f64 / 2000.0;
                    e = e.max((p.evaluate(s) - s.sin()).abs());
                }
                e
            };
            let errs: Vec<f64> = [4usize, 8, 16, 32].iter().map(|&n| sup_err(n)).collect();
            for pair in errs.windows(2) {
                let order = (pair[0] / pair[1]).log2();
                assert!(
                    (order - r as f64).abs() <= 0.2,
                    "r={r}: observed order {order}"
                );
            }
        }
    }

    #[test]
    fn interpolate_rejects_bad_values() {
        let g = grid(2, 2);
        assert!(matches!(
            PiecewisePolynomial::interpolate(g.clone(), vec![1.0; 3]),
            Err(ProjectionError::LengthMismatch { expected: 4, got: 3 })
        ));
        assert!(matches!(
            PiecewisePolynomial::interpolate(g, vec![1.0, f64::NAN, 0.0, 0.0]),
            Err(ProjectionError::NonFinite(1))
        ));
    }

    #[test]
    #[should_panic(expected = "outside [0,1]")]
    fn evaluate_rejects_out_of_domain_points() {
        let p = PiecewisePolynomial::interpolate(grid(2, 1), vec![0.0, 1.0]).unwrap();
        p.evaluate(1.5);
    }

    #[test]
    fn interpolation_matrix_matches_pointwise_projection() {
        let g = grid(3, 2);
        let values: Vec<f64> = g.nodes().iter().map(|&t| (3.0 * t).cos()).collect();
        let p = PiecewisePolynomial::interpolate(g.clone(), values.clone()).unwrap();
        let points = [0.0, 0.123, 1.0 / 3.0, 0.5, 0.999, 1.0];
        let mat = interpolation_matrix(&g, &points);
        let applied = mat.matvec(&values);
        for (a, &s) in applied.iter().zip(&points) {
            assert_abs_diff_eq!(*a, p.evaluate(s), epsilon = 1e-14);
        }
    }
}
