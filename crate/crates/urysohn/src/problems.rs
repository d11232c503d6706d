//! Built-in problem registry.
//!
//! `inverse-sum` is the benchmark equation with kernel 1/(s+t+u) whose
//! right-hand side is manufactured so that 1/(1+t) solves it; `linear-half`
//! is a trivially solvable linear equation useful for smoke tests.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::operator::UrysohnProblem;
use crate::quadrature::{CompositeQuadrature, QuadratureRule};

/// Names accepted by [`by_name`].
pub const REGISTRY: &[&str] = &["inverse-sum", "linear-half"];

pub fn by_name(name: &str) -> Option<UrysohnProblem> {
    match name {
        "inverse-sum" => Some(inverse_sum()),
        "linear-half" => Some(linear_half()),
        _ => None,
    }
}

/// κ(s,t,u) = 1/(s+t+u) with exact solution φ(t) = 1/(1+t).
///
/// The right-hand side has no closed form here; it is manufactured as
/// f(s) = φ(s) - ∫ κ(s,t,φ(t)) dt with the integral evaluated by a
/// high-precision composite Gauss rule, cross-checked against the same rule
/// on a doubled mesh. Values are memoized per evaluation point.
pub fn inverse_sum() -> UrysohnProblem {
    let phi = |t: f64| 1.0 / (1.0 + t);
    let reference = ReferenceIntegral::new(move |s, t| 1.0 / (s + t + phi(t)));
    let rhs = move |s: f64| phi(s) - reference.eval(s);
    UrysohnProblem::new(
        |s, t, u| 1.0 / (s + t + u),
        |s, t, u| -1.0 / ((s + t + u) * (s + t + u)),
        rhs,
    )
    .with_exact_solution(phi)
}

/// κ(s,t,u) = u/2 with f ≡ 1; the solution is the constant 2.
pub fn linear_half() -> UrysohnProblem {
    UrysohnProblem::new(|_, _, u| u / 2.0, |_, _, _| 0.5, |_| 1.0)
        .with_exact_solution(|_| 2.0)
}

/// Mesh size of the reference rule used to manufacture right-hand sides.
const REFERENCE_SUBINTERVALS: usize = 4096;
/// Agreement required between the reference rule and its doubled-mesh check.
const REFERENCE_SELF_CHECK: f64 = 1e-13;

/// s ↦ ∫ g(s,t) dt by a 5-point composite Gauss rule, with a doubled-mesh
/// self-check on every fresh evaluation and a memo of computed values.
struct ReferenceIntegral<G> {
    integrand: G,
    coarse: CompositeQuadrature,
    fine: CompositeQuadrature,
    memo: Mutex<HashMap<u64, f64>>,
}

impl<G: Fn(f64, f64) -> f64> ReferenceIntegral<G> {
    fn new(integrand: G) -> Self {
        let base = QuadratureRule::gauss_legendre(5).expect("5-point rule is supported");
        let coarse = CompositeQuadrature::new(base.clone(), REFERENCE_SUBINTERVALS)
            .expect("positive subinterval count");
        let fine = CompositeQuadrature::new(base, 2 * REFERENCE_SUBINTERVALS)
            .expect("positive subinterval count");
        Self {
            integrand,
            coarse,
            fine,
            memo: Mutex::new(HashMap::new()),
        }
    }

    fn eval(&self, s: f64) -> f64 {
        let key = s.to_bits();
        if let Some(&v) = self.memo.lock().unwrap().get(&key) {
            return v;
        }
        let coarse = compensated_quadrature(&self.coarse, |t| (self.integrand)(s, t));
        let fine = compensated_quadrature(&self.fine, |t| (self.integrand)(s, t));
        assert!(
            (coarse - fine).abs() <= REFERENCE_SELF_CHECK,
            "reference quadrature self-check failed at s={s}: \
             {coarse:.17e} vs {fine:.17e}"
        );
        self.memo.lock().unwrap().insert(key, fine);
        fine
    }
}

/// Quadrature sum with Kahan compensation; the manufactured right-hand side
/// should contribute error well below the solution families it feeds.
fn compensated_quadrature<F: Fn(f64) -> f64>(quad: &CompositeQuadrature, f: F) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for (&x, &w) in quad.nodes().iter().zip(quad.weights()) {
        let term = w * f(x) - carry;
        let next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn registry_resolves_known_names() {
        for name in REGISTRY {
            assert!(by_name(name).is_some(), "missing registry entry {name}");
        }
        assert!(by_name("no-such-problem").is_none());
    }

    #[test]
    fn manufactured_rhs_makes_phi_a_solution() {
        // residual of the continuous equation at a few points, using an
        // independent quadrature for the integral term
        let prob = inverse_sum();
        let phi = |t: f64| 1.0 / (1.0 + t);
        let check = CompositeQuadrature::new(
            QuadratureRule::gauss_legendre(4).unwrap(),
            2000,
        )
        .unwrap();
        for s in [0.0, 0.17, 0.5, 0.83, 1.0] {
            let integral = check.integrate(|t| prob.kappa(s, t, phi(t)));
            assert_abs_diff_eq!(phi(s) - integral, prob.rhs(s), epsilon = 1e-12);
        }
    }

    #[test]
    fn rhs_memoization_is_stable() {
        let prob = inverse_sum();
        let first = prob.rhs(0.375);
        let second = prob.rhs(0.375);
        assert_eq!(first, second);
    }

    #[test]
    fn derivative_fields_are_consistent() {
        for name in REGISTRY {
            let prob = by_name(name).unwrap();
            // solutions of both problems stay within (0.4, 2.1)
            prob.verify_derivative((0.4, 2.1)).unwrap();
        }
    }

    #[test]
    fn linear_problem_solution_is_exact() {
        let prob = linear_half();
        let phi = prob.exact_solution().unwrap();
        assert_eq!(phi(0.3), 2.0);
        assert_eq!(prob.rhs(0.9), 1.0);
    }
}
