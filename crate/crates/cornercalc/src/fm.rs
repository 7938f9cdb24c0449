//! Exact feasibility checking for systems of linear inequalities by
//! Fourier–Motzkin elimination.
//!
//! The systems that arise here are tiny (a handful of variables), so the
//! doubly exponential worst case is irrelevant and exact rational arithmetic
//! is affordable.

use crate::ratmat::Rat;
use num_traits::{Signed, Zero};

/// One inequality `coeffs . x <= rhs`.
#[derive(Clone, Debug)]
pub struct Ineq {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
}

impl Ineq {
    pub fn new(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Ineq { coeffs, rhs }
    }

    /// `coeffs . x >= rhs` rewritten as a `<=` constraint.
    pub fn ge(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Ineq {
            coeffs: coeffs.into_iter().map(|c| -c).collect(),
            rhs: -rhs,
        }
    }
}

/// Both inequalities of the equation `coeffs . x = rhs`.
pub fn eq_pair(coeffs: Vec<Rat>, rhs: Rat) -> [Ineq; 2] {
    let le = Ineq::new(coeffs.clone(), rhs.clone());
    let ge = Ineq::ge(coeffs, rhs);
    [le, ge]
}

/// Decides whether `{ x : A x <= b }` is nonempty.
pub fn feasible(mut system: Vec<Ineq>, nvars: usize) -> bool {
    debug_assert!(system.iter().all(|i| i.coeffs.len() == nvars));
    for var in (0..nvars).rev() {
        let mut lowers: Vec<Ineq> = Vec::new(); // negative coefficient on var
        let mut uppers: Vec<Ineq> = Vec::new(); // positive coefficient on var
        let mut rest: Vec<Ineq> = Vec::new();
        for ineq in system {
            match ineq.coeffs[var].cmp(&Rat::zero()) {
                std::cmp::Ordering::Less => lowers.push(ineq),
                std::cmp::Ordering::Greater => uppers.push(ineq),
                std::cmp::Ordering::Equal => rest.push(ineq),
            }
        }
        // Combine every lower bound with every upper bound so that the
        // variable cancels; constraints that never mention it survive as-is.
        for lo in &lowers {
            for up in &uppers {
                let a = -lo.coeffs[var].clone(); // > 0
                let b = up.coeffs[var].clone(); // > 0
                let mut coeffs = Vec::with_capacity(var);
                for c in 0..var {
                    coeffs.push(&lo.coeffs[c] * &b + &up.coeffs[c] * &a);
                }
                let rhs = &lo.rhs * &b + &up.rhs * &a;
                rest.push(Ineq::new(coeffs, rhs));
            }
        }
        for ineq in &mut rest {
            ineq.coeffs.truncate(var);
        }
        system = rest;
    }
    // Only constant constraints 0 <= rhs remain.
    system.iter().all(|i| !i.rhs.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmat::rat;

    fn rv(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn simplex_interior_is_feasible() {
        // x >= 0, y >= 0, x + y <= 1
        let sys = vec![
            Ineq::ge(rv(&[1, 0]), rat(0)),
            Ineq::ge(rv(&[0, 1]), rat(0)),
            Ineq::new(rv(&[1, 1]), rat(1)),
        ];
        assert!(feasible(sys, 2));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        // x >= 1 and x <= 0
        let sys = vec![Ineq::ge(rv(&[1]), rat(1)), Ineq::new(rv(&[1]), rat(0))];
        assert!(!feasible(sys, 1));
    }

    #[test]
    fn equations_combine_with_inequalities() {
        // x + y = 1, x >= 2, y >= 0 is infeasible
        let mut sys = eq_pair(rv(&[1, 1]), rat(1)).to_vec();
        sys.push(Ineq::ge(rv(&[1, 0]), rat(2)));
        sys.push(Ineq::ge(rv(&[0, 1]), rat(0)));
        assert!(!feasible(sys, 2));

        // x + y = 1, x >= 0, y >= 0 is feasible
        let mut sys2 = eq_pair(rv(&[1, 1]), rat(1)).to_vec();
        sys2.push(Ineq::ge(rv(&[1, 0]), rat(0)));
        sys2.push(Ineq::ge(rv(&[0, 1]), rat(0)));
        assert!(feasible(sys2, 2));
    }

    #[test]
    fn zero_variable_system_checks_constants() {
        assert!(feasible(vec![Ineq::new(vec![], rat(0))], 0));
        assert!(!feasible(vec![Ineq::new(vec![], rat(-1))], 0));
    }
}
