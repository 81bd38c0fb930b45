//! The exact rational simplex on its own: a feasibility problem with a
//! Farkas certificate, and the maximal-coincidence coupling of two marginals.

use contextuality::consistency::max_coincidence;
use contextuality::lp::{check_certificate, maximize, solve_feasibility, LpOptimum, LpOutcome, LpProblem};
use contextuality::model::{Marginal, Support};
use contextuality::rational::{format_rational, int, rat};
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // x0 + x1 = 1 and x1 + x2 = 1 force x0 + x2 <= 2: the third row is
    // satisfiable at 1/2 and infeasible at 3.
    for third in [rat(1, 2), int(3)] {
        let mut lp = LpProblem::new(3);
        lp.add_constraint([(0, int(1)), (1, int(1))], int(1));
        lp.add_constraint([(1, int(1)), (2, int(1))], int(1));
        lp.add_constraint([(0, int(1)), (2, int(1))], third.clone());
        match solve_feasibility(&lp)? {
            LpOutcome::Feasible { witness } => {
                let w: Vec<String> = witness.iter().map(format_rational).collect();
                println!("x0 + x2 = {}: feasible at ({})", format_rational(&third), w.join(", "));
            }
            LpOutcome::Infeasible { certificate } => {
                let y: Vec<String> = certificate.iter().map(format_rational).collect();
                println!(
                    "x0 + x2 = {}: infeasible, y = ({}), verified: {}",
                    format_rational(&third),
                    y.join(", "),
                    check_certificate(&lp, &certificate)
                );
            }
        }
    }

    // Maximal coincidence of (7/10, 3/10) and (1/2, 1/2) via the coupling polytope.
    let support = Support::plus_minus();
    let a = Marginal::single("q", support.clone(), vec![rat(7, 10), rat(3, 10)]);
    let b = Marginal::single("q", support, vec![rat(1, 2), rat(1, 2)]);
    let mut lp = LpProblem::new(4);
    for u in 0..2 {
        lp.add_constraint((0..2).map(|v| (2 * u + v, int(1))), a.probability(&[u]));
        lp.add_constraint((0..2).map(|v| (2 * v + u, int(1))), b.probability(&[u]));
    }
    if let LpOptimum::Optimal { value, solution, .. } = maximize(&lp, &[(0, int(1)), (3, int(1))])? {
        let s: Vec<String> = solution.iter().map(format_rational).collect();
        println!(
            "max P(S = S') = {} at ({}); sum of minima = {}",
            format_rational(&value),
            s.join(", "),
            format_rational(&max_coincidence(&a, &b)?)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
