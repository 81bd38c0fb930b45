//! Walks through the magic box: consistency, contextuality with a Farkas
//! certificate, counterfactual definiteness, and the rank-3 inequality.

use contextuality::consistency::check_scc;
use contextuality::corpus::magic_box;
use contextuality::counterfactual::{check_cfd, construct_ic_coupling, extend_full_coupling};
use contextuality::cyclic::{as_cyclic3, cyclic3_contextual, CyclicShape};
use contextuality::lp::{check_certificate, decide_noncontextual, encode_reduced_coupling, Encoding, SolverConfig};
use contextuality::rational::format_rational;
use contextuality::report::{render_coupling, render_cyclic, render_system};
use num_traits::Zero;
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sys = magic_box();
    println!("{}", render_system(&sys));
    println!("strongly consistently connected: {}", check_scc(&sys).holds);

    let program = encode_reduced_coupling(&sys, &SolverConfig::default())?;
    let verdict = decide_noncontextual(&sys, Encoding::Scc)?;
    let cert = verdict.certificate().ok_or("expected a contextual verdict")?;
    println!(
        "\nreduced coupling: {} unknowns, {} rows -> contextual",
        program.lp.num_vars,
        program.lp.constraints.len()
    );
    println!("Farkas multipliers (nonzero rows):");
    for (row, y) in cert.rows.iter().zip(&cert.multipliers).filter(|(_, y)| !y.is_zero()) {
        println!("  {row:<14} {}", format_rational(y));
    }
    println!("certificate re-verifies: {}", check_certificate(&program.lp, &cert.multipliers));

    let cfd = check_cfd(&sys)?;
    println!("\ncounterfactual definiteness: {}", cfd.holds);
    for c0 in sys.contexts() {
        println!("\nindependent-counterfactual coupling, factual context {c0}:");
        println!("{}", render_coupling(&construct_ic_coupling(&sys, c0)?));
    }
    println!("\nfull coupling extended from context 2:");
    println!("{}", render_coupling(&extend_full_coupling(&sys, "2")?));

    if let CyclicShape::Cyclic3(view) = as_cyclic3(&sys)? {
        println!("\n{}", render_cyclic(&cyclic3_contextual(&view)));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
