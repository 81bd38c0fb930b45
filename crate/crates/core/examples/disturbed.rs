//! Disturbed (inconsistently connected) cycles: generalized counterfactual
//! definiteness holds while contextuality-by-default can go either way.

use contextuality::consistency::check_scc;
use contextuality::corpus::{disturbed_cycle, find_disturbed_contextual_cycle};
use contextuality::counterfactual::check_gcfd;
use contextuality::lp::{decide_noncontextual, Encoding};
use contextuality::model::System;
use contextuality::rational::format_rational;
use contextuality::report::{render_coupling, render_system};
use std::error::Error;

fn describe(name: &str, sys: &System) -> Result<(), Box<dyn Error>> {
    println!("== {name}\n{}", render_system(sys));
    for v in check_scc(sys).violations {
        println!(
            "disturbance on {{{}}} between {} and {}: total variation {}",
            v.contents.join(","),
            v.context_a,
            v.context_b,
            format_rational(&v.tv_distance)
        );
    }
    let verdict = decide_noncontextual(sys, Encoding::Cbd)?;
    println!("noncontextual (multimaximal coupling): {}", verdict.is_noncontextual());
    if let Some(w) = verdict.witness() {
        println!("{}", render_coupling(w));
    }
    println!("generalized counterfactual definiteness: {}\n", check_gcfd(sys)?.holds);
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    describe("deterministic disturbed cycle", &disturbed_cycle())?;
    let (seed, sys) = find_disturbed_contextual_cycle(0..10_000).ok_or("no contextual instance found")?;
    describe(&format!("contextual disturbed cycle (generator seed {seed})"), &sys)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
