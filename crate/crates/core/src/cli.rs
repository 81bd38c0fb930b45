//! Command-line front end.
//!
//! Exit codes: 0 the property holds (or the system is noncontextual), 1 it
//! fails (or the system is contextual), 2 input error, 3 size guard hit.

use crate::consistency::check_scc;
use crate::corpus::magic_box;
use crate::counterfactual::{
    check_cfd_with, check_gcfd_with, construct_ic_coupling, extend_full_coupling, fcf_subsystem, CfdError,
    CfdMode,
};
use crate::cyclic::{as_cyclic3, cyclic3_contextual, CyclicShape};
use crate::document::{parse_document, parse_system, serialize_system};
use crate::lp::{decide_noncontextual_with, DecideError, Encoding, LpError, SolverConfig, DEFAULT_MAX_COLUMNS};
use crate::model::{validate_system, System};
use crate::report::{
    build_report, cfd_json, coupling_json, cyclic_json, render_coupling, render_cyclic, render_system, scc_json,
    verdict_json, violations_json,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "contextuality", version, about = "Contextuality and counterfactual definiteness of systems of random variables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Data)]
    pub format: Format,
    /// Analyze several input files concurrently
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Refuse linear programs with more unknowns than this
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_COLUMNS)]
    pub max_columns: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Data,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EncodingArg {
    Scc,
    Cbd,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the document and the system invariants
    Validate { files: Vec<PathBuf> },
    /// Strong consistent connectedness
    Scc { files: Vec<PathBuf> },
    /// Decide (non)contextuality
    Contextuality {
        #[arg(long, value_enum, default_value_t = EncodingArg::Scc)]
        encoding: EncodingArg,
        /// Include the witness coupling or the Farkas certificate
        #[arg(long)]
        witness: bool,
        files: Vec<PathBuf>,
    },
    /// Counterfactual definiteness (strongly consistently connected systems)
    Cfd {
        #[arg(long)]
        witness: bool,
        /// Also solve each subsystem's linear program
        #[arg(long)]
        verify: bool,
        files: Vec<PathBuf>,
    },
    /// Generalized counterfactual definiteness
    Gcfd {
        #[arg(long)]
        witness: bool,
        files: Vec<PathBuf>,
    },
    /// Print the factual-counterfactual subsystem of a context as a document
    Fcf {
        #[arg(long)]
        context: String,
        files: Vec<PathBuf>,
    },
    /// Rank-3 cyclic inequality
    Cyclic3 { files: Vec<PathBuf> },
    /// Everything above in one report
    Report {
        #[arg(long)]
        witness: bool,
        files: Vec<PathBuf>,
    },
    /// Walk through the three-box example
    Demo,
}

/// Result of one command on one input.
struct Outcome {
    code: i32,
    data: Value,
    text: String,
}

impl Outcome {
    fn error(code: i32, message: String) -> Self {
        Self {
            code,
            data: json!({ "error": message }),
            text: format!("error: {message}\n"),
        }
    }
}

fn holds(b: bool) -> i32 {
    if b {
        EXIT_HOLDS
    } else {
        EXIT_FAILS
    }
}

fn lp_code(e: &LpError) -> i32 {
    match e {
        LpError::TooLarge { .. } => EXIT_GUARD,
        _ => EXIT_INPUT,
    }
}

fn decide_code(e: &DecideError) -> i32 {
    match e {
        DecideError::Lp(l) => lp_code(l),
        _ => EXIT_INPUT,
    }
}

fn cfd_code(e: &CfdError) -> i32 {
    match e {
        CfdError::Decide(d) => decide_code(d),
        CfdError::TooLarge(_) => EXIT_GUARD,
        _ => EXIT_INPUT,
    }
}

/// Accepts `fixtures/magic_box` for `fixtures/magic_box.json`.
fn resolve(path: &Path) -> PathBuf {
    if !path.exists() && path.extension().is_none() {
        let with = path.with_extension("json");
        if with.exists() {
            return with;
        }
    }
    path.to_path_buf()
}

fn load(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(resolve(path))
        .map_err(|e| Outcome::error(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<System, Outcome> {
    parse_system(&load(path)?).map_err(|e| Outcome::error(EXIT_INPUT, e.to_string()))
}

fn run_one(cmd: &Command, path: &Path, config: &SolverConfig) -> Outcome {
    let result = (|| -> Result<Outcome, Outcome> {
        Ok(match cmd {
            Command::Validate { .. } => {
                let text = load(path)?;
                let doc = parse_document(&text).map_err(|e| Outcome::error(EXIT_INPUT, e.to_string()))?;
                let sys = doc.to_system().map_err(|e| Outcome::error(EXIT_INPUT, e.to_string()))?;
                let located: Vec<String> = doc.locate(&validate_system(&sys)).iter().map(ToString::to_string).collect();
                let text = if located.is_empty() {
                    "valid\n".to_string()
                } else {
                    located.iter().map(|l| format!("{l}\n")).collect()
                };
                Outcome {
                    code: holds(located.is_empty()),
                    data: violations_json(&located),
                    text,
                }
            }
            Command::Scc { .. } => {
                let sys = load_system(path)?;
                let rep = check_scc(&sys);
                let mut text = format!("strongly consistently connected: {}\n", rep.holds);
                for v in &rep.violations {
                    text.push_str(&format!(
                        "  contexts {} and {} differ on {{{}}}\n",
                        v.context_a,
                        v.context_b,
                        v.contents.join(", ")
                    ));
                }
                Outcome {
                    code: holds(rep.holds),
                    data: scc_json(&rep),
                    text,
                }
            }
            Command::Contextuality { encoding, witness, .. } => {
                let sys = load_system(path)?;
                let enc = match encoding {
                    EncodingArg::Scc => Encoding::Scc,
                    EncodingArg::Cbd => Encoding::Cbd,
                };
                let v = decide_noncontextual_with(&sys, enc, config)
                    .map_err(|e| Outcome::error(decide_code(&e), e.to_string()))?;
                let mut text = format!(
                    "{}: {}\n",
                    enc,
                    if v.is_noncontextual() { "noncontextual" } else { "contextual" }
                );
                if *witness {
                    if let Some(c) = v.witness() {
                        text.push_str(&render_coupling(c));
                    }
                    if let Some(cert) = v.certificate() {
                        text.push_str("Farkas multipliers:\n");
                        for (row, y) in cert.rows.iter().zip(&cert.multipliers) {
                            if !num_traits::Zero::is_zero(y) {
                                text.push_str(&format!("  {row:?}: {}\n", crate::rational::format_rational(y)));
                            }
                        }
                    }
                }
                Outcome {
                    code: holds(v.is_noncontextual()),
                    data: verdict_json(Some(&sys), &v, *witness),
                    text,
                }
            }
            Command::Cfd { witness, verify, .. } => {
                let sys = load_system(path)?;
                let mode = if *verify { CfdMode::Verify } else { CfdMode::Constructive };
                let rep = check_cfd_with(&sys, mode, config).map_err(|e| Outcome::error(cfd_code(&e), e.to_string()))?;
                Outcome {
                    code: holds(rep.holds),
                    text: cfd_text("counterfactual definiteness", rep.holds, &rep.per_context),
                    data: cfd_json(&sys, &rep, *witness),
                }
            }
            Command::Gcfd { witness, .. } => {
                let sys = load_system(path)?;
                let rep = check_gcfd_with(&sys, config).map_err(|e| Outcome::error(cfd_code(&e), e.to_string()))?;
                Outcome {
                    code: holds(rep.holds),
                    text: cfd_text("generalized counterfactual definiteness", rep.holds, &rep.per_context),
                    data: cfd_json(&sys, &rep, *witness),
                }
            }
            Command::Fcf { context, .. } => {
                let sys = load_system(path)?;
                let sub = fcf_subsystem(&sys, context).map_err(|e| Outcome::error(EXIT_INPUT, e.to_string()))?;
                let doc = serialize_system(&sub.system);
                Outcome {
                    code: EXIT_HOLDS,
                    data: serde_json::from_str(&doc).expect("serialized document is JSON"),
                    text: render_system(&sub.system),
                }
            }
            Command::Cyclic3 { .. } => {
                let sys = load_system(path)?;
                match as_cyclic3(&sys).map_err(|e| Outcome::error(EXIT_INPUT, e.to_string()))? {
                    CyclicShape::Cyclic3(view) => {
                        let c = cyclic3_contextual(&view);
                        Outcome {
                            code: holds(!c.contextual),
                            data: cyclic_json(&view, &c),
                            text: render_cyclic(&c),
                        }
                    }
                    CyclicShape::NotCyclic3(why) => {
                        return Err(Outcome::error(EXIT_INPUT, format!("not a cyclic system of rank 3: {why}")))
                    }
                }
            }
            Command::Report { witness, .. } => {
                let sys = load_system(path)?;
                let rep = build_report(&sys, config);
                Outcome {
                    code: EXIT_HOLDS,
                    data: rep.to_json(*witness),
                    text: rep.to_text(),
                }
            }
            Command::Demo => demo(config),
        })
    })();
    result.unwrap_or_else(|e| e)
}

fn cfd_text(
    name: &str,
    holds: bool,
    per: &std::collections::BTreeMap<String, crate::lp::NoncontextualityVerdict>,
) -> String {
    let mut s = format!("{name}: {}\n", if holds { "holds" } else { "fails" });
    for (c, v) in per {
        s.push_str(&format!(
            "  factual context {c}: {}\n",
            if v.is_noncontextual() { "noncontextual" } else { "contextual" }
        ));
    }
    s
}

/// The three-box walkthrough: contextual, yet every factual frame is consistent.
fn demo(config: &SolverConfig) -> Outcome {
    let sys = magic_box();
    let mut text = String::from("Three boxes, two opened at a time; exactly one of them holds the gem.\n\n");
    text.push_str(&render_system(&sys));
    let scc = check_scc(&sys);
    text.push_str(&format!("\nno disturbance (strongly consistently connected): {}\n", scc.holds));
    let verdict = decide_noncontextual_with(&sys, Encoding::Scc, config).expect("fixture is consistent");
    text.push_str(&format!(
        "reduced coupling over the 8 joint assignments exists: {} -> the system is {}\n",
        verdict.is_noncontextual(),
        if verdict.is_noncontextual() { "noncontextual" } else { "contextual" }
    ));
    let cfd = check_cfd_with(&sys, CfdMode::Verify, config).expect("fixture is consistent");
    text.push_str(&format!(
        "\ncounterfactual definiteness: {}\n",
        if cfd.holds { "holds" } else { "fails" }
    ));
    let mut ic = Map::new();
    for c0 in sys.contexts() {
        let coupling = construct_ic_coupling(&sys, c0).expect("fixture is consistent");
        text.push_str(&format!("\nfactual context {c0}: counterfactual copies equal the factual values\n"));
        text.push_str(&render_coupling(&coupling));
        ic.insert(c0.clone(), coupling_json(&coupling));
    }
    let both = extend_full_coupling(&sys, "2").expect("fixture is consistent");
    text.push_str("\nanswering both counterfactual questions from factual context 2:\n");
    text.push_str(&render_coupling(&both));
    text.push_str("content 1 receives opposite values in contexts 1 and 3; the clash only\nappears when two counterfactual contexts are compared with each other.\n\n");
    let cyc = match as_cyclic3(&sys) {
        Ok(CyclicShape::Cyclic3(view)) => Some((cyclic3_contextual(&view), view)),
        _ => None,
    };
    if let Some((c, _)) = &cyc {
        text.push_str(&render_cyclic(c));
    }
    let data = json!({
        "scc": scc_json(&scc),
        "contextuality": verdict_json(Some(&sys), &verdict, false),
        "cfd": cfd_json(&sys, &cfd, false),
        "ic_couplings": ic,
        "full_coupling_factual_2": coupling_json(&both),
        "cyclic3": cyc.map(|(c, v)| cyclic_json(&v, &c)),
    });
    Outcome {
        code: EXIT_HOLDS,
        data,
        text,
    }
}

fn files(cmd: &Command) -> &[PathBuf] {
    match cmd {
        Command::Validate { files }
        | Command::Scc { files }
        | Command::Contextuality { files, .. }
        | Command::Cfd { files, .. }
        | Command::Gcfd { files, .. }
        | Command::Fcf { files, .. }
        | Command::Cyclic3 { files }
        | Command::Report { files, .. } => files,
        Command::Demo => &[],
    }
}

/// Parses arguments, runs the command and writes the output; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_HOLDS };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let config = SolverConfig {
        max_columns: cli.max_columns,
    };
    let inputs = files(&cli.command);
    let outcomes: Vec<(String, Outcome)> = if matches!(cli.command, Command::Demo) {
        vec![(String::new(), run_one(&cli.command, Path::new(""), &config))]
    } else if inputs.is_empty() {
        let _ = writeln!(err, "error: no input files");
        return EXIT_INPUT;
    } else {
        run_many(&cli.command, inputs, &config, cli.jobs.max(1))
    };

    let code = outcomes.iter().map(|(_, o)| o.code).max().unwrap_or(EXIT_HOLDS);
    for (_, o) in &outcomes {
        if o.code >= EXIT_INPUT {
            if let Some(msg) = o.data.get("error").and_then(Value::as_str) {
                let _ = writeln!(err, "error: {msg}");
            }
        }
    }
    let _ = match cli.format {
        Format::Data => {
            let value = if outcomes.len() == 1 {
                outcomes.into_iter().next().expect("one outcome").1.data
            } else {
                Value::Object(outcomes.into_iter().map(|(k, o)| (k, o.data)).collect())
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("json"))
        }
        Format::Text => {
            let many = outcomes.len() > 1;
            outcomes.iter().try_for_each(|(k, o)| {
                if many {
                    writeln!(out, "== {k}")?;
                }
                write!(out, "{}", o.text)
            })
        }
    };
    code
}

fn run_many(cmd: &Command, inputs: &[PathBuf], config: &SolverConfig, jobs: usize) -> Vec<(String, Outcome)> {
    let label = |p: &PathBuf| p.display().to_string();
    if jobs == 1 || inputs.len() == 1 {
        return inputs.iter().map(|p| (label(p), run_one(cmd, p, config))).collect();
    }
    let chunk = inputs.len().div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = inputs
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|p| (label(p), run_one(cmd, p, config))).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}
