//! Command-line front end and JSON file formats.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::harness::{gen_feasible_bounds, gen_k_connected, gen_laminar, random_costs, rng};
use crate::model::{default_eta, Edge, EdgeId, FracPoint, Graph, Instance, LaminarFamily, LaminarSet};
use crate::oracles::min_partition;
use crate::pipeline::{solve_instance, solve_lp2, verify_report, TreeReport};
use crate::reduction::reduce;
use crate::rounding::round_aligned;
use crate::Rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub id: u32,
    pub u: usize,
    pub v: usize,
    pub cost: Rational,
}

/// On-disk instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub vertices: usize,
    pub edges: Vec<EdgeEntry>,
    #[serde(default)]
    pub laminar: Vec<LaminarSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Rational>,
}

impl InstanceFile {
    pub fn to_instance(&self, eta: Option<Rational>) -> Result<Instance> {
        let edges = self.edges.iter().map(|e| Edge::new(e.id, e.u, e.v)).collect();
        let graph = Graph::new(self.vertices, edges)?;
        let family = LaminarFamily::new(self.laminar.clone())?;
        let costs = self.edges.iter().map(|e| (EdgeId(e.id), e.cost.clone())).collect();
        let eta = eta.or_else(|| self.eta.clone()).unwrap_or_else(default_eta);
        Instance::new(graph, family, costs, eta)
    }

    pub fn from_instance(inst: &Instance) -> Self {
        InstanceFile {
            vertices: inst.graph.vertex_count(),
            edges: inst
                .graph
                .edges()
                .iter()
                .map(|e| EdgeEntry {
                    id: e.id.0,
                    u: e.u,
                    v: e.v,
                    cost: inst.costs.get(&e.id).cloned().unwrap_or_default(),
                })
                .collect(),
            laminar: inst.family.sets().to_vec(),
            eta: Some(inst.eta.clone()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lamtree", version, about = "Laminar-constrained thin spanning trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the relaxation, reduce, round, and write a certified report.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        eta: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the relaxation only and dump the basic optimum.
    Lp {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce the family against a point and print the aligned point.
    Reduce {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Round a point aligned with the instance family.
    Round {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recount a report against its instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Generate a k-edge-connected instance with feasible bounds.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum partition of the instance graph under edge weights.
    MinPartition {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        weights: PathBuf,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::Input(_) | Error::ForeignEdge(_) | Error::TooLarge { .. } | Error::Precondition { .. } => EXIT_INPUT,
        Error::Invariant { .. } | Error::Unbounded | Error::NotWellConnected(_) => EXIT_INTERNAL,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

pub fn load_instance(path: &Path, eta: Option<Rational>) -> Result<Instance> {
    parse::<InstanceFile>(path)?.to_instance(eta)
}

/// A point file is either a bare map from edge id to value or an object with
/// an "x" field holding one.
pub fn load_point(path: &Path) -> Result<FracPoint> {
    let mut v: Value = parse(path)?;
    if let Some(inner) = v.get_mut("x") {
        v = inner.take();
    }
    serde_json::from_value(v).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("json values serialize") + "\n";
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::input(format!("{}: {e}", p.display()))),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn infeasible(reason: &str) -> Value {
    json!({ "status": "infeasible", "reason": reason })
}

fn run_command(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Solve { instance, eta, out } => {
            let eta = eta
                .map(|s| s.parse::<Rational>().map_err(|e| Error::input(format!("--eta: {e}"))))
                .transpose()?;
            let inst = load_instance(&instance, eta)?;
            match solve_instance(&inst) {
                Ok(run) => {
                    emit(out.as_deref(), &serde_json::to_value(&run.report).expect("report serializes"))?;
                    Ok(EXIT_OK)
                }
                Err(Error::Infeasible(msg)) => {
                    emit(out.as_deref(), &infeasible(&msg))?;
                    Ok(EXIT_INFEASIBLE)
                }
                Err(e) => Err(e),
            }
        }
        Command::Lp { instance, out } => {
            let inst = load_instance(&instance, None)?;
            match solve_lp2(&inst.graph, &inst.family, &inst.costs) {
                Ok(sol) => {
                    let rows: Vec<&str> = sol.tight_rows.iter().map(|r| r.label.as_str()).collect();
                    emit(
                        out.as_deref(),
                        &json!({
                            "status": "ok",
                            "value": sol.value,
                            "x": sol.x,
                            "tight_rows": rows,
                            "rounds": sol.rounds,
                        }),
                    )?;
                    Ok(EXIT_OK)
                }
                Err(Error::Infeasible(msg)) => {
                    emit(out.as_deref(), &infeasible(&msg))?;
                    Ok(EXIT_INFEASIBLE)
                }
                Err(e) => Err(e),
            }
        }
        Command::Reduce { instance, x, out } => {
            let inst = load_instance(&instance, None)?;
            let x = load_point(&x)?;
            let red = reduce(&inst.graph, &inst.family, &x, &inst.eta)?;
            emit(
                out.as_deref(),
                &json!({
                    "status": "ok",
                    "eta": inst.eta,
                    "family": red.reduction.family.sets(),
                    "replacements": red.reduction.replacements,
                    "trace": red.reduction.trace,
                    "x": red.aligned_point,
                }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Round { instance, x, out } => {
            let inst = load_instance(&instance, None)?;
            let x = load_point(&x)?;
            let res = round_aligned(&inst.graph, &inst.family, &x, &inst.costs)?;
            emit(
                out.as_deref(),
                &json!({
                    "status": "ok",
                    "tree": res.basis,
                    "cost": { "tree": inst.cost_of(&res.basis), "lp": res.root_value },
                    "bounds": res.bounds.iter().map(|(k, v)| (k.0.to_string(), *v)).collect::<std::collections::BTreeMap<_, _>>(),
                    "log": res.log,
                    "depth": res.depth,
                    "measure": res.measure,
                }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Verify { instance, report } => {
            let inst = load_instance(&instance, None)?;
            let raw: Value = parse(&report)?;
            if raw.get("status").and_then(Value::as_str) == Some("infeasible") {
                return match solve_lp2(&inst.graph, &inst.family, &inst.costs) {
                    Err(Error::Infeasible(_)) => {
                        println!("ok: relaxation is infeasible");
                        Ok(EXIT_OK)
                    }
                    Ok(_) => {
                        println!("FAIL: report says infeasible but the relaxation is feasible");
                        Ok(EXIT_VERIFY_FAILED)
                    }
                    Err(e) => Err(e),
                };
            }
            let report: TreeReport =
                serde_json::from_value(raw).map_err(|e| Error::input(format!("{}: {e}", report.display())))?;
            let inst = Instance { eta: report.eta.clone(), ..inst };
            match verify_report(&inst, &report) {
                Ok(()) => {
                    println!("ok");
                    Ok(EXIT_OK)
                }
                Err(problems) => {
                    for p in problems {
                        println!("FAIL: {p}");
                    }
                    Ok(EXIT_VERIFY_FAILED)
                }
            }
        }
        Command::Gen { n, k, seed, depth, out } => {
            let g = gen_k_connected(n, k, seed)?;
            let fam = gen_laminar(&g, seed.wrapping_add(1), depth);
            let (fam, _) = gen_feasible_bounds(&g, &fam, seed.wrapping_add(2));
            let costs = random_costs(&g, &mut rng(seed.wrapping_add(3)));
            let inst = Instance::new(g, fam, costs, default_eta())?;
            emit(
                out.as_deref(),
                &serde_json::to_value(InstanceFile::from_instance(&inst)).expect("instance serializes"),
            )?;
            Ok(EXIT_OK)
        }
        Command::MinPartition { instance, weights } => {
            let inst = load_instance(&instance, None)?;
            let w = load_point(&weights)?;
            let (p, value) = min_partition(&inst.graph, &w)?;
            emit(None, &json!({ "partition": p.blocks(), "value": value }))?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `argv` (program name first), runs one subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run_command(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_file_round_trip() {
        let text = r#"{"vertices":3,"edges":[{"id":0,"u":0,"v":1,"cost":"1/2"},{"id":1,"u":1,"v":2,"cost":3}],
            "laminar":[{"id":0,"set":[0,1],"bound":1}]}"#;
        let file: InstanceFile = serde_json::from_str(text).unwrap();
        let inst = file.to_instance(None).unwrap();
        assert_eq!(inst.eta, default_eta());
        assert_eq!(inst.costs[&EdgeId(0)], Rational::new(1, 2));
        let back = InstanceFile::from_instance(&inst);
        let again: InstanceFile = serde_json::from_str(&serde_json::to_string(&back).unwrap()).unwrap();
        assert_eq!(again, back);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Infeasible(String::new())), 2);
        assert_eq!(exit_code(&Error::input("x")), 3);
        assert_eq!(exit_code(&Error::invariant("rounding", "fail")), 4);
        assert_eq!(run(["lamtree", "bogus"]), 3);
        assert_eq!(run(["lamtree", "--help"]), 0);
    }
}
