//! Batch front end: parse a problem file, dispatch to the library, emit a
//! deterministic JSON report (or a human summary) and exit with 0 when all
//! checks pass, 1 on a mathematically meaningful failure, and 2 on input
//! errors.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use lmhs_core::error::Error;
use lmhs_core::problem::{self, ProblemFile};
use lmhs_core::strata::{self, StrataReport, StratumEntry};
use lmhs_core::{fixtures, nilpotent};

const USAGE: &str = "\
usage: lmhs <command> <problem.json> [--human] [--timing] [--out FILE]
       lmhs emit-fixtures <dir>

commands:
  weightfilt    weight filtration of the cone
  split         Deligne splitting of (W, F)
  sl2           grading operator, sl2-triple and integral normalization
  verify-lmhs   certify a limiting mixed Hodge structure
  finfty        limit filtration and graded agreement
  strata        boundary combinatorics: partition, closures, union cones
  ext-torus     extension space, compact directions and lattice
  chern         Chern form of the fibre metric and abelian positivity
  automorphy    factor-of-automorphy exponents and cocycle audit
  coeffs        pairing coefficients of the normalized triple
  orbit         evaluate exp(sum z_j N_j) F and test domain membership
  emit-fixtures write the built-in fixture corpus as problem files

flags:
  --human       append a one-line summary per check to stderr
  --timing      include wall-clock timing in the report (breaks
                byte-for-byte reproducibility, hence off by default)
  --out FILE    write the report to FILE instead of stdout

environment:
  LMHS_THREADS  number of worker threads for per-stratum computations
";

struct Cli {
    command: String,
    path: Option<PathBuf>,
    human: bool,
    timing: bool,
    out: Option<PathBuf>,
}

fn parse_args() -> Result<Cli, String> {
    let mut args = std::env::args().skip(1);
    let command = args.next().ok_or_else(|| USAGE.to_string())?;
    let mut cli = Cli {
        command,
        path: None,
        human: false,
        timing: false,
        out: None,
    };
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--human" => cli.human = true,
            "--json" => cli.human = false,
            "--timing" => cli.timing = true,
            "--out" => {
                let v = args.next().ok_or("--out needs a path")?;
                cli.out = Some(PathBuf::from(v));
            }
            other if other.starts_with("--") => {
                return Err(format!("unknown flag {other:?}\n{USAGE}"));
            }
            other => {
                if cli.path.is_some() {
                    return Err(format!("unexpected argument {other:?}\n{USAGE}"));
                }
                cli.path = Some(PathBuf::from(other));
            }
        }
    }
    Ok(cli)
}

fn main() -> ExitCode {
    let cli = match parse_args() {
        Ok(cli) => cli,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    match cli.command.as_str() {
        "emit-fixtures" => emit_fixtures(&cli),
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            ExitCode::SUCCESS
        }
        _ => run_command(&cli),
    }
}

fn emit_fixtures(cli: &Cli) -> ExitCode {
    let Some(dir) = &cli.path else {
        eprintln!("emit-fixtures needs a target directory\n{USAGE}");
        return ExitCode::from(2);
    };
    if let Err(e) = std::fs::create_dir_all(dir) {
        eprintln!("cannot create {}: {e}", dir.display());
        return ExitCode::from(2);
    }
    for fx in fixtures::all_fixtures() {
        let value = problem::fixture_problem_json(&fx);
        let path = dir.join(format!("fixture_{}.json", fx.name));
        let mut bytes = serde_json::to_vec_pretty(&value).expect("fixture serializes");
        bytes.push(b'\n');
        if let Err(e) = std::fs::write(&path, bytes) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
        if cli.human {
            eprintln!("wrote {}", path.display());
        }
    }
    ExitCode::SUCCESS
}

fn run_command(cli: &Cli) -> ExitCode {
    let Some(path) = &cli.path else {
        eprintln!("command {:?} needs a problem file\n{USAGE}", cli.command);
        return ExitCode::from(2);
    };
    let raw = match std::fs::read(path) {
        Ok(raw) => raw,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let problem = match ProblemFile::parse(&raw) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let started = Instant::now();
    let outcome = if cli.command == "strata" && threads() > 1 {
        run_strata_parallel(&problem, &raw)
    } else {
        problem::run(&cli.command, &problem, &raw)
    };
    let mut outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(problem::error_exit(&e) as u8);
        }
    };
    if cli.timing {
        outcome.report["timing_ms"] = serde_json::json!(started.elapsed().as_millis() as u64);
    }
    let mut rendered = serde_json::to_vec_pretty(&outcome.report).expect("report serializes");
    rendered.push(b'\n');
    let write_result = match &cli.out {
        Some(out) => std::fs::write(out, &rendered).map_err(|e| format!("{}: {e}", out.display())),
        None => std::io::stdout()
            .write_all(&rendered)
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = write_result {
        eprintln!("cannot write report: {e}");
        return ExitCode::from(2);
    }
    if cli.human {
        let ok = outcome.report["ok"].as_bool().unwrap_or(false);
        eprintln!(
            "{}: {} ({})",
            cli.command,
            if ok { "PASS" } else { "FAIL" },
            path.display()
        );
    }
    ExitCode::from(outcome.exit as u8)
}

fn threads() -> usize {
    std::env::var("LMHS_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

/// Per-stratum computations are independent, so the strata report can be
/// assembled from scoped worker threads; output order is canonicalized to
/// the input stratum order before emission.
fn run_strata_parallel(problem: &ProblemFile, raw: &[u8]) -> Result<problem::Outcome, Error> {
    let complex = problem.complex()?;
    let validation = strata::validate_complex(&complex);
    let report = if !validation.ok {
        StrataReport {
            validation,
            upsilon_classes: Vec::new(),
            strata: Vec::new(),
        }
    } else {
        let upsilon_classes: Vec<Vec<Vec<usize>>> = strata::upsilon_partition(&complex)
            .iter()
            .map(|cl| cl.iter().map(|s| s.iter().copied().collect()).collect())
            .collect();
        let strata_list: Vec<BTreeSet<usize>> = complex.strata().to_vec();
        let workers = threads().min(strata_list.len().max(1));
        let mut entries: Vec<Option<StratumEntry>> = vec![None; strata_list.len()];
        let chunks: Vec<Vec<usize>> = (0..strata_list.len()).map(|i| (i, i % workers)).fold(
            vec![Vec::new(); workers],
            |mut acc, (i, w)| {
                acc[w].push(i);
                acc
            },
        );
        let results: Vec<Result<Vec<(usize, StratumEntry)>, Error>> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| {
                    let complex = &complex;
                    let strata_list = &strata_list;
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        for &idx in chunk {
                            let i_set = &strata_list[idx];
                            let w = nilpotent::cone_weight_filtration(&complex.cone_of(i_set)?)?;
                            let closure = strata::cone_closure(complex, i_set)?;
                            let wt = strata::wt_set(complex, i_set)?;
                            let contained = closure.iter().all(|j| wt.contains(j));
                            let union = strata::sigma_union(complex, i_set, &wt)?;
                            out.push((
                                idx,
                                StratumEntry {
                                    stratum: i_set.iter().copied().collect(),
                                    weight_dims: w.dims(),
                                    cone_closure: closure
                                        .iter()
                                        .map(|s| s.iter().copied().collect())
                                        .collect(),
                                    wt_set: wt
                                        .iter()
                                        .map(|s| s.iter().copied().collect())
                                        .collect(),
                                    closure_contained_in_wt: contained,
                                    union_cone_divisors: union
                                        .generators
                                        .iter()
                                        .map(|(d, _)| *d)
                                        .collect(),
                                    union_cone_classes: union.quotient_classes,
                                },
                            ));
                        }
                        Ok(out)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker"))
                .collect()
        });
        for res in results {
            for (idx, entry) in res? {
                entries[idx] = Some(entry);
            }
        }
        StrataReport {
            validation,
            upsilon_classes,
            strata: entries.into_iter().map(|e| e.expect("entry")).collect(),
        }
    };
    let ok = report.validation.ok && report.strata.iter().all(|s| s.closure_contained_in_wt);
    let mut map = serde_json::Map::new();
    map.insert("command".into(), serde_json::Value::String("strata".into()));
    map.insert(
        "input_digest".into(),
        serde_json::Value::String(problem::digest(raw)),
    );
    map.insert("ok".into(), serde_json::Value::Bool(ok));
    map.insert(
        "result".into(),
        serde_json::to_value(&report).expect("report serializes"),
    );
    Ok(problem::Outcome {
        report: serde_json::Value::Object(map),
        exit: if ok { 0 } else { 1 },
    })
}
