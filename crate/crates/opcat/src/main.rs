//! Command-line front end: built-in examples, scenario evaluation, table
//! classification, the Rel(Ω) demo, and structural validation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use opcat::classify::{
    classify, classify_relaxed, rel_empirical_model, rel_lhv_construct, validate_certificate,
    verify_lhv, certificate_to_json, Classification, Verdict,
};
use opcat::error::Error;
use opcat::matcat::{Mor, Obj};
use opcat::operational::{measurement_from_json, Measurement, State};
use opcat::presets;
use opcat::rel::{DisjointCover, OmegaSubset};
use opcat::scenario::{
    empirical_from_operational, model_from_json, model_to_json, no_signalling_check, rationalize,
    EmpiricalModel, Scenario, Site,
};
use opcat::semiring::{validate_semiring, SemiringInstance};
use opcat::tuple::Tuple;

#[derive(Parser)]
#[command(name = "opcat", version, about = "Semiring-generic operational workbench")]
struct Cli {
    /// Emit JSON instead of aligned plain-text tables.
    #[arg(long, global = true)]
    json: bool,
    /// Tolerance for float-derived tables and quantum-realization checks.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Number of worker threads for classifying multiple files.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a built-in example model and its classification.
    Examples {
        #[arg(value_enum)]
        which: Example,
    },
    /// Build the empirical model of a scenario file and print it.
    Eval { path: PathBuf },
    /// Classify one or more empirical-model files.
    Classify {
        paths: Vec<PathBuf>,
        /// Exit with status 2 unless every model is Local.
        #[arg(long)]
        require_witness: bool,
    },
    /// Build a Rel(Ω) empirical model and its hidden-variable construction.
    RelDemo { path: PathBuf },
    /// Run the structural validators on a JSON file.
    Validate { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Bell,
    Prbox,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Examples { which } => run_examples(cli, *which),
        Command::Eval { path } => run_eval(cli, path),
        Command::Classify {
            paths,
            require_witness,
        } => run_classify(cli, paths, *require_witness),
        Command::RelDemo { path } => run_rel_demo(cli, path),
        Command::Validate { path } => run_validate(cli, path),
    }
}

/// Render the table as aligned columns: one row per setting tuple.
fn format_table(e: &EmpiricalModel) -> String {
    let scenario = e.scenario();
    let inst = e.instance();
    let outcome_headers: Vec<String> = scenario
        .outcome_tuples()
        .iter()
        .map(|o| scenario.outcome_label(o).to_string())
        .collect();
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec![String::from("m \\ o")];
    header.extend(outcome_headers.iter().cloned());
    rows.push(header);
    for m in scenario.setting_tuples() {
        let mut row = vec![scenario.setting_label(&m).to_string()];
        for o in scenario.outcome_tuples() {
            row.push(inst.scalar_string(&e.probability(&m, &o)));
        }
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    rows.iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(c, cell)| format!("{cell:>width$}", width = widths[c]))
                .collect::<Vec<_>>()
                .join("  ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn describe_classification(c: &Classification) -> String {
    match c {
        Classification::Local { lhv, .. } => format!(
            "Local ({} hidden values with nonzero weight)",
            lhv.hidden().len()
        ),
        Classification::NoSignallingNonlocal { .. } => {
            "NoSignallingNonlocal (Farkas certificate + signed witness)".into()
        }
        Classification::Signalling { .. } => "Signalling (Farkas certificate)".into(),
    }
}

fn run_examples(cli: &Cli, which: Example) -> Result<ExitCode, Error> {
    let e = match which {
        Example::Bell => presets::bell_model(),
        Example::Prbox => presets::pr_box_model(),
    };
    let c = classify(&e)?;
    if cli.json {
        let mut v = certificate_to_json(&e, &c);
        if let Example::Bell = which {
            let (state, measurements) = presets::bell_hilb_data();
            let eps = cli.epsilon.unwrap_or(1e-9);
            let ok =
                opcat::classify::verify_quantum_realization(&e, &state, &measurements, eps)?;
            v.as_object_mut()
                .expect("object")
                .insert("quantum_realization_verified".into(), json!(ok));
        }
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("{}", format_table(&e));
        println!();
        if let Example::Bell = which {
            let (state, measurements) = presets::bell_hilb_data();
            let eps = cli.epsilon.unwrap_or(1e-9);
            let ok =
                opcat::classify::verify_quantum_realization(&e, &state, &measurements, eps)?;
            println!(
                "quantum realization (XY measurements at relative angle pi/3): {}",
                if ok { "verified" } else { "MISMATCH" }
            );
        }
        if let Example::Prbox = which {
            let witness = presets::pr_witness_vector();
            let rational = SemiringInstance::rational();
            let shown: Vec<String> = witness
                .iter()
                .map(|q| rational.scalar_string(&opcat::semiring::Scalar::Rational(q.clone())))
                .collect();
            println!("signed witness over global assignments: [{}]", shown.join(", "));
        }
        println!("classification: {}", describe_classification(&c));
    }
    Ok(ExitCode::SUCCESS)
}

/// Scenario file: instance, sites with objects/settings/outcomes, a state,
/// and per-site measurement lists.
fn run_eval(cli: &Cli, path: &Path) -> Result<ExitCode, Error> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let (scenario, state, measurements) = parse_operational_scenario(&v)?;
    let e = empirical_from_operational(&scenario, &state, &measurements)?;
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&model_to_json(&e))?);
    } else {
        println!("{}", format_table(&e));
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_operational_scenario(
    v: &Value,
) -> Result<(Scenario, State, Vec<Vec<Measurement>>), Error> {
    let instance = SemiringInstance::from_json(v.get("instance").ok_or_else(|| Error::Schema {
        path: "instance".into(),
        message: "missing".into(),
    })?)?;
    let site_names: Vec<String> = v
        .get("sites")
        .and_then(|s| s.as_array())
        .ok_or_else(|| Error::Schema {
            path: "sites".into(),
            message: "expected site name array".into(),
        })?
        .iter()
        .map(|s| {
            s.as_str().map(str::to_string).ok_or_else(|| Error::Schema {
                path: "sites".into(),
                message: "site names must be strings".into(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let labels = |section: &str, site: &str| -> Result<Vec<String>, Error> {
        v.get(section)
            .and_then(|s| s.get(site))
            .and_then(|s| s.as_array())
            .ok_or_else(|| Error::Schema {
                path: format!("{section}.{site}"),
                message: "expected label array".into(),
            })?
            .iter()
            .map(|l| {
                l.as_str().map(str::to_string).ok_or_else(|| Error::Schema {
                    path: format!("{section}.{site}"),
                    message: "labels must be strings".into(),
                })
            })
            .collect()
    };
    let mut sites = Vec::new();
    let mut objects = Vec::new();
    for name in &site_names {
        sites.push(Site {
            name: name.clone(),
            settings: labels("settings", name)?,
            outcomes: labels("outcomes", name)?,
        });
        objects.push(Obj::new(&labels("objects", name)?));
    }
    let scenario = Scenario::new(sites)?;
    let joint = objects
        .iter()
        .skip(1)
        .fold(objects[0].clone(), |acc, o| acc.tensor(o));
    let state_v = v.get("state").ok_or_else(|| Error::Schema {
        path: "state".into(),
        message: "missing".into(),
    })?;
    let state = parse_state(&instance, &joint, state_v)?;
    let measurements = site_names
        .iter()
        .zip(&objects)
        .map(|(name, obj)| {
            v.get("measurements")
                .and_then(|m| m.get(name))
                .and_then(|m| m.as_array())
                .ok_or_else(|| Error::Schema {
                    path: format!("measurements.{name}"),
                    message: "expected measurement array".into(),
                })?
                .iter()
                .map(|mv| measurement_from_json(&instance, obj, mv))
                .collect::<Result<Vec<_>, Error>>()
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok((scenario, state, measurements))
}

fn parse_state(instance: &SemiringInstance, obj: &Obj, v: &Value) -> Result<State, Error> {
    if let Some(col) = v.get("pure") {
        let entries = col.as_array().ok_or_else(|| Error::Schema {
            path: "state.pure".into(),
            message: "expected scalar column".into(),
        })?;
        if entries.len() != obj.dim() {
            return Err(Error::Schema {
                path: "state.pure".into(),
                message: format!("expected {} entries", obj.dim()),
            });
        }
        let scalars = entries
            .iter()
            .map(|e| instance.scalar_from_json(e))
            .collect::<Result<Vec<_>, _>>()?;
        let psi = Mor::from_fn(instance, Obj::unit(), obj.clone(), |r, _| scalars[r].clone());
        return State::from_pure(&psi);
    }
    if let Some(mat) = v.get("matrix") {
        let m = reshape_endo(Mor::from_json_with_instance(instance, mat)?, obj)?;
        return State::new(m);
    }
    if let Some(mat) = v.get("witness") {
        let m = reshape_endo(Mor::from_json_with_instance(instance, mat)?, obj)?;
        return State::from_witness(&m);
    }
    Err(Error::Schema {
        path: "state".into(),
        message: "expected one of: pure, matrix, witness".into(),
    })
}

/// Rebuild a square matrix literal on the scenario's joint object.
fn reshape_endo(m: Mor, obj: &Obj) -> Result<Mor, Error> {
    if m.dom().dim() != obj.dim() || m.cod().dim() != obj.dim() {
        return Err(Error::Schema {
            path: "state".into(),
            message: format!("expected a {0}x{0} matrix", obj.dim()),
        });
    }
    if m.dom() == obj && m.cod() == obj {
        return Ok(m);
    }
    let rows = (0..obj.dim())
        .map(|r| (0..obj.dim()).map(|c| m.get(r, c).clone()).collect())
        .collect();
    Mor::from_rows(m.instance(), obj.clone(), obj.clone(), rows)
}

fn classify_one(path: &Path, epsilon: Option<f64>, as_json: bool) -> Result<(String, Verdict), Error> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let e = model_from_json(&v)?;
    let exact = if e.instance() == &SemiringInstance::rational() {
        Some(e.clone())
    } else {
        let r = rationalize(&e)?;
        if r.approximate {
            None
        } else {
            Some(r.model)
        }
    };
    match exact {
        Some(e) => {
            let c = classify(&e)?;
            let text = if as_json {
                serde_json::to_string_pretty(&certificate_to_json(&e, &c))?
            } else {
                format!("{}: {}", path.display(), describe_classification(&c))
            };
            Ok((text, c.verdict()))
        }
        None => {
            let eps = epsilon.unwrap_or(1e-6);
            let eps_q = BigRational::from_float(eps).ok_or_else(|| Error::Schema {
                path: "--epsilon".into(),
                message: "must be finite".into(),
            })?;
            let r = rationalize(&e)?;
            let verdict = classify_relaxed(&r.model, &eps_q)?;
            let text = if as_json {
                serde_json::to_string_pretty(&json!({
                    "verdict": verdict.name(),
                    "approximate": true,
                    "epsilon": eps,
                }))?
            } else {
                format!(
                    "{}: {} (approximate, epsilon = {eps})",
                    path.display(),
                    verdict.name()
                )
            };
            Ok((text, verdict))
        }
    }
}

fn run_classify(cli: &Cli, paths: &[PathBuf], require_witness: bool) -> Result<ExitCode, Error> {
    if paths.is_empty() {
        return Err(Error::EmptyInput("model paths"));
    }
    let jobs = cli.jobs.max(1).min(paths.len());
    let mut results: Vec<Option<Result<(String, Verdict), Error>>> = Vec::new();
    results.resize_with(paths.len(), || None);
    if jobs <= 1 {
        for (i, p) in paths.iter().enumerate() {
            results[i] = Some(classify_one(p, cli.epsilon, cli.json));
        }
    } else {
        // Static round-robin split keeps the output order deterministic.
        let chunks: Vec<Vec<usize>> = (0..jobs)
            .map(|w| (w..paths.len()).step_by(jobs).collect())
            .collect();
        let computed = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|idxs| {
                    scope.spawn(|| {
                        idxs.iter()
                            .map(|&i| (i, classify_one(&paths[i], cli.epsilon, cli.json)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("worker panicked"))
                .collect::<Vec<_>>()
        });
        for (i, r) in computed {
            results[i] = Some(r);
        }
    }
    let mut all_local = true;
    let mut failed = false;
    for r in results.into_iter().flatten() {
        match r {
            Ok((text, verdict)) => {
                println!("{text}");
                if verdict != Verdict::Local {
                    all_local = false;
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                failed = true;
            }
        }
    }
    if failed {
        return Ok(ExitCode::from(1));
    }
    if require_witness && !all_local {
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_rel_demo(cli: &Cli, path: &Path) -> Result<ExitCode, Error> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let instance = SemiringInstance::from_json(v.get("instance").ok_or_else(|| Error::Schema {
        path: "instance".into(),
        message: "missing".into(),
    })?)?;
    let sites_v = v
        .get("sites")
        .and_then(|s| s.as_array())
        .ok_or_else(|| Error::Schema {
            path: "sites".into(),
            message: "expected site array".into(),
        })?;
    let mut site_covers: Vec<Vec<DisjointCover>> = Vec::new();
    for (i, sv) in sites_v.iter().enumerate() {
        let covers_v = sv
            .get("covers")
            .and_then(|c| c.as_array())
            .ok_or_else(|| Error::Schema {
                path: format!("sites[{i}].covers"),
                message: "expected cover array".into(),
            })?;
        let covers = covers_v
            .iter()
            .enumerate()
            .map(|(j, cv)| parse_cover(&instance, cv, &format!("sites[{i}].covers[{j}]")))
            .collect::<Result<Vec<_>, Error>>()?;
        if covers.is_empty() {
            return Err(Error::EmptyInput("site covers"));
        }
        site_covers.push(covers);
    }
    let global = OmegaSubset::from_json(
        &instance,
        v.get("global").ok_or_else(|| Error::Schema {
            path: "global".into(),
            message: "missing global section".into(),
        })?,
    )?;
    let (scenario, lhv) = rel_lhv_construct(&global, &site_covers)?;
    let e = rel_empirical_model(&global, &site_covers, &scenario)?;
    let verified = verify_lhv(&e, &lhv);
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "model": model_to_json(&e),
                "lhv": lhv.to_json(&scenario),
                "verified": verified.is_ok(),
            }))?
        );
    } else {
        println!("{}", format_table(&e));
        println!();
        println!("hidden variables (Λ = product of site bases):");
        for (l, d) in lhv.hidden().iter().zip(lhv.dist()) {
            println!("  d({l}) = {}", instance.scalar_string(d));
        }
        match verified {
            Ok(()) => println!("local hidden-variable construction: verified"),
            Err(msg) => println!("local hidden-variable construction: FAILED ({msg})"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_cover(
    instance: &SemiringInstance,
    v: &Value,
    path: &str,
) -> Result<DisjointCover, Error> {
    let outcomes: Vec<Tuple> = v
        .get("outcomes")
        .and_then(|o| o.as_array())
        .ok_or_else(|| Error::Schema {
            path: format!("{path}.outcomes"),
            message: "expected outcome array".into(),
        })?
        .iter()
        .map(|o| {
            o.as_str()
                .map(|s| s.parse::<Tuple>().unwrap())
                .ok_or_else(|| Error::Schema {
                    path: format!("{path}.outcomes"),
                    message: "labels must be strings".into(),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let subsets = v
        .get("subsets")
        .and_then(|s| s.as_array())
        .ok_or_else(|| Error::Schema {
            path: format!("{path}.subsets"),
            message: "expected subset array".into(),
        })?
        .iter()
        .map(|sv| OmegaSubset::from_json(instance, sv))
        .collect::<Result<Vec<_>, Error>>()?;
    DisjointCover::new(outcomes, subsets)
}

fn run_validate(cli: &Cli, path: &Path) -> Result<ExitCode, Error> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let kind = if v.get("verdict").is_some() {
        validate_certificate(&v)?;
        "certificate"
    } else if v.get("table").is_some() {
        let e = model_from_json(&v)?;
        for m in e.scenario().setting_tuples() {
            if !e.distribution(&m).is_normalized() {
                return Err(Error::Schema {
                    path: format!("table.{}", e.scenario().setting_label(&m)),
                    message: "distribution is not normalized".into(),
                });
            }
        }
        if !no_signalling_check(&e) {
            println!("note: model is signalling");
        }
        "empirical model"
    } else if v.get("lattice").is_some() {
        let instance = SemiringInstance::from_json(&v)?;
        let report = validate_semiring(&instance, 1000);
        if !report.passed() {
            return Err(Error::Schema {
                path: "lattice".into(),
                message: report.violations.join("; "),
            });
        }
        "lattice instance"
    } else if v.get("base").is_some() && v.get("values").is_some() {
        let instance = match v.get("instance") {
            Some(tag) => SemiringInstance::from_json(tag)?,
            None => SemiringInstance::boolean(),
        };
        OmegaSubset::from_json(&instance, &v)?;
        "omega subset"
    } else {
        return Err(Error::Schema {
            path: ".".into(),
            message: "unrecognized document: expected a certificate, model, lattice, or subset"
                .into(),
        });
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&json!({"ok": true, "kind": kind}))?);
    } else {
        println!("OK: {kind}");
    }
    Ok(ExitCode::SUCCESS)
}
