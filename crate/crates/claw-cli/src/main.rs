//! Command-line front end for the claw workbench: loads algebroid,
//! bivector and map files, runs the symbolic checks and pointwise scans,
//! and emits deterministic text or JSON reports.
//!
//! Exit status: 0 verified/constructed, 1 definite mathematical failure
//! (with a witness in the report), 2 input error.

mod report;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use claw::algebroid::ChartedAlgebroid;
use claw::constructions::{
    self, bivector_from_json, check_complex_poisson, check_matched_pair, classify_vf_at,
    complex_sum, complexify, conjugate, decompose_complexified, pullback_at,
    vector_field_algebroid, ChartMap, MatchedPairVerdict,
};
use claw::geometry::parse_vector_field;
use claw::invariants::{pointwise_invariants_at, scan_grid, GridSpec};
use claw::symexpr::{Chart, Point};
use claw::Error;

#[derive(Parser)]
#[command(name = "claw", version)]
#[command(about = "Exact symbolic workbench for complex Lie algebroids in local coordinates")]
struct Cli {
    /// Seed for the randomized symbolic checks (reproducible).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Number of random section trials per check.
    #[arg(long, global = true, default_value_t = 30)]
    trials: usize,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Text)]
    output: OutputMode,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an algebroid file: CLA / almost / skew-algebroid.
    Check { file: PathBuf },
    /// Pointwise invariant report at a point, or over a grid.
    Invariants {
        file: PathBuf,
        /// Rational point, e.g. "1,-1/2".
        #[arg(long)]
        point: Option<String>,
        /// Grid spec, e.g. "x=-2..2:1,y=0..1:1/2".
        #[arg(long)]
        grid: Option<String>,
    },
    /// Stratification of the grid by (real rank, type, class, order).
    Scan {
        file: PathBuf,
        #[arg(long)]
        grid: Option<String>,
    },
    /// Test whether two real skew-algebroids form a complex matched pair.
    MatchedPair { first: PathBuf, second: PathBuf },
    /// Complex sum of two real skew-algebroids.
    Sum {
        first: PathBuf,
        second: PathBuf,
        /// Write the resulting algebroid JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose a complex algebroid into its real matched-pair parts.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        out_real: Option<PathBuf>,
        #[arg(long)]
        out_imag: Option<PathBuf>,
    },
    /// Conjugate algebroid (coefficientwise on the real frame).
    Conjugate {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reinterpret a real algebroid over complex scalars.
    Complexify {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and analyze the rank-1 algebroid of a complex vector field,
    /// e.g. `vf "dx + i*x*dy" --scan "x=-2..2:1,y=-2..2:1"`.
    Vf {
        expr: String,
        /// Chart coordinates, e.g. "x,y"; inferred from --scan when absent.
        #[arg(long)]
        chart: Option<String>,
        /// Classify pointwise over this grid.
        #[arg(long)]
        scan: Option<String>,
        /// Classify at a single point instead.
        #[arg(long)]
        point: Option<String>,
    },
    /// Check a complex bivector for the Poisson condition along both routes.
    Poisson { file: PathBuf },
    /// Pointwise pullback of an algebroid along a chart map.
    Pullback {
        algebroid: PathBuf,
        map: PathBuf,
        /// Point of the source chart.
        #[arg(long)]
        point: String,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {}", e);
            std::process::exit(2);
        }
    }
}

fn read_file(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {}", path.display(), e)))
}

fn load_algebroid(path: &Path) -> Result<ChartedAlgebroid, Error> {
    ChartedAlgebroid::from_json(&read_file(path)?)
}

fn write_or_print(
    label: &str,
    json: &str,
    out: &Option<PathBuf>,
    text_mode: bool,
) -> Result<(), Error> {
    match out {
        Some(path) => {
            fs::write(path, json.as_bytes())
                .map_err(|e| Error::Parse(format!("cannot write {}: {}", path.display(), e)))?;
            if text_mode {
                println!("{} written to {}", label, path.display());
            }
            Ok(())
        }
        None => {
            if text_mode {
                println!("{}:\n{}", label, json);
            }
            Ok(())
        }
    }
}

fn grid_for(a: &ChartedAlgebroid, spec: &Option<String>) -> Result<GridSpec, Error> {
    match spec {
        Some(s) => GridSpec::parse(s, a.chart()),
        None => Ok(GridSpec::default_for(a.chart())),
    }
}

fn emit(mode: OutputMode, text: String, value: Value) {
    match mode {
        OutputMode::Text => print!("{}", text),
        OutputMode::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("reports serialize")
            )
        }
    }
}

fn run(cli: &Cli) -> Result<i32, Error> {
    let seed = cli.seed;
    let trials = cli.trials;
    match &cli.command {
        Command::Check { file } => {
            let a = load_algebroid(file)?;
            let verdict = a.classify(seed, trials)?;
            let mut text = String::new();
            report::verdict_text(&verdict, &mut text);
            let value = report::envelope("check", seed, trials, report::verdict_value(&verdict));
            emit(cli.output, text, value);
            Ok(if verdict.is_lie() { 0 } else { 1 })
        }

        Command::Invariants { file, point, grid } => {
            let a = load_algebroid(file)?;
            match point {
                Some(p) => {
                    let m = Point::parse(p)?;
                    match pointwise_invariants_at(&a, &m) {
                        Ok(rep) => {
                            let mut text = String::new();
                            report::pointwise_text(&rep, &mut text);
                            let value = report::envelope(
                                "invariants",
                                seed,
                                trials,
                                report::pointwise_value(&rep),
                            );
                            emit(cli.output, text, value);
                            Ok(0)
                        }
                        Err(Error::PoleAtPoint(p)) => {
                            let value = report::envelope(
                                "invariants",
                                seed,
                                trials,
                                json!({ "pole_at": p }),
                            );
                            emit(cli.output, format!("pole at {}\n", p), value);
                            Ok(0)
                        }
                        Err(e) => Err(e),
                    }
                }
                None => {
                    let g = grid_for(&a, grid)?;
                    let scan = scan_grid(&a, &g);
                    let mut text = String::new();
                    for rep in &scan.reports {
                        report::pointwise_text(rep, &mut text);
                    }
                    report::scan_text(&scan, &mut text);
                    let reports: Vec<Value> =
                        scan.reports.iter().map(report::pointwise_value).collect();
                    let mut payload = report::scan_value(&scan);
                    payload["points"] = Value::Array(reports);
                    let value = report::envelope("invariants", seed, trials, payload);
                    emit(cli.output, text, value);
                    Ok(0)
                }
            }
        }

        Command::Scan { file, grid } => {
            let a = load_algebroid(file)?;
            let g = grid_for(&a, grid)?;
            let scan = scan_grid(&a, &g);
            let mut text = String::new();
            report::scan_text(&scan, &mut text);
            let value = report::envelope("scan", seed, trials, report::scan_value(&scan));
            emit(cli.output, text, value);
            Ok(0)
        }

        Command::MatchedPair { first, second } => {
            let a1 = load_algebroid(first)?;
            let a2 = load_algebroid(second)?;
            let rep = check_matched_pair(&a1, &a2, seed, trials)?;
            let mut text = String::new();
            report::matched_pair_text(&rep, &mut text);
            let value = report::envelope(
                "matched-pair",
                seed,
                trials,
                report::matched_pair_value(&rep),
            );
            emit(cli.output, text, value);
            Ok(if rep.verdict == MatchedPairVerdict::MatchedPair {
                0
            } else {
                1
            })
        }

        Command::Sum { first, second, out } => {
            let a1 = load_algebroid(first)?;
            let a2 = load_algebroid(second)?;
            let sum = complex_sum(&a1, &a2)?;
            let verdict = sum.classify(seed, trials)?;
            let json = sum.to_json();
            let text_mode = cli.output == OutputMode::Text;
            if text_mode {
                println!("complex sum classification: {}", verdict.label());
            }
            write_or_print("complex sum", &json, out, text_mode)?;
            if cli.output == OutputMode::Json {
                let value = report::envelope(
                    "sum",
                    seed,
                    trials,
                    json!({
                        "classification": report::verdict_value(&verdict),
                        "algebroid": serde_json::from_str::<Value>(&json).expect("valid JSON"),
                    }),
                );
                emit(cli.output, String::new(), value);
            }
            Ok(0)
        }

        Command::Decompose {
            file,
            out_real,
            out_imag,
        } => {
            let ac = load_algebroid(file)?;
            let (a1, a2) = decompose_complexified(&ac);
            let pair = check_matched_pair(&a1, &a2, seed, trials)?;
            let j1 = a1.to_json();
            let j2 = a2.to_json();
            let text_mode = cli.output == OutputMode::Text;
            if text_mode {
                println!(
                    "decomposed into real and imaginary parts; pair verdict: {}",
                    pair.verdict
                );
            }
            write_or_print("real part", &j1, out_real, text_mode)?;
            write_or_print("imaginary part", &j2, out_imag, text_mode)?;
            if cli.output == OutputMode::Json {
                let value = report::envelope(
                    "decompose",
                    seed,
                    trials,
                    json!({
                        "matched_pair": report::matched_pair_value(&pair),
                        "real_part": serde_json::from_str::<Value>(&j1).expect("valid JSON"),
                        "imaginary_part": serde_json::from_str::<Value>(&j2).expect("valid JSON"),
                    }),
                );
                emit(cli.output, String::new(), value);
            }
            Ok(0)
        }

        Command::Conjugate { file, out } => {
            let a = load_algebroid(file)?;
            let conj = conjugate(&a);
            let json = conj.to_json();
            let text_mode = cli.output == OutputMode::Text;
            write_or_print("conjugate algebroid", &json, out, text_mode)?;
            if cli.output == OutputMode::Json {
                let value = report::envelope(
                    "conjugate",
                    seed,
                    trials,
                    json!({ "algebroid": serde_json::from_str::<Value>(&json).expect("valid JSON") }),
                );
                emit(cli.output, String::new(), value);
            }
            Ok(0)
        }

        Command::Complexify { file, out } => {
            let a = load_algebroid(file)?;
            let cx = complexify(&a)?;
            let json = cx.to_json();
            let text_mode = cli.output == OutputMode::Text;
            write_or_print("complexification", &json, out, text_mode)?;
            if cli.output == OutputMode::Json {
                let value = report::envelope(
                    "complexify",
                    seed,
                    trials,
                    json!({ "algebroid": serde_json::from_str::<Value>(&json).expect("valid JSON") }),
                );
                emit(cli.output, String::new(), value);
            }
            Ok(0)
        }

        Command::Vf {
            expr,
            chart,
            scan,
            point,
        } => {
            let chart = vf_chart(chart, scan)?;
            let z = parse_vector_field(expr, &chart)?;
            let az = vector_field_algebroid(&z);
            let verdict = az.classify(seed, trials)?;
            let mut text = String::new();
            text.push_str(&format!("A_Z for Z = {}\n", z));
            report::verdict_text(&verdict, &mut text);
            let mut payload = json!({
                "field": z.to_string(),
                "classification": report::verdict_value(&verdict),
            });
            match point {
                Some(p) => {
                    let m = Point::parse(p)?;
                    let case = classify_vf_at(&z, &m)?;
                    text.push_str(&format!(
                        "at {}: case {} with real rank {}\n",
                        m, case.case_id, case.real_rank
                    ));
                    payload["case"] = report::vf_case_value(&case, &m);
                }
                None => {
                    let g = match scan {
                        Some(s) => GridSpec::parse(s, &chart)?,
                        None => GridSpec::default_for(&chart),
                    };
                    let mut cases = Vec::new();
                    let mut pole_points = Vec::new();
                    for m in g.points() {
                        match classify_vf_at(&z, &m) {
                            Ok(case) => cases.push((m, case)),
                            Err(Error::PoleAtPoint(_)) => pole_points.push(m),
                            Err(e) => return Err(e),
                        }
                    }
                    let mut strata: std::collections::BTreeMap<String, Vec<String>> =
                        std::collections::BTreeMap::new();
                    for (m, case) in &cases {
                        strata
                            .entry(format!("{} (real rank {})", case.case_id, case.real_rank))
                            .or_default()
                            .push(m.to_string());
                    }
                    for (label, points) in &strata {
                        text.push_str(&format!("{}: {} points\n", label, points.len()));
                    }
                    if !pole_points.is_empty() {
                        text.push_str(&format!("poles skipped: {}\n", pole_points.len()));
                    }
                    let scan_report = scan_grid(&az, &g);
                    text.push_str(&format!(
                        "real rank constant on sample: {}\n",
                        report::yesno(scan_report.constant_real_rank)
                    ));
                    payload["strata"] = serde_json::to_value(&strata).expect("serializes");
                    payload["pole_points"] = Value::Array(
                        pole_points
                            .iter()
                            .map(|p| Value::String(p.to_string()))
                            .collect(),
                    );
                    payload["algebroid_scan"] = report::scan_value(&scan_report);
                }
            }
            let value = report::envelope("vf", seed, trials, payload);
            emit(cli.output, text, value);
            Ok(0)
        }

        Command::Poisson { file } => {
            let pi = bivector_from_json(&read_file(file)?)?;
            let rep = check_complex_poisson(&pi, seed, trials)?;
            let algebroid = constructions::poisson_algebroid(&pi)?;
            let verdict = algebroid.classify(seed, trials)?;
            let mut text = String::new();
            text.push_str(&format!(
                "complex Poisson: {}\n",
                report::yesno(rep.is_poisson)
            ));
            text.push_str(&format!("algebroid classification: {}\n", verdict.label()));
            report::matched_pair_text(&rep.matched_pair, &mut text);
            let value = report::envelope(
                "poisson",
                seed,
                trials,
                json!({
                    "poisson": report::poisson_value(&rep),
                    "algebroid_classification": report::verdict_value(&verdict),
                }),
            );
            emit(cli.output, text, value);
            Ok(if rep.is_poisson { 0 } else { 1 })
        }

        Command::Pullback {
            algebroid,
            map,
            point,
        } => {
            let a = load_algebroid(algebroid)?;
            let phi = ChartMap::from_json(&read_file(map)?)?;
            let m = Point::parse(point)?;
            let rep = pullback_at(&a, &phi, &m)?;
            let mut text = String::new();
            text.push_str(&format!(
                "pullback fiber at {}: dimension {}\n",
                m,
                rep.fiber_basis.dim()
            ));
            text.push_str(&format!(
                "transversal: {}\n",
                report::yesno(rep.transversal)
            ));
            report::pointwise_text(&rep.invariants, &mut text);
            if let Some((dp, dm)) = rep.lemma_delta_dims {
                text.push_str(&format!(
                    "pullback lemma: dim Delta(pullback) = {}, dim(im Tphi meet Delta) = {}\n",
                    dp, dm
                ));
            }
            let value = report::envelope("pullback", seed, trials, report::pullback_value(&rep));
            emit(cli.output, text, value);
            Ok(0)
        }
    }
}

/// Chart for the vf verb: taken from --chart, else inferred from the
/// coordinates named in the --scan grid spec.
fn vf_chart(chart: &Option<String>, scan: &Option<String>) -> Result<Chart, Error> {
    if let Some(c) = chart {
        return Chart::new(c.split(',').map(|s| s.trim().to_string()).collect());
    }
    if let Some(s) = scan {
        let mut names = Vec::new();
        for part in s.split(',') {
            if let Some((name, _)) = part.split_once('=') {
                let name = name.trim().to_string();
                if !names.contains(&name) {
                    names.push(name);
                }
            }
        }
        if !names.is_empty() {
            return Chart::new(names);
        }
    }
    Err(Error::Parse(
        "the vf command needs --chart, or coordinates named in --scan".to_string(),
    ))
}
