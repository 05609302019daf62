//! Command-line front end. Every subcommand writes one JSON report whose
//! header echoes the resolved configuration.
//!
//! Exit codes: 0 when the verdicts pass, 1 when they fail, 2 on usage,
//! schema or IO errors.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::arbitrage::{check_na, check_na1, ArbitrageReport, WealthProblem};
use crate::deflator::{construct_deflator, verify_deflation, Deflator, DeflationReport};
use crate::enlargement::{
    check_deflated_supermartingale, indicator_martingale, insider_example, jacod_check, log_utility_identity,
    snell_envelope, universal_density, EmmVerdict, EnlargementSpec,
};
use crate::error::{Error, Result};
use crate::filtered_space::{AdaptedProcess, EventTree, StoppingTime, Strategy};
use crate::io::{parse_label_map, rational_array, write_atomic, TreeFile};
use crate::kunita_yoeurp::{build_dominating_measure, check_domination, check_stopped_price, verify_ky, Death};
use crate::montecarlo::{
    diffusion_paths, information_drift_deflator, insider_paths, levy_paths, simulate_deflated_wealth,
    simulate_levy_counterexample, simulate_survival_measure, DiffusionScenario, InsiderScenario, LevyScenario,
    PiecewiseConstant, RunConfig, RNG_ALGORITHM,
};
use crate::random::random_hitting_time;
use crate::rational::{self, Rational};
use crate::scenarios;
use crate::utility::UtilityConfig;

pub const SCHEMA_VERSION: &str = "1";
pub const SEED_ENV: &str = "DEFLATOR_LAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "deflator-lab", version, about = "Arbitrage of the first kind, deflators and dominating measures")]
pub struct Cli {
    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide (NA) and (NA1) for a price process.
    Check(CheckArgs),
    /// Construct the backward-induction deflator and store it in a tree file.
    Deflate(DeflateArgs),
    /// Emit the dominating measure on the enlarged space.
    Foellmer(FoellmerArgs),
    /// Verify the Kunita-Yoeurp properties of a deflator's dominating measure.
    KyVerify(KyArgs),
    /// Test whether the price stopped before death is a martingale under the dominating measure.
    StoppedCheck(StoppedArgs),
    /// Initial enlargement by a label map.
    Enlarge(EnlargeArgs),
    /// Seeded Monte Carlo tests of the continuous-time examples.
    Simulate(SimulateArgs),
    /// Write a bundled fixture, or list them when no name is given.
    Scenario(ScenarioArgs),
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    #[arg(long)]
    pub tree: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub input: TreeArgs,
    #[arg(long, default_value = "S")]
    pub price: String,
    #[arg(long, group = "which")]
    pub na: bool,
    #[arg(long, group = "which")]
    pub na1: bool,
    #[arg(long, group = "which")]
    pub both: bool,
}

#[derive(Debug, Args)]
pub struct DeflateArgs {
    #[command(flatten)]
    pub input: TreeArgs,
    #[arg(long, default_value = "S")]
    pub price: String,
    /// Tree file to write, with the deflator added as a process.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "Z")]
    pub name: String,
    /// Random admissible strategies sampled by the verification.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DeflatorArgs {
    #[command(flatten)]
    pub input: TreeArgs,
    #[arg(long, default_value = "Z")]
    pub deflator: String,
    /// Rescale to `E[Z_0] = 1` first.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct FoellmerArgs {
    #[command(flatten)]
    pub d: DeflatorArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct KyArgs {
    #[command(flatten)]
    pub d: DeflatorArgs,
    /// Random hitting times checked in addition to the deterministic ones.
    #[arg(long, default_value_t = 10)]
    pub hitting: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct StoppedArgs {
    #[command(flatten)]
    pub d: DeflatorArgs,
    #[arg(long, default_value = "S")]
    pub price: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnlargeOp {
    Jacod,
    UniversalZ,
    Insider,
    Logutility,
}

#[derive(Debug, Args)]
pub struct EnlargeArgs {
    #[arg(value_enum)]
    pub op: EnlargeOp,
    #[command(flatten)]
    pub input: TreeArgs,
    /// JSON object `{leaf_id: "label"}`.
    #[arg(long)]
    pub label_map: PathBuf,
    #[arg(long, default_value = "S")]
    pub price: String,
    /// Labels making up the event `A` for `insider`; defaults to the first label.
    #[arg(long, value_delimiter = ',')]
    pub event: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimScenario {
    Diffusion,
    Levy,
    Insider,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub scenario: SimScenario,
    /// JSON parameters; missing fields take defaults.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Critical value of the two-sided tests.
    #[arg(long, default_value_t = 3.0)]
    pub z_crit: f64,
    /// Grid values of the first `--csv-paths` paths.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub csv_paths: usize,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    pub name: Option<String>,
    #[arg(long, default_value = ".")]
    pub dir: PathBuf,
}

/// Strategy parameters accepted alongside scenario fields in `--params`.
#[derive(Debug, Default, Deserialize)]
struct StrategyParams {
    strategy: Option<PiecewiseConstant>,
}

struct Outcome {
    pass: bool,
    module: &'static str,
    operation: &'static str,
    config: Value,
    body: Value,
}

/// Parses `argv` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(pass) => i32::from(!pass),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) | Error::Json(_) | Error::Schema { .. } | Error::Parse(_) | Error::Scenario(_) => 2,
                Error::InvalidTree(_) | Error::InvalidMeasure(_) | Error::Shape(_) => 2,
                _ => 1,
            }
        }
    }
}

/// Runs a parsed command; `Ok(true)` when the verdicts pass.
pub fn execute(cli: &Cli) -> Result<bool> {
    let start = Instant::now();
    let out = match &cli.command {
        Command::Check(a) => cmd_check(a)?,
        Command::Deflate(a) => cmd_deflate(a)?,
        Command::Foellmer(a) => cmd_foellmer(a)?,
        Command::KyVerify(a) => cmd_ky(a)?,
        Command::StoppedCheck(a) => cmd_stopped(a)?,
        Command::Enlarge(a) => cmd_enlarge(a)?,
        Command::Simulate(a) => cmd_simulate(a)?,
        Command::Scenario(a) => cmd_scenario(a)?,
    };
    let mut config = Map::new();
    config.insert("subcommand".into(), json!(command_name(&cli.command)));
    config.insert("report".into(), json!(cli.report.as_ref().map(|p| p.display().to_string())));
    config.insert("lp_pivot_rule".into(), json!("bland"));
    config.insert("n_sum".into(), json!(UtilityConfig::default().n_sum));
    if let Value::Object(m) = out.config {
        config.extend(m);
    }
    let mut report = Map::new();
    report.insert("schema_version".into(), json!(SCHEMA_VERSION));
    report.insert("config".into(), Value::Object(config));
    report.insert(
        "provenance".into(),
        json!({"module": out.module, "operation": out.operation, "crate_version": env!("CARGO_PKG_VERSION")}),
    );
    report.insert("timing_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
    report.insert("pass".into(), json!(out.pass));
    if let Value::Object(m) = out.body {
        report.extend(m);
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(report))?;
    text.push('\n');
    match &cli.report {
        Some(p) => write_atomic(p, &text)?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(out.pass)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check(_) => "check",
        Command::Deflate(_) => "deflate",
        Command::Foellmer(_) => "foellmer",
        Command::KyVerify(_) => "ky-verify",
        Command::StoppedCheck(_) => "stopped-check",
        Command::Enlarge(_) => "enlarge",
        Command::Simulate(_) => "simulate",
        Command::Scenario(_) => "scenario",
    }
}

/// `DEFLATOR_LAB_SEED` wins over the flag.
pub fn resolve_seed(flag: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{SEED_ENV}={s} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn q(r: &Rational) -> Value {
    Value::String(rational::format(r))
}

fn process_json(tree: &EventTree, x: &AdaptedProcess) -> Value {
    let m: Map<String, Value> = (0..tree.num_nodes())
        .map(|v| (v.to_string(), rational_array(x.value(v))))
        .collect();
    Value::Object(m)
}

fn strategy_json(tree: &EventTree, h: &Strategy) -> Value {
    let m: Map<String, Value> = tree
        .internal_nodes()
        .map(|v| (v.to_string(), rational_array(h.at(v))))
        .collect();
    Value::Object(m)
}

fn leaf_json(tree: &EventTree, xs: &[Rational]) -> Value {
    let m: Map<String, Value> = tree.leaves().zip(xs).map(|(l, x)| (l.to_string(), q(x))).collect();
    Value::Object(m)
}

fn deflation_json(r: &DeflationReport) -> Value {
    json!({
        "certificate_passed": r.certificate_passed,
        "certificate_violations": r.certificate_violations.iter().map(|v| json!({
            "node": v.node,
            "kind": format!("{:?}", v.kind),
            "slack": v.slack.as_ref().map(q),
            "strategy": rational_array(&v.strategy),
        })).collect::<Vec<_>>(),
        "trials": r.trials,
        "seed": r.seed,
        "worst_sampled_slack": r.worst_sampled_slack.as_ref().map(q),
        "sample_violations": r.sample_violations.len(),
        "bound_held": r.bound_held,
        "passed": r.passed(),
    })
}

fn cmd_check(a: &CheckArgs) -> Result<Outcome> {
    let f = TreeFile::read(&a.input.tree)?;
    let s = f.process(&a.price)?;
    let wp = WealthProblem::new(&f.tree, &f.measure, s)?;
    let (do_na, do_na1) = match (a.na, a.na1) {
        (true, false) => (true, false),
        (false, true) => (false, true),
        _ => (true, true),
    };
    let report = ArbitrageReport {
        na: if do_na { Some(check_na(&wp)?) } else { None },
        na1: if do_na1 { Some(check_na1(&wp)?) } else { None },
    };
    let t = &f.tree;
    let mut body = Map::new();
    if let Some(na) = &report.na {
        body.insert("na".into(), json!(na.holds));
        body.insert("na_optimum".into(), q(&na.optimum));
        if let (Some(h), Some(x)) = (&na.witness, &na.witness_terminal) {
            body.insert("na_witness".into(), json!({"strategy": strategy_json(t, h), "terminal_wealth": leaf_json(t, x)}));
        }
    }
    if let Some(na1) = &report.na1 {
        body.insert("na1".into(), json!(na1.holds));
        body.insert("optimal_value".into(), serde_json::to_value(&na1.optimal_value)?);
        if let Some(h) = &na1.maximizer {
            body.insert("maximizer".into(), strategy_json(t, h));
        }
        if let Some(r) = &na1.ray {
            body.insert("na1_witness_ray".into(), strategy_json(t, r));
        }
    }
    if let Some(b) = report.nflvr() {
        body.insert("nflvr".into(), json!(b));
    }
    Ok(Outcome {
        pass: report.all_hold(),
        module: "arbitrage",
        operation: if do_na && do_na1 { "check_na+check_na1" } else if do_na { "check_na" } else { "check_na1" },
        config: json!({"tree": path_str(&a.input.tree), "price": a.price, "na": do_na, "na1": do_na1}),
        body: Value::Object(body),
    })
}

fn cmd_deflate(a: &DeflateArgs) -> Result<Outcome> {
    let seed = resolve_seed(a.seed)?;
    let f = TreeFile::read(&a.input.tree)?;
    let s = f.process(&a.price)?;
    let wp = WealthProblem::new(&f.tree, &f.measure, s)?;
    let config = json!({"tree": path_str(&a.input.tree), "price": a.price, "out": path_str(&a.out),
        "name": a.name, "trials": a.trials, "seed": seed});
    let d = match construct_deflator(&wp) {
        Ok(d) => d,
        Err(Error::Na1Fails { node, ray }) => {
            return Ok(Outcome {
                pass: false,
                module: "deflator",
                operation: "construct_deflator",
                config,
                body: json!({"na1": false, "failing_atom": node, "ray": rational_array(&ray)}),
            })
        }
        Err(e) => return Err(e),
    };
    let check = verify_deflation(&wp, &d.z, a.trials, seed)?;
    let t = &f.tree;
    let body = json!({
        "na1": true,
        "z0": q(d.z.at(t.root())),
        "deflator": process_json(t, &d.z),
        "compensator_increments": strategy_json(t, &d.doob.increments),
        "verification": deflation_json(&check),
    });
    let written = f.clone().with_process(&a.name, d.z);
    write_atomic(&a.out, &written.to_json_string())?;
    Ok(Outcome {
        pass: check.passed(),
        module: "deflator",
        operation: "construct_deflator+verify_deflation",
        config,
        body,
    })
}

fn load_deflator(a: &DeflatorArgs) -> Result<(TreeFile, Deflator)> {
    let f = TreeFile::read(&a.input.tree)?;
    let z = f.process(&a.deflator)?.clone();
    let d = Deflator::from_process(&f.tree, &f.measure, z)?;
    let d = if a.normalize { d.normalized(&f.tree, &f.measure)? } else { d };
    Ok((f, d))
}

fn deflator_config(a: &DeflatorArgs) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tree".into(), json!(path_str(&a.input.tree)));
    m.insert("deflator".into(), json!(a.deflator));
    m.insert("normalize".into(), json!(a.normalize));
    m
}

fn zeta(d: Death) -> Value {
    match d {
        Death::At(k) => json!(k),
        Death::Never => json!("inf"),
    }
}

fn cmd_foellmer(a: &FoellmerArgs) -> Result<Outcome> {
    let (f, d) = load_deflator(&a.d)?;
    let dm = build_dominating_measure(&f.tree, &f.measure, &d.z)?;
    let mut points = Vec::new();
    for i in 0..dm.space.num_leaves {
        for death in dm.space.deaths() {
            points.push(json!({"leaf": f.tree.leaf_node(i), "zeta": zeta(death), "mass": q(dm.mass(i, death))}));
        }
    }
    let mut text = serde_json::to_string_pretty(&json!({ "points": points }))?;
    text.push('\n');
    write_atomic(&a.out, &text)?;
    let mut config = deflator_config(&a.d);
    config.insert("out".into(), json!(path_str(&a.out)));
    Ok(Outcome {
        pass: dm.total().is_one(),
        module: "kunita_yoeurp",
        operation: "build_dominating_measure",
        config: Value::Object(config),
        body: json!({"total_mass": q(&dm.total()), "points": points.len(),
            "death_probability": q(&dm.death_probability(f.tree.horizon())),
            "compensator_vanishes": dm.compensator_vanishes()}),
    })
}

fn cmd_ky(a: &KyArgs) -> Result<Outcome> {
    let seed = resolve_seed(a.seed)?;
    let (f, d) = load_deflator(&a.d)?;
    let t = &f.tree;
    let dm = build_dominating_measure(t, &f.measure, &d.z)?;
    let mut times: Vec<StoppingTime> = (0..=t.horizon()).map(|k| StoppingTime::deterministic(t, k)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    times.extend((0..a.hitting).map(|_| random_hitting_time(&mut rng, t)));
    let r = verify_ky(t, &dm, &times);
    let dom = check_domination(t, &dm);
    let mut config = deflator_config(&a.d);
    config.insert("hitting".into(), json!(a.hitting));
    config.insert("seed".into(), json!(seed));
    Ok(Outcome {
        pass: r.passed() && (!dom.applicable || dom.holds),
        module: "kunita_yoeurp",
        operation: "verify_ky",
        config: Value::Object(config),
        body: json!({
            "total_mass_one": r.total_mass_one,
            "property1": r.property1,
            "property2": r.property2,
            "property3": r.property3,
            "stopping_identity": r.stopping_identity,
            "stopping_times_checked": r.stopping_times_checked,
            "failures": r.failures.iter().map(|x| json!({"property": x.property, "t": x.t, "atom": x.atom,
                "lhs": q(&x.lhs), "rhs": q(&x.rhs)})).collect::<Vec<_>>(),
            "domination": {"applicable": dom.applicable, "holds": dom.holds,
                "offending": dom.offending.iter().map(|(i, d)| json!({"leaf": t.leaf_node(*i), "zeta": zeta(*d)})).collect::<Vec<_>>()},
        }),
    })
}

fn cmd_stopped(a: &StoppedArgs) -> Result<Outcome> {
    let (f, d) = load_deflator(&a.d)?;
    let t = &f.tree;
    let s = f.process(&a.price)?;
    let dm = build_dominating_measure(t, &f.measure, &d.z)?;
    let r = check_stopped_price(t, &dm, s)?;
    let dom = check_domination(t, &dm);
    let mut config = deflator_config(&a.d);
    config.insert("price".into(), json!(a.price));
    Ok(Outcome {
        pass: r.martingale,
        module: "kunita_yoeurp",
        operation: "check_stopped_price",
        config: Value::Object(config),
        body: json!({
            "martingale": r.martingale,
            "atoms_checked": r.atoms_checked,
            "violations": r.violations.iter().map(|v| json!({"step": v.step, "node": v.node,
                "drift": rational_array(&v.drift)})).collect::<Vec<_>>(),
            "converse_density": r.converse_density,
            "converse": r.converse.as_ref().map(deflation_json),
            "p_dominated_by_q": dom.holds,
        }),
    })
}

fn cmd_enlarge(a: &EnlargeArgs) -> Result<Outcome> {
    let f = TreeFile::read(&a.input.tree)?;
    let text = std::fs::read_to_string(&a.label_map)?;
    let labels = parse_label_map(&text, &f.tree)?;
    let spec = EnlargementSpec::new(&f.tree, &labels)?;
    let t = &f.tree;
    let p = &f.measure;
    let mut config = json!({"tree": path_str(&a.input.tree), "label_map": path_str(&a.label_map)});
    let (pass, operation, body) = match a.op {
        EnlargeOp::Jacod => {
            let r = jacod_check(t, p, &spec)?;
            let mut density = Vec::new();
            for v in 0..t.num_nodes() {
                for (j, l) in spec.label_set.iter().enumerate() {
                    density.push(json!({"node": v, "time": t.time(v), "label": l,
                        "p_t": q(&r.kernel.pt[v][j]), "y": q(&r.density(v, j))}));
                }
            }
            let body = json!({
                "holds": r.holds,
                "reverse_holds": r.reverse_holds,
                "equivalent": r.equivalent,
                "p_l": spec.label_set.iter().zip(&r.kernel.pl).map(|(l, x)| (l.clone(), q(x))).collect::<Map<_, _>>(),
                "density": density,
            });
            (r.holds, "jacod_check", body)
        }
        EnlargeOp::UniversalZ => {
            let (gt, z) = universal_density(t, p, &spec)?;
            let mut failures = 0usize;
            let mut checked = 0usize;
            for i in 0..t.num_leaves() {
                failures += check_deflated_supermartingale(&gt, &z, &indicator_martingale(t, p, i)).len();
                let reward: Vec<Rational> = (0..t.num_nodes())
                    .map(|v| if t.is_ancestor(v, t.leaf_node(i)) { rational::one() } else { rational::zero() })
                    .collect();
                failures += check_deflated_supermartingale(&gt, &z, &snell_envelope(t, p, &reward)).len();
                checked += 2;
            }
            let nodes: Vec<Value> = (0..gt.tree.num_nodes())
                .map(|g| match gt.origin[g] {
                    None => json!({"g_node": g, "time": 0, "base_node": null, "label": null, "z": q(z.at(g))}),
                    Some((base, j)) => json!({"g_node": g, "time": gt.tree.time(g), "base_node": base,
                        "label": spec.label_set[j], "z": q(z.at(g))}),
                })
                .collect();
            let body = json!({"z": nodes, "spanning_processes_checked": checked,
                "supermartingale_violations": failures});
            (failures == 0, "universal_density", body)
        }
        EnlargeOp::Insider => {
            let s = f.process(&a.price)?;
            let event: Vec<usize> = if a.event.is_empty() {
                vec![0]
            } else {
                a.event
                    .iter()
                    .map(|l| spec.label_index(l).ok_or_else(|| Error::schema("--event", format!("unknown label `{l}`"))))
                    .collect::<Result<_>>()?
            };
            config["price"] = json!(a.price);
            config["event"] = json!(event.iter().map(|&j| spec.label_set[j].clone()).collect::<Vec<_>>());
            let r = insider_example(t, p, s, &spec, &event)?;
            let (emm, farkas_verified) = match &r.emm {
                EmmVerdict::Infeasible { verified, .. } => ("infeasible", *verified),
                EmmVerdict::NotEquivalent { .. } => ("not_equivalent", false),
                EmmVerdict::Equivalent { .. } => ("equivalent", false),
            };
            let body = json!({
                "prob_a": q(&r.prob_a),
                "replication_cost": q(&r.replication_cost),
                "hedge": strategy_json(t, &r.hedge),
                "replication_verified": r.replication_verified,
                "g_arbitrage_verified": r.arbitrage_verified,
                "na_under_g": r.na_under_g,
                "equivalent_martingale_measure": emm,
                "farkas_certificate_verified": farkas_verified,
                "na1_under_g_strict": r.na1_under_g,
                "na1_under_g_robust": r.robust_na1.passed,
            });
            let pass = r.no_equivalent_martingale_measure && r.arbitrage_verified && r.robust_na1.passed;
            (pass, "insider_example", body)
        }
        EnlargeOp::Logutility => {
            let s = f.process(&a.price)?;
            config["price"] = json!(a.price);
            let r = log_utility_identity(t, p, s, &spec)?;
            let body = json!({"u_f": r.u_f, "u_g": r.u_g, "mutual_information": r.mutual_information,
                "gap": r.gap, "tolerance": r.tolerance, "holds": r.holds,
                "q_star": leaf_json(t, &r.q_star)});
            (r.holds, "log_utility_identity", body)
        }
    };
    Ok(Outcome {
        pass,
        module: "enlargement",
        operation,
        config,
        body,
    })
}

fn load_params<T: serde::de::DeserializeOwned + Default>(path: &Option<PathBuf>) -> Result<(T, StrategyParams)> {
    match path {
        None => Ok((T::default(), StrategyParams::default())),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            let sc: T = serde_json::from_str(&text).map_err(|e| Error::schema("params", e.to_string()))?;
            let st: StrategyParams = serde_json::from_str(&text).map_err(|e| Error::schema("params.strategy", e.to_string()))?;
            Ok((sc, st))
        }
    }
}

fn cmd_simulate(a: &SimulateArgs) -> Result<Outcome> {
    let run = RunConfig {
        z_crit: a.z_crit,
        threads: a.threads,
    };
    let seed = a.seed.map(resolve_seed).transpose()?.or(match std::env::var(SEED_ENV) {
        Ok(_) => Some(resolve_seed(0)?),
        Err(_) => None,
    });
    let mut base = json!({"scenario": a.scenario, "params": a.params.as_ref().map(|p| path_str(p)),
        "threads": a.threads, "z_crit": a.z_crit, "rng": RNG_ALGORITHM,
        "csv": a.csv.as_ref().map(|p| path_str(p))});
    let (pass, operation, scenario, body, csv) = match a.scenario {
        SimScenario::Diffusion => {
            let (mut sc, st) = load_params::<DiffusionScenario>(&a.params)?;
            override_common(&mut sc.paths, &mut sc.steps, &mut sc.seed, a, seed);
            let pi = st.strategy.unwrap_or_else(|| PiecewiseConstant::constant(1.0));
            let r = simulate_deflated_wealth(&sc, &pi, &run)?;
            let csv = match &a.csv {
                Some(_) => Some(diffusion_paths(&sc, &pi, a.csv_paths)?.to_csv()),
                None => None,
            };
            base["strategy"] = serde_json::to_value(&pi)?;
            (r.passed, "simulate_deflated_wealth", serde_json::to_value(&sc)?, serde_json::to_value(&r)?, csv)
        }
        SimScenario::Levy => {
            let (mut sc, st) = load_params::<LevyScenario>(&a.params)?;
            override_common(&mut sc.paths, &mut sc.steps, &mut sc.seed, a, seed);
            let pi = st.strategy.unwrap_or_else(|| PiecewiseConstant::constant(1.0));
            let r = simulate_levy_counterexample(&sc, &run)?;
            let surv = simulate_survival_measure(&sc, &pi, &run)?;
            let csv = match &a.csv {
                Some(_) => Some(levy_paths(&sc, a.csv_paths)?.to_csv()),
                None => None,
            };
            base["strategy"] = serde_json::to_value(&pi)?;
            let biased = sc.b != 0.0;
            let pass = r.corrected.consistent() && (r.raw.rejects() == biased) && surv.supermartingale;
            let body = json!({"counterexample": r, "survival": surv});
            (pass, "simulate_levy_counterexample+simulate_survival_measure", serde_json::to_value(&sc)?, body, csv)
        }
        SimScenario::Insider => {
            let (mut sc, _) = load_params::<InsiderScenario>(&a.params)?;
            override_common(&mut sc.paths, &mut sc.steps, &mut sc.seed, a, seed);
            let r = information_drift_deflator(&sc, &run)?;
            let csv = match &a.csv {
                Some(_) => Some(insider_paths(&sc, a.csv_paths)?.to_csv()),
                None => None,
            };
            (r.passed, "information_drift_deflator", serde_json::to_value(&sc)?, serde_json::to_value(&r)?, csv)
        }
    };
    if let (Some(path), Some(text)) = (&a.csv, csv) {
        write_atomic(path, &text)?;
    }
    base["resolved"] = scenario;
    Ok(Outcome {
        pass,
        module: "montecarlo",
        operation,
        config: base,
        body: json!({ "result": body }),
    })
}

fn override_common(paths: &mut usize, steps: &mut usize, seed: &mut u64, a: &SimulateArgs, resolved_seed: Option<u64>) {
    if let Some(p) = a.paths {
        *paths = p;
    }
    if let Some(m) = a.steps {
        *steps = m;
    }
    if let Some(s) = resolved_seed {
        *seed = s;
    }
}

fn cmd_scenario(a: &ScenarioArgs) -> Result<Outcome> {
    let config = json!({"name": a.name, "dir": path_str(&a.dir)});
    match &a.name {
        None => Ok(Outcome {
            pass: true,
            module: "scenarios",
            operation: "list",
            config,
            body: json!({ "available": scenarios::NAMES }),
        }),
        Some(name) => {
            let fx = scenarios::fixture(name)?;
            let written = scenarios::write_fixture(name, &a.dir)?;
            Ok(Outcome {
                pass: true,
                module: "scenarios",
                operation: "write_fixture",
                config,
                body: json!({"summary": fx.summary,
                    "written": written.iter().map(|p| path_str(p)).collect::<Vec<_>>()}),
            })
        }
    }
}
