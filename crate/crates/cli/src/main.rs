//! `jrlab`: generate, check, solve, and run experiments on approval-based
//! committee-selection instances. Machine-readable JSON (or CSV for
//! `experiment`) goes to stdout; diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error, 3 enumeration
//! budget refusal. The env var `JRLAB_BUDGET` overrides the default
//! enumeration budget.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use jrlab_core::axioms::{check_ejr_with_budget, check_jr, AxiomReport};
use jrlab_core::election::{coverage, read_election, social_welfare, write_election, ElectionDoc};
use jrlab_core::experiment::{parse_alpha, run_curve, write_csv, write_manifest, Axis, CurveSpec};
use jrlab_core::forge::{
    eds_reduction, example1, example2, gen, prop2_family, x3c_reduction, GroundTruth, Model,
    ModelSpec,
};
use jrlab_core::greedy::{approx_n_equals_k, greedy_cc, SecondStage, TieBreak};
use jrlab_core::greedy_ejr::{greedy_ejr, FillPolicy};
use jrlab_core::oracle::{solve, Constraint, Objective, DEFAULT_ENUM_BUDGET};
use jrlab_core::vcr::{solve_vcr, VcrGeometry};
use jrlab_core::{Committee, Election, Error};

#[derive(Parser)]
#[command(name = "jrlab", about = "committee selection under justified representation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenModel {
    Ic,
    Euclid1d,
    Euclid2d,
    Example1,
    Example2,
    Eds,
    X3c,
    Prop2,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxiomArg {
    Jr,
    Ejr,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Sw,
    Cvr,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstraintArg {
    None,
    Jr,
    Ejr,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Greedycc,
    Greedyejr,
    NkApprox,
    VcrDp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stage2Arg {
    Welfare,
    CoverageExhaustive,
    CoverageGreedy,
    LowestIndex,
}

#[derive(Clone, Copy, ValueEnum)]
enum FillArg {
    LowestIndex,
    GreedyCoverage,
    ExhaustiveCoverage,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveArg {
    F,
    G,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an election (plus ground-truth sidecar for closed-form families).
    Gen {
        #[arg(long, value_enum)]
        model: GenModel,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Model parameter: p (ic), r (euclid), s (example1), t (example2, prop2), y (eds).
        #[arg(long, default_value_t = 0.0)]
        param: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Graph edges for the eds model, e.g. "0-1,1-2".
        #[arg(long)]
        edges: Option<String>,
        /// Triples for the x3c model over elements 1..=u, e.g. "1,2,3;4,5,6".
        #[arg(long)]
        sets: Option<String>,
    },
    /// Check an axiom for a given committee.
    Check {
        #[arg(long, value_enum)]
        axiom: AxiomArg,
        #[arg(long)]
        election: PathBuf,
        /// Comma-separated 0-based candidate indices.
        #[arg(long)]
        committee: String,
    },
    /// Compute a committee by an exact or heuristic method.
    Solve {
        #[arg(long)]
        election: PathBuf,
        #[arg(long, value_enum, default_value = "sw")]
        objective: ObjectiveArg,
        #[arg(long, value_enum, default_value = "none")]
        constraint: ConstraintArg,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "welfare")]
        stage2: Stage2Arg,
        #[arg(long, value_enum, default_value = "lowest-index")]
        fill: FillArg,
    },
    /// Run a welfare/coverage trade-off curve and write CSV + manifest.
    Experiment {
        #[arg(long, value_enum)]
        curve: CurveArg,
        #[arg(long, value_enum)]
        model: GenModel,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        param: f64,
        /// Inclusive alpha grid "start:stop:step" in decimals, e.g. "0:1:0.01".
        #[arg(long)]
        alphas: String,
        #[arg(long)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Restrict the curve to committees satisfying JR.
        #[arg(long)]
        require_jr: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli.command) {
        eprintln!("error: {err}");
        let code = match err {
            Error::BudgetExceeded { .. } => 3,
            Error::InvalidParameter(_) => 2,
            _ => 1,
        };
        std::process::exit(code);
    }
}

fn budget() -> u64 {
    match std::env::var("JRLAB_BUDGET") {
        Ok(v) => v.parse().unwrap_or(DEFAULT_ENUM_BUDGET),
        Err(_) => DEFAULT_ENUM_BUDGET,
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Gen { model, n, m, k, param, seed, out, edges, sets } => {
            cmd_gen(model, n, m, k, param, seed, out, edges, sets)
        }
        Command::Check { axiom, election, committee } => cmd_check(axiom, &election, &committee),
        Command::Solve { election, objective, constraint, method, stage2, fill } => {
            cmd_solve(&election, objective, constraint, method, stage2, fill)
        }
        Command::Experiment {
            curve,
            model,
            n,
            m,
            k,
            param,
            alphas,
            instances,
            seed,
            out,
            require_jr,
        } => cmd_experiment(curve, model, n, m, k, param, &alphas, instances, seed, &out, require_jr),
    }
}

fn as_count(param: f64, what: &str) -> Result<usize, Error> {
    if param.fract() != 0.0 || param < 0.0 || param > 1.0e9 {
        return Err(Error::InvalidParameter(format!(
            "{what} must be a non-negative integer, got {param}"
        )));
    }
    Ok(param as usize)
}

fn parse_edges(text: &str) -> Result<Vec<(usize, usize)>, Error> {
    let bad = |t: &str| Error::InvalidParameter(format!("cannot parse edge {t:?}"));
    text.split(',')
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (u, v) = pair.split_once('-').ok_or_else(|| bad(pair))?;
            Ok((
                u.trim().parse().map_err(|_| bad(pair))?,
                v.trim().parse().map_err(|_| bad(pair))?,
            ))
        })
        .collect()
}

fn parse_sets(text: &str) -> Result<Vec<[usize; 3]>, Error> {
    let bad = |t: &str| Error::InvalidParameter(format!("cannot parse triple {t:?}"));
    text.split(';')
        .filter(|s| !s.is_empty())
        .map(|triple| {
            let parts: Vec<usize> = triple
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| bad(triple)))
                .collect::<Result<_, _>>()?;
            match parts[..] {
                [a, b, c] => Ok([a, b, c]),
                _ => Err(bad(triple)),
            }
        })
        .collect()
}

fn write_doc(out: &PathBuf, doc: &ElectionDoc) -> Result<(), Error> {
    fs::write(out, write_election(doc))?;
    Ok(())
}

fn write_truth(out: &PathBuf, truth: &GroundTruth) -> Result<(), Error> {
    let mut path = out.as_os_str().to_owned();
    path.push(".truth.json");
    let bytes = serde_json::to_vec(truth).expect("ground truth serialization cannot fail");
    fs::write(PathBuf::from(path), bytes)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    model: GenModel,
    n: usize,
    m: usize,
    k: usize,
    param: f64,
    seed: u64,
    out: PathBuf,
    edges: Option<String>,
    sets: Option<String>,
) -> Result<(), Error> {
    let (doc, truth): (ElectionDoc, Option<GroundTruth>) = match model {
        GenModel::Ic | GenModel::Euclid1d | GenModel::Euclid2d => {
            let model = match model {
                GenModel::Ic => Model::Ic { p: param },
                GenModel::Euclid1d => Model::Euclid { dim: 1, r: param },
                _ => Model::Euclid { dim: 2, r: param },
            };
            let spec = ModelSpec { model, n, m, k, seed };
            let (election, geometry) = gen(&spec)?;
            (ElectionDoc { election, vcr: geometry.map(|g| g.to_block()) }, None)
        }
        GenModel::Example1 => {
            let (election, truth) = example1(as_count(param, "s")?)?;
            (ElectionDoc { election, vcr: None }, Some(truth))
        }
        GenModel::Example2 => {
            let (election, truth) = example2(as_count(param, "t")?)?;
            (ElectionDoc { election, vcr: None }, Some(truth))
        }
        GenModel::Eds => {
            let edges = parse_edges(edges.as_deref().unwrap_or(""))?;
            let (election, truth) = eds_reduction(n, &edges, as_count(param, "y")?)?;
            (ElectionDoc { election, vcr: None }, Some(truth))
        }
        GenModel::X3c => {
            let sets = sets
                .as_deref()
                .ok_or_else(|| Error::InvalidParameter("x3c requires --sets".into()))?;
            let (election, truth) = x3c_reduction(n, &parse_sets(sets)?)?;
            (ElectionDoc { election, vcr: None }, Some(truth))
        }
        GenModel::Prop2 => {
            let inst = prop2_family(as_count(param, "t")?)?;
            let doc = ElectionDoc { election: inst.election, vcr: None };
            write_doc(&out, &doc)?;
            let sidecar = json!({
                "good_committee": inst.good_committee.indices(),
                "adversarial_tie_break": "lowest-index",
                "derivation": "greedy-gap family: the listed committee satisfies JR with \
                               welfare Theta(k*sqrt(k)); greedy coverage under the \
                               adversarial tie-break stays at Theta(k)",
            });
            let mut path = out.as_os_str().to_owned();
            path.push(".truth.json");
            fs::write(PathBuf::from(path), serde_json::to_vec(&sidecar).unwrap())?;
            println!("{}", json!({ "written": out }));
            return Ok(());
        }
    };
    write_doc(&out, &doc)?;
    if let Some(truth) = &truth {
        write_truth(&out, truth)?;
    }
    println!("{}", json!({ "written": out }));
    Ok(())
}

fn parse_committee(e: &Election, text: &str) -> Result<Committee, Error> {
    let ids: Vec<usize> = text
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse committee member {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    if ids.len() != e.k() {
        return Err(Error::WrongCommitteeSize { expected: e.k(), actual: ids.len() });
    }
    Committee::from_indices(e.num_candidates(), ids.iter().copied(), e.k())
}

fn report_json(report: &AxiomReport) -> serde_json::Value {
    match &report.witness {
        None => json!({ "satisfied": report.satisfied }),
        Some(w) => json!({
            "satisfied": report.satisfied,
            "witness": {
                "level": w.level,
                "candidates": w.candidates.to_vec(),
                "voters": w.voters.to_vec(),
            },
        }),
    }
}

fn cmd_check(axiom: AxiomArg, election: &PathBuf, committee: &str) -> Result<(), Error> {
    let doc = read_election(&fs::read(election)?, true)?;
    let w = parse_committee(&doc.election, committee)?;
    let report = match axiom {
        AxiomArg::Jr => check_jr(&doc.election, &w)?,
        AxiomArg::Ejr => check_ejr_with_budget(&doc.election, &w, budget())?,
    };
    println!("{}", report_json(&report));
    Ok(())
}

fn objective_value(e: &Election, w: &Committee, objective: ObjectiveArg) -> Result<u64, Error> {
    match objective {
        ObjectiveArg::Sw => social_welfare(e, w),
        ObjectiveArg::Cvr => coverage(e, w),
    }
}

fn cmd_solve(
    election: &PathBuf,
    objective: ObjectiveArg,
    constraint: ConstraintArg,
    method: MethodArg,
    stage2: Stage2Arg,
    fill: FillArg,
) -> Result<(), Error> {
    let doc = read_election(&fs::read(election)?, true)?;
    let e = &doc.election;
    let (value, committee, method_name, optimal) = match method {
        MethodArg::Brute => {
            let obj = match objective {
                ObjectiveArg::Sw => Objective::SocialWelfare,
                ObjectiveArg::Cvr => Objective::Coverage,
            };
            let con = match constraint {
                ConstraintArg::None => Constraint::None,
                ConstraintArg::Jr => Constraint::Jr,
                ConstraintArg::Ejr => Constraint::Ejr,
            };
            let report = solve(e, obj, con, budget())?;
            (report.value, report.witness, "brute", true)
        }
        MethodArg::Greedycc => {
            let stage2 = match stage2 {
                Stage2Arg::Welfare => SecondStage::Welfare,
                Stage2Arg::CoverageExhaustive => SecondStage::CoverageExhaustiveThenWelfare,
                Stage2Arg::CoverageGreedy => SecondStage::CoverageGreedyThenWelfare,
                Stage2Arg::LowestIndex => SecondStage::LowestIndex,
            };
            let (w, _) = greedy_cc(e, stage2, &TieBreak::LowestIndex)?;
            (objective_value(e, &w, objective)?, w, "greedycc", false)
        }
        MethodArg::Greedyejr => {
            let fill = match fill {
                FillArg::LowestIndex => FillPolicy::LowestIndex,
                FillArg::GreedyCoverage => FillPolicy::GreedyCoverage,
                FillArg::ExhaustiveCoverage => FillPolicy::ExhaustiveCoverage,
            };
            let w = greedy_ejr(e, fill)?;
            (objective_value(e, &w, objective)?, w, "greedyejr", false)
        }
        MethodArg::NkApprox => {
            let w = approx_n_equals_k(e)?;
            (objective_value(e, &w, objective)?, w, "nk-approx", false)
        }
        MethodArg::VcrDp => {
            let block = doc.vcr.as_ref().ok_or_else(|| {
                Error::Precondition("vcr-dp requires an election file with a geometry block".into())
            })?;
            let g = VcrGeometry::from_block(block)?;
            g.check_consistency(e)?;
            let report = solve_vcr(e, &g)?;
            (report.value, report.witness, "vcr-dp", true)
        }
    };
    println!(
        "{}",
        json!({
            "value": value,
            "committee": committee.indices(),
            "method": method_name,
            "optimal": optimal,
        })
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    curve: CurveArg,
    model: GenModel,
    n: usize,
    m: usize,
    k: usize,
    param: f64,
    alphas: &str,
    instances: usize,
    seed: u64,
    out: &PathBuf,
    require_jr: bool,
) -> Result<(), Error> {
    let model = match model {
        GenModel::Ic => Model::Ic { p: param },
        GenModel::Euclid1d => Model::Euclid { dim: 1, r: param },
        GenModel::Euclid2d => Model::Euclid { dim: 2, r: param },
        _ => {
            return Err(Error::InvalidParameter(
                "experiment supports the ic, euclid1d, and euclid2d models".into(),
            ))
        }
    };
    let parts: Vec<&str> = alphas.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(Error::InvalidParameter(format!(
            "alpha grid must be start:stop:step, got {alphas:?}"
        )));
    };
    let spec = CurveSpec {
        model,
        n,
        m,
        k,
        axis: match curve {
            CurveArg::F => Axis::SwGivenCvrFloor,
            CurveArg::G => Axis::CvrGivenSwFloor,
        },
        require_jr,
        alpha_start: parse_alpha(start)?,
        alpha_stop: parse_alpha(stop)?,
        alpha_step: parse_alpha(step)?,
        instances,
        base_seed: seed,
        budget: budget(),
    };
    spec.alphas()?; // surface grid errors before any work
    let records = run_curve(&spec)?;
    let csv = write_csv(&spec, &records);
    fs::create_dir_all(out)?;
    let tag = format!(
        "{}_{}_{}",
        spec.axis.short(),
        match spec.model {
            Model::Ic { .. } => "ic",
            Model::Euclid { dim: 1, .. } => "euclid1d",
            Model::Euclid { .. } => "euclid2d",
        },
        if require_jr { "jr" } else { "free" }
    );
    fs::write(out.join(format!("{tag}.csv")), &csv)?;
    fs::write(out.join(format!("{tag}.manifest.json")), write_manifest(&spec))?;
    print!("{csv}");
    Ok(())
}
