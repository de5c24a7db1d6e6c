//! Curve experiments: for a grid of floors alpha, maximize one objective
//! subject to the other reaching alpha times its optimum (optionally under
//! JR), average the resulting ratios over random instances, and emit CSV.
//! Also places the greedy heuristic's committee against the exact
//! per-instance frontier.
//!
//! Alphas are carried in exact micro-units (1e6 = 1.0) and all floors and
//! ratios use integer or rational arithmetic, so reruns are byte-identical.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::axioms::jr_violation;
use crate::bitset::BitSet;
use crate::election::Election;
use crate::error::{Error, Result};
use crate::forge::{gen, Model, ModelSpec};
use crate::greedy::{greedy_cc, pareto_greedy, SecondStage, TieBreak};
use crate::oracle::for_each_committee;

/// One alpha unit is 1e-6.
pub const ALPHA_ONE: u64 = 1_000_000;

/// Which objective is maximized; the other receives the alpha floor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// f: maximize social welfare under a coverage floor.
    SwGivenCvrFloor,
    /// g: maximize coverage under a welfare floor.
    CvrGivenSwFloor,
}

impl Axis {
    pub fn short(&self) -> &'static str {
        match self {
            Axis::SwGivenCvrFloor => "f",
            Axis::CvrGivenSwFloor => "g",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSpec {
    pub model: Model,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub axis: Axis,
    pub require_jr: bool,
    /// Inclusive grid in micro-units.
    pub alpha_start: u64,
    pub alpha_stop: u64,
    pub alpha_step: u64,
    pub instances: usize,
    pub base_seed: u64,
    pub budget: u64,
}

impl CurveSpec {
    pub fn alphas(&self) -> Result<Vec<u64>> {
        if self.alpha_step == 0 {
            return Err(Error::InvalidParameter("alpha step must be positive".into()));
        }
        if self.alpha_stop > ALPHA_ONE || self.alpha_start > self.alpha_stop {
            return Err(Error::InvalidParameter(format!(
                "alpha grid {}..{} outside [0, 1] or empty",
                self.alpha_start, self.alpha_stop
            )));
        }
        Ok((self.alpha_start..=self.alpha_stop).step_by(self.alpha_step as usize).collect())
    }
}

/// Parses a decimal like "0.01" into exact micro-units.
pub fn parse_alpha(text: &str) -> Result<u64> {
    let bad = || Error::InvalidParameter(format!("cannot parse alpha {text:?}"));
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if frac_part.len() > 6 || (int_part.is_empty() && frac_part.is_empty()) {
        return Err(bad());
    }
    let int: u64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
    let frac: u64 = if frac_part.is_empty() {
        0
    } else {
        let padded = format!("{frac_part:0<6}");
        padded.parse().map_err(|_| bad())?
    };
    Ok(int * ALPHA_ONE + frac)
}

/// Formats micro-units as a six-decimal literal.
pub fn format_alpha(micros: u64) -> String {
    format!("{}.{:06}", micros / ALPHA_ONE, micros % ALPHA_ONE)
}

/// Averaged outcome at one alpha grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct ParetoRecord {
    pub alpha_micros: u64,
    pub mean_ratio: BigRational,
    pub ratios: Vec<Ratio<u64>>,
    pub infeasible: usize,
}

/// Per-committee statistics, enumerated once per instance so that every
/// alpha grid point is a table scan rather than a fresh enumeration.
struct CommitteeTable {
    rows: Vec<(u64, u64, bool)>, // (sw, cvr, satisfies JR)
    sw_opt: u64,
    cvr_opt: u64,
}

fn build_table(e: &Election, budget: u64) -> Result<CommitteeTable> {
    let mut rows = Vec::new();
    for_each_committee(e, budget, |info| {
        let members = BitSet::from_indices(e.num_candidates(), info.members.iter().copied());
        let jr = jr_violation(e, &members).is_none();
        rows.push((info.sw, info.cvr, jr));
    })?;
    let sw_opt = rows.iter().map(|r| r.0).max().unwrap_or(0);
    let cvr_opt = rows.iter().map(|r| r.1).max().unwrap_or(0);
    Ok(CommitteeTable { rows, sw_opt, cvr_opt })
}

impl CommitteeTable {
    /// Best value of the axis objective under the floor, or `None` when
    /// no committee qualifies.
    fn solve(&self, axis: Axis, floor: u64, require_jr: bool) -> Option<u64> {
        self.rows
            .iter()
            .filter(|(sw, cvr, jr)| {
                let (value_other, _) = match axis {
                    Axis::SwGivenCvrFloor => (*cvr, *sw),
                    Axis::CvrGivenSwFloor => (*sw, *cvr),
                };
                value_other >= floor && (!require_jr || *jr)
            })
            .map(|(sw, cvr, _)| match axis {
                Axis::SwGivenCvrFloor => *sw,
                Axis::CvrGivenSwFloor => *cvr,
            })
            .max()
    }
}

fn ceil_mul(alpha_micros: u64, base: u64) -> u64 {
    ((alpha_micros as u128 * base as u128).div_ceil(ALPHA_ONE as u128)) as u64
}

/// Runs the full grid: one generated instance per seed, one table scan
/// per (instance, alpha). Infeasible points contribute ratio 0.
pub fn run_curve(spec: &CurveSpec) -> Result<Vec<ParetoRecord>> {
    let alphas = spec.alphas()?;
    if spec.instances == 0 {
        return Err(Error::InvalidParameter("instance count must be positive".into()));
    }
    let mut tables = Vec::with_capacity(spec.instances);
    for i in 0..spec.instances {
        let model_spec = ModelSpec {
            model: spec.model,
            n: spec.n,
            m: spec.m,
            k: spec.k,
            seed: spec.base_seed.wrapping_add(i as u64),
        };
        let (e, _) = gen(&model_spec)?;
        tables.push(build_table(&e, spec.budget)?);
    }
    let mut records = Vec::with_capacity(alphas.len());
    for &alpha in &alphas {
        let mut ratios = Vec::with_capacity(spec.instances);
        let mut infeasible = 0;
        let mut sum = BigRational::zero();
        for table in &tables {
            let (base, denom) = match spec.axis {
                Axis::SwGivenCvrFloor => (table.cvr_opt, table.sw_opt),
                Axis::CvrGivenSwFloor => (table.sw_opt, table.cvr_opt),
            };
            let floor = ceil_mul(alpha, base);
            let ratio = match table.solve(spec.axis, floor, spec.require_jr) {
                Some(value) => Ratio::new(value, denom),
                None => {
                    infeasible += 1;
                    Ratio::new(0, 1)
                }
            };
            sum += BigRational::new(BigInt::from(*ratio.numer()), BigInt::from(*ratio.denom()));
            ratios.push(ratio);
        }
        let mean_ratio = sum / BigInt::from(spec.instances as u64);
        records.push(ParetoRecord { alpha_micros: alpha, mean_ratio, ratios, infeasible });
    }
    Ok(records)
}

fn model_name(model: &Model) -> &'static str {
    match model {
        Model::Ic { .. } => "ic",
        Model::Euclid { dim: 1, .. } => "euclid1d",
        Model::Euclid { .. } => "euclid2d",
    }
}

fn model_param(model: &Model) -> f64 {
    match model {
        Model::Ic { p } => *p,
        Model::Euclid { r, .. } => *r,
    }
}

/// Truncating nine-decimal rendering of an exact rational in [0, 1].
fn format_ratio(r: &BigRational) -> String {
    let scaled = (r * BigInt::from(1_000_000_000u64)).trunc();
    let micros = scaled.numer().abs().to_u64().unwrap_or(0);
    format!("{}.{:09}", micros / 1_000_000_000, micros % 1_000_000_000)
}

/// One CSV row per alpha grid point, fixed column order.
pub fn write_csv(spec: &CurveSpec, records: &[ParetoRecord]) -> String {
    let mut out = String::from(
        "axis,model,n,m,k,param,alpha,mean_ratio,n_instances,n_infeasible,base_seed\n",
    );
    for rec in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            spec.axis.short(),
            model_name(&spec.model),
            spec.n,
            spec.m,
            spec.k,
            model_param(&spec.model),
            format_alpha(rec.alpha_micros),
            format_ratio(&rec.mean_ratio),
            spec.instances,
            rec.infeasible,
            spec.base_seed,
        ));
    }
    out
}

/// Sidecar manifest with the full spec (one per CSV).
pub fn write_manifest(spec: &CurveSpec) -> String {
    format!(
        concat!(
            "{{\"axis\":\"{}\",\"model\":\"{}\",\"param\":{},\"n\":{},\"m\":{},\"k\":{},",
            "\"require_jr\":{},\"alpha_start\":\"{}\",\"alpha_stop\":\"{}\",\"alpha_step\":\"{}\",",
            "\"instances\":{},\"base_seed\":{},\"budget\":{},\"version\":\"{}\"}}\n"
        ),
        spec.axis.short(),
        model_name(&spec.model),
        model_param(&spec.model),
        spec.n,
        spec.m,
        spec.k,
        spec.require_jr,
        format_alpha(spec.alpha_start),
        format_alpha(spec.alpha_stop),
        format_alpha(spec.alpha_step),
        spec.instances,
        spec.base_seed,
        spec.budget,
        env!("CARGO_PKG_VERSION"),
    )
}

/// Exact placement of the greedy heuristic against the instance frontier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyPlacement {
    /// cvr(W) / cvr(I) with the exact optimum as denominator.
    pub cvr_ratio: Ratio<u64>,
    /// sw(W) / sw(I).
    pub sw_ratio: Ratio<u64>,
    /// No committee has coverage >= cvr(W) and welfare > sw(W).
    pub on_frontier: bool,
    /// (sw(W') - sw(W)) / sw(I) for the best such W'; zero on the frontier.
    pub gap: Ratio<u64>,
    /// Greedy coverage estimate cvr(W-bar), the heuristic's internal
    /// denominator, reported alongside the exact one.
    pub cvr_estimate: u64,
}

pub fn place_greedy(e: &Election, budget: u64) -> Result<GreedyPlacement> {
    let (w, _) = pareto_greedy(e)?;
    let members = w.members().clone();
    let sw_w = crate::election::social_welfare(e, &w)?;
    let cvr_w = crate::election::coverage(e, &w)?;
    let mut sw_opt = 0u64;
    let mut cvr_opt = 0u64;
    let mut best_above = 0u64; // best welfare among committees with cvr >= cvr(W)
    for_each_committee(e, budget, |info| {
        sw_opt = sw_opt.max(info.sw);
        cvr_opt = cvr_opt.max(info.cvr);
        if info.cvr >= cvr_w {
            best_above = best_above.max(info.sw);
        }
    })?;
    debug_assert!(members.len() == e.k());
    let on_frontier = best_above <= sw_w;
    let gap = if on_frontier { Ratio::new(0, 1) } else { Ratio::new(best_above - sw_w, sw_opt) };
    let (cvr_bar, _) = greedy_cc(e, SecondStage::Welfare, &TieBreak::LowestIndex)?;
    Ok(GreedyPlacement {
        cvr_ratio: Ratio::new(cvr_w, cvr_opt),
        sw_ratio: Ratio::new(sw_w, sw_opt),
        on_frontier,
        gap,
        cvr_estimate: crate::election::coverage(e, &cvr_bar)?,
    })
}
