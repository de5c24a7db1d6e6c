//! Brute-force enumeration of all size-k committees: exact optima with
//! and without axiom constraints, Pareto frontiers, and price ratios.
//! This module is the ground truth for everything else.

use num_rational::Ratio;

use crate::axioms::{check_ejr_with_budget, jr_violation, DEFAULT_NODE_BUDGET};
use crate::bitset::BitSet;
use crate::election::{Committee, Election};
use crate::error::{Error, Result};
use crate::greedy::binomial;

/// Default cap on the number of enumerated committees.
pub const DEFAULT_ENUM_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    SocialWelfare,
    Coverage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    None,
    Jr,
    Ejr,
}

/// An exact optimum with one witness and the number of optima.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimumReport {
    pub value: u64,
    pub witness: Committee,
    pub count: u64,
}

/// Exact price ratios of imposing JR, in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PricePair {
    pub sw_price: Ratio<u64>,
    pub cvr_price: Ratio<u64>,
}

fn ensure_budget(e: &Election, budget: u64) -> Result<()> {
    let combos = binomial(e.num_candidates() as u64, e.k() as u64);
    if combos > budget {
        return Err(Error::BudgetExceeded {
            budget,
            context: format!(
                "committee enumeration: C({}, {}) = {combos}",
                e.num_candidates(),
                e.k()
            ),
        });
    }
    Ok(())
}

/// Per-committee statistics shared by the enumeration callers.
pub struct CommitteeInfo<'a> {
    pub members: &'a [usize],
    pub sw: u64,
    pub cvr: u64,
}

/// Visits every size-k committee in lexicographic order, with incremental
/// welfare and coverage accounting.
pub fn for_each_committee(e: &Election, budget: u64, mut f: impl FnMut(&CommitteeInfo)) -> Result<()> {
    ensure_budget(e, budget)?;
    let supporters = e.supporter_table();
    let scores: Vec<u64> = supporters.iter().map(|s| s.len() as u64).collect();
    let m = e.num_candidates();
    let k = e.k();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    // Stack of coverage sets; level d holds coverage of chosen[..d].
    let mut covered: Vec<BitSet> = vec![BitSet::new(e.num_voters()); k + 1];
    let mut sw_stack: Vec<u64> = vec![0; k + 1];

    fn recurse(
        start: usize,
        m: usize,
        k: usize,
        supporters: &[BitSet],
        scores: &[u64],
        chosen: &mut Vec<usize>,
        covered: &mut Vec<BitSet>,
        sw_stack: &mut Vec<u64>,
        f: &mut impl FnMut(&CommitteeInfo),
    ) {
        let depth = chosen.len();
        if depth == k {
            f(&CommitteeInfo {
                members: chosen,
                sw: sw_stack[depth],
                cvr: covered[depth].len() as u64,
            });
            return;
        }
        let remaining = k - depth;
        for c in start..=m - remaining {
            chosen.push(c);
            let (head, tail) = covered.split_at_mut(depth + 1);
            tail[0].clone_from(&head[depth]);
            tail[0].union_with(&supporters[c]);
            sw_stack[depth + 1] = sw_stack[depth] + scores[c];
            recurse(c + 1, m, k, supporters, scores, chosen, covered, sw_stack, f);
            chosen.pop();
        }
    }

    recurse(0, m, k, &supporters, &scores, &mut chosen, &mut covered, &mut sw_stack, &mut f);
    Ok(())
}

fn satisfies(e: &Election, members: &[usize], constraint: Constraint) -> Result<bool> {
    match constraint {
        Constraint::None => Ok(true),
        Constraint::Jr => {
            let set = BitSet::from_indices(e.num_candidates(), members.iter().copied());
            Ok(jr_violation(e, &set).is_none())
        }
        Constraint::Ejr => {
            let w = Committee::from_indices(
                e.num_candidates(),
                members.iter().copied(),
                e.k(),
            )?;
            Ok(check_ejr_with_budget(e, &w, DEFAULT_NODE_BUDGET)?.satisfied)
        }
    }
}

/// Exact optimum of `objective` over all size-k committees meeting
/// `constraint`. JR and EJR are always feasible, so a report is always
/// produced (within budget).
pub fn solve(e: &Election, objective: Objective, constraint: Constraint, budget: u64) -> Result<OptimumReport> {
    let mut best: Option<(u64, Vec<usize>, u64)> = None;
    let mut pending_err = None;
    for_each_committee(e, budget, |info| {
        if pending_err.is_some() {
            return;
        }
        let value = match objective {
            Objective::SocialWelfare => info.sw,
            Objective::Coverage => info.cvr,
        };
        // Skip the axiom check whenever the value cannot matter.
        if let Some((bv, _, _)) = &best {
            if value < *bv {
                return;
            }
        }
        match satisfies(e, info.members, constraint) {
            Err(err) => pending_err = Some(err),
            Ok(false) => {}
            Ok(true) => match &mut best {
                Some((bv, _, count)) if value == *bv => *count += 1,
                Some((bv, witness, count)) if value > *bv => {
                    *bv = value;
                    *witness = info.members.to_vec();
                    *count = 1;
                }
                Some(_) => {}
                None => best = Some((value, info.members.to_vec(), 1)),
            },
        }
    })?;
    if let Some(err) = pending_err {
        return Err(err);
    }
    let (value, members, count) =
        best.expect("JR and EJR committees always exist, so an optimum exists");
    let witness = Committee::from_indices(e.num_candidates(), members, e.k())?;
    Ok(OptimumReport { value, witness, count })
}

/// Exact optimum of `maximize` subject to a floor on the other objective
/// and, optionally, JR. `None` when infeasible.
pub fn solve_constrained(
    e: &Election,
    maximize: Objective,
    floor_on_other: u64,
    require_jr: bool,
    budget: u64,
) -> Result<Option<OptimumReport>> {
    let mut best: Option<(u64, Vec<usize>, u64)> = None;
    for_each_committee(e, budget, |info| {
        let (value, other) = match maximize {
            Objective::SocialWelfare => (info.sw, info.cvr),
            Objective::Coverage => (info.cvr, info.sw),
        };
        if other < floor_on_other {
            return;
        }
        if let Some((bv, _, _)) = &best {
            if value < *bv {
                return;
            }
        }
        if require_jr {
            let set = BitSet::from_indices(e.num_candidates(), info.members.iter().copied());
            if jr_violation(e, &set).is_some() {
                return;
            }
        }
        match &mut best {
            Some((bv, _, count)) if value == *bv => *count += 1,
            Some((bv, witness, count)) if value > *bv => {
                *bv = value;
                *witness = info.members.to_vec();
                *count = 1;
            }
            Some(_) => {}
            None => best = Some((value, info.members.to_vec(), 1)),
        }
    })?;
    match best {
        None => Ok(None),
        Some((value, members, count)) => {
            let witness = Committee::from_indices(e.num_candidates(), members, e.k())?;
            Ok(Some(OptimumReport { value, witness, count }))
        }
    }
}

/// Exact (coverage, max-welfare) frontier after dominance pruning:
/// sorted by coverage ascending, welfare strictly decreasing.
pub fn pareto_frontier(e: &Election, require_jr: bool, budget: u64) -> Result<Vec<(u64, u64)>> {
    let n = e.num_voters();
    let mut best_sw: Vec<Option<u64>> = vec![None; n + 1];
    for_each_committee(e, budget, |info| {
        if require_jr {
            let set = BitSet::from_indices(e.num_candidates(), info.members.iter().copied());
            if jr_violation(e, &set).is_some() {
                return;
            }
        }
        let slot = &mut best_sw[info.cvr as usize];
        if slot.map_or(true, |s| info.sw > s) {
            *slot = Some(info.sw);
        }
    })?;
    // Scan from the highest coverage down; a point survives only if its
    // welfare strictly exceeds everything to its right.
    let mut frontier = Vec::new();
    let mut best_so_far: Option<u64> = None;
    for cvr in (0..=n as u64).rev() {
        if let Some(sw) = best_sw[cvr as usize] {
            if best_so_far.map_or(true, |b| sw > b) {
                frontier.push((cvr, sw));
                best_so_far = Some(sw);
            }
        }
    }
    frontier.reverse();
    Ok(frontier)
}

/// Exact JR price ratios on one instance.
pub fn price_of_jr(e: &Election, budget: u64) -> Result<PricePair> {
    let sw_opt = solve(e, Objective::SocialWelfare, Constraint::None, budget)?.value;
    let sw_jr = solve(e, Objective::SocialWelfare, Constraint::Jr, budget)?.value;
    let cvr_opt = solve(e, Objective::Coverage, Constraint::None, budget)?.value;
    let cvr_jr = solve(e, Objective::Coverage, Constraint::Jr, budget)?.value;
    if sw_jr == 0 || cvr_jr == 0 {
        return Err(Error::UndefinedPrice);
    }
    Ok(PricePair {
        sw_price: Ratio::new(sw_opt, sw_jr),
        cvr_price: Ratio::new(cvr_opt, cvr_jr),
    })
}
