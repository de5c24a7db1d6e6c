//! Exact JR and EJR verdicts with violating-group witnesses.

use crate::bitset::BitSet;
use crate::election::{Committee, Election};
use crate::error::{Error, Result};

/// Default node budget for the exponential cohesive-group searches.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// A witness for a JR/EJR violation: an `level`-cohesive, `level`-large
/// group `voters` jointly approving `candidates`, all of whose members
/// approve fewer than `level` committee members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub level: usize,
    pub candidates: BitSet,
    pub voters: BitSet,
}

/// Verdict of an axiom check. `witness` is populated exactly when the
/// axiom fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub satisfied: bool,
    pub witness: Option<Witness>,
}

impl AxiomReport {
    fn ok() -> Self {
        AxiomReport { satisfied: true, witness: None }
    }

    fn violated(witness: Witness) -> Self {
        AxiomReport { satisfied: false, witness: Some(witness) }
    }
}

fn require_size(e: &Election, w: &Committee) -> Result<()> {
    if w.len() != e.k() {
        return Err(Error::WrongCommitteeSize { expected: e.k(), actual: w.len() });
    }
    Ok(())
}

/// First JR violation of a (possibly partial) committee, if any.
///
/// JR fails iff some candidate `c` is approved by at least `n/k` voters
/// none of whom is covered by `members`. This per-candidate scan is
/// equivalent to enumerating cohesive groups: any unrepresented cohesive
/// group of size `>= n/k` jointly approves some candidate, and the full
/// set of uncovered approvers of that candidate is itself such a group.
pub fn jr_violation(e: &Election, members: &BitSet) -> Option<(usize, BitSet)> {
    let threshold = e.jr_threshold();
    for c in 0..e.num_candidates() {
        if members.contains(c) {
            continue;
        }
        let mut group = BitSet::new(e.num_voters());
        for (i, b) in e.ballots().iter().enumerate() {
            if b.contains(c) && !b.intersects(members) {
                group.insert(i);
            }
        }
        if threshold.is_met_by(group.len()) && !group.is_empty() {
            return Some((c, group));
        }
    }
    None
}

/// Exact JR verdict for a size-`k` committee, in O(m*n) ballot scans.
pub fn check_jr(e: &Election, w: &Committee) -> Result<AxiomReport> {
    require_size(e, w)?;
    Ok(match jr_violation(e, w.members()) {
        None => AxiomReport::ok(),
        Some((c, voters)) => AxiomReport::violated(Witness {
            level: 1,
            candidates: BitSet::from_indices(e.num_candidates(), [c]),
            voters,
        }),
    })
}

/// DFS over candidate sets `B` of size `level` whose deprived supporter
/// set stays `level`-large. Returns the first (lexicographically
/// smallest) violating `B` found.
struct GroupSearch<'a> {
    supporters: &'a [BitSet],
    budget: u64,
    nodes: u64,
}

impl GroupSearch<'_> {
    fn find_violation(
        &mut self,
        level: usize,
        eligible: &BitSet,
        num: u64,
        den: u64,
    ) -> std::result::Result<Option<(Vec<usize>, BitSet)>, ()> {
        let mut chosen = Vec::with_capacity(level);
        self.dfs_first(0, level, eligible, num, den, &mut chosen)
    }

    fn dfs_first(
        &mut self,
        start: usize,
        remaining: usize,
        support: &BitSet,
        num: u64,
        den: u64,
        chosen: &mut Vec<usize>,
    ) -> std::result::Result<Option<(Vec<usize>, BitSet)>, ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        if (support.len() as u128) * (den as u128) < num as u128 {
            return Ok(None);
        }
        if remaining == 0 {
            return Ok(Some((chosen.clone(), support.clone())));
        }
        let m = self.supporters.len();
        for c in start..m.saturating_sub(remaining - 1) {
            let next = support.intersection(&self.supporters[c]);
            chosen.push(c);
            let found = self.dfs_first(c + 1, remaining - 1, &next, num, den, chosen)?;
            chosen.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    /// Maximum-support set of size `level`; ties resolved in favor of the
    /// lexicographically smallest candidate set by visiting in DFS order
    /// and replacing only on strict improvement.
    fn find_max(
        &mut self,
        start: usize,
        remaining: usize,
        support: &BitSet,
        num: u64,
        den: u64,
        chosen: &mut Vec<usize>,
        best: &mut Option<(Vec<usize>, BitSet)>,
    ) -> std::result::Result<(), ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        let size = support.len();
        if (size as u128) * (den as u128) < num as u128 {
            return Ok(());
        }
        if let Some((_, s)) = best {
            if size <= s.len() {
                return Ok(());
            }
        }
        if remaining == 0 {
            *best = Some((chosen.clone(), support.clone()));
            return Ok(());
        }
        let m = self.supporters.len();
        for c in start..m.saturating_sub(remaining - 1) {
            let next = support.intersection(&self.supporters[c]);
            chosen.push(c);
            self.find_max(c + 1, remaining - 1, &next, num, den, chosen, best)?;
            chosen.pop();
        }
        Ok(())
    }
}

/// Exact EJR verdict. The candidate-subset enumeration is pruned to sets
/// whose deprived supporter group stays large enough; worst-case
/// exponential, guarded by `budget` DFS nodes.
pub fn check_ejr_with_budget(e: &Election, w: &Committee, budget: u64) -> Result<AxiomReport> {
    require_size(e, w)?;
    let supporters = e.supporter_table();
    let mut search = GroupSearch { supporters: &supporters, budget, nodes: 0 };
    for level in 1..=e.k() {
        let mut deprived = BitSet::new(e.num_voters());
        for (i, b) in e.ballots().iter().enumerate() {
            if b.intersection_len(w.members()) < level {
                deprived.insert(i);
            }
        }
        let num = level as u64 * e.num_voters() as u64;
        let den = e.k() as u64;
        match search.find_violation(level, &deprived, num, den) {
            Ok(None) => {}
            Ok(Some((b, voters))) => {
                return Ok(AxiomReport::violated(Witness {
                    level,
                    candidates: BitSet::from_indices(e.num_candidates(), b),
                    voters,
                }));
            }
            Err(()) => {
                return Err(Error::BudgetExceeded {
                    budget,
                    context: format!("in EJR check at level {level}"),
                });
            }
        }
    }
    Ok(AxiomReport::ok())
}

/// [`check_ejr_with_budget`] with the default budget.
pub fn check_ejr(e: &Election, w: &Committee) -> Result<AxiomReport> {
    check_ejr_with_budget(e, w, DEFAULT_NODE_BUDGET)
}

/// Maximum-size `level`-cohesive, `level`-large group among voters not in
/// `excluded`. Returns the witnessing candidate set (lexicographically
/// smallest among maximum-size groups) and the full supporter set, or
/// `None` when no group qualifies.
pub fn max_cohesive_group(
    e: &Election,
    level: usize,
    excluded: &BitSet,
    budget: u64,
) -> Result<Option<(BitSet, BitSet)>> {
    if level == 0 || level > e.k() {
        return Err(Error::Precondition(format!("level {level} not in 1..=k")));
    }
    let mut pool = BitSet::full(e.num_voters());
    pool.subtract(excluded);
    let supporters = e.supporter_table();
    let mut search = GroupSearch { supporters: &supporters, budget, nodes: 0 };
    let num = level as u64 * e.num_voters() as u64;
    let den = e.k() as u64;
    let mut best = None;
    let mut chosen = Vec::with_capacity(level);
    search
        .find_max(0, level, &pool, num, den, &mut chosen, &mut best)
        .map_err(|()| Error::BudgetExceeded {
            budget,
            context: format!("in cohesive-group search at level {level}"),
        })?;
    Ok(best.map(|(b, voters)| (BitSet::from_indices(e.num_candidates(), b), voters)))
}
