//! GreedyEJR: the level-descending group-claiming algorithm whose output
//! provides EJR, with pluggable second-stage fill policies.

use crate::axioms::{max_cohesive_group, DEFAULT_NODE_BUDGET};
use crate::bitset::BitSet;
use crate::election::{Committee, Election};
use crate::error::{Error, Result};
use crate::greedy::{binomial, DEFAULT_SUBSET_BUDGET};

/// How the committee is extended to size k after the group-claiming stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FillPolicy {
    LowestIndex,
    /// Standard marginal-coverage greedy, ties by lowest index.
    GreedyCoverage,
    /// Optimal coverage fill by subset enumeration; desk-scale only.
    ExhaustiveCoverage,
}

/// One accepted group of the first stage.
#[derive(Clone, Debug)]
pub struct ClaimedGroup {
    pub level: usize,
    pub candidates: BitSet,
    pub voters: BitSet,
}

/// GreedyEJR with a record of every accepted group.
pub fn greedy_ejr_with_trace(
    e: &Election,
    fill: FillPolicy,
    budget: u64,
) -> Result<(Committee, Vec<ClaimedGroup>)> {
    let mut members = BitSet::new(e.num_candidates());
    let mut removed = BitSet::new(e.num_voters());
    let mut groups = Vec::new();
    for level in (1..=e.k()).rev() {
        loop {
            match max_cohesive_group(e, level, &removed, budget)? {
                None => break,
                Some((common, voters)) => {
                    // The claimed candidates are the `level` lowest-indexed
                    // members of the group's common intersection.
                    let mut picked = BitSet::new(e.num_candidates());
                    for c in common.iter().take(level) {
                        picked.insert(c);
                    }
                    members.union_with(&picked);
                    removed.union_with(&voters);
                    groups.push(ClaimedGroup { level, candidates: picked, voters });
                    debug_assert!(
                        removed.len() as u64 * e.k() as u64
                            >= groups.iter().map(|g| g.level as u64).sum::<u64>()
                                * e.num_voters() as u64
                    );
                }
            }
        }
    }
    debug_assert!(members.len() <= e.k());
    fill_to_k(e, &mut members, fill, budget)?;
    Ok((Committee::new(members, e.k())?, groups))
}

/// Algorithm 1 (GreedyEJR). For each level from k down to 1, repeatedly
/// claims a maximum-size level-cohesive, level-large group of remaining
/// voters, adding the group's witnessing candidates; then fills to size k
/// per `fill`. The output provides EJR.
pub fn greedy_ejr(e: &Election, fill: FillPolicy) -> Result<Committee> {
    greedy_ejr_with_trace(e, fill, DEFAULT_NODE_BUDGET).map(|(w, _)| w)
}

fn fill_to_k(e: &Election, members: &mut BitSet, fill: FillPolicy, budget: u64) -> Result<()> {
    let need = e.k() - members.len();
    if need == 0 {
        return Ok(());
    }
    match fill {
        FillPolicy::LowestIndex => {
            let mut added = 0;
            for c in 0..e.num_candidates() {
                if added == need {
                    break;
                }
                if !members.contains(c) {
                    members.insert(c);
                    added += 1;
                }
            }
        }
        FillPolicy::GreedyCoverage => {
            let supporters = e.supporter_table();
            let mut covered = BitSet::new(e.num_voters());
            for c in members.iter() {
                covered.union_with(&supporters[c]);
            }
            for _ in 0..need {
                let c = (0..e.num_candidates())
                    .filter(|&c| !members.contains(c))
                    .max_by_key(|&c| {
                        let fresh =
                            supporters[c].len() - supporters[c].intersection_len(&covered);
                        (fresh, usize::MAX - c)
                    })
                    .expect("k <= m");
                members.insert(c);
                covered.union_with(&supporters[c]);
            }
        }
        FillPolicy::ExhaustiveCoverage => {
            let combos = binomial(e.num_candidates() as u64, need as u64);
            if combos > DEFAULT_SUBSET_BUDGET.min(budget) {
                return Err(Error::BudgetExceeded {
                    budget,
                    context: format!("exhaustive coverage fill: {combos} subsets"),
                });
            }
            let supporters = e.supporter_table();
            let mut base = BitSet::new(e.num_voters());
            for c in members.iter() {
                base.union_with(&supporters[c]);
            }
            let pool: Vec<usize> =
                (0..e.num_candidates()).filter(|&c| !members.contains(c)).collect();
            let mut best: Option<(usize, Vec<usize>)> = None;
            let mut chosen = Vec::with_capacity(need);
            subsets(&pool, need, &mut chosen, &mut |subset| {
                let mut covered = base.clone();
                for &c in subset {
                    covered.union_with(&supporters[c]);
                }
                let cvr = covered.len();
                if best.as_ref().map_or(true, |(b, _)| cvr > *b) {
                    best = Some((cvr, subset.to_vec()));
                }
            });
            for c in best.expect("pool is large enough").1 {
                members.insert(c);
            }
        }
    }
    Ok(())
}

fn subsets(pool: &[usize], size: usize, chosen: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if size == 0 {
        f(chosen);
        return;
    }
    if pool.len() < size {
        return;
    }
    for i in 0..=pool.len() - size {
        chosen.push(pool[i]);
        subsets(&pool[i + 1..], size - 1, chosen, f);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{check_ejr, check_jr};
    use crate::election::tests::example2_t2;
    use crate::election::coverage;

    #[test]
    fn example2_exhaustive_fill() {
        let e = example2_t2();
        let (w, groups) =
            greedy_ejr_with_trace(&e, FillPolicy::ExhaustiveCoverage, DEFAULT_NODE_BUDGET)
                .unwrap();
        // The unique 2-cohesive 2-large group claims {a1, a2} first.
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].level, 2);
        assert_eq!(groups[0].candidates.to_vec(), vec![0, 1]);
        assert_eq!(coverage(&e, &w).unwrap(), 6);
        assert!(check_ejr(&e, &w).unwrap().satisfied);
    }

    #[test]
    fn no_cohesive_groups_means_fill_only() {
        // n/k = 2 but all ballots are disjoint singletons: the first stage
        // claims nothing, and any fill still provides EJR vacuously.
        let e = Election::from_ballot_indices(4, 2, &[vec![0], vec![1], vec![2], vec![3]], true)
            .unwrap();
        for fill in
            [FillPolicy::LowestIndex, FillPolicy::GreedyCoverage, FillPolicy::ExhaustiveCoverage]
        {
            let (w, groups) = greedy_ejr_with_trace(&e, fill, DEFAULT_NODE_BUDGET).unwrap();
            assert!(groups.is_empty());
            assert_eq!(w.len(), 2);
            assert!(check_ejr(&e, &w).unwrap().satisfied);
            assert!(check_jr(&e, &w).unwrap().satisfied);
        }
    }

    #[test]
    fn pool_shrinkage_bound() {
        let e = example2_t2();
        let (_, groups) =
            greedy_ejr_with_trace(&e, FillPolicy::GreedyCoverage, DEFAULT_NODE_BUDGET).unwrap();
        // Each accepted group removes at least level * n/k voters.
        for g in &groups {
            assert!(g.voters.len() as u64 * e.k() as u64 >= g.level as u64 * e.num_voters() as u64);
        }
    }
}
