//! Cross-checks every fast checker and solver against literal-definition
//! brute force on exhaustively small and randomly sampled instances.

use jrlab_core::axioms::{check_ejr, check_jr};
use jrlab_core::election::social_welfare;
use jrlab_core::greedy::binomial;
use jrlab_core::oracle::{solve, Constraint, Objective, DEFAULT_ENUM_BUDGET};
use jrlab_core::vcr::{dp_non_nested, solve_vcr, ScaledAgent, VcrGeometry};
use jrlab_core::{BitSet, Committee, Election};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// JR straight from the definition: no group of >= n/k voters with a
/// commonly approved candidate may be entirely unrepresented.
fn jr_by_definition(e: &Election, w: &Committee) -> bool {
    let n = e.num_voters();
    for subset in 0u32..(1 << n) {
        let voters: Vec<usize> = (0..n).filter(|i| subset & (1 << i) != 0).collect();
        if (voters.len() * e.k()) < n || voters.is_empty() {
            continue;
        }
        let mut common = BitSet::full(e.num_candidates());
        for &i in &voters {
            common.intersect_with(e.ballot(i));
        }
        if common.is_empty() {
            continue;
        }
        if voters.iter().all(|&i| !e.ballot(i).intersects(w.members())) {
            return false;
        }
    }
    true
}

/// EJR straight from the definition, over all voter subsets and levels.
fn ejr_by_definition(e: &Election, w: &Committee) -> bool {
    let n = e.num_voters();
    for level in 1..=e.k() {
        for subset in 0u32..(1 << n) {
            let voters: Vec<usize> = (0..n).filter(|i| subset & (1 << i) != 0).collect();
            if voters.len() * e.k() < level * n || voters.is_empty() {
                continue;
            }
            let mut common = BitSet::full(e.num_candidates());
            for &i in &voters {
                common.intersect_with(e.ballot(i));
            }
            if common.len() < level {
                continue;
            }
            if voters.iter().all(|&i| e.ballot(i).intersection_len(w.members()) < level) {
                return false;
            }
        }
    }
    true
}

fn random_election(rng: &mut ChaCha8Rng, n: usize, m: usize, k: usize) -> Election {
    loop {
        let ballots: Vec<Vec<usize>> = (0..n)
            .map(|_| (0..m).filter(|_| rng.next_u64() % 3 == 0).collect())
            .collect();
        if ballots.iter().all(|b| !b.is_empty()) {
            return Election::from_ballot_indices(m, k, &ballots, true).unwrap();
        }
    }
}

fn all_committees(m: usize, k: usize) -> Vec<Committee> {
    let mut out = Vec::new();
    let mut pick = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, pick: &mut Vec<usize>, out: &mut Vec<Committee>) {
        if pick.len() == k {
            out.push(Committee::from_indices(m, pick.iter().copied(), k).unwrap());
            return;
        }
        for c in start..m {
            pick.push(c);
            rec(c + 1, m, k, pick, out);
            pick.pop();
        }
    }
    rec(0, m, k, &mut pick, &mut out);
    out
}

#[test]
fn jr_checker_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..300 {
        let n = 2 + (trial % 5);
        let m = 2 + (trial % 4);
        let k = 1 + (trial % m).min(m - 1);
        let e = random_election(&mut rng, n, m, k);
        for w in all_committees(m, k) {
            let fast = check_jr(&e, &w).unwrap();
            assert_eq!(fast.satisfied, jr_by_definition(&e, &w), "n={n} m={m} k={k}");
            if let Some(witness) = &fast.witness {
                // The witness must itself certify a violation.
                assert!(witness
                    .voters
                    .iter()
                    .all(|i| !e.ballot(i).intersects(w.members())));
                assert!(witness.voters.len() * e.k() >= e.num_voters());
            }
        }
    }
}

#[test]
fn ejr_checker_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..200 {
        let n = 2 + (trial % 5);
        let m = 2 + (trial % 4);
        let k = 1 + (trial % m).min(m - 1);
        let e = random_election(&mut rng, n, m, k);
        for w in all_committees(m, k) {
            let fast = check_ejr(&e, &w).unwrap();
            assert_eq!(fast.satisfied, ejr_by_definition(&e, &w), "n={n} m={m} k={k}");
        }
    }
}

fn random_shared_radius_geometry(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    radius_grid: i64,
) -> VcrGeometry {
    let coord = |rng: &mut ChaCha8Rng| (rng.next_u64() >> 32) as i64;
    let voters = (0..n).map(|_| ScaledAgent { x: coord(rng), r: 0 }).collect();
    let candidates = (0..m).map(|_| ScaledAgent { x: coord(rng), r: radius_grid }).collect();
    VcrGeometry::new(voters, candidates).unwrap()
}

/// Brute force over subsets of the candidate list: best welfare among
/// size-kstar subsets that provide JR for the restricted instance.
fn best_restricted(e: &Election, ordered: &[usize], kstar: usize) -> Option<u64> {
    let supporters: Vec<BitSet> = ordered.iter().map(|&c| e.supporters(c)).collect();
    let mut best = None;
    for w in all_committees(ordered.len(), kstar) {
        // JR with parameter k for a committee of size kstar <= k.
        let mut covered = BitSet::new(e.num_voters());
        for p in w.members().iter() {
            covered.union_with(&supporters[p]);
        }
        let violated = (0..ordered.len()).any(|p| {
            let mut grp = supporters[p].clone();
            grp.subtract(&covered);
            grp.len() * e.k() >= e.num_voters()
        });
        if violated {
            continue;
        }
        let sw: u64 = w.members().iter().map(|p| supporters[p].len() as u64).sum();
        if best.map_or(true, |b| sw > b) {
            best = Some(sw);
        }
    }
    best
}

#[test]
fn dp_matches_brute_force_on_non_nested_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let quarter: i64 = 1 << 30; // 0.25 in grid units
    for trial in 0..150 {
        let n = 3 + (trial % 6);
        let m = 2 + (trial % 7);
        let k = 1 + (trial % 4).min(m - 1);
        // Shared candidate radius: equal-length intervals never nest.
        let g = random_shared_radius_geometry(&mut rng, n, m, quarter);
        let e = g.derive_ballots(k).unwrap();
        let all: Vec<usize> = (0..m).collect();
        let ordered = g.sort_candidates(&all);
        for kstar in 1..=k.min(m) {
            let dp = dp_non_nested(&e, &g, &ordered, kstar).unwrap();
            let brute = best_restricted(&e, &ordered, kstar);
            assert_eq!(dp.as_ref().map(|(_, sw)| *sw), brute, "n={n} m={m} k={k} kstar={kstar}");
            if let Some((w, sw)) = dp {
                assert_eq!(social_welfare(&e, &w).unwrap(), sw);
            }
        }
    }
}

#[test]
fn solve_vcr_matches_oracle_on_mixed_radius_geometries() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..150 {
        let n = 3 + (trial % 7);
        let m = 2 + (trial % 8);
        let k = 1 + (trial % 4).min(m - 1);
        let coord = |rng: &mut ChaCha8Rng| (rng.next_u64() >> 32) as i64;
        // Radii vary so that nesting (and hence the representative
        // restriction) actually occurs.
        let voters: Vec<ScaledAgent> =
            (0..n).map(|_| ScaledAgent { x: coord(&mut rng), r: coord(&mut rng) / 8 }).collect();
        let candidates: Vec<ScaledAgent> =
            (0..m).map(|_| ScaledAgent { x: coord(&mut rng), r: coord(&mut rng) / 4 }).collect();
        let g = VcrGeometry::new(voters, candidates).unwrap();
        let e = g.derive_ballots(k).unwrap();
        let fast = solve_vcr(&e, &g).unwrap();
        let brute = solve(&e, Objective::SocialWelfare, Constraint::Jr, DEFAULT_ENUM_BUDGET).unwrap();
        assert_eq!(fast.value, brute.value, "n={n} m={m} k={k} trial={trial}");
        assert_eq!(social_welfare(&e, &fast.witness).unwrap(), fast.value);
    }
}

#[test]
fn binomial_helper_is_exported_for_budget_math() {
    assert_eq!(binomial(20, 4), 4845);
}
