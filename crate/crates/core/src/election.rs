//! Election data model, objective functions, exact threshold arithmetic,
//! and JSON (de)serialization.

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// An approval election: `n` voters, `m` candidates, committee size `k`.
///
/// Candidate and voter indices are dense and 0-based. Ballots are bitsets
/// over `0..m`. All fields are immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Election {
    num_voters: usize,
    num_candidates: usize,
    k: usize,
    ballots: Vec<BitSet>,
}

impl Election {
    /// Builds an election and checks the structural invariants
    /// (`1 <= k <= m`, ballot indices in range). With `strict`, empty
    /// ballots are also rejected. Every violation found is reported.
    pub fn new(num_candidates: usize, k: usize, ballots: Vec<BitSet>, strict: bool) -> Result<Self> {
        let e = Election { num_voters: ballots.len(), num_candidates, k, ballots };
        e.validate(strict)?;
        Ok(e)
    }

    /// Like [`Election::new`], but from explicit index lists.
    pub fn from_ballot_indices(
        num_candidates: usize,
        k: usize,
        ballots: &[Vec<usize>],
        strict: bool,
    ) -> Result<Self> {
        // Out-of-range indices cannot be stored in a bitset of width m,
        // so range violations are collected before construction.
        let mut issues = Vec::new();
        let mut sets = Vec::with_capacity(ballots.len());
        for (i, b) in ballots.iter().enumerate() {
            let mut s = BitSet::new(num_candidates);
            for &c in b {
                if c >= num_candidates {
                    issues.push(format!(
                        "ballot {i} contains candidate index {c} >= m = {num_candidates}"
                    ));
                } else {
                    s.insert(c);
                }
            }
            sets.push(s);
        }
        if !issues.is_empty() {
            return Err(Error::Validation(issues));
        }
        Election::new(num_candidates, k, sets, strict)
    }

    fn validate(&self, strict: bool) -> Result<()> {
        let mut issues = Vec::new();
        if self.k == 0 {
            issues.push("k must be positive".to_string());
        }
        if self.k > self.num_candidates {
            issues.push(format!(
                "k exceeds candidate count (k = {}, m = {})",
                self.k, self.num_candidates
            ));
        }
        if self.num_voters == 0 {
            issues.push("election has no voters".to_string());
        }
        for (i, b) in self.ballots.iter().enumerate() {
            if b.universe() != self.num_candidates {
                issues.push(format!("ballot {i} has universe {} != m", b.universe()));
            }
            if strict && b.is_empty() {
                issues.push(format!("ballot {i} is empty (strict mode)"));
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(issues))
        }
    }

    pub fn num_voters(&self) -> usize {
        self.num_voters
    }

    pub fn num_candidates(&self) -> usize {
        self.num_candidates
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ballots(&self) -> &[BitSet] {
        &self.ballots
    }

    pub fn ballot(&self, voter: usize) -> &BitSet {
        &self.ballots[voter]
    }

    /// Voters approving candidate `c`, as a bitset over `0..n`.
    pub fn supporters(&self, c: usize) -> BitSet {
        let mut s = BitSet::new(self.num_voters);
        for (i, b) in self.ballots.iter().enumerate() {
            if b.contains(c) {
                s.insert(i);
            }
        }
        s
    }

    /// Supporter sets for all candidates at once.
    pub fn supporter_table(&self) -> Vec<BitSet> {
        let mut table = vec![BitSet::new(self.num_voters); self.num_candidates];
        for (i, b) in self.ballots.iter().enumerate() {
            for c in b.iter() {
                table[c].insert(i);
            }
        }
        table
    }

    /// The `n/k` representation threshold as an exact rational.
    pub fn jr_threshold(&self) -> Threshold {
        Threshold::new(self.num_voters as u64, self.k as u64)
    }

    /// The `l*n/k` threshold for level-`l` cohesive groups.
    pub fn group_threshold(&self, level: usize) -> Threshold {
        Threshold::new(level as u64 * self.num_voters as u64, self.k as u64)
    }
}

/// A candidate subset together with the committee size it was built for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Committee {
    members: BitSet,
    capacity: usize,
}

impl Committee {
    pub fn new(members: BitSet, capacity: usize) -> Result<Self> {
        if members.len() > capacity {
            return Err(Error::WrongCommitteeSize { expected: capacity, actual: members.len() });
        }
        Ok(Committee { members, capacity })
    }

    pub fn from_indices(
        universe: usize,
        indices: impl IntoIterator<Item = usize>,
        capacity: usize,
    ) -> Result<Self> {
        let mut members = BitSet::new(universe);
        for i in indices {
            if i >= universe {
                return Err(Error::InvalidCommittee { member: i, num_candidates: universe });
            }
            members.insert(i);
        }
        Committee::new(members, capacity)
    }

    pub fn members(&self) -> &BitSet {
        &self.members
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.members.to_vec()
    }
}

/// An `l*n/k`-style bound, compared by integer cross-multiplication.
/// No floating point ever enters an axiom verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Threshold {
    numerator: u64,
    denominator: u64,
}

impl Threshold {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        assert!(denominator > 0, "threshold denominator must be positive");
        Threshold { numerator, denominator }
    }

    /// `count >= numerator/denominator`, exactly.
    pub fn is_met_by(&self, count: usize) -> bool {
        count as u128 * self.denominator as u128 >= self.numerator as u128
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }
}

fn check_committee(e: &Election, w: &Committee) -> Result<()> {
    if let Some(member) = w.members().iter().find(|&c| c >= e.num_candidates()) {
        return Err(Error::InvalidCommittee { member, num_candidates: e.num_candidates() });
    }
    Ok(())
}

/// Utilitarian social welfare: total approvals received by committee members.
pub fn social_welfare(e: &Election, w: &Committee) -> Result<u64> {
    check_committee(e, w)?;
    Ok(e.ballots().iter().map(|b| b.intersection_len(w.members()) as u64).sum())
}

/// Coverage: number of voters approving at least one committee member.
pub fn coverage(e: &Election, w: &Committee) -> Result<u64> {
    check_committee(e, w)?;
    Ok(e.ballots().iter().filter(|b| b.intersects(w.members())).count() as u64)
}

/// Number of voters approving candidate `c`.
pub fn approval_score(e: &Election, c: usize) -> Result<u64> {
    if c >= e.num_candidates() {
        return Err(Error::CandidateOutOfRange { index: c, num_candidates: e.num_candidates() });
    }
    Ok(e.ballots().iter().filter(|b| b.contains(c)).count() as u64)
}

/// One position/radius agent of the optional `vcr` block, as stored on disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentPoint {
    pub x: f64,
    pub r: f64,
}

/// The optional geometry block of the election JSON schema. Consistency
/// with the ballots is checked by the `vcr` module, not on read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VcrBlock {
    pub voters: Vec<AgentPoint>,
    pub candidates: Vec<AgentPoint>,
}

/// An election document: the election plus the optional geometry block.
#[derive(Clone, Debug, PartialEq)]
pub struct ElectionDoc {
    pub election: Election,
    pub vcr: Option<VcrBlock>,
}

#[derive(Serialize, Deserialize)]
struct RawDoc {
    k: usize,
    num_voters: usize,
    num_candidates: usize,
    ballots: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vcr: Option<VcrBlock>,
}

/// Parses an election document, reporting every violated invariant.
pub fn read_election(bytes: &[u8], strict: bool) -> Result<ElectionDoc> {
    let raw: RawDoc = serde_json::from_slice(bytes)?;
    if raw.num_voters != raw.ballots.len() {
        return Err(Error::Validation(vec![format!(
            "num_voters = {} but {} ballots given",
            raw.num_voters,
            raw.ballots.len()
        )]));
    }
    let election = Election::from_ballot_indices(raw.num_candidates, raw.k, &raw.ballots, strict)?;
    if let Some(vcr) = &raw.vcr {
        let mut issues = Vec::new();
        if vcr.voters.len() != election.num_voters() {
            issues.push(format!("vcr block has {} voter agents, expected n", vcr.voters.len()));
        }
        if vcr.candidates.len() != election.num_candidates() {
            issues.push(format!(
                "vcr block has {} candidate agents, expected m",
                vcr.candidates.len()
            ));
        }
        if !issues.is_empty() {
            return Err(Error::Validation(issues));
        }
    }
    Ok(ElectionDoc { election, vcr: raw.vcr })
}

/// Serializes an election document to canonical JSON bytes.
pub fn write_election(doc: &ElectionDoc) -> Vec<u8> {
    let raw = RawDoc {
        k: doc.election.k(),
        num_voters: doc.election.num_voters(),
        num_candidates: doc.election.num_candidates(),
        ballots: doc.election.ballots().iter().map(|b| b.to_vec()).collect(),
        vcr: doc.vcr.clone(),
    };
    let mut bytes = serde_json::to_vec(&raw).expect("document serialization cannot fail");
    bytes.push(b'\n');
    bytes
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Example-1 family at s=2: 4 voters, candidates a1..a4 then b1, b2.
    pub(crate) fn example1_s2() -> Election {
        Election::from_ballot_indices(
            6,
            4,
            &[vec![0, 1, 2, 3], vec![0, 1, 2, 3], vec![4], vec![5]],
            true,
        )
        .unwrap()
    }

    /// Example-2 family at t=2: candidates a1, a2 then b1..b4; 8 voters.
    pub(crate) fn example2_t2() -> Election {
        Election::from_ballot_indices(
            6,
            4,
            &[
                vec![0, 1],
                vec![0, 1],
                vec![0, 1],
                vec![0, 1],
                vec![2],
                vec![3],
                vec![4],
                vec![5],
            ],
            true,
        )
        .unwrap()
    }

    fn committee(e: &Election, members: &[usize]) -> Committee {
        Committee::from_indices(e.num_candidates(), members.iter().copied(), e.k()).unwrap()
    }

    #[test]
    fn social_welfare_example1() {
        let e = example1_s2();
        // The shared block contributes s * k = 8 approval pairs.
        assert_eq!(social_welfare(&e, &committee(&e, &[0, 1, 2, 3])).unwrap(), 8);
        assert_eq!(social_welfare(&e, &committee(&e, &[0, 1, 4, 5])).unwrap(), 6);
        assert_eq!(social_welfare(&e, &committee(&e, &[])).unwrap(), 0);
    }

    #[test]
    fn coverage_example2() {
        let e = example2_t2();
        assert_eq!(coverage(&e, &committee(&e, &[0, 1, 2, 3])).unwrap(), 6);
        assert_eq!(coverage(&e, &committee(&e, &[0, 2, 3, 4])).unwrap(), 7);
        assert_eq!(coverage(&e, &committee(&e, &[])).unwrap(), 0);
    }

    #[test]
    fn approval_scores() {
        let e = example1_s2();
        assert_eq!(approval_score(&e, 0).unwrap(), 2);
        assert_eq!(approval_score(&e, 4).unwrap(), 1);
        assert!(matches!(approval_score(&e, 6), Err(Error::CandidateOutOfRange { .. })));
    }

    #[test]
    fn nobody_approves() {
        let e = Election::from_ballot_indices(3, 1, &[vec![0], vec![0]], true).unwrap();
        assert_eq!(approval_score(&e, 2).unwrap(), 0);
    }

    #[test]
    fn invalid_committee_member() {
        let e = example1_s2();
        let w = Committee::from_indices(10, [9], 4).unwrap();
        assert!(matches!(social_welfare(&e, &w), Err(Error::InvalidCommittee { member: 9, .. })));
        assert!(matches!(coverage(&e, &w), Err(Error::InvalidCommittee { .. })));
    }

    #[test]
    fn validation_lists_every_violation() {
        let err = Election::from_ballot_indices(3, 4, &[vec![], vec![0]], true).unwrap_err();
        let Error::Validation(issues) = err else { panic!("expected validation error") };
        assert!(issues.iter().any(|s| s.contains("k exceeds candidate count")));
        assert!(issues.iter().any(|s| s.contains("empty")));
    }

    #[test]
    fn json_round_trip() {
        let doc = ElectionDoc {
            election: example2_t2(),
            vcr: Some(VcrBlock {
                voters: (0..8).map(|i| AgentPoint { x: i as f64 * 0.125, r: 0.25 }).collect(),
                candidates: (0..6).map(|i| AgentPoint { x: i as f64 * 0.2, r: 0.1 }).collect(),
            }),
        };
        let bytes = write_election(&doc);
        let back = read_election(&bytes, true).unwrap();
        assert_eq!(back, doc);
        assert_eq!(write_election(&back), bytes);
    }

    #[test]
    fn read_rejects_bad_indices() {
        let bytes =
            br#"{"k":1,"num_voters":1,"num_candidates":3,"ballots":[[0,99]]}"#;
        assert!(matches!(read_election(bytes, false), Err(Error::Validation(_))));
        let bytes = br#"{"k":4,"num_voters":1,"num_candidates":3,"ballots":[[0]]}"#;
        let err = read_election(bytes, false).unwrap_err();
        assert!(err.to_string().contains("k exceeds candidate count"));
    }

    #[test]
    fn threshold_cross_multiplication() {
        let t = Threshold::new(8, 4); // n/k = 2
        assert!(t.is_met_by(2));
        assert!(!t.is_met_by(1));
        let t = Threshold::new(7, 3);
        assert!(!t.is_met_by(2));
        assert!(t.is_met_by(3));
    }
}
