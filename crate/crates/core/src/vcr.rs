//! One-dimensional voter/candidate range geometry: each agent owns an
//! interval on the line and a voter approves exactly the candidates whose
//! intervals it touches. For such instances, welfare maximization under
//! JR is solved exactly by restricting to representative candidates and
//! running a left-to-right dynamic program over non-nested intervals.
//!
//! All geometric comparisons happen on scaled integers (a 2^-32 grid), so
//! boundary tangency is decided exactly regardless of the float inputs.

use crate::axioms::jr_violation;
use crate::bitset::BitSet;
use crate::election::{AgentPoint, Committee, Election, VcrBlock};
use crate::error::{Error, Result};
use crate::oracle::OptimumReport;

/// Grid resolution: one unit of scaled coordinates is 2^-32.
pub const SCALE: f64 = 4294967296.0;

/// Coordinates above this magnitude would overflow interval arithmetic.
const MAX_ABS: f64 = 9.0e17;

/// One agent's position and radius in scaled-integer coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScaledAgent {
    pub x: i64,
    pub r: i64,
}

impl ScaledAgent {
    /// Left endpoint of the agent's interval.
    pub fn s(&self) -> i64 {
        self.x - self.r
    }

    /// Right endpoint of the agent's interval.
    pub fn t(&self) -> i64 {
        self.x + self.r
    }
}

/// Positions and radii for every voter and candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VcrGeometry {
    voters: Vec<ScaledAgent>,
    candidates: Vec<ScaledAgent>,
}

fn scale_point(p: &AgentPoint) -> Result<ScaledAgent> {
    for v in [p.x, p.r] {
        if !v.is_finite() || (v * SCALE).abs() > MAX_ABS {
            return Err(Error::NonFiniteCoordinate);
        }
    }
    if p.r < 0.0 {
        return Err(Error::Validation(vec![format!("negative radius {}", p.r)]));
    }
    Ok(ScaledAgent {
        x: (p.x * SCALE).round() as i64,
        r: (p.r * SCALE).round() as i64,
    })
}

fn unscale(a: &ScaledAgent) -> AgentPoint {
    AgentPoint { x: a.x as f64 / SCALE, r: a.r as f64 / SCALE }
}

impl VcrGeometry {
    pub fn new(voters: Vec<ScaledAgent>, candidates: Vec<ScaledAgent>) -> Result<Self> {
        for a in voters.iter().chain(candidates.iter()) {
            if a.r < 0 {
                return Err(Error::Validation(vec![format!("negative radius {}", a.r)]));
            }
        }
        Ok(VcrGeometry { voters, candidates })
    }

    /// Rounds float coordinates onto the integer grid.
    pub fn from_block(block: &VcrBlock) -> Result<Self> {
        let voters = block.voters.iter().map(scale_point).collect::<Result<_>>()?;
        let candidates = block.candidates.iter().map(scale_point).collect::<Result<_>>()?;
        Ok(VcrGeometry { voters, candidates })
    }

    /// Exact float round-trip (grid points below 2^20 are representable).
    pub fn to_block(&self) -> VcrBlock {
        VcrBlock {
            voters: self.voters.iter().map(unscale).collect(),
            candidates: self.candidates.iter().map(unscale).collect(),
        }
    }

    pub fn num_voters(&self) -> usize {
        self.voters.len()
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    pub fn voter(&self, i: usize) -> ScaledAgent {
        self.voters[i]
    }

    pub fn candidate(&self, c: usize) -> ScaledAgent {
        self.candidates[c]
    }

    /// Interval intersection, with tangency counting as approval.
    pub fn approves(&self, voter: usize, candidate: usize) -> bool {
        let i = &self.voters[voter];
        let c = &self.candidates[candidate];
        (i.x - c.x).abs() <= i.r + c.r
    }

    /// The election induced by the geometry. Empty ballots are allowed:
    /// an isolated voter simply approves nobody.
    pub fn derive_ballots(&self, k: usize) -> Result<Election> {
        let m = self.candidates.len();
        let ballots = (0..self.voters.len())
            .map(|i| BitSet::from_indices(m, (0..m).filter(|&c| self.approves(i, c))))
            .collect();
        Election::new(m, k, ballots, false)
    }

    /// Errors on the first (voter, candidate) pair where the stored ballot
    /// disagrees with the geometry.
    pub fn check_consistency(&self, e: &Election) -> Result<()> {
        if e.num_voters() != self.voters.len() || e.num_candidates() != self.candidates.len() {
            return Err(Error::Validation(vec![format!(
                "geometry has {} voters / {} candidates, election has {} / {}",
                self.voters.len(),
                self.candidates.len(),
                e.num_voters(),
                e.num_candidates()
            )]));
        }
        for voter in 0..self.voters.len() {
            for candidate in 0..self.candidates.len() {
                if e.ballot(voter).contains(candidate) != self.approves(voter, candidate) {
                    return Err(Error::GeometryMismatch { voter, candidate });
                }
            }
        }
        Ok(())
    }

    /// Candidates whose interval is not strictly contained in another
    /// candidate's interval. Duplicate intervals are all retained.
    pub fn representatives(&self) -> Vec<usize> {
        let strictly_inside = |a: &ScaledAgent, b: &ScaledAgent| {
            b.s() <= a.s() && a.t() <= b.t() && (b.s() < a.s() || a.t() < b.t())
        };
        (0..self.candidates.len())
            .filter(|&c| {
                !self
                    .candidates
                    .iter()
                    .any(|other| strictly_inside(&self.candidates[c], other))
            })
            .collect()
    }

    /// Candidate indices sorted left-to-right: by right endpoint, then
    /// left endpoint, then index.
    pub fn sort_candidates(&self, subset: &[usize]) -> Vec<usize> {
        let mut v = subset.to_vec();
        v.sort_by_key(|&c| {
            let a = &self.candidates[c];
            (a.t(), a.s(), c)
        });
        v
    }

    fn ensure_non_nested(&self, ordered: &[usize]) -> Result<()> {
        for w in ordered.windows(2) {
            let (a, b) = (&self.candidates[w[0]], &self.candidates[w[1]]);
            // After sorting by (t, s), a nested pair shows up adjacently as
            // either a left endpoint going backwards or two intervals
            // sharing a right endpoint with different left endpoints.
            if b.s() < a.s() || (a.t() == b.t() && a.s() != b.s()) {
                return Err(Error::NestedIntervals(w[0], w[1]));
            }
        }
        Ok(())
    }
}

/// One dynamic-program entry: best welfare and the committee attaining it,
/// as positions into the ordered candidate list.
type DpEntry = Option<(u64, Vec<usize>)>;

/// Welfare maximization over committees `W` with `|W| = kstar`, `W` a
/// subset of `ordered`, subject to JR (with the election's own `k` as the
/// representation parameter, so committees smaller than `k` are allowed).
///
/// `ordered` must list candidate indices of `e` sorted left-to-right with
/// pairwise non-nested intervals. Returns `None` when no such committee
/// provides JR.
pub fn dp_non_nested(
    e: &Election,
    g: &VcrGeometry,
    ordered: &[usize],
    kstar: usize,
) -> Result<Option<(Committee, u64)>> {
    if kstar == 0 || kstar > ordered.len().min(e.k()) {
        return Err(Error::Precondition(format!(
            "kstar = {kstar} outside 1..=min(k, |C*|) = {}",
            ordered.len().min(e.k())
        )));
    }
    g.ensure_non_nested(ordered)?;
    let mm = ordered.len();
    let threshold = e.jr_threshold();
    let supp: Vec<BitSet> = ordered.iter().map(|&c| e.supporters(c)).collect();
    let scores: Vec<u64> = supp.iter().map(|s| s.len() as u64).collect();

    // Does some group of >= n/k voters jointly approve position h while
    // avoiding everything the candidates in `avoid` cover? The maximal
    // such group is supp[h] minus the avoided supporters.
    let uncovered_group = |h: usize, avoid: &[usize]| {
        let mut grp = supp[h].clone();
        for &a in avoid {
            grp.subtract(&supp[a]);
        }
        threshold.is_met_by(grp.len())
    };

    // {c_j} alone provides JR up to j / full JR: scan witnesses left of j
    // (inclusive) or everywhere.
    let singleton_jr_up_to = |j: usize| (0..=j).all(|h| !uncovered_group(h, &[j]));
    let no_right_group = |j: usize| (j + 1..mm).all(|h| !uncovered_group(h, &[j]));

    // Best (s-1)-subset of positions left of j by raw score; valid only
    // when {c_j} already certifies the JR condition.
    let top_fill = |j: usize, s: usize| -> DpEntry {
        if j < s - 1 {
            return None;
        }
        let mut left: Vec<usize> = (0..j).collect();
        left.sort_by_key(|&p| (std::cmp::Reverse(scores[p]), p));
        let mut committee: Vec<usize> = left[..s - 1].to_vec();
        committee.push(j);
        committee.sort_unstable();
        let sw = scores[j] + left[..s - 1].iter().map(|&p| scores[p]).sum::<u64>();
        Some((sw, committee))
    };

    let permissible = |l: usize, j: usize| (l + 1..j).all(|h| !uncovered_group(h, &[l, j]));

    let mut table: Vec<Vec<DpEntry>> = vec![vec![None; kstar + 1]; mm];
    for j in 0..mm {
        let jr_up = singleton_jr_up_to(j);
        let jr_full = jr_up && no_right_group(j);
        for s in 1..=kstar.min(j + 1) {
            let certified = if s < kstar { jr_up } else { jr_full };
            table[j][s] = if s == 1 {
                certified.then(|| (scores[j], vec![j]))
            } else if certified {
                top_fill(j, s)
            } else if s < kstar || no_right_group(j) {
                let mut best: DpEntry = None;
                for l in 0..j {
                    let Some((prev_sw, prev_committee)) = &table[l][s - 1] else {
                        continue;
                    };
                    let total = prev_sw + scores[j];
                    if best.as_ref().map_or(true, |(b, _)| total > *b) && permissible(l, j) {
                        let mut committee = prev_committee.clone();
                        committee.push(j);
                        best = Some((total, committee));
                    }
                }
                best
            } else {
                None
            };
        }
    }

    let mut best: Option<(u64, &Vec<usize>)> = None;
    for row in &table {
        if let Some((sw, committee)) = &row[kstar] {
            if best.map_or(true, |(b, _)| *sw > b) {
                best = Some((*sw, committee));
            }
        }
    }
    match best {
        None => Ok(None),
        Some((sw, positions)) => {
            let members = positions.iter().map(|&p| ordered[p]);
            let committee = Committee::from_indices(e.num_candidates(), members, kstar)?;
            Ok(Some((committee, sw)))
        }
    }
}

/// Exact welfare maximization under JR for a geometry-consistent election:
/// tries every split between representatives (via the dynamic program) and
/// top-scoring non-representatives. `count` in the report is always 1 —
/// only a single witness is reconstructed.
pub fn solve_vcr(e: &Election, g: &VcrGeometry) -> Result<OptimumReport> {
    g.check_consistency(e)?;
    let k = e.k();
    let reps = g.representatives();
    let ordered = g.sort_candidates(&reps);
    let in_reps = BitSet::from_indices(e.num_candidates(), reps.iter().copied());
    let mut rest: Vec<usize> = (0..e.num_candidates()).filter(|&c| !in_reps.contains(c)).collect();
    let scores: Vec<u64> = (0..e.num_candidates()).map(|c| e.supporters(c).len() as u64).collect();
    rest.sort_by_key(|&c| (std::cmp::Reverse(scores[c]), c));
    let threshold = e.jr_threshold();

    let mut best: Option<(u64, Vec<usize>)> = None;
    for kstar in 0..=reps.len().min(k) {
        if rest.len() < k - kstar {
            continue;
        }
        let (members, sw) = if kstar == 0 {
            // The empty committee provides JR only if no candidate gathers
            // a cohesive group on its own.
            if reps.iter().any(|&c| threshold.is_met_by(scores[c] as usize)) {
                continue;
            }
            (Vec::new(), 0)
        } else {
            match dp_non_nested(e, g, &ordered, kstar)? {
                None => continue,
                Some((w, sw)) => (w.indices(), sw),
            }
        };
        let fill = &rest[..k - kstar];
        let total = sw + fill.iter().map(|&c| scores[c]).sum::<u64>();
        if best.as_ref().map_or(true, |(b, _)| total > *b) {
            let mut all = members;
            all.extend_from_slice(fill);
            all.sort_unstable();
            best = Some((total, all));
        }
    }
    let (value, members) = best.ok_or_else(|| {
        Error::Precondition("no feasible representative split found".to_string())
    })?;
    let witness = Committee::from_indices(e.num_candidates(), members, k)?;
    if jr_violation(e, witness.members()).is_some() {
        return Err(Error::Precondition(
            "reconstructed committee fails JR; geometry assumptions violated".to_string(),
        ));
    }
    Ok(OptimumReport { value, witness, count: 1 })
}
