//! Instance generators: the three random-election models plus named
//! families with closed-form ground truth (welfare/coverage examples, the
//! edge-dominating-set and set-cover reductions, and the family on which
//! greedy coverage maximization loses a sqrt(k) welfare factor).
//!
//! Randomness is a ChaCha8 generator split into streams: stream 0 draws
//! candidate data, stream i+1 draws voter i. Resampling an empty ballot
//! therefore never perturbs the other rows, and identical seeds produce
//! identical elections across platforms and thread counts.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::election::{Committee, Election};
use crate::error::{Error, Result};
use crate::greedy::TieBreak;
use crate::oracle;
use crate::vcr::{ScaledAgent, VcrGeometry, SCALE};

/// Attempts before giving up on resampling an empty ballot.
const RESAMPLE_CAP: usize = 10_000;

/// Brute-force cap on edge-dominating-set inputs.
pub const MAX_EDS_EDGES: usize = 24;
/// Brute-force cap on set-cover inputs.
pub const MAX_SETCOV_SETS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    /// Impartial culture: each approval is an independent coin with
    /// probability `p`.
    Ic { p: f64 },
    /// Euclidean: agents drawn uniformly in the unit cube, approval iff
    /// distance at most `r`. `dim` is 1 or 2.
    Euclid { dim: usize, r: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpec {
    pub model: Model,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
}

/// Closed-form optima known for a generated family, shipped as a JSON
/// sidecar next to the election file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sw_opt: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sw_jr: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cvr_opt: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cvr_ejr: Option<u64>,
    pub derivation: String,
}

impl GroundTruth {
    fn new(derivation: impl Into<String>) -> Self {
        GroundTruth {
            sw_opt: None,
            sw_jr: None,
            cvr_opt: None,
            cvr_ejr: None,
            derivation: derivation.into(),
        }
    }
}

fn validate_spec(spec: &ModelSpec) -> Result<()> {
    let mut issues = Vec::new();
    match spec.model {
        Model::Ic { p } => {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                issues.push(format!("approval probability {p} outside [0, 1]"));
            }
        }
        Model::Euclid { dim, r } => {
            if dim != 1 && dim != 2 {
                issues.push(format!("unsupported dimension {dim}"));
            }
            let max = (dim as f64).sqrt();
            if !(0.0..=max).contains(&r) || r.is_nan() {
                issues.push(format!("radius {r} outside [0, sqrt({dim})]"));
            }
        }
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(issues.join("; ")))
    }
}

fn voter_rng(seed: u64, voter: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(voter as u64 + 1);
    rng
}

fn candidate_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

/// Uniform grid point in [0, 1) at resolution 2^-32, in scaled units.
fn draw_coord(rng: &mut impl RngCore) -> i64 {
    (rng.next_u64() >> 32) as i64
}

fn ic_row(rng: &mut impl RngCore, m: usize, threshold: u128) -> BitSet {
    BitSet::from_indices(m, (0..m).filter(|_| (rng.next_u64() as u128) < threshold))
}

/// Generates one election; 1D Euclidean instances come with the geometry
/// that reproduces their ballots exactly.
pub fn gen(spec: &ModelSpec) -> Result<(Election, Option<VcrGeometry>)> {
    validate_spec(spec)?;
    let (n, m) = (spec.n, spec.m);
    match spec.model {
        Model::Ic { p } => {
            // Exact-integer acceptance threshold for a probability-p coin
            // on a 64-bit draw.
            let threshold = (p * 18_446_744_073_709_551_616.0).round() as u128;
            let mut ballots = Vec::with_capacity(n);
            for i in 0..n {
                let mut rng = voter_rng(spec.seed, i);
                let mut row = ic_row(&mut rng, m, threshold);
                let mut attempts = 0;
                while row.is_empty() {
                    attempts += 1;
                    if attempts > RESAMPLE_CAP {
                        return Err(Error::ResampleExhausted(i));
                    }
                    row = ic_row(&mut rng, m, threshold);
                }
                ballots.push(row);
            }
            let e = Election::new(m, spec.k, ballots, true)?;
            Ok((e, None))
        }
        Model::Euclid { dim: 1, r } => {
            // Radius split evenly between voter and candidate so that the
            // intervals reproduce "distance <= r" exactly on the grid.
            let r_half = (r / 2.0 * SCALE).round() as i64;
            let mut crng = candidate_rng(spec.seed);
            let candidates: Vec<ScaledAgent> = (0..m)
                .map(|_| ScaledAgent { x: draw_coord(&mut crng), r: r_half })
                .collect();
            let mut voters = Vec::with_capacity(n);
            for i in 0..n {
                let mut rng = voter_rng(spec.seed, i);
                let mut attempts = 0;
                loop {
                    let x = draw_coord(&mut rng);
                    if candidates.iter().any(|c| (x - c.x).abs() <= 2 * r_half) {
                        voters.push(ScaledAgent { x, r: r_half });
                        break;
                    }
                    attempts += 1;
                    if attempts > RESAMPLE_CAP {
                        return Err(Error::ResampleExhausted(i));
                    }
                }
            }
            let g = VcrGeometry::new(voters, candidates)?;
            let derived = g.derive_ballots(spec.k)?;
            let e = Election::new(m, spec.k, derived.ballots().to_vec(), true)?;
            Ok((e, Some(g)))
        }
        Model::Euclid { dim: 2, r } => {
            let r_scaled = (r * SCALE).round() as i128;
            let reach = r_scaled * r_scaled;
            let mut crng = candidate_rng(spec.seed);
            let candidates: Vec<(i64, i64)> = (0..m)
                .map(|_| (draw_coord(&mut crng), draw_coord(&mut crng)))
                .collect();
            let within = |vx: i64, vy: i64, c: &(i64, i64)| {
                let dx = (vx - c.0) as i128;
                let dy = (vy - c.1) as i128;
                dx * dx + dy * dy <= reach
            };
            let mut ballots = Vec::with_capacity(n);
            for i in 0..n {
                let mut rng = voter_rng(spec.seed, i);
                let mut attempts = 0;
                loop {
                    let (vx, vy) = (draw_coord(&mut rng), draw_coord(&mut rng));
                    let row =
                        BitSet::from_indices(m, (0..m).filter(|&c| within(vx, vy, &candidates[c])));
                    if !row.is_empty() {
                        ballots.push(row);
                        break;
                    }
                    attempts += 1;
                    if attempts > RESAMPLE_CAP {
                        return Err(Error::ResampleExhausted(i));
                    }
                }
            }
            let e = Election::new(m, spec.k, ballots, true)?;
            Ok((e, None))
        }
        Model::Euclid { dim, .. } => {
            Err(Error::InvalidParameter(format!("unsupported dimension {dim}")))
        }
    }
}

/// Welfare-price family: s voters share a k-block of candidates, the
/// rest each approve a private candidate. JR forces the private
/// candidates in, capping welfare at 2k - s while sw(I) = sk.
pub fn example1(s: usize) -> Result<(Election, GroundTruth)> {
    if s < 2 {
        return Err(Error::InvalidParameter(format!("s = {s} must be at least 2")));
    }
    let k = s * s;
    let m = 2 * k - s;
    let mut ballots = Vec::with_capacity(k);
    for _ in 0..s {
        ballots.push((0..k).collect::<Vec<_>>());
    }
    for i in 0..k - s {
        ballots.push(vec![k + i]);
    }
    let e = Election::from_ballot_indices(m, k, &ballots, true)?;
    let mut truth = GroundTruth::new(format!(
        "shared-block family, s = {s}: sw(I) = sk, sw_JR = 2k - s"
    ));
    truth.sw_opt = Some((s * k) as u64);
    truth.sw_jr = Some((2 * k - s) as u64);
    Ok((e, truth))
}

/// Coverage-price family: k voters share k/2 candidates (a level-k/2
/// cohesive group), k voters have singleton ballots. EJR locks in the
/// shared block, capping coverage at 3k/2 while cvr(I) = 2k - 1.
pub fn example2(t: usize) -> Result<(Election, GroundTruth)> {
    if t < 1 {
        return Err(Error::InvalidParameter("t must be at least 1".to_string()));
    }
    let k = 2 * t;
    let m = 3 * t;
    let mut ballots = Vec::with_capacity(2 * k);
    for _ in 0..k {
        ballots.push((0..t).collect::<Vec<_>>());
    }
    for j in 0..k {
        ballots.push(vec![t + j]);
    }
    let e = Election::from_ballot_indices(m, k, &ballots, true)?;
    let mut truth = GroundTruth::new(format!(
        "shared-block coverage family, t = {t}: cvr(I) = 2k - 1, cvr_EJR = 3k/2"
    ));
    truth.cvr_opt = Some((2 * k - 1) as u64);
    truth.cvr_ejr = Some((3 * k / 2) as u64);
    Ok((e, truth))
}

/// Minimum edge dominating set by brute force over subset sizes.
pub fn eds(num_vertices: usize, edges: &[(usize, usize)]) -> Result<usize> {
    if edges.len() > MAX_EDS_EDGES {
        return Err(Error::BudgetExceeded {
            budget: MAX_EDS_EDGES as u64,
            context: format!("edge dominating set on {} edges", edges.len()),
        });
    }
    for &(a, b) in edges {
        if a >= num_vertices || b >= num_vertices || a == b {
            return Err(Error::InvalidParameter(format!("bad edge ({a}, {b})")));
        }
    }
    if edges.is_empty() {
        return Ok(0);
    }
    let ne = edges.len();
    // dom[i]: edges sharing a vertex with edge i (including itself).
    let dom: Vec<u32> = (0..ne)
        .map(|i| {
            let (a, b) = edges[i];
            (0..ne)
                .filter(|&j| {
                    let (c, d) = edges[j];
                    a == c || a == d || b == c || b == d
                })
                .fold(0u32, |acc, j| acc | (1 << j))
        })
        .collect();
    let full = if ne == 32 { u32::MAX } else { (1u32 << ne) - 1 };
    for size in 1..=ne {
        let mut found = false;
        let mut pick = vec![0usize; size];
        // Lexicographic enumeration of index combinations.
        fn combos(
            start: usize,
            depth: usize,
            size: usize,
            ne: usize,
            pick: &mut Vec<usize>,
            dom: &[u32],
            full: u32,
            found: &mut bool,
        ) {
            if *found {
                return;
            }
            if depth == size {
                let union = pick.iter().fold(0u32, |acc, &i| acc | dom[i]);
                if union == full {
                    *found = true;
                }
                return;
            }
            for i in start..ne {
                pick[depth] = i;
                combos(i + 1, depth + 1, size, ne, pick, dom, full, found);
            }
        }
        combos(0, 0, size, ne, &mut pick, &dom, full, &mut found);
        if found {
            return Ok(size);
        }
    }
    unreachable!("the full edge set dominates itself")
}

/// Reduction from edge dominating set: vertex voters approve their
/// incident edges, y dummy voters approve |V| dummy candidates, and
/// k = (|V| + y) / 2. A JR committee must pick a dominating edge set, so
/// sw_JR = yk - (y - 2) * eds(G).
pub fn eds_reduction(
    num_vertices: usize,
    edges: &[(usize, usize)],
    y: usize,
) -> Result<(Election, GroundTruth)> {
    if y < 2 || (num_vertices + y) % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "need y >= 2 and |V| + y even, got |V| = {num_vertices}, y = {y}"
        )));
    }
    let eds_value = eds(num_vertices, edges)?;
    // The closed form needs the dummy block to absorb the k - |E'| seats
    // left after an optimal edge dominating set E': outside this range the
    // committee would have to pad with useless edge candidates and the
    // upper-bound argument fails.
    if y > num_vertices + 2 * eds_value {
        return Err(Error::InvalidParameter(format!(
            "y = {y} exceeds |V| + 2 * eds = {}; the closed form does not apply",
            num_vertices + 2 * eds_value
        )));
    }
    let k = (num_vertices + y) / 2;
    let ne = edges.len();
    let m = ne + num_vertices;
    let mut ballots = Vec::with_capacity(num_vertices + y);
    for v in 0..num_vertices {
        ballots.push(
            (0..ne)
                .filter(|&j| edges[j].0 == v || edges[j].1 == v)
                .collect::<Vec<_>>(),
        );
    }
    let dummy: Vec<usize> = (ne..m).collect();
    for _ in 0..y {
        ballots.push(dummy.clone());
    }
    let e = Election::from_ballot_indices(m, k, &ballots, false)?;
    let mut truth = GroundTruth::new(format!(
        "edge-dominating-set reduction: eds = {eds_value}, sw_JR = yk - (y - 2) * eds"
    ));
    truth.sw_jr = Some((y * k - (y - 2) * eds_value) as u64);
    Ok((e, truth))
}

/// Minimum set cover by brute force; `None` when the universe is not
/// coverable.
pub fn min_set_cover(u: usize, sets: &[[usize; 3]]) -> Result<Option<usize>> {
    if sets.len() > MAX_SETCOV_SETS {
        return Err(Error::BudgetExceeded {
            budget: MAX_SETCOV_SETS as u64,
            context: format!("set cover over {} sets", sets.len()),
        });
    }
    let full = if u >= 32 {
        return Err(Error::InvalidParameter(format!("universe size {u} too large")));
    } else {
        (1u32 << u) - 1
    };
    let masks: Vec<u32> = sets
        .iter()
        .map(|s| s.iter().fold(0u32, |acc, &x| acc | (1 << (x - 1))))
        .collect();
    if masks.iter().fold(0, |acc, &x| acc | x) != full {
        return Ok(None);
    }
    let mut best = sets.len();
    for mask in 0u32..(1 << sets.len()) {
        let count = mask.count_ones() as usize;
        if count >= best {
            continue;
        }
        let covered = (0..sets.len())
            .filter(|&i| mask & (1 << i) != 0)
            .fold(0u32, |acc, i| acc | masks[i]);
        if covered == full {
            best = count;
        }
    }
    Ok(Some(best))
}

fn validate_triples(u: usize, sets: &[[usize; 3]]) -> Result<()> {
    for s in sets {
        let mut t = *s;
        t.sort_unstable();
        if t[0] == t[1] || t[1] == t[2] || t.iter().any(|&x| x == 0 || x > u) {
            return Err(Error::InvalidParameter(format!(
                "set {s:?} is not a 3-subset of 1..={u}"
            )));
        }
    }
    Ok(())
}

/// Reduction from 3-set cover with n = k: element voters approve their
/// sets, four dummy voters approve u + 4 dummy candidates, k = u + 4.
/// When the sets cover the universe, sw_JR = 4(u + 4) - min cover size;
/// otherwise the truth falls back to enumeration.
pub fn x3c_reduction(u: usize, sets: &[[usize; 3]]) -> Result<(Election, GroundTruth)> {
    validate_triples(u, sets)?;
    let nsets = sets.len();
    let k = u + 4;
    let m = nsets + k;
    let mut ballots = Vec::with_capacity(k);
    for element in 1..=u {
        ballots.push(
            (0..nsets)
                .filter(|&j| sets[j].contains(&element))
                .collect::<Vec<_>>(),
        );
    }
    let dummy: Vec<usize> = (nsets..m).collect();
    for _ in 0..4 {
        ballots.push(dummy.clone());
    }
    let e = Election::from_ballot_indices(m, k, &ballots, false)?;
    let truth = match min_set_cover(u, sets)? {
        Some(opt) => {
            let mut t = GroundTruth::new(format!(
                "3-set-cover reduction: opt cover = {opt}, sw_JR = 4(u + 4) - opt"
            ));
            t.sw_jr = Some((4 * k - opt) as u64);
            t
        }
        None => {
            // Uncovered elements leave empty ballots; the closed form does
            // not apply, so fall back to enumeration.
            let report =
                oracle::solve(&e, oracle::Objective::SocialWelfare, oracle::Constraint::Jr, oracle::DEFAULT_ENUM_BUDGET)?;
            let mut t = GroundTruth::new(
                "3-set-cover reduction, uncoverable universe: sw_JR by enumeration".to_string(),
            );
            t.sw_jr = Some(report.value);
            t
        }
    };
    Ok((e, truth))
}

/// Candidate layout of the greedy-gap family, exposed so tests and the
/// CLI can name the pieces.
pub struct Prop2Instance {
    pub election: Election,
    /// Tie-break order under which greedy coverage maximization realizes
    /// the bad run.
    pub adversarial: TieBreak,
    /// The committee from the construction: all of `S` plus a perfect
    /// matching inside `L`. Welfare Theta(n * sqrt(n)).
    pub good_committee: Committee,
}

/// Family on which greedy coverage maximization is a sqrt(k) factor below
/// the optimal JR welfare. Voters are the vertices of a graph on L and R
/// (|L| = |R| = n/2): candidates are, in index order, the L-R perfect
/// matching, the clique edges inside L, and a block S of n/4 candidates
/// each approved by the same sqrt(n) voters of R. k = n/2; with
/// lowest-index tie-breaking greedy realizes the bad run.
pub fn prop2_family(t: usize) -> Result<Prop2Instance> {
    if t < 1 {
        return Err(Error::InvalidParameter("t must be at least 1".to_string()));
    }
    let n = 16 * t * t;
    let half = n / 2;
    let root = 4 * t; // sqrt(n)
    let k = half;
    // Voters: L = 0..half, R = half..n.
    let matching: Vec<(usize, usize)> = (0..half).map(|i| (i, half + i)).collect();
    let mut clique = Vec::new();
    for a in 0..half {
        for b in a + 1..half {
            clique.push((a, b));
        }
    }
    let num_s = n / 4;
    let m = matching.len() + clique.len() + num_s;
    let s_supporters: Vec<usize> = (half..half + root).collect();
    let mut ballots: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, &(a, b)) in matching.iter().chain(clique.iter()).enumerate() {
        ballots[a].push(idx);
        ballots[b].push(idx);
    }
    for s_idx in 0..num_s {
        let c = matching.len() + clique.len() + s_idx;
        for &v in &s_supporters {
            ballots[v].push(c);
        }
    }
    let election = Election::from_ballot_indices(m, k, &ballots, true)?;
    // Good committee: S plus the matching {L_0, L_1}, {L_2, L_3}, ...
    // inside L; clique pair (a, b) lives at matching.len() + lex offset.
    let clique_index = |a: usize, b: usize| {
        matching.len() + clique.iter().position(|&p| p == (a, b)).unwrap()
    };
    let mut members: Vec<usize> =
        (0..num_s).map(|i| matching.len() + clique.len() + i).collect();
    for i in 0..half / 2 {
        members.push(clique_index(2 * i, 2 * i + 1));
    }
    let good_committee = Committee::from_indices(m, members, k)?;
    Ok(Prop2Instance { election, adversarial: TieBreak::LowestIndex, good_committee })
}
