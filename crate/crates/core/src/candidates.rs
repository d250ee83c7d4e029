//! Per-net activity, pairwise similarity and single-candidate selection.
//!
//! Scores are kept as integer agreement counts (vectors on which the target
//! equals the replacement), so ties are exact. For a target `i` the
//! candidates are the constants (score `T0·N`, `T1·N`) and every net `j`
//! arriving strictly earlier on the aged corner (score `S_ij·N`). The highest
//! score wins; on a tie a constant beats a wire, `Const0` beats `Const1`, the
//! earliest-arriving wire beats later ones, and any remaining tie is settled
//! by a draw seeded from `(seed, target)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::{NetId, Netlist, Replacement, RewirePlan};
use crate::sim::TraceSet;
use crate::timing::AnnotatedDag;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CandidateError {
    #[error("traces contain no vectors")]
    EmptyTraces,
    #[error("traces cover {traces} nets but the netlist has {nets}")]
    TraceMismatch { traces: usize, nets: usize },
}

/// Per-net count of vectors at logic 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireActivity {
    vectors: usize,
    ones: Vec<u64>,
}

impl WireActivity {
    pub fn vectors(&self) -> usize {
        self.vectors
    }

    pub fn ones(&self, net: NetId) -> u64 {
        self.ones[net.index()]
    }

    pub fn zeros(&self, net: NetId) -> u64 {
        self.vectors as u64 - self.ones[net.index()]
    }

    /// Fraction of vectors at 1.
    pub fn t1(&self, net: NetId) -> f64 {
        self.ones(net) as f64 / self.vectors as f64
    }

    /// Fraction of vectors at 0.
    pub fn t0(&self, net: NetId) -> f64 {
        1.0 - self.t1(net)
    }

    /// The constant a net most often carries (`false` on a tie).
    pub fn majority(&self, net: NetId) -> bool {
        self.ones(net) > self.zeros(net)
    }
}

pub fn compute_activity(traces: &TraceSet) -> Result<WireActivity, CandidateError> {
    if traces.is_empty() {
        return Err(CandidateError::EmptyTraces);
    }
    let ones = (0..traces.net_count())
        .map(|k| traces.ones(NetId(k as u32)))
        .collect();
    Ok(WireActivity {
        vectors: traces.len(),
        ones,
    })
}

/// Which nets receive a candidate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Eligibility {
    /// Every non-constant net that reaches a primary output.
    All,
    /// Nets lying on at least one aged path longer than the delay target.
    /// Approximating any other net cannot shorten a violating path.
    #[default]
    Violating,
}

/// Nets that get a chromosome bit, ascending by id.
pub fn eligible_nets(aged: &AnnotatedDag<'_>, delay_target: f64, rule: Eligibility) -> Vec<NetId> {
    let n = aged.netlist();
    let departure = aged.departure();
    // relative slack absorbs summation-order noise in the comparison
    let limit = delay_target * (1.0 - 1e-9);
    (0..n.nets().len())
        .map(|k| NetId(k as u32))
        .filter(|&net| !n.is_const_net(net) && departure[net.index()] != f64::NEG_INFINITY)
        .filter(|&net| match rule {
            Eligibility::All => true,
            Eligibility::Violating => aged.arrival(net) + departure[net.index()] > limit,
        })
        .collect()
}

/// Sparse agreement counts `(target, source) -> vectors equal`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Similarities {
    vectors: usize,
    pairs: BTreeMap<NetId, Vec<(NetId, u64)>>,
}

impl Similarities {
    pub fn vectors(&self) -> usize {
        self.vectors
    }

    /// Recorded sources for a target, ascending by arrival then id.
    pub fn sources(&self, target: NetId) -> &[(NetId, u64)] {
        self.pairs.get(&target).map_or(&[], Vec::as_slice)
    }

    pub fn agreement(&self, target: NetId, source: NetId) -> Option<u64> {
        self.sources(target)
            .iter()
            .find(|(s, _)| *s == source)
            .map(|&(_, a)| a)
    }

    /// `S_ij` as a fraction.
    pub fn score(&self, target: NetId, source: NetId) -> Option<f64> {
        self.agreement(target, source)
            .map(|a| a as f64 / self.vectors as f64)
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.values().map(Vec::len).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimilarityOptions {
    /// Keep only sources that could still win selection: agreement above the
    /// target's best constant and no lower than the best wire seen so far.
    pub prune: bool,
}

impl Default for SimilarityOptions {
    fn default() -> Self {
        SimilarityOptions { prune: true }
    }
}

fn agreement(a: &[u64], b: &[u64], vectors: usize) -> u64 {
    let diff: u64 = a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones() as u64).sum();
    vectors as u64 - diff
}

/// Agreement if it reaches `floor`, else `None`. Stops as soon as the
/// mismatches exceed what the floor allows.
fn agreement_at_least(a: &[u64], b: &[u64], vectors: usize, floor: u64) -> Option<u64> {
    let budget = (vectors as u64).checked_sub(floor)?;
    let mut diff = 0u64;
    for chunk in a.chunks(16).zip(b.chunks(16)) {
        diff += chunk
            .0
            .iter()
            .zip(chunk.1)
            .map(|(x, y)| (x ^ y).count_ones() as u64)
            .sum::<u64>();
        if diff > budget {
            return None;
        }
    }
    Some(vectors as u64 - diff)
}

/// Sources usable for any target: non-constant nets, sorted by arrival then id.
fn source_order(n: &Netlist, arrival: &[f64]) -> Vec<NetId> {
    let mut order: Vec<NetId> = (0..n.nets().len())
        .map(|k| NetId(k as u32))
        .filter(|&j| !n.is_const_net(j))
        .collect();
    order.sort_by(|a, b| {
        arrival[a.index()]
            .total_cmp(&arrival[b.index()])
            .then(a.cmp(b))
    });
    order
}

/// Agreement counts for every target against every strictly-earlier net.
pub fn compute_similarity(
    traces: &TraceSet,
    activity: &WireActivity,
    aged: &AnnotatedDag<'_>,
    targets: &[NetId],
    options: SimilarityOptions,
) -> Result<Similarities, CandidateError> {
    let n = aged.netlist();
    if traces.is_empty() {
        return Err(CandidateError::EmptyTraces);
    }
    if traces.net_count() != n.nets().len() {
        return Err(CandidateError::TraceMismatch {
            traces: traces.net_count(),
            nets: n.nets().len(),
        });
    }
    let arrival = aged.arrivals();
    let order = source_order(n, arrival);
    let vectors = traces.len();
    let pairs: BTreeMap<NetId, Vec<(NetId, u64)>> = targets
        .par_iter()
        .map(|&i| {
            let ti = traces.trace(i);
            let earlier = order.partition_point(|j| arrival[j.index()] < arrival[i.index()]);
            let mut found: Vec<(NetId, u64)> = Vec::new();
            if options.prune {
                let constant = activity.ones(i).max(activity.zeros(i));
                let mut best = constant + 1;
                for &j in &order[..earlier] {
                    if let Some(a) = agreement_at_least(ti, traces.trace(j), vectors, best) {
                        if a > best {
                            found.clear();
                            best = a;
                        }
                        found.push((j, a));
                    }
                }
            } else {
                for &j in &order[..earlier] {
                    found.push((j, agreement(ti, traces.trace(j), vectors)));
                }
            }
            (i, found)
        })
        .collect();
    Ok(Similarities { vectors, pairs })
}

/// The chosen replacement for one net and its score.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximationCandidate {
    pub target: NetId,
    pub replacement: Replacement,
    /// Vectors on which the replacement equals the original net.
    pub agreement: u64,
    /// `agreement / vectors`.
    pub gamma: f64,
}

/// Exactly one candidate per eligible net, ascending by target id. The
/// position in this list is the chromosome bit index.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CandidateSet {
    candidates: Vec<ApproximationCandidate>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CandidateMix {
    pub const0: f64,
    pub const1: f64,
    pub wire: f64,
}

impl CandidateSet {
    pub fn from_candidates(mut candidates: Vec<ApproximationCandidate>) -> Self {
        candidates.sort_by_key(|c| c.target);
        candidates.dedup_by_key(|c| c.target);
        CandidateSet { candidates }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn as_slice(&self) -> &[ApproximationCandidate] {
        &self.candidates
    }

    pub fn iter(&self) -> impl Iterator<Item = &ApproximationCandidate> {
        self.candidates.iter()
    }

    pub fn get(&self, target: NetId) -> Option<&ApproximationCandidate> {
        self.position(target).map(|k| &self.candidates[k])
    }

    /// Chromosome bit index of a target net.
    pub fn position(&self, target: NetId) -> Option<usize> {
        self.candidates.binary_search_by_key(&target, |c| c.target).ok()
    }

    /// Rewire plan applying the candidates whose bit is set.
    pub fn plan(&self, bits: &[bool]) -> RewirePlan {
        assert_eq!(bits.len(), self.len(), "one bit per candidate");
        self.candidates
            .iter()
            .zip(bits)
            .filter(|(_, &b)| b)
            .map(|(c, _)| (c.target, c.replacement))
            .collect()
    }

    /// Fractions of const0 / const1 / wire replacements among the selected
    /// candidates (all of them when `bits` is `None`).
    pub fn mix(&self, bits: Option<&[bool]>) -> CandidateMix {
        let mut counts = [0usize; 3];
        for (k, c) in self.candidates.iter().enumerate() {
            if bits.is_some_and(|b| !b[k]) {
                continue;
            }
            let slot = match c.replacement {
                Replacement::Const0 => 0,
                Replacement::Const1 => 1,
                Replacement::Net(_) => 2,
            };
            counts[slot] += 1;
        }
        let total: usize = counts.iter().sum();
        if total == 0 {
            return CandidateMix::default();
        }
        let f = |c: usize| c as f64 / total as f64;
        CandidateMix {
            const0: f(counts[0]),
            const1: f(counts[1]),
            wire: f(counts[2]),
        }
    }

    /// `net replacement gamma` per line.
    pub fn dump(&self, n: &Netlist) -> String {
        let mut out = String::new();
        for c in &self.candidates {
            let rep = match c.replacement {
                Replacement::Const0 => "1'b0",
                Replacement::Const1 => "1'b1",
                Replacement::Net(j) => n.net_name(j),
            };
            let _ = writeln!(out, "{} {} {:.6}", n.net_name(c.target), rep, c.gamma);
        }
        out
    }
}

/// Per-target random stream for breaking ties between equally early wires.
fn tie_rng(seed: u64, target: NetId) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(crate::derive_seed(&[seed, target.0 as u64]))
}

/// Select exactly one candidate per target.
pub fn select_candidates(
    activity: &WireActivity,
    similarities: &Similarities,
    arrival: &[f64],
    targets: &[NetId],
    seed: u64,
) -> CandidateSet {
    let candidates = targets
        .iter()
        .map(|&i| {
            let (zeros, ones) = (activity.zeros(i), activity.ones(i));
            let (mut replacement, mut best) = if ones > zeros {
                (Replacement::Const1, ones)
            } else {
                (Replacement::Const0, zeros)
            };
            let top = similarities
                .sources(i)
                .iter()
                .filter(|&&(j, _)| arrival[j.index()] < arrival[i.index()])
                .map(|&(_, a)| a)
                .max();
            if let Some(a) = top.filter(|&a| a > best) {
                let mut tied: Vec<NetId> = similarities
                    .sources(i)
                    .iter()
                    .filter(|&&(j, b)| b == a && arrival[j.index()] < arrival[i.index()])
                    .map(|&(j, _)| j)
                    .collect();
                let earliest = tied
                    .iter()
                    .map(|j| arrival[j.index()])
                    .fold(f64::INFINITY, f64::min);
                tied.retain(|j| arrival[j.index()] == earliest);
                tied.sort();
                let pick = if tied.len() == 1 {
                    tied[0]
                } else {
                    tied[tie_rng(seed, i).random_range(0..tied.len())]
                };
                replacement = Replacement::Net(pick);
                best = a;
            }
            ApproximationCandidate {
                target: i,
                replacement,
                agreement: best,
                gamma: best as f64 / activity.vectors() as f64,
            }
        })
        .collect();
    CandidateSet::from_candidates(candidates)
}

/// Activity, similarity and selection in one call.
pub fn extract_candidates(
    traces: &TraceSet,
    aged: &AnnotatedDag<'_>,
    targets: &[NetId],
    seed: u64,
) -> Result<CandidateSet, CandidateError> {
    let activity = compute_activity(traces)?;
    let sims = compute_similarity(traces, &activity, aged, targets, SimilarityOptions::default())?;
    Ok(select_candidates(&activity, &sims, aged.arrivals(), targets, seed))
}
