//! Aging-aware approximate rewriting of gate-level combinational netlists.
//!
//! The pipeline: parse or generate a netlist, annotate it at the fresh and
//! aged corners, simulate it on optimization stimuli, extract one
//! approximation candidate per eligible net, and let a genetic search pick
//! the subset of candidates with the lowest output error whose aged critical
//! path fits within the fresh one. Baselines (gate-level pruning, precision
//! scaling) and an experiment harness sit on top.

pub mod baselines;
pub mod bench;
pub mod candidates;
pub mod flow;
pub mod ga;
pub mod metrics;
pub mod netlist;
pub mod sim;
pub mod timing;

pub use candidates::{ApproximationCandidate, CandidateMix, CandidateSet, Eligibility};
pub use ga::{Chromosome, Evaluation, FitnessContext, GaConfig, GaResult};
pub use metrics::{ErrorMetrics, NmedVariant, OutputDecoding, OutputSpec};
pub use netlist::{GateKind, NetId, Netlist, NodeId, Replacement, RewirePlan};
pub use sim::{StimulusSet, TimedOutcome, TraceSet};
pub use timing::{AnnotatedDag, CellTimingModel, Corner};

/// Combine seed material into one well-mixed 64-bit seed (splitmix64 rounds).
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut h: u64 = 0x243F_6A88_85A3_08D3;
    for &p in parts {
        h = h.wrapping_add(p).wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = h;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h = z ^ (z >> 31);
    }
    h
}
