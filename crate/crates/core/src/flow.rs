//! The end-to-end optimization flow on one netlist.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidates::{eligible_nets, extract_candidates, CandidateMix, CandidateSet, Eligibility};
use crate::derive_seed;
use crate::ga::{evolve, FitnessContext, GaConfig, GaError, GaResult};
use crate::metrics::{decode_outputs, nmed, ErrorMetrics, NmedVariant, OutputDecoding, OutputSpec};
use crate::netlist::{apply_rewiring, Netlist};
use crate::sim::{functional_simulate, generate_stimuli, input_layout, timing_simulate, StimulusSet};
use crate::timing::{annotate, CellTimingModel, Corner};

#[derive(Debug, Error)]
pub enum FlowError {
    #[error(transparent)]
    Ga(#[from] GaError),
    #[error("{0}")]
    Stage(String),
}

fn stage(e: impl std::fmt::Display) -> FlowError {
    FlowError::Stage(e.to_string())
}

/// Default optimization / evaluation stimulus counts.
pub const DEFAULT_OPT_VECTORS: usize = 100_000;
pub const DEFAULT_EVAL_VECTORS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub ga: GaConfig,
    /// Defaults to the fresh-corner cpd of the input.
    pub delay_target: Option<f64>,
    pub opt_vectors: usize,
    pub eval_vectors: usize,
    pub eligibility: Eligibility,
    pub variant: NmedVariant,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            ga: GaConfig::default(),
            delay_target: None,
            opt_vectors: DEFAULT_OPT_VECTORS,
            eval_vectors: DEFAULT_EVAL_VECTORS,
            eligibility: Eligibility::Violating,
            variant: NmedVariant::Standard,
        }
    }
}

/// Stimulus sets derived from a run seed: the optimization and evaluation
/// sets use independent streams.
pub fn split_stimuli(n: &Netlist, seed: u64, opt_vectors: usize, eval_vectors: usize) -> (StimulusSet, StimulusSet) {
    let layout = input_layout(n);
    (
        generate_stimuli(&layout, opt_vectors, derive_seed(&[seed, 1])),
        generate_stimuli(&layout, eval_vectors, derive_seed(&[seed, 2])),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub circuit: String,
    pub gates: usize,
    pub seed: u64,
    pub delay_target: f64,
    pub fresh_cpd: f64,
    pub aged_cpd_baseline: f64,
    pub aged_cpd_approx: f64,
    pub fresh_cpd_approx: f64,
    pub feasible: bool,
    pub eligible_nets: usize,
    pub chromosome: String,
    pub selected: usize,
    /// Functional error of the approximate netlist on the evaluation set.
    pub approx: ErrorMetrics,
    /// Approximate netlist sampled at the target clock under aged delays.
    pub approx_timed: ErrorMetrics,
    /// Baseline sampled at the target clock under aged delays.
    pub baseline_aged: ErrorMetrics,
    /// Timed and functional outputs of the approximate netlist agree on every vector.
    pub timing_exact: bool,
    pub candidate_mix: CandidateMix,
    pub selected_mix: CandidateMix,
    pub opt_nmed: Option<f64>,
    pub generations: usize,
}

#[derive(Clone, Debug)]
pub struct OptimizeOutcome {
    pub approx: Netlist,
    pub candidates: CandidateSet,
    pub ga: GaResult,
    pub report: OptimizeReport,
    /// Wall-clock seconds; kept out of the report so reports are reproducible.
    pub runtime_s: f64,
}

/// Metrics of `observed` outputs against exact outputs.
fn compare(golden: &[u128], observed: &[u128], d: &OutputDecoding, variant: NmedVariant) -> Result<ErrorMetrics, FlowError> {
    nmed(golden, observed, d.max_value, variant).map_err(stage)
}

/// Outputs of `n` sampled at `clock` under aged delays.
pub fn aged_timed_outputs(
    n: &Netlist,
    model: &CellTimingModel,
    s: &StimulusSet,
    clock: f64,
    output: &OutputSpec,
) -> Result<Vec<u128>, FlowError> {
    let d = OutputDecoding::from_netlist(n, output).map_err(stage)?;
    let dag = annotate(n, model, Corner::Aged).map_err(stage)?;
    let out = timing_simulate(&dag, s, clock).map_err(stage)?;
    decode_outputs(&out, &d).map_err(stage)
}

fn functional_outputs(n: &Netlist, s: &StimulusSet, output: &OutputSpec) -> Result<Vec<u128>, FlowError> {
    let d = OutputDecoding::from_netlist(n, output).map_err(stage)?;
    let t = functional_simulate(n, s).map_err(stage)?;
    decode_outputs(&t, &d).map_err(stage)
}

/// Run candidate extraction and the genetic search on `baseline`, then
/// evaluate the result on held-out stimuli.
pub fn optimize(
    baseline: &Netlist,
    model: &CellTimingModel,
    output: &OutputSpec,
    options: &OptimizeOptions,
) -> Result<OptimizeOutcome, FlowError> {
    let start = Instant::now();
    let fresh = annotate(baseline, model, Corner::Fresh).map_err(stage)?;
    let aged = annotate(baseline, model, Corner::Aged).map_err(stage)?;
    let target = options.delay_target.unwrap_or(fresh.cpd());
    let seed = options.ga.seed;
    let (opt, eval) = split_stimuli(baseline, seed, options.opt_vectors, options.eval_vectors);

    let traces = functional_simulate(baseline, &opt).map_err(stage)?;
    let eligible = eligible_nets(&aged, target, options.eligibility);
    let candidates = extract_candidates(&traces, &aged, &eligible, seed).map_err(stage)?;
    drop(traces);

    let ctx = FitnessContext::new(baseline, &candidates, model, target, &opt, output.clone(), options.variant)?
        .with_epsilon(options.ga.epsilon);
    let ga = evolve(&options.ga, &ctx)?;
    let approx = apply_rewiring(baseline, &candidates.plan(ga.best.bits())).map_err(stage)?;

    let approx_aged = annotate(&approx, model, Corner::Aged).map_err(stage)?;
    let approx_fresh = annotate(&approx, model, Corner::Fresh).map_err(stage)?;
    let decoding = OutputDecoding::from_netlist(baseline, output).map_err(stage)?;
    let golden = functional_outputs(baseline, &eval, output)?;
    let approx_func = functional_outputs(&approx, &eval, output)?;
    let approx_timed = aged_timed_outputs(&approx, model, &eval, target, output)?;
    let baseline_timed = aged_timed_outputs(baseline, model, &eval, target, output)?;

    let report = OptimizeReport {
        circuit: baseline.name().to_string(),
        gates: baseline.gate_count(),
        seed,
        delay_target: target,
        fresh_cpd: fresh.cpd(),
        aged_cpd_baseline: aged.cpd(),
        aged_cpd_approx: approx_aged.cpd(),
        fresh_cpd_approx: approx_fresh.cpd(),
        feasible: ga.feasible && approx_aged.cpd() <= target,
        eligible_nets: candidates.len(),
        chromosome: ga.best.to_string(),
        selected: ga.best.count_ones(),
        approx: compare(&golden, &approx_func, &decoding, options.variant)?,
        approx_timed: compare(&golden, &approx_timed, &decoding, options.variant)?,
        baseline_aged: compare(&golden, &baseline_timed, &decoding, options.variant)?,
        timing_exact: approx_timed == approx_func,
        candidate_mix: candidates.mix(None),
        selected_mix: candidates.mix(Some(ga.best.bits())),
        opt_nmed: ga.best_nmed,
        generations: ga.history.len(),
    };
    Ok(OptimizeOutcome {
        approx,
        candidates,
        ga,
        report,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}
