//! Benchmark circuits and the experiment harness: guardband elimination,
//! iso-performance error, candidate mix and Monte Carlo variation.

mod generate;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::derive_seed;
use crate::flow::{optimize, FlowError, OptimizeOptions, OptimizeOutcome};
use crate::ga::GaConfig;
use crate::metrics::{decode_outputs, nmed, NmedVariant, OutputDecoding, OutputSpec};
use crate::netlist::Netlist;
use crate::sim::{functional_simulate, timing_simulate, StimulusSet};
use crate::timing::{annotate, restatic, sample_variation, CellTimingModel, Corner};

pub use generate::{generate_benchmark, output_width, reference_output, BenchmarkKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub kind: BenchmarkKind,
    pub seed: u64,
    pub opt_vectors: usize,
    pub eval_vectors: usize,
}

impl BenchmarkSpec {
    pub fn new(kind: BenchmarkKind, seed: u64) -> Self {
        BenchmarkSpec {
            kind,
            seed,
            opt_vectors: crate::flow::DEFAULT_OPT_VECTORS,
            eval_vectors: crate::flow::DEFAULT_EVAL_VECTORS,
        }
    }
}

/// One row of the experiment table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub circuit: String,
    pub gates: usize,
    pub fresh_cpd: f64,
    pub aged_cpd_baseline: f64,
    pub aged_cpd_approx: f64,
    pub baseline_aged_nmed: f64,
    pub approx_nmed: f64,
    pub approx_timed_nmed: f64,
    pub feasible: bool,
    pub timing_exact: bool,
    pub eligible_nets: usize,
    pub selected: usize,
    pub candidates_const0: f64,
    pub candidates_const1: f64,
    pub candidates_wire: f64,
    pub selected_const0: f64,
    pub selected_const1: f64,
    pub selected_wire: f64,
    pub runtime_s: f64,
}

impl ExperimentRecord {
    pub const CSV_HEADER: &'static str = "circuit,gates,fresh_cpd,aged_cpd_baseline,aged_cpd_approx,baseline_aged_nmed,approx_nmed,approx_timed_nmed,feasible,timing_exact,eligible_nets,selected,candidates_const0,candidates_const1,candidates_wire,selected_const0,selected_const1,selected_wire,runtime_s";

    pub fn from_outcome(o: &OptimizeOutcome) -> Self {
        let r = &o.report;
        ExperimentRecord {
            circuit: r.circuit.clone(),
            gates: r.gates,
            fresh_cpd: r.fresh_cpd,
            aged_cpd_baseline: r.aged_cpd_baseline,
            aged_cpd_approx: r.aged_cpd_approx,
            baseline_aged_nmed: r.baseline_aged.nmed,
            approx_nmed: r.approx.nmed,
            approx_timed_nmed: r.approx_timed.nmed,
            feasible: r.feasible,
            timing_exact: r.timing_exact,
            eligible_nets: r.eligible_nets,
            selected: r.selected,
            candidates_const0: r.candidate_mix.const0,
            candidates_const1: r.candidate_mix.const1,
            candidates_wire: r.candidate_mix.wire,
            selected_const0: r.selected_mix.const0,
            selected_const1: r.selected_mix.const1,
            selected_wire: r.selected_mix.wire,
            runtime_s: o.runtime_s,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:e},{:e},{:e},{},{},{},{},{},{},{},{},{},{},{:.3}",
            self.circuit,
            self.gates,
            self.fresh_cpd,
            self.aged_cpd_baseline,
            self.aged_cpd_approx,
            self.baseline_aged_nmed,
            self.approx_nmed,
            self.approx_timed_nmed,
            self.feasible,
            self.timing_exact,
            self.eligible_nets,
            self.selected,
            self.candidates_const0,
            self.candidates_const1,
            self.candidates_wire,
            self.selected_const0,
            self.selected_const1,
            self.selected_wire,
            self.runtime_s,
        )
    }
}

pub fn records_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from(ExperimentRecord::CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Generate the circuit and run the full flow on it. `ga` defaults to the
/// configuration sized for the circuit, seeded with the benchmark's seed.
pub fn run_experiment(
    spec: &BenchmarkSpec,
    ga: Option<GaConfig>,
    model: &CellTimingModel,
) -> Result<(Netlist, OptimizeOutcome, ExperimentRecord), FlowError> {
    let n = generate_benchmark(spec.kind);
    let ga = ga.unwrap_or_else(|| GaConfig {
        seed: spec.seed,
        ..GaConfig::for_gate_count(n.gate_count())
    });
    let options = OptimizeOptions {
        ga,
        opt_vectors: spec.opt_vectors,
        eval_vectors: spec.eval_vectors,
        ..OptimizeOptions::default()
    };
    let outcome = optimize(&n, model, &OutputSpec::AllPorts, &options)?;
    let record = ExperimentRecord::from_outcome(&outcome);
    Ok((n, outcome, record))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Quartiles {
    /// Quantiles by linear interpolation between order statistics.
    pub fn of(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "quartiles of an empty sample");
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Quartiles {
            min: v[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: v[v.len() - 1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub circuit: String,
    pub samples: usize,
    pub sigma_ratio: f64,
    pub vectors: usize,
    pub clock: f64,
    pub baseline: Quartiles,
    pub approximate: Quartiles,
    pub baseline_nmed: Vec<f64>,
    pub approximate_nmed: Vec<f64>,
}

impl MonteCarloSummary {
    pub fn csv(&self) -> String {
        let mut out = String::from("circuit,variant,min,q1,median,q3,max\n");
        for (variant, q) in [("baseline-aged", &self.baseline), ("approximate-aged", &self.approximate)] {
            let _ = writeln!(
                out,
                "{},{},{:e},{:e},{:e},{:e},{:e}",
                self.circuit, variant, q.min, q.q1, q.median, q.q3, q.max
            );
        }
        out
    }
}

/// Default number of evaluation vectors simulated per Monte Carlo sample.
pub const MONTECARLO_VECTORS: usize = 10_000;

/// Per sample, perturb the aged delays of the baseline and the approximate
/// netlist, sample both at `clock` and measure NMED against exact outputs.
#[allow(clippy::too_many_arguments)]
pub fn run_montecarlo(
    baseline: &Netlist,
    approx: &Netlist,
    model: &CellTimingModel,
    stimuli: &StimulusSet,
    clock: f64,
    samples: usize,
    sigma_ratio: f64,
    seed: u64,
    output: &OutputSpec,
) -> Result<MonteCarloSummary, FlowError> {
    assert!(samples >= 1, "at least one sample");
    let stage = |e: &dyn std::fmt::Display| FlowError::Stage(e.to_string());
    let decoding = OutputDecoding::from_netlist(baseline, output).map_err(|e| stage(&e))?;
    let traces = functional_simulate(baseline, stimuli).map_err(|e| stage(&e))?;
    let golden = decode_outputs(&traces, &decoding).map_err(|e| stage(&e))?;
    let base_dag = annotate(baseline, model, Corner::Aged).map_err(|e| stage(&e))?;
    let approx_dag = annotate(approx, model, Corner::Aged).map_err(|e| stage(&e))?;
    let approx_dec = OutputDecoding::from_netlist(approx, output).map_err(|e| stage(&e))?;

    let one = |dag: &crate::timing::AnnotatedDag<'_>, dec: &OutputDecoding, s: u64| -> Result<f64, FlowError> {
        let v = sample_variation(dag, sigma_ratio, s);
        let varied = restatic(dag, &v.delays).map_err(|e| stage(&e))?;
        let out = timing_simulate(&varied, stimuli, clock).map_err(|e| stage(&e))?;
        let observed = decode_outputs(&out, dec).map_err(|e| stage(&e))?;
        Ok(nmed(&golden, &observed, decoding.max_value, NmedVariant::Standard)
            .map_err(|e| stage(&e))?
            .nmed)
    };
    let pairs: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let b = one(&base_dag, &decoding, derive_seed(&[seed, k as u64, 0]))?;
            let a = one(&approx_dag, &approx_dec, derive_seed(&[seed, k as u64, 1]))?;
            Ok((b, a))
        })
        .collect::<Result<_, FlowError>>()?;
    let (baseline_nmed, approximate_nmed): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(MonteCarloSummary {
        circuit: baseline.name().to_string(),
        samples,
        sigma_ratio,
        vectors: stimuli.len(),
        clock,
        baseline: Quartiles::of(&baseline_nmed),
        approximate: Quartiles::of(&approximate_nmed),
        baseline_nmed,
        approximate_nmed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartiles_interpolate() {
        let q = Quartiles::of(&[4.0, 1.0, 3.0, 2.0, 5.0]);
        assert_eq!((q.min, q.q1, q.median, q.q3, q.max), (1.0, 2.0, 3.0, 4.0, 5.0));
        let q = Quartiles::of(&[1.0, 2.0]);
        assert_eq!((q.q1, q.median, q.q3), (1.25, 1.5, 1.75));
        let q = Quartiles::of(&[7.0]);
        assert_eq!(q.median, 7.0);
    }
}
