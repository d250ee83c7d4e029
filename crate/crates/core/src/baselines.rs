//! Reference approximations: gate-level pruning (GLP) and input precision
//! scaling (APS).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidates::{compute_activity, eligible_nets, Eligibility};
use crate::metrics::{decode_outputs, nmed, ErrorMetrics, NmedVariant, OutputDecoding, OutputSpec};
use crate::netlist::{apply_rewiring, NetId, Netlist, Replacement, RewirePlan};
use crate::sim::{functional_simulate, StimulusSet, TraceSet};
use crate::timing::{annotate, CellTimingModel, Corner};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("no prunable net left while aged cpd {aged_cpd} exceeds target {target}")]
    Stuck { aged_cpd: f64, target: f64 },
    #[error("no truncation meets the delay target")]
    Infeasible,
    #[error("{0} truncation tuples exceed the exhaustive-search limit")]
    SearchTooLarge(u128),
    #[error("{0}")]
    Pipeline(String),
}

fn pipe(e: impl std::fmt::Display) -> BaselineError {
    BaselineError::Pipeline(e.to_string())
}

/// Decoded output values of a netlist on a stimulus set.
pub fn output_values(n: &Netlist, s: &StimulusSet, output: &OutputSpec) -> Result<Vec<u128>, BaselineError> {
    let d = OutputDecoding::from_netlist(n, output).map_err(pipe)?;
    let t = functional_simulate(n, s).map_err(pipe)?;
    decode_outputs(&t, &d).map_err(pipe)
}

fn error_of(
    golden: &[u128],
    n: &Netlist,
    s: &StimulusSet,
    output: &OutputSpec,
    variant: NmedVariant,
) -> Result<ErrorMetrics, BaselineError> {
    let d = OutputDecoding::from_netlist(n, output).map_err(pipe)?;
    let observed = output_values(n, s, output)?;
    nmed(golden, &observed, d.max_value, variant).map_err(pipe)
}

/// Significance, toggle activity and their product for one net.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SapScore {
    pub net: NetId,
    /// Sum of `2^bit` over decoded output bits reachable from the net.
    pub significance: f64,
    /// Fraction of consecutive vector pairs on which the net toggles.
    pub activity: f64,
    pub sap: f64,
}

/// Toggle fraction between consecutive vectors.
fn toggle_rate(trace: &[u64], count: usize) -> f64 {
    if count < 2 {
        return 0.0;
    }
    let mut toggles = 0u64;
    let mut carry = trace[0] & 1;
    for (w, &word) in trace.iter().enumerate() {
        // bit v of `prev` holds the value of vector v - 1
        let prev = (word << 1) | if w == 0 { word & 1 } else { carry };
        let mut diff = word ^ prev;
        if w == trace.len() - 1 && count % 64 != 0 {
            diff &= (1u64 << (count % 64)) - 1;
        }
        toggles += diff.count_ones() as u64;
        carry = word >> 63;
    }
    toggles as f64 / (count - 1) as f64
}

/// SAP of the given nets; significance follows the output decoding.
pub fn sap_scores(n: &Netlist, traces: &TraceSet, decoding: &OutputDecoding, nets: &[NetId]) -> Vec<SapScore> {
    // bitmask of decoded output bits reachable from each net
    let mut reach = vec![0u128; n.nets().len()];
    for (k, &net) in decoding.nets.iter().enumerate() {
        reach[net.index()] |= 1u128 << k;
    }
    for &id in n.topological_order().iter().rev() {
        let node = n.node(id);
        let out = reach[node.output.index()];
        for &inp in &node.inputs {
            reach[inp.index()] |= out;
        }
    }
    nets.iter()
        .map(|&net| {
            let significance = reach[net.index()] as f64;
            let activity = toggle_rate(traces.trace(net), traces.len());
            SapScore {
                net,
                significance,
                activity,
                sap: significance * activity,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrunedNet {
    pub net: String,
    pub value: bool,
    pub sap: f64,
}

#[derive(Clone, Debug)]
pub struct GlpResult {
    pub netlist: Netlist,
    pub pruned: Vec<PrunedNet>,
    pub aged_cpd: f64,
    pub metrics: ErrorMetrics,
}

/// Prune the minimum-SAP net on a violating aged path to its majority
/// constant, one at a time, until the aged cpd meets the target. Ties on SAP
/// go to the lower net id.
#[allow(clippy::too_many_arguments)]
pub fn glp(
    baseline: &Netlist,
    model: &CellTimingModel,
    delay_target: f64,
    opt_stimuli: &StimulusSet,
    eval_stimuli: &StimulusSet,
    output: &OutputSpec,
    variant: NmedVariant,
) -> Result<GlpResult, BaselineError> {
    let mut current = baseline.clone();
    let mut pruned = Vec::new();
    let aged_cpd = loop {
        let aged = annotate(&current, model, Corner::Aged).map_err(pipe)?;
        if aged.cpd() <= delay_target {
            break aged.cpd();
        }
        let nets = eligible_nets(&aged, delay_target, Eligibility::Violating);
        if nets.is_empty() {
            return Err(BaselineError::Stuck {
                aged_cpd: aged.cpd(),
                target: delay_target,
            });
        }
        let traces = functional_simulate(&current, opt_stimuli).map_err(pipe)?;
        let activity = compute_activity(&traces).map_err(pipe)?;
        let decoding = OutputDecoding::from_netlist(&current, output).map_err(pipe)?;
        let scores = sap_scores(&current, &traces, &decoding, &nets);
        let pick = scores
            .iter()
            .min_by(|a, b| a.sap.total_cmp(&b.sap).then(a.net.cmp(&b.net)))
            .copied()
            .expect("non-empty");
        let value = activity.majority(pick.net);
        pruned.push(PrunedNet {
            net: current.net_name(pick.net).to_string(),
            value,
            sap: pick.sap,
        });
        let plan: RewirePlan = [(pick.net, Replacement::constant(value))].into_iter().collect();
        current = apply_rewiring(&current, &plan).map_err(pipe)?;
    };
    let golden = output_values(baseline, eval_stimuli, output)?;
    let metrics = error_of(&golden, &current, eval_stimuli, output, variant)?;
    Ok(GlpResult {
        netlist: current,
        pruned,
        aged_cpd,
        metrics,
    })
}

/// Truncated low-order bits per primary-input bus, in port order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrecisionConfig {
    pub truncated: Vec<usize>,
}

impl PrecisionConfig {
    pub fn total(&self) -> usize {
        self.truncated.iter().sum()
    }

    pub fn plan(&self, n: &Netlist) -> RewirePlan {
        n.inputs()
            .iter()
            .zip(&self.truncated)
            .flat_map(|(port, &t)| port.bits[..t.min(port.width())].iter())
            .map(|&net| (net, Replacement::Const0))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ApsResult {
    pub config: PrecisionConfig,
    pub netlist: Netlist,
    pub aged_cpd: f64,
    pub opt_nmed: f64,
    pub metrics: ErrorMetrics,
    pub feasible_tuples: usize,
}

/// Upper bound on the number of truncation tuples searched.
pub const APS_MAX_TUPLES: u128 = 1 << 20;

/// Every truncation tuple, in lexicographic order.
pub fn truncation_tuples(widths: &[usize]) -> Vec<PrecisionConfig> {
    let mut out = vec![PrecisionConfig { truncated: Vec::new() }];
    for &w in widths {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=w).map(move |t| {
                    let mut truncated = p.truncated.clone();
                    truncated.push(t);
                    PrecisionConfig { truncated }
                })
            })
            .collect();
    }
    out
}

/// Exhaustive sweep over truncation tuples. Among tuples meeting the target
/// the lowest optimization-set NMED wins, then fewer truncated bits, then
/// the lexicographically smaller tuple.
#[allow(clippy::too_many_arguments)]
pub fn aps(
    baseline: &Netlist,
    model: &CellTimingModel,
    delay_target: f64,
    opt_stimuli: &StimulusSet,
    eval_stimuli: &StimulusSet,
    output: &OutputSpec,
    variant: NmedVariant,
) -> Result<ApsResult, BaselineError> {
    let widths: Vec<usize> = baseline.inputs().iter().map(|p| p.width()).collect();
    let tuples: u128 = widths.iter().map(|&w| w as u128 + 1).product();
    if tuples > APS_MAX_TUPLES {
        return Err(BaselineError::SearchTooLarge(tuples));
    }
    let golden = output_values(baseline, opt_stimuli, output)?;
    let sweep: Vec<(PrecisionConfig, Option<(f64, f64)>)> = truncation_tuples(&widths)
        .into_par_iter()
        .map(|p| {
            let r = (|| -> Result<Option<(f64, f64)>, BaselineError> {
                let n = apply_rewiring(baseline, &p.plan(baseline)).map_err(pipe)?;
                let cpd = annotate(&n, model, Corner::Aged).map_err(pipe)?.cpd();
                if cpd > delay_target {
                    return Ok(None);
                }
                let m = error_of(&golden, &n, opt_stimuli, output, variant)?;
                Ok(Some((m.nmed, cpd)))
            })();
            r.map(|v| (p, v))
        })
        .collect::<Result<_, _>>()?;
    let feasible_tuples = sweep.iter().filter(|(_, v)| v.is_some()).count();
    let (config, (opt_nmed, aged_cpd)) = sweep
        .into_iter()
        .filter_map(|(p, v)| v.map(|v| (p, v)))
        .min_by(|(pa, a), (pb, b)| {
            a.0.total_cmp(&b.0)
                .then(pa.total().cmp(&pb.total()))
                .then(pa.cmp(pb))
        })
        .ok_or(BaselineError::Infeasible)?;
    let netlist = apply_rewiring(baseline, &config.plan(baseline)).map_err(pipe)?;
    let eval_golden = output_values(baseline, eval_stimuli, output)?;
    let metrics = error_of(&eval_golden, &netlist, eval_stimuli, output, variant)?;
    Ok(ApsResult {
        config,
        netlist,
        aged_cpd,
        opt_nmed,
        metrics,
        feasible_tuples,
    })
}
