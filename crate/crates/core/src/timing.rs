//! Gate delay models, static timing analysis and process-variation sampling.
//!
//! The delay model is one pin-independent propagation delay per gate kind,
//! characterized at a fresh and an aged corner. Arrival times are computed in
//! a single topological pass: a net driven by gate `g` arrives at
//! `delay(g) + max(arrival of g's inputs)`, primary inputs and constants at 0.

use std::collections::BTreeMap;
use std::fmt::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::{GateKind, NetId, Netlist, NodeId};

/// Average aged/fresh delay ratio used when no aged corner is supplied.
pub const DEFAULT_AGING_FACTOR: f64 = 1.1215;

/// Relative standard deviation of the process-variation model.
pub const DEFAULT_SIGMA_RATIO: f64 = 0.10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TimingError {
    #[error("no delay for cell kind {0}")]
    MissingCellDelay(GateKind),
    #[error("invalid aging factor {0} (must be >= 1)")]
    InvalidFactor(f64),
    #[error("invalid delays for {kind}: fresh {fresh}, aged {aged} (need aged >= fresh > 0)")]
    InvalidDelay { kind: GateKind, fresh: f64, aged: f64 },
    #[error("unknown instance {0}")]
    UnknownInstance(NodeId),
    #[error("timing file line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Corner {
    Fresh,
    Aged,
    /// Delays supplied per instance (variation samples, overrides).
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellDelay {
    pub fresh: f64,
    pub aged: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CellTimingModel {
    delays: BTreeMap<GateKind, CellDelay>,
}

/// Aging degradation: a default ratio with optional per-kind overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct AgingFactor {
    pub default: f64,
    pub per_kind: BTreeMap<GateKind, f64>,
}

impl AgingFactor {
    pub fn uniform(f: f64) -> Self {
        AgingFactor {
            default: f,
            per_kind: BTreeMap::new(),
        }
    }

    pub fn for_kind(&self, kind: GateKind) -> f64 {
        self.per_kind.get(&kind).copied().unwrap_or(self.default)
    }
}

impl Default for AgingFactor {
    fn default() -> Self {
        AgingFactor::uniform(DEFAULT_AGING_FACTOR)
    }
}

impl CellTimingModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, kind: GateKind, fresh: f64, aged: f64) -> Result<(), TimingError> {
        let ok = fresh.is_finite() && aged.is_finite() && fresh > 0.0 && aged >= fresh;
        if !kind.is_logic() || !ok {
            return Err(TimingError::InvalidDelay { kind, fresh, aged });
        }
        self.delays.insert(kind, CellDelay { fresh, aged });
        Ok(())
    }

    /// A plausible 45nm-class library in nanoseconds, aged by [`DEFAULT_AGING_FACTOR`].
    pub fn nominal() -> Self {
        use GateKind::*;
        let fresh = [
            (Buf, 0.030),
            (Inv, 0.018),
            (And2, 0.040),
            (Nand2, 0.025),
            (Or2, 0.045),
            (Nor2, 0.030),
            (Xor2, 0.055),
            (Xnor2, 0.055),
            (And3, 0.050),
            (Nand3, 0.034),
            (Or3, 0.058),
            (Nor3, 0.042),
            (Mux2, 0.060),
        ];
        let mut m = CellTimingModel::new();
        for (k, d) in fresh {
            m.insert(k, d, d * DEFAULT_AGING_FACTOR).unwrap();
        }
        m
    }

    pub fn get(&self, kind: GateKind) -> Option<CellDelay> {
        self.delays.get(&kind).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (GateKind, CellDelay)> + '_ {
        self.delays.iter().map(|(k, d)| (*k, *d))
    }

    /// Delay of `kind` at a characterized corner; non-logic kinds are 0.
    pub fn delay(&self, kind: GateKind, corner: Corner) -> Result<f64, TimingError> {
        if !kind.is_logic() {
            return Ok(0.0);
        }
        let d = self.get(kind).ok_or(TimingError::MissingCellDelay(kind))?;
        Ok(match corner {
            Corner::Fresh | Corner::Custom => d.fresh,
            Corner::Aged => d.aged,
        })
    }

    /// Read `KIND fresh [aged]` lines; `#` starts a comment. A missing aged
    /// column is derived from `factor`.
    pub fn parse(text: &str, factor: &AgingFactor) -> Result<Self, TimingError> {
        let mut m = CellTimingModel::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |message: String| TimingError::Parse { line, message };
            let fields: Vec<&str> = body.split_whitespace().collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(err(format!("expected `KIND fresh [aged]`, got `{body}`")));
            }
            let kind: GateKind = fields[0]
                .parse()
                .map_err(|_| err(format!("unknown cell kind `{}`", fields[0])))?;
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| err(format!("invalid delay `{s}`")))
            };
            let fresh = num(fields[1])?;
            if !kind.is_logic() {
                if fresh != 0.0 {
                    return Err(err(format!("{kind} has no delay")));
                }
                continue;
            }
            let aged = match fields.get(2) {
                Some(s) => num(s)?,
                None => {
                    let f = factor.for_kind(kind);
                    if f < 1.0 || !f.is_finite() {
                        return Err(TimingError::InvalidFactor(f));
                    }
                    fresh * f
                }
            };
            if m.delays.contains_key(&kind) {
                return Err(err(format!("{kind} listed twice")));
            }
            m.insert(kind, fresh, aged)
                .map_err(|e| err(e.to_string()))?;
        }
        Ok(m)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# kind fresh_ns aged_ns\n");
        for (k, d) in self.iter() {
            writeln!(s, "{k} {} {}", d.fresh, d.aged).unwrap();
        }
        s
    }
}

/// Replace the aged corner by `fresh × factor`, keeping the fresh corner.
pub fn derive_aged_model(
    fresh: &CellTimingModel,
    factor: &AgingFactor,
) -> Result<CellTimingModel, TimingError> {
    let mut out = CellTimingModel::new();
    for (kind, d) in fresh.iter() {
        let f = factor.for_kind(kind);
        if !(f >= 1.0 && f.is_finite()) {
            return Err(TimingError::InvalidFactor(f));
        }
        out.insert(kind, d.fresh, d.fresh * f)?;
    }
    Ok(out)
}

/// A netlist annotated with per-instance delays, arrival times and its
/// critical path.
#[derive(Clone, Debug)]
pub struct AnnotatedDag<'a> {
    netlist: &'a Netlist,
    corner: Corner,
    delay: Vec<f64>,
    arrival: Vec<f64>,
    cpd: f64,
    critical_path: Vec<NodeId>,
}

impl<'a> AnnotatedDag<'a> {
    fn compute(netlist: &'a Netlist, corner: Corner, delay: Vec<f64>) -> Self {
        let mut arrival = vec![0.0f64; netlist.nets().len()];
        for &id in netlist.topological_order() {
            let node = netlist.node(id);
            if node.inputs.is_empty() {
                continue;
            }
            let latest = node
                .inputs
                .iter()
                .map(|n| arrival[n.index()])
                .fold(0.0f64, f64::max);
            arrival[node.output.index()] = delay[id.index()] + latest;
        }
        // Latest output; first in port order on ties.
        let mut sink: Option<NetId> = None;
        let mut cpd = 0.0f64;
        for net in netlist.output_nets() {
            if sink.is_none() || arrival[net.index()] > cpd {
                cpd = arrival[net.index()];
                sink = Some(net);
            }
        }
        let mut critical_path = Vec::new();
        let mut cur = sink;
        while let Some(net) = cur {
            let drv = netlist.net(net).driver;
            let node = netlist.node(drv);
            if !node.kind.is_logic() {
                break;
            }
            critical_path.push(drv);
            let mut best: Option<NetId> = None;
            for &inp in &node.inputs {
                if best.is_none_or(|b| arrival[inp.index()] > arrival[b.index()]) {
                    best = Some(inp);
                }
            }
            cur = best;
        }
        critical_path.reverse();
        AnnotatedDag {
            netlist,
            corner,
            delay,
            arrival,
            cpd,
            critical_path,
        }
    }

    pub fn netlist(&self) -> &'a Netlist {
        self.netlist
    }

    pub fn corner(&self) -> Corner {
        self.corner
    }

    pub fn delay(&self, node: NodeId) -> f64 {
        self.delay[node.index()]
    }

    pub fn delays(&self) -> &[f64] {
        &self.delay
    }

    pub fn arrival(&self, net: NetId) -> f64 {
        self.arrival[net.index()]
    }

    pub fn arrivals(&self) -> &[f64] {
        &self.arrival
    }

    /// Critical path delay: the latest primary-output arrival.
    pub fn cpd(&self) -> f64 {
        self.cpd
    }

    /// Logic instances on the critical path, source to sink.
    pub fn critical_path(&self) -> &[NodeId] {
        &self.critical_path
    }

    /// Nets along the critical path: the launching net followed by every
    /// path instance's output.
    pub fn critical_nets(&self) -> Vec<NetId> {
        let n = self.netlist;
        let mut nets = Vec::new();
        if let Some(&first) = self.critical_path.first() {
            let node = n.node(first);
            if let Some(&src) = node
                .inputs
                .iter()
                .find(|i| node.output != **i && self.arrival(**i) + self.delay(first) == self.arrival(node.output))
            {
                nets.push(src);
            }
        }
        nets.extend(self.critical_path.iter().map(|&g| n.node(g).output));
        nets
    }

    /// Longest remaining delay from each net to any primary output
    /// (`f64::NEG_INFINITY` for nets that reach none).
    pub fn departure(&self) -> Vec<f64> {
        let n = self.netlist;
        let mut dep = vec![f64::NEG_INFINITY; n.nets().len()];
        for net in n.output_nets() {
            dep[net.index()] = 0.0;
        }
        for &id in n.topological_order().iter().rev() {
            let node = n.node(id);
            let out = dep[node.output.index()];
            if out == f64::NEG_INFINITY {
                continue;
            }
            let through = out + self.delay[id.index()];
            for &inp in &node.inputs {
                if through > dep[inp.index()] {
                    dep[inp.index()] = through;
                }
            }
        }
        dep
    }
}

pub fn annotate<'a>(
    n: &'a Netlist,
    model: &CellTimingModel,
    corner: Corner,
) -> Result<AnnotatedDag<'a>, TimingError> {
    let delay = n
        .nodes()
        .iter()
        .map(|node| model.delay(node.kind, corner))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AnnotatedDag::compute(n, corner, delay))
}

/// Annotate with explicit per-instance delays (non-logic instances must be 0).
pub fn annotate_with_delays<'a>(n: &'a Netlist, delays: Vec<f64>) -> AnnotatedDag<'a> {
    assert_eq!(delays.len(), n.nodes().len());
    AnnotatedDag::compute(n, Corner::Custom, delays)
}

/// Re-run STA with some instance delays replaced.
pub fn restatic<'a>(
    dag: &AnnotatedDag<'a>,
    overrides: &BTreeMap<NodeId, f64>,
) -> Result<AnnotatedDag<'a>, TimingError> {
    if overrides.is_empty() {
        return Ok(dag.clone());
    }
    let mut delay = dag.delay.clone();
    for (&node, &d) in overrides {
        *delay
            .get_mut(node.index())
            .ok_or(TimingError::UnknownInstance(node))? = d;
    }
    Ok(AnnotatedDag::compute(dag.netlist, Corner::Custom, delay))
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariationSample {
    pub seed: u64,
    pub sigma_ratio: f64,
    pub delays: BTreeMap<NodeId, f64>,
}

/// Draw every logic instance's delay from `Normal(δ, (sigma_ratio·δ)²)`,
/// redrawing non-positive values.
pub fn sample_variation(dag: &AnnotatedDag<'_>, sigma_ratio: f64, seed: u64) -> VariationSample {
    assert!(sigma_ratio > 0.0, "sigma_ratio must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut delays = BTreeMap::new();
    for (i, node) in dag.netlist.nodes().iter().enumerate() {
        if !node.kind.is_logic() {
            continue;
        }
        let mean = dag.delay[i];
        let normal = Normal::new(mean, sigma_ratio * mean).expect("finite positive sigma");
        let d = loop {
            let d = normal.sample(&mut rng);
            if d > 0.0 {
                break d;
            }
        };
        delays.insert(NodeId(i as u32), d);
    }
    VariationSample {
        seed,
        sigma_ratio,
        delays,
    }
}
