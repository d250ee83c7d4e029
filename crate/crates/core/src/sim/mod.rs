//! Functional (bit-parallel) and event-driven timing simulation.

mod stimuli;
mod timed;

use thiserror::Error;

use crate::netlist::{GateKind, NetId, Netlist};

pub use stimuli::{generate_stimuli, input_layout, Provenance, StimulusSet};
pub use timed::{timing_simulate, timing_simulate_with, TimedOptions, TimedOutcome};

pub(crate) use stimuli::tail_mask;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("stimulus layout {got:?} does not match the netlist inputs {expected:?}")]
    LayoutMismatch { expected: Vec<usize>, got: Vec<usize> },
    #[error("stimulus line {line}: {message}")]
    StimulusFormat { line: usize, message: String },
}

/// Anything that can report a packed per-vector trace for a net.
pub trait OutputSource {
    fn vector_count(&self) -> usize;
    fn trace_of(&self, net: NetId) -> Option<&[u64]>;
}

/// Packed per-net value sequences, one bit per stimulus vector. Lanes past
/// the last vector are always zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSet {
    count: usize,
    words: usize,
    data: Vec<u64>,
}

impl TraceSet {
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn net_count(&self) -> usize {
        if self.words == 0 {
            0
        } else {
            self.data.len() / self.words
        }
    }

    pub fn trace(&self, net: NetId) -> &[u64] {
        &self.data[net.index() * self.words..(net.index() + 1) * self.words]
    }

    pub fn bit(&self, net: NetId, vector: usize) -> bool {
        self.trace(net)[vector / 64] >> (vector % 64) & 1 == 1
    }

    /// Number of vectors on which `net` is 1.
    pub fn ones(&self, net: NetId) -> u64 {
        self.trace(net).iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Build from raw per-net traces (tests and synthetic inputs).
    pub fn from_traces(count: usize, traces: &[Vec<u64>]) -> Self {
        let words = count.div_ceil(64);
        let mut data = Vec::with_capacity(words * traces.len());
        for t in traces {
            assert_eq!(t.len(), words, "trace length");
            data.extend_from_slice(t);
            if let Some(last) = data.last_mut() {
                *last &= tail_mask(count);
            }
        }
        TraceSet { count, words, data }
    }
}

impl OutputSource for TraceSet {
    fn vector_count(&self) -> usize {
        self.count
    }

    fn trace_of(&self, net: NetId) -> Option<&[u64]> {
        (net.index() < self.net_count()).then(|| self.trace(net))
    }
}

#[derive(Clone, Copy)]
struct Op {
    kind: GateKind,
    a: u32,
    b: u32,
    c: u32,
    out: u32,
}

/// Words evaluated per node before moving on, keeping the working set in cache.
const BLOCK_WORDS: usize = 64;

/// Evaluate every net for every stimulus vector, 64 vectors per word.
pub fn functional_simulate(n: &Netlist, s: &StimulusSet) -> Result<TraceSet, SimError> {
    s.check_layout(n)?;
    let words = s.words();
    let mut data = vec![0u64; n.nets().len() * words];
    for (bit, net) in n.input_nets().into_iter().enumerate() {
        data[net.index() * words..(net.index() + 1) * words].copy_from_slice(s.column(bit));
    }
    let ops: Vec<Op> = n
        .topological_order()
        .iter()
        .map(|&id| n.node(id))
        .filter(|node| node.kind != GateKind::Input)
        .map(|node| {
            let pin = |k: usize| node.inputs.get(k).map_or(0, |x| x.0);
            Op {
                kind: node.kind,
                a: pin(0),
                b: pin(1),
                c: pin(2),
                out: node.output.0,
            }
        })
        .collect();
    let mut start = 0;
    while start < words {
        let end = (start + BLOCK_WORDS).min(words);
        for op in &ops {
            let (a, b, c, o) = (
                op.a as usize * words,
                op.b as usize * words,
                op.c as usize * words,
                op.out as usize * words,
            );
            for w in start..end {
                data[o + w] = op.kind.eval_word(data[a + w], data[b + w], data[c + w]);
            }
        }
        start = end;
    }
    if words > 0 {
        let mask = tail_mask(s.len());
        for net in 0..n.nets().len() {
            data[net * words + words - 1] &= mask;
        }
    }
    Ok(TraceSet {
        count: s.len(),
        words,
        data,
    })
}

/// Steady-state value of every net for one input assignment (flattened port order).
pub fn evaluate_vector(n: &Netlist, inputs: &[bool]) -> Vec<bool> {
    let mut value = vec![false; n.nets().len()];
    for (net, &v) in n.input_nets().iter().zip(inputs) {
        value[net.index()] = v;
    }
    let mut pins = [false; 3];
    for &id in n.topological_order() {
        let node = n.node(id);
        if node.kind == GateKind::Input {
            continue;
        }
        for (k, x) in node.inputs.iter().enumerate() {
            pins[k] = value[x.index()];
        }
        value[node.output.index()] = node.kind.eval(&pins[..node.inputs.len()]);
    }
    value
}
