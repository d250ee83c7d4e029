//! Transport-delay event simulation with a clock-edge sampler.
//!
//! Vectors are applied in order. Each vector starts from the settled state of
//! the previous one (vector 0 starts settled on itself), the primary inputs
//! switch at t = 0, and every gate whose recomputed output differs from its
//! last scheduled value schedules a change `delay` later. Primary outputs are
//! sampled at t = clock period; events at exactly the clock edge count as
//! arrived. Gates outside every output's fan-in cone are not simulated, so a
//! vector is settled once the output cones are quiet. Simultaneous events
//! apply together; if one gate has two events at the same instant (distinct
//! schedule times can round to the same sum), the later-scheduled one wins.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::stimuli::{tail_mask, words_for};
use super::{evaluate_vector, OutputSource, SimError, StimulusSet};
use crate::netlist::NetId;
use crate::timing::AnnotatedDag;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TimedOptions {
    /// Record, per vector, the nets still switching after the clock edge.
    pub collect_late: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedOutcome {
    count: usize,
    words: usize,
    /// Distinct primary-output nets, in first-occurrence port order.
    nets: Vec<NetId>,
    /// Sampled values, `[output][word]`.
    sampled: Vec<u64>,
    /// Bit set per vector: no events were pending at the clock edge.
    settled: Vec<u64>,
    late: Option<Vec<Vec<NetId>>>,
}

impl TimedOutcome {
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn settled(&self, vector: usize) -> bool {
        self.settled[vector / 64] >> (vector % 64) & 1 == 1
    }

    pub fn unsettled_count(&self) -> usize {
        self.count - self.settled.iter().map(|w| w.count_ones() as usize).sum::<usize>()
    }

    pub fn sampled(&self, net: NetId, vector: usize) -> Option<bool> {
        self.trace_of(net).map(|t| t[vector / 64] >> (vector % 64) & 1 == 1)
    }

    /// Late nets per vector, when requested through [`TimedOptions`].
    pub fn late_nets(&self) -> Option<&[Vec<NetId>]> {
        self.late.as_deref()
    }
}

impl OutputSource for TimedOutcome {
    fn vector_count(&self) -> usize {
        self.count
    }

    fn trace_of(&self, net: NetId) -> Option<&[u64]> {
        let k = self.nets.iter().position(|&n| n == net)?;
        Some(&self.sampled[k * self.words..(k + 1) * self.words])
    }
}

pub fn timing_simulate(
    dag: &AnnotatedDag<'_>,
    s: &StimulusSet,
    clock_period: f64,
) -> Result<TimedOutcome, SimError> {
    timing_simulate_with(dag, s, clock_period, TimedOptions::default())
}

pub fn timing_simulate_with(
    dag: &AnnotatedDag<'_>,
    s: &StimulusSet,
    clock_period: f64,
    options: TimedOptions,
) -> Result<TimedOutcome, SimError> {
    assert!(clock_period > 0.0, "clock period must be positive");
    let n = dag.netlist();
    s.check_layout(n)?;
    let count = s.len();
    let words = words_for(count);

    let mut out_nets: Vec<NetId> = Vec::new();
    for net in n.output_nets() {
        if !out_nets.contains(&net) {
            out_nets.push(net);
        }
    }
    let input_nets = n.input_nets();
    let nodes = n.nodes();
    let delay = dag.delays();
    // gates with no path to an output never schedule events
    let mut live = vec![false; nodes.len()];
    let mut reach = vec![false; n.nets().len()];
    for net in &out_nets {
        reach[net.index()] = true;
    }
    for &id in n.topological_order().iter().rev() {
        let node = &nodes[id.index()];
        if reach[node.output.index()] {
            live[id.index()] = true;
            for x in &node.inputs {
                reach[x.index()] = true;
            }
        }
    }

    let mut sampled = vec![0u64; out_nets.len() * words];
    let mut settled = vec![0u64; words];
    let mut late: Option<Vec<Vec<NetId>>> = options.collect_late.then(Vec::new);

    // value per net; projected (last scheduled) output per node
    let mut value = evaluate_vector(n, &s.vector_bits(0));
    let mut projected: Vec<bool> = nodes.iter().map(|x| value[x.output.index()]).collect();
    // (time bits, schedule sequence, gate, value)
    let mut heap: BinaryHeap<Reverse<(u64, u64, u32, bool)>> = BinaryHeap::new();
    let mut seq: u64 = 0;
    let mut touched: Vec<u32> = Vec::new();
    let mut stamp: Vec<u32> = vec![u32::MAX; nodes.len()];
    let mut pins = [false; 3];

    let record = |value: &[bool], sampled: &mut [u64], v: usize| {
        for (k, net) in out_nets.iter().enumerate() {
            if value[net.index()] {
                sampled[k * words + v / 64] |= 1 << (v % 64);
            }
        }
    };

    record(&value, &mut sampled, 0);
    settled[0] |= 1;
    if let Some(l) = late.as_mut() {
        l.push(Vec::new());
    }

    let mut epoch: u32 = 0;
    for v in 1..count {
        // t = 0: primary inputs switch
        touched.clear();
        epoch = epoch.wrapping_add(1);
        for (bit, &net) in input_nets.iter().enumerate() {
            let nv = s.bit(bit, v);
            if value[net.index()] != nv {
                value[net.index()] = nv;
                for &r in n.fanout(net) {
                    if stamp[r.index()] != epoch {
                        stamp[r.index()] = epoch;
                        touched.push(r.0);
                    }
                }
            }
        }
        let mut now = 0.0f64;
        let mut sampled_now = false;
        loop {
            touched.sort_unstable();
            for &g in &touched {
                if !live[g as usize] {
                    continue;
                }
                let node = &nodes[g as usize];
                for (k, x) in node.inputs.iter().enumerate() {
                    pins[k] = value[x.index()];
                }
                let out = node.kind.eval(&pins[..node.inputs.len()]);
                if out != projected[g as usize] {
                    projected[g as usize] = out;
                    let t = now + delay[g as usize];
                    heap.push(Reverse((t.to_bits(), seq, g, out)));
                    seq += 1;
                }
            }
            touched.clear();
            let Some(&Reverse((tb, ..))) = heap.peek() else {
                break;
            };
            let t = f64::from_bits(tb);
            if t > clock_period && !sampled_now {
                record(&value, &mut sampled, v);
                sampled_now = true;
                if let Some(l) = late.as_mut() {
                    let mut nets: Vec<NetId> = heap
                        .iter()
                        .map(|Reverse((_, _, g, _))| nodes[*g as usize].output)
                        .collect();
                    nets.sort_unstable();
                    nets.dedup();
                    l.push(nets);
                }
            }
            now = t;
            epoch = epoch.wrapping_add(1);
            while let Some(&Reverse((tb2, _, g, out))) = heap.peek() {
                if tb2 != tb {
                    break;
                }
                heap.pop();
                let net = nodes[g as usize].output;
                if value[net.index()] != out {
                    value[net.index()] = out;
                    for &r in n.fanout(net) {
                        if stamp[r.index()] != epoch {
                            stamp[r.index()] = epoch;
                            touched.push(r.0);
                        }
                    }
                }
            }
        }
        if !sampled_now {
            record(&value, &mut sampled, v);
            settled[v / 64] |= 1 << (v % 64);
            if let Some(l) = late.as_mut() {
                l.push(Vec::new());
            }
        }
    }
    if words > 0 {
        let mask = tail_mask(count);
        for k in 0..out_nets.len() {
            sampled[k * words + words - 1] &= mask;
        }
    }
    Ok(TimedOutcome {
        count,
        words,
        nets: out_nets,
        sampled,
        settled,
        late,
    })
}
