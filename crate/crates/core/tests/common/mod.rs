//! Independent reference models shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use guardfree::netlist::NetlistBuilder;
use guardfree::sim::input_layout;
use guardfree::{GateKind, NetId, Netlist, Replacement, RewirePlan, StimulusSet};
use rand::Rng;

/// Cell truth functions written out by hand (pin order A, B, C / A, B, S).
pub fn gate_value(kind: GateKind, x: &[bool]) -> bool {
    use GateKind::*;
    match kind {
        Const0 => false,
        Const1 => true,
        Buf => x[0],
        Inv => !x[0],
        And2 => x[0] && x[1],
        Nand2 => !(x[0] && x[1]),
        Or2 => x[0] || x[1],
        Nor2 => !(x[0] || x[1]),
        Xor2 => x[0] != x[1],
        Xnor2 => x[0] == x[1],
        And3 => x[0] && x[1] && x[2],
        Nand3 => !(x[0] && x[1] && x[2]),
        Or3 => x[0] || x[1] || x[2],
        Nor3 => !(x[0] || x[1] || x[2]),
        Mux2 => {
            if x[2] {
                x[1]
            } else {
                x[0]
            }
        }
        Input | Output => unreachable!("not a cell"),
    }
}

/// Net values computed recursively from the drivers, with `plan` applied as
/// direct substitution: readers of a target read its replacement, where a
/// wire replacement means the source's own driver output.
pub struct Naive<'a> {
    n: &'a Netlist,
    plan: &'a RewirePlan,
    pis: HashMap<NetId, bool>,
    memo: HashMap<NetId, bool>,
}

impl<'a> Naive<'a> {
    pub fn new(n: &'a Netlist, plan: &'a RewirePlan, pi_bits: &[bool]) -> Self {
        let pis = n.input_nets().into_iter().zip(pi_bits.iter().copied()).collect();
        Naive {
            n,
            plan,
            pis,
            memo: HashMap::new(),
        }
    }

    pub fn read(&mut self, net: NetId) -> bool {
        match self.plan.get(&net) {
            Some(Replacement::Const0) => false,
            Some(Replacement::Const1) => true,
            Some(Replacement::Net(j)) => self.drive(*j),
            None => self.drive(net),
        }
    }

    fn drive(&mut self, net: NetId) -> bool {
        if let Some(&v) = self.memo.get(&net) {
            return v;
        }
        let node = self.n.driver(net).clone();
        let v = match node.kind {
            GateKind::Input => self.pis[&net],
            _ => {
                let ins: Vec<bool> = node.inputs.iter().map(|&i| self.read(i)).collect();
                gate_value(node.kind, &ins)
            }
        };
        self.memo.insert(net, v);
        v
    }

    /// Output port bits, port order, LSB first within each port.
    pub fn outputs(&mut self) -> Vec<bool> {
        let nets: Vec<NetId> = self.n.outputs().iter().flat_map(|p| p.bits.iter().copied()).collect();
        nets.into_iter().map(|b| self.read(b)).collect()
    }
}

pub fn naive_outputs(n: &Netlist, plan: &RewirePlan, pi_bits: &[bool]) -> Vec<bool> {
    Naive::new(n, plan, pi_bits).outputs()
}

/// Bits of vector `v` in flattened input order (port order, LSB first).
pub fn vector_bits(width: usize, v: u64) -> Vec<bool> {
    (0..width).map(|b| v >> b & 1 == 1).collect()
}

/// Every input combination, vector `v` carrying flattened bit `b` = bit `b` of `v`.
pub fn exhaustive_stimuli(n: &Netlist) -> StimulusSet {
    let widths = input_layout(n);
    let total: usize = widths.iter().sum();
    assert!(total <= 16, "too many inputs for exhaustive simulation");
    let values: Vec<Vec<u128>> = (0..1u64 << total)
        .map(|v| {
            let mut off = 0;
            widths
                .iter()
                .map(|&w| {
                    let x = (v >> off) as u128 & ((1u128 << w) - 1);
                    off += w;
                    x
                })
                .collect()
        })
        .collect();
    StimulusSet::from_values(&widths, &values)
}

/// A random combinational netlist. Inputs are split over one to three buses;
/// gate inputs favour recent nets so that paths get deep.
pub fn random_netlist<R: Rng>(rng: &mut R, inputs: usize, gates: usize, outputs: usize) -> Netlist {
    assert!(inputs >= 1 && gates >= 1 && outputs >= 1);
    let mut b = NetlistBuilder::new("rand");
    let mut nets: Vec<NetId> = Vec::new();
    let buses = rng.random_range(1..=inputs.min(3));
    let mut left = inputs;
    for k in 0..buses {
        let w = if k + 1 == buses {
            left
        } else {
            rng.random_range(1..=left - (buses - k - 1))
        };
        left -= w;
        nets.extend(b.input_bus(&format!("i{k}"), w));
    }
    if rng.random_bool(0.3) {
        let v = rng.random_bool(0.5);
        nets.push(b.constant(v));
    }
    let mut driven = Vec::new();
    for _ in 0..gates {
        let kind = GateKind::CELLS[rng.random_range(0..GateKind::CELLS.len())];
        let ins: Vec<NetId> = (0..kind.arity())
            .map(|_| {
                if rng.random_bool(0.6) {
                    let lo = nets.len().saturating_sub(4);
                    nets[rng.random_range(lo..nets.len())]
                } else {
                    nets[rng.random_range(0..nets.len())]
                }
            })
            .collect();
        let out = b.gate(kind, &ins);
        nets.push(out);
        driven.push(out);
    }
    let mut outs: Vec<NetId> = vec![*driven.last().unwrap()];
    while outs.len() < outputs {
        outs.push(driven[rng.random_range(0..driven.len())]);
    }
    let split = rng.random_range(1..=outs.len());
    b.output_bus("y", &outs[..split]);
    if split < outs.len() {
        b.output_bus("z", &outs[split..]);
    }
    b.build().expect("random netlist is well formed")
}
