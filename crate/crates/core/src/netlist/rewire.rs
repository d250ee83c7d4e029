use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{GateKind, NetId, Netlist, NetlistError, Node, Port};

/// What a rewired net's consumers read instead of its original driver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Replacement {
    Const0,
    Const1,
    Net(NetId),
}

impl Replacement {
    pub fn constant(value: bool) -> Self {
        if value {
            Replacement::Const1
        } else {
            Replacement::Const0
        }
    }

    pub fn is_const(self) -> bool {
        !matches!(self, Replacement::Net(_))
    }
}

/// Target net → replacement. A `BTreeMap` so no target can appear twice.
pub type RewirePlan = BTreeMap<NetId, Replacement>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewireError {
    #[error("rewiring target {0} does not exist")]
    UnknownTarget(NetId),
    #[error("replacement source {0} does not exist")]
    UnknownSource(NetId),
    #[error("rewiring introduced a cycle: {}", .0.join(" -> "))]
    CycleIntroduced(Vec<String>),
    #[error(transparent)]
    Structure(#[from] NetlistError),
}

/// Redirect every reader of each target net (cells and output ports) to its
/// replacement, then propagate constants to a fixpoint and drop logic with no
/// path to a primary output. Primary inputs and output declarations survive.
///
/// Replacements are not chained: if `i -> j` and `j -> k`, readers of `i`
/// read the signal produced by `j`'s own driver.
pub fn apply_rewiring(n: &Netlist, plan: &RewirePlan) -> Result<Netlist, RewireError> {
    let net_count = n.nets().len();
    for (&target, &rep) in plan {
        if target.index() >= net_count {
            return Err(RewireError::UnknownTarget(target));
        }
        if let Replacement::Net(src) = rep {
            if src.index() >= net_count {
                return Err(RewireError::UnknownSource(src));
            }
        }
    }

    let mut nodes: Vec<Node> = n.nodes().to_vec();
    let mut names: Vec<Arc<str>> = n.nets().iter().map(|x| x.name.clone()).collect();
    let mut const_nets: [Option<NetId>; 2] = [None, None];
    let mut read = |net: NetId, nodes: &mut Vec<Node>, names: &mut Vec<Arc<str>>| -> NetId {
        match plan.get(&net) {
            None => net,
            Some(Replacement::Net(src)) => *src,
            Some(rep) => {
                let v = *rep == Replacement::Const1;
                *const_nets[v as usize].get_or_insert_with(|| {
                    let base = if v { "const1" } else { "const0" };
                    let mut name = base.to_string();
                    let mut k = 0;
                    while names.iter().any(|x| **x == *name) {
                        k += 1;
                        name = format!("{base}_{k}");
                    }
                    let id = NetId(names.len() as u32);
                    names.push(name.as_str().into());
                    nodes.push(Node {
                        name: name.into(),
                        kind: if v { GateKind::Const1 } else { GateKind::Const0 },
                        inputs: Vec::new(),
                        output: id,
                    });
                    id
                })
            }
        }
    };

    if !plan.is_empty() {
        for i in 0..nodes.len() {
            for p in 0..nodes[i].inputs.len() {
                let old = nodes[i].inputs[p];
                let new = read(old, &mut nodes, &mut names);
                nodes[i].inputs[p] = new;
            }
        }
    }
    let mut outputs: Vec<Port> = n.outputs().to_vec();
    if !plan.is_empty() {
        for port in &mut outputs {
            for bit in &mut port.bits {
                *bit = read(*bit, &mut nodes, &mut names);
            }
        }
    }

    // Driver per net, then a topological order of the rewired graph.
    let mut driver = vec![usize::MAX; names.len()];
    for (i, node) in nodes.iter().enumerate() {
        driver[node.output.index()] = i;
    }
    let order = match topo(&nodes, &driver) {
        Some(o) => o,
        None => {
            let err = Netlist::new(
                n.name(),
                nodes,
                names,
                n.inputs().to_vec(),
                outputs,
            )
            .err();
            return Err(match err {
                Some(NetlistError::CombinationalLoop(c)) => RewireError::CycleIntroduced(c),
                Some(e) => RewireError::Structure(e),
                None => RewireError::CycleIntroduced(Vec::new()),
            });
        }
    };

    // One pass in topological order reaches the constant fixpoint.
    let mut value: Vec<Option<bool>> = vec![None; names.len()];
    let mut scratch: Vec<Option<bool>> = Vec::with_capacity(3);
    for &i in &order {
        let node = &nodes[i];
        let v = match node.kind {
            GateKind::Const0 => Some(false),
            GateKind::Const1 => Some(true),
            GateKind::Input | GateKind::Output => None,
            kind => {
                scratch.clear();
                scratch.extend(node.inputs.iter().map(|x| value[x.index()]));
                if scratch.iter().all(Option::is_none) {
                    None
                } else {
                    kind.forced_output(&scratch)
                }
            }
        };
        if let Some(v) = v {
            value[node.output.index()] = Some(v);
            if node.kind.is_logic() {
                let node = &mut nodes[i];
                node.kind = if v { GateKind::Const1 } else { GateKind::Const0 };
                node.inputs.clear();
            }
        }
    }

    // Liveness from primary outputs.
    let mut live = vec![false; nodes.len()];
    let mut stack: Vec<usize> = outputs
        .iter()
        .flat_map(|p| p.bits.iter().map(|b| driver[b.index()]))
        .collect();
    while let Some(i) = stack.pop() {
        if live[i] {
            continue;
        }
        live[i] = true;
        stack.extend(nodes[i].inputs.iter().map(|x| driver[x.index()]));
    }
    for (i, node) in nodes.iter().enumerate() {
        if node.kind == GateKind::Input {
            live[i] = true;
        }
    }

    // Compact, keeping relative order of surviving nodes and nets.
    let mut net_map = vec![u32::MAX; names.len()];
    let mut new_names = Vec::new();
    for (id, name) in names.into_iter().enumerate() {
        if live[driver[id]] {
            net_map[id] = new_names.len() as u32;
            new_names.push(name);
        }
    }
    let remap = |x: NetId| NetId(net_map[x.index()]);
    let new_nodes: Vec<Node> = nodes
        .into_iter()
        .zip(&live)
        .filter(|(_, &l)| l)
        .map(|(mut node, _)| {
            node.output = remap(node.output);
            for x in &mut node.inputs {
                *x = remap(*x);
            }
            node
        })
        .collect();
    let remap_ports = |ports: &[Port]| -> Vec<Port> {
        ports
            .iter()
            .map(|p| Port {
                name: p.name.clone(),
                range: p.range,
                bits: p.bits.iter().map(|&b| remap(b)).collect(),
            })
            .collect()
    };
    let inputs = remap_ports(n.inputs());
    let outputs = remap_ports(&outputs);
    Netlist::new(n.name(), new_nodes, new_names, inputs, outputs).map_err(|e| match e {
        NetlistError::CombinationalLoop(c) => RewireError::CycleIntroduced(c),
        other => RewireError::Structure(other),
    })
}

fn topo(nodes: &[Node], driver: &[usize]) -> Option<Vec<usize>> {
    let mut indegree: Vec<u32> = nodes.iter().map(|x| x.inputs.len() as u32).collect();
    let mut readers: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (i, node) in nodes.iter().enumerate() {
        for x in &node.inputs {
            readers[driver[x.index()]].push(i);
        }
    }
    let mut stack: Vec<usize> = (0..nodes.len()).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some(i) = stack.pop() {
        order.push(i);
        for &r in &readers[i] {
            indegree[r] -= 1;
            if indegree[r] == 0 {
                stack.push(r);
            }
        }
    }
    (order.len() == nodes.len()).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::super::NetlistBuilder;
    use super::*;

    #[test]
    fn empty_plan_is_identity() {
        let mut b = NetlistBuilder::new("t");
        let a = b.input_bus("a", 2);
        let x = b.gate(GateKind::Nand2, &[a[0], a[1]]);
        let y = b.gate(GateKind::Xor2, &[x, a[0]]);
        b.output_bus("y", &[y, x]);
        let n = b.build().unwrap();
        let r = apply_rewiring(&n, &RewirePlan::new()).unwrap();
        assert_eq!(r.structure(), n.structure());
    }

    #[test]
    fn nand_absorbs_zero() {
        let mut b = NetlistBuilder::new("t");
        let a = b.input_bus("a", 3);
        let w = b.gate(GateKind::Or2, &[a[1], a[2]]);
        let y = b.gate(GateKind::Nand2, &[a[0], w]);
        b.output_scalar("y", y);
        let n = b.build().unwrap();
        let plan = RewirePlan::from([(w, Replacement::Const0)]);
        let r = apply_rewiring(&n, &plan).unwrap();
        assert_eq!(r.gate_count(), 0);
        assert_eq!(r.driver(r.outputs()[0].bits[0]).kind, GateKind::Const1);
        // primary inputs are kept even when unread
        assert_eq!(r.input_width(), 3);
    }

    #[test]
    fn output_rewired_to_other_net() {
        let mut b = NetlistBuilder::new("t");
        let a = b.input_bus("a", 2);
        let x = b.gate(GateKind::And2, &[a[0], a[1]]);
        let y = b.gate(GateKind::Inv, &[x]);
        b.output_scalar("y", y);
        let n = b.build().unwrap();
        let plan = RewirePlan::from([(y, Replacement::Net(a[0]))]);
        let r = apply_rewiring(&n, &plan).unwrap();
        assert_eq!(r.gate_count(), 0);
        assert_eq!(r.net_name(r.outputs()[0].bits[0]), "a[0]");
    }

    #[test]
    fn unknown_target() {
        let mut b = NetlistBuilder::new("t");
        let a = b.input_scalar("a");
        let y = b.gate(GateKind::Inv, &[a]);
        b.output_scalar("y", y);
        let n = b.build().unwrap();
        let plan = RewirePlan::from([(NetId(99), Replacement::Const0)]);
        assert_eq!(apply_rewiring(&n, &plan).unwrap_err(), RewireError::UnknownTarget(NetId(99)));
    }

    #[test]
    fn backward_rewire_is_a_cycle() {
        let mut b = NetlistBuilder::new("t");
        let a = b.input_scalar("a");
        let x = b.gate(GateKind::Inv, &[a]);
        let y = b.gate(GateKind::Inv, &[x]);
        b.output_scalar("y", y);
        let n = b.build().unwrap();
        // readers of x would read y, which depends on x's reader
        let plan = RewirePlan::from([(x, Replacement::Net(y))]);
        assert!(matches!(apply_rewiring(&n, &plan), Err(RewireError::CycleIntroduced(_))));
    }
}
