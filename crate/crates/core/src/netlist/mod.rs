//! Gate-level combinational netlists as annotated DAGs.
//!
//! A [`Netlist`] is immutable once built: every net has exactly one driving
//! node, the graph is acyclic, and a topological order plus per-net fanout
//! lists are computed at construction time. Primary inputs are nets driven by
//! `Input` nodes; constants are nets driven by `Const0`/`Const1` nodes.

mod emit;
mod gate;
mod parse;
mod rewire;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use emit::emit_netlist;
pub use gate::GateKind;
pub use parse::{parse_netlist, ParseError};
pub use rewire::{apply_rewiring, Replacement, RewireError, RewirePlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NetId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NetId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "net#{}", self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "inst#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: Arc<str>,
    pub kind: GateKind,
    /// Input nets in pin order.
    pub inputs: Vec<NetId>,
    pub output: NetId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Net {
    pub name: Arc<str>,
    pub driver: NodeId,
}

/// A named port bus. `bits[0]` is the least significant bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Port {
    pub name: Arc<str>,
    /// Declared `[msb:lsb]` range, `None` for scalar ports.
    pub range: Option<(i64, i64)>,
    pub bits: Vec<NetId>,
}

impl Port {
    pub fn width(&self) -> usize {
        self.bits.len()
    }

    /// Verilog index of bit position `k` (LSB = 0).
    pub fn index_of(&self, k: usize) -> Option<i64> {
        self.range.map(|(msb, lsb)| {
            if msb >= lsb {
                lsb + k as i64
            } else {
                lsb - k as i64
            }
        })
    }

    /// Name of bit position `k`, e.g. `a[3]`, or the port name for scalars.
    pub fn bit_name(&self, k: usize) -> String {
        match self.index_of(k) {
            Some(idx) => format!("{}[{}]", self.name, idx),
            None => self.name.to_string(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("net `{0}` has more than one driver")]
    MultipleDrivers(String),
    #[error("net `{0}` has no driver")]
    UndrivenNet(String),
    #[error("duplicate net name `{0}`")]
    DuplicateNet(String),
    #[error("combinational loop through {}", .0.join(" -> "))]
    CombinationalLoop(Vec<String>),
    #[error("instance `{instance}` of {kind} has {got} inputs, expected {expected}")]
    ArityMismatch {
        instance: String,
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("reference to nonexistent {0}")]
    DanglingReference(String),
    #[error("primary input net `{0}` is not driven by an input node")]
    BadPrimaryInput(String),
    #[error("{0} nodes cannot be instantiated")]
    UnsupportedNode(GateKind),
}

#[derive(Clone, Debug)]
pub struct Netlist {
    name: String,
    nodes: Vec<Node>,
    nets: Vec<Net>,
    inputs: Vec<Port>,
    outputs: Vec<Port>,
    topo: Vec<NodeId>,
    fanout: Vec<Vec<NodeId>>,
}

impl Netlist {
    /// Assemble and validate a netlist. Net drivers are derived from the
    /// node list; `net_names[i]` names `NetId(i)`.
    pub fn new(
        name: impl Into<String>,
        nodes: Vec<Node>,
        net_names: Vec<Arc<str>>,
        inputs: Vec<Port>,
        outputs: Vec<Port>,
    ) -> Result<Self, NetlistError> {
        let net_count = net_names.len();
        {
            let mut seen = HashMap::with_capacity(net_count);
            for n in &net_names {
                if seen.insert(n.clone(), ()).is_some() {
                    return Err(NetlistError::DuplicateNet(n.to_string()));
                }
            }
        }
        let mut driver: Vec<Option<NodeId>> = vec![None; net_count];
        for (i, node) in nodes.iter().enumerate() {
            if node.kind == GateKind::Output {
                return Err(NetlistError::UnsupportedNode(node.kind));
            }
            if node.inputs.len() != node.kind.arity() {
                return Err(NetlistError::ArityMismatch {
                    instance: node.name.to_string(),
                    kind: node.kind,
                    expected: node.kind.arity(),
                    got: node.inputs.len(),
                });
            }
            for &net in node.inputs.iter().chain(std::iter::once(&node.output)) {
                if net.index() >= net_count {
                    return Err(NetlistError::DanglingReference(net.to_string()));
                }
            }
            let slot = &mut driver[node.output.index()];
            if slot.is_some() {
                return Err(NetlistError::MultipleDrivers(
                    net_names[node.output.index()].to_string(),
                ));
            }
            *slot = Some(NodeId(i as u32));
        }
        let mut nets = Vec::with_capacity(net_count);
        for (name, drv) in net_names.into_iter().zip(driver) {
            match drv {
                Some(d) => nets.push(Net { name, driver: d }),
                None => return Err(NetlistError::UndrivenNet(name.to_string())),
            }
        }
        for port in inputs.iter() {
            for &bit in &port.bits {
                let net = nets
                    .get(bit.index())
                    .ok_or_else(|| NetlistError::DanglingReference(bit.to_string()))?;
                if nodes[net.driver.index()].kind != GateKind::Input {
                    return Err(NetlistError::BadPrimaryInput(net.name.to_string()));
                }
            }
        }
        for port in outputs.iter() {
            for &bit in &port.bits {
                if bit.index() >= net_count {
                    return Err(NetlistError::DanglingReference(bit.to_string()));
                }
            }
        }
        let mut fanout = vec![Vec::new(); net_count];
        for (i, node) in nodes.iter().enumerate() {
            for &net in &node.inputs {
                let list: &mut Vec<NodeId> = &mut fanout[net.index()];
                if list.last() != Some(&NodeId(i as u32)) {
                    list.push(NodeId(i as u32));
                }
            }
        }
        let topo = topological_sort(&nodes, &nets)?;
        Ok(Netlist {
            name: name.into(),
            nodes,
            nets,
            inputs,
            outputs,
            topo,
            fanout,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn nets(&self) -> &[Net] {
        &self.nets
    }

    pub fn net(&self, id: NetId) -> &Net {
        &self.nets[id.index()]
    }

    pub fn net_name(&self, id: NetId) -> &str {
        &self.nets[id.index()].name
    }

    pub fn driver(&self, id: NetId) -> &Node {
        &self.nodes[self.nets[id.index()].driver.index()]
    }

    pub fn inputs(&self) -> &[Port] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Port] {
        &self.outputs
    }

    /// Nodes reading `net`, each listed once.
    pub fn fanout(&self, net: NetId) -> &[NodeId] {
        &self.fanout[net.index()]
    }

    /// Deterministic topological order over all nodes (ties by node id).
    pub fn topological_order(&self) -> &[NodeId] {
        &self.topo
    }

    pub fn net_by_name(&self, name: &str) -> Option<NetId> {
        self.nets
            .iter()
            .position(|n| &*n.name == name)
            .map(|i| NetId(i as u32))
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes
            .iter()
            .position(|n| &*n.name == name)
            .map(|i| NodeId(i as u32))
    }

    /// All primary input nets, in port order, LSB first within each port.
    pub fn input_nets(&self) -> Vec<NetId> {
        self.inputs.iter().flat_map(|p| p.bits.iter().copied()).collect()
    }

    /// All primary output nets, in port order, LSB first within each port.
    pub fn output_nets(&self) -> Vec<NetId> {
        self.outputs.iter().flat_map(|p| p.bits.iter().copied()).collect()
    }

    pub fn input_width(&self) -> usize {
        self.inputs.iter().map(Port::width).sum()
    }

    /// Number of delay-bearing gates.
    pub fn gate_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind.is_logic()).count()
    }

    pub fn is_const_net(&self, net: NetId) -> bool {
        self.driver(net).kind.is_const()
    }

    pub fn is_output_net(&self, net: NetId) -> bool {
        self.outputs.iter().any(|p| p.bits.contains(&net))
    }

    /// Longest gate-count distance from any source, per node.
    pub fn levels(&self) -> Vec<u32> {
        let mut level = vec![0u32; self.nodes.len()];
        for &id in &self.topo {
            let node = &self.nodes[id.index()];
            let l = node
                .inputs
                .iter()
                .map(|n| level[self.nets[n.index()].driver.index()] + 1)
                .max()
                .unwrap_or(0);
            level[id.index()] = l;
        }
        level
    }

    /// Name-based description used to compare netlists independently of
    /// node and net numbering.
    pub fn structure(&self) -> Structure {
        let net = |id: &NetId| self.nets[id.index()].name.to_string();
        let mut cells: Vec<CellSignature> = self
            .nodes
            .iter()
            .map(|n| CellSignature {
                kind: n.kind,
                instance: if n.kind.is_logic() {
                    n.name.to_string()
                } else {
                    String::new()
                },
                inputs: n.inputs.iter().map(net).collect(),
                output: net(&n.output),
            })
            .collect();
        cells.sort();
        let port = |p: &Port| PortSignature {
            name: p.name.to_string(),
            range: p.range,
            bits: p.bits.iter().map(net).collect(),
        };
        Structure {
            name: self.name.clone(),
            inputs: self.inputs.iter().map(port).collect(),
            outputs: self.outputs.iter().map(port).collect(),
            cells,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellSignature {
    pub kind: GateKind,
    pub instance: String,
    pub inputs: Vec<String>,
    pub output: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortSignature {
    pub name: String,
    pub range: Option<(i64, i64)>,
    pub bits: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub name: String,
    pub inputs: Vec<PortSignature>,
    pub outputs: Vec<PortSignature>,
    pub cells: Vec<CellSignature>,
}

/// Kahn's algorithm with a min-heap so ties resolve by node id.
fn topological_sort(nodes: &[Node], nets: &[Net]) -> Result<Vec<NodeId>, NetlistError> {
    let mut indegree: Vec<u32> = nodes.iter().map(|n| n.inputs.len() as u32).collect();
    let mut readers: Vec<Vec<u32>> = vec![Vec::new(); nets.len()];
    for (i, n) in nodes.iter().enumerate() {
        for &net in &n.inputs {
            readers[net.index()].push(i as u32);
        }
    }
    let mut ready: BinaryHeap<Reverse<u32>> = indegree
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == 0)
        .map(|(i, _)| Reverse(i as u32))
        .collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some(Reverse(i)) = ready.pop() {
        order.push(NodeId(i));
        for &r in &readers[nodes[i as usize].output.index()] {
            indegree[r as usize] -= 1;
            if indegree[r as usize] == 0 {
                ready.push(Reverse(r));
            }
        }
    }
    if order.len() == nodes.len() {
        return Ok(order);
    }
    // Walk backwards through unresolved nodes until one repeats.
    let start = indegree.iter().position(|&d| d > 0).unwrap();
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut walk = vec![start];
    let mut cur = start;
    loop {
        seen.insert(cur, walk.len() - 1);
        let next = nodes[cur]
            .inputs
            .iter()
            .map(|n| nets[n.index()].driver.index())
            .find(|&d| indegree[d] > 0)
            .expect("unresolved node has an unresolved predecessor");
        if let Some(&pos) = seen.get(&next) {
            let mut cycle: Vec<String> = walk[pos..]
                .iter()
                .rev()
                .map(|&i| nodes[i].name.to_string())
                .collect();
            cycle.push(cycle[0].clone());
            return Err(NetlistError::CombinationalLoop(cycle));
        }
        walk.push(next);
        cur = next;
    }
}

/// Incremental construction with automatic instance and net naming.
#[derive(Debug, Default)]
pub struct NetlistBuilder {
    name: String,
    nodes: Vec<Node>,
    nets: Vec<Arc<str>>,
    names: HashMap<Arc<str>, NetId>,
    inputs: Vec<Port>,
    outputs: Vec<Port>,
    const_nets: [Option<NetId>; 2],
    next_gate: usize,
    next_net: usize,
}

impl NetlistBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        NetlistBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    fn fresh_net(&mut self, name: String) -> NetId {
        let name: Arc<str> = name.into();
        assert!(!self.names.contains_key(&name), "duplicate net {name}");
        let id = NetId(self.nets.len() as u32);
        self.nets.push(name.clone());
        self.names.insert(name, id);
        id
    }

    /// Declare an input bus `name[width-1:0]` (scalar if `width == 1` and `scalar`).
    pub fn input_bus(&mut self, name: &str, width: usize) -> Vec<NetId> {
        let port = Port {
            name: name.into(),
            range: Some((width as i64 - 1, 0)),
            bits: Vec::new(),
        };
        self.push_input(port, width)
    }

    pub fn input_scalar(&mut self, name: &str) -> NetId {
        let port = Port {
            name: name.into(),
            range: None,
            bits: Vec::new(),
        };
        self.push_input(port, 1)[0]
    }

    fn push_input(&mut self, mut port: Port, width: usize) -> Vec<NetId> {
        let bits: Vec<NetId> = (0..width)
            .map(|k| {
                let net_name = port.bit_name(k);
                let net = self.fresh_net(net_name.clone());
                self.nodes.push(Node {
                    name: net_name.into(),
                    kind: GateKind::Input,
                    inputs: Vec::new(),
                    output: net,
                });
                net
            })
            .collect();
        port.bits = bits.clone();
        self.inputs.push(port);
        bits
    }

    /// Shared constant net.
    pub fn constant(&mut self, value: bool) -> NetId {
        if let Some(n) = self.const_nets[value as usize] {
            return n;
        }
        let name = if value { "const1" } else { "const0" };
        let net = self.fresh_net(name.to_string());
        self.nodes.push(Node {
            name: name.into(),
            kind: if value { GateKind::Const1 } else { GateKind::Const0 },
            inputs: Vec::new(),
            output: net,
        });
        self.const_nets[value as usize] = Some(net);
        net
    }

    /// Add a gate driving a freshly named internal net.
    pub fn gate(&mut self, kind: GateKind, inputs: &[NetId]) -> NetId {
        loop {
            let candidate = format!("n{}", self.next_net);
            self.next_net += 1;
            if !self.names.contains_key(candidate.as_str()) {
                return self.gate_named(kind, inputs, &candidate);
            }
        }
    }

    /// Add a gate driving a net with the given name.
    pub fn gate_named(&mut self, kind: GateKind, inputs: &[NetId], net_name: &str) -> NetId {
        assert_eq!(inputs.len(), kind.arity(), "{kind} arity");
        assert!(kind.is_logic(), "{kind} is not a cell");
        let out = self.fresh_net(net_name.to_string());
        let inst = format!("U{}", self.next_gate);
        self.next_gate += 1;
        self.nodes.push(Node {
            name: inst.into(),
            kind,
            inputs: inputs.to_vec(),
            output: out,
        });
        out
    }

    /// Declare an output bus `name[bits.len()-1:0]` bound to existing nets.
    pub fn output_bus(&mut self, name: &str, bits: &[NetId]) {
        self.outputs.push(Port {
            name: name.into(),
            range: Some((bits.len() as i64 - 1, 0)),
            bits: bits.to_vec(),
        });
    }

    pub fn output_scalar(&mut self, name: &str, bit: NetId) {
        self.outputs.push(Port {
            name: name.into(),
            range: None,
            bits: vec![bit],
        });
    }

    pub fn build(self) -> Result<Netlist, NetlistError> {
        Netlist::new(self.name, self.nodes, self.nets, self.inputs, self.outputs)
    }
}
