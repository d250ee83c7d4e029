use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write;

use super::{GateKind, NetId, Netlist};

fn is_plain_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
}

/// Splits `base[idx]` into its parts.
fn split_bit(s: &str) -> Option<(&str, i64)> {
    let open = s.find('[')?;
    let inner = s[open + 1..].strip_suffix(']')?;
    let idx = inner.parse().ok()?;
    let base = &s[..open];
    is_plain_ident(base).then_some((base, idx))
}

/// Emit `n` in the structural subset accepted by [`super::parse_netlist`].
///
/// Cells are ordered by logic level, then node id. Nets whose names would
/// clash with a port they are not bound to are renamed `_r<k>`.
pub fn emit_netlist(n: &Netlist) -> String {
    let port_names: HashSet<&str> = n
        .inputs()
        .iter()
        .chain(n.outputs())
        .map(|p| &*p.name)
        .collect();

    // names owned by a port bit, and the net each one is bound to
    let mut port_bits: HashMap<String, NetId> = HashMap::new();
    for p in n.inputs().iter().chain(n.outputs()) {
        for (k, &net) in p.bits.iter().enumerate() {
            port_bits.insert(p.bit_name(k), net);
        }
    }

    let mut emitted: Vec<String> = Vec::with_capacity(n.nets().len());
    let mut taken: HashSet<String> = n.nets().iter().map(|x| x.name.to_string()).collect();
    taken.extend(port_bits.keys().cloned());
    let scalar_names: HashSet<&str> = n
        .nets()
        .iter()
        .map(|x| &*x.name)
        .filter(|s| is_plain_ident(s))
        .collect();
    let mut fresh = 0usize;
    for (i, net) in n.nets().iter().enumerate() {
        let name = &*net.name;
        let ok = match port_bits.get(name) {
            Some(&bound) => bound == NetId(i as u32),
            None => {
                if is_plain_ident(name) {
                    !port_names.contains(name)
                } else if let Some((base, _)) = split_bit(name) {
                    !port_names.contains(base) && !scalar_names.contains(base)
                } else {
                    false
                }
            }
        };
        if ok {
            emitted.push(name.to_string());
        } else {
            let renamed = loop {
                let cand = format!("_r{fresh}");
                fresh += 1;
                if !taken.contains(&cand) {
                    break cand;
                }
            };
            taken.insert(renamed.clone());
            emitted.push(renamed);
        }
    }

    let mut scalar_wires: BTreeSet<&str> = BTreeSet::new();
    let mut bus_wires: BTreeMap<&str, (i64, i64)> = BTreeMap::new();
    for (i, name) in emitted.iter().enumerate() {
        if n.driver(NetId(i as u32)).kind == GateKind::Input || port_bits.contains_key(name) {
            continue;
        }
        if let Some((base, idx)) = split_bit(name) {
            let e = bus_wires.entry(base).or_insert((idx, idx));
            e.0 = e.0.max(idx);
            e.1 = e.1.min(idx);
        } else {
            scalar_wires.insert(name);
        }
    }

    let mut out = String::new();
    let header: Vec<&str> = n
        .inputs()
        .iter()
        .chain(n.outputs())
        .map(|p| &*p.name)
        .collect();
    writeln!(out, "module {} ({});", n.name(), header.join(", ")).unwrap();
    for (kw, ports) in [("input", n.inputs()), ("output", n.outputs())] {
        for p in ports {
            match p.range {
                Some((msb, lsb)) => writeln!(out, "  {kw} [{msb}:{lsb}] {};", p.name).unwrap(),
                None => writeln!(out, "  {kw} {};", p.name).unwrap(),
            }
        }
    }
    for (base, (msb, lsb)) in &bus_wires {
        writeln!(out, "  wire [{msb}:{lsb}] {base};").unwrap();
    }
    for w in &scalar_wires {
        writeln!(out, "  wire {w};").unwrap();
    }

    let levels = n.levels();
    let mut order: Vec<usize> = (0..n.nodes().len()).collect();
    order.sort_by_key(|&i| (levels[i], i));
    for i in order {
        let node = &n.nodes()[i];
        let y = &emitted[node.output.index()];
        match node.kind {
            GateKind::Input | GateKind::Output => {}
            GateKind::Const0 => writeln!(out, "  assign {y} = 1'b0;").unwrap(),
            GateKind::Const1 => writeln!(out, "  assign {y} = 1'b1;").unwrap(),
            kind => {
                let mut pins: Vec<String> = kind
                    .input_pins()
                    .iter()
                    .zip(&node.inputs)
                    .map(|(pin, net)| format!(".{pin}({})", emitted[net.index()]))
                    .collect();
                pins.push(format!(".{}({y})", GateKind::OUTPUT_PIN));
                writeln!(out, "  {kind} {} ({});", node.name, pins.join(", ")).unwrap();
            }
        }
    }
    for p in n.outputs() {
        for (k, &net) in p.bits.iter().enumerate() {
            let bit = p.bit_name(k);
            if emitted[net.index()] != bit {
                writeln!(out, "  assign {bit} = {};", emitted[net.index()]).unwrap();
            }
        }
    }
    out.push_str("endmodule\n");
    out
}
