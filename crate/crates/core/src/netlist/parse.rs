//! Structural Verilog subset reader.
//!
//! Accepted: one non-ANSI module; `input`/`output`/`wire` declarations with
//! optional `[msb:lsb]` ranges; cell instantiations by named pin connection;
//! `assign` of a net, a bit-select or a `1'b0`/`1'b1` constant.
//!
//! `assign` onto an output port bit binds the port to the right-hand net
//! without adding a cell. Any other net-to-net `assign` becomes a `BUF`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use super::{GateKind, NetId, Netlist, NetlistError, Node, Port};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: unknown cell type `{cell}`")]
    UnknownCell { cell: String, line: usize },
    #[error("net `{net}` has multiple drivers")]
    MultipleDrivers { net: String },
    #[error("line {line}: undeclared net `{name}`")]
    UndeclaredNet { name: String, line: usize },
    #[error("combinational loop: {}", .0.join(" -> "))]
    CombinationalLoop(Vec<String>),
    #[error("line {line}: instance `{instance}` pin `{pin}` is unconnected")]
    UnconnectedPin {
        instance: String,
        pin: String,
        line: usize,
    },
    #[error("line {line}:{column}: expected {expected}")]
    SyntaxError {
        line: usize,
        column: usize,
        expected: String,
    },
    #[error("net `{net}` is read but never driven")]
    UndrivenNet { net: String },
    #[error(transparent)]
    Structure(NetlistError),
}

impl From<NetlistError> for ParseError {
    fn from(e: NetlistError) -> Self {
        match e {
            NetlistError::MultipleDrivers(net) => ParseError::MultipleDrivers { net },
            NetlistError::CombinationalLoop(c) => ParseError::CombinationalLoop(c),
            NetlistError::UndrivenNet(net) => ParseError::UndrivenNet { net },
            other => ParseError::Structure(other),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(i64),
    Const(bool),
    Punct(char),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, what: &str| ParseError::SyntaxError {
        line,
        column: col,
        expected: what.to_string(),
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            let (sl, sc) = (line, col);
            i += 2;
            col += 2;
            loop {
                if i + 1 >= bytes.len() {
                    return Err(err(sl, sc, "end of block comment"));
                }
                if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                    i += 2;
                    col += 2;
                    break;
                }
                if bytes[i] == b'\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
            continue;
        }
        let (tl, tc) = (line, col);
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$')
            {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let digits = &src[start..i];
            if bytes.get(i) == Some(&b'\'') {
                // sized literal: only single-bit constants are meaningful here
                i += 1;
                let base = bytes.get(i).copied().unwrap_or(0).to_ascii_lowercase();
                if !matches!(base, b'b' | b'h' | b'd' | b'o') {
                    return Err(err(tl, tc, "base specifier after '"));
                }
                i += 1;
                let vstart = i;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let value = &src[vstart..i];
                col += i - start;
                let bit = match (digits, value) {
                    ("1", "0") => false,
                    ("1", "1") => true,
                    _ => return Err(err(tl, tc, "1'b0 or 1'b1")),
                };
                out.push(Token {
                    tok: Tok::Const(bit),
                    line: tl,
                    col: tc,
                });
                continue;
            }
            col += i - start;
            let n = digits
                .parse::<i64>()
                .map_err(|_| err(tl, tc, "integer literal"))?;
            out.push(Token {
                tok: Tok::Number(n),
                line: tl,
                col: tc,
            });
            continue;
        }
        if b"()[]:;,.=".contains(&c) {
            i += 1;
            col += 1;
            out.push(Token {
                tok: Tok::Punct(c as char),
                line: tl,
                col: tc,
            });
            continue;
        }
        return Err(err(tl, tc, "identifier, number or punctuation"));
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError::SyntaxError {
            line: t.line,
            column: t.col,
            expected: expected.to_string(),
        })
    }

    fn punct(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Punct(c) {
            self.next();
            Ok(())
        } else {
            self.fail(&format!("`{c}`"))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Punct(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                let line = self.next().line;
                Ok((s, line))
            }
            _ => self.fail("identifier"),
        }
    }

    fn number(&mut self) -> Result<i64, ParseError> {
        match self.peek().tok {
            Tok::Number(n) => {
                self.next();
                Ok(n)
            }
            _ => self.fail("integer"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum DeclKind {
    Input,
    Output,
    Wire,
}

#[derive(Clone, Debug)]
struct Decl {
    kind: DeclKind,
    range: Option<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Ref {
    Bit(String),
    Const(bool),
}

struct Instance {
    cell: GateKind,
    name: String,
    pins: Vec<(String, Option<Ref>, usize)>,
    line: usize,
}

struct Module {
    name: String,
    header: Vec<String>,
    decls: BTreeMap<String, Decl>,
    instances: Vec<Instance>,
    assigns: Vec<(String, Ref, usize)>,
}

fn in_range(range: (i64, i64), idx: i64) -> bool {
    let (a, b) = range;
    idx >= a.min(b) && idx <= a.max(b)
}

fn parse_ref(cur: &mut Cursor, decls: &BTreeMap<String, Decl>) -> Result<Ref, ParseError> {
    if let Tok::Const(b) = cur.peek().tok {
        cur.next();
        return Ok(Ref::Const(b));
    }
    let (name, line) = cur.ident()?;
    let decl = decls.get(&name).ok_or_else(|| ParseError::UndeclaredNet {
        name: name.clone(),
        line,
    })?;
    if cur.eat('[') {
        let idx = cur.number()?;
        cur.punct(']')?;
        let full = format!("{name}[{idx}]");
        match decl.range {
            Some(r) if in_range(r, idx) => Ok(Ref::Bit(full)),
            _ => Err(ParseError::UndeclaredNet { name: full, line }),
        }
    } else if decl.range.is_some() {
        cur.fail(&format!("bit-select on bus `{name}`"))
    } else {
        Ok(Ref::Bit(name))
    }
}

fn parse_module(src: &str) -> Result<Module, ParseError> {
    let mut cur = Cursor {
        toks: lex(src)?,
        pos: 0,
    };
    match cur.ident()? {
        (kw, _) if kw == "module" => {}
        _ => {
            cur.pos = 0;
            return cur.fail("`module`");
        }
    }
    let (name, _) = cur.ident()?;
    let mut header = Vec::new();
    if cur.eat('(') {
        if !cur.eat(')') {
            loop {
                header.push(cur.ident()?.0);
                if cur.eat(')') {
                    break;
                }
                cur.punct(',')?;
            }
        }
    }
    cur.punct(';')?;
    let mut m = Module {
        name,
        header,
        decls: BTreeMap::new(),
        instances: Vec::new(),
        assigns: Vec::new(),
    };
    loop {
        let t = cur.peek().clone();
        let word = match &t.tok {
            Tok::Ident(w) => w.clone(),
            Tok::Eof => return cur.fail("`endmodule`"),
            _ => return cur.fail("declaration, assign or instance"),
        };
        match word.as_str() {
            "endmodule" => {
                cur.next();
                break;
            }
            "input" | "output" | "wire" => {
                cur.next();
                let kind = match word.as_str() {
                    "input" => DeclKind::Input,
                    "output" => DeclKind::Output,
                    _ => DeclKind::Wire,
                };
                let range = if cur.eat('[') {
                    let msb = cur.number()?;
                    cur.punct(':')?;
                    let lsb = cur.number()?;
                    cur.punct(']')?;
                    Some((msb, lsb))
                } else {
                    None
                };
                loop {
                    let (id, line) = cur.ident()?;
                    match m.decls.get(&id) {
                        // `output y; wire y;` style redeclaration is harmless
                        Some(prev) if kind == DeclKind::Wire && prev.range == range => {}
                        Some(_) => {
                            return Err(ParseError::SyntaxError {
                                line,
                                column: t.col,
                                expected: format!("a single declaration of `{id}`"),
                            })
                        }
                        None => {
                            m.decls.insert(id, Decl { kind, range });
                        }
                    }
                    if cur.eat(';') {
                        break;
                    }
                    cur.punct(',')?;
                }
            }
            "assign" => {
                cur.next();
                loop {
                    let line = cur.peek().line;
                    let lhs = match parse_ref(&mut cur, &m.decls)? {
                        Ref::Bit(b) => b,
                        Ref::Const(_) => return cur.fail("net on assign left-hand side"),
                    };
                    cur.punct('=')?;
                    let rhs = parse_ref(&mut cur, &m.decls)?;
                    m.assigns.push((lhs, rhs, line));
                    if cur.eat(';') {
                        break;
                    }
                    cur.punct(',')?;
                }
            }
            _ => {
                cur.next();
                let cell = word
                    .parse::<GateKind>()
                    .ok()
                    .filter(|k| k.is_logic())
                    .ok_or(ParseError::UnknownCell {
                        cell: word.clone(),
                        line: t.line,
                    })?;
                let (inst, _) = cur.ident()?;
                cur.punct('(')?;
                let mut pins = Vec::new();
                if !cur.eat(')') {
                    loop {
                        cur.punct('.')?;
                        let (pin, line) = cur.ident()?;
                        cur.punct('(')?;
                        let r = if cur.eat(')') {
                            None
                        } else {
                            let r = parse_ref(&mut cur, &m.decls)?;
                            cur.punct(')')?;
                            Some(r)
                        };
                        pins.push((pin, r, line));
                        if cur.eat(')') {
                            break;
                        }
                        cur.punct(',')?;
                    }
                }
                cur.punct(';')?;
                m.instances.push(Instance {
                    cell,
                    name: inst,
                    pins,
                    line: t.line,
                });
            }
        }
    }
    if cur.peek().tok != Tok::Eof {
        return cur.fail("end of file after `endmodule`");
    }
    Ok(m)
}

fn bit_names(name: &str, decl: &Decl) -> Vec<String> {
    match decl.range {
        None => vec![name.to_string()],
        Some((msb, lsb)) => {
            let step = if msb >= lsb { 1 } else { -1 };
            let n = (msb - lsb).abs() + 1;
            (0..n).map(|k| format!("{name}[{}]", lsb + k * step)).collect()
        }
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

struct NetTable {
    names: Vec<Arc<str>>,
    index: HashMap<String, NetId>,
}

impl NetTable {
    fn get(&mut self, name: &str) -> NetId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = NetId(self.names.len() as u32);
        self.names.push(name.into());
        self.index.insert(name.to_string(), id);
        id
    }
}

/// Parse a single-module structural netlist.
pub fn parse_netlist(source: &str) -> Result<Netlist, ParseError> {
    let m = parse_module(source)?;
    let header: HashSet<&str> = m.header.iter().map(String::as_str).collect();
    for port in &m.header {
        match m.decls.get(port) {
            Some(d) if d.kind != DeclKind::Wire => {}
            _ => {
                return Err(ParseError::UndeclaredNet {
                    name: port.clone(),
                    line: 1,
                })
            }
        }
    }
    for (name, d) in &m.decls {
        if d.kind != DeclKind::Wire && !header.contains(name.as_str()) {
            return Err(ParseError::SyntaxError {
                line: 1,
                column: 1,
                expected: format!("port `{name}` in the module header"),
            });
        }
    }
    let output_bits: HashSet<String> = m
        .decls
        .iter()
        .filter(|(_, d)| d.kind == DeclKind::Output)
        .flat_map(|(n, d)| bit_names(n, d))
        .collect();

    // Output-port aliases: `assign y = n;`
    let mut alias: HashMap<String, String> = HashMap::new();
    let mut const_assigns = Vec::new();
    let mut buf_assigns = Vec::new();
    for (lhs, rhs, line) in &m.assigns {
        match rhs {
            Ref::Const(v) => const_assigns.push((lhs.clone(), *v)),
            Ref::Bit(src) if output_bits.contains(lhs) => {
                if alias.insert(lhs.clone(), src.clone()).is_some() {
                    return Err(ParseError::MultipleDrivers { net: lhs.clone() });
                }
            }
            Ref::Bit(src) => buf_assigns.push((lhs.clone(), src.clone(), *line)),
        }
    }
    let resolve = |start: &str| -> Result<String, ParseError> {
        let mut cur = start.to_string();
        let mut trail = vec![cur.clone()];
        while let Some(next) = alias.get(&cur) {
            if trail.contains(next) {
                trail.push(next.clone());
                return Err(ParseError::CombinationalLoop(trail));
            }
            trail.push(next.clone());
            cur = next.clone();
        }
        Ok(cur)
    };

    let mut nets = NetTable {
        names: Vec::new(),
        index: HashMap::new(),
    };
    let mut nodes: Vec<Node> = Vec::new();
    let mut inputs = Vec::new();
    let mut driven: HashSet<String> = HashSet::new();
    let claim = |net: &str, driven: &mut HashSet<String>| -> Result<(), ParseError> {
        if alias.contains_key(net) || !driven.insert(net.to_string()) {
            return Err(ParseError::MultipleDrivers {
                net: net.to_string(),
            });
        }
        Ok(())
    };

    for port in &m.header {
        let d = &m.decls[port];
        if d.kind != DeclKind::Input {
            continue;
        }
        let mut bits = Vec::new();
        for b in bit_names(port, d) {
            claim(&b, &mut driven)?;
            let id = nets.get(&b);
            nodes.push(Node {
                name: b.as_str().into(),
                kind: GateKind::Input,
                inputs: Vec::new(),
                output: id,
            });
            bits.push(id);
        }
        inputs.push(Port {
            name: port.as_str().into(),
            range: d.range,
            bits,
        });
    }

    let mut pin_consts: [Option<NetId>; 2] = [None, None];
    let mut const_net = |v: bool, nets: &mut NetTable, nodes: &mut Vec<Node>| -> NetId {
        if let Some(id) = pin_consts[v as usize] {
            return id;
        }
        let base = if v { "const1" } else { "const0" };
        let mut name = base.to_string();
        let mut k = 0;
        while m.decls.contains_key(&name) || nets.index.contains_key(&name) {
            k += 1;
            name = format!("{base}_{k}");
        }
        let id = nets.get(&name);
        nodes.push(Node {
            name: name.as_str().into(),
            kind: if v { GateKind::Const1 } else { GateKind::Const0 },
            inputs: Vec::new(),
            output: id,
        });
        pin_consts[v as usize] = Some(id);
        id
    };

    let mut instance_names: HashSet<String> = HashSet::new();
    for inst in &m.instances {
        if !instance_names.insert(inst.name.clone()) {
            return Err(ParseError::SyntaxError {
                line: inst.line,
                column: 1,
                expected: format!("unique instance name (`{}` repeats)", inst.name),
            });
        }
        let mut by_pin: HashMap<&str, &Option<Ref>> = HashMap::new();
        for (pin, r, line) in &inst.pins {
            let known = pin == GateKind::OUTPUT_PIN || inst.cell.input_pins().contains(&pin.as_str());
            if !known {
                return Err(ParseError::SyntaxError {
                    line: *line,
                    column: 1,
                    expected: format!("a pin of {} (got `{pin}`)", inst.cell),
                });
            }
            if by_pin.insert(pin.as_str(), r).is_some() {
                return Err(ParseError::SyntaxError {
                    line: *line,
                    column: 1,
                    expected: format!("pin `{pin}` connected once"),
                });
            }
        }
        let unconnected = |pin: &str| ParseError::UnconnectedPin {
            instance: inst.name.clone(),
            pin: pin.to_string(),
            line: inst.line,
        };
        let mut ins = Vec::with_capacity(inst.cell.arity());
        for &pin in inst.cell.input_pins() {
            let id = match by_pin.get(pin) {
                Some(Some(Ref::Bit(b))) => nets.get(&resolve(b)?),
                Some(Some(Ref::Const(v))) => const_net(*v, &mut nets, &mut nodes),
                _ => return Err(unconnected(pin)),
            };
            ins.push(id);
        }
        let out = match by_pin.get(GateKind::OUTPUT_PIN) {
            Some(Some(Ref::Bit(b))) => b.clone(),
            Some(Some(Ref::Const(_))) => {
                return Err(ParseError::SyntaxError {
                    line: inst.line,
                    column: 1,
                    expected: "a net on output pin Y".into(),
                })
            }
            _ => return Err(unconnected(GateKind::OUTPUT_PIN)),
        };
        claim(&out, &mut driven)?;
        let out = nets.get(&out);
        nodes.push(Node {
            name: inst.name.as_str().into(),
            kind: inst.cell,
            inputs: ins,
            output: out,
        });
    }

    for (lhs, v) in const_assigns {
        claim(&lhs, &mut driven)?;
        let id = nets.get(&lhs);
        nodes.push(Node {
            name: lhs.as_str().into(),
            kind: if v { GateKind::Const1 } else { GateKind::Const0 },
            inputs: Vec::new(),
            output: id,
        });
    }
    for (lhs, src, _) in buf_assigns {
        claim(&lhs, &mut driven)?;
        let src = nets.get(&resolve(&src)?);
        let out = nets.get(&lhs);
        let mut inst = format!("assign_{}", sanitize(&lhs));
        while !instance_names.insert(inst.clone()) {
            inst.push('_');
        }
        nodes.push(Node {
            name: inst.into(),
            kind: GateKind::Buf,
            inputs: vec![src],
            output: out,
        });
    }

    let mut outputs = Vec::new();
    for port in &m.header {
        let d = &m.decls[port];
        if d.kind != DeclKind::Output {
            continue;
        }
        let mut bits = Vec::new();
        for b in bit_names(port, d) {
            bits.push(nets.get(&resolve(&b)?));
        }
        outputs.push(Port {
            name: port.as_str().into(),
            range: d.range,
            bits,
        });
    }

    for name in nets.names.iter() {
        if !driven.contains(&**name) && !pin_consts.iter().flatten().any(|&c| nets.names[c.index()] == *name) {
            return Err(ParseError::UndrivenNet {
                net: name.to_string(),
            });
        }
    }

    Ok(Netlist::new(m.name, nodes, nets.names, inputs, outputs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_inverter() {
        let n = parse_netlist("module top(a, y);\n input a;\n output y;\n INV U1 (.A(a), .Y(y));\nendmodule\n")
            .unwrap();
        assert_eq!(n.gate_count(), 1);
        assert_eq!(n.nets().len(), 2);
        assert_eq!(n.inputs().len(), 1);
        assert_eq!(n.outputs().len(), 1);
        assert_eq!(n.net_name(n.outputs()[0].bits[0]), "y");
    }

    #[test]
    fn buses_and_comments() {
        let src = r#"
// header comment
module add(a, b, s);
  input [1:0] a, b; /* two
  lines */
  output [1:0] s;
  wire c;
  XOR2 U0 (.A(a[0]), .B(b[0]), .Y(s[0]));
  AND2 U1 (.A(a[0]), .B(b[0]), .Y(c));
  XOR3 U2 (.A(a[1]), .B(b[1]), .C(c), .Y(s[1]));
endmodule
"#;
        let err = parse_netlist(src).unwrap_err();
        assert!(matches!(err, ParseError::UnknownCell { ref cell, line: 10 } if cell == "XOR3"), "{err}");
        let fixed = src.replace("XOR3 U2 (.A(a[1]), .B(b[1]), .C(c), .Y(s[1]));", "wire t;\n XOR2 U2 (.A(a[1]), .B(b[1]), .Y(t));\n XOR2 U3 (.A(t), .B(c), .Y(s[1]));");
        let n = parse_netlist(&fixed).unwrap();
        assert_eq!(n.inputs()[0].width(), 2);
        assert_eq!(n.inputs()[1].bit_name(1), "b[1]");
        assert_eq!(n.gate_count(), 4);
    }

    #[test]
    fn multiple_drivers() {
        let src = "module m(a, b, y);\n input a, b;\n output y;\n wire n3;\n INV U1 (.A(a), .Y(n3));\n INV U2 (.A(b), .Y(n3));\n BUF U3 (.A(n3), .Y(y));\nendmodule";
        assert_eq!(
            parse_netlist(src).unwrap_err(),
            ParseError::MultipleDrivers { net: "n3".into() }
        );
    }

    #[test]
    fn undeclared_net() {
        let src = "module m(a, y);\n input a;\n output y;\n INV U1 (.A(q), .Y(y));\nendmodule";
        assert_eq!(
            parse_netlist(src).unwrap_err(),
            ParseError::UndeclaredNet { name: "q".into(), line: 4 }
        );
    }

    #[test]
    fn unconnected_pin() {
        let src = "module m(a, y);\n input a;\n output y;\n NAND2 U1 (.A(a), .Y(y));\nendmodule";
        assert_eq!(
            parse_netlist(src).unwrap_err(),
            ParseError::UnconnectedPin { instance: "U1".into(), pin: "B".into(), line: 4 }
        );
    }

    #[test]
    fn combinational_loop() {
        let src = "module m(a, y);\n input a;\n output y;\n wire x;\n AND2 U1 (.A(a), .B(y), .Y(x));\n INV U2 (.A(x), .Y(y));\nendmodule";
        assert!(matches!(parse_netlist(src).unwrap_err(), ParseError::CombinationalLoop(_)));
    }

    #[test]
    fn syntax_error_position() {
        let src = "module m(a, y)\n input a;";
        match parse_netlist(src).unwrap_err() {
            ParseError::SyntaxError { line, column, expected } => {
                assert_eq!((line, column), (2, 2));
                assert_eq!(expected, "`;`");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn assigns() {
        let src = "module m(a, y, z, k);\n input a;\n output y, z, k;\n wire w;\n INV U1 (.A(a), .Y(w));\n assign y = w;\n assign z = 1'b1;\n wire v;\n assign v = a;\n AND2 U2 (.A(v), .B(1'b0), .Y(k));\nendmodule";
        let n = parse_netlist(src).unwrap();
        // y aliases w; v becomes a BUF; z and the pin constant are constant drivers
        assert_eq!(n.net_name(n.outputs()[0].bits[0]), "w");
        assert_eq!(n.driver(n.outputs()[1].bits[0]).kind, GateKind::Const1);
        assert_eq!(n.nodes().iter().filter(|x| x.kind == GateKind::Buf).count(), 1);
        assert_eq!(n.nodes().iter().filter(|x| x.kind == GateKind::Const0).count(), 1);
    }

    #[test]
    fn undriven_wire_read() {
        let src = "module m(a, y);\n input a;\n output y;\n wire u;\n AND2 U1 (.A(a), .B(u), .Y(y));\nendmodule";
        assert_eq!(parse_netlist(src).unwrap_err(), ParseError::UndrivenNet { net: "u".into() });
    }
}
