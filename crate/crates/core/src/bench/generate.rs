//! Arithmetic benchmark generators built from XOR2/AND2/OR2 adder cells.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::netlist::{GateKind, NetId, Netlist, NetlistBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BenchmarkKind {
    RippleCarryAdder { width: usize },
    ArrayMultiplier { width: usize },
    AdderTree { inputs: usize, width: usize },
    Conv3x3 { pixel_width: usize, coeff_width: usize },
}

impl BenchmarkKind {
    pub fn name(&self) -> String {
        match *self {
            BenchmarkKind::RippleCarryAdder { width } => format!("rca{width}"),
            BenchmarkKind::ArrayMultiplier { width } => format!("mul{width}"),
            BenchmarkKind::AdderTree { inputs, width } => format!("addtree{inputs}x{width}"),
            BenchmarkKind::Conv3x3 {
                pixel_width,
                coeff_width,
            } => format!("conv{pixel_width}x{coeff_width}"),
        }
    }

    fn check(&self) -> Result<(), String> {
        let ok = match *self {
            BenchmarkKind::RippleCarryAdder { width } | BenchmarkKind::ArrayMultiplier { width } => width >= 2,
            BenchmarkKind::AdderTree { inputs, width } => inputs >= 2 && width >= 2,
            BenchmarkKind::Conv3x3 {
                pixel_width,
                coeff_width,
            } => pixel_width >= 2 && coeff_width >= 2,
        };
        let too_wide = match *self {
            BenchmarkKind::RippleCarryAdder { width } => width > 127,
            BenchmarkKind::ArrayMultiplier { width } => width > 64,
            BenchmarkKind::AdderTree { inputs, width } => width + (inputs as f64).log2().ceil() as usize > 128,
            BenchmarkKind::Conv3x3 {
                pixel_width,
                coeff_width,
            } => pixel_width + coeff_width + 4 > 128,
        };
        if !ok {
            return Err("widths must be at least 2".into());
        }
        if too_wide {
            return Err("output wider than 128 bits".into());
        }
        Ok(())
    }
}

impl fmt::Display for BenchmarkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for BenchmarkKind {
    type Err = String;

    /// `rca<w>`, `mul<w>`, `addtree<n>x<w>`, `conv<p>x<c>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        let num = |t: &str| t.parse::<usize>().map_err(|_| format!("bad benchmark `{s}`"));
        let pair = |t: &str| -> Result<(usize, usize), String> {
            let (a, b) = t.split_once('x').ok_or_else(|| format!("bad benchmark `{s}`"))?;
            Ok((num(a)?, num(b)?))
        };
        let kind = if let Some(r) = s.strip_prefix("rca") {
            BenchmarkKind::RippleCarryAdder { width: num(r)? }
        } else if let Some(r) = s.strip_prefix("mul") {
            BenchmarkKind::ArrayMultiplier { width: num(r)? }
        } else if let Some(r) = s.strip_prefix("addtree") {
            let (inputs, width) = pair(r)?;
            BenchmarkKind::AdderTree { inputs, width }
        } else if let Some(r) = s.strip_prefix("conv") {
            let (pixel_width, coeff_width) = pair(r)?;
            BenchmarkKind::Conv3x3 {
                pixel_width,
                coeff_width,
            }
        } else {
            return Err(format!("unknown benchmark `{s}` (expected rca<w>, mul<w>, addtree<n>x<w>, conv<p>x<c>)"));
        };
        kind.check()?;
        Ok(kind)
    }
}

/// A signal that may be absent (known zero) while building arithmetic.
type Bit = Option<NetId>;

fn half_adder(b: &mut NetlistBuilder, x: NetId, y: NetId) -> (NetId, NetId) {
    let s = b.gate(GateKind::Xor2, &[x, y]);
    let c = b.gate(GateKind::And2, &[x, y]);
    (s, c)
}

fn full_adder(b: &mut NetlistBuilder, x: NetId, y: NetId, cin: NetId) -> (NetId, NetId) {
    let p = b.gate(GateKind::Xor2, &[x, y]);
    let s = b.gate(GateKind::Xor2, &[p, cin]);
    let g = b.gate(GateKind::And2, &[x, y]);
    let t = b.gate(GateKind::And2, &[p, cin]);
    let c = b.gate(GateKind::Or2, &[g, t]);
    (s, c)
}

/// Ripple-carry sum of two bit vectors (LSB first); the result is one bit
/// longer than the longer operand unless no carry can occur.
fn ripple_add(b: &mut NetlistBuilder, x: &[Bit], y: &[Bit]) -> Vec<Bit> {
    let width = x.len().max(y.len());
    let mut out = Vec::with_capacity(width + 1);
    let mut carry: Bit = None;
    for k in 0..width {
        let terms: Vec<NetId> = [x.get(k).copied().flatten(), y.get(k).copied().flatten(), carry]
            .into_iter()
            .flatten()
            .collect();
        let (s, c) = match terms[..] {
            [] => (None, None),
            [t] => (Some(t), None),
            [p, q] => {
                let (s, c) = half_adder(b, p, q);
                (Some(s), Some(c))
            }
            [p, q, r] => {
                let (s, c) = full_adder(b, p, q, r);
                (Some(s), Some(c))
            }
            _ => unreachable!(),
        };
        out.push(s);
        carry = c;
    }
    if carry.is_some() {
        out.push(carry);
    }
    out
}

/// Array multiplier: AND2 partial products accumulated by ripple rows.
fn multiply(b: &mut NetlistBuilder, x: &[NetId], y: &[NetId]) -> Vec<Bit> {
    let row = |b: &mut NetlistBuilder, i: usize| -> Vec<Bit> {
        let mut r: Vec<Bit> = vec![None; i];
        r.extend(x.iter().map(|&xj| Some(b.gate(GateKind::And2, &[xj, y[i]]))));
        r
    };
    let mut acc = row(b, 0);
    for i in 1..y.len() {
        let pp = row(b, i);
        // bits below i are final; add the row to the upper part only
        let low: Vec<Bit> = acc[..i].to_vec();
        let sum = ripple_add(b, &acc[i..], &pp[i..]);
        acc = low;
        acc.extend(sum);
    }
    acc
}

/// Balanced pairwise reduction; an odd operand passes to the next level.
fn adder_tree(b: &mut NetlistBuilder, mut operands: Vec<Vec<Bit>>) -> Vec<Bit> {
    while operands.len() > 1 {
        let mut next = Vec::with_capacity(operands.len().div_ceil(2));
        let mut it = operands.into_iter();
        while let Some(x) = it.next() {
            match it.next() {
                Some(y) => next.push(ripple_add(b, &x, &y)),
                None => next.push(x),
            }
        }
        operands = next;
    }
    operands.pop().unwrap_or_default()
}

fn finish(b: &mut NetlistBuilder, name: &str, bits: &[Bit], width: usize) {
    assert!(bits.len() <= width, "result wider than its port");
    let nets: Vec<NetId> = (0..width)
        .map(|k| match bits.get(k).copied().flatten() {
            Some(n) => n,
            None => b.constant(false),
        })
        .collect();
    b.output_bus(name, &nets);
}

fn some(bits: &[NetId]) -> Vec<Bit> {
    bits.iter().copied().map(Some).collect()
}

/// Output width of a circuit (the maximum result always fits).
pub fn output_width(kind: BenchmarkKind) -> usize {
    match kind {
        BenchmarkKind::RippleCarryAdder { width } => width + 1,
        BenchmarkKind::ArrayMultiplier { width } => 2 * width,
        BenchmarkKind::AdderTree { inputs, width } => {
            width + (usize::BITS - (inputs - 1).leading_zeros()) as usize
        }
        BenchmarkKind::Conv3x3 {
            pixel_width,
            coeff_width,
        } => pixel_width + coeff_width + 4,
    }
}

/// Build the gate-level circuit for a benchmark kind.
///
/// Ports: `a`, `b` for adders and multipliers (output `s` / `p`); `x0..` for
/// adder trees (output `s`); pixels `p0..p8` followed by coefficients
/// `c0..c8` for the convolution (output `y`).
pub fn generate_benchmark(kind: BenchmarkKind) -> Netlist {
    kind.check().expect("valid benchmark parameters");
    let mut b = NetlistBuilder::new(kind.name());
    let width = output_width(kind);
    match kind {
        BenchmarkKind::RippleCarryAdder { width: w } => {
            let x = b.input_bus("a", w);
            let y = b.input_bus("b", w);
            let s = ripple_add(&mut b, &some(&x), &some(&y));
            finish(&mut b, "s", &s, width);
        }
        BenchmarkKind::ArrayMultiplier { width: w } => {
            let x = b.input_bus("a", w);
            let y = b.input_bus("b", w);
            let p = multiply(&mut b, &x, &y);
            finish(&mut b, "p", &p, width);
        }
        BenchmarkKind::AdderTree { inputs, width: w } => {
            let ops: Vec<Vec<Bit>> = (0..inputs).map(|k| some(&b.input_bus(&format!("x{k}"), w))).collect();
            let s = adder_tree(&mut b, ops);
            finish(&mut b, "s", &s, width);
        }
        BenchmarkKind::Conv3x3 {
            pixel_width,
            coeff_width,
        } => {
            let px: Vec<Vec<NetId>> = (0..9).map(|k| b.input_bus(&format!("p{k}"), pixel_width)).collect();
            let cf: Vec<Vec<NetId>> = (0..9).map(|k| b.input_bus(&format!("c{k}"), coeff_width)).collect();
            let products: Vec<Vec<Bit>> = px.iter().zip(&cf).map(|(p, c)| multiply(&mut b, p, c)).collect();
            let y = adder_tree(&mut b, products);
            finish(&mut b, "y", &y, width);
        }
    }
    b.build().expect("generated netlists are well formed")
}

/// Exact integer result for a benchmark given its input bus values in port order.
pub fn reference_output(kind: BenchmarkKind, inputs: &[u128]) -> u128 {
    match kind {
        BenchmarkKind::RippleCarryAdder { .. } => inputs[0] + inputs[1],
        BenchmarkKind::ArrayMultiplier { .. } => inputs[0] * inputs[1],
        BenchmarkKind::AdderTree { .. } => inputs.iter().sum(),
        BenchmarkKind::Conv3x3 { .. } => (0..9).map(|k| inputs[k] * inputs[9 + k]).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in ["rca8", "mul4", "addtree4x8", "conv8x4"] {
            assert_eq!(s.parse::<BenchmarkKind>().unwrap().name(), s);
        }
        assert!("rca1".parse::<BenchmarkKind>().is_err());
        assert!("fft8".parse::<BenchmarkKind>().is_err());
    }

    #[test]
    fn rca8_gate_count() {
        // one half adder and seven full adders
        let n = generate_benchmark(BenchmarkKind::RippleCarryAdder { width: 8 });
        assert_eq!(n.gate_count(), 2 + 7 * 5);
        assert_eq!(n.outputs()[0].width(), 9);
    }

    #[test]
    fn adder_tree_width() {
        assert_eq!(output_width(BenchmarkKind::AdderTree { inputs: 4, width: 8 }), 10);
        assert_eq!(output_width(BenchmarkKind::AdderTree { inputs: 9, width: 8 }), 12);
        assert_eq!(output_width(BenchmarkKind::AdderTree { inputs: 2, width: 8 }), 9);
    }
}
