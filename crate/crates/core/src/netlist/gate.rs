use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Cell kinds understood by the parser, the timing model and the simulators.
///
/// `Input` and the constants have no input pins. `Output` is a port marker
/// kept for the timing file format; the parser never instantiates it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Input,
    Output,
    Const0,
    Const1,
    Buf,
    Inv,
    And2,
    Nand2,
    Or2,
    Nor2,
    Xor2,
    Xnor2,
    And3,
    Nand3,
    Or3,
    Nor3,
    Mux2,
}

impl GateKind {
    pub const ALL: [GateKind; 17] = [
        GateKind::Input,
        GateKind::Output,
        GateKind::Const0,
        GateKind::Const1,
        GateKind::Buf,
        GateKind::Inv,
        GateKind::And2,
        GateKind::Nand2,
        GateKind::Or2,
        GateKind::Nor2,
        GateKind::Xor2,
        GateKind::Xnor2,
        GateKind::And3,
        GateKind::Nand3,
        GateKind::Or3,
        GateKind::Nor3,
        GateKind::Mux2,
    ];

    /// Kinds that may appear as cell instantiations in a netlist file.
    pub const CELLS: [GateKind; 13] = [
        GateKind::Buf,
        GateKind::Inv,
        GateKind::And2,
        GateKind::Nand2,
        GateKind::Or2,
        GateKind::Nor2,
        GateKind::Xor2,
        GateKind::Xnor2,
        GateKind::And3,
        GateKind::Nand3,
        GateKind::Or3,
        GateKind::Nor3,
        GateKind::Mux2,
    ];

    pub fn arity(self) -> usize {
        use GateKind::*;
        match self {
            Input | Const0 | Const1 => 0,
            Output | Buf | Inv => 1,
            And2 | Nand2 | Or2 | Nor2 | Xor2 | Xnor2 => 2,
            And3 | Nand3 | Or3 | Nor3 | Mux2 => 3,
        }
    }

    /// True for kinds that carry a propagation delay.
    pub fn is_logic(self) -> bool {
        !matches!(
            self,
            GateKind::Input | GateKind::Output | GateKind::Const0 | GateKind::Const1
        )
    }

    pub fn is_const(self) -> bool {
        matches!(self, GateKind::Const0 | GateKind::Const1)
    }

    pub fn name(self) -> &'static str {
        use GateKind::*;
        match self {
            Input => "INPUT",
            Output => "OUTPUT",
            Const0 => "CONST0",
            Const1 => "CONST1",
            Buf => "BUF",
            Inv => "INV",
            And2 => "AND2",
            Nand2 => "NAND2",
            Or2 => "OR2",
            Nor2 => "NOR2",
            Xor2 => "XOR2",
            Xnor2 => "XNOR2",
            And3 => "AND3",
            Nand3 => "NAND3",
            Or3 => "OR3",
            Nor3 => "NOR3",
            Mux2 => "MUX2",
        }
    }

    /// Input pin names in pin order. The output pin is always `Y`.
    pub fn input_pins(self) -> &'static [&'static str] {
        match self.arity() {
            0 => &[],
            1 => &["A"],
            2 => &["A", "B"],
            _ if self == GateKind::Mux2 => &["A", "B", "S"],
            _ => &["A", "B", "C"],
        }
    }

    pub const OUTPUT_PIN: &'static str = "Y";

    /// Boolean evaluation. `inputs.len()` must equal the arity.
    /// `Input` has no rule of its own and evaluates to false; `Output` is identity.
    pub fn eval(self, inputs: &[bool]) -> bool {
        debug_assert_eq!(inputs.len(), self.arity());
        use GateKind::*;
        match self {
            Input | Const0 => false,
            Const1 => true,
            Output | Buf => inputs[0],
            Inv => !inputs[0],
            And2 => inputs[0] & inputs[1],
            Nand2 => !(inputs[0] & inputs[1]),
            Or2 => inputs[0] | inputs[1],
            Nor2 => !(inputs[0] | inputs[1]),
            Xor2 => inputs[0] ^ inputs[1],
            Xnor2 => !(inputs[0] ^ inputs[1]),
            And3 => inputs[0] & inputs[1] & inputs[2],
            Nand3 => !(inputs[0] & inputs[1] & inputs[2]),
            Or3 => inputs[0] | inputs[1] | inputs[2],
            Nor3 => !(inputs[0] | inputs[1] | inputs[2]),
            Mux2 => {
                if inputs[2] {
                    inputs[1]
                } else {
                    inputs[0]
                }
            }
        }
    }

    /// Word-parallel evaluation over 64 lanes.
    #[inline]
    pub fn eval_word(self, a: u64, b: u64, c: u64) -> u64 {
        use GateKind::*;
        match self {
            Input | Const0 => 0,
            Const1 => !0,
            Output | Buf => a,
            Inv => !a,
            And2 => a & b,
            Nand2 => !(a & b),
            Or2 => a | b,
            Nor2 => !(a | b),
            Xor2 => a ^ b,
            Xnor2 => !(a ^ b),
            And3 => a & b & c,
            Nand3 => !(a & b & c),
            Or3 => a | b | c,
            Nor3 => !(a | b | c),
            Mux2 => (a & !c) | (b & c),
        }
    }

    /// The output value if it is fixed regardless of the unknown (`None`) inputs.
    pub fn forced_output(self, inputs: &[Option<bool>]) -> Option<bool> {
        let unknown: Vec<usize> = (0..inputs.len()).filter(|&i| inputs[i].is_none()).collect();
        let mut buf: Vec<bool> = inputs.iter().map(|v| v.unwrap_or(false)).collect();
        let mut seen: Option<bool> = None;
        for assignment in 0u32..(1 << unknown.len()) {
            for (k, &pin) in unknown.iter().enumerate() {
                buf[pin] = assignment >> k & 1 == 1;
            }
            let v = self.eval(&buf);
            match seen {
                None => seen = Some(v),
                Some(prev) if prev != v => return None,
                _ => {}
            }
        }
        seen
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_eval_matches_scalar_eval() {
        for kind in GateKind::ALL {
            if kind == GateKind::Input {
                continue;
            }
            let n = kind.arity();
            for v in 0u32..(1 << n) {
                let bits: Vec<bool> = (0..n).map(|i| v >> i & 1 == 1).collect();
                let w = |i: usize| if bits.get(i).copied().unwrap_or(false) { !0u64 } else { 0 };
                let word = kind.eval_word(w(0), w(1), w(2));
                assert_eq!(word & 1 == 1, kind.eval(&bits), "{kind} {bits:?}");
            }
        }
    }

    #[test]
    fn forced_outputs() {
        assert_eq!(GateKind::Nand2.forced_output(&[Some(false), None]), Some(true));
        assert_eq!(GateKind::Nand2.forced_output(&[Some(true), None]), None);
        assert_eq!(GateKind::Or3.forced_output(&[None, Some(true), None]), Some(true));
        assert_eq!(GateKind::Xor2.forced_output(&[Some(true), None]), None);
        assert_eq!(GateKind::Mux2.forced_output(&[Some(true), Some(true), None]), Some(true));
        assert_eq!(GateKind::Mux2.forced_output(&[Some(true), None, Some(false)]), Some(true));
    }

    #[test]
    fn names_round_trip() {
        for kind in GateKind::ALL {
            assert_eq!(kind.name().parse::<GateKind>(), Ok(kind));
        }
        assert!("DFF".parse::<GateKind>().is_err());
    }
}
