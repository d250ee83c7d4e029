//! Output decoding and error metrics (NMED and friends).
//!
//! The default NMED is `Σ|golden − observed| / (N · max)`. The literal
//! variant additionally divides every term by the golden value and skips
//! vectors whose golden value is 0.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::{NetId, Netlist};
use crate::sim::OutputSource;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("stream lengths differ ({golden} vs {observed})")]
    LengthMismatch { golden: usize, observed: usize },
    #[error("empty output stream")]
    EmptyStream,
    #[error("output net {0} not present in the simulation result")]
    UnknownNet(NetId),
    #[error("unknown output bus `{0}`")]
    UnknownBus(String),
    #[error("output decoding of {0} bits exceeds 128")]
    TooWide(usize),
    #[error("output decoding has no bits")]
    NoOutputs,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NmedVariant {
    #[default]
    Standard,
    Literal,
}

/// Which output buses form the decoded integer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum OutputSpec {
    /// All output buses concatenated in port order; the last-declared bus
    /// holds the least significant bits.
    #[default]
    AllPorts,
    /// Named buses concatenated with the same rule (last listed = LSBs).
    Buses(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputDecoding {
    pub name: String,
    /// Primary-output nets, least significant first.
    pub nets: Vec<NetId>,
    pub max_value: u128,
}

impl OutputDecoding {
    pub fn from_netlist(n: &Netlist, spec: &OutputSpec) -> Result<Self, MetricsError> {
        let ports: Vec<_> = match spec {
            OutputSpec::AllPorts => n.outputs().iter().collect(),
            OutputSpec::Buses(names) => names
                .iter()
                .map(|name| {
                    n.outputs()
                        .iter()
                        .find(|p| &*p.name == name)
                        .ok_or_else(|| MetricsError::UnknownBus(name.clone()))
                })
                .collect::<Result<_, _>>()?,
        };
        let nets: Vec<NetId> = ports
            .iter()
            .rev()
            .flat_map(|p| p.bits.iter().copied())
            .collect();
        let name = ports.iter().map(|p| &*p.name).collect::<Vec<_>>().join(",");
        Self::new(name, nets)
    }

    pub fn new(name: impl Into<String>, nets: Vec<NetId>) -> Result<Self, MetricsError> {
        let width = nets.len();
        if width == 0 {
            return Err(MetricsError::NoOutputs);
        }
        if width > 128 {
            return Err(MetricsError::TooWide(width));
        }
        let max_value = if width == 128 {
            u128::MAX
        } else {
            (1u128 << width) - 1
        };
        Ok(OutputDecoding {
            name: name.into(),
            nets,
            max_value,
        })
    }

    pub fn width(&self) -> usize {
        self.nets.len()
    }
}

/// Assemble each vector's output bits, LSB first, into an unsigned value.
pub fn decode_outputs<S: OutputSource + ?Sized>(
    source: &S,
    decoding: &OutputDecoding,
) -> Result<Vec<u128>, MetricsError> {
    let count = source.vector_count();
    let mut values = vec![0u128; count];
    for (k, &net) in decoding.nets.iter().enumerate() {
        let trace = source.trace_of(net).ok_or(MetricsError::UnknownNet(net))?;
        for (w, &word) in trace.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let lane = bits.trailing_zeros() as usize;
                let v = w * 64 + lane;
                if v < count {
                    values[v] |= 1u128 << k;
                }
                bits &= bits - 1;
            }
        }
    }
    Ok(values)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    pub nmed: f64,
    pub mean_error_distance: f64,
    /// Fraction of vectors whose decoded output differs.
    pub error_rate: f64,
    pub max_error_distance: u128,
    pub vectors: usize,
}

pub fn nmed(
    golden: &[u128],
    observed: &[u128],
    max_value: u128,
    variant: NmedVariant,
) -> Result<ErrorMetrics, MetricsError> {
    if golden.len() != observed.len() {
        return Err(MetricsError::LengthMismatch {
            golden: golden.len(),
            observed: observed.len(),
        });
    }
    if golden.is_empty() {
        return Err(MetricsError::EmptyStream);
    }
    let n = golden.len();
    let mut total: u128 = 0;
    let mut relative = 0.0f64;
    let mut wrong = 0usize;
    let mut worst: u128 = 0;
    for (&g, &o) in golden.iter().zip(observed) {
        let d = g.abs_diff(o);
        if d != 0 {
            wrong += 1;
            total = total.saturating_add(d);
            worst = worst.max(d);
            if g != 0 {
                relative += d as f64 / g as f64;
            }
        }
    }
    let max = max_value as f64;
    let nmed = match variant {
        NmedVariant::Standard => total as f64 / (n as f64 * max),
        NmedVariant::Literal => relative / (n as f64 * max),
    };
    Ok(ErrorMetrics {
        nmed,
        mean_error_distance: total as f64 / n as f64,
        error_rate: wrong as f64 / n as f64,
        max_error_distance: worst,
        vectors: n,
    })
}
