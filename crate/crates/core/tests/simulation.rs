mod common;


use guardfree::bench::{generate_benchmark, BenchmarkKind};
use guardfree::sim::{functional_simulate, generate_stimuli, input_layout, timing_simulate, Provenance};
use guardfree::timing::{annotate, annotate_with_delays};
use guardfree::{CellTimingModel, Corner, Netlist, RewirePlan, StimulusSet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn output_bits(n: &Netlist) -> Vec<guardfree::NetId> {
    n.outputs().iter().flat_map(|p| p.bits.iter().copied()).collect()
}

/// Packed simulation against the recursive reference on every input combination.
fn check_exhaustive(n: &Netlist) {
    let s = common::exhaustive_stimuli(n);
    let t = functional_simulate(n, &s).unwrap();
    let width = n.input_width();
    let empty = RewirePlan::new();
    let outs = output_bits(n);
    for v in 0..s.len() {
        let expect = common::naive_outputs(n, &empty, &common::vector_bits(width, v as u64));
        let got: Vec<bool> = outs.iter().map(|&o| t.bit(o, v)).collect();
        assert_eq!(got, expect, "{} vector {v}", n.name());
    }
}

fn small_generated() -> Vec<Netlist> {
    [
        "rca2", "rca3", "rca4", "rca5", "mul2", "mul3", "mul4", "mul5", "addtree2x3", "addtree3x3",
        "addtree5x2",
    ]
    .iter()
    .map(|k| generate_benchmark(k.parse::<BenchmarkKind>().unwrap()))
    .collect()
}

#[test]
fn packed_matches_naive_on_generated_circuits() {
    for n in small_generated() {
        assert!(n.input_width() <= 10);
        check_exhaustive(&n);
    }
}

#[test]
fn packed_matches_naive_on_random_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let inputs = rng.random_range(1..=10);
        let gates = rng.random_range(1..=60);
        let outputs = rng.random_range(1..=5);
        let n = common::random_netlist(&mut rng, inputs, gates, outputs);
        check_exhaustive(&n);
    }
}

#[test]
fn stimulus_columns_follow_port_order() {
    let n = generate_benchmark(BenchmarkKind::RippleCarryAdder { width: 4 });
    let s = StimulusSet::from_values(&[4, 4], &[vec![0b0011, 0b1000]]);
    let t = functional_simulate(&n, &s).unwrap();
    let sum: u32 = n.outputs()[0].bits.iter().enumerate().map(|(k, &b)| (t.bit(b, 0) as u32) << k).sum();
    assert_eq!(sum, 11);
}

#[test]
fn hex_round_trip_preserves_vectors() {
    let widths = [3, 8, 1];
    let s = generate_stimuli(&widths, 300, 9);
    let text = s.to_hex();
    let back = StimulusSet::from_hex(&text, &widths, Provenance::Explicit).unwrap();
    for v in 0..s.len() {
        for b in 0..widths.len() {
            assert_eq!(s.bus_value(b, v), back.bus_value(b, v));
        }
    }
    assert!(text.lines().all(|l| l.len() == 3));
}

#[test]
fn timed_equals_functional_once_settled() {
    let model = CellTimingModel::nominal();
    for n in small_generated() {
        let s = generate_stimuli(&input_layout(&n), 500, 3);
        let f = functional_simulate(&n, &s).unwrap();
        let dag = annotate(&n, &model, Corner::Aged).unwrap();
        let t = timing_simulate(&dag, &s, dag.cpd()).unwrap();
        assert_eq!(t.unsettled_count(), 0);
        for o in output_bits(&n) {
            for v in 0..s.len() {
                assert_eq!(t.sampled(o, v), Some(f.bit(o, v)));
            }
        }
    }
}

#[test]
fn short_clock_samples_stale_values() {
    let n = generate_benchmark(BenchmarkKind::RippleCarryAdder { width: 8 });
    let model = CellTimingModel::nominal();
    let dag = annotate(&n, &model, Corner::Aged).unwrap();
    let fresh = annotate(&n, &model, Corner::Fresh).unwrap().cpd();
    let s = generate_stimuli(&input_layout(&n), 4000, 5);
    let f = functional_simulate(&n, &s).unwrap();
    let t = timing_simulate(&dag, &s, fresh).unwrap();
    let wrong = (0..s.len())
        .filter(|&v| output_bits(&n).iter().any(|&o| t.sampled(o, v) != Some(f.bit(o, v))))
        .count();
    assert!(t.unsettled_count() > 0);
    assert!(wrong > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unsettled_count_is_non_increasing_in_clock(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = common::random_netlist(&mut rng, 6, 40, 3);
        let delays: Vec<f64> = n.nodes().iter()
            .map(|node| if node.kind.is_logic() { rng.random_range(0.1..1.0) } else { 0.0 })
            .collect();
        let dag = annotate_with_delays(&n, delays);
        let s = generate_stimuli(&input_layout(&n), 200, seed);
        let mut last = usize::MAX;
        for k in 1..=10 {
            let clock = dag.cpd() * k as f64 / 10.0;
            let t = timing_simulate(&dag, &s, clock).unwrap();
            prop_assert!(t.unsettled_count() <= last);
            last = t.unsettled_count();
        }
        prop_assert_eq!(last, 0);
    }

    #[test]
    fn functional_simulation_is_deterministic_per_seed(seed in any::<u64>(), count in 1usize..300) {
        let n = generate_benchmark(BenchmarkKind::ArrayMultiplier { width: 4 });
        let a = generate_stimuli(&input_layout(&n), count, seed);
        let b = generate_stimuli(&input_layout(&n), count, seed);
        prop_assert_eq!(&a, &b);
        let ta = functional_simulate(&n, &a).unwrap();
        let tb = functional_simulate(&n, &b).unwrap();
        for net in 0..n.nets().len() {
            let id = guardfree::NetId(net as u32);
            prop_assert_eq!(ta.trace(id), tb.trace(id));
        }
    }
}

#[test]
fn prefix_keeps_leading_vectors() {
    let s = generate_stimuli(&[5, 5], 130, 2);
    let p = s.prefix(70);
    assert_eq!(p.len(), 70);
    for v in 0..70 {
        assert_eq!(p.vector_bits(v), s.vector_bits(v));
    }
}
