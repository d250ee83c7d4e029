mod common;

use guardfree::bench::{generate_benchmark, BenchmarkKind};
use guardfree::netlist::{apply_rewiring, emit_netlist, parse_netlist};
use guardfree::sim::functional_simulate;
use guardfree::{GateKind, NetId, Netlist, Replacement, RewirePlan};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A plan whose wire sources sit at strictly lower logic level than their
/// targets, so every rewired edge still climbs in level.
fn random_plan<R: Rng>(rng: &mut R, n: &Netlist) -> RewirePlan {
    let levels = n.levels();
    let nets: Vec<NetId> = (0..n.nets().len() as u32).map(NetId).filter(|&i| !n.is_const_net(i)).collect();
    let mut plan = RewirePlan::new();
    let k = rng.random_range(1..=nets.len().min(6));
    for _ in 0..k {
        let target = nets[rng.random_range(0..nets.len())];
        let lt = levels[target.index()];
        let earlier: Vec<NetId> = nets.iter().copied().filter(|j| levels[j.index()] < lt).collect();
        let rep = match rng.random_range(0..3) {
            0 => Replacement::Const0,
            1 => Replacement::Const1,
            _ if earlier.is_empty() => Replacement::Const0,
            _ => Replacement::Net(earlier[rng.random_range(0..earlier.len())]),
        };
        plan.insert(target, rep);
    }
    plan
}

fn output_bits(n: &Netlist) -> Vec<NetId> {
    n.outputs().iter().flat_map(|p| p.bits.iter().copied()).collect()
}

#[test]
fn rewired_truth_table_equals_direct_substitution() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut circuits: Vec<Netlist> = ["rca4", "mul3", "addtree3x3"]
        .iter()
        .map(|k| generate_benchmark(k.parse::<BenchmarkKind>().unwrap()))
        .collect();
    for _ in 0..12 {
        let inputs = rng.random_range(2..=10);
        let gates = rng.random_range(5..=50);
        circuits.push(common::random_netlist(&mut rng, inputs, gates, 4));
    }
    for case in 0..100 {
        let n = &circuits[case % circuits.len()];
        let plan = random_plan(&mut rng, n);
        let rewired = apply_rewiring(n, &plan).unwrap();
        assert!(rewired.gate_count() <= n.gate_count());
        let s = common::exhaustive_stimuli(n);
        let t = functional_simulate(&rewired, &s).unwrap();
        let outs = output_bits(&rewired);
        for v in 0..s.len() {
            let expect = common::naive_outputs(n, &plan, &common::vector_bits(n.input_width(), v as u64));
            let got: Vec<bool> = outs.iter().map(|&o| t.bit(o, v)).collect();
            assert_eq!(got, expect, "case {case} vector {v} plan {plan:?}");
        }
    }
}

#[test]
fn rewiring_removes_dead_logic_and_folds_constants() {
    let n = generate_benchmark(BenchmarkKind::RippleCarryAdder { width: 4 });
    // tie every bit of b to 0
    let plan: RewirePlan = n.inputs()[1].bits.iter().map(|&b| (b, Replacement::Const0)).collect();
    let r = apply_rewiring(&n, &plan).unwrap();
    // no remaining gate has an output forced by its constant inputs
    for node in r.nodes().iter().filter(|x| x.kind.is_logic()) {
        let fixed: Vec<Option<bool>> = node
            .inputs
            .iter()
            .map(|&i| match r.driver(i).kind {
                GateKind::Const0 => Some(false),
                GateKind::Const1 => Some(true),
                _ => None,
            })
            .collect();
        let outs: Vec<bool> = (0..1u32 << fixed.len())
            .filter(|m| fixed.iter().enumerate().all(|(k, f)| f.is_none_or(|b| (m >> k & 1 == 1) == b)))
            .map(|m| {
                let x: Vec<bool> = (0..fixed.len()).map(|k| m >> k & 1 == 1).collect();
                common::gate_value(node.kind, &x)
            })
            .collect();
        assert!(outs.iter().any(|&o| o != outs[0]), "{node:?} is constant");
    }
    // every remaining gate reaches an output
    let dep = guardfree::timing::annotate(&r, &guardfree::CellTimingModel::nominal(), guardfree::Corner::Fresh)
        .unwrap()
        .departure();
    for node in r.nodes() {
        if node.kind.is_logic() {
            assert!(dep[node.output.index()].is_finite());
        }
    }
}

#[test]
fn empty_plan_keeps_generated_structure() {
    for k in ["rca8", "mul4", "addtree4x4"] {
        let n = generate_benchmark(k.parse().unwrap());
        let r = apply_rewiring(&n, &RewirePlan::new()).unwrap();
        assert_eq!(r.structure(), n.structure());
    }
}

#[test]
fn emitted_netlists_reparse_to_the_same_structure() {
    for k in ["rca8", "rca16", "mul4", "addtree3x5", "conv2x2"] {
        let n = generate_benchmark(k.parse().unwrap());
        let text = emit_netlist(&n);
        let back = parse_netlist(&text).unwrap();
        assert_eq!(back.structure(), n.structure(), "{k}");
        assert_eq!(emit_netlist(&back), text);
    }
}

#[test]
fn handwritten_netlist_parses() {
    let src = "
// half adder with a spare inverter
module ha (a, b, s, c);
  input a, b;
  output s, c;
  wire t;
  XOR2 U1 (.A(a), .B(b), .Y(s));
  AND2 U2 (.A(a), .B(b), .Y(t));
  BUF U3 (.A(t), .Y(c));
endmodule
";
    let n = parse_netlist(src).unwrap();
    assert_eq!(n.gate_count(), 3);
    assert_eq!(n.nodes().iter().filter(|x| x.kind == GateKind::Xor2).count(), 1);
    let s = common::exhaustive_stimuli(&n);
    let t = functional_simulate(&n, &s).unwrap();
    let (sn, cn) = (n.outputs()[0].bits[0], n.outputs()[1].bits[0]);
    for v in 0..4 {
        let (a, b) = (v & 1 == 1, v & 2 == 2);
        assert_eq!(t.bit(sn, v), a ^ b);
        assert_eq!(t.bit(cn, v), a & b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn level_respecting_plans_stay_acyclic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = common::random_netlist(&mut rng, 5, 40, 3);
        let plan = random_plan(&mut rng, &n);
        let r = apply_rewiring(&n, &plan);
        prop_assert!(r.is_ok(), "{:?}", r.err());
        let r = r.unwrap();
        prop_assert_eq!(r.topological_order().len(), r.nodes().len());
    }

    #[test]
    fn random_netlists_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = common::random_netlist(&mut rng, 6, 30, 3);
        let back = parse_netlist(&emit_netlist(&n)).unwrap();
        prop_assert_eq!(back.structure(), n.structure());
    }
}
