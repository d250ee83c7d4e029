mod common;

use guardfree::candidates::{
    compute_activity, compute_similarity, eligible_nets, extract_candidates, select_candidates, SimilarityOptions,
};
use guardfree::netlist::{apply_rewiring, NetlistBuilder};
use guardfree::sim::{functional_simulate, generate_stimuli, input_layout};
use guardfree::timing::{annotate, annotate_with_delays};
use guardfree::{CellTimingModel, Corner, Eligibility, GateKind, NetId, Netlist, Replacement, TraceSet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: usize = 16;

/// p, q, r at t=0; g1 = BUF(p), g2 = BUF(q) at 1; g3 = AND2(g1, g2) and
/// g4 = BUF(r) at 2; target t = XOR2(g3, r) at 3.
fn fixture() -> (Netlist, Vec<f64>) {
    let mut b = NetlistBuilder::new("fx");
    let p = b.input_scalar("p");
    let q = b.input_scalar("q");
    let r = b.input_scalar("r");
    let g1 = b.gate_named(GateKind::Buf, &[p], "g1");
    let g2 = b.gate_named(GateKind::Buf, &[q], "g2");
    let g3 = b.gate_named(GateKind::And2, &[g1, g2], "g3");
    let g4 = b.gate_named(GateKind::Buf, &[r], "g4");
    let t = b.gate_named(GateKind::Xor2, &[g3, r], "t");
    b.output_scalar("t", t);
    b.output_scalar("u", g4);
    let n = b.build().unwrap();
    let delays = n
        .nodes()
        .iter()
        .map(|x| match &*x.name {
            _ if !x.kind.is_logic() => 0.0,
            _ if x.output == g4 => 2.0,
            _ => 1.0,
        })
        .collect();
    (n, delays)
}

/// A trace with ones on the first `ones` vectors.
fn first(ones: usize) -> u64 {
    (1u64 << ones) - 1
}

/// Synthetic traces: every net all-zero except the ones listed.
fn traces(n: &Netlist, set: &[(&str, u64)]) -> TraceSet {
    let mut t = vec![vec![0u64]; n.nets().len()];
    for (name, bits) in set {
        t[n.net_by_name(name).unwrap().index()] = vec![*bits];
    }
    TraceSet::from_traces(N, &t)
}

struct Case {
    name: &'static str,
    traces: Vec<(&'static str, u64)>,
    expect: Replacement,
    agreement: u64,
}

#[test]
fn selection_table() {
    let (n, delays) = fixture();
    let dag = annotate_with_delays(&n, delays);
    let id = |s: &str| n.net_by_name(s).unwrap();
    let t = id("t");
    let cases = [
        Case {
            // 14 ones; zero-trace sources agree on 2, g1 on 13
            name: "strict-max constant",
            traces: vec![("t", first(14)), ("g1", first(11))],
            expect: Replacement::Const1,
            agreement: 14,
        },
        Case {
            name: "strict-max wire",
            traces: vec![("t", first(8)), ("g3", first(7))],
            expect: Replacement::Net(id("g3")),
            agreement: 15,
        },
        Case {
            name: "constant wins a tie with a wire",
            traces: vec![("t", first(12)), ("g1", first(12) ^ 0b11 ^ (0b11 << 14))],
            expect: Replacement::Const1,
            agreement: 12,
        },
        Case {
            name: "earliest wire wins a score tie",
            traces: vec![("t", first(8)), ("g3", first(7)), ("r", first(9))],
            expect: Replacement::Net(id("r")),
            agreement: 15,
        },
        Case {
            name: "const0 wins T0 = T1",
            traces: vec![("t", first(8))],
            expect: Replacement::Const0,
            agreement: 8,
        },
        Case {
            // g4 arrives at 2 < 3 and agrees everywhere; t itself is excluded
            name: "perfect earlier wire",
            traces: vec![("t", first(5)), ("g4", first(5))],
            expect: Replacement::Net(id("g4")),
            agreement: 16,
        },
    ];
    for c in cases {
        let tr = traces(&n, &c.traces);
        let set = extract_candidates(&tr, &dag, &[t], 7).unwrap();
        let cand = set.get(t).unwrap();
        assert_eq!(cand.replacement, c.expect, "{}", c.name);
        assert_eq!(cand.agreement, c.agreement, "{}", c.name);
        assert_eq!(cand.gamma, c.agreement as f64 / N as f64, "{}", c.name);
    }
}

#[test]
fn random_tie_is_seeded_and_reproducible() {
    let (n, delays) = fixture();
    let dag = annotate_with_delays(&n, delays);
    let t = n.net_by_name("t").unwrap();
    // p, q and r all arrive at 0 and agree with t on 15 vectors
    let tr = traces(&n, &[("t", first(8)), ("p", first(7)), ("q", first(9)), ("r", first(7))]);
    let mut picks = std::collections::BTreeSet::new();
    for seed in 0..64 {
        let a = extract_candidates(&tr, &dag, &[t], seed).unwrap();
        let b = extract_candidates(&tr, &dag, &[t], seed).unwrap();
        assert_eq!(a, b);
        let Replacement::Net(j) = a.get(t).unwrap().replacement else {
            panic!("expected a wire");
        };
        assert!(["p", "q", "r"].contains(&n.net_name(j)));
        picks.insert(j);
    }
    assert_eq!(picks.len(), 3, "every tied source is reachable by some seed");
}

#[test]
fn candidate_dump_is_one_line_per_target() {
    let n = guardfree::bench::generate_benchmark("rca4".parse().unwrap());
    let model = CellTimingModel::nominal();
    let aged = annotate(&n, &model, Corner::Aged).unwrap();
    let s = generate_stimuli(&input_layout(&n), 1000, 1);
    let tr = functional_simulate(&n, &s).unwrap();
    let nets = eligible_nets(&aged, 0.0, Eligibility::All);
    let set = extract_candidates(&tr, &aged, &nets, 1).unwrap();
    let dump = set.dump(&n);
    assert_eq!(dump.lines().count(), set.len());
    for line in dump.lines() {
        let f: Vec<&str> = line.split(' ').collect();
        assert_eq!(f.len(), 3);
        assert!(n.net_by_name(f[0]).is_some());
        assert!(f[1] == "1'b0" || f[1] == "1'b1" || n.net_by_name(f[1]).is_some());
        let g: f64 = f[2].parse().unwrap();
        assert!((0.5..=1.0).contains(&g));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn candidate_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = common::random_netlist(&mut rng, 6, 40, 4);
        let model = CellTimingModel::nominal();
        let aged = annotate(&n, &model, Corner::Aged).unwrap();
        let count = rng.random_range(1..400);
        let s = generate_stimuli(&input_layout(&n), count, seed);
        let tr = functional_simulate(&n, &s).unwrap();
        let act = compute_activity(&tr).unwrap();
        for k in 0..n.nets().len() {
            let id = NetId(k as u32);
            prop_assert!((act.t0(id) + act.t1(id) - 1.0).abs() < 1e-12);
        }
        let targets = eligible_nets(&aged, aged.cpd() * 0.5, Eligibility::Violating);
        let set = extract_candidates(&tr, &aged, &targets, seed).unwrap();
        prop_assert_eq!(set.len(), targets.len());

        // pruning never changes the selection
        let full = compute_similarity(&tr, &act, &aged, &targets, SimilarityOptions { prune: false }).unwrap();
        let unpruned = select_candidates(&act, &full, aged.arrivals(), &targets, seed);
        prop_assert_eq!(&unpruned, &set);

        for c in set.iter() {
            let i = c.target;
            prop_assert!(c.agreement >= act.ones(i).max(act.zeros(i)));
            if let Replacement::Net(j) = c.replacement {
                prop_assert!(aged.arrival(j) < aged.arrival(i));
                prop_assert!(c.agreement > act.ones(i).max(act.zeros(i)));
                let direct = (0..count).filter(|&v| tr.bit(i, v) == tr.bit(j, v)).count() as u64;
                prop_assert_eq!(c.agreement, direct);
            }
        }
        // any subset of candidates rewires without a cycle
        let bits: Vec<bool> = (0..set.len()).map(|_| rng.random_bool(0.5)).collect();
        prop_assert!(apply_rewiring(&n, &set.plan(&bits)).is_ok());
        let all = vec![true; set.len()];
        prop_assert!(apply_rewiring(&n, &set.plan(&all)).is_ok());
    }
}
