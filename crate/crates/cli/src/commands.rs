use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::Serialize;

use guardfree::baselines::{aps, glp, BaselineError};
use guardfree::bench::{
    generate_benchmark, records_csv, run_experiment, run_montecarlo, BenchmarkKind, BenchmarkSpec, ExperimentRecord,
};
use guardfree::candidates::{eligible_nets, extract_candidates};
use guardfree::flow::{optimize, split_stimuli, FlowError, OptimizeOptions, OptimizeReport, DEFAULT_EVAL_VECTORS, DEFAULT_OPT_VECTORS};
use guardfree::ga::{history_csv, GaError, DEFAULT_SEED};
use guardfree::metrics::{decode_outputs, nmed};
use guardfree::netlist::{emit_netlist, parse_netlist};
use guardfree::sim::{functional_simulate, generate_stimuli, input_layout, timing_simulate, Provenance};
use guardfree::timing::{annotate, derive_aged_model, AgingFactor, DEFAULT_AGING_FACTOR};
use guardfree::{
    derive_seed, CellTimingModel, Corner, Eligibility, GaConfig, Netlist, NmedVariant, OutputDecoding, OutputSpec,
    StimulusSet,
};

use crate::config::ConfigFile;
use crate::{
    BaselineArgs, BaselineMethod, CandidatesArgs, Classify, Cli, Command, CommonArgs, CornerArg, EligibilityArg,
    EvaluateArgs, ExperimentArgs, Failure, GaArgs, GenArgs, Metric, MonteCarloArgs, OptimizeArgs, Outcome, SimMode,
    SimulateArgs, StaArgs,
};

pub fn run(cli: Cli) -> Outcome<()> {
    let threads = cli.threads;
    match cli.command {
        Command::Optimize(a) => cmd_optimize(a, threads),
        Command::Sta(a) => cmd_sta(a, threads),
        Command::Simulate(a) => cmd_simulate(a, threads),
        Command::Evaluate(a) => cmd_evaluate(a, threads),
        Command::Gen(a) => cmd_gen(a),
        Command::Baseline(a) => cmd_baseline(a, threads),
        Command::Montecarlo(a) => cmd_montecarlo(a, threads),
        Command::Candidates(a) => cmd_candidates(a, threads),
        Command::Experiment(a) => cmd_experiment(a, threads),
    }
}

/// Flags merged with the config file.
struct Settings {
    cfg: ConfigFile,
    netlist: Option<PathBuf>,
    timing: Option<PathBuf>,
    aging_factor: Option<f64>,
    delay_target: Option<f64>,
    opt_vectors: usize,
    eval_vectors: usize,
    seed: u64,
    out_dir: PathBuf,
    output: OutputSpec,
    metric: Metric,
}

impl Settings {
    fn resolve(c: CommonArgs, threads: Option<usize>) -> Outcome<Self> {
        let cfg = match &c.config {
            Some(p) => ConfigFile::load(p).input()?,
            None => ConfigFile::default(),
        };
        let threads = cfg.pick(threads, "threads").input()?;
        if let Some(t) = threads {
            if t == 0 {
                return Err(Failure::Input(anyhow!("--threads must be at least 1")));
            }
            // A second build in the same process fails harmlessly (tests).
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
        let output_bus: Option<String> = cfg.pick(c.output_bus, "output-bus").input()?;
        let output = match output_bus {
            None => OutputSpec::AllPorts,
            Some(s) => {
                let buses: Vec<String> = s.split(',').map(|b| b.trim().to_string()).filter(|b| !b.is_empty()).collect();
                if buses.is_empty() {
                    return Err(Failure::Input(anyhow!("--output-bus names no bus")));
                }
                OutputSpec::Buses(buses)
            }
        };
        let seed = cfg.pick(c.seed, "seed").input()?.unwrap_or(DEFAULT_SEED);
        let s = Settings {
            netlist: cfg.pick(c.netlist, "netlist").input()?,
            timing: cfg.pick(c.timing, "timing").input()?,
            aging_factor: cfg.pick(c.aging_factor, "aging-factor").input()?,
            delay_target: cfg.pick(c.delay_target, "delay-target").input()?,
            opt_vectors: cfg.pick(c.opt_vectors, "opt-vectors").input()?.unwrap_or(DEFAULT_OPT_VECTORS),
            eval_vectors: cfg.pick(c.eval_vectors, "eval-vectors").input()?.unwrap_or(DEFAULT_EVAL_VECTORS),
            seed,
            out_dir: cfg.pick(c.out_dir, "out-dir").input()?.unwrap_or_else(|| PathBuf::from(".")),
            output,
            metric: cfg.pick(c.metric, "metric").input()?.unwrap_or(Metric::Nmed),
            cfg,
        };
        if s.opt_vectors == 0 || s.eval_vectors == 0 {
            return Err(Failure::Input(anyhow!("vector counts must be at least 1")));
        }
        if let Some(t) = s.delay_target {
            if !(t.is_finite() && t > 0.0) {
                return Err(Failure::Input(anyhow!("--delay-target must be positive, got {t}")));
            }
        }
        eprintln!("seed {}", s.seed);
        Ok(s)
    }

    fn variant(&self) -> NmedVariant {
        match self.metric {
            Metric::Nmed => NmedVariant::Standard,
            Metric::NmedLiteral => NmedVariant::Literal,
        }
    }

    fn netlist(&self) -> Outcome<Netlist> {
        let p = self
            .netlist
            .as_ref()
            .ok_or_else(|| Failure::Input(anyhow!("--netlist is required")))?;
        read_netlist(p)
    }

    /// The cell model. Without `--timing` the built-in nominal cells are used.
    /// An explicit aging factor re-derives every aged delay from the fresh
    /// one; otherwise aged columns in the file win and missing ones use the
    /// default factor.
    fn model(&self) -> Outcome<CellTimingModel> {
        let base = match &self.timing {
            None => CellTimingModel::nominal(),
            Some(p) => {
                let text = read_text(p, "timing file")?;
                CellTimingModel::parse(&text, &AgingFactor::uniform(DEFAULT_AGING_FACTOR))
                    .with_context(|| format!("in timing file {}", p.display()))
                    .input()?
            }
        };
        match self.aging_factor {
            None => Ok(base),
            Some(f) => derive_aged_model(&base, &AgingFactor::uniform(f)).input(),
        }
    }

    fn target(&self, n: &Netlist, model: &CellTimingModel) -> Outcome<f64> {
        match self.delay_target {
            Some(t) => Ok(t),
            None => Ok(annotate(n, model, Corner::Fresh).input()?.cpd()),
        }
    }

    fn eligibility(&self, flag: Option<EligibilityArg>) -> Outcome<Eligibility> {
        Ok(match self.cfg.pick(flag, "eligibility").input()? {
            None | Some(EligibilityArg::Violating) => Eligibility::Violating,
            Some(EligibilityArg::All) => Eligibility::All,
        })
    }

    /// GA parameters: defaults sized for `gates`, then file values, then flags.
    fn ga(&self, g: &GaArgs, gates: usize) -> Outcome<GaConfig> {
        let d = GaConfig::for_gate_count(gates);
        let c = &self.cfg;
        let config = GaConfig {
            population_size: c.pick(g.population, "population").input()?.unwrap_or(d.population_size),
            generations: c.pick(g.generations, "generations").input()?.unwrap_or(d.generations),
            crossover_probability: c.pick(g.crossover, "crossover").input()?.unwrap_or(d.crossover_probability),
            mutation_probability_initial: c
                .pick(g.mutation, "mutation")
                .input()?
                .unwrap_or(d.mutation_probability_initial),
            mutation_probability_max: c
                .pick(None, "mutation-max")
                .input()?
                .unwrap_or(d.mutation_probability_max),
            diversity_threshold: c
                .pick(g.diversity_threshold, "diversity-threshold")
                .input()?
                .unwrap_or(d.diversity_threshold),
            tournament_size: c.pick(None, "tournament").input()?.unwrap_or(d.tournament_size),
            elite_count: c.pick(g.elite, "elite").input()?.unwrap_or(d.elite_count),
            seed: self.seed,
            init_base_prob: c.pick(None, "init-base").input()?.unwrap_or(d.init_base_prob),
            init_critical_prob: c.pick(None, "init-critical").input()?.unwrap_or(d.init_critical_prob),
            epsilon: d.epsilon,
        };
        config.validate().input()?;
        Ok(config)
    }

    fn out_dir(&self) -> Outcome<&Path> {
        fs::create_dir_all(&self.out_dir)
            .with_context(|| format!("cannot create output directory {}", self.out_dir.display()))
            .input()?;
        Ok(&self.out_dir)
    }

    fn opt_stimuli(&self, n: &Netlist) -> StimulusSet {
        generate_stimuli(&input_layout(n), self.opt_vectors, derive_seed(&[self.seed, 1]))
    }

    fn eval_stimuli(&self, n: &Netlist, count: usize) -> StimulusSet {
        generate_stimuli(&input_layout(n), count, derive_seed(&[self.seed, 2]))
    }
}

fn read_text(p: &Path, what: &str) -> Outcome<String> {
    fs::read_to_string(p)
        .with_context(|| format!("cannot read {what} {}", p.display()))
        .input()
}

fn read_netlist(p: &Path) -> Outcome<Netlist> {
    let text = read_text(p, "netlist")?;
    parse_netlist(&text)
        .with_context(|| format!("in netlist {}", p.display()))
        .input()
}

fn read_stimuli(p: &Path, n: &Netlist) -> Outcome<StimulusSet> {
    let text = read_text(p, "stimulus file")?;
    StimulusSet::from_hex(&text, &input_layout(n), Provenance::File(p.to_path_buf()))
        .with_context(|| format!("in stimulus file {}", p.display()))
        .input()
}

fn write(path: &Path, contents: &str) -> Outcome<()> {
    fs::write(path, contents)
        .with_context(|| format!("cannot write {}", path.display()))
        .input()
}

fn to_json<T: Serialize>(v: &T) -> Outcome<String> {
    let mut s = serde_json::to_string_pretty(v).internal()?;
    s.push('\n');
    Ok(s)
}

fn flow_failure(e: FlowError) -> Failure {
    match e {
        FlowError::Ga(GaError::InvalidConfig(m)) => Failure::Input(anyhow!("invalid GA configuration: {m}")),
        FlowError::Ga(GaError::NoCriticalPathCandidates) => {
            Failure::Infeasible("no eligible net lies on the aged critical path".into())
        }
        other => Failure::Internal(other.into()),
    }
}

#[derive(Serialize)]
struct OptimizeJson<'a> {
    #[serde(flatten)]
    report: &'a OptimizeReport,
    aging_factor: Option<f64>,
    metric: NmedVariant,
    eligibility: Eligibility,
    opt_vectors: usize,
    eval_vectors: usize,
    ga: &'a GaConfig,
}

fn cmd_optimize(a: OptimizeArgs, threads: Option<usize>) -> Outcome<()> {
    let s = Settings::resolve(a.common, threads)?;
    let n = s.netlist()?;
    let model = s.model()?;
    let ga = s.ga(&a.ga, n.gate_count())?;
    let options = OptimizeOptions {
        ga: ga.clone(),
        delay_target: s.delay_target,
        opt_vectors: s.opt_vectors,
        eval_vectors: s.eval_vectors,
        eligibility: s.eligibility(a.ga.eligibility)?,
        variant: s.variant(),
    };
    let out = optimize(&n, &model, &s.output, &options).map_err(flow_failure)?;
    let dir = s.out_dir()?;
    let r = &out.report;
    write(&dir.join(format!("{}_approx.v", n.name())), &emit_netlist(&out.approx))?;
    write(&dir.join("history.csv"), &history_csv(&out.ga.history))?;
    write(&dir.join("candidates.txt"), &out.candidates.dump(&n))?;
    let json = OptimizeJson {
        report: r,
        aging_factor: s.aging_factor,
        metric: options.variant,
        eligibility: options.eligibility,
        opt_vectors: options.opt_vectors,
        eval_vectors: options.eval_vectors,
        ga: &ga,
    };
    write(&dir.join("report.json"), &to_json(&json)?)?;
    println!(
        "{}: fresh cpd {} aged cpd {} -> approx aged cpd {} (target {})",
        r.circuit, r.fresh_cpd, r.aged_cpd_baseline, r.aged_cpd_approx, r.delay_target
    );
    println!(
        "selected {} of {} candidates, nmed {:e} (aged baseline at target: {:e}), {:.1} s",
        r.selected, r.eligible_nets, r.approx.nmed, r.baseline_aged.nmed, out.runtime_s
    );
    if !r.feasible {
        return Err(Failure::Infeasible(format!(
            "best aged cpd {} exceeds target {}",
            r.aged_cpd_approx, r.delay_target
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct StaJson {
    corner: &'static str,
    cpd: f64,
    critical_path: Vec<String>,
}

fn cmd_sta(a: StaArgs, threads: Option<usize>) -> Outcome<()> {
    let s = Settings::resolve(a.common, threads)?;
    let n = s.netlist()?;
    let model = s.model()?;
    let corners: &[(CornerArg, Corner, &str)] = &[
        (CornerArg::Fresh, Corner::Fresh, "fresh"),
        (CornerArg::Aged, Corner::Aged, "aged"),
    ];
    let mut rows = Vec::new();
    for &(arg, corner, name) in corners {
        if a.corner.is_some_and(|c| c != arg) {
            continue;
        }
        let dag = annotate(&n, &model, corner).input()?;
        rows.push(StaJson {
            corner: name,
            cpd: dag.cpd(),
            critical_path: dag.critical_nets().iter().map(|&id| n.net_name(id).to_string()).collect(),
        });
    }
    if a.json {
        print!("{}", to_json(&rows)?);
    } else {
        for r in &rows {
            println!("{} cpd {}", r.corner, r.cpd);
            println!("{} path {}", r.corner, r.critical_path.join(" -> "));
        }
    }
    Ok(())
}

fn stream_csv(values: &[u128]) -> String {
    let mut out = String::from("vector,value\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{i},{v}");
    }
    out
}

fn read_stream(p: &Path) -> Outcome<Vec<u128>> {
    let text = read_text(p, "output stream")?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with("vector")) {
            continue;
        }
        let value = line.rsplit(',').next().unwrap_or(line).trim();
        let v: u128 = value
            .parse()
            .map_err(|_| Failure::Input(anyhow!("{} line {}: invalid value `{value}`", p.display(), i + 1)))?;
        out.push(v);
    }
    Ok(out)
}

fn cmd_simulate(a: SimulateArgs, threads: Option<usize>) -> Outcome<()> {
    let s = Settings::resolve(a.common, threads)?;
    let n = s.netlist()?;
    let stimuli = match &a.stimuli {
        Some(p) => read_stimuli(p, &n)?,
        None => s.eval_stimuli(&n, s.eval_vectors),
    };
    let dec = OutputDecoding::from_netlist(&n, &s.output).input()?;
    let values = match a.mode {
        SimMode::Functional => {
            let t = functional_simulate(&n, &stimuli).input()?;
            decode_outputs(&t, &dec).internal()?
        }
        SimMode::Timing => {
            let model = s.model()?;
            let clock = match a.clock.or(s.delay_target) {
                Some(c) => c,
                None => annotate(&n, &model, Corner::Fresh).input()?.cpd(),
            };
            let corner = match a.corner {
                CornerArg::Fresh => Corner::Fresh,
                CornerArg::Aged => Corner::Aged,
            };
            let dag = annotate(&n, &model, corner).input()?;
            let out = timing_simulate(&dag, &stimuli, clock).input()?;
            eprintln!("clock {clock}, {} of {} vectors unsettled", out.unsettled_count(), out.len());
            decode_outputs(&out, &dec).internal()?
        }
    };
    let csv = stream_csv(&values);
    match &a.out {
        Some(p) => write(p, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn cmd_evaluate(a: EvaluateArgs, threads: Option<usize>) -> Outcome<()> {
    let s = Settings::resolve(a.common, threads)?;
    let metrics = match (&a.golden, &a.observed, &a.approx) {
        (Some(g), Some(o), None) => {
            let width = a
                .width
                .ok_or_else(|| Failure::Input(anyhow!("--width is required when comparing streams")))?;
            if width == 0 || width > 128 {
                return Err(Failure::Input(anyhow!("--width must be in 1..=128")));
            }
            let max = if width == 128 { u128::MAX } else { (1u128 << width) - 1 };
            nmed(&read_stream(g)?, &read_stream(o)?, max, s.variant()).input()?
        }
        (None, None, Some(approx)) => {
            let n = s.netlist()?;
            let x = read_netlist(approx)?;
            let stimuli = match &a.stimuli {
                Some(p) => read_stimuli(p, &n)?,
                None => s.eval_stimuli(&n, s.eval_vectors),
            };
            let dn = OutputDecoding::from_netlist(&n, &s.output).input()?;
            let dx = OutputDecoding::from_netlist(&x, &s.output).input()?;
            if dn.width() != dx.width() {
                return Err(Failure::Input(anyhow!(
                    "output widths differ ({} vs {} bits)",
                    dn.width(),
                    dx.width()
                )));
            }
            let golden = decode_outputs(&functional_simulate(&n, &stimuli).input()?, &dn).internal()?;
            let observed = decode_outputs(&functional_simulate(&x, &stimuli).input()?, &dx).internal()?;
            nmed(&golden, &observed, dn.max_value, s.variant()).input()?
        }
        _ => {
            return Err(Failure::Input(anyhow!(
                "give either --golden and --observed, or --netlist and --approx"
            )))
        }
    };
    print!("{}", to_json(&metrics)?);
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Outcome<()> {
    let kind: BenchmarkKind = a.benchmark.parse().map_err(|e| Failure::Input(anyhow!("{e}")))?;
    if a.vectors == 0 {
        return Err(Failure::Input(anyhow!("--vectors must be at least 1")));
    }
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    eprintln!("seed {seed}");
    let n = generate_benchmark(kind);
    fs::create_dir_all(&a.out_dir)
        .with_context(|| format!("cannot create output directory {}", a.out_dir.display()))
        .input()?;
    let stimuli = generate_stimuli(&input_layout(&n), a.vectors, derive_seed(&[seed, 2]));
    write(&a.out_dir.join(format!("{}.v", n.name())), &emit_netlist(&n))?;
    write(&a.out_dir.join(format!("{}.hex", n.name())), &stimuli.to_hex())?;
    write(&a.out_dir.join("cells.timing"), &CellTimingModel::nominal().to_text())?;
    println!("{}: {} gates, {} vectors", n.name(), n.gate_count(), a.vectors);
    Ok(())
}

#[derive(Serialize)]
struct BaselineJson<'a> {
    method: &'static str,
    circuit: &'a str,
    delay_target: f64,
    aged_cpd: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pruned: Option<&'a [guardfree::baselines::PrunedNet]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncated: Option<&'a [usize]>,
    metrics: &'a guardfree::ErrorMetrics,
}

fn baseline_failure(e: BaselineError) -> Failure {
    match e {
        BaselineError::Stuck { .. } | BaselineError::Infeasible => Failure::Infeasible(e.to_string()),
        BaselineError::SearchTooLarge(_) => Failure::Input(e.into()),
        BaselineError::Pipeline(_) => Failure::Internal(e.into()),
    }
}

fn cmd_baseline(a: BaselineArgs, threads: Option<usize>) -> Outcome<()> {
    let s = Settings::resolve(a.common, threads)?;
    let n = s.netlist()?;
    let model = s.model()?;
    let target = s.target(&n, &model)?;
    let (opt, eval) = split_stimuli(&n, s.seed, s.opt_vectors, s.eval_vectors);
    let dir = s.out_dir()?;
    let (method, netlist, json) = match a.method {
        BaselineMethod::Glp => {
            let r = glp(&n, &model, target, &opt, &eval, &s.output, s.variant()).map_err(baseline_failure)?;
            let json = to_json(&BaselineJson {
                method: "glp",
                circuit: n.name(),
                delay_target: target,
                aged_cpd: r.aged_cpd,
                pruned: Some(&r.pruned),
                truncated: None,
                metrics: &r.metrics,
            })?;
            ("glp", r.netlist, json)
        }
        BaselineMethod::Aps => {
            let r = aps(&n, &model, target, &opt, &eval, &s.output, s.variant()).map_err(baseline_failure)?;
            let json = to_json(&BaselineJson {
                method: "aps",
                circuit: n.name(),
                delay_target: target,
                aged_cpd: r.aged_cpd,
                pruned: None,
                truncated: Some(&r.config.truncated),
                metrics: &r.metrics,
            })?;
            ("aps", r.netlist, json)
        }
    };
    write(&dir.join(format!("{}_{method}.v", n.name())), &emit_netlist(&netlist))?;
    write(&dir.join(format!("{method}.json")), &json)?;
    print!("{json}");
    Ok(())
}

fn cmd_montecarlo(a: MonteCarloArgs, threads: Option<usize>) -> Outcome<()> {
    let s = Settings::resolve(a.common, threads)?;
    if a.samples == 0 || a.mc_vectors == 0 {
        return Err(Failure::Input(anyhow!("--samples and --mc-vectors must be at least 1")));
    }
    if !(a.sigma.is_finite() && a.sigma > 0.0) {
        return Err(Failure::Input(anyhow!("--sigma must be positive")));
    }
    let n = s.netlist()?;
    let approx = read_netlist(&a.approx)?;
    let model = s.model()?;
    let clock = s.target(&n, &model)?;
    let stimuli = s.eval_stimuli(&n, a.mc_vectors);
    let summary = run_montecarlo(&n, &approx, &model, &stimuli, clock, a.samples, a.sigma, s.seed, &s.output)
        .map_err(|e| Failure::Internal(e.into()))?;
    let dir = s.out_dir()?;
    let mut samples = String::from("sample,baseline_nmed,approximate_nmed\n");
    for (k, (b, x)) in summary.baseline_nmed.iter().zip(&summary.approximate_nmed).enumerate() {
        let _ = writeln!(samples, "{k},{b:e},{x:e}");
    }
    write(&dir.join("montecarlo.csv"), &summary.csv())?;
    write(&dir.join("montecarlo_samples.csv"), &samples)?;
    print!("{}", summary.csv());
    Ok(())
}

fn cmd_candidates(a: CandidatesArgs, threads: Option<usize>) -> Outcome<()> {
    let s = Settings::resolve(a.common, threads)?;
    let n = s.netlist()?;
    let model = s.model()?;
    let target = s.target(&n, &model)?;
    let aged = annotate(&n, &model, Corner::Aged).input()?;
    let traces = functional_simulate(&n, &s.opt_stimuli(&n)).input()?;
    let nets = eligible_nets(&aged, target, s.eligibility(a.eligibility)?);
    let set = extract_candidates(&traces, &aged, &nets, s.seed).internal()?;
    let text = set.dump(&n);
    match &a.out {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_experiment(a: ExperimentArgs, threads: Option<usize>) -> Outcome<()> {
    let s = Settings::resolve(a.common, threads)?;
    let model = s.model()?;
    let kinds: Vec<BenchmarkKind> = a
        .benchmark
        .split(',')
        .map(|b| b.trim().parse::<BenchmarkKind>().map_err(|e| Failure::Input(anyhow!("{e}"))))
        .collect::<Outcome<_>>()?;
    let dir = s.out_dir()?.to_path_buf();
    let mut records: Vec<ExperimentRecord> = Vec::new();
    for kind in kinds {
        let mut spec = BenchmarkSpec::new(kind, s.seed);
        spec.opt_vectors = s.opt_vectors;
        spec.eval_vectors = s.eval_vectors;
        let gates = generate_benchmark(kind).gate_count();
        let ga = s.ga(&a.ga, gates)?;
        let (_, outcome, record) = run_experiment(&spec, Some(ga), &model).map_err(flow_failure)?;
        write(&dir.join(format!("{}_approx.v", kind.name())), &emit_netlist(&outcome.approx))?;
        eprintln!("{} done in {:.1} s", kind.name(), outcome.runtime_s);
        records.push(record);
    }
    let csv = records_csv(&records);
    write(&dir.join("experiment.csv"), &csv)?;
    print!("{csv}");
    Ok(())
}
