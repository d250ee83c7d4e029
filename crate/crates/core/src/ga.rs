//! Genetic search over candidate subsets.
//!
//! A chromosome has one bit per candidate; a set bit applies that candidate.
//! Fitness is 0 when the rewired netlist's aged critical path exceeds the
//! delay target, else `1 / (nmed + epsilon)`. Survival is μ+λ with explicit
//! elites, parents come from tournaments, crossover is uniform and mutation
//! flips bits independently. Every random decision for offspring `k` of
//! generation `g` comes from a stream seeded with `(seed, g, k)`, so results
//! do not depend on how many workers evaluate fitness.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidates::CandidateSet;
use crate::metrics::{decode_outputs, nmed, NmedVariant, OutputDecoding, OutputSpec};
use crate::netlist::{apply_rewiring, Netlist};
use crate::sim::{functional_simulate, StimulusSet};
use crate::timing::{annotate, AnnotatedDag, CellTimingModel, Corner};
use crate::derive_seed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaError {
    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),
    #[error("no eligible net lies on the aged critical path")]
    NoCriticalPathCandidates,
    #[error("baseline evaluation failed: {0}")]
    Baseline(String),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Chromosome {
    bits: Vec<bool>,
}

impl Chromosome {
    pub fn zeros(len: usize) -> Self {
        Chromosome {
            bits: vec![false; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Chromosome { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn hamming(&self, other: &Chromosome) -> usize {
        self.bits.iter().zip(&other.bits).filter(|(a, b)| a != b).count()
    }

    /// Parse a `0`/`1` string (bit 0 first).
    pub fn parse(text: &str) -> Option<Self> {
        text.trim()
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Chromosome::from_bits)
    }
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chromosome({self})")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_probability: f64,
    pub mutation_probability_initial: f64,
    pub mutation_probability_max: f64,
    pub diversity_threshold: f64,
    pub tournament_size: usize,
    pub elite_count: usize,
    pub seed: u64,
    pub init_base_prob: f64,
    pub init_critical_prob: f64,
    pub epsilon: f64,
}

pub const DEFAULT_SEED: u64 = 20_190_325;

/// Circuits above this many gates get the larger default population.
pub const LARGE_CIRCUIT_GATES: usize = 300;

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 64,
            generations: 100,
            crossover_probability: 0.8,
            mutation_probability_initial: 0.003,
            mutation_probability_max: 0.012,
            diversity_threshold: 0.05,
            tournament_size: 2,
            elite_count: 2,
            seed: DEFAULT_SEED,
            init_base_prob: 0.02,
            init_critical_prob: 0.5,
            epsilon: 1e-12,
        }
    }
}

impl GaConfig {
    /// Defaults sized for a circuit of `gates` logic instances.
    pub fn for_gate_count(gates: usize) -> Self {
        if gates > LARGE_CIRCUIT_GATES {
            GaConfig {
                population_size: 128,
                generations: 200,
                ..GaConfig::default()
            }
        } else {
            GaConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), GaError> {
        let bad = |m: &str| Err(GaError::InvalidConfig(m.to_string()));
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        if self.population_size < 2 {
            return bad("population_size must be at least 2");
        }
        if self.elite_count < 1 || self.elite_count >= self.population_size {
            return bad("elite_count must be in [1, population_size)");
        }
        if self.tournament_size < 2 {
            return bad("tournament_size must be at least 2");
        }
        for (name, p) in [
            ("crossover_probability", self.crossover_probability),
            ("mutation_probability_initial", self.mutation_probability_initial),
            ("mutation_probability_max", self.mutation_probability_max),
            ("diversity_threshold", self.diversity_threshold),
            ("init_base_prob", self.init_base_prob),
            ("init_critical_prob", self.init_critical_prob),
        ] {
            if !unit(p) {
                return bad(&format!("{name} must lie in [0, 1]"));
            }
        }
        if self.mutation_probability_max < self.mutation_probability_initial {
            return bad("mutation_probability_max below mutation_probability_initial");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive");
        }
        Ok(())
    }
}

/// Result of evaluating one chromosome.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    pub aged_cpd: f64,
    /// `None` when the chromosome was rejected before simulation.
    pub nmed: Option<f64>,
    pub diagnostic: Option<String>,
}

impl Evaluation {
    pub fn feasible(&self) -> bool {
        self.fitness > 0.0
    }
}

/// Fixed inputs shared by every fitness evaluation.
pub struct FitnessContext<'a> {
    pub baseline: &'a Netlist,
    pub candidates: &'a CandidateSet,
    pub model: &'a CellTimingModel,
    pub delay_target: f64,
    pub stimuli: &'a StimulusSet,
    pub output: OutputSpec,
    pub variant: NmedVariant,
    pub epsilon: f64,
    golden: Vec<u128>,
    max_value: u128,
}

impl<'a> FitnessContext<'a> {
    pub fn new(
        baseline: &'a Netlist,
        candidates: &'a CandidateSet,
        model: &'a CellTimingModel,
        delay_target: f64,
        stimuli: &'a StimulusSet,
        output: OutputSpec,
        variant: NmedVariant,
    ) -> Result<Self, GaError> {
        let fail = |e: &dyn fmt::Display| GaError::Baseline(e.to_string());
        let decoding = OutputDecoding::from_netlist(baseline, &output).map_err(|e| fail(&e))?;
        let traces = functional_simulate(baseline, stimuli).map_err(|e| fail(&e))?;
        let golden = decode_outputs(&traces, &decoding).map_err(|e| fail(&e))?;
        Ok(FitnessContext {
            baseline,
            candidates,
            model,
            delay_target,
            stimuli,
            output,
            variant,
            epsilon: GaConfig::default().epsilon,
            golden,
            max_value: decoding.max_value,
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// Exact output values of the baseline on the stimuli.
    pub fn golden(&self) -> &[u128] {
        &self.golden
    }

    pub fn aged_baseline(&self) -> Result<AnnotatedDag<'a>, GaError> {
        annotate(self.baseline, self.model, Corner::Aged).map_err(|e| GaError::Baseline(e.to_string()))
    }

    /// Rewired netlist for a chromosome.
    pub fn decode(&self, chromosome: &Chromosome) -> Result<Netlist, String> {
        apply_rewiring(self.baseline, &self.candidates.plan(chromosome.bits())).map_err(|e| e.to_string())
    }

    pub fn evaluate(&self, chromosome: &Chromosome) -> Evaluation {
        let reject = |diagnostic: String| Evaluation {
            fitness: 0.0,
            aged_cpd: f64::INFINITY,
            nmed: None,
            diagnostic: Some(diagnostic),
        };
        let rewired = match self.decode(chromosome) {
            Ok(n) => n,
            Err(e) => return reject(e),
        };
        let aged = match annotate(&rewired, self.model, Corner::Aged) {
            Ok(d) => d,
            Err(e) => return reject(e.to_string()),
        };
        let aged_cpd = aged.cpd();
        if aged_cpd > self.delay_target {
            return Evaluation {
                fitness: 0.0,
                aged_cpd,
                nmed: None,
                diagnostic: None,
            };
        }
        let observed = OutputDecoding::from_netlist(&rewired, &self.output)
            .map_err(|e| e.to_string())
            .and_then(|d| {
                let traces = functional_simulate(&rewired, self.stimuli).map_err(|e| e.to_string())?;
                decode_outputs(&traces, &d).map_err(|e| e.to_string())
            });
        let observed = match observed {
            Ok(v) => v,
            Err(e) => return reject(e),
        };
        match nmed(&self.golden, &observed, self.max_value, self.variant) {
            Ok(m) => Evaluation {
                fitness: 1.0 / (m.nmed + self.epsilon),
                aged_cpd,
                nmed: Some(m.nmed),
                diagnostic: None,
            },
            Err(e) => reject(e.to_string()),
        }
    }
}

/// Evaluate one chromosome against fixed inputs.
pub fn calc_fitness(ctx: &FitnessContext<'_>, chromosome: &Chromosome) -> Evaluation {
    ctx.evaluate(chromosome)
}

/// Chromosome bit indices whose target net lies on the aged critical path.
pub fn critical_bits(candidates: &CandidateSet, aged: &AnnotatedDag<'_>) -> Vec<usize> {
    let mut bits: Vec<usize> = aged
        .critical_nets()
        .into_iter()
        .filter_map(|net| candidates.position(net))
        .collect();
    bits.sort_unstable();
    bits.dedup();
    bits
}

const INIT_STREAM: u64 = u64::MAX;

pub fn initialize_population(
    config: &GaConfig,
    candidates: &CandidateSet,
    aged: &AnnotatedDag<'_>,
) -> Result<Vec<Chromosome>, GaError> {
    let critical = critical_bits(candidates, aged);
    if critical.is_empty() {
        return Err(GaError::NoCriticalPathCandidates);
    }
    let mut on_path = vec![false; candidates.len()];
    for &b in &critical {
        on_path[b] = true;
    }
    Ok((0..config.population_size)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[config.seed, INIT_STREAM, k as u64]));
            let mut bits: Vec<bool> = on_path
                .iter()
                .map(|&c| {
                    let p = if c { config.init_critical_prob } else { config.init_base_prob };
                    rng.random_bool(p)
                })
                .collect();
            if !critical.iter().any(|&b| bits[b]) {
                bits[critical[rng.random_range(0..critical.len())]] = true;
            }
            Chromosome::from_bits(bits)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub diversity: f64,
    pub mutation_prob: f64,
    pub best_nmed: Option<f64>,
    pub best_aged_cpd: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaResult {
    pub best: Chromosome,
    pub best_fitness: f64,
    pub best_nmed: Option<f64>,
    pub best_aged_cpd: f64,
    pub history: Vec<GenerationStats>,
    pub feasible: bool,
    /// Distinct chromosomes evaluated.
    pub evaluations: usize,
}

pub fn history_csv(history: &[GenerationStats]) -> String {
    let mut out = String::from("generation,best_fitness,mean_fitness,diversity,mutation_prob,best_nmed,best_aged_cpd\n");
    for h in history {
        let nmed = h.best_nmed.map_or(String::new(), |v| format!("{v:e}"));
        let _ = writeln!(
            out,
            "{},{:e},{:e},{},{},{},{}",
            h.generation, h.best_fitness, h.mean_fitness, h.diversity, h.mutation_prob, nmed, h.best_aged_cpd
        );
    }
    out
}

#[derive(Clone)]
struct Individual {
    chromosome: Chromosome,
    eval: Evaluation,
}

/// Total order used for ranking: best first.
fn rank(a: &Individual, b: &Individual) -> Ordering {
    b.eval
        .fitness
        .total_cmp(&a.eval.fitness)
        .then(a.chromosome.count_ones().cmp(&b.chromosome.count_ones()))
        .then(a.eval.aged_cpd.total_cmp(&b.eval.aged_cpd))
        .then(a.chromosome.cmp(&b.chromosome))
}

/// Mean pairwise Hamming distance over chromosome length, on up to 64
/// evenly spaced members of the ranked population.
fn diversity(pop: &[Individual]) -> f64 {
    const SAMPLE: usize = 64;
    let len = pop.first().map_or(0, |i| i.chromosome.len());
    if pop.len() < 2 || len == 0 {
        return 0.0;
    }
    let m = pop.len().min(SAMPLE);
    let sample: Vec<&Chromosome> = (0..m).map(|k| &pop[k * pop.len() / m].chromosome).collect();
    let mut total = 0usize;
    for a in 0..m {
        for b in a + 1..m {
            total += sample[a].hamming(sample[b]);
        }
    }
    let pairs = m * (m - 1) / 2;
    total as f64 / (pairs as f64 * len as f64)
}

struct Cache<'c, 'a> {
    ctx: &'c FitnessContext<'a>,
    seen: HashMap<Chromosome, Evaluation>,
}

impl Cache<'_, '_> {
    fn evaluate_all(&mut self, chromosomes: Vec<Chromosome>) -> Vec<Individual> {
        let mut fresh: Vec<Chromosome> = chromosomes
            .iter()
            .filter(|c| !self.seen.contains_key(*c))
            .cloned()
            .collect();
        fresh.sort();
        fresh.dedup();
        let ctx = self.ctx;
        let evals: Vec<Evaluation> = fresh.par_iter().map(|c| ctx.evaluate(c)).collect();
        self.seen.extend(fresh.into_iter().zip(evals));
        chromosomes
            .into_iter()
            .map(|c| {
                let eval = self.seen[&c].clone();
                Individual { chromosome: c, eval }
            })
            .collect()
    }
}

fn tournament<'p>(pop: &'p [Individual], size: usize, rng: &mut ChaCha8Rng) -> &'p Chromosome {
    // the population is ranked, so the lowest index is the fittest
    let best = (0..size).map(|_| rng.random_range(0..pop.len())).min().unwrap_or(0);
    &pop[best].chromosome
}

fn offspring(config: &GaConfig, pop: &[Individual], generation: usize, k: usize, mutation: f64) -> Chromosome {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[config.seed, generation as u64, k as u64]));
    let a = tournament(pop, config.tournament_size, &mut rng);
    let b = tournament(pop, config.tournament_size, &mut rng);
    let mut bits: Vec<bool> = if rng.random_bool(config.crossover_probability) {
        a.bits().iter().zip(b.bits()).map(|(&x, &y)| if rng.random_bool(0.5) { x } else { y }).collect()
    } else {
        a.bits().to_vec()
    };
    for bit in &mut bits {
        if rng.random_bool(mutation) {
            *bit = !*bit;
        }
    }
    Chromosome::from_bits(bits)
}

/// Run the search. When the unapproximated baseline already meets the delay
/// target the all-zero chromosome is optimal and returned without searching.
pub fn evolve(config: &GaConfig, ctx: &FitnessContext<'_>) -> Result<GaResult, GaError> {
    config.validate()?;
    let aged = ctx.aged_baseline()?;
    let n_bits = ctx.candidates.len();
    let mut cache = Cache {
        ctx,
        seen: HashMap::new(),
    };
    if aged.cpd() <= ctx.delay_target {
        let zero = Chromosome::zeros(n_bits);
        let ind = cache.evaluate_all(vec![zero]).remove(0);
        return Ok(GaResult {
            best: ind.chromosome,
            best_fitness: ind.eval.fitness,
            best_nmed: ind.eval.nmed,
            best_aged_cpd: ind.eval.aged_cpd,
            history: Vec::new(),
            feasible: ind.eval.feasible(),
            evaluations: 1,
        });
    }

    let initial = initialize_population(config, ctx.candidates, &aged)?;
    let mut pop = cache.evaluate_all(initial);
    pop.sort_by(rank);
    let mut mutation = config.mutation_probability_initial;
    let mut history = Vec::with_capacity(config.generations);
    let children = config.population_size - config.elite_count;

    for generation in 1..=config.generations {
        let kids: Vec<Chromosome> = (0..children)
            .map(|k| offspring(config, &pop, generation, k, mutation))
            .collect();
        let kids = cache.evaluate_all(kids);

        let mut next: Vec<Individual> = pop[..config.elite_count].to_vec();
        let mut rest: Vec<Individual> = pop[config.elite_count..].to_vec();
        rest.extend(kids);
        rest.sort_by(rank);
        rest.truncate(config.population_size - config.elite_count);
        next.extend(rest);
        next.sort_by(rank);
        pop = next;

        let div = diversity(&pop);
        let best = &pop[0];
        history.push(GenerationStats {
            generation,
            best_fitness: best.eval.fitness,
            mean_fitness: pop.iter().map(|i| i.eval.fitness).sum::<f64>() / pop.len() as f64,
            diversity: div,
            mutation_prob: mutation,
            best_nmed: best.eval.nmed,
            best_aged_cpd: best.eval.aged_cpd,
        });
        mutation = if div < config.diversity_threshold {
            (mutation * 2.0).min(config.mutation_probability_max)
        } else {
            config.mutation_probability_initial
        };
    }

    let feasible = cache.seen.values().any(Evaluation::feasible);
    let best = pop.swap_remove(0);
    Ok(GaResult {
        best: best.chromosome,
        best_fitness: best.eval.fitness,
        best_nmed: best.eval.nmed,
        best_aged_cpd: best.eval.aged_cpd,
        history,
        feasible,
        evaluations: cache.seen.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chromosome_text() {
        let c = Chromosome::parse("0110").unwrap();
        assert_eq!(c.to_string(), "0110");
        assert_eq!(c.count_ones(), 2);
        assert_eq!(c.hamming(&Chromosome::zeros(4)), 2);
        assert!(Chromosome::parse("01x").is_none());
    }

    #[test]
    fn config_validation() {
        assert!(GaConfig::default().validate().is_ok());
        let bad = GaConfig {
            elite_count: 64,
            ..GaConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = GaConfig {
            crossover_probability: 1.5,
            ..GaConfig::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(GaConfig::for_gate_count(301).population_size, 128);
        assert_eq!(GaConfig::for_gate_count(300).generations, 100);
    }

    #[test]
    fn diversity_of_identical_population_is_zero() {
        let ind = Individual {
            chromosome: Chromosome::parse("0101").unwrap(),
            eval: Evaluation {
                fitness: 1.0,
                aged_cpd: 1.0,
                nmed: Some(0.0),
                diagnostic: None,
            },
        };
        assert_eq!(diversity(&[ind.clone(), ind.clone()]), 0.0);
        let mut other = ind.clone();
        other.chromosome = Chromosome::parse("1010").unwrap();
        assert_eq!(diversity(&[ind, other]), 1.0);
    }
}
