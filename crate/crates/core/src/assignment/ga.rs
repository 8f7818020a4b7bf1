//! Binary genetic algorithm baseline.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{criterion_value, Channel, ChannelAssignment, CriterionParams, Problem, State};
use crate::hypergraph::Hypergraph;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaConfig {
    pub population: usize,
    pub max_generations: u32,
    pub max_stagnant_generations: u32,
    pub tournament_size: usize,
    pub crossover_probability: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 100,
            max_generations: 100,
            max_stagnant_generations: 20,
            tournament_size: 2,
            crossover_probability: 0.9,
        }
    }
}

struct Individual {
    genes: Vec<Channel>,
    fitness: f64,
}

fn evaluate(problem: &Problem, genes: &[Channel], params: &CriterionParams) -> f64 {
    let mut state = State::new(problem);
    for (v, ch) in genes.iter().enumerate() {
        state.assign(v, *ch);
    }
    criterion_value(state.payloads(), params)
}

fn tournament<'a>(pop: &'a [Individual], size: usize, rng: &mut ChaCha8Rng) -> &'a Individual {
    let mut best = &pop[rng.gen_range(0..pop.len())];
    for _ in 1..size {
        let other = &pop[rng.gen_range(0..pop.len())];
        if other.fitness < best.fitness {
            best = other;
        }
    }
    best
}

/// Tournament selection, uniform crossover, per-bit mutation with rate
/// `1/n` and a single elite.
pub fn solve_ga(hg: &Hypergraph, params: &CriterionParams, rng_seed: u64) -> ChannelAssignment {
    solve_ga_with(hg, params, rng_seed, &GaConfig::default())
}

pub fn solve_ga_with(hg: &Hypergraph, params: &CriterionParams, rng_seed: u64, cfg: &GaConfig) -> ChannelAssignment {
    let problem = Problem::new(hg);
    let n = problem.len();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mutation = if n == 0 { 0.0 } else { 1.0 / n as f64 };
    let random_channel = |rng: &mut ChaCha8Rng| if rng.gen::<bool>() { Channel::A } else { Channel::B };

    let mut pop: Vec<Individual> = (0..cfg.population.max(1))
        .map(|_| {
            let genes: Vec<Channel> = (0..n).map(|_| random_channel(&mut rng)).collect();
            let fitness = evaluate(&problem, &genes, params);
            Individual { genes, fitness }
        })
        .collect();
    let best_of = |pop: &[Individual]| {
        pop.iter()
            .enumerate()
            .min_by(|x, y| x.1.fitness.total_cmp(&y.1.fitness))
            .map(|(i, _)| i)
            .unwrap()
    };

    let mut best = best_of(&pop);
    let mut generation = 0;
    let mut stagnant = 0;
    while generation < cfg.max_generations && stagnant < cfg.max_stagnant_generations {
        let elite_fitness = pop[best].fitness;
        let mut next = Vec::with_capacity(pop.len());
        next.push(Individual {
            genes: pop[best].genes.clone(),
            fitness: elite_fitness,
        });
        while next.len() < pop.len() {
            let p1 = tournament(&pop, cfg.tournament_size, &mut rng);
            let p2 = tournament(&pop, cfg.tournament_size, &mut rng);
            let mut genes = if rng.gen_bool(cfg.crossover_probability) {
                p1.genes
                    .iter()
                    .zip(&p2.genes)
                    .map(|(a, b)| if rng.gen::<bool>() { *a } else { *b })
                    .collect()
            } else {
                p1.genes.clone()
            };
            for g in &mut genes {
                if rng.gen_bool(mutation) {
                    *g = g.other();
                }
            }
            let fitness = evaluate(&problem, &genes, params);
            next.push(Individual { genes, fitness });
        }
        pop = next;
        best = best_of(&pop);
        generation += 1;
        if pop[best].fitness < elite_fitness {
            stagnant = 0;
        } else {
            stagnant += 1;
        }
    }

    let sides: Vec<Option<Channel>> = pop[best].genes.iter().map(|c| Some(*c)).collect();
    problem.to_assignment(&sides, params, false)
}
