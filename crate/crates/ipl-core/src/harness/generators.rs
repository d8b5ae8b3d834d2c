//! Built-in tactic generators: deterministic stand-ins for a trained model,
//! used to exercise the harness mechanics and study the search-cost
//! trade-off under controlled error rates.

use super::{last_state_in_history, TacticGenerator};
use crate::fps::{SearchTrace, TraceStep};
use crate::kernel::{enumerate_tactics, Tactic};
use crate::rng;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use rand_chacha::ChaCha12Rng;

/// Replays a clean proof script: the cursor is the number of tactic lines
/// already in the history, so the generator stays aligned with the path the
/// harness is actually on.
#[derive(Clone, Debug)]
pub struct OracleGenerator {
    lines: Vec<String>,
}

impl OracleGenerator {
    pub fn from_script(script: &[Tactic]) -> Self {
        OracleGenerator {
            lines: script.iter().map(|t| format!("{t}")).collect(),
        }
    }

    pub fn from_lines(lines: Vec<String>) -> Self {
        OracleGenerator { lines }
    }
}

fn tactic_lines_in(history: &str) -> usize {
    history
        .lines()
        .filter(|l| l.starts_with("tactic: "))
        .count()
}

impl TacticGenerator for OracleGenerator {
    fn candidates(&mut self, history: &str, _m: usize) -> Vec<String> {
        self.lines
            .get(tactic_lines_in(history))
            .cloned()
            .into_iter()
            .collect()
    }
}

/// Replays a recorded trial-and-error trace emission by emission — tactics
/// and backtrack instructions alike — ignoring the prompt.
#[derive(Clone, Debug)]
pub struct ReplayGenerator {
    emissions: Vec<String>,
    cursor: usize,
}

impl ReplayGenerator {
    pub fn from_trace(trace: &SearchTrace) -> Self {
        let emissions = trace
            .steps
            .iter()
            .filter_map(|step| match step {
                TraceStep::Apply { tactic, .. } => Some(format!("{tactic}")),
                TraceStep::Backtrack { from, to } => Some(format!(
                    "no solution, return to state {to} [that leads to state {from}]"
                )),
                TraceStep::Qed { .. } => None,
            })
            .collect();
        ReplayGenerator {
            emissions,
            cursor: 0,
        }
    }

    pub fn from_emissions(emissions: Vec<String>) -> Self {
        ReplayGenerator {
            emissions,
            cursor: 0,
        }
    }
}

impl TacticGenerator for ReplayGenerator {
    fn candidates(&mut self, _history: &str, _m: usize) -> Vec<String> {
        let out = self.emissions.get(self.cursor).cloned();
        self.cursor += 1;
        out.into_iter().collect()
    }
}

/// Test utility with fully scripted behavior.
#[derive(Clone, Debug)]
pub struct ScriptedGenerator {
    mode: ScriptedMode,
}

#[derive(Clone, Debug)]
enum ScriptedMode {
    /// Call `i` returns the `i`-th list (empty once exhausted).
    Calls { calls: Vec<Vec<String>>, cursor: usize },
    /// Every call returns the items cycled up to the requested count.
    Cycle(Vec<String>),
}

impl ScriptedGenerator {
    pub fn from_calls(calls: &[&[&str]]) -> Self {
        ScriptedGenerator {
            mode: ScriptedMode::Calls {
                calls: calls
                    .iter()
                    .map(|call| call.iter().map(|s| String::from(*s)).collect())
                    .collect(),
                cursor: 0,
            },
        }
    }

    pub fn cycling(items: &[&str]) -> Self {
        ScriptedGenerator {
            mode: ScriptedMode::Cycle(items.iter().map(|s| String::from(*s)).collect()),
        }
    }
}

impl TacticGenerator for ScriptedGenerator {
    fn candidates(&mut self, _history: &str, m: usize) -> Vec<String> {
        match &mut self.mode {
            ScriptedMode::Calls { calls, cursor } => {
                let out = calls.get(*cursor).cloned().unwrap_or_default();
                *cursor += 1;
                out
            }
            ScriptedMode::Cycle(items) => {
                if items.is_empty() {
                    return Vec::new();
                }
                (0..m).map(|i| items[i % items.len()].clone()).collect()
            }
        }
    }
}

/// Samples applicable tactics uniformly from the kernel's enumeration of the
/// current state (with replacement, so duplicates exercise the dedup path).
#[derive(Clone, Debug)]
pub struct RandomGenerator {
    rng: ChaCha12Rng,
}

impl RandomGenerator {
    pub fn with_seed(seed: u64) -> Self {
        RandomGenerator {
            rng: rng::chacha(seed),
        }
    }
}

fn applicable_tactic_texts(history: &str) -> Vec<String> {
    let Some(state) = last_state_in_history(history) else {
        return Vec::new();
    };
    if state.is_terminal() {
        return Vec::new();
    }
    enumerate_tactics(&state)
        .iter()
        .map(|t| format!("{t}"))
        .collect()
}

/// Plausible guesses for the current state: every applicable tactic plus
/// grammatical forms that frequently fail the kernel check (wrong `exact`,
/// connective mismatches). This is what the filler samples of a noisy
/// generator look like — checking and rejecting them is precisely the
/// search cost the harness measures.
fn guess_pool_texts(history: &str) -> Vec<String> {
    let Some(state) = last_state_in_history(history) else {
        return Vec::new();
    };
    if state.is_terminal() {
        return Vec::new();
    }
    let mut pool: Vec<String> = enumerate_tactics(&state)
        .iter()
        .map(|t| format!("{t}"))
        .collect();
    pool.push(String::from("apply And.intro"));
    pool.push(String::from("apply Or.inl"));
    pool.push(String::from("apply Or.inr"));
    pool.push(String::from("exact True.intro"));
    pool.push(format!("intro h{}", state.next_hyp_index));
    for goal in state.goals.first().iter() {
        for hyp in &goal.hypotheses {
            pool.push(format!("exact {}", hyp.name));
            pool.push(format!("apply False.elim {}", hyp.name));
        }
    }
    pool
}

impl TacticGenerator for RandomGenerator {
    fn candidates(&mut self, history: &str, m: usize) -> Vec<String> {
        let applicable = applicable_tactic_texts(history);
        if applicable.is_empty() {
            return Vec::new();
        }
        (0..m)
            .map(|_| applicable[rng::uniform_usize(&mut self.rng, applicable.len())].clone())
            .collect()
    }
}

/// Oracle with controlled noise: with probability `error_rate` the first
/// candidate is a uniformly random applicable tactic instead of the correct
/// one; the remaining `m − 1` slots are samples from the guess pool
/// (applicable and near-miss tactics alike, as a noisy generator would
/// produce). At `error_rate` 0 the first slot is always correct, so a DFS
/// run costs exactly the proof length; at 1 the search degenerates to random
/// search.
#[derive(Clone, Debug)]
pub struct PerturbedOracleGenerator {
    lines: Vec<String>,
    error_rate: f64,
    rng: ChaCha12Rng,
}

impl PerturbedOracleGenerator {
    pub fn new(script: &[Tactic], error_rate: f64, seed: u64) -> Self {
        PerturbedOracleGenerator {
            lines: script.iter().map(|t| format!("{t}")).collect(),
            error_rate,
            rng: rng::chacha(seed),
        }
    }
}

impl TacticGenerator for PerturbedOracleGenerator {
    fn candidates(&mut self, history: &str, m: usize) -> Vec<String> {
        let correct = self.lines.get(tactic_lines_in(history)).cloned();
        let applicable = applicable_tactic_texts(history);
        // Filler samples are alternative guesses, so they never duplicate
        // the generator's own top choice.
        let guesses: Vec<String> = guess_pool_texts(history)
            .into_iter()
            .filter(|g| Some(g) != correct.as_ref())
            .collect();
        let pick = |rng: &mut ChaCha12Rng, pool: &[String]| -> Option<String> {
            if pool.is_empty() {
                None
            } else {
                Some(pool[rng::uniform_usize(rng, pool.len())].clone())
            }
        };

        let mut out = Vec::with_capacity(m);
        let substitute = rng::next_f64(&mut self.rng) < self.error_rate;
        match correct {
            Some(line) if !substitute => out.push(line),
            _ => {
                if let Some(junk) = pick(&mut self.rng, &applicable) {
                    out.push(junk);
                }
            }
        }
        while out.len() < m {
            match pick(&mut self.rng, &guesses) {
                Some(junk) => out.push(junk),
                None => break,
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fps::{fps_search, FpsConfig};
    use crate::kernel::{initial_state, HypName};
    use crate::prop::Proposition;

    #[test]
    fn oracle_generator_follows_the_tactic_count() {
        let script = [
            Tactic::Intro(HypName(1)),
            Tactic::ApplyOrInl,
            Tactic::Exact(HypName(1)),
        ];
        let mut generator = OracleGenerator::from_script(&script);
        assert_eq!(generator.candidates("state 0:\n⊢ p1\n", 5), ["intro h1"]);
        let history = "state 0:\n⊢ x\ntactic: intro h1\nstate 1:\n⊢ y\n";
        assert_eq!(generator.candidates(history, 5), ["apply Or.inl"]);
        let deep = format!("{history}tactic: a\nstate 2:\n⊢ z\ntactic: b\nstate 3:\n⊢ w\n");
        assert!(generator.candidates(&deep, 5).is_empty());
    }

    #[test]
    fn replay_generator_emits_backtrack_instructions() {
        let theorem = Proposition::parse("p1 → p1 ∨ p2").unwrap();
        let trace = (0..64)
            .find_map(|seed| {
                fps_search(&theorem, seed, &FpsConfig::default())
                    .trace()
                    .filter(|t| t.backtrack_count() == 1)
            })
            .unwrap();
        let mut generator = ReplayGenerator::from_trace(&trace);
        let mut texts = Vec::new();
        for _ in 0..5 {
            texts.extend(generator.candidates("", 1));
        }
        assert!(texts.iter().any(|t| t.starts_with("no solution,")));
    }

    #[test]
    fn random_generator_reads_the_live_state() {
        let theorem = Proposition::parse("p1 ∧ p2 → p2").unwrap();
        let state = initial_state(&theorem);
        let history = crate::fps::trace::state_block(&state);
        let mut generator = RandomGenerator::with_seed(1);
        let out = generator.candidates(&history, 8);
        assert_eq!(out.len(), 8);
        for text in &out {
            assert_eq!(text, "intro h1");
        }
    }
}
