//! Inference harness: runs the two search regimes against the kernel with a
//! pluggable tactic generator, enforcing the step and word limits, and
//! counting kernel calls exactly.
//!
//! - [`run_dfs`]: at every new state the generator is asked once for up to
//!   `n_sampled` candidates; duplicates and ungrammatical candidates are
//!   dropped; the rest are kernel-checked in order, depth-first, returning
//!   to the parent state on exhaustion. Every kernel check counts toward
//!   `n_lean` and toward the step limit. The history the generator sees is
//!   the current path only (states and tactics, no failed attempts).
//! - [`run_tae`]: greedy protocol. The generator sees the full history —
//!   including failed branches and backtrack instructions — and emits one
//!   item; a backtrack instruction rewinds the cursor with **no kernel
//!   call**, anything else must parse as a tactic and is kernel-checked.
//!   Any kernel error (or unparseable emission) ends the attempt.
//!
//! Limits are exact boundaries: a run that finishes at exactly the step
//! limit or exactly the word limit succeeds; one past it fails. The word
//! limit is evaluated on the serialized history each time the generator is
//! about to be consulted.

pub mod generators;

pub use generators::{
    OracleGenerator, PerturbedOracleGenerator, RandomGenerator, ReplayGenerator,
    ScriptedGenerator,
};

use crate::fps::trace::{
    backtrack_line, parse_backtrack_instruction, state_block, tactic_line, word_count,
};
use crate::kernel::{apply_tactic, initial_state, parse_tactic, ProofState, Tactic, TacticResult};
use crate::prop::Proposition;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};

/// Produces candidate tactic strings from the serialized proof history.
/// Implementations own their randomness (seeded, so runs are reproducible)
/// and may return fewer than `m` items; an empty answer means the generator
/// has nothing to offer for this state.
pub trait TacticGenerator {
    fn candidates(&mut self, history: &str, m: usize) -> Vec<String>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DfsConfig {
    /// Candidates requested per new state.
    pub n_sampled: usize,
    /// Total kernel checks allowed.
    pub step_limit: u64,
    /// Word budget for the serialized current path.
    pub word_limit: u64,
}

impl Default for DfsConfig {
    fn default() -> Self {
        DfsConfig {
            n_sampled: 5,
            step_limit: 65,
            word_limit: 1500,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaeConfig {
    /// Word budget for the serialized full history.
    pub word_limit: u64,
}

impl Default for TaeConfig {
    fn default() -> Self {
        TaeConfig { word_limit: 1500 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FailureReason {
    /// A kernel error ended the attempt (or the emission was unusable).
    LeanError,
    /// The serialized history outgrew the word limit.
    WordLimit,
    /// The attempt exceeded the step limit.
    StepLimit,
    /// Every candidate for the initial state was explored and failed.
    Exhausted,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FailureReason::LeanError => "lean-error",
            FailureReason::WordLimit => "word-limit",
            FailureReason::StepLimit => "step-limit",
            FailureReason::Exhausted => "exhausted",
        };
        f.write_str(name)
    }
}

/// Outcome of one search attempt. `n_lean` counts the kernel tactic checks
/// exactly; `steps` counts protocol iterations (for DFS both are the same
/// quantity — a step is a kernel check).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub success: bool,
    pub n_lean: u64,
    pub steps: u64,
    pub failure_reason: Option<FailureReason>,
}

impl SearchOutcome {
    fn success(n_lean: u64, steps: u64) -> Self {
        SearchOutcome {
            success: true,
            n_lean,
            steps,
            failure_reason: None,
        }
    }

    fn failure(reason: FailureReason, n_lean: u64, steps: u64) -> Self {
        SearchOutcome {
            success: false,
            n_lean,
            steps,
            failure_reason: Some(reason),
        }
    }
}

/// Depth-first search over generator candidates.
pub fn run_dfs(
    theorem: &Proposition,
    generator: &mut dyn TacticGenerator,
    config: &DfsConfig,
) -> SearchOutcome {
    struct Level {
        state: ProofState,
        candidates: Vec<Tactic>,
        next: usize,
        /// History length to restore when this level is abandoned.
        history_len: usize,
    }

    let mut n_lean: u64 = 0;
    let mut history = state_block(&initial_state(theorem));
    let mut stack: Vec<Level> = Vec::new();

    // Requests, filters and dedups candidates for a newly entered state.
    let enter =
        |state: ProofState, history: &str, generator: &mut dyn TacticGenerator| -> Level {
            let mut seen_texts: Vec<String> = Vec::new();
            let mut candidates = Vec::new();
            for text in generator.candidates(history, config.n_sampled) {
                let trimmed = String::from(text.trim());
                if seen_texts.contains(&trimmed) {
                    continue;
                }
                seen_texts.push(trimmed.clone());
                if let Ok(tactic) = parse_tactic(&trimmed) {
                    candidates.push(tactic);
                }
            }
            Level {
                state,
                candidates,
                next: 0,
                history_len: history.len(),
            }
        };

    if word_count(&history) > config.word_limit as usize {
        return SearchOutcome::failure(FailureReason::WordLimit, 0, 0);
    }
    let root = enter(initial_state(theorem), &history, generator);
    stack.push(root);

    loop {
        let depth = stack.len();
        let Some(level) = stack.last_mut() else {
            return SearchOutcome::failure(FailureReason::Exhausted, n_lean, n_lean);
        };
        let Some(tactic) = level.candidates.get(level.next).cloned() else {
            // All candidates for this state explored: return to the parent,
            // dropping this state (and the tactic that reached it) from the
            // history.
            stack.pop();
            match stack.last() {
                Some(parent) => history.truncate(parent.history_len),
                None => {
                    return SearchOutcome::failure(FailureReason::Exhausted, n_lean, n_lean)
                }
            }
            continue;
        };
        level.next += 1;

        if n_lean + 1 > config.step_limit {
            return SearchOutcome::failure(FailureReason::StepLimit, n_lean, n_lean);
        }
        n_lean += 1;
        match apply_tactic(&level.state, &tactic) {
            TacticResult::Failure(_) => continue,
            TacticResult::Complete => return SearchOutcome::success(n_lean, n_lean),
            TacticResult::NewState(mut next_state) => {
                // Path states are numbered by depth along the current path.
                next_state.state_id = depth as u64;
                history.push_str(&tactic_line(&tactic));
                history.push_str(&state_block(&next_state));
                if word_count(&history) > config.word_limit as usize {
                    return SearchOutcome::failure(FailureReason::WordLimit, n_lean, n_lean);
                }
                let next_level = enter(next_state, &history, generator);
                stack.push(next_level);
            }
        }
    }
}

/// Greedy trial-and-error inference: one emission per iteration, full
/// history (including backtracks) as the prompt.
pub fn run_tae(
    theorem: &Proposition,
    generator: &mut dyn TacticGenerator,
    config: &TaeConfig,
) -> SearchOutcome {
    let mut states: BTreeMap<u64, ProofState> = BTreeMap::new();
    let initial = initial_state(theorem);
    let mut history = state_block(&initial);
    states.insert(0, initial);
    let mut current: u64 = 0;
    let mut next_id: u64 = 1;
    let mut n_lean: u64 = 0;
    let mut steps: u64 = 0;

    loop {
        if word_count(&history) > config.word_limit as usize {
            return SearchOutcome::failure(FailureReason::WordLimit, n_lean, steps);
        }
        let emissions = generator.candidates(&history, 1);
        let Some(first) = emissions.into_iter().next() else {
            return SearchOutcome::failure(FailureReason::LeanError, n_lean, steps);
        };
        steps += 1;
        let line = first.trim();

        if line.starts_with("no solution,") {
            // Backtrack instructions are handled without a kernel call, but
            // must be well-formed and point to an existing earlier state.
            let Some((from, to)) = parse_backtrack_instruction(line) else {
                return SearchOutcome::failure(FailureReason::LeanError, n_lean, steps);
            };
            if from != current || to >= from || !states.contains_key(&to) {
                return SearchOutcome::failure(FailureReason::LeanError, n_lean, steps);
            }
            history.push_str(&backtrack_line(from, to));
            history.push_str(&state_block(&states[&to]));
            current = to;
            continue;
        }

        let Ok(tactic) = parse_tactic(line) else {
            return SearchOutcome::failure(FailureReason::LeanError, n_lean, steps);
        };
        n_lean += 1;
        match apply_tactic(&states[&current], &tactic) {
            TacticResult::Failure(_) => {
                return SearchOutcome::failure(FailureReason::LeanError, n_lean, steps)
            }
            TacticResult::Complete => {
                history.push_str(&tactic_line(&tactic));
                let terminal = ProofState {
                    goals: Vec::new(),
                    next_hyp_index: states[&current].next_hyp_index,
                    state_id: next_id,
                };
                history.push_str(&state_block(&terminal));
                return SearchOutcome::success(n_lean, steps);
            }
            TacticResult::NewState(mut state) => {
                state.state_id = next_id;
                history.push_str(&tactic_line(&tactic));
                history.push_str(&state_block(&state));
                states.insert(next_id, state);
                current = next_id;
                next_id += 1;
            }
        }
    }
}

/// Aggregate metrics over a batch of outcomes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metrics {
    pub total: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub total_n_lean: u64,
    pub failure_histogram: BTreeMap<FailureReason, usize>,
}

pub fn aggregate(outcomes: &[SearchOutcome]) -> Metrics {
    let successes = outcomes.iter().filter(|o| o.success).count();
    let mut failure_histogram = BTreeMap::new();
    for outcome in outcomes {
        if let Some(reason) = outcome.failure_reason {
            *failure_histogram.entry(reason).or_insert(0) += 1;
        }
    }
    Metrics {
        total: outcomes.len(),
        successes,
        success_rate: if outcomes.is_empty() {
            0.0
        } else {
            successes as f64 / outcomes.len() as f64
        },
        total_n_lean: outcomes.iter().map(|o| o.n_lean).sum(),
        failure_histogram,
    }
}

/// Parses the most recent state block out of a serialized history; used by
/// the generators that need to inspect the live goal.
pub(crate) fn last_state_in_history(history: &str) -> Option<ProofState> {
    let lines: Vec<&str> = history.lines().collect();
    let header = lines
        .iter()
        .rposition(|l| l.starts_with("state ") && l.ends_with(':'))?;
    let state_id: u64 = lines[header]
        .strip_prefix("state ")?
        .strip_suffix(':')?
        .parse()
        .ok()?;
    let mut body = String::new();
    for line in &lines[header + 1..] {
        if line.starts_with("state ")
            || line.starts_with("tactic: ")
            || line.starts_with("no solution,")
        {
            break;
        }
        body.push_str(line);
        body.push('\n');
    }
    let goals = crate::fps::trace::parse_goals(&body).ok()?;
    let next_hyp_index = goals
        .iter()
        .flat_map(|g| g.hypotheses.iter().map(|h| h.name.0 + 1))
        .max()
        .unwrap_or(1);
    Some(ProofState {
        goals,
        next_hyp_index,
        state_id,
    })
}
