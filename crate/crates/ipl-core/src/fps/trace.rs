//! Search traces and their canonical text serialization.
//!
//! The text format alternates state blocks and tactic lines:
//!
//! ```text
//! state 0:
//! ⊢ (p1 → (p1 ∨ p2))
//! tactic: intro h1
//! state 1:
//! h1 : p1
//! ⊢ (p1 ∨ p2)
//! tactic: apply Or.inr
//! state 2:
//! h1 : p1
//! ⊢ p2
//! no solution, return to state 1 [that leads to state 2]
//! state 1:
//! h1 : p1
//! ⊢ (p1 ∨ p2)
//! tactic: apply Or.inl
//! state 3:
//! h1 : p1
//! ⊢ p1
//! tactic: exact h1
//! state 4:
//! no goals
//! ```
//!
//! A state block renders every open goal as hypothesis lines followed by a
//! `⊢` line; the terminal body is `no goals`. After a backtrack instruction
//! the target state is re-printed, since the inference protocol re-prompts
//! with the state the search returns to. State numbers are never reused:
//! the counter keeps increasing after a backtrack.

use crate::kernel::{
    apply_tactic, initial_state, parse_tactic, Goal, Hypothesis, ProofState, Tactic, TacticResult,
};
use crate::prop::Proposition;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write;

/// One event in a trial-and-error search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceStep {
    /// `tactic` applied at state `state` produced state `result`.
    Apply {
        state: u64,
        tactic: Tactic,
        result: u64,
    },
    /// Dead end at `from`; search resumes at the earlier state `to`.
    Backtrack { from: u64, to: u64 },
    /// `state` has no goals: the proof is complete.
    Qed { state: u64 },
}

/// A complete trial-and-error transcript: every state visited (keyed by id),
/// every tactic tried including abandoned branches, and the backtrack
/// markers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchTrace {
    pub theorem: Proposition,
    pub steps: Vec<TraceStep>,
    pub states: BTreeMap<u64, ProofState>,
}

impl SearchTrace {
    /// Number of `Apply` steps (kernel transitions, including abandoned
    /// ones).
    pub fn apply_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, TraceStep::Apply { .. }))
            .count()
    }

    pub fn backtrack_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, TraceStep::Backtrack { .. }))
            .count()
    }

    pub fn is_successful(&self) -> bool {
        matches!(self.steps.last(), Some(TraceStep::Qed { .. }))
    }

    pub fn to_text(&self) -> String {
        trace_to_text(self)
    }
}

/// Frozen word-length rule: ASCII-whitespace-separated tokens.
pub fn word_count(text: &str) -> usize {
    text.split_ascii_whitespace().count()
}

/// State block body: each goal as `h<k> : <prop>` lines then a `⊢ <prop>`
/// line; `no goals` when terminal.
pub fn goals_text(state: &ProofState) -> String {
    if state.goals.is_empty() {
        return "no goals\n".to_string();
    }
    let mut out = String::new();
    for goal in &state.goals {
        for hyp in &goal.hypotheses {
            let _ = writeln!(out, "{} : {}", hyp.name, hyp.prop);
        }
        let _ = writeln!(out, "⊢ {}", goal.target);
    }
    out
}

/// `state <id>:` header plus the goals body.
pub fn state_block(state: &ProofState) -> String {
    format!("state {}:\n{}", state.state_id, goals_text(state))
}

pub fn tactic_line(tactic: &Tactic) -> String {
    format!("tactic: {tactic}\n")
}

pub fn backtrack_line(from: u64, to: u64) -> String {
    format!("no solution, return to state {to} [that leads to state {from}]\n")
}

/// Serializes a trace to the canonical text format.
pub fn trace_to_text(trace: &SearchTrace) -> String {
    let mut out = state_block(&trace.states[&0]);
    for step in &trace.steps {
        match step {
            TraceStep::Apply { tactic, result, .. } => {
                out.push_str(&tactic_line(tactic));
                out.push_str(&state_block(&trace.states[result]));
            }
            TraceStep::Backtrack { from, to } => {
                out.push_str(&backtrack_line(*from, *to));
                out.push_str(&state_block(&trace.states[to]));
            }
            TraceStep::Qed { .. } => {}
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceTextError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for TraceTextError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "trace text error at line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for TraceTextError {}

/// Parses a backtrack instruction, returning `(from, to)`. The format is
/// exactly `no solution, return to state <to> [that leads to state <from>]`.
pub fn parse_backtrack_instruction(line: &str) -> Option<(u64, u64)> {
    let rest = line.trim().strip_prefix("no solution, return to state ")?;
    let (to_text, rest) = rest.split_once(" [that leads to state ")?;
    let from_text = rest.strip_suffix(']')?;
    let to = to_text.parse().ok()?;
    let from = from_text.parse().ok()?;
    Some((from, to))
}

/// Parses a state-block body (as produced by [`goals_text`]).
pub fn parse_goals(body: &str) -> Result<Vec<Goal>, TraceTextError> {
    let trimmed = body.trim();
    if trimmed == "no goals" {
        return Ok(Vec::new());
    }
    let mut goals = Vec::new();
    let mut hypotheses = Vec::new();
    for (i, line) in trimmed.lines().enumerate() {
        let err = |message: String| TraceTextError { line: i + 1, message };
        if let Some(target_text) = line.strip_prefix("⊢ ") {
            let target = Proposition::parse(target_text)
                .map_err(|e| err(format!("bad target: {e}")))?;
            goals.push(Goal {
                hypotheses: core::mem::take(&mut hypotheses),
                target,
            });
        } else {
            let (name_text, prop_text) = line
                .split_once(" : ")
                .ok_or_else(|| err(format!("expected `h<k> : <prop>` or `⊢ <prop>`, got `{line}`")))?;
            let name = name_text
                .trim()
                .parse()
                .map_err(|e| err(format!("bad hypothesis name: {e}")))?;
            let prop = Proposition::parse(prop_text)
                .map_err(|e| err(format!("bad hypothesis: {e}")))?;
            hypotheses.push(Hypothesis { name, prop });
        }
    }
    if !hypotheses.is_empty() {
        return Err(TraceTextError {
            line: trimmed.lines().count(),
            message: "state block ends inside a goal (missing ⊢ line)".to_string(),
        });
    }
    Ok(goals)
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<&'a str> {
        let line = self.peek();
        self.pos += 1;
        line
    }

    fn err(&self, message: String) -> TraceTextError {
        TraceTextError {
            line: self.pos,
            message,
        }
    }

    /// Reads a `state <k>:` header and its body lines.
    fn state_header(&mut self) -> Result<u64, TraceTextError> {
        let line = self
            .next()
            .ok_or_else(|| self.err("expected a state header".to_string()))?;
        line.strip_prefix("state ")
            .and_then(|r| r.strip_suffix(':'))
            .and_then(|r| r.parse().ok())
            .ok_or_else(|| self.err(format!("expected `state <k>:`, got `{line}`")))
    }

    fn state_body(&mut self) -> String {
        let mut body = String::new();
        while let Some(line) = self.peek() {
            if line.starts_with("state ")
                || line.starts_with("tactic: ")
                || line.starts_with("no solution,")
            {
                break;
            }
            self.pos += 1;
            body.push_str(line);
            body.push('\n');
        }
        body
    }
}

/// Parses and verifies a trace text against `theorem`: every tactic is
/// replayed through the kernel, every state block must match the replayed
/// state byte-for-byte, backtracks must target existing earlier states, and
/// the trace must end at `no goals`. Round-trips with [`trace_to_text`].
pub fn text_to_trace(text: &str, theorem: &Proposition) -> Result<SearchTrace, TraceTextError> {
    let mut lines = Lines {
        lines: text.lines().collect(),
        pos: 0,
    };

    let mut states: BTreeMap<u64, ProofState> = BTreeMap::new();
    let mut steps: Vec<TraceStep> = Vec::new();

    let first_id = lines.state_header()?;
    if first_id != 0 {
        return Err(lines.err(format!("first state must be 0, got {first_id}")));
    }
    let initial = initial_state(theorem);
    let body = lines.state_body();
    if body != goals_text(&initial) {
        return Err(lines.err("state 0 does not match the theorem".to_string()));
    }
    states.insert(0, initial);
    let mut current: u64 = 0;
    let mut next_id: u64 = 1;

    loop {
        let Some(line) = lines.peek() else {
            return Err(lines.err("trace ends before the proof completes".to_string()));
        };
        if let Some(tactic_text) = line.strip_prefix("tactic: ") {
            lines.pos += 1;
            let tactic = parse_tactic(tactic_text)
                .map_err(|e| lines.err(format!("bad tactic: {e}")))?;
            let state = states[&current].clone();
            let produced = match apply_tactic(&state, &tactic) {
                TacticResult::NewState(mut s) => {
                    s.state_id = next_id;
                    s
                }
                TacticResult::Complete => ProofState {
                    goals: Vec::new(),
                    next_hyp_index: state.next_hyp_index,
                    state_id: next_id,
                },
                TacticResult::Failure(e) => {
                    return Err(lines.err(format!("tactic `{tactic}` fails here: {e}")))
                }
            };
            let header_id = lines.state_header()?;
            if header_id != next_id {
                return Err(lines.err(format!(
                    "expected state {next_id} after the tactic, got state {header_id}"
                )));
            }
            let body = lines.state_body();
            if body != goals_text(&produced) {
                return Err(lines.err(format!(
                    "state {header_id} does not match the kernel replay"
                )));
            }
            let terminal = produced.is_terminal();
            states.insert(next_id, produced);
            steps.push(TraceStep::Apply {
                state: current,
                tactic,
                result: next_id,
            });
            current = next_id;
            next_id += 1;
            if terminal {
                steps.push(TraceStep::Qed { state: current });
                if lines.peek().is_some() {
                    return Err(lines.err("trailing text after the proof completed".to_string()));
                }
                return Ok(SearchTrace {
                    theorem: theorem.clone(),
                    steps,
                    states,
                });
            }
        } else if line.starts_with("no solution,") {
            lines.pos += 1;
            let Some((from, to)) = parse_backtrack_instruction(line) else {
                return Err(lines.err(format!("malformed backtrack instruction: `{line}`")));
            };
            if from != current {
                return Err(lines.err(format!(
                    "backtrack claims to leave state {from} but the current state is {current}"
                )));
            }
            if to >= from || !states.contains_key(&to) {
                return Err(lines.err(format!(
                    "backtrack target {to} is not an existing earlier state"
                )));
            }
            let header_id = lines.state_header()?;
            if header_id != to {
                return Err(lines.err(format!(
                    "expected a re-print of state {to}, got state {header_id}"
                )));
            }
            let body = lines.state_body();
            if body != goals_text(&states[&to]) {
                return Err(lines.err(format!("re-printed state {to} does not match")));
            }
            steps.push(TraceStep::Backtrack { from, to });
            current = to;
        } else {
            return Err(lines.err(format!("unexpected line `{line}`")));
        }
    }
}
