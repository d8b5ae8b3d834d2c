//! Tactic-level proof kernel: a Lean-style interaction loop over natural
//! deduction for IPL. A [`ProofState`] is an ordered list of open goals;
//! [`apply_tactic`] applies one proof step to the first goal and yields a new
//! state, completion, or a failure, exactly one inference rule per tactic.
//!
//! The surface tactic syntax is the corpus format (`intro h1`,
//! `apply Or.inl`, `have h3 : (p1 ∨ p2) := by`, `obtain h2 h3 := h1`, ...);
//! [`parse_tactic`] and [`Tactic`]'s `Display` round-trip it.

pub mod derivation;
mod lean;

pub use lean::{render_lean, LeanRenderError};

use crate::prop::Proposition;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Hypothesis names are always `h<k>` with `k ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HypName(pub u32);

impl fmt::Display for HypName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h{}", self.0)
    }
}

impl core::str::FromStr for HypName {
    type Err = GrammarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.strip_prefix('h').ok_or_else(|| GrammarError {
            message: format!("expected a hypothesis name `h<k>`, got `{s}`"),
        })?;
        if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(GrammarError {
                message: format!("expected a hypothesis name `h<k>`, got `{s}`"),
            });
        }
        digits.parse().map(HypName).map_err(|_| GrammarError {
            message: format!("hypothesis index out of range in `{s}`"),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis {
    pub name: HypName,
    pub prop: Proposition,
}

/// One open goal: hypotheses ⊢ target. Hypothesis names are unique within a
/// goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goal {
    pub hypotheses: Vec<Hypothesis>,
    pub target: Proposition,
}

impl Goal {
    pub fn find(&self, name: HypName) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| h.name == name)
    }

    fn has_name(&self, name: HypName) -> bool {
        self.find(name).is_some()
    }
}

/// A proof in progress: ordered open goals (first is current), the next free
/// hypothesis index, and a sequence number assigned by the owning search
/// session. An empty goal list is terminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofState {
    pub goals: Vec<Goal>,
    pub next_hyp_index: u32,
    pub state_id: u64,
}

impl ProofState {
    pub fn is_terminal(&self) -> bool {
        self.goals.is_empty()
    }

    /// Fresh hypothesis name; does not advance the counter.
    pub fn fresh_name(&self) -> HypName {
        HypName(self.next_hyp_index)
    }
}

/// Single goal with empty hypotheses and the theorem as target.
pub fn initial_state(theorem: &Proposition) -> ProofState {
    ProofState {
        goals: alloc::vec![Goal {
            hypotheses: Vec::new(),
            target: theorem.clone(),
        }],
        next_hyp_index: 1,
        state_id: 0,
    }
}

/// One proof step in the corpus tactic language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tactic {
    /// `intro h1` — (→-I)
    Intro(HypName),
    /// `apply And.intro` — (∧-I), splits the goal in two
    ApplyAndIntro,
    /// `apply Or.inl` — (∨-I1)
    ApplyOrInl,
    /// `apply Or.inr` — (∨-I2)
    ApplyOrInr,
    /// `exact h1` — (Assumption)
    Exact(HypName),
    /// `exact True.intro` — (T-I)
    ExactTrueIntro,
    /// `have h3 : <prop> := by` — cut: prove `<prop>` first, then resume
    /// with `h3 : <prop>` available
    HaveBy(HypName, Proposition),
    /// `let h4 := h1 h3` — (→-E)
    LetMp(HypName, HypName, HypName),
    /// `apply False.elim h4` — (F-E)
    ApplyFalseElim(HypName),
    /// `cases h1 with h2 h3` — (∨-E)
    Cases(HypName, HypName, HypName),
    /// `obtain h2 h3 := h1` — (∧-E1/E2)
    DestructAnd(HypName, HypName, HypName),
}

impl fmt::Display for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tactic::Intro(n) => write!(f, "intro {n}"),
            Tactic::ApplyAndIntro => write!(f, "apply And.intro"),
            Tactic::ApplyOrInl => write!(f, "apply Or.inl"),
            Tactic::ApplyOrInr => write!(f, "apply Or.inr"),
            Tactic::Exact(n) => write!(f, "exact {n}"),
            Tactic::ExactTrueIntro => write!(f, "exact True.intro"),
            Tactic::HaveBy(n, prop) => write!(f, "have {n} : {prop} := by"),
            Tactic::LetMp(n, imp, arg) => write!(f, "let {n} := {imp} {arg}"),
            Tactic::ApplyFalseElim(n) => write!(f, "apply False.elim {n}"),
            Tactic::Cases(h, l, r) => write!(f, "cases {h} with {l} {r}"),
            Tactic::DestructAnd(h, l, r) => write!(f, "obtain {l} {r} := {h}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TacticErrorKind {
    RuleInapplicable,
    UnknownHypothesis,
    DuplicateHypothesisName,
    /// Tactic applied to a terminal state (caller error).
    NoOpenGoals,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TacticError {
    pub kind: TacticErrorKind,
    pub message: String,
}

impl fmt::Display for TacticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl core::error::Error for TacticError {}

fn inapplicable(message: String) -> TacticResult {
    TacticResult::Failure(TacticError {
        kind: TacticErrorKind::RuleInapplicable,
        message,
    })
}

fn unknown(name: HypName) -> TacticResult {
    TacticResult::Failure(TacticError {
        kind: TacticErrorKind::UnknownHypothesis,
        message: format!("unknown hypothesis {name}"),
    })
}

fn duplicate(name: HypName) -> TacticResult {
    TacticResult::Failure(TacticError {
        kind: TacticErrorKind::DuplicateHypothesisName,
        message: format!("hypothesis name {name} already in use"),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TacticResult {
    NewState(ProofState),
    Complete,
    Failure(TacticError),
}

/// Applies `tactic` to the first goal of `state`. Pure: same inputs, same
/// result. Returns `Complete` when the last goal is discharged.
pub fn apply_tactic(state: &ProofState, tactic: &Tactic) -> TacticResult {
    let Some(goal) = state.goals.first() else {
        return TacticResult::Failure(TacticError {
            kind: TacticErrorKind::NoOpenGoals,
            message: "no open goals".to_string(),
        });
    };

    // Replacement goals for goals[0], plus the names introduced.
    let (replacement, introduced): (Vec<Goal>, Vec<HypName>) = match tactic {
        Tactic::Intro(name) => {
            let Proposition::Imp(premise, conclusion) = &goal.target else {
                return inapplicable(format!("intro: target {} is not an implication", goal.target));
            };
            if goal.has_name(*name) {
                return duplicate(*name);
            }
            let mut hyps = goal.hypotheses.clone();
            hyps.push(Hypothesis {
                name: *name,
                prop: (**premise).clone(),
            });
            (
                alloc::vec![Goal {
                    hypotheses: hyps,
                    target: (**conclusion).clone(),
                }],
                alloc::vec![*name],
            )
        }
        Tactic::ApplyAndIntro => {
            let Proposition::And(left, right) = &goal.target else {
                return inapplicable(format!(
                    "apply And.intro: target {} is not a conjunction",
                    goal.target
                ));
            };
            (
                alloc::vec![
                    Goal {
                        hypotheses: goal.hypotheses.clone(),
                        target: (**left).clone(),
                    },
                    Goal {
                        hypotheses: goal.hypotheses.clone(),
                        target: (**right).clone(),
                    },
                ],
                Vec::new(),
            )
        }
        Tactic::ApplyOrInl | Tactic::ApplyOrInr => {
            let Proposition::Or(left, right) = &goal.target else {
                return inapplicable(format!(
                    "apply Or.in{}: target {} is not a disjunction",
                    if matches!(tactic, Tactic::ApplyOrInl) { "l" } else { "r" },
                    goal.target
                ));
            };
            let picked = if matches!(tactic, Tactic::ApplyOrInl) {
                left
            } else {
                right
            };
            (
                alloc::vec![Goal {
                    hypotheses: goal.hypotheses.clone(),
                    target: (**picked).clone(),
                }],
                Vec::new(),
            )
        }
        Tactic::Exact(name) => {
            let Some(hyp) = goal.find(*name) else {
                return unknown(*name);
            };
            if hyp.prop != goal.target {
                return inapplicable(format!(
                    "exact {name}: hypothesis is {} but target is {}",
                    hyp.prop, goal.target
                ));
            }
            (Vec::new(), Vec::new())
        }
        Tactic::ExactTrueIntro => {
            if goal.target != Proposition::Top {
                return inapplicable(format!(
                    "exact True.intro: target {} is not True",
                    goal.target
                ));
            }
            (Vec::new(), Vec::new())
        }
        Tactic::HaveBy(name, prop) => {
            if goal.has_name(*name) {
                return duplicate(*name);
            }
            let mut cont_hyps = goal.hypotheses.clone();
            cont_hyps.push(Hypothesis {
                name: *name,
                prop: prop.clone(),
            });
            (
                alloc::vec![
                    Goal {
                        hypotheses: goal.hypotheses.clone(),
                        target: prop.clone(),
                    },
                    Goal {
                        hypotheses: cont_hyps,
                        target: goal.target.clone(),
                    },
                ],
                alloc::vec![*name],
            )
        }
        Tactic::LetMp(name, imp_name, arg_name) => {
            let Some(imp_hyp) = goal.find(*imp_name) else {
                return unknown(*imp_name);
            };
            let Some(arg_hyp) = goal.find(*arg_name) else {
                return unknown(*arg_name);
            };
            let Proposition::Imp(premise, conclusion) = &imp_hyp.prop else {
                return inapplicable(format!(
                    "let {name} := {imp_name} {arg_name}: {imp_name} is not an implication"
                ));
            };
            if **premise != arg_hyp.prop {
                return inapplicable(format!(
                    "let {name} := {imp_name} {arg_name}: {arg_name} is {} but the premise is {}",
                    arg_hyp.prop, premise
                ));
            }
            if goal.has_name(*name) {
                return duplicate(*name);
            }
            let mut hyps = goal.hypotheses.clone();
            hyps.push(Hypothesis {
                name: *name,
                prop: (**conclusion).clone(),
            });
            (
                alloc::vec![Goal {
                    hypotheses: hyps,
                    target: goal.target.clone(),
                }],
                alloc::vec![*name],
            )
        }
        Tactic::ApplyFalseElim(name) => {
            let Some(hyp) = goal.find(*name) else {
                return unknown(*name);
            };
            if hyp.prop != Proposition::Bot {
                return inapplicable(format!(
                    "apply False.elim {name}: hypothesis is {}, not False",
                    hyp.prop
                ));
            }
            (Vec::new(), Vec::new())
        }
        Tactic::Cases(name, left_name, right_name) => {
            let Some(hyp) = goal.find(*name) else {
                return unknown(*name);
            };
            let Proposition::Or(left, right) = hyp.prop.clone() else {
                return inapplicable(format!(
                    "cases {name}: hypothesis {} is not a disjunction",
                    hyp.prop
                ));
            };
            let without: Vec<Hypothesis> = goal
                .hypotheses
                .iter()
                .filter(|h| h.name != *name)
                .cloned()
                .collect();
            for n in [left_name, right_name] {
                if without.iter().any(|h| h.name == *n) {
                    return duplicate(*n);
                }
            }
            let mut left_hyps = without.clone();
            left_hyps.push(Hypothesis {
                name: *left_name,
                prop: *left,
            });
            let mut right_hyps = without;
            right_hyps.push(Hypothesis {
                name: *right_name,
                prop: *right,
            });
            (
                alloc::vec![
                    Goal {
                        hypotheses: left_hyps,
                        target: goal.target.clone(),
                    },
                    Goal {
                        hypotheses: right_hyps,
                        target: goal.target.clone(),
                    },
                ],
                alloc::vec![*left_name, *right_name],
            )
        }
        Tactic::DestructAnd(name, left_name, right_name) => {
            let Some(hyp) = goal.find(*name) else {
                return unknown(*name);
            };
            let Proposition::And(left, right) = hyp.prop.clone() else {
                return inapplicable(format!(
                    "obtain: hypothesis {} is not a conjunction",
                    hyp.prop
                ));
            };
            if left_name == right_name {
                return duplicate(*right_name);
            }
            // Mirrors Lean's `obtain ⟨l, r⟩ := h`: h is consumed.
            let mut hyps: Vec<Hypothesis> = goal
                .hypotheses
                .iter()
                .filter(|h| h.name != *name)
                .cloned()
                .collect();
            for n in [left_name, right_name] {
                if hyps.iter().any(|h| h.name == *n) {
                    return duplicate(*n);
                }
            }
            hyps.push(Hypothesis {
                name: *left_name,
                prop: *left,
            });
            hyps.push(Hypothesis {
                name: *right_name,
                prop: *right,
            });
            (
                alloc::vec![Goal {
                    hypotheses: hyps,
                    target: goal.target.clone(),
                }],
                alloc::vec![*left_name, *right_name],
            )
        }
    };

    let mut goals = replacement;
    goals.extend(state.goals.iter().skip(1).cloned());
    if goals.is_empty() {
        return TacticResult::Complete;
    }
    let next_hyp_index = introduced
        .iter()
        .map(|n| n.0 + 1)
        .fold(state.next_hyp_index, u32::max);
    TacticResult::NewState(ProofState {
        goals,
        next_hyp_index,
        state_id: state.state_id + 1,
    })
}

/// Error for text that is not in the corpus tactic grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrammarError {
    pub message: String,
}

impl fmt::Display for GrammarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "grammar error: {}", self.message)
    }
}

impl core::error::Error for GrammarError {}

/// Parses the corpus surface syntax. Lowercase spellings of the Lean
/// constants (`or.inl`, `and.intro`, ...) are accepted; `Display` emits the
/// capitalized canonical forms.
pub fn parse_tactic(text: &str) -> Result<Tactic, GrammarError> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("have ") {
        let colon = rest.find(" : ").ok_or_else(|| GrammarError {
            message: "have: expected `have h<k> : <prop> := by`".to_string(),
        })?;
        let name: HypName = rest[..colon].trim().parse()?;
        let after = &rest[colon + 3..];
        let prop_text = after.strip_suffix(":= by").ok_or_else(|| GrammarError {
            message: "have: missing `:= by` suffix".to_string(),
        })?;
        let prop = Proposition::parse(prop_text.trim()).map_err(|e| GrammarError {
            message: format!("have: bad proposition: {e}"),
        })?;
        return Ok(Tactic::HaveBy(name, prop));
    }

    let tokens: Vec<&str> = text.split_whitespace().collect();
    match tokens.as_slice() {
        ["intro", name] => Ok(Tactic::Intro(name.parse()?)),
        ["apply", "And.intro" | "and.intro"] => Ok(Tactic::ApplyAndIntro),
        ["apply", "Or.inl" | "or.inl"] => Ok(Tactic::ApplyOrInl),
        ["apply", "Or.inr" | "or.inr"] => Ok(Tactic::ApplyOrInr),
        ["apply", "False.elim" | "false.elim", name] => {
            Ok(Tactic::ApplyFalseElim(name.parse()?))
        }
        ["exact", "True.intro" | "true.intro"] => Ok(Tactic::ExactTrueIntro),
        ["exact", name] => Ok(Tactic::Exact(name.parse()?)),
        ["let", name, ":=", imp, arg] => {
            Ok(Tactic::LetMp(name.parse()?, imp.parse()?, arg.parse()?))
        }
        ["cases", hyp, "with", left, right] => {
            Ok(Tactic::Cases(hyp.parse()?, left.parse()?, right.parse()?))
        }
        ["obtain", left, right, ":=", hyp] => Ok(Tactic::DestructAnd(
            hyp.parse()?,
            left.parse()?,
            right.parse()?,
        )),
        _ => Err(GrammarError {
            message: format!("not a tactic: `{text}`"),
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptError {
    /// A tactic failed; `index` is its position in the script.
    TacticFailed {
        index: usize,
        tactic: Tactic,
        error: TacticError,
    },
    /// Tactics remained after the proof completed.
    TacticAfterComplete { index: usize },
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScriptError::TacticFailed {
                index,
                tactic,
                error,
            } => write!(f, "tactic {index} (`{tactic}`) failed: {error}"),
            ScriptError::TacticAfterComplete { index } => {
                write!(f, "tactic {index} follows a completed proof")
            }
        }
    }
}

impl core::error::Error for ScriptError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptOutcome {
    /// The script discharged every goal with its final tactic.
    Proved,
    /// The script ran out with goals remaining.
    Incomplete(ProofState),
}

/// Folds `apply_tactic` over the script from `initial_state(theorem)`.
pub fn check_script(
    theorem: &Proposition,
    tactics: &[Tactic],
) -> Result<ScriptOutcome, ScriptError> {
    let mut state = initial_state(theorem);
    for (index, tactic) in tactics.iter().enumerate() {
        match apply_tactic(&state, tactic) {
            TacticResult::NewState(next) => state = next,
            TacticResult::Complete => {
                if index + 1 != tactics.len() {
                    return Err(ScriptError::TacticAfterComplete { index: index + 1 });
                }
                return Ok(ScriptOutcome::Proved);
            }
            TacticResult::Failure(error) => {
                return Err(ScriptError::TacticFailed {
                    index,
                    tactic: tactic.clone(),
                    error,
                })
            }
        }
    }
    Ok(ScriptOutcome::Incomplete(state))
}

/// True iff the script is a complete, error-free proof of `theorem`.
pub fn script_proves(theorem: &Proposition, tactics: &[Tactic]) -> bool {
    matches!(check_script(theorem, tactics), Ok(ScriptOutcome::Proved))
}

/// All tactics applicable to the first goal, in a fixed order: goal-directed
/// rules first (`exact True.intro`, `intro`, `apply And.intro`,
/// `apply Or.inl`, `apply Or.inr`), then per-hypothesis rules in hypothesis
/// order (`exact`, `apply False.elim`, `cases`, `obtain`), then `let` for
/// every implication/argument pair, then `have` on every implication's
/// premise. Fresh names come from the state's counter.
///
/// Panics if the state is terminal.
pub fn enumerate_tactics(state: &ProofState) -> Vec<Tactic> {
    let goal = state
        .goals
        .first()
        .expect("enumerate_tactics: state is terminal");
    let fresh = state.fresh_name();
    let fresh2 = HypName(fresh.0 + 1);
    let mut out = Vec::new();

    match &goal.target {
        Proposition::Top => out.push(Tactic::ExactTrueIntro),
        Proposition::Imp(..) => out.push(Tactic::Intro(fresh)),
        Proposition::And(..) => out.push(Tactic::ApplyAndIntro),
        Proposition::Or(..) => {
            out.push(Tactic::ApplyOrInl);
            out.push(Tactic::ApplyOrInr);
        }
        Proposition::Atom(_) | Proposition::Bot => {}
    }

    for hyp in &goal.hypotheses {
        if hyp.prop == goal.target {
            out.push(Tactic::Exact(hyp.name));
        }
        match &hyp.prop {
            Proposition::Bot => out.push(Tactic::ApplyFalseElim(hyp.name)),
            Proposition::Or(..) => out.push(Tactic::Cases(hyp.name, fresh, fresh2)),
            Proposition::And(..) => out.push(Tactic::DestructAnd(hyp.name, fresh, fresh2)),
            _ => {}
        }
    }
    for imp in &goal.hypotheses {
        if let Proposition::Imp(premise, _) = &imp.prop {
            for arg in &goal.hypotheses {
                if arg.prop == **premise {
                    out.push(Tactic::LetMp(fresh, imp.name, arg.name));
                }
            }
        }
    }
    for imp in &goal.hypotheses {
        if let Proposition::Imp(premise, _) = &imp.prop {
            out.push(Tactic::HaveBy(fresh, (**premise).clone()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(text: &str) -> Proposition {
        Proposition::parse(text).unwrap()
    }

    fn h(k: u32) -> HypName {
        HypName(k)
    }

    fn parse_script(lines: &[&str]) -> Vec<Tactic> {
        lines.iter().map(|l| parse_tactic(l).unwrap()).collect()
    }

    const DE_MORGAN_THEOREM: &str = "((p1 ∨ p2) → False) → ((p1 → False) ∧ (p2 → False))";
    const DE_MORGAN_SCRIPT: [&str; 14] = [
        "intro h1",
        "apply And.intro",
        "intro h2",
        "have h3 : (p1 ∨ p2) := by",
        "apply Or.inl",
        "exact h2",
        "let h4 := h1 h3",
        "apply False.elim h4",
        "intro h5",
        "have h6 : (p1 ∨ p2) := by",
        "apply Or.inr",
        "exact h5",
        "let h7 := h1 h6",
        "apply False.elim h7",
    ];

    #[test]
    fn initial_state_has_one_bare_goal() {
        let s = initial_state(&p("p1 → p1 ∨ p2"));
        assert_eq!(s.goals.len(), 1);
        assert!(s.goals[0].hypotheses.is_empty());
        assert_eq!(s.goals[0].target, p("p1 → (p1 ∨ p2)"));
        assert_eq!(s.state_id, 0);
        assert_eq!(s.next_hyp_index, 1);

        let t = initial_state(&Proposition::Top);
        assert_eq!(t.goals.len(), 1);
        assert_eq!(t.goals[0].target, Proposition::Top);
    }

    #[test]
    fn intro_then_inl_then_exact() {
        let s0 = initial_state(&p("p1 → p1 ∨ p2"));
        let TacticResult::NewState(s1) = apply_tactic(&s0, &Tactic::Intro(h(1))) else {
            panic!("intro failed");
        };
        assert_eq!(s1.goals[0].hypotheses.len(), 1);
        assert_eq!(s1.goals[0].hypotheses[0].prop, p("p1"));
        assert_eq!(s1.goals[0].target, p("p1 ∨ p2"));
        assert_eq!(s1.next_hyp_index, 2);

        let TacticResult::NewState(s2) = apply_tactic(&s1, &Tactic::ApplyOrInl) else {
            panic!("or.inl failed");
        };
        assert_eq!(s2.goals[0].target, p("p1"));
        assert_eq!(apply_tactic(&s2, &Tactic::Exact(h(1))), TacticResult::Complete);
    }

    #[test]
    fn rule_mismatches_fail_with_distinct_kinds() {
        let s = initial_state(&p("p1 ∧ p2"));
        let TacticResult::Failure(e) = apply_tactic(&s, &Tactic::ApplyOrInl) else {
            panic!("expected failure");
        };
        assert_eq!(e.kind, TacticErrorKind::RuleInapplicable);

        let TacticResult::Failure(e) = apply_tactic(&s, &Tactic::Exact(h(9))) else {
            panic!("expected failure");
        };
        assert_eq!(e.kind, TacticErrorKind::UnknownHypothesis);

        let s0 = initial_state(&p("p1 → p1 → p1"));
        let TacticResult::NewState(s1) = apply_tactic(&s0, &Tactic::Intro(h(1))) else {
            panic!()
        };
        let TacticResult::Failure(e) = apply_tactic(&s1, &Tactic::Intro(h(1))) else {
            panic!("expected duplicate name failure");
        };
        assert_eq!(e.kind, TacticErrorKind::DuplicateHypothesisName);

        let terminal = ProofState {
            goals: Vec::new(),
            next_hyp_index: 1,
            state_id: 7,
        };
        let TacticResult::Failure(e) = apply_tactic(&terminal, &Tactic::ApplyAndIntro) else {
            panic!("expected failure");
        };
        assert_eq!(e.kind, TacticErrorKind::NoOpenGoals);
    }

    #[test]
    fn parse_tactic_examples() {
        assert_eq!(parse_tactic("apply Or.inl").unwrap(), Tactic::ApplyOrInl);
        assert_eq!(parse_tactic("apply or.inl").unwrap(), Tactic::ApplyOrInl);
        assert_eq!(
            parse_tactic("let h4 := h1 h3").unwrap(),
            Tactic::LetMp(h(4), h(1), h(3))
        );
        assert_eq!(
            parse_tactic("have h3 : (p1 ∨ p2) := by").unwrap(),
            Tactic::HaveBy(h(3), p("p1 ∨ p2"))
        );
        assert_eq!(
            parse_tactic("cases h1 with h2 h3").unwrap(),
            Tactic::Cases(h(1), h(2), h(3))
        );
        assert_eq!(
            parse_tactic("obtain h2 h3 := h1").unwrap(),
            Tactic::DestructAnd(h(1), h(2), h(3))
        );
        assert_eq!(
            parse_tactic("exact True.intro").unwrap(),
            Tactic::ExactTrueIntro
        );
        assert!(parse_tactic("sorry").is_err());
        assert!(parse_tactic("intro x1").is_err());
        assert!(parse_tactic("intro h0").is_err());
        assert!(parse_tactic("apply Or.inl h1").is_err());
    }

    #[test]
    fn section_one_script_checks() {
        let theorem = p("p1 → p1 ∨ p2");
        let script = parse_script(&["intro h1", "apply or.inl", "exact h1"]);
        assert!(script_proves(&theorem, &script));

        // The backtracked variant fails at the exact step.
        let bad = parse_script(&["intro h1", "apply Or.inr", "exact h1"]);
        let err = check_script(&theorem, &bad).unwrap_err();
        assert!(matches!(err, ScriptError::TacticFailed { index: 2, .. }));
    }

    #[test]
    fn de_morgan_script_checks() {
        let theorem = p(DE_MORGAN_THEOREM);
        let script = parse_script(&DE_MORGAN_SCRIPT);
        assert!(script_proves(&theorem, &script));
    }

    #[test]
    fn incomplete_and_trailing_scripts() {
        let theorem = p("p1 → p1");
        let script = parse_script(&["intro h1"]);
        assert!(matches!(
            check_script(&theorem, &script),
            Ok(ScriptOutcome::Incomplete(_))
        ));
        let script = parse_script(&["intro h1", "exact h1", "exact h1"]);
        assert!(matches!(
            check_script(&theorem, &script),
            Err(ScriptError::TacticAfterComplete { index: 2 })
        ));
    }

    #[test]
    fn enumerate_respects_preconditions() {
        let s = initial_state(&Proposition::Top);
        assert!(enumerate_tactics(&s).contains(&Tactic::ExactTrueIntro));

        let s0 = initial_state(&p("p1 → p1 ∨ p2"));
        let TacticResult::NewState(s1) = apply_tactic(&s0, &Tactic::Intro(h(1))) else {
            panic!()
        };
        let tactics = enumerate_tactics(&s1);
        assert!(tactics.contains(&Tactic::ApplyOrInl));
        assert!(tactics.contains(&Tactic::ApplyOrInr));
        assert!(!tactics.contains(&Tactic::ApplyAndIntro));
    }

    #[test]
    #[should_panic(expected = "terminal")]
    fn enumerate_panics_on_terminal_state() {
        let terminal = ProofState {
            goals: Vec::new(),
            next_hyp_index: 1,
            state_id: 0,
        };
        enumerate_tactics(&terminal);
    }

    /// Random reachable states: apply random enumerated tactics from a random
    /// theorem.
    fn arb_reachable_state() -> impl Strategy<Value = ProofState> {
        (any::<u64>(), 0usize..6).prop_map(|(seed, steps)| {
            let codec = crate::codec::Codec::new(crate::codec::CodecParams::new(5, 3));
            let theorem = codec.sample_uniform(seed, 1).pop().unwrap();
            let mut state = initial_state(&theorem);
            let mut pick = seed;
            for _ in 0..steps {
                if state.is_terminal() {
                    break;
                }
                let tactics = enumerate_tactics(&state);
                if tactics.is_empty() {
                    break;
                }
                pick = crate::rng::splitmix64(pick);
                let t = &tactics[(pick % tactics.len() as u64) as usize];
                match apply_tactic(&state, t) {
                    TacticResult::NewState(s) => state = s,
                    _ => break,
                }
            }
            state
        })
    }

    proptest! {
        #[test]
        fn enumerated_tactics_always_apply(state in arb_reachable_state()) {
            prop_assume!(!state.is_terminal());
            let before = state.goals.len();
            for tactic in enumerate_tactics(&state) {
                match apply_tactic(&state, &tactic) {
                    TacticResult::Failure(e) => {
                        prop_assert!(false, "enumerated `{}` failed: {}", tactic, e);
                    }
                    TacticResult::Complete => prop_assert_eq!(before, 1),
                    TacticResult::NewState(next) => {
                        // Goal count moves by -1 (discharge), 0 (transform) or
                        // +1 (split).
                        let delta = next.goals.len() as i64 - before as i64;
                        prop_assert!((-1..=1).contains(&delta));
                        let expect_split = matches!(
                            tactic,
                            Tactic::ApplyAndIntro | Tactic::Cases(..) | Tactic::HaveBy(..)
                        );
                        prop_assert_eq!(delta == 1, expect_split);
                    }
                }
            }
        }

        #[test]
        fn tactic_surface_syntax_round_trips(state in arb_reachable_state()) {
            prop_assume!(!state.is_terminal());
            for tactic in enumerate_tactics(&state) {
                let text = alloc::format!("{tactic}");
                prop_assert_eq!(parse_tactic(&text).unwrap(), tactic);
            }
        }
    }
}
