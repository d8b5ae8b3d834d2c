//! Lean 4 source emission for checked scripts.

use super::{apply_tactic, initial_state, ProofState, ScriptError, Tactic, TacticResult};
use crate::prop::Proposition;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeanRenderError {
    /// The script does not check against the theorem.
    Script(ScriptError),
    /// The script checks but leaves goals open.
    IncompleteProof,
}

impl fmt::Display for LeanRenderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LeanRenderError::Script(e) => write!(f, "script rejected: {e}"),
            LeanRenderError::IncompleteProof => write!(f, "script leaves goals open"),
        }
    }
}

impl core::error::Error for LeanRenderError {}

/// Emits a Lean 4 file for a complete proof script:
///
/// ```text
/// variable (p1 p2 : Prop)
/// theorem thm : <prop> := by
///   <tactic>
///   ...
/// ```
///
/// Tactic lines are indented two spaces per nesting level; the body of a
/// `have ... := by` block is one level deeper until its subgoal closes. The
/// `variable` line declares `p1..p<p>` and is omitted when `p` is zero. The
/// script is replayed for validation; an unchecked script is rejected.
pub fn render_lean(
    theorem: &Proposition,
    tactics: &[Tactic],
    p: u32,
) -> Result<String, LeanRenderError> {
    let mut out = String::new();
    if p > 0 {
        out.push_str("variable (");
        for i in 1..=p {
            if i > 1 {
                out.push(' ');
            }
            let _ = write!(out, "p{i}");
        }
        out.push_str(" : Prop)\n");
    }
    let _ = writeln!(out, "theorem thm : {theorem} := by");

    let mut state: ProofState = initial_state(theorem);
    // Indentation level of each open goal, aligned with `state.goals`.
    let mut depths: Vec<usize> = alloc::vec![0];
    for (index, tactic) in tactics.iter().enumerate() {
        let depth = depths[0];
        for _ in 0..=depth {
            out.push_str("  ");
        }
        let _ = writeln!(out, "{tactic}");

        match apply_tactic(&state, tactic) {
            TacticResult::NewState(next) => {
                match tactic {
                    Tactic::HaveBy(..) => {
                        // Premise subgoal nests one level deeper.
                        depths.insert(0, depth + 1);
                    }
                    Tactic::ApplyAndIntro | Tactic::Cases(..) => {
                        depths.insert(0, depth);
                    }
                    Tactic::Exact(_) | Tactic::ExactTrueIntro | Tactic::ApplyFalseElim(_) => {
                        depths.remove(0);
                    }
                    _ => {}
                }
                debug_assert_eq!(depths.len(), next.goals.len());
                state = next;
            }
            TacticResult::Complete => {
                if index + 1 != tactics.len() {
                    return Err(LeanRenderError::Script(ScriptError::TacticAfterComplete {
                        index: index + 1,
                    }));
                }
                return Ok(out);
            }
            TacticResult::Failure(error) => {
                return Err(LeanRenderError::Script(ScriptError::TacticFailed {
                    index,
                    tactic: tactic.clone(),
                    error,
                }))
            }
        }
    }
    Err(LeanRenderError::IncompleteProof)
}
