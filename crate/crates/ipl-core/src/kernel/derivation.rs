//! Independent derivation-tree replay.
//!
//! A checked script is only trusted once it can be rebuilt as an explicit
//! natural-deduction derivation whose every node is re-verified against the
//! eleven inference rules. The builder translates a tactic script into a
//! derivation (hypothesis-producing tactics like `let`/`obtain`/`have` become
//! sub-derivations plugged in at their use sites); the checker then validates
//! each node structurally, independently of `apply_tactic`.

use super::{HypName, Tactic};
use crate::prop::Proposition;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use core::fmt;

pub type Context = BTreeSet<Proposition>;

/// A natural-deduction derivation of `context ⊢ conclusion`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub context: Context,
    pub conclusion: Proposition,
    pub rule: Rule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Assumption,
    TrueIntro,
    FalseElim(Rc<Derivation>),
    AndIntro(Rc<Derivation>, Rc<Derivation>),
    AndElimLeft(Rc<Derivation>),
    AndElimRight(Rc<Derivation>),
    OrIntroLeft(Rc<Derivation>),
    OrIntroRight(Rc<Derivation>),
    OrElim(Rc<Derivation>, Rc<Derivation>, Rc<Derivation>),
    ImpIntro(Rc<Derivation>),
    ImpElim(Rc<Derivation>, Rc<Derivation>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationError {
    pub message: String,
}

impl fmt::Display for DerivationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid derivation: {}", self.message)
    }
}

impl core::error::Error for DerivationError {}

fn bad(message: String) -> DerivationError {
    DerivationError { message }
}

/// Verifies every node of the derivation against its rule schema. Premise
/// contexts may be subsets of the conclusion's context (weakening is
/// admissible and keeps sub-derivations reusable).
pub fn check(d: &Derivation) -> Result<(), DerivationError> {
    let sub = |premise: &Derivation, extra: Option<&Proposition>| -> Result<(), DerivationError> {
        let ok = premise.context.iter().all(|assumption| {
            d.context.contains(assumption) || extra == Some(assumption)
        });
        if ok {
            Ok(())
        } else {
            Err(bad(format!(
                "premise context is not contained in the conclusion context (⊢ {})",
                d.conclusion
            )))
        }
    };
    match &d.rule {
        Rule::Assumption => {
            if d.context.contains(&d.conclusion) {
                Ok(())
            } else {
                Err(bad(format!("assumption {} not in context", d.conclusion)))
            }
        }
        Rule::TrueIntro => {
            if d.conclusion == Proposition::Top {
                Ok(())
            } else {
                Err(bad(format!("T-I concludes {}, not True", d.conclusion)))
            }
        }
        Rule::FalseElim(premise) => {
            if premise.conclusion != Proposition::Bot {
                return Err(bad("F-E premise must conclude False".into()));
            }
            sub(premise, None)?;
            check(premise)
        }
        Rule::AndIntro(left, right) => {
            let Proposition::And(a, b) = &d.conclusion else {
                return Err(bad(format!("∧-I concludes {}, not a conjunction", d.conclusion)));
            };
            if left.conclusion != **a || right.conclusion != **b {
                return Err(bad("∧-I premises do not match the conjuncts".into()));
            }
            sub(left, None)?;
            sub(right, None)?;
            check(left)?;
            check(right)
        }
        Rule::AndElimLeft(premise) | Rule::AndElimRight(premise) => {
            let Proposition::And(a, b) = &premise.conclusion else {
                return Err(bad("∧-E premise must conclude a conjunction".into()));
            };
            let expected = if matches!(d.rule, Rule::AndElimLeft(_)) { a } else { b };
            if d.conclusion != **expected {
                return Err(bad("∧-E conclusion does not match the conjunct".into()));
            }
            sub(premise, None)?;
            check(premise)
        }
        Rule::OrIntroLeft(premise) | Rule::OrIntroRight(premise) => {
            let Proposition::Or(a, b) = &d.conclusion else {
                return Err(bad(format!("∨-I concludes {}, not a disjunction", d.conclusion)));
            };
            let expected = if matches!(d.rule, Rule::OrIntroLeft(_)) { a } else { b };
            if premise.conclusion != **expected {
                return Err(bad("∨-I premise does not match the disjunct".into()));
            }
            sub(premise, None)?;
            check(premise)
        }
        Rule::OrElim(disjunction, left_case, right_case) => {
            let Proposition::Or(a, b) = &disjunction.conclusion else {
                return Err(bad("∨-E major premise must conclude a disjunction".into()));
            };
            if left_case.conclusion != d.conclusion || right_case.conclusion != d.conclusion {
                return Err(bad("∨-E cases must conclude the goal".into()));
            }
            sub(disjunction, None)?;
            sub(left_case, Some(a))?;
            sub(right_case, Some(b))?;
            check(disjunction)?;
            check(left_case)?;
            check(right_case)
        }
        Rule::ImpIntro(body) => {
            let Proposition::Imp(a, b) = &d.conclusion else {
                return Err(bad(format!("→-I concludes {}, not an implication", d.conclusion)));
            };
            if body.conclusion != **b {
                return Err(bad("→-I body does not conclude the consequent".into()));
            }
            sub(body, Some(a))?;
            check(body)
        }
        Rule::ImpElim(imp, arg) => {
            let Proposition::Imp(a, b) = &imp.conclusion else {
                return Err(bad("→-E major premise must conclude an implication".into()));
            };
            if arg.conclusion != **a {
                return Err(bad("→-E argument does not match the antecedent".into()));
            }
            if d.conclusion != **b {
                return Err(bad("→-E conclusion does not match the consequent".into()));
            }
            sub(imp, None)?;
            sub(arg, None)?;
            check(imp)?;
            check(arg)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildError {
    pub index: usize,
    pub message: String,
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot build derivation at tactic {}: {}", self.index, self.message)
    }
}

impl core::error::Error for BuildError {}

struct Builder<'a> {
    tactics: &'a [Tactic],
    cursor: usize,
}

type Env = BTreeMap<HypName, Rc<Derivation>>;

impl<'a> Builder<'a> {
    fn fail(&self, message: String) -> BuildError {
        BuildError {
            index: self.cursor.saturating_sub(1),
            message,
        }
    }

    fn next(&mut self) -> Result<&'a Tactic, BuildError> {
        let t = self.tactics.get(self.cursor).ok_or(BuildError {
            index: self.cursor,
            message: "script ended with goals open".into(),
        })?;
        self.cursor += 1;
        Ok(t)
    }

    fn assume(context: &Context, prop: &Proposition) -> Rc<Derivation> {
        let mut ctx = context.clone();
        ctx.insert(prop.clone());
        Rc::new(Derivation {
            context: ctx,
            conclusion: prop.clone(),
            rule: Rule::Assumption,
        })
    }

    fn lookup(&self, env: &Env, name: HypName) -> Result<Rc<Derivation>, BuildError> {
        env.get(&name)
            .cloned()
            .ok_or_else(|| self.fail(format!("hypothesis {name} is not in scope")))
    }

    /// Consumes tactics until `target` is proved under `context`/`env`.
    fn build(
        &mut self,
        context: &Context,
        env: &Env,
        target: &Proposition,
    ) -> Result<Rc<Derivation>, BuildError> {
        let context = context.clone();
        let mut env = env.clone();
        loop {
            let tactic = self.next()?.clone();
            match tactic {
                Tactic::Intro(name) => {
                    let Proposition::Imp(a, b) = target else {
                        return Err(self.fail("intro on a non-implication".into()));
                    };
                    let mut inner_ctx = context.clone();
                    inner_ctx.insert((**a).clone());
                    let mut inner_env = env.clone();
                    inner_env.insert(name, Self::assume(&context, a));
                    let body = self.build(&inner_ctx, &inner_env, b)?;
                    return Ok(Rc::new(Derivation {
                        context,
                        conclusion: target.clone(),
                        rule: Rule::ImpIntro(body),
                    }));
                }
                Tactic::ApplyAndIntro => {
                    let Proposition::And(a, b) = target else {
                        return Err(self.fail("apply And.intro on a non-conjunction".into()));
                    };
                    let left = self.build(&context, &env, a)?;
                    let right = self.build(&context, &env, b)?;
                    return Ok(Rc::new(Derivation {
                        context,
                        conclusion: target.clone(),
                        rule: Rule::AndIntro(left, right),
                    }));
                }
                Tactic::ApplyOrInl | Tactic::ApplyOrInr => {
                    let Proposition::Or(a, b) = target else {
                        return Err(self.fail("apply Or.in* on a non-disjunction".into()));
                    };
                    let is_left = matches!(tactic, Tactic::ApplyOrInl);
                    let premise = self.build(&context, &env, if is_left { a } else { b })?;
                    let rule = if is_left {
                        Rule::OrIntroLeft(premise)
                    } else {
                        Rule::OrIntroRight(premise)
                    };
                    return Ok(Rc::new(Derivation {
                        context,
                        conclusion: target.clone(),
                        rule,
                    }));
                }
                Tactic::Exact(name) => {
                    let d = self.lookup(&env, name)?;
                    if d.conclusion != *target {
                        return Err(self.fail(format!(
                            "exact {name}: proves {}, goal is {target}",
                            d.conclusion
                        )));
                    }
                    return Ok(d);
                }
                Tactic::ExactTrueIntro => {
                    if *target != Proposition::Top {
                        return Err(self.fail("exact True.intro on a non-True goal".into()));
                    }
                    return Ok(Rc::new(Derivation {
                        context,
                        conclusion: Proposition::Top,
                        rule: Rule::TrueIntro,
                    }));
                }
                Tactic::ApplyFalseElim(name) => {
                    let d = self.lookup(&env, name)?;
                    if d.conclusion != Proposition::Bot {
                        return Err(self.fail(format!("{name} does not prove False")));
                    }
                    return Ok(Rc::new(Derivation {
                        context,
                        conclusion: target.clone(),
                        rule: Rule::FalseElim(d),
                    }));
                }
                Tactic::HaveBy(name, prop) => {
                    let sub = self.build(&context, &env, &prop)?;
                    env.insert(name, sub);
                }
                Tactic::LetMp(name, imp_name, arg_name) => {
                    let imp = self.lookup(&env, imp_name)?;
                    let arg = self.lookup(&env, arg_name)?;
                    let Proposition::Imp(a, b) = imp.conclusion.clone() else {
                        return Err(self.fail(format!("{imp_name} is not an implication")));
                    };
                    if arg.conclusion != *a {
                        return Err(self.fail(format!("{arg_name} does not prove the premise")));
                    }
                    env.insert(
                        name,
                        Rc::new(Derivation {
                            context: context.clone(),
                            conclusion: (*b).clone(),
                            rule: Rule::ImpElim(imp, arg),
                        }),
                    );
                }
                Tactic::DestructAnd(name, left_name, right_name) => {
                    let d = self.lookup(&env, name)?;
                    let Proposition::And(a, b) = d.conclusion.clone() else {
                        return Err(self.fail(format!("{name} is not a conjunction")));
                    };
                    env.remove(&name);
                    env.insert(
                        left_name,
                        Rc::new(Derivation {
                            context: context.clone(),
                            conclusion: (*a).clone(),
                            rule: Rule::AndElimLeft(d.clone()),
                        }),
                    );
                    env.insert(
                        right_name,
                        Rc::new(Derivation {
                            context: context.clone(),
                            conclusion: (*b).clone(),
                            rule: Rule::AndElimRight(d),
                        }),
                    );
                }
                Tactic::Cases(name, left_name, right_name) => {
                    let d = self.lookup(&env, name)?;
                    let Proposition::Or(a, b) = d.conclusion.clone() else {
                        return Err(self.fail(format!("{name} is not a disjunction")));
                    };
                    let mut left_env = env.clone();
                    left_env.remove(&name);
                    let mut right_env = left_env.clone();
                    left_env.insert(left_name, Self::assume(&context, &a));
                    right_env.insert(right_name, Self::assume(&context, &b));
                    let mut left_ctx = context.clone();
                    left_ctx.insert((*a).clone());
                    let mut right_ctx = context.clone();
                    right_ctx.insert((*b).clone());
                    let left_case = self.build(&left_ctx, &left_env, target)?;
                    let right_case = self.build(&right_ctx, &right_env, target)?;
                    return Ok(Rc::new(Derivation {
                        context,
                        conclusion: target.clone(),
                        rule: Rule::OrElim(d, left_case, right_case),
                    }));
                }
            }
        }
    }
}

/// Rebuilds a script as an explicit derivation of `⊢ theorem`. The result
/// still needs [`check`]; together they replay the proof independently of
/// `apply_tactic`.
pub fn script_to_derivation(
    theorem: &Proposition,
    tactics: &[Tactic],
) -> Result<Rc<Derivation>, BuildError> {
    let mut builder = Builder { tactics, cursor: 0 };
    let derivation = builder.build(&Context::new(), &Env::new(), theorem)?;
    if builder.cursor != tactics.len() {
        return Err(BuildError {
            index: builder.cursor,
            message: "trailing tactics after the proof completed".into(),
        });
    }
    Ok(derivation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse_tactic;

    fn p(text: &str) -> Proposition {
        Proposition::parse(text).unwrap()
    }

    fn script(lines: &[&str]) -> alloc::vec::Vec<Tactic> {
        lines.iter().map(|l| parse_tactic(l).unwrap()).collect()
    }

    #[test]
    fn simple_scripts_yield_valid_derivations() {
        let theorem = p("p1 → p1 ∨ p2");
        let d = script_to_derivation(
            &theorem,
            &script(&["intro h1", "apply Or.inl", "exact h1"]),
        )
        .unwrap();
        assert_eq!(d.conclusion, theorem);
        assert!(d.context.is_empty());
        check(&d).unwrap();
    }

    #[test]
    fn de_morgan_script_yields_valid_derivation() {
        let theorem = p("((p1 ∨ p2) → False) → ((p1 → False) ∧ (p2 → False))");
        let d = script_to_derivation(
            &theorem,
            &script(&[
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
            ]),
        )
        .unwrap();
        assert_eq!(d.conclusion, theorem);
        check(&d).unwrap();
    }

    #[test]
    fn destruct_and_cases_derivations_check() {
        let theorem = p("(p1 ∧ p2) → (p2 ∧ p1)");
        let d = script_to_derivation(
            &theorem,
            &script(&[
                "intro h1",
                "obtain h2 h3 := h1",
                "apply And.intro",
                "exact h3",
                "exact h2",
            ]),
        )
        .unwrap();
        check(&d).unwrap();

        let theorem = p("(p1 ∨ p2) → (p2 ∨ p1)");
        let d = script_to_derivation(
            &theorem,
            &script(&[
                "intro h1",
                "cases h1 with h2 h3",
                "apply Or.inr",
                "exact h2",
                "apply Or.inl",
                "exact h3",
            ]),
        )
        .unwrap();
        check(&d).unwrap();
    }

    #[test]
    fn broken_scripts_are_rejected() {
        let theorem = p("p1 → p2");
        assert!(script_to_derivation(&theorem, &script(&["intro h1", "exact h1"])).is_err());
        assert!(script_to_derivation(&theorem, &script(&["intro h1"])).is_err());
    }

    #[test]
    fn checker_rejects_forged_nodes() {
        // ⊢ p1 by "assumption" with an empty context.
        let forged = Derivation {
            context: Context::new(),
            conclusion: p("p1"),
            rule: Rule::Assumption,
        };
        assert!(check(&forged).is_err());

        // ∨-E whose right case concludes the wrong thing.
        let or_hyp = Rc::new(Derivation {
            context: [p("p1 ∨ p1")].into_iter().collect(),
            conclusion: p("p1 ∨ p1"),
            rule: Rule::Assumption,
        });
        let good_case = Rc::new(Derivation {
            context: [p("p1 ∨ p1"), p("p1")].into_iter().collect(),
            conclusion: p("p1"),
            rule: Rule::Assumption,
        });
        let bad_case = Rc::new(Derivation {
            context: [p("p1 ∨ p1"), p("p2")].into_iter().collect(),
            conclusion: p("p2"),
            rule: Rule::Assumption,
        });
        let forged = Derivation {
            context: [p("p1 ∨ p1")].into_iter().collect(),
            conclusion: p("p1"),
            rule: Rule::OrElim(or_hyp, good_case, bad_case),
        };
        assert!(check(&forged).is_err());
    }
}
