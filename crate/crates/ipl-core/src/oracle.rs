//! Independent IPL provability oracle.
//!
//! Decides `⊢ A` by exhaustive search in a contraction-free sequent calculus
//! (G4ip): the left-implication rule is split by the shape of the premise, so
//! every rule strictly decreases a well-founded measure and the search needs
//! no loop checking. Shares nothing with the kernel or the focused search —
//! it operates directly on `Proposition` values — so it can audit both.

use crate::prop::Proposition;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

type Context = BTreeSet<Proposition>;

/// True iff `theorem` is provable in intuitionistic propositional logic.
pub fn decide_oracle(theorem: &Proposition) -> bool {
    let mut memo = BTreeMap::new();
    prove(Context::new(), theorem.clone(), &mut memo)
}

fn prove(
    mut ctx: Context,
    mut goal: Proposition,
    memo: &mut BTreeMap<(Vec<Proposition>, Proposition), bool>,
) -> bool {
    // Invertible right rules.
    loop {
        match goal {
            Proposition::Top => return true,
            Proposition::Imp(a, b) => {
                ctx.insert(*a);
                goal = *b;
            }
            Proposition::And(a, b) => {
                return prove(ctx.clone(), *a, memo) && prove(ctx, *b, memo);
            }
            _ => break,
        }
    }

    // Invertible left rules, saturated to a fixpoint. Each replacement is
    // provability-preserving in both directions.
    loop {
        if ctx.contains(&Proposition::Bot) || ctx.contains(&goal) {
            return true;
        }
        let mut action = None;
        for h in &ctx {
            match h {
                Proposition::Top => {
                    action = Some((h.clone(), Saturate::Drop));
                    break;
                }
                Proposition::And(a, b) => {
                    action = Some((
                        h.clone(),
                        Saturate::Replace(alloc::vec![(**a).clone(), (**b).clone()]),
                    ));
                    break;
                }
                Proposition::Or(a, b) => {
                    action = Some((h.clone(), Saturate::Branch((**a).clone(), (**b).clone())));
                    break;
                }
                Proposition::Imp(premise, conclusion) => match &**premise {
                    Proposition::Top => {
                        action = Some((h.clone(), Saturate::Replace(alloc::vec![(**conclusion).clone()])));
                        break;
                    }
                    Proposition::Bot => {
                        action = Some((h.clone(), Saturate::Drop));
                        break;
                    }
                    Proposition::And(a, b) => {
                        // (A∧B)→C becomes A→(B→C).
                        let curried = Proposition::imp(
                            (**a).clone(),
                            Proposition::imp((**b).clone(), (**conclusion).clone()),
                        );
                        action = Some((h.clone(), Saturate::Replace(alloc::vec![curried])));
                        break;
                    }
                    Proposition::Or(a, b) => {
                        // (A∨B)→C becomes A→C and B→C.
                        let split = alloc::vec![
                            Proposition::imp((**a).clone(), (**conclusion).clone()),
                            Proposition::imp((**b).clone(), (**conclusion).clone()),
                        ];
                        action = Some((h.clone(), Saturate::Replace(split)));
                        break;
                    }
                    Proposition::Atom(_) if ctx.contains(premise) => {
                        // P→B with P present: keep P, reduce to B.
                        action = Some((h.clone(), Saturate::Replace(alloc::vec![(**conclusion).clone()])));
                        break;
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        let Some((hyp, step)) = action else { break };
        ctx.remove(&hyp);
        match step {
            Saturate::Drop => {}
            Saturate::Replace(props) => ctx.extend(props),
            Saturate::Branch(a, b) => {
                let mut left = ctx.clone();
                left.insert(a);
                let mut right = ctx;
                right.insert(b);
                return prove(left, goal.clone(), memo) && prove(right, goal, memo);
            }
        }
    }

    // Saturated sequent: only the non-invertible choices remain. Memoize —
    // provability is a pure function of the sequent, and the choice points
    // revisit sequents heavily.
    let key = (ctx.iter().cloned().collect::<Vec<_>>(), goal.clone());
    if let Some(&known) = memo.get(&key) {
        return known;
    }

    let mut provable = false;
    if let Proposition::Or(a, b) = &goal {
        provable = prove(ctx.clone(), (**a).clone(), memo)
            || prove(ctx.clone(), (**b).clone(), memo);
    }
    if !provable {
        for h in &ctx {
            let Proposition::Imp(premise, conclusion) = h else { continue };
            let Proposition::Imp(_, b) = &**premise else { continue };
            // (A→B)→C: prove A→B with B→C in place of the hypothesis, then
            // continue with C.
            let mut left = ctx.clone();
            left.remove(h);
            left.insert(Proposition::imp((**b).clone(), (**conclusion).clone()));
            if prove(left, (**premise).clone(), memo) {
                let mut right = ctx.clone();
                right.remove(h);
                right.insert((**conclusion).clone());
                if prove(right, goal.clone(), memo) {
                    provable = true;
                    break;
                }
            }
        }
    }
    memo.insert(key, provable);
    provable
}

enum Saturate {
    Drop,
    Replace(Vec<Proposition>),
    Branch(Proposition, Proposition),
}
