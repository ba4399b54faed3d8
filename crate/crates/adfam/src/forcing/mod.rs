//! A generic dense-rule chain engine and the concrete posets it drives.
//!
//! The engine builds a descending chain of conditions, extending through a
//! list of dense rules under a schedule. Every extension is re-verified
//! against the order and the rule's target predicate before it enters the
//! chain, and a failed extension returns the chain built so far together
//! with the name of the rule that could not act.

mod branch;
mod hidden_tree;
mod luzin;
mod pk;

pub use branch::{BranchCond, BranchPoset};
pub use hidden_tree::{tail_of_branch_check, HiddenTreeCond, HiddenTreePoset};
pub use luzin::{compatibility_probe, CompatibilityProbe, LuzinPoset};
pub use pk::{frozen_meets_hold, PkCond, PkPoset};

use crate::error::Error;
use serde::Serialize;

/// A partial order of conditions with a maximum element.
pub trait Poset {
    type Cond: Clone + PartialEq + std::fmt::Debug + Serialize;

    /// The maximum condition.
    fn root(&self) -> Self::Cond;

    /// `lower` extends (is stronger than) `upper`.
    fn leq(&self, lower: &Self::Cond, upper: &Self::Cond) -> bool;

    /// Membership in the condition universe.
    fn validate(&self, _cond: &Self::Cond) -> crate::Result<()> {
        Ok(())
    }
}

type HoldsFn<'p, P> = Box<dyn Fn(&P, &<P as Poset>::Cond) -> bool + 'p>;
type ExtendFn<'p, P> =
    Box<dyn Fn(&P, &<P as Poset>::Cond) -> crate::Result<<P as Poset>::Cond> + 'p>;

/// A dense set given constructively: a target predicate plus a total
/// extension strategy that lands inside it.
pub struct DenseRule<'p, P: Poset> {
    pub name: String,
    holds: HoldsFn<'p, P>,
    extend: ExtendFn<'p, P>,
}

impl<'p, P: Poset> DenseRule<'p, P> {
    pub fn new(
        name: impl Into<String>,
        holds: impl Fn(&P, &P::Cond) -> bool + 'p,
        extend: impl Fn(&P, &P::Cond) -> crate::Result<P::Cond> + 'p,
    ) -> Self {
        DenseRule {
            name: name.into(),
            holds: Box::new(holds),
            extend: Box::new(extend),
        }
    }

    pub fn holds(&self, poset: &P, cond: &P::Cond) -> bool {
        (self.holds)(poset, cond)
    }

    pub fn extend(&self, poset: &P, cond: &P::Cond) -> crate::Result<P::Cond> {
        (self.extend)(poset, cond)
    }
}

/// One chain step: the rule that was met and the condition after it.
#[derive(Clone, Debug, Serialize)]
pub struct ChainStep<C> {
    pub rule: Option<String>,
    pub cond: C,
}

/// A descending chain of conditions with the rules met along the way.
#[derive(Clone, Debug, Serialize)]
pub struct FilterChain<C> {
    pub steps: Vec<ChainStep<C>>,
}

impl<C: Clone> FilterChain<C> {
    pub fn start(cond: C) -> Self {
        FilterChain {
            steps: vec![ChainStep { rule: None, cond }],
        }
    }

    pub fn last(&self) -> &C {
        &self.steps.last().expect("chains start nonempty").cond
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Extension schedule over the rule list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// Visit every rule in order, `rounds` times.
    RoundRobin { rounds: usize },
    /// Repeatedly extend through the first unmet rule, up to `max_steps`
    /// extensions, until every rule holds.
    Priority { max_steps: usize },
}

/// A failed run: the chain built so far plus the rule that exhausted.
#[derive(Debug)]
pub struct RunError<C> {
    pub chain: FilterChain<C>,
    pub rule: String,
    pub source: Error,
}

/// Run the engine: a chain from `start` meeting each rule per the
/// schedule. Each successful extension is re-verified: the new condition
/// must be valid, below the previous one, and inside the rule's target.
pub fn rs_run<P: Poset>(
    poset: &P,
    rules: &[DenseRule<P>],
    start: P::Cond,
    schedule: Schedule,
) -> std::result::Result<FilterChain<P::Cond>, Box<RunError<P::Cond>>> {
    poset.validate(&start).map_err(|e| {
        Box::new(RunError {
            chain: FilterChain::start(start.clone()),
            rule: "<start>".into(),
            source: e,
        })
    })?;
    let mut chain = FilterChain::start(start);

    let meet = |chain: &mut FilterChain<P::Cond>,
                rule: &DenseRule<P>|
     -> std::result::Result<(), Box<RunError<P::Cond>>> {
        let cur = chain.last().clone();
        if rule.holds(poset, &cur) {
            chain.steps.push(ChainStep {
                rule: Some(rule.name.clone()),
                cond: cur,
            });
            return Ok(());
        }
        match rule.extend(poset, &cur) {
            Ok(next) => {
                assert!(
                    poset.validate(&next).is_ok(),
                    "rule {} left the condition universe",
                    rule.name
                );
                assert!(poset.leq(&next, &cur), "rule {} broke the order", rule.name);
                assert!(
                    rule.holds(poset, &next),
                    "rule {} missed its own target",
                    rule.name
                );
                chain.steps.push(ChainStep {
                    rule: Some(rule.name.clone()),
                    cond: next,
                });
                Ok(())
            }
            Err(e) => Err(Box::new(RunError {
                chain: chain.clone(),
                rule: rule.name.clone(),
                source: e,
            })),
        }
    };

    match schedule {
        Schedule::RoundRobin { rounds } => {
            for _ in 0..rounds {
                for rule in rules {
                    meet(&mut chain, rule)?;
                }
            }
        }
        Schedule::Priority { max_steps } => {
            for _ in 0..max_steps {
                let Some(rule) = rules.iter().find(|r| !r.holds(poset, chain.last())) else {
                    break;
                };
                meet(&mut chain, rule)?;
            }
            if let Some(rule) = rules.iter().find(|r| !r.holds(poset, chain.last())) {
                return Err(Box::new(RunError {
                    chain,
                    rule: rule.name.clone(),
                    source: Error::RuleExhausted {
                        rule: rule.name.clone(),
                        reason: "step budget exhausted before every rule was met".into(),
                    },
                }));
            }
        }
    }
    Ok(chain)
}

/// Order sanity over all conditions of a chain: reflexivity everywhere and
/// transitivity of consecutive links against every earlier condition.
pub fn chain_order_sane<P: Poset>(poset: &P, chain: &FilterChain<P::Cond>) -> bool {
    let conds: Vec<&P::Cond> = chain.steps.iter().map(|s| &s.cond).collect();
    conds.iter().all(|c| poset.leq(c, c))
        && conds.windows(2).all(|w| poset.leq(w[1], w[0]))
        && conds
            .iter()
            .enumerate()
            .all(|(i, c)| conds[i..].iter().all(|d| poset.leq(d, c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bit strings under extension, encoded as (len, bits).
    struct Strings;
    impl Poset for Strings {
        type Cond = (u32, u64);
        fn root(&self) -> Self::Cond {
            (0, 0)
        }
        fn leq(&self, lower: &Self::Cond, upper: &Self::Cond) -> bool {
            lower.0 >= upper.0 && (lower.1 >> (lower.0 - upper.0)) == upper.1
        }
    }

    fn length_rule<'p>(n: u32) -> DenseRule<'p, Strings> {
        DenseRule::new(
            format!("length>={n}"),
            move |_, c: &(u32, u64)| c.0 >= n,
            move |_, c: &(u32, u64)| {
                let add = n.saturating_sub(c.0).max(1);
                Ok((c.0 + add, c.1 << add))
            },
        )
    }

    #[test]
    fn round_robin_reaches_all_lengths() {
        let rules: Vec<DenseRule<Strings>> = (1..=8).map(length_rule).collect();
        let chain = rs_run(&Strings, &rules, (0, 0), Schedule::RoundRobin { rounds: 1 }).unwrap();
        assert_eq!(chain.last().0, 8);
        assert!(chain_order_sane(&Strings, &chain));
    }

    #[test]
    fn empty_rule_list_is_the_start() {
        let chain = rs_run(
            &Strings,
            &[],
            (3, 0b101),
            Schedule::RoundRobin { rounds: 5 },
        )
        .unwrap();
        assert_eq!(chain.len(), 1);
        assert_eq!(*chain.last(), (3, 0b101));
    }

    #[test]
    fn priority_stops_when_everything_holds() {
        let rules: Vec<DenseRule<Strings>> = vec![length_rule(4), length_rule(2)];
        let chain = rs_run(
            &Strings,
            &rules,
            (0, 0),
            Schedule::Priority { max_steps: 30 },
        )
        .unwrap();
        assert!(chain.last().0 >= 4);
    }

    #[test]
    fn failing_rule_reports_the_partial_chain() {
        let rules = vec![DenseRule::<Strings>::new(
            "never",
            |_, _| false,
            |_, _| {
                Err(Error::RuleExhausted {
                    rule: "never".into(),
                    reason: "no extension exists".into(),
                })
            },
        )];
        let err = rs_run(&Strings, &rules, (0, 0), Schedule::RoundRobin { rounds: 1 }).unwrap_err();
        assert_eq!(err.rule, "never");
        assert_eq!(err.chain.len(), 1);
    }
}
