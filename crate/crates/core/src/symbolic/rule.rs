use crate::kg::{EntityId, RelationId};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(EntityId),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_owned())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

/// `relation(args[0], args[1])`, or when `inverted` the atom written
/// `inv_relation(args[0], args[1])`, which holds iff `relation(args[1], args[0])`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub relation: RelationId,
    pub inverted: bool,
    pub args: [Term; 2],
}

impl Atom {
    pub fn new(relation: RelationId, a: Term, b: Term) -> Self {
        Self {
            relation,
            inverted: false,
            args: [a, b],
        }
    }

    pub fn inverse(relation: RelationId, a: Term, b: Term) -> Self {
        Self {
            relation,
            inverted: true,
            args: [a, b],
        }
    }

    /// `(subject, object)` of the underlying triple.
    pub fn oriented(&self) -> (&Term, &Term) {
        if self.inverted {
            (&self.args[1], &self.args[0])
        } else {
            (&self.args[0], &self.args[1])
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> + '_ {
        self.args.iter().filter_map(Term::as_var)
    }
}

/// An edge label along a chain: a relation walked forwards or backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Step {
    pub relation: RelationId,
    pub inverted: bool,
}

/// `head :- body` with integer prediction counts on the train split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornRule {
    pub head: Atom,
    pub body: Vec<Atom>,
    /// Distinct (X, Y) predictions that are train facts.
    pub correct: u64,
    /// Distinct (X, Y) predictions.
    pub total: u64,
}

impl HornRule {
    /// Closed chain `target(X,Y) :- s1(X,Z1), s2(Z1,Z2), ..., sk(Zk-1,Y)`.
    pub fn chain(target: RelationId, steps: &[Step], correct: u64, total: u64) -> Self {
        let var = |i: usize, k: usize| {
            if i == 0 {
                Term::var("X")
            } else if i == k {
                Term::var("Y")
            } else {
                Term::Var(format!("Z{i}"))
            }
        };
        let k = steps.len();
        let body = steps
            .iter()
            .enumerate()
            .map(|(i, s)| Atom {
                relation: s.relation,
                inverted: s.inverted,
                args: [var(i, k), var(i + 1, k)],
            })
            .collect();
        Self {
            head: Atom::new(target, Term::var("X"), Term::var("Y")),
            body,
            correct,
            total,
        }
    }

    pub fn confidence(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }

    pub fn coverage(&self) -> u64 {
        self.total
    }

    /// Distinct relations used in the body.
    pub fn body_relations(&self) -> BTreeSet<RelationId> {
        self.body.iter().map(|a| a.relation).collect()
    }

    /// Steps of a chain-shaped body, if it is one.
    pub fn as_chain(&self) -> Option<Vec<Step>> {
        let (x, y) = (self.head.args[0].as_var()?, self.head.args[1].as_var()?);
        let mut cur = x;
        let mut steps = Vec::new();
        for (i, a) in self.body.iter().enumerate() {
            if a.args[0].as_var()? != cur {
                return None;
            }
            cur = a.args[1].as_var()?;
            if i + 1 < self.body.len() && (cur == x || cur == y) {
                return None;
            }
            steps.push(Step {
                relation: a.relation,
                inverted: a.inverted,
            });
        }
        (cur == y && !steps.is_empty()).then_some(steps)
    }

    /// Confidence descending (exact), then coverage descending, then body.
    pub fn theory_order(&self, other: &Self) -> Ordering {
        let lhs = self.correct as u128 * other.total as u128;
        let rhs = other.correct as u128 * self.total as u128;
        rhs.cmp(&lhs)
            .then(other.total.cmp(&self.total))
            .then_with(|| self.body.cmp(&other.body))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DegenerateReason {
    /// A head variable does not occur in the body.
    UnusedHeadVariable(String),
    /// Both head variables occur, but no chain of shared variables links them.
    HeadArgumentsDisconnected,
    /// A head argument is a constant.
    ConstantInHead,
}

impl fmt::Display for DegenerateReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegenerateReason::UnusedHeadVariable(v) => write!(f, "{v} unused"),
            DegenerateReason::HeadArgumentsDisconnected => {
                f.write_str("head arguments disconnected")
            }
            DegenerateReason::ConstantInHead => f.write_str("constant in head"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Keep,
    Drop(DegenerateReason),
}

/// Rejects rules where a head argument does not matter or the head
/// arguments are not linked through the body.
pub fn filter_degenerate(rule: &HornRule) -> Verdict {
    let (Some(x), Some(y)) = (rule.head.args[0].as_var(), rule.head.args[1].as_var()) else {
        return Verdict::Drop(DegenerateReason::ConstantInHead);
    };
    let occurs = |v: &str| rule.body.iter().any(|a| a.vars().any(|w| w == v));
    for v in [x, y] {
        if !occurs(v) {
            return Verdict::Drop(DegenerateReason::UnusedHeadVariable(v.to_owned()));
        }
    }
    if x == y {
        return Verdict::Keep;
    }
    // union-find over variables that share an atom
    let mut parent: BTreeMap<&str, &str> = BTreeMap::new();
    fn find<'a>(p: &mut BTreeMap<&'a str, &'a str>, v: &'a str) -> &'a str {
        let mut cur = v;
        while let Some(&next) = p.get(cur) {
            if next == cur {
                break;
            }
            cur = next;
        }
        p.insert(v, cur);
        cur
    }
    for a in &rule.body {
        if let (Some(u), Some(v)) = (a.args[0].as_var(), a.args[1].as_var()) {
            parent.entry(u).or_insert(u);
            parent.entry(v).or_insert(v);
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent.insert(ru, rv);
            }
        }
    }
    if parent.contains_key(x)
        && parent.contains_key(y)
        && find(&mut parent, x) == find(&mut parent, y)
    {
        Verdict::Keep
    } else {
        Verdict::Drop(DegenerateReason::HeadArgumentsDisconnected)
    }
}
