//! Backtracking evaluation of rule bodies against the train split.

use super::rule::{Atom, HornRule, Term};
use super::{Result, SymbolicError};
use crate::kg::{EntityId, KnowledgeGraph, RelationId, Split, Triple};
use std::collections::HashMap;
use std::ops::ControlFlow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Var(usize),
    Const(EntityId),
}

/// Binds `slot` to `e`; `None` on conflict, `Some(Some(v))` when `v` was newly bound.
fn bind(slot: Slot, e: EntityId, b: &mut [Option<EntityId>]) -> Option<Option<usize>> {
    match slot {
        Slot::Const(c) => (c == e).then_some(None),
        Slot::Var(v) => match b[v] {
            Some(cur) => (cur == e).then_some(None),
            None => {
                b[v] = Some(e);
                Some(Some(v))
            }
        },
    }
}

#[derive(Debug, Clone)]
struct CompiledAtom {
    relation: RelationId,
    subject: Slot,
    object: Slot,
}

/// A rule body with variables numbered; head X is slot 0 and head Y slot 1.
#[derive(Debug, Clone)]
pub struct CompiledRule {
    atoms: Vec<CompiledAtom>,
    num_vars: usize,
}

impl CompiledRule {
    pub fn new(rule: &HornRule) -> Result<Self> {
        let (Some(x), Some(y)) = (rule.head.args[0].as_var(), rule.head.args[1].as_var()) else {
            return Err(SymbolicError::Rule("constant in rule head".into()));
        };
        if x == y {
            return Err(SymbolicError::Rule(
                "head arguments must be distinct variables".into(),
            ));
        }
        let mut names: HashMap<String, usize> =
            HashMap::from([(x.to_owned(), 0), (y.to_owned(), 1)]);
        let mut slot = |t: &Term| -> Slot {
            match t {
                Term::Const(e) => Slot::Const(*e),
                Term::Var(v) => {
                    let next = names.len();
                    Slot::Var(*names.entry(v.clone()).or_insert(next))
                }
            }
        };
        let atoms: Vec<CompiledAtom> = rule
            .body
            .iter()
            .map(|a: &Atom| {
                let (s, o) = a.oriented();
                let subject = slot(s);
                CompiledAtom {
                    relation: a.relation,
                    subject,
                    object: slot(o),
                }
            })
            .collect();
        Ok(Self {
            atoms,
            num_vars: names.len(),
        })
    }

    fn uses(&self, var: usize) -> bool {
        self.atoms
            .iter()
            .any(|a| a.subject == Slot::Var(var) || a.object == Slot::Var(var))
    }
}

/// Train triples grouped by relation, plus the train adjacency index.
pub struct TrainView<'a> {
    kg: &'a KnowledgeGraph,
    by_relation: Vec<Vec<(EntityId, EntityId)>>,
}

impl<'a> TrainView<'a> {
    pub fn new(kg: &'a KnowledgeGraph) -> Self {
        let mut by_relation = vec![Vec::new(); kg.num_relations()];
        for t in kg.triples(Split::Train) {
            by_relation[t.relation.index()].push((t.head, t.tail));
        }
        Self { kg, by_relation }
    }

    pub fn kg(&self) -> &'a KnowledgeGraph {
        self.kg
    }

    fn holds(&self, r: RelationId, s: EntityId, o: EntityId) -> bool {
        self.kg.contains(Split::Train, &Triple::new(s, r, o))
    }

    /// Calls `visit` for every grounding of the body consistent with `bindings`.
    fn solve(
        &self,
        rule: &CompiledRule,
        done: &mut [bool],
        bindings: &mut [Option<EntityId>],
        visit: &mut dyn FnMut(&[Option<EntityId>]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let value = |s: Slot, b: &[Option<EntityId>]| match s {
            Slot::Const(e) => Some(e),
            Slot::Var(v) => b[v],
        };
        // most constrained atom first
        let next = (0..rule.atoms.len())
            .filter(|&i| !done[i])
            .max_by_key(|&i| {
                let a = &rule.atoms[i];
                (
                    value(a.subject, bindings).is_some() as u8
                        + value(a.object, bindings).is_some() as u8,
                    usize::MAX - i,
                )
            });
        let Some(i) = next else {
            return visit(bindings);
        };
        let a = rule.atoms[i].clone();
        done[i] = true;
        let index = self.kg.index(Split::Train);
        let flow = match (value(a.subject, bindings), value(a.object, bindings)) {
            (Some(s), Some(o)) => {
                if self.holds(a.relation, s, o) {
                    self.solve(rule, done, bindings, visit)
                } else {
                    ControlFlow::Continue(())
                }
            }
            (Some(s), None) => {
                let mut flow = ControlFlow::Continue(());
                for &o in index.tails(a.relation, s) {
                    flow = self.extend(rule, &a, s, o, done, bindings, visit);
                    if flow.is_break() {
                        break;
                    }
                }
                flow
            }
            (None, Some(o)) => {
                let mut flow = ControlFlow::Continue(());
                for &s in index.heads(a.relation, o) {
                    flow = self.extend(rule, &a, s, o, done, bindings, visit);
                    if flow.is_break() {
                        break;
                    }
                }
                flow
            }
            (None, None) => {
                let mut flow = ControlFlow::Continue(());
                for &(s, o) in self
                    .by_relation
                    .get(a.relation.index())
                    .map_or(&[][..], Vec::as_slice)
                {
                    flow = self.extend(rule, &a, s, o, done, bindings, visit);
                    if flow.is_break() {
                        break;
                    }
                }
                flow
            }
        };
        done[i] = false;
        flow
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        rule: &CompiledRule,
        a: &CompiledAtom,
        s: EntityId,
        o: EntityId,
        done: &mut [bool],
        b: &mut [Option<EntityId>],
        visit: &mut dyn FnMut(&[Option<EntityId>]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some(bs) = bind(a.subject, s, b) else {
            return ControlFlow::Continue(());
        };
        let flow = match bind(a.object, o, b) {
            Some(bo) => {
                let flow = self.solve(rule, done, b, visit);
                if let Some(v) = bo {
                    b[v] = None;
                }
                flow
            }
            None => ControlFlow::Continue(()),
        };
        if let Some(v) = bs {
            b[v] = None;
        }
        flow
    }

    fn run(
        &self,
        rule: &CompiledRule,
        x: Option<EntityId>,
        y: Option<EntityId>,
        visit: &mut dyn FnMut(&[Option<EntityId>]) -> ControlFlow<()>,
    ) {
        let mut bindings = vec![None; rule.num_vars];
        bindings[0] = x;
        bindings[1] = y;
        let mut done = vec![false; rule.atoms.len()];
        let _ = self.solve(rule, &mut done, &mut bindings, visit);
    }

    /// Whether the body has a grounding with X = `x` and Y = `y`.
    pub fn fires(&self, rule: &CompiledRule, x: EntityId, y: EntityId) -> bool {
        let mut found = false;
        self.run(rule, Some(x), Some(y), &mut |_| {
            found = true;
            ControlFlow::Break(())
        });
        found
    }

    /// Marks every Y the rule predicts for X = `x` (or every X for Y = `y`).
    /// A head variable absent from the body matches every entity.
    pub fn predictions_for(
        &self,
        rule: &CompiledRule,
        fixed: (Option<EntityId>, Option<EntityId>),
        out: &mut [bool],
    ) {
        let free = if fixed.0.is_some() { 1 } else { 0 };
        if !rule.uses(free) {
            let mut any = false;
            self.run(rule, fixed.0, fixed.1, &mut |_| {
                any = true;
                ControlFlow::Break(())
            });
            if any {
                out.iter_mut().for_each(|m| *m = true);
            }
            return;
        }
        self.run(rule, fixed.0, fixed.1, &mut |b| {
            if let Some(e) = b[free] {
                out[e.index()] = true;
            }
            ControlFlow::Continue(())
        });
    }

    /// Distinct (X, Y) pairs predicted by the rule. Head variables absent from
    /// the body range over all entities.
    pub fn all_predictions(&self, rule: &CompiledRule) -> Vec<(EntityId, EntityId)> {
        let n = self.kg.num_entities() as u32;
        let mut pairs = std::collections::BTreeSet::new();
        let (ux, uy) = (rule.uses(0), rule.uses(1));
        self.run(rule, None, None, &mut |b| {
            let xs: Vec<EntityId> = if ux {
                vec![b[0].unwrap()]
            } else {
                (0..n).map(EntityId).collect()
            };
            let ys: Vec<EntityId> = if uy {
                vec![b[1].unwrap()]
            } else {
                (0..n).map(EntityId).collect()
            };
            for &x in &xs {
                for &y in &ys {
                    pairs.insert((x, y));
                }
            }
            ControlFlow::Continue(())
        });
        pairs.into_iter().collect()
    }
}
