//! n-ary facts and their decomposition into binary edges.
//!
//! A fact of arity n ≥ 3 becomes a fresh hub entity `rel#k` linked to each
//! argument by a positional relation: `rel_i(hub, arg_i)` for i = 1..n.
//! Binary facts pass through unchanged; unary facts become the attribute
//! triple `(arg, rel, unary_value)`.

use super::{KgError, Result};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperFact {
    pub relation: String,
    pub args: Vec<String>,
}

impl HyperFact {
    pub fn new<S: Into<String>>(relation: S, args: impl IntoIterator<Item = S>) -> Self {
        Self {
            relation: relation.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabeledTriple {
    pub head: String,
    pub relation: String,
    pub tail: String,
}

impl LabeledTriple {
    pub fn new(
        head: impl Into<String>,
        relation: impl Into<String>,
        tail: impl Into<String>,
    ) -> Self {
        Self {
            head: head.into(),
            relation: relation.into(),
            tail: tail.into(),
        }
    }
}

/// Parses `relation(arg1,arg2,...)` with an optional trailing period.
pub fn parse_hyperfact(text: &str) -> std::result::Result<HyperFact, String> {
    let text = text.trim();
    let text = text.strip_suffix('.').unwrap_or(text).trim_end();
    let open = text
        .find('(')
        .ok_or_else(|| format!("missing `(` in `{text}`"))?;
    let close = text
        .strip_suffix(')')
        .ok_or_else(|| format!("missing closing `)` in `{text}`"))?;
    let relation = text[..open].trim();
    if relation.is_empty() {
        return Err(format!("missing relation name in `{text}`"));
    }
    let inner = &close[open + 1..];
    let args: Vec<String> = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(|a| a.trim().to_owned()).collect()
    };
    if args.iter().any(String::is_empty) {
        return Err(format!("empty argument in `{text}`"));
    }
    Ok(HyperFact {
        relation: relation.to_owned(),
        args,
    })
}

/// Stateful reification: hub names are fresh per relation.
#[derive(Debug, Clone)]
pub struct Reifier {
    counters: HashMap<String, usize>,
    unary_value: String,
}

impl Default for Reifier {
    fn default() -> Self {
        Self::new()
    }
}

impl Reifier {
    pub fn new() -> Self {
        Self::with_unary_value("true")
    }

    /// Tail label used for arity-1 facts.
    pub fn with_unary_value(value: impl Into<String>) -> Self {
        Self {
            counters: HashMap::new(),
            unary_value: value.into(),
        }
    }

    pub fn hub_label(relation: &str, k: usize) -> String {
        format!("{relation}#{k}")
    }

    pub fn positional_relation(relation: &str, i: usize) -> String {
        format!("{relation}_{i}")
    }

    pub fn reify(&mut self, fact: &HyperFact) -> Result<Vec<LabeledTriple>> {
        match fact.arity() {
            0 => Err(KgError::EmptyFact(fact.relation.clone())),
            1 => Ok(vec![LabeledTriple::new(
                fact.args[0].clone(),
                fact.relation.clone(),
                self.unary_value.clone(),
            )]),
            2 => Ok(vec![LabeledTriple::new(
                fact.args[0].clone(),
                fact.relation.clone(),
                fact.args[1].clone(),
            )]),
            _ => {
                let counter = self.counters.entry(fact.relation.clone()).or_insert(0);
                let hub = Self::hub_label(&fact.relation, *counter);
                *counter += 1;
                Ok(fact
                    .args
                    .iter()
                    .enumerate()
                    .map(|(i, arg)| {
                        LabeledTriple::new(
                            hub.clone(),
                            Self::positional_relation(&fact.relation, i + 1),
                            arg.clone(),
                        )
                    })
                    .collect())
            }
        }
    }

    /// Groups hub triples back into the facts they came from, in hub order.
    /// Triples that do not follow the hub scheme are returned as binary facts.
    pub fn reconstruct(triples: &[LabeledTriple]) -> Vec<HyperFact> {
        let mut hubs: BTreeMap<(String, usize), BTreeMap<usize, String>> = BTreeMap::new();
        let mut plain = Vec::new();
        for t in triples {
            match parse_hub(&t.head, &t.relation) {
                Some((rel, k, pos)) => {
                    hubs.entry((rel, k))
                        .or_default()
                        .insert(pos, t.tail.clone());
                }
                None => plain.push(HyperFact {
                    relation: t.relation.clone(),
                    args: vec![t.head.clone(), t.tail.clone()],
                }),
            }
        }
        plain.extend(hubs.into_iter().map(|((relation, _), args)| HyperFact {
            relation,
            args: args.into_values().collect(),
        }));
        plain
    }
}

fn parse_hub(head: &str, relation: &str) -> Option<(String, usize, usize)> {
    let (rel, k) = head.rsplit_once('#')?;
    let k: usize = k.parse().ok()?;
    let (rel2, pos) = relation.rsplit_once('_')?;
    let pos: usize = pos.parse().ok()?;
    (rel == rel2 && pos >= 1).then(|| (rel.to_owned(), k, pos))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_prolog_facts() {
        let f = parse_hyperfact("bond(m1, a1, a2, 7).").unwrap();
        assert_eq!(f.relation, "bond");
        assert_eq!(f.args, ["m1", "a1", "a2", "7"]);
        assert_eq!(parse_hyperfact("friends(marc,eve)").unwrap().arity(), 2);
        assert!(parse_hyperfact("friends marc").is_err());
        assert!(parse_hyperfact("f(a,,b)").is_err());
        assert_eq!(parse_hyperfact("p()").unwrap().arity(), 0);
    }

    #[test]
    fn positional_scheme() {
        let mut r = Reifier::new();
        let out = r
            .reify(&HyperFact::new("bond", ["m1", "a1", "a2", "7"]))
            .unwrap();
        let expect = [
            ("bond#0", "bond_1", "m1"),
            ("bond#0", "bond_2", "a1"),
            ("bond#0", "bond_3", "a2"),
            ("bond#0", "bond_4", "7"),
        ];
        assert_eq!(out.len(), 4);
        for (t, (h, rel, tl)) in out.iter().zip(expect) {
            assert_eq!(
                (t.head.as_str(), t.relation.as_str(), t.tail.as_str()),
                (h, rel, tl)
            );
        }
    }

    #[test]
    fn binary_passes_through() {
        let mut r = Reifier::new();
        let out = r
            .reify(&HyperFact::new("friends", ["marc", "eve"]))
            .unwrap();
        assert_eq!(out, vec![LabeledTriple::new("marc", "friends", "eve")]);
    }

    #[test]
    fn unary_becomes_attribute_triple() {
        let mut r = Reifier::new();
        let out = r.reify(&HyperFact::new("smokes", ["marc"])).unwrap();
        assert_eq!(out, vec![LabeledTriple::new("marc", "smokes", "true")]);
    }

    #[test]
    fn arity_zero_is_an_error() {
        let mut r = Reifier::new();
        assert!(r.reify(&HyperFact::new("p", Vec::<&str>::new())).is_err());
    }

    #[test]
    fn hubs_are_fresh() {
        let mut r = Reifier::new();
        let a = r.reify(&HyperFact::new("t", ["x", "y", "z"])).unwrap();
        let b = r.reify(&HyperFact::new("t", ["x", "y", "z"])).unwrap();
        assert_ne!(a[0].head, b[0].head);
    }

    #[test]
    fn reconstruct_inverts_reify() {
        let facts = vec![
            HyperFact::new("bond", ["m1", "a1", "a2", "7"]),
            HyperFact::new("bond", ["m1", "a2", "a3", "1"]),
            HyperFact::new("atm", ["a1", "c", "22"]),
        ];
        let mut r = Reifier::new();
        let triples: Vec<_> = facts.iter().flat_map(|f| r.reify(f).unwrap()).collect();
        let mut back = Reifier::reconstruct(&triples);
        let mut expect = facts.clone();
        back.sort_by(|a, b| (&a.relation, &a.args).cmp(&(&b.relation, &b.args)));
        expect.sort_by(|a, b| (&a.relation, &a.args).cmp(&(&b.relation, &b.args)));
        assert_eq!(back, expect);
    }
}
