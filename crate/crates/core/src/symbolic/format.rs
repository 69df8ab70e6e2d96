//! Plain-text rule files, one rule per line:
//!
//! ```text
//! 0.75<TAB>8<TAB>r2(X,Y) :- r1(X,Z1), inv_r3(Z1,Y).
//! ```
//!
//! Confidence, coverage, then the rule. Identifiers starting with an
//! uppercase letter or `_` are variables; anything else is an entity label.
//! A body relation `inv_r` denotes `r` with its arguments swapped, unless the
//! graph has a relation literally named `inv_r`. Lines starting with `#` are
//! comments.

use super::mine::RuleTheory;
use super::rule::{Atom, HornRule, Term};
use super::{Result, SymbolicError};
use crate::kg::{KnowledgeGraph, RelationId};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

pub const INVERSE_PREFIX: &str = "inv_";

fn term_text(kg: &KnowledgeGraph, t: &Term) -> String {
    match t {
        Term::Var(v) => v.clone(),
        Term::Const(e) => kg.entity_label(*e).to_owned(),
    }
}

fn atom_text(kg: &KnowledgeGraph, a: &Atom) -> String {
    let prefix = if a.inverted { INVERSE_PREFIX } else { "" };
    format!(
        "{prefix}{}({},{})",
        kg.relation_label(a.relation),
        term_text(kg, &a.args[0]),
        term_text(kg, &a.args[1])
    )
}

/// `head(X,Y) :- b1(X,Z1), b2(Z1,Y).`
pub fn rule_text(kg: &KnowledgeGraph, rule: &HornRule) -> String {
    let body: Vec<String> = rule.body.iter().map(|a| atom_text(kg, a)).collect();
    format!("{} :- {}.", atom_text(kg, &rule.head), body.join(", "))
}

pub fn write_rules<W: Write>(
    mut w: W,
    kg: &KnowledgeGraph,
    theories: &[RuleTheory],
) -> std::io::Result<()> {
    for th in theories {
        for r in &th.rules {
            writeln!(
                w,
                "{}\t{}\t{}",
                r.confidence(),
                r.coverage(),
                rule_text(kg, r)
            )?;
        }
    }
    Ok(())
}

fn parse_atom(kg: &KnowledgeGraph, text: &str, line: usize) -> Result<Atom> {
    let err = |reason: String| SymbolicError::Parse { line, reason };
    let text = text.trim();
    let open = text
        .find('(')
        .ok_or_else(|| err(format!("missing `(` in `{text}`")))?;
    let inner = text[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| err(format!("missing `)` in `{text}`")))?;
    let name = text[..open].trim();
    let (relation, inverted) = match kg.relation(name) {
        Some(r) => (r, false),
        None => match name
            .strip_prefix(INVERSE_PREFIX)
            .and_then(|n| kg.relation(n))
        {
            Some(r) => (r, true),
            None => return Err(SymbolicError::UnknownRelation(name.to_owned())),
        },
    };
    let args: Vec<&str> = inner.split(',').map(str::trim).collect();
    let [a, b] = args.as_slice() else {
        return Err(err(format!("atom `{text}` must have two arguments")));
    };
    let term = |s: &str| -> Result<Term> {
        let first = s
            .chars()
            .next()
            .ok_or_else(|| err(format!("empty argument in `{text}`")))?;
        if first.is_uppercase() || first == '_' {
            Ok(Term::Var(s.to_owned()))
        } else {
            kg.entity(s)
                .map(Term::Const)
                .ok_or_else(|| SymbolicError::UnknownEntity(s.to_owned()))
        }
    };
    Ok(Atom {
        relation,
        inverted,
        args: [term(a)?, term(b)?],
    })
}

/// Splits on commas that are not inside parentheses.
fn split_atoms(body: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&body[start..]);
    out
}

pub fn parse_rule_line(kg: &KnowledgeGraph, text: &str, line: usize) -> Result<HornRule> {
    let err = |reason: String| SymbolicError::Parse { line, reason };
    let mut fields = text.splitn(3, '\t');
    let (Some(conf), Some(cov), Some(rule)) = (fields.next(), fields.next(), fields.next()) else {
        return Err(err(
            "expected confidence, coverage and rule separated by tabs".into(),
        ));
    };
    let conf: f64 = conf
        .trim()
        .parse()
        .map_err(|_| err(format!("bad confidence `{conf}`")))?;
    let total: u64 = cov
        .trim()
        .parse()
        .map_err(|_| err(format!("bad coverage `{cov}`")))?;
    if !(0.0..=1.0).contains(&conf) {
        return Err(err(format!("confidence {conf} outside [0, 1]")));
    }
    let correct = (conf * total as f64).round() as u64;
    if total > 0 && (correct as f64 / total as f64 - conf).abs() > 1e-9 {
        return Err(err(format!(
            "confidence {conf} is not a ratio over coverage {total}"
        )));
    }
    let rule = rule.trim();
    let rule = rule.strip_suffix('.').unwrap_or(rule);
    let (head, body) = rule
        .split_once(":-")
        .ok_or_else(|| err("missing `:-`".into()))?;
    let head = parse_atom(kg, head, line)?;
    if head.inverted {
        return Err(err("rule head cannot be inverted".into()));
    }
    let body = split_atoms(body)
        .into_iter()
        .map(|a| parse_atom(kg, a, line))
        .collect::<Result<Vec<_>>>()?;
    Ok(HornRule {
        head,
        body,
        correct,
        total,
    })
}

/// Reads a rule file into one theory per head relation, ordered by relation id.
pub fn read_rules<R: BufRead>(source: R, kg: &KnowledgeGraph) -> Result<Vec<RuleTheory>> {
    let mut by_target: BTreeMap<RelationId, Vec<HornRule>> = BTreeMap::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let rule = parse_rule_line(kg, &line, i + 1)?;
        by_target.entry(rule.head.relation).or_default().push(rule);
    }
    Ok(by_target
        .into_iter()
        .map(|(t, rules)| RuleTheory::new(t, rules))
        .collect())
}
