//! Proof trees: checking, metrics, the ogroup-width bound and normalization.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cirquent::Cirquent;
use crate::formula::Formula;
use crate::rules::{self, RuleApplication, RuleError, RuleKind, SystemId};

/// A proof node: a cirquent, the rule deriving it, and the premise subproofs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proof {
    pub cirquent: Cirquent,
    pub rule: RuleApplication,
    pub premises: Vec<Proof>,
}

impl Proof {
    /// Builds a node by applying `rule` to the premises' conclusions.
    pub fn derive(rule: RuleApplication, premises: Vec<Proof>) -> Result<Proof, RuleError> {
        let refs: Vec<&Cirquent> = premises.iter().map(|p| &p.cirquent).collect();
        let cirquent = rules::apply(&rule, &refs)?;
        Ok(Proof { cirquent, rule, premises })
    }

    /// Stacks a chain of one-premise rules on top of `self`.
    pub fn extend(self, chain: &[RuleApplication]) -> Result<Proof, RuleError> {
        let mut p = self;
        for r in chain {
            p = Proof::derive(r.clone(), vec![p])?;
        }
        Ok(p)
    }

    /// Visits every node, parents before children.
    pub fn for_each_node<'a>(&'a self, mut visit: impl FnMut(&'a Proof)) {
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            visit(node);
            stack.extend(node.premises.iter().rev());
        }
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.for_each_node(|_| n += 1);
        n
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("proof serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("proof serializes")
    }

    /// Parses proof JSON of any nesting depth.
    pub fn from_json(text: &str) -> Result<Proof, serde_json::Error> {
        let mut de = serde_json::Deserializer::from_str(text);
        de.disable_recursion_limit();
        let p = Proof::deserialize(&mut de)?;
        de.end()?;
        Ok(p)
    }
}

/// One problem found by the checker.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    /// Premise indices from the root to the offending node.
    pub path: Vec<usize>,
    pub rule: RuleKind,
    pub code: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at root")?;
        for p in &self.path {
            write!(f, "/{p}")?;
        }
        write!(f, " ({}): {} {}", self.rule, self.code, self.message)
    }
}

/// Checks every node against `system`, collecting all diagnostics.
pub fn check(system: SystemId, proof: &Proof) -> Result<(), Vec<Diagnostic>> {
    let mut out = Vec::new();
    let mut stack: Vec<(&Proof, Vec<usize>)> = vec![(proof, Vec::new())];
    while let Some((node, path)) = stack.pop() {
        let kind = node.rule.kind();
        let mut report = |code: &str, message: String| {
            out.push(Diagnostic { path: path.clone(), rule: kind, code: code.to_string(), message });
        };
        if !system.admits(kind) {
            report("RULE_NOT_IN_SYSTEM", format!("{kind} is not a rule of {system}"));
        }
        let refs: Vec<&Cirquent> = node.premises.iter().map(|p| &p.cirquent).collect();
        match rules::apply(&node.rule, &refs) {
            Ok(c) if c == node.cirquent => {}
            Ok(c) => report("REPLAY_MISMATCH", format!("rule yields `{c}` but the node holds `{}`", node.cirquent)),
            Err(e) => report(e.code(), e.to_string()),
        }
        for (k, child) in node.premises.iter().enumerate().rev() {
            let mut child_path = path.clone();
            child_path.push(k);
            stack.push((child, child_path));
        }
    }
    out.sort_by(|a, b| a.path.cmp(&b.path));
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofMetrics {
    /// Sum of the sizes of all cirquents in the proof.
    pub size: usize,
    pub rule_count: usize,
    pub per_rule: BTreeMap<RuleKind, usize>,
    pub max_width: usize,
}

impl ProofMetrics {
    pub fn exchange_count(&self) -> usize {
        self.per_rule.iter().filter(|(k, _)| k.is_exchange()).map(|(_, n)| n).sum()
    }

    pub fn nonexchange_count(&self) -> usize {
        self.rule_count - self.exchange_count()
    }

    pub fn count(&self, kind: RuleKind) -> usize {
        self.per_rule.get(&kind).copied().unwrap_or(0)
    }
}

pub fn metrics(proof: &Proof) -> ProofMetrics {
    let mut m = ProofMetrics::default();
    proof.for_each_node(|node| {
        m.size += node.cirquent.size();
        m.rule_count += 1;
        *m.per_rule.entry(node.rule.kind()).or_default() += 1;
        m.max_width = m.max_width.max(node.cirquent.width());
    });
    m
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("a cirquent in the proof has {max_width} ogroups, above the bound {bound}")]
pub struct WidthViolation {
    pub max_width: usize,
    pub bound: usize,
}

/// No cirquent may have more ogroups than `root_formula` has positive
/// atom occurrences.
pub fn check_width_bound(proof: &Proof, root_formula: &Formula) -> Result<(), WidthViolation> {
    let bound = root_formula.positive_occurrences();
    let max_width = metrics(proof).max_width;
    if max_width <= bound {
        Ok(())
    } else {
        Err(WidthViolation { max_width, bound })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot normalize an invalid proof: {}", .0.first().map(|d| d.to_string()).unwrap_or_default())]
pub struct NormalizeError(pub Vec<Diagnostic>);

/// Removes empty-cirquent axioms (and the mixes they feed) and replaces each
/// maximal run of exchanges by a shortest run with the same net effect.
///
/// A proof whose root has no ogroups can only start from the empty cirquent;
/// it keeps a single `EmptyAxiom` leaf.
pub fn normalize(proof: &Proof) -> Result<Proof, NormalizeError> {
    check(SystemId::Ccc, proof).map_err(NormalizeError)?;
    let stripped = strip_empty(proof);
    let out = compress_exchanges(stripped);
    debug_assert_eq!(out.cirquent, proof.cirquent);
    Ok(out)
}

fn weakening_chain(base: Proof, at: usize, pool: &[Formula]) -> Proof {
    let chain: Vec<RuleApplication> =
        pool.iter().enumerate().map(|(j, f)| RuleApplication::PoolWeakening { pos: at + j, f: f.clone() }).collect();
    base.extend(&chain).expect("weakening into range")
}

fn strip_empty(node: &Proof) -> Proof {
    if node.cirquent.groups().is_empty() {
        let empty = Proof { cirquent: Cirquent::empty(), rule: RuleApplication::EmptyAxiom, premises: vec![] };
        return weakening_chain(empty, 0, node.cirquent.pool());
    }
    let premises: Vec<Proof> = node.premises.iter().map(strip_empty).collect();
    if node.rule == RuleApplication::Mix {
        let (a, b) = (&premises[0], &premises[1]);
        if a.cirquent.groups().is_empty() {
            let pool = a.cirquent.pool().to_vec();
            let base = premises.into_iter().nth(1).expect("two premises");
            let out = weakening_chain(base, 0, &pool);
            debug_assert_eq!(out.cirquent, node.cirquent);
            return out;
        }
        if b.cirquent.groups().is_empty() {
            let at = a.cirquent.arity();
            let pool = b.cirquent.pool().to_vec();
            let base = premises.into_iter().next().expect("two premises");
            let out = weakening_chain(base, at, &pool);
            debug_assert_eq!(out.cirquent, node.cirquent);
            return out;
        }
    }
    Proof { cirquent: node.cirquent.clone(), rule: node.rule.clone(), premises }
}

fn compress_exchanges(node: Proof) -> Proof {
    if !node.rule.kind().is_exchange() {
        let Proof { cirquent, rule, premises } = node;
        let premises = premises.into_iter().map(compress_exchanges).collect();
        return Proof { cirquent, rule, premises };
    }
    // collect the run from the bottom up
    let mut run = Vec::new();
    let mut cur = node;
    while cur.rule.kind().is_exchange() {
        let Proof { rule, mut premises, .. } = cur;
        run.push(rule);
        cur = premises.pop().expect("exchange has one premise");
    }
    run.reverse();
    let base = compress_exchanges(cur);
    let mut pool: Vec<usize> = (0..base.cirquent.arity()).collect();
    let mut groups: Vec<usize> = (0..base.cirquent.width()).collect();
    for r in &run {
        match r {
            RuleApplication::OformulaExchange(i) => pool.swap(*i, i + 1),
            RuleApplication::OgroupExchange(i) => groups.swap(*i, i + 1),
            _ => unreachable!("run holds exchanges only"),
        }
    }
    let target = |arrangement: &[usize]| {
        let mut t = vec![0; arrangement.len()];
        for (pos, &src) in arrangement.iter().enumerate() {
            t[src] = pos;
        }
        t
    };
    let mut chain: Vec<RuleApplication> =
        rules::sorting_swaps(&target(&pool)).into_iter().map(RuleApplication::OformulaExchange).collect();
    chain.extend(rules::sorting_swaps(&target(&groups)).into_iter().map(RuleApplication::OgroupExchange));
    base.extend(&chain).expect("swaps within range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn f(text: &str) -> Formula {
        parse(text).unwrap()
    }

    fn identity_proof() -> Proof {
        let leaf = Proof::derive(RuleApplication::IdentityAxiom(f("P")), vec![]).unwrap();
        Proof::derive(RuleApplication::OrIntro(0), vec![leaf]).unwrap()
    }

    #[test]
    fn checks_the_identity_proof() {
        let p = identity_proof();
        assert_eq!(p.cirquent, Cirquent::from_formula(f("~P | P")));
        assert!(check(SystemId::Cl5minus, &p).is_ok());
        let m = metrics(&p);
        assert_eq!(m.size, 8);
        assert_eq!(m.rule_count, 2);
        assert_eq!(m.max_width, 1);
        assert!(check_width_bound(&p, &f("~P | P")).is_ok());
    }

    #[test]
    fn reports_rules_outside_the_system() {
        let leaf = Proof::derive(RuleApplication::IdentityAxiom(f("P")), vec![]).unwrap();
        let twice = Proof::derive(RuleApplication::DuplicationDown(0), vec![leaf]).unwrap();
        let p = Proof::derive(RuleApplication::DuplicationUp(0), vec![twice]).unwrap();
        let err = check(SystemId::Cl5minus, &p).unwrap_err();
        assert_eq!(err.len(), 2);
        assert!(err.iter().all(|d| d.code == "RULE_NOT_IN_SYSTEM"));
        assert!(check(SystemId::Cl5, &p).is_ok());

        let mut bad = identity_proof();
        bad.rule = RuleApplication::Contraction(0);
        let err = check(SystemId::Cl5, &bad).unwrap_err();
        assert_eq!(err[0].code, "RULE_NOT_IN_SYSTEM");
    }

    #[test]
    fn reports_replay_mismatch() {
        let mut p = identity_proof();
        p.cirquent = Cirquent::from_formula(f("P | ~P"));
        let err = check(SystemId::Ccc, &p).unwrap_err();
        assert_eq!(err[0].code, "REPLAY_MISMATCH");
        assert!(err[0].path.is_empty());
    }

    #[test]
    fn empty_axiom_metrics() {
        let p = Proof::derive(RuleApplication::EmptyAxiom, vec![]).unwrap();
        let m = metrics(&p);
        assert_eq!((m.size, m.max_width, m.rule_count), (0, 0, 1));
    }

    #[test]
    fn width_violation() {
        let leaf = Proof::derive(RuleApplication::IdentityAxiom(f("P")), vec![]).unwrap();
        let wide = leaf.extend(&[RuleApplication::DuplicationDown(0), RuleApplication::DuplicationDown(0)]).unwrap();
        assert_eq!(check_width_bound(&wide, &f("~P | P")), Err(WidthViolation { max_width: 3, bound: 1 }));
    }

    #[test]
    fn normalize_removes_empty_mix() {
        let empty = Proof::derive(RuleApplication::EmptyAxiom, vec![]).unwrap();
        let p = identity_proof();
        let mixed = Proof::derive(RuleApplication::Mix, vec![empty.clone(), p.clone()]).unwrap();
        assert_eq!(normalize(&mixed).unwrap(), p);
        let mixed = Proof::derive(RuleApplication::Mix, vec![p.clone(), empty]).unwrap();
        assert_eq!(normalize(&mixed).unwrap(), p);
    }

    #[test]
    fn normalize_turns_groupless_mix_into_weakening() {
        let empty = Proof::derive(RuleApplication::EmptyAxiom, vec![]).unwrap();
        let q = empty.extend(&[RuleApplication::PoolWeakening { pos: 0, f: f("Q") }]).unwrap();
        let mixed = Proof::derive(RuleApplication::Mix, vec![identity_proof(), q]).unwrap();
        let n = normalize(&mixed).unwrap();
        assert_eq!(n.cirquent, mixed.cirquent);
        assert!(check(SystemId::Cl5minus, &n).is_ok());
        assert_eq!(metrics(&n).count(RuleKind::EmptyAxiom), 0);
        assert_eq!(metrics(&n).count(RuleKind::Mix), 0);
    }

    #[test]
    fn normalize_compresses_exchange_runs() {
        let leaf = Proof::derive(RuleApplication::IdentityAxiom(f("P")), vec![]).unwrap();
        let p =
            leaf.clone().extend(&[RuleApplication::OformulaExchange(0), RuleApplication::OformulaExchange(0)]).unwrap();
        assert_eq!(normalize(&p).unwrap(), leaf);

        // three oformulas, a 3-cycle written with four swaps
        let base = Proof::derive(RuleApplication::IdentityAxiom(f("P")), vec![])
            .unwrap()
            .extend(&[RuleApplication::PoolWeakening { pos: 2, f: f("Q") }])
            .unwrap();
        use RuleApplication::OformulaExchange as X;
        let p = base.clone().extend(&[X(0), X(1), X(0), X(0)]).unwrap();
        let n = normalize(&p).unwrap();
        assert_eq!(n.cirquent, p.cirquent);
        assert!(metrics(&n).exchange_count() <= 2);
        assert!(check(SystemId::Cl5minus, &n).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let p = identity_proof();
        let back = Proof::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
        let json = p.to_json();
        assert!(json.starts_with(r#"{"cirquent":{"pool":["~P | P"],"groups":[[1]]},"rule":{"rule":"OrIntro","i":1}"#));
    }

    #[test]
    fn deep_json_round_trip() {
        let mut p = identity_proof();
        for _ in 0..300 {
            p = p.extend(&[RuleApplication::DuplicationDown(0), RuleApplication::DuplicationUp(0)]).unwrap();
        }
        assert_eq!(Proof::from_json(&p.to_json()).unwrap(), p);
    }
}
