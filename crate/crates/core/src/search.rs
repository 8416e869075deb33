//! Backward proof search modulo exchange.
//!
//! States are cirquents identified by canonical key. From each state the
//! search applies a small set of reverse moves:
//!
//! * an oformula with no arcs is removed (reverse pool weakening);
//! * in CL5 and CCC, a repeated ogroup is dropped (reverse duplication);
//! * a disconnected cirquent is split by a reverse mix, one component
//!   against the rest;
//! * the first compound oformula is decomposed with every arc kept (reverse
//!   disjunction or conjunction introduction); in CL5- a conjunction may
//!   instead lose a single arc, since splitting an ogroup costs width;
//! * a cirquent of literals is decided directly: each ogroup must contain a
//!   complementary pair; in CL5- the chosen pairs must be disjoint, in CL5
//!   disjoint or identical, in CCC arbitrary (shared literals are then
//!   copied and merged back by contraction).
//!
//! Two necessary conditions prune states: every ogroup must be a classical
//! tautology when read as a disjunction, and in CL5- the number of ogroups
//! can never exceed the positive occurrences still available.
//!
//! The result is an [`AbstractProof`] whose steps hold up to exchange;
//! [`elaborate`] inserts the exchanges.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::canon::{canonical_key, CanonicalKey};
use crate::cirquent::{formula_cirquent, Cirquent, Group};
use crate::decide;
use crate::formula::{Formula, Name};
use crate::proof::{self, Proof};
use crate::rules::{self, RuleApplication, RuleKind, SystemId};

/// Limits on a search. `None` fields take formula-dependent defaults.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Non-exchange rule applications allowed in the final proof.
    pub max_nonexchange_rules: Option<usize>,
    /// Width cap for CL5- (default: positive occurrences of the formula) and
    /// an optional cap for CL5 and CCC.
    pub max_width_override: Option<usize>,
    pub max_nodes_expanded: usize,
    /// Duplication applications allowed in a CL5 proof (default 2k).
    pub duplication_cap: Option<usize>,
    /// Contraction applications allowed in a CCC proof (default k²).
    pub contraction_cap: Option<usize>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nonexchange_rules: None,
            max_width_override: None,
            max_nodes_expanded: 1_000_000,
            duplication_cap: None,
            contraction_cap: None,
        }
    }
}

/// The budget with every default filled in for a given formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResolvedBudget {
    pub max_nonexchange_rules: usize,
    pub max_width: Option<usize>,
    pub max_nodes_expanded: usize,
    pub duplication_cap: usize,
    pub contraction_cap: usize,
}

impl SearchBudget {
    pub fn with_nodes(max_nodes_expanded: usize) -> Self {
        SearchBudget { max_nodes_expanded, ..SearchBudget::default() }
    }

    /// Fills defaults from formula length k and positive occurrences n:
    /// intro rules k, identity axioms and mixes 2n, pool weakenings k,
    /// ogroup weakenings k³, plus the system's duplication or contraction cap.
    pub fn resolve(&self, system: SystemId, f: &Formula) -> ResolvedBudget {
        let k = f.length();
        let n = f.positive_occurrences();
        let duplication_cap = self.duplication_cap.unwrap_or(2 * k);
        let contraction_cap = self.contraction_cap.unwrap_or(k * k);
        let extra = match system {
            SystemId::Cl5minus => 0,
            SystemId::Cl5 => duplication_cap,
            SystemId::Ccc => duplication_cap + contraction_cap,
        };
        let max_width = match system {
            SystemId::Cl5minus => Some(self.max_width_override.unwrap_or(n)),
            _ => self.max_width_override,
        };
        ResolvedBudget {
            max_nonexchange_rules: self.max_nonexchange_rules.unwrap_or(2 * k + 2 * n + k.pow(3) + extra),
            max_width,
            max_nodes_expanded: self.max_nodes_expanded,
            duplication_cap,
            contraction_cap,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub budget: SearchBudget,
    /// For CL5 and CCC, let the semantic decider settle a failed search.
    /// Without it a failed search is reported as `Refuted`.
    pub consult_decider: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: SearchBudget::default(), consult_decider: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Proved(Proof),
    Refuted,
    BudgetExceeded,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Proved(_) => "proved",
            Outcome::Refuted => "refuted",
            Outcome::BudgetExceeded => "budget_exceeded",
        }
    }

    pub fn proof(&self) -> Option<&Proof> {
        match self {
            Outcome::Proved(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_expanded: usize,
    pub memo_hits: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

/// How an abstract proof node relates to its premises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbstractStep {
    /// The rule applied to the premises' goals yields the goal up to exchange.
    /// For conjunction introduction the paired ogroups need not be adjacent.
    Rule(RuleApplication),
    /// The single premise's goal equals the goal up to exchange.
    Exchange,
    /// A finished proof of a cirquent equal to the goal up to exchange.
    Concrete(Arc<Proof>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractProof {
    pub goal: Cirquent,
    pub step: AbstractStep,
    pub premises: Vec<Arc<AbstractProof>>,
}

impl AbstractProof {
    pub fn new(goal: Cirquent, step: AbstractStep, premises: Vec<Arc<AbstractProof>>) -> Arc<AbstractProof> {
        Arc::new(AbstractProof { goal, step, premises })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElaborationError {
    #[error("rule {rule} does not apply: {detail}")]
    Rule { rule: RuleKind, detail: String },
    #[error("derived {derived} where {goal} was expected")]
    Mismatch { derived: String, goal: String },
}

/// Turns an abstract proof into a concrete one by inserting exchanges.
pub fn elaborate(ap: &AbstractProof) -> Result<Proof, ElaborationError> {
    let premises = ap.premises.iter().map(|p| elaborate(p)).collect::<Result<Vec<_>, _>>()?;
    let derived = match &ap.step {
        AbstractStep::Concrete(p) => (**p).clone(),
        AbstractStep::Exchange => premises.into_iter().next().ok_or_else(|| ElaborationError::Rule {
            rule: RuleKind::OformulaExchange,
            detail: "missing premise".into(),
        })?,
        AbstractStep::Rule(rule) => derive_modulo_exchange(rule, premises)?,
    };
    align_to(derived, &ap.goal)
}

fn align_to(p: Proof, goal: &Cirquent) -> Result<Proof, ElaborationError> {
    if &p.cirquent == goal {
        return Ok(p);
    }
    let mismatch = || ElaborationError::Mismatch { derived: p.cirquent.to_string(), goal: goal.to_string() };
    let chain = rules::exchange_sequence(&p.cirquent, goal).ok_or_else(mismatch)?;
    p.extend(&chain).map_err(|e| ElaborationError::Rule { rule: RuleKind::OgroupExchange, detail: e.to_string() })
}

fn derive_modulo_exchange(rule: &RuleApplication, mut premises: Vec<Proof>) -> Result<Proof, ElaborationError> {
    let err = |e: rules::RuleError| ElaborationError::Rule { rule: rule.kind(), detail: e.to_string() };
    if let RuleApplication::AndIntro(i) = rule {
        let p = premises
            .pop()
            .ok_or_else(|| err(rules::RuleError::Arity { rule: RuleKind::AndIntro, expected: 1, got: 0 }))?;
        let order = and_pairing_order(&p.cirquent, *i).ok_or_else(|| ElaborationError::Rule {
            rule: RuleKind::AndIntro,
            detail: "ogroups of the two conjuncts cannot be paired".into(),
        })?;
        let mut target = vec![0; order.len()];
        for (pos, &src) in order.iter().enumerate() {
            target[src] = pos;
        }
        let swaps: Vec<RuleApplication> =
            rules::sorting_swaps(&target).into_iter().map(RuleApplication::OgroupExchange).collect();
        let p = p.extend(&swaps).map_err(err)?;
        return Proof::derive(rule.clone(), vec![p]).map_err(err);
    }
    Proof::derive(rule.clone(), premises).map_err(err)
}

/// An ogroup order placing the k-th ogroup with oformula `i` directly before
/// the k-th ogroup with oformula `i+1`, other ogroups staying in place.
fn and_pairing_order(c: &Cirquent, i: usize) -> Option<Vec<usize>> {
    let groups = c.groups();
    let with_f: Vec<usize> = (0..groups.len()).filter(|&g| groups[g].contains(i)).collect();
    let with_g: Vec<usize> = (0..groups.len()).filter(|&g| groups[g].contains(i + 1)).collect();
    if with_f.len() != with_g.len() || with_f.iter().any(|g| with_g.contains(g)) {
        return None;
    }
    let mut order = Vec::with_capacity(groups.len());
    let mut placed = vec![false; groups.len()];
    for g in 0..groups.len() {
        if placed[g] {
            continue;
        }
        let k = with_f.iter().position(|&x| x == g).or_else(|| with_g.iter().position(|&x| x == g));
        match k {
            Some(k) => {
                for h in [with_f[k], with_g[k]] {
                    order.push(h);
                    placed[h] = true;
                }
            }
            None => {
                order.push(g);
                placed[g] = true;
            }
        }
    }
    Some(order)
}

/// Searches for a proof of `f`, letting the semantic decider settle failed
/// CL5 and CCC searches.
pub fn prove(system: SystemId, f: &Formula, budget: &SearchBudget) -> SearchResult {
    prove_with(system, f, &SearchOptions { budget: budget.clone(), consult_decider: true })
}

pub fn prove_with(system: SystemId, f: &Formula, options: &SearchOptions) -> SearchResult {
    let start = Instant::now();
    let budget = options.budget.resolve(system, f);
    let mut searcher = Searcher::new(system, f, &budget);
    let found = searcher.solve(formula_cirquent(f.clone()));
    let outcome = match found {
        Err(Exceeded) => Outcome::BudgetExceeded,
        Ok(Some(ap)) => finish(system, &ap, &budget),
        Ok(None) => match system {
            SystemId::Cl5minus => Outcome::Refuted,
            _ if !options.consult_decider => Outcome::Refuted,
            SystemId::Cl5 if !decide::decide_cl5(f).is_provable() => Outcome::Refuted,
            SystemId::Ccc if !decide::decide_ccc(f).is_provable() => Outcome::Refuted,
            _ => Outcome::BudgetExceeded,
        },
    };
    log::debug!(
        "search {system} {f}: {} after {} nodes, {} memo hits",
        outcome.label(),
        searcher.nodes,
        searcher.memo_hits
    );
    SearchResult {
        outcome,
        stats: SearchStats { nodes_expanded: searcher.nodes, memo_hits: searcher.memo_hits, elapsed: start.elapsed() },
    }
}

fn finish(system: SystemId, ap: &AbstractProof, budget: &ResolvedBudget) -> Outcome {
    let concrete = elaborate(ap).unwrap_or_else(|e| panic!("search produced an inconsistent abstract proof: {e}"));
    let normal = proof::normalize(&concrete).unwrap_or_else(|e| panic!("search produced an invalid proof: {e}"));
    if let Err(diags) = proof::check(system, &normal) {
        panic!("search produced a proof outside {system}: {}", diags[0]);
    }
    let m = proof::metrics(&normal);
    let dups = m.count(RuleKind::DuplicationDown) + m.count(RuleKind::DuplicationUp);
    if m.nonexchange_count() > budget.max_nonexchange_rules
        || dups > budget.duplication_cap
        || m.count(RuleKind::Contraction) > budget.contraction_cap
    {
        return Outcome::BudgetExceeded;
    }
    Outcome::Proved(normal)
}

struct Exceeded;

type Found = Option<Arc<AbstractProof>>;

struct Searcher {
    system: SystemId,
    max_width: Option<usize>,
    /// Width allowance beyond the positive occurrences still present (CL5-).
    width_slack: Option<usize>,
    max_nodes: usize,
    nodes: usize,
    memo_hits: usize,
    memo: HashMap<CanonicalKey, Found>,
    tables: Option<TruthTables>,
}

impl Searcher {
    fn new(system: SystemId, f: &Formula, budget: &ResolvedBudget) -> Searcher {
        let n = f.positive_occurrences();
        let width_slack = match (system, budget.max_width) {
            (SystemId::Cl5minus, Some(cap)) => Some(cap.saturating_sub(n)),
            _ => None,
        };
        Searcher {
            system,
            max_width: budget.max_width,
            width_slack,
            max_nodes: budget.max_nodes_expanded,
            nodes: 0,
            memo_hits: 0,
            memo: HashMap::new(),
            tables: TruthTables::new(f),
        }
    }

    fn solve(&mut self, c: Cirquent) -> Result<Found, Exceeded> {
        let key = canonical_key(&c);
        if let Some(found) = self.memo.get(&key) {
            self.memo_hits += 1;
            return Ok(found.as_ref().map(|p| rebase(p, c)));
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Exceeded);
        }
        let found = self.expand(&c)?;
        self.memo.insert(key, found.clone());
        Ok(found)
    }

    fn then(&mut self, c: &Cirquent, rule: RuleApplication, premise: Cirquent) -> Result<Found, Exceeded> {
        Ok(self.solve(premise)?.map(|p| AbstractProof::new(c.clone(), AbstractStep::Rule(rule), vec![p])))
    }

    fn expand(&mut self, c: &Cirquent) -> Result<Found, Exceeded> {
        let pool = c.pool();
        let groups = c.groups();

        if let Some(o) = (0..pool.len()).find(|&o| !groups.iter().any(|g| g.contains(o))) {
            let premise = c.remove_oformula(o).expect("index in range");
            return self.then(c, RuleApplication::PoolWeakening { pos: o, f: pool[o].clone() }, premise);
        }
        if groups.iter().any(Group::is_empty) {
            return Ok(None);
        }
        if c.is_empty() {
            return Ok(Some(AbstractProof::new(c.clone(), AbstractStep::Rule(RuleApplication::EmptyAxiom), vec![])));
        }
        if self.system != SystemId::Cl5minus {
            for g in 0..groups.len() {
                if let Some(h) = (g + 1..groups.len()).find(|&h| groups[h] == groups[g]) {
                    let mut premise = c.clone();
                    premise.groups_mut().remove(h);
                    return self.then(c, RuleApplication::DuplicationDown(g), premise);
                }
            }
        }
        if !self.within_width(c) || !self.groups_valid(c) {
            return Ok(None);
        }

        let comps = rules::components(c);
        if comps.len() > 1 {
            let first = rules::restrict(c, &[&comps[0]]);
            let rest: Vec<&rules::Component> = comps[1..].iter().collect();
            let rest = rules::restrict(c, &rest);
            let Some(left) = self.solve(first)? else { return Ok(None) };
            let Some(right) = self.solve(rest)? else { return Ok(None) };
            return Ok(Some(AbstractProof::new(
                c.clone(),
                AbstractStep::Rule(RuleApplication::Mix),
                vec![left, right],
            )));
        }

        if pool.len() == 2 && groups.len() == 1 && pool[0].is_dual_of(&pool[1]) {
            let rule = RuleApplication::IdentityAxiom(pool[1].clone());
            return Ok(Some(AbstractProof::new(c.clone(), AbstractStep::Rule(rule), vec![])));
        }

        let Some(i) = pool.iter().position(|f| !f.is_literal()) else {
            return Ok(literal_pairs(self.system, c).map(|pairs| {
                let proof = literal_proof(c, &pairs, self.system == SystemId::Ccc);
                AbstractProof::new(c.clone(), AbstractStep::Concrete(Arc::new(proof)), vec![])
            }));
        };

        match &pool[i] {
            Formula::Or(l, r) => {
                let premise = split_oformula(c, i, l, r, false);
                self.then(c, RuleApplication::OrIntro(i), premise)
            }
            Formula::And(l, r) => {
                let premise = split_oformula(c, i, l, r, true);
                if let Some(found) = self.then(c, RuleApplication::AndIntro(i), premise)? {
                    return Ok(Some(found));
                }
                if self.system == SystemId::Cl5minus {
                    for g in c.groups_of(i) {
                        let mut premise = c.clone();
                        premise.groups_mut()[g].remove(i);
                        if let Some(found) = self.then(c, RuleApplication::OgroupWeakening { g, o: i }, premise)? {
                            return Ok(Some(found));
                        }
                    }
                }
                Ok(None)
            }
            _ => unreachable!("position found a compound formula"),
        }
    }

    fn within_width(&self, c: &Cirquent) -> bool {
        if self.max_width.is_some_and(|cap| c.width() > cap) {
            return false;
        }
        match self.width_slack {
            Some(slack) => c.width() <= c.positive_occurrences() + slack,
            None => true,
        }
    }

    fn groups_valid(&mut self, c: &Cirquent) -> bool {
        let Some(tables) = self.tables.as_mut() else { return true };
        c.groups().iter().all(|g| tables.group_is_tautology(g.iter().map(|o| &c.pool()[o])))
    }
}

/// The memoized proof, wrapped in an exchange step if arranged differently.
fn rebase(p: &Arc<AbstractProof>, goal: Cirquent) -> Arc<AbstractProof> {
    if p.goal == goal {
        p.clone()
    } else {
        AbstractProof::new(goal, AbstractStep::Exchange, vec![p.clone()])
    }
}

/// The premise replacing oformula `i` by `l`, `r` at `i`, `i+1`. Each ogroup
/// containing `i` gets both (disjunction) or is split in two adjacent
/// ogroups, one per side (conjunction).
fn split_oformula(c: &Cirquent, i: usize, l: &Formula, r: &Formula, split_groups: bool) -> Cirquent {
    let mut pool = c.pool().to_vec();
    pool[i] = l.clone();
    pool.insert(i + 1, r.clone());
    let shift = |m: usize| if m > i { m + 1 } else { m };
    let mut groups = Vec::with_capacity(c.width());
    for g in c.groups() {
        if !g.contains(i) {
            groups.push(g.map(shift));
        } else if split_groups {
            let rest: Vec<usize> = g.iter().filter(|&m| m != i).map(shift).collect();
            groups.push(Group::new(rest.iter().copied().chain([i])));
            groups.push(Group::new(rest.into_iter().chain([i + 1])));
        } else {
            groups.push(Group::new(g.iter().map(shift).chain([i + 1])));
        }
    }
    Cirquent::new(pool, groups).expect("indices in range")
}

/// A complementary pair (negative, positive) for each ogroup of a cirquent of
/// literals, subject to the system's sharing constraint.
fn literal_pairs(system: SystemId, c: &Cirquent) -> Option<Vec<(usize, usize)>> {
    let pool = c.pool();
    let options: Vec<Vec<(usize, usize)>> = c
        .groups()
        .iter()
        .map(|g| {
            let mut opts = Vec::new();
            for a in g.iter() {
                if let Formula::NegAtom(x) = &pool[a] {
                    for b in g.iter() {
                        if matches!(&pool[b], Formula::Atom(y) if y == x) {
                            opts.push((a, b));
                        }
                    }
                }
            }
            opts
        })
        .collect();
    if options.iter().any(Vec::is_empty) {
        return None;
    }
    if system == SystemId::Ccc {
        return Some(options.iter().map(|o| o[0]).collect());
    }
    let allow_identical = system == SystemId::Cl5;
    let mut order: Vec<usize> = (0..options.len()).collect();
    order.sort_by_key(|&g| options[g].len());
    let mut chosen = vec![None; options.len()];
    if assign_pairs(&options, &order, 0, allow_identical, &mut chosen) {
        Some(chosen.into_iter().map(|p| p.expect("assigned")).collect())
    } else {
        None
    }
}

fn assign_pairs(
    options: &[Vec<(usize, usize)>],
    order: &[usize],
    k: usize,
    allow_identical: bool,
    chosen: &mut Vec<Option<(usize, usize)>>,
) -> bool {
    let Some(&g) = order.get(k) else { return true };
    for &(a, b) in &options[g] {
        let compatible = chosen
            .iter()
            .flatten()
            .all(|&(c, d)| (allow_identical && (a, b) == (c, d)) || (a != c && a != d && b != c && b != d));
        if compatible {
            chosen[g] = Some((a, b));
            if assign_pairs(options, order, k + 1, allow_identical, chosen) {
                return true;
            }
            chosen[g] = None;
        }
    }
    false
}

/// A proof of a cirquent of literals from one identity axiom per chosen
/// pair. Identical pairs share an axiom via duplication; with
/// `copy_shared`, literals used by several pairs are first split into
/// copies and merged at the end by contraction.
fn literal_proof(c: &Cirquent, pairs: &[(usize, usize)], copy_shared: bool) -> Proof {
    let n = c.arity();
    if copy_shared {
        let mut users: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (g, &(a, b)) in pairs.iter().enumerate() {
            users[a].push(g);
            users[b].push(g);
        }
        if users.iter().all(|u| u.len() <= 1) {
            return literal_proof(c, pairs, false);
        }
        let copies: Vec<usize> = users.iter().map(|u| u.len().max(1)).collect();
        let mut start = vec![0; n];
        for o in 1..n {
            start[o] = start[o - 1] + copies[o - 1];
        }
        let copy_of = |m: usize, g: usize| start[m] + users[m].iter().position(|&x| x == g).unwrap_or(0);
        let pool: Vec<Formula> = (0..n).flat_map(|o| std::iter::repeat_n(c.pool()[o].clone(), copies[o])).collect();
        let groups: Vec<Group> =
            c.groups().iter().enumerate().map(|(g, grp)| Group::new(grp.iter().map(|m| copy_of(m, g)))).collect();
        let spread = Cirquent::new(pool, groups).expect("indices in range");
        let spread_pairs: Vec<(usize, usize)> =
            pairs.iter().enumerate().map(|(g, &(a, b))| (copy_of(a, g), copy_of(b, g))).collect();
        let base = literal_proof(&spread, &spread_pairs, false);
        let chain: Vec<RuleApplication> = (0..n)
            .rev()
            .flat_map(|o| std::iter::repeat_n(RuleApplication::Contraction(start[o]), copies[o] - 1))
            .collect();
        let out = base.extend(&chain).expect("contractions merge identical copies");
        debug_assert_eq!(&out.cirquent, c);
        return out;
    }

    let mut distinct: Vec<(usize, usize)> = Vec::new();
    let mut multiplicity: Vec<usize> = Vec::new();
    let mut pair_of_group = Vec::with_capacity(pairs.len());
    for p in pairs {
        match distinct.iter().position(|d| d == p) {
            Some(j) => {
                multiplicity[j] += 1;
                pair_of_group.push(j);
            }
            None => {
                pair_of_group.push(distinct.len());
                distinct.push(*p);
                multiplicity.push(1);
            }
        }
    }
    let identity = |&(_, b): &(usize, usize)| {
        Proof::derive(RuleApplication::IdentityAxiom(c.pool()[b].clone()), vec![]).expect("axiom")
    };
    let mut proof = identity(&distinct[0]);
    for d in &distinct[1..] {
        proof = Proof::derive(RuleApplication::Mix, vec![proof, identity(d)]).expect("mix");
    }

    let mut chain = Vec::new();
    for j in (0..distinct.len()).rev() {
        for _ in 1..multiplicity[j] {
            chain.push(RuleApplication::DuplicationDown(j));
        }
    }

    let mut pos_of = vec![usize::MAX; c.arity()];
    for (j, &(a, b)) in distinct.iter().enumerate() {
        pos_of[a] = 2 * j;
        pos_of[b] = 2 * j + 1;
    }
    let mut len = 2 * distinct.len();
    for (slot, f) in pos_of.iter_mut().zip(c.pool()) {
        if *slot == usize::MAX {
            *slot = len;
            chain.push(RuleApplication::PoolWeakening { pos: len, f: f.clone() });
            len += 1;
        }
    }

    let mut offset = vec![0; distinct.len()];
    for j in 1..distinct.len() {
        offset[j] = offset[j - 1] + multiplicity[j - 1];
    }
    let mut used = vec![0; distinct.len()];
    for (g, grp) in c.groups().iter().enumerate() {
        let j = pair_of_group[g];
        let at = offset[j] + used[j];
        used[j] += 1;
        let (a, b) = pairs[g];
        for m in grp.iter().filter(|&m| m != a && m != b) {
            chain.push(RuleApplication::OgroupWeakening { g: at, o: pos_of[m] });
        }
    }
    let built = proof.extend(&chain).expect("literal construction is valid");
    let swaps = rules::exchange_sequence(&built.cirquent, c).expect("construction matches up to exchange");
    built.extend(&swaps).expect("exchanges within range")
}

/// Truth tables over the root formula's atoms, cached per subformula.
struct TruthTables {
    atoms: HashMap<Name, usize>,
    words: usize,
    mask: u64,
    cache: HashMap<Formula, Rc<Vec<u64>>>,
}

impl TruthTables {
    const MAX_ATOMS: usize = 16;

    fn new(f: &Formula) -> Option<TruthTables> {
        let atoms = f.atoms();
        if atoms.len() > Self::MAX_ATOMS {
            return None;
        }
        let rows = 1usize << atoms.len();
        let mask = if rows >= 64 { u64::MAX } else { (1u64 << rows) - 1 };
        Some(TruthTables {
            atoms: atoms.into_iter().enumerate().map(|(i, a)| (a, i)).collect(),
            words: rows.div_ceil(64),
            mask,
            cache: HashMap::new(),
        })
    }

    fn column(&self, atom: &Name, positive: bool) -> Vec<u64> {
        let j = self.atoms[atom];
        (0..self.words)
            .map(|w| {
                let mut bits = 0u64;
                for b in 0..64 {
                    let row = w * 64 + b;
                    if (row >> j) & 1 == 1 {
                        bits |= 1 << b;
                    }
                }
                (if positive { bits } else { !bits }) & self.mask
            })
            .collect()
    }

    fn table(&mut self, f: &Formula) -> Rc<Vec<u64>> {
        if let Some(t) = self.cache.get(f) {
            return t.clone();
        }
        let t = match f {
            Formula::Atom(a) => self.column(a, true),
            Formula::NegAtom(a) => self.column(a, false),
            Formula::Or(l, r) | Formula::And(l, r) => {
                let (lt, rt) = (self.table(l), self.table(r));
                let or = matches!(f, Formula::Or(..));
                lt.iter().zip(rt.iter()).map(|(x, y)| if or { x | y } else { x & y }).collect()
            }
        };
        let t = Rc::new(t);
        self.cache.insert(f.clone(), t.clone());
        t
    }

    fn group_is_tautology<'a>(&mut self, members: impl Iterator<Item = &'a Formula>) -> bool {
        let mut acc = vec![0u64; self.words];
        for f in members {
            let t = self.table(f);
            for (a, b) in acc.iter_mut().zip(t.iter()) {
                *a |= b;
            }
        }
        acc.iter().all(|&w| w == self.mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn f(text: &str) -> Formula {
        parse(text).unwrap()
    }

    fn proved(system: SystemId, text: &str) -> Proof {
        match prove(system, &f(text), &SearchBudget::default()).outcome {
            Outcome::Proved(p) => {
                assert!(proof::check(system, &p).is_ok());
                assert_eq!(p.cirquent, Cirquent::from_formula(f(text)));
                p
            }
            other => panic!("{text}: {other:?}"),
        }
    }

    #[test]
    fn identity_is_proved_in_two_steps() {
        let p = proved(SystemId::Cl5minus, "~P | P");
        let m = proof::metrics(&p);
        assert_eq!(m.rule_count, 2);
        assert_eq!(m.count(RuleKind::IdentityAxiom), 1);
        assert_eq!(m.count(RuleKind::OrIntro), 1);
        assert_eq!(m.exchange_count(), 0);
    }

    #[test]
    fn refutes_in_cl5minus() {
        for text in ["P | P", "~P | P & P", "P & ~P"] {
            let r = prove(SystemId::Cl5minus, &f(text), &SearchBudget::default());
            assert_eq!(r.outcome, Outcome::Refuted, "{text}");
        }
    }

    #[test]
    fn conjunction_of_identities() {
        let p = proved(SystemId::Cl5minus, "(~P | P) & (~Q | Q)");
        let m = proof::metrics(&p);
        assert_eq!(m.count(RuleKind::Mix), 1);
        assert_eq!(m.count(RuleKind::AndIntro), 1);
        assert_eq!(m.count(RuleKind::IdentityAxiom), 2);
        assert!(proof::check_width_bound(&p, &f("(~P | P) & (~Q | Q)")).is_ok());
    }

    #[test]
    fn contraction_and_duplication_cases() {
        proved(SystemId::Ccc, "~P | P & P");
        proved(SystemId::Cl5, "(~P | P) & (~P | P)");
        proved(SystemId::Cl5, "~P & ~Q | (P | Q)");
        // needs a shared negative literal, so not in CL5
        assert_eq!(prove(SystemId::Cl5, &f("~P | P & P"), &SearchBudget::default()).outcome, Outcome::Refuted);
    }

    #[test]
    fn classical_non_tautologies_are_refuted_everywhere() {
        for system in [SystemId::Ccc, SystemId::Cl5, SystemId::Cl5minus] {
            assert_eq!(prove(system, &f("P | Q"), &SearchBudget::default()).outcome, Outcome::Refuted);
        }
    }

    #[test]
    fn node_budget_is_enforced() {
        let r = prove(SystemId::Cl5minus, &f("(~P | P) & (~Q | Q)"), &SearchBudget::with_nodes(1));
        assert_eq!(r.outcome, Outcome::BudgetExceeded);
    }

    #[test]
    fn aligned_abstract_proof_elaborates_without_exchanges() {
        let leaf = AbstractProof::new(
            Cirquent::build(vec![f("~P"), f("P")], &[&[0, 1]]),
            AbstractStep::Rule(RuleApplication::IdentityAxiom(f("P"))),
            vec![],
        );
        let root = AbstractProof::new(
            Cirquent::from_formula(f("~P | P")),
            AbstractStep::Rule(RuleApplication::OrIntro(0)),
            vec![leaf],
        );
        let p = elaborate(&root).unwrap();
        assert_eq!(proof::metrics(&p).exchange_count(), 0);
        assert_eq!(p.node_count(), 2);
    }

    #[test]
    fn and_pairing_needs_one_ogroup_exchange() {
        // premise groups {F,~R,R} {~R,R} {G,~R,R}: the F and G groups must become adjacent
        let premise_goal = Cirquent::build(vec![f("~P"), f("P"), f("~R"), f("R")], &[&[0, 2, 3], &[2, 3], &[1, 2, 3]]);
        let premise_proof = literal_proof(&premise_goal, &[(2, 3), (2, 3), (2, 3)], true);
        let premise = AbstractProof::new(premise_goal, AbstractStep::Concrete(Arc::new(premise_proof)), vec![]);
        let goal = Cirquent::build(vec![f("~P & P"), f("~R"), f("R")], &[&[0, 1, 2], &[1, 2]]);
        let root = AbstractProof::new(goal.clone(), AbstractStep::Rule(RuleApplication::AndIntro(0)), vec![premise]);
        let p = elaborate(&root).unwrap();
        assert_eq!(p.cirquent, goal);
        assert_eq!(p.premises[0].rule, RuleApplication::OgroupExchange(1));
        assert_eq!(p.premises[0].premises[0].rule.kind(), RuleKind::Contraction);
        assert!(proof::check(SystemId::Ccc, &p).is_ok());
    }

    #[test]
    fn interleaved_mix_is_restored_by_oformula_exchanges() {
        // goal pool: ~P, ~Q, P, Q with groups {~P,P} {~Q,Q}
        let goal = Cirquent::build(vec![f("~P"), f("~Q"), f("P"), f("Q")], &[&[0, 2], &[1, 3]]);
        let axiom = |a: &str| {
            AbstractProof::new(
                Cirquent::build(vec![f(&format!("~{a}")), f(a)], &[&[0, 1]]),
                AbstractStep::Rule(RuleApplication::IdentityAxiom(f(a))),
                vec![],
            )
        };
        let root =
            AbstractProof::new(goal.clone(), AbstractStep::Rule(RuleApplication::Mix), vec![axiom("P"), axiom("Q")]);
        let p = elaborate(&root).unwrap();
        assert_eq!(p.cirquent, goal);
        assert!(proof::check(SystemId::Cl5minus, &p).is_ok());
        let m = proof::metrics(&p);
        assert_eq!(m.count(RuleKind::OformulaExchange), 1);
        assert_eq!(m.count(RuleKind::Mix), 1);
    }
}
