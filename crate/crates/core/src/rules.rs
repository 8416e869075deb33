//! Inference rules: forward application with side-condition checks, and
//! reverse enumeration modulo exchange.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon;
use crate::cirquent::{Cirquent, CirquentError, Group};
use crate::formula::Formula;

/// One rule application. Indices are 0-based in memory and 1-based in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "wire::Rule", into = "wire::Rule")]
pub enum RuleApplication {
    EmptyAxiom,
    IdentityAxiom(Formula),
    Mix,
    OformulaExchange(usize),
    OgroupExchange(usize),
    PoolWeakening { pos: usize, f: Formula },
    OgroupWeakening { g: usize, o: usize },
    DuplicationDown(usize),
    DuplicationUp(usize),
    Contraction(usize),
    OrIntro(usize),
    AndIntro(usize),
}

/// Rule families without parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleKind {
    EmptyAxiom,
    IdentityAxiom,
    Mix,
    OformulaExchange,
    OgroupExchange,
    PoolWeakening,
    OgroupWeakening,
    DuplicationDown,
    DuplicationUp,
    Contraction,
    OrIntro,
    AndIntro,
}

impl RuleKind {
    pub const ALL: [RuleKind; 12] = [
        RuleKind::EmptyAxiom,
        RuleKind::IdentityAxiom,
        RuleKind::Mix,
        RuleKind::OformulaExchange,
        RuleKind::OgroupExchange,
        RuleKind::PoolWeakening,
        RuleKind::OgroupWeakening,
        RuleKind::DuplicationDown,
        RuleKind::DuplicationUp,
        RuleKind::Contraction,
        RuleKind::OrIntro,
        RuleKind::AndIntro,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::EmptyAxiom => "EmptyAxiom",
            RuleKind::IdentityAxiom => "IdentityAxiom",
            RuleKind::Mix => "Mix",
            RuleKind::OformulaExchange => "OformulaExchange",
            RuleKind::OgroupExchange => "OgroupExchange",
            RuleKind::PoolWeakening => "PoolWeakening",
            RuleKind::OgroupWeakening => "OgroupWeakening",
            RuleKind::DuplicationDown => "DuplicationDown",
            RuleKind::DuplicationUp => "DuplicationUp",
            RuleKind::Contraction => "Contraction",
            RuleKind::OrIntro => "OrIntro",
            RuleKind::AndIntro => "AndIntro",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            RuleKind::EmptyAxiom | RuleKind::IdentityAxiom => 0,
            RuleKind::Mix => 2,
            _ => 1,
        }
    }

    pub fn is_exchange(self) -> bool {
        matches!(self, RuleKind::OformulaExchange | RuleKind::OgroupExchange)
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl RuleApplication {
    pub fn kind(&self) -> RuleKind {
        match self {
            RuleApplication::EmptyAxiom => RuleKind::EmptyAxiom,
            RuleApplication::IdentityAxiom(_) => RuleKind::IdentityAxiom,
            RuleApplication::Mix => RuleKind::Mix,
            RuleApplication::OformulaExchange(_) => RuleKind::OformulaExchange,
            RuleApplication::OgroupExchange(_) => RuleKind::OgroupExchange,
            RuleApplication::PoolWeakening { .. } => RuleKind::PoolWeakening,
            RuleApplication::OgroupWeakening { .. } => RuleKind::OgroupWeakening,
            RuleApplication::DuplicationDown(_) => RuleKind::DuplicationDown,
            RuleApplication::DuplicationUp(_) => RuleKind::DuplicationUp,
            RuleApplication::Contraction(_) => RuleKind::Contraction,
            RuleApplication::OrIntro(_) => RuleKind::OrIntro,
            RuleApplication::AndIntro(_) => RuleKind::AndIntro,
        }
    }

    pub fn arity(&self) -> usize {
        self.kind().arity()
    }
}

/// The three proof systems, from largest to smallest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemId {
    Ccc,
    Cl5,
    Cl5minus,
}

impl SystemId {
    pub fn admits(self, kind: RuleKind) -> bool {
        match self {
            SystemId::Ccc => true,
            SystemId::Cl5 => kind != RuleKind::Contraction,
            SystemId::Cl5minus => {
                !matches!(kind, RuleKind::Contraction | RuleKind::DuplicationDown | RuleKind::DuplicationUp)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SystemId::Ccc => "CCC",
            SystemId::Cl5 => "CL5",
            SystemId::Cl5minus => "CL5-",
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ccc" => Ok(SystemId::Ccc),
            "cl5" => Ok(SystemId::Cl5),
            "cl5minus" | "cl5-" => Ok(SystemId::Cl5minus),
            other => Err(format!("unknown system `{other}` (expected ccc, cl5 or cl5minus)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("{rule} takes {expected} premises, got {got}")]
    Arity { rule: RuleKind, expected: usize, got: usize },
    #[error(transparent)]
    Index(#[from] CirquentError),
    #[error("ogroup {group} contains both conjuncts")]
    AndIntroSharedGroup { group: usize },
    #[error("ogroup {group} has no adjacent partner ogroup for the other conjunct")]
    AndIntroUnpairedGroup { group: usize },
    #[error("oformulas {i} and {} are not identical", i + 1)]
    ContractionNotIdentical { i: usize },
    #[error("ogroups {g} and {} are not identical", g + 1)]
    DupUpNotIdentical { g: usize },
    #[error("ogroup {g} already contains oformula {o}")]
    ArcExists { g: usize, o: usize },
}

impl RuleError {
    /// Stable machine-readable diagnostic code.
    pub fn code(&self) -> &'static str {
        match self {
            RuleError::Arity { .. } => "ARITY",
            RuleError::Index(_) => "INDEX_RANGE",
            RuleError::AndIntroSharedGroup { .. } => "AND_INTRO_SHARED_GROUP",
            RuleError::AndIntroUnpairedGroup { .. } => "AND_INTRO_UNPAIRED_GROUP",
            RuleError::ContractionNotIdentical { .. } => "CONTRACTION_NOT_IDENTICAL",
            RuleError::DupUpNotIdentical { .. } => "DUP_UP_NOT_IDENTICAL",
            RuleError::ArcExists { .. } => "ARC_EXISTS",
        }
    }
}

/// Derives the conclusion of `rule` from `premises`.
pub fn apply(rule: &RuleApplication, premises: &[&Cirquent]) -> Result<Cirquent, RuleError> {
    let kind = rule.kind();
    if premises.len() != kind.arity() {
        return Err(RuleError::Arity { rule: kind, expected: kind.arity(), got: premises.len() });
    }
    let conclusion = apply_unchecked_arity(rule, premises)?;
    debug_assert_counters(kind, premises, &conclusion);
    Ok(conclusion)
}

fn apply_unchecked_arity(rule: &RuleApplication, premises: &[&Cirquent]) -> Result<Cirquent, RuleError> {
    use RuleApplication::*;
    Ok(match rule {
        EmptyAxiom => Cirquent::empty(),
        IdentityAxiom(f) => Cirquent::build(vec![f.dual(), f.clone()], &[&[0, 1]]),
        Mix => {
            let (a, b) = (premises[0], premises[1]);
            let shift = a.arity();
            let pool = a.pool().iter().chain(b.pool()).cloned().collect();
            let groups = a.groups().iter().cloned().chain(b.groups().iter().map(|g| g.map(|m| m + shift))).collect();
            Cirquent::from_parts(pool, groups)
        }
        OformulaExchange(i) => premises[0].swap_oformulas(*i)?,
        OgroupExchange(i) => premises[0].swap_ogroups(*i)?,
        PoolWeakening { pos, f } => premises[0].insert_oformula(*pos, f.clone())?,
        OgroupWeakening { g, o } => {
            let c = premises[0];
            c.check_group_index(*g)?;
            c.check_pool_index(*o)?;
            if c.has_arc(*g, *o) {
                return Err(RuleError::ArcExists { g: *g, o: *o });
            }
            let mut out = c.clone();
            out.groups_mut()[*g].insert(*o);
            out
        }
        DuplicationDown(g) => {
            let c = premises[0];
            c.check_group_index(*g)?;
            let mut out = c.clone();
            let copy = out.groups()[*g].clone();
            out.groups_mut().insert(g + 1, copy);
            out
        }
        DuplicationUp(g) => {
            let c = premises[0];
            c.check_group_index(g + 1)?;
            if c.groups()[*g] != c.groups()[g + 1] {
                return Err(RuleError::DupUpNotIdentical { g: *g });
            }
            let mut out = c.clone();
            out.groups_mut().remove(g + 1);
            out
        }
        Contraction(i) => {
            let c = premises[0];
            c.check_pool_index(i + 1)?;
            if c.pool()[*i] != c.pool()[i + 1] {
                return Err(RuleError::ContractionNotIdentical { i: *i });
            }
            c.merge_oformulas(*i, c.pool()[*i].clone())?
        }
        OrIntro(i) => {
            let c = premises[0];
            c.check_pool_index(i + 1)?;
            let h = Formula::or(c.pool()[*i].clone(), c.pool()[i + 1].clone());
            c.merge_oformulas(*i, h)?
        }
        AndIntro(i) => and_intro(premises[0], *i)?,
    })
}

fn and_intro(c: &Cirquent, i: usize) -> Result<Cirquent, RuleError> {
    c.check_pool_index(i + 1)?;
    let groups = c.groups();
    for (g, group) in groups.iter().enumerate() {
        let (has_f, has_g) = (group.contains(i), group.contains(i + 1));
        if has_f && has_g {
            return Err(RuleError::AndIntroSharedGroup { group: g });
        }
        if has_f && !groups.get(g + 1).is_some_and(|next| next.contains(i + 1)) {
            return Err(RuleError::AndIntroUnpairedGroup { group: g });
        }
        if has_g && !(g > 0 && groups[g - 1].contains(i)) {
            return Err(RuleError::AndIntroUnpairedGroup { group: g });
        }
    }
    let mut merged = c.clone();
    for g in (0..groups.len()).rev() {
        if groups[g].contains(i) {
            merged = merged.merge_ogroups(g)?;
        }
    }
    let h = Formula::and(c.pool()[i].clone(), c.pool()[i + 1].clone());
    Ok(merged.merge_oformulas(i, h)?)
}

/// The counting facts behind the ogroup-width bound, checked in debug builds.
fn debug_assert_counters(kind: RuleKind, premises: &[&Cirquent], conclusion: &Cirquent) {
    if !cfg!(debug_assertions) || kind.arity() == 0 {
        return;
    }
    let groups: usize = premises.iter().map(|p| p.width()).sum();
    let positives: usize = premises.iter().map(|p| p.positive_occurrences()).sum();
    let arcs: usize = premises.iter().map(|p| p.arc_count()).sum();
    if SystemId::Cl5minus.admits(kind) {
        debug_assert!(groups >= conclusion.width(), "{kind} increased the ogroup count");
        debug_assert!(positives <= conclusion.positive_occurrences(), "{kind} decreased the positive occurrence count");
    }
    if !matches!(kind, RuleKind::OrIntro | RuleKind::AndIntro | RuleKind::Contraction | RuleKind::DuplicationUp) {
        debug_assert!(arcs <= conclusion.arc_count(), "{kind} reduced the arc count");
    }
}

/// Adjacent transpositions (as left positions) that move the item at each
/// current position `p` to position `target[p]`, in insertion-sort order.
pub fn sorting_swaps(target: &[usize]) -> Vec<usize> {
    let mut cur: Vec<usize> = target.to_vec();
    let mut swaps = Vec::new();
    for k in 1..cur.len() {
        let mut j = k;
        while j > 0 && cur[j - 1] > cur[j] {
            cur.swap(j - 1, j);
            swaps.push(j - 1);
            j -= 1;
        }
    }
    swaps
}

/// A shortest run of exchanges turning `from` into `to`, if they are
/// exchange-equivalent.
pub fn exchange_sequence(from: &Cirquent, to: &Cirquent) -> Option<Vec<RuleApplication>> {
    let al = canon::align(from, to)?;
    let mut pool_target = vec![0; al.pool.len()];
    for (j, &src) in al.pool.iter().enumerate() {
        pool_target[src] = j;
    }
    let mut group_target = vec![0; al.groups.len()];
    for (j, &src) in al.groups.iter().enumerate() {
        group_target[src] = j;
    }
    let mut seq: Vec<RuleApplication> =
        sorting_swaps(&pool_target).into_iter().map(RuleApplication::OformulaExchange).collect();
    seq.extend(sorting_swaps(&group_target).into_iter().map(RuleApplication::OgroupExchange));
    Some(seq)
}

/// Applies a chain of one-premise rules, returning every intermediate
/// conclusion (the last is the final result).
pub fn apply_chain(start: &Cirquent, rules: &[RuleApplication]) -> Result<Vec<Cirquent>, RuleError> {
    let mut out = Vec::with_capacity(rules.len());
    let mut cur = start.clone();
    for r in rules {
        cur = apply(r, &[&cur])?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// A rule together with premises it can be applied to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReverseCandidate {
    pub rule: RuleApplication,
    pub premises: Vec<Cirquent>,
}

impl ReverseCandidate {
    pub fn conclusion(&self) -> Result<Cirquent, RuleError> {
        let refs: Vec<&Cirquent> = self.premises.iter().collect();
        apply(&self.rule, &refs)
    }
}

/// Every non-exchange way `goal` can be the conclusion of a rule of `system`,
/// with premises listed up to exchange.
pub fn enumerate_reverse(system: SystemId, goal: &Cirquent) -> Vec<ReverseCandidate> {
    use RuleApplication as R;
    let mut out = Vec::new();
    let pool = goal.pool();
    let groups = goal.groups();
    let one = |rule, premise| ReverseCandidate { rule, premises: vec![premise] };

    if goal.is_empty() {
        out.push(ReverseCandidate { rule: R::EmptyAxiom, premises: vec![] });
    }
    if pool.len() == 2 && groups.len() == 1 && groups[0].len() == 2 && pool[0].is_dual_of(&pool[1]) {
        out.push(ReverseCandidate { rule: R::IdentityAxiom(pool[1].clone()), premises: vec![] });
    }

    for (left, right) in mix_splits(goal) {
        out.push(ReverseCandidate { rule: R::Mix, premises: vec![left, right] });
    }

    for (o, f) in pool.iter().enumerate() {
        if goal.groups_of(o).is_empty() {
            let premise = goal.remove_oformula(o).expect("index in range");
            out.push(one(R::PoolWeakening { pos: o, f: f.clone() }, premise));
        }
    }

    for (g, group) in groups.iter().enumerate() {
        for o in group.iter() {
            let mut premise = goal.clone();
            premise.groups_mut()[g].remove(o);
            out.push(one(R::OgroupWeakening { g, o }, premise));
        }
    }

    if system.admits(RuleKind::DuplicationDown) {
        for g in 0..groups.len() {
            if let Some(h) = (g + 1..groups.len()).find(|&h| groups[h] == groups[g]) {
                let mut premise = goal.clone();
                premise.groups_mut().remove(h);
                out.push(one(R::DuplicationDown(g), premise));
            }
        }
    }
    if system.admits(RuleKind::DuplicationUp) {
        for (g, group) in groups.iter().enumerate() {
            let mut premise = goal.clone();
            premise.groups_mut().insert(g + 1, group.clone());
            out.push(one(R::DuplicationUp(g), premise));
        }
    }

    for (i, f) in pool.iter().enumerate() {
        let (left, right, kind) = match f {
            Formula::Or(l, r) => ((**l).clone(), (**r).clone(), RuleKind::OrIntro),
            Formula::And(l, r) => ((**l).clone(), (**r).clone(), RuleKind::AndIntro),
            _ if system.admits(RuleKind::Contraction) => (f.clone(), f.clone(), RuleKind::Contraction),
            _ => continue,
        };
        let rule = match kind {
            RuleKind::OrIntro => R::OrIntro(i),
            RuleKind::AndIntro => R::AndIntro(i),
            _ => R::Contraction(i),
        };
        for premise in split_candidates(goal, i, left.clone(), right.clone(), kind == RuleKind::AndIntro) {
            out.push(one(rule.clone(), premise));
        }
        if kind != RuleKind::Contraction && system.admits(RuleKind::Contraction) {
            for premise in split_candidates(goal, i, f.clone(), f.clone(), false) {
                out.push(one(R::Contraction(i), premise));
            }
        }
    }
    out
}

/// Unordered two-way splits of the connected components of `c` into
/// nonempty sides, each side keeping the relative order of `c`.
pub fn mix_splits(c: &Cirquent) -> Vec<(Cirquent, Cirquent)> {
    let comps = components(c);
    if comps.len() < 2 || comps.len() > 20 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let n = comps.len();
    // component 0 always goes left, so each unordered split appears once
    for mask in 0u32..(1 << (n - 1)) {
        let right_mask = mask << 1;
        if right_mask == 0 {
            continue;
        }
        let left: Vec<&Component> = (0..n).filter(|k| right_mask & (1 << k) == 0).map(|k| &comps[k]).collect();
        let right: Vec<&Component> = (0..n).filter(|k| right_mask & (1 << k) != 0).map(|k| &comps[k]).collect();
        out.push((restrict(c, &left), restrict(c, &right)));
    }
    out
}

/// A connected component of the oformula/ogroup incidence graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Component {
    pub oformulas: Vec<usize>,
    pub groups: Vec<usize>,
}

/// Connected components, ordered by their smallest oformula (empty ogroups last).
pub fn components(c: &Cirquent) -> Vec<Component> {
    let n = c.arity();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for g in c.groups() {
        let ms = g.members();
        for w in ms.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut comps: Vec<Component> = Vec::new();
    let mut root_to_comp = vec![usize::MAX; n];
    for o in 0..n {
        let r = find(&mut parent, o);
        if root_to_comp[r] == usize::MAX {
            root_to_comp[r] = comps.len();
            comps.push(Component::default());
        }
        comps[root_to_comp[r]].oformulas.push(o);
    }
    let mut empties = Vec::new();
    for (g, group) in c.groups().iter().enumerate() {
        match group.members().first() {
            Some(&m) => {
                let r = find(&mut parent, m);
                comps[root_to_comp[r]].groups.push(g);
            }
            None => empties.push(Component { oformulas: vec![], groups: vec![g] }),
        }
    }
    comps.extend(empties);
    comps
}

/// The sub-cirquent made of the given components, in the original order.
pub fn restrict(c: &Cirquent, parts: &[&Component]) -> Cirquent {
    let mut oformulas: Vec<usize> = parts.iter().flat_map(|p| p.oformulas.iter().copied()).collect();
    let mut groups: Vec<usize> = parts.iter().flat_map(|p| p.groups.iter().copied()).collect();
    oformulas.sort_unstable();
    groups.sort_unstable();
    let mut new_index = vec![usize::MAX; c.arity()];
    for (k, &o) in oformulas.iter().enumerate() {
        new_index[o] = k;
    }
    let pool = oformulas.iter().map(|&o| c.pool()[o].clone()).collect();
    let groups = groups.iter().map(|&g| c.groups()[g].map(|m| new_index[m])).collect();
    Cirquent::from_parts(pool, groups)
}

/// Premises obtained by splitting oformula `i` into `left`, `right` at
/// positions `i`, `i+1`. With `split_groups` (conjunction), each ogroup
/// containing `i` becomes two adjacent ogroups and its other members are
/// distributed three ways; otherwise each ogroup containing `i` keeps
/// `left`, `right` or both.
fn split_candidates(goal: &Cirquent, i: usize, left: Formula, right: Formula, split_groups: bool) -> Vec<Cirquent> {
    let mut pool = goal.pool().to_vec();
    pool[i] = left;
    pool.insert(i + 1, right);
    let shift = |m: usize| if m > i { m + 1 } else { m };

    // per goal group: list of alternatives, each a list of premise groups
    let mut choices: Vec<Vec<Vec<Group>>> = Vec::new();
    for group in goal.groups() {
        if !group.contains(i) {
            choices.push(vec![vec![group.map(shift)]]);
            continue;
        }
        let others: Vec<usize> = group.iter().filter(|&m| m != i).map(shift).collect();
        if !split_groups {
            choices.push(
                [vec![i], vec![i + 1], vec![i, i + 1]]
                    .into_iter()
                    .map(|extra| vec![Group::new(others.iter().copied().chain(extra))])
                    .collect(),
            );
            continue;
        }
        let mut alts = Vec::new();
        for code in 0..3usize.pow(others.len() as u32) {
            let (mut gf, mut gg) = (vec![i], vec![i + 1]);
            let mut rest = code;
            for &m in &others {
                match rest % 3 {
                    0 => gf.push(m),
                    1 => gg.push(m),
                    _ => {
                        gf.push(m);
                        gg.push(m);
                    }
                }
                rest /= 3;
            }
            alts.push(vec![Group::new(gf), Group::new(gg)]);
        }
        choices.push(alts);
    }

    let mut out = Vec::new();
    let mut pick = vec![0usize; choices.len()];
    loop {
        let groups: Vec<Group> = choices.iter().zip(&pick).flat_map(|(alts, &k)| alts[k].iter().cloned()).collect();
        out.push(Cirquent::from_parts(pool.clone(), groups));
        let mut pos = 0;
        loop {
            if pos == pick.len() {
                return out;
            }
            pick[pos] += 1;
            if pick[pos] < choices[pos].len() {
                break;
            }
            pick[pos] = 0;
            pos += 1;
        }
    }
}

mod wire {
    use serde::{Deserialize, Serialize};

    use super::RuleApplication as R;
    use crate::formula::Formula;

    #[derive(Serialize, Deserialize)]
    #[serde(tag = "rule")]
    pub enum Rule {
        EmptyAxiom,
        IdentityAxiom { f: Formula },
        Mix,
        OformulaExchange { i: usize },
        OgroupExchange { i: usize },
        PoolWeakening { pos: usize, f: Formula },
        OgroupWeakening { g: usize, o: usize },
        DuplicationDown { g: usize },
        DuplicationUp { g: usize },
        Contraction { i: usize },
        OrIntro { i: usize },
        AndIntro { i: usize },
    }

    impl From<R> for Rule {
        fn from(r: R) -> Rule {
            match r {
                R::EmptyAxiom => Rule::EmptyAxiom,
                R::IdentityAxiom(f) => Rule::IdentityAxiom { f },
                R::Mix => Rule::Mix,
                R::OformulaExchange(i) => Rule::OformulaExchange { i: i + 1 },
                R::OgroupExchange(i) => Rule::OgroupExchange { i: i + 1 },
                R::PoolWeakening { pos, f } => Rule::PoolWeakening { pos: pos + 1, f },
                R::OgroupWeakening { g, o } => Rule::OgroupWeakening { g: g + 1, o: o + 1 },
                R::DuplicationDown(g) => Rule::DuplicationDown { g: g + 1 },
                R::DuplicationUp(g) => Rule::DuplicationUp { g: g + 1 },
                R::Contraction(i) => Rule::Contraction { i: i + 1 },
                R::OrIntro(i) => Rule::OrIntro { i: i + 1 },
                R::AndIntro(i) => Rule::AndIntro { i: i + 1 },
            }
        }
    }

    fn dec(v: usize) -> Result<usize, String> {
        v.checked_sub(1).ok_or_else(|| "rule indices are 1-based".to_string())
    }

    impl TryFrom<Rule> for R {
        type Error = String;

        fn try_from(r: Rule) -> Result<R, String> {
            Ok(match r {
                Rule::EmptyAxiom => R::EmptyAxiom,
                Rule::IdentityAxiom { f } => R::IdentityAxiom(f),
                Rule::Mix => R::Mix,
                Rule::OformulaExchange { i } => R::OformulaExchange(dec(i)?),
                Rule::OgroupExchange { i } => R::OgroupExchange(dec(i)?),
                Rule::PoolWeakening { pos, f } => R::PoolWeakening { pos: dec(pos)?, f },
                Rule::OgroupWeakening { g, o } => R::OgroupWeakening { g: dec(g)?, o: dec(o)? },
                Rule::DuplicationDown { g } => R::DuplicationDown(dec(g)?),
                Rule::DuplicationUp { g } => R::DuplicationUp(dec(g)?),
                Rule::Contraction { i } => R::Contraction(dec(i)?),
                Rule::OrIntro { i } => R::OrIntro(dec(i)?),
                Rule::AndIntro { i } => R::AndIntro(dec(i)?),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn f(text: &str) -> Formula {
        parse(text).unwrap()
    }

    fn c(text: &str) -> Cirquent {
        Cirquent::parse_text(text).unwrap()
    }

    #[test]
    fn identity_axiom() {
        let out = apply(&RuleApplication::IdentityAxiom(f("P & Q")), &[]).unwrap();
        assert_eq!(out.render_text(), "~P | ~Q, P & Q | {1,2}");
    }

    #[test]
    fn or_and_intro_examples() {
        let premise = c("E, F, G | {1} {1,2} {3}");
        let or = apply(&RuleApplication::OrIntro(1), &[&premise]).unwrap();
        assert_eq!(or, c("E, F | G | {1} {1,2} {2}"));
        let and = apply(&RuleApplication::AndIntro(1), &[&premise]).unwrap();
        assert_eq!(and, c("E, F & G | {1} {1,2}"));
    }

    #[test]
    fn and_intro_side_conditions() {
        let shared = c("F, G | {1,2}");
        let err = apply(&RuleApplication::AndIntro(0), &[&shared]).unwrap_err();
        assert_eq!(err.code(), "AND_INTRO_SHARED_GROUP");
        let unpaired = c("F, G | {1} {1} {2}");
        let err = apply(&RuleApplication::AndIntro(0), &[&unpaired]).unwrap_err();
        assert_eq!(err.code(), "AND_INTRO_UNPAIRED_GROUP");
        let reversed = c("F, G | {2} {1}");
        let err = apply(&RuleApplication::AndIntro(0), &[&reversed]).unwrap_err();
        assert_eq!(err.code(), "AND_INTRO_UNPAIRED_GROUP");
    }

    #[test]
    fn structural_rules() {
        let p = c("A, B | {1} {2}");
        assert_eq!(apply(&RuleApplication::DuplicationDown(0), &[&p]).unwrap(), c("A, B | {1} {1} {2}"));
        let err = apply(&RuleApplication::DuplicationUp(0), &[&p]).unwrap_err();
        assert_eq!(err.code(), "DUP_UP_NOT_IDENTICAL");
        let err = apply(&RuleApplication::Contraction(0), &[&p]).unwrap_err();
        assert_eq!(err.code(), "CONTRACTION_NOT_IDENTICAL");
        let err = apply(&RuleApplication::OgroupWeakening { g: 0, o: 0 }, &[&p]).unwrap_err();
        assert_eq!(err.code(), "ARC_EXISTS");
        let w = apply(&RuleApplication::OgroupWeakening { g: 0, o: 1 }, &[&p]).unwrap();
        assert_eq!(w, c("A, B | {1,2} {2}"));
        let mixed = apply(&RuleApplication::Mix, &[&p, &c("C | {1}")]).unwrap();
        assert_eq!(mixed, c("A, B, C | {1} {2} {3}"));
        let err = apply(&RuleApplication::Mix, &[&p]).unwrap_err();
        assert_eq!(err.code(), "ARITY");
        let err = apply(&RuleApplication::OrIntro(1), &[&p]).unwrap_err();
        assert_eq!(err.code(), "INDEX_RANGE");
    }

    #[test]
    fn system_admission() {
        assert!(SystemId::Ccc.admits(RuleKind::Contraction));
        assert!(!SystemId::Cl5.admits(RuleKind::Contraction));
        assert!(SystemId::Cl5.admits(RuleKind::DuplicationUp));
        assert!(!SystemId::Cl5minus.admits(RuleKind::DuplicationDown));
        assert!(SystemId::Cl5minus.admits(RuleKind::Mix));
    }

    #[test]
    fn rule_json_is_one_based() {
        let r = RuleApplication::AndIntro(1);
        assert_eq!(serde_json::to_string(&r).unwrap(), r#"{"rule":"AndIntro","i":2}"#);
        let back: RuleApplication = serde_json::from_str(r#"{"rule":"OgroupWeakening","g":1,"o":3}"#).unwrap();
        assert_eq!(back, RuleApplication::OgroupWeakening { g: 0, o: 2 });
        assert!(serde_json::from_str::<RuleApplication>(r#"{"rule":"OrIntro","i":0}"#).is_err());
    }

    #[test]
    fn reverse_examples() {
        let identity = c("~P, P | {1,2}");
        assert!(enumerate_reverse(SystemId::Cl5minus, &identity)
            .iter()
            .any(|cand| cand.rule == RuleApplication::IdentityAxiom(f("P")) && cand.premises.is_empty()));

        let or_goal = formula_goal("F | G");
        assert!(enumerate_reverse(SystemId::Cl5minus, &or_goal)
            .iter()
            .any(|cand| cand.rule == RuleApplication::OrIntro(0) && cand.premises == vec![c("F, G | {1,2}")]));

        let and_goal = c("E, F & G | {1} {1,2}");
        let cands: Vec<Cirquent> = enumerate_reverse(SystemId::Cl5minus, &and_goal)
            .into_iter()
            .filter(|cand| cand.rule == RuleApplication::AndIntro(1))
            .map(|cand| cand.premises[0].clone())
            .collect();
        for expected in ["E, F, G | {1} {1,2} {3}", "E, F, G | {1} {2} {1,3}", "E, F, G | {1} {1,2} {1,3}"] {
            assert!(cands.contains(&c(expected)), "{expected}");
        }
        assert_eq!(cands.len(), 3);
    }

    fn formula_goal(text: &str) -> Cirquent {
        Cirquent::from_formula(f(text))
    }

    #[test]
    fn reverse_candidates_reapply() {
        for text in ["E, F & G | {1} {1,2}", "A | B, ~A | {1,2} {2}", "P, P | {1} {1,2}", "A, B | {1} {2}"] {
            let goal = c(text);
            let key = goal.canonical_key();
            for system in [SystemId::Ccc, SystemId::Cl5, SystemId::Cl5minus] {
                for cand in enumerate_reverse(system, &goal) {
                    let back = cand.conclusion().unwrap();
                    assert_eq!(back.canonical_key(), key, "{:?} on {text}", cand.rule);
                    assert!(system.admits(cand.rule.kind()));
                }
            }
        }
    }

    #[test]
    fn exchange_sequence_is_minimal() {
        let from = c("A, B, C | {1} {2} {3}");
        let to = c("B, C, A | {3} {1} {2}");
        let seq = exchange_sequence(&from, &to).unwrap();
        assert_eq!(apply_chain(&from, &seq).unwrap().last().unwrap(), &to);
        assert_eq!(seq.iter().filter(|r| r.kind() == RuleKind::OformulaExchange).count(), 2);
        assert_eq!(exchange_sequence(&from, &from).unwrap(), vec![]);
    }

    #[test]
    fn components_and_restrict() {
        let goal = c("A, B, C, D | {1,3} {2} {4} {}");
        let comps = components(&goal);
        assert_eq!(comps.len(), 4);
        assert_eq!(comps[0], Component { oformulas: vec![0, 2], groups: vec![0] });
        assert_eq!(restrict(&goal, &[&comps[0], &comps[2]]), c("A, C, D | {1,2} {3}"));
        assert_eq!(mix_splits(&goal).len(), 7);
    }
}
