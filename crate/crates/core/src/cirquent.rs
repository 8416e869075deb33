//! Cirquents: a pool of formula occurrences plus a sequence of groups over it.

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::canon::{self, CanonicalKey};
use crate::formula::{self, Formula, FormulaError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CirquentError {
    #[error("group {group} refers to oformula {index}, but the pool has {pool_len} oformulas")]
    MemberOutOfRange { group: usize, index: usize, pool_len: usize },
    #[error("structure position {index} out of range (structure has {len} ogroups)")]
    GroupIndex { index: usize, len: usize },
    #[error("pool position {index} out of range (pool has {len} oformulas)")]
    PoolIndex { index: usize, len: usize },
    #[error("bad cirquent text: {0}")]
    Syntax(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// An ogroup: a set of pool indices, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Group(Vec<usize>);

impl Group {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Group {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Group(v)
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &Group) -> Group {
        Group::new(self.iter().chain(other.iter()))
    }

    /// Applies `f` to every member and re-normalizes.
    pub fn map(&self, f: impl Fn(usize) -> usize) -> Group {
        Group::new(self.iter().map(f))
    }

    pub fn insert(&mut self, index: usize) {
        if let Err(at) = self.0.binary_search(&index) {
            self.0.insert(at, index);
        }
    }

    pub fn remove(&mut self, index: usize) -> bool {
        match self.0.binary_search(&index) {
            Ok(at) => {
                self.0.remove(at);
                true
            }
            Err(_) => false,
        }
    }
}

impl FromIterator<usize> for Group {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Group::new(iter)
    }
}

/// A pool of oformulas and a structure of ogroups. Indices are 0-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Cirquent {
    pool: Vec<Formula>,
    groups: Vec<Group>,
}

impl Cirquent {
    pub fn new(pool: Vec<Formula>, groups: Vec<Group>) -> Result<Cirquent, CirquentError> {
        for (g, group) in groups.iter().enumerate() {
            if let Some(&bad) = group.members().iter().find(|&&m| m >= pool.len()) {
                return Err(CirquentError::MemberOutOfRange { group: g, index: bad, pool_len: pool.len() });
            }
        }
        Ok(Cirquent { pool, groups })
    }

    pub(crate) fn from_parts(pool: Vec<Formula>, groups: Vec<Group>) -> Cirquent {
        debug_assert!(groups.iter().all(|g| g.iter().all(|m| m < pool.len())));
        Cirquent { pool, groups }
    }

    /// Convenience constructor from index lists; panics on bad indices.
    pub fn build(pool: Vec<Formula>, groups: &[&[usize]]) -> Cirquent {
        Cirquent::new(pool, groups.iter().map(|g| Group::new(g.iter().copied())).collect()).expect("valid cirquent")
    }

    pub fn empty() -> Cirquent {
        Cirquent::default()
    }

    /// The cirquent with one oformula `f` and one ogroup containing it.
    pub fn from_formula(f: Formula) -> Cirquent {
        Cirquent { pool: vec![f], groups: vec![Group(vec![0])] }
    }

    pub fn pool(&self) -> &[Formula] {
        &self.pool
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn into_parts(self) -> (Vec<Formula>, Vec<Group>) {
        (self.pool, self.groups)
    }

    pub fn is_empty(&self) -> bool {
        self.pool.is_empty() && self.groups.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.pool.len()
    }

    pub fn width(&self) -> usize {
        self.groups.len()
    }

    pub fn arc_count(&self) -> usize {
        self.groups.iter().map(Group::len).sum()
    }

    /// Sum of oformula lengths plus sum of ogroup sizes.
    pub fn size(&self) -> usize {
        self.pool.iter().map(Formula::length).sum::<usize>() + self.arc_count()
    }

    pub fn positive_occurrences(&self) -> usize {
        self.pool.iter().map(Formula::positive_occurrences).sum()
    }

    pub fn has_arc(&self, group: usize, oformula: usize) -> bool {
        self.groups.get(group).is_some_and(|g| g.contains(oformula))
    }

    /// Indices of the groups containing oformula `o`.
    pub fn groups_of(&self, o: usize) -> Vec<usize> {
        (0..self.groups.len()).filter(|&g| self.groups[g].contains(o)).collect()
    }

    pub(crate) fn check_group_index(&self, index: usize) -> Result<(), CirquentError> {
        if index < self.groups.len() {
            Ok(())
        } else {
            Err(CirquentError::GroupIndex { index, len: self.groups.len() })
        }
    }

    pub(crate) fn check_pool_index(&self, index: usize) -> Result<(), CirquentError> {
        if index < self.pool.len() {
            Ok(())
        } else {
            Err(CirquentError::PoolIndex { index, len: self.pool.len() })
        }
    }

    /// Replaces ogroups `i` and `i+1` by their union.
    pub fn merge_ogroups(&self, i: usize) -> Result<Cirquent, CirquentError> {
        self.check_group_index(i + 1)?;
        let mut groups = self.groups.clone();
        let second = groups.remove(i + 1);
        groups[i] = groups[i].union(&second);
        Ok(Cirquent { pool: self.pool.clone(), groups })
    }

    /// Replaces oformulas `i` and `i+1` by `h`, redirecting their arcs to it.
    pub fn merge_oformulas(&self, i: usize, h: Formula) -> Result<Cirquent, CirquentError> {
        self.check_pool_index(i + 1)?;
        let mut pool = self.pool.clone();
        pool.remove(i + 1);
        pool[i] = h;
        let groups = self.groups.iter().map(|g| g.map(|m| if m > i { m - 1 } else { m })).collect();
        Ok(Cirquent { pool, groups })
    }

    /// Swaps oformulas `i` and `i+1`, carrying their arcs along.
    pub fn swap_oformulas(&self, i: usize) -> Result<Cirquent, CirquentError> {
        self.check_pool_index(i + 1)?;
        let mut pool = self.pool.clone();
        pool.swap(i, i + 1);
        let groups = self
            .groups
            .iter()
            .map(|g| {
                g.map(|m| {
                    if m == i {
                        i + 1
                    } else if m == i + 1 {
                        i
                    } else {
                        m
                    }
                })
            })
            .collect();
        Ok(Cirquent { pool, groups })
    }

    /// Swaps ogroups `i` and `i+1`.
    pub fn swap_ogroups(&self, i: usize) -> Result<Cirquent, CirquentError> {
        self.check_group_index(i + 1)?;
        let mut groups = self.groups.clone();
        groups.swap(i, i + 1);
        Ok(Cirquent { pool: self.pool.clone(), groups })
    }

    /// Inserts an arc-free oformula at `pos`.
    pub fn insert_oformula(&self, pos: usize, f: Formula) -> Result<Cirquent, CirquentError> {
        if pos > self.pool.len() {
            return Err(CirquentError::PoolIndex { index: pos, len: self.pool.len() });
        }
        let mut pool = self.pool.clone();
        pool.insert(pos, f);
        let groups = self.groups.iter().map(|g| g.map(|m| if m >= pos { m + 1 } else { m })).collect();
        Ok(Cirquent { pool, groups })
    }

    /// Removes oformula `pos` together with its arcs.
    pub fn remove_oformula(&self, pos: usize) -> Result<Cirquent, CirquentError> {
        self.check_pool_index(pos)?;
        let mut pool = self.pool.clone();
        pool.remove(pos);
        let groups = self
            .groups
            .iter()
            .map(|g| Group::new(g.iter().filter(|&m| m != pos).map(|m| if m > pos { m - 1 } else { m })))
            .collect();
        Ok(Cirquent { pool, groups })
    }

    pub(crate) fn groups_mut(&mut self) -> &mut Vec<Group> {
        &mut self.groups
    }

    /// Identifies the cirquent up to oformula and ogroup permutation.
    pub fn canonical_key(&self) -> CanonicalKey {
        canon::canonical_labeling(self).key
    }

    /// Text form with 1-based indices, e.g. `A, B | {1,2} {2}`.
    pub fn render_text(&self) -> String {
        self.to_string()
    }

    /// Graphviz rendering: oformulas on top, ogroups below, one edge per arc.
    pub fn render_dot(&self) -> String {
        let mut out = String::from("digraph cirquent {\n  rankdir=TB;\n  node [fontname=\"monospace\"];\n");
        out.push_str("  { rank=same;");
        for (i, f) in self.pool.iter().enumerate() {
            let _ = write!(out, " f{} [shape=box, label=\"{}\"];", i + 1, f);
        }
        out.push_str(" }\n  { rank=same;");
        for g in 0..self.groups.len() {
            let _ = write!(out, " g{} [shape=circle, label=\"{}\"];", g + 1, g + 1);
        }
        out.push_str(" }\n");
        for (g, group) in self.groups.iter().enumerate() {
            for m in group.iter() {
                let _ = writeln!(out, "  f{} -> g{};", m + 1, g + 1);
            }
        }
        out.push_str("}\n");
        out
    }

    /// Parses the text form produced by [`Cirquent::render_text`].
    pub fn parse_text(text: &str) -> Result<Cirquent, CirquentError> {
        let split =
            text.rfind('|').ok_or_else(|| CirquentError::Syntax("missing `|` between pool and structure".into()))?;
        let (pool_text, groups_text) = (&text[..split], &text[split + 1..]);
        let pool = if pool_text.trim().is_empty() {
            Vec::new()
        } else {
            pool_text.split(',').map(formula::parse).collect::<Result<Vec<_>, _>>()?
        };
        let mut raw = Vec::new();
        let mut rest = groups_text.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('{')
                .and_then(|r| r.find('}').map(|end| (&r[..end], &r[end + 1..])))
                .ok_or_else(|| CirquentError::Syntax(format!("expected `{{...}}` at `{rest}`")))?;
            let members = body
                .0
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim().parse::<usize>().map_err(|_| CirquentError::Syntax(format!("bad index `{}`", s.trim())))
                })
                .collect::<Result<Vec<_>, _>>()?;
            raw.push(members);
            rest = body.1.trim_start();
        }
        from_one_based(pool, raw)
    }
}

/// The cirquent `(⟨f⟩, ⟨{0}⟩)`.
pub fn formula_cirquent(f: Formula) -> Cirquent {
    Cirquent::from_formula(f)
}

fn from_one_based(pool: Vec<Formula>, raw: Vec<Vec<usize>>) -> Result<Cirquent, CirquentError> {
    let mut groups = Vec::with_capacity(raw.len());
    for (g, members) in raw.into_iter().enumerate() {
        let mut zero_based = Vec::with_capacity(members.len());
        for m in members {
            if m == 0 || m > pool.len() {
                return Err(CirquentError::MemberOutOfRange { group: g, index: m, pool_len: pool.len() });
            }
            zero_based.push(m - 1);
        }
        let group = Group::new(zero_based.iter().copied());
        if group.len() != zero_based.len() {
            log::warn!("duplicate indices in group {} collapsed", g + 1);
        }
        groups.push(group);
    }
    Cirquent::new(pool, groups)
}

impl fmt::Display for Cirquent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, formula) in self.pool.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{formula}")?;
        }
        f.write_str(" |")?;
        if self.groups.is_empty() {
            return f.write_str(" ");
        }
        for g in &self.groups {
            f.write_str(" {")?;
            for (j, m) in g.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", m + 1)?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CirquentWire {
    pool: Vec<Formula>,
    groups: Vec<Vec<usize>>,
}

impl Serialize for Cirquent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CirquentWire {
            pool: self.pool.clone(),
            groups: self.groups.iter().map(|g| g.iter().map(|m| m + 1).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cirquent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = CirquentWire::deserialize(d)?;
        from_one_based(wire.pool, wire.groups).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn f(text: &str) -> Formula {
        parse(text).unwrap()
    }

    fn example() -> Cirquent {
        Cirquent::build(vec![f("A"), f("B"), f("A"), f("D")], &[&[0, 1], &[1, 2], &[3]])
    }

    #[test]
    fn renders_the_standard_example() {
        assert_eq!(example().render_text(), "A, B, A, D | {1,2} {2,3} {4}");
        assert_eq!(Cirquent::empty().render_text(), " | ");
        assert_eq!(formula_cirquent(f("P")).render_text(), "P | {1}");
    }

    #[test]
    fn text_round_trip() {
        for c in [example(), Cirquent::empty(), formula_cirquent(f("~P | P & Q"))] {
            assert_eq!(Cirquent::parse_text(&c.render_text()).unwrap(), c);
        }
        assert!(Cirquent::parse_text("A | {2}").is_err());
        assert!(Cirquent::parse_text("A {1}").is_err());
    }

    #[test]
    fn merges() {
        let c = example();
        assert_eq!(
            c.merge_ogroups(0).unwrap(),
            Cirquent::build(vec![f("A"), f("B"), f("A"), f("D")], &[&[0, 1, 2], &[3]])
        );
        assert_eq!(
            c.merge_oformulas(0, f("E")).unwrap(),
            Cirquent::build(vec![f("E"), f("A"), f("D")], &[&[0], &[0, 1], &[2]])
        );
        let twin = Cirquent::build(vec![f("P")], &[&[0], &[0]]);
        assert_eq!(twin.merge_ogroups(0).unwrap(), Cirquent::build(vec![f("P")], &[&[0]]));
        let fg = Cirquent::build(vec![f("F"), f("G")], &[&[0, 1]]);
        assert_eq!(fg.merge_oformulas(0, f("F | G")).unwrap(), formula_cirquent(f("F | G")));
        assert!(c.merge_ogroups(2).is_err());
        assert!(c.merge_oformulas(3, f("E")).is_err());
    }

    #[test]
    fn sizes() {
        assert_eq!(example().size(), 9);
        assert_eq!(Cirquent::empty().size(), 0);
        assert_eq!(formula_cirquent(f("~P | P")).size(), 4);
    }

    #[test]
    fn json_is_one_based() {
        let json = serde_json::to_string(&example()).unwrap();
        assert_eq!(json, r#"{"pool":["A","B","A","D"],"groups":[[1,2],[2,3],[4]]}"#);
        let back: Cirquent = serde_json::from_str(&json).unwrap();
        assert_eq!(back, example());
        let dup: Cirquent = serde_json::from_str(r#"{"pool":["A"],"groups":[[1,1]]}"#).unwrap();
        assert_eq!(dup.groups()[0].members(), &[0]);
        assert!(serde_json::from_str::<Cirquent>(r#"{"pool":["A"],"groups":[[0]]}"#).is_err());
    }

    #[test]
    fn dot_lists_every_arc() {
        let dot = example().render_dot();
        assert_eq!(dot.matches("->").count(), 5);
        assert!(dot.contains("f4 -> g3;"));
    }

    #[test]
    fn swaps_and_insertions() {
        let c = example();
        let s = c.swap_oformulas(0).unwrap();
        assert_eq!(s.render_text(), "B, A, A, D | {1,2} {1,3} {4}");
        assert_eq!(c.swap_ogroups(1).unwrap().render_text(), "A, B, A, D | {1,2} {4} {2,3}");
        let w = c.insert_oformula(1, f("Q")).unwrap();
        assert_eq!(w.render_text(), "A, Q, B, A, D | {1,3} {3,4} {5}");
        assert_eq!(w.remove_oformula(1).unwrap(), c);
    }
}
