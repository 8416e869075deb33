//! Canonical labeling of cirquents modulo oformula and ogroup permutation.
//!
//! The cirquent is viewed as a bipartite graph between oformulas (colored by
//! their formula) and ogroups. Colors are refined until stable; remaining ties
//! are broken by individualizing each member of the first non-singleton cell
//! in turn, and the lexicographically least relabeled structure over all
//! leaves is the canonical form. Oformulas with identical formula and
//! identical group memberships are interchangeable, so only one of them is
//! individualized per cell.

use crate::cirquent::Cirquent;

/// Opaque byte string; equal keys mean the cirquents differ only by exchanges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// A canonical ordering of a cirquent's oformulas and ogroups.
#[derive(Clone, Debug)]
pub struct Labeling {
    /// `pool_order[p]` is the index of the oformula placed at canonical position `p`.
    pub pool_order: Vec<usize>,
    /// `group_order[q]` is the index of the ogroup placed at canonical position `q`.
    pub group_order: Vec<usize>,
    pub key: CanonicalKey,
}

/// Index correspondence between two exchange-equivalent cirquents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alignment {
    /// `pool[j]` is the source index of the oformula at target position `j`.
    pub pool: Vec<usize>,
    /// `groups[j]` is the source index of the ogroup at target position `j`.
    pub groups: Vec<usize>,
}

struct Graph {
    labels: Vec<u32>,
    groups: Vec<Vec<usize>>,
    member_of: Vec<Vec<usize>>,
}

struct Leaf {
    encoding: Vec<Vec<u32>>,
    pool_order: Vec<usize>,
    group_order: Vec<usize>,
}

fn ranks<T: Ord + Clone>(items: &[T]) -> Vec<u32> {
    let mut distinct = items.to_vec();
    distinct.sort();
    distinct.dedup();
    items.iter().map(|x| distinct.binary_search(x).expect("present") as u32).collect()
}

fn class_count(colors: &[u32]) -> usize {
    colors.iter().max().map_or(0, |&m| m as usize + 1)
}

impl Graph {
    fn group_colors(&self, colors: &[u32]) -> Vec<u32> {
        let sigs: Vec<Vec<u32>> = self
            .groups
            .iter()
            .map(|g| {
                let mut s: Vec<u32> = g.iter().map(|&m| colors[m]).collect();
                s.sort_unstable();
                s
            })
            .collect();
        ranks(&sigs)
    }

    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        colors = ranks(&colors);
        loop {
            let gcol = self.group_colors(&colors);
            let sigs: Vec<(u32, Vec<u32>)> = (0..colors.len())
                .map(|o| {
                    let mut s: Vec<u32> = self.member_of[o].iter().map(|&g| gcol[g]).collect();
                    s.sort_unstable();
                    (colors[o], s)
                })
                .collect();
            let next = ranks(&sigs);
            let done = class_count(&next) == class_count(&colors);
            colors = next;
            if done {
                return colors;
            }
        }
    }

    fn explore(&self, colors: Vec<u32>, best: &mut Option<Leaf>) {
        let colors = self.refine(colors);
        let n = colors.len();
        let mut counts = vec![0usize; n];
        for &c in &colors {
            counts[c as usize] += 1;
        }
        let Some(cell) = (0..n).find(|&c| counts[c] > 1) else {
            self.leaf(&colors, best);
            return;
        };
        let members: Vec<usize> = (0..n).filter(|&o| colors[o] as usize == cell).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &members {
            if tried.iter().any(|&u| self.member_of[u] == self.member_of[v]) {
                continue;
            }
            tried.push(v);
            let split = colors.iter().enumerate().map(|(o, &c)| 2 * c + u32::from(o != v)).collect();
            self.explore(split, best);
        }
    }

    fn leaf(&self, colors: &[u32], best: &mut Option<Leaf>) {
        let mut pool_order = vec![0usize; colors.len()];
        for (o, &c) in colors.iter().enumerate() {
            pool_order[c as usize] = o;
        }
        let enc: Vec<Vec<u32>> = self
            .groups
            .iter()
            .map(|g| {
                let mut s: Vec<u32> = g.iter().map(|&m| colors[m]).collect();
                s.sort_unstable();
                s
            })
            .collect();
        let mut group_order: Vec<usize> = (0..enc.len()).collect();
        group_order.sort_by(|&a, &b| enc[a].cmp(&enc[b]).then(a.cmp(&b)));
        let encoding: Vec<Vec<u32>> = group_order.iter().map(|&g| enc[g].clone()).collect();
        if best.as_ref().is_none_or(|b| encoding < b.encoding) {
            *best = Some(Leaf { encoding, pool_order, group_order });
        }
    }
}

pub fn canonical_labeling(c: &Cirquent) -> Labeling {
    let texts: Vec<String> = c.pool().iter().map(|f| f.to_string()).collect();
    let labels = ranks(&texts);
    let groups: Vec<Vec<usize>> = c.groups().iter().map(|g| g.members().to_vec()).collect();
    let mut member_of = vec![Vec::new(); texts.len()];
    for (g, members) in groups.iter().enumerate() {
        for &m in members {
            member_of[m].push(g);
        }
    }
    let graph = Graph { labels, groups, member_of };
    let mut best = None;
    graph.explore(graph.labels.clone(), &mut best);
    let leaf = best.expect("at least one leaf");

    let mut key = Vec::new();
    for &o in &leaf.pool_order {
        key.extend_from_slice(texts[o].as_bytes());
        key.push(0);
    }
    key.push(1);
    for g in &leaf.encoding {
        key.extend_from_slice(&(g.len() as u32).to_le_bytes());
        for m in g {
            key.extend_from_slice(&m.to_le_bytes());
        }
    }
    Labeling { pool_order: leaf.pool_order, group_order: leaf.group_order, key: CanonicalKey(key) }
}

pub fn canonical_key(c: &Cirquent) -> CanonicalKey {
    canonical_labeling(c).key
}

/// How to permute `from` into `to`, if they are exchange-equivalent.
pub fn align(from: &Cirquent, to: &Cirquent) -> Option<Alignment> {
    let a = canonical_labeling(from);
    let b = canonical_labeling(to);
    if a.key != b.key {
        return None;
    }
    let mut pool = vec![0; to.arity()];
    for (p, &j) in b.pool_order.iter().enumerate() {
        pool[j] = a.pool_order[p];
    }
    let mut groups = vec![0; to.width()];
    for (q, &j) in b.group_order.iter().enumerate() {
        groups[j] = a.group_order[q];
    }
    Some(Alignment { pool, groups })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn c(text: &str) -> Cirquent {
        Cirquent::parse_text(text).unwrap()
    }

    #[test]
    fn key_examples() {
        assert_eq!(canonical_key(&c("A, B | {1} {2}")), canonical_key(&c("B, A | {2} {1}")));
        assert_ne!(canonical_key(&c("A, B | {1,2}")), canonical_key(&c("A, B | {1}")));
        assert_eq!(canonical_key(&c("A, A | {1} {2}")), canonical_key(&c("A, A | {2} {1}")));
        assert_ne!(canonical_key(&c("A, B | {1}")), canonical_key(&c("A, B | {2}")));
    }

    #[test]
    fn alignment_maps_indices() {
        let from = c("A, B, C | {1,2} {3}");
        let to = c("C, A, B | {1} {2,3}");
        let al = align(&from, &to).unwrap();
        for (j, &src) in al.pool.iter().enumerate() {
            assert_eq!(to.pool()[j], from.pool()[src]);
        }
        for (j, &src) in al.groups.iter().enumerate() {
            let mapped: Vec<usize> = to.groups()[j].iter().map(|m| al.pool[m]).collect();
            let mut mapped = mapped;
            mapped.sort();
            assert_eq!(mapped, from.groups()[src].members());
        }
        assert!(align(&from, &c("A, B, C | {1} {2,3}")).is_none());
    }

    #[test]
    fn symmetric_pools() {
        let pool = vec![parse("P").unwrap(); 8];
        let groups: Vec<&[usize]> = vec![&[0, 1], &[2, 3], &[4, 5], &[6, 7]];
        let a = Cirquent::build(pool, &groups);
        let b = a.swap_oformulas(3).unwrap().swap_ogroups(0).unwrap();
        assert_eq!(canonical_key(&a), canonical_key(&b));
    }
}
