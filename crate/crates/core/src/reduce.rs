//! Hardness reductions: vertex cover to CL5- and ∃∀ quantified Boolean
//! formulas (DNF matrix) to CL5.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{is_valid_atom_name, Expr, Formula};

/// The atom reserved for the cover-size disjunction.
pub const COVER_ATOM: &str = "q";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid name {0:?}")]
    InvalidName(String),
    #[error("vertex {0:?} declared twice")]
    DuplicateVertex(String),
    #[error("edge endpoint {0:?} is not a declared vertex")]
    UnknownVertex(String),
    #[error("self-loop on {0:?}")]
    SelfLoop(String),
    #[error("edge {0}-{1} listed twice")]
    DuplicateEdge(String, String),
    #[error("the cover size k must be at least 1")]
    ZeroK,
    #[error("the graph has no edges")]
    NoEdges,
    #[error("name {0:?} is reserved by the construction")]
    ReservedName(String),
    #[error("variable {0:?} is both existential and universal")]
    OverlappingVariables(String),
    #[error("variable {0:?} is declared twice")]
    DuplicateVariable(String),
    #[error("variable {0:?} in the matrix is not quantified")]
    UndeclaredVariable(String),
    #[error("the matrix is not a nonempty DNF: {0}")]
    NotDnf(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl Graph {
    /// Validates names and edges.
    pub fn new(vertices: Vec<String>, edges: Vec<(String, String)>) -> Result<Graph, ReduceError> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !is_valid_atom_name(v) {
                return Err(ReduceError::InvalidName(v.clone()));
            }
            if !seen.insert(v.as_str()) {
                return Err(ReduceError::DuplicateVertex(v.clone()));
            }
        }
        let mut pairs = BTreeSet::new();
        for (a, b) in &edges {
            for end in [a, b] {
                if !seen.contains(end.as_str()) {
                    return Err(ReduceError::UnknownVertex(end.clone()));
                }
            }
            if a == b {
                return Err(ReduceError::SelfLoop(a.clone()));
            }
            if !pairs.insert((a.min(b).clone(), a.max(b).clone())) {
                return Err(ReduceError::DuplicateEdge(a.clone(), b.clone()));
            }
        }
        Ok(Graph { vertices, edges })
    }

    pub fn degree(&self, v: &str) -> usize {
        self.edges.iter().filter(|(a, b)| a == v || b == v).count()
    }

    /// Parses lines `u v` (one edge each) after an optional
    /// `vertices: a b c` header. Without a header, vertices are taken in
    /// order of first appearance. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Graph, ReduceError> {
        let mut declared: Option<Vec<String>> = None;
        let mut edges = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("vertices:") {
                if declared.is_some() || !edges.is_empty() {
                    return Err(ReduceError::Parse {
                        line: n + 1,
                        message: "the vertices header must come first".into(),
                    });
                }
                declared = Some(rest.split_whitespace().map(str::to_string).collect());
                continue;
            }
            let ends: Vec<&str> = line.split_whitespace().collect();
            if ends.len() != 2 {
                return Err(ReduceError::Parse {
                    line: n + 1,
                    message: format!("expected two endpoints, got {:?}", line),
                });
            }
            edges.push((ends[0].to_string(), ends[1].to_string()));
        }
        let vertices = declared.unwrap_or_else(|| {
            let mut vs: Vec<String> = Vec::new();
            for (a, b) in &edges {
                for end in [a, b] {
                    if !vs.contains(end) {
                        vs.push(end.clone());
                    }
                }
            }
            vs
        });
        Graph::new(vertices, edges)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices: {}", self.vertices.join(" "))?;
        for (a, b) in &self.edges {
            writeln!(f, "{a} {b}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcInstance {
    pub graph: Graph,
    pub k: usize,
}

/// Ψ(k) ∨ (Θ(V,E) ∨ Ω(E)), each part right-associated. Vertices of degree
/// 0 contribute nothing to Θ.
pub fn vc_to_cl5minus(inst: &VcInstance) -> Result<Formula, ReduceError> {
    let g = &inst.graph;
    if inst.k == 0 {
        return Err(ReduceError::ZeroK);
    }
    if g.edges.is_empty() {
        return Err(ReduceError::NoEdges);
    }
    if g.vertices.iter().any(|v| v == COVER_ATOM) {
        return Err(ReduceError::ReservedName(COVER_ATOM.into()));
    }
    let psi = Formula::or_all((0..inst.k).map(|_| Formula::atom(COVER_ATOM))).expect("k >= 1");
    let theta = Formula::or_all(g.vertices.iter().filter_map(|v| {
        let deg = g.degree(v);
        let negs = Formula::or_all((0..deg).map(|_| Formula::neg_atom(v)))?;
        Some(Formula::and(Formula::neg_atom(COVER_ATOM), negs))
    }))
    .expect("some vertex has an edge");
    let omega = Formula::and_all(g.edges.iter().map(|(a, b)| Formula::or(Formula::atom(a), Formula::atom(b))))
        .expect("edges nonempty");
    Ok(Formula::or(psi, Formula::or(theta, omega)))
}

/// Vertices left out of Θ because they have no edges.
pub fn vc_dropped_vertices(g: &Graph) -> Vec<String> {
    g.vertices.iter().filter(|v| g.degree(v) == 0).cloned().collect()
}

/// Literal count of the vertex-cover formula: k + Σdeg + k' + 2|E|, where k'
/// counts vertices of positive degree (one ¬q each).
pub fn vc_literal_count(inst: &VcInstance) -> usize {
    let g = &inst.graph;
    let active = g.vertices.iter().filter(|v| g.degree(v) > 0).count();
    inst.k + 2 * g.edges.len() + active + 2 * g.edges.len()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub var: String,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: &str) -> Literal {
        Literal { var: var.into(), positive: true }
    }

    pub fn neg(var: &str) -> Literal {
        Literal { var: var.into(), positive: false }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            f.write_str(&self.var)
        } else {
            write!(f, "~{}", self.var)
        }
    }
}

/// ∃X ∀Y θ with θ a disjunction of conjunctions of literals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sigma2Instance {
    pub exists: Vec<String>,
    pub forall: Vec<String>,
    pub dnf: Vec<Vec<Literal>>,
}

impl Sigma2Instance {
    pub fn new(
        exists: Vec<String>,
        forall: Vec<String>,
        dnf: Vec<Vec<Literal>>,
    ) -> Result<Sigma2Instance, ReduceError> {
        let mut seen = BTreeSet::new();
        for v in &exists {
            if !is_valid_atom_name(v) {
                return Err(ReduceError::InvalidName(v.clone()));
            }
            if !seen.insert(v.clone()) {
                return Err(ReduceError::DuplicateVariable(v.clone()));
            }
        }
        for v in &forall {
            if !is_valid_atom_name(v) {
                return Err(ReduceError::InvalidName(v.clone()));
            }
            if exists.contains(v) {
                return Err(ReduceError::OverlappingVariables(v.clone()));
            }
            if !seen.insert(v.clone()) {
                return Err(ReduceError::DuplicateVariable(v.clone()));
            }
        }
        if dnf.is_empty() || dnf.iter().any(Vec::is_empty) {
            return Err(ReduceError::NotDnf("empty disjunction or conjunction".into()));
        }
        for lit in dnf.iter().flatten() {
            if !seen.contains(&lit.var) {
                return Err(ReduceError::UndeclaredVariable(lit.var.clone()));
            }
        }
        Ok(Sigma2Instance { exists, forall, dnf })
    }

    /// Parses the three-line form `exists x1 x2` / `forall y1` /
    /// `dnf x1 & ~y1 | ~x1 & y1`.
    pub fn parse(text: &str) -> Result<Sigma2Instance, ReduceError> {
        let mut exists = None;
        let mut forall = None;
        let mut dnf = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let err = |message: String| ReduceError::Parse { line: n + 1, message };
            let slot = match head {
                "exists" => &mut exists,
                "forall" => &mut forall,
                "dnf" => {
                    if dnf.is_some() {
                        return Err(err("dnf given twice".into()));
                    }
                    dnf = Some(parse_dnf(rest).map_err(err)?);
                    continue;
                }
                other => return Err(err(format!("unknown keyword {other:?}"))),
            };
            if slot.is_some() {
                return Err(err(format!("{head} given twice")));
            }
            *slot = Some(rest.split_whitespace().map(str::to_string).collect::<Vec<_>>());
        }
        let missing = |what: &str| ReduceError::Parse { line: 0, message: format!("missing `{what}` line") };
        Sigma2Instance::new(
            exists.ok_or_else(|| missing("exists"))?,
            forall.ok_or_else(|| missing("forall"))?,
            dnf.ok_or_else(|| missing("dnf"))?,
        )
    }

    pub fn matrix_text(&self) -> String {
        self.dnf
            .iter()
            .map(|c| c.iter().map(Literal::to_string).collect::<Vec<_>>().join(" & "))
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

impl fmt::Display for Sigma2Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "exists {}", self.exists.join(" "))?;
        writeln!(f, "forall {}", self.forall.join(" "))?;
        writeln!(f, "dnf {}", self.matrix_text())
    }
}

fn parse_dnf(text: &str) -> Result<Vec<Vec<Literal>>, String> {
    let mut out = Vec::new();
    for conj in text.split('|') {
        let mut lits = Vec::new();
        let conj = conj.trim();
        let conj = conj.strip_prefix('(').and_then(|c| c.strip_suffix(')')).unwrap_or(conj);
        for lit in conj.split('&') {
            let lit = lit.trim();
            let (name, positive) = match lit.strip_prefix('~') {
                Some(rest) => (rest.trim(), false),
                None => (lit, true),
            };
            if !is_valid_atom_name(name) {
                return Err(format!("bad literal {lit:?}"));
            }
            lits.push(Literal { var: name.into(), positive });
        }
        out.push(lits);
    }
    Ok(out)
}

/// Where a fresh atom of the Σ₂ construction comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "lowercase")]
pub enum FreshAtom {
    /// Z for an existential variable.
    Guard { var: String },
    /// The `index`-th positive occurrence of an existential variable.
    Pos { var: String, index: usize },
    /// The `index`-th negative occurrence of an existential variable.
    Neg { var: String, index: usize },
    /// Links the `i`-th positive and `j`-th negative occurrence of a
    /// universal variable; `i` or `j` is 0 for an occurrence with no partner.
    Link { var: String, i: usize, j: usize },
}

/// The formula produced by the Σ₂ reduction and its bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sigma2Reduction {
    pub formula: Formula,
    /// Fresh atom name to its origin.
    pub fresh: BTreeMap<String, FreshAtom>,
    /// Per conjunct and literal of the matrix, the text replacing it.
    pub replacements: Vec<Vec<String>>,
}

/// Fresh names: `Z_x`, `u_x_i`, `v_x_j` for existential x and `P_y_i_j` for
/// universal y.
pub fn tqbf_to_cl5(inst: &Sigma2Instance) -> Result<Sigma2Reduction, ReduceError> {
    let vars: BTreeSet<&str> = inst.exists.iter().chain(&inst.forall).map(String::as_str).collect();
    let mut fresh: BTreeMap<String, FreshAtom> = BTreeMap::new();
    let mut claim = |name: String, origin: FreshAtom| -> Result<String, ReduceError> {
        if vars.contains(name.as_str()) {
            return Err(ReduceError::ReservedName(name));
        }
        fresh.insert(name.clone(), origin);
        Ok(name)
    };

    let count = |var: &str, positive: bool| {
        inst.dnf.iter().flatten().filter(|l| l.var == var && l.positive == positive).count()
    };

    // step 1: guards for existential variables
    let mut guards = Vec::new();
    for z in &inst.exists {
        let guard = Expr::atom(&claim(format!("Z_{z}"), FreshAtom::Guard { var: z.clone() })?);
        let mut g = guard.clone();
        let (k, t) = (count(z, true), count(z, false));
        if k > 0 {
            let mut us = Vec::new();
            for i in 1..=k {
                us.push(Expr::atom(&claim(format!("u_{z}_{i}"), FreshAtom::Pos { var: z.clone(), index: i })?));
            }
            g = Expr::and(g, Expr::implies(guard.clone(), and_chain(us)));
        }
        if t > 0 {
            let mut vs = Vec::new();
            for j in 1..=t {
                let v = claim(format!("v_{z}_{j}"), FreshAtom::Neg { var: z.clone(), index: j })?;
                vs.push(Expr::not(Expr::atom(&v)));
            }
            g = Expr::and(g, Expr::implies(guard, and_chain(vs)));
        }
        guards.push(g);
    }

    // step 2: link atoms for universal variables
    let mut links: HashMap<&str, (usize, usize)> = HashMap::new();
    for y in &inst.forall {
        let (r, s) = (count(y, true), count(y, false));
        links.insert(y.as_str(), (r, s));
        for i in 1..=r {
            if s == 0 {
                claim(format!("P_{y}_{i}_0"), FreshAtom::Link { var: y.clone(), i, j: 0 })?;
            }
            for j in 1..=s {
                claim(format!("P_{y}_{i}_{j}"), FreshAtom::Link { var: y.clone(), i, j })?;
            }
        }
        if r == 0 {
            for j in 1..=s {
                claim(format!("P_{y}_0_{j}"), FreshAtom::Link { var: y.clone(), i: 0, j })?;
            }
        }
    }

    let mut seen: HashMap<(&str, bool), usize> = HashMap::new();
    let mut replacements = Vec::new();
    let mut conjuncts = Vec::new();
    for conj in &inst.dnf {
        let mut texts = Vec::new();
        let mut parts = Vec::new();
        for lit in conj {
            let nth = seen.entry((lit.var.as_str(), lit.positive)).or_insert(0);
            *nth += 1;
            let e = if inst.exists.contains(&lit.var) {
                if lit.positive {
                    Expr::atom(&format!("u_{}_{}", lit.var, nth))
                } else {
                    Expr::not(Expr::atom(&format!("v_{}_{}", lit.var, nth)))
                }
            } else {
                let (r, s) = links[lit.var.as_str()];
                let y = &lit.var;
                if lit.positive {
                    let names: Vec<String> = if s == 0 {
                        vec![format!("P_{y}_{nth}_0")]
                    } else {
                        (1..=s).map(|j| format!("P_{y}_{nth}_{j}")).collect()
                    };
                    or_chain(names.iter().map(|n| Expr::atom(n)).collect())
                } else {
                    let names: Vec<String> = if r == 0 {
                        vec![format!("P_{y}_0_{nth}")]
                    } else {
                        (1..=r).map(|i| format!("P_{y}_{i}_{nth}")).collect()
                    };
                    or_chain(names.iter().map(|n| Expr::not(Expr::atom(n))).collect())
                }
            };
            texts.push(e.to_nnf().to_string());
            parts.push(e);
        }
        replacements.push(texts);
        conjuncts.push(and_chain(parts));
    }
    let theta1 = or_chain(conjuncts);
    let phi = if guards.is_empty() { theta1 } else { Expr::implies(and_chain(guards), theta1) };
    Ok(Sigma2Reduction { formula: phi.to_nnf(), fresh, replacements })
}

fn and_chain(items: Vec<Expr>) -> Expr {
    items.into_iter().reduce(Expr::and).expect("nonempty conjunction")
}

fn or_chain(items: Vec<Expr>) -> Expr {
    items.into_iter().reduce(Expr::or).expect("nonempty disjunction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn edge_graph() -> Graph {
        Graph::parse("a b").unwrap()
    }

    fn triangle() -> Graph {
        Graph::parse("vertices: a b c\na b\nb c\na c\n").unwrap()
    }

    #[test]
    fn single_edge_formula() {
        let f = vc_to_cl5minus(&VcInstance { graph: edge_graph(), k: 1 }).unwrap();
        let theta = Formula::or(parse("~q & ~a").unwrap(), parse("~q & ~b").unwrap());
        let expected = Formula::or(parse("q").unwrap(), Formula::or(theta, parse("a | b").unwrap()));
        assert_eq!(f, expected);
    }

    #[test]
    fn triangle_formula_parts() {
        let inst = VcInstance { graph: triangle(), k: 2 };
        let f = vc_to_cl5minus(&inst).unwrap();
        let Formula::Or(psi, rest) = &f else { panic!() };
        assert_eq!(**psi, parse("q | q").unwrap());
        let Formula::Or(theta, omega) = &**rest else { panic!() };
        let conj = parse("~q & (~a | ~a)").unwrap();
        assert!(matches!(&**theta, Formula::Or(first, _) if **first == conj));
        assert_eq!(
            **omega,
            Formula::and(parse("a | b").unwrap(), Formula::and(parse("b | c").unwrap(), parse("a | c").unwrap()))
        );
        assert_eq!(f.length() - f.connective_count(), vc_literal_count(&inst));
    }

    #[test]
    fn vc_rejections() {
        assert_eq!(vc_to_cl5minus(&VcInstance { graph: edge_graph(), k: 0 }), Err(ReduceError::ZeroK));
        let lonely = Graph::new(vec!["a".into()], vec![]).unwrap();
        assert_eq!(vc_to_cl5minus(&VcInstance { graph: lonely, k: 1 }), Err(ReduceError::NoEdges));
        let q = Graph::parse("q a").unwrap();
        assert!(matches!(vc_to_cl5minus(&VcInstance { graph: q, k: 1 }), Err(ReduceError::ReservedName(_))));
        assert!(matches!(Graph::parse("a a"), Err(ReduceError::SelfLoop(_))));
        assert!(matches!(Graph::parse("a b\nb a"), Err(ReduceError::DuplicateEdge(..))));
        assert!(matches!(Graph::parse("vertices: a\na b"), Err(ReduceError::UnknownVertex(_))));
    }

    #[test]
    fn isolated_vertices_are_dropped() {
        let g = Graph::parse("vertices: a b c\na b").unwrap();
        assert_eq!(vc_dropped_vertices(&g), vec!["c".to_string()]);
        let f = vc_to_cl5minus(&VcInstance { graph: g, k: 1 }).unwrap();
        assert!(!f.atoms().contains("c"));
    }

    #[test]
    fn graph_text_round_trip() {
        let g = triangle();
        assert_eq!(Graph::parse(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn sigma2_parse_and_render() {
        let inst = Sigma2Instance::parse("exists x1 x2\nforall y1\ndnf x1 & ~y1 | ~x1 & y1\n").unwrap();
        assert_eq!(inst.dnf[0], vec![Literal::pos("x1"), Literal::neg("y1")]);
        assert_eq!(Sigma2Instance::parse(&inst.to_string()).unwrap(), inst);
        assert!(matches!(Sigma2Instance::parse("exists x\nforall\ndnf z"), Err(ReduceError::UndeclaredVariable(_))));
        assert!(matches!(
            Sigma2Instance::parse("exists x\nforall x\ndnf x"),
            Err(ReduceError::OverlappingVariables(_))
        ));
        assert!(matches!(Sigma2Instance::parse("exists x\nforall\ndnf x &"), Err(ReduceError::Parse { .. })));
    }

    #[test]
    fn sigma2_single_existential() {
        let inst = Sigma2Instance::parse("exists x\nforall\ndnf x | ~x").unwrap();
        let r = tqbf_to_cl5(&inst).unwrap();
        let expected = parse("Z_x & (Z_x -> u_x_1) & (Z_x -> ~v_x_1) -> u_x_1 | ~v_x_1").unwrap();
        assert_eq!(r.formula, expected);
        assert_eq!(r.fresh.len(), 3);
        assert_eq!(r.replacements, vec![vec!["u_x_1".to_string()], vec!["~v_x_1".to_string()]]);
    }

    #[test]
    fn sigma2_universal_links() {
        let inst = Sigma2Instance::parse("exists\nforall y\ndnf y | ~y | y").unwrap();
        let r = tqbf_to_cl5(&inst).unwrap();
        // r = 2, s = 1
        assert_eq!(r.formula, parse("P_y_1_1 | (~P_y_1_1 | ~P_y_2_1) | P_y_2_1").unwrap());
        let lone = tqbf_to_cl5(&Sigma2Instance::parse("exists\nforall y\ndnf y").unwrap()).unwrap();
        assert_eq!(lone.formula, parse("P_y_1_0").unwrap());
    }

    #[test]
    fn sigma2_atoms_occur_at_most_three_times() {
        let inst = Sigma2Instance::parse("exists a b\nforall y\ndnf a & y | ~a & ~b | b & ~y").unwrap();
        let r = tqbf_to_cl5(&inst).unwrap();
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        r.formula.for_each_literal(&mut |n, _| *counts.entry(n.to_string()).or_default() += 1);
        for (name, c) in counts {
            let cap = if name.starts_with("Z_") { 3 } else { 2 };
            assert!(c <= cap, "{name} occurs {c} times");
        }
    }

    #[test]
    fn sigma2_rejects_colliding_names() {
        let inst = Sigma2Instance::parse("exists x Z_x\nforall\ndnf x & Z_x").unwrap();
        assert!(matches!(tqbf_to_cl5(&inst), Err(ReduceError::ReservedName(_))));
    }
}
