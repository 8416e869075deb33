//! Seeded random objects for tests, property checks and benchmarks.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cirquent::{Cirquent, Group};
use crate::formula::Formula;
use crate::proof::Proof;
use crate::reduce::{Graph, Literal, Sigma2Instance};
use crate::rules::{RuleApplication, SystemId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_literal<R: Rng>(rng: &mut R, atoms: &[&str]) -> Formula {
    let a = atoms.choose(rng).expect("atoms nonempty");
    if rng.random_bool(0.5) {
        Formula::atom(a)
    } else {
        Formula::neg_atom(a)
    }
}

/// A uniformly shaped random formula with exactly `literals` literals.
pub fn random_formula<R: Rng>(rng: &mut R, atoms: &[&str], literals: usize) -> Formula {
    if literals <= 1 {
        return random_literal(rng, atoms);
    }
    let left = rng.random_range(1..literals);
    let l = random_formula(rng, atoms, left);
    let r = random_formula(rng, atoms, literals - left);
    if rng.random_bool(0.5) {
        Formula::or(l, r)
    } else {
        Formula::and(l, r)
    }
}

pub fn random_cirquent<R: Rng>(rng: &mut R, atoms: &[&str], max_pool: usize, max_groups: usize) -> Cirquent {
    let n = rng.random_range(0..=max_pool);
    let pool: Vec<Formula> = (0..n)
        .map(|_| {
            let lits = rng.random_range(1..=4);
            random_formula(rng, atoms, lits)
        })
        .collect();
    let groups =
        (0..rng.random_range(0..=max_groups)).map(|_| Group::new((0..n).filter(|_| rng.random_bool(0.4)))).collect();
    Cirquent::new(pool, groups).expect("indices in range")
}

/// A random valid proof built forward: identity axioms over small formulas,
/// mixes, and random applicable one-premise rules of `system`.
pub fn random_proof<R: Rng>(rng: &mut R, system: SystemId, steps: usize) -> Proof {
    let atoms = ["P", "Q", "R"];
    let axiom = |rng: &mut R| {
        let lits = rng.random_range(1..=2);
        let f = random_formula(rng, &atoms, lits);
        Proof::derive(RuleApplication::IdentityAxiom(f), vec![]).expect("axiom")
    };
    let mut forest: Vec<Proof> = Vec::new();
    for _ in 0..steps {
        let roll = rng.random_range(0..10);
        if forest.is_empty() || (roll < 2 && forest.len() < 4) {
            forest.push(axiom(rng));
        } else if roll < 3 && forest.len() >= 2 {
            let a = forest.swap_remove(rng.random_range(0..forest.len()));
            let b = forest.swap_remove(rng.random_range(0..forest.len()));
            forest.push(Proof::derive(RuleApplication::Mix, vec![a, b]).expect("mix always applies"));
        } else {
            let k = rng.random_range(0..forest.len());
            let candidates = unary_candidates(rng, system, &forest[k].cirquent, &atoms);
            if let Some(rule) = candidates.choose(rng) {
                let p = forest.swap_remove(k);
                match Proof::derive(rule.clone(), vec![p.clone()]) {
                    Ok(q) => forest.push(q),
                    Err(_) => forest.push(p),
                }
            }
        }
    }
    let mut out = forest.pop().unwrap_or_else(|| axiom(rng));
    while let Some(p) = forest.pop() {
        out = Proof::derive(RuleApplication::Mix, vec![out, p]).expect("mix always applies");
    }
    out
}

fn unary_candidates<R: Rng>(rng: &mut R, system: SystemId, c: &Cirquent, atoms: &[&str]) -> Vec<RuleApplication> {
    use RuleApplication as R;
    let (n, w) = (c.arity(), c.width());
    let mut out = Vec::new();
    if n < 8 {
        out.push(R::PoolWeakening { pos: rng.random_range(0..=n), f: random_literal(rng, atoms) });
    }
    for g in 0..w {
        for o in 0..n {
            if !c.has_arc(g, o) {
                out.push(R::OgroupWeakening { g, o });
            }
        }
    }
    for i in 0..n.saturating_sub(1) {
        out.push(R::OformulaExchange(i));
        out.push(R::OrIntro(i));
        out.push(R::AndIntro(i));
        out.push(R::Contraction(i));
    }
    for g in 0..w {
        if g + 1 < w {
            out.push(R::OgroupExchange(g));
            out.push(R::DuplicationUp(g));
        }
        if w < 6 {
            out.push(R::DuplicationDown(g));
        }
    }
    out.retain(|r| system.admits(r.kind()) && crate::rules::apply(r, &[c]).is_ok());
    out
}

/// Wraps random subproofs in redundant material: a mix with the empty
/// cirquent, or an exchange run followed by its reverse. Each change leaves
/// the subproof's conclusion as it was.
pub fn pad_proof<R: Rng>(rng: &mut R, p: &Proof) -> Proof {
    let premises: Vec<Proof> = p.premises.iter().map(|q| pad_proof(rng, q)).collect();
    let mut node = Proof { cirquent: p.cirquent.clone(), rule: p.rule.clone(), premises };
    match rng.random_range(0..4) {
        0 => {
            let empty = Proof::derive(RuleApplication::EmptyAxiom, vec![]).expect("axiom");
            let pair = if rng.random_bool(0.5) { vec![empty, node] } else { vec![node, empty] };
            node = Proof::derive(RuleApplication::Mix, pair).expect("mix always applies");
        }
        1 => {
            let c = &node.cirquent;
            let mut run = Vec::new();
            for _ in 0..rng.random_range(1..=4) {
                let oformula = rng.random_bool(0.5);
                let (len, make): (usize, fn(usize) -> RuleApplication) = if oformula {
                    (c.arity(), RuleApplication::OformulaExchange)
                } else {
                    (c.width(), RuleApplication::OgroupExchange)
                };
                if len >= 2 {
                    run.push(make(rng.random_range(0..len - 1)));
                }
            }
            let back: Vec<RuleApplication> = run.iter().rev().cloned().collect();
            run.extend(back);
            node = node.extend(&run).expect("swaps within range");
        }
        _ => {}
    }
    node
}

/// A random exchange run of `len` steps on top of `p`.
pub fn random_exchanges<R: Rng>(rng: &mut R, p: Proof, len: usize) -> Proof {
    let mut chain = Vec::new();
    let (n, w) = (p.cirquent.arity(), p.cirquent.width());
    for _ in 0..len {
        if n >= 2 && (w < 2 || rng.random_bool(0.5)) {
            chain.push(RuleApplication::OformulaExchange(rng.random_range(0..n - 1)));
        } else if w >= 2 {
            chain.push(RuleApplication::OgroupExchange(rng.random_range(0..w - 1)));
        }
    }
    p.extend(&chain).expect("swaps within range")
}

/// A graph on `n` vertices `v1..vn` with each edge present with probability
/// `p`, plus one edge if none was drawn.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    assert!(n >= 2, "need two vertices for an edge");
    let vertices: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((vertices[i].clone(), vertices[j].clone()));
            }
        }
    }
    if edges.is_empty() {
        let i = rng.random_range(0..n - 1);
        edges.push((vertices[i].clone(), vertices[i + 1].clone()));
    }
    Graph::new(vertices, edges).expect("valid graph")
}

/// A random ∃∀ instance over `x1..`, `y1..` with DNF conjuncts of 1..=width literals.
pub fn random_sigma2<R: Rng>(rng: &mut R, nx: usize, ny: usize, conjuncts: usize, width: usize) -> Sigma2Instance {
    let exists: Vec<String> = (1..=nx).map(|i| format!("x{i}")).collect();
    let forall: Vec<String> = (1..=ny).map(|i| format!("y{i}")).collect();
    let vars: Vec<&String> = exists.iter().chain(&forall).collect();
    assert!(!vars.is_empty(), "need at least one variable");
    let dnf = (0..conjuncts.max(1))
        .map(|_| {
            (0..rng.random_range(1..=width.max(1)))
                .map(|_| Literal {
                    var: vars.choose(rng).expect("nonempty").to_string(),
                    positive: rng.random_bool(0.5),
                })
                .collect()
        })
        .collect();
    Sigma2Instance::new(exists, forall, dnf).expect("valid instance")
}
