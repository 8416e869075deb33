//! Brute-force reference answers. Deliberately naive and independent of the
//! code they are used to check: only the formula AST and the instance types
//! are shared.

use thiserror::Error;

use crate::formula::Formula;
use crate::reduce::{Sigma2Instance, VcInstance};

pub const MAX_VC_VERTICES: usize = 20;
pub const MAX_SIGMA2_VARS: usize = 20;
pub const MAX_TAUTOLOGY_ATOMS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large: {size} exceeds the limit of {limit}")]
    TooLarge { size: usize, limit: usize },
}

/// The first vertex cover of size at most k, trying smaller sizes first and
/// subsets of one size in lexicographic index order.
pub fn brute_force_vc(inst: &VcInstance) -> Result<Option<Vec<String>>, OracleError> {
    let g = &inst.graph;
    let n = g.vertices.len();
    if n > MAX_VC_VERTICES {
        return Err(OracleError::TooLarge { size: n, limit: MAX_VC_VERTICES });
    }
    for size in 0..=inst.k.min(n) {
        for pick in combinations(n, size) {
            let chosen: Vec<&String> = pick.iter().map(|&i| &g.vertices[i]).collect();
            if g.edges.iter().all(|(a, b)| chosen.contains(&a) || chosen.contains(&b)) {
                return Ok(Some(chosen.into_iter().cloned().collect()));
            }
        }
    }
    Ok(None)
}

/// All `size`-subsets of `0..n`, lexicographically.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in combinations(n, size - 1) {
            if rest.first().is_none_or(|&r| r > first) {
                let mut c = vec![first];
                c.extend(rest);
                out.push(c);
            }
        }
    }
    out
}

/// Truth of ∃X ∀Y θ by trying every assignment.
pub fn eval_sigma2(inst: &Sigma2Instance) -> Result<bool, OracleError> {
    let total = inst.exists.len() + inst.forall.len();
    if total > MAX_SIGMA2_VARS {
        return Err(OracleError::TooLarge { size: total, limit: MAX_SIGMA2_VARS });
    }
    let value = |var: &str, xs: u64, ys: u64| -> bool {
        if let Some(i) = inst.exists.iter().position(|v| v == var) {
            return xs >> i & 1 == 1;
        }
        let j = inst.forall.iter().position(|v| v == var).expect("declared variable");
        ys >> j & 1 == 1
    };
    for xs in 0..1u64 << inst.exists.len() {
        let mut all = true;
        for ys in 0..1u64 << inst.forall.len() {
            let holds = inst.dnf.iter().any(|conj| conj.iter().all(|lit| value(&lit.var, xs, ys) == lit.positive));
            if !holds {
                all = false;
                break;
            }
        }
        if all {
            return Ok(true);
        }
    }
    Ok(false)
}

fn eval(f: &Formula, atoms: &[&str], row: u64) -> bool {
    let value = |a: &str| {
        let i = atoms.iter().position(|x| *x == a).expect("collected atom");
        row >> i & 1 == 1
    };
    match f {
        Formula::Atom(a) => value(a),
        Formula::NegAtom(a) => !value(a),
        Formula::Or(l, r) => eval(l, atoms, row) || eval(r, atoms, row),
        Formula::And(l, r) => eval(l, atoms, row) && eval(r, atoms, row),
    }
}

fn collect<'a>(f: &'a Formula, out: &mut Vec<&'a str>) {
    match f {
        Formula::Atom(a) | Formula::NegAtom(a) => out.push(a),
        Formula::Or(l, r) | Formula::And(l, r) => {
            collect(l, out);
            collect(r, out);
        }
    }
}

/// True iff every row of the truth table satisfies `f`.
pub fn brute_force_tautology(f: &Formula) -> Result<bool, OracleError> {
    let mut atoms = Vec::new();
    collect(f, &mut atoms);
    atoms.sort_unstable();
    atoms.dedup();
    if atoms.len() > MAX_TAUTOLOGY_ATOMS {
        return Err(OracleError::TooLarge { size: atoms.len(), limit: MAX_TAUTOLOGY_ATOMS });
    }
    Ok((0..1u64 << atoms.len()).all(|row| eval(f, &atoms, row)))
}
