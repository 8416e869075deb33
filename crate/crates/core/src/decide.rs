//! Semantic decision procedures.
//!
//! CCC proves exactly the classical tautologies. CL5 proves exactly the
//! atomic-level instances of normal binary tautologies; such a preimage of a
//! formula is determined by which positive/negative occurrence pairs of each
//! atom it merges into one atom, i.e. by a [`Matching`].
//!
//! Merging more pairs only identifies atoms of the preimage, so its
//! tautologyhood is monotone in the matching. [`decide_cl5`] therefore
//! searches maximal matchings only, atom by atom, and prunes a partial choice
//! as soon as the formula with the undecided atoms left unsplit is not a
//! tautology (every completion maps onto that formula by an atomic
//! substitution).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Assignment, Formula, Name, OccurrenceRef, Substitution, TautologyCheck};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CccDecision {
    Provable,
    NotProvable { countermodel: Assignment },
}

impl CccDecision {
    pub fn is_provable(&self) -> bool {
        matches!(self, CccDecision::Provable)
    }
}

/// Provable in CCC iff a classical tautology.
pub fn decide_ccc(f: &Formula) -> CccDecision {
    match f.is_tautology() {
        TautologyCheck::Tautology => CccDecision::Provable,
        TautologyCheck::Countermodel(countermodel) => CccDecision::NotProvable { countermodel },
    }
}

/// Disjoint (positive, negative) occurrence pairs, per atom.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: BTreeMap<Name, Vec<(OccurrenceRef, OccurrenceRef)>>,
}

impl Matching {
    pub fn pair_count(&self) -> usize {
        self.pairs.values().map(Vec::len).sum()
    }
}

/// A normal binary formula `beta` and an atomic substitution taking it to the goal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryWitness {
    pub beta: Formula,
    pub sigma: Substitution,
    pub matching: Matching,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cl5Decision {
    Provable(BinaryWitness),
    NotProvable,
}

impl Cl5Decision {
    pub fn is_provable(&self) -> bool {
        matches!(self, Cl5Decision::Provable(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("matching refers to {0}, which is not an occurrence of that atom with that polarity")]
    BadOccurrence(String),
    #[error("occurrence {0} is used by more than one pair")]
    ReusedOccurrence(String),
}

/// Literal occurrences of a formula, indexed left to right.
struct Occurrences {
    refs: Vec<(Name, OccurrenceRef)>,
    /// Per atom (sorted by name): positive and negative occurrence ids.
    atoms: Vec<(Name, Vec<usize>, Vec<usize>)>,
}

impl Occurrences {
    fn of(f: &Formula) -> Occurrences {
        let refs = f.literal_occurrences();
        let mut by_atom: BTreeMap<Name, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (k, (name, occ)) in refs.iter().enumerate() {
            let entry = by_atom.entry(name.clone()).or_default();
            match occ.polarity {
                crate::formula::Polarity::Positive => entry.0.push(k),
                crate::formula::Polarity::Negative => entry.1.push(k),
            }
        }
        let atoms = by_atom.into_iter().map(|(a, (p, n))| (a, p, n)).collect();
        Occurrences { refs, atoms }
    }
}

/// Every partial matching between `p` positives and `q` negatives, as the
/// partner (negative index) of each positive; unmatched first, then partners
/// in order.
fn partial_matchings(p: usize, q: usize) -> Vec<Vec<Option<usize>>> {
    fn go(
        i: usize,
        p: usize,
        q: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<Option<usize>>,
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        if i == p {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        go(i + 1, p, q, used, cur, out);
        cur.pop();
        for j in 0..q {
            if !used[j] {
                used[j] = true;
                cur.push(Some(j));
                go(i + 1, p, q, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, p, q, &mut vec![false; q], &mut Vec::new(), &mut out);
    out
}

/// Closed-form count of partial matchings: sum over m of C(p,m) C(q,m) m!.
pub fn matching_count(p: usize, q: usize) -> u128 {
    let mut total = 0u128;
    for m in 0..=p.min(q) {
        let mut term = 1u128;
        // C(p,m) * q!/(q-m)!  ==  C(p,m) * C(q,m) * m!
        for k in 0..m {
            term = term * (p - k) as u128 / (k + 1) as u128;
        }
        for k in 0..m {
            term *= (q - k) as u128;
        }
        total += term;
    }
    total
}

/// Streams every matching of a formula: the product over atoms (sorted by
/// name, the last atom varying fastest) of each atom's partial matchings.
pub struct MatchingStream {
    occ: Occurrences,
    per_atom: Vec<Vec<Vec<Option<usize>>>>,
    odometer: Vec<usize>,
    done: bool,
}

pub fn enumerate_matchings(f: &Formula) -> MatchingStream {
    let occ = Occurrences::of(f);
    let per_atom = occ.atoms.iter().map(|(_, p, n)| partial_matchings(p.len(), n.len())).collect::<Vec<_>>();
    let odometer = vec![0; per_atom.len()];
    MatchingStream { occ, per_atom, odometer, done: false }
}

impl MatchingStream {
    fn partners(&self) -> Vec<Option<usize>> {
        let mut partner = vec![None; self.occ.refs.len()];
        for (a, &choice) in self.odometer.iter().enumerate() {
            let (_, pos, neg) = &self.occ.atoms[a];
            for (i, m) in self.per_atom[a][choice].iter().enumerate() {
                if let Some(j) = m {
                    partner[pos[i]] = Some(neg[*j]);
                    partner[neg[*j]] = Some(pos[i]);
                }
            }
        }
        partner
    }
}

impl Iterator for MatchingStream {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.done {
            return None;
        }
        let m = to_matching(&self.occ, &self.partners());
        // advance: last atom fastest
        let mut k = self.odometer.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.odometer[k] += 1;
            if self.odometer[k] < self.per_atom[k].len() {
                break;
            }
            self.odometer[k] = 0;
        }
        Some(m)
    }
}

fn to_matching(occ: &Occurrences, partner: &[Option<usize>]) -> Matching {
    let mut pairs: BTreeMap<Name, Vec<(OccurrenceRef, OccurrenceRef)>> = BTreeMap::new();
    for (name, pos, _) in &occ.atoms {
        let list: Vec<_> =
            pos.iter().filter_map(|&i| partner[i].map(|j| (occ.refs[i].1.clone(), occ.refs[j].1.clone()))).collect();
        if !list.is_empty() {
            pairs.insert(name.clone(), list);
        }
    }
    Matching { pairs }
}

fn partners_of(occ: &Occurrences, m: &Matching) -> Result<Vec<Option<usize>>, DecideError> {
    let mut partner = vec![None; occ.refs.len()];
    let find = |name: &Name, r: &OccurrenceRef| {
        occ.refs
            .iter()
            .position(|(n, o)| n == name && o == r)
            .ok_or_else(|| DecideError::BadOccurrence(format!("{name} {r}")))
    };
    for (name, list) in &m.pairs {
        for (p, n) in list {
            let (i, j) = (find(name, p)?, find(name, n)?);
            if p.polarity != crate::formula::Polarity::Positive || n.polarity != crate::formula::Polarity::Negative {
                return Err(DecideError::BadOccurrence(format!("{name} {p}/{n}")));
            }
            for k in [i, j] {
                if partner[k].is_some() {
                    return Err(DecideError::ReusedOccurrence(format!("{name} {}", occ.refs[k].1)));
                }
            }
            partner[i] = Some(j);
            partner[j] = Some(i);
        }
    }
    Ok(partner)
}

/// Rebuilds `f` with occurrence `k` renamed to `names[k]` (polarity kept).
fn rename_occurrences(f: &Formula, names: &[Name], next: &mut usize) -> Formula {
    match f {
        Formula::Atom(_) => {
            *next += 1;
            Formula::Atom(names[*next - 1].clone())
        }
        Formula::NegAtom(_) => {
            *next += 1;
            Formula::NegAtom(names[*next - 1].clone())
        }
        Formula::Or(l, r) => {
            let l = rename_occurrences(l, names, next);
            Formula::Or(Arc::new(l), Arc::new(rename_occurrences(r, names, next)))
        }
        Formula::And(l, r) => {
            let l = rename_occurrences(l, names, next);
            Formula::And(Arc::new(l), Arc::new(rename_occurrences(r, names, next)))
        }
    }
}

/// Fresh names x1, x2, ... in left-to-right order of first use; matched
/// pairs share one name. Occurrences with `keep[k]` retain their atom.
fn fresh_names(occ: &Occurrences, partner: &[Option<usize>], keep: &[bool]) -> (Vec<Name>, Substitution) {
    let mut names: Vec<Option<Name>> = vec![None; occ.refs.len()];
    let mut sigma = Substitution::new();
    let mut counter = 0;
    for k in 0..occ.refs.len() {
        if names[k].is_some() {
            continue;
        }
        if keep[k] {
            names[k] = Some(occ.refs[k].0.clone());
            continue;
        }
        counter += 1;
        // '#' keeps fresh names apart from kept atoms during pruning
        let fresh: Name = if keep.iter().any(|&b| b) { format!("#{counter}") } else { format!("x{counter}") }.into();
        sigma.0.insert(fresh.clone(), Formula::Atom(occ.refs[k].0.clone()));
        names[k] = Some(fresh.clone());
        if let Some(j) = partner[k] {
            names[j] = Some(fresh);
        }
    }
    (names.into_iter().map(|n| n.expect("named")).collect(), sigma)
}

fn relabel_with(f: &Formula, occ: &Occurrences, partner: &[Option<usize>], keep: &[bool]) -> (Formula, Substitution) {
    let (names, sigma) = fresh_names(occ, partner, keep);
    let mut next = 0;
    (rename_occurrences(f, &names, &mut next), sigma)
}

/// The normal binary preimage of `f` induced by `m`.
pub fn relabel(f: &Formula, m: &Matching) -> Result<BinaryWitness, DecideError> {
    let occ = Occurrences::of(f);
    let partner = partners_of(&occ, m)?;
    let (beta, sigma) = relabel_with(f, &occ, &partner, &vec![false; occ.refs.len()]);
    Ok(BinaryWitness { beta, sigma, matching: m.clone() })
}

/// Provable in CL5 iff some matching yields a tautological preimage.
pub fn decide_cl5(f: &Formula) -> Cl5Decision {
    let occ = Occurrences::of(f);
    let maximal: Vec<Vec<Vec<Option<usize>>>> = occ
        .atoms
        .iter()
        .map(|(_, p, n)| {
            let size = p.len().min(n.len());
            partial_matchings(p.len(), n.len()).into_iter().filter(|m| m.iter().flatten().count() == size).collect()
        })
        .collect();
    let mut partner = vec![None; occ.refs.len()];
    let mut keep = vec![true; occ.refs.len()];
    if !search_cl5(f, &occ, &maximal, 0, &mut partner, &mut keep) {
        return Cl5Decision::NotProvable;
    }
    let matching = to_matching(&occ, &partner);
    let (beta, sigma) = relabel_with(f, &occ, &partner, &vec![false; occ.refs.len()]);
    Cl5Decision::Provable(BinaryWitness { beta, sigma, matching })
}

fn search_cl5(
    f: &Formula,
    occ: &Occurrences,
    maximal: &[Vec<Vec<Option<usize>>>],
    atom: usize,
    partner: &mut Vec<Option<usize>>,
    keep: &mut Vec<bool>,
) -> bool {
    let (candidate, _) = relabel_with(f, occ, partner, keep);
    if !candidate.is_tautology().holds() {
        return false;
    }
    if atom == occ.atoms.len() {
        return true;
    }
    let (_, pos, neg) = &occ.atoms[atom];
    for &k in pos.iter().chain(neg) {
        keep[k] = false;
    }
    for choice in &maximal[atom] {
        for (i, m) in choice.iter().enumerate() {
            if let Some(j) = m {
                partner[pos[i]] = Some(neg[*j]);
                partner[neg[*j]] = Some(pos[i]);
            }
        }
        if search_cl5(f, occ, maximal, atom + 1, partner, keep) {
            return true;
        }
        for &k in pos.iter().chain(neg) {
            partner[k] = None;
        }
    }
    for &k in pos.iter().chain(neg) {
        keep[k] = true;
    }
    false
}

/// Number of matchings whose preimage is a tautology (exhaustive).
pub fn count_witnesses(f: &Formula) -> usize {
    enumerate_matchings(f).filter(|m| relabel(f, m).map(|w| w.beta.is_tautology().holds()).unwrap_or(false)).count()
}

/// Re-checks all three witness conditions from scratch.
pub fn verify_witness(f: &Formula, w: &BinaryWitness) -> bool {
    w.beta.is_normal_binary()
        && w.sigma.is_atomic()
        && w.sigma.apply(&w.beta).is_ok_and(|image| &image == f)
        && w.beta.is_tautology().holds()
}
