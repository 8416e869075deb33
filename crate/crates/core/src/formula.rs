//! Propositional formulas of the cirquent language.
//!
//! Formulas are kept in negation normal form: negation only ever sits on an
//! atom, so the AST has no general negation node. Implication and negation
//! of compound formulas are accepted by the parser and eliminated on the spot
//! by De Morgan.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Atom names are shared, immutable strings.
pub type Name = Arc<str>;

/// Largest atom count for which tautology checking uses a full truth table.
pub const TT_MAX_VARS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("atom `{0}` has no value in the assignment")]
    MissingAtom(String),
    #[error("atom `{0}` is not in the domain of the substitution")]
    MissingSubstitution(String),
    #[error("atom `{atom}` occurs negatively but is mapped to the non-atomic formula `{image}`")]
    NonAtomicUnderNegation { atom: String, image: String },
}

/// A formula in negation normal form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    Atom(Name),
    NegAtom(Name),
    Or(Arc<Formula>, Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
}

/// Returns true when `name` is a legal atom name (`[A-Za-z0-9_]+`).
pub fn is_valid_atom_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        debug_assert!(is_valid_atom_name(name), "invalid atom name {name:?}");
        Formula::Atom(name.into())
    }

    pub fn neg_atom(name: &str) -> Formula {
        debug_assert!(is_valid_atom_name(name), "invalid atom name {name:?}");
        Formula::NegAtom(name.into())
    }

    pub fn or(left: Formula, right: Formula) -> Formula {
        Formula::Or(Arc::new(left), Arc::new(right))
    }

    pub fn and(left: Formula, right: Formula) -> Formula {
        Formula::And(Arc::new(left), Arc::new(right))
    }

    /// Right-nested disjunction of a nonempty list.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        fold_right(items.into_iter().collect(), Formula::or)
    }

    /// Right-nested conjunction of a nonempty list.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        fold_right(items.into_iter().collect(), Formula::and)
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Formula::Atom(_) | Formula::NegAtom(_))
    }

    /// Number of literal occurrences plus number of binary connectives.
    pub fn length(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) => 1,
            Formula::Or(l, r) | Formula::And(l, r) => 1 + l.length() + r.length(),
        }
    }

    pub fn connective_count(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) => 0,
            Formula::Or(l, r) | Formula::And(l, r) => 1 + l.connective_count() + r.connective_count(),
        }
    }

    /// Number of unnegated atom occurrences.
    pub fn positive_occurrences(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::NegAtom(_) => 0,
            Formula::Or(l, r) | Formula::And(l, r) => l.positive_occurrences() + r.positive_occurrences(),
        }
    }

    /// Distinct atom names, sorted.
    pub fn atoms(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.for_each_literal(&mut |name, _| {
            out.insert(name.clone());
        });
        out
    }

    /// Visits literals left to right as `(atom, positive)`.
    pub fn for_each_literal<'a>(&'a self, visit: &mut impl FnMut(&'a Name, bool)) {
        match self {
            Formula::Atom(a) => visit(a, true),
            Formula::NegAtom(a) => visit(a, false),
            Formula::Or(l, r) | Formula::And(l, r) => {
                l.for_each_literal(visit);
                r.for_each_literal(visit);
            }
        }
    }

    /// The negation of this formula, pushed down to the atoms.
    pub fn dual(&self) -> Formula {
        match self {
            Formula::Atom(a) => Formula::NegAtom(a.clone()),
            Formula::NegAtom(a) => Formula::Atom(a.clone()),
            Formula::Or(l, r) => Formula::And(Arc::new(l.dual()), Arc::new(r.dual())),
            Formula::And(l, r) => Formula::Or(Arc::new(l.dual()), Arc::new(r.dual())),
        }
    }

    /// `self == other.dual()`, without building the dual.
    pub fn is_dual_of(&self, other: &Formula) -> bool {
        match (self, other) {
            (Formula::Atom(a), Formula::NegAtom(b)) | (Formula::NegAtom(a), Formula::Atom(b)) => a == b,
            (Formula::Or(a, b), Formula::And(c, d)) | (Formula::And(a, b), Formula::Or(c, d)) => {
                a.is_dual_of(c) && b.is_dual_of(d)
            }
            _ => false,
        }
    }

    /// All occurrences of `atom`, left to right.
    pub fn occurrences(&self, atom: &str) -> Vec<OccurrenceRef> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        collect_occurrences(self, &mut path, &mut |name, path, positive| {
            if &**name == atom {
                out.push(OccurrenceRef { path: path.to_vec(), polarity: Polarity::from_positive(positive) });
            }
        });
        out
    }

    /// Every literal occurrence, left to right.
    pub fn literal_occurrences(&self) -> Vec<(Name, OccurrenceRef)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        collect_occurrences(self, &mut path, &mut |name, path, positive| {
            out.push((
                name.clone(),
                OccurrenceRef { path: path.to_vec(), polarity: Polarity::from_positive(positive) },
            ));
        });
        out
    }

    /// Follows a path of left/right steps.
    pub fn subformula(&self, path: &[Step]) -> Option<&Formula> {
        let mut cur = self;
        for step in path {
            cur = match (cur, step) {
                (Formula::Or(l, _) | Formula::And(l, _), Step::Left) => l,
                (Formula::Or(_, r) | Formula::And(_, r), Step::Right) => r,
                _ => return None,
            };
        }
        Some(cur)
    }

    fn occurrence_counts(&self) -> BTreeMap<&Name, (usize, usize)> {
        let mut counts: BTreeMap<&Name, (usize, usize)> = BTreeMap::new();
        self.for_each_literal(&mut |name, positive| {
            let entry = counts.entry(name).or_default();
            if positive {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        });
        counts
    }

    /// No atom occurs more than twice.
    pub fn is_binary(&self) -> bool {
        self.occurrence_counts().values().all(|(p, n)| p + n <= 2)
    }

    /// Binary, and every atom occurring twice occurs once with each polarity.
    pub fn is_normal_binary(&self) -> bool {
        self.occurrence_counts().values().all(|&(p, n)| p + n < 2 || (p == 1 && n == 1))
    }

    pub fn evaluate(&self, assignment: &Assignment) -> Result<bool, FormulaError> {
        Ok(match self {
            Formula::Atom(a) => assignment.lookup(a)?,
            Formula::NegAtom(a) => !assignment.lookup(a)?,
            Formula::Or(l, r) => l.evaluate(assignment)? | r.evaluate(assignment)?,
            Formula::And(l, r) => l.evaluate(assignment)? & r.evaluate(assignment)?,
        })
    }

    /// Classical validity, with a concrete falsifying assignment on failure.
    pub fn is_tautology(&self) -> TautologyCheck {
        if let Some(check) = small_tautology_check(self) {
            return check;
        }
        let program = Program::compile(self);
        let falsifier = if program.atoms.len() <= TT_MAX_VARS {
            program.truth_table_falsifier()
        } else {
            Falsifier::new(self, &program.atoms).run()
        };
        match falsifier {
            None => TautologyCheck::Tautology,
            Some(values) => {
                TautologyCheck::Countermodel(Assignment(program.atoms.iter().cloned().zip(values).collect()))
            }
        }
    }
}

/// Truth table in one word for formulas over at most six atoms, without
/// allocating until a countermodel is reported.
fn small_tautology_check(f: &Formula) -> Option<TautologyCheck> {
    fn gather<'a>(f: &'a Formula, seen: &mut [Option<&'a Name>; 6], n: &mut usize) -> bool {
        match f {
            Formula::Atom(a) | Formula::NegAtom(a) => {
                if seen[..*n].contains(&Some(a)) {
                    return true;
                }
                if *n == seen.len() {
                    return false;
                }
                seen[*n] = Some(a);
                *n += 1;
                true
            }
            Formula::Or(l, r) | Formula::And(l, r) => gather(l, seen, n) && gather(r, seen, n),
        }
    }
    fn table(f: &Formula, atoms: &[Option<&Name>]) -> u64 {
        let column = |a: &Name| {
            let i = atoms.iter().position(|s| *s == Some(a)).expect("gathered atom");
            COLUMN[i]
        };
        match f {
            Formula::Atom(a) => column(a),
            Formula::NegAtom(a) => !column(a),
            Formula::Or(l, r) => table(l, atoms) | table(r, atoms),
            Formula::And(l, r) => table(l, atoms) & table(r, atoms),
        }
    }
    let mut seen = [None; 6];
    let mut n = 0;
    if !gather(f, &mut seen, &mut n) {
        return None;
    }
    let atoms = &mut seen[..n];
    atoms.sort_unstable();
    let valid = if n == 6 { u64::MAX } else { (1u64 << (1 << n)) - 1 };
    let falsified = !table(f, atoms) & valid;
    if falsified == 0 {
        return Some(TautologyCheck::Tautology);
    }
    let row = falsified.trailing_zeros();
    let values = atoms.iter().enumerate().map(|(i, a)| (a.expect("gathered").clone(), (row >> i) & 1 == 1));
    Some(TautologyCheck::Countermodel(Assignment(values.collect())))
}

fn fold_right(mut items: Vec<Formula>, join: fn(Formula, Formula) -> Formula) -> Option<Formula> {
    let mut acc = items.pop()?;
    while let Some(next) = items.pop() {
        acc = join(next, acc);
    }
    Some(acc)
}

fn collect_occurrences<'a>(f: &'a Formula, path: &mut Vec<Step>, visit: &mut impl FnMut(&'a Name, &[Step], bool)) {
    match f {
        Formula::Atom(a) => visit(a, path, true),
        Formula::NegAtom(a) => visit(a, path, false),
        Formula::Or(l, r) | Formula::And(l, r) => {
            path.push(Step::Left);
            collect_occurrences(l, path, visit);
            path.pop();
            path.push(Step::Right);
            collect_occurrences(r, path, visit);
            path.pop();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn from_positive(positive: bool) -> Polarity {
        if positive {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Left,
    Right,
}

/// Position of one literal occurrence inside a formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OccurrenceRef {
    #[serde(with = "path_string")]
    pub path: Vec<Step>,
    pub polarity: Polarity,
}

impl fmt::Display for OccurrenceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.polarity {
            Polarity::Positive => '+',
            Polarity::Negative => '-',
        };
        write!(f, "{sign}@{}", path_string::render(&self.path))
    }
}

/// Paths travel as strings of `L`/`R`.
mod path_string {
    use super::Step;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn render(path: &[Step]) -> String {
        path.iter()
            .map(|s| match s {
                Step::Left => 'L',
                Step::Right => 'R',
            })
            .collect()
    }

    pub fn serialize<S: Serializer>(path: &[Step], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render(path))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Step>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| match c {
                'L' => Ok(Step::Left),
                'R' => Ok(Step::Right),
                other => Err(D::Error::custom(format!("bad path step {other:?}"))),
            })
            .collect()
    }
}

/// Truth values for atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment(pub BTreeMap<Name, bool>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, atom: &str, value: bool) {
        self.0.insert(atom.into(), value);
    }

    pub fn get(&self, atom: &str) -> Option<bool> {
        self.0.get(atom).copied()
    }

    fn lookup(&self, atom: &Name) -> Result<bool, FormulaError> {
        self.0.get(atom).copied().ok_or_else(|| FormulaError::MissingAtom(atom.to_string()))
    }
}

impl<'a> FromIterator<(&'a str, bool)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (&'a str, bool)>>(iter: T) -> Self {
        Assignment(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TautologyCheck {
    Tautology,
    Countermodel(Assignment),
}

impl TautologyCheck {
    pub fn holds(&self) -> bool {
        matches!(self, TautologyCheck::Tautology)
    }
}

/// A map from atoms to formulas.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution(pub BTreeMap<Name, Formula>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, atom: &str, image: Formula) {
        self.0.insert(atom.into(), image);
    }

    pub fn get(&self, atom: &str) -> Option<&Formula> {
        self.0.get(atom)
    }

    /// Every image is an atom.
    pub fn is_atomic(&self) -> bool {
        self.0.values().all(|f| matches!(f, Formula::Atom(_)))
    }

    /// Homomorphic image of `f`. A non-atomic image is only allowed for atoms
    /// that occur positively.
    pub fn apply(&self, f: &Formula) -> Result<Formula, FormulaError> {
        let image = |a: &Name| self.0.get(a).ok_or_else(|| FormulaError::MissingSubstitution(a.to_string()));
        Ok(match f {
            Formula::Atom(a) => image(a)?.clone(),
            Formula::NegAtom(a) => match image(a)? {
                Formula::Atom(b) => Formula::NegAtom(b.clone()),
                other => {
                    return Err(FormulaError::NonAtomicUnderNegation { atom: a.to_string(), image: other.to_string() })
                }
            },
            Formula::Or(l, r) => Formula::or(self.apply(l)?, self.apply(r)?),
            Formula::And(l, r) => Formula::and(self.apply(l)?, self.apply(r)?),
        })
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

/// The atomic substitution `σ` with `σ(beta) = g`, if there is one.
pub fn find_atomic_instance_witness(g: &Formula, beta: &Formula) -> Option<Substitution> {
    fn walk(g: &Formula, beta: &Formula, map: &mut BTreeMap<Name, Name>) -> bool {
        let mut bind = |x: &Name, p: &Name| match map.get(x) {
            Some(bound) => bound == p,
            None => {
                map.insert(x.clone(), p.clone());
                true
            }
        };
        match (g, beta) {
            (Formula::Atom(p), Formula::Atom(x)) | (Formula::NegAtom(p), Formula::NegAtom(x)) => bind(x, p),
            (Formula::Or(a, b), Formula::Or(c, d)) | (Formula::And(a, b), Formula::And(c, d)) => {
                walk(a, c, map) && walk(b, d, map)
            }
            _ => false,
        }
    }
    let mut map = BTreeMap::new();
    walk(g, beta, &mut map).then(|| Substitution(map.into_iter().map(|(x, p)| (x, Formula::Atom(p))).collect()))
}

// ---------------------------------------------------------------------------
// Rendering

const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_LIT: u8 = 3;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        _ => PREC_LIT,
    }
}

fn write_formula(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::Atom(a) => out.write_str(a),
        Formula::NegAtom(a) => write!(out, "~{a}"),
        Formula::Or(l, r) | Formula::And(l, r) => {
            let (prec, op) = if matches!(f, Formula::Or(..)) { (PREC_OR, " | ") } else { (PREC_AND, " & ") };
            write_child(l, prec, false, out)?;
            out.write_str(op)?;
            write_child(r, prec, true, out)
        }
    }
}

fn write_child(child: &Formula, parent: u8, right: bool, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = precedence(child);
    if p < parent || (right && p == parent) {
        out.write_str("(")?;
        write_formula(child, out)?;
        out.write_str(")")
    } else {
        write_formula(child, out)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}

// ---------------------------------------------------------------------------
// Parsing

/// Surface syntax, before negations and implications are eliminated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Atom(Name),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn atom(name: &str) -> Expr {
        Expr::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Expr, b: Expr) -> Expr {
        Expr::Implies(Box::new(a), Box::new(b))
    }

    pub fn to_nnf(&self) -> Formula {
        self.nnf(false)
    }

    fn nnf(&self, negate: bool) -> Formula {
        match self {
            Expr::Atom(a) if negate => Formula::NegAtom(a.clone()),
            Expr::Atom(a) => Formula::Atom(a.clone()),
            Expr::Not(e) => e.nnf(!negate),
            Expr::And(a, b) if negate => Formula::or(a.nnf(true), b.nnf(true)),
            Expr::And(a, b) => Formula::and(a.nnf(false), b.nnf(false)),
            Expr::Or(a, b) if negate => Formula::and(a.nnf(true), b.nnf(true)),
            Expr::Or(a, b) => Formula::or(a.nnf(false), b.nnf(false)),
            Expr::Implies(a, b) if negate => Formula::and(a.nnf(false), b.nnf(true)),
            Expr::Implies(a, b) => Formula::or(a.nnf(true), b.nnf(false)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => Token::Not,
            b'&' => Token::And,
            b'|' => Token::Or,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((i, Token::Implies));
                i += 2;
                continue;
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(FormulaError::Syntax { pos: i, message: format!("unexpected character {ch:?}") });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax { pos: self.pos(), message: message.into() })
    }

    fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<Expr, FormulaError> {
        let lhs = self.disjunction()?;
        if self.eat(&Token::Implies) {
            let rhs = self.implication()?;
            return Ok(Expr::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Expr, FormulaError> {
        let mut acc = self.conjunction()?;
        while self.eat(&Token::Or) {
            acc = Expr::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Expr, FormulaError> {
        let mut acc = self.unary()?;
        while self.eat(&Token::And) {
            acc = Expr::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, FormulaError> {
        match self.peek().cloned() {
            Some(Token::Not) => {
                self.at += 1;
                Ok(Expr::not(self.unary()?))
            }
            Some(Token::Ident(name)) => {
                self.at += 1;
                Ok(Expr::Atom(name.as_str().into()))
            }
            Some(Token::LParen) => {
                self.at += 1;
                let inner = self.implication()?;
                if !self.eat(&Token::RParen) {
                    return self.error("expected `)`");
                }
                Ok(inner)
            }
            Some(tok) => self.error(format!("unexpected token {tok:?}")),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses surface syntax without normalizing it.
pub fn parse_expr(text: &str) -> Result<Expr, FormulaError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, at: 0, end: text.len() };
    let expr = parser.implication()?;
    if parser.at != parser.tokens.len() {
        return parser.error("trailing input");
    }
    Ok(expr)
}

/// Parses `~`, `&`, `|`, `->` (loosest to tightest: `->`, `|`, `&`, `~`)
/// into negation normal form.
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    parse_expr(text).map(|e| e.to_nnf())
}

impl std::str::FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// ---------------------------------------------------------------------------
// Tautology checking

#[derive(Clone, Copy)]
enum Op {
    Lit(u32, bool),
    Or,
    And,
}

/// Postfix form of a formula with atoms replaced by indices.
struct Program {
    atoms: Vec<Name>,
    ops: Vec<Op>,
}

const COLUMN: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

impl Program {
    fn compile(f: &Formula) -> Program {
        let atoms: Vec<Name> = f.atoms().into_iter().collect();
        let mut ops = Vec::with_capacity(f.length());
        fn emit(f: &Formula, atoms: &[Name], ops: &mut Vec<Op>) {
            let index = |a: &Name| atoms.binary_search(a).expect("atom collected") as u32;
            match f {
                Formula::Atom(a) => ops.push(Op::Lit(index(a), true)),
                Formula::NegAtom(a) => ops.push(Op::Lit(index(a), false)),
                Formula::Or(l, r) => {
                    emit(l, atoms, ops);
                    emit(r, atoms, ops);
                    ops.push(Op::Or);
                }
                Formula::And(l, r) => {
                    emit(l, atoms, ops);
                    emit(r, atoms, ops);
                    ops.push(Op::And);
                }
            }
        }
        emit(f, &atoms, &mut ops);
        Program { atoms, ops }
    }

    /// Evaluates 64 consecutive rows of the truth table at once.
    fn eval_block(&self, block: u64, stack: &mut Vec<u64>) -> u64 {
        stack.clear();
        for op in &self.ops {
            match *op {
                Op::Lit(i, positive) => {
                    let column = if (i as usize) < COLUMN.len() {
                        COLUMN[i as usize]
                    } else if (block >> (i as usize - COLUMN.len())) & 1 == 1 {
                        u64::MAX
                    } else {
                        0
                    };
                    stack.push(if positive { column } else { !column });
                }
                Op::Or => {
                    let r = stack.pop().expect("operand");
                    let l = stack.last_mut().expect("operand");
                    *l |= r;
                }
                Op::And => {
                    let r = stack.pop().expect("operand");
                    let l = stack.last_mut().expect("operand");
                    *l &= r;
                }
            }
        }
        stack.pop().expect("result")
    }

    fn truth_table_falsifier(&self) -> Option<Vec<bool>> {
        let n = self.atoms.len();
        let (blocks, valid) = if n < 6 { (1u64, (1u64 << (1 << n)) - 1) } else { (1u64 << (n - 6), u64::MAX) };
        let mut stack = Vec::new();
        for block in 0..blocks {
            let falsified = !self.eval_block(block, &mut stack) & valid;
            if falsified != 0 {
                let row = block * 64 + u64::from(falsified.trailing_zeros());
                return Some((0..n).map(|i| (row >> i) & 1 == 1).collect());
            }
        }
        None
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tri {
    True,
    False,
    Unknown,
}

enum Node {
    Lit(usize, bool),
    Or(usize, usize),
    And(usize, usize),
}

/// Backtracking search for a falsifying assignment, with propagation of
/// literals forced by the requirement that the formula be false.
struct Falsifier {
    nodes: Vec<Node>,
    root: usize,
    order: Vec<usize>,
    vars: usize,
}

impl Falsifier {
    fn new(f: &Formula, atoms: &[Name]) -> Falsifier {
        let mut nodes = Vec::new();
        let mut freq = vec![0usize; atoms.len()];
        fn build(f: &Formula, atoms: &[Name], nodes: &mut Vec<Node>, freq: &mut [usize]) -> usize {
            let node = match f {
                Formula::Atom(a) | Formula::NegAtom(a) => {
                    let i = atoms.binary_search(a).expect("atom collected");
                    freq[i] += 1;
                    Node::Lit(i, matches!(f, Formula::Atom(_)))
                }
                Formula::Or(l, r) => Node::Or(build(l, atoms, nodes, freq), build(r, atoms, nodes, freq)),
                Formula::And(l, r) => Node::And(build(l, atoms, nodes, freq), build(r, atoms, nodes, freq)),
            };
            nodes.push(node);
            nodes.len() - 1
        }
        let root = build(f, atoms, &mut nodes, &mut freq);
        let mut order: Vec<usize> = (0..atoms.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(freq[i]));
        Falsifier { nodes, root, order, vars: atoms.len() }
    }

    fn eval(&self, node: usize, values: &[Option<bool>]) -> Tri {
        match self.nodes[node] {
            Node::Lit(v, positive) => match values[v] {
                Some(b) if b == positive => Tri::True,
                Some(_) => Tri::False,
                None => Tri::Unknown,
            },
            Node::Or(l, r) => match (self.eval(l, values), self.eval(r, values)) {
                (Tri::True, _) | (_, Tri::True) => Tri::True,
                (Tri::False, Tri::False) => Tri::False,
                _ => Tri::Unknown,
            },
            Node::And(l, r) => match (self.eval(l, values), self.eval(r, values)) {
                (Tri::False, _) | (_, Tri::False) => Tri::False,
                (Tri::True, Tri::True) => Tri::True,
                _ => Tri::Unknown,
            },
        }
    }

    /// Literals that must be false for `node` to be false.
    fn forced(&self, node: usize, values: &[Option<bool>], out: &mut Vec<(usize, bool)>) {
        match self.nodes[node] {
            Node::Lit(v, positive) => {
                if values[v].is_none() {
                    out.push((v, !positive));
                }
            }
            Node::Or(l, r) => {
                self.forced(l, values, out);
                self.forced(r, values, out);
            }
            Node::And(l, r) => match (self.eval(l, values), self.eval(r, values)) {
                (Tri::True, _) => self.forced(r, values, out),
                (_, Tri::True) => self.forced(l, values, out),
                _ => {}
            },
        }
    }

    fn run(&self) -> Option<Vec<bool>> {
        let values = vec![None; self.vars];
        self.search(values).map(|vals| vals.into_iter().map(|v| v.unwrap_or(false)).collect())
    }

    fn search(&self, mut values: Vec<Option<bool>>) -> Option<Vec<Option<bool>>> {
        loop {
            match self.eval(self.root, &values) {
                Tri::True => return None,
                Tri::False => return Some(values),
                Tri::Unknown => {}
            }
            let mut forced = Vec::new();
            self.forced(self.root, &values, &mut forced);
            if forced.is_empty() {
                break;
            }
            for (v, b) in forced {
                match values[v] {
                    None => values[v] = Some(b),
                    Some(prev) if prev != b => return None,
                    Some(_) => {}
                }
            }
        }
        let var = *self.order.iter().find(|&&v| values[v].is_none())?;
        for choice in [false, true] {
            let mut next = values.clone();
            next[var] = Some(choice);
            if let Some(found) = self.search(next) {
                return Some(found);
            }
        }
        None
    }
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

/// All formulas over the literals of `atoms` with at most `max_len` symbols,
/// ordered by literal count.
pub fn enumerate_formulas(atoms: &[&str], max_len: usize) -> Vec<Formula> {
    let mut out = Vec::new();
    for_each_formula(atoms, max_len, |f| out.push(f.clone()));
    out
}

/// Streams the same sequence as [`enumerate_formulas`] without storing the
/// largest layer.
pub fn for_each_formula(atoms: &[&str], max_len: usize, mut visit: impl FnMut(&Formula)) {
    let max_literals = max_len.div_ceil(2);
    if max_literals == 0 {
        return;
    }
    let mut layers: Vec<Vec<Arc<Formula>>> = vec![Vec::new()];
    let literals: Vec<Arc<Formula>> =
        atoms.iter().flat_map(|a| [Arc::new(Formula::atom(a)), Arc::new(Formula::neg_atom(a))]).collect();
    for f in &literals {
        visit(f);
    }
    layers.push(literals);
    for size in 2..=max_literals {
        let last = size == max_literals;
        let mut layer = Vec::new();
        for left_size in 1..size {
            let (lefts, rights) = (&layers[left_size], &layers[size - left_size]);
            for l in lefts {
                for r in rights {
                    for f in [Formula::Or(l.clone(), r.clone()), Formula::And(l.clone(), r.clone())] {
                        visit(&f);
                        if !last {
                            layer.push(Arc::new(f));
                        }
                    }
                }
            }
        }
        layers.push(layer);
    }
}

/// Atom-name to index lookups for callers that evaluate many rows.
pub fn atom_index(f: &Formula) -> HashMap<Name, usize> {
    f.atoms().into_iter().enumerate().map(|(i, a)| (a, i)).collect()
}
