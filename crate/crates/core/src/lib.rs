//! Cirquent calculus toolkit: formulas and cirquents, the rules of CCC, CL5
//! and CL5-, proof checking and normalization, proof search, semantic
//! decision procedures, hardness reductions and brute-force reference
//! oracles.

pub mod canon;
pub mod cirquent;
pub mod decide;
pub mod formula;
pub mod oracle;
pub mod proof;
pub mod reduce;
pub mod rules;
pub mod sample;
pub mod scaling;
pub mod search;

pub use canon::CanonicalKey;
pub use cirquent::{formula_cirquent, Cirquent, CirquentError, Group};
pub use decide::{decide_ccc, decide_cl5, verify_witness, BinaryWitness, CccDecision, Cl5Decision, Matching};
pub use formula::{parse, Assignment, Formula, FormulaError, Substitution, TautologyCheck};
pub use proof::{check, check_width_bound, metrics, normalize, Diagnostic, Proof, ProofMetrics};
pub use reduce::{tqbf_to_cl5, vc_to_cl5minus, Graph, ReduceError, Sigma2Instance, VcInstance};
pub use rules::{apply, enumerate_reverse, RuleApplication, RuleError, RuleKind, SystemId};
pub use search::{prove, prove_with, Outcome, SearchBudget, SearchOptions, SearchResult};
