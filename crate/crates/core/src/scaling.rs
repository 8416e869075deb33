//! Instance families for scaling studies, and the size envelope proofs of
//! the identity family are expected to fit.

use serde::Serialize;

use crate::formula::Formula;
use crate::reduce::{tqbf_to_cl5, vc_to_cl5minus, VcInstance};
use crate::rules::SystemId;
use crate::sample;

/// (¬P1 ∨ P1) ∧ … ∧ (¬Pn ∨ Pn), right-associated.
pub fn identity_chain(n: usize) -> Formula {
    assert!(n >= 1, "the chain needs at least one conjunct");
    Formula::and_all((1..=n).map(|i| {
        let p = format!("P{i}");
        Formula::or(Formula::neg_atom(&p), Formula::atom(&p))
    }))
    .expect("n >= 1")
}

/// Upper bound on the total proof size expected for a formula of length k:
/// 2k³. Proofs from the search stay far below it on the identity family; it
/// is a polynomial ceiling, not a tight estimate.
pub fn size_envelope(k: usize) -> usize {
    2 * k.pow(3)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Identity,
    Vc,
    Qbf,
}

impl Family {
    pub fn system(self) -> SystemId {
        match self {
            Family::Identity | Family::Vc => SystemId::Cl5minus,
            Family::Qbf => SystemId::Cl5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    pub family: Family,
    pub formula: Formula,
}

/// `count` instances of a family, growing with the index. Random families
/// draw from a generator seeded with `seed`.
pub fn family(family: Family, count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = sample::rng(seed);
    (1..=count)
        .map(|i| {
            let formula = match family {
                Family::Identity => identity_chain(i),
                Family::Vc => {
                    let graph = sample::random_graph(&mut rng, 2 + i / 2, 0.5);
                    let k = 1 + i / 3;
                    vc_to_cl5minus(&VcInstance { graph, k }).expect("valid instance")
                }
                Family::Qbf => {
                    let inst = sample::random_sigma2(&mut rng, 1 + i / 3, 1, 1 + i / 2, 2);
                    tqbf_to_cl5(&inst).expect("generated names are fresh").formula
                }
            };
            let tag = match family {
                Family::Identity => "identity",
                Family::Vc => "vc",
                Family::Qbf => "qbf",
            };
            Instance { id: format!("{tag}-{i:03}"), family, formula }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn identity_chain_shape() {
        assert_eq!(identity_chain(1), parse("~P1 | P1").unwrap());
        assert_eq!(identity_chain(3).length(), 11);
    }

    #[test]
    fn families_are_seeded() {
        for f in [Family::Identity, Family::Vc, Family::Qbf] {
            assert_eq!(family(f, 4, 9), family(f, 4, 9));
        }
        assert_eq!(family(Family::Vc, 3, 1)[2].id, "vc-003");
    }
}
