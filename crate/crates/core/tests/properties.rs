use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;

use cirquent_core::decide::count_witnesses;
use cirquent_core::oracle::brute_force_tautology;
use cirquent_core::{
    check, check_width_bound, decide_ccc, decide_cl5, enumerate_reverse, normalize, parse, prove, verify_witness,
    Cirquent, Cl5Decision, Formula, Group, Outcome, SearchBudget, SystemId, TautologyCheck,
};

fn formula(atoms: &'static [&'static str], max_literals: u32) -> impl Strategy<Value = Formula> {
    let leaf = (prop::sample::select(atoms), any::<bool>()).prop_map(|(a, positive)| {
        if positive {
            Formula::atom(a)
        } else {
            Formula::neg_atom(a)
        }
    });
    leaf.prop_recursive(8, max_literals, 2, |inner| {
        (inner.clone(), inner, any::<bool>())
            .prop_map(|(l, r, or)| if or { Formula::or(l, r) } else { Formula::and(l, r) })
    })
}

fn cirquent(max_pool: usize, max_groups: usize) -> impl Strategy<Value = Cirquent> {
    prop::collection::vec(formula(&["P", "Q"], 2), 0..=max_pool).prop_flat_map(move |pool| {
        let n = pool.len();
        let group = prop::collection::btree_set(0..n.max(1), 0..=n)
            .prop_map(move |s| Group::new(s.into_iter().filter(|&i| i < n)));
        prop::collection::vec(group, 0..=max_groups)
            .prop_map(move |groups| Cirquent::new(pool.clone(), groups).expect("indices in range"))
    })
}

/// Every cirquent reachable from `c` by exchanges.
fn exchange_closure(c: &Cirquent) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([c.clone()]);
    seen.insert(serde_json::to_string(c).unwrap());
    while let Some(cur) = queue.pop_front() {
        let swaps = (0..cur.arity().saturating_sub(1))
            .map(|i| cur.swap_oformulas(i).unwrap())
            .chain((0..cur.width().saturating_sub(1)).map(|i| cur.swap_ogroups(i).unwrap()));
        for next in swaps.collect::<Vec<_>>() {
            if seen.insert(serde_json::to_string(&next).unwrap()) {
                queue.push_back(next);
            }
        }
    }
    seen
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn render_then_parse_is_identity(f in formula(&["P", "Q", "R", "s1", "long_name"], 20)) {
        prop_assert!(f.length() <= 40);
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn tautology_check_matches_truth_tables(f in formula(&["a", "b", "c", "d", "e", "f", "g", "h"], 14)) {
        let check = f.is_tautology();
        prop_assert_eq!(check.holds(), brute_force_tautology(&f).unwrap());
        if let TautologyCheck::Countermodel(m) = check {
            prop_assert!(!f.evaluate(&m).unwrap());
        }
    }

    #[test]
    fn canonical_key_matches_exchange_closure(a in cirquent(4, 3), b in cirquent(4, 3), steps in prop::collection::vec(any::<bool>(), 0..6)) {
        let mut shuffled = a.clone();
        for (i, oformula) in steps.into_iter().enumerate() {
            let (len, swap): (usize, fn(&Cirquent, usize) -> _) = if oformula {
                (shuffled.arity(), Cirquent::swap_oformulas)
            } else {
                (shuffled.width(), Cirquent::swap_ogroups)
            };
            if len >= 2 {
                shuffled = swap(&shuffled, i % (len - 1)).unwrap();
            }
        }
        prop_assert_eq!(a.canonical_key(), shuffled.canonical_key());
        let closure = exchange_closure(&a);
        let same = closure.contains(&serde_json::to_string(&b).unwrap());
        prop_assert_eq!(a.canonical_key() == b.canonical_key(), same);
    }

    #[test]
    fn reverse_candidates_derive_their_goal(goal in cirquent(4, 3)) {
        for system in [SystemId::Cl5minus, SystemId::Cl5, SystemId::Ccc] {
            for cand in enumerate_reverse(system, &goal) {
                prop_assert!(system.admits(cand.rule.kind()));
                // Premises are listed up to exchange, so compare up to exchange.
                prop_assert_eq!(cand.conclusion().unwrap().canonical_key(), goal.canonical_key());
            }
        }
    }

    #[test]
    fn search_results_are_sound(f in formula(&["P", "Q", "R"], 6)) {
        let budget = SearchBudget::with_nodes(20_000);
        let classical = decide_ccc(&f).is_provable();
        let binary = decide_cl5(&f);
        for system in [SystemId::Cl5minus, SystemId::Cl5, SystemId::Ccc] {
            if let Outcome::Proved(p) = prove(system, &f, &budget).outcome {
                prop_assert!(check(system, &p).is_ok());
                prop_assert_eq!(p.cirquent.clone(), Cirquent::from_formula(f.clone()));
                prop_assert!(classical);
                let normal = normalize(&p).unwrap();
                prop_assert_eq!(&normal.cirquent, &p.cirquent);
                if system != SystemId::Ccc {
                    prop_assert!(binary.is_provable());
                }
                if system == SystemId::Cl5minus {
                    prop_assert!(check_width_bound(&p, &f).is_ok());
                }
            }
        }
    }

    #[test]
    fn cl5_witnesses_verify(f in formula(&["P", "Q"], 6)) {
        match decide_cl5(&f) {
            Cl5Decision::Provable(w) => {
                prop_assert!(verify_witness(&f, &w));
                prop_assert!(w.beta.is_tautology().holds());
                prop_assert!(count_witnesses(&f) > 0);
            }
            Cl5Decision::NotProvable => prop_assert_eq!(count_witnesses(&f), 0),
        }
    }
}
