use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use udn_core::action::{fpr_ksets, SubsetAction};
use udn_core::atlas::element_of_shape;
use udn_core::classes::partitions;
use udn_core::domination::{is_tds_direct, ConjugateCriterion, TdsCertificate, Verification};
use udn_core::overgroups::{maximal_overgroups, ClimbOptions, OvergroupSet};
use udn_core::prob::{profile, q_hat, ProbProfile};
use udn_core::{Group, GroupSpec, Limits, Permutation, Subgroup};

fn grp(spec: &str) -> Group {
    let spec: GroupSpec = spec.parse().unwrap();
    Group::new(&spec, Limits::default(), 0).unwrap()
}

fn random(g: &Group, seed: u64) -> Permutation {
    g.random_element(&mut ChaCha8Rng::seed_from_u64(seed))
}

struct A6Fixture {
    group: Group,
    s: Permutation,
    set: OvergroupSet,
    profile: ProbProfile,
}

fn a6() -> &'static A6Fixture {
    static CELL: OnceLock<A6Fixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let group = grp("A6");
        let s = Permutation::parse("(1,2,3,4,5)", 6).unwrap();
        let set = maximal_overgroups(&group, &s, &ClimbOptions::certified()).unwrap();
        let profile = profile(&group, &set, true).unwrap();
        A6Fixture {
            group,
            s,
            set,
            profile,
        }
    })
}

fn m11() -> &'static Group {
    static CELL: OnceLock<Group> = OnceLock::new();
    CELL.get_or_init(|| grp("m11"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_map_contains_powers(seed in any::<u64>(), k in -30i64..30) {
        for g in [m11(), &grp("A8")] {
            let table = g.classes().unwrap();
            let x = random(g, seed);
            prop_assert_eq!(table.class_of(&x.pow(k)), table.power(table.class_of(&x), k));
        }
    }

    #[test]
    fn subgroup_orders_divide(seed in any::<u64>(), n in 1usize..3) {
        let g = m11();
        let gens: Vec<Permutation> = (0..n).map(|i| random(g, seed.wrapping_add(i as u64))).collect();
        let h = Subgroup::new(g, gens.clone()).unwrap();
        prop_assert!(g.order().is_multiple_of(h.order()));
        prop_assert!(gens.iter().all(|x| g.contains(x) && h.contains(x)));
    }

    #[test]
    fn element_of_shape_has_that_cycle_type(n in 2usize..14, pick in any::<prop::sample::Index>()) {
        let parts = partitions(n);
        let shape = pick.get(&parts).clone();
        let p = element_of_shape(n, &shape, false).unwrap();
        let mut ct = p.cycle_type();
        ct.sort_unstable_by(|a, b| b.cmp(a));
        prop_assert_eq!(&ct, &shape);
        let lcm = shape.iter().fold(1u64, |a, &l| a.lcm(&(l as u64)));
        prop_assert_eq!(p.order(), lcm);
    }

    #[test]
    fn q_hat_never_increases_when_every_f_is_at_most_one(c in 1usize..12) {
        let f = &a6().profile;
        prop_assume!(f.terms.iter().all(|t| t.f <= BigRational::one()));
        prop_assert!(q_hat(f, c + 1) <= q_hat(f, c));
    }

    #[test]
    fn domination_is_conjugation_invariant(seeds in prop::collection::vec(any::<u64>(), 2..5), h in any::<u64>()) {
        let fx = a6();
        let crit = ConjugateCriterion::new(&fx.set, 1 << 20).unwrap();
        let gs: Vec<Permutation> = seeds.iter().map(|&x| random(&fx.group, x)).collect();
        let h = random(&fx.group, h);
        let moved: Vec<Permutation> = gs.iter().map(|g| g.mul(&h)).collect();
        let members: Vec<Permutation> = gs.iter().map(|g| fx.s.conjugate_by(g)).collect();
        let direct = is_tds_direct(&fx.group, &members).unwrap();
        prop_assert_eq!(crit.is_tds(&gs), direct);
        prop_assert_eq!(crit.is_tds(&moved), direct);
    }

    #[test]
    fn certificates_round_trip(seeds in prop::collection::vec(any::<u64>(), 2..5)) {
        let fx = a6();
        let gs: Vec<Permutation> = seeds.iter().map(|&x| random(&fx.group, x)).collect();
        let cert = TdsCertificate {
            group: "A6".into(),
            degree: 6,
            element: fx.s.to_string(),
            conjugators: gs.iter().map(|g| g.to_string()).collect(),
            verification: Verification::Direct,
            seed: 0,
            budget: 0,
        };
        let back: TdsCertificate = serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
        prop_assert_eq!(back.conjugator_perms().unwrap(), gs);
        let members = back.members().unwrap();
        let distinct = members.iter().collect::<std::collections::HashSet<_>>().len() == members.len();
        let want = distinct && is_tds_direct(&fx.group, &members).unwrap();
        prop_assert_eq!(back.verify(&fx.group, None).unwrap().is_tds, want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fpr_ksets_matches_the_built_action(n in 4usize..9, k in 1usize..5, seed in any::<u64>()) {
        prop_assume!(2 * k <= n);
        let g = grp(&format!("S{n}"));
        let action = SubsetAction::new(&g, k).unwrap();
        let x = random(&g, seed);
        prop_assert_eq!(fpr_ksets(&x.cycle_type(), n, k).unwrap(), action.fpr(&x));
    }
}

#[test]
fn p_is_bounded_by_f() {
    for t in &a6().profile.terms {
        let p = t.p.clone().unwrap();
        assert!(p >= BigRational::zero() && p <= t.f && p <= BigRational::one());
    }
}

#[test]
fn a6_fixture_is_certified() {
    assert!(a6().set.is_certified());
    assert_eq!(a6().set.len(), 2);
    let total: BigUint = a6().profile.terms.iter().map(|t| t.size.clone()).sum();
    assert!(total < BigUint::from(360u32));
}
