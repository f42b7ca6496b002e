use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use kazhdan::chevalley::finite::{symmetric4, Perm};
use kazhdan::chevalley::{enumerate_ball, steinberg_generators, Ball, IntMatrix};
use kazhdan::elements::ChevalleyRing;
use kazhdan::groupring::{RingContext, RingElement};
use kazhdan::rootsys::{weyl_group, Family, PlaneCensus, RootSystem, WeylElement};
use kazhdan::Exec;
use num_rational::BigRational;
use proptest::prelude::*;

const SYSTEMS: &[(Family, usize)] = &[
    (Family::A, 1),
    (Family::A, 2),
    (Family::A, 4),
    (Family::B, 3),
    (Family::C, 2),
    (Family::C, 4),
    (Family::D, 4),
    (Family::D, 5),
    (Family::E, 6),
    (Family::F, 4),
    (Family::G, 2),
];

fn system(i: usize) -> RootSystem {
    let (f, n) = SYSTEMS[i];
    RootSystem::build(f, n).unwrap()
}

fn word(rs: &RootSystem, letters: &[usize]) -> WeylElement {
    letters.iter().fold(WeylElement::identity(rs), |w, &a| {
        w.compose(&WeylElement::reflection(rs, a % rs.len()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weyl_elements_permute_roots(i in 0..SYSTEMS.len(), letters in prop::collection::vec(0usize..1000, 0..12)) {
        let rs = system(i);
        let w = word(&rs, &letters);
        let image: BTreeSet<usize> = (0..rs.len()).map(|a| w.act_root(a)).collect();
        prop_assert_eq!(image.len(), rs.len());
        for a in 0..rs.len() {
            let v = w.apply(rs.root(a).coords()).unwrap();
            prop_assert_eq!(rs.index_of(&v), Some(w.act_root(a)));
        }
    }

    #[test]
    fn plane_types_are_weyl_invariant(i in 0..SYSTEMS.len(), letters in prop::collection::vec(0usize..1000, 1..8)) {
        let rs = system(i);
        let census = PlaneCensus::new(&rs).unwrap();
        let w = word(&rs, &letters);
        for p in census.planes() {
            let (a, b) = p.basis_pair;
            let q = census.plane_of_pair(w.act_root(a), w.act_root(b)).unwrap();
            prop_assert_eq!(q.plane_type, p.plane_type);
            prop_assert_eq!(q.member_roots.len(), p.member_roots.len());
        }
    }
}

#[test]
fn gamma_is_the_minimal_irreducible_incidence() {
    for i in 0..SYSTEMS.len() {
        let rs = system(i);
        let census = PlaneCensus::new(&rs).unwrap();
        let irreducible = |a: usize| {
            census
                .planes()
                .iter()
                .filter(|p| p.plane_type.is_irreducible() && p.contains(a))
                .count()
        };
        let min = (0..rs.len()).map(irreducible).min().unwrap();
        assert_eq!(census.gamma(), min, "{:?}", SYSTEMS[i]);
        if rs.rank() >= 2 {
            for a in 0..rs.len() {
                assert!(census.planes().iter().any(|p| p.contains(a)));
            }
        }
    }
}

fn orbits(rs: &RootSystem) -> Vec<BTreeSet<usize>> {
    let group = weyl_group(rs).unwrap();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for a in 0..rs.len() {
        if seen.insert(a) {
            let orbit: BTreeSet<usize> = group.iter().map(|w| w.act_root(a)).collect();
            seen.extend(orbit.iter().copied());
            out.push(orbit);
        }
    }
    out
}

#[test]
fn weyl_group_is_transitive_on_roots_of_each_length() {
    for (f, n) in [(Family::A, 3), (Family::D, 4), (Family::E, 6), (Family::A, 5)] {
        assert_eq!(orbits(&RootSystem::build(f, n).unwrap()).len(), 1, "{f:?}{n}");
    }
    for (f, n) in [(Family::C, 3), (Family::B, 3), (Family::G, 2), (Family::F, 4)] {
        let rs = RootSystem::build(f, n).unwrap();
        let o = orbits(&rs);
        assert_eq!(o.len(), 2, "{f:?}{n}");
        for orbit in o {
            let long: BTreeSet<bool> = orbit.iter().map(|&a| rs.is_long(a)).collect();
            assert_eq!(long.len(), 1);
        }
    }
}

fn a2_context() -> &'static Arc<RingContext<IntMatrix>> {
    static CTX: OnceLock<ChevalleyRing> = OnceLock::new();
    CTX.get_or_init(|| ChevalleyRing::new(steinberg_generators(Family::A, 2).unwrap(), 2, Exec::default()).unwrap())
        .context()
}

fn s4_context() -> &'static Arc<RingContext<Perm>> {
    static CTX: OnceLock<Arc<RingContext<Perm>>> = OnceLock::new();
    CTX.get_or_init(|| {
        let ball = Ball::enumerate(Perm::identity(4), &symmetric4().unwrap(), 8, 1000, Exec::default()).unwrap();
        assert_eq!(ball.len(), 24);
        RingContext::new(ball, None, Exec::default()).unwrap()
    })
}

fn element<E: kazhdan::chevalley::Element>(
    ctx: &Arc<RingContext<E>>,
    support: usize,
    terms: &[(usize, i64, i64)],
) -> RingElement<E> {
    RingElement::from_terms(
        ctx,
        terms
            .iter()
            .map(|&(k, p, q)| (k % support, BigRational::new(p.into(), q.into()))),
    )
}

fn terms() -> impl Strategy<Value = Vec<(usize, i64, i64)>> {
    prop::collection::vec((0usize..10_000, -9i64..10, 1i64..5), 0..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms_in_sl3(a in terms(), b in terms(), c in terms()) {
        let ctx = a2_context();
        let support = ctx.ball().size_at(1);
        let (a, b, c) = (element(ctx, support, &a), element(ctx, support, &b), element(ctx, support, &c));
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(ab.star(), b.star().mul(&a.star()).unwrap());
        prop_assert_eq!(ab.augmentation(), a.augmentation() * b.augmentation());
        prop_assert!(ab.l1_norm() <= a.l1_norm() * b.l1_norm());
    }

    #[test]
    fn ring_axioms_in_s4(a in terms(), b in terms(), c in terms()) {
        let ctx = s4_context();
        let (a, b, c) = (element(ctx, 24, &a), element(ctx, 24, &b), element(ctx, 24, &c));
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(ab.star(), b.star().mul(&a.star()).unwrap());
        prop_assert_eq!(ab.augmentation(), a.augmentation() * b.augmentation());
        prop_assert!(ab.l1_norm() <= a.l1_norm() * b.l1_norm());
    }
}

#[test]
fn inversion_preserves_word_length() {
    for (f, n, r) in [(Family::A, 2, 3), (Family::C, 2, 2), (Family::A, 3, 2)] {
        let ball = enumerate_ball(&steinberg_generators(f, n).unwrap(), r).unwrap();
        for i in 0..ball.len() {
            let j = ball.inverse(i);
            assert_eq!(ball.inverse(j), i);
            assert_eq!(ball.word_length(i), ball.word_length(j));
        }
    }
}
