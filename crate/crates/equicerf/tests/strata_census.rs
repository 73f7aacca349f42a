mod support;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use equicerf::repcat::{haar_fixed_dimension, predicted_fixed_dimension, Branching, RepElement};
use equicerf::ringcore::int;
use equicerf::strata::{
    all_moves, bifurcation_arrows, d_k, enumerate_strata, group_of, m_less, perp_decomposition, reachability_order,
    DivisionType, Embedding, IrrepLabel, Mode, Stratum,
};

use support::{
    brute_admissible, brute_strata, commutant_sym_dim, complex_structure, exact_restrict, quaternion_structure,
};

fn pairs(s: &Stratum) -> Vec<(u32, u32)> {
    s.factors().iter().map(|f| (f.rank, f.mult)).collect()
}

fn st(text: &str) -> Stratum {
    text.parse().unwrap()
}

#[test]
fn su4_census_is_the_five_strata() {
    let got: BTreeSet<Stratum> = enumerate_strata(4, Mode::HomologySphere).into_iter().collect();
    let want: BTreeSet<Stratum> = ["((4,1))", "((1,1),(3,1))", "((2,1),(2,1))", "((2,2))", "((1,2),(2,1))"]
        .iter()
        .map(|t| st(t))
        .collect();
    assert_eq!(got, want);
}

#[test]
fn census_matches_brute_force() {
    for n in 1..=9 {
        let raw: BTreeSet<_> = enumerate_strata(n, Mode::Raw).iter().map(pairs).collect();
        assert_eq!(raw, brute_strata(n), "raw n={n}");
        let zhs: BTreeSet<_> = enumerate_strata(n, Mode::HomologySphere).iter().map(pairs).collect();
        let want: BTreeSet<_> = brute_strata(n).into_iter().filter(|s| brute_admissible(s, n)).collect();
        assert_eq!(zhs, want, "zhs n={n}");
    }
}

#[test]
fn su4_arrows() {
    let zhs: BTreeSet<_> = bifurcation_arrows(4, Mode::HomologySphere).into_iter().collect();
    let want: BTreeSet<_> = [
        ("((1,1),(3,1))", "((4,1))"),
        ("((2,1),(2,1))", "((4,1))"),
        ("((2,2))", "((2,1),(2,1))"),
        ("((1,2),(2,1))", "((1,1),(3,1))"),
    ]
    .iter()
    .map(|(a, b)| (st(a), st(b)))
    .collect();
    assert_eq!(zhs, want);
    let raw: BTreeSet<_> = bifurcation_arrows(4, Mode::Raw).into_iter().collect();
    assert!(raw.is_superset(&zhs));
    assert!(raw.contains(&(st("((1,2),(2,1))"), st("((1,1),(1,1),(2,1))"))));
}

#[test]
fn reachability_is_transitive_on_su4() {
    let r = reachability_order(4, Mode::HomologySphere);
    assert!(r.reaches(&st("((1,2),(2,1))"), &st("((4,1))")));
    assert!(r.reaches(&st("((2,2))"), &st("((4,1))")));
    assert!(!r.reaches(&st("((4,1))"), &st("((2,2))")));
}

#[test]
fn dimension_table_matches_linear_algebra() {
    for r in 1..=6usize {
        assert_eq!(d_k(DivisionType::Real, r as u64) as usize, commutant_sym_dim(r, &[]));
        assert_eq!(
            d_k(DivisionType::Complex, r as u64) as usize,
            commutant_sym_dim(r, &[complex_structure(r)])
        );
        assert_eq!(
            d_k(DivisionType::Quaternionic, r as u64) as usize,
            commutant_sym_dim(r, &quaternion_structure(r))
        );
    }
}

#[test]
fn su4_perpendicular_parts() {
    let cases: [(&str, &[(IrrepLabel, u32)]); 5] = [
        ("((4,1))", &[]),
        ("((1,1),(3,1))", &[(IrrepLabel::Std(0, 1), 3)]),
        ("((2,1),(2,1))", &[(IrrepLabel::Std(0, 1), 4)]),
        ("((2,2))", &[(IrrepLabel::Adj(0), 4)]),
        ("((1,2),(2,1))", &[(IrrepLabel::Adj(0), 1), (IrrepLabel::Std(0, 1), 2)]),
    ];
    for (s, want) in cases {
        let s = st(s);
        let got: BTreeMap<_, _> = perp_decomposition(&s).into_iter().filter(|(_, c)| *c > 0).collect();
        let want: BTreeMap<_, _> = want.iter().copied().collect();
        assert_eq!(got, want, "{s}");
        // real dimensions: ℂ³, ℂ⁴, su(2)^4, su(2) ⊕ (ℂ²)²
        let dim: u32 = got.iter().map(|(l, c)| s.real_dim(*l) * c).sum();
        assert_eq!(dim, [0, 6, 8, 12, 11][su4_position(&s)]);
    }
}

fn su4_position(s: &Stratum) -> usize {
    equicerf::casson::su4_strata().iter().position(|t| t == s).unwrap()
}

#[test]
fn haar_fixed_dimension_small_strata() {
    for n in 1..=4 {
        for s in enumerate_strata(n, Mode::Raw) {
            let est = haar_fixed_dimension(&s, 4_000, 1);
            assert!(est.residual < 0.05, "{s}: {est:?}");
            assert_eq!(est.rounded, predicted_fixed_dimension(&s), "{s}");
        }
    }
}

#[test]
fn every_move_gives_a_verified_smaller_stabilizer() {
    for n in 2..=6 {
        for s in enumerate_strata(n, Mode::Raw) {
            for mv in all_moves(&s) {
                let e = Embedding::from_move(&s, &mv).unwrap();
                e.verify().unwrap();
                assert!(m_less(&group_of(&e.target), &group_of(&s)), "{s} → {}", e.target);
            }
        }
    }
}

#[test]
fn branching_matches_block_rules() {
    let br = Branching::new(6_000, 21);
    for n in 2..=5 {
        for s in enumerate_strata(n, Mode::Raw) {
            for mv in all_moves(&s) {
                let e = Embedding::from_move(&s, &mv).unwrap();
                for l in s.catalog() {
                    let x = RepElement::single(&s, l, int(1)).unwrap();
                    let got = br.restrict(&x, &e).unwrap();
                    let want = RepElement::new(
                        &e.target,
                        exact_restrict(l, &e).into_iter().map(|(k, c)| (k, int(c as i64))),
                    )
                    .unwrap();
                    assert_eq!(got, want, "{l} along {s} → {} ({mv})", e.target);
                    assert_eq!(got.dim(), x.dim());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composed_branching_is_functorial(n in 3u32..=5, pick in any::<prop::sample::Index>(), pick2 in any::<prop::sample::Index>()) {
        let strata = enumerate_strata(n, Mode::Raw);
        let s = &strata[pick.index(strata.len())];
        let moves = all_moves(s);
        prop_assume!(!moves.is_empty());
        let e1 = Embedding::from_move(s, &moves[pick2.index(moves.len())]).unwrap();
        let moves2 = all_moves(&e1.target);
        prop_assume!(!moves2.is_empty());
        let e2 = Embedding::from_move(&e1.target, &moves2[pick2.index(moves2.len())]).unwrap();
        let e = e1.compose(&e2).unwrap();
        e.verify().unwrap();
        let br = Branching::shared();
        for l in s.catalog() {
            let x = RepElement::single(s, l, int(1)).unwrap();
            let direct = br.restrict(&x, &e).unwrap();
            let staged = br.restrict(&br.restrict(&x, &e1).unwrap(), &e2).unwrap();
            prop_assert_eq!(direct, staged);
        }
    }

    #[test]
    fn stratum_text_round_trips(n in 1u32..=8, pick in any::<prop::sample::Index>()) {
        let strata = enumerate_strata(n, Mode::Raw);
        let s = &strata[pick.index(strata.len())];
        let back: Stratum = s.to_string().parse().unwrap();
        prop_assert_eq!(&back, s);
        prop_assert_eq!(s.n(), n);
    }
}
