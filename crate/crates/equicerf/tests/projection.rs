mod support;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use equicerf::bifgroup::{sphere_index, su4_generators, weight, Generator, Projector, SphereData};
use equicerf::casson::{su4_preset, su4_strata};
use equicerf::repcat::{IndexClass, RepElement, TotalIndex};
use equicerf::ringcore::{int, CycSum};
use equicerf::strata::{IrrepLabel, Stratum};

use support::{random_base, random_rep, random_total};

fn class(s: &Stratum, terms: &[(IrrepLabel, i64)]) -> IndexClass {
    IndexClass::new(RepElement::new(s, terms.iter().map(|(l, c)| (*l, int(*c)))).unwrap())
}

/// `[H, V] − [H, 0] − [K, ℝ]`.
fn printed(h: &Stratum, v: IrrepLabel, k: &Stratum) -> TotalIndex {
    let mut t = TotalIndex::basis(class(h, &[(v, 1)]));
    t.add_term(IndexClass::zero_rep(h), -1);
    t.add_term(class(k, &[(IrrepLabel::Triv, 1)]), -1);
    t
}

#[test]
fn su4_generators_match_printed_values() {
    let p = Projector::builtin();
    let [a, b, c, d, e] = su4_strata();
    let got: Vec<TotalIndex> = su4_generators(p.branching())
        .unwrap()
        .into_iter()
        .map(|g| g.value)
        .collect();
    let want = vec![
        printed(&b, IrrepLabel::Std(0, 1), &a),
        printed(&c, IrrepLabel::Std(0, 1), &a),
        printed(&d, IrrepLabel::Adj(0), &c),
        printed(&e, IrrepLabel::Std(0, 1), &b),
    ];
    assert_eq!(got, want);
}

fn constructible<R: rand::Rng>(p: &Projector, rng: &mut R) -> Generator {
    let [_, b, c, d, e] = su4_strata();
    let cases = [
        (b, IrrepLabel::Std(0, 1)),
        (c, IrrepLabel::Std(0, 1)),
        (d, IrrepLabel::Adj(0)),
        (e, IrrepLabel::Std(0, 1)),
    ];
    let (s, v) = &cases[rng.random_range(0..cases.len())];
    let v_prime = random_rep(s, rng);
    let datum = sphere_index(s, *v, &SphereData::default()).unwrap();
    Generator::xi(s, *v, &v_prime, &datum, p.branching()).unwrap()
}

#[test]
fn projection_kills_generators() {
    let p = Projector::builtin();
    for g in su4_generators(p.branching()).unwrap() {
        assert!(p.project(&g.value).unwrap().is_zero(), "{:?}", g.value);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let g = constructible(&p, &mut rng);
        assert!(p.project(&g.value).unwrap().is_zero(), "{:?}", g.kind);
    }
    for _ in 0..100 {
        let s = &su4_strata()[rng.random_range(0..5)];
        let g = Generator::birth_death(&random_rep(s, &mut rng));
        assert!(p.project(&g.value).unwrap().is_zero());
    }
}

#[test]
fn projection_lands_in_normal_form_and_is_idempotent() {
    let p = Projector::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let x = random_total(&mut rng, 5);
        let px = p.project(&x).unwrap();
        assert!(px.keys().all(|c| c.is_normal_form()), "{px:?}");
        assert_eq!(p.project(&px).unwrap(), px);
    }
}

#[test]
fn preset_weights_on_adjoint_multiples() {
    // frozen: k even gives −k/2, k odd gives (k − 1)/2
    let p = Projector::builtin();
    let base = su4_preset().unwrap();
    let d = Stratum::of(&[(2, 2)]);
    let got: Vec<CycSum> = (0..=8)
        .map(|k| weight(&TotalIndex::basis(class(&d, &[(IrrepLabel::Adj(0), k)])), &base, &p).unwrap())
        .collect();
    let want: Vec<CycSum> = (0..=8i64)
        .map(|k| CycSum::constant(int(if k % 2 == 0 { -k / 2 } else { (k - 1) / 2 })))
        .collect();
    assert_eq!(got, want);
}

#[test]
fn unsupported_sphere_datum_is_reported() {
    let s: Stratum = "((1,2),(1,3))".parse().unwrap();
    assert!(sphere_index(&s, IrrepLabel::Std(0, 1), &SphereData::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projection_is_additive(seed in any::<u64>()) {
        let p = Projector::builtin();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_total(&mut rng, 3);
        let y = random_total(&mut rng, 3);
        let lhs = p.project(&(&x + &y)).unwrap();
        let rhs = &p.project(&x).unwrap() + &p.project(&y).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn weight_ignores_generators(seed in any::<u64>()) {
        let p = Projector::builtin();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_base(&mut rng);
        let x = random_total(&mut rng, 3);
        let g = constructible(&p, &mut rng);
        let k = rng.random_range(-2..=2);
        let moved = &x + &g.value.scale(k);
        prop_assert_eq!(weight(&x, &base, &p).unwrap(), weight(&moved, &base, &p).unwrap());
    }

    #[test]
    fn weight_of_zero_is_zero(seed in any::<u64>()) {
        let p = Projector::builtin();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_base(&mut rng);
        prop_assert_eq!(weight(&TotalIndex::zero(), &base, &p).unwrap(), CycSum::zero());
    }
}
