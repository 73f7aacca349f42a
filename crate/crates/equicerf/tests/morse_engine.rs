mod support;

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use equicerf::bifgroup::{sphere_index, weight, xi, Projector, SphereData};
use equicerf::error::Error;
use equicerf::morse::{
    bifurcation_family, find_critical_orbits, finite_total_index, sphere_datum_numeric, total_index, Constant,
    FiniteClass, FunctionHandle, LinearPath, ModelSpace, PolyOf, Radial, SearchOptions, TracePower,
};
use equicerf::repcat::{IndexClass, RepElement, TotalIndex};
use equicerf::ringcore::int;
use equicerf::strata::{IrrepLabel, Stratum};

use support::{radial_total_oracle, random_radial, random_su2_base};

fn family_total(space: &ModelSpace, v_prime: &[(usize, f64)], t: f64) -> TotalIndex {
    let f = bifurcation_family(space, 0, v_prime, Some(Arc::new(Constant(1.0))), t).unwrap();
    total_index(space, f.as_ref(), &SearchOptions::default()).unwrap()
}

/// Jump of the numeric total index across `t = 0` against `−ξ(V, V′)`.
fn check_cross_oracle(s: &Stratum, v: IrrepLabel, extra: IrrepLabel, sign: f64) {
    let p = Projector::builtin();
    let space = ModelSpace::rep_ball(s, &[v, extra], 1.0).unwrap();
    let jump = &family_total(&space, &[(1, sign)], 0.1) - &family_total(&space, &[(1, sign)], -0.1);
    // a negative-definite h puts the extra summand into every index
    let v_prime = if sign < 0.0 {
        RepElement::single(s, extra, int(1)).unwrap()
    } else {
        RepElement::zero(s)
    };
    let datum = sphere_index(s, v, &SphereData::default()).unwrap();
    let want = xi(s, v, &v_prime, &datum, p.branching()).unwrap();
    assert_eq!(jump, -want, "{s} {v} ⊕ {extra} ({sign})");
}

#[test]
fn cross_oracle_complex_line() {
    let c = Stratum::of(&[(2, 1), (2, 1)]);
    let v = IrrepLabel::Std(0, 1);
    check_cross_oracle(&c, v, IrrepLabel::Triv, -1.0);
    check_cross_oracle(&c, v, v, -1.0);
    check_cross_oracle(&c, v, v, 1.0);
}

#[test]
fn cross_oracle_su2() {
    let d = Stratum::of(&[(2, 2)]);
    let v = IrrepLabel::Adj(0);
    check_cross_oracle(&d, v, IrrepLabel::Triv, -1.0);
    check_cross_oracle(&d, v, v, -1.0);
    check_cross_oracle(&d, v, v, 1.0);
}

#[test]
fn two_element_group_census() {
    let space = ModelSpace::z2_line(1.0);
    let opts = SearchOptions::default();
    let before = finite_total_index(
        &space,
        bifurcation_family(&space, 0, &[], None, -0.5).unwrap().as_ref(),
        &opts,
    )
    .unwrap();
    let after = finite_total_index(
        &space,
        bifurcation_family(&space, 0, &[], None, 0.5).unwrap().as_ref(),
        &opts,
    )
    .unwrap();
    // element 0 is the identity, element 1 the reflection
    let z2 = |chi: [i64; 2]| FiniteClass {
        subgroup: vec![0, 1],
        character: chi.to_vec(),
    };
    let free = FiniteClass {
        subgroup: vec![0],
        character: vec![1],
    };
    // t < 0: the origin is a maximum, its index is the sign line
    assert_eq!(before, [(z2([1, -1]), 1)].into_iter().collect());
    // t > 0: a minimum at the origin and one free orbit of maxima at ±1/2
    assert_eq!(after, [(z2([0, 0]), 1), (free, 1)].into_iter().collect());
    let orbits = find_critical_orbits(
        &space,
        bifurcation_family(&space, 0, &[], None, 0.5).unwrap().as_ref(),
        &opts,
    )
    .unwrap();
    let radii: Vec<f64> = orbits.iter().map(|o| o.point.norm()).collect();
    assert!(radii.iter().any(|r| (r - 0.5).abs() < 1e-9), "{radii:?}");
}

#[test]
fn su3_sphere_data_give_the_same_quotient() {
    let s = Stratum::of(&[(1, 3)]);
    let v = IrrepLabel::Adj(0);
    let space = ModelSpace::adjoint_ball(3, 1.0).unwrap();
    let cubic: FunctionHandle = Arc::new(TracePower {
        summand: space.summand(0).clone(),
        range: space.range(0),
        k: 3,
    });
    let opts = SearchOptions::default();
    let d1 = sphere_datum_numeric(&s, v, cubic.clone(), &opts).unwrap();
    let sextic: FunctionHandle = Arc::new(PolyOf {
        inner: cubic,
        coeffs: vec![0.0, 0.0, -1.0],
    });
    let d2 = sphere_datum_numeric(&s, v, sextic, &opts).unwrap();

    let k = Stratum::of(&[(1, 1), (1, 2)]);
    let t = Stratum::of(&[(1, 1), (1, 1), (1, 1)]);
    // the cubic has a minimum and a maximum on the sphere, both with stabilizer U(2)
    let want1: TotalIndex = [
        (IndexClass::zero_rep(&k), 1),
        (
            IndexClass::new(RepElement::single(&k, IrrepLabel::Adj(1), int(1)).unwrap()),
            1,
        ),
    ]
    .into_iter()
    .collect();
    assert_eq!(d1.index(), want1);
    // −(cubic)² has two minima with stabilizer U(2) and a maximum on the traceless torus
    let want2: TotalIndex = [
        (IndexClass::zero_rep(&k), 2),
        (IndexClass::new(RepElement::triv(&t, int(1))), 1),
    ]
    .into_iter()
    .collect();
    assert_eq!(d2.index(), want2);

    let p = Projector::builtin();
    for vp in [RepElement::zero(&s), RepElement::triv(&s, int(1))] {
        let x1 = xi(&s, v, &vp, &d1, p.branching()).unwrap();
        let x2 = xi(&s, v, &vp, &d2, p.branching()).unwrap();
        assert!(p.project(&(&x1 - &x2)).unwrap().is_zero());
    }
}

#[test]
fn weight_is_constant_along_radial_paths() {
    let p = Projector::builtin();
    let d = Stratum::of(&[(2, 2)]);
    let space = ModelSpace::rep_ball(&d, &[IrrepLabel::Adj(0)], 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..6 {
        let base = random_su2_base(&mut rng);
        let f0: FunctionHandle = Arc::new(random_radial(&mut rng));
        let f1: FunctionHandle = Arc::new(random_radial(&mut rng));
        let mut seen = Vec::new();
        for s in [0.0, 0.3, 0.7, 1.0] {
            let f = LinearPath {
                f0: f0.clone(),
                f1: f1.clone(),
                s,
            };
            match total_index(&space, &f, &SearchOptions::default()) {
                Ok(total) => seen.push(weight(&total, &base, &p).unwrap()),
                Err(Error::NotMorse(_)) if s != 0.0 && s != 1.0 => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(seen.windows(2).all(|w| w[0] == w[1]), "{seen:?}");
    }
}

#[test]
fn degenerate_function_is_reported() {
    let space = ModelSpace::z2_line(1.0);
    let f = Radial::new(vec![0.0, 0.0, -1.0]);
    assert!(matches!(
        finite_total_index(&space, &f, &SearchOptions::default()),
        Err(Error::NotMorse(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn radial_census_matches_analytic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(0..=3usize);
        let mut roots: Vec<f64> = Vec::new();
        while roots.len() < k {
            let r = rng.random_range(0.05..0.95);
            if roots.iter().all(|q: &f64| (q - r).abs() > 0.08) {
                roots.push(r);
            }
        }
        let f = Radial::from_derivative_roots(&roots, rng.random_range(0.5..2.0));
        let d = Stratum::of(&[(2, 2)]);
        let space = ModelSpace::rep_ball(&d, &[IrrepLabel::Adj(0)], 1.0).unwrap();
        let got = total_index(&space, &f, &SearchOptions::default()).unwrap();
        prop_assert_eq!(got, radial_total_oracle(&f, &roots));
    }
}
