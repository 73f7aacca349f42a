mod support;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use equicerf::bifgroup::Projector;
use equicerf::casson::{
    apply_bifurcation, lambda_w, su4_formula, su4_preset, DatasetMove, Direction, ModuliDataset, OrbitRecord,
};
use equicerf::repcat::{kernel_rep, RepElement};
use equicerf::ringcore::int;
use equicerf::strata::{IrrepLabel, Stratum};

use support::{random_base, random_dataset, random_moves};

#[test]
fn weighted_count_is_invariant_under_random_moves() {
    let p = Projector::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let base = random_base(&mut rng);
        let ds = random_dataset(&mut rng, 4);
        let before = lambda_w(&ds, &base, &p).unwrap();
        let after_ds = random_moves(&ds, &p, &mut rng, 8);
        let after = lambda_w(&after_ds, &base, &p).unwrap();
        assert_eq!(before, after, "dataset {}\n→ {}", ds.to_json(), after_ds.to_json());
    }
}

#[test]
fn birth_then_death_restores_dataset() {
    let p = Projector::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ds = random_dataset(&mut rng, 2);
    let template = support::random_record(&mut rng);
    let born = apply_bifurcation(
        &ds,
        &DatasetMove::BirthDeath {
            direction: Direction::Create,
            template: Some(template),
            pair: None,
        },
        &p,
    )
    .unwrap();
    assert_eq!(born.orbits.len(), ds.orbits.len() + 2);
    let n = born.orbits.len();
    let dead = apply_bifurcation(
        &born,
        &DatasetMove::BirthDeath {
            direction: Direction::Annihilate,
            template: None,
            pair: Some((n - 2, n - 1)),
        },
        &p,
    )
    .unwrap();
    assert_eq!(dead, ds);
}

#[test]
fn death_pair_must_differ_by_one_trivial() {
    let p = Projector::builtin();
    let s: Stratum = "((4,1))".parse().unwrap();
    let mut ds = ModuliDataset::with_sample_tau(4);
    ds.orbits.push(OrbitRecord::new(RepElement::triv(&s, int(0)), vec![]));
    ds.orbits.push(OrbitRecord::new(RepElement::triv(&s, int(2)), vec![]));
    let mv = DatasetMove::BirthDeath {
        direction: Direction::Annihilate,
        template: None,
        pair: Some((0, 1)),
    };
    assert!(apply_bifurcation(&ds, &mv, &p).is_err());
}

#[test]
fn create_then_annihilate_round_trips() {
    let p = Projector::builtin();
    let c: Stratum = "((2,1),(2,1))".parse().unwrap();
    let sf = RepElement::new(&c, [(IrrepLabel::Triv, int(1)), (IrrepLabel::Std(0, 1), int(2))]).unwrap();
    let mut ds = ModuliDataset::with_sample_tau(4);
    ds.orbits.push(OrbitRecord::new(sf, vec![int(0), int(0)]));
    let create = DatasetMove::Xi {
        record: 0,
        irrep: IrrepLabel::Std(0, 1),
        direction: Direction::Create,
    };
    let base = su4_preset().unwrap();
    let shed = apply_bifurcation(&ds, &create, &p).unwrap();
    assert!(shed.orbits.len() > 1);
    assert_eq!(lambda_w(&ds, &base, &p).unwrap(), lambda_w(&shed, &base, &p).unwrap());
    let back = apply_bifurcation(
        &shed,
        &DatasetMove::Xi {
            record: 0,
            irrep: IrrepLabel::Std(0, 1),
            direction: Direction::Annihilate,
        },
        &p,
    )
    .unwrap();
    assert_eq!(back, ds);
}

#[test]
fn preset_matches_printed_formula_on_bare_records() {
    let p = Projector::builtin();
    let base = su4_preset().unwrap();
    for s in equicerf::casson::su4_strata().iter().filter(|s| !s.is_irreducible()) {
        let mut ds = ModuliDataset::with_sample_tau(4);
        let cs = vec![int(0); OrbitRecord::cs_factors(s).len()];
        ds.orbits.push(OrbitRecord::new(kernel_rep(s), cs));
        assert_eq!(lambda_w(&ds, &base, &p).unwrap(), su4_formula(&ds).unwrap(), "{s}");
    }
}

#[test]
fn dataset_json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ds = random_dataset(&mut rng, 5);
    let text = ds.to_json().to_string();
    assert_eq!(ModuliDataset::from_json(&text).unwrap(), ds);
}
