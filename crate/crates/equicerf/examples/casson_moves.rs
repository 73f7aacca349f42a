//! A small SU(4) moduli dataset pushed through bifurcations. The weighted count
//! stays put while the record list changes.

use equicerf::bifgroup::Projector;
use equicerf::casson::{
    apply_bifurcation, lambda_w, su4_formula, su4_preset, DatasetMove, Direction, ModuliDataset, OrbitRecord,
};
use equicerf::repcat::RepElement;
use equicerf::ringcore::{int, rat};
use equicerf::strata::{IrrepLabel, Stratum};

fn report(label: &str, ds: &ModuliDataset, p: &Projector) -> equicerf::Result<()> {
    let base = su4_preset()?;
    println!("{label}: {} records", ds.orbits.len());
    for r in &ds.orbits {
        println!("  {}", r.sf);
    }
    println!("  λ_w = {}", lambda_w(ds, &base, p)?);
    match su4_formula(ds) {
        Ok(f) => println!("  closed formula = {f}"),
        Err(e) => println!("  closed formula undefined: {e}"),
    }
    Ok(())
}

fn main() -> equicerf::Result<()> {
    let p = Projector::builtin();
    let a = Stratum::of(&[(4, 1)]);
    let c = Stratum::of(&[(2, 1), (2, 1)]);
    let mut ds = ModuliDataset::with_sample_tau(4);
    ds.orbits
        .push(OrbitRecord::new(RepElement::triv(&a, int(2)), vec![rat(1, 3)]));
    let sf = RepElement::new(&c, [(IrrepLabel::Triv, int(1)), (IrrepLabel::Std(0, 1), int(1))])?;
    ds.orbits.push(OrbitRecord::new(sf, vec![int(0), int(0)]));
    report("start", &ds, &p)?;

    let shed = apply_bifurcation(
        &ds,
        &DatasetMove::Xi {
            record: 1,
            irrep: IrrepLabel::Std(0, 1),
            direction: Direction::Create,
        },
        &p,
    )?;
    report("after shedding irreducibles", &shed, &p)?;

    let born = apply_bifurcation(
        &shed,
        &DatasetMove::BirthDeath {
            direction: Direction::Create,
            template: Some(OrbitRecord::new(RepElement::triv(&a, int(0)), vec![int(0)])),
            pair: None,
        },
        &p,
    )?;
    report("after a birth", &born, &p)?;
    Ok(())
}
