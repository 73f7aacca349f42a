//! The SU(4) generators, the projection that kills them, and preset weights.

use equicerf::bifgroup::{su4_generators, weight, Projector};
use equicerf::casson::su4_preset;
use equicerf::repcat::{format_total, IndexClass, RepElement, TotalIndex};
use equicerf::ringcore::int;
use equicerf::strata::{IrrepLabel, Stratum};

fn main() -> equicerf::Result<()> {
    let p = Projector::builtin();
    for g in su4_generators(p.branching())? {
        println!("ξ = {}", format_total(&g.value));
        println!("  projects to {}", format_total(&p.project(&g.value)?));
    }

    let preset = su4_preset()?;
    let d = Stratum::of(&[(2, 2)]);
    for k in 0..=4 {
        let rep = RepElement::single(&d, IrrepLabel::Adj(0), int(k))?;
        let x = TotalIndex::basis(IndexClass::new(rep));
        println!(
            "{}  ↦  {}  weight {}",
            format_total(&x),
            format_total(&p.project(&x)?),
            weight(&x, &preset, &p)?
        );
    }
    Ok(())
}
