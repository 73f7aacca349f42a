//! Critical orbits of the standard bifurcation family on either side of `t = 0`,
//! and the jump in total index against the generator it should equal.

use std::sync::Arc;

use equicerf::bifgroup::{sphere_index, xi, Projector, SphereData};
use equicerf::morse::{bifurcation_family, find_critical_orbits, total_of, Constant, ModelSpace, SearchOptions};
use equicerf::repcat::{format_total, RepElement};
use equicerf::strata::{IrrepLabel, Stratum};

fn main() -> equicerf::Result<()> {
    let opts = SearchOptions::default();
    let d = Stratum::of(&[(2, 2)]);
    let v = IrrepLabel::Adj(0);
    let space = ModelSpace::rep_ball(&d, &[v], 1.0)?;
    let mut totals = Vec::new();
    for t in [-0.1, 0.1] {
        let f = bifurcation_family(&space, 0, &[], Some(Arc::new(Constant(1.0))), t)?;
        let orbits = find_critical_orbits(&space, f.as_ref(), &opts)?;
        println!("t = {t}");
        for o in &orbits {
            println!("  {o}");
        }
        let total = total_of(&orbits)?;
        println!("  total {}", format_total(&total));
        totals.push(total);
    }
    let jump = &totals[1] - &totals[0];
    let p = Projector::builtin();
    let datum = sphere_index(&d, v, &SphereData::default())?;
    let want = xi(&d, v, &RepElement::zero(&d), &datum, p.branching())?;
    println!("jump {}", format_total(&jump));
    println!("−ξ   {}", format_total(&-want));

    let z2 = ModelSpace::z2_line(1.0);
    for t in [-0.5, 0.5] {
        let f = bifurcation_family(&z2, 0, &[], None, t)?;
        println!(
            "ℤ/2, t = {t}: {} orbit(s)",
            find_critical_orbits(&z2, f.as_ref(), &opts)?.len()
        );
    }
    Ok(())
}
