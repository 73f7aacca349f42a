//! Reducibility strata of SU(n) and their stabilizers.
//!
//! `cargo run --example strata_census -- 5`

use equicerf::strata::{enumerate_strata, perp_decomposition, Mode};

fn main() {
    let n: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4);
    for mode in [Mode::HomologySphere, Mode::Raw] {
        let strata = enumerate_strata(n, mode);
        println!("{mode:?}: {} strata", strata.len());
        for s in strata {
            let g = s.group();
            let perp: Vec<String> = perp_decomposition(&s)
                .into_iter()
                .filter(|(_, c)| *c > 0)
                .map(|(l, c)| format!("{c}·{l}"))
                .collect();
            println!(
                "  {:<26} dim {:<3} π0 {:<2} su(n)⊥ = {}",
                s.to_string(),
                g.dim,
                g.pi0,
                perp.join(" + ")
            );
        }
    }
}
