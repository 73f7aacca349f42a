//! Which strata can shed orbits onto which, as arrows and as a Graphviz graph.
//!
//! `cargo run --example bifurcation_graph -- 4 > su4.dot`

use equicerf::strata::{bifurcation_arrows, reachability_order, Mode};

fn main() {
    let n: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4);
    for (a, b) in bifurcation_arrows(n, Mode::HomologySphere) {
        eprintln!("{a} -> {b}");
    }
    let raw = bifurcation_arrows(n, Mode::Raw).len();
    eprintln!("{raw} arrows without the homology-sphere restriction");
    print!("{}", reachability_order(n, Mode::HomologySphere).to_dot());
}
