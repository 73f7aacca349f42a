//! Spectral flow of a symmetric path, split along an isotypic decomposition.

use equicerf::cli::matrix;
use equicerf::specflow::{equivariant_spectral_flow, spectral_flow, IsotypicAction, IsotypicComponent, SymmetricPath};
use nalgebra::DMatrix;

fn main() -> equicerf::Result<()> {
    // ℝ ⊕ ℂ with ℂ realified: the circle acts on the last two coordinates
    let a = matrix(&[&[-1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
    let b = matrix(&[&[1.0, 0.0, 0.0], &[0.0, -2.0, 0.0], &[0.0, 0.0, -2.0]]);
    let path = SymmetricPath::linear(a, b);
    println!("spectral flow {}", spectral_flow(&path)?);

    let mut trivial = DMatrix::zeros(3, 3);
    trivial[(0, 0)] = 1.0;
    let complex = DMatrix::identity(3, 3) - &trivial;
    let action = IsotypicAction {
        components: vec![
            IsotypicComponent {
                label: "ℝ",
                real_dim: 1,
                projector: trivial,
            },
            IsotypicComponent {
                label: "ℂ",
                real_dim: 2,
                projector: complex,
            },
        ],
    };
    for (label, n) in equivariant_spectral_flow(&path, &action)? {
        println!("  {label}: {n}");
    }

    // a loop around a crossing has no net flow
    let wobble = SymmetricPath::new(1, |t: f64| {
        DMatrix::from_element(1, 1, (std::f64::consts::TAU * t).sin())
    });
    println!("sin(2πt) on ℝ: {}", spectral_flow(&wobble)?);
    Ok(())
}
