//! Random qubit states for the property and oracle suites.

use rand::Rng;

use crate::densmat::{ComplexMatrix, DensityMatrix, C64};

/// `(I + x σx + y σy + z σz) / 2`; the vector must lie in the unit ball.
pub fn qubit_from_bloch([x, y, z]: [f64; 3]) -> DensityMatrix {
    debug_assert!(x * x + y * y + z * z <= 1.0 + 1e-12);
    DensityMatrix::from_trusted(ComplexMatrix::from_rows([
        [C64::new(0.5 * (1.0 + z), 0.0), C64::new(0.5 * x, -0.5 * y)],
        [C64::new(0.5 * x, 0.5 * y), C64::new(0.5 * (1.0 - z), 0.0)],
    ]))
}

fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let cos_polar: f64 = rng.random_range(-1.0..=1.0);
    let azimuth: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let sin_polar = (1.0 - cos_polar * cos_polar).max(0.0).sqrt();
    [sin_polar * azimuth.cos(), sin_polar * azimuth.sin(), cos_polar]
}

/// Uniform in the Bloch ball.
pub fn random_qubit<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let radius = rng.random::<f64>().cbrt();
    qubit_from_bloch(unit_vector(rng).map(|c| c * radius))
}

/// Uniform on the Bloch sphere.
pub fn random_pure_qubit<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    qubit_from_bloch(unit_vector(rng))
}
