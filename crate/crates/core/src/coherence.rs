//! Skew-information coherence relative to the computational basis.
//!
//! `C(ρ) = min_σ [1 − A²(ρ, σ)]` over diagonal states σ. The minimizer has
//! populations proportional to the squared diagonal of √ρ, which gives the
//! closed form `C(ρ) = 1 − Σ_k ⟨k|√ρ|k⟩²`.

use serde::Serialize;

use crate::densmat::{sqrt_psd, ComplexMatrix, DensityMatrix, StateSqrt, C64};
use crate::error::{Error, Result};

/// Default resolution of the brute-force incoherent-state scan.
pub const DEFAULT_GRID: usize = 10_000;

/// A diagonal state `Σ p_k |k⟩⟨k|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncoherentState {
    probs: Vec<f64>,
}

impl IncoherentState {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("not a probability vector: {probs:?}")));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(ComplexMatrix::from_diagonal(&self.probs))
    }
}

/// Coherence value together with its addressed angle `arccos √(1 − c)`,
/// the minimum angle between the state and the incoherent set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoherenceValue {
    pub c: f64,
    pub addressed_angle: f64,
}

impl CoherenceValue {
    fn from_c(c: f64) -> Self {
        let c = c.clamp(0.0, 1.0);
        Self { c, addressed_angle: (1.0 - c).sqrt().acos() }
    }
}

/// Closed-form coherence from a precomputed square root.
pub fn coherence_from_root(sqrt: &StateSqrt) -> CoherenceValue {
    let weight: f64 = sqrt.root_diagonal().iter().map(|d| d * d).sum();
    CoherenceValue::from_c(1.0 - weight)
}

pub fn coherence_skew(rho: &DensityMatrix) -> Result<CoherenceValue> {
    Ok(coherence_from_root(&sqrt_psd(rho)?))
}

/// Brute-force minimum of `1 − A²(ρ, σ)` over a uniform grid of diagonal states.
///
/// For d = 2 the grid is `q ∈ {0, 1/G, …, 1}` on `σ = diag(q, 1 − q)`. For
/// d = 3 it is a triangular simplex lattice with about `grid_points` nodes.
pub fn coherence_bruteforce(rho: &DensityMatrix, grid_points: usize) -> Result<f64> {
    let root = sqrt_psd(rho)?;
    let best = scan_incoherent(&root, grid_points)?.1;
    Ok((1.0 - best * best).clamp(0.0, 1.0))
}

/// Scans the incoherent grid and returns the best populations and the best affinity.
pub fn scan_incoherent(sqrt: &StateSqrt, grid_points: usize) -> Result<(Vec<f64>, f64)> {
    let root = sqrt.root();
    let dim = root.dim();
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    let mut consider = |probs: &[f64]| {
        let a = affinity_with_diagonal(root, probs);
        if a > best.1 {
            best = (probs.to_vec(), a);
        }
    };
    match dim {
        1 => consider(&[1.0]),
        2 => {
            let g = grid_points.max(1);
            for i in 0..=g {
                let q = i as f64 / g as f64;
                consider(&[q, 1.0 - q]);
            }
        }
        3 => {
            let g = ((2.0 * grid_points as f64).sqrt().ceil() as usize).max(1);
            for i in 0..=g {
                for j in 0..=(g - i) {
                    let (a, b) = (i as f64 / g as f64, j as f64 / g as f64);
                    consider(&[a, b, (1.0 - a - b).max(0.0)]);
                }
            }
        }
        _ => return Err(Error::UnsupportedDimension { dim, operation: "coherence_bruteforce" }),
    }
    Ok(best)
}

// Tr(√ρ·√σ) with √σ = diag(√p) formed explicitly and multiplied in full.
fn affinity_with_diagonal(root: &ComplexMatrix, probs: &[f64]) -> f64 {
    let sigma_root =
        ComplexMatrix::from_fn(
            probs.len(),
            |i, j| {
                if i == j {
                    C64::new(probs[i].sqrt(), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            },
        );
    root.trace_of_product(&sigma_root).re
}

/// Closest incoherent state: `p_i ∝ ⟨i|√ρ|i⟩²`.
pub fn closest_incoherent(rho: &DensityMatrix) -> Result<IncoherentState> {
    closest_incoherent_from_root(&sqrt_psd(rho)?)
}

pub fn closest_incoherent_from_root(sqrt: &StateSqrt) -> Result<IncoherentState> {
    let weights: Vec<f64> = sqrt.root_diagonal().iter().map(|d| d * d).collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateState);
    }
    Ok(IncoherentState { probs: weights.iter().map(|w| w / total).collect() })
}

/// `Δ_C = arccos√(1 − C(ρτ)) − arccos√(1 − C(ρ0))`.
///
/// Positive when coherence is generated, negative under decoherence.
pub fn delta_c(rho0: &DensityMatrix, rho_tau: &DensityMatrix) -> Result<f64> {
    if rho0.dim() != rho_tau.dim() {
        return Err(Error::DimensionMismatch { expected: rho0.dim(), found: rho_tau.dim() });
    }
    Ok(coherence_skew(rho_tau)?.addressed_angle - coherence_skew(rho0)?.addressed_angle)
}

pub fn delta_c_from_roots(start: &StateSqrt, end: &StateSqrt) -> f64 {
    coherence_from_root(end).addressed_angle - coherence_from_root(start).addressed_angle
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::{affinity, qubit_from_theta};
    use std::f64::consts::FRAC_PI_4;

    fn half_population(abs_rho01: f64) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_real_rows([[0.5, abs_rho01], [abs_rho01, 0.5]])).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let rho = DensityMatrix::new(ComplexMatrix::from_diagonal(&[0.3, 0.7])).unwrap();
        assert_eq!(coherence_skew(&rho).unwrap().c, 0.0);

        let c = coherence_skew(&DensityMatrix::plus()).unwrap();
        assert!((c.c - 0.5).abs() < 1e-14);
        assert!((c.addressed_angle - FRAC_PI_4).abs() < 1e-14);

        let c = coherence_skew(&half_population(0.25)).unwrap().c;
        assert!((c - (0.5 - (0.25_f64 - 0.0625).sqrt())).abs() < 1e-12);
        assert!((c - 0.0669873).abs() < 1e-7);
    }

    #[test]
    fn bruteforce_examples() {
        let rho = DensityMatrix::new(ComplexMatrix::from_diagonal(&[0.3, 0.7])).unwrap();
        assert!(coherence_bruteforce(&rho, DEFAULT_GRID).unwrap() < 1e-6);
        assert!((coherence_bruteforce(&DensityMatrix::plus(), DEFAULT_GRID).unwrap() - 0.5).abs() < 1e-4);
        assert!((coherence_bruteforce(&half_population(0.25), DEFAULT_GRID).unwrap() - 0.0669873).abs() < 1e-4);
        assert!(matches!(
            coherence_bruteforce(&DensityMatrix::maximally_mixed(4), 100),
            Err(Error::UnsupportedDimension { dim: 4, .. })
        ));
    }

    #[test]
    fn bruteforce_qutrit_matches_closed_form() {
        let psi = [C64::new(0.6, 0.0), C64::new(0.2, 0.5), C64::new(-0.3, 0.1)];
        let pure = DensityMatrix::pure(&psi).unwrap();
        let m = &pure.matrix().scale(0.8) + &DensityMatrix::maximally_mixed(3).matrix().scale(0.2);
        let rho = DensityMatrix::new(m).unwrap();
        let closed = coherence_skew(&rho).unwrap().c;
        let scanned = coherence_bruteforce(&rho, 40_000).unwrap();
        assert!(scanned >= closed - 1e-12);
        assert!(scanned - closed < 1e-3, "{scanned} vs {closed}");
    }

    #[test]
    fn closest_incoherent_examples() {
        let rho = DensityMatrix::new(ComplexMatrix::from_diagonal(&[0.3, 0.7])).unwrap();
        let probs = closest_incoherent(&rho).unwrap();
        assert!((probs.probs()[0] - 0.3).abs() < 1e-14);
        assert!((probs.probs()[1] - 0.7).abs() < 1e-14);

        for rho in [DensityMatrix::plus(), half_population(0.25)] {
            let probs = closest_incoherent(&rho).unwrap();
            assert!(probs.probs().iter().all(|p| (p - 0.5).abs() < 1e-14));
        }
    }

    #[test]
    fn closest_incoherent_attains_coherence() {
        let rho = qubit_from_theta(1.1, 0.4);
        let star = closest_incoherent(&rho).unwrap().to_density();
        let a = affinity(&rho, &star).unwrap();
        assert!((a * a - (1.0 - coherence_skew(&rho).unwrap().c)).abs() < 1e-12);
    }

    #[test]
    fn delta_c_examples() {
        let rho = qubit_from_theta(0.8, 0.0);
        assert_eq!(delta_c(&rho, &rho).unwrap(), 0.0);
        let plus = DensityMatrix::plus();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((delta_c(&plus, &mixed).unwrap() + FRAC_PI_4).abs() < 1e-14);
        assert!((delta_c(&mixed, &plus).unwrap() - FRAC_PI_4).abs() < 1e-14);
        assert!(delta_c(&plus, &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn incoherent_state_validation() {
        assert!(IncoherentState::new(vec![0.4, 0.6]).is_ok());
        assert!(IncoherentState::new(vec![0.4, 0.5]).is_err());
        assert!(IncoherentState::new(vec![1.2, -0.2]).is_err());
    }
}
