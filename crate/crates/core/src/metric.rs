//! Wigner–Yanase speed along a sampled trajectory and its split into a
//! classical Fisher part (population motion) and a skew-information part
//! (rotation of the eigenbasis).
//!
//! Derivatives are second-order finite differences on the trajectory grid:
//! central at interior nodes, one-sided three-point at the two endpoints.

use std::io::{self, Write};

use serde::Serialize;

use crate::densmat::{affinity_of_roots, ComplexMatrix, C64};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::export;

/// Eigenvalues below this are treated as zero when splitting the speed.
pub const SPLIT_EIGEN_FLOOR: f64 = 1e-10;

pub const SPEED_CSV_HEADER: [&str; 5] = ["t", "speed", "fisher", "skew", "recomposed"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpeedSample {
    pub t: f64,
    /// `√Tr(d√ρ/dt)²`.
    pub speed: f64,
    /// `I_F = 4 Σ (d√λ_j/dt)²`.
    pub fisher: f64,
    /// `I_WY = −½ Tr[√ρ, H_t]²`.
    pub skew: f64,
    /// `¼ I_F + 2 I_WY`.
    pub recomposed: f64,
}

impl SpeedSample {
    /// `|speed² − recomposed| / max(speed², 1e-12)`.
    pub fn relative_mismatch(&self) -> f64 {
        let s2 = self.speed * self.speed;
        (s2 - self.recomposed).abs() / s2.max(1e-12)
    }
}

fn check_node(traj: &Trajectory, i: usize) -> Result<()> {
    if traj.len() < 3 {
        return Err(Error::GridTooCoarse { nodes: traj.len(), required: 3 });
    }
    if i >= traj.len() {
        return Err(Error::NodeOutOfRange { index: i, nodes: traj.len() });
    }
    Ok(())
}

/// Finite-difference stencil `(node, weight)` for the first derivative at node `i`.
fn stencil(traj: &Trajectory, i: usize) -> [(usize, f64); 3] {
    let h = traj.dt();
    let last = traj.len() - 1;
    if i == 0 {
        [(0, -1.5 / h), (1, 2.0 / h), (2, -0.5 / h)]
    } else if i == last {
        [(last, 1.5 / h), (last - 1, -2.0 / h), (last - 2, 0.5 / h)]
    } else {
        [(i - 1, -0.5 / h), (i, 0.0), (i + 1, 0.5 / h)]
    }
}

/// `d√ρ/dt` at node `i`.
pub fn sqrt_derivative(traj: &Trajectory, i: usize) -> Result<ComplexMatrix> {
    check_node(traj, i)?;
    let dim = traj.first().dim();
    let mut d = ComplexMatrix::zeros(dim);
    for (node, w) in stencil(traj, i) {
        if w != 0.0 {
            d = &d + &traj.sqrts()[node].root().scale(w);
        }
    }
    Ok(d.hermitian_part())
}

/// Wigner–Yanase speed `√Tr(d√ρ/dt)²` at node `i`.
pub fn wy_speed(traj: &Trajectory, i: usize) -> Result<f64> {
    let d = sqrt_derivative(traj, i)?;
    Ok(d.trace_of_product(&d).re.max(0.0).sqrt())
}

/// `Tr(√ρ · d√ρ/dt)`, which vanishes because `Tr ρ` is constant.
pub fn affinity_first_derivative(traj: &Trajectory, i: usize) -> Result<f64> {
    let d = sqrt_derivative(traj, i)?;
    Ok(traj.sqrts()[i].root().trace_of_product(&d).re)
}

/// Eigenvectors and root eigenvalues of `node`, reordered and phase-aligned to
/// match the reference node column by column.
fn tracked_eigensystem(traj: &Trajectory, reference: usize, node: usize) -> Result<(Vec<Vec<C64>>, Vec<f64>)> {
    let ref_eigen = traj.sqrts()[reference].eigen();
    let eigen = traj.sqrts()[node].eigen();
    let dim = ref_eigen.values.len();
    let mut taken = vec![false; dim];
    let mut vectors = Vec::with_capacity(dim);
    let mut roots = Vec::with_capacity(dim);
    for r in 0..dim {
        let target = ref_eigen.vector(r);
        let mut best: Option<(usize, C64)> = None;
        for c in (0..dim).filter(|&c| !taken[c]) {
            let candidate = eigen.vector(c);
            let overlap: C64 = target.iter().zip(&candidate).map(|(a, b)| a.conj() * b).sum();
            if best.is_none_or(|(_, o)| overlap.norm() > o.norm()) {
                best = Some((c, overlap));
            }
        }
        let (c, overlap) = best.expect("unmatched column available");
        if overlap.norm() < 0.5 {
            return Err(Error::EigenTrackingFailure { node, reason: "eigenvectors rotate too far between nodes" });
        }
        taken[c] = true;
        let phase = overlap.conj() / overlap.norm();
        vectors.push(eigen.vector(c).iter().map(|z| z * phase).collect());
        roots.push(eigen.values[c].max(0.0).sqrt());
    }
    Ok((vectors, roots))
}

/// Root-eigenvalue rates `d√λ_j/dt` and the effective Hamiltonian `H_t` at node `i`.
///
/// Eigenvalues are followed across the stencil by maximum overlap and the
/// neighbouring eigenvectors are phase-fixed so that their overlap with the
/// node's own eigenvectors is real and positive, which makes `U_t` smooth
/// enough to difference. `H_t = i U̇ U†` is then Hermitized.
fn split(traj: &Trajectory, i: usize) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_node(traj, i)?;
    let sqrt = &traj.sqrts()[i];
    let values = sqrt.eigenvalues();
    if sqrt.min_eigenvalue() < SPLIT_EIGEN_FLOOR {
        return Err(Error::EigenTrackingFailure { node: i, reason: "eigenvalue too close to zero" });
    }
    if values.windows(2).any(|w| (w[0] - w[1]).abs() < SPLIT_EIGEN_FLOOR) {
        return Err(Error::EigenTrackingFailure { node: i, reason: "degenerate spectrum" });
    }
    let dim = values.len();
    let mut root_rates = vec![0.0; dim];
    let mut u_dot = ComplexMatrix::zeros(dim);
    for (node, w) in stencil(traj, i) {
        if w == 0.0 {
            continue;
        }
        let (vectors, roots) = tracked_eigensystem(traj, i, node)?;
        for (r, (vector, root)) in vectors.iter().zip(&roots).enumerate() {
            root_rates[r] += w * root;
            for (row, z) in vector.iter().enumerate() {
                u_dot[(row, r)] += z * w;
            }
        }
    }
    let u = sqrt.eigenvectors();
    let h = (&u_dot * &u.adjoint()).scale_complex(C64::i()).hermitian_part();
    Ok((root_rates, h))
}

/// Splits the squared speed at node `i` into `¼ I_F + 2 I_WY`.
pub fn decompose_speed(traj: &Trajectory, i: usize) -> Result<SpeedSample> {
    let (root_rates, h) = split(traj, i)?;
    let comm = traj.sqrts()[i].root().commutator(&h);
    let skew = (-0.5 * comm.trace_of_product(&comm).re).max(0.0);
    let fisher = 4.0 * root_rates.iter().map(|r| r * r).sum::<f64>();
    let speed = wy_speed(traj, i)?;
    Ok(SpeedSample { t: traj.times()[i], speed, fisher, skew, recomposed: 0.25 * fisher + 2.0 * skew })
}

/// `2 Tr(D_F D_H)` with `D_F = U diag(d√λ/dt) U†` and `D_H = −i[H_t, √ρ]`,
/// the cross term dropped from the split. Zero up to discretization error.
pub fn cross_term(traj: &Trajectory, i: usize) -> Result<f64> {
    let (root_rates, h) = split(traj, i)?;
    let sqrt = &traj.sqrts()[i];
    let u = sqrt.eigenvectors();
    let rates = ComplexMatrix::from_diagonal(&root_rates);
    let d_f = &(u * &rates) * &u.adjoint();
    let d_h = h.commutator(sqrt.root()).scale_complex(-C64::i());
    Ok(2.0 * d_f.trace_of_product(&d_h).re)
}

/// Speed at every node; nodes where the split is ill-conditioned carry NaN
/// in `fisher`, `skew` and `recomposed`.
pub fn speed_profile(traj: &Trajectory) -> Result<Vec<SpeedSample>> {
    (0..traj.len())
        .map(|i| match decompose_speed(traj, i) {
            Ok(s) => Ok(s),
            Err(Error::EigenTrackingFailure { .. }) => Ok(SpeedSample {
                t: traj.times()[i],
                speed: wy_speed(traj, i)?,
                fisher: f64::NAN,
                skew: f64::NAN,
                recomposed: f64::NAN,
            }),
            Err(e) => Err(e),
        })
        .collect()
}

pub fn write_speed_csv<W: Write>(out: W, samples: &[SpeedSample]) -> io::Result<()> {
    let rows = samples.iter().map(|s| vec![s.t, s.speed, s.fisher, s.skew, s.recomposed]);
    export::write_csv(out, &SPEED_CSV_HEADER, rows)
}

/// Fisher information of pure dephasing with equal populations:
/// `4|ρ01|²γ² / (1 − 4|ρ01|²)`.
pub fn fisher_dephasing(abs_rho01: f64, gamma: f64) -> Result<f64> {
    if abs_rho01 < 0.0 {
        return Err(Error::InvalidParameter(format!("|rho01| = {abs_rho01} is negative")));
    }
    if abs_rho01 >= 0.5 - 1e-12 {
        return Err(Error::SingularInput("|rho01| at the pure-state boundary 1/2"));
    }
    let x2 = abs_rho01 * abs_rho01;
    Ok(4.0 * x2 * gamma * gamma / (1.0 - 4.0 * x2))
}

/// Skew information of the free Hamiltonian `ω0σz/2` for equal populations:
/// `(ω0²/2)(½ − √(¼ − |ρ01|²))`.
pub fn skew_dephasing(abs_rho01: f64, omega0: f64) -> f64 {
    let x = abs_rho01.clamp(0.0, 0.5);
    (0.5 * omega0 * omega0 * (0.5 - (0.25 - x * x).sqrt())).max(0.0)
}

/// Compares `1 − A(ρ_i, ρ_{i+1})` with `½·speed²·Δt²` at an interior node.
pub fn affinity_expansion_check(traj: &Trajectory, i: usize) -> Result<(f64, f64)> {
    check_node(traj, i)?;
    if i == 0 || i + 1 >= traj.len() {
        return Err(Error::NodeOutOfRange { index: i, nodes: traj.len() });
    }
    let roots = traj.sqrts();
    let lhs = 1.0 - affinity_of_roots(roots[i].root(), roots[i + 1].root())?;
    let speed = wy_speed(traj, i)?;
    let dt = traj.dt();
    Ok((lhs, 0.5 * speed * speed * dt * dt))
}
