//! Coherence speed limit, Wigner–Yanase geodesics and attainability checks.

use serde::Serialize;

use crate::coherence::{closest_incoherent_from_root, delta_c_from_roots};
use crate::densmat::{angle_of_roots, sqrt_psd, validate_density, ComplexMatrix, DensityMatrix, DENSITY_TOL};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

/// Minimum number of trajectory nodes accepted by [`tau_csl`].
pub const MIN_NODES: usize = 8;

/// Below this, an average speed or a coherence change counts as zero.
pub const ZERO_THRESHOLD: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QslReport {
    /// Signed change of the addressed coherence angle, radians.
    pub delta_c: f64,
    /// `∫ Θ̇ dt`.
    pub path_length: f64,
    pub avg_speed: f64,
    pub tau: f64,
    pub tau_csl: f64,
    /// `tau_csl / tau`.
    pub ratio: f64,
    /// Set when the coherence does not change, so the bound says nothing.
    pub vacuous: bool,
}

/// Angle travelled over each grid step, `Θ(ρ_i, ρ_{i+1})`.
///
/// `Θ_i / Δt` is the speed at the midpoint of step `i`, so summing these is
/// the composite midpoint rule for `∫ Θ̇ dt`. No endpoint evaluation enters,
/// which matters for trajectories leaving a pure state where `Θ̇ ~ t^{-1/2}`.
pub fn step_angles(traj: &Trajectory) -> Result<Vec<f64>> {
    traj.sqrts().windows(2).map(|w| angle_of_roots(w[0].root(), w[1].root())).collect()
}

pub fn path_length(traj: &Trajectory) -> Result<f64> {
    Ok(step_angles(traj)?.iter().sum())
}

/// Coherence speed-limit time `|Δ_C| / ⟨Θ̇⟩_τ` for a sampled evolution.
pub fn tau_csl(traj: &Trajectory) -> Result<QslReport> {
    if traj.len() < MIN_NODES {
        return Err(Error::GridTooCoarse { nodes: traj.len(), required: MIN_NODES });
    }
    let sqrts = traj.sqrts();
    let delta_c = delta_c_from_roots(&sqrts[0], &sqrts[sqrts.len() - 1]);
    let path_length = path_length(traj)?;
    let tau = traj.tau();
    let avg_speed = path_length / tau;
    let mut report = QslReport { delta_c, path_length, avg_speed, tau, tau_csl: 0.0, ratio: 0.0, vacuous: true };
    if avg_speed < ZERO_THRESHOLD {
        if delta_c.abs() < ZERO_THRESHOLD {
            return Ok(report);
        }
        return Err(Error::ZeroSpeed { delta_c });
    }
    if delta_c.abs() >= ZERO_THRESHOLD {
        report.tau_csl = delta_c.abs() / avg_speed;
        report.ratio = report.tau_csl / tau;
        report.vacuous = false;
    }
    Ok(report)
}

/// Closed-form arc length of equal-population pure dephasing with a
/// sign-constant rate: `|½(arcsin 2|ρ01(τ)| − arcsin 2|ρ01(0)|)|`.
pub fn dephasing_arc_length(abs_rho01_0: f64, abs_rho01_tau: f64) -> Result<f64> {
    for x in [abs_rho01_0, abs_rho01_tau] {
        if !(0.0..=0.5).contains(&x) {
            return Err(Error::InvalidParameter(format!("|rho01| = {x} outside [0, 1/2]")));
        }
    }
    Ok((0.5 * ((2.0 * abs_rho01_tau).asin() - (2.0 * abs_rho01_0).asin())).abs())
}

/// Monotone reparametrization `p(t)` of a geodesic with `p(0) = 0`, `p(τ) = 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Schedule {
    #[default]
    Linear,
    /// `p = (t/τ)^exponent`, exponent > 0.
    Power(f64),
}

impl Schedule {
    pub fn eval(&self, t: f64, tau: f64) -> f64 {
        let s = (t / tau).clamp(0.0, 1.0);
        match self {
            Self::Linear => s,
            Self::Power(e) => s.powf(*e),
        }
    }
}

/// Wigner–Yanase geodesic between two states: the normalized linear
/// interpolation of their square roots.
#[derive(Clone, Debug)]
pub struct GeodesicPath {
    rho0: DensityMatrix,
    rho_tau: DensityMatrix,
    root0: ComplexMatrix,
    root_tau: ComplexMatrix,
    schedule: Schedule,
}

impl GeodesicPath {
    pub fn new(rho0: DensityMatrix, rho_tau: DensityMatrix) -> Result<Self> {
        if rho0.dim() != rho_tau.dim() {
            return Err(Error::DimensionMismatch { expected: rho0.dim(), found: rho_tau.dim() });
        }
        let root0 = sqrt_psd(&rho0)?.root().clone();
        let root_tau = sqrt_psd(&rho_tau)?.root().clone();
        Ok(Self { rho0, rho_tau, root0, root_tau, schedule: Schedule::Linear })
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Result<Self> {
        if let Schedule::Power(e) = schedule {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::InvalidParameter(format!("schedule exponent {e} must be positive")));
            }
        }
        self.schedule = schedule;
        Ok(self)
    }

    pub fn rho0(&self) -> &DensityMatrix {
        &self.rho0
    }

    pub fn rho_tau(&self) -> &DensityMatrix {
        &self.rho_tau
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    /// `√ρ_p = [(1 − p)√ρ0 + p√ρτ] / ‖(1 − p)√ρ0 + p√ρτ‖`.
    pub fn root_at(&self, p: f64) -> Result<ComplexMatrix> {
        check_fraction(p)?;
        if p == 0.0 {
            return Ok(self.root0.clone());
        }
        if p == 1.0 {
            return Ok(self.root_tau.clone());
        }
        let mix = &self.root0.scale(1.0 - p) + &self.root_tau.scale(p);
        let norm = mix.frobenius_norm();
        Ok(mix.scale(1.0 / norm))
    }

    /// State reached at time `t` of an evolution of duration `tau`.
    pub fn point_at_time(&self, t: f64, tau: f64) -> Result<DensityMatrix> {
        geodesic_point(self, self.schedule.eval(t, tau))
    }
}

fn check_fraction(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("geodesic parameter {p} outside [0, 1]")))
    }
}

pub fn geodesic_point(path: &GeodesicPath, p: f64) -> Result<DensityMatrix> {
    check_fraction(p)?;
    if p == 0.0 {
        return Ok(path.rho0.clone());
    }
    if p == 1.0 {
        return Ok(path.rho_tau.clone());
    }
    let root = path.root_at(p)?;
    validate_density(&root * &root, DENSITY_TOL)
}

/// `(Θ(ρ0, ρτ), Θ(ρ0, ρ_p) + Θ(ρ_p, ρτ))`; equal along a geodesic.
pub fn geodesic_triangle_check(path: &GeodesicPath, p: f64) -> Result<(f64, f64)> {
    let mid = path.root_at(p)?;
    let total = angle_of_roots(&path.root0, &path.root_tau)?;
    let split = angle_of_roots(&path.root0, &mid)? + angle_of_roots(&mid, &path.root_tau)?;
    Ok((total, split))
}

/// `Tr √ρ_p` along the geodesic, from a fresh square root of the geodesic state.
pub fn geodesic_trace_profile(rho0: &DensityMatrix, rho_tau: &DensityMatrix, p: f64) -> Result<f64> {
    let path = GeodesicPath::new(rho0.clone(), rho_tau.clone())?;
    let state = geodesic_point(&path, p)?;
    Ok(sqrt_psd(&state)?.root().trace().re)
}

/// `[(1 − p)Tr√ρ0 + p·Tr√ρτ] / √(1 − 2p(1 − p)(1 − A))` with `A = Tr√ρ0√ρτ`.
pub fn geodesic_trace_closed_form(rho0: &DensityMatrix, rho_tau: &DensityMatrix, p: f64) -> Result<f64> {
    check_fraction(p)?;
    let path = GeodesicPath::new(rho0.clone(), rho_tau.clone())?;
    let a = path.root0.trace_of_product(&path.root_tau).re;
    let numerator = (1.0 - p) * path.root0.trace().re + p * path.root_tau.trace().re;
    Ok(numerator / (1.0 - 2.0 * p * (1.0 - p) * (1.0 - a)).sqrt())
}

/// Which geodesic-attainability conditions a trajectory satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaturationReport {
    /// Diagonal entries of √ρ_t coincide at every node.
    pub equal_diag_sqrt: bool,
    /// Diagonal of √ρ_t never moves from its initial value.
    pub static_diag_sqrt: bool,
    /// The closest incoherent state never moves.
    pub fixed_closest_incoherent: bool,
    pub equal_diag_residual: f64,
    pub static_diag_residual: f64,
    pub closest_incoherent_residual: f64,
}

pub fn saturation_check(traj: &Trajectory, tol: f64) -> Result<SaturationReport> {
    let sqrts = traj.sqrts();
    let diag0 = sqrts[0].root_diagonal();
    let star0 = closest_incoherent_from_root(&sqrts[0])?;
    let (mut equal, mut fixed, mut star) = (0.0_f64, 0.0_f64, 0.0_f64);
    for s in sqrts {
        let diag = s.root_diagonal();
        let hi = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
        equal = equal.max(hi - lo);
        fixed = fixed.max(diag.iter().zip(&diag0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        let probs = closest_incoherent_from_root(s)?;
        star = star.max(probs.probs().iter().zip(star0.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    Ok(SaturationReport {
        equal_diag_sqrt: equal <= tol,
        static_diag_sqrt: fixed <= tol,
        fixed_closest_incoherent: star <= tol,
        equal_diag_residual: equal,
        static_diag_residual: fixed,
        closest_incoherent_residual: star,
    })
}
