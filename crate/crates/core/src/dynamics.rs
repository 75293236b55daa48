//! Decay-rate models, closed-form qubit channels and a fixed-step
//! master-equation integrator used to cross-check them.
//!
//! Basis convention: index 0 is the ground level (top left), index 1 the
//! excited level, `σz = diag(1, −1)` and `σ− = |0⟩⟨1|`. Amplitude damping
//! therefore drives the state towards `diag(1, 0)`.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::densmat::{
    hermitian_eigen, sqrt_psd, validate_density, ComplexMatrix, DensityMatrix, StateSqrt, C64, HERMITIAN_TOL,
};
use crate::error::{Error, Result};
use crate::export;
use crate::quad;

/// Absolute tolerance for rate integrals.
pub const DEFAULT_QUAD_TOL: f64 = 1e-13;

/// Positivity band for integrated nodes before clamping.
pub const NODE_TOL: f64 = 1e-9;

/// Time-dependent decay rate `γ_t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateModel {
    Constant {
        gamma: f64,
    },
    /// Zero-temperature rate of an Ohmic-family bath with Ohmicity `k` and cutoff `omega_c`.
    OhmicZeroT {
        k: f64,
        omega_c: f64,
    },
    /// `base` evaluated at `t0 + t`.
    Shifted {
        base: Box<RateModel>,
        t0: f64,
    },
}

impl RateModel {
    pub fn constant(gamma: f64) -> Self {
        Self::Constant { gamma }
    }

    pub fn ohmic(k: f64, omega_c: f64) -> Result<Self> {
        let model = Self::OhmicZeroT { k, omega_c };
        model.validate()?;
        Ok(model)
    }

    pub fn shifted(self, t0: f64) -> Self {
        if t0 == 0.0 {
            self
        } else {
            Self::Shifted { base: Box::new(self), t0 }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Constant { gamma } if !gamma.is_finite() => {
                Err(Error::InvalidParameter(format!("rate {gamma} is not finite")))
            }
            Self::OhmicZeroT { k, omega_c }
                if !(*k > 0.0 && *omega_c > 0.0 && k.is_finite() && omega_c.is_finite()) =>
            {
                Err(Error::InvalidParameter(format!(
                    "Ohmic rate needs k > 0 and omega_c > 0, got k={k}, omega_c={omega_c}"
                )))
            }
            Self::Shifted { base, t0 } => {
                if !(*t0 >= 0.0 && t0.is_finite()) {
                    return Err(Error::InvalidParameter(format!("time shift {t0} must be finite and >= 0")));
                }
                base.validate()
            }
            _ => Ok(()),
        }
    }

    /// `γ_t`.
    pub fn gamma_at(&self, t: f64) -> f64 {
        match self {
            Self::Constant { gamma } => *gamma,
            Self::OhmicZeroT { k, omega_c } => {
                let x = omega_c * t;
                omega_c * (1.0 + x * x).powf(-0.5 * k) * gamma(*k) * (k * x.atan()).sin()
            }
            Self::Shifted { base, t0 } => base.gamma_at(t0 + t),
        }
    }

    /// `∫_0^t γ dt'`.
    pub fn gamma_integral(&self, t: f64, quad_tol: f64) -> Result<f64> {
        self.integral_between(0.0, t, quad_tol)
    }

    /// `∫_a^b γ dt'`.
    pub fn integral_between(&self, a: f64, b: f64, quad_tol: f64) -> Result<f64> {
        match self {
            Self::Constant { gamma } => Ok(gamma * (b - a)),
            Self::OhmicZeroT { .. } => quad::integrate(|t| self.gamma_at(t), a, b, quad_tol),
            Self::Shifted { base, t0 } => base.integral_between(t0 + a, t0 + b, quad_tol),
        }
    }

    /// Running integral `∫_0^{t_i} γ` on every node of a grid.
    pub fn cumulative(&self, t_grid: &[f64], quad_tol: f64) -> Result<Vec<f64>> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(t_grid.len());
        let mut prev = 0.0;
        for &t in t_grid {
            acc += self.integral_between(prev, t, quad_tol)?;
            out.push(acc);
            prev = t;
        }
        Ok(out)
    }
}

/// A qubit channel or a unitary evolution of any dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSpec {
    /// `ρ̇ = −i[ω0σz/2, ρ] + (γ_t/2)(σzρσz − ρ)`.
    Dephasing { omega0: f64, rate: RateModel },
    /// `ρ̇ = (γ_t/2)(2σ−ρσ+ − {σ+σ−, ρ})`.
    AmplitudeDamping { rate: RateModel },
    /// `ρ̇ = −i[H, ρ]`.
    Unitary { h: ComplexMatrix },
}

impl ChannelSpec {
    pub fn unitary(h: ComplexMatrix) -> Result<Self> {
        let residual = h.hermitian_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self::Unitary { h })
    }

    pub fn rate(&self) -> Option<&RateModel> {
        match self {
            Self::Dephasing { rate, .. } | Self::AmplitudeDamping { rate } => Some(rate),
            Self::Unitary { .. } => None,
        }
    }

    /// The same channel with its rate clock advanced by `t0`.
    pub fn shifted(self, t0: f64) -> Self {
        match self {
            Self::Dephasing { omega0, rate } => Self::Dephasing { omega0, rate: rate.shifted(t0) },
            Self::AmplitudeDamping { rate } => Self::AmplitudeDamping { rate: rate.shifted(t0) },
            unitary => unitary,
        }
    }

    fn validate(&self, rho0: &DensityMatrix) -> Result<()> {
        if let Some(rate) = self.rate() {
            rate.validate()?;
            if rho0.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: rho0.dim() });
            }
        }
        if let Self::Unitary { h } = self {
            if h.dim() != rho0.dim() {
                return Err(Error::DimensionMismatch { expected: h.dim(), found: rho0.dim() });
            }
        }
        Ok(())
    }
}

/// A uniformly sampled evolution with the square root of every node precomputed.
#[derive(Clone, Debug)]
pub struct Trajectory {
    t_grid: Vec<f64>,
    states: Vec<DensityMatrix>,
    sqrts: Vec<StateSqrt>,
    gamma_cum: Vec<f64>,
}

pub const TRAJECTORY_CSV_HEADER: [&str; 10] =
    ["t", "rho00_re", "rho00_im", "rho01_re", "rho01_im", "rho10_re", "rho10_im", "rho11_re", "rho11_im", "gamma_cum"];

impl Trajectory {
    pub fn new(t_grid: Vec<f64>, states: Vec<DensityMatrix>, gamma_cum: Vec<f64>) -> Result<Self> {
        if t_grid.len() < 2 || states.len() != t_grid.len() || gamma_cum.len() != t_grid.len() {
            return Err(Error::GridTooCoarse { nodes: t_grid.len().min(states.len()), required: 2 });
        }
        let dt = (t_grid[t_grid.len() - 1] - t_grid[0]) / (t_grid.len() - 1) as f64;
        let uniform = t_grid.windows(2).all(|w| w[1] > w[0] && ((w[1] - w[0]) - dt).abs() <= 1e-12 * dt.abs().max(1.0));
        if !uniform {
            return Err(Error::InvalidParameter("time grid must be strictly increasing and uniform".into()));
        }
        let sqrts = states.iter().map(sqrt_psd).collect::<Result<Vec<_>>>()?;
        Ok(Self { t_grid, states, sqrts, gamma_cum })
    }

    /// A trajectory that stays at `rho` for the whole interval.
    pub fn stationary(rho: &DensityMatrix, tau: f64, steps: usize) -> Result<Self> {
        let t_grid = uniform_grid(tau, steps)?;
        let n = t_grid.len();
        Self::new(t_grid, vec![rho.clone(); n], vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.t_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_grid.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn sqrts(&self) -> &[StateSqrt] {
        &self.sqrts
    }

    pub fn gamma_cum(&self) -> &[f64] {
        &self.gamma_cum
    }

    pub fn first(&self) -> &DensityMatrix {
        &self.states[0]
    }

    pub fn last(&self) -> &DensityMatrix {
        &self.states[self.len() - 1]
    }

    pub fn tau(&self) -> f64 {
        self.t_grid[self.len() - 1] - self.t_grid[0]
    }

    pub fn dt(&self) -> f64 {
        self.tau() / (self.len() - 1) as f64
    }

    /// Writes the qubit trajectory CSV (`t, ρ entries, gamma_cum`).
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        if self.states[0].dim() != 2 {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, "trajectory CSV export is defined for qubits"));
        }
        let rows = self.states.iter().zip(&self.t_grid).zip(&self.gamma_cum).map(|((rho, &t), &g)| {
            let m = rho.matrix();
            let mut row = vec![t];
            for z in m.entries() {
                row.push(z.re);
                row.push(z.im);
            }
            row.push(g);
            row
        });
        export::write_csv(out, &TRAJECTORY_CSV_HEADER, rows)
    }
}

/// `{0, τ/N, …, τ}`.
pub fn uniform_grid(tau: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::GridTooCoarse { nodes: steps + 1, required: 3 });
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter(format!("evolution time {tau} must be positive")));
    }
    Ok((0..=steps).map(|i| tau * i as f64 / steps as f64).collect())
}

fn require_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() == 2 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: 2, found: rho.dim() })
    }
}

/// Dephased state for an accumulated rate integral `decay = ∫γ`.
pub fn dephased(rho0: &DensityMatrix, omega0: f64, decay: f64, t: f64) -> Result<DensityMatrix> {
    require_qubit(rho0)?;
    let mut m = rho0.matrix().clone();
    let factor = C64::from_polar((-decay).exp(), -omega0 * t);
    m[(0, 1)] *= factor;
    m[(1, 0)] = m[(0, 1)].conj();
    validate_density(m, NODE_TOL)
}

/// Pure dephasing: populations frozen, `ρ01(t) = ρ01·e^{−∫γ − iω0t}`.
pub fn dephasing_state(rho0: &DensityMatrix, omega0: f64, rate: &RateModel, t: f64) -> Result<DensityMatrix> {
    dephased(rho0, omega0, rate.gamma_integral(t, DEFAULT_QUAD_TOL)?, t)
}

/// Amplitude-damped state for an accumulated rate integral `decay = ∫γ`.
pub fn damped(rho0: &DensityMatrix, decay: f64) -> Result<DensityMatrix> {
    require_qubit(rho0)?;
    let m0 = rho0.matrix();
    let excited = m0[(1, 1)].re;
    let survival = (-decay).exp();
    let mut m = m0.clone();
    m[(0, 0)] = C64::new(m0[(0, 0)].re + excited * (1.0 - survival), 0.0);
    m[(1, 1)] = C64::new(excited * survival, 0.0);
    m[(0, 1)] = m0[(0, 1)] * (-0.5 * decay).exp();
    m[(1, 0)] = m[(0, 1)].conj();
    validate_density(m, NODE_TOL)
}

/// Amplitude damping: ground population `1 − ρ11·e^{−∫γ}`, coherence `ρ01·e^{−∫γ/2}`.
pub fn damping_state(rho0: &DensityMatrix, rate: &RateModel, t: f64) -> Result<DensityMatrix> {
    damped(rho0, rate.gamma_integral(t, DEFAULT_QUAD_TOL)?)
}

fn unitary_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(h)?;
    let n = h.dim();
    let mut u = ComplexMatrix::zeros(n);
    for (k, &e) in eig.values.iter().enumerate() {
        let phase = C64::from_polar(1.0, -e * t);
        for i in 0..n {
            for j in 0..n {
                u[(i, j)] += eig.vectors[(i, k)] * phase * eig.vectors[(j, k)].conj();
            }
        }
    }
    Ok(u)
}

fn unitary_state(rho0: &DensityMatrix, h: &ComplexMatrix, t: f64) -> Result<DensityMatrix> {
    let u = unitary_propagator(h, t)?;
    validate_density(&(&u * rho0.matrix()) * &u.adjoint(), NODE_TOL)
}

fn closed_form(rho0: &DensityMatrix, channel: &ChannelSpec, t: f64, decay: f64) -> Result<DensityMatrix> {
    match channel {
        ChannelSpec::Dephasing { omega0, .. } => dephased(rho0, *omega0, decay, t),
        ChannelSpec::AmplitudeDamping { .. } => damped(rho0, decay),
        ChannelSpec::Unitary { h } => unitary_state(rho0, h, t),
    }
}

/// Closed-form state of `channel` at time `t`.
pub fn analytic_state(rho0: &DensityMatrix, channel: &ChannelSpec, t: f64) -> Result<DensityMatrix> {
    channel.validate(rho0)?;
    let decay = match channel.rate() {
        Some(rate) => rate.gamma_integral(t, DEFAULT_QUAD_TOL)?,
        None => 0.0,
    };
    closed_form(rho0, channel, t, decay)
}

/// Evolves `rho0` through `[0, t0]` and returns the state reached together
/// with the channel whose clock now starts at `t0`.
pub fn restart_at(rho0: &DensityMatrix, channel: &ChannelSpec, t0: f64) -> Result<(DensityMatrix, ChannelSpec)> {
    if !(t0 >= 0.0 && t0.is_finite()) {
        return Err(Error::InvalidParameter(format!("time origin {t0} must be finite and >= 0")));
    }
    if t0 == 0.0 {
        return Ok((rho0.clone(), channel.clone()));
    }
    let start = analytic_state(rho0, channel, t0)?;
    let shifted = match channel {
        // A time-independent Hamiltonian has no clock to shift.
        ChannelSpec::Unitary { .. } => channel.clone(),
        other => other.clone().shifted(t0),
    };
    Ok((start, shifted))
}

/// Samples the closed-form solution of `channel` on a uniform grid.
pub fn trajectory_from_analytic(
    rho0: &DensityMatrix,
    channel: &ChannelSpec,
    tau: f64,
    steps: usize,
) -> Result<Trajectory> {
    channel.validate(rho0)?;
    let t_grid = uniform_grid(tau, steps)?;
    let gamma_cum = match channel.rate() {
        Some(rate) => rate.cumulative(&t_grid, DEFAULT_QUAD_TOL)?,
        None => vec![0.0; t_grid.len()],
    };
    let states = t_grid
        .iter()
        .zip(&gamma_cum)
        .enumerate()
        .map(|(node, (&t, &decay))| {
            closed_form(rho0, channel, t, decay).map_err(|e| Error::ValidationFailure { node, t, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(t_grid, states, gamma_cum)
}

fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[1.0, -1.0])
}

fn lowering() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([[0.0, 1.0], [0.0, 0.0]])
}

struct Generator<'a> {
    channel: &'a ChannelSpec,
    hamiltonian: Option<ComplexMatrix>,
    sz: ComplexMatrix,
    lower: ComplexMatrix,
    raise: ComplexMatrix,
    excited_proj: ComplexMatrix,
}

impl<'a> Generator<'a> {
    fn new(channel: &'a ChannelSpec) -> Self {
        let lower = lowering();
        let raise = lower.adjoint();
        let excited_proj = &raise * &lower;
        let hamiltonian = match channel {
            ChannelSpec::Dephasing { omega0, .. } if *omega0 != 0.0 => Some(pauli_z().scale(0.5 * omega0)),
            ChannelSpec::Unitary { h } => Some(h.clone()),
            _ => None,
        };
        Self { channel, hamiltonian, sz: pauli_z(), lower, raise, excited_proj }
    }

    fn apply(&self, t: f64, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = match &self.hamiltonian {
            Some(h) => h.commutator(rho).scale_complex(-C64::i()),
            None => ComplexMatrix::zeros(rho.dim()),
        };
        match self.channel {
            ChannelSpec::Dephasing { rate, .. } => {
                let g = rate.gamma_at(t);
                let flip = &(&self.sz * rho) * &self.sz;
                out = &out + &(&flip - rho).scale(0.5 * g);
            }
            ChannelSpec::AmplitudeDamping { rate } => {
                let g = rate.gamma_at(t);
                let jump = (&(&self.lower * rho) * &self.raise).scale(2.0);
                let anti = &(&self.excited_proj * rho) + &(rho * &self.excited_proj);
                out = &out + &(&jump - &anti).scale(0.5 * g);
            }
            ChannelSpec::Unitary { .. } => {}
        }
        out
    }
}

/// Classical fourth-order Runge–Kutta integration of the channel's master
/// equation on `steps` uniform steps; every node is re-validated.
pub fn integrate_master(rho0: &DensityMatrix, channel: &ChannelSpec, tau: f64, steps: usize) -> Result<Trajectory> {
    channel.validate(rho0)?;
    let t_grid = uniform_grid(tau, steps)?;
    let h = tau / steps as f64;
    let generator = Generator::new(channel);
    let mut states = Vec::with_capacity(t_grid.len());
    states.push(rho0.clone());
    let mut rho = rho0.matrix().clone();
    for (node, window) in t_grid.windows(2).enumerate() {
        let t = window[0];
        let k1 = generator.apply(t, &rho);
        let k2 = generator.apply(t + 0.5 * h, &(&rho + &k1.scale(0.5 * h)));
        let k3 = generator.apply(t + 0.5 * h, &(&rho + &k2.scale(0.5 * h)));
        let k4 = generator.apply(t + h, &(&rho + &k3.scale(h)));
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale(2.0);
        rho = &rho + &incr.scale(h / 6.0);
        let state = validate_density(rho.hermitian_part(), NODE_TOL).map_err(|e| Error::ValidationFailure {
            node: node + 1,
            t: window[1],
            source: Box::new(e),
        })?;
        rho = state.matrix().clone();
        states.push(state);
    }
    let gamma_cum = match channel.rate() {
        Some(rate) => rate.cumulative(&t_grid, DEFAULT_QUAD_TOL)?,
        None => vec![0.0; t_grid.len()],
    };
    Trajectory::new(t_grid, states, gamma_cum)
}
