//! Scenarios (initial state + channel + time origin) and the figure sweeps built on them.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::densmat::{qubit_from_theta, DensityMatrix};
use crate::dynamics::{integrate_master, restart_at, trajectory_from_analytic, ChannelSpec, RateModel, Trajectory};
use crate::error::{Error, Result};
use crate::export;
use crate::qsl::{tau_csl, QslReport};

/// Grid density used when no step count is given.
pub const STEPS_PER_UNIT_TIME: f64 = 4000.0;

/// Smallest step count chosen by [`default_steps`].
pub const MIN_STEPS: usize = 16;

pub const MIN_SWEEP_POINTS: usize = 16;

pub const DEFAULT_SWEEP_POINTS: usize = 64;

pub fn default_steps(tau: f64) -> usize {
    ((STEPS_PER_UNIT_TIME * tau).ceil() as usize).max(MIN_STEPS)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Analytic,
    Integrate,
}

/// A qubit prepared at angle `theta`, evolved from `t0` onwards.
///
/// With `t0 > 0` the state is first carried through `[0, t0]` by the same
/// channel, so the run starts mid-evolution rather than from a fresh preparation.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub channel: ChannelSpec,
    pub theta: f64,
    pub phase: f64,
    pub t0: f64,
    pub method: Method,
}

impl Scenario {
    pub fn new(channel: ChannelSpec, theta: f64) -> Self {
        Self { channel, theta, phase: 0.0, t0: 0.0, method: Method::Analytic }
    }

    pub fn with_t0(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn prepared(&self) -> DensityMatrix {
        qubit_from_theta(self.theta, self.phase)
    }

    /// State at the start of the run and the channel seen from there.
    pub fn start(&self) -> Result<(DensityMatrix, ChannelSpec)> {
        restart_at(&self.prepared(), &self.channel, self.t0)
    }

    pub fn trajectory(&self, tau: f64, steps: usize) -> Result<Trajectory> {
        let (rho0, channel) = self.start()?;
        match self.method {
            Method::Analytic => trajectory_from_analytic(&rho0, &channel, tau, steps),
            Method::Integrate => integrate_master(&rho0, &channel, tau, steps),
        }
    }

    pub fn report(&self, tau: f64, steps: usize) -> Result<QslReport> {
        tau_csl(&self.trajectory(tau, steps)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureId {
    Fig2Left,
    Fig2Right,
    Fig3Left,
    Fig3Right,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [Self::Fig2Left, Self::Fig2Right, Self::Fig3Left, Self::Fig3Right];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2Left => "fig2_left",
            Self::Fig2Right => "fig2_right",
            Self::Fig3Left => "fig3_left",
            Self::Fig3Right => "fig3_right",
        }
    }

    pub fn header(self) -> &'static [&'static str] {
        match self {
            Self::Fig2Left | Self::Fig2Right => &["tau", "ratio", "gamma_at_tau"],
            Self::Fig3Left | Self::Fig3Right => &["theta", "tau", "tau_csl"],
        }
    }

    pub fn default_sweep(self) -> Vec<f64> {
        match self {
            Self::Fig2Left | Self::Fig2Right => log_space(0.05, 2.0, DEFAULT_SWEEP_POINTS),
            Self::Fig3Left | Self::Fig3Right => lin_space(0.05, 1.5, DEFAULT_SWEEP_POINTS),
        }
    }

    /// Initial-state angles, in output order.
    pub fn thetas(self) -> Vec<f64> {
        use std::f64::consts::PI;
        match self {
            Self::Fig2Left | Self::Fig2Right => vec![PI / 2.0],
            Self::Fig3Left | Self::Fig3Right => vec![PI / 2.0, PI / 3.0, PI / 4.0],
        }
    }

    pub fn channel(self) -> ChannelSpec {
        match self {
            Self::Fig2Left | Self::Fig2Right => {
                ChannelSpec::Dephasing { omega0: 0.0, rate: RateModel::OhmicZeroT { k: 4.0, omega_c: 1.0 } }
            }
            Self::Fig3Left => ChannelSpec::Dephasing { omega0: 0.0, rate: RateModel::constant(2.0) },
            Self::Fig3Right => ChannelSpec::AmplitudeDamping { rate: RateModel::constant(2.0) },
        }
    }

    pub fn t0(self) -> f64 {
        match self {
            Self::Fig2Right => 1.0,
            _ => 0.0,
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown figure `{s}`")))
    }
}

pub fn lin_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| match i {
            0 => a,
            _ if i == n - 1 => b,
            _ => (la + (lb - la) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureSpec {
    id: FigureId,
    sweep: Vec<f64>,
}

impl FigureSpec {
    pub fn new(id: FigureId) -> Self {
        Self { id, sweep: id.default_sweep() }
    }

    pub fn with_sweep(id: FigureId, sweep: Vec<f64>) -> Result<Self> {
        if sweep.len() < MIN_SWEEP_POINTS {
            return Err(Error::InvalidParameter(format!(
                "sweep has {} points, at least {MIN_SWEEP_POINTS} required",
                sweep.len()
            )));
        }
        if sweep.iter().any(|t| !(t.is_finite() && *t > 0.0)) || sweep.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("sweep must be positive and strictly increasing".into()));
        }
        Ok(Self { id, sweep })
    }

    pub fn id(&self) -> FigureId {
        self.id
    }

    pub fn sweep(&self) -> &[f64] {
        &self.sweep
    }

    pub fn scenario(&self, theta: f64) -> Scenario {
        Scenario::new(self.id.channel(), theta).with_t0(self.id.t0())
    }

    /// One row per (θ, τ), θ in [`FigureId::thetas`] order and τ ascending.
    pub fn run(&self) -> Result<FigureTable> {
        let mut rows = Vec::with_capacity(self.sweep.len() * self.id.thetas().len());
        for theta in self.id.thetas() {
            let scenario = self.scenario(theta);
            for &tau in &self.sweep {
                let report = scenario.report(tau, default_steps(tau))?;
                rows.push(match self.id {
                    FigureId::Fig2Left | FigureId::Fig2Right => {
                        let gamma = scenario.channel.rate().map_or(0.0, |r| r.gamma_at(scenario.t0 + tau));
                        vec![tau, report.ratio, gamma]
                    }
                    FigureId::Fig3Left | FigureId::Fig3Right => vec![theta, tau, report.tau_csl],
                });
            }
        }
        Ok(FigureTable { header: self.id.header(), rows })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureTable {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<f64>>,
}

impl FigureTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn all_finite(&self) -> bool {
        self.rows.iter().flatten().all(|x| x.is_finite())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        export::write_csv(out, self.header, self.rows.iter().cloned())
    }
}
