use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use coherence_qsl::densmat::ComplexMatrix;
use coherence_qsl::dynamics::{ChannelSpec, RateModel};
use coherence_qsl::figures::{default_steps, Method, Scenario};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Dephasing,
    Damping,
    Unitary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// A real number written either as a decimal or as a multiple of π
/// (`pi`, `-pi/4`, `3pi/4`, `2*pi`). Keeps the spelling for echoing.
#[derive(Clone, Debug, PartialEq)]
pub struct Angle {
    pub value: f64,
    text: Option<String>,
}

impl Angle {
    pub fn new(value: f64) -> Self {
        Self { value, text: None }
    }
}

impl FromStr for Angle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        let bad = || format!("`{s}` is not a number or a multiple of pi");
        let value = match t.find("pi") {
            None => t.parse::<f64>().map_err(|_| bad())?,
            Some(at) => {
                let coeff = t[..at].trim_end_matches('*').trim();
                let coeff = match coeff {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    c => c.parse::<f64>().map_err(|_| bad())?,
                };
                let rest = t[at + 2..].trim();
                let denom = match rest.strip_prefix('/') {
                    None if rest.is_empty() => 1.0,
                    None => return Err(bad()),
                    Some(d) => d.trim().parse::<f64>().map_err(|_| bad())?,
                };
                coeff * PI / denom
            }
        };
        if !value.is_finite() {
            return Err(bad());
        }
        Ok(Self { value, text: t.contains("pi").then(|| t.to_string()) })
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.text {
            Some(t) => f.write_str(t),
            None => write!(f, "{}", self.value),
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.text {
            Some(t) => s.serialize_str(t),
            None => s.serialize_f64(self.value),
        }
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(x) => Ok(Angle::new(x)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// `const:<g>` or `ohmic:k=<k>,wc=<w>`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSpec(pub RateModel);

impl FromStr for GammaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, args) =
            s.split_once(':').ok_or_else(|| format!("rate `{s}` must look like const:<g> or ohmic:k=<k>,wc=<w>"))?;
        let number = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("`{v}` in rate `{s}` is not a number"));
        match kind.trim() {
            "const" => Ok(Self(RateModel::constant(number(args)?))),
            "ohmic" => {
                let (mut k, mut wc) = (None, None);
                for part in args.split(',') {
                    match part.split_once('=').map(|(a, b)| (a.trim(), b)) {
                        Some(("k", v)) => k = Some(number(v)?),
                        Some(("wc", v)) => wc = Some(number(v)?),
                        _ => return Err(format!("unexpected `{part}` in rate `{s}`")),
                    }
                }
                let (k, wc) = k.zip(wc).ok_or_else(|| format!("rate `{s}` needs both k and wc"))?;
                RateModel::ohmic(k, wc).map(Self).map_err(|e| e.to_string())
            }
            other => Err(format!("unknown rate kind `{other}`")),
        }
    }
}

impl fmt::Display for GammaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            RateModel::Constant { gamma } => write!(f, "const:{gamma}"),
            RateModel::OhmicZeroT { k, omega_c } => write!(f, "ohmic:k={k},wc={omega_c}"),
            RateModel::Shifted { base, t0 } => write!(f, "{} shifted by {t0}", GammaSpec((**base).clone())),
        }
    }
}

impl Serialize for GammaSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GammaSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Everything `evolve` and `qsl` need. Field names double as the JSON
/// config-file keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub channel: ChannelKind,
    pub gamma: GammaSpec,
    pub theta: Angle,
    pub phase: Angle,
    pub omega0: f64,
    pub tau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    pub t0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    pub integrate: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            channel: ChannelKind::Dephasing,
            gamma: GammaSpec(RateModel::constant(2.0)),
            theta: "pi/2".parse().expect("literal angle"),
            phase: Angle::new(0.0),
            omega0: 0.0,
            tau: 0.5,
            steps: None,
            t0: 0.0,
            out: None,
            format: None,
            integrate: false,
        }
    }
}

pub const MIN_STEPS: usize = 8;

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let finite = |name: &str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(CliError::Usage(format!("{name} must be finite")))
            }
        };
        finite("omega0", self.omega0)?;
        finite("theta", self.theta.value)?;
        finite("phase", self.phase.value)?;
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(CliError::Usage(format!("tau must be > 0, got {}", self.tau)));
        }
        if !(self.t0 >= 0.0 && self.t0.is_finite()) {
            return Err(CliError::Usage(format!("t0 must be >= 0, got {}", self.t0)));
        }
        if let Some(steps) = self.steps {
            if steps < MIN_STEPS {
                return Err(CliError::Usage(format!("steps must be >= {MIN_STEPS}, got {steps}")));
            }
        }
        self.gamma.0.validate().map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn steps(&self) -> usize {
        self.steps.unwrap_or_else(|| default_steps(self.tau))
    }

    pub fn channel_spec(&self) -> ChannelSpec {
        let rate = self.gamma.0.clone();
        match self.channel {
            ChannelKind::Dephasing => ChannelSpec::Dephasing { omega0: self.omega0, rate },
            ChannelKind::Damping => ChannelSpec::AmplitudeDamping { rate },
            ChannelKind::Unitary => {
                ChannelSpec::Unitary { h: ComplexMatrix::from_diagonal(&[0.5 * self.omega0, -0.5 * self.omega0]) }
            }
        }
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::new(self.channel_spec(), self.theta.value)
            .with_phase(self.phase.value)
            .with_t0(self.t0)
            .with_method(if self.integrate { Method::Integrate } else { Method::Analytic })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_tokens() {
        let cases = [
            ("pi/2", PI / 2.0),
            ("pi", PI),
            ("-pi/4", -PI / 4.0),
            ("3pi/4", 0.75 * PI),
            ("2*pi", 2.0 * PI),
            ("0.25", 0.25),
        ];
        for (text, value) in cases {
            assert_eq!(text.parse::<Angle>().unwrap().value, value, "{text}");
        }
        for bad in ["pie", "pi/", "x", "pi/0", "1/2"] {
            assert!(bad.parse::<Angle>().is_err(), "{bad}");
        }
    }

    #[test]
    fn angle_echo_keeps_spelling() {
        let a: Angle = "pi/3".parse().unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), "\"pi/3\"");
        let b: Angle = serde_json::from_str("0.5").unwrap();
        assert_eq!(serde_json::to_string(&b).unwrap(), "0.5");
    }

    #[test]
    fn gamma_specs() {
        assert_eq!("const:2".parse::<GammaSpec>().unwrap().0, RateModel::constant(2.0));
        assert_eq!("ohmic:k=4,wc=1".parse::<GammaSpec>().unwrap().0, RateModel::OhmicZeroT { k: 4.0, omega_c: 1.0 });
        for bad in ["2", "const:x", "ohmic:k=4", "ohmic:k=-1,wc=1", "lorentz:1"] {
            assert!(bad.parse::<GammaSpec>().is_err(), "{bad}");
        }
        let g: GammaSpec = "ohmic:k=3,wc=0.5".parse().unwrap();
        assert_eq!(g.to_string().parse::<GammaSpec>().unwrap(), g);
    }

    #[test]
    fn config_round_trip_and_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"channel":"damping","theta":"pi/4","tau":1.0}"#).unwrap();
        assert_eq!(cfg.channel, ChannelKind::Damping);
        assert_eq!(cfg.gamma.0, RateModel::constant(2.0));
        assert_eq!(cfg.steps(), 4000);
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(serde_json::from_str::<RunConfig>(r#"{"tua":1}"#).is_err());
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = RunConfig { tau: 0.0, ..RunConfig::default() };
        assert!(matches!(cfg.validate(), Err(CliError::Usage(_))));
        cfg.tau = 1.0;
        cfg.steps = Some(7);
        assert!(cfg.validate().is_err());
        cfg.steps = Some(8);
        assert!(cfg.validate().is_ok());
    }
}
