//! Initial-data profiles for partial-wave states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::angular::{AngularIndex, Sign};
use crate::radial::{RadialGrid, RadialPair};
use crate::{Error, Result, C64};

/// Shape of a reduced radial profile. Every shape is multiplied by
/// `(r/w)^(l+1)` so that the reconstructed 3D field is smooth at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DataProfile {
    /// `a (r/w)^(l+1) exp(-(r/w)^2)`.
    Gaussian { amplitude: f64, width: f64 },
    /// `a (r/w)^(l+1) exp(1 - 1/(1 - (r/w)^2))` for `r < w`, zero beyond.
    Bump { amplitude: f64, width: f64 },
    /// Broad Gaussian modulated by `cos(q r / w)`; most of its energy sits at
    /// low frequency.
    WavePacket { amplitude: f64, width: f64, frequency: f64 },
}

impl DataProfile {
    pub fn from_name(name: &str, amplitude: f64, width: f64, frequency: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidArgument(format!("profile width must be positive, got {width}")));
        }
        if !amplitude.is_finite() || !frequency.is_finite() {
            return Err(Error::InvalidArgument("profile parameters must be finite".into()));
        }
        match name {
            "gaussian" => Ok(DataProfile::Gaussian { amplitude, width }),
            "bump" => Ok(DataProfile::Bump { amplitude, width }),
            "wavepacket" | "wave_packet" => Ok(DataProfile::WavePacket { amplitude, width, frequency }),
            other => Err(Error::InvalidArgument(format!("unknown data profile `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DataProfile::Gaussian { .. } => "gaussian",
            DataProfile::Bump { .. } => "bump",
            DataProfile::WavePacket { .. } => "wavepacket",
        }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            DataProfile::Gaussian { amplitude, .. }
            | DataProfile::Bump { amplitude, .. }
            | DataProfile::WavePacket { amplitude, .. } => amplitude,
        }
    }

    pub fn width(&self) -> f64 {
        match *self {
            DataProfile::Gaussian { width, .. } | DataProfile::Bump { width, .. } | DataProfile::WavePacket { width, .. } => {
                width
            }
        }
    }

    pub fn with_amplitude(self, a: f64) -> Self {
        match self {
            DataProfile::Gaussian { width, .. } => DataProfile::Gaussian { amplitude: a, width },
            DataProfile::Bump { width, .. } => DataProfile::Bump { amplitude: a, width },
            DataProfile::WavePacket { width, frequency, .. } => DataProfile::WavePacket { amplitude: a, width, frequency },
        }
    }

    /// Reduced profile `u(r)` for orbital degree `l`.
    pub fn reduced(&self, r: f64, l: u32) -> f64 {
        let x = r / self.width();
        let lead = x.powi(l as i32 + 1);
        match *self {
            DataProfile::Gaussian { amplitude, .. } => amplitude * lead * (-x * x).exp(),
            DataProfile::Bump { amplitude, .. } => {
                if x >= 1.0 {
                    0.0
                } else {
                    amplitude * lead * (1.0 - 1.0 / (1.0 - x * x)).exp()
                }
            }
            DataProfile::WavePacket { amplitude, frequency, .. } => {
                amplitude * lead * (-x * x).exp() * (frequency * x).cos()
            }
        }
    }
}

impl fmt::Display for DataProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(a={}, w={})", self.name(), self.amplitude(), self.width())
    }
}

/// Which of the two partial-wave components carry data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Components {
    Plus,
    Minus,
    /// Both; the minus component gets an extra factor `i`.
    Both,
}

impl FromStr for Components {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Components::Plus),
            "minus" | "-" => Ok(Components::Minus),
            "both" => Ok(Components::Both),
            other => Err(Error::InvalidArgument(format!("unknown component selection `{other}`"))),
        }
    }
}

impl fmt::Display for Components {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Components::Plus => "plus",
            Components::Minus => "minus",
            Components::Both => "both",
        })
    }
}

/// Samples `profile` into the requested components of channel `idx`.
pub fn partial_wave_state(idx: AngularIndex, grid: RadialGrid, profile: &DataProfile, which: Components) -> RadialPair {
    let lp = idx.orbital(Sign::Plus);
    let lm = idx.orbital(Sign::Minus);
    let zero = C64::new(0.0, 0.0);
    RadialPair::from_fn(idx, grid, |r| {
        let p = C64::from(profile.reduced(r, lp));
        let m = C64::from(profile.reduced(r, lm));
        match which {
            Components::Plus => (p, zero),
            Components::Minus => (zero, m),
            Components::Both => (p, m * C64::i()),
        }
    })
}
