use crate::error::{Error, Result};
use alloc::format;

/// Numerical tolerances used by validation and clipping.
///
/// Every validating constructor takes one of these explicitly; there is no
/// global configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative bound on `max |M - M^dag|` (scaled by `max(1, max |M|)`).
    pub hermiticity: f64,
    /// Eigenvalues down to `-psd_clip` are clamped to zero.
    pub psd_clip: f64,
    /// Allowed `|tr rho - 1|`.
    pub trace: f64,
    /// Minimum gap between adjacent entries of a nondegenerate spectrum.
    pub spectrum_gap: f64,
    /// Largest imaginary part tolerated in W matrix entries.
    pub w_imag: f64,
    /// SLD terms with `p_i + p_j` at or below this are dropped.
    pub sld_cutoff: f64,
    /// Selective-operation outcomes below this probability are dropped.
    pub outcome_cutoff: f64,
    /// Allowed `max |sum M^dag M - I|` for Kraus channels.
    pub completeness: f64,
    /// Allowed `|tr rho^2 - 1|` for inputs that must be pure.
    pub purity: f64,
    /// Allowed `max |U^dag U - I|`.
    pub unitarity: f64,
    /// LQU values within this distance outside [0, 1] are clamped.
    pub lqu_clamp: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-9,
        psd_clip: 1e-10,
        trace: 1e-9,
        spectrum_gap: 1e-9,
        w_imag: 1e-10,
        sld_cutoff: 1e-12,
        outcome_cutoff: 1e-12,
        completeness: 1e-9,
        purity: 1e-9,
        unitarity: 1e-9,
        lqu_clamp: 1e-10,
    };

    pub const NAMES: [&'static str; 11] = [
        "hermiticity",
        "psd_clip",
        "trace",
        "spectrum_gap",
        "w_imag",
        "sld_cutoff",
        "outcome_cutoff",
        "completeness",
        "purity",
        "unitarity",
        "lqu_clamp",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "hermiticity" => &mut self.hermiticity,
            "psd_clip" => &mut self.psd_clip,
            "trace" => &mut self.trace,
            "spectrum_gap" => &mut self.spectrum_gap,
            "w_imag" => &mut self.w_imag,
            "sld_cutoff" => &mut self.sld_cutoff,
            "outcome_cutoff" => &mut self.outcome_cutoff,
            "completeness" => &mut self.completeness,
            "purity" => &mut self.purity,
            "unitarity" => &mut self.unitarity,
            "lqu_clamp" => &mut self.lqu_clamp,
            _ => return None,
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let mut copy = *self;
        copy.slot(name).map(|v| *v)
    }

    /// Overrides a single tolerance by name. Values must be finite and
    /// nonnegative.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Invalid(format!("tolerance {name} = {value}")));
        }
        match self.slot(name) {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => Err(Error::Invalid(format!("unknown tolerance {name:?}"))),
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_and_get_by_name() {
        let mut t = Tolerances::default();
        for name in Tolerances::NAMES {
            assert!(t.get(name).is_some(), "{name}");
        }
        t.set("psd_clip", 1e-8).unwrap();
        assert_eq!(t.psd_clip, 1e-8);
        assert!(t.set("nope", 1.0).is_err());
        assert!(t.set("trace", -1.0).is_err());
        assert!(t.set("trace", f64::NAN).is_err());
    }
}
