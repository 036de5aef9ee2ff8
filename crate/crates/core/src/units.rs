//! Unit systems. All formulas are written in Gaussian form with the speed of
//! light explicit; Planck's constant only enters the vacuum spectrum.

/// Speed of light in cm/s.
pub const C_CGS: f64 = 2.997_924_58e10;
/// Reduced Planck constant in erg s.
pub const HBAR_CGS: f64 = 1.054_571_817e-27;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    /// Speed of light in the working units.
    pub c: f64,
    /// Reduced Planck constant in the working units.
    pub hbar: f64,
}

impl UnitSystem {
    /// c = ħ = 1.
    pub const fn natural() -> Self {
        Self { c: 1.0, hbar: 1.0 }
    }

    /// Gaussian CGS rescaled so that one length unit is `length_cm` centimetres
    /// and one time unit is `time_s` seconds. Mass stays in grams.
    pub fn cgs(length_cm: f64, time_s: f64) -> Self {
        Self {
            c: C_CGS * time_s / length_cm,
            hbar: HBAR_CGS * time_s / (length_cm * length_cm),
        }
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::natural()
    }
}
