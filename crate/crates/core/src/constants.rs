//! CODATA 2018 exact and recommended values in SI units.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 2.997_924_58e8;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Stefan-Boltzmann constant, W/(m²·K⁴).
pub const SIGMA_SB: f64 = 5.670_374_419e-8;
/// One electronvolt in joules.
pub const EV: f64 = 1.602_176_634e-19;

/// Bundle of the constants used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub k_b: f64,
    pub sigma_sb: f64,
    pub ev_to_j: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        hbar: HBAR,
        c: C,
        k_b: K_B,
        sigma_sb: SIGMA_SB,
        ev_to_j: EV,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// Converts an energy ħω in eV to an angular frequency in rad/s.
pub fn ev_to_rad_per_s(energy_ev: f64) -> f64 {
    energy_ev * EV / HBAR
}

/// Matsubara frequency ξ_l = 2π k_B T l / ħ.
pub fn matsubara_frequency(temperature: f64, l: usize) -> f64 {
    2.0 * std::f64::consts::PI * K_B * temperature * l as f64 / HBAR
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_positive() {
        let k = PhysicalConstants::default();
        for v in [k.hbar, k.c, k.k_b, k.sigma_sb, k.ev_to_j] {
            assert!(v > 0.0);
        }
    }

    #[test]
    fn first_matsubara_frequency_at_room_temperature() {
        let xi1 = matsubara_frequency(300.0, 1);
        assert!((xi1 - 2.4678e14).abs() / 2.4678e14 < 1e-4);
        assert_eq!(matsubara_frequency(300.0, 0), 0.0);
    }
}
