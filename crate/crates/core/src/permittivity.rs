//! Drude and plasma permittivities on the imaginary and real frequency
//! axes, plus the Bose-Einstein photon population.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::material::MaterialParams;

/// Which dielectric response describes the plate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PermittivityModel {
    /// Drude model with γ evaluated at the plate temperature.
    DrudeT,
    /// Drude model with γ frozen at a reference temperature (K).
    DrudeFixed(f64),
    /// Dissipationless plasma model (γ = 0).
    Plasma,
}

impl PermittivityModel {
    /// True when the response does not change with plate temperature.
    pub fn is_temperature_independent(&self) -> bool {
        !matches!(self, PermittivityModel::DrudeT)
    }
}

impl fmt::Display for PermittivityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PermittivityModel::DrudeT => write!(f, "drude"),
            PermittivityModel::DrudeFixed(t) => write!(f, "drude-fixed:{t}"),
            PermittivityModel::Plasma => write!(f, "plasma"),
        }
    }
}

impl FromStr for PermittivityModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "drude" | "drude-t" => return Ok(PermittivityModel::DrudeT),
            "plasma" => return Ok(PermittivityModel::Plasma),
            _ => {}
        }
        if let Some(t) = s.strip_prefix("drude-fixed:") {
            let t: f64 = t
                .trim()
                .trim_end_matches('K')
                .parse()
                .map_err(|_| Error::config(format!("bad reference temperature in '{s}'")))?;
            if !(t > 0.0) {
                return Err(Error::config(format!("reference temperature must be positive in '{s}'")));
            }
            return Ok(PermittivityModel::DrudeFixed(t));
        }
        Err(Error::config(format!(
            "unknown model '{s}' (expected drude, drude-fixed:<T>, plasma)"
        )))
    }
}

/// Imaginary-axis permittivity value. At ξ = 0 the metal permittivity
/// diverges and callers must switch to the static reflection limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImagPermittivity {
    Finite(f64),
    StaticLimit,
}

/// Permittivity of one plate with its temperature already resolved into
/// ω_p² and γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dielectric {
    pub model: PermittivityModel,
    pub omega_p: f64,
    pub omega_p_sq: f64,
    pub gamma: f64,
}

impl Dielectric {
    pub fn resolve(model: PermittivityModel, material: &MaterialParams, temperature: f64) -> Result<Self> {
        let gamma = match model {
            PermittivityModel::DrudeT => material.gamma_at(temperature)?,
            PermittivityModel::DrudeFixed(t_ref) => material.gamma_at(t_ref)?,
            PermittivityModel::Plasma => 0.0,
        };
        let omega_p = material.omega_p();
        Ok(Dielectric {
            model,
            omega_p,
            omega_p_sq: omega_p * omega_p,
            gamma,
        })
    }

    /// ε(iξ) for ξ > 0.
    #[inline]
    pub fn eps_imag(&self, xi: f64) -> f64 {
        1.0 + self.omega_p_sq / (xi * (xi + self.gamma))
    }

    /// ε(ω) for ω > 0.
    #[inline]
    pub fn eps_real(&self, omega: f64) -> Complex64 {
        Complex64::new(1.0, 0.0) - self.omega_p_sq / (omega * Complex64::new(omega, self.gamma))
    }

    pub fn is_plasma(&self) -> bool {
        matches!(self.model, PermittivityModel::Plasma)
    }
}

/// ε(iξ, T): `StaticLimit` at ξ = 0.
pub fn permittivity_imag(
    model: PermittivityModel,
    material: &MaterialParams,
    xi: f64,
    temperature: f64,
) -> Result<ImagPermittivity> {
    if !(xi >= 0.0) {
        return Err(Error::Domain(format!("imaginary frequency must be >= 0, got {xi}")));
    }
    if xi == 0.0 {
        return Ok(ImagPermittivity::StaticLimit);
    }
    let d = Dielectric::resolve(model, material, temperature)?;
    Ok(ImagPermittivity::Finite(d.eps_imag(xi)))
}

/// ε(ω, T) on the real axis, ω > 0.
pub fn permittivity_real(
    model: PermittivityModel,
    material: &MaterialParams,
    omega: f64,
    temperature: f64,
) -> Result<Complex64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("real frequency must be > 0, got {omega}")));
    }
    let d = Dielectric::resolve(model, material, temperature)?;
    Ok(d.eps_real(omega))
}

/// Thermal photon population 1/(exp(ħω/k_B T) − 1).
#[inline]
pub fn theta(omega: f64, temperature: f64) -> f64 {
    let x = HBAR * omega / (K_B * temperature);
    if x > 700.0 {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::matsubara_frequency;
    use proptest::prelude::*;

    fn finite(p: ImagPermittivity) -> f64 {
        match p {
            ImagPermittivity::Finite(v) => v,
            ImagPermittivity::StaticLimit => panic!("unexpected static limit"),
        }
    }

    #[test]
    fn plasma_at_plasma_frequency() {
        let au = MaterialParams::gold();
        let wp = au.omega_p();
        let e = finite(permittivity_imag(PermittivityModel::Plasma, &au, wp, 300.0).unwrap());
        assert!((e - 2.0).abs() < 1e-14);
        let e = permittivity_real(PermittivityModel::Plasma, &au, wp, 300.0).unwrap();
        assert!(e.norm() < 1e-14);
    }

    #[test]
    fn drude_gold_first_matsubara() {
        // 1 + ωp²/(ξ(ξ+γ)) with ħωp = 9 eV, ħγ = 35 meV, ξ₁(300 K)
        let au = MaterialParams::gold();
        let xi = matsubara_frequency(300.0, 1);
        let wp = 9.0 * crate::constants::EV / HBAR;
        let g = 0.035 * crate::constants::EV / HBAR;
        let hand = 1.0 + wp * wp / (xi * (xi + g));
        let e = finite(permittivity_imag(PermittivityModel::DrudeT, &au, xi, 300.0).unwrap());
        assert!((e - hand).abs() / hand < 1e-14);
        assert!((e - 2.53e3).abs() / 2.53e3 < 2e-3, "{e}");
    }

    #[test]
    fn drude_gold_at_gamma() {
        let au = MaterialParams::gold();
        let g = au.gamma_at(300.0).unwrap();
        let e = permittivity_real(PermittivityModel::DrudeT, &au, g, 300.0).unwrap();
        let half = 0.5 * (9.0f64 / 0.035).powi(2);
        assert!((e.re - (1.0 - half)).abs() / half < 1e-12);
        assert!((e.im - half).abs() / half < 1e-12);
        assert!((e.re + 3.306e4).abs() < 5.0 && (e.im - 3.306e4).abs() < 5.0);
    }

    #[test]
    fn zero_gamma_drude_is_plasma() {
        let m = MaterialParams::new("X", 5.0, &[(300.0, 0.0), (500.0, 0.0)]).unwrap();
        for xi in [1e12, 1e14, 3e15, 1e17] {
            let d = permittivity_imag(PermittivityModel::DrudeT, &m, xi, 400.0).unwrap();
            let p = permittivity_imag(PermittivityModel::Plasma, &m, xi, 400.0).unwrap();
            assert_eq!(d, p);
        }
    }

    #[test]
    fn static_limit_and_domain_errors() {
        let au = MaterialParams::gold();
        assert_eq!(
            permittivity_imag(PermittivityModel::DrudeT, &au, 0.0, 300.0).unwrap(),
            ImagPermittivity::StaticLimit
        );
        assert!(permittivity_real(PermittivityModel::DrudeT, &au, 0.0, 300.0).is_err());
        assert!(permittivity_real(PermittivityModel::Plasma, &au, -1.0, 300.0).is_err());
    }

    #[test]
    fn fixed_model_ignores_plate_temperature() {
        let au = MaterialParams::gold();
        let m = PermittivityModel::DrudeFixed(300.0);
        let a = Dielectric::resolve(m, &au, 300.0).unwrap();
        let b = Dielectric::resolve(m, &au, 500.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn theta_values() {
        let t = 300.0;
        let w = K_B * t * 2f64.ln() / HBAR;
        assert!((theta(w, t) - 1.0).abs() < 1e-12);
        let w = K_B * t / HBAR;
        assert!((theta(w, t) - 1.0 / (std::f64::consts::E - 1.0)).abs() < 1e-12);
        assert!((theta(w, t) - 0.58198).abs() < 1e-5);
        assert_eq!(theta(w, t) - theta(w, t), 0.0);
        assert_eq!(theta(1e20, 1.0), 0.0);
    }

    #[test]
    fn model_parsing_round_trips() {
        for s in ["drude", "plasma", "drude-fixed:300"] {
            let m: PermittivityModel = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert!("metal".parse::<PermittivityModel>().is_err());
        assert!("drude-fixed:-3".parse::<PermittivityModel>().is_err());
    }

    proptest! {
        #[test]
        fn imag_permittivity_decreasing_and_above_one(lx in 10.0f64..17.0, dl in 0.01f64..2.0) {
            let au = MaterialParams::gold();
            for model in [PermittivityModel::DrudeT, PermittivityModel::Plasma] {
                let d = Dielectric::resolve(model, &au, 300.0).unwrap();
                let x1 = 10f64.powf(lx);
                let x2 = 10f64.powf(lx + dl);
                prop_assert!(d.eps_imag(x1) > d.eps_imag(x2));
                prop_assert!(d.eps_imag(x2) >= 1.0);
            }
        }

        #[test]
        fn drude_imag_permittivity_decreases_with_temperature(lx in 10.0f64..17.0) {
            let ti = MaterialParams::titanium();
            let xi = 10f64.powf(lx);
            let cold = Dielectric::resolve(PermittivityModel::DrudeT, &ti, 300.0).unwrap();
            let hot = Dielectric::resolve(PermittivityModel::DrudeT, &ti, 500.0).unwrap();
            prop_assert!(cold.eps_imag(xi) > hot.eps_imag(xi));
        }

        #[test]
        fn drude_is_passive(lw in 9.0f64..17.5) {
            let au = MaterialParams::gold();
            let e = permittivity_real(PermittivityModel::DrudeT, &au, 10f64.powf(lw), 300.0).unwrap();
            prop_assert!(e.im > 0.0);
        }

        #[test]
        fn theta_monotone(lw in 11.0f64..15.0, t in 50.0f64..1000.0, dt in 1.0f64..100.0) {
            let w = 10f64.powf(lw);
            prop_assert!(theta(w, t) > theta(w * 1.01, t));
            prop_assert!(theta(w, t + dt) > theta(w, t));
        }
    }
}
