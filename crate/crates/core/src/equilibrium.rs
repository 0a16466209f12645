//! Modified equilibrium pressure as a sum over Matsubara frequencies of
//! both plate temperatures, the ordinary equilibrium pressure, and their
//! relative difference.

use std::f64::consts::PI;

use crate::constants::{matsubara_frequency, C, HBAR, K_B};
use crate::error::{Error, Result};
use crate::optics::{slab_reflection_imag, SpectralPoint};
use crate::permittivity::Dielectric;
use crate::quadrature::{Integrator, QuadratureResult, SeriesAccumulator, MAX_TERMS};
use crate::system::{PlateSpec, SystemConfig};

/// Stop after this many consecutive terms below `SERIES_REL_TOL`.
const SERIES_CONSECUTIVE: usize = 3;
const SERIES_REL_TOL: f64 = 1e-10;

/// Which plate temperature generates the Matsubara ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Upper,
    Lower,
}

/// One summand of a ladder, including the −k_B T/(2π) prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraTerm {
    pub ladder: Ladder,
    pub l: usize,
    pub xi: f64,
    pub weight: f64,
    /// Pa
    pub value: f64,
    /// TM and TE parts of `value`.
    pub by_polarization: [f64; 2],
}

/// A plate reduced to what the imaginary-axis reflection needs.
#[derive(Debug, Clone, Copy)]
struct Mirror {
    diel: Dielectric,
    thickness: f64,
}

impl Mirror {
    fn of(plate: &PlateSpec) -> Result<Self> {
        Ok(Mirror {
            diel: plate.dielectric()?,
            thickness: plate.thickness,
        })
    }
}

/// Minimum number of Matsubara terms: 5·ħc/(2 a k_B T).
pub fn floor_terms(separation: f64, temperature: f64) -> usize {
    let scale = HBAR * C / (2.0 * separation * K_B * temperature);
    (5.0 * scale).ceil() as usize
}

/// e^{y0}·∫_{q0}^∞ q² dq Σ R R /(e^{2qa} − R R) in y = 2aq, for one or
/// both polarizations (`mask`).
fn term_integral(
    a: f64,
    xi: f64,
    upper: &Mirror,
    lower: &Mirror,
    mask: [bool; 2],
    tol: f64,
) -> (QuadratureResult, f64) {
    let y0 = 2.0 * a * xi / C;
    let two_a = 2.0 * a;
    let integrand = |s: f64| {
        let y = y0 + s;
        let k = (s * (s + 2.0 * y0)).sqrt() / two_a;
        let r1 = slab_reflection_imag(&upper.diel, upper.thickness, xi, k);
        let r2 = slab_reflection_imag(&lower.diel, lower.thickness, xi, k);
        let ey = (-y).exp();
        let mut sum = 0.0;
        for i in 0..2 {
            if mask[i] {
                let rr = r1[i] * r2[i];
                if rr != 0.0 {
                    sum += rr / (1.0 - rr * ey);
                }
            }
        }
        y * y * (-s).exp() * sum
    };
    let res = Integrator::new(tol).integrate_semiinfinite(integrand, 1.0);
    (res, y0)
}

fn term_value(
    a: f64,
    temperature: f64,
    l: usize,
    upper: &Mirror,
    lower: &Mirror,
    mask: [bool; 2],
    tol: f64,
) -> Result<f64> {
    let xi = matsubara_frequency(temperature, l);
    let (res, y0) = term_integral(a, xi, upper, lower, mask, tol);
    if !res.converged {
        return Err(Error::NonConvergence {
            what: "Matsubara k-integral",
            location: format!("l = {l}, T = {temperature} K, {}", SpectralPoint::imaginary(xi, 0.0)),
            estimate: res.error_estimate,
            value: res.value,
        });
    }
    let weight = if l == 0 { 0.5 } else { 1.0 };
    Ok(-K_B * temperature / (2.0 * PI) * weight * res.value * (-y0).exp() / (2.0 * a).powi(3))
}

/// Σ' over one ladder including the −k_B T/(2π) prefactor.
fn ladder_block(a: f64, temperature: f64, upper: &Mirror, lower: &Mirror, tol: f64) -> Result<f64> {
    let mut acc = SeriesAccumulator::new(
        SERIES_REL_TOL.min(tol),
        SERIES_CONSECUTIVE,
        floor_terms(a, temperature),
    );
    let term_tol = tol / 10.0;
    for l in 0..MAX_TERMS {
        let v = term_value(a, temperature, l, upper, lower, [true, true], term_tol)?;
        if acc.push(v) {
            return Ok(acc.sum());
        }
    }
    let r = acc.result();
    Err(Error::NonConvergence {
        what: "Matsubara sum",
        location: format!("T = {temperature} K, a = {a:e} m"),
        estimate: r.error_estimate,
        value: r.value,
    })
}

/// A single Matsubara term of the modified equilibrium pressure.
pub fn matsubara_term(config: &SystemConfig, ladder: Ladder, l: usize, tol: f64) -> Result<MatsubaraTerm> {
    config.validate()?;
    let temperature = match ladder {
        Ladder::Upper => config.t1(),
        Ladder::Lower => config.t2(),
    };
    let upper = Mirror::of(&config.plate_upper)?;
    let lower = Mirror::of(&config.plate_lower)?;
    let a = config.separation;
    let tm = term_value(a, temperature, l, &upper, &lower, [true, false], tol)?;
    let te = term_value(a, temperature, l, &upper, &lower, [false, true], tol)?;
    Ok(MatsubaraTerm {
        ladder,
        l,
        xi: matsubara_frequency(temperature, l),
        weight: if l == 0 { 0.5 } else { 1.0 },
        value: tm + te,
        by_polarization: [tm, te],
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::config(format!("tolerance must lie in (0, 1e-2], got {tol}")));
    }
    Ok(())
}

/// Modified equilibrium pressure P̃_eq(a, T₁, T₂) in Pa.
pub fn pressure_eq_tilde(config: &SystemConfig, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    config.validate()?;
    let upper = Mirror::of(&config.plate_upper)?;
    let lower = Mirror::of(&config.plate_lower)?;
    let a = config.separation;
    let b1 = ladder_block(a, config.t1(), &upper, &lower, tol)?;
    let b2 = ladder_block(a, config.t2(), &upper, &lower, tol)?;
    Ok(b1 + b2)
}

/// Standard Lifshitz pressure with both plates at `temperature`.
pub fn pressure_eq(separation: f64, temperature: f64, plate_template: &PlateSpec, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let plate = plate_template.at_temperature(temperature);
    let config = SystemConfig::new(plate.clone(), plate, separation)?;
    let mirror = Mirror::of(&config.plate_upper)?;
    Ok(2.0 * ladder_block(separation, temperature, &mirror, &mirror, tol)?)
}

/// ½[P_eq(a, T₁) + P_eq(a, T₂)].
pub fn pressure_eq_mean(
    separation: f64,
    t1: f64,
    t2: f64,
    plate_template: &PlateSpec,
    tol: f64,
) -> Result<f64> {
    let p1 = pressure_eq(separation, t1, plate_template, tol)?;
    let p2 = pressure_eq(separation, t2, plate_template, tol)?;
    Ok(0.5 * (p1 + p2))
}

/// (P̃_eq − P̄_eq)/P̄_eq.
pub fn delta_eq_rel(config: &SystemConfig, tol: f64) -> Result<f64> {
    let tilde = pressure_eq_tilde(config, tol)?;
    let mean = pressure_eq_mean(config.separation, config.t1(), config.t2(), &config.plate_upper, tol)?;
    Ok((tilde - mean) / mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::MaterialParams;
    use crate::permittivity::PermittivityModel;

    fn zeta3() -> f64 {
        let n = 10_000;
        let s: f64 = (1..=n).map(|k| 1.0 / (k as f64).powi(3)).sum();
        let nf = n as f64;
        s + 1.0 / (2.0 * nf * nf) - 1.0 / (2.0 * nf.powi(3))
    }

    fn cfg(model: PermittivityModel, d: f64, a: f64, t1: f64, t2: f64) -> SystemConfig {
        SystemConfig::similar(MaterialParams::gold(), model, d, a, t1, t2).unwrap()
    }

    #[test]
    fn static_tm_term_matches_ideal_metal_closed_form() {
        for (a, t) in [(1e-6, 300.0), (0.5e-6, 500.0)] {
            let c = cfg(PermittivityModel::DrudeT, 2e-8, a, t, t);
            let term = matsubara_term(&c, Ladder::Upper, 0, 1e-12).unwrap();
            let exact = -K_B * t * zeta3() / (16.0 * PI * a.powi(3));
            assert!((term.by_polarization[0] - exact).abs() / exact.abs() < 1e-8);
            assert_eq!(term.by_polarization[1], 0.0);
            assert_eq!(term.weight, 0.5);
            assert_eq!(term.xi, 0.0);
        }
    }

    #[test]
    fn terms_are_negative_and_decay() {
        let c = cfg(PermittivityModel::DrudeT, 2e-8, 1e-6, 300.0, 500.0);
        let mut prev = f64::NEG_INFINITY;
        for l in 1..12 {
            let t = matsubara_term(&c, Ladder::Lower, l, 1e-8).unwrap();
            assert!(t.value < 0.0);
            assert!(t.value > prev);
            prev = t.value;
        }
    }

    #[test]
    fn plasma_tilde_equals_mean_exactly() {
        let c = cfg(PermittivityModel::Plasma, 2e-8, 1e-6, 300.0, 500.0);
        let tilde = pressure_eq_tilde(&c, 1e-6).unwrap();
        let mean = pressure_eq_mean(1e-6, 300.0, 500.0, &c.plate_upper, 1e-6).unwrap();
        assert_eq!(tilde, mean);
        assert_eq!(delta_eq_rel(&c, 1e-6).unwrap(), 0.0);
    }

    #[test]
    fn equal_temperatures_collapse() {
        let c = cfg(PermittivityModel::DrudeT, 2e-8, 1e-6, 300.0, 300.0);
        let tilde = pressure_eq_tilde(&c, 1e-6).unwrap();
        let eq = pressure_eq(1e-6, 300.0, &c.plate_upper, 1e-6).unwrap();
        assert_eq!(tilde, eq);
        let mean = pressure_eq_mean(1e-6, 300.0, 300.0, &c.plate_upper, 1e-6).unwrap();
        assert_eq!(mean, eq);
    }

    #[test]
    fn swap_symmetry_is_exact() {
        let c = cfg(PermittivityModel::DrudeT, 2e-8, 0.7e-6, 300.0, 500.0);
        let a = pressure_eq_tilde(&c, 1e-6).unwrap();
        let b = pressure_eq_tilde(&c.swapped(), 1e-6).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mean_lies_between_endpoints() {
        let c = cfg(PermittivityModel::DrudeT, 1e-6, 1e-6, 300.0, 500.0);
        let p1 = pressure_eq(1e-6, 300.0, &c.plate_upper, 1e-6).unwrap();
        let p2 = pressure_eq(1e-6, 500.0, &c.plate_upper, 1e-6).unwrap();
        let m = pressure_eq_mean(1e-6, 300.0, 500.0, &c.plate_upper, 1e-6).unwrap();
        assert!(m >= p1.min(p2) && m <= p1.max(p2));
    }

    #[test]
    fn truncation_is_sound() {
        // ten extra terms past the stopping index move the sum by < tol/10
        let c = cfg(PermittivityModel::DrudeT, 2e-8, 0.5e-6, 300.0, 500.0);
        let tol = 1e-6;
        let upper = Mirror::of(&c.plate_upper).unwrap();
        let lower = Mirror::of(&c.plate_lower).unwrap();
        let mut acc = SeriesAccumulator::new(SERIES_REL_TOL, SERIES_CONSECUTIVE, floor_terms(0.5e-6, 300.0));
        let mut l = 0;
        loop {
            let v = term_value(0.5e-6, 300.0, l, &upper, &lower, [true, true], tol / 10.0).unwrap();
            l += 1;
            if acc.push(v) {
                break;
            }
        }
        let base = acc.sum();
        let extra: f64 = (l..l + 10)
            .map(|k| term_value(0.5e-6, 300.0, k, &upper, &lower, [true, true], tol / 10.0).unwrap())
            .sum();
        assert!(extra.abs() < tol / 10.0 * base.abs());
    }

    #[test]
    fn rejects_bad_tolerance() {
        let c = cfg(PermittivityModel::DrudeT, 2e-8, 1e-6, 300.0, 500.0);
        assert!(pressure_eq_tilde(&c, 0.0).is_err());
        assert!(pressure_eq_tilde(&c, 0.5).is_err());
    }
}
