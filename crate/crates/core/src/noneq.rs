//! Proper nonequilibrium contribution from real-frequency integrals,
//! assembly of the total pressure on either plate, and the ideal-metal
//! normalization.
//!
//! The outer frequency integral runs over x = ħω/(k_B T_max). The
//! propagating sector is integrated in p = √(ω²/c² − k⊥²) ∈ [0, ω/c],
//! pre-split into panels of width π/(4a) to follow the Fabry-Perot
//! oscillation of the denominator. The evanescent sector is integrated
//! in t = Im p ∈ [0, 20/a] where e^{−2at} has decayed by e^{−40}.
//! Below x_min the outer integrand is continued by a fitted power law.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::{C, HBAR, K_B, SIGMA_SB};
use crate::equilibrium::{pressure_eq_mean, pressure_eq_tilde};
use crate::error::{Error, Result};
use crate::optics::{expm1_complex, slab_reflection_parts, SlabReflection, SpectralPoint};
use crate::permittivity::{theta, Dielectric};
use crate::quadrature::{ErrorNorm, Integrator, QuadratureResult};
use crate::system::SystemConfig;

/// Below this temperature difference (K) the nonequilibrium term is zero.
pub const DEGENERATE_DELTA_T: f64 = 1e-3;

/// Numerical settings of the real-frequency integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoneqOptions {
    /// Lower end of x = ħω/(k_B T_max).
    pub x_min: f64,
    /// Multiplier applied to the automatically chosen upper end of x.
    pub cutoff_scale: f64,
    /// Inner integrals use `tol * inner_tol_factor`.
    pub inner_tol_factor: f64,
}

impl Default for NoneqOptions {
    fn default() -> Self {
        NoneqOptions {
            x_min: 1e-6,
            cutoff_scale: 1.0,
            inner_tol_factor: 0.1,
        }
    }
}

/// Propagating and evanescent parts of ΔP_neq, in Pa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoneqSectors {
    pub propagating: f64,
    pub evanescent: f64,
}

impl NoneqSectors {
    pub const ZERO: NoneqSectors = NoneqSectors {
        propagating: 0.0,
        evanescent: 0.0,
    };

    pub fn total(&self) -> f64 {
        self.propagating + self.evanescent
    }
}

/// Everything computed for one configuration. Pressures in Pa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureBreakdown {
    /// Total pressure on the lower plate.
    pub p_neq: f64,
    pub p_eq_tilde: f64,
    pub delta_p_neq: f64,
    pub delta_prop: f64,
    pub delta_evan: f64,
    /// ½[P_eq(T₁) + P_eq(T₂)]
    pub p_eq_mean: f64,
    pub delta_eq_rel: f64,
    /// (2σ/3c)(T₂⁴ − T₁⁴)
    pub blackbody_offset: f64,
    /// Total pressure on the upper plate.
    pub p_neq_upper: f64,
    /// Ideal-metal pressure at zero temperature.
    pub p_ideal: f64,
    /// ΔP_neq / |P_neq|
    pub ratio_delta_over_total: f64,
}

impl PressureBreakdown {
    pub fn p_neq_over_p0(&self) -> f64 {
        self.p_neq / self.p_ideal
    }
}

/// −π² ħ c /(240 a⁴).
pub fn pressure_ideal(separation: f64) -> f64 {
    -PI * PI * HBAR * C / (240.0 * separation.powi(4))
}

/// (2σ/3c)(T₂⁴ − T₁⁴).
pub fn blackbody_offset(t1: f64, t2: f64) -> f64 {
    2.0 * SIGMA_SB / (3.0 * C) * (t2.powi(4) - t1.powi(4))
}

fn delta_theta(x: f64, t1: f64, t2: f64) -> f64 {
    let omega = x * K_B * t1.max(t2) / HBAR;
    theta(omega, t1) - theta(omega, t2)
}

/// Upper end of x beyond which |ΔΘ|·x³ (the thermal weight times the
/// growth of the propagating phase space) is below 1e-14 of its peak.
pub fn x_max_cutoff(t1: f64, t2: f64) -> f64 {
    let w = |x: f64| (delta_theta(x, t1, t2) * x.powi(3)).abs();
    let mut peak = 0.0f64;
    let mut x = 0.05;
    while x < 200.0 {
        peak = peak.max(w(x));
        x += 0.05;
    }
    let mut x = 1.0;
    while x < 2000.0 && w(x) > 1e-14 * peak {
        x += 0.5;
    }
    x
}

struct Plates {
    upper: Dielectric,
    lower: Dielectric,
    d_upper: f64,
    d_lower: f64,
    a: f64,
}

/// Deviations δ₁, δ₂ with R = ±(1 − δ), the sign picked once for both plates.
/// Then R₁R₂ = (1 − δ₁)(1 − δ₂) and |R|² = |1 − δ|², which stay accurate
/// when both coefficients are close to ±1.
#[inline]
fn deviations(r1: &SlabReflection, r2: &SlabReflection) -> (Complex64, Complex64) {
    let plus = r1.near_plus_one();
    (r1.deviation(plus), r2.deviation(plus))
}

/// 1 − R₁R₂e written as (1 − e) + e(δ₁ + δ₂ − δ₁δ₂), with 1 − e = `one_minus_e`.
#[inline]
fn denominator(d1: Complex64, d2: Complex64, e: Complex64, one_minus_e: Complex64) -> Complex64 {
    one_minus_e + e * (d1 + d2 - d1 * d2)
}

impl Plates {
    #[inline]
    fn reflections(&self, omega: f64, k_sq: f64, p: Complex64) -> ([SlabReflection; 2], [SlabReflection; 2]) {
        (
            slab_reflection_parts(&self.upper, self.d_upper, omega, k_sq, p),
            slab_reflection_parts(&self.lower, self.d_lower, omega, k_sq, p),
        )
    }

    /// ∫_0^{ω/c} dp p² Σ_α (|R_α(T₂)|² − |R_α(T₁)|²)/|D_α|².
    fn propagating(&self, omega: f64, tol: f64) -> QuadratureResult {
        let k0 = omega / C;
        let a = self.a;
        let integrand = |p: f64| {
            let k_sq = (k0 - p) * (k0 + p);
            let (r1, r2) = self.reflections(omega, k_sq, Complex64::new(p, 0.0));
            let arg = Complex64::new(0.0, 2.0 * p * a);
            let e = arg.exp();
            let one_minus_e = -expm1_complex(arg);
            let mut s = 0.0;
            for i in 0..2 {
                let (d1, d2) = deviations(&r1[i], &r2[i]);
                let d = denominator(d1, d2, e, one_minus_e);
                // |R₂|² − |R₁|² = (2 Re δ₁ − |δ₁|²) − (2 Re δ₂ − |δ₂|²)
                let num = (2.0 * d1.re - d1.norm_sqr()) - (2.0 * d2.re - d2.norm_sqr());
                s += num / d.norm_sqr();
            }
            p * p * s
        };
        let width = PI / (4.0 * a);
        let n = ((k0 / width).ceil() as usize).max(1);
        let breaks: Vec<f64> = (0..=n)
            .map(|i| if i == n { k0 } else { k0 * i as f64 / n as f64 })
            .collect();
        Integrator::new(tol).with_norm(ErrorNorm::L1).integrate(integrand, &breaks)
    }

    /// ∫_0^∞ dt t² e^{−2at} Σ_α Im(R_α(T₁) R_α(T₂)*)/|D_α|².
    fn evanescent(&self, omega: f64, tol: f64) -> QuadratureResult {
        let k0 = omega / C;
        let a = self.a;
        let integrand = |t: f64| {
            let k_sq = k0 * k0 + t * t;
            let (r1, r2) = self.reflections(omega, k_sq, Complex64::new(0.0, t));
            let decay = (-2.0 * a * t).exp();
            let one_minus_e = Complex64::new(-(-2.0 * a * t).exp_m1(), 0.0);
            let mut s = 0.0;
            for i in 0..2 {
                let (d1, d2) = deviations(&r1[i], &r2[i]);
                let d = denominator(d1, d2, Complex64::new(decay, 0.0), one_minus_e);
                // Im((1 − δ₁)(1 − δ₂*))
                let num = d2.im - d1.im + (d1 * d2.conj()).im;
                s += num / d.norm_sqr();
            }
            t * t * decay * s
        };
        Integrator::new(tol)
            .with_norm(ErrorNorm::L1)
            .integrate_semiinfinite(integrand, 1.0 / (2.0 * a))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Sector {
    Propagating,
    Evanescent,
}

impl Sector {
    fn name(self) -> &'static str {
        match self {
            Sector::Propagating => "propagating sector",
            Sector::Evanescent => "evanescent sector",
        }
    }
}

fn outer_breaks(x_min: f64, x_max: f64) -> Vec<f64> {
    let mut breaks = Vec::new();
    let mut x = x_min;
    while x < 1.0 {
        breaks.push(x);
        x *= 10f64.sqrt();
    }
    for b in [1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 13.0, 16.0, 20.0, 25.0, 30.0, 35.0, 40.0, 50.0, 60.0, 80.0] {
        if b < x_max {
            breaks.push(b);
        }
    }
    breaks.push(x_max);
    breaks
}

fn sector_integral(
    plates: &Plates,
    sector: Sector,
    t1: f64,
    t2: f64,
    tol: f64,
    opts: &NoneqOptions,
) -> Result<f64> {
    let t_max = t1.max(t2);
    let omega_per_x = K_B * t_max / HBAR;
    let inner_tol = tol * opts.inner_tol_factor;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let outer = |x: f64| {
        if failure.borrow().is_some() {
            return 0.0;
        }
        let omega = x * omega_per_x;
        let weight = theta(omega, t1) - theta(omega, t2);
        if weight == 0.0 {
            return 0.0;
        }
        let inner = match sector {
            Sector::Propagating => plates.propagating(omega, inner_tol),
            Sector::Evanescent => plates.evanescent(omega, inner_tol),
        };
        if !inner.converged {
            *failure.borrow_mut() = Some(Error::NonConvergence {
                what: sector.name(),
                location: SpectralPoint::real(omega, 0.0).to_string(),
                estimate: inner.error_estimate,
                value: inner.value,
            });
            return 0.0;
        }
        weight * inner.value * omega_per_x
    };
    let x_max = x_max_cutoff(t1, t2) * opts.cutoff_scale;
    let res = Integrator::new(tol)
        .with_norm(ErrorNorm::L1)
        .integrate(&outer, &outer_breaks(opts.x_min, x_max));
    let below = low_frequency_tail(outer, opts.x_min);
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    if !res.converged {
        return Err(Error::NonConvergence {
            what: sector.name(),
            location: format!("outer frequency integral, x in [{}, {x_max}]", opts.x_min),
            estimate: res.error_estimate,
            value: res.value,
        });
    }
    if let Some(tail) = below {
        return Ok(res.value + tail);
    }
    let bound = low_frequency_bound(outer, opts.x_min);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if bound <= tol * res.l1 {
        return Ok(res.value);
    }
    Err(Error::NonConvergence {
        what: sector.name(),
        location: format!("low-frequency end, x < {}", opts.x_min),
        estimate: bound,
        value: res.value,
    })
}

/// ∫_0^{x_min} g from the local power law g ∝ x^β fitted at x_min and
/// 2·x_min. None if g does not vanish integrably there.
fn low_frequency_tail<F: Fn(f64) -> f64>(g: F, x_min: f64) -> Option<f64> {
    let g1 = g(x_min);
    if g1 == 0.0 {
        return Some(0.0);
    }
    let g2 = g(2.0 * x_min);
    if g2 == 0.0 || g1.signum() != g2.signum() {
        return None;
    }
    let beta = (g2 / g1).log2();
    if !(beta > -0.9) {
        return None;
    }
    Some(g1 * x_min / (beta + 1.0))
}

/// Crude bound on |∫_0^{x_min} g| for when no power law fits, e.g. when two
/// contributions of different order cancel near x_min.
fn low_frequency_bound<F: Fn(f64) -> f64>(g: F, x_min: f64) -> f64 {
    let peak = [0.01, 0.1, 0.5, 1.0, 2.0].iter().map(|&f| g(f * x_min).abs()).fold(0.0, f64::max);
    2.0 * peak * x_min
}

/// Proper nonequilibrium contribution split into its propagating and
/// evanescent sectors.
pub fn delta_pneq(config: &SystemConfig, tol: f64) -> Result<NoneqSectors> {
    delta_pneq_with(config, tol, &NoneqOptions::default())
}

pub fn delta_pneq_with(config: &SystemConfig, tol: f64, opts: &NoneqOptions) -> Result<NoneqSectors> {
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::config(format!("tolerance must lie in (0, 1e-2], got {tol}")));
    }
    config.validate()?;
    let (t1, t2) = (config.t1(), config.t2());
    if (t1 - t2).abs() < DEGENERATE_DELTA_T {
        return Ok(NoneqSectors::ZERO);
    }
    let plates = Plates {
        upper: config.plate_upper.dielectric()?,
        lower: config.plate_lower.dielectric()?,
        d_upper: config.plate_upper.thickness,
        d_lower: config.plate_lower.thickness,
        a: config.separation,
    };
    let prop = sector_integral(&plates, Sector::Propagating, t1, t2, tol, opts)?;
    let evan = sector_integral(&plates, Sector::Evanescent, t1, t2, tol, opts)?;
    Ok(NoneqSectors {
        propagating: HBAR / (4.0 * PI * PI) * prop,
        evanescent: -HBAR / (2.0 * PI * PI) * evan,
    })
}

/// Full breakdown of the pressure on the lower plate.
pub fn pressure_neq(config: &SystemConfig, tol: f64) -> Result<PressureBreakdown> {
    let p_eq_tilde = pressure_eq_tilde(config, tol)?;
    let sectors = delta_pneq(config, tol)?;
    let p_eq_mean = pressure_eq_mean(config.separation, config.t1(), config.t2(), &config.plate_upper, tol)?;
    Ok(assemble(config, p_eq_tilde, sectors, p_eq_mean))
}

pub(crate) fn assemble(
    config: &SystemConfig,
    p_eq_tilde: f64,
    sectors: NoneqSectors,
    p_eq_mean: f64,
) -> PressureBreakdown {
    let delta_p_neq = sectors.total();
    let p_neq = p_eq_tilde + delta_p_neq;
    let blackbody = blackbody_offset(config.t1(), config.t2());
    PressureBreakdown {
        p_neq,
        p_eq_tilde,
        delta_p_neq,
        delta_prop: sectors.propagating,
        delta_evan: sectors.evanescent,
        p_eq_mean,
        delta_eq_rel: (p_eq_tilde - p_eq_mean) / p_eq_mean,
        blackbody_offset: blackbody,
        p_neq_upper: p_neq + blackbody,
        p_ideal: pressure_ideal(config.separation),
        ratio_delta_over_total: delta_p_neq / p_neq.abs(),
    }
}

/// Pressure on the upper plate, including the blackbody term.
pub fn pressure_neq_upper(config: &SystemConfig, tol: f64) -> Result<f64> {
    Ok(pressure_neq(config, tol)?.p_neq_upper)
}
