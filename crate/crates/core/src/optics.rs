//! Wave-vector components and reflection coefficients of a metallic slab
//! in vacuum, on the imaginary and on the real frequency axis.
//!
//! Conventions: time dependence e^{-iωt}; the normal wave number in the
//! slab always has Im u ≥ 0 so that exp(2iud) decays.

use num_complex::Complex64;

use crate::constants::C;
use crate::error::Result;
use crate::permittivity::Dielectric;
use crate::system::PlateSpec;

/// |exp(2iud)| below this is treated as zero.
const SLAB_EXP_CUTOFF: f64 = 690.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    TM,
    TE,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::TM, Polarization::TE];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyAxis {
    Imaginary,
    Real,
}

/// Evaluation coordinate: frequency (ξ or ω, rad/s) and k⊥ (1/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub axis: FrequencyAxis,
    pub frequency: f64,
    pub k_perp: f64,
}

impl SpectralPoint {
    pub fn imaginary(xi: f64, k_perp: f64) -> Self {
        SpectralPoint {
            axis: FrequencyAxis::Imaginary,
            frequency: xi,
            k_perp,
        }
    }

    pub fn real(omega: f64, k_perp: f64) -> Self {
        SpectralPoint {
            axis: FrequencyAxis::Real,
            frequency: omega,
            k_perp,
        }
    }

    /// True on the real axis for k⊥ > ω/c.
    pub fn is_evanescent(&self) -> bool {
        self.axis == FrequencyAxis::Real && self.k_perp > self.frequency / C
    }
}

impl std::fmt::Display for SpectralPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self.axis {
            FrequencyAxis::Imaginary => "xi",
            FrequencyAxis::Real => "omega",
        };
        write!(f, "{name} = {:.6e} rad/s, k_perp = {:.6e} 1/m", self.frequency, self.k_perp)
    }
}

/// Vacuum (q) and medium (v) normal wave numbers at imaginary frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveNumbersImag {
    pub q: f64,
    pub v: f64,
}

/// Vacuum (p) and medium (u) normal wave numbers at real frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveNumbersReal {
    pub p: Complex64,
    pub u: Complex64,
}

/// q = √(k⊥² + ξ²/c²), v = √(k⊥² + ε ξ²/c²).
pub fn wave_numbers_imag(xi: f64, k_perp: f64, eps: f64) -> WaveNumbersImag {
    let x = xi / C;
    WaveNumbersImag {
        q: (k_perp * k_perp + x * x).sqrt(),
        v: (k_perp * k_perp + eps * x * x).sqrt(),
    }
}

/// Vacuum normal wave number: real ≥ 0 when propagating, +i·√(k⊥² − ω²/c²)
/// when evanescent.
#[inline]
pub fn vacuum_normal(omega: f64, k_perp: f64) -> Complex64 {
    let k0 = omega / C;
    let rad = (k0 - k_perp) * (k0 + k_perp);
    if rad >= 0.0 {
        Complex64::new(rad.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-rad).sqrt())
    }
}

/// Medium normal wave number from its square, on the branch Im u ≥ 0
/// (Re u ≥ 0 when Im u = 0).
#[inline]
pub fn medium_normal(u_sq: Complex64) -> Complex64 {
    let u = u_sq.sqrt();
    if u.im < 0.0 || (u.im == 0.0 && u.re < 0.0) {
        -u
    } else {
        u
    }
}

pub fn wave_numbers_real(omega: f64, k_perp: f64, eps: Complex64) -> WaveNumbersReal {
    let k0 = omega / C;
    WaveNumbersReal {
        p: vacuum_normal(omega, k_perp),
        u: medium_normal(eps * (k0 * k0) - k_perp * k_perp),
    }
}

/// Semispace Fresnel coefficient at imaginary frequency.
#[inline]
pub fn fresnel_imag(pol: Polarization, eps: f64, q: f64, v: f64) -> f64 {
    match pol {
        Polarization::TM => (eps * q - v) / (eps * q + v),
        Polarization::TE => (q - v) / (q + v),
    }
}

/// Slab coefficient r(1 − e^{−2dv})/(1 − r² e^{−2dv}).
#[inline]
pub fn slab_imag(r: f64, v: f64, thickness: f64) -> f64 {
    let x = 2.0 * thickness * v;
    if x > SLAB_EXP_CUTOFF {
        return r;
    }
    let e = (-x).exp();
    -r * (-x).exp_m1() / (1.0 - r * r * e)
}

/// Semispace Fresnel coefficient at real frequency.
#[inline]
pub fn fresnel_real(pol: Polarization, eps: Complex64, p: Complex64, u: Complex64) -> Complex64 {
    match pol {
        Polarization::TM => (eps * p - u) / (eps * p + u),
        Polarization::TE => (p - u) / (p + u),
    }
}

/// Slab coefficient r(1 − e^{2idu})/(1 − r² e^{2idu}).
#[inline]
pub fn slab_real(r: Complex64, u: Complex64, thickness: f64) -> Complex64 {
    let phase = Complex64::new(0.0, 2.0 * thickness) * u;
    if -phase.re > SLAB_EXP_CUTOFF {
        return r;
    }
    let e = phase.exp();
    r * (1.0 - e) / (1.0 - r * r * e)
}

/// e^z − 1 without cancellation for small |z|.
#[inline]
pub fn expm1_complex(z: Complex64) -> Complex64 {
    let half_sin = (0.5 * z.im).sin();
    Complex64::new(
        z.re.exp_m1() * z.im.cos() - 2.0 * half_sin * half_sin,
        z.re.exp() * z.im.sin(),
    )
}

/// Slab reflection coefficient together with 1 − R and 1 + R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabReflection {
    pub r: Complex64,
    pub one_minus: Complex64,
    pub one_plus: Complex64,
}

impl SlabReflection {
    /// The smaller of 1 − R and 1 + R, so that R = ±(1 − δ) with the sign
    /// chosen by `near_plus_one`.
    #[inline]
    pub fn deviation(&self, near_plus_one: bool) -> Complex64 {
        if near_plus_one {
            self.one_minus
        } else {
            self.one_plus
        }
    }

    #[inline]
    pub fn near_plus_one(&self) -> bool {
        self.one_minus.norm_sqr() <= self.one_plus.norm_sqr()
    }
}

/// Slab coefficient written through the surface admittance `s`
/// (εq or q for TM/TE on the imaginary axis, εp or p on the real axis),
/// so that r = (s − u)/(s + u). Multiplying through by (s + u)² gives
/// R = (s² − u²) m / N with N = 4 s u + (s − u)² m and m = 1 − e^{2idu},
/// 1 − R = 2u(2s − m(s − u))/N and 1 + R = 2s(2u + m(s − u))/N. None of
/// these cancel for thin films of good conductors, where R → ±1.
#[inline]
pub fn slab_parts_real(s: Complex64, u: Complex64, thickness: f64) -> SlabReflection {
    let phase = Complex64::new(0.0, 2.0 * thickness) * u;
    if -phase.re > SLAB_EXP_CUTOFF {
        let den = s + u;
        return SlabReflection {
            r: (s - u) / den,
            one_minus: 2.0 * u / den,
            one_plus: 2.0 * s / den,
        };
    }
    let m = -expm1_complex(phase);
    let diff = s - u;
    let den = 4.0 * s * u + diff * diff * m;
    SlabReflection {
        r: (s + u) * diff * m / den,
        one_minus: 2.0 * u * (2.0 * s - m * diff) / den,
        one_plus: 2.0 * s * (2.0 * u + m * diff) / den,
    }
}

#[inline]
pub fn slab_from_admittance_real(s: Complex64, u: Complex64, thickness: f64) -> Complex64 {
    slab_parts_real(s, u, thickness).r
}

/// Imaginary-axis counterpart of [`slab_from_admittance_real`].
#[inline]
pub fn slab_from_admittance_imag(s: f64, v: f64, thickness: f64) -> f64 {
    let x = 2.0 * thickness * v;
    if x > SLAB_EXP_CUTOFF {
        return (s - v) / (s + v);
    }
    let m = -(-x).exp_m1();
    let diff = s - v;
    (s + v) * diff * m / (4.0 * s * v + diff * diff * m)
}

fn admittance_imag(pol: Polarization, eps: f64, q: f64) -> f64 {
    match pol {
        Polarization::TM => eps * q,
        Polarization::TE => q,
    }
}

fn admittance_real(pol: Polarization, eps: Complex64, p: Complex64) -> Complex64 {
    match pol {
        Polarization::TM => eps * p,
        Polarization::TE => p,
    }
}

/// Slab reflection coefficients for a plate with resolved permittivity,
/// on the imaginary axis. ξ = 0 uses the analytic static limits.
#[inline]
pub fn slab_reflection_imag(diel: &Dielectric, thickness: f64, xi: f64, k_perp: f64) -> [f64; 2] {
    if xi == 0.0 {
        if diel.is_plasma() {
            // ε ξ² → ω_p², r_TM → 1
            let v0 = (k_perp * k_perp + diel.omega_p_sq / (C * C)).sqrt();
            return [1.0, slab_from_admittance_imag(k_perp, v0, thickness)];
        }
        return [1.0, 0.0];
    }
    let eps = diel.eps_imag(xi);
    let wn = wave_numbers_imag(xi, k_perp, eps);
    Polarization::BOTH.map(|pol| slab_from_admittance_imag(admittance_imag(pol, eps, wn.q), wn.v, thickness))
}

/// Slab reflection coefficients on the real axis given the vacuum normal
/// wave number `p` (so callers can reuse it).
#[inline]
pub fn slab_reflection_real_with(
    diel: &Dielectric,
    thickness: f64,
    omega: f64,
    k_perp_sq: f64,
    p: Complex64,
) -> [Complex64; 2] {
    slab_reflection_parts(diel, thickness, omega, k_perp_sq, p).map(|x| x.r)
}

/// As [`slab_reflection_real_with`], also returning 1 ∓ R.
#[inline]
pub fn slab_reflection_parts(
    diel: &Dielectric,
    thickness: f64,
    omega: f64,
    k_perp_sq: f64,
    p: Complex64,
) -> [SlabReflection; 2] {
    let eps = diel.eps_real(omega);
    let k0 = omega / C;
    let u = medium_normal(eps * (k0 * k0) - k_perp_sq);
    Polarization::BOTH.map(|pol| slab_parts_real(admittance_real(pol, eps, p), u, thickness))
}

fn index(pol: Polarization) -> usize {
    match pol {
        Polarization::TM => 0,
        Polarization::TE => 1,
    }
}

/// R_α(iξ, k⊥) of a plate. `xi = 0` selects the static term, which
/// requires k⊥ > 0.
pub fn reflection_imag(pol: Polarization, xi: f64, k_perp: f64, plate: &PlateSpec) -> Result<f64> {
    let diel = plate.dielectric()?;
    Ok(slab_reflection_imag(&diel, plate.thickness, xi, k_perp)[index(pol)])
}

/// R_α(ω, k⊥) of a plate, ω > 0.
pub fn reflection_real(pol: Polarization, omega: f64, k_perp: f64, plate: &PlateSpec) -> Result<Complex64> {
    if !(omega > 0.0) {
        return Err(crate::error::Error::Domain(format!(
            "real frequency must be > 0, got {omega}"
        )));
    }
    let diel = plate.dielectric()?;
    let p = vacuum_normal(omega, k_perp);
    Ok(slab_reflection_real_with(&diel, plate.thickness, omega, k_perp * k_perp, p)[index(pol)])
}
