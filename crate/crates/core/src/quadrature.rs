//! Adaptive Gauss-Kronrod integration, semi-infinite integrals with an
//! exponentially decaying integrand, and truncated series summation.
//!
//! All routines are sequential and sum contributions in ascending
//! interval (or index) order, so identical inputs give bit-identical
//! results.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Outcome of an integration or series summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Estimate of ∫|f| (sum of |terms| for series).
    pub l1: f64,
}

/// Denominator floor for relative tolerances.
pub const ABS_FLOOR: f64 = 1e-300;
/// Panel cap for adaptive bisection.
pub const MAX_PANELS: usize = 1 << 16;
/// Term cap for series summation.
pub const MAX_TERMS: usize = 1_000_000;

/// What the relative tolerance is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorNorm {
    /// |∫ f|
    Value,
    /// ∫ |f|; use for integrands with sign changes whose integral may
    /// nearly cancel.
    L1,
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    abs: f64,
}

/// One application of the 10/21-point Gauss-Kronrod pair.
fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let abs_half = half.abs();
    let value = res_k * half;
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        err = f64::INFINITY;
    }
    Panel {
        lo,
        hi,
        value,
        error: err,
        abs: res_abs,
    }
}

struct ByError(usize, f64);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.1
            .total_cmp(&other.1)
            .then_with(|| other.0.cmp(&self.0))
    }
}

/// Configurable adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub norm: ErrorNorm,
    pub max_panels: usize,
}

impl Integrator {
    pub fn new(rel_tol: f64) -> Self {
        Integrator {
            rel_tol,
            abs_floor: ABS_FLOOR,
            norm: ErrorNorm::Value,
            max_panels: MAX_PANELS,
        }
    }

    pub fn with_norm(mut self, norm: ErrorNorm) -> Self {
        self.norm = norm;
        self
    }

    pub fn with_abs_floor(mut self, floor: f64) -> Self {
        self.abs_floor = floor;
        self
    }

    fn target(&self, value: f64, abs: f64) -> f64 {
        let scale = match self.norm {
            ErrorNorm::Value => value.abs(),
            ErrorNorm::L1 => abs,
        };
        self.rel_tol * scale.max(self.abs_floor)
    }

    /// Integrates over consecutive panels `breaks[0]..breaks[1]..`, then
    /// bisects the worst panel until the summed error estimate meets the
    /// tolerance or the panel cap is reached.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, breaks: &[f64]) -> QuadratureResult {
        assert!(breaks.len() >= 2, "need at least one panel");
        let mut panels: Vec<Panel> = Vec::with_capacity(breaks.len() * 4);
        let mut heap = BinaryHeap::new();
        for w in breaks.windows(2) {
            let p = gauss_kronrod(&mut f, w[0], w[1]);
            heap.push(ByError(panels.len(), p.error));
            panels.push(p);
        }
        let mut evaluations = 21 * panels.len();
        let mut value: f64 = panels.iter().map(|p| p.value).sum();
        let mut error: f64 = panels.iter().map(|p| p.error).sum();
        let mut abs: f64 = panels.iter().map(|p| p.abs).sum();
        let mut converged = false;
        let mut since_resum = 0usize;
        loop {
            if !value.is_finite() || !error.is_finite() {
                break;
            }
            if error <= self.target(value, abs) {
                converged = true;
                break;
            }
            if panels.len() >= self.max_panels {
                break;
            }
            let Some(ByError(idx, _)) = heap.pop() else { break };
            let worst = panels[idx];
            let mid = 0.5 * (worst.lo + worst.hi);
            if !(mid > worst.lo.min(worst.hi) && mid < worst.lo.max(worst.hi)) {
                // panel cannot be split further in floating point
                break;
            }
            let left = gauss_kronrod(&mut f, worst.lo, mid);
            let right = gauss_kronrod(&mut f, mid, worst.hi);
            evaluations += 42;
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            abs += left.abs + right.abs - worst.abs;
            panels[idx] = left;
            heap.push(ByError(idx, left.error));
            heap.push(ByError(panels.len(), right.error));
            panels.push(right);
            since_resum += 1;
            if since_resum >= 64 {
                since_resum = 0;
                error = panels.iter().map(|p| p.error).sum();
                abs = panels.iter().map(|p| p.abs).sum();
                value = panels.iter().map(|p| p.value).sum();
            }
        }
        panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let abs: f64 = panels.iter().map(|p| p.abs).sum();
        let converged = converged && value.is_finite() && error <= self.target(value, abs) * (1.0 + 1e-12);
        QuadratureResult {
            value,
            error_estimate: error,
            evaluations,
            converged,
            l1: abs,
        }
    }

    /// Integrates over `[0, ∞)` for an integrand decaying on length
    /// `scale`: adaptive integration up to 40·scale plus a sampled tail
    /// bound out to 2560·scale.
    pub fn integrate_semiinfinite<F: FnMut(f64) -> f64>(&self, mut f: F, scale: f64) -> QuadratureResult {
        assert!(scale > 0.0, "scale must be positive");
        let cut = 40.0 * scale;
        let breaks: Vec<f64> = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 24.0, 32.0, 40.0]
            .iter()
            .map(|x| x * scale)
            .collect();
        let mut res = self.integrate(&mut f, &breaks);
        // trapezoid bound on ∫_cut^∞ |f| from log-spaced samples
        let mut tail = 0.0;
        let mut t_prev = cut;
        let mut f_prev = f(cut).abs();
        for k in 1..=24 {
            let t = cut * 2f64.powf(k as f64 / 4.0);
            let fv = f(t).abs();
            tail += 0.5 * (f_prev + fv) * (t - t_prev);
            t_prev = t;
            f_prev = fv;
        }
        res.evaluations += 25;
        res.error_estimate += tail;
        res.l1 += tail;
        let scale_val = match self.norm {
            ErrorNorm::Value => res.value.abs(),
            ErrorNorm::L1 => res.l1,
        };
        if !(tail <= self.rel_tol * scale_val.max(self.abs_floor)) {
            res.converged = false;
        }
        res
    }
}

/// ∫_lo^hi f with `min_panels` equal initial panels.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    min_panels: usize,
) -> QuadratureResult {
    assert!(lo < hi, "integrate_adaptive requires lo < hi");
    let n = min_panels.max(1);
    let breaks: Vec<f64> = (0..=n)
        .map(|i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 })
        .collect();
    Integrator::new(rel_tol).integrate(f, &breaks)
}

/// ∫_0^∞ f for an integrand decaying on the length `scale`.
pub fn integrate_semiinfinite<F: FnMut(f64) -> f64>(f: F, scale: f64, rel_tol: f64) -> QuadratureResult {
    Integrator::new(rel_tol).integrate_semiinfinite(f, scale)
}

/// Incremental series summation with a consecutive-small-terms stopping
/// rule. Useful when terms are produced by fallible computations.
#[derive(Debug, Clone)]
pub struct SeriesAccumulator {
    rel_tol: f64,
    consecutive: usize,
    floor_terms: usize,
    sum: f64,
    abs_sum: f64,
    terms: usize,
    small_run: usize,
    recent: f64,
}

impl SeriesAccumulator {
    pub fn new(rel_tol: f64, consecutive: usize, floor_terms: usize) -> Self {
        SeriesAccumulator {
            rel_tol,
            consecutive: consecutive.max(1),
            floor_terms,
            sum: 0.0,
            abs_sum: 0.0,
            terms: 0,
            small_run: 0,
            recent: 0.0,
        }
    }

    /// Adds the next term; returns true once the stopping rule is met.
    pub fn push(&mut self, term: f64) -> bool {
        self.sum += term;
        self.abs_sum += term.abs();
        self.terms += 1;
        if term.abs() <= self.rel_tol * self.sum.abs().max(ABS_FLOOR) {
            self.small_run += 1;
            self.recent += term.abs();
        } else {
            self.small_run = 0;
            self.recent = 0.0;
        }
        self.is_done()
    }

    pub fn is_done(&self) -> bool {
        self.terms >= self.floor_terms && self.small_run >= self.consecutive
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn result(&self) -> QuadratureResult {
        QuadratureResult {
            value: self.sum,
            error_estimate: self.recent,
            evaluations: self.terms,
            converged: self.is_done() && self.sum.is_finite(),
            l1: self.abs_sum,
        }
    }
}

/// Σ_{l≥0} term(l), stopping after `consecutive` successive terms each
/// below `rel_tol`·|partial sum| and never before `floor_terms` terms.
pub fn sum_series<F: FnMut(usize) -> f64>(
    term: F,
    rel_tol: f64,
    consecutive: usize,
    floor_terms: usize,
) -> QuadratureResult {
    sum_series_weighted(term, rel_tol, consecutive, floor_terms, false)
}

/// Same as [`sum_series`] with the l = 0 term halved (primed sum).
pub fn sum_series_primed<F: FnMut(usize) -> f64>(
    term: F,
    rel_tol: f64,
    consecutive: usize,
    floor_terms: usize,
) -> QuadratureResult {
    sum_series_weighted(term, rel_tol, consecutive, floor_terms, true)
}

fn sum_series_weighted<F: FnMut(usize) -> f64>(
    mut term: F,
    rel_tol: f64,
    consecutive: usize,
    floor_terms: usize,
    halve_first: bool,
) -> QuadratureResult {
    let mut acc = SeriesAccumulator::new(rel_tol, consecutive, floor_terms);
    for l in 0..MAX_TERMS {
        let w = if halve_first && l == 0 { 0.5 } else { 1.0 };
        if acc.push(w * term(l)) {
            break;
        }
    }
    acc.result()
}
