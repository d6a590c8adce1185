//! Globally adaptive 21-point Gauss-Kronrod quadrature (10-point Gauss rule
//! embedded for the error estimate) on finite and semi-infinite intervals.
//!
//! Semi-infinite intervals `[lo, ∞)` are compactified with
//! `x = lo + t / (1 - t)`, so a single adaptive driver handles both cases.
//! Kronrod nodes never touch the endpoints, which keeps integrable endpoint
//! singularities (and the `t = 1` image of infinity) from being sampled.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

/// Tolerances and effort limit for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureSpecError {
    #[error("relative tolerance must lie in (0, 1), got {0}")]
    RelTol(f64),
    #[error("absolute tolerance must be positive and finite, got {0}")]
    AbsTol(f64),
    #[error("max-subdivisions must be at least 1")]
    MaxSubdivisions,
}

impl QuadratureSpec {
    pub fn new(
        rel_tol: f64,
        abs_tol: f64,
        max_subdivisions: usize,
    ) -> Result<Self, QuadratureSpecError> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(QuadratureSpecError::RelTol(rel_tol));
        }
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(QuadratureSpecError::AbsTol(abs_tol));
        }
        if max_subdivisions == 0 {
            return Err(QuadratureSpecError::MaxSubdivisions);
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }

    /// Defaults for single-frequency dielectric integrals (KK rotation).
    pub fn dielectric() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-14,
            max_subdivisions: 200,
        }
    }

    /// Defaults for the Lifshitz double integral.
    pub fn force() -> Self {
        Self {
            rel_tol: 1e-5,
            abs_tol: 1e-14,
            max_subdivisions: 200,
        }
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn max_subdivisions(&self) -> usize {
        self.max_subdivisions
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Result<Self, QuadratureSpecError> {
        Self::new(rel_tol, self.abs_tol, self.max_subdivisions)
    }

    pub fn with_max_subdivisions(self, n: usize) -> Result<Self, QuadratureSpecError> {
        Self::new(self.rel_tol, self.abs_tol, n)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::dielectric()
    }
}

/// A converged integral estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    /// Number of bisections performed.
    pub subdivisions: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate:e}, error bound {error:e})"
    )]
    NoConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("integrand returned a non-finite value {value} at x = {x:e}")]
    InvalidIntegrand { x: f64, value: f64 },
    #[error("invalid integration bounds [{lo}, {hi}]")]
    InvalidBounds { lo: f64, hi: f64 },
}

// Nodes and weights as tabulated in QUADPACK's qk21.
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
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_390,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// 10-point Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn checked<E, F>(f: &mut F, x: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    let y = f(x)?;
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadratureError::InvalidIntegrand { x, value: y }.into())
    }
}

/// One 21-point Kronrod panel with the QUADPACK error heuristic.
fn kronrod21<E, F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64), E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = checked(f, center)?;
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((value, err))
}

fn adaptive_finite<E, F>(f: &mut F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    let (value, error) = kronrod21(f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut subdivisions = 0;

    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(QuadratureError::NoConvergence {
                estimate: total,
                error: total_err,
                subdivisions,
            }
            .into());
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Segment can no longer be split in floating point.
            return Err(QuadratureError::NoConvergence {
                estimate: total,
                error: total_err,
                subdivisions,
            }
            .into());
        }
        let (v1, e1) = kronrod21(f, worst.a, mid)?;
        let (v2, e2) = kronrod21(f, mid, worst.b)?;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        subdivisions += 1;
    }

    // Re-sum to shed the drift of the running updates.
    let mut segments = heap.into_vec();
    segments.sort_by(|l, r| l.a.total_cmp(&r.a));
    let value = segments.iter().map(|s| s.value).sum();
    let error = segments.iter().map(|s| s.error).sum();
    Ok(Integral {
        value,
        error,
        subdivisions,
    })
}

/// Integrates a fallible integrand over `[lo, hi]`, where `hi` may be
/// `f64::INFINITY`. Errors raised by the integrand are propagated unchanged.
pub fn try_integrate_adaptive<E, F>(
    mut f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<Integral, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    if !lo.is_finite() || hi.is_nan() || lo >= hi {
        return Err(QuadratureError::InvalidBounds { lo, hi }.into());
    }
    if hi.is_finite() {
        adaptive_finite(&mut f, lo, hi, spec)
    } else {
        let mut mapped = |t: f64| -> Result<f64, E> {
            let s = 1.0 - t;
            let x = lo + t / s;
            let y = f(x)?;
            Ok(y / (s * s))
        };
        adaptive_finite(&mut mapped, 0.0, 1.0, spec)
    }
}

/// Integrates `f` over `[lo, hi]` (`hi` may be infinite) to
/// `|error| <= max(abs_tol, rel_tol * |I|)`.
pub fn integrate_adaptive<F>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<Integral, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    try_integrate_adaptive(|x| Ok::<_, QuadratureError>(f(x)), lo, hi, spec)
}
