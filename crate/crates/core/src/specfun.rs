//! Real special functions: `ln Γ(x)` and the modified Bessel function of the
//! second kind `K_ν(x)`.
//!
//! `K_ν` uses Temme's series for `x < 2` and Steed's continued fraction
//! (Thompson–Barnett CF2) for `x ≥ 2`, both at a reduced order
//! `μ = ν − round(ν) ∈ [−½, ½)`, followed by the forward recurrence
//! `K_{μ+k+1} = K_{μ+k−1} + (2(μ+k)/x)·K_{μ+k}`, which is stable for `K`.
//! The recurrence runs on the ratio `K_{μ+k+1}/K_{μ+k}` with a separate binary
//! exponent, so `ln K_ν(x)` stays available where `K_ν(x)` itself overflows.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `(−1)ᵏ(ζ(k) − 1)/k` for k = 2..=41 enter the series of `ln Γ(2 + z)`.
#[allow(clippy::excessive_precision)]
const ZETA_MINUS_ONE: [f64; 40] = [
    6.449_340_668_482_264e-1,
    2.020_569_031_595_943e-1,
    8.232_323_371_113_819e-2,
    3.692_775_514_336_993e-2,
    1.734_306_198_444_914e-2,
    8.349_277_381_922_827e-3,
    4.077_356_197_944_339e-3,
    2.008_392_826_082_214e-3,
    9.945_751_278_180_853e-4,
    4.941_886_041_194_646e-4,
    2.460_865_533_080_483e-4,
    1.227_133_475_784_891e-4,
    6.124_813_505_870_483e-5,
    3.058_823_630_702_049e-5,
    1.528_225_940_865_187e-5,
    7.637_197_637_899_762e-6,
    3.817_293_264_999_840e-6,
    1.908_212_716_553_939e-6,
    9.539_620_338_727_961e-7,
    4.769_329_867_878_065e-7,
    2.384_505_027_277_330e-7,
    1.192_199_259_653_111e-7,
    5.960_818_905_125_948e-8,
    2.980_350_351_465_228e-8,
    1.490_155_482_836_504e-8,
    7.450_711_789_835_429e-9,
    3.725_334_024_788_457e-9,
    1.862_659_723_513_049e-9,
    9.313_274_324_196_682e-10,
    4.656_629_065_033_784e-10,
    2.328_311_833_676_505e-10,
    1.164_155_017_270_052e-10,
    5.820_772_087_902_701e-11,
    2.910_385_044_497_100e-11,
    1.455_192_189_104_198e-11,
    7.275_959_835_057_481e-12,
    3.637_979_547_378_651e-12,
    1.818_989_650_307_066e-12,
    9.094_947_840_263_889e-13,
    4.547_473_783_042_154e-13,
];

/// Taylor coefficients of `1/Γ(1 + μ) = Σ cₖ μᵏ`.
#[allow(clippy::excessive_precision)]
const RGAMMA_1P: [f64; 30] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_9,
    -0.042_002_635_034_095_24,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_34,
    -0.009_621_971_527_876_974,
    0.007_218_943_246_663_1,
    -0.001_165_167_591_859_065,
    -0.000_215_241_674_114_951,
    0.000_128_050_282_388_116_2,
    -2.013_485_478_078_824e-5,
    -1.250_493_482_142_671e-6,
    1.133_027_231_981_696e-6,
    -2.056_338_416_977_607e-7,
    6.116_095_104_481_416e-9,
    5.002_007_644_469_223e-9,
    -1.181_274_570_487_020e-9,
    1.043_426_711_691_101e-10,
    7.782_263_439_905_071e-12,
    -3.696_805_618_642_206e-12,
    5.100_370_287_454_476e-13,
    -2.058_326_053_566_507e-14,
    -5.348_122_539_423_018e-15,
    1.226_778_628_238_261e-15,
    -1.181_259_301_697_459e-16,
    1.186_692_254_751_600e-18,
    1.412_380_655_318_032e-18,
    -2.298_745_684_435_370e-19,
    1.714_406_321_927_337e-20,
];

/// `B₂ₖ / (2k(2k − 1))` for the Stirling series.
#[allow(clippy::excessive_precision)]
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(format!(
            "ln_gamma requires a finite x > 0, got {x}"
        )));
    }
    Ok(ln_gamma_pos(x))
}

/// `ln Γ(x)` without argument checks; `x` must be finite and positive.
pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0 && x.is_finite());
    if x < 0.5 {
        ln_gamma_2p(x) - x.ln_1p() - x.ln()
    } else if x < 1.5 {
        let z = x - 1.0;
        ln_gamma_2p(z) - z.ln_1p()
    } else if x < 2.5 {
        ln_gamma_2p(x - 2.0)
    } else if x < 12.0 {
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        prod.ln() + ln_gamma_2p(y - 2.0)
    } else {
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        let mut series = 0.0;
        for c in STIRLING.iter().rev() {
            series = series * inv2 + c;
        }
        (x - 0.5) * x.ln() - x + HALF_LN_2PI + series * inv
    }
}

/// `ln Γ(2 + z)` for `|z| ≤ 1/2`, from
/// `ln Γ(2+z) = (1−γ)z + Σ_{k≥2} (−1)ᵏ (ζ(k)−1) zᵏ/k`.
fn ln_gamma_2p(z: f64) -> f64 {
    let mut acc = 0.0;
    for (i, c) in ZETA_MINUS_ONE.iter().enumerate().rev() {
        let k = (i + 2) as f64;
        let signed = if i % 2 == 0 { c / k } else { -c / k };
        acc = (acc + signed) * z;
    }
    (acc + (1.0 - EULER_GAMMA)) * z
}

/// Result of a `K_ν(x)` evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    /// `K_ν(x)`, or `eˣ·K_ν(x)` when `scaled` is set.
    pub value: f64,
    pub scaled: bool,
    pub abs_error_estimate: f64,
}

/// `K_ν(x)` (or `eˣK_ν(x)` when `scaled`) for real order and `x > 0`.
///
/// `K_{−ν} = K_ν`, so negative orders are accepted. Unscaled values that leave
/// the double range are reported as `Overflow`/`Underflow`; the scaled variant
/// or [`ln_bessel_k`] should be used instead.
pub fn bessel_k(nu: f64, x: f64, scaled: bool) -> Result<BesselEval> {
    check_args(nu, x)?;
    let core = k_scaled_core(nu.abs(), x);
    let rel = f64::EPSILON * (8.0 + 2.0 * core.steps as f64);

    let value = if scaled {
        core.mantissa * pow2(core.exp2)
    } else {
        // split the scale so the intermediate stays normal
        let damped = core.mantissa * (-x).exp();
        if damped == 0.0 {
            0.0
        } else {
            damped * pow2(core.exp2)
        }
    };

    if !value.is_finite() {
        return Err(Error::Overflow(format!(
            "K_{nu}({x}) exceeds the double range; use the scaled or logarithmic form"
        )));
    }
    if value < f64::MIN_POSITIVE {
        return Err(Error::Underflow(format!(
            "K_{nu}({x}) is below the normal double range; use the scaled or logarithmic form"
        )));
    }
    Ok(BesselEval {
        value,
        scaled,
        abs_error_estimate: value * rel,
    })
}

/// `ln(eˣ·K_ν(x))`, finite for every `x ≥ 1e-300`.
pub fn ln_bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    check_args(nu, x)?;
    let core = k_scaled_core(nu.abs(), x);
    Ok(core.mantissa.ln() + core.exp2 as f64 * LN_2)
}

/// `ln K_ν(x)`, finite for every `x ≥ 1e-300`.
pub fn ln_bessel_k(nu: f64, x: f64) -> Result<f64> {
    Ok(ln_bessel_k_scaled(nu, x)? - x)
}

fn check_args(nu: f64, x: f64) -> Result<()> {
    if !nu.is_finite() {
        return Err(Error::domain(format!(
            "Bessel order must be finite, got {nu}"
        )));
    }
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::domain(format!(
            "K_nu(x) requires a finite x > 0, got {x}"
        )));
    }
    Ok(())
}

/// `eˣK_ν(x) = mantissa · 2^exp2`.
struct ScaledK {
    mantissa: f64,
    exp2: i32,
    steps: usize,
}

fn k_scaled_core(nu: f64, x: f64) -> ScaledK {
    let order_steps = (nu + 0.5).floor();
    let mu = nu - order_steps;
    let order_steps = order_steps as usize;

    let (k_mu, mut ratio, iters) = if x < 2.0 { temme(mu, x) } else { steed(mu, x) };

    let (mut mantissa, mut exp2) = split_pow2(k_mu);
    if order_steps == 0 {
        return ScaledK {
            mantissa,
            exp2,
            steps: iters.min(50),
        };
    }

    let two_over_x = 2.0 / x;
    for k in 0..order_steps {
        if k > 0 {
            ratio = (mu + k as f64) * two_over_x + 1.0 / ratio;
        }
        let (m, e) = split_pow2(ratio);
        mantissa *= m;
        exp2 += e;
        let (m, e) = split_pow2(mantissa);
        mantissa = m;
        exp2 += e;
    }
    ScaledK {
        mantissa,
        exp2,
        steps: iters.min(50) + order_steps,
    }
}

/// Temme's series for `x < 2`: returns `(eˣK_μ(x), K_{μ+1}(x)/K_μ(x), terms)`.
fn temme(mu: f64, x: f64) -> (f64, f64, usize) {
    let half_x = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < 1e-6 {
        1.0 + pimu * pimu / 6.0
    } else {
        pimu / pimu.sin()
    };
    let d = -half_x.ln();
    let e = mu * d;
    let fact2 = if e.abs() < 1e-6 {
        1.0 + e * e / 6.0
    } else {
        e.sinh() / e
    };

    let (gam1, gam2, gampl, gammi) = gamma_pair(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = half_x * half_x;
    let mut sum1 = p;
    let mu2 = mu * mu;
    let mut terms = 1;
    for i in 1..500 {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        let del1 = c * (p - fi * ff);
        sum1 += del1;
        terms = i + 1;
        if del.abs() < sum.abs() * 1e-17 && del1.abs() < sum1.abs() * 1e-17 {
            break;
        }
    }
    let ratio = (sum1 / sum) * (2.0 / x);
    (sum * x.exp(), ratio, terms)
}

/// Steed's method on CF2 for `x ≥ 2`: returns `(eˣK_μ(x), K_{μ+1}(x)/K_μ(x), terms)`.
fn steed(mu: f64, x: f64) -> (f64, f64, usize) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut terms = 1;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        terms = i;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k_mu = (PI / (2.0 * x)).sqrt() / s;
    let ratio = (mu + x + 0.5 - h) / x;
    (k_mu, ratio, terms)
}

/// `(Γ₁(μ), Γ₂(μ), 1/Γ(1+μ), 1/Γ(1−μ))` for `|μ| ≤ 1/2`, where
/// `Γ₁ = (1/Γ(1−μ) − 1/Γ(1+μ))/(2μ)` and `Γ₂ = (1/Γ(1−μ) + 1/Γ(1+μ))/2`.
fn gamma_pair(mu: f64) -> (f64, f64, f64, f64) {
    let m2 = mu * mu;
    let mut even = 0.0;
    let mut odd = 0.0;
    for k in (0..RGAMMA_1P.len()).rev() {
        if k % 2 == 0 {
            even = even * m2 + RGAMMA_1P[k];
        } else {
            odd = odd * m2 + RGAMMA_1P[k];
        }
    }
    // even = Σ c₂ₖ μ²ᵏ, odd = Σ c₂ₖ₊₁ μ²ᵏ
    let gam1 = -odd;
    let gam2 = even;
    (gam1, gam2, even + mu * odd, even - mu * odd)
}

/// Split a positive finite value into `m · 2^e` with `m ∈ [1, 2)`.
fn split_pow2(v: f64) -> (f64, i32) {
    debug_assert!(v > 0.0 && v.is_finite());
    let (v, bias) = if v < f64::MIN_POSITIVE {
        (v * pow2(64), -64)
    } else {
        (v, 0)
    };
    let bits = v.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32 - 1023;
    let mantissa = f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52));
    (mantissa, exp + bias)
}

/// `2^e`, saturating to `inf`/`0` outside the double range.
fn pow2(e: i32) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else {
        2f64.powi(e)
    }
}
