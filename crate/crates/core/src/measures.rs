//! Closed-form weight functions `Ω(t)` solving `∫ tⁿ Ω(t) dt = ρ_n`.
//!
//! | family            | support | `Ω(t)` |
//! |-------------------|---------|--------|
//! | Glauber           | (0, ∞)  | `e^{−t}` |
//! | SU(1,1)           | (0, 1)  | `(2j−1)(1−t)^{2j−2}` |
//! | Barut–Girardello  | (0, ∞)  | `(2/Γ(2j)) t^{(2j−1)/2} K_{2j−1}(2√t)` |
//! | NC oscillator     | (0, ∞)  | `2^{(4+α+β)/2}/(τΓ(1+β)) (t/τ)^{(α+β)/2} K_{α−β}(2√(2t/τ))` |
//! | NC Pöschl–Teller  | (0, ∞)  | `τ^{−η}/Γ(η)² (t/2)^{η−1} K₀(√(2t/τ))` |
//!
//! The oscillator weight is the multiplicative (Mellin) convolution of a unit
//! point mass at `τ/2` with `D(x) = 2x^{(α+β)/2}K_{α−β}(2√x)`, whose moments
//! are `Γ(n+α+1)Γ(n+β+1)`. Convolving with a point mass at `s` is a dilation,
//! `λ(x) = D(x/s)/s`, and multiplies the n-th moment by `sⁿ`.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::families::{FamilyId, FamilySpec};
use crate::specfun::{ln_bessel_k, ln_gamma_pos};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// `(0, 1)`
    UnitInterval,
    /// `(0, ∞)`
    HalfLine,
}

impl Support {
    pub fn upper(self) -> f64 {
        match self {
            Support::UnitInterval => 1.0,
            Support::HalfLine => f64::INFINITY,
        }
    }

    pub fn contains(self, t: f64) -> bool {
        t > 0.0 && t < self.upper()
    }
}

/// How the density behaves at the right end of its support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RightBehavior {
    /// `(1 − t)^exponent` at `t → 1`.
    Algebraic { exponent: f64 },
    /// `e^{−rate·t}`.
    Exponential { rate: f64 },
    /// `e^{−rate·√t}`, from `K_ν(rate·√t)`.
    ExponentialSqrt { rate: f64 },
}

/// `Ω(t) = exp(log_prefactor) · t^power · K_order(arg_scale·√t)` on `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselKernel {
    pub log_prefactor: f64,
    pub power: f64,
    pub order: f64,
    pub arg_scale: f64,
}

impl BesselKernel {
    pub fn log_density(&self, t: f64) -> f64 {
        let k = ln_bessel_k(self.order, self.arg_scale * t.sqrt()).unwrap_or(f64::NAN);
        self.log_prefactor + self.power * t.ln() + k
    }

    /// Exponent `p` with `Ω(t) ~ C·tᵖ` (times `ln t` when the order is 0) as `t → 0⁺`.
    pub fn left_exponent(&self) -> f64 {
        self.power - 0.5 * self.order.abs()
    }

    /// `λ(x) = D(x/s)/s`: the kernel convolved with a unit point mass at `s`.
    pub fn dilated(&self, s: f64) -> BesselKernel {
        BesselKernel {
            log_prefactor: self.log_prefactor - (1.0 + self.power) * s.ln(),
            power: self.power,
            order: self.order,
            arg_scale: self.arg_scale / s.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityForm {
    /// `exp(log_coeff) · e^{−rate·t}` on `(0, ∞)`.
    Exponential { log_coeff: f64, rate: f64 },
    /// `exp(log_coeff) · (1 − t)^right_exponent` on `(0, 1)`.
    Beta { log_coeff: f64, right_exponent: f64 },
    /// See [`BesselKernel`].
    BesselK(BesselKernel),
}

impl DensityForm {
    fn scaled(self, log_factor: f64) -> Self {
        match self {
            DensityForm::Exponential { log_coeff, rate } => DensityForm::Exponential {
                log_coeff: log_coeff + log_factor,
                rate,
            },
            DensityForm::Beta {
                log_coeff,
                right_exponent,
            } => DensityForm::Beta {
                log_coeff: log_coeff + log_factor,
                right_exponent,
            },
            DensityForm::BesselK(k) => DensityForm::BesselK(BesselKernel {
                log_prefactor: k.log_prefactor + log_factor,
                ..k
            }),
        }
    }
}

/// A positive weight function together with the endpoint data the
/// quadrature uses to pick its substitution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BorelMeasure {
    /// `None` for measures built directly from a kernel, e.g. by [`dilate`].
    pub family: Option<FamilySpec>,
    pub support: Support,
    pub form: DensityForm,
    /// `p` with `Ω(t) ~ C·tᵖ` (possibly times `ln t`) as `t → 0⁺`.
    pub left_exponent: f64,
    /// Set exactly when the density contains `K₀`.
    pub has_log_singularity: bool,
    pub right_behavior: RightBehavior,
}

impl BorelMeasure {
    fn from_kernel(kernel: BesselKernel, family: Option<FamilySpec>) -> Self {
        BorelMeasure {
            family,
            support: Support::HalfLine,
            form: DensityForm::BesselK(kernel),
            left_exponent: kernel.left_exponent(),
            has_log_singularity: kernel.order == 0.0,
            right_behavior: RightBehavior::ExponentialSqrt {
                rate: kernel.arg_scale,
            },
        }
    }

    /// `ln Ω(t)` for `t` strictly inside the support.
    pub fn log_density(&self, t: f64) -> Result<f64> {
        if !self.support.contains(t) {
            return Err(Error::domain(format!(
                "t = {t} lies outside the open support (0, {})",
                self.support.upper()
            )));
        }
        Ok(self.log_density_split(t, 1.0 - t))
    }

    /// `Ω(t)`; underflows to 0 far in the tail.
    pub fn density(&self, t: f64) -> Result<f64> {
        Ok(self.log_density(t)?.exp())
    }

    /// `ln Ω(t)` given `t` and an accurate `1 − t` (only read on `(0, 1)`).
    pub(crate) fn log_density_split(&self, t: f64, one_minus_t: f64) -> f64 {
        match self.form {
            DensityForm::Exponential { log_coeff, rate } => log_coeff - rate * t,
            DensityForm::Beta {
                log_coeff,
                right_exponent,
            } => {
                if right_exponent == 0.0 {
                    log_coeff
                } else {
                    log_coeff + right_exponent * one_minus_t.ln()
                }
            }
            DensityForm::BesselK(k) => k.log_density(t),
        }
    }

    /// The measure multiplied by `exp(log_factor)`.
    pub fn scaled(&self, log_factor: f64) -> BorelMeasure {
        BorelMeasure {
            form: self.form.scaled(log_factor),
            ..*self
        }
    }

    /// `size` log-spaced points across the support, clipped on the right to
    /// where `ln Ω(t) > −700`.
    pub fn log_spaced_grid(&self, size: usize) -> Result<Vec<f64>> {
        if size < 2 {
            return Err(Error::domain(format!(
                "grid size must be at least 2, got {size}"
            )));
        }
        let lo = 1e-8;
        let hi = match self.support {
            Support::UnitInterval => 1.0 - 1e-8,
            Support::HalfLine => self.tail_cutoff(-700.0),
        };
        let ratio = (hi / lo).ln() / (size - 1) as f64;
        Ok((0..size)
            .map(|i| {
                if i == size - 1 {
                    hi
                } else {
                    lo * (ratio * i as f64).exp()
                }
            })
            .collect())
    }

    /// Largest `t` (to bisection accuracy) with `ln Ω(t) ≥ floor`, searching
    /// outward from `t = 1`.
    fn tail_cutoff(&self, floor: f64) -> f64 {
        let above = |t: f64| self.log_density_split(t, 1.0 - t) >= floor;
        let mut lo = 1.0;
        if !above(lo) {
            return lo;
        }
        let mut hi = 2.0;
        while above(hi) && hi < 1e300 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if above(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// The closed-form weight function of `family`.
pub fn measure_for(family: &FamilySpec) -> BorelMeasure {
    let fam = Some(*family);
    match family.id() {
        FamilyId::Glauber => BorelMeasure {
            family: fam,
            support: Support::HalfLine,
            form: DensityForm::Exponential {
                log_coeff: 0.0,
                rate: 1.0,
            },
            left_exponent: 0.0,
            has_log_singularity: false,
            right_behavior: RightBehavior::Exponential { rate: 1.0 },
        },
        FamilyId::Su11 => {
            let j = family.j().expect("su11 carries j");
            let q = 2.0 * j - 2.0;
            BorelMeasure {
                family: fam,
                support: Support::UnitInterval,
                form: DensityForm::Beta {
                    log_coeff: (2.0 * j - 1.0).ln(),
                    right_exponent: q,
                },
                left_exponent: 0.0,
                has_log_singularity: false,
                right_behavior: RightBehavior::Algebraic { exponent: q },
            }
        }
        FamilyId::BarutGirardello => {
            let j = family.j().expect("barut-girardello carries j");
            let kernel = BesselKernel {
                log_prefactor: LN_2 - ln_gamma_pos(2.0 * j),
                power: (2.0 * j - 1.0) / 2.0,
                order: 2.0 * j - 1.0,
                arg_scale: 2.0,
            };
            BorelMeasure::from_kernel(kernel, fam)
        }
        FamilyId::NcOscillator => {
            let tau = family.tau().expect("nc-oscillator carries tau");
            let alpha = family.alpha_exp().expect("nc-oscillator carries alpha");
            let beta = family.beta_exp().expect("nc-oscillator carries beta");
            let power = (alpha + beta) / 2.0;
            let kernel = BesselKernel {
                log_prefactor: 0.5 * (4.0 + alpha + beta) * LN_2
                    - tau.ln()
                    - ln_gamma_pos(1.0 + beta)
                    - power * tau.ln(),
                power,
                order: (alpha - beta).abs(),
                arg_scale: 2.0 * (2.0 / tau).sqrt(),
            };
            BorelMeasure::from_kernel(kernel, fam)
        }
        FamilyId::NcPoschlTeller => {
            let tau = family.tau().expect("nc-poschl-teller carries tau");
            let eta = family.eta().expect("nc-poschl-teller carries eta");
            let kernel = BesselKernel {
                log_prefactor: -eta * tau.ln() - 2.0 * ln_gamma_pos(eta) - (eta - 1.0) * LN_2,
                power: eta - 1.0,
                order: 0.0,
                arg_scale: (2.0 / tau).sqrt(),
            };
            BorelMeasure::from_kernel(kernel, fam)
        }
    }
}

/// Convolve `smooth_factor` with a unit point mass at `delta_point`:
/// `λ(x) = D(x/s)/s`.
pub fn dilate(smooth_factor: &BesselKernel, delta_point: f64) -> Result<BorelMeasure> {
    if delta_point.is_nan() || delta_point <= 0.0 || delta_point.is_infinite() {
        return Err(Error::domain(format!(
            "dilation point must be finite and positive, got {delta_point}"
        )));
    }
    Ok(BorelMeasure::from_kernel(
        smooth_factor.dilated(delta_point),
        None,
    ))
}

/// The two Mellin factors of the noncommutative-oscillator moments
/// `ρ_n·Γ(1+β) = A(n)·B(n)`, with `A(n) = (τ/2)ⁿ` and
/// `B(n) = Γ(n+α+1)Γ(n+β+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinFactorPair {
    /// Location `s` of the unit point mass whose moments are `A(n) = sⁿ`.
    pub delta_point: f64,
    /// `D(x) = 2x^{(α+β)/2}K_{α−β}(2√x)`, the inverse Mellin transform of `B`.
    pub smooth_factor: BesselKernel,
    /// `ln Γ(1+β)`, removed after composition.
    pub log_normalizer: f64,
    family: FamilySpec,
}

impl MellinFactorPair {
    pub fn for_nc_oscillator(family: &FamilySpec) -> Result<Self> {
        let (Some(tau), Some(alpha), Some(beta)) =
            (family.tau(), family.alpha_exp(), family.beta_exp())
        else {
            return Err(Error::FamilyMismatch(format!(
                "Mellin factorisation is defined for nc-oscillator, not {}",
                family.id()
            )));
        };
        Ok(MellinFactorPair {
            delta_point: tau / 2.0,
            smooth_factor: BesselKernel {
                log_prefactor: LN_2,
                power: (alpha + beta) / 2.0,
                order: (alpha - beta).abs(),
                arg_scale: 2.0,
            },
            log_normalizer: ln_gamma_pos(1.0 + beta),
            family: *family,
        })
    }

    /// `Ω = dilate(D, s) / Γ(1+β)`.
    pub fn compose(&self) -> Result<BorelMeasure> {
        let mut m = dilate(&self.smooth_factor, self.delta_point)?.scaled(-self.log_normalizer);
        m.family = Some(self.family);
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilyParams};

    fn family(id: FamilyId, p: FamilyParams) -> FamilySpec {
        make_family(id, &p).unwrap()
    }

    #[test]
    fn glauber_measure() {
        let m = measure_for(&FamilySpec::glauber());
        assert_eq!(m.support, Support::HalfLine);
        assert_eq!(m.left_exponent, 0.0);
        assert!(matches!(
            m.right_behavior,
            RightBehavior::Exponential { .. }
        ));
        assert_eq!(m.log_density(1.0).unwrap(), -1.0);
    }

    #[test]
    fn su11_measure() {
        let m = measure_for(&family(FamilyId::Su11, FamilyParams::j(1.5)));
        assert_eq!(m.support, Support::UnitInterval);
        for t in [0.1, 0.5, 0.9] {
            assert!((m.density(t).unwrap() - 2.0 * (1.0 - t)).abs() < 1e-15);
        }
        let flat = measure_for(&family(FamilyId::Su11, FamilyParams::j(1.0)));
        assert_eq!(flat.log_density(0.3).unwrap(), 0.0);
        assert!(matches!(m.log_density(1.0), Err(Error::Domain(_))));
        assert!(matches!(m.log_density(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn poschl_teller_metadata() {
        let f = family(
            FamilyId::NcPoschlTeller,
            FamilyParams::poschl_teller(0.2, 0.2, 0.2),
        );
        let m = measure_for(&f);
        let eta = f.eta().unwrap();
        assert!((m.left_exponent - (eta - 1.0)).abs() < 1e-15);
        assert!(m.has_log_singularity);
        assert!(matches!(m.log_density(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn log_flag_only_for_order_zero() {
        let bg_half = measure_for(&family(FamilyId::BarutGirardello, FamilyParams::j(0.5)));
        assert!(bg_half.has_log_singularity);
        let bg = measure_for(&family(FamilyId::BarutGirardello, FamilyParams::j(1.0)));
        assert!(!bg.has_log_singularity);
        assert_eq!(bg.left_exponent, 0.0);
        let nco = measure_for(&family(FamilyId::NcOscillator, FamilyParams::tau(0.5)));
        assert!(!nco.has_log_singularity);
        assert!(nco.left_exponent.abs() < 1e-15);
    }

    #[test]
    fn nc_oscillator_matches_independent_smooth_factor() {
        // Ω(t) = (2/τ) D(2t/τ) / Γ(1+β), D(x) = 2 x^{β/2} K_β(2√x)
        let tau = 0.5;
        let f = family(FamilyId::NcOscillator, FamilyParams::tau(tau));
        let beta = f.beta_exp().unwrap();
        let m = measure_for(&f);
        let t = 1.0;
        let x = 2.0 * t / tau;
        let ln_d = LN_2 + 0.5 * beta * x.ln() + ln_bessel_k(beta, 2.0 * x.sqrt()).unwrap();
        let expect = (2.0 / tau).ln() + ln_d - ln_gamma_pos(1.0 + beta);
        assert!((m.log_density(t).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn identity_dilation() {
        let d = BesselKernel {
            log_prefactor: LN_2,
            power: 1.5,
            order: 3.0,
            arg_scale: 2.0,
        };
        let m = dilate(&d, 1.0).unwrap();
        for t in [0.01, 1.0, 30.0] {
            assert_eq!(m.log_density(t).unwrap(), d.log_density(t));
        }
        assert!(matches!(dilate(&d, 0.0), Err(Error::Domain(_))));
        assert!(matches!(dilate(&d, -2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn composed_measure_equals_closed_form() {
        for tau in [0.1, 0.5] {
            let f = family(FamilyId::NcOscillator, FamilyParams::tau(tau));
            let pair = MellinFactorPair::for_nc_oscillator(&f).unwrap();
            assert_eq!(pair.delta_point, tau / 2.0);
            let composed = pair.compose().unwrap();
            let direct = measure_for(&f);
            for t in direct.log_spaced_grid(200).unwrap() {
                let a = composed.log_density(t).unwrap();
                let b = direct.log_density(t).unwrap();
                assert!(
                    (a - b).exp_m1().abs() <= 1e-12,
                    "tau={tau} t={t}: {a} vs {b}"
                );
            }
        }
        assert!(MellinFactorPair::for_nc_oscillator(&FamilySpec::glauber()).is_err());
    }

    #[test]
    fn grid_covers_support() {
        let m = measure_for(&FamilySpec::glauber());
        let g = m.log_spaced_grid(50).unwrap();
        assert_eq!(g.len(), 50);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!((g[49] - 700.0).abs() < 1e-6);
        assert!(m.log_spaced_grid(1).is_err());
    }
}
