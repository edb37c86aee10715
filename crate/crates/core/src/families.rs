//! The five coherent-state families, their spectra `e_n` and moment
//! sequences `ρ_n = e₁e₂⋯e_n`.
//!
//! Energies are dimensionless (`ħω = 1`). For the noncommutative
//! Pöschl–Teller model `e_n` is the ratio `ρ_n/ρ_{n−1}`, i.e. the ground-state
//! energy is shifted out so that `ρ₀ = 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logspace::LogSum;
use crate::specfun::ln_gamma_pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyId {
    Glauber,
    Su11,
    BarutGirardello,
    NcOscillator,
    NcPoschlTeller,
}

impl FamilyId {
    pub const ALL: [FamilyId; 5] = [
        FamilyId::Glauber,
        FamilyId::Su11,
        FamilyId::BarutGirardello,
        FamilyId::NcOscillator,
        FamilyId::NcPoschlTeller,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Glauber => "glauber",
            FamilyId::Su11 => "su11",
            FamilyId::BarutGirardello => "barut-girardello",
            FamilyId::NcOscillator => "nc-oscillator",
            FamilyId::NcPoschlTeller => "nc-poschl-teller",
        }
    }

    /// Parameter names the family reads, in canonical order.
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            FamilyId::Glauber => &[],
            FamilyId::Su11 | FamilyId::BarutGirardello => &["j"],
            FamilyId::NcOscillator => &["tau"],
            FamilyId::NcPoschlTeller => &["tau", "gamma", "epsilon"],
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            FamilyId::Glauber => "canonical coherent states, rho_n = n!",
            FamilyId::Su11 => "SU(1,1) discrete series, rho_n = n! Gamma(2j)/Gamma(2j+n), 2j > 1",
            FamilyId::BarutGirardello => "Barut-Girardello, rho_n = n! Gamma(2j+n)/Gamma(2j), 2j >= 1",
            FamilyId::NcOscillator => {
                "noncommutative harmonic oscillator, e_n = n(1 + tau(n+1)/2), tau > 0"
            }
            FamilyId::NcPoschlTeller => {
                "noncommutative Poschl-Teller, e_n = 2 tau (n + eta - 1)^2, tau > 0, 1 + 4gamma/tau >= 0, 1 + 4epsilon/tau >= 0"
            }
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        match key.as_str() {
            "glauber" => Ok(FamilyId::Glauber),
            "su11" | "su(1,1)" => Ok(FamilyId::Su11),
            "barut-girardello" | "bg" => Ok(FamilyId::BarutGirardello),
            "nc-oscillator" | "ncho" => Ok(FamilyId::NcOscillator),
            "nc-poschl-teller" | "ncpt" => Ok(FamilyId::NcPoschlTeller),
            _ => Err(Error::param(format!(
                "unknown family '{s}' (expected one of glauber, su11, barut-girardello, nc-oscillator, nc-poschl-teller)"
            ))),
        }
    }
}

/// Raw, unvalidated family parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl FamilyParams {
    pub fn tau(tau: f64) -> Self {
        FamilyParams {
            tau: Some(tau),
            ..Default::default()
        }
    }

    pub fn j(j: f64) -> Self {
        FamilyParams {
            j: Some(j),
            ..Default::default()
        }
    }

    pub fn poschl_teller(tau: f64, gamma: f64, epsilon: f64) -> Self {
        FamilyParams {
            tau: Some(tau),
            gamma: Some(gamma),
            epsilon: Some(epsilon),
            j: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Model {
    Glauber,
    Su11 {
        j: f64,
    },
    BarutGirardello {
        j: f64,
    },
    NcOscillator {
        tau: f64,
        alpha_exp: f64,
        beta_exp: f64,
    },
    NcPoschlTeller {
        tau: f64,
        gamma: f64,
        epsilon: f64,
        a: f64,
        b: f64,
        eta: f64,
    },
}

/// A validated family with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyRecord", into = "FamilyRecord")]
pub struct FamilySpec {
    model: Model,
}

#[derive(Serialize, Deserialize)]
struct FamilyRecord {
    family: FamilyId,
    #[serde(flatten)]
    params: FamilyParams,
}

impl TryFrom<FamilyRecord> for FamilySpec {
    type Error = Error;

    fn try_from(r: FamilyRecord) -> Result<Self> {
        make_family(r.family, &r.params)
    }
}

impl From<FamilySpec> for FamilyRecord {
    fn from(f: FamilySpec) -> Self {
        FamilyRecord {
            family: f.id(),
            params: f.params(),
        }
    }
}

fn require(id: FamilyId, name: &str, v: Option<f64>) -> Result<f64> {
    match v {
        None => Err(Error::param(format!("{id} requires parameter '{name}'"))),
        Some(v) if !v.is_finite() => Err(Error::param(format!(
            "{id}: {name} must be finite, got {v}"
        ))),
        Some(v) => Ok(v),
    }
}

fn require_tau(id: FamilyId, params: &FamilyParams) -> Result<f64> {
    let tau = require(id, "tau", params.tau)?;
    if tau <= 0.0 {
        return Err(Error::param(format!(
            "{id} requires tau > 0 (got tau = {tau})"
        )));
    }
    Ok(tau)
}

/// Validate parameters for `id` and populate the derived constants.
///
/// Parameters the family does not use are ignored.
pub fn make_family(id: FamilyId, params: &FamilyParams) -> Result<FamilySpec> {
    let model = match id {
        FamilyId::Glauber => Model::Glauber,
        FamilyId::Su11 => {
            let j = require(id, "j", params.j)?;
            if 2.0 * j <= 1.0 {
                return Err(Error::param(format!(
                    "su11 requires 2j > 1 (got j = {j}); the weight (2j-1)(1-t)^(2j-2) degenerates at 2j = 1"
                )));
            }
            Model::Su11 { j }
        }
        FamilyId::BarutGirardello => {
            let j = require(id, "j", params.j)?;
            if 2.0 * j < 1.0 {
                return Err(Error::param(format!(
                    "barut-girardello requires 2j >= 1 (got j = {j})"
                )));
            }
            Model::BarutGirardello { j }
        }
        FamilyId::NcOscillator => {
            let tau = require_tau(id, params)?;
            Model::NcOscillator {
                tau,
                alpha_exp: 0.0,
                beta_exp: 1.0 + 2.0 / tau,
            }
        }
        FamilyId::NcPoschlTeller => {
            let tau = require_tau(id, params)?;
            let gamma = require(id, "gamma", params.gamma)?;
            let epsilon = require(id, "epsilon", params.epsilon)?;
            let ga = 1.0 + 4.0 * gamma / tau;
            if ga < 0.0 {
                return Err(Error::param(format!(
                    "nc-poschl-teller requires 1 + 4 gamma/tau >= 0 (got {ga})"
                )));
            }
            let eb = 1.0 + 4.0 * epsilon / tau;
            if eb < 0.0 {
                return Err(Error::param(format!(
                    "nc-poschl-teller requires 1 + 4 epsilon/tau >= 0 (got {eb})"
                )));
            }
            let a = 0.5 * ga.sqrt();
            let b = 0.5 * eb.sqrt();
            Model::NcPoschlTeller {
                tau,
                gamma,
                epsilon,
                a,
                b,
                eta: (3.0 + a + b) / 2.0,
            }
        }
    };
    Ok(FamilySpec { model })
}

impl FamilySpec {
    pub fn new(id: FamilyId, params: &FamilyParams) -> Result<Self> {
        make_family(id, params)
    }

    pub fn glauber() -> Self {
        FamilySpec {
            model: Model::Glauber,
        }
    }

    pub fn id(&self) -> FamilyId {
        match self.model {
            Model::Glauber => FamilyId::Glauber,
            Model::Su11 { .. } => FamilyId::Su11,
            Model::BarutGirardello { .. } => FamilyId::BarutGirardello,
            Model::NcOscillator { .. } => FamilyId::NcOscillator,
            Model::NcPoschlTeller { .. } => FamilyId::NcPoschlTeller,
        }
    }

    /// The validated input parameters (derived constants excluded).
    pub fn params(&self) -> FamilyParams {
        match self.model {
            Model::Glauber => FamilyParams::default(),
            Model::Su11 { j } | Model::BarutGirardello { j } => FamilyParams::j(j),
            Model::NcOscillator { tau, .. } => FamilyParams::tau(tau),
            Model::NcPoschlTeller {
                tau,
                gamma,
                epsilon,
                ..
            } => FamilyParams::poschl_teller(tau, gamma, epsilon),
        }
    }

    /// `(name, value)` pairs in the order of [`FamilyId::parameter_names`].
    pub fn param_list(&self) -> Vec<(&'static str, f64)> {
        let p = self.params();
        self.id()
            .parameter_names()
            .iter()
            .map(|&name| {
                let v = match name {
                    "tau" => p.tau,
                    "j" => p.j,
                    "gamma" => p.gamma,
                    _ => p.epsilon,
                };
                (name, v.unwrap_or(f64::NAN))
            })
            .collect()
    }

    pub fn tau(&self) -> Option<f64> {
        self.params().tau
    }

    pub fn j(&self) -> Option<f64> {
        self.params().j
    }

    /// Exponent `α = 0` of `Γ(n+α+1)` in the oscillator moments.
    pub fn alpha_exp(&self) -> Option<f64> {
        match self.model {
            Model::NcOscillator { alpha_exp, .. } => Some(alpha_exp),
            _ => None,
        }
    }

    /// Exponent `β = 1 + 2/τ` of `Γ(n+β+1)` in the oscillator moments.
    pub fn beta_exp(&self) -> Option<f64> {
        match self.model {
            Model::NcOscillator { beta_exp, .. } => Some(beta_exp),
            _ => None,
        }
    }

    /// `(a, b, η)` of the Pöschl–Teller model.
    pub fn poschl_teller_constants(&self) -> Option<(f64, f64, f64)> {
        match self.model {
            Model::NcPoschlTeller { a, b, eta, .. } => Some((a, b, eta)),
            _ => None,
        }
    }

    pub fn eta(&self) -> Option<f64> {
        self.poschl_teller_constants().map(|c| c.2)
    }

    /// `e_n = ρ_n/ρ_{n−1}` for `n ≥ 1`.
    pub fn eigenvalue(&self, n: u64) -> Result<f64> {
        if n < 1 {
            return Err(Error::domain("eigenvalue index must be at least 1"));
        }
        Ok(self.eigenvalue_unchecked(n as f64))
    }

    pub(crate) fn eigenvalue_unchecked(&self, n: f64) -> f64 {
        match self.model {
            Model::Glauber => n,
            Model::Su11 { j } => n / (2.0 * j + n - 1.0),
            Model::BarutGirardello { j } => n * (2.0 * j + n - 1.0),
            Model::NcOscillator { tau, .. } => n * (1.0 + tau * (1.0 + n) / 2.0),
            Model::NcPoschlTeller { tau, eta, .. } => {
                let m = n + eta - 1.0;
                2.0 * tau * m * m
            }
        }
    }

    /// Closed-form `ln ρ_n` through `ln Γ`.
    pub fn log_rho_at(&self, n: u64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let nf = n as f64;
        let ln_fact = ln_gamma_pos(nf + 1.0);
        match self.model {
            Model::Glauber => ln_fact,
            Model::Su11 { j } => ln_fact + ln_gamma_pos(2.0 * j) - ln_gamma_pos(2.0 * j + nf),
            Model::BarutGirardello { j } => {
                ln_fact + ln_gamma_pos(2.0 * j + nf) - ln_gamma_pos(2.0 * j)
            }
            Model::NcOscillator {
                tau,
                alpha_exp,
                beta_exp,
            } => {
                nf * (tau / 2.0).ln()
                    + ln_gamma_pos(nf + alpha_exp + 1.0)
                    + ln_gamma_pos(nf + beta_exp + 1.0)
                    - ln_gamma_pos(1.0 + beta_exp)
            }
            Model::NcPoschlTeller { tau, eta, .. } => {
                nf * (2.0 * tau).ln() + 2.0 * (ln_gamma_pos(nf + eta) - ln_gamma_pos(eta))
            }
        }
    }

    /// `ln ρ_n` for `n = 0..=n_max`.
    pub fn log_rho(&self, n_max: usize) -> MomentSequence {
        MomentSequence {
            family: *self,
            log_rho: (0..=n_max as u64).map(|n| self.log_rho_at(n)).collect(),
        }
    }

    /// `R = lim ρ_{n+1}/ρ_n`, the radius of convergence of `Σ tⁿ/ρ_n` in `t = |α|²`.
    pub fn radius_of_convergence(&self) -> f64 {
        match self.model {
            Model::Su11 { .. } => 1.0,
            _ => f64::INFINITY,
        }
    }

    /// `𝒩(t) = Σ tⁿ/ρ_n` at `t = |α|²`.
    ///
    /// The value overflows to `inf` for large `t` in the entire-function
    /// families; [`FamilySpec::ln_normalization`] never does.
    pub fn normalization(&self, abs_alpha_sq: f64) -> Result<f64> {
        Ok(self.ln_normalization(abs_alpha_sq)?.exp())
    }

    /// `ln 𝒩(t)`, summed until the geometric tail bound drops below `1e-16`
    /// of the partial sum.
    pub fn ln_normalization(&self, abs_alpha_sq: f64) -> Result<f64> {
        let series = NormalizationSeries::new(self, abs_alpha_sq)?;
        let mut acc = LogSum::new();
        for term in series {
            acc.add(term.log_term);
            if term.log_tail_bound - acc.ln() < TAIL_REL_LN {
                return Ok(acc.ln());
            }
        }
        Err(Error::domain(format!(
            "normalization series for {} at |alpha|^2 = {abs_alpha_sq} needs more than {MAX_SERIES_TERMS} terms",
            self.id()
        )))
    }
}

/// `ln(1e-16)`
const TAIL_REL_LN: f64 = -36.841_361_487_904_734;
pub(crate) const MAX_SERIES_TERMS: u64 = 100_000_000;

/// One term `tⁿ/ρ_n` of the normalization series, in logs, together with a
/// bound on everything after it.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesTerm {
    pub log_term: f64,
    /// `ln` of an upper bound on `Σ_{m>n} tᵐ/ρ_m` (`+inf` while no bound holds).
    pub log_tail_bound: f64,
}

/// Iterator over the terms of `𝒩(t)`.
///
/// Every family has `e_n` non-decreasing in `n`, so after index `n` the
/// terms shrink at least geometrically with ratio `t/e_{n+2}` once that is
/// below one.
pub(crate) struct NormalizationSeries {
    family: FamilySpec,
    ln_t: f64,
    t: f64,
    n: u64,
}

impl NormalizationSeries {
    pub fn new(family: &FamilySpec, abs_alpha_sq: f64) -> Result<Self> {
        if !abs_alpha_sq.is_finite() || abs_alpha_sq < 0.0 {
            return Err(Error::domain(format!(
                "|alpha|^2 must be finite and non-negative, got {abs_alpha_sq}"
            )));
        }
        let radius = family.radius_of_convergence();
        if abs_alpha_sq >= radius {
            return Err(Error::Divergence {
                abs_alpha_sq,
                radius,
            });
        }
        Ok(NormalizationSeries {
            family: *family,
            ln_t: abs_alpha_sq.ln(),
            t: abs_alpha_sq,
            n: 0,
        })
    }
}

impl Iterator for NormalizationSeries {
    type Item = SeriesTerm;

    fn next(&mut self) -> Option<SeriesTerm> {
        if self.n >= MAX_SERIES_TERMS {
            return None;
        }
        let n = self.n;
        self.n += 1;
        if self.t == 0.0 {
            let log_term = if n == 0 { 0.0 } else { f64::NEG_INFINITY };
            return Some(SeriesTerm {
                log_term,
                log_tail_bound: f64::NEG_INFINITY,
            });
        }
        let log_term = n as f64 * self.ln_t - self.family.log_rho_at(n);
        let ratio = self.t / self.family.eigenvalue_unchecked((n + 2) as f64);
        let log_tail_bound = if ratio < 1.0 {
            let log_next =
                log_term + self.ln_t - self.family.eigenvalue_unchecked((n + 1) as f64).ln();
            log_next - (-ratio).ln_1p()
        } else {
            f64::INFINITY
        };
        Some(SeriesTerm {
            log_term,
            log_tail_bound,
        })
    }
}

/// `ln ρ_n` for `n = 0..=N` of one family.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    pub family: FamilySpec,
    pub log_rho: Vec<f64>,
}

impl MomentSequence {
    pub fn n_max(&self) -> usize {
        self.log_rho.len() - 1
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.log_rho.get(n).copied()
    }
}
