//! Truncated coherent-state vectors `|α⟩ = 𝒩^{−1/2} Σ αⁿ/√ρ_n |n⟩`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::families::{FamilySpec, NormalizationSeries};
use crate::logspace::LogSum;

/// Coefficients are stored as `(ln|c_n|, arg c_n)`; `arg c_n = n·arg α` is
/// not reduced modulo 2π.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    pub family: FamilySpec,
    pub alpha: Complex64,
    /// Highest Fock index kept.
    pub truncation: usize,
    log_magnitude: Vec<f64>,
    phase: Vec<f64>,
    /// `1 − Σ_{n≤N} |c_n|²`, summed directly from the discarded terms.
    pub norm_residual: f64,
}

impl CoherentState {
    pub fn log_magnitudes(&self) -> &[f64] {
        &self.log_magnitude
    }

    pub fn phases(&self) -> &[f64] {
        &self.phase
    }

    /// `c_n` as complex numbers (entries below the double range become 0).
    pub fn coeffs(&self) -> Vec<Complex64> {
        self.log_magnitude
            .iter()
            .zip(&self.phase)
            .map(|(&lm, &ph)| Complex64::from_polar(lm.exp(), ph))
            .collect()
    }

    /// `|c_n|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.log_magnitude
            .iter()
            .map(|lm| (2.0 * lm).exp())
            .collect()
    }

    /// `Σ_{n≤N} |c_n|² = ⟨α|α⟩` of the truncated vector.
    pub fn norm_squared(&self) -> f64 {
        let mut acc = LogSum::new();
        for &lm in &self.log_magnitude {
            acc.add(2.0 * lm);
        }
        acc.ln().exp()
    }
}

/// Build `|α⟩` with the smallest truncation whose discarded weight is below `tol`.
///
/// The series is extended in doubling blocks until the geometric tail bound
/// certifies `tol`; the residual itself is then summed term by term.
pub fn build_state(family: &FamilySpec, alpha: Complex64, tol: f64) -> Result<CoherentState> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::domain(format!(
            "state tolerance must lie in (0, 1), got {tol}"
        )));
    }
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::domain("alpha must be finite"));
    }
    let t = alpha.norm_sqr();
    let mut series = NormalizationSeries::new(family, t)?;

    if t == 0.0 {
        return Ok(CoherentState {
            family: *family,
            alpha,
            truncation: 0,
            log_magnitude: vec![0.0],
            phase: vec![0.0],
            norm_residual: 0.0,
        });
    }

    // |c_n|² = tⁿ/(ρ_n 𝒩); collect terms until the tail bound is far below
    // `tol` relative to the partial sum.
    let ln_tol = tol.ln();
    let mut log_terms: Vec<f64> = Vec::new();
    let mut partial = LogSum::new();
    let mut block = 16usize;
    'outer: loop {
        for _ in 0..block {
            let Some(term) = series.next() else {
                return Err(Error::domain(format!(
                    "{} state at |alpha|^2 = {t} needs too many Fock components",
                    family.id()
                )));
            };
            log_terms.push(term.log_term);
            partial.add(term.log_term);
            if term.log_tail_bound - partial.ln() < ln_tol - 30.0 {
                break 'outer;
            }
        }
        block *= 2;
    }

    // suffix[n] = ln Σ_{m≥n} term_m
    let mut suffix = vec![f64::NEG_INFINITY; log_terms.len() + 1];
    let mut acc = LogSum::new();
    for (i, &lt) in log_terms.iter().enumerate().rev() {
        acc.add(lt);
        suffix[i] = acc.ln();
    }
    let ln_norm = suffix[0];

    let mut truncation = log_terms.len() - 1;
    for n in 0..log_terms.len() {
        if suffix[n + 1] - ln_norm < ln_tol {
            truncation = n;
            break;
        }
    }
    let norm_residual = (suffix[truncation + 1] - ln_norm).exp();

    let half_ln_norm = 0.5 * ln_norm;
    let arg = alpha.arg();
    let log_magnitude = log_terms[..=truncation]
        .iter()
        .map(|&lt| 0.5 * lt - half_ln_norm)
        .collect();
    let phase = (0..=truncation).map(|n| n as f64 * arg).collect();

    Ok(CoherentState {
        family: *family,
        alpha,
        truncation,
        log_magnitude,
        phase,
        norm_residual,
    })
}

/// `⟨s1|s2⟩ = Σ c̄_n(s1) c_n(s2)` over the common truncation.
pub fn overlap(s1: &CoherentState, s2: &CoherentState) -> Result<Complex64> {
    if s1.family != s2.family {
        return Err(Error::FamilyMismatch(format!(
            "cannot overlap a {} state ({:?}) with a {} state ({:?})",
            s1.family.id(),
            s1.family.params(),
            s2.family.id(),
            s2.family.params()
        )));
    }
    let common = s1.truncation.min(s2.truncation);
    let mut re = 0.0;
    let mut im = 0.0;
    for n in 0..=common {
        let mag = (s1.log_magnitude[n] + s2.log_magnitude[n]).exp();
        let ph = s2.phase[n] - s1.phase[n];
        re += mag * ph.cos();
        im += mag * ph.sin();
    }
    Ok(Complex64::new(re, im))
}
