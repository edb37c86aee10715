//! Numerical check of the moment identities `∫ tⁿ Ω(t) dt = ρ_n`.
//!
//! Reports serialise three ways, all with the same record keys
//! (`family, params, n, log_rho, log_quad, rel_err, pass`, then the
//! quadrature diagnostics `transform, quad_rel_err, evaluations, converged`):
//!
//! - structured text: a `summary` line, then one `key=value` record per line;
//! - CSV with a fixed header;
//! - JSON.
//!
//! Reals are written with 17 significant digits, so every format round-trips.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{make_family, FamilyId, FamilyParams, FamilySpec};
use crate::measures::measure_for;
use crate::quadrature::{integrate_moment, Transform, MAX_TOLERANCE, MIN_TOLERANCE};

/// Tightest tolerance [`verify_moments`] accepts.
pub const MIN_REPORT_TOLERANCE: f64 = 1e-12;

/// Header row of [`VerificationReport::to_csv`].
pub const CSV_HEADER: &str =
    "family,params,n,log_rho,log_quad,rel_err,pass,transform,quad_rel_err,evaluations,converged";

/// Result for a single `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub n: usize,
    #[serde(rename = "log_rho")]
    pub log_rho_closed: f64,
    #[serde(rename = "log_quad", with = "real")]
    pub log_moment_quad: f64,
    #[serde(rename = "rel_err", with = "real")]
    pub rel_error: f64,
    #[serde(rename = "pass")]
    pub passed: bool,
    pub transform: Transform,
    #[serde(rename = "quad_rel_err", with = "real")]
    pub quad_rel_error: f64,
    pub evaluations: usize,
    /// `false` when the quadrature stopped short of its own target; the
    /// entry then carries its best estimate.
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ReportDoc", into = "ReportDoc")]
pub struct VerificationReport {
    pub family: FamilySpec,
    pub n_max: usize,
    pub tolerance: f64,
    pub per_n: Vec<MomentCheck>,
    pub max_rel_error: f64,
    pub passed: bool,
    /// Not serialised, and ignored by `==`.
    pub wall_time: Duration,
}

impl PartialEq for VerificationReport {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
            && self.n_max == other.n_max
            && self.tolerance == other.tolerance
            && self.per_n == other.per_n
            && self.max_rel_error == other.max_rel_error
            && self.passed == other.passed
    }
}

#[derive(Serialize, Deserialize)]
struct ReportDoc {
    family: FamilyId,
    params: FamilyParams,
    n_max: usize,
    tolerance: f64,
    #[serde(rename = "max_rel_err", with = "real")]
    max_rel_error: f64,
    passed: bool,
    records: Vec<MomentCheck>,
}

impl From<VerificationReport> for ReportDoc {
    fn from(r: VerificationReport) -> Self {
        ReportDoc {
            family: r.family.id(),
            params: r.family.params(),
            n_max: r.n_max,
            tolerance: r.tolerance,
            max_rel_error: r.max_rel_error,
            passed: r.passed,
            records: r.per_n,
        }
    }
}

impl TryFrom<ReportDoc> for VerificationReport {
    type Error = Error;

    fn try_from(d: ReportDoc) -> Result<Self> {
        let report = VerificationReport {
            family: make_family(d.family, &d.params)?,
            n_max: d.n_max,
            tolerance: d.tolerance,
            per_n: d.records,
            max_rel_error: d.max_rel_error,
            passed: d.passed,
            wall_time: Duration::ZERO,
        };
        report.check_consistency()?;
        Ok(report)
    }
}

/// Outcome of [`verify_positivity`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityCheck {
    pub positive: bool,
    pub points_checked: usize,
    /// First grid point where `ln Ω` was not finite.
    pub first_failure: Option<f64>,
}

/// Integrate `tⁿ Ω(t)` for `n = 0..=n_max` and compare with `ρ_n`.
///
/// Each quadrature targets 1% of `tolerance`. A quadrature that fails to
/// converge yields a failed entry, not an error.
pub fn verify_moments(
    family: &FamilySpec,
    n_max: usize,
    tolerance: f64,
) -> Result<VerificationReport> {
    if tolerance.is_nan() || tolerance < MIN_REPORT_TOLERANCE {
        return Err(Error::ToleranceInfeasible(tolerance));
    }
    if n_max > u32::MAX as usize {
        return Err(Error::domain(format!("n_max = {n_max} is too large")));
    }
    let start = Instant::now();
    let measure = measure_for(family);
    let quad_tol = (tolerance * 0.01).clamp(MIN_TOLERANCE, MAX_TOLERANCE);

    let per_n: Vec<MomentCheck> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let log_rho = family.log_rho_at(n as u64);
            let (quad, converged) = match integrate_moment(&measure, n as u32, quad_tol) {
                Ok(q) => (Some(q), true),
                Err(Error::NonConvergence { best }) => (Some(best), false),
                Err(_) => (None, false),
            };
            let (log_quad, transform, quad_rel_error, evaluations) = match quad {
                Some(q) => (
                    q.log_value,
                    q.transform_used,
                    q.rel_error_estimate,
                    q.evaluations,
                ),
                None => (f64::NAN, Transform::Plain, f64::INFINITY, 0),
            };
            let rel_error = relative_error(log_quad, log_rho);
            MomentCheck {
                n,
                log_rho_closed: log_rho,
                log_moment_quad: log_quad,
                rel_error,
                passed: rel_error <= tolerance,
                transform,
                quad_rel_error,
                evaluations,
                converged,
            }
        })
        .collect();

    let max_rel_error = per_n.iter().map(|c| c.rel_error).fold(0.0, f64::max);
    Ok(VerificationReport {
        family: *family,
        n_max,
        tolerance,
        passed: max_rel_error <= tolerance,
        max_rel_error,
        per_n,
        wall_time: start.elapsed(),
    })
}

/// `|exp(a − b) − 1|`, infinite when either side is not finite.
fn relative_error(log_quad: f64, log_rho: f64) -> f64 {
    if log_quad.is_finite() && log_rho.is_finite() {
        (log_quad - log_rho).exp_m1().abs()
    } else {
        f64::INFINITY
    }
}

/// Check that `ln Ω` is finite on a log-spaced grid over the support.
pub fn verify_positivity(family: &FamilySpec, grid_size: usize) -> Result<PositivityCheck> {
    let measure = measure_for(family);
    let grid = measure.log_spaced_grid(grid_size)?;
    let first_failure = grid
        .iter()
        .copied()
        .find(|&t| !measure.log_density(t).map(f64::is_finite).unwrap_or(false));
    Ok(PositivityCheck {
        positive: first_failure.is_none(),
        points_checked: grid.len(),
        first_failure,
    })
}

impl VerificationReport {
    fn check_consistency(&self) -> Result<()> {
        let ordered = self.per_n.iter().enumerate().all(|(i, c)| c.n == i);
        if !ordered || self.per_n.len() != self.n_max + 1 {
            return Err(Error::Parse(format!(
                "report must hold records n = 0..={} in order",
                self.n_max
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Structured text: a summary line followed by one record per `n`.
    pub fn to_records(&self) -> String {
        let family = self.family.id();
        let params = format_params(&self.family);
        let mut out = format!(
            "summary family={family} params={params} n_max={} tolerance={} max_rel_err={} passed={}\n",
            self.n_max,
            real_str(self.tolerance),
            real_str(self.max_rel_error),
            self.passed
        );
        for c in &self.per_n {
            let _ = writeln!(
                out,
                "family={family} params={params} n={} log_rho={} log_quad={} rel_err={} pass={} transform={} quad_rel_err={} evaluations={} converged={}",
                c.n,
                real_str(c.log_rho_closed),
                real_str(c.log_moment_quad),
                real_str(c.rel_error),
                c.passed,
                c.transform.name(),
                real_str(c.quad_rel_error),
                c.evaluations,
                c.converged
            );
        }
        out
    }

    pub fn from_records(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let head = lines
            .next()
            .ok_or_else(|| Error::Parse("empty report".into()))?;
        let head = head
            .strip_prefix("summary ")
            .ok_or_else(|| Error::Parse("report must start with a summary line".into()))?;
        let summary = Fields::parse(
            head,
            &[
                "family",
                "params",
                "n_max",
                "tolerance",
                "max_rel_err",
                "passed",
            ],
        )?;
        let family = parse_family(summary.get(0), summary.get(1))?;
        let per_n = lines
            .map(|line| {
                let f = Fields::parse(
                    line,
                    &[
                        "family",
                        "params",
                        "n",
                        "log_rho",
                        "log_quad",
                        "rel_err",
                        "pass",
                        "transform",
                        "quad_rel_err",
                        "evaluations",
                        "converged",
                    ],
                )?;
                if parse_family(f.get(0), f.get(1))? != family {
                    return Err(Error::Parse(format!("record for another family: {line}")));
                }
                record_from(&f.values[2..])
            })
            .collect::<Result<Vec<_>>>()?;
        let report = VerificationReport {
            family,
            n_max: parse_value(summary.get(2), "n_max")?,
            tolerance: parse_value(summary.get(3), "tolerance")?,
            max_rel_error: parse_value(summary.get(4), "max_rel_err")?,
            passed: parse_value(summary.get(5), "passed")?,
            per_n,
            wall_time: Duration::ZERO,
        };
        report.check_consistency()?;
        Ok(report)
    }

    /// One row per `n` under [`CSV_HEADER`].
    pub fn to_csv(&self) -> String {
        let family = self.family.id();
        let params = format_params(&self.family);
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for c in &self.per_n {
            let _ = writeln!(
                out,
                "{family},{params},{},{},{},{},{},{},{},{},{}",
                c.n,
                real_str(c.log_rho_closed),
                real_str(c.log_moment_quad),
                real_str(c.rel_error),
                c.passed,
                c.transform.name(),
                real_str(c.quad_rel_error),
                c.evaluations,
                c.converged
            );
        }
        out
    }

    /// Rebuild a report from CSV; `tolerance` is not stored in the rows.
    pub fn from_csv(s: &str, tolerance: f64) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some(CSV_HEADER) {
            return Err(Error::Parse("missing or unexpected CSV header".into()));
        }
        let mut family = None;
        let mut per_n = Vec::new();
        for line in lines {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 11 {
                return Err(Error::Parse(format!("expected 11 columns: {line}")));
            }
            let f = parse_family(cols[0], cols[1])?;
            if *family.get_or_insert(f) != f {
                return Err(Error::Parse(format!("record for another family: {line}")));
            }
            per_n.push(record_from(&cols[2..])?);
        }
        let family = family.ok_or_else(|| Error::Parse("CSV report has no rows".into()))?;
        let max_rel_error = per_n.iter().map(|c| c.rel_error).fold(0.0, f64::max);
        let report = VerificationReport {
            family,
            n_max: per_n.len() - 1,
            tolerance,
            passed: max_rel_error <= tolerance,
            max_rel_error,
            per_n,
            wall_time: Duration::ZERO,
        };
        report.check_consistency()?;
        Ok(report)
    }
}

/// `{:.16e}`: 17 significant digits, locale-free.
pub(crate) fn real_str(x: f64) -> String {
    format!("{x:.16e}")
}

/// `tau:…;gamma:…` in parameter-name order, or `none`.
fn format_params(family: &FamilySpec) -> String {
    let list = family.param_list();
    if list.is_empty() {
        return "none".into();
    }
    list.iter()
        .map(|(k, v)| format!("{k}:{}", real_str(*v)))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_family(id: &str, params: &str) -> Result<FamilySpec> {
    let id = FamilyId::from_str(id)?;
    let mut p = FamilyParams::default();
    if params != "none" {
        for item in params.split(';') {
            let (k, v) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("bad parameter entry '{item}'")))?;
            let v: f64 = parse_value(v, k)?;
            match k {
                "tau" => p.tau = Some(v),
                "j" => p.j = Some(v),
                "gamma" => p.gamma = Some(v),
                "epsilon" => p.epsilon = Some(v),
                _ => return Err(Error::Parse(format!("unknown parameter '{k}'"))),
            }
        }
    }
    make_family(id, &p)
}

fn parse_value<T: FromStr>(s: &str, key: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("bad value for {key}: '{s}'")))
}

/// Values from `n` through `converged`, in record order.
fn record_from(v: &[&str]) -> Result<MomentCheck> {
    Ok(MomentCheck {
        n: parse_value(v[0], "n")?,
        log_rho_closed: parse_value(v[1], "log_rho")?,
        log_moment_quad: parse_value(v[2], "log_quad")?,
        rel_error: parse_value(v[3], "rel_err")?,
        passed: parse_value(v[4], "pass")?,
        transform: Transform::from_str(v[5]).map_err(|e| Error::Parse(e.to_string()))?,
        quad_rel_error: parse_value(v[6], "quad_rel_err")?,
        evaluations: parse_value(v[7], "evaluations")?,
        converged: parse_value(v[8], "converged")?,
    })
}

/// `key=value` tokens that must appear in a fixed order.
struct Fields<'a> {
    values: Vec<&'a str>,
}

impl<'a> Fields<'a> {
    fn parse(line: &'a str, keys: &[&str]) -> Result<Self> {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != keys.len() {
            return Err(Error::Parse(format!(
                "expected {} fields, found {}: {line}",
                keys.len(),
                tokens.len()
            )));
        }
        let values = tokens
            .iter()
            .zip(keys)
            .map(|(tok, key)| match tok.split_once('=') {
                Some((k, v)) if k == *key => Ok(v),
                _ => Err(Error::Parse(format!(
                    "expected field '{key}', found '{tok}'"
                ))),
            })
            .collect::<Result<_>>()?;
        Ok(Fields { values })
    }

    fn get(&self, i: usize) -> &'a str {
        self.values[i]
    }
}

/// Reals as JSON numbers, with non-finite values as the strings `inf`,
/// `-inf` and `NaN`.
mod real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&x.to_string())
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => t
                .parse()
                .map_err(|_| serde::de::Error::custom(format!("not a real: '{t}'"))),
        }
    }
}
