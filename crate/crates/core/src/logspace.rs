//! Log-domain accumulation.

/// Running `ln Σ exp(xᵢ)` with a single rescaling pivot.
///
/// Terms are folded in the order they are added, so identical input
/// sequences give bit-identical sums.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    pivot: f64,
    scaled: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            pivot: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    pub fn add(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term > self.pivot {
            self.scaled = self.scaled * (self.pivot - log_term).exp() + 1.0;
            self.pivot = log_term;
        } else {
            self.scaled += (log_term - self.pivot).exp();
        }
    }

    /// Logarithm of the accumulated sum; `-inf` when nothing was added.
    pub fn ln(&self) -> f64 {
        if self.scaled == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.pivot + self.scaled.ln()
        }
    }

    /// Largest single term seen so far.
    pub fn max_term(&self) -> f64 {
        self.pivot
    }
}

/// `ln(eᵃ + eᵇ)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(1 + eˣ)`.
pub fn softplus(x: f64) -> f64 {
    if x > 36.0 {
        x + (-x).exp()
    } else if x < -36.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

/// Relative deviation `|exp(a − b) − 1|` of two log-domain quantities.
pub fn rel_diff_log(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).exp_m1().abs()
}
