//! Compensated (Neumaier) floating-point accumulation.
//!
//! Prefix sums over up to ~10^7 terms must not lose small totals to
//! rounding, so every accumulation in this crate that feeds a reported
//! statistic goes through [`NeumaierSum`] rather than a bare `f64` sum.

/// Running sum carrying a Neumaier correction term.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Current compensated total.
    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator of terms.
pub fn sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut acc = NeumaierSum::new();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}
