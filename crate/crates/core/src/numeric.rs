//! Small numerical helpers shared across modules.

use num_complex::Complex64;

/// Default relative tolerance for float comparisons.
pub const REL_TOL: f64 = 1e-12;
/// Absolute floor added to the relative tolerance.
pub const ABS_FLOOR: f64 = 1e-15;

/// Neumaier-compensated accumulator. The result does not depend on how the
/// input is chunked, up to the compensation error.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.extend(iter);
    acc.value()
}

/// Compensated sum of complex numbers (real and imaginary parts separately).
pub fn compensated_sum_c<I: IntoIterator<Item = Complex64>>(iter: I) -> Complex64 {
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for z in iter {
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.value(), im.value())
}

/// `|a - b|` scaled by `max(|a|, |b|, 1)`.
pub fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()) + ABS_FLOOR
}

pub fn close_c(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= REL_TOL * a.norm().max(b.norm()) + ABS_FLOOR
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
        assert_ne!(xs.iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn chunking_does_not_matter() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64 * 1e-3 + 1e8).collect();
        let whole = compensated_sum(xs.iter().copied());
        let parts: Vec<f64> = xs.chunks(37).map(|c| compensated_sum(c.iter().copied())).collect();
        assert!((whole - compensated_sum(parts)).abs() <= 1e-6);
    }

    #[test]
    fn closeness() {
        assert!(close(1.0, 1.0 + 1e-13));
        assert!(!close(1.0, 1.0 + 1e-10));
        assert!(close(0.0, 1e-16));
        assert!(close_c(Complex64::new(0.0, 1.0), Complex64::new(0.0, 1.0)));
    }
}
