//! Compensated summation for the direct transform paths.

use num_complex::Complex64;

/// Neumaier-compensated accumulator over complex values.
///
/// Real and imaginary parts carry independent compensation terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: f64,
    im: f64,
    re_err: f64,
    im_err: f64,
}

#[inline]
fn neumaier(sum: &mut f64, err: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *err += (*sum - t) + x;
    } else {
        *err += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_err, z.re);
        neumaier(&mut self.im, &mut self.im_err, z.im);
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re + self.re_err, self.im + self.im_err)
    }
}

impl Extend<Complex64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = Complex64>>(&mut self, iter: I) {
        for z in iter {
            self.add(z);
        }
    }
}

/// Compensated sum of an iterator of complex values.
pub fn sum_complex<I: IntoIterator<Item = Complex64>>(iter: I) -> Complex64 {
    let mut acc = CompensatedSum::new();
    acc.extend(iter);
    acc.total()
}

/// Compensated sum of real values.
pub fn sum_real<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut s = 0.0;
    let mut e = 0.0;
    for x in iter {
        neumaier(&mut s, &mut e, x);
    }
    s + e
}

/// `max` that lets NaN through, so a NaN residual cannot pass a check.
pub fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
