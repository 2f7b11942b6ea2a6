//! Compensated accumulation helpers.

use num_complex::Complex64;

/// Neumaier-compensated running sum of `f64` terms.
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
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl core::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of complex terms, real and imaginary parts accumulated separately.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Arithmetic mean and population standard deviation of a slice.
///
/// Returns `None` for an empty slice.
pub fn mean_and_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().copied().collect::<CompensatedSum>().value() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).collect::<CompensatedSum>().value() / n;
    Some((mean, libm::sqrt(var)))
}

/// Double-double value `hi + lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    /// `x / (2π)` carried to roughly 32 significant digits.
    pub fn div_two_pi(x: f64) -> Self {
        const INV_TWO_PI_HI: f64 = 0.159_154_943_091_895_35;
        const INV_TWO_PI_LO: f64 = -9.839_338_337_591_243e-18;
        let hi = x * INV_TWO_PI_HI;
        let lo = libm::fma(x, INV_TWO_PI_HI, -hi) + x * INV_TWO_PI_LO;
        let s = hi + lo;
        Self { hi: s, lo: lo - (s - hi) }
    }
}

/// `(a · b) mod 2π` in `[0, 2π)`, with the product and the reduction carried
/// in double-double arithmetic so large `a` keeps its low-order bits.
pub(crate) fn mul_mod_two_pi(a: DoubleDouble, b: f64) -> f64 {
    const TWO_PI_HI: f64 = core::f64::consts::TAU;
    const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;
    let p = a.hi * b;
    let p_err = libm::fma(a.hi, b, -p) + a.lo * b;
    let q = libm::floor((p + p_err) / TWO_PI_HI);
    let qh = q * TWO_PI_HI;
    let qh_err = libm::fma(q, TWO_PI_HI, -qh);
    let r = ((p - qh) - qh_err) + p_err - q * TWO_PI_LO;
    if r < 0.0 {
        r + TWO_PI_HI
    } else if r >= TWO_PI_HI {
        r - TWO_PI_HI
    } else {
        r
    }
}
