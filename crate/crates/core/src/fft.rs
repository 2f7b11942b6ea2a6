//! In-place radix-2 discrete Fourier transform.
//!
//! `forward` computes `X_q = Σ_j x_j e^{-2πi qj/n}` and `inverse` the same sum
//! with `e^{+2πi qj/n}`; neither is normalised.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid_input, Result};

#[derive(Debug, Clone)]
pub struct Radix2Fft {
    n: usize,
    bitrev: Vec<u32>,
    // Twiddles for all stages back to back: stage with half-length h uses
    // entries [h - 1, 2h - 1), holding e^{∓iπk/h}.
    forward_tw: Vec<Complex64>,
    inverse_tw: Vec<Complex64>,
}

impl Radix2Fft {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(invalid_input!("FFT length {n} is not a power of two"));
        }
        let bits = n.trailing_zeros();
        let bitrev = (0..n as u32).map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (32 - bits) }).collect();
        let mut forward_tw = Vec::with_capacity(n.saturating_sub(1));
        let mut h = 1;
        while h < n {
            for k in 0..h {
                let angle = -core::f64::consts::PI * k as f64 / h as f64;
                let (s, c) = libm::sincos(angle);
                forward_tw.push(Complex64::new(c, s));
            }
            h *= 2;
        }
        let inverse_tw = forward_tw.iter().map(|w| w.conj()).collect();
        Ok(Self { n, bitrev, forward_tw, inverse_tw })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.bit_reverse(data);
        self.dit(data, &self.forward_tw);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.bit_reverse(data);
        self.dit(data, &self.inverse_tw);
    }

    /// Forward transform leaving the spectrum in bit-reversed bin order.
    pub fn forward_scrambled(&self, data: &mut [Complex64]) {
        self.dif(data, &self.forward_tw);
    }

    /// Inverse transform of a spectrum given in bit-reversed bin order.
    pub fn inverse_scrambled(&self, data: &mut [Complex64]) {
        self.dit(data, &self.inverse_tw);
    }

    /// Position of natural bin `q` in a scrambled spectrum.
    pub fn scrambled_index(&self, q: usize) -> usize {
        self.bitrev[q] as usize
    }

    fn bit_reverse(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.n, "FFT buffer length mismatch");
        for i in 0..self.n {
            let j = self.bitrev[i] as usize;
            if i < j {
                data.swap(i, j);
            }
        }
    }

    // bit-reversed input, natural output
    fn dit(&self, data: &mut [Complex64], tw: &[Complex64]) {
        assert_eq!(data.len(), self.n, "FFT buffer length mismatch");
        if self.n >= 2 {
            for pair in data.chunks_exact_mut(2) {
                let (a, b) = (pair[0], pair[1]);
                pair[0] = a + b;
                pair[1] = a - b;
            }
        }
        let mut h = 2;
        while h < self.n {
            let w = &tw[h - 1..2 * h - 1];
            for block in data.chunks_exact_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for ((a, b), &wk) in lo.iter_mut().zip(hi.iter_mut()).zip(w) {
                    let t = *b * wk;
                    *b = *a - t;
                    *a += t;
                }
            }
            h *= 2;
        }
    }

    // natural input, bit-reversed output
    fn dif(&self, data: &mut [Complex64], tw: &[Complex64]) {
        assert_eq!(data.len(), self.n, "FFT buffer length mismatch");
        let mut h = self.n / 2;
        while h >= 2 {
            let w = &tw[h - 1..2 * h - 1];
            for block in data.chunks_exact_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for ((a, b), &wk) in lo.iter_mut().zip(hi.iter_mut()).zip(w) {
                    let t = *a - *b;
                    *a += *b;
                    *b = t * wk;
                }
            }
            h /= 2;
        }
        if self.n >= 2 {
            for pair in data.chunks_exact_mut(2) {
                let (a, b) = (pair[0], pair[1]);
                pair[0] = a + b;
                pair[1] = a - b;
            }
        }
    }
}
