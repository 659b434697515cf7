//! Radix-2 complex FFT, enough for the zero-padded convolutions in `curvature`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

pub(crate) struct Fft {
    n: usize,
    twiddles: Vec<Complex64>,
}

impl Fft {
    /// `n` must be a power of two.
    pub(crate) fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let twiddles = (0..n / 2).map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64)).collect();
        Fft { n, twiddles }
    }

    /// In-place transform. The inverse is unnormalized.
    pub(crate) fn run(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        debug_assert_eq!(data.len(), n);
        let bits = n.trailing_zeros();
        if bits == 0 {
            return;
        }
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for j in 0..len / 2 {
                    let w = self.twiddles[j * stride];
                    let w = if inverse { w.conj() } else { w };
                    let u = data[start + j];
                    let v = data[start + j + len / 2] * w;
                    data[start + j] = u + v;
                    data[start + j + len / 2] = u - v;
                }
            }
            len <<= 1;
        }
    }
}

/// In-place transform of an `m x m x m` cube stored with the last index fastest.
pub(crate) fn fft3(data: &mut [Complex64], m: usize, inverse: bool) {
    let plan = Fft::new(m);
    let mut line = alloc::vec![Complex64::new(0.0, 0.0); m];
    for axis in 0..3 {
        let stride = m.pow(2 - axis as u32);
        for base in 0..m * m * m {
            // visit each line once, from its first element
            if !(base / stride).is_multiple_of(m) {
                continue;
            }
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = data[base + i * stride];
            }
            plan.run(&mut line, inverse);
            for (i, v) in line.iter().enumerate() {
                data[base + i * stride] = *v;
            }
        }
    }
}
