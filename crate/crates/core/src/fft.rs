//! Radix-2 complex FFT.
//!
//! Every Hilbert space in this crate has dimension N = 2^k, so a plain
//! power-of-two Cooley-Tukey transform covers all uses. Transforms are
//! unnormalized: `forward` applies the kernel exp(-2*pi*i*m*n/N), `inverse`
//! applies exp(+2*pi*i*m*n/N). Callers apply 1/sqrt(N) or 1/N as needed.

use num_complex::Complex;

use crate::scalar::{phase, Scalar};

/// In-place forward transform, kernel exp(-2*pi*i*m*n/N).
pub fn forward<T: Scalar>(data: &mut [Complex<T>]) {
    transform(data, true);
}

/// In-place inverse transform, kernel exp(+2*pi*i*m*n/N). Not scaled.
pub fn inverse<T: Scalar>(data: &mut [Complex<T>]) {
    transform(data, false);
}

fn transform<T: Scalar>(data: &mut [Complex<T>], forward: bool) {
    let n = data.len();
    assert!(n.is_power_of_two(), "FFT length must be a power of two");
    if n < 2 {
        return;
    }

    // bit-reversal permutation
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }

    let sign = if forward { -T::one() } else { T::one() };
    let mut len = 2;
    while len <= n {
        let ang = sign * T::cast(2.0) * T::PI() / T::from_index(len);
        let wlen = phase(ang);
        for start in (0..n).step_by(len) {
            let mut w = Complex::new(T::one(), T::zero());
            for off in 0..len / 2 {
                let u = data[start + off];
                let v = data[start + off + len / 2] * w;
                data[start + off] = u + v;
                data[start + off + len / 2] = u - v;
                w *= wlen;
            }
        }
        len <<= 1;
    }
}
