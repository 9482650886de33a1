//! Complex FFT plans.
//!
//! Radix-2 iterative transform for power-of-two lengths and Bluestein's
//! chirp-z algorithm for every other length. Plans are immutable after
//! construction and can be shared across threads.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `X_k = Σ x_j e^{-2πi jk/n}`
    Forward,
    /// `x_j = Σ X_k e^{+2πi jk/n}` (unnormalized)
    Inverse,
}

#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Radix2 {
        // e^{-2πi k/n} for k < n/2
        twiddles: Vec<Complex64>,
        bitrev: Vec<u32>,
    },
    Bluestein(Box<Bluestein>),
}

#[derive(Debug, Clone)]
struct Bluestein {
    inner: FftPlan,
    // e^{-πi k²/n}
    chirp: Vec<Complex64>,
    // forward transform of the conjugate chirp, zero padded and wrapped
    filter: Vec<Complex64>,
}

fn unit(angle: f64) -> Complex64 {
    Complex64::new(angle.cos(), angle.sin())
}

impl FftPlan {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "FFT length must be positive");
        if len.is_power_of_two() {
            let half = len / 2;
            let twiddles = (0..half).map(|k| unit(-2.0 * PI * k as f64 / len as f64)).collect();
            let bits = len.trailing_zeros();
            let bitrev = (0..len as u32).map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (32 - bits) }).collect();
            Self { len, kind: Kind::Radix2 { twiddles, bitrev } }
        } else {
            let m = (2 * len - 1).next_power_of_two();
            let inner = FftPlan::new(m);
            // k² mod 2n keeps the chirp angle small and exact
            let chirp: Vec<Complex64> = (0..len)
                .map(|k| {
                    let k2 = (k as u128 * k as u128) % (2 * len as u128);
                    unit(-PI * k2 as f64 / len as f64)
                })
                .collect();
            let mut filter = vec![Complex64::new(0.0, 0.0); m];
            filter[0] = chirp[0].conj();
            for k in 1..len {
                filter[k] = chirp[k].conj();
                filter[m - k] = chirp[k].conj();
            }
            inner.process(&mut filter, Direction::Forward);
            Self { len, kind: Kind::Bluestein(Box::new(Bluestein { inner, chirp, filter })) }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place unnormalized transform.
    pub fn process(&self, data: &mut [Complex64], dir: Direction) {
        assert_eq!(data.len(), self.len, "FFT buffer length mismatch");
        match &self.kind {
            Kind::Radix2 { twiddles, bitrev } => radix2(data, twiddles, bitrev, dir),
            Kind::Bluestein(b) => b.process(data, dir),
        }
    }
}

fn radix2(data: &mut [Complex64], twiddles: &[Complex64], bitrev: &[u32], dir: Direction) {
    let n = data.len();
    for i in 0..n {
        let j = bitrev[i] as usize;
        if j > i {
            data.swap(i, j);
        }
    }
    let mut size = 2;
    while size <= n {
        let half = size / 2;
        let stride = n / size;
        for start in (0..n).step_by(size) {
            for k in 0..half {
                let mut w = twiddles[k * stride];
                if dir == Direction::Inverse {
                    w = w.conj();
                }
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        size *= 2;
    }
}

impl Bluestein {
    fn process(&self, data: &mut [Complex64], dir: Direction) {
        let n = data.len();
        let m = self.filter.len();
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        // inverse transform = conj(forward(conj(x)))
        let conj_io = dir == Direction::Inverse;
        for k in 0..n {
            let x = if conj_io { data[k].conj() } else { data[k] };
            work[k] = x * self.chirp[k];
        }
        self.inner.process(&mut work, Direction::Forward);
        for (w, h) in work.iter_mut().zip(&self.filter) {
            *w *= h;
        }
        self.inner.process(&mut work, Direction::Inverse);
        let scale = 1.0 / m as f64;
        for k in 0..n {
            let y = work[k] * self.chirp[k] * scale;
            data[k] = if conj_io { y.conj() } else { y };
        }
    }
}
