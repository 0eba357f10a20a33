//! Thread-local FFT plans and a small n-dimensional transform helper.

use std::cell::RefCell;
use std::sync::Arc;

use ndarray::{Array3, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// Unnormalized FFT along every axis of length > 1.
/// Forward uses kernel `exp(-i k x)`, inverse `exp(+i k x)`.
pub fn fft_nd(data: &mut Array3<Complex64>, direction: FftDirection) {
    for axis in 0..3 {
        let len = data.len_of(Axis(axis));
        if len <= 1 {
            continue;
        }
        let fft = plan(len, direction);
        let mut buf = vec![Complex64::default(); len];
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        for mut lane in data.lanes_mut(Axis(axis)) {
            for (b, v) in buf.iter_mut().zip(lane.iter()) {
                *b = *v;
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for (v, b) in lane.iter_mut().zip(buf.iter()) {
                *v = *b;
            }
        }
    }
}

/// Smallest 7-smooth integer >= `n` (rustfft is fastest on small prime factors).
pub fn next_fast_size(n: usize) -> usize {
    let mut m = n.max(2);
    loop {
        let mut r = m;
        for p in [2usize, 3, 5, 7] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_sizes_are_7_smooth_and_minimal() {
        assert_eq!(next_fast_size(66), 70);
        assert_eq!(next_fast_size(64), 64);
        assert_eq!(next_fast_size(97), 98);
    }

    #[test]
    fn forward_then_inverse_scales_by_len() {
        let mut data = Array3::<Complex64>::zeros((4, 4, 1));
        data[[1, 2, 0]] = Complex64::new(1.0, -0.5);
        let orig = data.clone();
        fft_nd(&mut data, FftDirection::Forward);
        fft_nd(&mut data, FftDirection::Inverse);
        let scale = 16.0;
        for (a, b) in data.iter().zip(orig.iter()) {
            assert!((a - b * scale).norm() < 1e-12);
        }
    }
}
