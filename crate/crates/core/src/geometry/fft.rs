//! Cached 3D FFTs over `Array3<Complex64>`.
//!
//! Forward transforms carry the 1/N normalization, so coefficients are the
//! amplitudes in `f(r) = sum_k fhat(k) exp(i k.r)` and `ifft3(fft3(f)) = f`.

use std::sync::{Arc, LazyLock, Mutex};

use ndarray::{Array3, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

static PLANNER: LazyLock<Mutex<FftPlanner<f64>>> =
    LazyLock::new(|| Mutex::new(FftPlanner::new()));

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.lock().unwrap().plan_fft(len, direction)
}

fn transform_axes(data: &mut Array3<Complex64>, direction: FftDirection) {
    for axis in 0..3 {
        let len = data.shape()[axis];
        if len == 1 {
            continue;
        }
        let fft = plan(len, direction);
        let mut buf = vec![Complex64::ZERO; len];
        let mut scratch = vec![Complex64::ZERO; fft.get_inplace_scratch_len()];
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

/// Forward transform (analysis): returns coefficient amplitudes.
pub fn fft3(mut data: Array3<Complex64>) -> Array3<Complex64> {
    let n_total = data.len() as f64;
    transform_axes(&mut data, FftDirection::Forward);
    data.mapv_inplace(|z| z / n_total);
    data
}

/// Inverse transform (synthesis) of coefficient amplitudes.
pub fn ifft3(mut data: Array3<Complex64>) -> Array3<Complex64> {
    transform_axes(&mut data, FftDirection::Inverse);
    data
}
