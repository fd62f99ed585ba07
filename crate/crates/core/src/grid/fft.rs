use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::Real;

type PlanKey = (TypeId, usize, bool);
type PlanCache = Mutex<HashMap<PlanKey, Box<dyn Any + Send + Sync>>>;

/// Cached FFT plan of length `len`.
pub(crate) fn plan<T: Real>(len: usize, direction: FftDirection) -> Arc<dyn Fft<T>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let key = (TypeId::of::<T>(), len, direction == FftDirection::Inverse);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(entry) = map.get(&key) {
        if let Some(p) = entry.downcast_ref::<Arc<dyn Fft<T>>>() {
            return Arc::clone(p);
        }
    }
    let p = FftPlanner::<T>::new().plan_fft(len, direction);
    map.insert(key, Box::new(Arc::clone(&p)));
    p
}

/// Unnormalized in-place transform of one `n`-per-axis block in `dim` dimensions.
pub(crate) fn transform_block<T: Real>(data: &mut [Complex<T>], n: usize, dim: usize, direction: FftDirection) {
    let fft = plan::<T>(n, direction);
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(data, &mut scratch);
    if dim == 2 {
        transpose_square(data, n);
        fft.process_with_scratch(data, &mut scratch);
        transpose_square(data, n);
    }
}

fn transpose_square<T: Copy>(data: &mut [T], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Circular convolution of two real periodic sequences of equal length.
pub(crate) fn circular_convolve<T: Real>(a: &[T], b: &[T], n: usize, dim: usize) -> Vec<T> {
    let mut fa: Vec<Complex<T>> = a.iter().map(|&x| Complex::new(x, T::zero())).collect();
    let mut fb: Vec<Complex<T>> = b.iter().map(|&x| Complex::new(x, T::zero())).collect();
    transform_block(&mut fa, n, dim, FftDirection::Forward);
    transform_block(&mut fb, n, dim, FftDirection::Forward);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    transform_block(&mut fa, n, dim, FftDirection::Inverse);
    let scale = T::one() / T::from_count(fa.len());
    fa.into_iter().map(|z| z.re * scale).collect()
}
