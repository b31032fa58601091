//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{lit, Real};
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T> {
    pub value: T,
    pub abs_error: T,
    pub evaluations: usize,
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = (b - a) / lit(2.0);
    let mid = (a + b) / lit(2.0);
    let fc = f(mid);
    let mut resk = fc * lit(WGK[7]);
    let mut resg = fc * lit(WG[3]);
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let dx = half * lit(x);
        let s = f(mid - dx) + f(mid + dx);
        resk += s * lit(WGK[j]);
        if j % 2 == 1 {
            resg += s * lit(WG[j / 2]);
        }
    }
    (resk * half, ((resk - resg) * half).abs())
}

/// Integrates `f` over `[a, b]` until the estimated absolute error is below
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(
    f: F,
    a: T,
    b: T,
    abs_tol: T,
    rel_tol: T,
) -> Result<Quadrature<T>> {
    integrate_panels(f, &[a, b], abs_tol, rel_tol, 200_000)
}

/// Like [`integrate`], but starts from the panels delimited by
/// `breakpoints` (sorted ascending). Useful for oscillatory integrands whose
/// lobes are known in advance.
pub fn integrate_panels<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    breakpoints: &[T],
    abs_tol: T,
    rel_tol: T,
    max_segments: usize,
) -> Result<Quadrature<T>> {
    if breakpoints.len() < 2 {
        return Err(Error::numeric("quadrature", "need at least two breakpoints"));
    }
    let mut heap = BinaryHeap::with_capacity(breakpoints.len() * 2);
    let mut value = T::zero();
    let mut error = T::zero();
    for w in breakpoints.windows(2) {
        let (v, e) = kronrod(&mut f, w[0], w[1]);
        value += v;
        error += e;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    let mut evaluations = 15 * heap.len();
    // Error estimates below rounding level are not worth subdividing.
    let floor = T::epsilon() * lit(50.0);
    loop {
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target {
            break;
        }
        if !value.is_finite() {
            return Err(Error::numeric("quadrature", "non-finite integrand"));
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        if worst.error <= floor * worst.value.abs() || heap.len() >= max_segments {
            if error <= target * lit(10.0) || worst.error <= floor * value.abs() {
                heap.push(worst);
                break;
            }
            return Err(Error::numeric(
                "quadrature",
                format!(
                    "no convergence: error estimate {:e} above target {:e}",
                    super::to_f64(error),
                    super::to_f64(target)
                ),
            ));
        }
        let mid = (worst.a + worst.b) / lit(2.0);
        let (v1, e1) = kronrod(&mut f, worst.a, mid);
        let (v2, e2) = kronrod(&mut f, mid, worst.b);
        evaluations += 30;
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Resum to shed drift from the incremental updates.
    let value = heap.iter().map(|s| s.value).sum();
    let abs_error = heap.iter().map(|s| s.error).sum();
    Ok(Quadrature {
        value,
        abs_error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 1e-14, 1e-14).unwrap();
        assert!((q.value - 0.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_tail() {
        let q = integrate(
            |x: f64| (-x * x / 2.0).exp(),
            0.0,
            40.0,
            1e-14,
            1e-13,
        )
        .unwrap();
        let want = (std::f64::consts::PI / 2.0).sqrt();
        assert!((q.value - want).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_with_panels() {
        let bps: Vec<f64> = (0..=100).map(|k| k as f64 * std::f64::consts::PI).collect();
        let q = integrate_panels(|x: f64| x.sin().powi(2), &bps, 1e-12, 1e-13, 10_000).unwrap();
        assert!((q.value - 50.0 * std::f64::consts::PI).abs() < 1e-9);
    }
}
