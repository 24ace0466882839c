//! Grid construction, deterministic parallel argmin and local refinement
//! shared by the path classes.

use std::f64::consts::TAU;

use rayon::prelude::*;

/// `n` evenly spaced angles on `[0, 2pi)`.
pub fn periodic_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

/// `n` evenly spaced values on `[lo, hi]`, both ends included. A single
/// point grid is `[lo]`.
pub fn closed_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` points on `[0, 2pi]` spaced `2pi/(n-1)` with the duplicate endpoint
/// dropped, giving `n - 1` distinct angles.
pub fn periodic_closed_grid(n: usize) -> Vec<f64> {
    let mut g = closed_grid(0.0, TAU, n.max(2));
    g.pop();
    g
}

/// `f(0), ..., f(count - 1)` evaluated in parallel, in index order.
pub fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(count: usize, f: F) -> Vec<T> {
    (0..count).into_par_iter().map(f).collect()
}

/// Evaluates `f` at every index in parallel and returns the index with the
/// smallest value. Ties go to the lowest index, so the result does not
/// depend on scheduling.
pub fn par_argmin<T, F>(count: usize, f: F) -> Option<(usize, f64, T)>
where
    T: Send,
    F: Fn(usize) -> Option<(f64, T)> + Sync + Send,
{
    let values: Vec<Option<(f64, T)>> = (0..count).into_par_iter().map(&f).collect();
    let mut best: Option<(usize, f64, T)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if let Some((len, payload)) = v {
            if len.is_finite() && best.as_ref().map_or(true, |b| len < b.1) {
                best = Some((i, len, payload));
            }
        }
    }
    best
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`. Points where
/// `f` is undefined count as `+inf`.
pub fn golden_section<F: FnMut(f64) -> Option<f64>>(mut f: F, lo: f64, hi: f64, iterations: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut eval = |x: f64| f(x).unwrap_or(f64::INFINITY);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    for _ in 0..iterations {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Search bounds of one refinement coordinate.
#[derive(Clone, Copy, Debug)]
pub struct RefineAxis {
    /// Half-width of the search window around the grid optimum.
    pub half_width: f64,
    /// Clamp to this range, or `None` for a periodic angle.
    pub bounds: Option<(f64, f64)>,
}

/// One round of coordinate-wise golden-section refinement. Only
/// improvements are kept, so the result is never worse than `x0`.
pub fn refine_coordinates<F: Fn(&[f64]) -> Option<f64>>(f: F, x0: &[f64], f0: f64, axes: &[RefineAxis]) -> (Vec<f64>, f64) {
    let mut x = x0.to_vec();
    let mut best = f0;
    for (i, axis) in axes.iter().enumerate() {
        let (mut lo, mut hi) = (x[i] - axis.half_width, x[i] + axis.half_width);
        if let Some((blo, bhi)) = axis.bounds {
            lo = lo.max(blo);
            hi = hi.min(bhi);
        }
        if hi <= lo {
            continue;
        }
        let mut probe = x.clone();
        let (xi, fi) = golden_section(
            |v| {
                probe[i] = v;
                f(&probe)
            },
            lo,
            hi,
            40,
        );
        if fi < best {
            best = fi;
            x[i] = xi;
        }
    }
    (x, best)
}
