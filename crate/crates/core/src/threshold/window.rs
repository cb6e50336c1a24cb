//! Exact maximization of the margin density along a fixed direction.

use crate::error::{Error, Result};
use crate::model::SampleSet;
use crate::numeric::{check_dim, check_unit, dot};

/// `(b, den)` maximizing the closed-window margin density `Den(w, b)` over all
/// real `b`. `b` is the largest projection inside the best window; among equal
/// windows the one with smaller `|b|` (then smaller `b`) wins.
pub fn best_bias_for_direction(s: &SampleSet, w: &[f64], l: f64) -> Result<(f64, f64)> {
    let m = s.non_empty()?;
    check_dim(s.dim(), w.len())?;
    check_unit(w)?;
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::param("l", format!("margin must be > 0, got {l}")));
    }
    let mut p: Vec<f64> = s.points().map(|x| dot(w, x)).collect();
    sort(&mut p);
    let k = max_window_scan(&p, l);
    Ok((window_bias(&p, l, k), k as f64 / m as f64))
}

/// Radix sort in `total_cmp` order.
pub(crate) fn sort(p: &mut [f64]) {
    radsort::sort(p);
}

/// Largest number of sorted values inside a closed window of width `l`.
pub(crate) fn max_window_scan(p: &[f64], l: f64) -> usize {
    let mut lo = 0;
    let mut best = 0;
    for (e, &v) in p.iter().enumerate() {
        while v - p[lo] > l {
            lo += 1;
        }
        best = best.max(e + 1 - lo);
    }
    best
}

const LANES: usize = 8;

/// For windows of `k` sorted values with left end in `lo..hi`: the smallest
/// `|right end|` among those spanning at most `l` (infinite if none), and the
/// smallest span of `k + 1` consecutive values (infinite if there is none).
/// Branch-free over lanes.
fn window_stats(p: &[f64], l: f64, k: usize, lo: usize, hi: usize) -> (f64, f64) {
    let hi = hi.min(p.len() + 1 - k);
    if lo >= hi {
        return (f64::INFINITY, f64::INFINITY);
    }
    // left ends with a (k + 1)-window too
    let pairs = hi.min(p.len() - k).max(lo) - lo;
    let left = &p[lo..lo + pairs];
    let hi0 = &p[lo + k - 1..lo + k - 1 + pairs];
    let hi1 = &p[lo + k..lo + k + pairs];
    let mut best = [f64::INFINITY; LANES];
    let mut next = [f64::INFINITY; LANES];
    let lo_c = left.chunks_exact(LANES);
    let tail = lo_c.remainder().len();
    for ((a, b0), b1) in lo_c.zip(hi0.chunks_exact(LANES)).zip(hi1.chunks_exact(LANES)) {
        let a: &[f64; LANES] = a.try_into().expect("exact chunk");
        let b0: &[f64; LANES] = b0.try_into().expect("exact chunk");
        let b1: &[f64; LANES] = b1.try_into().expect("exact chunk");
        for j in 0..LANES {
            let span = b1[j] - a[j];
            next[j] = if span < next[j] { span } else { next[j] };
            let key = if b0[j] - a[j] <= l { b0[j].abs() } else { f64::INFINITY };
            best[j] = if key < best[j] { key } else { best[j] };
        }
    }
    let mut best = best.iter().fold(f64::INFINITY, |m, &v| if v < m { v } else { m });
    let mut next = next.iter().fold(f64::INFINITY, |m, &v| if v < m { v } else { m });
    for i in lo + pairs - tail..hi {
        if i + k < p.len() {
            next = next.min(p[i + k] - p[i]);
        }
        if p[i + k - 1] - p[i] <= l {
            best = best.min(p[i + k - 1].abs());
        }
    }
    (best, next)
}

/// Largest window count and its preferred right end (as [`max_window_scan`]
/// and [`window_bias`]), searched outward from `hint`; cheap when the answer
/// moved little since the previous call.
pub(crate) fn max_window_near(p: &[f64], l: f64, hint: usize) -> (usize, f64) {
    let n = p.len();
    let mut k = hint.clamp(1, n);
    loop {
        let (best, next) = window_stats(p, l, k, 0, n);
        if next <= l {
            k += 1;
        } else if best.is_infinite() {
            k -= 1;
        } else {
            return (k, right_end_with_abs(p, l, k, best));
        }
    }
}

/// Counts below and above the current one kept as candidate runs.
const LEVELS_BELOW: usize = 2;
const LEVELS_ABOVE: usize = 3;

/// Largest window along sorted values that drift slowly between calls.
///
/// Each order statistic moves at most as far as the furthest value, so a span
/// changes by at most twice the accumulated drift. A full scan records, for a
/// few counts around the best one, the runs of left ends whose windows are
/// within that reach of fitting; later calls only recheck those until the
/// drift exceeds the horizon chosen at the scan or the count leaves the
/// recorded range. Results equal [`max_window_scan`] with [`window_bias`].
#[derive(Debug, Default)]
pub(crate) struct WindowTracker {
    count: usize,
    drift: f64,
    horizon: f64,
    /// Count of `levels[0]`.
    base: usize,
    /// `levels[j]`: runs `lo..hi` of left ends of `(base + j)`-windows that
    /// may fit.
    levels: Vec<Vec<(usize, usize)>>,
}

impl WindowTracker {
    /// `drift` bounds how far any value moved since the previous call;
    /// `horizon` is the drift tolerated before the next full scan.
    pub(crate) fn update(&mut self, p: &[f64], l: f64, drift: f64, horizon: f64) -> (usize, f64) {
        self.drift += drift;
        if self.count == 0 || self.drift > self.horizon {
            return self.rescan(p, l, horizon);
        }
        let top = self.base + self.levels.len() - 1;
        let mut k = self.count;
        loop {
            if k >= top {
                return self.rescan(p, l, horizon);
            }
            let (mut best, mut next) = (f64::INFINITY, f64::INFINITY);
            for &(lo, hi) in &self.levels[k - self.base] {
                let (b, n) = window_stats(p, l, k, lo, hi);
                best = best.min(b);
                next = next.min(n);
            }
            // runs of level k + 1 lie inside those of level k, so `next`
            // covers every (k + 1)-window that may fit
            if next <= l {
                k += 1;
                continue;
            }
            if best.is_finite() {
                self.count = k;
                return (k, right_end_with_abs(p, l, k, best));
            }
            if k <= self.base {
                return self.rescan(p, l, horizon);
            }
            k -= 1;
        }
    }

    fn rescan(&mut self, p: &[f64], l: f64, horizon: f64) -> (usize, f64) {
        let (k, b) = if self.count == 0 {
            let k = max_window_scan(p, l);
            (k, window_bias(p, l, k))
        } else {
            max_window_near(p, l, self.count)
        };
        // rounding of the spans themselves is far below this
        let reach = l + 2.0 * horizon + 1e-12 * (1.0 + l);
        let n = p.len();
        self.base = k.saturating_sub(LEVELS_BELOW).max(1);
        let top = (k + LEVELS_ABOVE).min(n);
        self.levels.resize_with(top + 1 - self.base, Vec::new);
        let mut prev = vec![(0, n + 1 - self.base)];
        for (j, level) in self.levels.iter_mut().enumerate() {
            let w = self.base + j;
            level.clear();
            for &(lo, hi) in &prev {
                let end = hi.min(n + 1 - w);
                let mut start = None;
                for i in lo..end {
                    let near = p[i + w - 1] - p[i] <= reach;
                    match (near, start) {
                        (true, None) => start = Some(i),
                        (false, Some(s)) => {
                            level.push((s, i));
                            start = None;
                        }
                        _ => {}
                    }
                }
                if let Some(s) = start {
                    level.push((s, end));
                }
            }
            prev.clone_from(level);
        }
        self.count = k;
        self.drift = 0.0;
        self.horizon = horizon;
        (k, b)
    }

    pub(crate) fn reset(&mut self) {
        self.count = 0;
    }
}

/// First right end (in sorted order) of a fitting `k`-window whose absolute
/// value is `a`, the minimum over fitting windows.
fn right_end_with_abs(p: &[f64], l: f64, k: usize, a: f64) -> f64 {
    let fits_at = |j: usize| j + 1 >= k && p[j] - p[j + 1 - k] <= l;
    let mut j = p.partition_point(|&v| v < -a);
    while j < p.len() && p[j] <= a {
        if p[j].abs() == a && fits_at(j) {
            return p[j];
        }
        if p[j] < a && p[j] > -a {
            // values strictly inside (-a, a) never fit; jump to +a
            j = p.partition_point(|&v| v < a);
            continue;
        }
        j += 1;
    }
    unreachable!("a fitting window with |right end| = {a} exists")
}

/// Right end of the preferred window holding `k` sorted values.
pub(crate) fn window_bias(p: &[f64], l: f64, k: usize) -> f64 {
    let mut best = f64::NAN;
    for (hi, lo) in p[k - 1..].iter().zip(p) {
        if hi - lo <= l && (best.is_nan() || hi.abs() < best.abs() || (hi.abs() == best.abs() && *hi < best)) {
            best = *hi;
        }
    }
    best
}

/// `sum (b - p)` over sorted values with `p - b` in `[-l, 0]`.
pub(crate) fn soft_sum_sorted(p: &[f64], b: f64, l: f64) -> f64 {
    let lo = p.partition_point(|&v| v - b < -l);
    let hi = p.partition_point(|&v| v - b <= 0.0);
    if hi <= lo {
        return 0.0;
    }
    let w = &p[lo..hi];
    let mut acc = [0.0; LANES];
    let chunks = w.chunks_exact(LANES);
    let rest: f64 = chunks.remainder().iter().map(|v| b - v).sum();
    for c in chunks {
        let c: &[f64; LANES] = c.try_into().expect("exact chunk");
        for j in 0..LANES {
            acc[j] += b - c[j];
        }
    }
    acc.iter().sum::<f64>() + rest
}
