//! Margin-density maximization over a direction family.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::SampleSet;
use crate::par;

use super::family::DirectionFamily;
use super::preference;
use super::window::{max_window_scan, soft_sum_sorted, sort, window_bias, WindowTracker};

/// Best `(w, b)` of a family with its margin density.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub w: Vec<f64>,
    pub b: f64,
    pub den: f64,
}

/// Soft margin densities of an oracle result at `b` and at `b + shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedSoftDensity {
    pub at_b: f64,
    pub at_shifted: f64,
}

pub type BatchItem = Result<(OracleResult, Option<ShiftedSoftDensity>)>;

/// A density-maximization oracle. Implementations must be pure and
/// deterministic per call.
pub trait DensityOracle: Sync {
    fn maximize(&self, s: &SampleSet, margin: f64, family: &DirectionFamily<'_>) -> Result<OracleResult>;

    /// One result per family, in order. Implementations may also report the
    /// soft margin densities at `b` and `b + shift` when they come for free.
    fn maximize_batch(
        &self,
        s: &SampleSet,
        margin: f64,
        families: &[DirectionFamily<'_>],
        shift: f64,
    ) -> Result<Vec<BatchItem>> {
        let _ = shift;
        Ok(par::map_indexed(families.len(), |i| {
            self.maximize(s, margin, &families[i]).map(|r| (r, None))
        }))
    }
}

/// Enumerates the family on a fixed grid (see [`DirectionFamily::coefficients`])
/// and solves the bias exactly for each direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngularOracle {
    pub angular_steps: usize,
}

impl Default for AngularOracle {
    fn default() -> Self {
        Self {
            angular_steps: super::DEFAULT_ANGULAR_STEPS,
        }
    }
}

/// [`AngularOracle`] as a free function.
pub fn density_oracle(
    s: &SampleSet,
    l: f64,
    family: &DirectionFamily<'_>,
    angular_steps: usize,
) -> Result<OracleResult> {
    AngularOracle { angular_steps }.maximize(s, l, family)
}

fn check_margin(l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(Error::param("l", format!("margin must be > 0, got {l}")))
    }
}

/// `p_i = sum_j coef[j] y[j][i]`, always accumulated in the same order.
fn project_into(out: &mut Vec<f64>, y: &[Vec<f64>], coef: &[f64]) {
    out.clear();
    out.extend(y[0].iter().map(|v| coef[0] * v));
    for (c, col) in coef.iter().zip(y).skip(1) {
        out.iter_mut().zip(col).for_each(|(o, v)| *o += c * v);
    }
}

struct Best {
    count: usize,
    b: f64,
    w: Vec<f64>,
    sorted: Vec<f64>,
}

impl Best {
    fn offer(slot: &mut Option<Best>, count: usize, b: f64, w: Vec<f64>, sorted: &[f64]) {
        let better = match slot {
            None => true,
            Some(cur) => preference((count as f64, b, &w), (cur.count as f64, cur.b, &cur.w)) == Ordering::Greater,
        };
        if better {
            *slot = Some(Best {
                count,
                b,
                w,
                sorted: sorted.to_vec(),
            });
        }
    }

    fn finish(self, m: usize, margin: f64, shift: Option<f64>) -> (OracleResult, Option<ShiftedSoftDensity>) {
        let soft = shift.map(|d| ShiftedSoftDensity {
            at_b: soft_sum_sorted(&self.sorted, self.b, margin) / m as f64,
            at_shifted: soft_sum_sorted(&self.sorted, self.b + d, margin) / m as f64,
        });
        (
            OracleResult {
                w: self.w,
                b: self.b,
                den: self.count as f64 / m as f64,
            },
            soft,
        )
    }
}

impl AngularOracle {
    fn check(&self, s: &SampleSet, margin: f64) -> Result<usize> {
        if self.angular_steps == 0 {
            return Err(Error::param("angular_steps", "must be at least 1"));
        }
        check_margin(margin)?;
        s.non_empty()
    }

    fn scan(
        &self,
        y: &[Vec<f64>],
        margin: f64,
        family: &DirectionFamily<'_>,
        shift: Option<f64>,
    ) -> Result<(OracleResult, Option<ShiftedSoftDensity>)> {
        let m = y[0].len();
        let mut best = None;
        let mut p = Vec::with_capacity(m);
        for coef in family.coefficients(self.angular_steps)? {
            project_into(&mut p, y, &coef);
            sort(&mut p);
            let count = max_window_scan(&p, margin);
            let b = window_bias(&p, margin, count);
            Best::offer(&mut best, count, b, family.frame().direction(&coef), &p);
        }
        Ok(best.expect("nonempty family").finish(m, margin, shift))
    }
}

/// Steps of drift tolerated between full window scans.
const RESCAN_STEPS: f64 = 32.0;

/// Sorted projections along one side of a rank-2 family, kept sorted across
/// nearby correlation values by insertion sort.
struct Side {
    sign: f64,
    p: Vec<f64>,
    a: Vec<f64>,
    c: Vec<f64>,
    /// Largest `|a|` and `|c|`, bounding how far a projection moves.
    a_max: f64,
    c_max: f64,
    prev: (f64, f64),
    count: usize,
    windows: WindowTracker,
}

struct SideStep {
    count: usize,
    b: f64,
    soft_b: f64,
    soft_shifted: f64,
}

impl Side {
    fn new(sign: f64, y: &[Vec<f64>]) -> Self {
        let abs_max = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Self {
            sign,
            p: vec![0.0; y[0].len()],
            a: y[0].clone(),
            c: y[1].clone(),
            a_max: abs_max(&y[0]),
            c_max: abs_max(&y[1]),
            prev: (0.0, 0.0),
            count: 1,
            windows: WindowTracker::default(),
        }
    }

    fn update(&mut self, t: f64, rho: f64, margin: f64, first: bool) -> f64 {
        let c1 = self.sign * rho;
        let drift = if first {
            for ((o, a), c) in self.p.iter_mut().zip(&self.a).zip(&self.c) {
                *o = t * a + c1 * c;
            }
            let mut idx: Vec<u32> = (0..self.p.len() as u32).collect();
            let p = &self.p;
            radsort::sort_by_key(&mut idx, |&i| p[i as usize]);
            self.p = idx.iter().map(|&i| self.p[i as usize]).collect();
            self.a = idx.iter().map(|&i| self.a[i as usize]).collect();
            self.c = idx.iter().map(|&i| self.c[i as usize]).collect();
            self.windows.reset();
            0.0
        } else {
            self.reproject_sorted(t, c1);
            let (t0, c0) = self.prev;
            // exact movement plus the rounding of both evaluations
            (t - t0).abs() * self.a_max + (c1 - c0).abs() * self.c_max + 8.0 * f64::EPSILON * (self.a_max + self.c_max)
        };
        self.prev = (t, c1);
        let (count, b) = self.windows.update(&self.p, margin, drift, RESCAN_STEPS * drift);
        self.count = count;
        b
    }

    /// Best window along this side for each `(t, rho)` in turn.
    fn sweep(&mut self, coefs: &[(f64, f64)], margin: f64, shift: f64) -> Vec<SideStep> {
        coefs
            .iter()
            .enumerate()
            .map(|(step, &(t, rho))| {
                let b = self.update(t, rho, margin, step == 0);
                SideStep {
                    count: self.count,
                    b,
                    soft_b: soft_sum_sorted(&self.p, b, margin),
                    soft_shifted: soft_sum_sorted(&self.p, b + shift, margin),
                }
            })
            .collect()
    }

    /// Recomputes the projections and restores sorted order (insertion sort,
    /// linear when few neighbours swapped).
    fn reproject_sorted(&mut self, t: f64, c1: f64) {
        let (p, a, c) = (&mut self.p, &mut self.a, &mut self.c);
        for ((o, a), c) in p.iter_mut().zip(a.iter()).zip(c.iter()) {
            *o = t * a + c1 * c;
        }
        for j in 1..p.len() {
            let pv = p[j];
            if p[j - 1] <= pv {
                continue;
            }
            let (av, cv) = (a[j], c[j]);
            let mut i = j;
            while i > 0 && p[i - 1] > pv {
                p[i] = p[i - 1];
                a[i] = a[i - 1];
                c[i] = c[i - 1];
                i -= 1;
            }
            p[i] = pv;
            a[i] = av;
            c[i] = cv;
        }
    }
}

const BATCH_CHUNK: usize = 2048;

impl DensityOracle for AngularOracle {
    fn maximize(&self, s: &SampleSet, margin: f64, family: &DirectionFamily<'_>) -> Result<OracleResult> {
        self.check(s, margin)?;
        let y = family.frame().sample_coords(s)?;
        Ok(self.scan(&y, margin, family, None)?.0)
    }

    fn maximize_batch(
        &self,
        s: &SampleSet,
        margin: f64,
        families: &[DirectionFamily<'_>],
        shift: f64,
    ) -> Result<Vec<BatchItem>> {
        let m = self.check(s, margin)?;
        let Some(first) = families.first() else {
            return Ok(Vec::new());
        };
        let y = first.frame().sample_coords(s)?;
        if y.len() != 2 {
            return Ok(par::map_indexed(families.len(), |i| {
                self.scan(&y, margin, &families[i], Some(shift))
            }));
        }
        // Rank 2: each side swept over the chunk on its own (one side's working
        // set stays cache resident), then the sides are compared per family.
        let chunks = par::map_chunks(families.len(), BATCH_CHUNK, |range| {
            let coefs: Vec<(f64, f64)> = families[range]
                .iter()
                .map(|fam| {
                    let t = fam.relative();
                    (t, ((1.0 - t) * (1.0 + t)).sqrt())
                })
                .collect();
            let plus = Side::new(1.0, &y).sweep(&coefs, margin, shift);
            let minus = Side::new(-1.0, &y).sweep(&coefs, margin, shift);
            coefs
                .iter()
                .zip(plus.into_iter().zip(minus))
                .map(|(&(t, rho), (hp, hm))| {
                    let frame = first.frame();
                    let wp = frame.direction(&[t, rho]);
                    let wm = frame.direction(&[t, -rho]);
                    let take_minus =
                        preference((hm.count as f64, hm.b, &wm), (hp.count as f64, hp.b, &wp)) == Ordering::Greater;
                    let (h, w) = if take_minus { (hm, wm) } else { (hp, wp) };
                    Ok((
                        OracleResult {
                            w,
                            b: h.b,
                            den: h.count as f64 / m as f64,
                        },
                        Some(ShiftedSoftDensity {
                            at_b: h.soft_b / m as f64,
                            at_shifted: h.soft_shifted / m as f64,
                        }),
                    ))
                })
                .collect::<Vec<_>>()
        });
        Ok(chunks.into_iter().flatten().collect())
    }
}
