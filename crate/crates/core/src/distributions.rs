//! Seeded population generators, Gaussian smoothing and Monte Carlo checks of
//! the smoothed-distribution band and tail bounds.
//!
//! Every generator draws points in blocks of [`BLOCK`]; block `j` uses its own
//! ChaCha8 stream (`set_stream(j)`) keyed by the seed, so output is identical
//! whether blocks are produced sequentially or in parallel.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SampleSet;
use crate::numeric::{check_dim, check_unit, dot, norm};
use crate::par;

/// Points per RNG stream.
pub const BLOCK: usize = 1024;

/// Name of the random source recorded in provenance.
pub const SAMPLER: &str =
    "ChaCha8Rng/rand_chacha-0.9 stream-per-1024-block; normals: rand_distr-0.5 StandardNormal (ziggurat)";

const GEN_DOMAIN: u64 = 0x6765_6e65_7261_7465;
const SMOOTH_DOMAIN: u64 = 0x736d_6f6f_7468_696e;

/// SplitMix64 finalizer, used to derive independent seeds from a master seed.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn block_rng(seed: u64, domain: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, domain));
    rng.set_stream(block as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorKind {
    /// Uniform in the ball of radius `r`.
    UniformBall { r: f64 },
    /// Uniform in the axis-aligned cube inscribed in the ball of radius `r`
    /// (half-side `r / sqrt(n)`).
    UniformBox { r: f64 },
    /// `x_axis ~ Unif[-r, r]`, all other coordinates zero. `axis` is 1-based,
    /// matching the `x1..xn` dataset columns.
    LineSegment { axis: usize, r: f64 },
    /// Like `line_segment` but on the deterministic grid `-r + 2r i/(m-1)`.
    LineGrid { axis: usize, r: f64 },
    /// Equal-weight Gaussian clusters, each point resampled until it lies in
    /// the ball of radius `r`.
    GaussianMixture {
        centers: Vec<Vec<f64>>,
        spread: f64,
        r: f64,
    },
    /// The first `m` rows of a CSV dataset.
    File { path: PathBuf, r: f64 },
}

impl GeneratorKind {
    pub fn radius(&self) -> f64 {
        match *self {
            GeneratorKind::UniformBall { r }
            | GeneratorKind::UniformBox { r }
            | GeneratorKind::LineSegment { r, .. }
            | GeneratorKind::LineGrid { r, .. }
            | GeneratorKind::GaussianMixture { r, .. }
            | GeneratorKind::File { r, .. } => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, n: usize, seed: u64) -> Self {
        Self { kind, n, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.kind.radius();
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::param("r", format!("radius must be positive, got {r}")));
        }
        if self.n == 0 {
            return Err(Error::param("n", "dimension must be at least 1"));
        }
        match &self.kind {
            GeneratorKind::LineSegment { axis, .. } | GeneratorKind::LineGrid { axis, .. } => {
                if *axis == 0 || *axis > self.n {
                    return Err(Error::param(
                        "axis",
                        format!("axis must be in 1..={}, got {axis}", self.n),
                    ));
                }
            }
            GeneratorKind::GaussianMixture { centers, spread, r } => {
                if centers.is_empty() {
                    return Err(Error::param("centers", "at least one center required"));
                }
                if !(*spread >= 0.0 && spread.is_finite()) {
                    return Err(Error::param("spread", format!("must be >= 0, got {spread}")));
                }
                for c in centers {
                    check_dim(self.n, c.len())?;
                    if norm(c) > *r {
                        return Err(Error::param(
                            "centers",
                            format!("center norm {} exceeds r = {r}", norm(c)),
                        ));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothingSpec {
    #[serde(default)]
    pub sigma: f64,
}

impl SmoothingSpec {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma >= 0.0 && sigma.is_finite() {
            Ok(Self { sigma })
        } else {
            Err(Error::param("sigma", format!("must be >= 0, got {sigma}")))
        }
    }
}

/// Where a sample set came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Provenance {
    Generated {
        generator: GeneratorSpec,
        m: usize,
        sampler: String,
    },
    Smoothed {
        base: Box<Provenance>,
        sigma: f64,
        seed: u64,
        sampler: String,
    },
    File {
        path: PathBuf,
    },
    Inline,
}

impl Provenance {
    pub fn sigma(&self) -> f64 {
        match self {
            Provenance::Smoothed { sigma, .. } => *sigma,
            _ => 0.0,
        }
    }
}

/// Clamps `x` onto the closed ball of radius `r` (rounding guard only).
fn clamp_to_ball(x: &mut [f64], r: f64) {
    let nx = norm(x);
    if nx > r {
        let s = r / nx;
        x.iter_mut().for_each(|v| *v *= s);
        while norm(x) > r {
            x.iter_mut().for_each(|v| *v *= 1.0 - f64::EPSILON);
        }
    }
}

fn draw_point(kind: &GeneratorKind, n: usize, rng: &mut ChaCha8Rng, out: &mut [f64]) {
    match kind {
        GeneratorKind::UniformBall { r } => {
            let mut nrm = 0.0;
            while nrm == 0.0 {
                out.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
                nrm = norm(out);
            }
            let rad = r * rng.random::<f64>().powf(1.0 / n as f64);
            out.iter_mut().for_each(|v| *v *= rad / nrm);
            clamp_to_ball(out, *r);
        }
        GeneratorKind::UniformBox { r } => {
            let h = r / (n as f64).sqrt();
            out.iter_mut().for_each(|v| *v = rng.random_range(-h..=h));
            clamp_to_ball(out, *r);
        }
        GeneratorKind::LineSegment { axis, r } => {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[axis - 1] = rng.random_range(-*r..=*r);
        }
        GeneratorKind::GaussianMixture { centers, spread, r } => {
            for _ in 0..64 {
                let c = &centers[rng.random_range(0..centers.len())];
                for (o, ci) in out.iter_mut().zip(c) {
                    let z: f64 = rng.sample(StandardNormal);
                    *o = ci + spread * z;
                }
                if norm(out) <= *r {
                    return;
                }
            }
            clamp_to_ball(out, *r);
        }
        GeneratorKind::LineGrid { .. } | GeneratorKind::File { .. } => unreachable!("not a random kind"),
    }
}

/// Draws `m` base points from `spec`. Deterministic in `(spec, m)`.
pub fn sample(spec: &GeneratorSpec, m: usize) -> Result<SampleSet> {
    spec.validate()?;
    if m == 0 {
        return Err(Error::param("m", "sample count must be at least 1"));
    }
    let n = spec.n;
    let r = spec.kind.radius();
    let provenance = Provenance::Generated {
        generator: spec.clone(),
        m,
        sampler: SAMPLER.to_string(),
    };
    let coords = match &spec.kind {
        GeneratorKind::LineGrid { axis, r } => {
            let mut coords = vec![0.0; m * n];
            for i in 0..m {
                let t = if m == 1 {
                    0.0
                } else {
                    -r + 2.0 * r * i as f64 / (m - 1) as f64
                };
                coords[i * n + axis - 1] = t;
            }
            coords
        }
        GeneratorKind::File { path, r } => {
            let data = crate::io::read_dataset(path, *r)?;
            check_dim(n, data.dim())?;
            if data.len() < m {
                return Err(Error::Format {
                    path: path.clone(),
                    message: format!("{} rows requested, file has {}", m, data.len()),
                });
            }
            let coords = data.coords()[..m * n].to_vec();
            if let Some((i, p)) = coords.chunks_exact(n).enumerate().find(|(_, p)| norm(p) > *r) {
                return Err(Error::Format {
                    path: path.clone(),
                    message: format!("row {} has norm {} > r = {r}", i + 1, norm(p)),
                });
            }
            coords
        }
        kind => {
            let blocks = par::map_chunks(m, BLOCK, |range| {
                let mut rng = block_rng(spec.seed, GEN_DOMAIN, range.start / BLOCK);
                let mut out = vec![0.0; range.len() * n];
                for p in out.chunks_exact_mut(n) {
                    draw_point(kind, n, &mut rng, p);
                }
                out
            });
            blocks.concat()
        }
    };
    SampleSet::from_flat(n, coords, r, provenance)
}

/// Adds i.i.d. `N(0, sigma^2 I)` noise to every point. Smoothed points are not
/// clipped back to the declared radius.
pub fn smooth(s: &SampleSet, sm: &SmoothingSpec, seed: u64) -> Result<SampleSet> {
    let sm = SmoothingSpec::new(sm.sigma)?;
    if sm.sigma > s.radius() {
        log::warn!(
            "smoothing sigma {} exceeds the domain radius {}; noise dominates the base distribution",
            sm.sigma,
            s.radius()
        );
    }
    let n = s.dim();
    let provenance = Provenance::Smoothed {
        base: Box::new(s.provenance().clone()),
        sigma: sm.sigma,
        seed,
        sampler: SAMPLER.to_string(),
    };
    let mut out = s.clone().with_provenance(provenance);
    if sm.sigma == 0.0 {
        return Ok(out);
    }
    let noise = par::map_chunks(s.len(), BLOCK, |range| {
        let mut rng = block_rng(seed, SMOOTH_DOMAIN, range.start / BLOCK);
        (0..range.len() * n)
            .map(|_| sm.sigma * rng.sample::<f64, _>(StandardNormal))
            .collect::<Vec<_>>()
    })
    .concat();
    out.coords_mut().iter_mut().zip(&noise).for_each(|(x, z)| *x += z);
    Ok(out)
}

/// Result of checking `Pr[w.x in [a,b]] <= (b-a)/(sigma sqrt(2 pi))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandCheck {
    pub empirical: f64,
    pub bound: f64,
    /// `bound` plus three Monte Carlo standard deviations.
    pub allowed: f64,
    pub pass: bool,
}

pub fn band_bound(a: f64, b: f64, sigma: f64) -> f64 {
    (b - a).abs() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

pub fn verify_band_bound(s: &SampleSet, w: &[f64], a: f64, b: f64, sigma: f64) -> Result<BandCheck> {
    let m = s.non_empty()?;
    check_dim(s.dim(), w.len())?;
    check_unit(w)?;
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::param("sigma", "band bound requires sigma > 0"));
    }
    if a > b {
        return Err(Error::param("band", format!("lower end {a} exceeds upper end {b}")));
    }
    let hits = par::count_by(m, |i| {
        let p = dot(w, s.point(i));
        p >= a && p <= b
    });
    let empirical = hits as f64 / m as f64;
    let bound = band_bound(a, b, sigma);
    let allowed = bound + 3.0 * (bound / m as f64).sqrt();
    Ok(BandCheck {
        empirical,
        bound,
        allowed,
        pass: empirical <= allowed,
    })
}

/// Result of checking `Pr[|x| >= H] <= eps` for `H = 2r + sigma sqrt(2 ln(1/eps))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub empirical: f64,
    pub h: f64,
    pub allowed: f64,
    pub pass: bool,
}

pub fn tail_radius(r: f64, sigma: f64, eps: f64) -> f64 {
    2.0 * r + sigma * (2.0 * (1.0 / eps).ln()).sqrt()
}

pub fn verify_tail_bound(s: &SampleSet, r: f64, sigma: f64, eps: f64) -> Result<TailCheck> {
    let m = s.non_empty()?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::param("eps", format!("must lie in (0, 1], got {eps}")));
    }
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::param("sigma", format!("must be >= 0, got {sigma}")));
    }
    let h = tail_radius(r, sigma, eps);
    let far = par::count_by(m, |i| norm(s.point(i)) >= h);
    let empirical = far as f64 / m as f64;
    let allowed = eps + 3.0 * (eps / m as f64).sqrt();
    Ok(TailCheck {
        empirical,
        h,
        allowed,
        pass: empirical <= allowed,
    })
}
