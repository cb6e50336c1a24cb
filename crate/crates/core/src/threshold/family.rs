use crate::error::{Error, Result};
use crate::model::{Projection, SampleSet};
use crate::numeric::{check_dim, check_unit, dot, gram_schmidt, norm, GEOMETRY_TOL, VISIBILITY_TOL};
use crate::par;

use super::sphere::sphere_points;

/// Orthonormal frame of `Img(P)` whose first vector is `u = P w_f / |P w_f|`.
///
/// Directions in the visible subspace are written as coefficient vectors in
/// this frame; `w . w_f = s * coef[0]` with `s = |P w_f|`.
#[derive(Debug, Clone)]
pub struct VisibleFrame {
    projection: Projection,
    w_f: Vec<f64>,
    s: f64,
    /// `u` followed by an orthonormal basis of `Img(P)` orthogonal to `u`.
    basis: Vec<Vec<f64>>,
}

impl VisibleFrame {
    pub fn new(p: &Projection, w_f: &[f64]) -> Result<Self> {
        check_dim(p.dim(), w_f.len())?;
        check_unit(w_f)?;
        let pw = p.apply_unchecked(w_f);
        let s = norm(&pw);
        if s <= VISIBILITY_TOL {
            return Err(Error::InvisibleQuality {
                norm: s,
                tolerance: VISIBILITY_TOL,
            });
        }
        let k = p.rank();
        let mut rows = Vec::with_capacity(k + 1);
        rows.push(p.coords(&pw));
        for j in 0..k {
            let mut e = vec![0.0; k];
            e[j] = 1.0;
            rows.push(e);
        }
        let coords = gram_schmidt(&rows, 1e-6);
        debug_assert_eq!(coords.len(), k);
        let mut basis: Vec<Vec<f64>> = coords.iter().map(|y| p.lift(y)).collect();
        // the pole is exactly P w_f / s, not its round trip through the frame
        basis[0] = pw.iter().map(|v| v / s).collect();
        Ok(Self {
            projection: p.clone(),
            w_f: w_f.to_vec(),
            s,
            basis,
        })
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    pub fn w_f(&self) -> &[f64] {
        &self.w_f
    }

    /// `|P w_f|`, the largest attainable correlation.
    pub fn visible_norm(&self) -> f64 {
        self.s
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn pole(&self) -> &[f64] {
        &self.basis[0]
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// `sum_j coef[j] basis[j]`.
    pub fn direction(&self, coef: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.projection.dim()];
        for (c, e) in coef.iter().zip(&self.basis) {
            w.iter_mut().zip(e).for_each(|(o, v)| *o += c * v);
        }
        w
    }

    /// Frame coordinates of every sample, one column per basis vector.
    pub(crate) fn sample_coords(&self, s: &SampleSet) -> Result<Vec<Vec<f64>>> {
        check_dim(self.projection.dim(), s.dim())?;
        let m = s.non_empty()?;
        Ok(self
            .basis
            .iter()
            .map(|e| par::map_chunks(m, par::CHUNK, |r| r.map(|i| dot(e, s.point(i))).collect::<Vec<_>>()).concat())
            .collect())
    }

    pub fn family(&self, eta: f64) -> Result<DirectionFamily<'_>> {
        if !(eta >= 0.0 && eta <= self.s * (1.0 + 1e-12)) {
            return Err(Error::EmptyFamily { eta, max: self.s });
        }
        Ok(DirectionFamily {
            frame: self,
            t: (eta / self.s).min(1.0),
        })
    }

    /// Family at relative correlation `t = eta / |P w_f|` in `[0, 1]`.
    pub(crate) fn family_at(&self, t: f64) -> DirectionFamily<'_> {
        DirectionFamily {
            frame: self,
            t: t.clamp(0.0, 1.0),
        }
    }
}

/// `K_eta`: unit directions in `Img(P)` with `w . w_f = eta`.
#[derive(Debug, Clone, Copy)]
pub struct DirectionFamily<'a> {
    frame: &'a VisibleFrame,
    t: f64,
}

impl<'a> DirectionFamily<'a> {
    pub fn frame(&self) -> &'a VisibleFrame {
        self.frame
    }

    pub fn eta(&self) -> f64 {
        self.t * self.frame.s
    }

    pub fn relative(&self) -> f64 {
        self.t
    }

    /// Frame coefficients `(t, sqrt(1 - t^2) v)` for `v` on the sphere of the
    /// complement. With rank 1 only `t = 1` is nonempty; with rank 2 there are
    /// exactly two directions; rank 3 gives a circle of `steps` points.
    pub fn coefficients(&self, steps: usize) -> Result<Vec<Vec<f64>>> {
        let k = self.frame.rank();
        if k == 1 {
            return if self.t >= 1.0 - 1e-12 {
                Ok(vec![vec![1.0]])
            } else {
                Err(Error::EmptyFamily {
                    eta: self.eta(),
                    max: self.eta(),
                })
            };
        }
        let rho = ((1.0 - self.t) * (1.0 + self.t)).sqrt();
        Ok(sphere_points(k - 1, steps)
            .into_iter()
            .map(|v| {
                let mut c = Vec::with_capacity(k);
                c.push(self.t);
                c.extend(v.iter().map(|x| rho * x));
                c
            })
            .collect())
    }

    pub fn directions(&self, steps: usize) -> Result<Vec<Vec<f64>>> {
        Ok(self
            .coefficients(steps)?
            .iter()
            .map(|c| self.frame.direction(c))
            .collect())
    }

    /// Membership within 1e-9 on norm, correlation and visibility.
    pub fn contains(&self, w: &[f64]) -> bool {
        w.len() == self.frame.w_f.len()
            && (norm(w) - 1.0).abs() <= GEOMETRY_TOL
            && (dot(w, &self.frame.w_f) - self.eta()).abs() <= GEOMETRY_TOL
            && self.frame.projection.check_visible(w).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let l = norm(&v);
        v.into_iter().map(|x| x / l).collect()
    }

    #[test]
    fn frame_is_orthonormal_and_visible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.random_range(2..7usize);
            let k = rng.random_range(1..=n);
            let rows: Vec<Vec<f64>> = (0..k).map(|_| random_unit(&mut rng, n)).collect();
            let p = Projection::from_spanning(&rows).unwrap();
            let wf = random_unit(&mut rng, n);
            let fr = VisibleFrame::new(&p, &wf).unwrap();
            assert_eq!(fr.rank(), p.rank());
            for i in 0..fr.rank() {
                assert!(p.check_visible(&fr.basis()[i]).is_ok());
                for j in 0..fr.rank() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot(&fr.basis()[i], &fr.basis()[j]) - want).abs() < 1e-12);
                }
            }
            for eta in [0.0, 0.3 * fr.visible_norm(), fr.visible_norm()] {
                let fam = fr.family(eta).unwrap();
                match fam.directions(16) {
                    Ok(ws) => {
                        for w in ws {
                            assert!(fam.contains(&w), "eta {eta} w {w:?}");
                        }
                    }
                    Err(Error::EmptyFamily { .. }) => assert!(k == 1 && eta < fr.visible_norm()),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn rank_two_has_two_directions() {
        let p = Projection::coordinates(3, &[0, 1]).unwrap();
        let wf = [0.0, 0.6, 0.8];
        let fr = VisibleFrame::new(&p, &wf).unwrap();
        assert!((fr.visible_norm() - 0.6).abs() < 1e-15);
        let ws = fr.family(0.0).unwrap().directions(4096).unwrap();
        assert_eq!(ws.len(), 2);
        for w in &ws {
            assert!(w[1].abs() < 1e-15 && (w[0].abs() - 1.0).abs() < 1e-15);
        }
        assert!(fr.family(0.7).is_err());
    }

    #[test]
    fn invisible() {
        let p = Projection::coordinates(2, &[0]).unwrap();
        assert!(matches!(
            VisibleFrame::new(&p, &[0.0, 1.0]),
            Err(Error::InvisibleQuality { .. })
        ));
    }
}
