//! Parameter lattices and admissible sample points.
//!
//! A point is admissible when it keeps away from the `v1` boundary (so that
//! finite-difference stencils stay inside), from the coordinate pole
//! `|cos v3| <= POLE_BAND` and, in E^4, from the focal set `|Q| <= FOCAL_BAND`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::canal::{CanalPatch, RadiusSample};
use crate::error::{GeometryError, Result};

pub const POLE_BAND: f64 = 1e-3;
pub const FOCAL_BAND: f64 = 1e-6;
/// Pole band for comparisons against finite-difference curvature. The
/// coordinate metric degenerates like `cos^2 v3`, and the stencil error in
/// K and H grows like `(h / cos v3)^2`.
pub const ORACLE_POLE_BAND: f64 = 0.05;
/// Default distance kept from the `v1` boundary, as a fraction of its span.
pub const DEFAULT_V1_MARGIN: f64 = 0.01;
/// Rejection-sampling budget per requested point.
const ATTEMPTS_PER_POINT: usize = 1000;

/// Tensor-product lattice; the last axis varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lattice {
    pub axes: Vec<Vec<f64>>,
}

impl Lattice {
    /// `counts[i]` nodes on `[lo_i, hi_i]`, endpoints included.
    pub fn uniform(ranges: &[(f64, f64)], counts: &[usize]) -> Result<Self> {
        if ranges.len() != counts.len() {
            return Err(GeometryError::DimensionMismatch { expected: ranges.len(), found: counts.len() });
        }
        let axes = ranges
            .iter()
            .zip(counts)
            .map(|(&(lo, hi), &m)| match m {
                0 => Err(GeometryError::Invalid("lattice axis with no nodes".into())),
                1 => Ok(vec![0.5 * (lo + hi)]),
                _ => Ok((0..m).map(|j| lo + (hi - lo) * j as f64 / (m - 1) as f64).collect()),
            })
            .collect::<Result<_>>()?;
        Ok(Lattice { axes })
    }

    /// Sampling lattice of a patch: `v1` from `lo + margin` to `hi - margin`
    /// inclusive, angle axes at cell centers `lo + (j + 1/2)(hi - lo)/m`.
    pub fn for_patch(patch: &CanalPatch, counts: &[usize], v1_margin: f64) -> Result<Self> {
        let domain = patch.domain();
        if counts.len() != domain.len() {
            return Err(GeometryError::DimensionMismatch { expected: domain.len(), found: counts.len() });
        }
        let mut axes = Vec::with_capacity(counts.len());
        for (i, (&(lo, hi), &m)) in domain.iter().zip(counts).enumerate() {
            if m == 0 {
                return Err(GeometryError::Invalid("lattice axis with no nodes".into()));
            }
            if i == 0 {
                let (a, b) = (lo + v1_margin, hi - v1_margin);
                if !(a <= b) {
                    return Err(GeometryError::Invalid(format!("v1 margin {v1_margin} leaves no room")));
                }
                axes.push(Lattice::uniform(&[(a, b)], &[m])?.axes.remove(0));
            } else {
                axes.push((0..m).map(|j| lo + (hi - lo) * (j as f64 + 0.5) / m as f64).collect());
            }
        }
        Ok(Lattice { axes })
    }

    pub fn counts(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node spacing along `axis` (zero for a single node).
    pub fn spacing(&self, axis: usize) -> f64 {
        let a = &self.axes[axis];
        if a.len() < 2 {
            0.0
        } else {
            a[1] - a[0]
        }
    }

    /// Multi-index of the flat index `k`.
    pub fn index(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (slot, axis) in idx.iter_mut().zip(&self.axes).rev() {
            *slot = k % axis.len();
            k /= axis.len();
        }
        idx
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.axes).fold(0, |acc, (i, a)| acc * a.len() + i)
    }

    pub fn point(&self, k: usize) -> Vec<f64> {
        self.index(k).iter().zip(&self.axes).map(|(i, a)| a[*i]).collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }
}

/// `Q = rho (k_1 sqrt(1 - rho'^2) cos v2 cos v3 + rho'') - 1 + rho'^2`
pub fn q_value(k1: f64, r: &RadiusSample, v2: f64, v3: f64) -> f64 {
    let w = r.regularity().sqrt();
    r.rho * (k1 * w * v2.cos() * v3.cos() + r.d2) - 1.0 + r.d1 * r.d1
}

/// Whether `params` is an admissible sample point of the patch.
pub fn is_admissible(patch: &CanalPatch, params: &[f64], v1_margin: f64) -> Result<bool> {
    is_admissible_banded(patch, params, v1_margin, POLE_BAND)
}

/// [`is_admissible`] with a wider pole band `|cos v3| <= pole_band`.
pub fn is_admissible_banded(patch: &CanalPatch, params: &[f64], v1_margin: f64, pole_band: f64) -> Result<bool> {
    let (lo, hi) = patch.domain()[0];
    let v1 = params[0];
    let slack = 1e-12 * (hi - lo);
    if !(v1 >= lo + v1_margin - slack && v1 <= hi - v1_margin + slack) {
        return Ok(false);
    }
    if patch.dim() == 4 {
        let v3 = params[2];
        if v3.cos().abs() <= pole_band.max(POLE_BAND) {
            return Ok(false);
        }
        let f = patch.frenet(v1)?;
        let r = patch.radius(v1)?;
        if q_value(f.k(1), &r, params[1], v3).abs() <= FOCAL_BAND {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `count` admissible points drawn uniformly from the patch domain with a
/// seeded ChaCha8 generator; the sequence depends only on the seed.
pub fn random_admissible(patch: &CanalPatch, count: usize, seed: u64, v1_margin: f64) -> Result<Vec<Vec<f64>>> {
    random_admissible_banded(patch, count, seed, v1_margin, POLE_BAND)
}

/// [`random_admissible`] with a wider pole band.
pub fn random_admissible_banded(
    patch: &CanalPatch,
    count: usize,
    seed: u64,
    v1_margin: f64,
    pole_band: f64,
) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = patch.domain();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > ATTEMPTS_PER_POINT * count.max(1) {
            return Err(GeometryError::Invalid(format!(
                "found only {} of {count} admissible points",
                out.len()
            )));
        }
        let p: Vec<f64> = domain
            .iter()
            .enumerate()
            .map(|(i, &(lo, hi))| {
                let (a, b) = if i == 0 { (lo + v1_margin, hi - v1_margin) } else { (lo, hi) };
                a + (b - a) * rng.gen::<f64>()
            })
            .collect();
        if is_admissible_banded(patch, &p, v1_margin, pole_band)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// Admissible nodes of a lattice, in lattice order.
pub fn admissible_nodes(patch: &CanalPatch, lattice: &Lattice, v1_margin: f64) -> Result<Vec<Vec<f64>>> {
    let flags = par_map(&lattice.points(), |p| is_admissible(patch, p, v1_margin));
    let mut out = Vec::new();
    for (p, ok) in lattice.points().into_iter().zip(flags) {
        if ok? {
            out.push(p);
        }
    }
    Ok(out)
}

/// Order-preserving parallel map.
pub fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canal::RadiusProfile;
    use crate::curve::CenterCurve;
    use std::f64::consts::PI;

    #[test]
    fn lattice_indexing() {
        let l = Lattice::uniform(&[(0.0, 1.0), (0.0, 2.0), (-1.0, 1.0)], &[3, 4, 5]).unwrap();
        assert_eq!(l.len(), 60);
        for k in 0..l.len() {
            assert_eq!(l.flat(&l.index(k)), k);
        }
        assert_eq!(l.point(0), vec![0.0, 0.0, -1.0]);
        assert_eq!(l.point(59), vec![1.0, 2.0, 1.0]);
        assert_eq!(l.point(1), vec![0.0, 0.0, -0.5]);
        assert!((l.spacing(1) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn patch_lattice_avoids_poles() {
        let p = CanalPatch::full(CenterCurve::axis(4, (0.0, 2.0)).unwrap(), RadiusProfile::constant(1.0), (0.0, 2.0))
            .unwrap();
        let l = Lattice::for_patch(&p, &[20, 20, 20], 0.02).unwrap();
        assert_eq!(l.axes[0][0], 0.02);
        assert!((l.axes[0][19] - 1.98).abs() < 1e-15);
        assert!(l.axes[2].iter().all(|v| v.cos().abs() > 0.1));
        assert_eq!(admissible_nodes(&p, &l, 0.02).unwrap().len(), 8000);
    }

    #[test]
    fn random_points_are_seeded_and_admissible() {
        let c = CenterCurve::circle(4, 2.0, (0.0, 4.0 * PI)).unwrap();
        let p = CanalPatch::full(c, RadiusProfile::constant(0.5), (0.0, 4.0 * PI)).unwrap();
        let a = random_admissible(&p, 50, 9, 0.1).unwrap();
        let b = random_admissible(&p, 50, 9, 0.1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_admissible(&p, 50, 10, 0.1).unwrap());
        for q in &a {
            assert!(q[2].cos().abs() > POLE_BAND);
            assert!(q[0] >= 0.1);
        }
    }

    #[test]
    fn focal_points_are_rejected() {
        // tube radius equal to the curvature radius: Q = 0 at v2 = v3 = 0
        let c = CenterCurve::circle(4, 1.0, (0.0, 2.0 * PI)).unwrap();
        let p = CanalPatch::full(c, RadiusProfile::constant(1.0), (0.0, 2.0 * PI)).unwrap();
        assert!(!is_admissible(&p, &[1.0, 0.0, 0.0], 0.01).unwrap());
        assert!(is_admissible(&p, &[1.0, 0.5, 0.0], 0.01).unwrap());
        assert!(!is_admissible(&p, &[1.0, 0.5, PI / 2.0], 0.01).unwrap());
    }
}
