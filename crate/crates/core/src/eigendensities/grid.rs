use serde::Serialize;

use super::{
    bures_edge_coefficient, c_bures_quadrature, c_g_exact, c_hs, density_unnormalized, MeasureKind,
};
use crate::error::{Error, Result};

/// `ζ(1/2)`, the coefficient of the leading correction for trapezoid sums of
/// `x^{−1/2}`-type endpoint singularities.
const ZETA_HALF: f64 = -1.460_354_508_809_586_8;

/// One node `(i/R, j/R, (R−i−j)/R)` of the barycentric qutrit grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub i: usize,
    pub j: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Normalized density, or `None` where the density is singular.
    pub density: Option<f64>,
}

impl GridPoint {
    pub fn lambda3(&self) -> f64 {
        1.0 - self.lambda1 - self.lambda2
    }
}

/// Normalized eigenvalue density of a qutrit sampled on a barycentric grid.
#[derive(Debug, Clone, Serialize)]
pub struct QutritGrid {
    pub measure: MeasureKind,
    pub resolution: usize,
    pub normalization: f64,
    pub points: Vec<GridPoint>,
}

fn offset(resolution: usize, i: usize) -> usize {
    // Rows i = 0..=R hold R − i + 1 points each.
    i * (resolution + 1) - i * (i.saturating_sub(1)) / 2
}

/// Evaluates the normalized qutrit density of `measure` on the grid
/// `λ = (i, j, R−i−j)/R`. Singular nodes (pure states for the superfidelity
/// measure, faces of the simplex for Bures) are left unevaluated.
pub fn density_grid_qutrit(resolution: usize, measure: MeasureKind) -> Result<QutritGrid> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!("resolution must be at least 2, got {resolution}")));
    }
    let normalization = match measure {
        MeasureKind::SuperfidelityG => c_g_exact(3)?.value,
        MeasureKind::Bures => c_bures_quadrature(3)?.value,
        MeasureKind::HilbertSchmidt => c_hs(3)?.value,
    };
    let r = resolution as f64;
    let mut points = Vec::with_capacity((resolution + 1) * (resolution + 2) / 2);
    for i in 0..=resolution {
        for j in 0..=resolution - i {
            let k = resolution - i - j;
            let lambda = [i as f64 / r, j as f64 / r, k as f64 / r];
            let density = match density_unnormalized(measure, &lambda) {
                Ok(v) => Some(normalization * v),
                Err(Error::Singular(_)) => None,
                Err(e) => return Err(e),
            };
            points.push(GridPoint { i, j, lambda1: lambda[0], lambda2: lambda[1], density });
        }
    }
    Ok(QutritGrid { measure, resolution, normalization, points })
}

impl QutritGrid {
    /// The node at `(i, j)`, if it lies on the grid.
    pub fn point(&self, i: usize, j: usize) -> Option<&GridPoint> {
        if i + j > self.resolution {
            return None;
        }
        self.points.get(offset(self.resolution, i) + j)
    }

    /// Integral of the grid values over the simplex in the `(λ₁, λ₂)` chart.
    ///
    /// Iterated trapezoid rule: along `λ₂` for each row, then along `λ₁`.
    /// For measures whose density blows up like `x^{−1/2}` at the faces, the
    /// singular endpoints are dropped and the trapezoid sums are corrected by
    /// `−ζ(1/2)·√h·g`, where `g` is the coefficient of the singularity.
    pub fn integrate(&self) -> Result<f64> {
        let n = self.resolution;
        let h = 1.0 / n as f64;
        let value = |i: usize, j: usize| self.point(i, j).and_then(|p| p.density).unwrap_or(0.0);
        match self.measure {
            MeasureKind::SuperfidelityG | MeasureKind::HilbertSchmidt => {
                let row = |i: usize| {
                    let m = n - i;
                    if m == 0 {
                        return 0.0;
                    }
                    let inner: f64 = (1..m).map(|j| value(i, j)).sum();
                    h * (inner + 0.5 * (value(i, 0) + value(i, m)))
                };
                let inner: f64 = (1..n).map(row).sum();
                Ok(h * (inner + 0.5 * (row(0) + row(n))))
            }
            MeasureKind::Bures => {
                let c = self.normalization;
                let coeff = |l: [f64; 3], k: usize| -> Result<f64> { Ok(c * bures_edge_coefficient(&l, k)?) };
                let mut outer = 0.0;
                for i in 1..n {
                    let m = n - i;
                    let l1 = i as f64 * h;
                    let inner: f64 = (1..m).map(|j| value(i, j)).sum();
                    let g0 = coeff([l1, 0.0, 1.0 - l1], 1)?;
                    let gm = coeff([l1, 1.0 - l1, 0.0], 2)?;
                    outer += h * inner - ZETA_HALF * h.sqrt() * (g0 + gm);
                }
                // Row integrals behave like K/√λ₁ as λ₁ → 0, with K the integral
                // of the face coefficient along λ₁ = 0.
                let edge: Vec<f64> = (0..=n)
                    .map(|j| {
                        let l2 = j as f64 * h;
                        coeff([0.0, l2, 1.0 - l2], 0)
                    })
                    .collect::<Result<_>>()?;
                let k_face = h * (edge[1..n].iter().sum::<f64>() + 0.5 * (edge[0] + edge[n]));
                Ok(h * outer - ZETA_HALF * h.sqrt() * k_face)
            }
        }
    }

    /// Largest relative deviation of the density under the six permutations
    /// of the eigenvalues, over all non-singular nodes.
    pub fn max_permutation_asymmetry(&self) -> f64 {
        let n = self.resolution;
        let mut worst: f64 = 0.0;
        for p in &self.points {
            let Some(v) = p.density else { continue };
            let (a, b, c) = (p.i, p.j, n - p.i - p.j);
            for (x, y) in [(a, b), (b, a), (a, c), (c, a), (b, c), (c, b)] {
                let w = self.point(x, y).and_then(|q| q.density).unwrap_or(f64::NAN);
                let scale = v.abs().max(w.abs()).max(f64::MIN_POSITIVE);
                let dev = (v - w).abs() / scale;
                worst = if dev.is_nan() { f64::INFINITY } else { worst.max(dev) };
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn layout_and_barycenter() {
        let g = density_grid_qutrit(30, MeasureKind::SuperfidelityG).unwrap();
        assert_eq!(g.points.len(), 31 * 32 / 2);
        for i in 0..=30 {
            for j in 0..=30 - i {
                let p = g.point(i, j).unwrap();
                assert_eq!((p.i, p.j), (i, j));
            }
        }
        assert_eq!(g.point(10, 10).unwrap().density, Some(0.0));
        assert!(g.point(30, 0).unwrap().density.is_none());
        assert!(g.point(29, 0).unwrap().density.is_some());
        assert!(g.point(20, 11).is_none());
    }

    #[test]
    fn bures_faces_flagged() {
        let g = density_grid_qutrit(12, MeasureKind::Bures).unwrap();
        for p in &g.points {
            let on_face = p.i == 0 || p.j == 0 || p.i + p.j == 12;
            assert_eq!(p.density.is_none(), on_face);
        }
    }

    #[test]
    fn permutation_symmetric() {
        for m in [MeasureKind::SuperfidelityG, MeasureKind::Bures] {
            let g = density_grid_qutrit(60, m).unwrap();
            assert!(g.max_permutation_asymmetry() == 0.0);
        }
    }

    #[test]
    fn integrates_to_one() {
        let g = density_grid_qutrit(200, MeasureKind::SuperfidelityG).unwrap();
        assert_abs_diff_eq!(g.integrate().unwrap(), 1.0, epsilon = 0.01);
        let b = density_grid_qutrit(200, MeasureKind::Bures).unwrap();
        assert_abs_diff_eq!(b.integrate().unwrap(), 1.0, epsilon = 0.02);
        // Smooth integrand: the error should fall by ~4 per halving of h.
        let e100 = density_grid_qutrit(100, MeasureKind::HilbertSchmidt).unwrap().integrate().unwrap() - 1.0;
        let e200 = density_grid_qutrit(200, MeasureKind::HilbertSchmidt).unwrap().integrate().unwrap() - 1.0;
        assert!(e100.abs() < 0.01);
        assert!((e100 / e200 - 4.0).abs() < 0.5, "{e100} {e200}");
    }

    #[test]
    fn g_and_bures_differ() {
        let g = density_grid_qutrit(20, MeasureKind::SuperfidelityG).unwrap();
        let b = density_grid_qutrit(20, MeasureKind::Bures).unwrap();
        let diff = g
            .points
            .iter()
            .zip(&b.points)
            .filter_map(|(p, q)| Some((p.density? - q.density?).abs()))
            .fold(0.0, f64::max);
        assert!(diff > 0.0);
    }

    #[test]
    fn rejects_small_resolution() {
        assert!(density_grid_qutrit(1, MeasureKind::SuperfidelityG).is_err());
    }
}
