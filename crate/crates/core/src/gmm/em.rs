//! Expectation-maximization for 2-D Gaussian mixtures with full covariances.
//!
//! Every reduction runs sequentially in point order, so a fit is bitwise
//! reproducible for fixed inputs.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::kmeans::{distinct_count, kmeans_seed, nearest};
use super::linalg::SymMat2;
use super::GmmError;
use crate::geometry::Point;

/// Smallest admissible covariance eigenvalue, px².
pub const COV_FLOOR: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: Point,
    pub cov: SymMat2,
}

impl GaussianComponent {
    /// `ln N(p; mean, cov)`. The covariance floor keeps `cov` invertible.
    pub fn log_density(&self, p: Point) -> f64 {
        let inv = self
            .cov
            .inverse()
            .expect("floored covariance is positive definite");
        let maha = inv.quad_form(p.x - self.mean.x, p.y - self.mean.y);
        -(2.0 * PI).ln() - 0.5 * self.cov.det().ln() - 0.5 * maha
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    pub components: Vec<GaussianComponent>,
    pub log_likelihood: f64,
}

impl GaussianMixture {
    pub fn k(&self) -> usize {
        self.components.len()
    }

    /// Component with the largest posterior for `p`; ties go to the lower index.
    pub fn assign(&self, p: Point) -> usize {
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        for (k, c) in self.components.iter().enumerate() {
            let v = c.weight.ln() + c.log_density(p);
            if v > best_v {
                best = k;
                best_v = v;
            }
        }
        best
    }
}

/// Row-major `n × k` posterior matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Responsibilities {
    k: usize,
    values: Vec<f64>,
}

impl Responsibilities {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.values.len() / self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.k..(i + 1) * self.k]
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.k + k]
    }
}

/// Posterior responsibilities and total log-likelihood under `mixture`,
/// computed with log-sum-exp.
pub fn e_step(points: &[Point], mixture: &GaussianMixture) -> (Responsibilities, f64) {
    let k = mixture.k();
    let mut values = Vec::with_capacity(points.len() * k);
    let mut total = 0.0;
    let mut logs = vec![0.0; k];
    for &p in points {
        for (slot, c) in logs.iter_mut().zip(&mixture.components) {
            *slot = c.weight.ln() + c.log_density(p);
        }
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logs.iter().map(|l| (l - max).exp()).sum();
        let lse = max + sum.ln();
        total += lse;
        values.extend(logs.iter().map(|l| (l - lse).exp()));
    }
    (Responsibilities { k, values }, total)
}

/// Closed-form parameter update from responsibilities, followed by the
/// covariance floor.
///
/// A component whose responsibilities have all underflowed to zero keeps
/// its previous mean and covariance.
pub fn m_step(points: &[Point], resp: &Responsibilities, previous: &GaussianMixture) -> GaussianMixture {
    let n = points.len() as f64;
    let components = (0..resp.k())
        .map(|k| {
            let mut nk = 0.0;
            let (mut sx, mut sy) = (0.0, 0.0);
            for (i, p) in points.iter().enumerate() {
                let r = resp.get(i, k);
                nk += r;
                sx += r * p.x;
                sy += r * p.y;
            }
            let prev = &previous.components[k];
            if nk <= 0.0 {
                return GaussianComponent {
                    weight: 0.0,
                    ..*prev
                };
            }
            let mean = Point::new(sx / nk, sy / nk);
            let mut cov = SymMat2::default();
            for (i, p) in points.iter().enumerate() {
                let r = resp.get(i, k);
                let (dx, dy) = (p.x - mean.x, p.y - mean.y);
                cov.xx += r * dx * dx;
                cov.xy += r * dx * dy;
                cov.yy += r * dy * dy;
            }
            cov = SymMat2::new(cov.xx / nk, cov.xy / nk, cov.yy / nk).floor_eigenvalues(COV_FLOOR);
            GaussianComponent {
                weight: nk / n,
                mean,
                cov,
            }
        })
        .collect();
    GaussianMixture {
        components,
        log_likelihood: f64::NAN,
    }
}

/// Outcome of a fit with its per-iteration log-likelihood history.
#[derive(Debug, Clone, PartialEq)]
pub struct EmFit {
    pub mixture: GaussianMixture,
    /// Log-likelihood of the initial parameters, then after each M-step.
    pub log_likelihoods: Vec<f64>,
    /// Number of M-steps performed.
    pub iterations: usize,
    pub converged: bool,
}

/// Starting mixture: hard assignment to the nearest mean, per-cluster
/// scatter (floored) and uniform weights.
fn initial_mixture(points: &[Point], means: &[Point]) -> GaussianMixture {
    let k = means.len();
    let mut members: Vec<Vec<Point>> = vec![Vec::new(); k];
    for &p in points {
        members[nearest(p, means)].push(p);
    }
    let components = means
        .iter()
        .zip(&members)
        .map(|(&mean, pts)| {
            let mut cov = SymMat2::default();
            if !pts.is_empty() {
                let m = pts.len() as f64;
                let cx = pts.iter().map(|p| p.x).sum::<f64>() / m;
                let cy = pts.iter().map(|p| p.y).sum::<f64>() / m;
                for p in pts {
                    cov.xx += (p.x - cx) * (p.x - cx);
                    cov.xy += (p.x - cx) * (p.y - cy);
                    cov.yy += (p.y - cy) * (p.y - cy);
                }
                cov = SymMat2::new(cov.xx / m, cov.xy / m, cov.yy / m);
            }
            GaussianComponent {
                weight: 1.0 / k as f64,
                mean,
                cov: cov.floor_eigenvalues(COV_FLOOR),
            }
        })
        .collect();
    GaussianMixture {
        components,
        log_likelihood: f64::NAN,
    }
}

/// EM from caller-supplied initial means.
pub fn em_fit_from(
    points: &[Point],
    initial_means: &[Point],
    max_iters: usize,
    tol: f64,
) -> Result<EmFit, GmmError> {
    let k = initial_means.len();
    if k == 0 {
        return Err(GmmError::InvalidArgument("k must be at least 1".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(GmmError::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    if points.len() < k {
        return Err(GmmError::DegenerateInput {
            distinct: distinct_count(points),
            k,
        });
    }
    let mut mixture = initial_mixture(points, initial_means);
    let (mut resp, mut ll) = e_step(points, &mixture);
    let mut log_likelihoods = vec![ll];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        mixture = m_step(points, &resp, &mixture);
        iterations += 1;
        let (next_resp, next_ll) = e_step(points, &mixture);
        log_likelihoods.push(next_ll);
        converged = (next_ll - ll).abs() < tol;
        resp = next_resp;
        ll = next_ll;
        if converged {
            break;
        }
    }
    mixture.log_likelihood = ll;
    Ok(EmFit {
        mixture,
        log_likelihoods,
        iterations,
        converged,
    })
}

/// k-means-seeded EM, returning the full iteration history.
pub fn em_fit_traced(
    points: &[Point],
    k: usize,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<EmFit, GmmError> {
    let means = kmeans_seed(points, k, seed)?;
    em_fit_from(points, &means, max_iters, tol)
}

pub fn em_fit(
    points: &[Point],
    k: usize,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<GaussianMixture, GmmError> {
    em_fit_traced(points, k, max_iters, tol, seed).map(|fit| fit.mixture)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Plain-arithmetic E+M step: explicit densities, explicit 2×2
    /// inverse, no log domain, no floor (the instance below never hits it).
    fn oracle_step(points: &[(f64, f64)], w: [f64; 2], mu: [(f64, f64); 2], cov: [[f64; 3]; 2]) -> ([f64; 2], [(f64, f64); 2], [[f64; 3]; 2]) {
        let dens = |x: (f64, f64), m: (f64, f64), c: [f64; 3]| {
            let det = c[0] * c[2] - c[1] * c[1];
            let (dx, dy) = (x.0 - m.0, x.1 - m.1);
            let q = (c[2] * dx * dx - 2.0 * c[1] * dx * dy + c[0] * dy * dy) / det;
            (-0.5 * q).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
        };
        let mut r = vec![[0.0; 2]; points.len()];
        for (i, &x) in points.iter().enumerate() {
            let a = w[0] * dens(x, mu[0], cov[0]);
            let b = w[1] * dens(x, mu[1], cov[1]);
            r[i] = [a / (a + b), b / (a + b)];
        }
        let mut new_w = [0.0; 2];
        let mut new_mu = [(0.0, 0.0); 2];
        let mut new_cov = [[0.0; 3]; 2];
        for k in 0..2 {
            let nk: f64 = r.iter().map(|ri| ri[k]).sum();
            new_w[k] = nk / points.len() as f64;
            let mx = points.iter().zip(&r).map(|(x, ri)| ri[k] * x.0).sum::<f64>() / nk;
            let my = points.iter().zip(&r).map(|(x, ri)| ri[k] * x.1).sum::<f64>() / nk;
            new_mu[k] = (mx, my);
            new_cov[k] = [
                points.iter().zip(&r).map(|(x, ri)| ri[k] * (x.0 - mx) * (x.0 - mx)).sum::<f64>() / nk,
                points.iter().zip(&r).map(|(x, ri)| ri[k] * (x.0 - mx) * (x.1 - my)).sum::<f64>() / nk,
                points.iter().zip(&r).map(|(x, ri)| ri[k] * (x.1 - my) * (x.1 - my)).sum::<f64>() / nk,
            ];
        }
        (new_w, new_mu, new_cov)
    }

    #[test]
    fn one_step_matches_oracle() {
        let raw = [(0.0, 0.0), (4.0, 1.0), (10.0, 12.0), (13.0, 9.0)];
        let points: Vec<Point> = raw.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let start = GaussianMixture {
            components: vec![
                GaussianComponent { weight: 0.4, mean: Point::new(4.0, 5.0), cov: SymMat2::new(60.0, 5.0, 50.0) },
                GaussianComponent { weight: 0.6, mean: Point::new(8.0, 6.0), cov: SymMat2::new(55.0, -4.0, 65.0) },
            ],
            log_likelihood: f64::NAN,
        };
        let (resp, _) = e_step(&points, &start);
        let next = m_step(&points, &resp, &start);
        let (w, mu, cov) = oracle_step(
            &raw,
            [0.4, 0.6],
            [(4.0, 5.0), (8.0, 6.0)],
            [[60.0, 5.0, 50.0], [55.0, -4.0, 65.0]],
        );
        // Soft assignments, and neither updated covariance touches the floor.
        assert!(w[0] > 0.3 && w[0] < 0.5);
        for c in &next.components {
            assert!(c.cov.eigen().minor > 2.0);
        }
        for k in 0..2 {
            let c = &next.components[k];
            assert!((c.weight - w[k]).abs() < 1e-12);
            assert!((c.mean.x - mu[k].0).abs() < 1e-12);
            assert!((c.mean.y - mu[k].1).abs() < 1e-12);
            assert!((c.cov.xx - cov[k][0]).abs() < 1e-12);
            assert!((c.cov.xy - cov[k][1]).abs() < 1e-12);
            assert!((c.cov.yy - cov[k][2]).abs() < 1e-12);
        }
    }

    #[test]
    fn single_component_is_sample_moments() {
        let points = vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 2.0),
            Point::new(4.0, 8.0),
            Point::new(6.0, 6.0),
        ];
        let fit = em_fit_traced(&points, 1, 200, 1e-6, 3).unwrap();
        let c = fit.mixture.components[0];
        assert_eq!(c.weight, 1.0);
        assert!((c.mean.x - 5.0).abs() < 1e-12 && (c.mean.y - 4.0).abs() < 1e-12);
        // Population covariance of the four points.
        assert!((c.cov.xx - 13.0).abs() < 1e-12);
        assert!((c.cov.xy - 2.0).abs() < 1e-12);
        assert!((c.cov.yy - 10.0).abs() < 1e-12);
        assert!(fit.converged && fit.iterations <= 2);
    }

    #[test]
    fn symmetric_problem_splits_weight_evenly() {
        let points: Vec<Point> = [(-10.0, 0.0), (-12.0, 1.0), (-11.0, -2.0), (10.0, 0.0), (12.0, -1.0), (11.0, 2.0)]
            .iter()
            .map(|&(x, y)| Point::new(x, y))
            .collect();
        let fit = em_fit_from(&points, &[Point::new(-5.0, 0.0), Point::new(5.0, 0.0)], 200, 1e-10).unwrap();
        for c in &fit.mixture.components {
            assert!((c.weight - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn collinear_points_stay_nonsingular() {
        let points: Vec<Point> = (0..10).map(|i| Point::new(64.0 * i as f64, 64.0)).collect();
        let mix = em_fit(&points, 2, 200, 1e-6, 0).unwrap();
        for c in &mix.components {
            assert!(c.cov.eigen().minor >= COV_FLOOR - 1e-9);
            assert!(c.log_density(c.mean).is_finite());
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        assert!(matches!(em_fit(&pts, 3, 10, 1e-6, 0), Err(GmmError::DegenerateInput { .. })));
        assert!(matches!(em_fit(&pts, 1, 10, 0.0, 0), Err(GmmError::InvalidArgument(_))));
        assert!(matches!(em_fit(&pts, 0, 10, 1e-6, 0), Err(GmmError::InvalidArgument(_))));
    }

    fn point_cloud() -> impl Strategy<Value = Vec<Point>> {
        proptest::collection::vec((0.0f64..400.0, 0.0f64..300.0), 8..60)
            .prop_map(|v| v.into_iter().map(|(x, y)| Point::new(x.round(), y.round())).collect())
    }

    /// Non-integer coordinates, so exact distance ties do not occur.
    fn smooth_cloud() -> impl Strategy<Value = Vec<Point>> {
        proptest::collection::vec((0.0f64..400.0, 0.0f64..300.0), 8..60)
            .prop_map(|v| v.into_iter().map(|(x, y)| Point::new(x, y)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn log_likelihood_never_decreases(points in point_cloud(), k in 1usize..5, seed in any::<u64>()) {
            prop_assume!(distinct_count(&points) >= k);
            let fit = em_fit_traced(&points, k, 100, 1e-8, seed).unwrap();
            for pair in fit.log_likelihoods.windows(2) {
                prop_assert!(pair[1] >= pair[0] - 1e-9, "{:?}", fit.log_likelihoods);
            }
        }

        #[test]
        fn responsibilities_and_weights_are_normalized(points in point_cloud(), k in 1usize..5, seed in any::<u64>()) {
            prop_assume!(distinct_count(&points) >= k);
            let mix = em_fit(&points, k, 20, 1e-6, seed).unwrap();
            let (resp, _) = e_step(&points, &mix);
            for i in 0..resp.n() {
                prop_assert!((resp.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-9);
                prop_assert!(resp.row(i).iter().all(|r| *r >= 0.0));
            }
            let total: f64 = mix.components.iter().map(|c| c.weight).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }

        #[test]
        fn translation_equivariance(points in smooth_cloud(), k in 1usize..4, dx in -500.0f64..500.0, dy in -500.0f64..500.0, seed in any::<u64>()) {
            prop_assume!(distinct_count(&points) >= k);
            let (dx, dy) = (dx.round(), dy.round());
            let moved: Vec<Point> = points.iter().map(|p| Point::new(p.x + dx, p.y + dy)).collect();
            let a = em_fit(&points, k, 50, 1e-6, seed).unwrap();
            let b = em_fit(&moved, k, 50, 1e-6, seed).unwrap();
            for (ca, cb) in a.components.iter().zip(&b.components) {
                prop_assert!((ca.mean.x + dx - cb.mean.x).abs() < 1e-6);
                prop_assert!((ca.mean.y + dy - cb.mean.y).abs() < 1e-6);
                prop_assert!((ca.weight - cb.weight).abs() < 1e-6);
                prop_assert!((ca.cov.xx - cb.cov.xx).abs() < 1e-6);
                prop_assert!((ca.cov.xy - cb.cov.xy).abs() < 1e-6);
                prop_assert!((ca.cov.yy - cb.cov.yy).abs() < 1e-6);
            }
            for (p, q) in points.iter().zip(&moved) {
                prop_assert_eq!(a.assign(*p), b.assign(*q));
            }
        }

        #[test]
        fn fits_are_bitwise_reproducible(points in point_cloud(), k in 1usize..4, seed in any::<u64>()) {
            prop_assume!(distinct_count(&points) >= k);
            let a = em_fit(&points, k, 30, 1e-6, seed).unwrap();
            let b = em_fit(&points, k, 30, 1e-6, seed).unwrap();
            prop_assert_eq!(format!("{a:?}"), format!("{b:?}"));
        }
    }
}
