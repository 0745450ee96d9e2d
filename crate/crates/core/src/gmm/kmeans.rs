//! k-means++ seeding refined by Lloyd iterations.

use rand::Rng;

use super::GmmError;
use crate::geometry::Point;
use crate::rng::keyed_rng;

pub const LLOYD_MAX_ITERS: usize = 50;

const KMEANS_STREAM: u64 = 0x6b6d_6561_6e73;

pub(crate) fn distinct_count(points: &[Point]) -> usize {
    let mut keys: Vec<(u64, u64)> = points.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

/// Index of the nearest center; ties go to the lower index.
pub(crate) fn nearest(p: Point, centers: &[Point]) -> usize {
    let mut best = 0;
    let mut best_d = p.dist2(centers[0]);
    for (k, c) in centers.iter().enumerate().skip(1) {
        let d = p.dist2(*c);
        if d < best_d {
            best = k;
            best_d = d;
        }
    }
    best
}

/// Draws an index with probability proportional to `weights`.
fn weighted_pick(weights: &[f64], rng: &mut impl Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last_positive = i;
        if acc > target {
            return i;
        }
    }
    last_positive
}

fn plus_plus(points: &[Point], k: usize, rng: &mut impl Rng) -> Vec<Point> {
    let mut centers = Vec::with_capacity(k);
    centers.push(points[rng.random_range(0..points.len())]);
    let mut d2: Vec<f64> = points.iter().map(|p| p.dist2(centers[0])).collect();
    while centers.len() < k {
        let c = points[weighted_pick(&d2, rng)];
        centers.push(c);
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(p.dist2(c));
        }
    }
    centers
}

/// Initial cluster means for `k` clusters, deterministic in `seed`.
///
/// Clusters that lose all their points during refinement are moved onto
/// the point lying farthest from its own centroid.
pub fn kmeans_seed(points: &[Point], k: usize, seed: u64) -> Result<Vec<Point>, GmmError> {
    if k == 0 {
        return Err(GmmError::InvalidArgument("k must be at least 1".into()));
    }
    let distinct = distinct_count(points);
    if distinct < k {
        return Err(GmmError::DegenerateInput { distinct, k });
    }
    let mut rng = keyed_rng(seed, &[KMEANS_STREAM, k as u64]);
    let mut centers = plus_plus(points, k, &mut rng);
    let mut assignment: Vec<usize> = points.iter().map(|p| nearest(*p, &centers)).collect();

    for _ in 0..LLOYD_MAX_ITERS {
        let mut sums = vec![(0.0, 0.0, 0usize); k];
        for (p, &a) in points.iter().zip(&assignment) {
            sums[a].0 += p.x;
            sums[a].1 += p.y;
            sums[a].2 += 1;
        }
        let mut empty = Vec::new();
        for (c, &(sx, sy, n)) in centers.iter_mut().zip(&sums) {
            if n > 0 {
                *c = Point::new(sx / n as f64, sy / n as f64);
            }
        }
        for (j, s) in sums.iter().enumerate() {
            if s.2 == 0 {
                empty.push(j);
            }
        }
        if !empty.is_empty() {
            let mut spread: Vec<f64> = points
                .iter()
                .zip(&assignment)
                .map(|(p, &a)| p.dist2(centers[a]))
                .collect();
            for j in empty {
                let far = spread
                    .iter()
                    .enumerate()
                    .fold(0, |best, (i, d)| if *d > spread[best] { i } else { best });
                centers[j] = points[far];
                spread[far] = 0.0;
            }
        }
        let next: Vec<usize> = points.iter().map(|p| nearest(*p, &centers)).collect();
        if next == assignment {
            break;
        }
        assignment = next;
    }
    Ok(centers)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_blob(cx: f64, cy: f64) -> Vec<Point> {
        (0..5)
            .flat_map(|i| (0..5).map(move |j| Point::new(cx + i as f64 - 2.0, cy + j as f64 - 2.0)))
            .collect()
    }

    #[test]
    fn k_equal_to_n_returns_the_points() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(10.0, 3.0), Point::new(-4.0, 8.0)];
        let mut means = kmeans_seed(&pts, 3, 11).unwrap();
        means.sort_by(|a, b| a.x.total_cmp(&b.x));
        let mut want = pts.clone();
        want.sort_by(|a, b| a.x.total_cmp(&b.x));
        assert_eq!(means, want);
    }

    #[test]
    fn single_cluster_is_the_centroid() {
        let pts = vec![Point::new(1.0, 2.0), Point::new(3.0, 6.0), Point::new(8.0, 1.0)];
        let m = kmeans_seed(&pts, 1, 5).unwrap();
        assert!((m[0].x - 4.0).abs() < 1e-12 && (m[0].y - 3.0).abs() < 1e-12);
    }

    #[test]
    fn separated_blobs_get_one_mean_each() {
        let mut pts = grid_blob(20.0, 20.0);
        pts.extend(grid_blob(300.0, 150.0));
        for seed in 0..20 {
            let m = kmeans_seed(&pts, 2, seed).unwrap();
            let in_a = m.iter().filter(|p| p.dist(Point::new(20.0, 20.0)) < 3.0).count();
            let in_b = m.iter().filter(|p| p.dist(Point::new(300.0, 150.0)) < 3.0).count();
            assert_eq!((in_a, in_b), (1, 1), "seed {seed}: {m:?}");
        }
    }

    #[test]
    fn too_few_distinct_points() {
        let pts = vec![Point::new(1.0, 1.0); 5];
        assert!(matches!(
            kmeans_seed(&pts, 2, 0),
            Err(GmmError::DegenerateInput { distinct: 1, k: 2 })
        ));
        assert!(kmeans_seed(&pts, 0, 0).is_err());
    }

    #[test]
    fn deterministic_in_seed() {
        let pts: Vec<Point> = (0..40).map(|i| Point::new((i * 37 % 101) as f64, (i * 53 % 89) as f64)).collect();
        assert_eq!(kmeans_seed(&pts, 4, 9).unwrap(), kmeans_seed(&pts, 4, 9).unwrap());
    }
}
