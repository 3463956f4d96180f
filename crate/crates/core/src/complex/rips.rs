use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::cloud::{Metric, MetricKind, PointCloud};
use super::FilteredComplex;
use crate::error::{Error, Result};

/// Largest ambient dimension for which Čech filtrations are built.
pub const MAX_CECH_DIM: usize = 8;

/// How Rips parameters are reported: as diameters (the definition) or as
/// radii of the balls whose union is pictured (diameter / 2).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Diameter,
    Radius,
}

impl Convention {
    pub fn rips_factor(self) -> f64 {
        match self {
            Convention::Diameter => 1.0,
            Convention::Radius => 0.5,
        }
    }
}

/// Vietoris–Rips filtration: σ enters at the largest pairwise distance of
/// its vertices, up to dimension `max_dim` and scale `max_scale`.
pub fn build_rips(cloud: &PointCloud, metric: &Metric, max_dim: usize, max_scale: f64) -> Result<FilteredComplex> {
    if !(max_scale >= 0.0) {
        return Err(Error::InvalidInput("maxScale must be nonnegative".into()));
    }
    let d = metric.distance_matrix(cloud)?;
    let n = cloud.len();
    let adj: Vec<Vec<u32>> = (0..n)
        .map(|i| ((i + 1)..n).filter(|&j| d[i][j] <= max_scale).map(|j| j as u32).collect())
        .collect();
    let mut out: Vec<(Vec<u32>, f64)> = Vec::new();
    for v in 0..n {
        out.push((vec![v as u32], 0.0));
        let mut simplex = vec![v as u32];
        expand_cliques(&d, &adj, &mut simplex, &adj[v], 0.0, max_dim, &mut out);
    }
    FilteredComplex::new(out, Some(max_dim), true)
}

fn expand_cliques(
    d: &[Vec<f64>],
    adj: &[Vec<u32>],
    simplex: &mut Vec<u32>,
    candidates: &[u32],
    value: f64,
    max_dim: usize,
    out: &mut Vec<(Vec<u32>, f64)>,
) {
    if simplex.len() > max_dim {
        return;
    }
    for (k, &w) in candidates.iter().enumerate() {
        let v = simplex.iter().map(|&u| d[u as usize][w as usize]).fold(value, f64::max);
        simplex.push(w);
        out.push((simplex.clone(), v));
        let next: Vec<u32> = candidates[k + 1..]
            .iter()
            .copied()
            .filter(|x| adj[w as usize].binary_search(x).is_ok())
            .collect();
        expand_cliques(d, adj, simplex, &next, v, max_dim, out);
        simplex.pop();
    }
}

/// A closed Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    fn contains(&self, p: &[f64]) -> bool {
        let r2: f64 = self.center.iter().zip(p).map(|(c, x)| (c - x) * (c - x)).sum();
        r2.sqrt() <= self.radius * (1.0 + 1e-12) + 1e-12
    }
}

/// Smallest ball through all points of `boundary` with center in their
/// affine hull; `None` if the points are affinely dependent.
fn circumball(pts: &[&[f64]]) -> Option<Ball> {
    let dim = pts[0].len();
    if pts.len() == 1 {
        return Some(Ball { center: pts[0].to_vec(), radius: 0.0 });
    }
    let k = pts.len() - 1;
    let v: Vec<Vec<f64>> = pts[1..].iter().map(|p| p.iter().zip(pts[0]).map(|(a, b)| a - b).collect()).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let gram = DMatrix::from_fn(k, k, |i, j| 2.0 * dot(&v[i], &v[j]));
    let rhs = DVector::from_fn(k, |i, _| dot(&v[i], &v[i]));
    let scale = rhs.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let lu = gram.clone().full_piv_lu();
    let det = lu.determinant();
    if det.abs() <= 1e-12 * scale.powi(k as i32) {
        return None;
    }
    let lambda = lu.solve(&rhs)?;
    let mut center = pts[0].to_vec();
    for (i, vi) in v.iter().enumerate() {
        for c in 0..dim {
            center[c] += lambda[i] * vi[c];
        }
    }
    let radius = pts
        .iter()
        .map(|p| p.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    Some(Ball { center, radius })
}

/// Minimum enclosing ball by Welzl's recursion (deterministic order).
pub fn min_enclosing_ball(points: &[&[f64]]) -> Ball {
    assert!(!points.is_empty());
    let dim = points[0].len();
    let mut boundary = Vec::with_capacity(dim + 1);
    welzl(points, points.len(), &mut boundary, dim)
        .unwrap_or_else(|| brute_force_ball(points))
}

fn welzl<'a>(points: &[&'a [f64]], n: usize, boundary: &mut Vec<&'a [f64]>, dim: usize) -> Option<Ball> {
    if n == 0 || boundary.len() == dim + 1 {
        return match boundary.len() {
            0 => Some(Ball { center: vec![0.0; dim], radius: -1.0 }),
            _ => circumball(boundary),
        };
    }
    let p = points[n - 1];
    let ball = welzl(points, n - 1, boundary, dim)?;
    if ball.radius >= 0.0 && ball.contains(p) {
        return Some(ball);
    }
    boundary.push(p);
    let b = welzl(points, n - 1, boundary, dim);
    boundary.pop();
    b
}

/// Exhaustive fallback for degenerate inputs: smallest circumball over all
/// affinely independent subsets that encloses everything.
fn brute_force_ball(points: &[&[f64]]) -> Ball {
    let n = points.len();
    let dim = points[0].len();
    let mut best: Option<Ball> = None;
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize > dim + 1 {
            continue;
        }
        let sub: Vec<&[f64]> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| points[i]).collect();
        if let Some(b) = circumball(&sub) {
            if points.iter().all(|p| b.contains(p)) && best.as_ref().map_or(true, |x| b.radius < x.radius) {
                best = Some(b);
            }
        }
    }
    best.expect("some subset always yields an enclosing ball")
}

/// Čech filtration: σ enters at the radius of the minimum enclosing ball of
/// its vertices. Euclidean metric and ambient dimension ≤ 8 only.
pub fn build_cech(cloud: &PointCloud, metric: &Metric, max_dim: usize, max_scale: f64) -> Result<FilteredComplex> {
    if metric.kind != MetricKind::Euclidean {
        return Err(Error::Unsupported("Čech filtrations require the euclidean metric".into()));
    }
    if cloud.dim() > MAX_CECH_DIM {
        return Err(Error::Unsupported(format!(
            "Čech construction in ambient dimension {} (limit {MAX_CECH_DIM})",
            cloud.dim()
        )));
    }
    if !(max_scale >= 0.0) {
        return Err(Error::InvalidInput("maxScale must be nonnegative".into()));
    }
    let n = cloud.len();
    let d = metric.distance_matrix(cloud)?;
    let adj: Vec<Vec<u32>> = (0..n)
        .map(|i| ((i + 1)..n).filter(|&j| d[i][j] / 2.0 <= max_scale).map(|j| j as u32).collect())
        .collect();
    let mut out: Vec<(Vec<u32>, f64)> = Vec::new();
    let mut values: std::collections::HashMap<Vec<u32>, f64> = Default::default();
    for v in 0..n {
        out.push((vec![v as u32], 0.0));
        values.insert(vec![v as u32], 0.0);
        let mut simplex = vec![v as u32];
        expand_cech(cloud, &adj, &mut simplex, &adj[v], max_dim, max_scale, &mut values, &mut out);
    }
    FilteredComplex::new(out, Some(max_dim), true)
}

#[allow(clippy::too_many_arguments)]
fn expand_cech(
    cloud: &PointCloud,
    adj: &[Vec<u32>],
    simplex: &mut Vec<u32>,
    candidates: &[u32],
    max_dim: usize,
    max_scale: f64,
    values: &mut std::collections::HashMap<Vec<u32>, f64>,
    out: &mut Vec<(Vec<u32>, f64)>,
) {
    if simplex.len() > max_dim {
        return;
    }
    for (k, &w) in candidates.iter().enumerate() {
        simplex.push(w);
        let pts: Vec<&[f64]> = simplex.iter().map(|&u| cloud.point(u as usize)).collect();
        let r = min_enclosing_ball(&pts).radius;
        // faces must not enter later than cofaces, even after rounding
        let face_max = super::facets(simplex).filter_map(|f| values.get(&f).copied()).fold(0.0, f64::max);
        let v = r.max(face_max);
        if v <= max_scale {
            values.insert(simplex.clone(), v);
            out.push((simplex.clone(), v));
            let next: Vec<u32> = candidates[k + 1..]
                .iter()
                .copied()
                .filter(|x| adj[w as usize].binary_search(x).is_ok())
                .collect();
            expand_cech(cloud, adj, simplex, &next, max_dim, max_scale, values, out);
        }
        simplex.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate_ffdata;

    #[test]
    fn two_points_rips_and_cech() {
        let c = PointCloud::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let r = build_rips(&c, &Metric::euclidean(), 1, 2.0).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.value(2), 1.0);
        let ch = build_cech(&c, &Metric::euclidean(), 1, 2.0).unwrap();
        assert_eq!(ch.value(2), 0.5);
        assert!(build_cech(&c, &Metric::chebyshev(), 1, 2.0).is_err());
    }

    #[test]
    fn single_point() {
        let c = PointCloud::new(vec![vec![3.0, 4.0]]).unwrap();
        let r = build_rips(&c, &Metric::euclidean(), 3, 1.0).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.value(0), 0.0);
        assert_eq!(build_cech(&c, &Metric::euclidean(), 3, 1.0).unwrap().len(), 1);
    }

    #[test]
    fn equilateral_triangle() {
        let s = 2.0;
        let h = s * 3f64.sqrt() / 2.0;
        let c = PointCloud::new(vec![vec![0.0, 0.0], vec![s, 0.0], vec![s / 2.0, h]]).unwrap();
        let r = build_rips(&c, &Metric::euclidean(), 2, 10.0).unwrap();
        let t = r.index_of(&[0, 1, 2]).unwrap();
        assert!((r.value(t) - s).abs() < 1e-12);
        let ch = build_cech(&c, &Metric::euclidean(), 2, 10.0).unwrap();
        let t = ch.index_of(&[0, 1, 2]).unwrap();
        assert!((ch.value(t) - s / 3f64.sqrt()).abs() < 1e-12);
        assert!(validate_ffdata(&ch).is_valid());
    }

    #[test]
    fn obtuse_triangle_ball_is_longest_edge() {
        let p: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 0.5]];
        let refs: Vec<&[f64]> = p.iter().map(|v| v.as_slice()).collect();
        let b = min_enclosing_ball(&refs);
        assert!((b.radius - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_points() {
        let p: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0], vec![1.0, 0.0]];
        let refs: Vec<&[f64]> = p.iter().map(|v| v.as_slice()).collect();
        assert!((min_enclosing_ball(&refs).radius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refuses_high_dimension() {
        let c = PointCloud::new(vec![vec![0.0; 9]]).unwrap();
        assert!(build_cech(&c, &Metric::euclidean(), 1, 1.0).is_err());
    }
}
