use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_labels(points, None)
    }

    pub fn with_labels(points: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("empty point cloud".into()));
        }
        let d = points[0].len();
        if let Some(k) = points.iter().position(|p| p.len() != d) {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch: point {k} has {} coordinates, expected {d}",
                points[k].len()
            )));
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        if let Some(l) = &labels {
            if l.len() != points.len() {
                return Err(Error::InvalidInput("label count differs from point count".into()));
            }
        }
        Ok(PointCloud { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Parses CSV with one point per row; a non-numeric first row is a header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut points = Vec::new();
        for (line, row) in rdr.records().enumerate() {
            let row = row?;
            if row.iter().all(|f| f.is_empty()) {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> = row.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(p) => points.push(p),
                Err(_) if line == 0 => continue,
                Err(e) => return Err(Error::Parse { line: line + 1, msg: e.to_string() }),
            }
        }
        Self::new(points)
    }

    /// Parses a JSON array of coordinate arrays.
    pub fn from_json(text: &str) -> Result<Self> {
        let points: Vec<Vec<f64>> = serde_json::from_str(text)?;
        Self::new(points)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Euclidean,
    Chebyshev,
    ExplicitMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub kind: MetricKind,
    pub matrix: Option<Vec<Vec<f64>>>,
}

impl Metric {
    pub fn euclidean() -> Self {
        Metric { kind: MetricKind::Euclidean, matrix: None }
    }

    pub fn chebyshev() -> Self {
        Metric { kind: MetricKind::Chebyshev, matrix: None }
    }

    /// An explicit distance matrix; checked for shape, symmetry, zero
    /// diagonal and nonnegativity.
    pub fn explicit(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = matrix.len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!("distance matrix row {i} has length {}", row.len())));
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero diagonal entry at {i}")));
            }
            for (j, &d) in row.iter().enumerate() {
                if !(d >= 0.0) || !d.is_finite() {
                    return Err(Error::InvalidInput(format!("invalid distance at ({i},{j})")));
                }
                if d != matrix[j][i] {
                    return Err(Error::InvalidInput(format!("non-symmetric matrix at ({i},{j})")));
                }
            }
        }
        Ok(Metric { kind: MetricKind::ExplicitMatrix, matrix: Some(matrix) })
    }

    /// Checks compatibility with a cloud (matrix size).
    pub fn check(&self, cloud: &PointCloud) -> Result<()> {
        if let Some(m) = &self.matrix {
            if m.len() != cloud.len() {
                return Err(Error::InvalidInput(format!(
                    "distance matrix is {}×{} but the cloud has {} points",
                    m.len(),
                    m.len(),
                    cloud.len()
                )));
            }
        } else if self.kind == MetricKind::ExplicitMatrix {
            return Err(Error::InvalidInput("explicit metric without a matrix".into()));
        }
        Ok(())
    }

    pub fn distance(&self, cloud: &PointCloud, i: usize, j: usize) -> f64 {
        match self.kind {
            MetricKind::Euclidean => {
                let (a, b) = (cloud.point(i), cloud.point(j));
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            }
            MetricKind::Chebyshev => {
                let (a, b) = (cloud.point(i), cloud.point(j));
                a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            }
            MetricKind::ExplicitMatrix => self.matrix.as_ref().expect("checked")[i][j],
        }
    }

    pub fn distance_matrix(&self, cloud: &PointCloud) -> Result<Vec<Vec<f64>>> {
        self.check(cloud)?;
        let n = cloud.len();
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = self.distance(cloud, i, j);
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn identity(n: usize) -> Self {
        Correspondence { pairs: (0..n).map(|i| (i, i)).collect() }
    }

    pub fn transpose(&self) -> Self {
        Correspondence { pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect() }
    }

    pub fn validate(&self, nx: usize, ny: usize) -> Result<()> {
        let xs: HashSet<usize> = self.pairs.iter().map(|p| p.0).collect();
        let ys: HashSet<usize> = self.pairs.iter().map(|p| p.1).collect();
        if self.pairs.iter().any(|&(a, b)| a >= nx || b >= ny) {
            return Err(Error::InvalidInput("correspondence index out of range".into()));
        }
        if xs.len() != nx || ys.len() != ny {
            return Err(Error::InvalidInput("non-surjective projection in correspondence".into()));
        }
        Ok(())
    }
}

/// sup over pairs of pairs of |d_X(x,x′) − d_Y(y,y′)|.
pub fn distortion(
    corr: &Correspondence,
    x: (&PointCloud, &Metric),
    y: (&PointCloud, &Metric),
) -> Result<f64> {
    corr.validate(x.0.len(), y.0.len())?;
    let dx = x.1.distance_matrix(x.0)?;
    let dy = y.1.distance_matrix(y.0)?;
    let mut worst: f64 = 0.0;
    for (k, &(a, b)) in corr.pairs.iter().enumerate() {
        for &(c, d) in &corr.pairs[k + 1..] {
            worst = worst.max((dx[a][c] - dy[b][d]).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_with_header() {
        let c = PointCloud::from_csv("x,y\n0,0\n1, 2\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.point(1), &[1.0, 2.0]);
        assert!(PointCloud::from_csv("").is_err());
        assert!(PointCloud::from_csv("0,0\n1\n").is_err());
    }

    #[test]
    fn explicit_metric_checks() {
        assert!(Metric::explicit(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        let m = Metric::explicit(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let c = PointCloud::new(vec![vec![], vec![]]).unwrap();
        assert_eq!(m.distance(&c, 0, 1), 1.0);
        let c3 = PointCloud::new(vec![vec![], vec![], vec![]]).unwrap();
        assert!(m.check(&c3).is_err());
    }

    #[test]
    fn distortion_of_translate_is_zero() {
        let x = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let y = PointCloud::new(x.points().iter().map(|p| vec![p[0] + 5.0, p[1] - 1.0]).collect()).unwrap();
        let e = Metric::euclidean();
        let c = Correspondence::identity(3);
        assert!(distortion(&c, (&x, &e), (&y, &e)).unwrap() < 1e-12);
        let bad = Correspondence { pairs: vec![(0, 0), (1, 1)] };
        assert!(distortion(&bad, (&x, &e), (&y, &e)).is_err());
    }
}
