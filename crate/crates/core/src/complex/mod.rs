//! Filtered simplicial complexes and the finite-filtered-data checks.

mod cloud;
mod io;
mod rips;

pub use cloud::{distortion, Correspondence, Metric, MetricKind, PointCloud};
pub use io::{
    export_json, export_text, import_filtration, import_json, import_text, parse_text_records,
    FiltrationRecord,
};
pub use rips::{build_cech, build_rips, min_enclosing_ball, Ball, Convention, MAX_CECH_DIM};

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::sparse::SparseVec;

/// One simplex with its filtration value and position in the total order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexRecord {
    pub vertices: Vec<u32>,
    pub value: f64,
    pub order: usize,
}

impl SimplexRecord {
    pub fn dim(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }
}

/// A finite filtered simplicial complex.
///
/// Complexes built through [`FilteredComplex::new`] (and everything derived
/// from it) are canonical: records are stored in order-index order and
/// `records[k].order == k`. Only [`FilteredComplex::from_records_unchecked`]
/// can produce anything else, and it exists for validation diagnostics.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    records: Vec<SimplexRecord>,
    index: HashMap<Vec<u32>, usize>,
    dimension_cap: usize,
    truncated: bool,
    critical_values: Vec<f64>,
    by_dim: Vec<Vec<usize>>,
}

impl PartialEq for FilteredComplex {
    fn eq(&self, other: &Self) -> bool {
        self.records.len() == other.records.len()
            && self.dimension_cap == other.dimension_cap
            && self.truncated == other.truncated
            && self.records.iter().zip(&other.records).all(|(a, b)| {
                a.vertices == b.vertices && a.value.to_bits() == b.value.to_bits() && a.order == b.order
            })
    }
}

impl FilteredComplex {
    /// Canonicalizes `(vertices, value)` pairs: sorts vertex lists, orders by
    /// (value, dimension, lexicographic vertices) and checks faces.
    ///
    /// `dimension_cap` defaults to the top simplex dimension. A `truncated`
    /// complex is a skeleton of something larger (Rips/Čech at `maxDim`), so
    /// its top degree of (co)homology is not meaningful.
    pub fn new(
        simplices: Vec<(Vec<u32>, f64)>,
        dimension_cap: Option<usize>,
        truncated: bool,
    ) -> Result<Self> {
        let mut simplices: Vec<(Vec<u32>, f64)> = simplices
            .into_iter()
            .map(|(mut v, a)| {
                v.sort_unstable();
                (v, a)
            })
            .collect();
        for (v, a) in &simplices {
            if v.is_empty() {
                return Err(Error::InvalidInput("empty simplex".into()));
            }
            if v.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput(format!("repeated vertex in {v:?}")));
            }
            if !a.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite filtration value for {v:?}")));
            }
        }
        simplices.sort_by(|a, b| {
            a.1.total_cmp(&b.1)
                .then(a.0.len().cmp(&b.0.len()))
                .then_with(|| a.0.cmp(&b.0))
        });
        let top = simplices.iter().map(|s| s.0.len() - 1).max().unwrap_or(0);
        let cap = dimension_cap.unwrap_or(top);
        if top > cap {
            return Err(Error::InvalidInput(format!("simplex of dimension {top} exceeds cap {cap}")));
        }
        let mut index = HashMap::with_capacity(simplices.len());
        let mut records = Vec::with_capacity(simplices.len());
        for (k, (v, a)) in simplices.into_iter().enumerate() {
            if index.insert(v.clone(), k).is_some() {
                return Err(Error::Duplicate(v));
            }
            records.push(SimplexRecord { vertices: v, value: a, order: k });
        }
        for r in &records {
            if r.vertices.len() < 2 {
                continue;
            }
            for f in facets(&r.vertices) {
                match index.get(&f) {
                    None => return Err(Error::MissingFace { face: f, simplex: r.vertices.clone() }),
                    Some(&j) if records[j].value > r.value => {
                        return Err(Error::Monotonicity { face: f, simplex: r.vertices.clone() })
                    }
                    Some(_) => {}
                }
            }
        }
        let critical_values = distinct_values(&records);
        let by_dim = group_by_dim(&records);
        Ok(FilteredComplex { records, index, dimension_cap: cap, truncated, critical_values, by_dim })
    }

    /// Stores records verbatim, for exercising [`validate_ffdata`].
    pub fn from_records_unchecked(records: Vec<SimplexRecord>, dimension_cap: usize) -> Self {
        let mut index = HashMap::new();
        for (k, r) in records.iter().enumerate() {
            index.entry(r.vertices.clone()).or_insert(k);
        }
        let mut sorted: Vec<SimplexRecord> = records.clone();
        sorted.sort_by(|a, b| a.value.total_cmp(&b.value));
        let critical_values = distinct_values(&sorted);
        let by_dim = group_by_dim(&records);
        FilteredComplex { records, index, dimension_cap, truncated: false, critical_values, by_dim }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[SimplexRecord] {
        &self.records
    }

    pub fn vertices(&self, k: usize) -> &[u32] {
        &self.records[k].vertices
    }

    pub fn value(&self, k: usize) -> f64 {
        self.records[k].value
    }

    pub fn dim(&self, k: usize) -> usize {
        self.records[k].dim()
    }

    pub fn dimension_cap(&self) -> usize {
        self.dimension_cap
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Highest degree whose (co)homology is that of the untruncated object.
    pub fn max_reliable_degree(&self) -> usize {
        let top = self.records.iter().map(|r| r.dim()).max().unwrap_or(0);
        if self.truncated {
            self.dimension_cap.saturating_sub(1)
        } else {
            top
        }
    }

    /// Positions of the `d`-simplices, ascending.
    pub fn simplices_of_dim(&self, d: usize) -> &[usize] {
        self.by_dim.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn top_dim(&self) -> usize {
        self.by_dim.len().saturating_sub(1)
    }

    pub fn index_of(&self, vertices: &[u32]) -> Option<usize> {
        self.index.get(vertices).copied()
    }

    pub fn critical_values(&self) -> &[f64] {
        &self.critical_values
    }

    /// Number of simplices with value ≤ t (a prefix, since the order refines values).
    pub fn prefix_len(&self, t: f64) -> usize {
        self.records.partition_point(|r| r.value <= t)
    }

    /// Midpoints of consecutive critical values and one point past the last.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let c = &self.critical_values;
        let mut out: Vec<f64> = c.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        if let Some(&last) = c.last() {
            out.push(last + 1.0);
        }
        out
    }

    /// Signed boundary of simplex `k` in terms of record positions.
    pub fn boundary(&self, k: usize, field: Field) -> SparseVec {
        let v = &self.records[k].vertices;
        if v.len() < 2 {
            return SparseVec::new();
        }
        SparseVec::from_pairs(
            field,
            facets(v).enumerate().map(|(i, f)| {
                let j = self.index[&f];
                (j, field.sign(i))
            }),
        )
    }

    /// Multiplies every filtration value by `factor > 0`.
    pub fn rescaled(&self, factor: f64) -> FilteredComplex {
        let mut out = self.clone();
        for r in &mut out.records {
            r.value *= factor;
        }
        out.critical_values = distinct_values(&out.records);
        out
    }
}

/// The facets of a sorted vertex list, in order of the removed position.
pub fn facets(v: &[u32]) -> impl Iterator<Item = Vec<u32>> + '_ {
    (0..v.len()).map(move |i| {
        let mut f = Vec::with_capacity(v.len() - 1);
        f.extend_from_slice(&v[..i]);
        f.extend_from_slice(&v[i + 1..]);
        f
    })
}

fn group_by_dim(records: &[SimplexRecord]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (k, r) in records.iter().enumerate() {
        let d = r.dim();
        if out.len() <= d {
            out.resize(d + 1, Vec::new());
        }
        out[d].push(k);
    }
    out
}

fn distinct_values(records: &[SimplexRecord]) -> Vec<f64> {
    let mut v: Vec<f64> = records.iter().map(|r| r.value).filter(|a| a.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// One violated condition of finite filtered data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    /// Which of the four conditions (1)–(4) failed.
    pub condition: u8,
    pub message: String,
    /// Positions in the record list of the witnessing simplices.
    pub witnesses: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, condition: u8) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }
}

/// Checks the four finite-filtered-data conditions:
/// (1) every stage is a finite simplicial complex (well-formed, unique simplices),
/// (2) faces enter no later than cofaces,
/// (3) finitely many stages (all values finite),
/// (4) the order index is a total order refining both faces and values.
pub fn validate_ffdata(cx: &FilteredComplex) -> ValidationReport {
    let mut out = Vec::new();
    let recs = &cx.records;
    let mut seen: HashMap<&[u32], usize> = HashMap::new();
    for (k, r) in recs.iter().enumerate() {
        if r.vertices.is_empty() || r.vertices.windows(2).any(|w| w[0] >= w[1]) {
            out.push(Violation {
                condition: 1,
                message: format!("malformed vertex list {:?}", r.vertices),
                witnesses: vec![k],
            });
        } else if r.dim() > cx.dimension_cap {
            out.push(Violation {
                condition: 1,
                message: format!("{:?} exceeds dimension cap {}", r.vertices, cx.dimension_cap),
                witnesses: vec![k],
            });
        }
        if let Some(&j) = seen.get(r.vertices.as_slice()) {
            out.push(Violation {
                condition: 1,
                message: format!("duplicate simplex {:?}", r.vertices),
                witnesses: vec![j, k],
            });
        } else {
            seen.insert(&r.vertices, k);
        }
        if !r.value.is_finite() {
            out.push(Violation {
                condition: 3,
                message: format!("non-finite value {} for {:?}", r.value, r.vertices),
                witnesses: vec![k],
            });
        }
    }
    for (k, r) in recs.iter().enumerate() {
        if r.vertices.len() < 2 || r.vertices.windows(2).any(|w| w[0] >= w[1]) {
            continue;
        }
        for f in facets(&r.vertices) {
            match cx.index.get(&f) {
                None => out.push(Violation {
                    condition: 2,
                    message: format!("missing face {f:?} of {:?}", r.vertices),
                    witnesses: vec![k],
                }),
                Some(&j) => {
                    if recs[j].value > r.value {
                        out.push(Violation {
                            condition: 2,
                            message: format!(
                                "face {f:?} enters at {} after {:?} at {}",
                                recs[j].value, r.vertices, r.value
                            ),
                            witnesses: vec![j, k],
                        });
                    }
                    if recs[j].order >= r.order {
                        out.push(Violation {
                            condition: 4,
                            message: format!("face {f:?} is not ordered before {:?}", r.vertices),
                            witnesses: vec![j, k],
                        });
                    }
                }
            }
        }
    }
    let n = recs.len();
    let mut by_order: Vec<Option<usize>> = vec![None; n];
    let mut perm_ok = true;
    for (k, r) in recs.iter().enumerate() {
        if r.order >= n || by_order[r.order].is_some() {
            perm_ok = false;
            out.push(Violation {
                condition: 4,
                message: format!("order index {} is not a permutation entry", r.order),
                witnesses: vec![k],
            });
        } else {
            by_order[r.order] = Some(k);
        }
    }
    if perm_ok {
        for w in by_order.windows(2) {
            let (a, b) = (w[0].unwrap(), w[1].unwrap());
            if recs[a].value > recs[b].value {
                out.push(Violation {
                    condition: 4,
                    message: format!(
                        "{:?} (value {}) is ordered before {:?} (value {})",
                        recs[a].vertices, recs[a].value, recs[b].vertices, recs[b].value
                    ),
                    witnesses: vec![a, b],
                });
            }
        }
    }
    ValidationReport { violations: out }
}

/// Validates and returns an error describing the first violation.
pub fn require_ffdata(cx: &FilteredComplex) -> Result<()> {
    let rep = validate_ffdata(cx);
    match rep.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::FfData(format!("condition ({}): {}", v.condition, v.message))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(v: &[u32], value: f64, order: usize) -> SimplexRecord {
        SimplexRecord { vertices: v.to_vec(), value, order }
    }

    #[test]
    fn canonical_order_and_faces() {
        let cx = FilteredComplex::new(
            vec![(vec![1, 0], 1.0), (vec![0], 0.0), (vec![1], 0.0)],
            None,
            false,
        )
        .unwrap();
        assert_eq!(cx.vertices(2), &[0, 1]);
        assert_eq!(cx.critical_values(), &[0.0, 1.0]);
        assert_eq!(cx.snapshot_times(), vec![0.5, 2.0]);
        assert!(validate_ffdata(&cx).is_valid());
        let b = cx.boundary(2, Field::f3());
        assert_eq!(b.entries(), &[(0, 2), (1, 1)]);
    }

    #[test]
    fn missing_face_rejected() {
        let err = FilteredComplex::new(vec![(vec![0], 0.0), (vec![0, 1], 1.0)], None, false).unwrap_err();
        assert!(err.to_string().contains("missing face"));
    }

    #[test]
    fn triangle_before_edge_is_condition_two() {
        let recs = vec![
            rec(&[0], 0.0, 0),
            rec(&[1], 0.0, 1),
            rec(&[2], 0.0, 2),
            rec(&[0, 1], 0.0, 3),
            rec(&[0, 2], 0.0, 4),
            rec(&[1, 2], 2.0, 6),
            rec(&[0, 1, 2], 1.0, 5),
        ];
        let rep = validate_ffdata(&FilteredComplex::from_records_unchecked(recs, 2));
        assert!(rep.violates(2));
    }

    #[test]
    fn order_against_values_is_condition_four() {
        let recs = vec![rec(&[0], 1.0, 0), rec(&[1], 0.0, 1)];
        let rep = validate_ffdata(&FilteredComplex::from_records_unchecked(recs, 0));
        assert!(rep.violates(4));
        assert!(!rep.violates(2));
    }
}
