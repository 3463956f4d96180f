//! Barcodes by the standard column reduction R = ∂V, with a generating
//! cycle attached to every bar, plus JSON and SVG emitters.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::complex::{require_ffdata, FilteredComplex};
use crate::error::Result;
use crate::field::Field;
use crate::sparse::SparseVec;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bar {
    pub degree: usize,
    pub birth: f64,
    /// `f64::INFINITY` for essential classes.
    pub death: f64,
    pub birth_cell: usize,
    pub death_cell: Option<usize>,
    /// A cycle whose class generates the bar while it is alive.
    pub cycle: SparseVec,
}

impl Bar {
    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    pub fn alive_at(&self, t: f64) -> bool {
        self.birth <= t && t < self.death
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Barcode {
    pub field: Field,
    /// Largest degree with reliable bars.
    pub max_degree: usize,
    pub bars: Vec<Bar>,
}

/// Persistence pairs of `cx` over `field`. Zero-length pairs are dropped;
/// degrees above the reliable range of truncated complexes are omitted.
pub fn barcode(cx: &FilteredComplex, field: Field) -> Result<Barcode> {
    require_ffdata(cx)?;
    let n = cx.len();
    let mut r: Vec<SparseVec> = Vec::with_capacity(n);
    let mut v: Vec<SparseVec> = Vec::with_capacity(n);
    let mut low_owner: Vec<Option<usize>> = vec![None; n];
    let mut paired_death: Vec<Option<usize>> = vec![None; n];
    for j in 0..n {
        let mut col = cx.boundary(j, field);
        let mut vj = SparseVec::unit(j);
        while let Some((low, a)) = col.last() {
            let Some(k) = low_owner[low] else { break };
            let b = r[k].last().unwrap().1;
            let s = field.neg(field.mul(a, field.inv(b)));
            col.axpy(field, s, &r[k]);
            vj.axpy(field, s, &v[k]);
        }
        if let Some((low, _)) = col.last() {
            low_owner[low] = Some(j);
            paired_death[low] = Some(j);
        }
        r.push(col);
        v.push(vj);
    }
    let max_degree = cx.max_reliable_degree();
    let mut bars = Vec::new();
    for i in 0..n {
        let deg = cx.dim(i);
        if deg > max_degree || !r[i].is_empty() {
            continue;
        }
        match paired_death[i] {
            Some(j) => {
                if cx.value(j) > cx.value(i) {
                    bars.push(Bar {
                        degree: deg,
                        birth: cx.value(i),
                        death: cx.value(j),
                        birth_cell: i,
                        death_cell: Some(j),
                        cycle: r[j].clone(),
                    });
                }
            }
            None => bars.push(Bar {
                degree: deg,
                birth: cx.value(i),
                death: f64::INFINITY,
                birth_cell: i,
                death_cell: None,
                cycle: v[i].clone(),
            }),
        }
    }
    bars.sort_by(|a, b| {
        (a.degree, a.birth, a.birth_cell).partial_cmp(&(b.degree, b.birth, b.birth_cell)).unwrap()
    });
    Ok(Barcode { field, max_degree, bars })
}

impl Barcode {
    pub fn empty(field: Field, max_degree: usize) -> Self {
        Barcode { field, max_degree, bars: Vec::new() }
    }

    /// Intervals of one degree.
    pub fn diagram(&self, degree: usize) -> Vec<(f64, f64)> {
        self.bars.iter().filter(|b| b.degree == degree).map(|b| (b.birth, b.death)).collect()
    }

    pub fn betti_at(&self, degree: usize, t: f64) -> usize {
        self.bars.iter().filter(|b| b.degree == degree && b.alive_at(t)).count()
    }

    /// Indices of bars alive at `t`.
    pub fn alive(&self, t: f64) -> Vec<usize> {
        (0..self.bars.len()).filter(|&k| self.bars[k].alive_at(t)).collect()
    }

    /// Sorted distinct finite endpoints.
    pub fn endpoints(&self) -> Vec<f64> {
        let mut e: Vec<f64> =
            self.bars.iter().flat_map(|b| [b.birth, b.death]).filter(|x| x.is_finite()).collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e.dedup();
        e
    }

    /// degree → list of [birth, death] with "inf" for essential bars.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map: BTreeMap<String, Vec<serde_json::Value>> = BTreeMap::new();
        for d in 0..=self.max_degree {
            map.insert(d.to_string(), Vec::new());
        }
        for b in &self.bars {
            let death = if b.death.is_finite() { serde_json::json!(b.death) } else { serde_json::json!("inf") };
            map.entry(b.degree.to_string()).or_default().push(serde_json::json!([b.birth, death]));
        }
        serde_json::to_value(map).expect("serializable")
    }

    /// One band per degree, bars sorted by birth; essential bars run to the
    /// right edge with an arrow.
    pub fn to_svg(&self) -> String {
        let width = 640.0;
        let margin = 40.0;
        let row = 8.0;
        let ends = self.endpoints();
        let tmax = ends.last().copied().unwrap_or(1.0).max(1e-12) * 1.1;
        let x = |t: f64| margin + (width - 2.0 * margin) * (t.min(tmax) / tmax);
        let mut body = String::new();
        let mut y = 20.0;
        for d in 0..=self.max_degree {
            let mut bars: Vec<&Bar> = self.bars.iter().filter(|b| b.degree == d).collect();
            bars.sort_by(|a, b| a.birth.partial_cmp(&b.birth).unwrap());
            body.push_str(&format!(
                "<text x=\"4\" y=\"{:.1}\" font-size=\"12\" font-family=\"monospace\">H{d}</text>\n",
                y + 10.0
            ));
            y += 16.0;
            for b in &bars {
                let x1 = x(b.birth);
                let x2 = if b.death.is_finite() { x(b.death) } else { width - margin / 2.0 };
                body.push_str(&format!(
                    "<line x1=\"{x1:.2}\" y1=\"{y:.1}\" x2=\"{x2:.2}\" y2=\"{y:.1}\" stroke=\"black\" stroke-width=\"3\"/>\n"
                ));
                if !b.death.is_finite() {
                    body.push_str(&format!(
                        "<polygon points=\"{x2:.2},{:.1} {:.2},{y:.1} {x2:.2},{:.1}\"/>\n",
                        y - 4.0,
                        x2 + 6.0,
                        y + 4.0
                    ));
                }
                y += row;
            }
            y += 12.0;
        }
        let axis = format!(
            "<line x1=\"{margin}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"gray\"/>\n<text x=\"{margin}\" y=\"{:.1}\" font-size=\"10\">0</text>\n<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\">{:.4}</text>\n",
            width - margin,
            y + 12.0,
            width - margin - 20.0,
            y + 12.0,
            tmax
        );
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{:.0}\" viewBox=\"0 0 {width} {:.0}\">\n{body}{axis}</svg>\n",
            y + 20.0,
            y + 20.0
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::chain_complex_of_prefix;
    use crate::complex::import_text;
    use crate::samples;

    #[test]
    fn single_vertex_and_two_points() {
        let b = barcode(&samples::full_simplex(0), Field::f2()).unwrap();
        assert_eq!(b.diagram(0), vec![(0.0, f64::INFINITY)]);
        let cx = import_text("0 ; 0\n1 ; 0\n0 1 ; 1\n").unwrap();
        let b = barcode(&cx, Field::f2()).unwrap();
        assert_eq!(b.diagram(0), vec![(0.0, f64::INFINITY), (0.0, 1.0)]);
        assert_eq!(b.to_json()["0"], serde_json::json!([[0.0, "inf"], [0.0, 1.0]]));
        assert!(b.to_svg().starts_with("<svg"));
    }

    #[test]
    fn bars_match_ranks_and_cycles_are_cycles() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for f in [Field::f2(), Field::f3()] {
            for _ in 0..40 {
                let cx = samples::random_filtered_complex(&mut rng, 40, 7, 3);
                let b = barcode(&cx, f).unwrap();
                for t in cx.snapshot_times() {
                    let cc = chain_complex_of_prefix(&cx, cx.prefix_len(t), f);
                    for d in 0..=cx.top_dim() {
                        assert_eq!(b.betti_at(d, t), cc.betti(d));
                    }
                }
                for bar in &b.bars {
                    let mut acc = crate::sparse::Accumulator::new(f);
                    for (k, a) in bar.cycle.iter() {
                        acc.add(a, &cx.boundary(k, f));
                    }
                    assert!(acc.finish().is_empty());
                }
            }
        }
    }
}
