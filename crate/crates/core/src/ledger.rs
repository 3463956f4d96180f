//! Product ledgers: the cup products, transferred m_n and Steenrod squares of
//! positive-degree classes, written in the bar basis at every bar endpoint.
//!
//! At a snapshot time t the alive bars b carry cycles z_b forming a basis of
//! homology; the ledger uses the dual cohomology basis ξ_b. In this basis the
//! restriction to an earlier snapshot is the coordinate projection onto the
//! bars still alive there.

use serde::Serialize;

use crate::ainfty::{transfer_ainfty, AInftyStructure, PersistentAInfty, TransferOptions};
use crate::barcode::{barcode, Barcode};
use crate::complex::FilteredComplex;
use crate::contraction::ContractionBuilder;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::sparse::{Accumulator, SparseVec};
use crate::steenrod::{steenrod_squares, SquareOps, SteenrodAction};
use crate::transfer::{Rebased, StreamingTransfer, TransferData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Op {
    Cup,
    M(usize),
    Sq(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub op: Op,
    /// Bar ids of the inputs.
    pub inputs: Vec<usize>,
    /// Expansion in bar ids.
    pub output: Vec<(usize, u32)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerBar {
    pub degree: usize,
    pub birth: f64,
    pub death: f64,
}

impl LedgerBar {
    pub fn alive_at(&self, t: f64) -> bool {
        self.birth <= t && t < self.death
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerSnapshot {
    pub time: f64,
    /// Positive-degree bars alive at `time`.
    pub alive: Vec<usize>,
    pub entries: Vec<LedgerEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductLedger {
    pub field: Field,
    pub max_degree: usize,
    /// Largest arity of recorded m_n (2 = cup products only).
    pub max_arity: usize,
    /// Whether Sq^k entries were recorded.
    pub steenrod: bool,
    pub bars: Vec<LedgerBar>,
    pub snapshots: Vec<LedgerSnapshot>,
}

#[derive(Clone, Copy, Debug)]
pub struct LedgerOptions {
    pub max_arity: usize,
    pub steenrod: bool,
    /// Largest k for Sq^k (defaults to the top reliable degree).
    pub k_max: Option<usize>,
}

impl Default for LedgerOptions {
    fn default() -> Self {
        LedgerOptions { max_arity: 3, steenrod: false, k_max: None }
    }
}

impl ProductLedger {
    pub fn entries(&self, snapshot: usize, op: Op) -> impl Iterator<Item = &LedgerEntry> {
        self.snapshots[snapshot].entries.iter().filter(move |e| e.op == op)
    }

    /// Intervals of one degree, for bottleneck computations.
    pub fn diagram(&self, degree: usize) -> Vec<(f64, f64)> {
        self.bars.iter().filter(|b| b.degree == degree).map(|b| (b.birth, b.death)).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    /// The snapshot in force at `t`.
    pub fn snapshot_index_at(&self, t: f64) -> Option<usize> {
        self.snapshots.partition_point(|s| s.time <= t).checked_sub(1)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

fn ledger_times(bars: &[LedgerBar]) -> Vec<f64> {
    let mut t: Vec<f64> =
        bars.iter().filter(|b| b.degree > 0).flat_map(|b| [b.birth, b.death]).filter(|x| x.is_finite()).collect();
    t.sort_by(|a, b| a.partial_cmp(b).unwrap());
    t.dedup();
    t
}

fn ledger_bars(bc: &Barcode) -> Vec<LedgerBar> {
    bc.bars.iter().map(|b| LedgerBar { degree: b.degree, birth: b.birth, death: b.death }).collect()
}

/// Records the operations of a structure whose classes are the bars `ids`.
fn record(
    entries: &mut Vec<LedgerEntry>,
    ids: &[usize],
    degrees: &[i32],
    ainf: Option<&AInftyStructure>,
    sq: Option<&SquareOps>,
) {
    let relabel = |v: &SparseVec| -> Vec<(usize, u32)> { v.iter().map(|(k, c)| (ids[k], c)).collect() };
    if let Some(a) = ainf {
        for n in 2..=a.max_arity {
            for (t, v) in a.entries(n) {
                if t.iter().any(|&k| degrees[k] <= 0) {
                    continue;
                }
                let op = if n == 2 { Op::Cup } else { Op::M(n) };
                entries.push(LedgerEntry { op, inputs: t.iter().map(|&k| ids[k]).collect(), output: relabel(v) });
            }
        }
    }
    if let Some(s) = sq {
        for k in 1..=s.k_max {
            let m = s.sq(k).unwrap();
            for x in 0..s.dim() {
                if degrees[x] <= 0 {
                    continue;
                }
                let col = SparseVec::from_dense(Field::f2(), &m.col(x));
                if !col.is_empty() {
                    entries.push(LedgerEntry { op: Op::Sq(k), inputs: vec![ids[x]], output: relabel(&col) });
                }
            }
        }
    }
}

/// Computes the barcode and the ledger of `cx` in one pass of the
/// incremental contraction, reading the cochain contraction in place.
pub fn ledger_from_complex(cx: &FilteredComplex, field: Field, opts: LedgerOptions) -> Result<(Barcode, ProductLedger)> {
    if opts.steenrod && field.modulus() != 2 {
        return Err(Error::Unsupported("odd-p Steenrod action".into()));
    }
    let bc = barcode(cx, field)?;
    let bars = ledger_bars(&bc);
    let times = ledger_times(&bars);
    let reliable = bc.max_degree;
    let k_max = opts.k_max.unwrap_or(reliable);
    let mut snapshots = Vec::with_capacity(times.len());
    let mut b = ContractionBuilder::new(field, -1, Default::default());
    let mut next = 0;
    for k in 0..cx.len() {
        b.push(cx.dim(k) as i32, cx.boundary(k, field));
        let end_of_group = k + 1 == cx.len() || cx.value(k + 1) > cx.value(k);
        if !end_of_group || next >= times.len() || cx.value(k) != times[next] {
            continue;
        }
        let t = times[next];
        next += 1;
        let view = StreamingTransfer::new(cx, &b, reliable);
        let ids: Vec<usize> = (0..bc.bars.len()).filter(|&i| bc.bars[i].alive_at(t)).collect();
        let q = bar_change_of_basis(&view, &ids, &bc)?;
        let rb = Rebased::new(&view, q)?;
        let mut snap = LedgerSnapshot {
            time: t,
            alive: ids.iter().copied().filter(|&i| bc.bars[i].degree > 0).collect(),
            entries: Vec::new(),
        };
        if !snap.alive.is_empty() {
            let a = transfer_ainfty(&rb, TransferOptions::new(opts.max_arity.max(2)).positive_only())?;
            let sq = if opts.steenrod { Some(steenrod_squares(&rb, k_max)?) } else { None };
            record(&mut snap.entries, &ids, rb.class_degrees(), Some(&a), sq.as_ref());
        }
        snapshots.push(snap);
    }
    let ledger = ProductLedger { field, max_degree: reliable, max_arity: opts.max_arity.max(2), steenrod: opts.steenrod, bars, snapshots };
    Ok((bc, ledger))
}

/// Q with new class b = Σ_u Q[u][b]·(old class u) such that the new classes
/// are dual to the bar cycles. `proj(x)` gives p(x) over critical cells.
fn bar_change_of_basis<T: TransferData>(
    view: &T,
    ids: &[usize],
    bc: &Barcode,
) -> Result<DenseMatrix> {
    let f = view.field();
    let n = view.num_classes();
    if ids.len() != n {
        return Err(Error::BasisMismatch(format!("{} alive bars but {n} classes", ids.len())));
    }
    // P[u][b]: u-coordinate of the homology class of z_b, read off by pairing
    // with the representative cocycles.
    let reps: Vec<SparseVec> = (0..n).map(|u| view.include(u)).collect();
    let mut pm = DenseMatrix::zeros(n, n);
    for (col, &b) in ids.iter().enumerate() {
        for (u, rep) in reps.iter().enumerate() {
            pm.set(u, col, rep.dot(f, &bc.bars[b].cycle));
        }
    }
    let pinv = pm.inverse(f).ok_or_else(|| Error::BasisMismatch("bar cycles are not a homology basis".into()))?;
    Ok(pinv.transpose())
}

/// Builds the ledger from materialized persistent structures, changing
/// each snapshot to the bar basis.
pub fn build_ledger(pa: &PersistentAInfty, sq: Option<&SteenrodAction>, bc: &Barcode) -> Result<ProductLedger> {
    let f = bc.field;
    let bars = ledger_bars(bc);
    let times = ledger_times(&bars);
    let max_arity = pa.snapshots.first().map_or(2, |s| s.structure.max_arity);
    let mut snapshots = Vec::with_capacity(times.len());
    for &t in &times {
        let snap = pa.snapshot_at(t).ok_or_else(|| Error::BasisMismatch(format!("no snapshot at {t}")))?;
        let s = &snap.structure;
        if s.field != f {
            return Err(Error::FieldMismatch(s.field.characteristic(), f.characteristic()));
        }
        let n = s.dim();
        let ids: Vec<usize> = (0..bc.bars.len()).filter(|&i| bc.bars[i].alive_at(t)).collect();
        if ids.len() != n {
            return Err(Error::BasisMismatch(format!("{} alive bars but {n} classes at {t}", ids.len())));
        }
        let mut pm = DenseMatrix::zeros(n, n);
        for (col, &b) in ids.iter().enumerate() {
            for u in 0..n {
                pm.set(u, col, snap.representatives[u].dot(f, &bc.bars[b].cycle));
            }
        }
        let pinv = pm.inverse(f).ok_or_else(|| Error::BasisMismatch("bar cycles are not a homology basis".into()))?;
        let q = pinv.transpose();
        let qinv = pm.transpose();
        let qcols: Vec<SparseVec> = (0..n).map(|b| SparseVec::from_dense(f, &q.col(b))).collect();
        let to_new = |v: &SparseVec| SparseVec::from_dense(f, &qinv.apply(f, &v.to_dense(n)));
        let mut rebased = AInftyStructure::zero(f, s.degrees.clone(), s.max_arity);
        rebased.positive_only = true;
        let positive: Vec<usize> = (0..n).filter(|&k| s.degrees[k] > 0).collect();
        for arity in 2..=s.max_arity {
            let mut tuples = vec![Vec::new()];
            for _ in 0..arity {
                tuples = tuples
                    .into_iter()
                    .flat_map(|t: Vec<usize>| positive.iter().map(move |&k| [t.clone(), vec![k]].concat()))
                    .collect();
            }
            for t in tuples {
                let args: Vec<SparseVec> = t.iter().map(|&b| qcols[b].clone()).collect();
                let v = s.apply(&args);
                if !v.is_empty() {
                    rebased.set(t, to_new(&v));
                }
            }
        }
        let sq_new = match sq {
            Some(act) => {
                let k = act.values.partition_point(|&v| v <= t) - 1;
                if act.class_cells[k] != snap.class_cells {
                    return Err(Error::BasisMismatch("Steenrod and A∞ snapshots use different bases".into()));
                }
                let ops = &act.snapshots[k];
                let mats: Vec<DenseMatrix> =
                    (1..=ops.k_max).map(|j| qinv.mul(f, &ops.sq(j).unwrap()).mul(f, &q)).collect();
                Some(SquareOps::from_matrices(ops.degrees.clone(), mats))
            }
            None => None,
        };
        let mut entries = Vec::new();
        record(&mut entries, &ids, &s.degrees, Some(&rebased), sq_new.as_ref());
        snapshots.push(LedgerSnapshot {
            time: t,
            alive: ids.iter().copied().filter(|&i| bc.bars[i].degree > 0).collect(),
            entries,
        });
    }
    Ok(ProductLedger { field: f, max_degree: bc.max_degree, max_arity, steenrod: sq.is_some(), bars, snapshots })
}

/// A ledger for a persistent object whose snapshots are all quotients of one
/// fixed structure: class k lives on `class_bars[k]`, and at each snapshot the
/// operations are those of `structure` restricted to the alive classes.
pub fn synthetic_ledger(
    structure: &AInftyStructure,
    squares: Option<&SquareOps>,
    class_bars: &[(f64, f64)],
) -> Result<ProductLedger> {
    let n = structure.dim();
    if class_bars.len() != n {
        return Err(Error::BasisMismatch(format!("{} bars for {n} classes", class_bars.len())));
    }
    if squares.is_some() && structure.field.modulus() != 2 {
        return Err(Error::Unsupported("odd-p Steenrod action".into()));
    }
    let bars: Vec<LedgerBar> = class_bars
        .iter()
        .zip(&structure.degrees)
        .map(|(&(b, d), &deg)| LedgerBar { degree: deg.max(0) as usize, birth: b, death: d })
        .collect();
    let times = ledger_times(&bars);
    let ids: Vec<usize> = (0..n).collect();
    let mut all = Vec::new();
    record(&mut all, &ids, &structure.degrees, Some(structure), squares);
    let snapshots = times
        .iter()
        .map(|&t| {
            let alive = |k: usize| bars[k].alive_at(t);
            let entries = all
                .iter()
                .filter(|e| e.inputs.iter().all(|&k| alive(k)))
                .filter_map(|e| {
                    let output: Vec<(usize, u32)> = e.output.iter().copied().filter(|&(k, _)| alive(k)).collect();
                    (!output.is_empty()).then(|| LedgerEntry { op: e.op, inputs: e.inputs.clone(), output })
                })
                .collect();
            LedgerSnapshot { time: t, alive: (0..n).filter(|&k| bars[k].degree > 0 && alive(k)).collect(), entries }
        })
        .collect();
    Ok(ProductLedger {
        field: structure.field,
        max_degree: structure.degrees.iter().copied().max().unwrap_or(0).max(0) as usize,
        max_arity: structure.max_arity,
        steenrod: squares.is_some(),
        bars,
        snapshots,
    })
}

/// Expansion helper: Σ coefficients of `entries` as a sparse vector.
pub fn output_vector(field: Field, e: &LedgerEntry) -> SparseVec {
    let mut acc = Accumulator::new(field);
    for &(k, c) in &e.output {
        acc.add_entry(k, c);
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty::persistent_ainfty;
    use crate::contraction::incremental_contraction;
    use crate::samples;
    use crate::steenrod::persistent_steenrod;

    #[test]
    fn torus_and_wedge_cup_tables() {
        let (wedge, torus) = samples::torus_vs_wedge(0.1);
        let f = Field::f2();
        let (_, lw) = ledger_from_complex(&wedge, f, LedgerOptions::default()).unwrap();
        assert!(lw.snapshots.iter().all(|s| s.entries.iter().all(|e| e.op != Op::Cup)));
        let (bt, lt) = ledger_from_complex(&torus, f, LedgerOptions::default()).unwrap();
        let k = lt.snapshot_index_at(0.5).unwrap();
        let cups: Vec<_> = lt.entries(k, Op::Cup).collect();
        assert!(!cups.is_empty());
        for e in cups {
            assert!(e.inputs.iter().all(|&b| bt.bars[b].degree == 1));
            assert!(e.output.iter().all(|&(b, _)| bt.bars[b].degree == 2));
        }
    }

    #[test]
    fn streaming_and_materialized_ledgers_agree() {
        let f = Field::f2();
        for cx in [samples::torus_vs_wedge(0.1).1, samples::suspended_rp2_vs_ball(0.1).0] {
            let opts = LedgerOptions { max_arity: 3, steenrod: true, k_max: None };
            let (bc, streamed) = ledger_from_complex(&cx, f, opts).unwrap();
            let ptd = incremental_contraction(&cx, f).unwrap();
            let pa = persistent_ainfty(&cx, &ptd, TransferOptions::new(3).positive_only()).unwrap();
            let sq = persistent_steenrod(&cx, &ptd, None).unwrap();
            let built = build_ledger(&pa, Some(&sq), &bc).unwrap();
            assert_eq!(streamed, built);
        }
    }

    #[test]
    fn synthetic_restricts_to_alive_classes() {
        let f = Field::f2();
        let mut s = AInftyStructure::zero(f, vec![1, 1, 2], 3);
        s.set(vec![0, 1], SparseVec::unit(2));
        let l = synthetic_ledger(&s, None, &[(0.0, 1.0), (0.0, 2.0), (0.5, 3.0)]).unwrap();
        assert_eq!(l.times(), vec![0.0, 0.5, 1.0, 2.0, 3.0]);
        assert_eq!(l.entries(0, Op::Cup).count(), 0);
        assert_eq!(l.entries(1, Op::Cup).count(), 1);
        assert_eq!(l.entries(2, Op::Cup).count(), 0);
    }
}
