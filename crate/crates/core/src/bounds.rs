//! Certified lower and upper bounds for the structured interleaving
//! distances.
//!
//! Lower bounds are obstructions: an ε-interleaving of structured persistent
//! objects factors every restriction X(t) → X(s) with t − s > 2ε through
//! Y(t − ε) → Y(s + ε), and the factorization respects products, m_n (modulo
//! decomposables) and Steenrod squares. Hence for every natural family F of
//! subspaces the rank of F under restriction in X is bounded by the rank of
//! F in Y over the shrunken window. The bound is the largest candidate ε at
//! which some such inequality fails.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::bottleneck::bottleneck;
use crate::complex::{build_rips, distortion, Correspondence, FilteredComplex, Metric, PointCloud};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::ledger::{ledger_from_complex, LedgerBar, LedgerOptions, Op, ProductLedger};
use crate::sparse::{Accumulator, SparseVec};

/// Absolute tolerance for endpoint arithmetic.
pub const TOL: f64 = 1e-9;

/// Largest number of tensors examined per Massey family and snapshot;
/// larger families are skipped (which only weakens the bound).
pub const MASSEY_TENSOR_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Graded,
    Cup,
    AInfty,
    Steenrod,
    Combined,
}

impl Structure {
    pub const ALL: [Structure; 5] =
        [Structure::Graded, Structure::Cup, Structure::AInfty, Structure::Steenrod, Structure::Combined];

    pub fn distance_name(self) -> &'static str {
        match self {
            Structure::Graded => "d_grVect",
            Structure::Cup => "d_As",
            Structure::AInfty => "d_A∞",
            Structure::Steenrod => "d_{A2-As}",
            Structure::Combined => "d_{2∞}",
        }
    }

    pub fn needs_steenrod(self) -> bool {
        matches!(self, Structure::Steenrod | Structure::Combined)
    }

    fn includes(self, fam: &Family) -> bool {
        match fam {
            Family::Cup { .. } => self != Structure::Graded,
            Family::Massey3 { .. } | Family::Higher { .. } => matches!(self, Structure::AInfty | Structure::Combined),
            Family::Sq { .. } | Family::Joint { .. } => self.needs_steenrod(),
        }
    }
}

impl std::str::FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graded" => Ok(Structure::Graded),
            "cup" => Ok(Structure::Cup),
            "ainfty" => Ok(Structure::AInfty),
            "steenrod" => Ok(Structure::Steenrod),
            "combined" => Ok(Structure::Combined),
            _ => Err(Error::InvalidInput(format!("unknown structure '{s}'"))),
        }
    }
}

/// A natural family of subspaces of positive-degree cohomology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    /// Span of products H^p · H^q.
    Cup { p: usize, q: usize },
    /// m₃ on the tensors of degrees (p, q, r) killed by m₂ ⊗ 1 and 1 ⊗ m₂,
    /// modulo decomposables.
    Massey3 { p: usize, q: usize, r: usize },
    /// Span of m_n outputs in degree d (used only when every lower
    /// operation vanishes, so that m_n is strictly natural).
    Higher { n: usize, d: usize },
    /// Image of Sq^i on H^n.
    Sq { i: usize, n: usize },
    /// Span of all products and squares landing in degree d.
    Joint { d: usize },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Cup { p, q } => write!(f, "cup H{p}·H{q}"),
            Family::Massey3 { p, q, r } => write!(f, "m3 on ker(m2) in H{p}⊗H{q}⊗H{r} mod decomposables"),
            Family::Higher { n, d } => write!(f, "m{n} into H{d}"),
            Family::Sq { i, n } => write!(f, "Sq{i} on H{n}"),
            Family::Joint { d } => write!(f, "products and squares into H{d}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

/// A failed rank inequality ρ_source(s, t) ≤ ρ_target(s + ε, t − ε).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub family: String,
    /// "X→Y" when X's rank exceeds Y's.
    pub direction: String,
    pub epsilon: f64,
    /// Restriction window in the source: from just below `upper` down to `lower`.
    pub lower: f64,
    pub upper: f64,
    pub source_rank: usize,
    pub target_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TranscriptStep {
    pub epsilon: f64,
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// The value is the bottleneck distance in `degree`.
    Bottleneck { degree: usize },
    /// No compatible ε-interleaving exists for ε below the value.
    Obstruction {
        violation: Violation,
        transcript: Vec<TranscriptStep>,
        per_family: Vec<(String, f64)>,
        skipped: Vec<String>,
    },
    /// Zero positive-degree maps with unit maps on H⁰ form an interleaving.
    Interleaving { positive_span: f64, degree0: f64 },
    /// Maximum over the listed component bounds.
    Maximum { parts: Vec<(String, f64)>, note: String },
    /// Nothing could be certified.
    None { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceBound {
    pub distance: String,
    pub kind: BoundKind,
    /// Characteristic of the coefficient field (0 for the proxy prime).
    pub field: u32,
    pub value: f64,
    pub certificate: Certificate,
}

impl DistanceBound {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("serializable");
        if !self.value.is_finite() {
            v["value"] = serde_json::json!("inf");
        }
        v
    }
}

// ---------------------------------------------------------------------------
// rank tables

fn entry_vec(field: Field, out: &[(usize, u32)]) -> SparseVec {
    let mut acc = Accumulator::new(field);
    for &(k, c) in out {
        acc.add_entry(k, c);
    }
    acc.finish()
}

fn out_degree(l: &ProductLedger, out: &[(usize, u32)]) -> Option<usize> {
    out.first().map(|&(b, _)| l.bars[b].degree)
}

/// Row-reduces `vecs` (bar coordinates restricted to `coords`) to a basis.
fn reduce(field: Field, vecs: &[SparseVec], coords: &[usize]) -> Vec<SparseVec> {
    if vecs.is_empty() || coords.is_empty() {
        return Vec::new();
    }
    let pos: HashMap<usize, usize> = coords.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let rows: Vec<Vec<u32>> = vecs
        .iter()
        .map(|v| {
            let mut r = vec![0; coords.len()];
            for (b, c) in v.iter() {
                if let Some(&i) = pos.get(&b) {
                    r[i] = c;
                }
            }
            r
        })
        .collect();
    let mut m = DenseMatrix::from_rows(&rows);
    let piv = m.rref(field);
    (0..piv.len())
        .map(|r| SparseVec::from_pairs(field, m.row(r).iter().enumerate().map(|(i, &c)| (coords[i], c))))
        .collect()
}

fn masked_rank(field: Field, a: &[SparseVec], b: &[SparseVec], coords: &[usize]) -> usize {
    let all: Vec<SparseVec> = a.iter().chain(b).cloned().collect();
    reduce(field, &all, coords).len()
}

/// m₃ applied to the m₂-kernel of degree (p, q, r) at snapshot k, or None if
/// the family exceeds the tensor cap.
fn massey_generators(l: &ProductLedger, k: usize, (p, q, r): (usize, usize, usize)) -> Option<Vec<SparseVec>> {
    let f = l.field;
    let snap = &l.snapshots[k];
    let m3: HashMap<&[usize], &[(usize, u32)]> = snap
        .entries
        .iter()
        .filter(|e| e.op == Op::M(3))
        .filter(|e| [p, q, r].iter().zip(&e.inputs).all(|(&d, &b)| l.bars[b].degree == d))
        .map(|e| (e.inputs.as_slice(), e.output.as_slice()))
        .collect();
    if m3.is_empty() {
        return Some(Vec::new());
    }
    let m2: HashMap<(usize, usize), &[(usize, u32)]> = snap
        .entries
        .iter()
        .filter(|e| e.op == Op::Cup)
        .map(|e| ((e.inputs[0], e.inputs[1]), e.output.as_slice()))
        .collect();
    let of = |d: usize| -> Vec<usize> { snap.alive.iter().copied().filter(|&b| l.bars[b].degree == d).collect() };
    let (ap, aq, ar) = (of(p), of(q), of(r));
    if ap.len() * aq.len() * ar.len() > MASSEY_TENSOR_CAP {
        return None;
    }
    let mut tensors = Vec::new();
    for &a in &ap {
        for &b in &aq {
            for &c in &ar {
                tensors.push([a, b, c]);
            }
        }
    }
    // constraint columns: (m₂ ⊗ 1)T and (1 ⊗ m₂)T
    let mut row_of: HashMap<(u8, usize, usize), usize> = HashMap::new();
    let mut cols: Vec<Vec<(usize, u32)>> = Vec::with_capacity(tensors.len());
    for t in &tensors {
        let mut col = Vec::new();
        if let Some(out) = m2.get(&(t[0], t[1])) {
            for &(o, c) in out.iter() {
                let n = row_of.len();
                col.push((*row_of.entry((0, o, t[2])).or_insert(n), c));
            }
        }
        if let Some(out) = m2.get(&(t[1], t[2])) {
            for &(o, c) in out.iter() {
                let n = row_of.len();
                col.push((*row_of.entry((1, t[0], o)).or_insert(n), c));
            }
        }
        cols.push(col);
    }
    let mut kernel: Vec<Vec<(usize, u32)>> = Vec::new();
    let constrained: Vec<usize> = (0..tensors.len()).filter(|&i| !cols[i].is_empty()).collect();
    kernel.extend((0..tensors.len()).filter(|&i| cols[i].is_empty()).map(|i| vec![(i, 1)]));
    if !constrained.is_empty() {
        let mut m = DenseMatrix::zeros(row_of.len(), constrained.len());
        for (j, &i) in constrained.iter().enumerate() {
            for &(row, c) in &cols[i] {
                m.set(row, j, f.add(m.get(row, j), c));
            }
        }
        for v in m.kernel(f) {
            kernel.push(v.iter().enumerate().filter(|&(_, &c)| c != 0).map(|(j, &c)| (constrained[j], c)).collect());
        }
    }
    let gens = kernel
        .iter()
        .map(|n| {
            let mut acc = Accumulator::new(f);
            for &(i, c) in n {
                if let Some(out) = m3.get(&tensors[i][..]) {
                    acc.add(c, &entry_vec(f, out));
                }
            }
            acc.finish()
        })
        .filter(|v| !v.is_empty())
        .collect();
    Some(gens)
}

/// Generators G(k) and quotient Q(k) of a family at snapshot k.
fn family_at(l: &ProductLedger, fam: &Family, k: usize) -> Option<(Vec<SparseVec>, Vec<SparseVec>)> {
    let f = l.field;
    let snap = &l.snapshots[k];
    let deg = |b: usize| l.bars[b].degree;
    let outputs = |pred: &dyn Fn(&crate::ledger::LedgerEntry) -> bool| -> Vec<SparseVec> {
        snap.entries.iter().filter(|e| pred(e)).map(|e| entry_vec(f, &e.output)).collect()
    };
    Some(match *fam {
        Family::Cup { p, q } => {
            (outputs(&|e| e.op == Op::Cup && deg(e.inputs[0]) == p && deg(e.inputs[1]) == q), Vec::new())
        }
        Family::Massey3 { p, q, r } => {
            let d = p + q + r - 1;
            let quot = outputs(&|e| e.op == Op::Cup && out_degree(l, &e.output) == Some(d));
            (massey_generators(l, k, (p, q, r))?, quot)
        }
        Family::Higher { n, d } => (outputs(&|e| e.op == Op::M(n) && out_degree(l, &e.output) == Some(d)), Vec::new()),
        Family::Sq { i, n } => (outputs(&|e| e.op == Op::Sq(i) && deg(e.inputs[0]) == n), Vec::new()),
        Family::Joint { d } => (
            outputs(&|e| matches!(e.op, Op::Cup | Op::Sq(_)) && out_degree(l, &e.output) == Some(d)),
            Vec::new(),
        ),
    })
}

/// ρ[j][k − j] for snapshots j ≤ k, or None if the family was skipped.
fn rank_table(l: &ProductLedger, fam: &Family) -> Option<Vec<Vec<usize>>> {
    let f = l.field;
    let s = l.snapshots.len();
    let mut gens = Vec::with_capacity(s);
    let mut quots = Vec::with_capacity(s);
    for k in 0..s {
        let (g, q) = family_at(l, fam, k)?;
        let coords = &l.snapshots[k].alive;
        gens.push(reduce(f, &g, coords));
        quots.push(reduce(f, &q, coords));
    }
    let table = (0..s)
        .map(|j| {
            let coords = &l.snapshots[j].alive;
            let base = quots[j].len();
            (j..s)
                .map(|k| if gens[k].is_empty() { 0 } else { masked_rank(f, &gens[k], &quots[j], coords) - base })
                .collect()
        })
        .collect();
    Some(table)
}

/// Families with some nonzero generator in either ledger, restricted to
/// degrees reliable in both.
fn candidate_families(lx: &ProductLedger, ly: &ProductLedger) -> Vec<Family> {
    let top = lx.max_degree.min(ly.max_degree);
    let arity = lx.max_arity.min(ly.max_arity);
    let steenrod = lx.steenrod && ly.steenrod;
    let mut fams = BTreeSet::new();
    let mut lower_ops_vanish = vec![true; arity + 1];
    for l in [lx, ly] {
        for s in &l.snapshots {
            for e in &s.entries {
                let ins: Vec<usize> = e.inputs.iter().map(|&b| l.bars[b].degree).collect();
                let Some(d) = out_degree(l, &e.output) else { continue };
                if d > top || ins.iter().any(|&x| x > top) {
                    continue;
                }
                match e.op {
                    Op::Cup => {
                        fams.insert(Family::Cup { p: ins[0], q: ins[1] });
                        for v in lower_ops_vanish.iter_mut().skip(3) {
                            *v = false;
                        }
                    }
                    Op::M(n) if n <= arity => {
                        if n == 3 {
                            fams.insert(Family::Massey3 { p: ins[0], q: ins[1], r: ins[2] });
                        } else if lower_ops_vanish[n] {
                            fams.insert(Family::Higher { n, d });
                        }
                        for v in lower_ops_vanish.iter_mut().skip(n + 1) {
                            *v = false;
                        }
                    }
                    Op::Sq(i) if steenrod => {
                        fams.insert(Family::Sq { i, n: ins[0] });
                    }
                    _ => {}
                }
            }
        }
    }
    // operations seen later may invalidate an earlier-admitted m_n family
    fams.retain(|fam| match *fam {
        Family::Higher { n, .. } => lower_ops_vanish[n],
        _ => true,
    });
    if steenrod {
        let joint: Vec<usize> = fams
            .iter()
            .filter_map(|fam| match *fam {
                Family::Cup { p, q } => Some(p + q),
                Family::Sq { i, n } => Some(i + n),
                _ => None,
            })
            .collect();
        fams.extend(joint.into_iter().map(|d| Family::Joint { d }));
    }
    fams.into_iter().collect()
}

// ---------------------------------------------------------------------------
// threshold search

/// Candidate grid: 0, |e₁ − e₂| and |e₁ − e₂|/2 over all finite endpoints.
pub fn candidate_grid(endpoints: &[f64]) -> Vec<f64> {
    let mut e: Vec<f64> = endpoints.iter().copied().filter(|x| x.is_finite()).collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e.dedup();
    let mut g = vec![0.0];
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let d = e[j] - e[i];
            g.push(d);
            g.push(d / 2.0);
        }
    }
    g.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(g.len());
    for x in g {
        if out.last().map_or(true, |&y| x - y > TOL) {
            out.push(x);
        }
    }
    out
}

struct Side<'a> {
    times: Vec<f64>,
    rho: &'a [Vec<usize>],
}

impl Side<'_> {
    /// Restriction rank from the state just below `upper` to the state at `lower`.
    fn rank_between(&self, lower: f64, upper: f64) -> usize {
        let jj = self.times.partition_point(|&t| t <= lower + TOL);
        let kk = self.times.partition_point(|&t| t < upper - TOL);
        match (jj.checked_sub(1), kk.checked_sub(1)) {
            (Some(j), Some(k)) if j <= k => self.rho[j][k - j],
            _ => 0,
        }
    }
}

fn first_violation(eps: f64, a: &Side, b: &Side, dir: &str, family: &str) -> Option<Violation> {
    let s = a.times.len();
    for j in 0..s {
        for k in j..s {
            let ra = a.rho[j][k - j];
            if ra == 0 {
                continue;
            }
            let next = if k + 1 < s { a.times[k + 1] } else { f64::INFINITY };
            if next - a.times[j] <= 2.0 * eps + 2.0 * TOL {
                continue;
            }
            let rb = b.rank_between(a.times[j] + eps, next - eps);
            if ra > rb {
                return Some(Violation {
                    family: family.to_string(),
                    direction: dir.to_string(),
                    epsilon: eps,
                    lower: a.times[j],
                    upper: next,
                    source_rank: ra,
                    target_rank: rb,
                });
            }
        }
    }
    None
}

/// Largest grid value below which `infeasible` holds, assuming
/// infeasibility is downward closed. Evaluates grid points and midpoints.
fn threshold(grid: &[f64], infeasible: impl Fn(f64) -> Option<Violation>) -> (f64, Option<Violation>, Vec<TranscriptStep>) {
    let m = grid.len();
    let point = |i: usize| -> f64 {
        if i % 2 == 0 {
            grid[i / 2]
        } else if i / 2 + 1 < m {
            (grid[i / 2] + grid[i / 2 + 1]) / 2.0
        } else {
            grid[m - 1] + 1.0
        }
    };
    let mut transcript = Vec::new();
    let mut eval = |i: usize| {
        let v = infeasible(point(i));
        transcript.push(TranscriptStep { epsilon: point(i), feasible: v.is_none(), violation: v.clone() });
        v
    };
    let Some(mut witness) = eval(0) else { return (0.0, None, transcript) };
    let (mut lo, mut hi) = (0, 2 * m);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match eval(mid) {
            Some(v) => {
                lo = mid;
                witness = v;
            }
            None => hi = mid,
        }
    }
    let value = if lo % 2 == 0 {
        grid[lo / 2]
    } else if lo / 2 + 1 < m {
        grid[lo / 2 + 1]
    } else {
        f64::INFINITY
    };
    (value, Some(witness), transcript)
}

fn check_pair(lx: &ProductLedger, ly: &ProductLedger) -> Result<()> {
    if lx.field != ly.field {
        return Err(Error::FieldMismatch(lx.field.characteristic(), ly.field.characteristic()));
    }
    Ok(())
}

/// Max over degrees reliable in both ledgers of the bottleneck distance.
pub fn ledger_grvect(lx: &ProductLedger, ly: &ProductLedger) -> (f64, usize) {
    (0..=lx.max_degree.min(ly.max_degree))
        .map(|d| (bottleneck(&lx.diagram(d), &ly.diagram(d)), d))
        .fold((0.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc })
}

/// Thresholds of every family included in `structure`.
struct FamilyResult {
    family: Family,
    value: f64,
    violation: Option<Violation>,
    transcript: Vec<TranscriptStep>,
}

fn family_thresholds(lx: &ProductLedger, ly: &ProductLedger, structure: Structure) -> (Vec<FamilyResult>, Vec<String>) {
    let mut ends: Vec<f64> = lx.times();
    ends.extend(ly.times());
    let grid = candidate_grid(&ends);
    let mut results = Vec::new();
    let mut skipped = Vec::new();
    for fam in candidate_families(lx, ly).into_iter().filter(|f| structure.includes(f)) {
        let (Some(tx), Some(ty)) = (rank_table(lx, &fam), rank_table(ly, &fam)) else {
            skipped.push(fam.to_string());
            continue;
        };
        let sx = Side { times: lx.times(), rho: &tx };
        let sy = Side { times: ly.times(), rho: &ty };
        let name = fam.to_string();
        let (value, violation, transcript) = threshold(&grid, |eps| {
            first_violation(eps, &sx, &sy, "X→Y", &name).or_else(|| first_violation(eps, &sy, &sx, "Y→X", &name))
        });
        results.push(FamilyResult { family: fam, value, violation, transcript });
    }
    (results, skipped)
}

/// Certified lower bound for the distance of `structure` between two ledgers.
pub fn structured_lower_bound(lx: &ProductLedger, ly: &ProductLedger, structure: Structure) -> Result<DistanceBound> {
    check_pair(lx, ly)?;
    if structure.needs_steenrod() {
        if lx.field.modulus() != 2 {
            return Err(Error::Unsupported("odd-p Steenrod action".into()));
        }
        if !lx.steenrod || !ly.steenrod {
            return Err(Error::InvalidInput("ledger has no Steenrod table".into()));
        }
    }
    let (grv, degree) = ledger_grvect(lx, ly);
    let (results, skipped) = family_thresholds(lx, ly, structure);
    let per_family: Vec<(String, f64)> = results.iter().map(|r| (r.family.to_string(), r.value)).collect();
    let best = results.into_iter().filter(|r| r.value > grv).max_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    let (value, certificate) = match best {
        Some(r) => (
            r.value,
            Certificate::Obstruction {
                violation: r.violation.expect("positive threshold has a witness"),
                transcript: r.transcript,
                per_family,
                skipped,
            },
        ),
        None => (grv, Certificate::Bottleneck { degree }),
    };
    Ok(DistanceBound {
        distance: structure.distance_name().to_string(),
        kind: BoundKind::Lower,
        field: lx.field.characteristic(),
        value,
        certificate,
    })
}

// ---------------------------------------------------------------------------
// module views and upper bounds

/// A persistence module in bar coordinates, optionally shifted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PersistenceModuleView {
    pub max_degree: usize,
    pub bars: Vec<LedgerBar>,
    /// F[shift](t) = F(t + shift).
    pub shift: f64,
}

impl PersistenceModuleView {
    pub fn new(max_degree: usize, bars: Vec<LedgerBar>) -> Self {
        PersistenceModuleView { max_degree, bars, shift: 0.0 }
    }

    pub fn from_ledger(l: &ProductLedger) -> Self {
        Self::new(l.max_degree, l.bars.clone())
    }

    pub fn from_barcode(bc: &crate::barcode::Barcode) -> Self {
        let bars = bc.bars.iter().map(|b| LedgerBar { degree: b.degree, birth: b.birth, death: b.death }).collect();
        Self::new(bc.max_degree, bars)
    }

    pub fn shifted(&self, eps: f64) -> Self {
        PersistenceModuleView { shift: self.shift + eps, ..self.clone() }
    }

    /// Bars alive at t in the (shifted) module.
    pub fn alive(&self, t: f64) -> Vec<usize> {
        (0..self.bars.len()).filter(|&b| self.bars[b].alive_at(t + self.shift)).collect()
    }

    /// Structure map F(s) → F(t) for s ≤ t in bar coordinates.
    pub fn map(&self, s: f64, t: f64) -> DenseMatrix {
        let (a, b) = (self.alive(s), self.alive(t));
        let mut m = DenseMatrix::zeros(b.len(), a.len());
        for (i, x) in b.iter().enumerate() {
            if let Some(j) = a.iter().position(|y| y == x) {
                m.set(i, j, 1);
            }
        }
        m
    }

    /// η_ε at t: F(t) → F[ε](t).
    pub fn eta(&self, eps: f64, t: f64) -> DenseMatrix {
        self.map(t, t + eps)
    }

    /// Longest positive-degree bar.
    pub fn max_positive_length(&self) -> f64 {
        self.bars.iter().filter(|b| b.degree > 0).map(|b| b.death - b.birth).fold(0.0, f64::max)
    }

    pub fn diagram(&self, degree: usize) -> Vec<(f64, f64)> {
        self.bars
            .iter()
            .filter(|b| b.degree == degree)
            .map(|b| (b.birth - self.shift, b.death - self.shift))
            .collect()
    }
}

/// Upper bound from the interleaving by zero maps in positive degrees and
/// unit maps on H⁰. Requires every positive bar to have length ≤ 2ε and
/// both objects to be connected from their first vertex on up to ε.
pub fn trivial_upper_bound(mx: &PersistenceModuleView, my: &PersistenceModuleView) -> DistanceBound {
    let none = |reason: &str| DistanceBound {
        distance: "trivial".into(),
        kind: BoundKind::Upper,
        field: 0,
        value: f64::INFINITY,
        certificate: Certificate::None { reason: reason.into() },
    };
    let span = mx.max_positive_length().max(my.max_positive_length()) / 2.0;
    if !span.is_finite() {
        return none("an essential positive-degree bar cannot be interleaved with zero");
    }
    let (dx, dy) = (mx.diagram(0), my.diagram(0));
    let degree0 = match (dx.is_empty(), dy.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => return none("exactly one object is empty"),
        _ => {
            let ess = |d: &[(f64, f64)]| -> Vec<f64> { d.iter().filter(|b| !b.1.is_finite()).map(|b| b.0).collect() };
            let (ex, ey) = (ess(&dx), ess(&dy));
            if ex.len() != 1 || ey.len() != 1 {
                return none("unit maps on H⁰ need both objects eventually connected");
            }
            let conn = |d: &[(f64, f64)], b: f64| d.iter().filter(|x| x.1.is_finite()).map(|x| x.1).fold(b, f64::max);
            let (cx, cy) = (conn(&dx, ex[0]), conn(&dy, ey[0]));
            (cx - ey[0]).max(cy - ex[0]).max((ex[0] - ey[0]).abs()).max(bottleneck(&dx, &dy)).max(0.0)
        }
    };
    DistanceBound {
        distance: "trivial".into(),
        kind: BoundKind::Upper,
        field: 0,
        value: span.max(degree0),
        certificate: Certificate::Interleaving { positive_span: span, degree0 },
    }
}

// ---------------------------------------------------------------------------
// prime combinations and reports

/// Per-prime lower bound for d_{p∞}: A∞ with Steenrod squares at p = 2,
/// plain A∞ otherwise (odd-p reduced powers are not implemented, so the
/// bound is weaker but still valid).
pub fn prime_lower_bound(lx: &ProductLedger, ly: &ProductLedger) -> Result<DistanceBound> {
    let st = if lx.field.modulus() == 2 && lx.steenrod && ly.steenrod { Structure::Combined } else { Structure::AInfty };
    let mut b = structured_lower_bound(lx, ly, st)?;
    b.distance = format!("d_{{{}∞}}", lx.field.characteristic());
    Ok(b)
}

/// d_{p∞,q∞} for every pair and d_P over all given per-prime bounds.
pub fn combined_distances(per_prime: &[DistanceBound]) -> Result<BTreeMap<String, DistanceBound>> {
    if per_prime.is_empty() {
        return Err(Error::InvalidInput("empty prime set".into()));
    }
    let kind = per_prime[0].kind;
    if per_prime.iter().any(|b| b.kind != kind) {
        return Err(Error::InvalidInput("cannot combine lower and upper bounds".into()));
    }
    let maximum = |bs: &[&DistanceBound], name: String, note: &str| {
        let parts: Vec<(String, f64)> = bs.iter().map(|b| (b.distance.clone(), b.value)).collect();
        let value = parts.iter().map(|p| p.1).fold(0.0, f64::max);
        DistanceBound {
            distance: name,
            kind,
            field: 0,
            value,
            certificate: Certificate::Maximum { parts, note: note.into() },
        }
    };
    let mut out = BTreeMap::new();
    for b in per_prime {
        out.insert(b.distance.clone(), b.clone());
    }
    for (i, a) in per_prime.iter().enumerate() {
        for b in &per_prime[i + 1..] {
            let name = format!("d_{{{}∞,{}∞}}", a.field, b.field);
            out.insert(name.clone(), maximum(&[a, b], name, "max of the two per-prime bounds"));
        }
    }
    let all: Vec<&DistanceBound> = per_prime.iter().collect();
    let primes: Vec<String> = per_prime.iter().map(|b| b.field.to_string()).collect();
    out.insert(
        "d_P".into(),
        maximum(
            &all,
            "d_P".into(),
            &format!("max over the finite prime set {{{}}}: an under-approximation of the supremum over all primes", primes.join(",")),
        ),
    );
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct ReportOptions {
    pub max_arity: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { max_arity: 3 }
    }
}

/// Ledgers of both complexes over `field` (with Steenrod squares at p = 2).
pub fn ledger_pair(x: &FilteredComplex, y: &FilteredComplex, field: Field, opts: ReportOptions) -> Result<(ProductLedger, ProductLedger)> {
    let lo = LedgerOptions { max_arity: opts.max_arity, steenrod: field.modulus() == 2, k_max: None };
    Ok((ledger_from_complex(x, field, lo)?.1, ledger_from_complex(y, field, lo)?.1))
}

/// Every lower bound available over `field`, the trivial upper bound, and
/// (when several fields are given) the prime combinations.
pub fn distance_report(x: &FilteredComplex, y: &FilteredComplex, fields: &[Field], opts: ReportOptions) -> Result<Vec<DistanceBound>> {
    if fields.is_empty() {
        return Err(Error::InvalidInput("empty prime set".into()));
    }
    let mut out = Vec::new();
    let mut per_prime = Vec::new();
    for &f in fields {
        let (lx, ly) = ledger_pair(x, y, f, opts)?;
        for st in Structure::ALL {
            if st.needs_steenrod() && f.modulus() != 2 {
                continue;
            }
            out.push(structured_lower_bound(&lx, &ly, st)?);
        }
        let p = prime_lower_bound(&lx, &ly)?;
        per_prime.push(p);
        let mut up = trivial_upper_bound(&PersistenceModuleView::from_ledger(&lx), &PersistenceModuleView::from_ledger(&ly));
        up.field = f.characteristic();
        out.push(up);
    }
    out.extend(combined_distances(&per_prime)?.into_values());
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub distortion: f64,
    pub bounds: Vec<DistanceBound>,
    /// Lower bounds exceeding the distortion (each would indicate a bug).
    pub violations: Vec<String>,
}

/// Lower bounds for the Rips filtrations of two clouds checked against the
/// distortion of a correspondence (which dominates twice the
/// Gromov–Hausdorff distance).
pub fn stability_check(
    x: &PointCloud,
    y: &PointCloud,
    corr: &Correspondence,
    max_dim: usize,
    fields: &[Field],
    opts: ReportOptions,
) -> Result<StabilityReport> {
    let metric = Metric::euclidean();
    let dis = distortion(corr, (x, &metric), (y, &metric))?;
    let rx = build_rips(x, &metric, max_dim, f64::INFINITY)?;
    let ry = build_rips(y, &metric, max_dim, f64::INFINITY)?;
    let bounds: Vec<DistanceBound> =
        distance_report(&rx, &ry, fields, opts)?.into_iter().filter(|b| b.kind == BoundKind::Lower).collect();
    let violations = bounds
        .iter()
        .filter(|b| b.value > dis + 1e-6)
        .map(|b| format!("{} over characteristic {}: {} > distortion {}", b.distance, b.field, b.value, dis))
        .collect();
    Ok(StabilityReport { distortion: dis, bounds, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn ledgers(x: &FilteredComplex, y: &FilteredComplex, f: Field) -> (ProductLedger, ProductLedger) {
        ledger_pair(x, y, f, ReportOptions::default()).unwrap()
    }

    #[test]
    fn grid_contains_half_differences() {
        assert_eq!(candidate_grid(&[0.0, 1.0, 3.0]), vec![0.0, 0.5, 1.0, 1.5, 2.0, 3.0]);
    }

    #[test]
    fn identical_ledgers_give_zero() {
        let (_, t) = samples::torus_vs_wedge(0.1);
        let (a, b) = ledgers(&t, &t, Field::f2());
        for st in Structure::ALL {
            assert_eq!(structured_lower_bound(&a, &b, st).unwrap().value, 0.0);
        }
    }

    #[test]
    fn torus_against_wedge() {
        let (w, t) = samples::torus_vs_wedge(0.1);
        let (a, b) = ledgers(&w, &t, Field::f2());
        let g = structured_lower_bound(&a, &b, Structure::Graded).unwrap().value;
        let c = structured_lower_bound(&a, &b, Structure::Cup).unwrap();
        assert!(g <= 0.2 + 1e-6);
        assert!((c.value - 0.45).abs() < 1e-9, "{}", c.value);
        let up = trivial_upper_bound(&PersistenceModuleView::from_ledger(&a), &PersistenceModuleView::from_ledger(&b));
        assert!(up.value <= 0.5 + 1e-6 && up.value >= c.value);
    }

    #[test]
    fn odd_steenrod_refused_and_fields_checked() {
        let (w, t) = samples::torus_vs_wedge(0.1);
        let (a, b) = ledgers(&w, &t, Field::f3());
        let e = structured_lower_bound(&a, &b, Structure::Steenrod).unwrap_err();
        assert!(e.to_string().contains("unsupported: odd-p Steenrod action"), "{e}");
        let (c, _) = ledgers(&w, &t, Field::f2());
        assert!(matches!(structured_lower_bound(&a, &c, Structure::Cup), Err(Error::FieldMismatch(..))));
    }

    #[test]
    fn shift_functoriality() {
        let (_, t) = samples::torus_vs_wedge(0.1);
        let (a, _) = ledgers(&t, &t, Field::f2());
        let v = PersistenceModuleView::from_ledger(&a);
        for &(e, d, s) in &[(0.02, 0.03, 0.0), (0.05, 0.9, 0.04), (0.3, 0.3, 0.5)] {
            let lhs = v.eta(e + d, s);
            let rhs = v.shifted(e).eta(d, s).mul(Field::f2(), &v.eta(e, s));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn combined_needs_primes() {
        assert!(combined_distances(&[]).is_err());
        let b = DistanceBound {
            distance: "d_{2∞}".into(),
            kind: BoundKind::Lower,
            field: 2,
            value: 0.3,
            certificate: Certificate::Bottleneck { degree: 0 },
        };
        let m = combined_distances(&[b.clone()]).unwrap();
        assert_eq!(m["d_P"].value, 0.3);
    }
}
