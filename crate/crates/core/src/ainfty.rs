//! A∞-structures on cohomology: homotopy transfer along a contraction,
//! Stasheff relations, ∞-morphism checks, Massey products and the
//! persistent structure with its stage maps.
//!
//! Conventions (cohomological grading, |m_n| = 2 − n):
//!
//! ```text
//! rel_n:  Σ_{p+q+r=n} (−1)^{p+qr} m_{p+r+1}(1^p ⊗ m_q ⊗ 1^r) = 0
//! ```
//!
//! with the Koszul rule (f ⊗ g)(x ⊗ y) = (−1)^{|g||x|} f(x) ⊗ g(y). The
//! transferred operations are m_n = p ∘ λ_n with λ₁ = i and
//!
//! ```text
//! λ_n = Σ_{s+t=n} (−1)^{s+1} μ(Hλ_s ⊗ Hλ_t),   Hλ₁ = i, Hλ_k = h ∘ λ_k,
//! ```
//!
//! where the tensor is applied with the Koszul rule (|Hλ_t| = 1 − t).

use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

use crate::complex::FilteredComplex;
use crate::contraction::PersistentTransferData;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::sparse::{Accumulator, SparseVec};
use crate::transfer::{SimplicialTransfer, TransferData};

/// Sign choices for the tree formula. The default is the rule verified to
/// satisfy the Stasheff relations in odd characteristic; the knobs exist so
/// tests can show the alternatives fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransferSigns {
    /// Multiply the (s, t) splitting by (−1)^{s+1}.
    pub alternate: bool,
    /// Multiply the (s, t) splitting by (−1)^{st}.
    pub bilinear: bool,
    /// Apply the Koszul sign when Hλ_t passes the first s inputs.
    pub koszul: bool,
}

impl Default for TransferSigns {
    fn default() -> Self {
        TransferSigns { alternate: true, bilinear: false, koszul: true }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TransferOptions {
    pub max_arity: usize,
    /// Only evaluate operations on tuples of positive-degree classes.
    pub positive_only: bool,
    pub signs: TransferSigns,
}

impl TransferOptions {
    pub fn new(max_arity: usize) -> Self {
        TransferOptions { max_arity, positive_only: false, signs: TransferSigns::default() }
    }

    pub fn positive_only(mut self) -> Self {
        self.positive_only = true;
        self
    }
}

/// Operations m_n: H^{⊗n} → H for 2 ≤ n ≤ max_arity (m₁ = 0), stored
/// sparsely on basis tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct AInftyStructure {
    pub field: Field,
    pub degrees: Vec<i32>,
    pub max_arity: usize,
    /// When set, operations are defined only on positive-degree tuples.
    pub positive_only: bool,
    ops: Vec<BTreeMap<Vec<usize>, SparseVec>>,
}

/// One row of the JSON operation table.
#[derive(Clone, Debug, Serialize)]
pub struct OpEntry {
    pub arity: usize,
    pub inputs: Vec<usize>,
    pub output: Vec<(usize, u32)>,
}

impl AInftyStructure {
    pub fn zero(field: Field, degrees: Vec<i32>, max_arity: usize) -> Self {
        AInftyStructure { field, degrees, max_arity, positive_only: false, ops: vec![BTreeMap::new(); max_arity + 1] }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn get(&self, tuple: &[usize]) -> SparseVec {
        let n = tuple.len();
        if n < 2 || n > self.max_arity {
            return SparseVec::new();
        }
        self.ops[n].get(tuple).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, tuple: Vec<usize>, value: SparseVec) {
        let n = tuple.len();
        assert!((2..=self.max_arity).contains(&n), "arity {n} out of range");
        if value.is_empty() {
            self.ops[n].remove(&tuple);
        } else {
            self.ops[n].insert(tuple, value);
        }
    }

    /// Nonzero entries of m_n.
    pub fn entries(&self, n: usize) -> impl Iterator<Item = (&Vec<usize>, &SparseVec)> {
        self.ops.get(n).into_iter().flat_map(|m| m.iter())
    }

    /// m_n on arbitrary class vectors, by multilinearity.
    pub fn apply(&self, args: &[SparseVec]) -> SparseVec {
        let f = self.field;
        let mut acc = Accumulator::new(f);
        let mut tuple = Vec::with_capacity(args.len());
        fn rec(s: &AInftyStructure, args: &[SparseVec], coef: u32, tuple: &mut Vec<usize>, acc: &mut Accumulator) {
            if tuple.len() == args.len() {
                let v = s.get(tuple);
                if !v.is_empty() {
                    acc.add(coef, &v);
                }
                return;
            }
            for (k, a) in args[tuple.len()].iter() {
                tuple.push(k);
                rec(s, args, s.field.mul(coef, a), tuple, acc);
                tuple.pop();
            }
        }
        rec(self, args, 1, &mut tuple, &mut acc);
        acc.finish()
    }

    pub fn to_entries(&self) -> Vec<OpEntry> {
        (2..=self.max_arity)
            .flat_map(|n| {
                self.entries(n).map(move |(t, v)| OpEntry { arity: n, inputs: t.clone(), output: v.entries().to_vec() })
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "characteristic": self.field.characteristic(),
            "degrees": self.degrees,
            "max_arity": self.max_arity,
            "operations": self.to_entries(),
        })
    }

    fn tuple_allowed(&self, t: &[usize]) -> bool {
        !self.positive_only || t.iter().all(|&k| self.degrees[k] > 0)
    }
}

/// All tuples of length n over `0..dim` restricted to `allowed`.
fn tuples(allowed: &[usize], n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                allowed.iter().map(move |&k| {
                    let mut t = t.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    out
}

struct Transferrer<'a, T: TransferData + ?Sized> {
    td: &'a T,
    signs: TransferSigns,
    lo: i32,
    hi: i32,
    memo: HashMap<Vec<usize>, SparseVec>,
}

impl<T: TransferData + ?Sized> Transferrer<'_, T> {
    fn deg_sum(&self, t: &[usize]) -> i32 {
        t.iter().map(|&k| self.td.class_degrees()[k]).sum()
    }

    /// Hλ on a tuple: i for singletons, h∘λ otherwise.
    fn h_lambda(&mut self, t: &[usize]) -> SparseVec {
        if t.len() == 1 {
            return self.td.include(t[0]);
        }
        if let Some(v) = self.memo.get(t) {
            return v.clone();
        }
        let d = self.deg_sum(t) + 2 - t.len() as i32;
        let v = if d - 1 < self.lo || d > self.hi {
            SparseVec::new()
        } else {
            let l = self.lambda(t);
            if l.is_empty() {
                l
            } else {
                self.td.homotopy(&l, d)
            }
        };
        self.memo.insert(t.to_vec(), v.clone());
        v
    }

    fn lambda(&mut self, t: &[usize]) -> SparseVec {
        let f = self.td.field();
        let n = t.len();
        let mut acc = Accumulator::new(f);
        for s in 1..n {
            let (l, r) = t.split_at(s);
            let x = self.h_lambda(l);
            if x.is_empty() {
                continue;
            }
            let y = self.h_lambda(r);
            if y.is_empty() {
                continue;
            }
            let tt = n - s;
            let ls = self.deg_sum(l);
            let dx = ls + 1 - s as i32;
            let dy = self.deg_sum(r) + 1 - tt as i32;
            if dx + dy > self.hi {
                continue;
            }
            let mut e = 0i64;
            if self.signs.alternate {
                e += s as i64 + 1;
            }
            if self.signs.bilinear {
                e += (s * tt) as i64;
            }
            if self.signs.koszul && tt > 1 {
                e += (1 - tt as i64) * ls as i64;
            }
            let prod = self.td.product(&x, dx, &y, dy);
            acc.add(f.sign(e.rem_euclid(2) as usize), &prod);
        }
        acc.finish()
    }
}

/// Transfers the product of `td` to its cohomology.
pub fn transfer_ainfty<T: TransferData + ?Sized>(td: &T, opts: TransferOptions) -> Result<AInftyStructure> {
    if opts.max_arity < 2 {
        return Err(Error::Arity(opts.max_arity));
    }
    let degrees = td.class_degrees().to_vec();
    let (lo, hi) = td.degree_range();
    let mut s = AInftyStructure::zero(td.field(), degrees.clone(), opts.max_arity);
    s.positive_only = opts.positive_only;
    let allowed: Vec<usize> = (0..degrees.len()).filter(|&k| !opts.positive_only || degrees[k] > 0).collect();
    let present: std::collections::BTreeSet<i32> = degrees.iter().copied().collect();
    let mut tr = Transferrer { td, signs: opts.signs, lo, hi, memo: HashMap::new() };
    for n in 2..=opts.max_arity {
        for t in tuples(&allowed, n) {
            let d = tr.deg_sum(&t) + 2 - n as i32;
            if !present.contains(&d) {
                continue;
            }
            let l = tr.lambda(&t);
            if !l.is_empty() {
                s.set(t, td.project(&l, d));
            }
        }
    }
    Ok(s)
}

fn koszul_parity(degrees: &[i32], t: &[usize], upto: usize) -> i64 {
    t[..upto].iter().map(|&k| degrees[k] as i64).sum()
}

/// Violations of rel_n on basis tuples; empty iff the relation holds.
/// Uses operations of arity ≤ n − 1, so rel_{max_arity+1} is checkable.
pub fn check_stasheff(a: &AInftyStructure, n: usize) -> Vec<String> {
    let f = a.field;
    let mut out = Vec::new();
    if n < 3 || n > a.max_arity + 1 {
        return out;
    }
    let allowed: Vec<usize> = (0..a.dim()).filter(|&k| a.tuple_allowed(&[k])).collect();
    let present: std::collections::BTreeSet<i32> = a.degrees.iter().copied().collect();
    for t in tuples(&allowed, n) {
        let d = t.iter().map(|&k| a.degrees[k]).sum::<i32>() + 3 - n as i32;
        if !present.contains(&d) {
            continue;
        }
        let mut acc = Accumulator::new(f);
        for q in 2..n {
            for p in 0..=n - q {
                let r = n - p - q;
                let inner = a.get(&t[p..p + q]);
                if inner.is_empty() {
                    continue;
                }
                let e = (p + q * r) as i64 + q as i64 * koszul_parity(&a.degrees, &t, p);
                let sign = f.sign(e.rem_euclid(2) as usize);
                for (k, c) in inner.iter() {
                    let mut outer = t[..p].to_vec();
                    outer.push(k);
                    outer.extend_from_slice(&t[p + q..]);
                    acc.add(f.mul(sign, c), &a.get(&outer));
                }
            }
        }
        let v = acc.finish();
        if !v.is_empty() {
            out.push(format!("rel_{n} fails on {t:?}: {:?}", v.entries()));
        }
    }
    out
}

/// m_n(classes) expanded in the basis.
pub fn massey_products(a: &AInftyStructure, classes: &[usize]) -> Result<SparseVec> {
    if classes.len() < 2 || classes.len() > a.max_arity {
        return Err(Error::Arity(classes.len()));
    }
    if let Some(&k) = classes.iter().find(|&&k| k >= a.dim()) {
        return Err(Error::InvalidInput(format!("class {k} out of range")));
    }
    Ok(a.get(classes))
}

/// Components f_n: H^{⊗n} → H′ of degree 1 − n.
#[derive(Clone, Debug)]
pub struct AInftyMorphismData {
    pub max_arity: usize,
    components: Vec<BTreeMap<Vec<usize>, SparseVec>>,
}

impl AInftyMorphismData {
    pub fn new(max_arity: usize) -> Self {
        AInftyMorphismData { max_arity, components: vec![BTreeMap::new(); max_arity + 1] }
    }

    /// The strict morphism with f₁ given by its columns and f_{n≥2} = 0.
    pub fn strict(max_arity: usize, f1: &[SparseVec]) -> Self {
        let mut m = Self::new(max_arity);
        for (k, v) in f1.iter().enumerate() {
            m.set(vec![k], v.clone());
        }
        m
    }

    pub fn set(&mut self, tuple: Vec<usize>, value: SparseVec) {
        let n = tuple.len();
        assert!((1..=self.max_arity).contains(&n));
        if value.is_empty() {
            self.components[n].remove(&tuple);
        } else {
            self.components[n].insert(tuple, value);
        }
    }

    pub fn get(&self, tuple: &[usize]) -> SparseVec {
        self.components.get(tuple.len()).and_then(|m| m.get(tuple)).cloned().unwrap_or_default()
    }

    /// Violations of the ∞-morphism relation on basis tuples up to arity n:
    ///
    /// ```text
    /// Σ (−1)^{p+qr} f_{p+1+r}(1^p ⊗ m_q ⊗ 1^r) = Σ (−1)^{Σ_j (k−j)(i_j−1)} m′_k(f_{i_1} ⊗ … ⊗ f_{i_k})
    /// ```
    pub fn check(&self, source: &AInftyStructure, target: &AInftyStructure, n: usize) -> Vec<String> {
        let f = source.field;
        let mut out = Vec::new();
        let top = n.min(self.max_arity).min(source.max_arity.max(2));
        let allowed: Vec<usize> = (0..source.dim()).filter(|&k| source.tuple_allowed(&[k])).collect();
        for len in 2..=top {
            for t in tuples(&allowed, len) {
                let mut lhs = Accumulator::new(f);
                for q in 2..=len {
                    for p in 0..=len - q {
                        let r = len - p - q;
                        let inner = source.get(&t[p..p + q]);
                        let e = (p + q * r) as i64 + q as i64 * koszul_parity(&source.degrees, &t, p);
                        let sign = f.sign(e.rem_euclid(2) as usize);
                        for (k, c) in inner.iter() {
                            let mut outer = t[..p].to_vec();
                            outer.push(k);
                            outer.extend_from_slice(&t[p + q..]);
                            lhs.add(f.mul(sign, c), &self.get(&outer));
                        }
                    }
                }
                let mut rhs = Accumulator::new(f);
                for comp in compositions(len) {
                    let k = comp.len();
                    if k < 2 || k > target.max_arity {
                        continue;
                    }
                    let mut e: i64 = comp.iter().enumerate().map(|(j, &i)| ((k - 1 - j) * (i - 1)) as i64).sum();
                    let mut args = Vec::with_capacity(k);
                    let mut start = 0;
                    for &i in &comp {
                        e += (1 - i as i64) * koszul_parity(&source.degrees, &t, start);
                        args.push(self.get(&t[start..start + i]));
                        start += i;
                    }
                    if args.iter().any(|a| a.is_empty()) {
                        continue;
                    }
                    rhs.add(f.sign(e.rem_euclid(2) as usize), &target.apply(&args));
                }
                let diff = lhs.finish().sub(f, &rhs.finish());
                if !diff.is_empty() {
                    out.push(format!("morphism relation fails in arity {len} on {t:?}"));
                }
            }
        }
        out
    }
}

/// Ordered compositions of n into positive parts.
fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The transferred structure at one stage.
#[derive(Clone, Debug)]
pub struct AInftySnapshot {
    pub value: f64,
    pub prefix: usize,
    /// Critical simplex labelling each class.
    pub class_cells: Vec<usize>,
    /// Cocycle representing each class.
    pub representatives: Vec<SparseVec>,
    pub structure: AInftyStructure,
}

#[derive(Clone, Debug)]
pub struct PersistentAInfty {
    pub snapshots: Vec<AInftySnapshot>,
    /// `stage_maps[j]`: H(stage j+1) → H(stage j), the restriction p_j ∘ η ∘ i_{j+1}
    /// (rows indexed by stage-j classes).
    pub stage_maps: Vec<DenseMatrix>,
}

impl PersistentAInfty {
    /// The snapshot in force at time `t` (the last one with value ≤ t).
    pub fn snapshot_at(&self, t: f64) -> Option<&AInftySnapshot> {
        let k = self.snapshots.partition_point(|s| s.value <= t);
        k.checked_sub(1).map(|k| &self.snapshots[k])
    }

    /// The composite restriction H(stage k) → H(stage j) for j ≤ k.
    pub fn span_map(&self, j: usize, k: usize) -> DenseMatrix {
        let f = self.snapshots[j].structure.field;
        let mut m = DenseMatrix::identity(self.snapshots[k].structure.dim());
        for i in (j..k).rev() {
            m = self.stage_maps[i].mul(f, &m);
        }
        m
    }
}

/// Restriction of stage-(j+1) classes to stage j, in class coordinates.
pub fn restriction_map<A: TransferData + ?Sized, B: TransferData + ?Sized>(from: &B, to: &A, to_prefix: usize) -> DenseMatrix {
    let f = to.field();
    let cols: Vec<Vec<u32>> = (0..from.num_classes())
        .map(|k| {
            let rep = from.include(k).filter(|x| x < to_prefix);
            to.project(&rep, from.class_degrees()[k]).to_dense(to.num_classes())
        })
        .collect();
    let _ = f;
    DenseMatrix::from_cols(to.num_classes(), &cols)
}

/// Transfers at every stage of a persistent contraction of `cx`.
pub fn persistent_ainfty(cx: &FilteredComplex, ptd: &PersistentTransferData, opts: TransferOptions) -> Result<PersistentAInfty> {
    let reliable = cx.max_reliable_degree();
    let duals: Vec<_> = ptd
        .stages
        .iter()
        .map(|s| if ptd.dual { s.contraction.clone() } else { s.contraction.dual() })
        .collect();
    let views: Vec<SimplicialTransfer> =
        ptd.stages.iter().zip(&duals).map(|(s, c)| SimplicialTransfer::new(cx, s.prefix, c, reliable)).collect();
    let mut snapshots = Vec::with_capacity(views.len());
    for (s, v) in ptd.stages.iter().zip(&views) {
        snapshots.push(AInftySnapshot {
            value: s.value,
            prefix: s.prefix,
            class_cells: v.class_cells(),
            representatives: (0..v.num_classes()).map(|k| v.include(k)).collect(),
            structure: transfer_ainfty(v, opts)?,
        });
    }
    let stage_maps = (0..views.len().saturating_sub(1))
        .map(|j| restriction_map(&views[j + 1], &views[j], ptd.stages[j].prefix))
        .collect();
    Ok(PersistentAInfty { snapshots, stage_maps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::{incremental_contraction, PivotRule};
    use crate::dga;
    use crate::samples;
    use crate::transfer::ModelTransfer;

    fn model_structure(a: &dga::FiniteDga, arity: usize, signs: TransferSigns) -> AInftyStructure {
        let mt = ModelTransfer::new(a, a.contraction(PivotRule::Smallest));
        transfer_ainfty(&mt, TransferOptions { max_arity: arity, positive_only: false, signs }).unwrap()
    }

    #[test]
    fn heisenberg_triple_product() {
        let a = dga::heisenberg(Field::f2());
        let mt = ModelTransfer::new(&a, a.contraction(PivotRule::Smallest));
        let s = transfer_ainfty(&mt, TransferOptions::new(3)).unwrap();
        let (al, be, ga) = (mt.class_of("x").unwrap(), mt.class_of("y").unwrap(), mt.class_of("xz").unwrap());
        assert_eq!(massey_products(&s, &[al, al, be]).unwrap(), SparseVec::unit(ga));
        assert!(massey_products(&s, &[al]).is_err());
    }

    #[test]
    fn stasheff_in_odd_characteristic() {
        for p in [3, 5] {
            let f = Field::new(p).unwrap();
            for a in [dga::heisenberg(f), dga::nilpotent_tower(f), dga::borromean_model(f), dga::filiform(f)] {
                let s = model_structure(&a, 4, TransferSigns::default());
                for n in 3..=5 {
                    assert!(check_stasheff(&s, n).is_empty(), "p={p} n={n}: {:?}", check_stasheff(&s, n));
                }
            }
        }
    }

    #[test]
    fn other_sign_rules_break_stasheff() {
        let a = dga::filiform(Field::f3());
        for bits in 0..8 {
            let signs = TransferSigns { alternate: bits & 1 != 0, bilinear: bits & 2 != 0, koszul: bits & 4 != 0 };
            let s = model_structure(&a, 4, signs);
            let fails: usize = (3..=5).map(|n| check_stasheff(&s, n).len()).sum();
            assert_eq!(fails == 0, signs == TransferSigns::default(), "{signs:?}");
        }
    }

    #[test]
    fn strict_unitality_and_identity_morphism() {
        let f = Field::f3();
        let a = dga::nilpotent_tower(f);
        let mt = ModelTransfer::new(&a, a.contraction(PivotRule::Smallest));
        let s = transfer_ainfty(&mt, TransferOptions::new(4)).unwrap();
        let unit = mt.class_of("1").unwrap();
        for n in 3..=4 {
            for (t, _) in s.entries(n) {
                assert!(!t.contains(&unit));
            }
        }
        let id: Vec<SparseVec> = (0..s.dim()).map(SparseVec::unit).collect();
        assert!(AInftyMorphismData::strict(4, &id).check(&s, &s, 4).is_empty());
        let twice: Vec<SparseVec> = (0..s.dim()).map(|k| SparseVec::from_pairs(f, [(k, 2)])).collect();
        assert!(!AInftyMorphismData::strict(4, &twice).check(&s, &s, 4).is_empty());
    }

    #[test]
    fn tampered_product_is_flagged() {
        let f = Field::f2();
        let cx = samples::torus();
        let ptd = incremental_contraction(&cx, f).unwrap();
        let pa = persistent_ainfty(&cx, &ptd, TransferOptions::new(3)).unwrap();
        let mut s = pa.snapshots[0].structure.clone();
        assert!(check_stasheff(&s, 3).is_empty() && check_stasheff(&s, 4).is_empty());
        let (a, b) = (1, 2);
        assert_eq!(s.degrees[a], 1);
        let ab = s.get(&[a, b]);
        assert!(!ab.is_empty());
        // make m₂(unit, a·b) disagree with a·b
        s.set(vec![0, 3], SparseVec::new());
        assert!(!check_stasheff(&s, 3).is_empty());
    }

    #[test]
    fn two_point_stage_map() {
        let cx = crate::complex::import_text("0 ; 0\n1 ; 0\n0 1 ; 1\n").unwrap();
        let ptd = incremental_contraction(&cx, Field::f2()).unwrap();
        let pa = persistent_ainfty(&cx, &ptd, TransferOptions::new(3)).unwrap();
        assert_eq!(pa.stage_maps.len(), 1);
        let m = &pa.stage_maps[0];
        assert_eq!((m.rows(), m.cols()), (2, 1));
        assert_eq!(m.rank(Field::f2()), 1);
    }

    #[test]
    fn zero_structure_satisfies_everything() {
        let s = AInftyStructure::zero(Field::f3(), vec![0, 1, 1, 2], 4);
        for n in 3..=5 {
            assert!(check_stasheff(&s, n).is_empty());
        }
    }
}

