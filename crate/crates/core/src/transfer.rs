//! Views of a cochain-level contraction together with its product: the input
//! of homotopy transfer, cup products on cohomology and Steenrod squares.

use crate::chain;
use crate::complex::FilteredComplex;
use crate::contraction::{Contraction, ContractionBuilder};
use crate::dense::DenseMatrix;
use crate::dga::FiniteDga;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::sparse::{Accumulator, SparseVec};

/// A cochain dg-algebra A with a contraction (i, p, h) onto a basis of H(A).
/// Elements of A are sparse vectors over its basis; elements of H are sparse
/// vectors over the class indices `0..class_degrees().len()`.
pub trait TransferData {
    fn field(&self) -> Field;
    fn class_degrees(&self) -> &[i32];
    /// Inclusive range of degrees in which A is nonzero.
    fn degree_range(&self) -> (i32, i32);
    /// A cocycle representing class `k`.
    fn include(&self, k: usize) -> SparseVec;
    fn project(&self, a: &SparseVec, degree: i32) -> SparseVec;
    /// h: A^n → A^{n−1}.
    fn homotopy(&self, a: &SparseVec, degree: i32) -> SparseVec;
    fn product(&self, a: &SparseVec, da: i32, b: &SparseVec, db: i32) -> SparseVec;
    /// The cup-i product, where the model provides one.
    fn cup_i(&self, _a: &SparseVec, _da: i32, _b: &SparseVec, _db: i32, _i: usize) -> Result<SparseVec> {
        Err(Error::Unsupported("cup-i products on this model".into()))
    }

    fn num_classes(&self) -> usize {
        self.class_degrees().len()
    }
}

/// A finite dg-algebra with one of its contractions.
#[derive(Clone, Debug)]
pub struct ModelTransfer<'a> {
    pub dga: &'a FiniteDga,
    pub contraction: Contraction,
}

impl<'a> ModelTransfer<'a> {
    pub fn new(dga: &'a FiniteDga, contraction: Contraction) -> Self {
        assert_eq!(contraction.d_degree, 1, "model contractions are cochain-level");
        ModelTransfer { dga, contraction }
    }

    /// The class whose critical cell is the named basis element.
    pub fn class_of(&self, name: &str) -> Option<usize> {
        let k = self.dga.index(name)?;
        self.contraction.basis_cells.iter().position(|&c| c == k)
    }
}

impl TransferData for ModelTransfer<'_> {
    fn field(&self) -> Field {
        self.dga.field
    }
    fn class_degrees(&self) -> &[i32] {
        &self.contraction.basis_degrees
    }
    fn degree_range(&self) -> (i32, i32) {
        let d = &self.dga.degrees;
        (d.iter().copied().min().unwrap_or(0), d.iter().copied().max().unwrap_or(0))
    }
    fn include(&self, k: usize) -> SparseVec {
        self.contraction.include.col(k).clone()
    }
    fn project(&self, a: &SparseVec, _degree: i32) -> SparseVec {
        self.contraction.project.apply(self.dga.field, a)
    }
    fn homotopy(&self, a: &SparseVec, _degree: i32) -> SparseVec {
        self.contraction.homotopy.apply(self.dga.field, a)
    }
    fn product(&self, a: &SparseVec, _da: i32, b: &SparseVec, _db: i32) -> SparseVec {
        self.dga.mul(a, b)
    }
}

/// Simplicial cochains of a prefix of a filtered complex with a materialized
/// cochain contraction (the dual of a chain contraction). Only classes of
/// degree ≤ `max_degree` are exposed.
#[derive(Clone, Debug)]
pub struct SimplicialTransfer<'a> {
    pub cx: &'a FilteredComplex,
    pub prefix: usize,
    pub contraction: &'a Contraction,
    classes: Vec<usize>,
    degrees: Vec<i32>,
    position: Vec<Option<usize>>,
}

impl<'a> SimplicialTransfer<'a> {
    pub fn new(cx: &'a FilteredComplex, prefix: usize, contraction: &'a Contraction, max_degree: usize) -> Self {
        assert_eq!(contraction.d_degree, 1, "expected the dual (cochain) contraction");
        let classes: Vec<usize> =
            (0..contraction.dim_h()).filter(|&k| contraction.basis_degrees[k] <= max_degree as i32).collect();
        let mut position = vec![None; contraction.dim_h()];
        for (i, &k) in classes.iter().enumerate() {
            position[k] = Some(i);
        }
        let degrees = classes.iter().map(|&k| contraction.basis_degrees[k]).collect();
        SimplicialTransfer { cx, prefix, contraction, classes, degrees, position }
    }

    /// Critical simplex labelling each exposed class.
    pub fn class_cells(&self) -> Vec<usize> {
        self.classes.iter().map(|&k| self.contraction.basis_cells[k]).collect()
    }
}

impl TransferData for SimplicialTransfer<'_> {
    fn field(&self) -> Field {
        self.contraction.field
    }
    fn class_degrees(&self) -> &[i32] {
        &self.degrees
    }
    fn degree_range(&self) -> (i32, i32) {
        (0, self.cx.top_dim() as i32)
    }
    fn include(&self, k: usize) -> SparseVec {
        self.contraction.include.col(self.classes[k]).clone()
    }
    fn project(&self, a: &SparseVec, _degree: i32) -> SparseVec {
        let f = self.field();
        self.contraction.project.apply(f, a).reindex(f, |k| self.position[k])
    }
    fn homotopy(&self, a: &SparseVec, _degree: i32) -> SparseVec {
        self.contraction.homotopy.apply(self.field(), a)
    }
    fn product(&self, a: &SparseVec, da: i32, b: &SparseVec, db: i32) -> SparseVec {
        chain::cup(self.cx, self.prefix, self.field(), a, da as usize, b, db as usize)
    }
    fn cup_i(&self, a: &SparseVec, da: i32, b: &SparseVec, db: i32, i: usize) -> Result<SparseVec> {
        chain::cup_i(self.cx, self.prefix, self.field(), a, da as usize, b, db as usize, i)
    }
}

/// The cochain dual of a running chain-level [`ContractionBuilder`], read in
/// place: i* = pᵀ, p* = iᵀ, h* = hᵀ.
pub struct StreamingTransfer<'a> {
    pub cx: &'a FilteredComplex,
    pub builder: &'a ContractionBuilder,
    classes: Vec<usize>,
    degrees: Vec<i32>,
    reps: Vec<SparseVec>,
}

impl<'a> StreamingTransfer<'a> {
    pub fn new(cx: &'a FilteredComplex, builder: &'a ContractionBuilder, max_degree: usize) -> Self {
        let classes: Vec<usize> = builder.critical().filter(|&u| cx.dim(u) <= max_degree).collect();
        let degrees = classes.iter().map(|&u| cx.dim(u) as i32).collect();
        let reps = classes.iter().map(|&u| builder.projection_row(u)).collect();
        StreamingTransfer { cx, builder, classes, degrees, reps }
    }

    /// Critical simplices labelling the classes, ascending.
    pub fn class_cells(&self) -> &[usize] {
        &self.classes
    }

    pub fn prefix(&self) -> usize {
        self.builder.len()
    }
}

impl TransferData for StreamingTransfer<'_> {
    fn field(&self) -> Field {
        self.builder.field()
    }
    fn class_degrees(&self) -> &[i32] {
        &self.degrees
    }
    fn degree_range(&self) -> (i32, i32) {
        (0, self.cx.top_dim() as i32)
    }
    fn include(&self, k: usize) -> SparseVec {
        self.reps[k].clone()
    }
    fn project(&self, a: &SparseVec, degree: i32) -> SparseVec {
        let f = self.field();
        let mut out = Vec::new();
        for (k, &u) in self.classes.iter().enumerate() {
            if self.degrees[k] == degree {
                let v = a.dot(f, self.builder.inclusion_of(u).expect("alive class"));
                if v != 0 {
                    out.push((k, v));
                }
            }
        }
        SparseVec::from_sorted(out)
    }
    fn homotopy(&self, a: &SparseVec, degree: i32) -> SparseVec {
        if degree <= 0 || a.is_empty() {
            return SparseVec::new();
        }
        let f = self.field();
        let n = self.prefix();
        let mut out = Vec::new();
        for &x in self.cx.simplices_of_dim(degree as usize - 1).iter().take_while(|&&x| x < n) {
            let v = a.dot(f, self.builder.homotopy_of(x));
            if v != 0 {
                out.push((x, v));
            }
        }
        SparseVec::from_sorted(out)
    }
    fn product(&self, a: &SparseVec, da: i32, b: &SparseVec, db: i32) -> SparseVec {
        chain::cup(self.cx, self.prefix(), self.field(), a, da as usize, b, db as usize)
    }
    fn cup_i(&self, a: &SparseVec, da: i32, b: &SparseVec, db: i32, i: usize) -> Result<SparseVec> {
        chain::cup_i(self.cx, self.prefix(), self.field(), a, da as usize, b, db as usize, i)
    }
}

/// Changes the class basis of another view: new class b is Σ_u q[u][b]·(old u).
pub struct Rebased<'a, T: TransferData + ?Sized> {
    inner: &'a T,
    q: DenseMatrix,
    qinv: DenseMatrix,
}

impl<'a, T: TransferData + ?Sized> Rebased<'a, T> {
    /// Errors unless `q` is invertible and degree-preserving.
    pub fn new(inner: &'a T, q: DenseMatrix) -> Result<Self> {
        let f = inner.field();
        let n = inner.num_classes();
        if q.rows() != n || q.cols() != n {
            return Err(Error::BasisMismatch(format!("change of basis is {}×{}, expected {n}×{n}", q.rows(), q.cols())));
        }
        let deg = inner.class_degrees();
        for i in 0..n {
            for j in 0..n {
                if q.get(i, j) != 0 && deg[i] != deg[j] {
                    return Err(Error::BasisMismatch("change of basis mixes degrees".into()));
                }
            }
        }
        let qinv = q.inverse(f).ok_or_else(|| Error::BasisMismatch("singular change of basis".into()))?;
        Ok(Rebased { inner, q, qinv })
    }
}

impl<T: TransferData + ?Sized> TransferData for Rebased<'_, T> {
    fn field(&self) -> Field {
        self.inner.field()
    }
    fn class_degrees(&self) -> &[i32] {
        self.inner.class_degrees()
    }
    fn degree_range(&self) -> (i32, i32) {
        self.inner.degree_range()
    }
    fn include(&self, b: usize) -> SparseVec {
        let f = self.field();
        let mut acc = Accumulator::new(f);
        for u in 0..self.q.rows() {
            let c = self.q.get(u, b);
            if c != 0 {
                acc.add(c, &self.inner.include(u));
            }
        }
        acc.finish()
    }
    fn project(&self, a: &SparseVec, degree: i32) -> SparseVec {
        let f = self.field();
        let old = self.inner.project(a, degree).to_dense(self.q.rows());
        SparseVec::from_dense(f, &self.qinv.apply(f, &old))
    }
    fn homotopy(&self, a: &SparseVec, degree: i32) -> SparseVec {
        self.inner.homotopy(a, degree)
    }
    fn product(&self, a: &SparseVec, da: i32, b: &SparseVec, db: i32) -> SparseVec {
        self.inner.product(a, da, b, db)
    }
    fn cup_i(&self, a: &SparseVec, da: i32, b: &SparseVec, db: i32, i: usize) -> Result<SparseVec> {
        self.inner.cup_i(a, da, b, db, i)
    }
}
