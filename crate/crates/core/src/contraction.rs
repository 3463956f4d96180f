//! Incremental contractions (A, H, i, p, h) of a filtered based complex.
//!
//! Cells are added one at a time; each new cell c either creates a class
//! (p(∂c) = 0) or kills one. With z = p(∂c) = Σ λ_k u_k, the killed class is
//! u₁ (smallest order index) and the maps update as
//!
//! ```text
//! h'(x) = h(x) − λ₁⁻¹ a(x) (c + h∂c)      a(x) = u₁-coefficient of p(x)
//! p'(x) = p(x) − λ₁⁻¹ a(x) z
//! ```
//!
//! with i restricted to the surviving classes. Convention throughout:
//! `i∘p − id = d∘h + h∘d`, plus pi = id, hi = 0, ph = 0, hh = 0.

use serde::Serialize;
use std::collections::BTreeSet;

use crate::complex::{require_ffdata, FilteredComplex};
use crate::error::Result;
use crate::field::Field;
use crate::sparse::{Accumulator, SparseMatrix, SparseVec};

/// Which class a killing cell removes when p(∂c) has several terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotRule {
    /// The oldest class (smallest order index).
    #[default]
    Smallest,
    /// The youngest class; the survivors are then persistence generators.
    Largest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Step {
    Created { cell: usize },
    Killed { cell: usize, class: usize },
}

/// Running state of the incremental algorithm.
#[derive(Clone, Debug)]
pub struct ContractionBuilder {
    field: Field,
    pivot: PivotRule,
    d_degree: i32,
    degrees: Vec<i32>,
    diff: Vec<SparseVec>,
    h: Vec<SparseVec>,
    p: Vec<SparseVec>,
    rows: Vec<Vec<usize>>,
    incl: Vec<Option<SparseVec>>,
    alive: BTreeSet<usize>,
}

impl ContractionBuilder {
    /// `d_degree` is the degree of the differential: −1 for chains, +1 for
    /// cochain models. Cells must arrive with d(c) supported on earlier cells.
    pub fn new(field: Field, d_degree: i32, pivot: PivotRule) -> Self {
        ContractionBuilder {
            field,
            pivot,
            d_degree,
            degrees: Vec::new(),
            diff: Vec::new(),
            h: Vec::new(),
            p: Vec::new(),
            rows: Vec::new(),
            incl: Vec::new(),
            alive: BTreeSet::new(),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Currently surviving critical cells, ascending.
    pub fn critical(&self) -> impl Iterator<Item = usize> + '_ {
        self.alive.iter().copied()
    }

    pub fn degree(&self, c: usize) -> i32 {
        self.degrees[c]
    }

    pub fn homotopy_of(&self, c: usize) -> &SparseVec {
        &self.h[c]
    }

    /// p(x) as a vector over critical cell ids.
    pub fn projection_of(&self, c: usize) -> &SparseVec {
        &self.p[c]
    }

    pub fn inclusion_of(&self, u: usize) -> Option<&SparseVec> {
        self.incl[u].as_ref()
    }

    /// The cocycle pᵀ(u*): x ↦ u-coefficient of p(x).
    pub fn projection_row(&self, u: usize) -> SparseVec {
        let mut xs = self.rows[u].clone();
        xs.sort_unstable();
        xs.dedup();
        SparseVec::from_sorted(
            xs.into_iter().filter_map(|x| Some((x, self.p[x].get(u))).filter(|e| e.1 != 0)).collect(),
        )
    }

    pub fn push(&mut self, degree: i32, diff: SparseVec) -> Step {
        let f = self.field;
        let c = self.degrees.len();
        debug_assert!(diff.last().map_or(true, |(i, _)| i < c), "differential must hit earlier cells");
        let mut zacc = Accumulator::new(f);
        let mut wacc = Accumulator::new(f);
        for (x, a) in diff.iter() {
            zacc.add(a, &self.p[x]);
            wacc.add(a, &self.h[x]);
        }
        wacc.add_entry(c, 1);
        let z = zacc.finish();
        let w = wacc.finish();
        self.degrees.push(degree);
        self.diff.push(diff);
        self.h.push(SparseVec::new());
        self.rows.push(Vec::new());
        if z.is_empty() {
            self.p.push(SparseVec::unit(c));
            self.rows[c].push(c);
            self.incl.push(Some(w));
            self.alive.insert(c);
            return Step::Created { cell: c };
        }
        self.p.push(SparseVec::new());
        self.incl.push(None);
        let (u, lam) = match self.pivot {
            PivotRule::Smallest => z.first().unwrap(),
            PivotRule::Largest => z.last().unwrap(),
        };
        let linv = f.inv(lam);
        let mut xs = std::mem::take(&mut self.rows[u]);
        xs.sort_unstable();
        xs.dedup();
        for x in xs {
            let a = self.p[x].get(u);
            if a == 0 {
                continue;
            }
            let s = f.neg(f.mul(linv, a));
            self.h[x].axpy(f, s, &w);
            let new = self.p[x].add_scaled(f, s, &z);
            for k in new.indices() {
                if self.p[x].get(k) == 0 {
                    self.rows[k].push(x);
                }
            }
            self.p[x] = new;
        }
        self.incl[u] = None;
        self.alive.remove(&u);
        Step::Killed { cell: c, class: u }
    }

    /// Materializes the current state as matrices.
    pub fn snapshot(&self) -> Contraction {
        let n = self.len();
        let basis: Vec<usize> = self.alive.iter().copied().collect();
        let mut pos = vec![usize::MAX; n];
        for (k, &u) in basis.iter().enumerate() {
            pos[u] = k;
        }
        let f = self.field;
        Contraction {
            field: f,
            d_degree: self.d_degree,
            degrees: self.degrees.clone(),
            differential: SparseMatrix::from_cols(n, self.diff.clone()),
            basis_cells: basis.clone(),
            basis_degrees: basis.iter().map(|&u| self.degrees[u]).collect(),
            include: SparseMatrix::from_cols(n, basis.iter().map(|&u| self.incl[u].clone().unwrap()).collect()),
            project: SparseMatrix::from_cols(
                basis.len(),
                self.p.iter().map(|v| v.reindex(f, |u| Some(pos[u]))).collect(),
            ),
            homotopy: SparseMatrix::from_cols(n, self.h.clone()),
        }
    }
}

/// A contraction of a finite based complex onto a basis of its (co)homology.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Contraction {
    pub field: Field,
    /// Degree of the differential (−1 for chains, +1 for cochains).
    pub d_degree: i32,
    pub degrees: Vec<i32>,
    pub differential: SparseMatrix,
    /// The critical cell labelling each basis vector of H.
    pub basis_cells: Vec<usize>,
    pub basis_degrees: Vec<i32>,
    /// i: H → A.
    pub include: SparseMatrix,
    /// p: A → H.
    pub project: SparseMatrix,
    /// h: A → A, of degree −d_degree.
    pub homotopy: SparseMatrix,
}

impl Contraction {
    /// Runs the incremental algorithm over an explicit list of
    /// `(degree, differential)` cells.
    pub fn of_cells(field: Field, d_degree: i32, cells: &[(i32, SparseVec)], pivot: PivotRule) -> Contraction {
        let mut b = ContractionBuilder::new(field, d_degree, pivot);
        for (deg, d) in cells {
            b.push(*deg, d.clone());
        }
        b.snapshot()
    }

    pub fn dim_a(&self) -> usize {
        self.degrees.len()
    }

    pub fn dim_h(&self) -> usize {
        self.basis_cells.len()
    }

    pub fn rank_in_degree(&self, d: i32) -> usize {
        self.basis_degrees.iter().filter(|&&x| x == d).count()
    }

    /// π = i∘p as a matrix on A.
    pub fn pi(&self) -> SparseMatrix {
        self.include.mul(self.field, &self.project)
    }

    /// Lists every failed identity; empty iff all five hold exactly.
    pub fn check_identities(&self) -> Vec<String> {
        let f = self.field;
        let n = self.dim_a();
        let mut out = Vec::new();
        let (d, h, i, p) = (&self.differential, &self.homotopy, &self.include, &self.project);
        if !d.mul(f, d).is_zero() {
            out.push("d∘d ≠ 0".to_string());
        }
        let lhs = i.mul(f, p).sub(f, &SparseMatrix::identity(n));
        let rhs = d.mul(f, h).add(f, &h.mul(f, d));
        if lhs != rhs {
            out.push("ip − id ≠ dh + hd".to_string());
        }
        if p.mul(f, i) != SparseMatrix::identity(self.dim_h()) {
            out.push("pi ≠ id".to_string());
        }
        if !h.mul(f, i).is_zero() {
            out.push("hi ≠ 0".to_string());
        }
        if !p.mul(f, h).is_zero() {
            out.push("ph ≠ 0".to_string());
        }
        if !h.mul(f, h).is_zero() {
            out.push("hh ≠ 0".to_string());
        }
        out
    }

    /// The transposed contraction on the dual complex:
    /// (Aᵛ, dᵀ, i' = pᵀ, p' = iᵀ, h' = hᵀ).
    pub fn dual(&self) -> Contraction {
        Contraction {
            field: self.field,
            d_degree: -self.d_degree,
            degrees: self.degrees.clone(),
            differential: self.differential.transpose(),
            basis_cells: self.basis_cells.clone(),
            basis_degrees: self.basis_degrees.clone(),
            include: self.project.transpose(),
            project: self.include.transpose(),
            homotopy: self.homotopy.transpose(),
        }
    }
}

/// One materialized stage of a persistent contraction.
#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    /// The critical value at which this stage begins.
    pub value: f64,
    /// Number of cells present.
    pub prefix: usize,
    pub contraction: Contraction,
}

/// Contractions at every critical value, linked by the inclusion chain maps.
#[derive(Clone, Debug, Serialize)]
pub struct PersistentTransferData {
    pub field: Field,
    pub dual: bool,
    pub stages: Vec<Stage>,
    pub steps: Vec<Step>,
}

impl PersistentTransferData {
    /// The inclusion A_j → A_{j+1} (or its transpose, the restriction, on the dual).
    pub fn stage_map(&self, j: usize) -> SparseMatrix {
        let (a, b) = (self.stages[j].prefix, self.stages[j + 1].prefix);
        let inc = SparseMatrix::from_cols(b, (0..a).map(SparseVec::unit).collect());
        if self.dual {
            inc.transpose()
        } else {
            inc
        }
    }

    pub fn stage_at(&self, t: f64) -> Option<&Stage> {
        let k = self.stages.partition_point(|s| s.value <= t);
        k.checked_sub(1).map(|k| &self.stages[k])
    }
}

/// Runs the incremental algorithm along the filtration order of `cx`,
/// materializing the contraction at the end of each critical value.
pub fn incremental_contraction(cx: &FilteredComplex, field: Field) -> Result<PersistentTransferData> {
    incremental_contraction_with(cx, field, PivotRule::Smallest)
}

pub fn incremental_contraction_with(cx: &FilteredComplex, field: Field, pivot: PivotRule) -> Result<PersistentTransferData> {
    require_ffdata(cx)?;
    let mut b = ContractionBuilder::new(field, -1, pivot);
    let mut stages = Vec::new();
    let mut steps = Vec::with_capacity(cx.len());
    for k in 0..cx.len() {
        steps.push(b.push(cx.dim(k) as i32, cx.boundary(k, field)));
        if k + 1 == cx.len() || cx.value(k + 1) > cx.value(k) {
            stages.push(Stage { value: cx.value(k), prefix: k + 1, contraction: b.snapshot() });
        }
    }
    Ok(PersistentTransferData { field, dual: false, stages, steps })
}

/// Transposes every stage.
pub fn dualize(ptd: &PersistentTransferData) -> PersistentTransferData {
    PersistentTransferData {
        field: ptd.field,
        dual: !ptd.dual,
        stages: ptd
            .stages
            .iter()
            .map(|s| Stage { value: s.value, prefix: s.prefix, contraction: s.contraction.dual() })
            .collect(),
        steps: ptd.steps.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn one_vertex() {
        let cx = samples::full_simplex(0);
        let ptd = incremental_contraction(&cx, Field::f2()).unwrap();
        let c = &ptd.stages[0].contraction;
        assert!(c.homotopy.is_zero());
        assert_eq!(c.include, SparseMatrix::identity(1));
        assert_eq!(c.project, SparseMatrix::identity(1));
        let d = dualize(&ptd);
        assert_eq!(d.stages[0].contraction.include, SparseMatrix::identity(1));
        assert_eq!(d.stages[0].contraction.dual(), *c);
    }

    #[test]
    fn two_points_then_edge() {
        let cx = crate::complex::import_text("0 ; 0\n1 ; 0\n0 1 ; 1\n").unwrap();
        for f in [Field::f2(), Field::f3()] {
            let ptd = incremental_contraction(&cx, f).unwrap();
            assert_eq!(ptd.stages.len(), 2);
            assert_eq!(ptd.stages[0].contraction.dim_h(), 2);
            let last = &ptd.stages[1].contraction;
            assert_eq!(last.rank_in_degree(0), 1);
            // the smallest pivot kills vertex 0; h sends it to ± the edge
            assert_eq!(last.basis_cells, vec![1]);
            assert_eq!(last.homotopy.col(0).indices().collect::<Vec<_>>(), vec![2]);
            assert!(last.check_identities().is_empty());
            assert_eq!(ptd.steps[2], Step::Killed { cell: 2, class: 0 });
        }
    }

    #[test]
    fn identities_on_triangulations() {
        for cx in [samples::torus(), samples::rp2(), samples::octahedron()] {
            for f in [Field::f2(), Field::f3()] {
                for rule in [PivotRule::Smallest, PivotRule::Largest] {
                    let ptd = incremental_contraction_with(&cx, f, rule).unwrap();
                    let c = &ptd.stages.last().unwrap().contraction;
                    assert!(c.check_identities().is_empty(), "{:?}", c.check_identities());
                    assert!(c.dual().check_identities().is_empty());
                }
            }
        }
    }

    #[test]
    fn pi_is_idempotent() {
        let cx = samples::torus();
        let c = incremental_contraction(&cx, Field::f3()).unwrap().stages.pop().unwrap().contraction;
        let pi = c.pi();
        assert_eq!(pi.mul(Field::f3(), &pi), pi);
        assert_eq!(pi.rank(Field::f3()), c.dim_h());
    }
}
