//! Finite-dimensional dg-algebras given by explicit tables, with the
//! algebraic models used as transfer test beds: exterior algebras with a
//! prescribed differential (Heisenberg, nilpotent towers) and the
//! Borromean / unlinked models with identical cohomology rings.

use std::collections::HashMap;

use crate::contraction::{Contraction, PivotRule};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::sparse::{Accumulator, SparseMatrix, SparseVec};

/// A cochain dg-algebra on an explicit basis; d has degree +1.
#[derive(Clone, Debug)]
pub struct FiniteDga {
    pub field: Field,
    pub names: Vec<String>,
    pub degrees: Vec<i32>,
    pub differential: Vec<SparseVec>,
    pub products: HashMap<(usize, usize), SparseVec>,
    pub unit: Option<usize>,
}

impl FiniteDga {
    pub fn new(field: Field, names: Vec<String>, degrees: Vec<i32>) -> Self {
        let n = names.len();
        assert_eq!(n, degrees.len());
        FiniteDga { field, names, degrees, differential: vec![SparseVec::new(); n], products: HashMap::new(), unit: None }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }

    /// Basis element by name; panics on unknown names (model construction only).
    pub fn e(&self, name: &str) -> usize {
        self.index(name).unwrap_or_else(|| panic!("unknown basis element {name}"))
    }

    pub fn set_differential(&mut self, k: usize, v: SparseVec) {
        self.differential[k] = v;
    }

    pub fn set_product(&mut self, a: usize, b: usize, v: SparseVec) {
        if v.is_empty() {
            self.products.remove(&(a, b));
        } else {
            self.products.insert((a, b), v);
        }
    }

    /// Declares `u` a two-sided unit.
    pub fn set_unit(&mut self, u: usize) {
        for k in 0..self.dim() {
            self.products.insert((u, k), SparseVec::unit(k));
            self.products.insert((k, u), SparseVec::unit(k));
        }
        self.unit = Some(u);
    }

    pub fn d(&self, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new(self.field);
        for (k, a) in v.iter() {
            acc.add(a, &self.differential[k]);
        }
        acc.finish()
    }

    pub fn mul(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let f = self.field;
        let mut acc = Accumulator::new(f);
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                if let Some(p) = self.products.get(&(i, j)) {
                    acc.add(f.mul(a, b), p);
                }
            }
        }
        acc.finish()
    }

    /// Degree of a homogeneous element (None for zero or mixed degrees).
    pub fn degree_of(&self, v: &SparseVec) -> Option<i32> {
        let mut it = v.indices().map(|k| self.degrees[k]);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Lists every failure of: homogeneity, d² = 0, Leibniz, associativity, unit.
    pub fn check(&self) -> Vec<String> {
        let f = self.field;
        let n = self.dim();
        let mut out = Vec::new();
        for k in 0..n {
            let dk = &self.differential[k];
            if !dk.is_empty() && self.degree_of(dk) != Some(self.degrees[k] + 1) {
                out.push(format!("d({}) is not homogeneous of degree {}", self.names[k], self.degrees[k] + 1));
            }
            if !self.d(dk).is_empty() {
                out.push(format!("d²({}) ≠ 0", self.names[k]));
            }
        }
        for (&(a, b), p) in &self.products {
            if self.degree_of(p) != Some(self.degrees[a] + self.degrees[b]) {
                out.push(format!("{}·{} has the wrong degree", self.names[a], self.names[b]));
            }
        }
        for a in 0..n {
            let ea = SparseVec::unit(a);
            for b in 0..n {
                let eb = SparseVec::unit(b);
                let ab = self.mul(&ea, &eb);
                let lhs = self.d(&ab);
                let sign = f.sign(self.degrees[a].unsigned_abs() as usize);
                let rhs = self.mul(&self.d(&ea), &eb).add_scaled(f, sign, &self.mul(&ea, &self.d(&eb)));
                if lhs != rhs {
                    out.push(format!("Leibniz fails on ({}, {})", self.names[a], self.names[b]));
                }
                for c in 0..n {
                    let ec = SparseVec::unit(c);
                    if self.mul(&ab, &ec) != self.mul(&ea, &self.mul(&eb, &ec)) {
                        out.push(format!("associativity fails on ({}, {}, {})", self.names[a], self.names[b], self.names[c]));
                    }
                }
            }
        }
        out
    }

    /// Contracts onto cohomology. Cells are processed by decreasing degree
    /// (stable in the basis order) so that d is triangular; the result is
    /// expressed in the original basis.
    pub fn contraction(&self, pivot: PivotRule) -> Contraction {
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&k| std::cmp::Reverse(self.degrees[k]));
        let mut pos = vec![0; n];
        for (i, &k) in order.iter().enumerate() {
            pos[k] = i;
        }
        let f = self.field;
        let cells: Vec<(i32, SparseVec)> = order
            .iter()
            .map(|&k| (self.degrees[k], self.differential[k].reindex(f, |j| Some(pos[j]))))
            .collect();
        let c = Contraction::of_cells(f, 1, &cells, pivot);
        let back = |m: &SparseMatrix, rows_are_cells: bool, cols_are_cells: bool| -> SparseMatrix {
            let nrows = if rows_are_cells { n } else { m.nrows() };
            let ncols = if cols_are_cells { n } else { m.ncols() };
            let mut cols = vec![SparseVec::new(); ncols];
            for (j, col) in m.cols().iter().enumerate() {
                let jj = if cols_are_cells { order[j] } else { j };
                cols[jj] = if rows_are_cells { col.reindex(f, |i| Some(order[i])) } else { col.clone() };
            }
            SparseMatrix::from_cols(nrows, cols)
        };
        Contraction {
            field: f,
            d_degree: 1,
            degrees: self.degrees.clone(),
            differential: back(&c.differential, true, true),
            basis_cells: c.basis_cells.iter().map(|&i| order[i]).collect(),
            basis_degrees: c.basis_degrees.clone(),
            include: back(&c.include, true, false),
            project: back(&c.project, false, true),
            homotopy: back(&c.homotopy, true, true),
        }
    }
}

/// Sign of the permutation sorting `v` (which must have distinct entries).
fn sort_sign(v: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The exterior algebra Λ(g₁,…,g_n) on degree-1 generators, with d given on
/// generators as combinations of monomials (sorted generator lists) and
/// extended by the Leibniz rule. Basis: all monomials, by degree then lex.
pub fn exterior_algebra(field: Field, gens: &[&str], dgens: &[Vec<(Vec<usize>, i64)>]) -> FiniteDga {
    let n = gens.len();
    let mut monos: Vec<Vec<usize>> = (0u32..1 << n).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect();
    monos.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let index: HashMap<Vec<usize>, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let names = monos
        .iter()
        .map(|m| if m.is_empty() { "1".to_string() } else { m.iter().map(|&i| gens[i]).collect::<Vec<_>>().join("") })
        .collect();
    let mut a = FiniteDga::new(field, names, monos.iter().map(|m| m.len() as i32).collect());
    for (i, s) in monos.iter().enumerate() {
        for (j, t) in monos.iter().enumerate() {
            if s.iter().any(|x| t.contains(x)) {
                continue;
            }
            let mut cat = s.clone();
            cat.extend_from_slice(t);
            let sign = sort_sign(&cat);
            cat.sort_unstable();
            a.set_product(i, j, SparseVec::from_pairs(field, [(index[&cat], field.from_i64(sign))]));
        }
    }
    a.unit = Some(0);
    let dg: Vec<SparseVec> = dgens
        .iter()
        .map(|terms| SparseVec::from_pairs(field, terms.iter().map(|(m, c)| (index[m], field.from_i64(*c)))))
        .collect();
    for (i, s) in monos.iter().enumerate() {
        let mut acc = Accumulator::new(field);
        for (j, &g) in s.iter().enumerate() {
            let pre = SparseVec::unit(index[&s[..j].to_vec()]);
            let post = SparseVec::unit(index[&s[j + 1..].to_vec()]);
            let term = a.mul(&a.mul(&pre, &dg[g]), &post);
            acc.add(field.sign(j), &term);
        }
        a.set_differential(i, acc.finish());
    }
    a
}

/// Λ(x, y, z) with dz = xy: the cochain model of the Heisenberg nilmanifold.
pub fn heisenberg(field: Field) -> FiniteDga {
    exterior_algebra(field, &["x", "y", "z"], &[vec![], vec![], vec![(vec![0, 1], 1)]])
}

/// Λ(x₁,…,x₄) with dx₃ = x₁x₂, dx₄ = x₁x₃: a two-step nilpotent tower
/// carrying nonzero m₃ and m₄.
pub fn nilpotent_tower(field: Field) -> FiniteDga {
    exterior_algebra(
        field,
        &["a", "b", "c", "e"],
        &[vec![], vec![], vec![(vec![0, 1], 1)], vec![(vec![0, 2], 1)]],
    )
}

/// Λ(a,…,e) with da = db = 0, dc = ab, dd = ac, de = ad + bc: rich enough
/// that m₃∘m₃ terms enter rel₅.
pub fn filiform(field: Field) -> FiniteDga {
    exterior_algebra(
        field,
        &["a", "b", "c", "d", "e"],
        &[vec![], vec![], vec![(vec![0, 1], 1)], vec![(vec![0, 2], 1)], vec![(vec![0, 3], 1), (vec![1, 2], 1)]],
    )
}

/// A model of a three-component link complement: H¹ = ⟨a, b, c⟩, H² = ⟨M, N⟩,
/// all cup products of degree-1 classes vanish (ab = du, bc = dv). With
/// `linked`, u·c = M makes the triple Massey product ⟨a, b, c⟩ = ±[M]; the
/// unlinked model drops that single product.
pub fn link_model(field: Field, linked: bool) -> FiniteDga {
    let names = ["1", "a", "b", "c", "u", "v", "P", "Q", "M", "N"];
    let degrees = vec![0, 1, 1, 1, 1, 1, 2, 2, 2, 2];
    let mut a = FiniteDga::new(field, names.iter().map(|s| s.to_string()).collect(), degrees);
    a.set_unit(0);
    let e = |k: usize| SparseVec::unit(k);
    let (ea, eb, ec, eu, ev, ep, eq, em) = (1, 2, 3, 4, 5, 6, 7, 8);
    a.set_differential(eu, e(ep));
    a.set_differential(ev, e(eq));
    a.set_product(ea, eb, e(ep));
    a.set_product(eb, ec, e(eq));
    if linked {
        a.set_product(eu, ec, e(em));
    }
    a
}

pub fn borromean_model(field: Field) -> FiniteDga {
    link_model(field, true)
}

pub fn unlinked_model(field: Field) -> FiniteDga {
    link_model(field, false)
}

/// Errors unless the algebra passes [`FiniteDga::check`].
pub fn require_valid(a: &FiniteDga) -> Result<()> {
    let v = a.check();
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidInput(v.join("; ")))
    }
}
