//! Simplicial (co)chains at a filtration stage, the Alexander–Whitney cup
//! product and Steenrod's cup-i products.
//!
//! Cochains are [`SparseVec`]s indexed by simplex position in the filtered
//! complex; all simplices of a cochain share one dimension, its degree.

use crate::complex::FilteredComplex;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::sparse::{SparseMatrix, SparseVec};

/// The chain complex of the prefix of `cx` alive at a given stage, with
/// cells grouped by dimension.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub field: Field,
    /// Global simplex positions per dimension.
    pub cells: Vec<Vec<usize>>,
    /// `boundary[k]`: C_k → C_{k−1} in local coordinates (empty for k = 0).
    pub boundary: Vec<SparseMatrix>,
}

/// Boundary matrices of the subcomplex alive at time `t`.
pub fn boundary_matrices(cx: &FilteredComplex, t: f64, field: Field) -> ChainComplex {
    chain_complex_of_prefix(cx, cx.prefix_len(t), field)
}

pub fn chain_complex_of_prefix(cx: &FilteredComplex, prefix: usize, field: Field) -> ChainComplex {
    let top = cx.top_dim();
    let cells: Vec<Vec<usize>> = (0..=top)
        .map(|d| cx.simplices_of_dim(d).iter().copied().take_while(|&k| k < prefix).collect())
        .collect();
    let mut local = vec![usize::MAX; prefix];
    for cs in &cells {
        for (i, &k) in cs.iter().enumerate() {
            local[k] = i;
        }
    }
    let boundary = (0..=top)
        .map(|d| {
            if d == 0 {
                return SparseMatrix::zeros(0, cells[0].len());
            }
            let cols = cells[d]
                .iter()
                .map(|&k| cx.boundary(k, field).reindex(field, |j| Some(local[j])))
                .collect();
            SparseMatrix::from_cols(cells[d - 1].len(), cols)
        })
        .collect();
    ChainComplex { field, cells, boundary }
}

impl ChainComplex {
    pub fn rank_boundary(&self, d: usize) -> usize {
        if d == 0 || d >= self.boundary.len() {
            0
        } else {
            self.boundary[d].rank(self.field)
        }
    }

    /// dim H_d = dim C_d − rank ∂_d − rank ∂_{d+1}.
    pub fn betti(&self, d: usize) -> usize {
        let cd = self.cells.get(d).map_or(0, |c| c.len());
        cd - self.rank_boundary(d) - self.rank_boundary(d + 1)
    }

    pub fn bettis(&self) -> Vec<usize> {
        (0..self.cells.len()).map(|d| self.betti(d)).collect()
    }

    /// True iff every composite ∂_{d−1}∂_d vanishes.
    pub fn is_complex(&self) -> bool {
        (2..self.boundary.len()).all(|d| self.boundary[d - 1].mul(self.field, &self.boundary[d]).is_zero())
    }

    /// The dual cochain complex: coboundaries δ^k = ∂_{k+1}ᵀ.
    pub fn dual(&self) -> CochainComplex {
        CochainComplex {
            field: self.field,
            basis_by_degree: self.cells.clone(),
            coboundary: (0..self.cells.len())
                .map(|k| match self.boundary.get(k + 1) {
                    Some(b) => b.transpose(),
                    None => SparseMatrix::zeros(0, self.cells[k].len()),
                })
                .collect(),
        }
    }
}

/// Cochain complex at a fixed stage; `coboundary[k]`: C^k → C^{k+1}.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    pub field: Field,
    pub basis_by_degree: Vec<Vec<usize>>,
    pub coboundary: Vec<SparseMatrix>,
}

impl CochainComplex {
    pub fn is_complex(&self) -> bool {
        (1..self.coboundary.len()).all(|k| self.coboundary[k].mul(self.field, &self.coboundary[k - 1]).is_zero())
    }
}

/// Coboundary of a cochain: (δu)(σ) = u(∂σ), over simplices in the prefix.
pub fn coboundary(cx: &FilteredComplex, prefix: usize, field: Field, u: &SparseVec, degree: usize) -> SparseVec {
    let mut out = Vec::new();
    for &k in cx.simplices_of_dim(degree + 1).iter().take_while(|&&k| k < prefix) {
        let v = cx.boundary(k, field).dot(field, u);
        if v != 0 {
            out.push((k, v));
        }
    }
    SparseVec::from_sorted(out)
}

/// Alexander–Whitney cup product: (u∪v)(σ) = u(front p-face)·v(back q-face).
pub fn cup(cx: &FilteredComplex, prefix: usize, field: Field, u: &SparseVec, p: usize, v: &SparseVec, q: usize) -> SparseVec {
    if u.is_empty() || v.is_empty() {
        return SparseVec::new();
    }
    let mut out = Vec::new();
    for &k in cx.simplices_of_dim(p + q).iter().take_while(|&&k| k < prefix) {
        let s = cx.vertices(k);
        let a = match cx.index_of(&s[..=p]) {
            Some(f) => u.get(f),
            None => 0,
        };
        if a == 0 {
            continue;
        }
        let b = match cx.index_of(&s[p..]) {
            Some(f) => v.get(f),
            None => 0,
        };
        if b != 0 {
            out.push((k, field.mul(a, b)));
        }
    }
    SparseVec::from_sorted(out)
}

/// Checks that a cochain's support has the expected dimension and lies in
/// the prefix.
pub fn check_degree(cx: &FilteredComplex, prefix: usize, u: &SparseVec, degree: usize) -> Result<()> {
    if degree > cx.dimension_cap() {
        return Err(Error::InvalidInput(format!("degree {degree} exceeds the dimension cap {}", cx.dimension_cap())));
    }
    for k in u.indices() {
        if k >= prefix || cx.dim(k) != degree {
            return Err(Error::InvalidInput(format!("cochain entry at simplex {k} is not a live {degree}-simplex")));
        }
    }
    Ok(())
}

/// All strictly increasing `len`-tuples drawn from `0..=n`.
fn increasing_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(start: usize, n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for j in start..=n {
            cur.push(j);
            rec(j + 1, n, len, cur, out);
            cur.pop();
        }
    }
    rec(0, n, len, &mut cur, &mut out);
    out
}

/// Steenrod's cup-i product over 𝔽2 by the overlapping-interval formula.
///
/// For an n-simplex (n = p + q − i) and cut points j₀ < … < j_i, the
/// intervals [0,j₀], [j₀,j₁], …, [j_i,n] alternate between the u-face
/// (even intervals) and the v-face (odd intervals); the term counts when
/// both faces have the right dimensions.
pub fn cup_i(
    cx: &FilteredComplex,
    prefix: usize,
    field: Field,
    u: &SparseVec,
    p: usize,
    v: &SparseVec,
    q: usize,
    i: usize,
) -> Result<SparseVec> {
    if field.modulus() != 2 {
        return Err(Error::Unsupported("cup-i products in odd characteristic".into()));
    }
    if i > p.min(q) || u.is_empty() || v.is_empty() {
        return Ok(SparseVec::new());
    }
    let n = p + q - i;
    let cuts = increasing_tuples(n, i + 1);
    let mut out = Vec::new();
    for &k in cx.simplices_of_dim(n).iter().take_while(|&&k| k < prefix) {
        let s = cx.vertices(k);
        let mut acc = 0u32;
        for c in &cuts {
            let mut ends = Vec::with_capacity(i + 3);
            ends.push(0);
            ends.extend_from_slice(c);
            ends.push(n);
            let mut uf: Vec<u32> = Vec::with_capacity(p + 1);
            let mut vf: Vec<u32> = Vec::with_capacity(q + 1);
            for w in 0..ends.len() - 1 {
                let target = if w % 2 == 0 { &mut uf } else { &mut vf };
                for x in ends[w]..=ends[w + 1] {
                    if target.last() != Some(&s[x]) {
                        target.push(s[x]);
                    }
                }
            }
            if uf.len() != p + 1 || vf.len() != q + 1 {
                continue;
            }
            let a = cx.index_of(&uf).map_or(0, |f| u.get(f));
            if a == 0 {
                continue;
            }
            let b = cx.index_of(&vf).map_or(0, |f| v.get(f));
            acc ^= a & b & 1;
        }
        if acc != 0 {
            out.push((k, 1));
        }
    }
    Ok(SparseVec::from_sorted(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn circle_and_filled_triangle() {
        let f = Field::f2();
        let circle = samples::boundary_of_simplex(2);
        let cc = chain_complex_of_prefix(&circle, circle.len(), f);
        assert_eq!(cc.rank_boundary(1), 2);
        assert_eq!(cc.bettis(), vec![1, 1]);
        let tri = samples::full_simplex(2);
        let cc = chain_complex_of_prefix(&tri, tri.len(), f);
        assert_eq!(cc.bettis(), vec![1, 0, 0]);
        assert!(cc.is_complex());
        assert!(cc.dual().is_complex());
        let pt = samples::full_simplex(0);
        assert_eq!(chain_complex_of_prefix(&pt, 1, f).bettis(), vec![1]);
    }

    #[test]
    fn constant_cochain_is_unit() {
        let f = Field::f3();
        let cx = samples::torus();
        let n = cx.len();
        let one = SparseVec::from_pairs(f, cx.simplices_of_dim(0).iter().map(|&k| (k, 1)));
        let v = SparseVec::from_pairs(f, cx.simplices_of_dim(1).iter().enumerate().map(|(i, &k)| (k, (i % 3) as u32)));
        assert_eq!(cup(&cx, n, f, &one, 0, &v, 1), v);
        assert_eq!(cup(&cx, n, f, &v, 1, &one, 0), v);
    }

    #[test]
    fn cup_zero_is_cup() {
        let f = Field::f2();
        let cx = samples::torus();
        let n = cx.len();
        let e = cx.simplices_of_dim(1);
        for &a in e.iter().take(6) {
            for &b in e.iter().take(6) {
                let (u, v) = (SparseVec::unit(a), SparseVec::unit(b));
                assert_eq!(cup_i(&cx, n, f, &u, 1, &v, 1, 0).unwrap(), cup(&cx, n, f, &u, 1, &v, 1));
            }
        }
        assert!(cup_i(&cx, n, Field::f3(), &SparseVec::unit(0), 0, &SparseVec::unit(0), 0, 0).is_err());
    }
}
