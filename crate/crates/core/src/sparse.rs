//! Sparse vectors and column-major sparse matrices over 𝔽p.
//!
//! A [`SparseVec`] is a sorted list of `(index, value)` pairs with no stored
//! zeros. Matrices store one such vector per column, which is the layout the
//! left-to-right reductions want.

use serde::{Deserialize, Serialize};

use crate::field::Field;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparseVec {
    entries: Vec<(usize, u32)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec { entries: vec![(i, 1)] }
    }

    /// Builds from arbitrary pairs: sorts, sums duplicates, drops zeros.
    pub fn from_pairs(field: Field, pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut v: Vec<(usize, u32)> = pairs.into_iter().collect();
        v.sort_unstable_by_key(|e| e.0);
        let mut out: Vec<(usize, u32)> = Vec::with_capacity(v.len());
        for (i, a) in v {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 = field.add(last.1, a),
                _ => out.push((i, a % field.modulus())),
            }
        }
        out.retain(|e| e.1 != 0);
        SparseVec { entries: out }
    }

    /// Caller guarantees sorted, unique, nonzero entries.
    pub fn from_sorted(entries: Vec<(usize, u32)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|e| e.1 != 0));
        SparseVec { entries }
    }

    pub fn from_dense(field: Field, dense: &[u32]) -> Self {
        SparseVec {
            entries: dense
                .iter()
                .enumerate()
                .filter(|(_, &a)| a % field.modulus() != 0)
                .map(|(i, &a)| (i, a % field.modulus()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<u32> {
        let mut d = vec![0; len];
        for &(i, a) in &self.entries {
            d[i] = a;
        }
        d
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.entries.iter().copied()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn get(&self, i: usize) -> u32 {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.entries[k].1,
            Err(_) => 0,
        }
    }

    /// Largest index with a nonzero entry (the "low" of a column).
    pub fn last(&self) -> Option<(usize, u32)> {
        self.entries.last().copied()
    }

    pub fn first(&self) -> Option<(usize, u32)> {
        self.entries.first().copied()
    }

    pub fn scale(&self, field: Field, a: u32) -> SparseVec {
        if a % field.modulus() == 0 {
            return SparseVec::new();
        }
        SparseVec { entries: self.entries.iter().map(|&(i, v)| (i, field.mul(v, a))).collect() }
    }

    pub fn neg(&self, field: Field) -> SparseVec {
        SparseVec { entries: self.entries.iter().map(|&(i, v)| (i, field.neg(v))).collect() }
    }

    /// `self + a * other`.
    pub fn add_scaled(&self, field: Field, a: u32, other: &SparseVec) -> SparseVec {
        if a == 0 || other.is_empty() {
            return self.clone();
        }
        let (x, y) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(x.len() + y.len());
        let (mut i, mut j) = (0, 0);
        while i < x.len() && j < y.len() {
            if x[i].0 < y[j].0 {
                out.push(x[i]);
                i += 1;
            } else if x[i].0 > y[j].0 {
                out.push((y[j].0, field.mul(a, y[j].1)));
                j += 1;
            } else {
                let s = field.add(x[i].1, field.mul(a, y[j].1));
                if s != 0 {
                    out.push((x[i].0, s));
                }
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&x[i..]);
        out.extend(y[j..].iter().map(|&(k, v)| (k, field.mul(a, v))));
        SparseVec { entries: out }
    }

    pub fn axpy(&mut self, field: Field, a: u32, other: &SparseVec) {
        if a == 0 || other.is_empty() {
            return;
        }
        *self = self.add_scaled(field, a, other);
    }

    pub fn add(&self, field: Field, other: &SparseVec) -> SparseVec {
        self.add_scaled(field, 1, other)
    }

    pub fn sub(&self, field: Field, other: &SparseVec) -> SparseVec {
        self.add_scaled(field, field.neg(1), other)
    }

    pub fn dot(&self, field: Field, other: &SparseVec) -> u32 {
        let (x, y) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut acc = 0u32;
        while i < x.len() && j < y.len() {
            match x[i].0.cmp(&y[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc = field.add(acc, field.mul(x[i].1, y[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Keeps only entries whose index satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(usize) -> bool) -> SparseVec {
        SparseVec { entries: self.entries.iter().copied().filter(|e| keep(e.0)).collect() }
    }

    /// Re-indexes through `map`; entries mapped to `None` are dropped.
    pub fn reindex(&self, field: Field, mut map: impl FnMut(usize) -> Option<usize>) -> SparseVec {
        SparseVec::from_pairs(field, self.entries.iter().filter_map(|&(i, a)| map(i).map(|j| (j, a))))
    }
}

/// Accumulates many scaled vectors and normalizes once at the end.
pub struct Accumulator {
    field: Field,
    pairs: Vec<(usize, u32)>,
}

impl Accumulator {
    pub fn new(field: Field) -> Self {
        Accumulator { field, pairs: Vec::new() }
    }

    pub fn add(&mut self, a: u32, v: &SparseVec) {
        if a == 0 {
            return;
        }
        let f = self.field;
        self.pairs.extend(v.iter().map(|(i, x)| (i, f.mul(a, x))));
    }

    pub fn add_entry(&mut self, i: usize, a: u32) {
        if a != 0 {
            self.pairs.push((i, a));
        }
    }

    pub fn finish(self) -> SparseVec {
        SparseVec::from_pairs(self.field, self.pairs)
    }
}

/// Column-major sparse matrix with explicit dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    nrows: usize,
    cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, cols: vec![SparseVec::new(); ncols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix { nrows: n, cols: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_cols(nrows: usize, cols: Vec<SparseVec>) -> Self {
        debug_assert!(cols.iter().all(|c| c.last().map_or(true, |(i, _)| i < nrows)));
        SparseMatrix { nrows, cols }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &SparseVec {
        &self.cols[j]
    }

    pub fn cols(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.cols[j].get(i)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    /// `M v`.
    pub fn apply(&self, field: Field, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new(field);
        for (j, a) in v.iter() {
            acc.add(a, &self.cols[j]);
        }
        acc.finish()
    }

    /// `self * other`.
    pub fn mul(&self, field: Field, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), other.nrows, "dimension mismatch in product");
        SparseMatrix {
            nrows: self.nrows,
            cols: other.cols.iter().map(|c| self.apply(field, c)).collect(),
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows: Vec<Vec<(usize, u32)>> = vec![Vec::new(); self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, a) in c.iter() {
                rows[i].push((j, a));
            }
        }
        SparseMatrix {
            nrows: self.ncols(),
            cols: rows.into_iter().map(SparseVec::from_sorted).collect(),
        }
    }

    pub fn add(&self, field: Field, other: &SparseMatrix) -> SparseMatrix {
        self.add_scaled(field, 1, other)
    }

    pub fn sub(&self, field: Field, other: &SparseMatrix) -> SparseMatrix {
        self.add_scaled(field, field.neg(1), other)
    }

    fn add_scaled(&self, field: Field, a: u32, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols()), (other.nrows, other.ncols()));
        SparseMatrix {
            nrows: self.nrows,
            cols: self.cols.iter().zip(&other.cols).map(|(x, y)| x.add_scaled(field, a, y)).collect(),
        }
    }

    /// Rank by left-to-right column reduction on a copy.
    pub fn rank(&self, field: Field) -> usize {
        let mut pivots: std::collections::HashMap<usize, SparseVec> = Default::default();
        let mut r = 0;
        for c in &self.cols {
            let mut c = c.clone();
            while let Some((low, a)) = c.last() {
                match pivots.get(&low) {
                    Some(p) => {
                        let b = p.last().unwrap().1;
                        let factor = field.neg(field.mul(a, field.inv(b)));
                        c.axpy(field, factor, p);
                    }
                    None => {
                        pivots.insert(low, c);
                        r += 1;
                        break;
                    }
                }
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Field {
        Field::f3()
    }

    #[test]
    fn from_pairs_normalizes() {
        let v = SparseVec::from_pairs(f3(), [(4, 1), (1, 2), (4, 2), (0, 3)]);
        assert_eq!(v.entries(), &[(1, 2)]);
    }

    #[test]
    fn add_scaled_cancels() {
        let f = f3();
        let a = SparseVec::from_pairs(f, [(0, 1), (2, 2)]);
        let b = SparseVec::from_pairs(f, [(0, 1), (3, 1)]);
        let c = a.add_scaled(f, 2, &b);
        assert_eq!(c.entries(), &[(2, 2), (3, 2)]);
        assert_eq!(a.sub(f, &a), SparseVec::new());
        assert_eq!(a.dot(f, &b), 1);
    }

    #[test]
    fn matrix_product_and_transpose() {
        let f = f3();
        let m = SparseMatrix::from_cols(
            2,
            vec![SparseVec::from_pairs(f, [(0, 1), (1, 1)]), SparseVec::from_pairs(f, [(1, 2)])],
        );
        let mt = m.transpose();
        assert_eq!(mt.get(0, 1), 1);
        assert_eq!(mt.get(1, 0), 0);
        assert_eq!(mt.transpose(), m);
        let id = SparseMatrix::identity(2);
        assert_eq!(m.mul(f, &id), m);
        assert_eq!(m.rank(f), 2);
        let sq = m.mul(f, &m);
        assert_eq!(sq.get(1, 1), 1);
    }

    #[test]
    fn rank_of_dependent_columns() {
        let f = Field::f2();
        let a = SparseVec::from_pairs(f, [(0, 1), (1, 1)]);
        let b = SparseVec::from_pairs(f, [(1, 1), (2, 1)]);
        let c = a.add(f, &b);
        let m = SparseMatrix::from_cols(3, vec![a, b, c]);
        assert_eq!(m.rank(f), 2);
    }
}
