//! Mod-2 Steenrod squares on (persistent) cohomology, Ádem relations and
//! the symbolic odd-primary Ádem data.
//!
//! For a class x of degree n with cocycle representative u,
//! Sq^k(x) = [u ∪_{n−k} u] for 0 ≤ k ≤ n and Sq^k(x) = 0 for k > n.

use serde::Serialize;

use crate::ainfty::restriction_map;
use crate::complex::FilteredComplex;
use crate::contraction::PersistentTransferData;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::field::{binomial_mod, Field};
use crate::transfer::{SimplicialTransfer, TransferData};

/// Matrices of Sq¹, …, Sq^{k_max} on one cohomology basis (columns are
/// inputs, rows outputs).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SquareOps {
    pub degrees: Vec<i32>,
    pub k_max: usize,
    squares: Vec<DenseMatrix>,
}

impl SquareOps {
    /// Wraps Sq¹, …, Sq^k as given.
    pub fn from_matrices(degrees: Vec<i32>, squares: Vec<DenseMatrix>) -> Self {
        SquareOps { degrees, k_max: squares.len(), squares }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn top_degree(&self) -> i32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Sq^k as a matrix; Sq⁰ = id, and Sq^k = 0 beyond the top degree.
    /// None when 0 < k ≤ top degree but k was not computed.
    pub fn sq(&self, k: usize) -> Option<DenseMatrix> {
        let n = self.dim();
        if k == 0 {
            Some(DenseMatrix::identity(n))
        } else if k <= self.k_max {
            Some(self.squares[k - 1].clone())
        } else if k as i32 > self.top_degree() {
            Some(DenseMatrix::zeros(n, n))
        } else {
            None
        }
    }

    /// Sq^k(class) as a dense coordinate vector.
    pub fn apply(&self, k: usize, class: usize) -> Option<Vec<u32>> {
        self.sq(k).map(|m| m.col(class))
    }
}

/// Computes Sq^k for 1 ≤ k ≤ k_max on the classes of `td`.
pub fn steenrod_squares<T: TransferData + ?Sized>(td: &T, k_max: usize) -> Result<SquareOps> {
    let f = td.field();
    if f.modulus() != 2 {
        return Err(Error::Unsupported("odd-p Steenrod action".into()));
    }
    let degrees = td.class_degrees().to_vec();
    let n = degrees.len();
    let reps: Vec<_> = (0..n).map(|x| td.include(x)).collect();
    let mut squares = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut m = DenseMatrix::zeros(n, n);
        for x in 0..n {
            let d = degrees[x];
            if (k as i32) > d {
                continue;
            }
            let i = (d - k as i32) as usize;
            let sq = td.cup_i(&reps[x], d, &reps[x], d, i)?;
            let image = td.project(&sq, d + k as i32);
            for (y, c) in image.iter() {
                m.set(y, x, c);
            }
        }
        squares.push(m);
    }
    Ok(SquareOps { degrees, k_max, squares })
}

/// Ádem coefficients over 𝔽2 for h < 2k: Sq^h Sq^k = Σ_i c_i Sq^{h+k−i} Sq^i,
/// returned as the list of i with c_i = binom(k−i−1, h−2i) = 1 (mod 2).
pub fn adem_terms(h: usize, k: usize) -> Vec<usize> {
    (0..=h / 2).filter(|&i| k > i && binomial_mod((k - i - 1) as i64, (h - 2 * i) as i64, 2) == 1).collect()
}

/// Violations of the Ádem relation for (h, k) on one set of squares.
pub fn check_adem(ops: &SquareOps, h: usize, k: usize) -> Vec<String> {
    let f = Field::f2();
    let mut out = Vec::new();
    if h == 0 || h >= 2 * k {
        out.push(format!("Ádem relation needs 0 < h < 2k, got h={h}, k={k}"));
        return out;
    }
    let need = |j: usize| ops.sq(j).ok_or(j);
    let lhs = match (need(h), need(k)) {
        (Ok(a), Ok(b)) => a.mul(f, &b),
        (Err(j), _) | (_, Err(j)) => {
            out.push(format!("Sq^{j} not computed"));
            return out;
        }
    };
    let mut rhs = DenseMatrix::zeros(ops.dim(), ops.dim());
    for i in adem_terms(h, k) {
        match (need(h + k - i), need(i)) {
            (Ok(a), Ok(b)) => {
                let t = a.mul(f, &b);
                for r in 0..rhs.rows() {
                    for c in 0..rhs.cols() {
                        rhs.set(r, c, rhs.get(r, c) ^ t.get(r, c));
                    }
                }
            }
            (Err(j), _) | (_, Err(j)) => {
                out.push(format!("Sq^{j} not computed"));
                return out;
            }
        }
    }
    if lhs != rhs {
        out.push(format!("Sq^{h}Sq^{k} ≠ Ádem sum"));
    }
    out
}

/// Violations of the unstable condition and of Sq^{|x|}x = x∪x, given the
/// cup square of every class.
pub fn check_top_square<T: TransferData + ?Sized>(td: &T, ops: &SquareOps) -> Vec<String> {
    let mut out = Vec::new();
    for x in 0..ops.dim() {
        let d = ops.degrees[x];
        if d <= 0 || d as usize > ops.k_max {
            continue;
        }
        let u = td.include(x);
        let cup = td.project(&td.product(&u, d, &u, d), 2 * d).to_dense(ops.dim());
        if ops.apply(d as usize, x).unwrap() != cup {
            out.push(format!("Sq^{d} x ≠ x∪x for class {x}"));
        }
        for k in (d as usize + 1)..=ops.k_max {
            if ops.apply(k, x).unwrap().iter().any(|&c| c != 0) {
                out.push(format!("Sq^{k} nonzero on degree-{d} class {x}"));
            }
        }
    }
    out
}

/// A symbolic monomial in the odd-primary Steenrod algebra: powers P^i and
/// Bocksteins β, left to right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Letter {
    P(usize),
    Beta,
}

/// Ádem relation for P^a P^b (a < pb) at an odd prime:
/// P^a P^b = Σ_i (−1)^{a+i} binom((p−1)(b−i)−1, a−pi) P^{a+b−i} P^i.
pub fn odd_adem_pp(p: u32, a: usize, b: usize) -> Result<Vec<(u32, Vec<Letter>)>> {
    let f = odd_field(p)?;
    if a >= p as usize * b {
        return Err(Error::InvalidInput(format!("P^{a}P^{b} is admissible (a ≥ pb)")));
    }
    let mut out = Vec::new();
    for i in 0..=a / p as usize {
        let top = (p as i64 - 1) * (b as i64 - i as i64) - 1;
        let c = signed_binom(f, top, (a - p as usize * i) as i64);
        let c = f.mul(c, f.sign(a + i));
        if c != 0 {
            out.push((c, vec![Letter::P(a + b - i), Letter::P(i)]));
        }
    }
    Ok(out)
}

/// Ádem relation for P^a β P^b (a ≤ pb):
/// Σ_i (−1)^{a+i} binom((p−1)(b−i), a−pi) β P^{a+b−i} P^i
///   + Σ_i (−1)^{a+i+1} binom((p−1)(b−i)−1, a−pi−1) P^{a+b−i} β P^i.
pub fn odd_adem_pbp(p: u32, a: usize, b: usize) -> Result<Vec<(u32, Vec<Letter>)>> {
    let f = odd_field(p)?;
    if a > p as usize * b {
        return Err(Error::InvalidInput(format!("P^{a}βP^{b} is admissible (a > pb)")));
    }
    let mut out = Vec::new();
    for i in 0..=a / p as usize {
        let r = (a - p as usize * i) as i64;
        let base = (p as i64 - 1) * (b as i64 - i as i64);
        let c1 = f.mul(signed_binom(f, base, r), f.sign(a + i));
        if c1 != 0 {
            out.push((c1, vec![Letter::Beta, Letter::P(a + b - i), Letter::P(i)]));
        }
        let c2 = f.mul(signed_binom(f, base - 1, r - 1), f.sign(a + i + 1));
        if c2 != 0 {
            out.push((c2, vec![Letter::P(a + b - i), Letter::Beta, Letter::P(i)]));
        }
    }
    Ok(out)
}

fn odd_field(p: u32) -> Result<Field> {
    if p == 2 {
        return Err(Error::InvalidInput("odd-primary relations need an odd prime".into()));
    }
    Field::new(p)
}

fn signed_binom(f: Field, n: i64, k: i64) -> u32 {
    binomial_mod(n, k, f.modulus())
}

/// Squares at every stage with the restriction maps between stages.
#[derive(Clone, Debug, Serialize)]
pub struct SteenrodAction {
    pub values: Vec<f64>,
    pub class_cells: Vec<Vec<usize>>,
    pub snapshots: Vec<SquareOps>,
    /// Same convention as the A∞ stage maps: H(j+1) → H(j).
    pub stage_maps: Vec<DenseMatrix>,
}

impl SteenrodAction {
    /// Violations of R ∘ Sq^k = Sq^k ∘ R for every stage map R.
    pub fn check_naturality(&self) -> Vec<String> {
        let f = Field::f2();
        let mut out = Vec::new();
        for (j, r) in self.stage_maps.iter().enumerate() {
            let (lo, hi) = (&self.snapshots[j], &self.snapshots[j + 1]);
            for k in 1..=lo.k_max.min(hi.k_max) {
                if r.mul(f, &hi.sq(k).unwrap()) != lo.sq(k).unwrap().mul(f, r) {
                    out.push(format!("Sq^{k} does not commute with the stage map {j}"));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let snaps: Vec<_> = self
            .snapshots
            .iter()
            .zip(&self.values)
            .map(|(s, v)| {
                let sq: Vec<_> = (1..=s.k_max)
                    .map(|k| {
                        let m = s.sq(k).unwrap();
                        serde_json::json!({"k": k, "rows": (0..m.rows()).map(|i| m.row(i).to_vec()).collect::<Vec<_>>()})
                    })
                    .collect();
                serde_json::json!({"value": v, "degrees": s.degrees, "squares": sq})
            })
            .collect();
        serde_json::json!({ "snapshots": snaps })
    }
}

/// Steenrod squares at every stage of a persistent contraction over 𝔽2.
/// `k_max` defaults to the top reliable degree.
pub fn persistent_steenrod(cx: &FilteredComplex, ptd: &PersistentTransferData, k_max: Option<usize>) -> Result<SteenrodAction> {
    if ptd.field.modulus() != 2 {
        return Err(Error::Unsupported("odd-p Steenrod action".into()));
    }
    let reliable = cx.max_reliable_degree();
    let k_max = k_max.unwrap_or(reliable);
    let duals: Vec<_> =
        ptd.stages.iter().map(|s| if ptd.dual { s.contraction.clone() } else { s.contraction.dual() }).collect();
    let views: Vec<SimplicialTransfer> =
        ptd.stages.iter().zip(&duals).map(|(s, c)| SimplicialTransfer::new(cx, s.prefix, c, reliable)).collect();
    let snapshots = views.iter().map(|v| steenrod_squares(v, k_max)).collect::<Result<Vec<_>>>()?;
    let stage_maps = (0..views.len().saturating_sub(1))
        .map(|j| restriction_map(&views[j + 1], &views[j], ptd.stages[j].prefix))
        .collect();
    Ok(SteenrodAction {
        values: ptd.stages.iter().map(|s| s.value).collect(),
        class_cells: views.iter().map(|v| v.class_cells()).collect(),
        snapshots,
        stage_maps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain;
    use crate::contraction::incremental_contraction;
    use crate::samples;
    use crate::sparse::SparseVec;
    use rand::{Rng, SeedableRng};

    fn final_ops(cx: &FilteredComplex) -> SquareOps {
        let ptd = incremental_contraction(cx, Field::f2()).unwrap();
        persistent_steenrod(cx, &ptd, None).unwrap().snapshots.pop().unwrap()
    }

    #[test]
    fn rp2_and_torus() {
        let ops = final_ops(&samples::rp2());
        assert_eq!(ops.degrees, vec![0, 1, 2]);
        assert_eq!(ops.apply(1, 1).unwrap(), vec![0, 0, 1]);
        assert!(ops.sq(1).unwrap().col(0).iter().all(|&c| c == 0));
        let t = final_ops(&samples::torus());
        assert!(t.sq(1).unwrap().is_zero());
    }

    #[test]
    fn adem_terms_match_table() {
        assert_eq!(adem_terms(1, 1), Vec::<usize>::new());
        assert_eq!(adem_terms(1, 2), vec![0]);
        assert_eq!(adem_terms(2, 2), vec![1]);
        assert_eq!(adem_terms(3, 2), Vec::<usize>::new());
        assert_eq!(adem_terms(2, 3), vec![0, 1]);
    }

    #[test]
    fn odd_adem_p1p1() {
        let r = odd_adem_pp(3, 1, 1).unwrap();
        assert_eq!(r, vec![(2, vec![Letter::P(2), Letter::P(0)])]);
        assert!(odd_adem_pp(3, 3, 1).is_err());
        assert!(odd_adem_pp(2, 1, 1).is_err());
        let r = odd_adem_pbp(3, 1, 1).unwrap();
        assert!(!r.is_empty());
    }

    #[test]
    fn odd_characteristic_is_refused() {
        let cx = samples::rp2();
        let ptd = incremental_contraction(&cx, Field::f3()).unwrap();
        let e = persistent_steenrod(&cx, &ptd, None).unwrap_err();
        assert_eq!(e.to_string(), "unsupported: odd-p Steenrod action");
    }

    #[test]
    fn cup_i_coboundary_identity() {
        let f = Field::f2();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let cx = samples::random_filtered_complex(&mut rng, 40, 7, 3);
            let n = cx.len();
            let top = cx.top_dim();
            let rand_cochain = |rng: &mut rand_chacha::ChaCha8Rng, d: usize| {
                SparseVec::from_sorted(cx.simplices_of_dim(d).iter().filter(|_| rng.gen_bool(0.5)).map(|&k| (k, 1)).collect())
            };
            for p in 0..=top {
                for q in 0..=top {
                    let u = rand_cochain(&mut rng, p);
                    let v = rand_cochain(&mut rng, q);
                    for i in 1..=p.min(q) {
                        if p + q - i + 1 > top {
                            continue;
                        }
                        let lhs = chain::coboundary(&cx, n, f, &chain::cup_i(&cx, n, f, &u, p, &v, q, i).unwrap(), p + q - i);
                        let mut rhs = chain::cup_i(&cx, n, f, &u, p, &v, q, i - 1).unwrap();
                        rhs = rhs.add(f, &chain::cup_i(&cx, n, f, &v, q, &u, p, i - 1).unwrap());
                        rhs = rhs.add(f, &chain::cup_i(&cx, n, f, &chain::coboundary(&cx, n, f, &u, p), p + 1, &v, q, i).unwrap());
                        rhs = rhs.add(f, &chain::cup_i(&cx, n, f, &u, p, &chain::coboundary(&cx, n, f, &v, q), q + 1, i).unwrap());
                        assert_eq!(lhs, rhs, "p={p} q={q} i={i}");
                    }
                }
            }
        }
    }

    #[test]
    fn squares_are_representative_independent() {
        let f = Field::f2();
        let cx = samples::suspension_faces(&samples::rp2_faces(), 6, 7);
        let cx = samples::static_complex(&cx);
        let ptd = incremental_contraction(&cx, f).unwrap();
        let dual = ptd.stages[0].contraction.dual();
        let v = SimplicialTransfer::new(&cx, cx.len(), &dual, 3);
        let n = cx.len();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for x in 0..v.num_classes() {
            let d = v.class_degrees()[x] as usize;
            if d == 0 {
                continue;
            }
            let u = v.include(x);
            let w = SparseVec::from_sorted(
                cx.simplices_of_dim(d - 1).iter().filter(|_| rng.gen_bool(0.5)).map(|&k| (k, 1)).collect(),
            );
            let u2 = u.add(f, &chain::coboundary(&cx, n, f, &w, d - 1));
            for k in 1..=d {
                let i = d - k;
                let a = v.project(&chain::cup_i(&cx, n, f, &u, d, &u, d, i).unwrap(), (d + k) as i32);
                let b = v.project(&chain::cup_i(&cx, n, f, &u2, d, &u2, d, i).unwrap(), (d + k) as i32);
                assert_eq!(a, b);
            }
        }
        let ops = steenrod_squares(&v, 3).unwrap();
        // Sq¹ : H² → H³ is nonzero on ΣℝP²
        assert!(!ops.sq(1).unwrap().is_zero());
        assert!(check_top_square(&v, &ops).is_empty());
        assert!(check_adem(&ops, 1, 1).is_empty() && check_adem(&ops, 1, 2).is_empty());
    }

    #[test]
    fn naturality_along_a_filtration() {
        let (x, _) = samples::suspended_rp2_vs_ball(0.1);
        let ptd = incremental_contraction(&x, Field::f2()).unwrap();
        let act = persistent_steenrod(&x, &ptd, None).unwrap();
        assert!(act.check_naturality().is_empty());
        assert!(act.to_json()["snapshots"].as_array().unwrap().len() == act.snapshots.len());
    }
}
