//! Standard triangulations, synthetic filtrations and random generators used
//! by tests, examples and the acceptance harness.

use rand::Rng;
use std::collections::BTreeSet;

use crate::ainfty::{transfer_ainfty, TransferOptions};
use crate::complex::{FilteredComplex, PointCloud};
use crate::contraction::PivotRule;
use crate::dga::{self, FiniteDga};
use crate::error::Result;
use crate::field::Field;
use crate::ledger::{synthetic_ledger, ProductLedger};
use crate::transfer::ModelTransfer;

/// All faces of the given simplices (vertex lists sorted, deduplicated).
pub fn closure(maximal: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut out: BTreeSet<Vec<u32>> = BTreeSet::new();
    for s in maximal {
        let mut s = s.clone();
        s.sort_unstable();
        let n = s.len();
        for mask in 1u32..(1 << n) {
            out.insert((0..n).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect());
        }
    }
    out.into_iter().collect()
}

/// Every simplex at value 0.
pub fn static_complex(maximal: &[Vec<u32>]) -> FilteredComplex {
    FilteredComplex::new(closure(maximal).into_iter().map(|s| (s, 0.0)).collect(), None, false)
        .expect("closed under faces")
}

/// Assigns `values[dim]` to each simplex (the last value repeats).
pub fn by_dimension(simplices: &[Vec<u32>], values: &[f64]) -> Vec<(Vec<u32>, f64)> {
    simplices
        .iter()
        .map(|s| (s.clone(), values[(s.len() - 1).min(values.len() - 1)]))
        .collect()
}

pub fn full_simplex(n: u32) -> FilteredComplex {
    static_complex(&[(0..=n).collect()])
}

/// ∂Δ^{n}: an (n−1)-sphere on n + 1 vertices.
pub fn boundary_of_simplex(n: u32) -> FilteredComplex {
    static_complex(&boundary_faces(&(0..=n).collect::<Vec<_>>()))
}

pub fn boundary_faces(s: &[u32]) -> Vec<Vec<u32>> {
    crate::complex::facets(s).collect()
}

/// The 7-vertex (Möbius) torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7.
pub fn torus_faces() -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for i in 0..7u32 {
        out.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
        out.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
    }
    out
}

pub fn torus() -> FilteredComplex {
    static_complex(&torus_faces())
}

/// The 6-vertex real projective plane.
pub fn rp2_faces() -> Vec<Vec<u32>> {
    [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1], [1, 2, 4], [2, 3, 5], [3, 4, 1], [4, 5, 2], [5, 1, 3]]
        .iter()
        .map(|t| t.to_vec())
        .collect()
}

pub fn rp2() -> FilteredComplex {
    static_complex(&rp2_faces())
}

pub fn octahedron_faces() -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for &(a, b) in &[(0u32, 1u32), (1, 2), (2, 3), (3, 0)] {
        out.push(vec![a, b, 4]);
        out.push(vec![a, b, 5]);
    }
    out
}

pub fn octahedron() -> FilteredComplex {
    static_complex(&octahedron_faces())
}

/// Unreduced suspension: joins every face with the two new apexes.
pub fn suspension_faces(faces: &[Vec<u32>], north: u32, south: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for f in faces {
        for apex in [north, south] {
            let mut s = f.clone();
            s.push(apex);
            out.push(s);
        }
    }
    out
}

/// Cone over every simplex in `simplices` (plus the apex itself).
pub fn cone_simplices(simplices: &[Vec<u32>], apex: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![apex]];
    for s in simplices {
        let mut c = s.clone();
        c.push(apex);
        out.push(c);
    }
    out
}

/// S² ∨ S¹ ∨ S¹: tetrahedron boundary on {0,1,2,3} and two triangles of
/// edges through vertex 0.
pub fn wedge_faces() -> Vec<Vec<u32>> {
    let mut out = boundary_faces(&[0, 1, 2, 3]);
    for e in [[0, 4], [4, 5], [0, 5], [0, 6], [6, 7], [0, 7]] {
        out.push(e.to_vec());
    }
    out
}

fn coned_filtration(
    faces: &[Vec<u32>],
    values: &[f64],
    apex: u32,
    cone_at: f64,
) -> FilteredComplex {
    let base = closure(faces);
    let mut all = by_dimension(&base, values);
    all.extend(cone_simplices(&base, apex).into_iter().map(|s| (s, cone_at)));
    FilteredComplex::new(all, None, false).expect("valid synthetic filtration")
}

/// Wedge (X) and torus (Y) filtrations sharing cohomology but not cup
/// products: cells appear by dimension before `alpha` and everything is
/// coned off at time 1.
pub fn torus_vs_wedge(alpha: f64) -> (FilteredComplex, FilteredComplex) {
    let wedge = coned_filtration(&wedge_faces(), &[0.0, 0.6 * alpha, 0.8 * alpha], 8, 1.0);
    let torus = coned_filtration(&torus_faces(), &[0.0, 0.5 * alpha, alpha], 7, 1.0);
    (wedge, torus)
}

/// Suspension of ℝP² on vertices 0..=7, as static faces.
pub fn suspended_rp2_faces() -> Vec<Vec<u32>> {
    suspension_faces(&rp2_faces(), 6, 7)
}

/// ΣℝP² (X) against a 3-ball (Y): over 𝔽2 only X carries Sq¹: H² → H³;
/// away from 2 both have the cohomology of a point.
pub fn suspended_rp2_vs_ball(alpha: f64) -> (FilteredComplex, FilteredComplex) {
    let x = coned_filtration(&suspended_rp2_faces(), &[0.0, 0.5 * alpha, alpha], 8, 1.0);
    let ball = closure(&[vec![0, 1, 2, 3]]);
    let y = FilteredComplex::new(by_dimension(&ball, &[0.0, 0.5 * alpha, alpha]), None, false).expect("ball");
    (x, y)
}

/// ΣℝP² (X) against S² ∨ S³ (Y): identical 𝔽2 cohomology and trivial cup
/// products, distinguished only by Sq¹.
pub fn suspended_rp2_vs_sphere_wedge(alpha: f64) -> (FilteredComplex, FilteredComplex) {
    let x = coned_filtration(&suspended_rp2_faces(), &[0.0, 0.5 * alpha, alpha], 8, 1.0);
    let mut faces = boundary_faces(&[0, 1, 2, 3]);
    faces.extend(boundary_faces(&[0, 4, 5, 6, 7]));
    let y = coned_filtration(&faces, &[0.0, 0.5 * alpha, alpha], 8, 1.0);
    (x, y)
}

/// A random filtered complex with at most `max_simplices` simplices on at
/// most `max_vertices` vertices and dimension ≤ `max_dim`. Values are drawn
/// from a coarse grid so that ties (and hence multi-cell stages) are common.
pub fn random_filtered_complex<R: Rng>(rng: &mut R, max_simplices: usize, max_vertices: u32, max_dim: usize) -> FilteredComplex {
    let nv = rng.gen_range(1..=max_vertices.max(1));
    let mut chosen: BTreeSet<Vec<u32>> = BTreeSet::new();
    for _ in 0..40 {
        let k = rng.gen_range(1..=(max_dim + 1).min(nv as usize));
        let mut s: Vec<u32> = (0..nv).collect();
        for i in (1..s.len()).rev() {
            let j = rng.gen_range(0..=i);
            s.swap(i, j);
        }
        s.truncate(k);
        let mut trial: Vec<Vec<u32>> = chosen.iter().cloned().collect();
        trial.push(s);
        let cl = closure(&trial);
        if cl.len() <= max_simplices {
            chosen = cl.into_iter().collect();
        }
    }
    if chosen.is_empty() {
        chosen.insert(vec![0]);
    }
    let mut simplices: Vec<Vec<u32>> = chosen.into_iter().collect();
    simplices.sort_by_key(|s| s.len());
    let mut values: std::collections::HashMap<Vec<u32>, f64> = Default::default();
    let mut out = Vec::new();
    for s in simplices {
        let base = crate::complex::facets(&s)
            .filter(|f| !f.is_empty())
            .map(|f| values[&f])
            .fold(0.0, f64::max);
        let v = base + rng.gen_range(0..3) as f64 * 0.5;
        values.insert(s.clone(), v);
        out.push((s, v));
    }
    FilteredComplex::new(out, None, false).expect("closure is a complex")
}

/// Uniform points in the unit cube.
pub fn random_cloud<R: Rng>(rng: &mut R, n: usize, dim: usize) -> PointCloud {
    PointCloud::new((0..n).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect()).expect("nonempty")
}

/// Moves every coordinate by at most `eta / sqrt(dim)`, so each point moves
/// by at most `eta` in the Euclidean norm.
pub fn jitter<R: Rng>(rng: &mut R, cloud: &PointCloud, eta: f64) -> PointCloud {
    let s = eta / (cloud.dim().max(1) as f64).sqrt();
    PointCloud::new(
        cloud.points().iter().map(|p| p.iter().map(|x| x + rng.gen_range(-s..=s)).collect()).collect(),
    )
    .expect("same shape")
}

/// `n` equally spaced points on a circle of radius `r`.
pub fn circle_cloud(n: usize, r: f64) -> PointCloud {
    PointCloud::new(
        (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                vec![r * t.cos(), r * t.sin()]
            })
            .collect(),
    )
    .expect("nonempty")
}

/// Ledgers of the transferred A∞ structures of a constant model, with class
/// k alive on `class_bars[k]`.
pub fn model_ledger(model: &FiniteDga, max_arity: usize, class_bars: impl Fn(usize, i32) -> (f64, f64)) -> Result<ProductLedger> {
    let mt = ModelTransfer::new(model, model.contraction(PivotRule::Smallest));
    let s = transfer_ainfty(&mt, TransferOptions::new(max_arity))?;
    let bars: Vec<(f64, f64)> = s.degrees.iter().enumerate().map(|(k, &d)| class_bars(k, d)).collect();
    synthetic_ledger(&s, None, &bars)
}

/// Borromean model (X) with every positive class alive on [0, ℓ), against
/// the unlinked model (Y) whose bars are moved by at most α/2 at each end.
pub fn borromean_vs_unlinked<R: Rng>(rng: &mut R, field: Field, ell: f64, alpha: f64) -> Result<(ProductLedger, ProductLedger)> {
    let x = model_ledger(&dga::borromean_model(field), 3, |_, d| if d == 0 { (0.0, f64::INFINITY) } else { (0.0, ell) })?;
    let jit: Vec<(f64, f64)> = (0..16).map(|_| (rng.gen_range(0.0..=alpha / 2.0), rng.gen_range(-alpha / 2.0..=alpha / 2.0))).collect();
    let y = model_ledger(&dga::unlinked_model(field), 3, |k, d| {
        if d == 0 {
            (0.0, f64::INFINITY)
        } else {
            (jit[k].0, ell + jit[k].1)
        }
    })?;
    Ok((x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangulation_counts() {
        let t = torus();
        assert_eq!(t.simplices_of_dim(0).len(), 7);
        assert_eq!(t.simplices_of_dim(1).len(), 21);
        assert_eq!(t.simplices_of_dim(2).len(), 14);
        let r = rp2();
        assert_eq!((r.simplices_of_dim(1).len(), r.simplices_of_dim(2).len()), (15, 10));
        assert_eq!(octahedron().simplices_of_dim(2).len(), 8);
    }

    #[test]
    fn random_complexes_respect_limits() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let cx = random_filtered_complex(&mut rng, 40, 7, 3);
            assert!(cx.len() <= 40);
            assert!(crate::complex::validate_ffdata(&cx).is_valid());
        }
    }
}
