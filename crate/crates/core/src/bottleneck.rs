//! Exact bottleneck distance between persistence diagrams: threshold search
//! over the finite set of candidate costs with a bipartite matching test.

use crate::barcode::Barcode;

/// Sup-norm cost between two intervals (infinite deaths match only each other).
fn pair_cost(a: (f64, f64), b: (f64, f64)) -> f64 {
    match (a.1.is_finite(), b.1.is_finite()) {
        (true, true) => (a.0 - b.0).abs().max((a.1 - b.1).abs()),
        (false, false) => (a.0 - b.0).abs(),
        _ => f64::INFINITY,
    }
}

/// Cost of matching an interval to the diagonal.
pub fn diagonal_cost(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Maximum bipartite matching size (augmenting paths).
fn max_matching(adj: &[Vec<usize>], nright: usize) -> usize {
    let mut match_r: Vec<Option<usize>> = vec![None; nright];
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], match_r: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if match_r[v].map_or(true, |w| augment(w, adj, seen, match_r)) {
                match_r[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut size = 0;
    for u in 0..adj.len() {
        let mut seen = vec![false; nright];
        if augment(u, adj, &mut seen, &mut match_r) {
            size += 1;
        }
    }
    size
}

/// True iff an ε-matching exists between finite diagrams.
fn feasible(a: &[(f64, f64)], b: &[(f64, f64)], eps: f64) -> bool {
    let (n, m) = (a.len(), b.len());
    // left: a points then m diagonal slots; right: b points then n diagonal slots
    let mut adj = vec![Vec::new(); n + m];
    for i in 0..n {
        for j in 0..m {
            if pair_cost(a[i], b[j]) <= eps {
                adj[i].push(j);
            }
        }
        if diagonal_cost(a[i]) <= eps {
            adj[i].push(m + i);
        }
    }
    for j in 0..m {
        if diagonal_cost(b[j]) <= eps {
            adj[n + j].push(j);
        }
        adj[n + j].extend(m..m + n);
    }
    max_matching(&adj, m + n) == n + m
}

/// Bottleneck distance between two diagrams (lists of [birth, death)).
/// Returns ∞ when the numbers of essential intervals differ.
pub fn bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut ia: Vec<f64> = a.iter().filter(|x| !x.1.is_finite()).map(|x| x.0).collect();
    let mut ib: Vec<f64> = b.iter().filter(|x| !x.1.is_finite()).map(|x| x.0).collect();
    if ia.len() != ib.len() {
        return f64::INFINITY;
    }
    ia.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ib.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let inf_part = ia.iter().zip(&ib).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let fa: Vec<(f64, f64)> = a.iter().copied().filter(|x| x.1.is_finite() && x.1 > x.0).collect();
    let fb: Vec<(f64, f64)> = b.iter().copied().filter(|x| x.1.is_finite() && x.1 > x.0).collect();
    let mut cands: Vec<f64> = vec![0.0];
    cands.extend(fa.iter().map(|&x| diagonal_cost(x)));
    cands.extend(fb.iter().map(|&x| diagonal_cost(x)));
    for &x in &fa {
        for &y in &fb {
            cands.push(pair_cost(x, y));
        }
    }
    cands.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cands.dedup();
    // the largest candidate (max diagonal cost) is always feasible
    let (mut lo, mut hi) = (0, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(&fa, &fb, cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands[lo].max(inf_part)
}

/// Max over degrees of the bottleneck distance (the graded-vector-space
/// interleaving distance), over degrees reliable in both barcodes.
pub fn d_grvect(x: &Barcode, y: &Barcode) -> f64 {
    (0..=x.max_degree.min(y.max_degree)).map(|d| bottleneck(&x.diagram(d), &y.diagram(d))).fold(0.0, f64::max)
}

/// Bottleneck distance restricted to one degree.
pub fn degree_bottleneck(x: &Barcode, y: &Barcode, d: usize) -> f64 {
    bottleneck(&x.diagram(d), &y.diagram(d))
}
