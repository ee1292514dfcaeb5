//! Fill-reducing orderings for symmetric factorization.
//!
//! [`min_degree`] is an exact minimum-degree ordering on the quotient
//! (element) graph: eliminating a pivot replaces its neighborhood by a single
//! clique element instead of materializing fill edges, and degrees are
//! recomputed exactly as the size of `adj(i) ∪ ⋃ elements(i)`. Exact degrees
//! cost more per pivot than the approximate (AMD) bound but are simple,
//! deterministic, and fast at the 10³–10⁵ node scales this crate factors.
//!
//! Ties are broken toward the smallest node index, so orderings are
//! reproducible across runs and platforms.

use super::SparseMatrix;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Exact minimum-degree ordering of a symmetric sparsity pattern.
///
/// Returns `perm` with `perm[new] = old`. Only the pattern of `a` is used;
/// values are ignored. The diagonal is ignored as well.
pub fn min_degree(a: &SparseMatrix) -> Vec<usize> {
    assert_eq!(a.nrows(), a.ncols(), "ordering needs a square pattern");
    let n = a.nrows();
    // undirected adjacency from the union of the pattern and its transpose
    let sym = a
        .add_scaled(1.0, &a.transpose(), 1.0)
        .expect("square add");
    let mut adj: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            sym.row(i)
                .0
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| j as u32)
                .collect()
        })
        .collect();

    let mut node_elems: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut elem_nodes: Vec<Vec<u32>> = Vec::new();
    let mut elem_alive: Vec<bool> = Vec::new();
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut mark = vec![0u64; n];
    let mut stamp = 0u64;

    let mut heap: BinaryHeap<Reverse<(usize, u32)>> = (0..n)
        .map(|i| Reverse((degree[i], i as u32)))
        .collect();
    let mut perm = Vec::with_capacity(n);
    let mut clique: Vec<u32> = Vec::new();

    while perm.len() < n {
        // pop a live node whose recorded degree is current (lazy heap)
        let p = loop {
            let Reverse((d, cand)) = heap.pop().expect("heap holds all live nodes");
            let cand = cand as usize;
            if alive[cand] && degree[cand] == d {
                break cand;
            }
        };

        // clique of p = live original neighbors + live members of p's elements
        stamp += 1;
        mark[p] = stamp;
        clique.clear();
        for &j in &adj[p] {
            let j = j as usize;
            if alive[j] && mark[j] != stamp {
                mark[j] = stamp;
                clique.push(j as u32);
            }
        }
        for &e in &node_elems[p] {
            let e = e as usize;
            if !elem_alive[e] {
                continue;
            }
            for &j in &elem_nodes[e] {
                let j = j as usize;
                if alive[j] && mark[j] != stamp {
                    mark[j] = stamp;
                    clique.push(j as u32);
                }
            }
            // the new element covers e entirely (all its live nodes touch p)
            elem_alive[e] = false;
        }
        perm.push(p);
        alive[p] = false;
        if clique.is_empty() {
            continue;
        }
        clique.sort_unstable();
        let eid = elem_nodes.len() as u32;
        elem_nodes.push(clique.clone());
        elem_alive.push(true);

        let clique_stamp = stamp; // marks: members of the clique and p itself
        for &iu in &clique {
            let i = iu as usize;
            node_elems[i].retain(|&e| elem_alive[e as usize]);
            node_elems[i].push(eid);
            // neighbors inside the clique are covered by the element; drop
            // them (and dead nodes) from the explicit adjacency
            adj[i].retain(|&j| alive[j as usize] && mark[j as usize] != clique_stamp);
            // exact external degree
            stamp += 1;
            mark[i] = stamp;
            let mut deg = 0usize;
            for &j in &adj[i] {
                let j = j as usize;
                if mark[j] != stamp {
                    mark[j] = stamp;
                    deg += 1;
                }
            }
            for &e in &node_elems[i] {
                for &j in &elem_nodes[e as usize] {
                    let j = j as usize;
                    if alive[j] && mark[j] != stamp {
                        mark[j] = stamp;
                        deg += 1;
                    }
                }
            }
            degree[i] = deg;
            heap.push(Reverse((deg, iu)));
        }
    }
    perm
}

/// Test-only fixtures shared across the sparse solver tests.
#[cfg(test)]
pub(crate) mod test_support {
    use super::SparseMatrix;

    /// 5-point Laplacian pattern of a k×k grid (shifted to strict SPD).
    pub(crate) fn grid_laplacian(k: usize) -> SparseMatrix {
        let n = k * k;
        let mut trips = Vec::new();
        for ix in 0..k {
            for iy in 0..k {
                let i = ix * k + iy;
                trips.push((i, i, 4.0));
                if ix > 0 {
                    trips.push((i, i - k, -1.0));
                }
                if ix + 1 < k {
                    trips.push((i, i + k, -1.0));
                }
                if iy > 0 {
                    trips.push((i, i - 1, -1.0));
                }
                if iy + 1 < k {
                    trips.push((i, i + 1, -1.0));
                }
            }
        }
        // shift to strict diagonal dominance so Cholesky succeeds
        for ix in 0..n {
            trips.push((ix, ix, 0.05));
        }
        SparseMatrix::from_triplets(n, n, &trips).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::grid_laplacian;
    use super::*;
    use crate::sparse::cholesky::{OrderingChoice, SparseCholesky};

    #[test]
    fn permutation_is_valid() {
        let a = grid_laplacian(7);
        let perm = min_degree(&a);
        let mut seen = vec![false; a.nrows()];
        for &p in &perm {
            assert!(!seen[p], "duplicate node in permutation");
            seen[p] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn min_degree_never_loses_to_natural_on_grid() {
        let a = grid_laplacian(20);
        let nat = SparseCholesky::factor(&a, OrderingChoice::Natural).unwrap();
        let md = SparseCholesky::factor(&a, OrderingChoice::MinDegree).unwrap();
        assert!(
            md.nnz_l() <= nat.nnz_l(),
            "min-degree fill {} exceeds natural fill {}",
            md.nnz_l(),
            nat.nnz_l()
        );
    }

    #[test]
    fn deterministic_ordering() {
        let a = grid_laplacian(9);
        assert_eq!(min_degree(&a), min_degree(&a));
    }

    #[test]
    fn chain_orders_endpoints_first() {
        // path graph: every interior node has degree 2, endpoints degree 1
        let n = 6;
        let mut trips = Vec::new();
        for i in 0..n {
            trips.push((i, i, 2.0));
            if i + 1 < n {
                trips.push((i, i + 1, -1.0));
                trips.push((i + 1, i, -1.0));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &trips).unwrap();
        let perm = min_degree(&a);
        assert_eq!(perm[0], 0, "smallest-index endpoint goes first");
    }
}
