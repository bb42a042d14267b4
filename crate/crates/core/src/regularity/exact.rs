use crate::error::{Error, Result};
use crate::graph::{Density, Graph, VertexSet};
use crate::rational;

use super::local::{k_smallest, LocalPair};
use super::{validate_pair, CheckMode, RegVerdict, Witness, DEFAULT_EXACT_CAP};

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact `(eps, p)`-lower-regularity with the default size cap.
pub fn exact_lower_regular(g: &Graph, a: &VertexSet, b: &VertexSet, eps: f64, p: f64) -> Result<RegVerdict> {
    exact_lower_regular_capped(g, a, b, eps, p, DEFAULT_EXACT_CAP)
}

/// Exact check over all sub-pairs of size `ceil(eps|A|) x ceil(eps|B|)`.
///
/// One side is enumerated; for each subset of it the sparsest completion on
/// the other side is the `k` vertices with the fewest neighbours in the
/// subset, so the search is `C(|A|, k) * |B|` rather than quadratic in the
/// number of subsets.
pub fn exact_lower_regular_capped(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    eps: f64,
    p: f64,
    cap: usize,
) -> Result<RegVerdict> {
    validate_pair(a, b, eps, p)?;
    let cap = cap.min(63);
    if a.len() > cap || b.len() > cap {
        return Err(Error::ExactCapExceeded {
            left: a.len(),
            right: b.len(),
            cap,
        });
    }
    let threshold = rational::lower_threshold(eps, p);
    let ka = rational::ceil_mul(eps, a.len()).max(1);
    let kb = rational::ceil_mul(eps, b.len()).max(1);

    let local = LocalPair::new(g, a, b);
    let swap = binomial(b.len(), kb) < binomial(a.len(), ka);
    let (local, k_enum, k_best) = if swap {
        (local.swapped(), kb, ka)
    } else {
        (local, ka, kb)
    };

    let n_enum = local.a.len();
    let mut counts = Vec::with_capacity(local.b.len());
    let mut hist = vec![0u32; k_enum + 1];
    let pairs = (k_enum * k_best) as u64;
    // Gosper's hack over k_enum-subsets of 0..n_enum.
    let mut mask: u128 = (1u128 << k_enum) - 1;
    let limit: u128 = 1u128 << n_enum;
    while mask < limit {
        let m = [mask as u64];
        local.counts_into_a(&m, &mut counts);
        hist.iter_mut().for_each(|h| *h = 0);
        for &c in &counts {
            hist[c as usize] += 1;
        }
        let mut need = k_best as u64;
        let mut edges = 0u64;
        for (c, &h) in hist.iter().enumerate() {
            let take = need.min(h as u64);
            edges += take * c as u64;
            need -= take;
            if need == 0 {
                break;
            }
        }
        if rational::below(edges, pairs, threshold) {
            let enum_side: Vec<usize> = (0..n_enum).filter(|i| (mask >> i) & 1 == 1).map(|i| local.a[i]).collect();
            let best_side: Vec<usize> = k_smallest(&counts, k_best).into_iter().map(|j| local.b[j]).collect();
            let (left, right) = if swap { (best_side, enum_side) } else { (enum_side, best_side) };
            let witness = Witness {
                left,
                right,
                density: Density { edges, pairs },
            };
            return Ok(RegVerdict::fail(g, a, b, CheckMode::Exact, 0, eps, p, witness));
        }
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    Ok(RegVerdict::pass(CheckMode::Exact, 0, eps, p, a.len(), b.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularity::witness_is_valid;

    fn complete(na: usize, nb: usize) -> (Graph, VertexSet, VertexSet) {
        let n = na + nb;
        let g = Graph::from_edges(n, (0..na).flat_map(|u| (na..n).map(move |v| (u, v)))).unwrap();
        (g, VertexSet::range(n, 0, na), VertexSet::range(n, na, n))
    }

    #[test]
    fn complete_pair_passes() {
        let (g, a, b) = complete(6, 7);
        for eps in [0.1, 0.25, 0.5, 0.9] {
            for p in [0.1, 0.5, 1.0] {
                assert!(exact_lower_regular(&g, &a, &b, eps, p).unwrap().passed);
            }
        }
    }

    #[test]
    fn edgeless_pair_fails_with_half_witness() {
        let g = Graph::new(12);
        let a = VertexSet::range(12, 0, 6);
        let b = VertexSet::range(12, 6, 12);
        let v = exact_lower_regular(&g, &a, &b, 0.5, 0.5).unwrap();
        assert!(!v.passed);
        let w = v.witness.as_ref().unwrap();
        assert_eq!((w.left.len(), w.right.len()), (3, 3));
        assert_eq!(w.density.edges, 0);
        assert!(witness_is_valid(&g, &a, &b, &v));
    }

    #[test]
    fn isolated_vertex_is_found() {
        // All edges except those at a = 0.
        let mut g = Graph::new(16);
        for u in 1..8 {
            for v in 8..16 {
                g.add_edge(u, v).unwrap();
            }
        }
        let a = VertexSet::range(16, 0, 8);
        let b = VertexSet::range(16, 8, 16);
        let v = exact_lower_regular(&g, &a, &b, 0.25, 1.0).unwrap();
        assert!(!v.passed);
        let w = v.witness.unwrap();
        assert!(w.left.contains(&0));
        assert_eq!(w.density.ratio(), crate::rational::Rational::new(1, 2));
    }

    #[test]
    fn cap_is_enforced() {
        let (g, a, b) = complete(17, 4);
        assert!(matches!(
            exact_lower_regular(&g, &a, &b, 0.2, 0.5),
            Err(Error::ExactCapExceeded { .. })
        ));
        assert!(exact_lower_regular_capped(&g, &a, &b, 0.2, 0.5, 20).unwrap().passed);
    }

    #[test]
    fn rejects_overlap_and_empty() {
        let (g, a, _) = complete(3, 3);
        assert!(exact_lower_regular(&g, &a, &a, 0.5, 0.5).is_err());
        assert!(exact_lower_regular(&g, &a, &VertexSet::empty(6), 0.5, 0.5).is_err());
    }
}
