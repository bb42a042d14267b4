use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{domain, Result};
use crate::graph::{Graph, VertexSet};
use crate::rational;
use crate::rng;

use super::local::{k_smallest, mask_of, LocalPair};
use super::{validate_pair, CheckMode, RegVerdict, Witness};

/// Rounds of alternating best responses in a biased trial.
const PEEL_ROUNDS: usize = 3;

/// One-sided sampled lower-regularity check.
///
/// Even-numbered trials are biased toward low degrees: one side starts as
/// the `k` vertices of smallest (jittered) degree and the two sides then
/// alternately replace themselves by the `k` vertices with fewest neighbours
/// in the other. Odd-numbered trials draw one side uniformly and complete it
/// with the sparsest opposite side. Any violating sub-pair fails the check
/// with that witness; a pass is not a proof.
pub fn sampled_lower_regular(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    eps: f64,
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<RegVerdict> {
    if trials == 0 {
        return domain("sampled check needs at least one trial");
    }
    validate_pair(a, b, eps, p)?;
    let threshold = rational::lower_threshold(eps, p);
    let ka = rational::ceil_mul(eps, a.len()).max(1);
    let kb = rational::ceil_mul(eps, b.len()).max(1);
    let pair = LocalPair::new(g, a, b);
    let (na, nb) = (pair.a.len(), pair.b.len());
    let a_deg: Vec<u32> = (0..na).map(|i| pair.a_degree(i) as u32).collect();
    let b_deg: Vec<u32> = (0..nb).map(|j| pair.b_degree(j) as u32).collect();
    let a_words = pair.a_words();
    let b_words = nb.div_ceil(64).max(1);
    let mut counts = Vec::new();

    for t in 0..trials {
        let mut rng = rng::stream(seed, &[t as u64]);
        let (a_sel, b_sel) = if t % 2 == 0 {
            // Jitter grows with the trial index; trial 0 is the plain greedy peel.
            let spread = (t / 2) as f64;
            let start_on_a = (t / 2) % 2 == 0;
            let jitter = |deg: &[u32], rng: &mut rng::Rng| -> Vec<u32> {
                deg.iter()
                    .map(|&d| d + if spread > 0.0 { rng.gen_range(0.0..=spread) as u32 } else { 0 })
                    .collect()
            };
            let (mut a_sel, mut b_sel);
            if start_on_a {
                a_sel = k_smallest(&jitter(&a_deg, &mut rng), ka);
                pair.counts_into_a(&mask_of(&a_sel, a_words), &mut counts);
                b_sel = k_smallest(&counts, kb);
            } else {
                b_sel = k_smallest(&jitter(&b_deg, &mut rng), kb);
                pair.counts_into_b(&mask_of(&b_sel, b_words), &mut counts);
                a_sel = k_smallest(&counts, ka);
                pair.counts_into_a(&mask_of(&a_sel, a_words), &mut counts);
                b_sel = k_smallest(&counts, kb);
            }
            for _ in 0..PEEL_ROUNDS {
                pair.counts_into_b(&mask_of(&b_sel, b_words), &mut counts);
                a_sel = k_smallest(&counts, ka);
                pair.counts_into_a(&mask_of(&a_sel, a_words), &mut counts);
                b_sel = k_smallest(&counts, kb);
            }
            (a_sel, b_sel)
        } else if (t / 2) % 2 == 0 {
            let mut a_sel: Vec<usize> = (0..na).collect::<Vec<_>>().choose_multiple(&mut rng, ka).copied().collect();
            a_sel.sort_unstable();
            pair.counts_into_a(&mask_of(&a_sel, a_words), &mut counts);
            (a_sel, k_smallest(&counts, kb))
        } else {
            let mut b_sel: Vec<usize> = (0..nb).collect::<Vec<_>>().choose_multiple(&mut rng, kb).copied().collect();
            b_sel.sort_unstable();
            pair.counts_into_b(&mask_of(&b_sel, b_words), &mut counts);
            (k_smallest(&counts, ka), b_sel)
        };
        let density = pair.density(&a_sel, &mask_of(&b_sel, b_words));
        if density.is_below(threshold) {
            let witness = Witness {
                left: a_sel.iter().map(|&i| pair.a[i]).collect(),
                right: b_sel.iter().map(|&j| pair.b[j]).collect(),
                density,
            };
            return Ok(RegVerdict::fail(g, a, b, CheckMode::Sampled, t + 1, eps, p, witness));
        }
    }
    Ok(RegVerdict::pass(CheckMode::Sampled, trials, eps, p, a.len(), b.len()))
}
