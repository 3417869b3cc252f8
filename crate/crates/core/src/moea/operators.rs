use rand::seq::SliceRandom;
use rand::Rng;

use super::Chromosome;
use crate::chaos::ChaoticStream;

/// Random initial chromosomes. With a Gauss/mouse stream each continuous
/// gene is `lb + G_k (ub - lb)`; otherwise it is uniform. Orders are
/// shuffled by `rng` either way.
pub fn chaotic_init<R: Rng>(
    bounds: &[(f64, f64)],
    perm_len: usize,
    n: usize,
    mut gauss: Option<&mut ChaoticStream>,
    rng: &mut R,
) -> Vec<Chromosome> {
    (0..n)
        .map(|_| {
            let continuous = bounds
                .iter()
                .map(|&(lo, hi)| {
                    let g = match gauss.as_deref_mut() {
                        Some(s) => s.next_value(),
                        None => rng.random::<f64>(),
                    };
                    (lo + g * (hi - lo)).clamp(lo, hi)
                })
                .collect();
            let mut order: Vec<usize> = (0..perm_len).collect();
            order.shuffle(rng);
            Chromosome { continuous, order }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbxParams {
    pub eta: f64,
    pub crossover_prob: f64,
}

/// Spread factor for one gene; `threshold` is 0.5 for classical SBX.
pub fn sbx_beta(u: f64, threshold: f64, eta: f64) -> f64 {
    let e = 1.0 / (eta + 1.0);
    if u <= threshold {
        (2.0 * u).powf(e)
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(e)
    }
}

/// Children of one gene before clamping.
pub fn sbx_pair(p1: f64, p2: f64, beta: f64) -> (f64, f64) {
    (
        0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2),
        0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2),
    )
}

/// SBX on every continuous gene, children clamped to `bounds`.
pub fn sbx_crossover<R: Rng>(
    p1: &[f64],
    p2: &[f64],
    bounds: &[(f64, f64)],
    params: SbxParams,
    threshold: f64,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = Vec::with_capacity(p1.len());
    let mut c2 = Vec::with_capacity(p1.len());
    for ((&a, &b), &(lo, hi)) in p1.iter().zip(p2).zip(bounds) {
        let u = open_unit(rng);
        let (x, y) = sbx_pair(a, b, sbx_beta(u, threshold, params.eta));
        c1.push(x.clamp(lo, hi));
        c2.push(y.clamp(lo, hi));
    }
    (c1, c2)
}

/// Normalized perturbation in (-1, 1); `threshold` is 0.5 for classical
/// polynomial mutation.
pub fn pm_delta(u: f64, threshold: f64, eta_u: f64) -> f64 {
    let e = 1.0 / (eta_u + 1.0);
    if u < threshold {
        (2.0 * u).powf(e) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powf(e)
    }
}

/// Mutates each gene with probability `prob` by `delta (ub - lb)`, clamped.
pub fn polynomial_mutation<R: Rng>(
    x: &mut [f64],
    bounds: &[(f64, f64)],
    eta_u: f64,
    prob: f64,
    threshold: f64,
    rng: &mut R,
) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        if rng.random::<f64>() < prob {
            let u = open_unit(rng);
            *v = (*v + pm_delta(u, threshold, eta_u) * (hi - lo)).clamp(lo, hi);
        }
    }
}

fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Partially mapped crossover with the segment `[lo, hi)` exchanged.
///
/// Panics if the parents differ in length or the cut is out of range.
pub fn pmx_with_cuts(p1: &[usize], p2: &[usize], lo: usize, hi: usize) -> (Vec<usize>, Vec<usize>) {
    assert_eq!(p1.len(), p2.len(), "PMX parents differ in length");
    assert!(lo <= hi && hi <= p1.len(), "PMX cut out of range");
    (pmx_child(p1, p2, lo, hi), pmx_child(p2, p1, lo, hi))
}

/// Child taking `donor[lo..hi]` and filling the rest from `base`, resolving
/// duplicates through the segment mapping.
fn pmx_child(base: &[usize], donor: &[usize], lo: usize, hi: usize) -> Vec<usize> {
    let n = base.len();
    // position of each value inside the donor segment
    let mut in_segment = vec![usize::MAX; n];
    for i in lo..hi {
        in_segment[donor[i]] = i;
    }
    let mut child = base.to_vec();
    child[lo..hi].copy_from_slice(&donor[lo..hi]);
    for i in (0..lo).chain(hi..n) {
        let mut v = base[i];
        while in_segment[v] != usize::MAX {
            v = base[in_segment[v]];
        }
        child[i] = v;
    }
    child
}

/// PMX with two random cut points.
pub fn pmx_crossover<R: Rng>(p1: &[usize], p2: &[usize], rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let n = p1.len();
    let a = rng.random_range(0..=n);
    let b = rng.random_range(0..=n);
    pmx_with_cuts(p1, p2, a.min(b), a.max(b))
}

/// Swaps two distinct random positions; shorter inputs are left alone.
pub fn exchange_mutation<R: Rng>(perm: &mut [usize], rng: &mut R) {
    let n = perm.len();
    if n < 2 {
        return;
    }
    let i = rng.random_range(0..n);
    let j = (i + rng.random_range(1..n)) % n;
    perm.swap(i, j);
}
