use rand::Rng;

use super::{Fitness, Individual};

/// Feasible beats infeasible, smaller violation beats larger, and two
/// feasible points compare by Pareto dominance.
pub fn constrained_dominates(a: &Fitness, b: &Fitness) -> bool {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.violation < b.violation,
        (true, true) => {
            let mut strictly = false;
            for (x, y) in a.objectives.iter().zip(&b.objectives) {
                if x > y {
                    return false;
                }
                strictly |= x < y;
            }
            strictly
        }
    }
}

/// Sorts into fronts of indices, setting `rank` on every member.
pub fn fast_nondominated_sort(pop: &mut [Individual]) -> Vec<Vec<usize>> {
    let n = pop.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    for p in 0..n {
        for q in p + 1..n {
            if constrained_dominates(&pop[p].fitness, &pop[q].fitness) {
                dominated_by_me[p].push(q);
                count[q] += 1;
            } else if constrained_dominates(&pop[q].fitness, &pop[p].fitness) {
                dominated_by_me[q].push(p);
                count[p] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            pop[p].rank = Some(fronts.len());
            for &q in &dominated_by_me[p] {
                count[q] -= 1;
                if count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance within one front. Boundary points get infinity; an
/// objective that is constant over the front contributes nothing.
pub fn crowding_distance(front: &mut [Individual]) {
    let n = front.len();
    for ind in front.iter_mut() {
        ind.crowding = 0.0;
    }
    if n == 0 {
        return;
    }
    let m = front[0].fitness.objectives.len();
    let mut idx: Vec<usize> = (0..n).collect();
    for k in 0..m {
        let vals: Vec<f64> = front.iter().map(|i| i.fitness.objectives[k]).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (lo, hi) = (vals[idx[0]], vals[idx[n - 1]]);
        let span = hi - lo;
        if !(span > 0.0) || !span.is_finite() {
            continue;
        }
        front[idx[0]].crowding = f64::INFINITY;
        front[idx[n - 1]].crowding = f64::INFINITY;
        for w in 1..n.saturating_sub(1) {
            front[idx[w]].crowding += (vals[idx[w + 1]] - vals[idx[w - 1]]) / span;
        }
    }
}

/// Binary tournaments, returning `n` indices into `pop`. Lower rank wins,
/// then larger crowding distance, then a coin flip.
pub fn tournament_select<R: Rng>(pop: &[Individual], n: usize, rng: &mut R) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let a = rng.random_range(0..pop.len());
            let b = rng.random_range(0..pop.len());
            let ra = pop[a].rank.unwrap_or(usize::MAX);
            let rb = pop[b].rank.unwrap_or(usize::MAX);
            if ra != rb {
                return if ra < rb { a } else { b };
            }
            if pop[a].crowding != pop[b].crowding {
                return if pop[a].crowding > pop[b].crowding { a } else { b };
            }
            if rng.random::<bool>() {
                a
            } else {
                b
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::Chromosome;
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ind(obj: &[f64], violation: f64) -> Individual {
        Individual::new(
            Chromosome {
                continuous: vec![],
                order: vec![],
            },
            Fitness {
                objectives: obj.to_vec(),
                violation,
            },
        )
    }

    #[test]
    fn dominance_rules() {
        let f = |o: &[f64], v| ind(o, v).fitness;
        assert!(constrained_dominates(&f(&[9.0, 9.0], 0.0), &f(&[0.0, 0.0], 0.1)));
        assert!(constrained_dominates(&f(&[9.0], 0.1), &f(&[0.0], 0.2)));
        assert!(!constrained_dominates(&f(&[0.0], 0.2), &f(&[0.0], 0.2)));
        assert!(constrained_dominates(&f(&[1.0, 2.0], 0.0), &f(&[1.0, 3.0], 0.0)));
        assert!(!constrained_dominates(&f(&[1.0, 2.0], 0.0), &f(&[1.0, 2.0], 0.0)));
        assert!(!constrained_dominates(&f(&[1.0, 3.0], 0.0), &f(&[2.0, 2.0], 0.0)));
        assert!(constrained_dominates(&f(&[0.0], 5.0), &f(&[0.0], f64::INFINITY)));
    }

    #[test]
    fn crowding_example() {
        let mut front = vec![ind(&[0.0, 2.0], 0.0), ind(&[1.0, 1.0], 0.0), ind(&[2.0, 0.0], 0.0)];
        crowding_distance(&mut front);
        assert_eq!(front[0].crowding, f64::INFINITY);
        assert_eq!(front[2].crowding, f64::INFINITY);
        assert_eq!(front[1].crowding, 2.0);
    }

    #[test]
    fn crowding_constant_objective_contributes_zero() {
        let mut front = vec![ind(&[0.0, 5.0], 0.0), ind(&[1.0, 5.0], 0.0), ind(&[3.0, 5.0], 0.0)];
        crowding_distance(&mut front);
        assert_eq!(front[1].crowding, 1.0);
        let mut flat = vec![ind(&[1.0], 0.0), ind(&[1.0], 0.0)];
        crowding_distance(&mut flat);
        assert!(flat.iter().all(|i| i.crowding == 0.0));
    }

    #[test]
    fn sort_example() {
        let mut pop = vec![
            ind(&[1.0, 1.0], 0.0),
            ind(&[2.0, 2.0], 0.0),
            ind(&[0.5, 3.0], 0.0),
            ind(&[0.0, 0.0], 1.0),
            ind(&[3.0, 3.0], 0.0),
        ];
        let fronts = fast_nondominated_sort(&mut pop);
        assert_eq!(fronts, vec![vec![0, 2], vec![1], vec![4], vec![3]]);
        assert_eq!(pop[3].rank, Some(3));
    }

    #[test]
    fn tournament_prefers_rank_then_crowding() {
        let mut pop = vec![ind(&[0.0], 0.0), ind(&[1.0], 0.0), ind(&[1.0], 0.0)];
        pop[0].rank = Some(0);
        pop[1].rank = Some(1);
        pop[1].crowding = 5.0;
        pop[2].rank = Some(1);
        pop[2].crowding = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let picks = tournament_select(&pop, 2000, &mut rng);
        let count = |k| picks.iter().filter(|&&p| p == k).count();
        // P(win) = 1 - (2/3)^2, (1/3)^2 + 2/9, (1/3)^2
        assert!((count(0) as f64 / 2000.0 - 5.0 / 9.0).abs() < 0.04);
        assert!((count(1) as f64 / 2000.0 - 3.0 / 9.0).abs() < 0.04);
        assert!((count(2) as f64 / 2000.0 - 1.0 / 9.0).abs() < 0.03);
    }

    fn brute_rank(pop: &[Individual]) -> Vec<usize> {
        let n = pop.len();
        let mut rank = vec![usize::MAX; n];
        let mut r = 0;
        while rank.contains(&usize::MAX) {
            let layer: Vec<usize> = (0..n)
                .filter(|&i| rank[i] == usize::MAX)
                .filter(|&i| {
                    !(0..n).any(|j| rank[j] == usize::MAX && constrained_dominates(&pop[j].fitness, &pop[i].fitness))
                })
                .collect();
            for i in layer {
                rank[i] = r;
            }
            r += 1;
        }
        rank
    }

    proptest! {
        #[test]
        fn sort_matches_brute_force(
            pts in prop::collection::vec((0u8..6, 0u8..6, 0u8..6, prop::bool::weighted(0.2), 0u8..3), 1..40)
        ) {
            let mut pop: Vec<Individual> = pts
                .iter()
                .map(|&(a, b, c, infeasible, v)| {
                    ind(&[a as f64, b as f64, c as f64], if infeasible { 1.0 + v as f64 } else { 0.0 })
                })
                .collect();
            let expect = brute_rank(&pop);
            let fronts = fast_nondominated_sort(&mut pop);
            prop_assert_eq!(fronts.iter().map(Vec::len).sum::<usize>(), pop.len());
            for (i, e) in expect.iter().enumerate() {
                prop_assert_eq!(pop[i].rank, Some(*e));
            }
        }
    }
}
