use super::Individual;

/// Drops the `tau1` members with the largest first objective, then the
/// `tau2` remaining members with the largest second objective. Survivors
/// keep their relative order; ties go against the later member.
///
/// Panics unless `tau1 + tau2 < pop.len()`.
pub fn eliminate(pop: Vec<Individual>, tau1: usize, tau2: usize) -> Vec<Individual> {
    assert!(
        tau1 + tau2 < pop.len() || tau1 + tau2 == 0,
        "cannot eliminate {} of {} members",
        tau1 + tau2,
        pop.len()
    );
    let after_first = drop_worst(pop, 0, tau1);
    drop_worst(after_first, 1, tau2)
}

fn drop_worst(pop: Vec<Individual>, objective: usize, count: usize) -> Vec<Individual> {
    if count == 0 {
        return pop;
    }
    let mut idx: Vec<usize> = (0..pop.len()).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (&pop[a].fitness.objectives[objective], &pop[b].fitness.objectives[objective]);
        // NaN counts as worst
        y.is_nan().cmp(&x.is_nan()).reverse().then(x.total_cmp(y))
    });
    let mut keep = vec![true; pop.len()];
    for &i in &idx[pop.len() - count..] {
        keep[i] = false;
    }
    pop.into_iter()
        .zip(keep)
        .filter_map(|(ind, k)| k.then_some(ind))
        .collect()
}
