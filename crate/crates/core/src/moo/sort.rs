use super::{Chromosome, EvalContext, Individual, ObjectiveVector};

/// `a` is at least as good as `b` in both objectives and better in one.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    a.features >= b.features && a.auc >= b.auc && (a.features > b.features || a.auc > b.auc)
}

/// Indices of the members no other member dominates, ascending.
pub fn non_dominated_indices(objectives: &[ObjectiveVector]) -> Vec<usize> {
    (0..objectives.len())
        .filter(|&i| !objectives.iter().any(|o| dominates(o, &objectives[i])))
        .collect()
}

/// Partitions `objectives` into successive non-dominated fronts. Indices in
/// each front are ascending.
pub fn fast_nondominated_sort(objectives: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&objectives[i], &objectives[j]) {
                dominated_by[i].push(j);
                domination_count[j] += 1;
            } else if dominates(&objectives[j], &objectives[i]) {
                dominated_by[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of one front, in input order.
///
/// Fronts of one or two members are all boundary (`∞`). An objective with
/// zero range across the front contributes nothing.
pub fn crowding_distance(front: &[ObjectiveVector]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut distance = vec![0.0; n];
    let getters: [fn(&ObjectiveVector) -> f64; 2] = [|o| o.features, |o| o.auc];
    for get in getters {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| get(&front[a]).total_cmp(&get(&front[b])));
        let lo = get(&front[order[0]]);
        let hi = get(&front[order[n - 1]]);
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        for w in 1..n - 1 {
            let gap = get(&front[order[w + 1]]) - get(&front[order[w - 1]]);
            distance[order[w]] += gap / range;
        }
    }
    distance
}

pub(crate) fn evaluate_individuals(ctx: &EvalContext, chromosomes: Vec<Chromosome>) -> Vec<Individual> {
    let objectives = ctx.evaluate_batch(&chromosomes);
    chromosomes
        .into_iter()
        .zip(objectives)
        .map(|(c, o)| Individual::new(c, o))
        .collect()
}

/// Sets `rank` and `crowding` of every member; returns the fronts.
pub(crate) fn assign_rank_and_crowding(pop: &mut [Individual]) -> Vec<Vec<usize>> {
    let objectives: Vec<ObjectiveVector> = pop.iter().map(|i| i.objectives).collect();
    let fronts = fast_nondominated_sort(&objectives);
    for (rank, front) in fronts.iter().enumerate() {
        let members: Vec<ObjectiveVector> = front.iter().map(|&i| objectives[i]).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&members)) {
            pop[i].rank = rank;
            pop[i].crowding = d;
        }
    }
    fronts
}

/// Keeps `n` members front by front; the front that overflows is cut by
/// crowding distance (ties favour higher AUC, then earlier index).
pub(crate) fn environmental_selection(mut pool: Vec<Individual>, n: usize) -> Vec<Individual> {
    let fronts = assign_rank_and_crowding(&mut pool);
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    for front in fronts {
        if chosen.len() + front.len() <= n {
            chosen.extend(front);
            continue;
        }
        let mut front = front;
        front.sort_by(|&a, &b| {
            pool[b]
                .crowding
                .total_cmp(&pool[a].crowding)
                .then(pool[b].objectives.auc.total_cmp(&pool[a].objectives.auc))
                .then(a.cmp(&b))
        });
        chosen.extend(front.into_iter().take(n - chosen.len()));
        break;
    }
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    chosen
        .into_iter()
        .map(|i| slots[i].take().expect("index chosen twice"))
        .collect()
}
