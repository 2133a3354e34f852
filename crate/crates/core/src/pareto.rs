//! Nondominated filtering and dominance ratios over point sets.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::problem::{objectives_dominate, EvaluatedPoint};

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// `mask[i]` is true iff no other vector dominates `objectives[i]`.
///
/// Vectors are processed in lexicographic order, so every dominator of a point
/// is seen before it and only the running nondominated archive needs checking.
pub fn nondominated_mask<V: AsRef<[f64]> + Sync>(objectives: &[V]) -> Vec<bool> {
    let n = objectives.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.par_sort_by(|&a, &b| lex_cmp(objectives[a].as_ref(), objectives[b].as_ref()));
    let mut mask = vec![false; n];
    let mut archive: Vec<usize> = Vec::new();
    for &i in &order {
        let fi = objectives[i].as_ref();
        if !archive
            .iter()
            .any(|&a| objectives_dominate(objectives[a].as_ref(), fi))
        {
            mask[i] = true;
            archive.push(i);
        }
    }
    mask
}

/// Nondominated mask over evaluated points.
///
/// With `feasible_only`, infeasible points are excluded from the comparison
/// set and always get `false`.
pub fn nondominated_filter(points: &[EvaluatedPoint], feasible_only: bool) -> Vec<bool> {
    let considered: Vec<usize> = (0..points.len())
        .filter(|&i| !feasible_only || points[i].is_feasible)
        .collect();
    let objectives: Vec<&[f64]> = considered.iter().map(|&i| points[i].f.as_slice()).collect();
    let sub = nondominated_mask(&objectives);
    let mut mask = vec![false; points.len()];
    for (&i, &nd) in considered.iter().zip(&sub) {
        mask[i] = nd;
    }
    mask
}

/// Number of dominators of every vector, ignoring feasibility.
pub fn dominator_counts<V: AsRef<[f64]> + Sync>(objectives: &[V]) -> Vec<usize> {
    let n = objectives.len();
    if n == 0 {
        return Vec::new();
    }
    if objectives[0].as_ref().len() == 2 {
        return dominator_counts_2d(objectives);
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let fi = objectives[i].as_ref();
            objectives
                .iter()
                .filter(|q| objectives_dominate(q.as_ref(), fi))
                .count()
        })
        .collect()
}

/// Exact two-objective dominance counting with a Fenwick tree in O(n log n).
///
/// A point's dominators are the points weakly below it in both objectives
/// minus its exact duplicates (itself included).
fn dominator_counts_2d<V: AsRef<[f64]>>(objectives: &[V]) -> Vec<usize> {
    let n = objectives.len();
    let f = |i: usize, m: usize| objectives[i].as_ref()[m];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        f(a, 0)
            .total_cmp(&f(b, 0))
            .then(f(a, 1).total_cmp(&f(b, 1)))
    });

    let mut f2: Vec<f64> = (0..n).map(|i| f(i, 1)).collect();
    f2.sort_by(f64::total_cmp);
    f2.dedup_by(|a, b| a.total_cmp(b) == Ordering::Equal);
    let rank = |v: f64| f2.partition_point(|&x| x.total_cmp(&v) == Ordering::Less) + 1;

    let mut tree = vec![0usize; f2.len() + 1];
    let mut counts = vec![0usize; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && f(order[end], 0).total_cmp(&f(order[start], 0)) == Ordering::Equal {
            end += 1;
        }
        for &i in &order[start..end] {
            let mut r = rank(f(i, 1));
            while r < tree.len() {
                tree[r] += 1;
                r += r & r.wrapping_neg();
            }
        }
        // Within a group of equal f1, equal f2 values are adjacent.
        let mut k = start;
        while k < end {
            let mut e = k + 1;
            while e < end && f(order[e], 1).total_cmp(&f(order[k], 1)) == Ordering::Equal {
                e += 1;
            }
            let mut r = rank(f(order[k], 1));
            let mut weak = 0;
            while r > 0 {
                weak += tree[r];
                r -= r & r.wrapping_neg();
            }
            for &i in &order[k..e] {
                counts[i] = weak - (e - k);
            }
            k = e;
        }
        start = end;
    }
    counts
}

/// Fraction of the other points that dominate each point: `count / (n - 1)`.
pub fn dominance_ratio<V: AsRef<[f64]> + Sync>(objectives: &[V]) -> Vec<f64> {
    let n = objectives.len();
    let denom = n.saturating_sub(1).max(1) as f64;
    dominator_counts(objectives)
        .into_iter()
        .map(|c| c as f64 / denom)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_mask(f: &[Vec<f64>]) -> Vec<bool> {
        (0..f.len())
            .map(|i| !(0..f.len()).any(|j| j != i && objectives_dominate(&f[j], &f[i])))
            .collect()
    }

    fn brute_counts(f: &[Vec<f64>]) -> Vec<usize> {
        (0..f.len())
            .map(|i| {
                (0..f.len())
                    .filter(|&j| objectives_dominate(&f[j], &f[i]))
                    .count()
            })
            .collect()
    }

    fn random_set(seed: u64, n: usize, m: usize, levels: u32) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| f64::from(rng.gen_range(0..levels)))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn small_cases() {
        let f = vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![2.0, 2.0]];
        assert_eq!(nondominated_mask(&f), vec![true, true, false]);
        assert_eq!(nondominated_mask(&[vec![3.0, 3.0]]), vec![true]);
        let chain = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
        assert_eq!(dominance_ratio(&chain), vec![0.0, 0.5, 1.0]);
        let anti = vec![vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 1.0]];
        assert_eq!(dominance_ratio(&anti), vec![0.0; 3]);
    }

    #[test]
    fn matches_brute_force() {
        for seed in 0..20 {
            for (m, levels) in [(2, 1000), (2, 6), (3, 8), (4, 5)] {
                let f = random_set(seed, 200, m, levels);
                assert_eq!(nondominated_mask(&f), brute_mask(&f), "seed {seed} m {m}");
                assert_eq!(dominator_counts(&f), brute_counts(&f), "seed {seed} m {m}");
            }
        }
    }

    #[test]
    fn filter_is_idempotent_and_stable_under_dominated_additions() {
        let f = random_set(99, 300, 2, 50);
        let mask = nondominated_mask(&f);
        let front: Vec<Vec<f64>> = f
            .iter()
            .zip(&mask)
            .filter(|(_, &k)| k)
            .map(|(v, _)| v.clone())
            .collect();
        assert!(nondominated_mask(&front).iter().all(|&k| k));
        let mut extended = f.clone();
        extended.push(vec![1e9, 1e9]);
        assert_eq!(&nondominated_mask(&extended)[..f.len()], &mask[..]);
    }

    #[test]
    fn feasible_only_ignores_infeasible_dominators() {
        let p = |f: &[f64], v: f64| EvaluatedPoint::new(vec![0.0], f.to_vec(), vec![v]);
        let pts = vec![
            p(&[0.0, 0.0], 1.0),
            p(&[1.0, 1.0], 0.0),
            p(&[2.0, 0.5], 0.0),
        ];
        assert_eq!(nondominated_filter(&pts, true), vec![false, true, true]);
        assert_eq!(nondominated_filter(&pts, false), vec![true, false, false]);
    }
}
