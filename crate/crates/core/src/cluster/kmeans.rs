use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_points, normalize, ClusterError, Partition};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Spherical k-means: Lloyd iterations on unit vectors, followed by single
/// point moves while any move lowers the objective. The objective is the sum
/// of cosine distances to the normalized group means.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, max_iters: usize) -> Result<Partition, ClusterError> {
    check_points(points, k)?;
    let units: Vec<Vec<f64>> = points.iter().map(|p| normalize(p)).collect();
    let n = units.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut centers = seed_centers(&units, k, &mut rng);
    let mut assignment = vec![usize::MAX; n];
    for _ in 0..max_iters.max(1) {
        let mut changed = false;
        for (i, u) in units.iter().enumerate() {
            let best = nearest(u, &centers);
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        repair_empty(&units, &mut assignment, &centers, k);
        centers = group_centers(&units, &assignment, k, &centers);
        if !changed {
            break;
        }
    }

    refine(&units, &mut assignment, k);
    let sums = group_sums(&units, &assignment, k);
    let sizes = group_sizes(&assignment, k);
    let objective = (0..k).map(|g| sizes[g] as f64 - norm(&sums[g])).sum::<f64>().max(0.0);
    Ok(Partition {
        k,
        assignment,
        objective,
        medoids: None,
    })
}

fn distance(u: &[f64], c: &[f64]) -> f64 {
    1.0 - dot(u, c)
}

fn nearest(u: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (g, c) in centers.iter().enumerate() {
        let d = distance(u, c);
        if d < best_d {
            best = g;
            best_d = d;
        }
    }
    best
}

/// k-means++ seeding under cosine distance.
fn seed_centers(units: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = units.len();
    let mut chosen = vec![rng.gen_range(0..n)];
    while chosen.len() < k {
        let weights: Vec<f64> = units
            .iter()
            .map(|u| {
                let d = chosen.iter().map(|&c| distance(u, &units[c])).fold(f64::INFINITY, f64::min);
                d.max(0.0).powi(2)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.gen::<f64>() * total;
            let mut pick = None;
            for (i, w) in weights.iter().enumerate() {
                if *w > 0.0 {
                    pick = Some(i);
                    if r < *w {
                        break;
                    }
                    r -= w;
                }
            }
            pick.expect("positive weight exists")
        } else {
            (0..n).find(|i| !chosen.contains(i)).expect("k <= n")
        };
        chosen.push(pick);
    }
    chosen.into_iter().map(|i| units[i].clone()).collect()
}

fn group_sizes(assignment: &[usize], k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    for &g in assignment {
        sizes[g] += 1;
    }
    sizes
}

fn group_sums(units: &[Vec<f64>], assignment: &[usize], k: usize) -> Vec<Vec<f64>> {
    let d = units[0].len();
    let mut sums = vec![vec![0.0; d]; k];
    for (u, &g) in units.iter().zip(assignment) {
        for (s, x) in sums[g].iter_mut().zip(u) {
            *s += x;
        }
    }
    sums
}

fn group_centers(units: &[Vec<f64>], assignment: &[usize], k: usize, previous: &[Vec<f64>]) -> Vec<Vec<f64>> {
    group_sums(units, assignment, k)
        .into_iter()
        .enumerate()
        .map(|(g, s)| if norm(&s) > 0.0 { normalize(&s) } else { previous[g].clone() })
        .collect()
}

/// Moves the point farthest from its center into each empty group.
fn repair_empty(units: &[Vec<f64>], assignment: &mut [usize], centers: &[Vec<f64>], k: usize) {
    loop {
        let sizes = group_sizes(assignment, k);
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let donor = (0..units.len())
            .filter(|&i| sizes[assignment[i]] > 1)
            .max_by(|&i, &j| {
                distance(&units[i], &centers[assignment[i]])
                    .total_cmp(&distance(&units[j], &centers[assignment[j]]))
                    .then(j.cmp(&i))
            })
            .expect("k <= n leaves a group with two points");
        assignment[donor] = empty;
    }
}

/// Applies the best improving single-point move until none is left.
fn refine(units: &[Vec<f64>], assignment: &mut [usize], k: usize) {
    let mut sums = group_sums(units, assignment, k);
    let mut sizes = group_sizes(assignment, k);
    let shifted = |s: &[f64], u: &[f64], sign: f64| -> f64 {
        s.iter().zip(u).map(|(a, b)| (a + sign * b).powi(2)).sum::<f64>().sqrt()
    };
    let mut guard = 0usize;
    loop {
        let mut improved = false;
        for i in 0..units.len() {
            let from = assignment[i];
            if sizes[from] < 2 {
                continue;
            }
            let u = &units[i];
            // objective per group is size - |sum|
            let leave = -1.0 - shifted(&sums[from], u, -1.0) + norm(&sums[from]);
            let mut best: Option<(usize, f64)> = None;
            for to in (0..k).filter(|&g| g != from) {
                let join = 1.0 - shifted(&sums[to], u, 1.0) + norm(&sums[to]);
                let delta = leave + join;
                if delta < -1e-12 && best.is_none_or(|(_, d)| delta < d) {
                    best = Some((to, delta));
                }
            }
            if let Some((to, _)) = best {
                for (s, x) in sums[from].iter_mut().zip(u) {
                    *s -= x;
                }
                for (s, x) in sums[to].iter_mut().zip(u) {
                    *s += x;
                }
                sizes[from] -= 1;
                sizes[to] += 1;
                assignment[i] = to;
                improved = true;
            }
        }
        guard += 1;
        if !improved || guard > 10_000 {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn objective_of(units: &[Vec<f64>], assignment: &[usize], k: usize) -> f64 {
        let sums = group_sums(units, assignment, k);
        let sizes = group_sizes(assignment, k);
        (0..k).map(|g| sizes[g] as f64 - norm(&sums[g])).sum()
    }

    #[test]
    fn antipodal_groups_separate() {
        let pts = vec![
            vec![1.0, 0.1],
            vec![1.0, -0.1],
            vec![2.0, 0.0],
            vec![-1.0, 0.1],
            vec![-1.0, -0.1],
            vec![-3.0, 0.0],
        ];
        let p = kmeans(&pts, 2, 4, 100).unwrap();
        let a = &p.assignment;
        assert!(a[0] == a[1] && a[1] == a[2]);
        assert!(a[3] == a[4] && a[4] == a[5]);
        assert_ne!(a[0], a[3]);
    }

    #[test]
    fn k_equals_n_is_singletons() {
        let pts: Vec<Vec<f64>> = (0..5).map(|i| vec![1.0, i as f64]).collect();
        let p = kmeans(&pts, 5, 0, 100).unwrap();
        let mut a = p.assignment.clone();
        a.sort_unstable();
        assert_eq!(a, vec![0, 1, 2, 3, 4]);
        assert!(p.objective.abs() < 1e-12);
    }

    #[test]
    fn identical_points_every_group_non_empty() {
        let pts = vec![vec![1.0, 1.0]; 6];
        let p = kmeans(&pts, 3, 2, 100).unwrap();
        assert!(p.groups().iter().all(|g| !g.is_empty()));
    }

    #[test]
    fn one_move_stability() {
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Vec<f64>> = (0..6).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let p = kmeans(&pts, 2, seed, 100).unwrap();
            let units: Vec<Vec<f64>> = pts.iter().map(|x| normalize(x)).collect();
            let base = objective_of(&units, &p.assignment, 2);
            assert!((base - p.objective).abs() < 1e-9);
            for i in 0..6 {
                let mut moved = p.assignment.clone();
                moved[i] = 1 - moved[i];
                if !moved.contains(&0) || !moved.contains(&1) {
                    continue;
                }
                assert!(objective_of(&units, &moved, 2) >= base - 1e-9, "seed {seed} point {i}");
            }
        }
    }

    #[test]
    fn range_checks() {
        let pts = vec![vec![1.0], vec![2.0]];
        assert_eq!(kmeans(&pts, 1, 0, 10), Err(ClusterError::KOutOfRange { k: 1, n: 2 }));
        assert_eq!(kmeans(&pts, 3, 0, 10), Err(ClusterError::KOutOfRange { k: 3, n: 2 }));
    }
}
