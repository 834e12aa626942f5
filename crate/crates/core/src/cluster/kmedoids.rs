use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_points, cosine_distance, ClusterError, Partition};

/// PAM: greedy BUILD then best-improvement SWAP until no single swap lowers
/// the total distance to the nearest medoid. The seed fixes the scan order
/// used to break ties.
pub fn kmedoids(points: &[Vec<f64>], k: usize, seed: u64, max_iters: usize) -> Result<Partition, ClusterError> {
    check_points(points, k)?;
    let n = points.len();
    let dist: Vec<Vec<f64>> = points
        .iter()
        .map(|a| points.iter().map(|b| cosine_distance(a, b).max(0.0)).collect())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    let first = *order
        .iter()
        .min_by(|&&i, &&j| {
            let ci: f64 = dist[i].iter().sum();
            let cj: f64 = dist[j].iter().sum();
            ci.total_cmp(&cj)
        })
        .expect("n >= 2");
    medoids.push(first);
    while medoids.len() < k {
        let nearest: Vec<f64> = (0..n).map(|j| medoids.iter().map(|&m| dist[m][j]).fold(f64::INFINITY, f64::min)).collect();
        let mut best: Option<(usize, f64)> = None;
        for &i in order.iter().filter(|i| !medoids.contains(i)) {
            let gain: f64 = (0..n).map(|j| (nearest[j] - dist[i][j]).max(0.0)).sum();
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((i, gain));
            }
        }
        medoids.push(best.expect("k <= n").0);
    }

    let mut cost = total_cost(&dist, &medoids);
    for _ in 0..max_iters.max(1) {
        let mut best: Option<(usize, usize, f64)> = None;
        for slot in 0..k {
            for &o in order.iter().filter(|o| !medoids.contains(o)) {
                let mut trial = medoids.clone();
                trial[slot] = o;
                let c = total_cost(&dist, &trial);
                if c < cost - 1e-12 && best.is_none_or(|(_, _, b)| c < b) {
                    best = Some((slot, o, c));
                }
            }
        }
        match best {
            Some((slot, o, c)) => {
                medoids[slot] = o;
                cost = c;
            }
            None => break,
        }
    }

    let assignment = assign(&dist, &medoids);
    Ok(Partition {
        k,
        assignment,
        objective: cost,
        medoids: Some(medoids),
    })
}

pub(crate) fn total_cost(dist: &[Vec<f64>], medoids: &[usize]) -> f64 {
    (0..dist.len())
        .map(|j| medoids.iter().map(|&m| dist[m][j]).fold(f64::INFINITY, f64::min))
        .sum()
}

fn assign(dist: &[Vec<f64>], medoids: &[usize]) -> Vec<usize> {
    (0..dist.len())
        .map(|j| {
            if let Some(slot) = medoids.iter().position(|&m| m == j) {
                return slot;
            }
            let mut best = 0;
            for (slot, &m) in medoids.iter().enumerate() {
                if dist[m][j] < dist[medoids[best]][j] {
                    best = slot;
                }
            }
            best
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn dist_of(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
        points
            .iter()
            .map(|a| points.iter().map(|b| cosine_distance(a, b).max(0.0)).collect())
            .collect()
    }

    #[test]
    fn identical_points_cost_zero() {
        let pts = vec![vec![0.3, 0.4]; 5];
        for k in 2..=5 {
            let p = kmedoids(&pts, k, 1, 50).unwrap();
            assert_eq!(p.objective, 0.0);
            assert!(p.groups().iter().all(|g| !g.is_empty()));
        }
    }

    #[test]
    fn swap_neighborhood_is_stable() {
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let pts: Vec<Vec<f64>> = (0..5).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let p = kmedoids(&pts, 2, seed, 50).unwrap();
            let dist = dist_of(&pts);
            let medoids = p.medoids.clone().unwrap();
            for slot in 0..2 {
                for o in (0..5).filter(|o| !medoids.contains(o)) {
                    let mut trial = medoids.clone();
                    trial[slot] = o;
                    assert!(total_cost(&dist, &trial) >= p.objective - 1e-12);
                }
            }
        }
    }

    #[test]
    fn separated_triples_get_one_medoid_each() {
        let pts = vec![
            vec![1.0, 0.05, 0.0],
            vec![1.0, -0.05, 0.0],
            vec![1.0, 0.0, 0.05],
            vec![0.0, 0.05, 1.0],
            vec![0.0, -0.05, 1.0],
            vec![0.05, 0.0, 1.0],
        ];
        let dist = dist_of(&pts);
        let mut best = f64::INFINITY;
        for a in 0..6 {
            for b in a + 1..6 {
                best = best.min(total_cost(&dist, &[a, b]));
            }
        }
        let p = kmedoids(&pts, 2, 5, 50).unwrap();
        let m = p.medoids.unwrap();
        assert!((m[0] < 3) != (m[1] < 3));
        assert!((p.objective - best).abs() < 1e-12);
    }

    #[test]
    fn medoid_assigned_to_itself() {
        let pts = vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let p = kmedoids(&pts, 2, 0, 10).unwrap();
        for (slot, &m) in p.medoids.as_ref().unwrap().iter().enumerate() {
            assert_eq!(p.assignment[m], slot);
        }
    }
}
