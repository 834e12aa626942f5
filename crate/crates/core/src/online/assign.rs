use super::{DiffMatrix, PropertyMap};

/// Minimum-cost injective association (Hungarian algorithm on the matrix
/// padded to a square with a sentinel cost).
pub fn associate_properties(m: &DiffMatrix) -> PropertyMap {
    let (r, c) = (m.rows(), m.cols());
    if r == 0 || c == 0 {
        return PropertyMap {
            pairs: Default::default(),
            unmapped: (0..r).collect(),
        };
    }
    let n = r.max(c);
    let sentinel = m.entries.iter().flatten().fold(0.0f64, |a, &b| a.max(b)) + 1.0;
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i < r && j < c { m.entries[i][j] } else { sentinel }).collect())
        .collect();
    let row_to_col = hungarian(&cost);
    let mut map = PropertyMap::default();
    for (i, &j) in row_to_col.iter().enumerate().take(r) {
        if j < c {
            map.pairs.insert(i, j);
        } else {
            map.unmapped.push(i);
        }
    }
    map
}

/// Square assignment with row and column potentials; returns the column of
/// every row.
fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        row_to_col[p[j] - 1] = j - 1;
    }
    row_to_col
}

/// Repeatedly pairs the globally smallest remaining entry (ties: lower row,
/// then lower column).
pub fn associate_greedy(m: &DiffMatrix) -> PropertyMap {
    let (r, c) = (m.rows(), m.cols());
    let mut cells: Vec<(usize, usize)> = (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).collect();
    cells.sort_by(|&(a, b), &(x, y)| m.entries[a][b].total_cmp(&m.entries[x][y]).then((a, b).cmp(&(x, y))));
    let mut row_used = vec![false; r];
    let mut col_used = vec![false; c];
    let mut map = PropertyMap::default();
    for (i, j) in cells {
        if !row_used[i] && !col_used[j] {
            row_used[i] = true;
            col_used[j] = true;
            map.pairs.insert(i, j);
        }
    }
    map.unmapped = (0..r).filter(|&i| !row_used[i]).collect();
    map
}

/// Exhaustive minimum over all injective maps of size `min(rows, cols)`.
pub fn brute_force_cost(m: &DiffMatrix) -> f64 {
    fn go(m: &DiffMatrix, row: usize, used: &mut Vec<bool>, left: usize, acc: f64, best: &mut f64) {
        if left == 0 {
            *best = best.min(acc);
            return;
        }
        if m.rows() - row < left {
            return;
        }
        // skip this row only when rows outnumber columns
        if m.rows() - row > left {
            go(m, row + 1, used, left, acc, best);
        }
        for j in 0..m.cols() {
            if !used[j] {
                used[j] = true;
                go(m, row + 1, used, left - 1, acc + m.entries[row][j], best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    let k = m.rows().min(m.cols());
    go(m, 0, &mut vec![false; m.cols()], k, 0.0, &mut best);
    if k == 0 {
        0.0
    } else {
        best
    }
}
