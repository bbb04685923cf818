//! Maximum-weight bipartite matching of channels (rows) to groups (columns).

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// `group_of[k]` is the group matched to channel `k`, if any.
    pub group_of: Vec<Option<usize>>,
    pub total: f64,
}

/// Kuhn–Munkres with row/column potentials, O(n³) for `n = max(rows, cols)`.
///
/// Rectangular inputs are padded with zero-weight dummy rows or columns, so
/// with more groups than channels the best `rows` groups are chosen and the
/// rest stay unmatched.
pub fn hungarian_match(weights: &[Vec<f64>]) -> Result<Matching> {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    for (i, row) in weights.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::InvalidInput(format!(
                "weight row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFiniteWeight { row: i, col: j });
        }
    }
    if rows == 0 || cols == 0 {
        return Ok(Matching {
            group_of: vec![None; rows],
            total: 0.0,
        });
    }

    let n = rows.max(cols);
    let top = weights
        .iter()
        .flatten()
        .copied()
        .fold(0.0_f64, f64::max);
    // Minimise top - w; dummies cost `top`, i.e. weight zero.
    let cost = |i: usize, j: usize| -> f64 {
        if i < rows && j < cols {
            top - weights[i][j]
        } else {
            top
        }
    };

    // 1-based arrays; index 0 is the virtual start column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
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
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut group_of = vec![None; rows];
    let mut total = 0.0;
    for j in 1..=n {
        let i = row_of[j];
        if i >= 1 && i <= rows && j <= cols {
            group_of[i - 1] = Some(j - 1);
            total += weights[i - 1][j - 1];
        }
    }
    Ok(Matching { group_of, total })
}
