use ndarray::ArrayView2;

use crate::error::{Error, Result};
use crate::graph::Matching;

/// Maximizes `<c, y>` over injective maps from rows into columns.
///
/// Shortest-augmenting-path Hungarian method with row and column
/// potentials, `O(n^2 n')`. Among equally short augmenting paths a free
/// column is preferred, then the lowest column index, so a constant matrix
/// yields the identity.
pub fn linear_assignment(c: ArrayView2<f64>) -> Result<Matching> {
    let (n, m) = c.dim();
    if n > m {
        return Err(Error::InvalidArgument(format!("linear assignment needs rows <= columns, got {n}x{m}")));
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite compatibility".into()));
    }
    if n == 0 {
        return Ok(Matching::new(Vec::new(), m)?);
    }

    // 1-based indices; column 0 and row 0 are sentinels.
    let cost = |i: usize, j: usize| -c[[i - 1, j - 1]];
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut minv = vec![f64::INFINITY; m + 1];
    let mut used = vec![false; m + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                let better = minv[j] < delta || (minv[j] == delta && j1 != 0 && owner[j1] != 0 && owner[j] == 0);
                if better {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut map = vec![0usize; n];
    for j in 1..=m {
        if owner[j] > 0 {
            map[owner[j] - 1] = j - 1;
        }
    }
    Ok(Matching::new(map, m)?)
}

/// `<c, y>` summed in row order.
pub fn assignment_value(c: ArrayView2<f64>, y: &Matching) -> f64 {
    y.pairs().map(|(i, j)| c[[i, j]]).sum()
}
