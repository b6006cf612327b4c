use crate::error::{Error, Result};
use crate::graph::{objective_value, AttributedGraph, CompatibilityTables, Matching};

pub const MAX_BRUTE_FORCE_ROWS: usize = 8;

/// Calls `f` on every injection `[n] -> [m]` in lexicographic order.
pub fn for_each_injection(n: usize, m: usize, mut f: impl FnMut(&[usize])) {
    fn rec(pos: usize, m: usize, cur: &mut Vec<usize>, used: &mut [bool], f: &mut dyn FnMut(&[usize])) {
        if pos == cur.capacity() {
            f(cur);
            return;
        }
        for j in 0..m {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(pos + 1, m, cur, used, f);
                cur.pop();
                used[j] = false;
            }
        }
    }
    if n > m {
        return;
    }
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; m];
    rec(0, m, &mut cur, &mut used, &mut f);
}

/// First maximizer of `score` over all injections, in lexicographic order.
pub fn brute_force_max(n: usize, m: usize, mut score: impl FnMut(&Matching) -> Result<f64>) -> Result<(Matching, f64)> {
    if n > MAX_BRUTE_FORCE_ROWS {
        return Err(Error::InvalidArgument(format!(
            "exhaustive search limited to {MAX_BRUTE_FORCE_ROWS} rows, got {n}"
        )));
    }
    if n > m {
        return Err(Error::InvalidArgument(format!("cannot inject {n} rows into {m} columns")));
    }
    let mut best: Option<(Matching, f64)> = None;
    let mut err = None;
    for_each_injection(n, m, |map| {
        if err.is_some() {
            return;
        }
        let y = Matching::new(map.to_vec(), m).expect("injection");
        match score(&y) {
            Ok(v) => {
                if best.as_ref().is_none_or(|(_, b)| v > *b) {
                    best = Some((y, v));
                }
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(best.expect("at least one injection"))
}

/// Exhaustive maximizer of the quadratic-assignment objective.
pub fn brute_force_qap(
    tables: &CompatibilityTables,
    g: &AttributedGraph,
    g_prime: &AttributedGraph,
) -> Result<Matching> {
    let (n, m) = (g.num_nodes(), g_prime.num_nodes());
    brute_force_max(n, m, |y| objective_value(tables, g, g_prime, y)).map(|(y, _)| y)
}

#[cfg(test)]
mod tests {
    use ndarray::Array2;

    use super::*;

    #[test]
    fn injection_count_and_order() {
        let mut all = Vec::new();
        for_each_injection(2, 3, |m| all.push(m.to_vec()));
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 1]);
    }

    #[test]
    fn refuses_large_instances() {
        let pts: Vec<_> = (0..9).map(|i| [i as f64, (i * i) as f64]).collect();
        let g = AttributedGraph::without_edges(pts, Array2::zeros((9, 1))).unwrap();
        let t = CompatibilityTables::linear(Array2::zeros((9, 9)));
        assert!(brute_force_qap(&t, &g, &g).is_err());
    }

    #[test]
    fn ties_resolve_lexicographically() {
        let pts: Vec<_> = (0..3).map(|i| [i as f64, 0.0]).collect();
        let g = AttributedGraph::without_edges(pts, Array2::zeros((3, 1))).unwrap();
        let t = CompatibilityTables::linear(Array2::zeros((3, 3)));
        assert_eq!(brute_force_qap(&t, &g, &g).unwrap(), Matching::identity(3));
    }
}
