//! Fill-reducing ordering by minimum degree on the explicit elimination
//! graph of `|K| + |K|ᵀ`.

use std::collections::BTreeSet;

/// Symmetric adjacency (no self loops) of the pattern `|K| + |K|ᵀ`, given as
/// CSR row offsets and column indices of a square `K`.
pub fn symmetric_pattern(n: usize, row_offsets: &[usize], col_indices: &[usize]) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for r in 0..n {
        for &c in &col_indices[row_offsets[r]..row_offsets[r + 1]] {
            if c != r {
                adj[r].push(c);
                adj[c].push(r);
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

fn merge_into(target: &mut Vec<usize>, other: &[usize], skip: (usize, usize)) {
    let mut out = Vec::with_capacity(target.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < other.len() {
        let next = match (target.get(i), other.get(j)) {
            (Some(&a), Some(&b)) if a == b => {
                i += 1;
                j += 1;
                a
            }
            (Some(&a), Some(&b)) if a < b => {
                i += 1;
                a
            }
            (Some(&a), None) => {
                i += 1;
                a
            }
            (_, Some(&b)) => {
                j += 1;
                b
            }
            (None, None) => unreachable!(),
        };
        if next != skip.0 && next != skip.1 {
            out.push(next);
        }
    }
    *target = out;
}

/// Minimum-degree elimination order. Ties go to the smallest index, so the
/// result is deterministic.
pub fn minimum_degree(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    let mut adj: Vec<Vec<usize>> = adjacency.to_vec();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (adj[v].len(), v)).collect();
    let mut order = Vec::with_capacity(n);
    while let Some((_, v)) = queue.pop_first() {
        order.push(v);
        let nbrs = std::mem::take(&mut adj[v]);
        for &u in &nbrs {
            queue.remove(&(adj[u].len(), u));
            merge_into(&mut adj[u], &nbrs, (u, v));
            queue.insert((adj[u].len(), u));
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_a_permutation() {
        // 5-point Laplacian pattern on a 6 × 6 grid.
        let m = 6;
        let mut adj = vec![Vec::new(); m * m];
        for i in 0..m {
            for j in 0..m {
                let v = i * m + j;
                if i + 1 < m {
                    adj[v].push(v + m);
                    adj[v + m].push(v);
                }
                if j + 1 < m {
                    adj[v].push(v + 1);
                    adj[v + 1].push(v);
                }
            }
        }
        adj.iter_mut().for_each(|a| a.sort_unstable());
        let order = minimum_degree(&adj);
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..m * m).collect::<Vec<_>>());
        // A corner has the smallest degree and the smallest index.
        assert_eq!(order[0], 0);
    }

    #[test]
    fn arrow_matrix_eliminates_hub_last() {
        // Node 0 is connected to everyone; eliminating it first would fill
        // the whole matrix.
        let n = 8;
        let mut adj = vec![Vec::new(); n];
        for v in 1..n {
            adj[0].push(v);
            adj[v].push(0);
        }
        let order = minimum_degree(&adj);
        assert!(order[..n - 2].iter().all(|&v| v != 0));
    }

    #[test]
    fn pattern_symmetrizes() {
        // K = [[1, 1, 0], [0, 1, 0], [1, 0, 1]]
        let adj = symmetric_pattern(3, &[0, 2, 3, 5], &[0, 1, 1, 0, 2]);
        assert_eq!(adj, vec![vec![1, 2], vec![0], vec![0]]);
    }
}
