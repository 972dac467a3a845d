//! Maximum bipartite matching by augmenting paths (Kuhn).

/// Maximum matching of the bipartite graph given by `adj[left] = right
/// neighbours`. Left vertices are tried in index order and neighbours in
/// list order, so the result is deterministic.
///
/// Returns `match_of_left`.
pub fn max_matching(adj: &[Vec<usize>], num_right: usize) -> Vec<Option<usize>> {
    let mut match_right: Vec<Option<usize>> = vec![None; num_right];
    let mut match_left: Vec<Option<usize>> = vec![None; adj.len()];
    let mut visited = vec![false; num_right];
    for u in 0..adj.len() {
        visited.iter_mut().for_each(|v| *v = false);
        augment(u, adj, &mut match_right, &mut visited);
    }
    for (r, l) in match_right.iter().enumerate() {
        if let Some(l) = *l {
            match_left[l] = Some(r);
        }
    }
    match_left
}

fn augment(u: usize, adj: &[Vec<usize>], match_right: &mut [Option<usize>], visited: &mut [bool]) -> bool {
    for &r in &adj[u] {
        if visited[r] {
            continue;
        }
        visited[r] = true;
        let free = match match_right[r] {
            None => true,
            Some(other) => augment(other, adj, match_right, visited),
        };
        if free {
            match_right[r] = Some(u);
            return true;
        }
    }
    false
}
