//! Small graph utilities shared by the analysis modules.

/// Tarjan SCC on an adjacency-list digraph, iterative to keep the stack flat.
/// Components are returned in reverse topological order (every edge goes from
/// a later component to an earlier one or stays inside).
pub fn tarjan_scc(graph: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = graph.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0usize;

    // call frames: (vertex, next-edge-index)
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            if *ei < graph[v].len() {
                let w = graph[v][*ei];
                *ei += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&mut (p, _)) = call.last_mut() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Vertices reachable from `start`, including it.
pub fn reachable(graph: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; graph.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &w in &graph[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Shortest path `from -> to` as a vertex list (BFS); `None` if unreachable.
/// When `from == to`, returns a shortest nonempty cycle through the vertex.
pub fn shortest_path(graph: &[Vec<usize>], from: usize, to: usize) -> Option<Vec<usize>> {
    use std::collections::VecDeque;
    let n = graph.len();
    let mut prev = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &w in &graph[from] {
        if w == to {
            return Some(vec![from, to]);
        }
        if !seen[w] {
            seen[w] = true;
            prev[w] = from;
            queue.push_back(w);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in &graph[v] {
            if w == to {
                let mut path = vec![to, v];
                let mut cur = v;
                while prev[cur] != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.push(from);
                path.reverse();
                return Some(path);
            }
            if !seen[w] {
                seen[w] = true;
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_two_cycles() {
        // 0 <-> 1, 2 -> 0, 2 -> 3, 3 -> 2
        let g = vec![vec![1], vec![0], vec![0, 3], vec![2]];
        let mut comps = tarjan_scc(&g);
        for c in &mut comps {
            c.sort_unstable();
        }
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn cycle_through_vertex() {
        let g = vec![vec![1], vec![0]];
        assert_eq!(shortest_path(&g, 0, 0), Some(vec![0, 1, 0]));
    }
}
