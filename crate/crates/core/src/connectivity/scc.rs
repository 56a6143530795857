use super::Digraph;

const UNSET: u32 = u32::MAX;

/// Strong components of a digraph, numbered in topological order of the
/// component DAG: every DAG edge `(c, d)` has `c < d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condensation {
    pub component: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    /// Deduplicated, sorted.
    pub dag_edges: Vec<(usize, usize)>,
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
}

impl Condensation {
    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.members.len() == 1
    }

    pub fn size(&self, c: usize) -> usize {
        self.members[c].len()
    }
}

/// Iterative Tarjan; O(n + m).
pub fn condense(g: &Digraph) -> Condensation {
    let n = g.n();
    let mut index = vec![UNSET; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut calls: Vec<(u32, usize)> = Vec::new();
    let mut tarjan_comp = vec![UNSET; n];
    let mut found = 0u32;
    let mut next = 0u32;

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root as u32);
        on_stack[root] = true;
        calls.push((root as u32, 0));
        while let Some(top) = calls.last_mut() {
            let v = top.0 as usize;
            let succ = g.successors(v);
            if top.1 < succ.len() {
                let w = succ[top.1] as usize;
                top.1 += 1;
                if index[w] == UNSET {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    calls.push((w as u32, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            calls.pop();
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow") as usize;
                    on_stack[w] = false;
                    tarjan_comp[w] = found;
                    if w == v {
                        break;
                    }
                }
                found += 1;
            }
            if let Some(&(p, _)) = calls.last() {
                let p = p as usize;
                low[p] = low[p].min(low[v]);
            }
        }
    }

    // Tarjan emits sinks first; flip so sources come first.
    let count = found as usize;
    let component: Vec<usize> = tarjan_comp
        .iter()
        .map(|&c| count - 1 - c as usize)
        .collect();
    let mut members = vec![Vec::new(); count];
    for (v, &c) in component.iter().enumerate() {
        members[c].push(v);
    }
    let mut dag_edges: Vec<(usize, usize)> = g
        .edges()
        .map(|(i, j)| (component[i], component[j]))
        .filter(|(a, b)| a != b)
        .collect();
    dag_edges.sort_unstable();
    dag_edges.dedup();
    let mut has_in = vec![false; count];
    let mut has_out = vec![false; count];
    for &(a, b) in &dag_edges {
        has_out[a] = true;
        has_in[b] = true;
    }
    Condensation {
        component,
        members,
        dag_edges,
        sources: (0..count).filter(|&c| !has_in[c]).collect(),
        sinks: (0..count).filter(|&c| !has_out[c]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
        let mut r = vec![vec![false; n]; n];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(i, j) in edges {
            r[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        r
    }

    #[test]
    fn three_cycle() {
        let c = condense(&Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap());
        assert_eq!(c.count(), 1);
        assert!(c.dag_edges.is_empty());
        assert_eq!(c.sources, vec![0]);
        assert_eq!(c.sinks, vec![0]);
    }

    #[test]
    fn path() {
        let c = condense(&Digraph::from_edges(3, [(0, 1), (1, 2)]).unwrap());
        assert_eq!(c.count(), 3);
        assert_eq!(c.members[c.sources[0]], vec![0]);
        assert_eq!(c.members[c.sinks[0]], vec![2]);
        assert_eq!(c.sources.len(), 1);
        assert_eq!(c.sinks.len(), 1);
    }

    #[test]
    fn deep_path_does_not_recurse() {
        let n = 200_000;
        let c = condense(&Digraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap());
        assert_eq!(c.count(), n);
        assert_eq!(c.component[0], 0);
        assert_eq!(c.component[n - 1], n - 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn matches_reachability_closure(
            n in 1usize..=8,
            raw in proptest::collection::vec((0usize..8, 0usize..8), 0..30),
        ) {
            let edges: Vec<_> = raw.into_iter().filter(|&(i, j)| i < n && j < n && i != j).collect();
            let g = Digraph::from_edges(n, edges.iter().copied()).unwrap();
            let c = condense(&g);
            let r = closure(n, &edges);
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(c.component[i] == c.component[j], r[i][j] && r[j][i]);
                }
            }
            for &(a, b) in &c.dag_edges {
                prop_assert!(a < b);
            }
            let expected: std::collections::BTreeSet<_> = edges
                .iter()
                .map(|&(i, j)| (c.component[i], c.component[j]))
                .filter(|(a, b)| a != b)
                .collect();
            prop_assert_eq!(c.dag_edges.iter().copied().collect::<std::collections::BTreeSet<_>>(), expected);
            for k in 0..c.count() {
                prop_assert_eq!(c.sinks.contains(&k), !c.dag_edges.iter().any(|&(a, _)| a == k));
                prop_assert_eq!(c.sources.contains(&k), !c.dag_edges.iter().any(|&(_, b)| b == k));
            }
            if c.count() > 1 {
                prop_assert!(!c.sources.is_empty() && !c.sinks.is_empty());
            }
        }
    }
}
