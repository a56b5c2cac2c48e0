//! Longest paths over the step DAG of a space.
//!
//! Two flavours: [`longest_values`] computes the exact floating-point
//! maximum of path sums (identical to exhaustive enumeration, since IEEE
//! addition is monotone), and [`preferred_tree`] picks one representative
//! maximizer per target with a deterministic, tolerance-aware preference.

use crate::bitmatrix::{BitMatrix, BitSet};
use crate::tolerance;

/// Topological order of the step relation (off-diagonal entries only).
///
/// On a cycle, returns one edge `(i, j)` lying on it.
pub fn topological_order(steps: &BitMatrix) -> Result<Vec<usize>, (usize, usize)> {
    let n = steps.size();
    let mut indeg = vec![0usize; n];
    for i in 0..n {
        for j in steps.row_iter(i) {
            if i != j {
                indeg[j] += 1;
            }
        }
    }
    // min-heap on index keeps the order canonical
    let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> =
        (0..n).filter(|&i| indeg[i] == 0).map(std::cmp::Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(std::cmp::Reverse(i)) = ready.pop() {
        order.push(i);
        for j in steps.row_iter(i) {
            if i != j {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.push(std::cmp::Reverse(j));
                }
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // every remaining vertex has a remaining predecessor; walk back to a cycle
    let mut v = (0..n).find(|&i| indeg[i] > 0).expect("leftover vertex");
    let mut seen = vec![false; n];
    loop {
        seen[v] = true;
        let u = (0..n)
            .find(|&u| u != v && indeg[u] > 0 && steps.get(u, v))
            .expect("leftover vertex has a leftover predecessor");
        if seen[u] {
            return Err((u, v));
        }
        v = u;
    }
}

/// Position of every vertex in `order`.
pub fn positions(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    pos
}

/// Maximum path sum from `source` to every vertex; `-inf` when unreachable.
/// `allowed` restricts intermediate and final vertices.
pub fn longest_values(
    steps: &BitMatrix,
    order: &[usize],
    pos: &[usize],
    source: usize,
    allowed: Option<&BitSet>,
    weight: impl Fn(usize, usize) -> f64,
) -> Vec<f64> {
    let n = steps.size();
    let mut val = vec![f64::NEG_INFINITY; n];
    val[source] = 0.0;
    for &v in &order[pos[source]..] {
        if val[v] == f64::NEG_INFINITY {
            continue;
        }
        for w in steps.row_iter(v) {
            if w == v || allowed.is_some_and(|a| !a.contains(w)) {
                continue;
            }
            let cand = val[v] + weight(v, w);
            if cand > val[w] {
                val[w] = cand;
            }
        }
    }
    val
}

/// Representative maximizers from one source.
#[derive(Debug, Clone)]
pub struct PathTree {
    pub source: usize,
    /// Length of the representative chain to each point.
    pub length: Vec<f64>,
    /// Exact longest-path value to each point.
    pub exact: Vec<f64>,
    pub count: Vec<usize>,
    pub pred: Vec<Option<usize>>,
}

impl PathTree {
    pub fn reaches(&self, v: usize) -> bool {
        self.length[v] > f64::NEG_INFINITY
    }

    /// The chain from the source to `v`, or `None` if unreachable.
    pub fn chain_to(&self, v: usize) -> Option<Vec<usize>> {
        if !self.reaches(v) {
            return None;
        }
        let mut out = vec![v];
        let mut cur = v;
        while let Some(p) = self.pred[cur] {
            out.push(p);
            cur = p;
        }
        out.reverse();
        Some(out)
    }
}

/// Longest-path tree preferring, in order: length within tolerance of the
/// exact longest value, more points, smaller predecessor index.
///
/// Preferring more points makes each representative chain pass through
/// every carrier point lying on a maximizing segment. Near-ties are judged
/// against the exact optimum, so the slack does not accumulate along a
/// chain.
pub fn preferred_tree(
    steps: &BitMatrix,
    order: &[usize],
    pos: &[usize],
    source: usize,
    allowed: Option<&BitSet>,
    weight: impl Fn(usize, usize) -> f64,
) -> PathTree {
    let n = steps.size();
    let exact = longest_values(steps, order, pos, source, allowed, &weight);
    let mut length = vec![f64::NEG_INFINITY; n];
    let mut count = vec![0usize; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    length[source] = 0.0;
    count[source] = 1;
    // pull formulation: predecessors are scanned in increasing index order
    let steps_t = steps.transpose();
    for &w in &order[pos[source] + 1..] {
        if allowed.is_some_and(|a| !a.contains(w)) {
            continue;
        }
        for v in steps_t.row_iter(w) {
            if v == w || length[v] == f64::NEG_INFINITY || pos[v] >= pos[w] {
                continue;
            }
            let cand = length[v] + weight(v, w);
            let cand_count = count[v] + 1;
            let near = |c: f64| tolerance::approx_eq(c, exact[w]);
            let better = match pred[w] {
                None => true,
                Some(_) => match (near(cand), near(length[w])) {
                    (true, true) => cand_count > count[w],
                    (true, false) => true,
                    (false, true) => false,
                    (false, false) => cand > length[w],
                },
            };
            if better {
                length[w] = cand;
                count[w] = cand_count;
                pred[w] = Some(v);
            }
        }
    }
    PathTree {
        source,
        length,
        exact,
        count,
        pred,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_cycle() {
        let mut m = BitMatrix::new(3);
        m.set(0, 1);
        m.set(1, 2);
        m.set(2, 1);
        let (a, b) = topological_order(&m).unwrap_err();
        assert!(m.get(a, b));
        assert!([(1, 2), (2, 1)].contains(&(a, b)));
    }

    #[test]
    fn prefers_denser_chain_on_ties() {
        // 0 -> 2 directly (weight 2) or 0 -> 1 -> 2 (1 + 1)
        let mut m = BitMatrix::new(3);
        m.set(0, 1);
        m.set(1, 2);
        m.set(0, 2);
        let order = topological_order(&m).unwrap();
        let pos = positions(&order);
        let w = |a: usize, b: usize| (b - a) as f64;
        let tree = preferred_tree(&m, &order, &pos, 0, None, w);
        assert_eq!(tree.chain_to(2).unwrap(), vec![0, 1, 2]);
        let vals = longest_values(&m, &order, &pos, 0, None, w);
        assert_eq!(vals[2], 2.0);
    }
}
