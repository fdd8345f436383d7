//! Exact minimum-weight perfect matching on complete weighted graphs.
//!
//! Real weights are scaled by a power of two onto a shared integer grid (at
//! most 2^40 in magnitude) and solved exactly there with the blossom algorithm, so
//! ties are detected exactly. Among optimal matchings the lexicographically
//! smallest sorted pair list is returned.

mod blossom;

use std::fmt::Write as _;

use crate::error::{EcocError, Result};
use blossom::{max_weight_matching, Edge};

/// Weighted complete graph. The diagonal of `weights` is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingProblem {
    weights: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Sorted pairs `(i, j)` with `i < j`.
    pub pairs: Vec<(usize, usize)>,
    pub total_weight: f64,
}

/// Largest graph `brute_force` will enumerate.
pub const BRUTE_FORCE_MAX_NODES: usize = 12;

const GRID_BITS: i32 = 40;

impl MatchingProblem {
    /// Validates that `weights` is square, symmetric off the diagonal and
    /// finite, with at least two nodes.
    pub fn new(weights: Vec<Vec<f64>>) -> Result<Self> {
        let n = weights.len();
        if n < 2 {
            return Err(EcocError::invalid(format!("matching needs at least 2 nodes, got {n}")));
        }
        for (i, row) in weights.iter().enumerate() {
            if row.len() != n {
                return Err(EcocError::invalid(format!("weight row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, &w) in row.iter().enumerate() {
                if i == j {
                    continue;
                }
                if !w.is_finite() {
                    return Err(EcocError::Numerical(format!("non-finite weight at ({i}, {j})")));
                }
                if w != weights[j][i] {
                    return Err(EcocError::invalid(format!("weights not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(MatchingProblem { weights })
    }

    /// Builds the complete graph `weight(i, j)` for `i < j`.
    pub fn from_fn(n: usize, mut weight: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut w = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = weight(i, j);
                w[i][j] = v;
                w[j][i] = v;
            }
        }
        MatchingProblem::new(w)
    }

    pub fn n_nodes(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i][j]
    }

    fn matching_from_pairs(&self, mut pairs: Vec<(usize, usize)>) -> Matching {
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        let total_weight = pairs.iter().map(|&(i, j)| self.weights[i][j]).sum();
        Matching { pairs, total_weight }
    }

    fn quantize(&self) -> Grid {
        let n = self.n_nodes();
        let max_abs = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.weights[i][j].abs())
            .fold(0.0, f64::max);
        // a power of two keeps scaling exact, so ties survive
        let scale = if max_abs > 0.0 {
            2f64.powi(GRID_BITS - max_abs.log2().ceil() as i32)
        } else {
            1.0
        };
        let q = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 0 } else { (self.weights[i][j] * scale).round() as i64 })
                    .collect()
            })
            .collect();
        Grid { q }
    }
}

/// Weights on the integer grid.
struct Grid {
    q: Vec<Vec<i64>>,
}

impl Grid {
    /// Minimum-weight perfect matching on the induced subgraph over `nodes`
    /// (even count), as `mate` indices into `nodes`, plus its grid weight.
    fn solve_subset(&self, nodes: &[usize]) -> (Vec<usize>, i64) {
        let m = nodes.len();
        debug_assert!(m.is_multiple_of(2));
        if m == 0 {
            return (Vec::new(), 0);
        }
        let qmax = nodes
            .iter()
            .flat_map(|&a| nodes.iter().filter(move |&&b| b != a).map(move |&b| (a, b)))
            .map(|(a, b)| self.q[a][b])
            .max()
            .unwrap();
        let mut edges = Vec::with_capacity(m * (m - 1) / 2);
        for a in 0..m {
            for b in a + 1..m {
                edges.push(Edge {
                    u: a,
                    v: b,
                    weight: qmax - self.q[nodes[a]][nodes[b]],
                });
            }
        }
        let mate = max_weight_matching(m, &edges, true);
        let mate: Vec<usize> = mate
            .into_iter()
            .map(|x| x.expect("complete graph with an even node count has a perfect matching"))
            .collect();
        let total = (0..m)
            .filter(|&a| a < mate[a])
            .map(|a| self.q[nodes[a]][nodes[mate[a]]])
            .sum();
        (mate, total)
    }

    /// Optimal grid weight over `nodes`.
    fn optimum(&self, nodes: &[usize]) -> i64 {
        self.solve_subset(nodes).1
    }

    /// Lexicographically smallest optimal matching over `nodes` (ascending).
    fn canonical(&self, nodes: &[usize]) -> (Vec<(usize, usize)>, i64) {
        let (mut mate, total) = self.solve_subset(nodes);
        let mut remaining: Vec<usize> = nodes.to_vec();
        let mut target = total;
        let mut pairs = Vec::with_capacity(nodes.len() / 2);
        while !remaining.is_empty() {
            let u = remaining[0];
            let partner = remaining[mate[0]];
            let mut chosen = partner;
            for &v in remaining[1..].iter().take_while(|&&v| v < partner) {
                let rest: Vec<usize> = remaining.iter().copied().filter(|&x| x != u && x != v).collect();
                if self.q[u][v] + self.optimum(&rest) == target {
                    chosen = v;
                    break;
                }
            }
            pairs.push((u, chosen));
            target -= self.q[u][chosen];
            let rest: Vec<usize> = remaining.iter().copied().filter(|&x| x != u && x != chosen).collect();
            if chosen == partner {
                // the current optimum restricted to `rest` is still optimal
                let pos: Vec<usize> = remaining
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x != u && x != chosen)
                    .map(|(i, _)| i)
                    .collect();
                let mut index_of = vec![usize::MAX; remaining.len()];
                for (new, &old) in pos.iter().enumerate() {
                    index_of[old] = new;
                }
                mate = pos.iter().map(|&old| index_of[mate[old]]).collect();
            } else {
                mate = self.solve_subset(&rest).0;
            }
            remaining = rest;
        }
        (pairs, total)
    }
}

/// Exact minimum-weight perfect matching.
pub fn solve_perfect(problem: &MatchingProblem) -> Result<Matching> {
    let n = problem.n_nodes();
    if n % 2 == 1 {
        return Err(EcocError::invalid(format!("perfect matching needs an even node count, got {n}")));
    }
    let grid = problem.quantize();
    let nodes: Vec<usize> = (0..n).collect();
    let (pairs, _) = grid.canonical(&nodes);
    Ok(problem.matching_from_pairs(pairs))
}

/// Perfect matching for even `n`; for odd `n`, the best perfect matching
/// after leaving one node out, which is returned as the bye. Equal weights
/// prefer the smallest bye index.
pub fn solve_with_bye(problem: &MatchingProblem) -> Result<(Matching, Option<usize>)> {
    let n = problem.n_nodes();
    if n.is_multiple_of(2) {
        return Ok((solve_perfect(problem)?, None));
    }
    let grid = problem.quantize();
    let mut best: Option<(i64, usize)> = None;
    for bye in 0..n {
        let nodes: Vec<usize> = (0..n).filter(|&v| v != bye).collect();
        let value = grid.optimum(&nodes);
        if best.is_none_or(|(b, _)| value < b) {
            best = Some((value, bye));
        }
    }
    let (_, bye) = best.expect("odd n >= 3 has a bye candidate");
    let nodes: Vec<usize> = (0..n).filter(|&v| v != bye).collect();
    let (pairs, _) = grid.canonical(&nodes);
    Ok((problem.matching_from_pairs(pairs), Some(bye)))
}

/// Exhaustive search over all `(n-1)!!` perfect matchings. Test oracle.
pub fn brute_force(problem: &MatchingProblem) -> Result<Matching> {
    let n = problem.n_nodes();
    if n % 2 == 1 {
        return Err(EcocError::invalid(format!("perfect matching needs an even node count, got {n}")));
    }
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(EcocError::invalid(format!(
            "brute force limited to {BRUTE_FORCE_MAX_NODES} nodes, got {n}"
        )));
    }
    let mut best: Option<Matching> = None;
    let mut used = vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2);
    enumerate(problem, &mut used, &mut pairs, &mut |pairs| {
        let candidate = problem.matching_from_pairs(pairs.to_vec());
        if best.as_ref().is_none_or(|b| candidate.total_weight < b.total_weight) {
            best = Some(candidate);
        }
    });
    Ok(best.expect("at least one perfect matching"))
}

/// Number of perfect matchings `brute_force` visits.
pub fn count_perfect_matchings(n: usize) -> usize {
    if n % 2 == 1 {
        return 0;
    }
    (1..n).step_by(2).product()
}

fn enumerate(
    problem: &MatchingProblem,
    used: &mut [bool],
    pairs: &mut Vec<(usize, usize)>,
    visit: &mut dyn FnMut(&[(usize, usize)]),
) {
    let Some(u) = used.iter().position(|&x| !x) else {
        visit(pairs);
        return;
    };
    used[u] = true;
    for v in u + 1..used.len() {
        if used[v] {
            continue;
        }
        used[v] = true;
        pairs.push((u, v));
        enumerate(problem, used, pairs, visit);
        pairs.pop();
        used[v] = false;
    }
    used[u] = false;
}

/// Parses the debug graph format: `n` on the first line, then one `i j w`
/// line per edge of the complete graph. `#` starts a comment.
pub fn parse_graph(text: &str) -> Result<MatchingProblem> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first, header) = lines.next().ok_or(EcocError::Empty)?;
    let n: usize = header
        .parse()
        .map_err(|_| EcocError::parse(first, 1, format!("expected node count, got {header:?}")))?;
    let mut w: Vec<Vec<Option<f64>>> = vec![vec![None; n]; n];
    for (lineno, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(EcocError::parse(lineno, 1, "expected `i j weight`"));
        }
        let i: usize = toks[0].parse().map_err(|_| EcocError::parse(lineno, 1, "bad node index"))?;
        let j: usize = toks[1].parse().map_err(|_| EcocError::parse(lineno, 2, "bad node index"))?;
        let v: f64 = toks[2].parse().map_err(|_| EcocError::parse(lineno, 3, "bad weight"))?;
        if i >= n || j >= n || i == j {
            return Err(EcocError::parse(lineno, 1, format!("invalid edge ({i}, {j}) for {n} nodes")));
        }
        for (a, b) in [(i, j), (j, i)] {
            if let Some(old) = w[a][b] {
                if old != v {
                    return Err(EcocError::parse(lineno, 3, format!("conflicting weights for edge ({i}, {j})")));
                }
            }
            w[a][b] = Some(v);
        }
    }
    let mut weights = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                weights[i][j] = w[i][j].ok_or_else(|| EcocError::invalid(format!("missing edge ({i}, {j})")))?;
            }
        }
    }
    MatchingProblem::new(weights)
}

/// Inverse of [`parse_graph`].
pub fn format_graph(problem: &MatchingProblem) -> String {
    let n = problem.n_nodes();
    let mut out = format!("{n}\n");
    for i in 0..n {
        for j in i + 1..n {
            writeln!(out, "{i} {j} {}", problem.weight(i, j)).unwrap();
        }
    }
    out
}
