//! Constructors for the standard families used throughout the crate.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, GraphBuilder};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn simple(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> ColoredGraph {
    let mut b = GraphBuilder::new(n);
    for (u, v) in edges {
        b.edge(u, v);
    }
    b.build().expect("generator produced an invalid graph")
}

/// Seeded generator used by every randomized routine in the crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `K_n`.
pub fn complete(n: usize) -> ColoredGraph {
    simple(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// `K_{s,t}` with parts `0..s` and `s..s+t`.
pub fn complete_bipartite(s: usize, t: usize) -> ColoredGraph {
    simple(s + t, (0..s).flat_map(|u| (s..s + t).map(move |v| (u, v))))
}

/// `C_n`, `n >= 3`.
pub fn cycle(n: usize) -> Result<ColoredGraph> {
    if n < 3 {
        return Err(invalid(format!("cycle needs n >= 3, got {n}")));
    }
    Ok(simple(n, (0..n).map(|v| (v, (v + 1) % n))))
}

/// Path on `n >= 1` vertices.
pub fn path(n: usize) -> Result<ColoredGraph> {
    if n == 0 {
        return Err(invalid("path needs n >= 1"));
    }
    Ok(simple(n, (1..n).map(|v| (v - 1, v))))
}

/// `sK_{1,t}`: centers `0..s`, the leaves of center `i` are
/// `s + i*t .. s + (i+1)*t`.
pub fn star_forest(s: usize, t: usize) -> Result<ColoredGraph> {
    if s == 0 || t == 0 {
        return Err(invalid("star forest needs s, t >= 1"));
    }
    Ok(simple(
        s + s * t,
        (0..s).flat_map(|c| (0..t).map(move |j| (c, s + c * t + j))),
    ))
}

/// `mK_2`: edges `{2i, 2i+1}`.
pub fn matching(m: usize) -> ColoredGraph {
    simple(2 * m, (0..m).map(|i| (2 * i, 2 * i + 1)))
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn subset_graph(n: usize, k: usize, adjacent: impl Fn(usize) -> bool) -> ColoredGraph {
    let sets = subsets(n, k);
    let mut edges = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let common = sets[i].iter().filter(|x| sets[j].contains(x)).count();
            if adjacent(common) {
                edges.push((i, j));
            }
        }
    }
    simple(sets.len(), edges)
}

/// Johnson graph `J(n,k)`: `k`-subsets of `[n]`, adjacent when they share
/// `k - 1` elements.
pub fn johnson(n: usize, k: usize) -> Result<ColoredGraph> {
    if k == 0 || k > n {
        return Err(invalid(format!(
            "johnson needs 1 <= k <= n, got n={n} k={k}"
        )));
    }
    Ok(subset_graph(n, k, |common| common + 1 == k))
}

/// Kneser graph `K(n,k)`: `k`-subsets of `[n]`, adjacent when disjoint.
pub fn kneser(n: usize, k: usize) -> Result<ColoredGraph> {
    if k == 0 || k > n {
        return Err(invalid(format!(
            "kneser needs 1 <= k <= n, got n={n} k={k}"
        )));
    }
    Ok(subset_graph(n, k, |common| common == 0))
}

/// The Petersen graph as the Kneser graph `K(5,2)`.
pub fn petersen() -> ColoredGraph {
    kneser(5, 2).unwrap()
}

/// `G(n, p)` from a seeded generator.
pub fn random_gnp(n: usize, p: f64, seed: u64) -> ColoredGraph {
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    simple(n, edges)
}

/// Uniformly random simple graph with exactly `m` edges.
pub fn random_gnm(n: usize, m: usize, seed: u64) -> Result<ColoredGraph> {
    let max = n * n.saturating_sub(1) / 2;
    if m > max {
        return Err(invalid(format!("{m} edges do not fit on {n} vertices")));
    }
    let mut rng = rng(seed);
    let mut keys: Vec<u64> = Vec::with_capacity(m);
    if 2 * m > max {
        let mut all: Vec<u64> = (0..n as u64)
            .flat_map(|u| (u + 1..n as u64).map(move |v| u * n as u64 + v))
            .collect();
        all.shuffle(&mut rng);
        all.truncate(m);
        keys = all;
    } else {
        while keys.len() < m {
            while keys.len() < m + m / 8 + 16 {
                let u = rng.gen_range(0..n as u64);
                let v = rng.gen_range(0..n as u64);
                if u != v {
                    keys.push(u.min(v) * n as u64 + u.max(v));
                }
            }
            keys.sort_unstable();
            keys.dedup();
            if keys.len() > m {
                keys.shuffle(&mut rng);
                keys.truncate(m);
            }
        }
    }
    let n64 = n as u64;
    Ok(simple(
        n,
        keys.into_iter()
            .map(|k| ((k / n64) as usize, (k % n64) as usize)),
    ))
}

/// Uniformly random labeled tree (random Prüfer sequence).
pub fn random_tree(n: usize, seed: u64) -> Result<ColoredGraph> {
    if n == 0 {
        return Err(invalid("tree needs n >= 1"));
    }
    if n <= 2 {
        return path(n);
    }
    let mut rng = rng(seed);
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    Ok(simple(n, prufer_edges(n, &code)))
}

/// Edges of the labeled tree with Prüfer code `code` on `code.len() + 2` vertices.
pub fn prufer_edges(n: usize, code: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &c in code {
        degree[c] += 1;
    }
    let mut leaves: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&v| degree[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in code {
        let std::cmp::Reverse(leaf) = leaves.pop().unwrap();
        edges.push((leaf, c));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.push(std::cmp::Reverse(c));
        }
    }
    let std::cmp::Reverse(a) = leaves.pop().unwrap();
    let std::cmp::Reverse(b) = leaves.pop().unwrap();
    edges.push((a, b));
    edges
}

/// Uniform random permutation of `0..n`.
pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut rng(seed));
    p
}

/// Named constructor used by the command line.
///
/// Names: `complete n`, `empty n`, `bipartite s t`, `cycle n`, `path n`,
/// `stars s t`, `matching m`, `petersen`, `johnson n k`, `kneser n k`,
/// `gnp n seed` (p = 1/2), `gnm n m seed`, `tree n seed`.
pub fn standard(name: &str, params: &[usize]) -> Result<ColoredGraph> {
    let want = |k: usize| -> Result<()> {
        if params.len() == k {
            Ok(())
        } else {
            Err(invalid(format!(
                "{name} takes {k} parameters, got {}",
                params.len()
            )))
        }
    };
    match name {
        "complete" => want(1).map(|_| complete(params[0])),
        "empty" => want(1).map(|_| ColoredGraph::empty(params[0])),
        "bipartite" => want(2).map(|_| complete_bipartite(params[0], params[1])),
        "cycle" => want(1).and_then(|_| cycle(params[0])),
        "path" => want(1).and_then(|_| path(params[0])),
        "stars" => want(2).and_then(|_| star_forest(params[0], params[1])),
        "matching" => want(1).map(|_| matching(params[0])),
        "petersen" => want(0).map(|_| petersen()),
        "johnson" => want(2).and_then(|_| johnson(params[0], params[1])),
        "kneser" => want(2).and_then(|_| kneser(params[0], params[1])),
        "gnp" => want(2).map(|_| random_gnp(params[0], 0.5, params[1] as u64)),
        "gnm" => want(3).and_then(|_| random_gnm(params[0], params[1], params[2] as u64)),
        "tree" => want(2).and_then(|_| random_tree(params[0], params[1] as u64)),
        _ => Err(invalid(format!("unknown graph family {name:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn petersen_shape() {
        let p = petersen();
        assert_eq!(p.n(), 10);
        assert_eq!(p.num_edges(), 15);
        assert!((0..10).all(|v| p.degree(v) == 3));
    }

    #[test]
    fn johnson_5_2_is_petersen_complement_shape() {
        let j = johnson(5, 2).unwrap();
        assert_eq!(j.n(), 10);
        assert!((0..10).all(|v| j.degree(v) == 6));
        // same vertex order as K(5,2): adjacency is exactly the complement
        assert_eq!(petersen().complement().unwrap(), j);
    }

    #[test]
    fn small_families() {
        assert_eq!(cycle(3).unwrap(), complete(3));
        assert!(cycle(2).is_err());
        assert!(path(0).is_err());
        assert_eq!(star_forest(1, 1).unwrap(), complete(2));
        assert_eq!(johnson(4, 1).unwrap(), complete(4));
        assert_eq!(complete_bipartite(2, 3).num_edges(), 6);
    }

    #[test]
    fn gnm_has_exact_edge_count_and_is_deterministic() {
        let g = random_gnm(200, 1000, 5).unwrap();
        assert_eq!(g.num_edges(), 1000);
        assert_eq!(g, random_gnm(200, 1000, 5).unwrap());
        assert_eq!(random_gnm(6, 15, 1).unwrap(), complete(6));
        assert!(random_gnm(4, 7, 0).is_err());
    }

    #[test]
    fn trees_have_n_minus_1_edges() {
        for n in 1..15 {
            let t = random_tree(n, n as u64).unwrap();
            assert_eq!(t.num_edges(), n - 1);
        }
    }

    #[test]
    fn standard_dispatch() {
        assert_eq!(standard("petersen", &[]).unwrap(), petersen());
        assert!(standard("cycle", &[]).is_err());
        assert!(standard("nope", &[1]).is_err());
    }
}
