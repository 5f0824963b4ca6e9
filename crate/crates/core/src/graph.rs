//! Undirected multigraphs with a normalized random-walk operator view.
//!
//! Adjacency is stored as sorted neighbor arrays, so parallel edges are
//! repeated entries and matvecs stream contiguously. A self-loop is stored
//! once in its endpoint's list: it contributes 1 to the degree and 1 to the
//! diagonal of the adjacency matrix.

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElement};

/// Undirected multigraph on vertices `0..n`.
#[derive(Debug, Clone)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    labels: Option<Vec<String>>,
}

/// Counterexample returned when a graph is not regular.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegularityFailure {
    pub vertex: u32,
    pub degree: usize,
    pub expected: usize,
}

impl Graph {
    /// Build from adjacency lists, sorting them and checking symmetry:
    /// `multiplicity(u -> v) == multiplicity(v -> u)` for all `u != v`.
    pub fn from_adjacency(mut adj: Vec<Vec<u32>>) -> Result<Self> {
        let n = adj.len();
        for list in &mut adj {
            for &v in list.iter() {
                if v as usize >= n {
                    return Err(Error::Structural(format!(
                        "neighbor index {v} out of range for {n} vertices"
                    )));
                }
            }
            list.sort_unstable();
        }
        let g = Graph { adj, labels: None };
        g.check_symmetry()?;
        Ok(g)
    }

    /// Build from an edge list; each undirected edge once, self-loops as `(u,u)`.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Structural(format!(
                    "edge ({u},{v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                adj[u as usize].push(v);
            } else {
                adj[u as usize].push(v);
                adj[v as usize].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { adj, labels: None })
    }

    fn check_symmetry(&self) -> Result<()> {
        for u in 0..self.adj.len() {
            let list = &self.adj[u];
            let mut i = 0;
            while i < list.len() {
                let v = list[i];
                let mut j = i;
                while j < list.len() && list[j] == v {
                    j += 1;
                }
                let mult = j - i;
                if v as usize > u {
                    let back = self.multiplicity(v, u as u32);
                    if back != mult {
                        return Err(Error::Structural(format!(
                            "asymmetric multiplicity between {u} and {v}: {mult} vs {back}"
                        )));
                    }
                }
                i = j;
            }
        }
        Ok(())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        debug_assert_eq!(labels.len(), self.adj.len());
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn degree(&self, u: u32) -> usize {
        self.adj[u as usize].len()
    }

    pub fn neighbors(&self, u: u32) -> &[u32] {
        &self.adj[u as usize]
    }

    /// Multiplicity of the pair `(u, v)` in `u`'s neighbor list.
    pub fn multiplicity(&self, u: u32, v: u32) -> usize {
        let list = &self.adj[u as usize];
        let lo = list.partition_point(|&x| x < v);
        let hi = list.partition_point(|&x| x <= v);
        hi - lo
    }

    /// Number of edge records (parallel edges counted, self-loops once each).
    pub fn edge_count(&self) -> usize {
        let mut loops = 0usize;
        let mut half = 0usize;
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if v as usize == u {
                    loops += 1;
                } else {
                    half += 1;
                }
            }
        }
        half / 2 + loops
    }

    /// True iff a breadth-first search from vertex 0 reaches every vertex.
    pub fn is_connected(&self) -> Result<bool> {
        let n = self.vertex_count();
        if n == 0 {
            return Err(Error::Config("connectivity of the empty graph".into()));
        }
        Ok(self.reachable_from_zero() == n)
    }

    pub(crate) fn reachable_from_zero(&self) -> usize {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        seen[0] = true;
        queue.push_back(0u32);
        let mut count = 1usize;
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count
    }

    /// Common degree if the graph is regular, else a counterexample vertex.
    pub fn check_regular(&self) -> std::result::Result<usize, RegularityFailure> {
        let expected = self.degree(0);
        for u in 0..self.vertex_count() {
            let d = self.degree(u as u32);
            if d != expected {
                return Err(RegularityFailure {
                    vertex: u as u32,
                    degree: d,
                    expected,
                });
            }
        }
        Ok(expected)
    }

    /// Dense adjacency with multiplicities, row-major `n x n`.
    pub fn multiplicity_matrix(&self) -> Vec<i64> {
        let n = self.vertex_count();
        let mut m = vec![0i64; n * n];
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                m[u * n + v as usize] += 1;
            }
        }
        m
    }

    /// Apply the row-stochastic walk operator `D^{-1} A` to `x`.
    pub fn walk_apply(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.vertex_count());
        for (u, list) in self.adj.iter().enumerate() {
            let mut acc = 0.0;
            for &v in list {
                acc += x[v as usize];
            }
            out[u] = if list.is_empty() { 0.0 } else { acc / list.len() as f64 };
        }
    }

    /// Evolve a probability distribution one step: `p' = A^T D^{-1} p`,
    /// i.e. mass at `u` splits evenly over `u`'s incident edge ends.
    pub fn distribution_step(&self, p: &[f64], out: &mut [f64]) {
        debug_assert_eq!(p.len(), self.vertex_count());
        out.fill(0.0);
        for (u, list) in self.adj.iter().enumerate() {
            if list.is_empty() {
                continue;
            }
            let share = p[u] / list.len() as f64;
            for &v in list {
                out[v as usize] += share;
            }
        }
    }

    /// Serialize as edge-list text: first line `n m`, then one `u v` line per
    /// edge with `u <= v`, in lexicographic order; parallel edges repeated.
    pub fn to_edge_list(&self) -> String {
        self.to_edge_list_with_header(None)
    }

    pub fn to_edge_list_with_header(&self, header: Option<&str>) -> String {
        let mut lines: Vec<(u32, u32)> = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if v as usize >= u {
                    lines.push((u as u32, v));
                }
            }
        }
        lines.sort_unstable();
        let mut s = String::new();
        if let Some(h) = header {
            s.push_str("# ");
            s.push_str(h);
            s.push('\n');
        }
        s.push_str(&format!("{} {}\n", self.vertex_count(), lines.len()));
        for (u, v) in lines {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// Parse the edge-list text format. Lines starting with `#` are skipped.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
        let head = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge-list file".into()))?;
        let mut it = head.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad vertex count".into()))?;
        let m: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad edge count".into()))?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let mut it = line.split_whitespace();
            let u: u32 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line: {line:?}")))?;
            let v: u32 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line: {line:?}")))?;
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "edge count mismatch: header says {m}, found {}",
                edges.len()
            )));
        }
        Self::from_edges(n, &edges)
    }
}

/// `Cay(G, gens)`: one edge `{g, s g}` per group element and generator.
/// The generator multiset must be closed under inverse.
pub fn cayley_graph(group: &FiniteGroup, gens: &[GroupElement]) -> Result<Graph> {
    for &s in gens {
        if !group.contains(s) {
            return Err(Error::InvalidElement {
                index: s.0,
                order: group.order(),
            });
        }
    }
    // inverse closure as a multiset
    let mut counts = std::collections::HashMap::new();
    for &s in gens {
        *counts.entry(s).or_insert(0usize) += 1;
    }
    for (&s, &c) in &counts {
        let si = group.inv_unchecked(s);
        if counts.get(&si).copied().unwrap_or(0) != c {
            return Err(Error::Structural(format!(
                "generator multiset not inverse-closed: element {} appears {} times, its inverse {} appears {} times",
                s.0,
                c,
                si.0,
                counts.get(&si).copied().unwrap_or(0)
            )));
        }
    }
    let n = group.order();
    let mut adj = vec![Vec::with_capacity(gens.len()); n];
    for g in group.elements() {
        for &s in gens {
            adj[g.0].push(group.mul_unchecked(s, g).0 as u32);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    Ok(Graph { adj, labels: None })
}

/// Johnson graph `J(n, k)`: vertices are the k-subsets of an n-set in
/// lexicographic order, adjacent iff they intersect in `k - 1` elements.
pub fn johnson_graph(n: usize, k: usize) -> Result<Graph> {
    if k == 0 || k >= n {
        return Err(Error::Config(format!("johnson graph needs 0 < k < n, got n={n} k={k}")));
    }
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    let mut cur = (0..k).collect::<Vec<_>>();
    loop {
        subsets.push(cur.clone());
        // next k-subset in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if cur[i] != i + n - k {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                i = usize::MAX;
                break;
            }
        }
        if i != usize::MAX {
            break;
        }
    }
    let count = subsets.len();
    let mut edges = Vec::new();
    for a in 0..count {
        for b in a + 1..count {
            let inter = subsets[a]
                .iter()
                .filter(|x| subsets[b].contains(x))
                .count();
            if inter == k - 1 {
                edges.push((a as u32, b as u32));
            }
        }
    }
    let labels = subsets
        .iter()
        .map(|s| {
            s.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    Ok(Graph::from_edges(count, &edges)?.with_labels(labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::product_group;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i as u32, ((i + 1) % n) as u32)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn cayley_z5_is_cycle() {
        let z5 = FiniteGroup::cyclic(5).unwrap();
        let g = cayley_graph(&z5, &[GroupElement(1), GroupElement(4)]).unwrap();
        assert_eq!(g.check_regular().unwrap(), 2);
        assert!(g.is_connected().unwrap());
        let c5 = cycle(5);
        for u in 0..5u32 {
            assert_eq!(g.neighbors(u), c5.neighbors(u));
        }
    }

    #[test]
    fn cayley_f2_squared_is_four_cycle() {
        let g4 = FiniteGroup::boolean_vector_space(2).unwrap();
        let g = cayley_graph(&g4, &[GroupElement(0b01), GroupElement(0b10)]).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.check_regular().unwrap(), 2);
        assert!(g.is_connected().unwrap());
        // 4-cycle: no vertex adjacent to its antipode
        assert_eq!(g.multiplicity(0, 3), 0);
    }

    #[test]
    fn cayley_doubled_generator_keeps_multiplicity() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let g = cayley_graph(&z4, &[GroupElement(2), GroupElement(2)]).unwrap();
        assert_eq!(g.check_regular().unwrap(), 2);
        for u in 0..4u32 {
            assert_eq!(g.multiplicity(u, (u + 2) % 4), 2);
        }
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn cayley_rejects_non_inverse_closed() {
        let z5 = FiniteGroup::cyclic(5).unwrap();
        let err = cayley_graph(&z5, &[GroupElement(1)]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("element 1"), "{msg}");
    }

    #[test]
    fn johnson_basics() {
        let j52 = johnson_graph(5, 2).unwrap();
        assert_eq!(j52.vertex_count(), 10);
        assert_eq!(j52.check_regular().unwrap(), 6);
        let j42 = johnson_graph(4, 2).unwrap();
        assert_eq!(j42.vertex_count(), 6);
        assert_eq!(j42.check_regular().unwrap(), 4);
        // octahedron: every vertex has exactly one non-neighbor
        for u in 0..6u32 {
            let non = (0..6u32)
                .filter(|&v| v != u && j42.multiplicity(u, v) == 0)
                .count();
            assert_eq!(non, 1);
        }
        let j32 = johnson_graph(3, 2).unwrap();
        assert_eq!(j32.vertex_count(), 3);
        assert_eq!(j32.check_regular().unwrap(), 2);
        assert!(johnson_graph(3, 0).is_err());
        assert!(johnson_graph(3, 3).is_err());
        for n in 4..=12 {
            let j = johnson_graph(n, 2).unwrap();
            assert_eq!(j.check_regular().unwrap(), 2 * (n - 2));
        }
    }

    #[test]
    fn connectivity() {
        assert!(cycle(5).is_connected().unwrap());
        // two disjoint triangles
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(!g.is_connected().unwrap());
    }

    #[test]
    fn regularity_failure_names_vertex() {
        // star K_{1,3}
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let fail = g.check_regular().unwrap_err();
        assert_eq!(fail.degree, 1);
        assert_eq!(fail.expected, 3);
    }

    #[test]
    fn cayley_is_regular_for_random_groups() {
        let g = product_group(vec![
            FiniteGroup::cyclic(3).unwrap(),
            FiniteGroup::cyclic(5).unwrap(),
        ])
        .unwrap();
        let gens = vec![
            g.from_components(&[1, 0]).unwrap(),
            g.from_components(&[2, 0]).unwrap(),
            g.from_components(&[0, 2]).unwrap(),
            g.from_components(&[0, 3]).unwrap(),
        ];
        let cay = cayley_graph(&g, &gens).unwrap();
        assert_eq!(cay.check_regular().unwrap(), 4);
    }

    #[test]
    fn edge_list_round_trip_with_loops_and_parallels() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 1), (2, 2), (1, 3), (0, 3)]).unwrap();
        let text = g.to_edge_list();
        assert!(text.starts_with("4 5\n"));
        let back = Graph::from_edge_list(&text).unwrap();
        for u in 0..4u32 {
            assert_eq!(g.neighbors(u), back.neighbors(u));
        }
        // self-loop contributes 1 to degree
        assert_eq!(g.degree(2), 1);
        // header comments are skipped on parse
        let with_header = g.to_edge_list_with_header(Some("layout g-major |T|=3"));
        let back2 = Graph::from_edge_list(&with_header).unwrap();
        assert_eq!(back2.vertex_count(), 4);
    }

    #[test]
    fn malformed_edge_list_rejected() {
        assert!(Graph::from_edge_list("").is_err());
        assert!(Graph::from_edge_list("2 1\n0\n").is_err());
        assert!(Graph::from_edge_list("2 2\n0 1\n").is_err());
        assert!(Graph::from_edge_list("2 1\n0 5\n").is_err());
    }

    #[test]
    fn symmetry_validation() {
        assert!(Graph::from_adjacency(vec![vec![1], vec![0]]).is_ok());
        assert!(Graph::from_adjacency(vec![vec![1, 1], vec![0]]).is_err());
    }
}
