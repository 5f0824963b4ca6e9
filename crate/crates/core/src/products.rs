//! The replacement graph of `Cay(G, T)` and the local graph, its red and
//! blue operators, the walk operator `T = (P_R + P_R P_B) / 2`, and the
//! zig-zag operator `P_R P_B P_R`.
//!
//! Vertices are `(g, tau)` pairs indexed g-major: `index = g * |T| + tau`.
//! `P_B` is stored as a permutation array and `P_R` reuses the local-graph
//! adjacency across blocks, so applying `T` is matrix-free.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectra::{
    self, main_bound, operator_norm_on_complement, second_eigenvalue, LinearOperator,
    SpectrumResult,
};
use crate::triplet::TripletStructure;

/// Replacement product of the structure's Cayley graph with its local graph.
#[derive(Debug, Clone)]
pub struct RepGraph {
    group_order: usize,
    type_count: usize,
    /// local-graph adjacency by type index; every list has length `2 d_tilde`
    local_adj: Vec<Vec<u32>>,
    /// fixed-point-free involution pairing `(g, tau)` with `(tau.g, tau^{-1})`
    blue: Vec<u32>,
    two_d_tilde: usize,
}

impl RepGraph {
    pub fn vertex_count(&self) -> usize {
        self.group_order * self.type_count
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }

    pub fn type_count(&self) -> usize {
        self.type_count
    }

    pub fn red_degree(&self) -> usize {
        self.two_d_tilde
    }

    #[inline]
    pub fn index(&self, g: usize, tau: usize) -> usize {
        g * self.type_count + tau
    }

    #[inline]
    pub fn unindex(&self, v: usize) -> (usize, usize) {
        (v / self.type_count, v % self.type_count)
    }

    pub fn blue_permutation(&self) -> &[u32] {
        &self.blue
    }

    /// Swap two blue targets, breaking the matching. Test hook for the
    /// lift verifier's failure path.
    pub fn corrupt_blue(&mut self) {
        assert!(self.blue.len() >= 2);
        self.blue.swap(0, 1);
    }

    /// `out = P_R x`: within each g-block, average over local-graph neighbors.
    pub fn apply_red(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.vertex_count());
        let k = self.type_count;
        let norm = 1.0 / self.two_d_tilde as f64;
        for g in 0..self.group_order {
            let base = g * k;
            for tau in 0..k {
                let mut acc = 0.0;
                for &t2 in &self.local_adj[tau] {
                    acc += x[base + t2 as usize];
                }
                out[base + tau] = acc * norm;
            }
        }
    }

    /// `out = P_B x`: permutation by the blue matching.
    pub fn apply_blue(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.vertex_count());
        for (v, &w) in self.blue.iter().enumerate() {
            out[v] = x[w as usize];
        }
    }

    /// `out = T x` with `T = (P_R + P_R P_B) / 2`.
    pub fn apply_t(&self, x: &[f64], out: &mut [f64]) {
        let n = self.vertex_count();
        let mut z = vec![0.0; n];
        for (v, &w) in self.blue.iter().enumerate() {
            z[v] = 0.5 * (x[v] + x[w as usize]);
        }
        self.apply_red(&z, out);
    }

    /// `out = T^t x` with `T^t = (P_R + P_B P_R) / 2`.
    pub fn apply_t_transpose(&self, x: &[f64], out: &mut [f64]) {
        let n = self.vertex_count();
        let mut y = vec![0.0; n];
        self.apply_red(x, &mut y);
        for (v, &w) in self.blue.iter().enumerate() {
            out[v] = 0.5 * (y[v] + y[w as usize]);
        }
    }

    /// The uniform distribution on the replacement vertices.
    pub fn uniform(&self) -> Vec<f64> {
        vec![1.0 / self.vertex_count() as f64; self.vertex_count()]
    }

    /// Materialize the replacement graph itself: one local-graph copy per
    /// g-block (red) plus the blue perfect matching.
    pub fn to_graph(&self) -> Graph {
        let k = self.type_count;
        let mut edges = Vec::new();
        for g in 0..self.group_order {
            let base = (g * k) as u32;
            for tau in 0..k {
                for &t2 in &self.local_adj[tau] {
                    if (tau as u32) < t2 {
                        edges.push((base + tau as u32, base + t2));
                    }
                }
            }
        }
        for (v, &w) in self.blue.iter().enumerate() {
            if (v as u32) < w {
                edges.push((v as u32, w));
            }
        }
        Graph::from_edges(self.vertex_count(), &edges).expect("replacement edges are in range")
    }

    fn layout_header(&self) -> String {
        format!("layout g-major |T|={}", self.type_count)
    }

    /// Edge-list text of the replacement graph, with the layout header.
    pub fn edge_list(&self) -> String {
        self.to_graph()
            .to_edge_list_with_header(Some(&self.layout_header()))
    }

    /// Edge-list text of the zig-zag multigraph, with the layout header.
    pub fn zigzag_edge_list(&self) -> String {
        zigzag_operator(self).to_edge_list_with_header(Some(&self.layout_header()))
    }
}

/// Build the replacement graph. Conditions 0, A and E must hold for the
/// structure, which [`TripletStructure`] already guarantees; the blue
/// involution is re-verified here and violations are structural errors.
pub fn build_rep(h: &TripletStructure) -> Result<RepGraph> {
    let group = h.group();
    let k = h.type_set().len();
    let n = group.order() * k;
    let mut blue = vec![0u32; n];
    for g in group.elements() {
        for tau in 0..k {
            let moved = group.mul_unchecked(h.type_product(tau), g);
            let target = moved.0 * k + h.inverse_type(tau);
            blue[g.0 * k + tau] = target as u32;
        }
    }
    for v in 0..n {
        let w = blue[v] as usize;
        if w == v {
            return Err(Error::Structural(format!(
                "blue matching has a fixed point at vertex {v}"
            )));
        }
        if blue[w] as usize != v {
            return Err(Error::Structural(format!(
                "blue matching is not an involution at vertex {v}"
            )));
        }
    }
    let local_adj: Vec<Vec<u32>> = (0..k)
        .map(|t| h.local_graph().neighbors(t as u32).to_vec())
        .collect();
    Ok(RepGraph {
        group_order: group.order(),
        type_count: k,
        local_adj,
        blue,
        two_d_tilde: 2 * h.d_tilde(),
    })
}

/// Materialize the zig-zag multigraph: one edge per red-blue-red path, so
/// the normalized adjacency equals `P_R P_B P_R` and the graph is
/// `(2 d_tilde)^2`-regular counting multiplicity.
pub fn zigzag_operator(rep: &RepGraph) -> Graph {
    let n = rep.vertex_count();
    let k = rep.type_count;
    let mut adj: Vec<Vec<u32>> = vec![Vec::with_capacity(rep.two_d_tilde * rep.two_d_tilde); n];
    for g in 0..rep.group_order {
        let base = g * k;
        for tau in 0..k {
            let v = base + tau;
            for &t2 in &rep.local_adj[tau] {
                let u = base + t2 as usize;
                let w = rep.blue[u] as usize;
                let (g2, tau2) = rep.unindex(w);
                let base2 = g2 * k;
                for &t3 in &rep.local_adj[tau2] {
                    adj[v].push((base2 + t3 as usize) as u32);
                }
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    Graph::from_adjacency(adj).expect("zig-zag path counts are symmetric")
}

/// `T^2` as an abstract operator, for norm computations.
pub struct TSquared<'a> {
    rep: &'a RepGraph,
}

impl<'a> TSquared<'a> {
    pub fn new(rep: &'a RepGraph) -> Self {
        TSquared { rep }
    }
}

impl LinearOperator for TSquared<'_> {
    fn dim(&self) -> usize {
        self.rep.vertex_count()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let mut mid = vec![0.0; x.len()];
        self.rep.apply_t(x, &mut mid);
        self.rep.apply_t(&mid, out);
    }

    fn apply_transpose_into(&self, x: &[f64], out: &mut [f64]) {
        let mut mid = vec![0.0; x.len()];
        self.rep.apply_t_transpose(x, &mut mid);
        self.rep.apply_t_transpose(&mid, out);
    }
}

/// `lambda(P_R P_B P_R)`: dense on the materialized multigraph up to the
/// dense cutoff, matrix-free power iteration above it.
pub fn zigzag_lambda(rep: &RepGraph, tol: f64) -> Result<SpectrumResult> {
    if rep.vertex_count() <= spectra::DENSE_CUTOFF {
        second_eigenvalue(&zigzag_operator(rep), tol)
    } else {
        zigzag_lambda_matrix_free(rep, tol)
    }
}

struct ZigzagOp<'a> {
    rep: &'a RepGraph,
}

impl LinearOperator for ZigzagOp<'_> {
    fn dim(&self) -> usize {
        self.rep.vertex_count()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let mut a = vec![0.0; x.len()];
        let mut b = vec![0.0; x.len()];
        self.rep.apply_red(x, &mut a);
        self.rep.apply_blue(&a, &mut b);
        self.rep.apply_red(&b, out);
    }
    fn apply_transpose_into(&self, x: &[f64], out: &mut [f64]) {
        // P_R P_B P_R is symmetric
        self.apply_into(x, out);
    }
}

fn zigzag_lambda_matrix_free(rep: &RepGraph, tol: f64) -> Result<SpectrumResult> {
    let op = ZigzagOp { rep };
    let uniform = rep.uniform();
    let lambda = operator_norm_on_complement(&op, &uniform, tol)?;
    Ok(SpectrumResult {
        lambda,
        method: spectra::SpectrumMethod::PowerDeflate,
        residual: tol,
        all_eigenvalues: None,
    })
}

/// Both sides of the squared-walk-operator bound
/// `||T^2||_+ <= 1/2 + lambda(P_R P_B P_R) / 2`.
#[derive(Debug, Clone, Serialize)]
pub struct TNormBound {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

pub fn verify_t_norm_bound(rep: &RepGraph, tol: f64) -> Result<TNormBound> {
    let zz = zigzag_lambda(rep, tol)?;
    verify_t_norm_bound_against(rep, zz.lambda, tol)
}

/// As [`verify_t_norm_bound`], reusing an already-computed zig-zag lambda.
pub fn verify_t_norm_bound_against(
    rep: &RepGraph,
    lambda_zz: f64,
    tol: f64,
) -> Result<TNormBound> {
    let lhs = operator_norm_on_complement(&TSquared::new(rep), &rep.uniform(), tol)?;
    let rhs = 0.5 + 0.5 * lambda_zz;
    Ok(TNormBound {
        lhs,
        rhs,
        pass: lhs <= rhs + 1e-8,
    })
}

/// Walk-graph bound derived from the zig-zag spectrum:
/// `sqrt(1/2 + lambda_zz / 2)`.
pub fn zigzag_main_bound(lambda_zz: f64) -> Result<f64> {
    main_bound(lambda_zz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::triplet::{build_structure, TripleSet};

    fn choose3(s: &[usize]) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                for k in j + 1..s.len() {
                    out.push([s[i], s[j], s[k]]);
                }
            }
        }
        out
    }

    fn conlon_fixture() -> TripletStructure {
        let g = FiniteGroup::boolean_vector_space(4).unwrap();
        let s = TripleSet::new(&g, choose3(&[1, 2, 4, 8, 15])).unwrap();
        build_structure(g, s).unwrap()
    }

    fn single_triple_fixture() -> TripletStructure {
        let g = FiniteGroup::boolean_vector_space(3).unwrap();
        let s = TripleSet::new(&g, vec![[1, 2, 4]]).unwrap();
        build_structure(g, s).unwrap()
    }

    #[test]
    fn rep_counts_and_blue_matching() {
        let h = conlon_fixture();
        let rep = build_rep(&h).unwrap();
        assert_eq!(rep.vertex_count(), 160);
        // blue pairs (g, tau) with (t1 + t2 + g, tau) in characteristic 2
        for g in 0..16 {
            for tau in 0..10 {
                let v = rep.index(g, tau);
                let w = rep.blue_permutation()[v] as usize;
                let (g2, tau2) = rep.unindex(w);
                assert_eq!(tau2, tau, "types are self-inverse over F2^t");
                assert_eq!(g2, h.type_product(tau).0 ^ g);
            }
        }

        let small = single_triple_fixture();
        let rep = build_rep(&small).unwrap();
        assert_eq!(rep.vertex_count(), 24);
        // a perfect matching of 12 pairs
        let mut pairs = std::collections::BTreeSet::new();
        for v in 0..24 {
            let w = rep.blue_permutation()[v] as usize;
            assert_ne!(v, w);
            assert_eq!(rep.blue_permutation()[w] as usize, v);
            pairs.insert((v.min(w), v.max(w)));
        }
        assert_eq!(pairs.len(), 12);
    }

    #[test]
    fn blue_is_involution_exhaustively() {
        for h in [conlon_fixture(), single_triple_fixture()] {
            let rep = build_rep(&h).unwrap();
            for v in 0..rep.vertex_count() {
                let w = rep.blue_permutation()[v] as usize;
                assert_eq!(rep.blue_permutation()[w] as usize, v);
                assert_ne!(w, v);
            }
        }
    }

    #[test]
    fn t_fixes_uniform_and_preserves_complement() {
        let h = conlon_fixture();
        let rep = build_rep(&h).unwrap();
        let n = rep.vertex_count();
        let pi = rep.uniform();
        let mut out = vec![0.0; n];
        rep.apply_t(&pi, &mut out);
        for i in 0..n {
            assert!((out[i] - pi[i]).abs() <= 1e-14);
        }
        // x orthogonal to uniform stays orthogonal
        let mut x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mean = x.iter().sum::<f64>() / n as f64;
        for xi in &mut x {
            *xi -= mean;
        }
        rep.apply_t(&x, &mut out);
        let dot: f64 = out.iter().sum();
        assert!(dot.abs() <= 1e-12);
        // row-stochastic: an indicator's image under T^t sums to 1
        let mut ind = vec![0.0; n];
        ind[3] = 1.0;
        rep.apply_t_transpose(&ind, &mut out);
        assert!((out.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn transpose_is_adjoint() {
        let h = single_triple_fixture();
        let rep = build_rep(&h).unwrap();
        let n = rep.vertex_count();
        let x: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let y: Vec<f64> = (0..n).map(|i| ((i * 5 + 1) % 13) as f64 - 6.0).collect();
        let mut tx = vec![0.0; n];
        let mut tty = vec![0.0; n];
        rep.apply_t(&x, &mut tx);
        rep.apply_t_transpose(&y, &mut tty);
        let lhs: f64 = tx.iter().zip(&y).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(&tty).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn zigzag_graph_shape() {
        let h = conlon_fixture();
        let rep = build_rep(&h).unwrap();
        let zz = zigzag_operator(&rep);
        assert_eq!(zz.vertex_count(), 160);
        // (2 d_tilde)^2 = 36 with multiplicity, d_tilde = 3
        assert_eq!(zz.check_regular().unwrap(), 36);
        // no self-loops: the center always moves
        for v in 0..zz.vertex_count() as u32 {
            assert_eq!(zz.multiplicity(v, v), 0);
        }
    }

    #[test]
    fn zigzag_normalized_adjacency_matches_operator_composition() {
        let h = single_triple_fixture();
        let rep = build_rep(&h).unwrap();
        let n = rep.vertex_count();
        let zz = zigzag_operator(&rep);
        let deg = zz.check_regular().unwrap() as f64;
        let counts = zz.multiplicity_matrix();
        // apply P_R P_B P_R to basis vectors and compare columns
        let op = ZigzagOp { rep: &rep };
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let mut col = vec![0.0; n];
            op.apply_into(&e, &mut col);
            for i in 0..n {
                assert!(
                    (col[i] - counts[i * n + j] as f64 / deg).abs() < 1e-12,
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn zigzag_lambda_paths_agree() {
        let h = single_triple_fixture();
        let rep = build_rep(&h).unwrap();
        // the single-triple rep graph is disconnected, so compare the two
        // zig-zag paths on the Conlon instance instead
        drop(rep);
        let h = conlon_fixture();
        let rep = build_rep(&h).unwrap();
        let dense = second_eigenvalue(&zigzag_operator(&rep), 1e-10).unwrap();
        let free = zigzag_lambda_matrix_free(&rep, 1e-9).unwrap();
        assert!(
            (dense.lambda - free.lambda).abs() < 1e-7,
            "dense {} matrix-free {}",
            dense.lambda,
            free.lambda
        );
    }

    #[test]
    fn t_norm_bound_on_conlon_fixture() {
        let h = conlon_fixture();
        let rep = build_rep(&h).unwrap();
        let bound = verify_t_norm_bound(&rep, 1e-9).unwrap();
        assert!(bound.pass, "lhs={} rhs={}", bound.lhs, bound.rhs);
        assert!(bound.lhs <= 1.0 + 1e-12);
        assert!(bound.rhs <= 1.0 + 1e-12);
    }

    #[test]
    fn red_operator_restricted_to_a_block_is_the_local_graph() {
        let h = conlon_fixture();
        let rep = build_rep(&h).unwrap();
        let k = rep.type_count();
        let n = rep.vertex_count();
        let local = h.local_graph();
        let mut x = vec![0.0; n];
        let block = 7usize;
        for tau in 0..k {
            x[block * k + tau] = (tau as f64 + 1.0).sin();
        }
        let mut out = vec![0.0; n];
        rep.apply_red(&x, &mut out);
        // outside the block the red image is zero
        for (v, &o) in out.iter().enumerate() {
            if v / k != block {
                assert_eq!(o, 0.0);
            }
        }
        // inside it equals the local graph's normalized operator
        let xb: Vec<f64> = (0..k).map(|tau| x[block * k + tau]).collect();
        let mut want = vec![0.0; k];
        local.walk_apply(&xb, &mut want);
        for tau in 0..k {
            assert!((out[block * k + tau] - want[tau]).abs() < 1e-14);
        }
    }

    #[test]
    fn rep_and_zigzag_edge_lists_round_trip() {
        let h = single_triple_fixture();
        let rep = build_rep(&h).unwrap();
        let text = rep.edge_list();
        assert!(text.starts_with("# layout g-major |T|=3\n"));
        let back = crate::graph::Graph::from_edge_list(&text).unwrap();
        // degree = red 2 d_tilde + blue 1
        assert_eq!(back.check_regular().unwrap(), 2 * h.d_tilde() + 1);
        let zz_text = rep.zigzag_edge_list();
        let zz = crate::graph::Graph::from_edge_list(&zz_text).unwrap();
        assert_eq!(zz.check_regular().unwrap(), (2 * h.d_tilde()) * (2 * h.d_tilde()));
    }

    #[test]
    fn corrupt_blue_breaks_involution() {
        let h = conlon_fixture();
        let mut rep = build_rep(&h).unwrap();
        rep.corrupt_blue();
        let broken = (0..rep.vertex_count())
            .any(|v| rep.blue_permutation()[rep.blue_permutation()[v] as usize] as usize != v);
        assert!(broken);
    }
}
