//! The auxiliary walk graph on skeleton edges, exact lift verification
//! against the replacement-graph walk operator, the certified spectral
//! bounds, and random-walk simulation with total-variation tracking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::group::GroupElement;
use crate::products::{build_rep, verify_t_norm_bound_against, zigzag_lambda, RepGraph};
use crate::spectra::{main_bound, second_eigenvalue, zigzag_function};
use crate::triplet::{CheckResult, TripletStructure};

/// The walk graph: vertices are skeleton edges, adjacent iff a common
/// hyper-triple contains both. Simple and `4 d_tilde`-regular.
#[derive(Debug, Clone)]
pub struct WalkGraph {
    graph: Graph,
    /// skeleton edge labelling each vertex
    labels: Vec<[GroupElement; 2]>,
    degree: usize,
}

impl WalkGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn edge_labels(&self) -> &[[GroupElement; 2]] {
        &self.labels
    }
}

/// Build the walk graph twice, by triple containment and by the center/type
/// description, and require the two edge sets to agree exactly.
pub fn build_gwalk(h: &TripletStructure) -> Result<WalkGraph> {
    let n = h.skeleton().len();

    // construction 1: two skeleton edges are adjacent iff they lie in a
    // common hyper-triple
    let mut by_triples: Vec<(u32, u32)> = Vec::with_capacity(3 * h.hyper_triples().len());
    for t in h.hyper_triples() {
        let e1 = h.skeleton_index([t[0], t[1]]).expect("skeleton edge");
        let e2 = h.skeleton_index([t[0], t[2]]).expect("skeleton edge");
        let e3 = h.skeleton_index([t[1], t[2]]).expect("skeleton edge");
        by_triples.push((e1.min(e2), e1.max(e2)));
        by_triples.push((e1.min(e3), e1.max(e3)));
        by_triples.push((e2.min(e3), e2.max(e3)));
    }
    by_triples.sort_unstable();
    for w in by_triples.windows(2) {
        if w[0] == w[1] {
            return Err(Error::Structural(format!(
                "walk graph is not simple: duplicate adjacency {:?} from triple containment",
                w[0]
            )));
        }
    }
    if by_triples.iter().any(|&(a, b)| a == b) {
        return Err(Error::Structural("walk graph has a self-loop".into()));
    }

    // construction 2: neighbors through a shared center and local-graph
    // adjacency of the types
    let mut by_centers: Vec<(u32, u32)> = Vec::with_capacity(by_triples.len());
    for e_idx in 0..n {
        let mut nbrs: Vec<u32> = Vec::new();
        for &(c, tau) in h.centers_by_index(e_idx) {
            for &tau2 in h.local_graph().neighbors(tau) {
                let e2 = h
                    .skeleton_index(h.edge_of_type_index(c, tau2 as usize))
                    .expect("skeleton edge");
                nbrs.push(e2);
            }
        }
        nbrs.sort_unstable();
        for w in nbrs.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Structural(format!(
                    "center/type construction yields a repeated neighbor at edge {e_idx}"
                )));
            }
        }
        for &b in &nbrs {
            if (e_idx as u32) < b {
                by_centers.push((e_idx as u32, b));
            }
        }
    }
    by_centers.sort_unstable();

    if by_triples != by_centers {
        let diff = by_triples
            .iter()
            .zip(&by_centers)
            .find(|(a, b)| a != b)
            .map(|(a, b)| format!("{a:?} vs {b:?}"))
            .unwrap_or_else(|| {
                format!(
                    "edge counts differ: {} vs {}",
                    by_triples.len(),
                    by_centers.len()
                )
            });
        return Err(Error::Structural(format!(
            "walk-graph constructions disagree: {diff}"
        )));
    }

    let graph = Graph::from_edges(n, &by_triples)?;
    let degree = graph.check_regular().map_err(|f| {
        Error::Structural(format!(
            "walk graph is not regular: vertex {} has degree {}, expected {}",
            f.vertex, f.degree, f.expected
        ))
    })?;
    if degree != 4 * h.d_tilde() {
        return Err(Error::Structural(format!(
            "walk graph degree {degree} differs from 4 d_tilde = {}",
            4 * h.d_tilde()
        )));
    }
    Ok(WalkGraph {
        graph,
        labels: h.skeleton().to_vec(),
        degree,
    })
}

/// Witness for a failed lift verification.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LiftFailure {
    /// The labeling map is not 2-to-1 at this walk vertex.
    NotTwoToOne { walk_vertex: usize, preimages: usize },
    /// A walk-operator transition maps outside the walk-graph neighborhood.
    NotHomomorphism {
        rep_vertex: usize,
        rep_target: usize,
        walk_vertex: usize,
        walk_target: usize,
    },
    /// The neighbor map is not a bijection at this replacement vertex.
    NotBijective { rep_vertex: usize },
}

/// Exact covering-map check: the edge labeling is 2-to-1, every walk-operator
/// transition is a walk-graph edge, and per vertex the transition targets map
/// bijectively onto the walk-graph neighborhood.
pub fn verify_lift(
    h: &TripletStructure,
    rep: &RepGraph,
    gwalk: &WalkGraph,
) -> CheckResult<LiftFailure> {
    let k = rep.type_count();
    let n_rep = rep.vertex_count();

    // labeling map e : V(rep) -> V(walk)
    let mut label = vec![0u32; n_rep];
    let mut preimages = vec![0usize; gwalk.vertex_count()];
    for v in 0..n_rep {
        let (g, tau) = rep.unindex(v);
        let e = h
            .skeleton_index(h.edge_of_type_index(GroupElement(g), tau))
            .expect("skeleton edge");
        label[v] = e;
        preimages[e as usize] += 1;
    }
    for (w, &count) in preimages.iter().enumerate() {
        if count != 2 {
            return CheckResult::Fail {
                witness: LiftFailure::NotTwoToOne {
                    walk_vertex: w,
                    preimages: count,
                },
            };
        }
    }

    for v in 0..n_rep {
        let (g, tau) = rep.unindex(v);
        let base = g * k;
        // transition targets of T: red neighbors, then blue-then-red
        let mut targets: Vec<usize> = Vec::with_capacity(gwalk.degree());
        for &t2 in h.local_graph().neighbors(tau as u32) {
            targets.push(base + t2 as usize);
        }
        let w = rep.blue_permutation()[v] as usize;
        let (g2, tau2) = rep.unindex(w);
        for &t3 in h.local_graph().neighbors(tau2 as u32) {
            targets.push(g2 * k + t3 as usize);
        }

        let ev = label[v];
        let walk_nbrs = gwalk.graph().neighbors(ev);
        let mut mapped: Vec<u32> = Vec::with_capacity(targets.len());
        for &t in &targets {
            let et = label[t];
            if walk_nbrs.binary_search(&et).is_err() {
                return CheckResult::Fail {
                    witness: LiftFailure::NotHomomorphism {
                        rep_vertex: v,
                        rep_target: t,
                        walk_vertex: ev as usize,
                        walk_target: et as usize,
                    },
                };
            }
            mapped.push(et);
        }
        mapped.sort_unstable();
        if mapped.windows(2).any(|w| w[0] == w[1]) || mapped.as_slice() != walk_nbrs {
            return CheckResult::Fail {
                witness: LiftFailure::NotBijective { rep_vertex: v },
            };
        }
    }
    CheckResult::Pass
}

/// One certified inequality: `lhs <= rhs` within the comparison slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl BoundRecord {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        BoundRecord {
            name: name.into(),
            lhs,
            rhs,
            pass: lhs <= rhs + 1e-8,
        }
    }
}

/// Everything the spectral-bound certification produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub lambda_walk: f64,
    pub lambda_zigzag: f64,
    pub lambda_gcay: f64,
    pub lambda_local: f64,
    pub t_norm_plus: f64,
    pub main_bound: f64,
    pub corollary_bound: f64,
    pub bounds: Vec<BoundRecord>,
    pub two_centers_pass: bool,
    pub lift_pass: bool,
    /// The two walk-graph constructions agreed edge for edge.
    pub dual_construction_pass: bool,
    pub all_pass: bool,
}

/// Certify the spectral chain on a validated structure: compute
/// `lambda(G_walk)` directly, bound it through the zig-zag spectrum and
/// through the zig-zag function, and bound `||T^2||_+`, each side by an
/// independent code path.
pub fn certify_structure(h: &TripletStructure, tol: f64) -> Result<CertificateRecord> {
    let rep = build_rep(h)?;
    let gwalk = build_gwalk(h)?;
    certify_with(h, &rep, &gwalk, tol)
}

pub fn certify_with(
    h: &TripletStructure,
    rep: &RepGraph,
    gwalk: &WalkGraph,
    tol: f64,
) -> Result<CertificateRecord> {
    let lambda_walk = second_eigenvalue(gwalk.graph(), tol)?.lambda;
    let lambda_zigzag = zigzag_lambda(rep, tol)?.lambda;
    let gcay = h.cayley_graph()?;
    let lambda_gcay = second_eigenvalue(&gcay, tol)?.lambda;
    let lambda_local = second_eigenvalue(h.local_graph(), tol)?.lambda;
    let tbound = verify_t_norm_bound_against(rep, lambda_zigzag, tol.max(1e-9))?;
    let main = main_bound(lambda_zigzag)?;
    let corollary = main_bound(zigzag_function(lambda_gcay.min(1.0), lambda_local.min(1.0))?)?;

    let two_centers_pass = h.verify_two_centers().is_pass();
    let lift_pass = verify_lift(h, rep, gwalk).is_pass();

    let bounds = vec![
        BoundRecord::new("lambda_walk <= sqrt(1/2 + lambda_zigzag/2)", lambda_walk, main),
        BoundRecord::new(
            "lambda_walk^2 <= t_norm_plus",
            lambda_walk * lambda_walk,
            tbound.lhs,
        ),
        BoundRecord::new(
            "t_norm_plus <= 1/2 + lambda_zigzag/2",
            tbound.lhs,
            tbound.rhs,
        ),
        BoundRecord::new(
            "lambda_walk <= sqrt(1/2 + f(lambda_gcay, lambda_local)/2)",
            lambda_walk,
            corollary,
        ),
    ];
    let all_pass =
        bounds.iter().all(|b| b.pass) && two_centers_pass && lift_pass && tbound.pass;
    Ok(CertificateRecord {
        lambda_walk,
        lambda_zigzag,
        lambda_gcay,
        lambda_local,
        t_norm_plus: tbound.lhs,
        main_bound: main,
        corollary_bound: corollary,
        bounds,
        two_centers_pass,
        lift_pass,
        dual_construction_pass: true,
        all_pass,
    })
}

/// SplitMix64; per-trial streams come from advancing the seed by the golden
/// gamma times the stream index, so trials are order-independent.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E3779B97F4A7C15;

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn stream(seed: u64, index: u64) -> Self {
        SplitMix64 {
            state: seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, k)` by rejection, so no modulo bias.
    #[inline]
    pub fn next_below(&mut self, k: u64) -> u64 {
        debug_assert!(k > 0);
        let rem = (u64::MAX % k + 1) % k; // 2^64 mod k
        loop {
            let r = self.next_u64();
            if rem == 0 || r <= u64::MAX - rem {
                return r % k;
            }
        }
    }
}

/// Initial state of a simulated walk.
#[derive(Debug, Clone)]
pub enum WalkStart {
    Vertex(usize),
    Distribution(Vec<f64>),
}

/// Per-step total-variation distance to uniform.
#[derive(Debug, Clone, Serialize)]
pub struct MixingCurve {
    pub tv: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl MixingCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,tv,trials,seed\n");
        for (i, tv) in self.tv.iter().enumerate() {
            s.push_str(&format!("{i},{tv},{},{}\n", self.trials, self.seed));
        }
        s
    }
}

fn tv_to_uniform(p: &[f64]) -> f64 {
    let u = 1.0 / p.len() as f64;
    0.5 * p.iter().map(|&x| (x - u).abs()).sum::<f64>()
}

fn start_distribution(graph: &Graph, start: &WalkStart) -> Result<Vec<f64>> {
    let n = graph.vertex_count();
    match start {
        WalkStart::Vertex(v) => {
            if *v >= n {
                return Err(Error::Domain(format!(
                    "start vertex {v} out of range for {n} vertices"
                )));
            }
            let mut p = vec![0.0; n];
            p[*v] = 1.0;
            Ok(p)
        }
        WalkStart::Distribution(p) => {
            if p.len() != n {
                return Err(Error::Domain("start distribution dimension mismatch".into()));
            }
            if p.iter().any(|&x| x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::Domain(
                    "start distribution must be nonnegative and sum to 1".into(),
                ));
            }
            Ok(p.clone())
        }
    }
}

/// Simulate the uniform-neighbor random walk and report the total-variation
/// distance to uniform for steps `0..=steps`.
///
/// `trials = 0` is the exact-mode sentinel: the distribution is evolved by
/// exact matvecs and no sampling happens. Otherwise `trials` independent
/// walks run on per-trial SplitMix64 streams; results are bit-identical for
/// a fixed seed regardless of `threads`.
pub fn simulate_walk(
    graph: &Graph,
    steps: usize,
    trials: u64,
    seed: u64,
    start: &WalkStart,
    threads: usize,
) -> Result<MixingCurve> {
    let n = graph.vertex_count();
    if n == 0 {
        return Err(Error::Config("walk on the empty graph".into()));
    }
    for u in 0..n {
        if graph.degree(u as u32) == 0 {
            return Err(Error::Structural(format!("vertex {u} has no neighbors")));
        }
    }
    let p0 = start_distribution(graph, start)?;

    if trials == 0 {
        let mut p = p0;
        let mut next = vec![0.0; n];
        let mut tv = Vec::with_capacity(steps + 1);
        tv.push(tv_to_uniform(&p));
        for _ in 0..steps {
            graph.distribution_step(&p, &mut next);
            std::mem::swap(&mut p, &mut next);
            tv.push(tv_to_uniform(&p));
        }
        return Ok(MixingCurve { tv, trials, seed });
    }

    // cumulative distribution for sampling non-point starts
    let start_cdf: Option<Vec<f64>> = match start {
        WalkStart::Vertex(_) => None,
        WalkStart::Distribution(p) => {
            let mut cdf = Vec::with_capacity(n);
            let mut acc = 0.0;
            for &x in p {
                acc += x;
                cdf.push(acc);
            }
            Some(cdf)
        }
    };
    let start_vertex = match start {
        WalkStart::Vertex(v) => *v,
        WalkStart::Distribution(_) => 0,
    };

    let threads = threads.max(1).min(trials as usize).max(1);
    let chunk = trials / threads as u64;
    let mut counts = vec![0u64; (steps + 1) * n];
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for t in 0..threads as u64 {
            let lo = t * chunk;
            let hi = if t == threads as u64 - 1 { trials } else { lo + chunk };
            let start_cdf = start_cdf.as_deref();
            handles.push(scope.spawn(move || {
                let mut local = vec![0u64; (steps + 1) * n];
                for trial in lo..hi {
                    let mut rng = SplitMix64::stream(seed, trial);
                    let mut pos = match start_cdf {
                        None => start_vertex,
                        Some(cdf) => {
                            let r = rng.next_u64() as f64 / (u64::MAX as f64 + 1.0);
                            cdf.partition_point(|&c| c <= r).min(n - 1)
                        }
                    };
                    local[pos] += 1;
                    for step in 1..=steps {
                        let nbrs = graph.neighbors(pos as u32);
                        pos = nbrs[rng.next_below(nbrs.len() as u64) as usize] as usize;
                        local[step * n + pos] += 1;
                    }
                }
                local
            }));
        }
        for h in handles {
            let local = h.join().expect("walk worker");
            for (c, l) in counts.iter_mut().zip(local) {
                *c += l;
            }
        }
    });

    let mut tv = Vec::with_capacity(steps + 1);
    for step in 0..=steps {
        let slice = &counts[step * n..(step + 1) * n];
        let p: Vec<f64> = slice.iter().map(|&c| c as f64 / trials as f64).collect();
        tv.push(tv_to_uniform(&p));
    }
    Ok(MixingCurve { tv, trials, seed })
}
