//! The two named pipelines: the Conlon-style construction over `F_2^t`
//! seeded by a Sidon set, and the 3-product construction over a direct
//! product of three groups.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{cayley_graph, Graph};
use crate::group::{product_group, FiniteGroup, GroupDescriptor, GroupElement};
use crate::spectra::{jacobi_eigendecompose, normalized_adjacency_dense, second_eigenvalue};
use crate::triplet::{
    build_structure, ConditionReport, StructureSizes, TripleSet, TripletStructure,
};
use crate::walk::{certify_structure, CertificateRecord, SplitMix64};

/// A verified Sidon-type generator set in `F_2^t`: all pairwise sums of
/// distinct elements are distinct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SidonSet {
    pub t: u32,
    pub elements: Vec<usize>,
    pub seed: u64,
    pub attempts: u32,
}

/// Exhaustive Sidon check: elements distinct, nonzero, in range, and all
/// pairwise sums of distinct pairs distinct.
pub fn verify_sidon(t: u32, elements: &[usize]) -> bool {
    let order = 1usize << t;
    let mut seen = std::collections::HashSet::new();
    for &x in elements {
        if x == 0 || x >= order || !seen.insert(x) {
            return false;
        }
    }
    let mut sums = std::collections::HashSet::new();
    for i in 0..elements.len() {
        for j in i + 1..elements.len() {
            if !sums.insert(elements[i] ^ elements[j]) {
                return false;
            }
        }
    }
    true
}

/// Greedy-randomized Sidon sampling with restarts. Shuffles the nonzero
/// elements by a per-attempt stream of `seed` and adds an element iff it
/// creates no pair-sum collision. The sampling distribution is not uniform
/// over Sidon sets; only existence matters here.
pub fn sample_sidon(t: u32, size: usize, seed: u64, max_attempts: u32) -> Result<SidonSet> {
    if size < 3 {
        return Err(Error::Config(format!("sidon set size must be >= 3, got {size}")));
    }
    if t == 0 || t > 24 {
        return Err(Error::Config(format!("t must be in 1..=24, got {t}")));
    }
    let nonzero = (1usize << t) - 1;
    let pairs = size * (size - 1) / 2;
    if size > nonzero || pairs > nonzero {
        return Err(Error::Sampling {
            attempts: 0,
            reason: format!(
                "infeasible by pigeonhole: need {size} distinct nonzero elements and {pairs} \
                 distinct nonzero pair-sums, but F_2^{t} has only {nonzero} nonzero elements"
            ),
        });
    }
    for attempt in 1..=max_attempts {
        let mut rng = SplitMix64::stream(seed, attempt as u64 - 1);
        let mut candidates: Vec<usize> = (1..=nonzero).collect();
        for i in (1..candidates.len()).rev() {
            let j = rng.next_below(i as u64 + 1) as usize;
            candidates.swap(i, j);
        }
        let mut chosen: Vec<usize> = Vec::with_capacity(size);
        let mut sums = std::collections::HashSet::new();
        for x in candidates {
            if chosen.iter().any(|&s| sums.contains(&(s ^ x))) {
                continue;
            }
            for &s in &chosen {
                sums.insert(s ^ x);
            }
            chosen.push(x);
            if chosen.len() == size {
                break;
            }
        }
        if chosen.len() == size {
            chosen.sort_unstable();
            if !verify_sidon(t, &chosen) {
                return Err(Error::Structural(
                    "sampled set failed the exhaustive pair-sum verifier".into(),
                ));
            }
            return Ok(SidonSet {
                t,
                elements: chosen,
                seed,
                attempts: attempt,
            });
        }
    }
    Err(Error::Sampling {
        attempts: max_attempts,
        reason: format!("greedy search never completed a {size}-element set"),
    })
}

/// All 3-subsets of `s`, as raw index triples.
pub fn all_triples(s: &[usize]) -> Vec<[usize; 3]> {
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

/// Output of the Conlon pipeline beyond the generic certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConlonReport {
    pub sidon: SidonSet,
    pub degree: usize,
    /// `lambda(Cay(G, S))`, normalized.
    pub lambda_base: f64,
    /// `lambda(Cay(G, T))`, normalized.
    pub alpha: f64,
    /// `lambda(L)`, computed, not assumed to be 1/2.
    pub beta: f64,
    pub beta_le_half: bool,
    /// `2 A_cay = A^2 - d I` held entrywise in integer arithmetic.
    pub identity_pass: bool,
    pub alpha_bound: f64,
    pub alpha_bound_pass: bool,
    /// `sqrt(3/4 + alpha/2)`.
    pub pre_bound: f64,
    pub pre_bound_pass: bool,
    /// `sqrt(3)/2 + lambda^2 / (2 sqrt(3))`: reported, not asserted, since
    /// its remainder term has no explicit constant.
    pub closed_form_rate: f64,
    pub conditions: ConditionReport,
    pub sizes: StructureSizes,
    pub certificate: CertificateRecord,
    pub all_pass: bool,
}

/// Run the full Conlon-style pipeline for a verified Sidon set: build the
/// structure from all 3-subsets of `S`, certify the spectral chain, check
/// the squared-adjacency identity exactly, and certify the pre-asymptotic
/// rate bound.
pub fn conlon_pipeline(sidon: &SidonSet, tol: f64) -> Result<ConlonReport> {
    if !verify_sidon(sidon.t, &sidon.elements) {
        return Err(Error::Structural(
            "input set failed the exhaustive Sidon verifier".into(),
        ));
    }
    let group = FiniteGroup::boolean_vector_space(sidon.t)?;
    let triples = TripleSet::new(&group, all_triples(&sidon.elements))?;
    let h = build_structure(group.clone(), triples)?;
    let certificate = certify_structure(&h, tol)?;

    let d = sidon.elements.len();
    let gens: Vec<GroupElement> = sidon.elements.iter().map(|&x| GroupElement(x)).collect();
    let base = cayley_graph(&group, &gens)?;
    let lambda_base = second_eigenvalue(&base, tol)?.lambda;

    // 2 A_cay = A^2 - d I, entrywise over the integers
    let n = group.order();
    let a = base.multiplicity_matrix();
    let gcay = h.cayley_graph()?;
    let acay = gcay.multiplicity_matrix();
    let mut identity_pass = true;
    'outer: for u in 0..n {
        for v in 0..n {
            let mut sq = 0i64;
            for w in 0..n {
                sq += a[u * n + w] * a[w * n + v];
            }
            let rhs = sq - if u == v { d as i64 } else { 0 };
            if 2 * acay[u * n + v] != rhs {
                identity_pass = false;
                break 'outer;
            }
        }
    }

    let alpha = certificate.lambda_gcay;
    let beta = certificate.lambda_local;
    let alpha_bound = lambda_base * lambda_base * (1.0 + 1.0 / (d as f64 + 1.0));
    let alpha_bound_pass = alpha <= alpha_bound + 1e-10;
    let pre_bound = (0.75 + 0.5 * alpha).sqrt();
    let pre_bound_pass = certificate.lambda_walk <= pre_bound + 1e-8;
    let beta_le_half = beta <= 0.5 + 1e-9;
    let closed_form_rate =
        3f64.sqrt() / 2.0 + lambda_base * lambda_base / (2.0 * 3f64.sqrt());

    let all_pass = certificate.all_pass
        && identity_pass
        && alpha_bound_pass
        && pre_bound_pass
        && beta_le_half;
    Ok(ConlonReport {
        sidon: sidon.clone(),
        degree: d,
        lambda_base,
        alpha,
        beta,
        beta_le_half,
        identity_pass,
        alpha_bound,
        alpha_bound_pass,
        pre_bound,
        pre_bound_pass,
        closed_form_rate,
        conditions: h.condition_report().clone(),
        sizes: h.sizes(),
        certificate,
        all_pass,
    })
}

/// One factor of a 3-product: a group and its generator set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorSpec {
    pub group: GroupDescriptor,
    pub gens: Vec<usize>,
}

/// Specification of the 3-product construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThreeProductSpec {
    pub factors: Vec<FactorSpec>,
}

impl ThreeProductSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("3-product spec JSON: {e}")))
    }
}

/// Output of the 3-product pipeline beyond the generic certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeProductReport {
    pub factor_lambdas: [f64; 3],
    /// The largest factor lambda.
    pub lambda3: f64,
    /// Normalized Cayley adjacency equals the averaged tensor sum entrywise.
    pub tensor_identity_pass: bool,
    pub lambda_gcay: f64,
    /// `max |mu nu + nu xi + mu xi| / 3` over non-trivial factor
    /// eigenvalue triples.
    pub lambda_gcay_closed_form: f64,
    pub lambda_gcay_matches_closed_form: bool,
    /// The full `n^3` tensor eigenvalue multiset matches the Cayley spectrum.
    pub spectrum_multiset_pass: bool,
    /// `x_mu (x) y_1 (x) z_1` is an eigenvector with eigenvalue `(1+2mu)/3`
    /// for every factor-1 eigenvalue `mu`.
    pub eigenvector_check_pass: bool,
    pub lambda_local: f64,
    /// The local graph is isomorphic to the independently built tripartite
    /// graph under the explicit template mapping.
    pub local_iso_pass: bool,
    /// `sqrt(1/2 + f((1+2 lambda3)/3, 1/2) / 2)`.
    pub rate_bound: f64,
    pub rate_bound_pass: bool,
    pub conditions: ConditionReport,
    pub sizes: StructureSizes,
    pub certificate: CertificateRecord,
    pub all_pass: bool,
}

/// Build the product group and the embedded triple family
/// `{ {s1^, s2^, s3^} }` for a validated spec.
pub fn three_product_structure(spec: &ThreeProductSpec) -> Result<(FiniteGroup, TripleSet)> {
    if spec.factors.len() != 3 {
        return Err(Error::Config(format!(
            "3-product needs exactly 3 factors, got {}",
            spec.factors.len()
        )));
    }
    let factors: Vec<FiniteGroup> = spec
        .factors
        .iter()
        .map(|f| FiniteGroup::from_descriptor(&f.group))
        .collect::<Result<_>>()?;
    let d = spec.factors[0].gens.len();
    let order = factors[0].order();
    for (i, (f, fs)) in factors.iter().zip(&spec.factors).enumerate() {
        if fs.gens.is_empty() {
            return Err(Error::Config(format!("factor {i} has no generators")));
        }
        if fs.gens.len() != d {
            return Err(Error::Config(format!(
                "generator sets must have equal size: factor {i} has {}, factor 0 has {d}",
                fs.gens.len()
            )));
        }
        if f.order() != order {
            return Err(Error::Config(format!(
                "factor orders must be equal: factor {i} has {}, factor 0 has {order}",
                f.order()
            )));
        }
        let set: std::collections::BTreeSet<usize> = fs.gens.iter().copied().collect();
        if set.len() != fs.gens.len() {
            return Err(Error::Config(format!("factor {i} generators are not distinct")));
        }
        for &s in &fs.gens {
            if s >= f.order() {
                return Err(Error::InvalidElement {
                    index: s,
                    order: f.order(),
                });
            }
            if !set.contains(&f.inv_unchecked(GroupElement(s)).0) {
                return Err(Error::Config(format!(
                    "factor {i} generator set is not inverse-closed at {s}"
                )));
            }
        }
    }
    let product = product_group(factors)?;
    let embed = |factor: usize, s: usize| -> Result<GroupElement> {
        let mut comps = [0usize; 3];
        comps[factor] = s;
        product.from_components(&comps)
    };
    let mut raw = Vec::with_capacity(d * d * d);
    for &s1 in &spec.factors[0].gens {
        for &s2 in &spec.factors[1].gens {
            for &s3 in &spec.factors[2].gens {
                raw.push([embed(0, s1)?.0, embed(1, s2)?.0, embed(2, s3)?.0]);
            }
        }
    }
    let triples = TripleSet::new(&product, raw)?;
    Ok((product, triples))
}

/// Independent construction of the tripartite local graph from the factor
/// generator lists, and its vertex mapping into the structure's type set.
/// Returns `(adjacency under the mapping, mapping is a bijection)`.
fn tripartite_local_graph(
    spec: &ThreeProductSpec,
    product: &FiniteGroup,
    h: &TripletStructure,
) -> Result<(bool, f64)> {
    // vertices: (template, i, j) for templates (0,1), (0,2), (1,2)
    let templates = [(0usize, 1usize), (0usize, 2usize), (1usize, 2usize)];
    let mut vertices: Vec<(usize, usize, usize)> = Vec::new();
    for (t, &(f1, f2)) in templates.iter().enumerate() {
        for i in 0..spec.factors[f1].gens.len() {
            for j in 0..spec.factors[f2].gens.len() {
                vertices.push((t, i, j));
            }
        }
    }
    let embed = |factor: usize, s: usize| -> GroupElement {
        let mut comps = [0usize; 3];
        comps[factor] = s;
        product.from_components(&comps).expect("valid component")
    };
    // psi: tripartite vertex -> type index
    let psi: Vec<usize> = vertices
        .iter()
        .map(|&(t, i, j)| {
            let (f1, f2) = templates[t];
            let a = embed(f1, spec.factors[f1].gens[i]);
            let b = embed(f2, spec.factors[f2].gens[j]);
            h.type_set()
                .index_of(crate::triplet::canonical_pair(a, b))
                .ok_or_else(|| Error::Structural("tripartite vertex is not a type".into()))
        })
        .collect::<Result<_>>()?;
    let mut sorted = psi.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != h.type_set().len() {
        return Ok((false, 1.0));
    }

    // adjacency rule: different templates, equal index in the shared factor
    let nv = vertices.len();
    let mut edges = Vec::new();
    for x in 0..nv {
        for y in x + 1..nv {
            let (tx, ix, jx) = vertices[x];
            let (ty, iy, jy) = vertices[y];
            if tx == ty {
                continue;
            }
            let (fx1, fx2) = templates[tx];
            let (fy1, fy2) = templates[ty];
            let adjacent = if fx1 == fy1 {
                ix == iy
            } else if fx1 == fy2 {
                ix == jy
            } else if fx2 == fy1 {
                jx == iy
            } else if fx2 == fy2 {
                jx == jy
            } else {
                false
            };
            if adjacent {
                edges.push((psi[x].min(psi[y]) as u32, psi[x].max(psi[y]) as u32));
            }
        }
    }
    let lp = Graph::from_edges(h.type_set().len(), &edges)?;
    // exact isomorphism check through psi: identical neighbor lists
    let mut iso = true;
    for v in 0..h.type_set().len() as u32 {
        if lp.neighbors(v) != h.local_graph().neighbors(v) {
            iso = false;
            break;
        }
    }
    let lambda_lp = second_eigenvalue(&lp, 1e-10)?.lambda;
    Ok((iso, lambda_lp))
}

/// Run the full 3-product pipeline: build `G1 x G2 x G3` with the embedded
/// triple family, certify the spectral chain, verify the tensor identity
/// entrywise, compare the Cayley spectrum with the factor closed form, and
/// check the local graph against its independent tripartite description.
pub fn three_product_pipeline(spec: &ThreeProductSpec, tol: f64) -> Result<ThreeProductReport> {
    let (product, triples) = three_product_structure(spec)?;
    let factors = product.factors().expect("product group").to_vec();
    let h = build_structure(product.clone(), triples)?;
    let certificate = certify_structure(&h, tol)?;

    // factor spectra, dense
    let mut factor_graphs = Vec::with_capacity(3);
    let mut factor_lambdas = [0.0f64; 3];
    let mut factor_eigs: Vec<Vec<f64>> = Vec::with_capacity(3);
    for i in 0..3 {
        let gens: Vec<GroupElement> = spec.factors[i]
            .gens
            .iter()
            .map(|&s| GroupElement(s))
            .collect();
        let g = cayley_graph(&factors[i], &gens)?;
        let s = second_eigenvalue(&g, tol)?;
        factor_lambdas[i] = s.lambda;
        factor_eigs.push(s.all_eigenvalues.expect("dense factor spectrum"));
        factor_graphs.push(g);
    }
    let lambda3 = factor_lambdas.iter().cloned().fold(0.0, f64::max);

    // tensor identity: normalized Cayley adjacency equals
    // (A1 (x) A2 (x) I + I (x) A2 (x) A3 + A1 (x) I (x) A3) / 3
    let gcay = h.cayley_graph()?;
    let n = product.order();
    let counts = gcay.multiplicity_matrix();
    let deg = gcay.check_regular().map_err(|f| {
        Error::Structural(format!("Cay(G,T) is not regular at vertex {}", f.vertex))
    })? as f64;
    let norms: Vec<Vec<f64>> = factor_graphs
        .iter()
        .map(normalized_adjacency_dense)
        .collect::<Result<_>>()?;
    let comps: Vec<Vec<usize>> = (0..n)
        .map(|u| product.components(GroupElement(u)).expect("product element"))
        .collect();
    let m = factors[0].order();
    let mut tensor_identity_pass = true;
    'tensor: for u in 0..n {
        for v in 0..n {
            let (u1, u2, u3) = (comps[u][0], comps[u][1], comps[u][2]);
            let (v1, v2, v3) = (comps[v][0], comps[v][1], comps[v][2]);
            let d1 = (u1 == v1) as usize as f64;
            let d2 = (u2 == v2) as usize as f64;
            let d3 = (u3 == v3) as usize as f64;
            let expected = (norms[0][u1 * m + v1] * norms[1][u2 * m + v2] * d3
                + d1 * norms[1][u2 * m + v2] * norms[2][u3 * m + v3]
                + norms[0][u1 * m + v1] * d2 * norms[2][u3 * m + v3])
                / 3.0;
            let got = counts[u * n + v] as f64 / deg;
            if (got - expected).abs() > 1e-12 {
                tensor_identity_pass = false;
                break 'tensor;
            }
        }
    }

    // closed form from factor spectra; tensor triples form the whole spectrum
    let lambda_gcay = certificate.lambda_gcay;
    let mut closed: f64 = 0.0;
    let mut tensor_values = Vec::with_capacity(n);
    for (i, &mu) in factor_eigs[0].iter().enumerate() {
        for (j, &nu) in factor_eigs[1].iter().enumerate() {
            for (k, &xi) in factor_eigs[2].iter().enumerate() {
                let val = (mu * nu + nu * xi + mu * xi) / 3.0;
                tensor_values.push(val);
                if (i, j, k) != (0, 0, 0) {
                    closed = closed.max(val.abs());
                }
            }
        }
    }
    let lambda_gcay_matches_closed_form = (lambda_gcay - closed).abs() <= 1e-9;
    tensor_values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let gcay_spectrum = second_eigenvalue(&gcay, tol)?
        .all_eigenvalues
        .expect("dense spectrum");
    let spectrum_multiset_pass = tensor_values.len() == gcay_spectrum.len()
        && tensor_values
            .iter()
            .zip(&gcay_spectrum)
            .all(|(a, b)| (a - b).abs() <= 1e-8);

    // eigenvector fact: x_mu (x) 1 (x) 1 has eigenvalue (1 + 2 mu)/3
    let mut a1 = norms[0].clone();
    let (vals1, vecs1) = jacobi_eigendecompose(&mut a1, m, 1e-12)?;
    let mut eigenvector_check_pass = true;
    let mut out = vec![0.0; n];
    for (kk, &mu) in vals1.iter().enumerate() {
        let mut v = vec![0.0; n];
        for u in 0..n {
            v[u] = vecs1[comps[u][0] * m + kk];
        }
        gcay.walk_apply(&v, &mut out);
        let want = (1.0 + 2.0 * mu) / 3.0;
        let resid = v
            .iter()
            .zip(&out)
            .map(|(x, y)| (y - want * x).abs())
            .fold(0.0, f64::max);
        if resid > 1e-8 {
            eigenvector_check_pass = false;
        }
    }

    let (local_iso_pass, _lambda_lp) = tripartite_local_graph(spec, &product, &h)?;
    let lambda_local = certificate.lambda_local;

    let rate_bound = crate::spectra::main_bound(crate::spectra::zigzag_function(
        ((1.0 + 2.0 * lambda3) / 3.0).min(1.0),
        0.5,
    )?)?;
    let rate_bound_pass = certificate.lambda_walk <= rate_bound + 1e-8;

    let all_pass = certificate.all_pass
        && tensor_identity_pass
        && lambda_gcay_matches_closed_form
        && spectrum_multiset_pass
        && eigenvector_check_pass
        && local_iso_pass
        && rate_bound_pass;
    Ok(ThreeProductReport {
        factor_lambdas,
        lambda3,
        tensor_identity_pass,
        lambda_gcay,
        lambda_gcay_closed_form: closed,
        lambda_gcay_matches_closed_form,
        spectrum_multiset_pass,
        eigenvector_check_pass,
        lambda_local,
        local_iso_pass,
        rate_bound,
        rate_bound_pass,
        conditions: h.condition_report().clone(),
        sizes: h.sizes(),
        certificate,
        all_pass,
    })
}
