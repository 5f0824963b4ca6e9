//! Triplet structures: hypergraphs whose triples are the translates of a
//! fixed family of 3-sets of group elements, together with the condition
//! checkers that make them commutative triplet structures.
//!
//! Canonical representations throughout: a triple or edge is a sorted array
//! of element indices, all set-like collections are sorted vectors, and all
//! iteration orders are deterministic.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{cayley_graph, Graph};
use crate::group::{FiniteGroup, GroupElement};

/// A set of 3-subsets of group elements; the seed of the construction.
#[derive(Debug, Clone)]
pub struct TripleSet {
    triples: Vec<[GroupElement; 3]>,
}

#[derive(Serialize, Deserialize)]
struct TriplesFile {
    triples: Vec<[usize; 3]>,
}

impl TripleSet {
    /// Canonicalize and validate: three distinct in-range elements per
    /// triple, no duplicate triples, non-empty.
    pub fn new(group: &FiniteGroup, raw: Vec<[usize; 3]>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Config("triple set is empty".into()));
        }
        let mut triples = Vec::with_capacity(raw.len());
        for t in raw {
            for &i in &t {
                if i >= group.order() {
                    return Err(Error::InvalidElement {
                        index: i,
                        order: group.order(),
                    });
                }
            }
            let mut s = t;
            s.sort_unstable();
            if s[0] == s[1] || s[1] == s[2] {
                return Err(Error::Config(format!(
                    "triple {t:?} does not have three distinct elements"
                )));
            }
            triples.push([GroupElement(s[0]), GroupElement(s[1]), GroupElement(s[2])]);
        }
        triples.sort_unstable();
        for w in triples.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Config(format!(
                    "duplicate triple {:?}",
                    [w[0][0].0, w[0][1].0, w[0][2].0]
                )));
            }
        }
        Ok(TripleSet { triples })
    }

    pub fn from_json(group: &FiniteGroup, text: &str) -> Result<Self> {
        let file: TriplesFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("triples JSON: {e}")))?;
        Self::new(group, file.triples)
    }

    pub fn to_json(&self) -> String {
        let file = TriplesFile {
            triples: self
                .triples
                .iter()
                .map(|t| [t[0].0, t[1].0, t[2].0])
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn triples(&self) -> &[[GroupElement; 3]] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

/// The types of a triple set: every 2-subset of each triple, deduplicated,
/// as canonical sorted pairs.
#[derive(Debug, Clone)]
pub struct TypeSet {
    types: Vec<[GroupElement; 2]>,
}

impl TypeSet {
    pub fn types(&self) -> &[[GroupElement; 2]] {
        &self.types
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn index_of(&self, pair: [GroupElement; 2]) -> Option<usize> {
        let key = canonical_pair(pair[0], pair[1]);
        self.types.binary_search(&key).ok()
    }

    /// All ordered types, both orders of each unordered type, in a
    /// deterministic order.
    pub fn ordered(&self) -> impl Iterator<Item = (GroupElement, GroupElement)> + '_ {
        self.types
            .iter()
            .flat_map(|&[a, b]| [(a, b), (b, a)].into_iter())
    }
}

#[inline]
pub fn canonical_pair(a: GroupElement, b: GroupElement) -> [GroupElement; 2] {
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

/// Derive the type set of `s`: all 2-subsets of its triples.
pub fn derive_types(s: &TripleSet) -> TypeSet {
    let mut set = BTreeSet::new();
    for t in s.triples() {
        set.insert(canonical_pair(t[0], t[1]));
        set.insert(canonical_pair(t[0], t[2]));
        set.insert(canonical_pair(t[1], t[2]));
    }
    TypeSet {
        types: set.into_iter().collect(),
    }
}

/// Witness of a condition violation; replays to a concrete violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Condition 0: a type of the form `{s, s^{-1}}`.
    InversePairType { a: usize, b: usize },
    /// Condition A: a type whose inverse pair is not a type.
    MissingInverseType { a: usize, b: usize, missing: [usize; 2] },
    /// Condition B: ordered types `t != t'` with `t1 t2^{-1} = t'1 t'2^{-1}`
    /// that are not inverse-related.
    FourCycle {
        t: [usize; 2],
        t_prime: [usize; 2],
        key: usize,
    },
    /// Condition C: a type contained in the wrong number of triples.
    EdgeIrregular {
        tau: [usize; 2],
        count: usize,
        expected: usize,
    },
    /// Condition D: the local graph is disconnected.
    DisconnectedLocalGraph { reached: usize, total: usize },
    /// Condition E: a type whose two elements do not commute.
    NonCommutingType { a: usize, b: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ConditionOutcome {
    Pass,
    Fail { witness: Witness },
}

impl ConditionOutcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, ConditionOutcome::Pass)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            ConditionOutcome::Pass => None,
            ConditionOutcome::Fail { witness } => Some(witness),
        }
    }
}

/// Outcome of all six condition checks; every check always runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub zero: ConditionOutcome,
    pub a: ConditionOutcome,
    pub b: ConditionOutcome,
    pub c: ConditionOutcome,
    pub d: ConditionOutcome,
    pub e: ConditionOutcome,
    /// The edge-regularity constant, present when condition C passes.
    pub d_tilde: Option<usize>,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.zero.is_pass()
            && self.a.is_pass()
            && self.b.is_pass()
            && self.c.is_pass()
            && self.d.is_pass()
            && self.e.is_pass()
    }

    pub fn summary(&self) -> String {
        let mut failed = Vec::new();
        for (name, o) in [
            ("0", &self.zero),
            ("A", &self.a),
            ("B", &self.b),
            ("C", &self.c),
            ("D", &self.d),
            ("E", &self.e),
        ] {
            if !o.is_pass() {
                failed.push(name);
            }
        }
        if failed.is_empty() {
            "all conditions pass".into()
        } else {
            format!("conditions {} failed", failed.join(", "))
        }
    }
}

fn check_zero(group: &FiniteGroup, types: &TypeSet) -> ConditionOutcome {
    for &[a, b] in types.types() {
        if group.inv_unchecked(a) == b {
            return ConditionOutcome::Fail {
                witness: Witness::InversePairType { a: a.0, b: b.0 },
            };
        }
    }
    ConditionOutcome::Pass
}

fn check_a(group: &FiniteGroup, types: &TypeSet) -> ConditionOutcome {
    for &[a, b] in types.types() {
        let inv_pair = canonical_pair(group.inv_unchecked(b), group.inv_unchecked(a));
        if types.index_of(inv_pair).is_none() {
            return ConditionOutcome::Fail {
                witness: Witness::MissingInverseType {
                    a: a.0,
                    b: b.0,
                    missing: [inv_pair[0].0, inv_pair[1].0],
                },
            };
        }
    }
    ConditionOutcome::Pass
}

fn check_b(group: &FiniteGroup, types: &TypeSet) -> ConditionOutcome {
    // group ordered types by the key t1 * t2^{-1}; within a key class every
    // pair must be inverse-related
    let mut by_key: HashMap<usize, Vec<(GroupElement, GroupElement)>> = HashMap::new();
    for (t1, t2) in types.ordered() {
        let key = group.mul_unchecked(t1, group.inv_unchecked(t2));
        let bucket = by_key.entry(key.0).or_default();
        for &(p1, p2) in bucket.iter() {
            let ok = p2 == group.inv_unchecked(t1) && p1 == group.inv_unchecked(t2);
            if !ok {
                return ConditionOutcome::Fail {
                    witness: Witness::FourCycle {
                        t: [p1.0, p2.0],
                        t_prime: [t1.0, t2.0],
                        key: key.0,
                    },
                };
            }
        }
        bucket.push((t1, t2));
    }
    ConditionOutcome::Pass
}

fn check_c(s: &TripleSet, types: &TypeSet) -> (ConditionOutcome, Option<usize>) {
    let mut counts = vec![0usize; types.len()];
    for t in s.triples() {
        for pair in [
            canonical_pair(t[0], t[1]),
            canonical_pair(t[0], t[2]),
            canonical_pair(t[1], t[2]),
        ] {
            let idx = types.index_of(pair).expect("type derived from this triple");
            counts[idx] += 1;
        }
    }
    let expected = counts[0];
    for (i, &c) in counts.iter().enumerate() {
        if c != expected {
            let tau = types.types()[i];
            return (
                ConditionOutcome::Fail {
                    witness: Witness::EdgeIrregular {
                        tau: [tau[0].0, tau[1].0],
                        count: c,
                        expected,
                    },
                },
                None,
            );
        }
    }
    (ConditionOutcome::Pass, Some(expected))
}

fn check_d(local: &Graph) -> ConditionOutcome {
    let total = local.vertex_count();
    let reached = local.reachable_from_zero();
    if reached == total {
        ConditionOutcome::Pass
    } else {
        ConditionOutcome::Fail {
            witness: Witness::DisconnectedLocalGraph { reached, total },
        }
    }
}

fn check_e(group: &FiniteGroup, types: &TypeSet) -> ConditionOutcome {
    for &[a, b] in types.types() {
        if group.mul_unchecked(a, b) != group.mul_unchecked(b, a) {
            return ConditionOutcome::Fail {
                witness: Witness::NonCommutingType { a: a.0, b: b.0 },
            };
        }
    }
    ConditionOutcome::Pass
}

/// Run all six condition checks; none are short-circuited.
pub fn check_all(group: &FiniteGroup, s: &TripleSet) -> (TypeSet, ConditionReport) {
    let types = derive_types(s);
    let local = build_local_graph(s, &types);
    let (c, d_tilde) = check_c(s, &types);
    let report = ConditionReport {
        zero: check_zero(group, &types),
        a: check_a(group, &types),
        b: check_b(group, &types),
        c,
        d: check_d(&local),
        e: check_e(group, &types),
        d_tilde,
    };
    (types, report)
}

/// The local graph `L` on types: two types adjacent once per triple
/// containing both. Loopless; multiplicity is kept.
pub fn build_local_graph(s: &TripleSet, types: &TypeSet) -> Graph {
    let mut edges = Vec::with_capacity(3 * s.len());
    for t in s.triples() {
        let i1 = types.index_of(canonical_pair(t[0], t[1])).unwrap() as u32;
        let i2 = types.index_of(canonical_pair(t[0], t[2])).unwrap() as u32;
        let i3 = types.index_of(canonical_pair(t[1], t[2])).unwrap() as u32;
        edges.push((i1.min(i2), i1.max(i2)));
        edges.push((i1.min(i3), i1.max(i3)));
        edges.push((i2.min(i3), i2.max(i3)));
    }
    let labels = types
        .types()
        .iter()
        .map(|t| format!("{{{},{}}}", t[0].0, t[1].0))
        .collect();
    Graph::from_edges(types.len(), &edges)
        .expect("local graph edges are in range")
        .with_labels(labels)
}

/// `Cay(G, T)` under the type action `tau . g = tau_1 tau_2 g`; the
/// generator multiset is one product per type. Requires commuting types
/// (condition E) and no identity products (condition 0).
pub fn build_gcay(group: &FiniteGroup, types: &TypeSet) -> Result<Graph> {
    let mut gens = Vec::with_capacity(types.len());
    for &[a, b] in types.types() {
        let ab = group.mul_unchecked(a, b);
        let ba = group.mul_unchecked(b, a);
        if ab != ba {
            return Err(Error::Structural(format!(
                "type {{{},{}}} does not commute; the Cayley action is ill-defined",
                a.0, b.0
            )));
        }
        if ab == group.identity() {
            return Err(Error::Structural(format!(
                "type {{{},{}}} multiplies to the identity; Cay(G,T) would have self-loops",
                a.0, b.0
            )));
        }
        gens.push(ab);
    }
    cayley_graph(group, &gens)
}

/// Generic pass/fail outcome carrying a witness on failure.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CheckResult<W> {
    Pass,
    Fail { witness: W },
}

impl<W> CheckResult<W> {
    pub fn is_pass(&self) -> bool {
        matches!(self, CheckResult::Pass)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            CheckResult::Pass => None,
            CheckResult::Fail { witness } => Some(witness),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoCentersFailure {
    pub edge: [usize; 2],
    pub centers: Vec<(usize, usize)>,
}

/// Size summary of a built structure, for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureSizes {
    pub group_order: usize,
    pub triples: usize,
    pub types: usize,
    pub d_tilde: usize,
    pub hyper_triples: usize,
    pub skeleton_edges: usize,
}

/// A validated commutative triplet structure with its derived data.
#[derive(Debug, Clone)]
pub struct TripletStructure {
    group: FiniteGroup,
    triple_set: TripleSet,
    type_set: TypeSet,
    hyper_triples: Vec<[GroupElement; 3]>,
    skeleton: Vec<[GroupElement; 2]>,
    skeleton_index: HashMap<[GroupElement; 2], u32>,
    d_tilde: usize,
    /// index of the inverse type of each type
    inv_type: Vec<u32>,
    /// `tau_1 tau_2` per type
    type_product: Vec<GroupElement>,
    /// the two (center, type) pairs of each skeleton edge
    centers: Vec<Vec<(GroupElement, u32)>>,
    local: Graph,
    report: ConditionReport,
}

/// Build the structure `St(G, S)`; all six conditions must hold.
pub fn build_structure(group: FiniteGroup, triple_set: TripleSet) -> Result<TripletStructure> {
    let (type_set, report) = check_all(&group, &triple_set);
    if !report.all_pass() {
        return Err(Error::Conditions(Box::new(report)));
    }
    let d_tilde = report.d_tilde.expect("condition C passed");

    let mut hyper: BTreeSet<[GroupElement; 3]> = BTreeSet::new();
    for g in group.elements() {
        for t in triple_set.triples() {
            let mut h = [
                group.mul_unchecked(t[0], g),
                group.mul_unchecked(t[1], g),
                group.mul_unchecked(t[2], g),
            ];
            h.sort_unstable();
            hyper.insert(h);
        }
    }
    let hyper_triples: Vec<_> = hyper.into_iter().collect();
    if hyper_triples.len() != triple_set.len() * group.order() {
        return Err(Error::Structural(format!(
            "translate map is not injective: {} hyper-triples, expected {}",
            hyper_triples.len(),
            triple_set.len() * group.order()
        )));
    }

    let mut skel: BTreeSet<[GroupElement; 2]> = BTreeSet::new();
    for t in &hyper_triples {
        skel.insert([t[0], t[1]]);
        skel.insert([t[0], t[2]]);
        skel.insert([t[1], t[2]]);
    }
    let skeleton: Vec<_> = skel.into_iter().collect();
    if 2 * skeleton.len() != group.order() * type_set.len() {
        return Err(Error::Structural(format!(
            "skeleton has {} edges, expected |G| |T| / 2 = {}",
            skeleton.len(),
            group.order() * type_set.len() / 2
        )));
    }
    let skeleton_index: HashMap<[GroupElement; 2], u32> = skeleton
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i as u32))
        .collect();

    let mut inv_type = Vec::with_capacity(type_set.len());
    let mut type_product = Vec::with_capacity(type_set.len());
    for &[a, b] in type_set.types() {
        let inv_pair = canonical_pair(group.inv_unchecked(b), group.inv_unchecked(a));
        let idx = type_set
            .index_of(inv_pair)
            .expect("condition A passed") as u32;
        inv_type.push(idx);
        type_product.push(group.mul_unchecked(a, b));
    }

    let mut centers = vec![Vec::with_capacity(2); skeleton.len()];
    for g in group.elements() {
        for (ti, &[a, b]) in type_set.types().iter().enumerate() {
            let e = canonical_pair(group.mul_unchecked(a, g), group.mul_unchecked(b, g));
            let idx = skeleton_index[&e] as usize;
            centers[idx].push((g, ti as u32));
        }
    }

    let local = build_local_graph(&triple_set, &type_set);
    match local.check_regular() {
        Ok(d) if d == 2 * d_tilde => {}
        other => {
            return Err(Error::Structural(format!(
                "local graph is not 2 d_tilde = {} regular: {:?}",
                2 * d_tilde,
                other
            )))
        }
    }

    Ok(TripletStructure {
        group,
        triple_set,
        type_set,
        hyper_triples,
        skeleton,
        skeleton_index,
        d_tilde,
        inv_type,
        type_product,
        centers,
        local,
        report,
    })
}

impl TripletStructure {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn triple_set(&self) -> &TripleSet {
        &self.triple_set
    }

    pub fn type_set(&self) -> &TypeSet {
        &self.type_set
    }

    pub fn hyper_triples(&self) -> &[[GroupElement; 3]] {
        &self.hyper_triples
    }

    pub fn skeleton(&self) -> &[[GroupElement; 2]] {
        &self.skeleton
    }

    pub fn d_tilde(&self) -> usize {
        self.d_tilde
    }

    pub fn condition_report(&self) -> &ConditionReport {
        &self.report
    }

    /// The local graph `L`, as built during validation.
    pub fn local_graph(&self) -> &Graph {
        &self.local
    }

    pub fn inverse_type(&self, type_idx: usize) -> usize {
        self.inv_type[type_idx] as usize
    }

    pub fn type_product(&self, type_idx: usize) -> GroupElement {
        self.type_product[type_idx]
    }

    pub fn skeleton_index(&self, edge: [GroupElement; 2]) -> Option<u32> {
        self.skeleton_index.get(&edge).copied()
    }

    /// The skeleton edge `{tau_1 g, tau_2 g}` of center `g` and type `tau`.
    pub fn edge_of(&self, g: GroupElement, tau: [GroupElement; 2]) -> Result<[GroupElement; 2]> {
        let idx = self
            .type_set
            .index_of(tau)
            .ok_or_else(|| Error::Domain(format!("{{{},{}}} is not a type", tau[0].0, tau[1].0)))?;
        if !self.group.contains(g) {
            return Err(Error::InvalidElement {
                index: g.0,
                order: self.group.order(),
            });
        }
        Ok(self.edge_of_type_index(g, idx))
    }

    #[inline]
    pub fn edge_of_type_index(&self, g: GroupElement, type_idx: usize) -> [GroupElement; 2] {
        let [a, b] = self.type_set.types()[type_idx];
        canonical_pair(
            self.group.mul_unchecked(a, g),
            self.group.mul_unchecked(b, g),
        )
    }

    /// The set of `(center, type)` pairs describing a skeleton edge.
    pub fn centers_of(&self, edge: [GroupElement; 2]) -> Result<&[(GroupElement, u32)]> {
        let idx = self.skeleton_index(edge).ok_or_else(|| {
            Error::Domain(format!(
                "{{{},{}}} is not a skeleton edge",
                edge[0].0, edge[1].0
            ))
        })?;
        Ok(&self.centers[idx as usize])
    }

    pub(crate) fn centers_by_index(&self, skeleton_idx: usize) -> &[(GroupElement, u32)] {
        &self.centers[skeleton_idx]
    }

    /// Every skeleton edge has exactly two centers, related by
    /// `(c, tau) -> (tau . c, tau^{-1})`. Exhaustive.
    pub fn verify_two_centers(&self) -> CheckResult<TwoCentersFailure> {
        for (idx, cs) in self.centers.iter().enumerate() {
            let fail = || CheckResult::Fail {
                witness: TwoCentersFailure {
                    edge: [self.skeleton[idx][0].0, self.skeleton[idx][1].0],
                    centers: cs.iter().map(|&(g, t)| (g.0, t as usize)).collect(),
                },
            };
            if cs.len() != 2 {
                return fail();
            }
            let (c1, t1) = cs[0];
            let (c2, t2) = cs[1];
            let moved = self.group.mul_unchecked(self.type_product[t1 as usize], c1);
            if c2 != moved || t2 != self.inv_type[t1 as usize] {
                return fail();
            }
        }
        CheckResult::Pass
    }

    /// `Cay(G, T)` for this structure's group and types.
    pub fn cayley_graph(&self) -> Result<Graph> {
        build_gcay(&self.group, &self.type_set)
    }

    pub fn sizes(&self) -> StructureSizes {
        StructureSizes {
            group_order: self.group.order(),
            triples: self.triple_set.len(),
            types: self.type_set.len(),
            d_tilde: self.d_tilde,
            hyper_triples: self.hyper_triples.len(),
            skeleton_edges: self.skeleton.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn f2(t: u32) -> FiniteGroup {
        FiniteGroup::boolean_vector_space(t).unwrap()
    }

    /// All 3-subsets of `s`.
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

    #[test]
    fn derive_types_examples() {
        let g = f2(3);
        let s = TripleSet::new(&g, vec![[1, 2, 4]]).unwrap();
        let types = derive_types(&s);
        assert_eq!(types.len(), 3);
        assert_eq!(
            types.types(),
            &[
                [GroupElement(1), GroupElement(2)],
                [GroupElement(1), GroupElement(4)],
                [GroupElement(2), GroupElement(4)]
            ]
        );

        let g4 = f2(4);
        let s = TripleSet::new(&g4, choose3(&[1, 2, 4, 8, 15])).unwrap();
        assert_eq!(s.len(), 10);
        assert_eq!(derive_types(&s).len(), 10);
    }

    #[test]
    fn single_triple_structure_over_f2_cubed() {
        let g = f2(3);
        let s = TripleSet::new(&g, vec![[1, 2, 4]]).unwrap();
        let (_, report) = check_all(&g, &s);
        assert!(report.all_pass(), "{report:?}");
        assert_eq!(report.d_tilde, Some(1));
        let h = build_structure(g, s).unwrap();
        assert_eq!(h.hyper_triples().len(), 8);
        assert_eq!(h.skeleton().len(), 12);
        assert!(h.verify_two_centers().is_pass());
        // local graph is the triangle
        assert_eq!(h.local_graph().vertex_count(), 3);
        assert_eq!(h.local_graph().check_regular().unwrap(), 2);
        // Cay(G,T) has degree 3 with generators a+b, a+c, b+c
        let cay = h.cayley_graph().unwrap();
        assert_eq!(cay.check_regular().unwrap(), 3);
        assert_eq!(cay.multiplicity(0, 3), 1);
        assert_eq!(cay.multiplicity(0, 5), 1);
        assert_eq!(cay.multiplicity(0, 6), 1);
    }

    #[test]
    fn conlon_fixture_conditions_and_counts() {
        let g = f2(4);
        let s = TripleSet::new(&g, choose3(&[1, 2, 4, 8, 15])).unwrap();
        let (types, report) = check_all(&g, &s);
        assert!(report.all_pass(), "{report:?}");
        assert_eq!(report.d_tilde, Some(3));
        assert_eq!(types.len(), 10);
        let h = build_structure(g, s).unwrap();
        assert_eq!(h.hyper_triples().len(), 160);
        assert_eq!(h.skeleton().len(), 80);
        assert!(h.verify_two_centers().is_pass());
        assert_eq!(h.local_graph().check_regular().unwrap(), 6);
        assert!(h.local_graph().is_connected().unwrap());
    }

    #[test]
    fn two_centers_oracle_matches_brute_force_scan() {
        // brute-force inverse image of e over all (g, tau), independent of
        // the precomputed center map
        let g = f2(4);
        let s = TripleSet::new(&g, choose3(&[1, 2, 4, 8, 15])).unwrap();
        let h = build_structure(g.clone(), s).unwrap();
        for &edge in h.skeleton() {
            let mut brute = Vec::new();
            for ge in g.elements() {
                for (ti, _) in h.type_set().types().iter().enumerate() {
                    if h.edge_of_type_index(ge, ti) == edge {
                        brute.push((ge, ti as u32));
                    }
                }
            }
            assert_eq!(brute.len(), 2);
            assert_eq!(brute.as_slice(), h.centers_of(edge).unwrap());
        }
    }

    #[test]
    fn second_center_in_characteristic_two() {
        // for tau = {a,b} over F2^t the second center of e(c, tau) is a+b+c
        let g = f2(3);
        let s = TripleSet::new(&g, vec![[1, 2, 4]]).unwrap();
        let h = build_structure(g, s).unwrap();
        let edge = h
            .edge_of(GroupElement(6), [GroupElement(1), GroupElement(2)])
            .unwrap();
        let centers = h.centers_of(edge).unwrap();
        let cs: Vec<usize> = centers.iter().map(|&(c, _)| c.0).collect();
        assert!(cs.contains(&6));
        assert!(cs.contains(&(1 ^ 2 ^ 6)));
    }

    #[test]
    fn edge_of_identity_and_translation_invariance() {
        let g = f2(4);
        let s = TripleSet::new(&g, choose3(&[1, 2, 4, 8, 15])).unwrap();
        let h = build_structure(g.clone(), s).unwrap();
        // e(identity, tau) = tau
        for &tau in h.type_set().types() {
            assert_eq!(h.edge_of(GroupElement(0), tau).unwrap(), tau);
        }
        // e(tau . g, tau^{-1}) = e(g, tau), exhaustively
        for ge in g.elements() {
            for ti in 0..h.type_set().len() {
                let e1 = h.edge_of_type_index(ge, ti);
                let moved = g.mul_unchecked(h.type_product(ti), ge);
                let e2 = h.edge_of_type_index(moved, h.inverse_type(ti));
                assert_eq!(e1, e2);
            }
        }
    }

    #[test]
    fn edge_of_rejects_non_type() {
        let g = f2(3);
        let s = TripleSet::new(&g, vec![[1, 2, 4]]).unwrap();
        let h = build_structure(g, s).unwrap();
        assert!(matches!(
            h.edge_of(GroupElement(0), [GroupElement(3), GroupElement(5)]),
            Err(Error::Domain(_))
        ));
        // {0,7} differs by 7, which is no type product, so it is no edge
        assert!(matches!(
            h.centers_of([GroupElement(0), GroupElement(7)]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn non_sidon_set_fails_condition_b_with_replayable_witness() {
        // e1, e2, e1+e3, e2+e3: the pair sums 1+6 and 2+5 collide
        let g = f2(4);
        let s = TripleSet::new(&g, choose3(&[1, 2, 5, 6])).unwrap();
        let (_, report) = check_all(&g, &s);
        assert!(!report.b.is_pass());
        let w = report.b.witness().unwrap();
        match w {
            Witness::FourCycle { t, t_prime, key } => {
                // replay: same key, not inverse-related
                let k1 = g
                    .mul_unchecked(GroupElement(t[0]), g.inv_unchecked(GroupElement(t[1])))
                    .0;
                let k2 = g
                    .mul_unchecked(
                        GroupElement(t_prime[0]),
                        g.inv_unchecked(GroupElement(t_prime[1])),
                    )
                    .0;
                assert_eq!(k1, *key);
                assert_eq!(k2, *key);
                assert_ne!(t, t_prime);
                let inverse_related = t_prime[1] == g.inv_unchecked(GroupElement(t[0])).0
                    && t_prime[0] == g.inv_unchecked(GroupElement(t[1])).0;
                assert!(!inverse_related);
            }
            other => panic!("expected a four-cycle witness, got {other:?}"),
        }
        assert!(build_structure(g, s).is_err());
    }

    #[test]
    fn condition_zero_fails_on_inverse_pair() {
        let g = FiniteGroup::cyclic(5).unwrap();
        let s = TripleSet::new(&g, vec![[1, 4, 2]]).unwrap();
        let (_, report) = check_all(&g, &s);
        assert_eq!(
            report.zero.witness(),
            Some(&Witness::InversePairType { a: 1, b: 4 })
        );
    }

    #[test]
    fn condition_a_fails_without_inverse_types() {
        let g = FiniteGroup::cyclic(7).unwrap();
        let s = TripleSet::new(&g, vec![[1, 2, 4]]).unwrap();
        let (_, report) = check_all(&g, &s);
        assert!(!report.a.is_pass());
        // adding the negated triple repairs condition A
        let s2 = TripleSet::new(&g, vec![[1, 2, 4], [3, 5, 6]]).unwrap();
        let (_, report2) = check_all(&g, &s2);
        assert!(report2.a.is_pass());
        // but the local graph splits into two triangles
        assert!(!report2.d.is_pass());
    }

    #[test]
    fn condition_e_fails_on_noncommuting_table_group() {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let compose = |p: &[usize; 3], q: &[usize; 3]| [p[q[0]], p[q[1]], p[q[2]]];
        let idx = |r: &[usize; 3]| perms.iter().position(|p| p == r).unwrap();
        let mul: Vec<Vec<usize>> = perms
            .iter()
            .map(|p| perms.iter().map(|q| idx(&compose(p, q))).collect())
            .collect();
        let g = FiniteGroup::from_table(mul).unwrap();
        let s = TripleSet::new(&g, vec![[1, 4, 2]]).unwrap();
        let (_, report) = check_all(&g, &s);
        assert!(!report.e.is_pass());
    }

    #[test]
    fn triple_set_validation() {
        let g = f2(3);
        assert!(TripleSet::new(&g, vec![]).is_err());
        assert!(TripleSet::new(&g, vec![[1, 1, 2]]).is_err());
        assert!(TripleSet::new(&g, vec![[1, 2, 9]]).is_err());
        assert!(TripleSet::new(&g, vec![[1, 2, 4], [4, 2, 1]]).is_err());
        let s = TripleSet::new(&g, vec![[4, 2, 1]]).unwrap();
        let json = s.to_json();
        let back = TripleSet::from_json(&g, &json).unwrap();
        assert_eq!(back.triples(), s.triples());
        assert!(TripleSet::from_json(&g, "{not json").is_err());
    }
}
