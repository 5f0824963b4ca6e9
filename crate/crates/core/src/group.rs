//! Finite groups with dense integer element encodings.
//!
//! Every group element is an index in `[0, order)`. The encoding per kind:
//! bit pattern for `F2^t`, residue for `Z_n`, mixed radix (first factor most
//! significant) for products, row index for explicit tables. Downstream
//! modules rely on these indices being canonical and stable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of a [`FiniteGroup`], by canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub usize);

impl GroupElement {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
enum Kind {
    /// F_2^t with XOR as the law; element index is the bit pattern.
    BoolVec { t: u32 },
    /// Z_n with addition mod n.
    Cyclic { n: usize },
    /// Direct product; mixed-radix encoding, first factor most significant.
    Product {
        factors: Vec<FiniteGroup>,
        strides: Vec<usize>,
    },
    /// Explicit multiplication table, row-major `mul[a * order + b]`.
    Table {
        mul: Vec<usize>,
        inv: Vec<usize>,
        identity: usize,
    },
}

/// A finite group; immutable after construction and safe to share.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    kind: Kind,
    order: usize,
}

/// JSON descriptor for a group, e.g. `{"kind":"f2t","t":4}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupDescriptor {
    F2t { t: u32 },
    Cyclic { n: usize },
    Product { factors: Vec<GroupDescriptor> },
    Table { mul: Vec<Vec<usize>> },
}

impl FiniteGroup {
    pub fn boolean_vector_space(t: u32) -> Result<Self> {
        if t == 0 || t > 24 {
            return Err(Error::Config(format!(
                "F2^t dimension t must be in 1..=24, got {t}"
            )));
        }
        Ok(FiniteGroup {
            kind: Kind::BoolVec { t },
            order: 1usize << t,
        })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("cyclic group order must be positive".into()));
        }
        Ok(FiniteGroup {
            kind: Kind::Cyclic { n },
            order: n,
        })
    }

    pub fn product(factors: Vec<FiniteGroup>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Config("product of zero groups".into()));
        }
        let mut order = 1usize;
        for f in &factors {
            order = order
                .checked_mul(f.order())
                .ok_or_else(|| Error::Config("product group order overflows".into()))?;
        }
        // strides[i] = product of orders of factors after i
        let mut strides = vec![1usize; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1].order();
        }
        Ok(FiniteGroup {
            kind: Kind::Product { factors, strides },
            order,
        })
    }

    /// Build from an explicit multiplication table. Validated on load:
    /// square, entries in range, rows and columns are permutations, a
    /// two-sided identity exists, inverses unique, and associativity holds
    /// (exhaustive up to order 64, seeded sampling above).
    pub fn from_table(mul_rows: Vec<Vec<usize>>) -> Result<Self> {
        let order = mul_rows.len();
        if order == 0 {
            return Err(Error::Config("empty multiplication table".into()));
        }
        let mut mul = Vec::with_capacity(order * order);
        for row in &mul_rows {
            if row.len() != order {
                return Err(Error::Config("multiplication table is not square".into()));
            }
            for &v in row {
                if v >= order {
                    return Err(Error::Config(format!(
                        "table entry {v} out of range for order {order}"
                    )));
                }
                mul.push(v);
            }
        }
        // rows and columns must be permutations
        for a in 0..order {
            let mut seen_row = vec![false; order];
            let mut seen_col = vec![false; order];
            for b in 0..order {
                let r = mul[a * order + b];
                let c = mul[b * order + a];
                if seen_row[r] {
                    return Err(Error::Config(format!("row {a} of table is not a permutation")));
                }
                if seen_col[c] {
                    return Err(Error::Config(format!(
                        "column {a} of table is not a permutation"
                    )));
                }
                seen_row[r] = true;
                seen_col[c] = true;
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| mul[e * order + x] == x && mul[x * order + e] == x))
            .ok_or_else(|| Error::Config("table has no two-sided identity".into()))?;
        // inverses by exhaustive row scan
        let mut inv = vec![usize::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if mul[a * order + b] == identity {
                    if mul[b * order + a] != identity {
                        return Err(Error::Config(format!(
                            "element {a} has one-sided inverse {b}"
                        )));
                    }
                    inv[a] = b;
                    break;
                }
            }
            if inv[a] == usize::MAX {
                return Err(Error::Config(format!("element {a} has no inverse")));
            }
        }
        // associativity: exhaustive when small, seeded sample otherwise
        let check = |a: usize, b: usize, c: usize| -> bool {
            mul[mul[a * order + b] * order + c] == mul[a * order + mul[b * order + c]]
        };
        if order <= 64 {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if !check(a, b, c) {
                            return Err(Error::Config(format!(
                                "table is not associative at ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut state = 0x9E3779B97F4A7C15u64;
            for _ in 0..200_000 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let a = (state >> 33) as usize % order;
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let b = (state >> 33) as usize % order;
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let c = (state >> 33) as usize % order;
                if !check(a, b, c) {
                    return Err(Error::Config(format!(
                        "table is not associative at ({a},{b},{c})"
                    )));
                }
            }
        }
        Ok(FiniteGroup {
            kind: Kind::Table { mul, inv, identity },
            order,
        })
    }

    pub fn from_descriptor(d: &GroupDescriptor) -> Result<Self> {
        match d {
            GroupDescriptor::F2t { t } => Self::boolean_vector_space(*t),
            GroupDescriptor::Cyclic { n } => Self::cyclic(*n),
            GroupDescriptor::Product { factors } => {
                let fs = factors
                    .iter()
                    .map(Self::from_descriptor)
                    .collect::<Result<Vec<_>>>()?;
                Self::product(fs)
            }
            GroupDescriptor::Table { mul } => Self::from_table(mul.clone()),
        }
    }

    pub fn to_descriptor(&self) -> GroupDescriptor {
        match &self.kind {
            Kind::BoolVec { t } => GroupDescriptor::F2t { t: *t },
            Kind::Cyclic { n } => GroupDescriptor::Cyclic { n: *n },
            Kind::Product { factors, .. } => GroupDescriptor::Product {
                factors: factors.iter().map(|f| f.to_descriptor()).collect(),
            },
            Kind::Table { mul, .. } => GroupDescriptor::Table {
                mul: (0..self.order)
                    .map(|a| mul[a * self.order..(a + 1) * self.order].to_vec())
                    .collect(),
            },
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> GroupElement {
        match &self.kind {
            Kind::BoolVec { .. } | Kind::Cyclic { .. } | Kind::Product { .. } => GroupElement(0),
            Kind::Table { identity, .. } => GroupElement(*identity),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.order).map(GroupElement)
    }

    pub fn contains(&self, a: GroupElement) -> bool {
        a.0 < self.order
    }

    fn validate_element(&self, a: GroupElement) -> Result<()> {
        if a.0 < self.order {
            Ok(())
        } else {
            Err(Error::InvalidElement {
                index: a.0,
                order: self.order,
            })
        }
    }

    /// The product `a * b` under the group law.
    pub fn mul(&self, a: GroupElement, b: GroupElement) -> Result<GroupElement> {
        self.validate_element(a)?;
        self.validate_element(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    /// Product without range checks; callers guarantee validity.
    #[inline]
    pub fn mul_unchecked(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        match &self.kind {
            Kind::BoolVec { .. } => GroupElement(a.0 ^ b.0),
            Kind::Cyclic { n } => GroupElement((a.0 + b.0) % n),
            Kind::Product { factors, strides } => {
                let mut out = 0usize;
                for (f, &s) in factors.iter().zip(strides) {
                    let ai = (a.0 / s) % f.order();
                    let bi = (b.0 / s) % f.order();
                    out += f.mul_unchecked(GroupElement(ai), GroupElement(bi)).0 * s;
                }
                GroupElement(out)
            }
            Kind::Table { mul, .. } => GroupElement(mul[a.0 * self.order + b.0]),
        }
    }

    /// The inverse of `a`.
    pub fn inv(&self, a: GroupElement) -> Result<GroupElement> {
        self.validate_element(a)?;
        Ok(self.inv_unchecked(a))
    }

    #[inline]
    pub fn inv_unchecked(&self, a: GroupElement) -> GroupElement {
        match &self.kind {
            Kind::BoolVec { .. } => a,
            Kind::Cyclic { n } => GroupElement((n - a.0) % n),
            Kind::Product { factors, strides } => {
                let mut out = 0usize;
                for (f, &s) in factors.iter().zip(strides) {
                    let ai = (a.0 / s) % f.order();
                    out += f.inv_unchecked(GroupElement(ai)).0 * s;
                }
                GroupElement(out)
            }
            Kind::Table { inv, .. } => GroupElement(inv[a.0]),
        }
    }

    /// Decompose a product-group element into factor indices. Errors for
    /// non-product kinds.
    pub fn components(&self, a: GroupElement) -> Result<Vec<usize>> {
        self.validate_element(a)?;
        match &self.kind {
            Kind::Product { factors, strides } => Ok(factors
                .iter()
                .zip(strides)
                .map(|(f, &s)| (a.0 / s) % f.order())
                .collect()),
            _ => Err(Error::Domain("components() requires a product group".into())),
        }
    }

    /// Compose factor indices into a product-group element.
    pub fn from_components(&self, comps: &[usize]) -> Result<GroupElement> {
        match &self.kind {
            Kind::Product { factors, strides } => {
                if comps.len() != factors.len() {
                    return Err(Error::Domain(format!(
                        "expected {} components, got {}",
                        factors.len(),
                        comps.len()
                    )));
                }
                let mut out = 0usize;
                for ((f, &s), &c) in factors.iter().zip(strides).zip(comps) {
                    if c >= f.order() {
                        return Err(Error::InvalidElement {
                            index: c,
                            order: f.order(),
                        });
                    }
                    out += c * s;
                }
                Ok(GroupElement(out))
            }
            _ => Err(Error::Domain("from_components() requires a product group".into())),
        }
    }

    pub fn factors(&self) -> Option<&[FiniteGroup]> {
        match &self.kind {
            Kind::Product { factors, .. } => Some(factors),
            _ => None,
        }
    }

    /// Exhaustively check the group axioms. Intended for tests and for
    /// validating small hand-provided tables; cost is `order^3` for
    /// associativity so keep the order modest.
    pub fn validate_axioms(&self) -> Result<()> {
        let e = self.identity();
        for a in self.elements() {
            if self.mul_unchecked(e, a) != a || self.mul_unchecked(a, e) != a {
                return Err(Error::Structural(format!(
                    "identity fails at element {}",
                    a.0
                )));
            }
            let ai = self.inv_unchecked(a);
            if self.mul_unchecked(a, ai) != e || self.mul_unchecked(ai, a) != e {
                return Err(Error::Structural(format!(
                    "inverse fails at element {}",
                    a.0
                )));
            }
        }
        for a in self.elements() {
            for b in self.elements() {
                for c in self.elements() {
                    let ab_c = self.mul_unchecked(self.mul_unchecked(a, b), c);
                    let a_bc = self.mul_unchecked(a, self.mul_unchecked(b, c));
                    if ab_c != a_bc {
                        return Err(Error::Structural(format!(
                            "associativity fails at ({},{},{})",
                            a.0, b.0, c.0
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Direct product of groups; order is the product of factor orders.
pub fn product_group(factors: Vec<FiniteGroup>) -> Result<FiniteGroup> {
    FiniteGroup::product(factors)
}
