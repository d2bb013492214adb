//! Finite groups with exact arithmetic on element indices.
//!
//! Every group exposes elements as indices `0..n-1` with the identity at 0.
//! Structured groups (cyclic, direct, semidirect) use a mixed-radix encoding
//! with the first-listed component varying fastest, so a subset of any group
//! is just a bit vector over indices. Table groups carry a dense Cayley table
//! validated at construction.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::modmat;
use crate::subset::Subset;

/// Shape of the normal part of a semidirect product: (Z/modulus)^rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalShape {
    pub modulus: u64,
    pub rank: usize,
}

/// Canonical construction descriptor. Serializes to the wire schema:
/// `{"cyclic": n}`, `{"direct": [spec, spec]}`,
/// `{"semidirect": {"normal": {"modulus": m, "rank": d}, "quotient": h, "matrix": [[..]]}}`,
/// `{"table": [[..]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupSpec {
    Cyclic(u64),
    Direct(Box<GroupSpec>, Box<GroupSpec>),
    Semidirect {
        normal: NormalShape,
        quotient: u64,
        matrix: Vec<Vec<u64>>,
    },
    Table(Vec<Vec<u32>>),
}

impl GroupSpec {
    pub fn from_json(s: &str) -> Result<GroupSpec> {
        serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    fn order(&self) -> Result<u128> {
        Ok(match self {
            GroupSpec::Cyclic(n) => *n as u128,
            GroupSpec::Direct(a, b) => a.order()?.saturating_mul(b.order()?),
            GroupSpec::Semidirect {
                normal, quotient, ..
            } => (normal.modulus as u128)
                .checked_pow(normal.rank as u32)
                .unwrap_or(u128::MAX)
                .saturating_mul(*quotient as u128),
            GroupSpec::Table(rows) => rows.len() as u128,
        })
    }
}

/// Structured representation node mirroring the construction tree.
#[derive(Debug, Clone)]
pub(crate) enum Node {
    Cyclic {
        n: u64,
    },
    Direct {
        left: Box<Node>,
        right: Box<Node>,
        left_order: u64,
        order: u64,
    },
    Semidirect {
        modulus: u64,
        rank: usize,
        quotient: u64,
        /// phi(z) = matrix^z for z in 0..quotient, each row-major rank x rank.
        powers: Vec<Vec<u64>>,
        normal_order: u64,
        order: u64,
    },
}

impl Node {
    fn order(&self) -> u64 {
        match self {
            Node::Cyclic { n } => *n,
            Node::Direct { order, .. } => *order,
            Node::Semidirect { order, .. } => *order,
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        match self {
            Node::Cyclic { n } => {
                let s = a + b;
                if s >= *n {
                    s - n
                } else {
                    s
                }
            }
            Node::Direct {
                left,
                right,
                left_order,
                ..
            } => {
                let l = left.mul(a % left_order, b % left_order);
                let r = right.mul(a / left_order, b / left_order);
                l + left_order * r
            }
            Node::Semidirect {
                modulus,
                rank,
                quotient,
                powers,
                normal_order,
                ..
            } => {
                let (na, ha) = (a % normal_order, a / normal_order);
                let (nb, hb) = (b % normal_order, b / normal_order);
                let act = &powers[ha as usize];
                // n = na + phi(ha)(nb), componentwise mod modulus
                let mut out_n = 0u64;
                let mut radix = 1u64;
                let mut vb = [0u64; modmat::MAX_RANK];
                let mut tmp = nb;
                for slot in vb.iter_mut().take(*rank) {
                    *slot = tmp % modulus;
                    tmp /= modulus;
                }
                let mut ta = na;
                for i in 0..*rank {
                    let mut acc = ta % modulus;
                    ta /= modulus;
                    for j in 0..*rank {
                        acc = (acc + act[i * rank + j] * vb[j]) % modulus;
                    }
                    out_n += acc * radix;
                    radix *= modulus;
                }
                let h = (ha + hb) % quotient;
                out_n + normal_order * h
            }
        }
    }

    fn inverse(&self, a: u64) -> u64 {
        match self {
            Node::Cyclic { n } => {
                if a == 0 {
                    0
                } else {
                    n - a
                }
            }
            Node::Direct {
                left,
                right,
                left_order,
                ..
            } => left.inverse(a % left_order) + left_order * right.inverse(a / left_order),
            Node::Semidirect {
                modulus,
                rank,
                quotient,
                powers,
                normal_order,
                ..
            } => {
                // (n, h)^-1 = (-phi(h^-1)(n), h^-1)
                let (na, ha) = (a % normal_order, a / normal_order);
                let hinv = if ha == 0 { 0 } else { quotient - ha };
                let act = &powers[hinv as usize];
                let mut v = [0u64; modmat::MAX_RANK];
                let mut tmp = na;
                for slot in v.iter_mut().take(*rank) {
                    *slot = tmp % modulus;
                    tmp /= modulus;
                }
                let mut out_n = 0u64;
                let mut radix = 1u64;
                for i in 0..*rank {
                    let mut acc = 0u64;
                    for j in 0..*rank {
                        acc = (acc + act[i * rank + j] * v[j]) % modulus;
                    }
                    let neg = if acc == 0 { 0 } else { modulus - acc };
                    out_n += neg * radix;
                    radix *= modulus;
                }
                out_n + normal_order * hinv
            }
        }
    }

    /// Structural generating set (element indices).
    fn generators(&self, offset: u64, stride: u64, out: &mut Vec<u64>) {
        match self {
            Node::Cyclic { n } => {
                if *n > 1 {
                    out.push(offset + stride);
                }
            }
            Node::Direct {
                left,
                right,
                left_order,
                ..
            } => {
                left.generators(offset, stride, out);
                right.generators(offset, stride * left_order, out);
            }
            Node::Semidirect {
                modulus,
                rank,
                quotient,
                normal_order,
                ..
            } => {
                if *modulus > 1 {
                    let mut radix = 1u64;
                    for _ in 0..*rank {
                        out.push(offset + stride * radix);
                        radix *= modulus;
                    }
                }
                if *quotient > 1 {
                    out.push(offset + stride * normal_order);
                }
            }
        }
    }

    /// Element order via component structure where cheap.
    fn element_order(&self, a: u64) -> u64 {
        match self {
            Node::Cyclic { n } => {
                if *n == 0 {
                    1
                } else {
                    n / modmat::gcd(*n, a)
                }
            }
            Node::Direct {
                left,
                right,
                left_order,
                ..
            } => {
                let lo = left.element_order(a % left_order);
                let ro = right.element_order(a / left_order);
                modmat::lcm_checked(lo, ro).expect("component orders fit u64")
            }
            Node::Semidirect { .. } => {
                // bounded by the group order; walk powers
                let mut x = a;
                let mut t = 1u64;
                while x != 0 {
                    x = self.mul(x, a);
                    t += 1;
                }
                t
            }
        }
    }
}

/// A finite group with identity at index 0.
pub struct FiniteGroup {
    order: u64,
    repr: Repr,
    spec: GroupSpec,
    caps: Caps,
}

pub(crate) enum Repr {
    Table {
        table: Vec<u32>,
        inverses: Vec<u32>,
    },
    Structured(Node),
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup(order={}, spec={})", self.order, self.spec.to_json())
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}
impl Eq for FiniteGroup {}

impl FiniteGroup {
    /// Build a group from its construction descriptor with default caps.
    pub fn from_spec(spec: &GroupSpec) -> Result<Arc<FiniteGroup>> {
        Self::from_spec_with(spec, Caps::default())
    }

    pub fn from_spec_with(spec: &GroupSpec, caps: Caps) -> Result<Arc<FiniteGroup>> {
        let order_wide = spec.order()?;
        if order_wide == 0 {
            return Err(Error::InvalidSpec("group order must be positive".into()));
        }
        if order_wide > caps.max_order as u128 {
            return Err(Error::OrderOverflow {
                order: order_wide,
                max: caps.max_order,
            });
        }
        let repr = match spec {
            GroupSpec::Table(rows) => {
                let (table, inverses) = validate_table(rows, &caps)?;
                Repr::Table { table, inverses }
            }
            _ => Repr::Structured(build_node(spec, &caps)?),
        };
        Ok(Arc::new(FiniteGroup {
            order: order_wide as u64,
            repr,
            spec: spec.clone(),
            caps,
        }))
    }

    pub fn cyclic(n: u64) -> Arc<FiniteGroup> {
        Self::from_spec(&GroupSpec::Cyclic(n)).expect("cyclic group always valid")
    }

    #[inline]
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    pub fn is_cyclic_repr(&self) -> bool {
        matches!(self.repr, Repr::Structured(Node::Cyclic { .. }))
    }

    pub(crate) fn node(&self) -> Option<&Node> {
        match &self.repr {
            Repr::Structured(node) => Some(node),
            Repr::Table { .. } => None,
        }
    }

    pub fn is_table_repr(&self) -> bool {
        matches!(self.repr, Repr::Table { .. })
    }

    /// Unchecked product of two element indices.
    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.order && b < self.order);
        match &self.repr {
            Repr::Table { table, .. } => table[(a * self.order + b) as usize] as u64,
            Repr::Structured(node) => node.mul(a, b),
        }
    }

    /// Checked product.
    pub fn op(&self, a: u64, b: u64) -> Result<u64> {
        self.check_index(a)?;
        self.check_index(b)?;
        Ok(self.mul(a, b))
    }

    #[inline]
    pub(crate) fn inv(&self, a: u64) -> u64 {
        debug_assert!(a < self.order);
        match &self.repr {
            Repr::Table { inverses, .. } => inverses[a as usize] as u64,
            Repr::Structured(node) => node.inverse(a),
        }
    }

    /// Two-sided inverse of `a`.
    pub fn inverse(&self, a: u64) -> Result<u64> {
        self.check_index(a)?;
        Ok(self.inv(a))
    }

    /// a^k for k >= 0 by repeated squaring.
    pub fn power(&self, a: u64, k: u64) -> Result<u64> {
        self.check_index(a)?;
        let mut base = a;
        let mut k = k;
        let mut acc = 0u64; // identity
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Least t >= 1 with a^t = identity.
    pub fn element_order(&self, a: u64) -> Result<u64> {
        self.check_index(a)?;
        Ok(match &self.repr {
            Repr::Structured(node) => node.element_order(a),
            Repr::Table { .. } => {
                let mut x = a;
                let mut t = 1u64;
                while x != 0 {
                    x = self.mul(x, a);
                    t += 1;
                }
                t
            }
        })
    }

    /// Smallest prime dividing |G|; None marks the trivial group (no
    /// nontrivial element, conventionally "infinity").
    pub fn p_of_g(&self) -> Option<u64> {
        modmat::smallest_prime_factor(self.order)
    }

    fn check_index(&self, a: u64) -> Result<()> {
        if a < self.order {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: a,
                order: self.order,
            })
        }
    }

    /// Structural generating set; for table groups this is every element.
    pub fn generating_set(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Structured(node) => {
                let mut out = Vec::new();
                node.generators(0, 1, &mut out);
                out
            }
            Repr::Table { .. } => (1..self.order).collect(),
        }
    }

    /// Elements commuting with the whole group. An element commutes with all
    /// of G iff it commutes with a generating set, so structured groups scan
    /// n * |generators| products.
    pub fn center(self: &Arc<Self>) -> Result<Subset> {
        let n = self.order;
        if !self.is_table_repr() && n > self.caps.center_scan {
            return Err(Error::CapExceeded {
                what: "center scan",
                needed: n,
                cap: self.caps.center_scan,
            });
        }
        let gens = self.generating_set();
        let mut bits = Bits::new(n as usize);
        for z in 0..n {
            if gens.iter().all(|&g| self.mul(z, g) == self.mul(g, z)) {
                bits.set(z as usize);
            }
        }
        Ok(Subset::from_bits(Arc::clone(self), bits))
    }

    /// Verify that `sub` is a subgroup (identity, closure, inverses).
    pub fn is_subgroup(&self, sub: &Subset) -> Result<()> {
        if !sub.get(0) {
            return Err(Error::NotASubgroup("identity missing".into()));
        }
        let members: Vec<u64> = sub.indices();
        for &a in &members {
            if !sub.get(self.inv(a)) {
                return Err(Error::NotASubgroup(format!("inverse of {a} missing")));
            }
            for &b in &members {
                if !sub.get(self.mul(a, b)) {
                    return Err(Error::NotASubgroup(format!("{a}*{b} escapes the set")));
                }
            }
        }
        Ok(())
    }

    /// Quotient by a verified normal subgroup; returns a table-backed group
    /// whose elements are the cosets ordered by least member index, together
    /// with the coset index of every element of G.
    pub fn quotient_with_map(self: &Arc<Self>, normal: &Subset) -> Result<(Arc<FiniteGroup>, Vec<u32>)> {
        if !Arc::ptr_eq(normal.group(), self) && normal.group().spec() != self.spec() {
            return Err(Error::GroupMismatch);
        }
        let n = self.order;
        if n > self.caps.quotient {
            return Err(Error::CapExceeded {
                what: "quotient construction",
                needed: n,
                cap: self.caps.quotient,
            });
        }
        self.is_subgroup(normal)?;
        let members: Vec<u64> = normal.indices();
        for g in 0..n {
            let ginv = self.inv(g);
            for &a in &members {
                if !normal.get(self.mul(self.mul(g, a), ginv)) {
                    return Err(Error::NotNormal { by: g as u32 });
                }
            }
        }
        // Ascending scan assigns each coset the index of its least member,
        // which puts the identity coset at 0.
        let mut coset_of = vec![u32::MAX; n as usize];
        let mut reps: Vec<u64> = Vec::new();
        for g in 0..n {
            if coset_of[g as usize] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(g);
            for &a in &members {
                coset_of[self.mul(g, a) as usize] = id;
            }
        }
        let q = reps.len();
        let mut rows = vec![vec![0u32; q]; q];
        for (i, &ri) in reps.iter().enumerate() {
            for (j, &rj) in reps.iter().enumerate() {
                rows[i][j] = coset_of[self.mul(ri, rj) as usize];
            }
        }
        let spec = GroupSpec::Table(rows);
        let group = FiniteGroup::from_spec_with(&spec, self.caps)?;
        Ok((group, coset_of))
    }

    pub fn quotient(self: &Arc<Self>, normal: &Subset) -> Result<Arc<FiniteGroup>> {
        Ok(self.quotient_with_map(normal)?.0)
    }

    /// Upper-central-series nilpotency test, with structural shortcuts for
    /// composed groups whose order exceeds the series cap.
    pub fn is_nilpotent(self: &Arc<Self>) -> Result<bool> {
        match &self.repr {
            Repr::Structured(node) => node_is_nilpotent(node, &self.caps),
            Repr::Table { .. } => {
                if self.order > self.caps.nilpotency {
                    return Err(Error::CapExceeded {
                        what: "nilpotency test",
                        needed: self.order,
                        cap: self.caps.nilpotency,
                    });
                }
                upper_central_series_reaches(self)
            }
        }
    }

    /// Materialize the Cayley table (structured groups only up to the cap).
    pub fn cayley_table(&self) -> Result<Vec<Vec<u32>>> {
        let n = self.order;
        if n > self.caps.table_materialize {
            return Err(Error::CapExceeded {
                what: "table materialization",
                needed: n,
                cap: self.caps.table_materialize,
            });
        }
        let mut rows = vec![vec![0u32; n as usize]; n as usize];
        for a in 0..n {
            for b in 0..n {
                rows[a as usize][b as usize] = self.mul(a, b) as u32;
            }
        }
        Ok(rows)
    }

    /// Format an element as a nested tuple matching the construction tree,
    /// e.g. `((2,0),1)` for a semidirect group or `3` for a cyclic one.
    pub fn format_element(&self, a: u64) -> String {
        match &self.repr {
            Repr::Table { .. } => a.to_string(),
            Repr::Structured(node) => format_node_element(node, a),
        }
    }

    /// Parse an element given as a flat index or a nested tuple (JSON array
    /// syntax) matching the construction tree.
    pub fn parse_element(&self, text: &str) -> Result<u64> {
        let text = text.trim();
        if let Ok(v) = text.parse::<u64>() {
            self.check_index(v)?;
            return Ok(v);
        }
        let json: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::BadElementLiteral(format!("{text}: {e}")))?;
        self.element_from_json(&json)
    }

    pub fn element_from_json(&self, v: &serde_json::Value) -> Result<u64> {
        let idx = match &self.repr {
            Repr::Table { .. } => as_index(v)?,
            Repr::Structured(node) => element_from_json_node(node, v)?,
        };
        self.check_index(idx)?;
        Ok(idx)
    }
}

fn as_index(v: &serde_json::Value) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::BadElementLiteral(format!("expected integer, got {v}")))
}

fn element_from_json_node(node: &Node, v: &serde_json::Value) -> Result<u64> {
    if let Some(i) = v.as_i64() {
        // flat index or (for cyclic nodes) a residue, possibly negative
        if let Node::Cyclic { n } = node {
            let m = *n as i64;
            return Ok(i.rem_euclid(m) as u64);
        }
        if i < 0 {
            return Err(Error::BadElementLiteral(format!("negative index {i}")));
        }
        if i as u64 >= node.order() {
            return Err(Error::BadElementLiteral(format!(
                "index {i} out of range for component of order {}",
                node.order()
            )));
        }
        return Ok(i as u64);
    }
    let arr = v
        .as_array()
        .ok_or_else(|| Error::BadElementLiteral(format!("expected array, got {v}")))?;
    match node {
        Node::Cyclic { .. } => Err(Error::BadElementLiteral(
            "tuple given for a cyclic component".into(),
        )),
        Node::Direct {
            left,
            right,
            left_order,
            ..
        } => {
            if arr.len() != 2 {
                return Err(Error::BadElementLiteral("expected a pair".into()));
            }
            let l = element_from_json_node(left, &arr[0])?;
            let r = element_from_json_node(right, &arr[1])?;
            Ok(l + left_order * r)
        }
        Node::Semidirect {
            modulus,
            rank,
            quotient,
            normal_order,
            ..
        } => {
            if arr.len() != 2 {
                return Err(Error::BadElementLiteral(
                    "expected [normal-tuple, quotient]".into(),
                ));
            }
            let coords = arr[0]
                .as_array()
                .ok_or_else(|| Error::BadElementLiteral("expected coordinate array".into()))?;
            if coords.len() != *rank {
                return Err(Error::BadElementLiteral(format!(
                    "expected {rank} coordinates, got {}",
                    coords.len()
                )));
            }
            let mut n_idx = 0u64;
            let mut radix = 1u64;
            for c in coords {
                let raw = c
                    .as_i64()
                    .ok_or_else(|| Error::BadElementLiteral("coordinate must be integer".into()))?;
                n_idx += raw.rem_euclid(*modulus as i64) as u64 * radix;
                radix *= modulus;
            }
            let z = arr[1]
                .as_i64()
                .ok_or_else(|| Error::BadElementLiteral("quotient part must be integer".into()))?
                .rem_euclid(*quotient as i64) as u64;
            Ok(n_idx + normal_order * z)
        }
    }
}

fn format_node_element(node: &Node, a: u64) -> String {
    match node {
        Node::Cyclic { .. } => a.to_string(),
        Node::Direct {
            left,
            right,
            left_order,
            ..
        } => format!(
            "[{},{}]",
            format_node_element(left, a % left_order),
            format_node_element(right, a / left_order)
        ),
        Node::Semidirect {
            modulus,
            rank,
            normal_order,
            ..
        } => {
            let mut coords = Vec::with_capacity(*rank);
            let mut tmp = a % normal_order;
            for _ in 0..*rank {
                coords.push((tmp % modulus).to_string());
                tmp /= modulus;
            }
            format!("[[{}],{}]", coords.join(","), a / normal_order)
        }
    }
}

fn build_node(spec: &GroupSpec, caps: &Caps) -> Result<Node> {
    match spec {
        GroupSpec::Cyclic(n) => {
            if *n == 0 {
                return Err(Error::InvalidSpec("cyclic(0) is not a group".into()));
            }
            Ok(Node::Cyclic { n: *n })
        }
        GroupSpec::Direct(a, b) => {
            let left = build_node(a, caps)?;
            let right = build_node(b, caps)?;
            let left_order = left.order();
            let order = left_order
                .checked_mul(right.order())
                .ok_or(Error::OrderOverflow {
                    order: u128::MAX,
                    max: caps.max_order,
                })?;
            Ok(Node::Direct {
                left: Box::new(left),
                right: Box::new(right),
                left_order,
                order,
            })
        }
        GroupSpec::Semidirect {
            normal,
            quotient,
            matrix,
        } => {
            let m = normal.modulus;
            let d = normal.rank;
            let h = *quotient;
            if m == 0 || h == 0 {
                return Err(Error::InvalidSpec("moduli must be positive".into()));
            }
            if d == 0 || d > modmat::MAX_RANK {
                return Err(Error::InvalidSpec(format!(
                    "normal rank must be in 1..={}",
                    modmat::MAX_RANK
                )));
            }
            if matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
                return Err(Error::InvalidSpec(format!("action matrix must be {d}x{d}")));
            }
            let flat: Vec<u64> = matrix.iter().flatten().map(|&x| x % m).collect();
            if !modmat::is_invertible_mod(&flat, d, m) {
                return Err(Error::MatrixNotInvertible { modulus: m });
            }
            // phi is a homomorphism Z/h -> Aut(N) iff M^h = I
            let mut powers = Vec::with_capacity(h as usize);
            powers.push(modmat::identity(d));
            for z in 1..h {
                let next = modmat::mat_mul(&powers[(z - 1) as usize], &flat, d, m);
                powers.push(next);
            }
            let wrap = modmat::mat_mul(powers.last().unwrap(), &flat, d, m);
            if wrap != modmat::identity(d) {
                return Err(Error::MatrixOrderMismatch {
                    quotient: h,
                    modulus: m,
                });
            }
            let normal_order = (0..d).try_fold(1u64, |acc, _| acc.checked_mul(m)).ok_or(
                Error::OrderOverflow {
                    order: u128::MAX,
                    max: caps.max_order,
                },
            )?;
            let order = normal_order.checked_mul(h).ok_or(Error::OrderOverflow {
                order: u128::MAX,
                max: caps.max_order,
            })?;
            Ok(Node::Semidirect {
                modulus: m,
                rank: d,
                quotient: h,
                powers,
                normal_order,
                order,
            })
        }
        GroupSpec::Table(_) => unreachable!("table specs do not build nodes"),
    }
}

fn validate_table(rows: &[Vec<u32>], caps: &Caps) -> Result<(Vec<u32>, Vec<u32>)> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidSpec("empty table".into()));
    }
    let mut table = Vec::with_capacity(n * n);
    for row in rows {
        if row.len() != n {
            return Err(Error::NotLatinSquare(format!(
                "row length {} != {n}",
                row.len()
            )));
        }
        for &v in row {
            if v as usize >= n {
                return Err(Error::NotLatinSquare(format!("entry {v} out of range")));
            }
            table.push(v);
        }
    }
    // identity at index 0: row 0 and column 0 are the identity map
    for j in 0..n {
        if table[j] != j as u32 || table[j * n] != j as u32 {
            return Err(Error::NoIdentity);
        }
    }
    // Latin square: rows and columns are permutations
    let mut seen = vec![false; n];
    for i in 0..n {
        seen.fill(false);
        for j in 0..n {
            let v = table[i * n + j] as usize;
            if seen[v] {
                return Err(Error::NotLatinSquare(format!("row {i} repeats {v}")));
            }
            seen[v] = true;
        }
    }
    for j in 0..n {
        seen.fill(false);
        for i in 0..n {
            let v = table[i * n + j] as usize;
            if seen[v] {
                return Err(Error::NotLatinSquare(format!("column {j} repeats {v}")));
            }
            seen[v] = true;
        }
    }
    // two-sided inverses
    let mut inverses = vec![u32::MAX; n];
    for a in 0..n {
        let mut found = None;
        for b in 0..n {
            if table[a * n + b] == 0 && table[b * n + a] == 0 {
                found = Some(b as u32);
                break;
            }
        }
        inverses[a] = found.ok_or(Error::NoInverse { element: a as u32 })?;
    }
    // associativity within the cap
    if (n as u64) <= caps.assoc_check {
        for a in 0..n {
            for b in 0..n {
                let ab = table[a * n + b] as usize;
                for c in 0..n {
                    let bc = table[b * n + c] as usize;
                    if table[ab * n + c] != table[a * n + bc] {
                        return Err(Error::NotAssociative {
                            a: a as u32,
                            b: b as u32,
                            c: c as u32,
                        });
                    }
                }
            }
        }
    }
    Ok((table, inverses))
}

fn node_is_nilpotent(node: &Node, caps: &Caps) -> Result<bool> {
    match node {
        Node::Cyclic { .. } => Ok(true),
        Node::Direct { left, right, .. } => {
            Ok(node_is_nilpotent(left, caps)? && node_is_nilpotent(right, caps)?)
        }
        Node::Semidirect {
            modulus,
            rank,
            quotient,
            powers,
            order,
            ..
        } => {
            let trivial_action = powers.len() < 2 || powers[1] == modmat::identity(*rank);
            if trivial_action {
                // a direct product of abelian parts
                return Ok(true);
            }
            if modmat::gcd(*modulus, *quotient) == 1 {
                // A nontrivial action of coprime order cannot occur inside a
                // nilpotent group, where elements of coprime order commute.
                return Ok(false);
            }
            // No structural rule: fall back to the series on a materialized table.
            if *order > caps.nilpotency {
                return Err(Error::CapExceeded {
                    what: "nilpotency test",
                    needed: *order,
                    cap: caps.nilpotency,
                });
            }
            let mut rows = vec![vec![0u32; *order as usize]; *order as usize];
            for a in 0..*order {
                for b in 0..*order {
                    rows[a as usize][b as usize] = node.mul(a, b) as u32;
                }
            }
            let g = FiniteGroup::from_spec_with(&GroupSpec::Table(rows), *caps)?;
            upper_central_series_reaches(&g)
        }
    }
}

/// Z_0 = 1 <= Z_1 <= ... with Z_{i+1} the preimage of the center of G/Z_i;
/// nilpotent iff the chain reaches G.
fn upper_central_series_reaches(g: &Arc<FiniteGroup>) -> Result<bool> {
    let n = g.order();
    let mut z = g.center()?;
    loop {
        let size = z.len() as u64;
        if size == n {
            return Ok(true);
        }
        let (q, coset_of) = g.quotient_with_map(&z)?;
        let zq = q.center()?;
        if zq.len() == 1 {
            return Ok(false); // series stabilized below G
        }
        let mut bits = Bits::new(n as usize);
        for x in 0..n {
            if zq.get(coset_of[x as usize] as u64) {
                bits.set(x as usize);
            }
        }
        let next = Subset::from_bits(Arc::clone(g), bits);
        debug_assert!(next.len() as u64 > size);
        z = next;
    }
}
