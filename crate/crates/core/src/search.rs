//! Exhaustive and parameterized verification of sumset lower bounds,
//! critical-pair enumeration, and the inverse-theorem implications.
//!
//! Enumeration is deterministic: subsets are visited by ascending integer
//! value of their bit vector, pairs lexicographically, parameterized scans
//! in lexicographic parameter order. Shards split the outermost index range
//! contiguously, so the union of any full shard family equals the unsharded
//! run. Worker parallelism never changes results: per-chunk partial results
//! are merged in enumeration order.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupSpec};
use crate::modmat;
use crate::morphism::{AutSpec, Automorphism};
use crate::report::{
    CheckLine, ClassifyOutcome, CriticalPairRecord, PairFinding, VerificationReport,
};
use crate::structure;
use crate::subset::Subset;
use crate::sumset;

const RETAIN_FINDINGS: usize = 1000;
const RETAIN_SAMPLES: usize = 8;
const RETAIN_RECORDS: usize = 100_000;

/// Inclusive cardinality window for each side of a pair scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardinalityRange {
    pub k: [usize; 2],
    pub l: [usize; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    AllPairs,
    ApPairsSameDifference,
    GeometricPairsSameRatio,
    SelfPairs,
    SuppliedCandidates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    None,
    Affine,
}

/// Which lower bound a scan checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Cd,
    Eh,
    Olson,
}

fn default_theta() -> AutSpec {
    AutSpec::identity()
}
fn default_mode() -> SearchMode {
    SearchMode::AllPairs
}
fn default_norm() -> Normalization {
    Normalization::None
}
fn default_shard() -> [u64; 2] {
    [0, 1]
}

/// A verification task, serializable as the wire descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchTask {
    pub group_spec: GroupSpec,
    #[serde(default = "default_theta")]
    pub theta_spec: AutSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cardinality_range: Option<CardinalityRange>,
    #[serde(default = "default_mode")]
    pub mode: SearchMode,
    #[serde(default = "default_norm")]
    pub normalization: Normalization,
    #[serde(default = "default_shard")]
    pub shard: [u64; 2],
    /// Subset-literal pairs for `supplied_candidates` mode.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<[String; 2]>,
}

impl SearchTask {
    pub fn new(group_spec: GroupSpec) -> SearchTask {
        SearchTask {
            group_spec,
            theta_spec: default_theta(),
            cardinality_range: None,
            mode: default_mode(),
            normalization: default_norm(),
            shard: default_shard(),
            candidates: Vec::new(),
        }
    }

    pub fn with_mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_theta(mut self, theta: AutSpec) -> Self {
        self.theta_spec = theta;
        self
    }

    pub fn with_cardinalities(mut self, k: [usize; 2], l: [usize; 2]) -> Self {
        self.cardinality_range = Some(CardinalityRange { k, l });
        self
    }

    pub fn with_shard(mut self, index: u64, total: u64) -> Self {
        self.shard = [index, total];
        self
    }

    pub fn with_normalization(mut self, norm: Normalization) -> Self {
        self.normalization = norm;
        self
    }

    pub fn with_candidates(mut self, candidates: Vec<[String; 2]>) -> Self {
        self.candidates = candidates;
        self.mode = SearchMode::SuppliedCandidates;
        self
    }

    pub fn from_json(s: &str) -> Result<SearchTask> {
        serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("task serializes")
    }
}

fn shard_slice(total: u64, shard: [u64; 2]) -> Result<(u64, u64)> {
    let [index, count] = shard;
    if count == 0 || index >= count {
        return Err(Error::BadShard {
            index,
            total: count,
        });
    }
    let base = total / count;
    let rem = total % count;
    let lo = index * base + index.min(rem);
    let hi = lo + base + u64::from(index < rem);
    Ok((lo, hi))
}

// ---------------------------------------------------------------------------
// pair scanning
// ---------------------------------------------------------------------------

/// Per-chunk accumulation, merged in enumeration order.
#[derive(Default)]
struct Partial {
    checked: u64,
    criticals: u64,
    out_of_scope: u64,
    degenerate: u64,
    violations: Vec<PairFinding>,
    failures: Vec<PairFinding>,
    samples: Vec<CriticalPairRecord>,
    records: Vec<CriticalPairRecord>,
}

struct ScanCtx {
    group: Arc<FiniteGroup>,
    theta: Automorphism,
    delta: u8,
    p_of_g: Option<u64>,
    bound: BoundKind,
    classify: bool,
    nilpotent: Option<bool>,
    affine: Option<AffineMaps>,
    retain_records: usize,
}

struct AffineMaps {
    /// x -> (u*x + t) mod n for every unit u and shift t.
    maps: Vec<Vec<u8>>,
}

impl AffineMaps {
    fn build(n: u64) -> AffineMaps {
        let mut maps = Vec::new();
        for u in 1..n {
            if modmat::gcd(u, n) != 1 {
                continue;
            }
            for t in 0..n {
                maps.push((0..n).map(|x| ((u * x + t) % n) as u8).collect());
            }
        }
        AffineMaps { maps }
    }

    fn transform(map: &[u8], mask: u64) -> u64 {
        let mut out = 0u64;
        let mut m = mask;
        while m != 0 {
            let x = m.trailing_zeros() as usize;
            m &= m - 1;
            out |= 1u64 << map[x];
        }
        out
    }

    /// Orbit size when (ma, mb) is the lexicographically least point of its
    /// orbit, None otherwise.
    fn canonical_orbit(&self, ma: u64, mb: u64) -> Option<u64> {
        let mut stabilizer = 0u64;
        for map in &self.maps {
            let ta = Self::transform(map, ma);
            let tb = Self::transform(map, mb);
            if (ta, tb) < (ma, mb) {
                return None;
            }
            if (ta, tb) == (ma, mb) {
                stabilizer += 1;
            }
        }
        Some(self.maps.len() as u64 / stabilizer)
    }
}

/// Mask-native group arithmetic for |G| <= 63: products and restricted
/// products as pure u64 operations, no allocation per pair.
struct MaskOps {
    n: u64,
    /// Row-major multiplication map for non-cyclic groups.
    table: Option<Vec<u8>>,
    theta_map: Vec<u8>,
    theta_is_identity: bool,
    inv_map: Vec<u8>,
}

impl MaskOps {
    fn build(g: &Arc<FiniteGroup>, theta: &Automorphism) -> Result<MaskOps> {
        let n = g.order();
        debug_assert!(n <= 63);
        let table = if g.is_cyclic_repr() {
            None
        } else {
            let mut t = vec![0u8; (n * n) as usize];
            for a in 0..n {
                for b in 0..n {
                    t[(a * n + b) as usize] = g.op(a, b)? as u8;
                }
            }
            Some(t)
        };
        let theta_map: Vec<u8> = (0..n).map(|x| theta.apply(x) as u8).collect();
        let inv_map: Vec<u8> = (0..n).map(|x| g.inv(x) as u8).collect();
        Ok(MaskOps {
            n,
            table,
            theta_map,
            theta_is_identity: theta.is_identity(),
            inv_map,
        })
    }

    #[inline]
    fn rot(&self, m: u64, a: u64) -> u64 {
        if a == 0 {
            m
        } else {
            (m << a | m >> (self.n - a)) & ((1u64 << self.n) - 1)
        }
    }

    fn product(&self, ma: u64, mb: u64) -> u64 {
        let mut out = 0u64;
        match &self.table {
            None => {
                let mut m = ma;
                while m != 0 {
                    let a = m.trailing_zeros() as u64;
                    m &= m - 1;
                    out |= self.rot(mb, a);
                }
            }
            Some(t) => {
                let mut m = ma;
                while m != 0 {
                    let a = m.trailing_zeros() as u64;
                    m &= m - 1;
                    let row = &t[(a * self.n) as usize..(a * self.n + self.n) as usize];
                    let mut mm = mb;
                    while mm != 0 {
                        let b = mm.trailing_zeros() as usize;
                        mm &= mm - 1;
                        out |= 1u64 << row[b];
                    }
                }
            }
        }
        out
    }

    fn apply_theta_mask(&self, mb: u64) -> u64 {
        if self.theta_is_identity {
            return mb;
        }
        let mut out = 0u64;
        let mut m = mb;
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            out |= 1u64 << self.theta_map[b];
        }
        out
    }

    fn restricted(&self, ma: u64, mb: u64) -> u64 {
        let tb = self.apply_theta_mask(mb);
        let mut out = 0u64;
        match &self.table {
            None => {
                let mut m = ma;
                while m != 0 {
                    let a = m.trailing_zeros() as u64;
                    m &= m - 1;
                    // drop theta(a) from theta(B) when a itself is in B
                    let cur = if mb >> a & 1 == 1 {
                        tb & !(1u64 << self.theta_map[a as usize])
                    } else {
                        tb
                    };
                    out |= self.rot(cur, a);
                }
            }
            Some(t) => {
                let mut m = ma;
                while m != 0 {
                    let a = m.trailing_zeros() as u64;
                    m &= m - 1;
                    let cur = if mb >> a & 1 == 1 {
                        tb & !(1u64 << self.theta_map[a as usize])
                    } else {
                        tb
                    };
                    let row = &t[(a * self.n) as usize..(a * self.n + self.n) as usize];
                    let mut mm = cur;
                    while mm != 0 {
                        let b = mm.trailing_zeros() as usize;
                        mm &= mm - 1;
                        out |= 1u64 << row[b];
                    }
                }
            }
        }
        out
    }

    fn inverse_mask(&self, mb: u64) -> u64 {
        let mut out = 0u64;
        let mut m = mb;
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            out |= 1u64 << self.inv_map[b];
        }
        out
    }
}

impl ScanCtx {
    fn build(task: &SearchTask, caps: Caps, bound: BoundKind, classify: bool) -> Result<ScanCtx> {
        let group = FiniteGroup::from_spec_with(&task.group_spec, caps)?;
        let theta = Automorphism::new(&group, &task.theta_spec)?;
        let delta = if matches!(bound, BoundKind::Eh) {
            theta.delta()?
        } else {
            0
        };
        let affine = match task.normalization {
            Normalization::None => None,
            Normalization::Affine => {
                if !group.is_cyclic_repr() || !theta.is_identity() {
                    return Err(Error::InvalidSpec(
                        "affine normalization applies to cyclic groups with the identity map"
                            .into(),
                    ));
                }
                Some(AffineMaps::build(group.order()))
            }
        };
        let nilpotent = group.is_nilpotent().ok();
        Ok(ScanCtx {
            p_of_g: group.p_of_g(),
            group,
            theta,
            delta,
            bound,
            classify,
            nilpotent,
            affine,
            retain_records: RETAIN_RECORDS,
        })
    }

    /// Examine one pair; normalization may skip non-canonical pairs.
    fn handle_pair(&self, a: &Subset, b: &Subset, part: &mut Partial) -> Result<()> {
        if let Some(aff) = &self.affine {
            let ma = a.bits().low_word();
            let mb = b.bits().low_word();
            match aff.canonical_orbit(ma, mb) {
                None => return Ok(()),
                Some(orbit) => return self.handle_counted(a, b, orbit, part),
            }
        }
        self.handle_counted(a, b, 1, part)
    }

    /// Mask-native pair handler: sizes, bounds and criticality computed as
    /// u64 operations; subsets only materialize for findings and records.
    fn handle_mask_pair(
        &self,
        ops: &MaskOps,
        ma: u64,
        mb: u64,
        part: &mut Partial,
    ) -> Result<()> {
        let orbit = if let Some(aff) = &self.affine {
            match aff.canonical_orbit(ma, mb) {
                None => return Ok(()),
                Some(o) => o,
            }
        } else {
            1
        };
        part.checked += 1;
        let ka = ma.count_ones() as i64;
        let kb = mb.count_ones() as i64;
        let (size, bound_value, critical) = match self.bound {
            BoundKind::Cd => {
                let size = ops.product(ma, mb).count_ones() as i64;
                let sum = ka + kb - 1;
                let bound = match self.p_of_g {
                    Some(p) => (p as i64).min(sum),
                    None => sum,
                };
                (size, bound, size == sum)
            }
            BoundKind::Eh => {
                let size = ops.restricted(ma, mb).count_ones() as i64;
                let sum = ka + kb - 3;
                let bound = match self.p_of_g {
                    Some(p) => (p as i64 - self.delta as i64).min(sum),
                    None => sum,
                };
                (size, bound, size == sum)
            }
            BoundKind::Olson => {
                let ab = ops.product(ma, mb);
                let size = ab.count_ones() as i64;
                if 2 * size < 2 * ka + kb {
                    let bb = ops.product(ops.inverse_mask(mb), mb);
                    if ops.product(ab, bb) != ab && part.violations.len() < RETAIN_FINDINGS {
                        let a = Subset::from_mask(&self.group, ma);
                        let b = Subset::from_mask(&self.group, mb);
                        part.violations.push(self.finding(
                            &a,
                            &b,
                            format!(
                                "|AB| = {size} misses both the inequality and the stabilizer condition"
                            ),
                        ));
                    }
                }
                return Ok(());
            }
        };
        if size < bound_value {
            if part.violations.len() < RETAIN_FINDINGS {
                let a = Subset::from_mask(&self.group, ma);
                let b = Subset::from_mask(&self.group, mb);
                part.violations
                    .push(self.finding(&a, &b, format!("size {size} < bound {bound_value}")));
            }
            return Ok(());
        }
        if !critical {
            return Ok(());
        }
        part.criticals += orbit;
        if !self.classify {
            return Ok(());
        }
        let a = Subset::from_mask(&self.group, ma);
        let b = Subset::from_mask(&self.group, mb);
        let outcome = self.classify_pair(&a, &b)?;
        match &outcome {
            ClassifyOutcome::OutsideTaxonomy { .. } => part.out_of_scope += 1,
            ClassifyOutcome::Unclassified => {
                if part.failures.len() < RETAIN_FINDINGS {
                    part.failures
                        .push(self.finding(&a, &b, "no taxonomy case matched".into()));
                }
            }
            ClassifyOutcome::Classified { .. } => {}
        }
        let record = CriticalPairRecord {
            a_hex: a.to_hex(),
            b_hex: b.to_hex(),
            a: a.format_elements(),
            b: b.format_elements(),
            a_size: ka as usize,
            b_size: kb as usize,
            product_size: size as usize,
            outcome,
        };
        if part.samples.len() < RETAIN_SAMPLES {
            part.samples.push(record.clone());
        }
        if part.records.len() < self.retain_records {
            part.records.push(record);
        }
        Ok(())
    }

    fn handle_counted(&self, a: &Subset, b: &Subset, orbit: u64, part: &mut Partial) -> Result<()> {
        part.checked += 1;
        let ka = a.len();
        let kb = b.len();
        let (size, bound_value, critical) = match self.bound {
            BoundKind::Cd => {
                let size = sumset::product_set(a, b)?.len();
                let sum = (ka + kb - 1) as i64;
                let bound = match self.p_of_g {
                    Some(p) => (p as i64).min(sum),
                    None => sum,
                };
                (size, bound, size as i64 == sum)
            }
            BoundKind::Eh => {
                let size = sumset::restricted_product_set(a, b, &self.theta)?.len();
                let sum = ka as i64 + kb as i64 - 3;
                let bound = match self.p_of_g {
                    Some(p) => (p as i64 - self.delta as i64).min(sum),
                    None => sum,
                };
                (size, bound, size as i64 == sum)
            }
            BoundKind::Olson => {
                let check = sumset::olson_check(a, b)?;
                let size = match &check {
                    sumset::OlsonCheck::Inequality { product_size }
                    | sumset::OlsonCheck::Exceptional { product_size }
                    | sumset::OlsonCheck::Violation { product_size } => *product_size,
                };
                if !check.holds() && part.violations.len() < RETAIN_FINDINGS {
                    part.violations.push(self.finding(
                        a,
                        b,
                        format!("|AB| = {size} misses both the inequality and the stabilizer condition"),
                    ));
                }
                return Ok(());
            }
        };
        if (size as i64) < bound_value {
            if part.violations.len() < RETAIN_FINDINGS {
                part.violations
                    .push(self.finding(a, b, format!("size {size} < bound {bound_value}")));
            }
            return Ok(());
        }
        if !critical {
            return Ok(());
        }
        part.criticals += orbit;
        if !self.classify {
            return Ok(());
        }
        let outcome = self.classify_pair(a, b)?;
        match &outcome {
            ClassifyOutcome::OutsideTaxonomy { .. } => part.out_of_scope += 1,
            ClassifyOutcome::Unclassified => {
                if part.failures.len() < RETAIN_FINDINGS {
                    part.failures
                        .push(self.finding(a, b, "no taxonomy case matched".into()));
                }
            }
            ClassifyOutcome::Classified { .. } => {}
        }
        let record = CriticalPairRecord {
            a_hex: a.to_hex(),
            b_hex: b.to_hex(),
            a: a.format_elements(),
            b: b.format_elements(),
            a_size: ka,
            b_size: kb,
            product_size: size,
            outcome,
        };
        if part.samples.len() < RETAIN_SAMPLES {
            part.samples.push(record.clone());
        }
        if part.records.len() < self.retain_records {
            part.records.push(record);
        }
        Ok(())
    }

    fn finding(&self, a: &Subset, b: &Subset, detail: String) -> PairFinding {
        PairFinding {
            a_hex: a.to_hex(),
            b_hex: b.to_hex(),
            a: a.format_elements(),
            b: b.format_elements(),
            detail,
        }
    }

    /// Route a critical pair to the matching taxonomy.
    fn classify_pair(&self, a: &Subset, b: &Subset) -> Result<ClassifyOutcome> {
        let g = &self.group;
        let n = g.order();
        let prime_line = g.is_cyclic_repr() && modmat::is_prime(n);
        match self.bound {
            BoundKind::Olson => Ok(ClassifyOutcome::OutsideTaxonomy {
                reason: "no taxonomy for the Olson inequality".into(),
            }),
            BoundKind::Cd => {
                if prime_line {
                    return Ok(match structure::vosper_classify(a, b)? {
                        Some(c) => ClassifyOutcome::Classified { classification: c },
                        None => ClassifyOutcome::Unclassified,
                    });
                }
                let p = match self.p_of_g {
                    Some(p) => p,
                    None => {
                        return Ok(ClassifyOutcome::OutsideTaxonomy {
                            reason: "trivial group".into(),
                        })
                    }
                };
                if (a.len() + b.len() - 1) as u64 > p - 1 {
                    return Ok(ClassifyOutcome::OutsideTaxonomy {
                        reason: format!("k+l-1 > p(G)-1 = {}", p - 1),
                    });
                }
                Ok(match structure::karolyi_cd_classify(a, b)? {
                    Some(c) => ClassifyOutcome::Classified { classification: c },
                    None => ClassifyOutcome::Unclassified,
                })
            }
            BoundKind::Eh => {
                if !self.theta.is_identity() {
                    return Ok(ClassifyOutcome::OutsideTaxonomy {
                        reason: "taxonomies cover the identity automorphism only".into(),
                    });
                }
                if prime_line {
                    let k = a.len();
                    let l = b.len();
                    if n < (k + l - 2) as u64 {
                        return Ok(ClassifyOutcome::OutsideTaxonomy {
                            reason: format!("p < k+l-2 = {}", k + l - 2),
                        });
                    }
                    if a != b {
                        // critical pairs under this hypothesis must be equal
                        return Ok(ClassifyOutcome::Unclassified);
                    }
                    return Ok(match structure::inverse_dh_classify(a)? {
                        Some(c) => ClassifyOutcome::Classified { classification: c },
                        None => ClassifyOutcome::Unclassified,
                    });
                }
                match self.nilpotent {
                    Some(false) => {}
                    Some(true) => {
                        return Ok(ClassifyOutcome::OutsideTaxonomy {
                            reason: "nilpotent group outside the conjecture's scope".into(),
                        })
                    }
                    None => {
                        return Ok(ClassifyOutcome::OutsideTaxonomy {
                            reason: "nilpotency undecided within caps".into(),
                        })
                    }
                }
                let k = a.len();
                let l = b.len();
                let in_scope = k >= 3
                    && l >= 3
                    && match self.p_of_g {
                        Some(p) => ((k + l - 3) as u64) < p,
                        None => false,
                    };
                if !in_scope {
                    return Ok(ClassifyOutcome::OutsideTaxonomy {
                        reason: "requires k,l >= 3 and k+l-3 < p(G)".into(),
                    });
                }
                Ok(match structure::conjecture_ieh_classify(a, b)? {
                    Some(c) => ClassifyOutcome::Classified { classification: c },
                    None => ClassifyOutcome::Unclassified,
                })
            }
        }
    }
}

fn merge_partials(parts: Vec<Partial>, report: &mut VerificationReport) -> Vec<CriticalPairRecord> {
    let mut records = Vec::new();
    let mut truncated = false;
    for p in parts {
        report.instances_checked += p.checked;
        report.critical_pairs_found += p.criticals;
        report.hypothesis_out_of_scope += p.out_of_scope;
        report.degenerate_skipped += p.degenerate;
        for v in p.violations {
            if report.bound_violations.len() < RETAIN_FINDINGS {
                report.bound_violations.push(v);
            } else {
                truncated = true;
            }
        }
        for f in p.failures {
            if report.classification_failures.len() < RETAIN_FINDINGS {
                report.classification_failures.push(f);
            } else {
                truncated = true;
            }
        }
        for s in p.samples {
            if report.sample_witnesses.len() < RETAIN_SAMPLES {
                report.sample_witnesses.push(s);
            }
        }
        if records.len() + p.records.len() <= RETAIN_RECORDS {
            records.extend(p.records);
        } else {
            let room = RETAIN_RECORDS - records.len();
            records.extend(p.records.into_iter().take(room));
            truncated = true;
        }
    }
    report.truncated = report.truncated || truncated;
    records
}

fn popcount_in(mask: u64, range: [usize; 2]) -> bool {
    let c = mask.count_ones() as usize;
    c >= range[0] && c <= range[1]
}

/// Core subset-pair scan over masks (|G| <= hard cap) or cardinality-
/// restricted combinations (|G| <= 63).
fn run_pair_scan(
    task: &SearchTask,
    caps: Caps,
    bound: BoundKind,
    classify: bool,
) -> Result<(VerificationReport, Vec<CriticalPairRecord>)> {
    let start = std::time::Instant::now();
    let ctx = ScanCtx::build(task, caps, bound, classify)?;
    let g = &ctx.group;
    let n = g.order();
    let verifier = match bound {
        BoundKind::Cd => "cd",
        BoundKind::Eh => "eh",
        BoundKind::Olson => "olson",
    };
    let mut report = VerificationReport::new(verifier, task.echo());

    let k_range = task
        .cardinality_range
        .map(|c| c.k)
        .unwrap_or([1, n as usize]);
    let l_range = task
        .cardinality_range
        .map(|c| c.l)
        .unwrap_or([1, n as usize]);

    let parts: Vec<Partial> = match task.mode {
        SearchMode::AllPairs | SearchMode::SelfPairs => {
            let self_only = matches!(task.mode, SearchMode::SelfPairs);
            let a_masks = subset_masks(g, k_range, task.shard, &caps, self_only, l_range)?;
            let b_masks: Arc<Vec<u64>> = Arc::new(if self_only {
                Vec::new()
            } else {
                full_masks(n, l_range)
            });
            let ops = MaskOps::build(g, &ctx.theta)?;
            a_masks
                .par_iter()
                .map(|&ma| {
                    let mut part = Partial::default();
                    if self_only {
                        ctx.handle_mask_pair(&ops, ma, ma, &mut part)?;
                    } else {
                        for &mb in b_masks.iter() {
                            ctx.handle_mask_pair(&ops, ma, mb, &mut part)?;
                        }
                    }
                    Ok(part)
                })
                .collect::<Result<Vec<_>>>()?
        }
        SearchMode::ApPairsSameDifference => {
            if !g.is_cyclic_repr() {
                return Err(Error::NonCyclicGroup);
            }
            let combos = ap_parameter_grid(n, k_range, l_range, task.shard)?;
            combos
                .par_iter()
                .map(|&(k, l, d)| {
                    let mut part = Partial::default();
                    for a0 in 0..n {
                        let a = match ap_set(g, a0, d, k) {
                            Some(s) => s,
                            None => {
                                part.degenerate += n;
                                part.checked += n;
                                continue;
                            }
                        };
                        for b0 in 0..n {
                            match ap_set(g, b0, d, l) {
                                Some(b) => ctx.handle_pair(&a, &b, &mut part)?,
                                None => {
                                    part.degenerate += 1;
                                    part.checked += 1;
                                }
                            }
                        }
                    }
                    Ok(part)
                })
                .collect::<Result<Vec<_>>>()?
        }
        SearchMode::GeometricPairsSameRatio => {
            let k = k_range[0];
            let l = l_range[0];
            if k < 2 || l < 2 {
                return Err(Error::InvalidSpec(
                    "geometric mode needs cardinalities >= 2".into(),
                ));
            }
            let triples = geometric_triples(g, k, l, None, caps.geometric_triples, task.shard)?;
            triples
                .par_iter()
                .map(|&(a0, q, b0)| {
                    let mut part = Partial::default();
                    match geometric_pair(g, a0, q, b0, k, l) {
                        Some((a, b)) => ctx.handle_pair(&a, &b, &mut part)?,
                        None => {
                            part.degenerate += 1;
                            part.checked += 1;
                        }
                    }
                    Ok(part)
                })
                .collect::<Result<Vec<_>>>()?
        }
        SearchMode::SuppliedCandidates => {
            let pairs: Vec<(Subset, Subset)> = task
                .candidates
                .iter()
                .map(|[sa, sb]| Ok((Subset::parse(g, sa)?, Subset::parse(g, sb)?)))
                .collect::<Result<Vec<_>>>()?;
            let (lo, hi) = shard_slice(pairs.len() as u64, task.shard)?;
            pairs[lo as usize..hi as usize]
                .par_iter()
                .map(|(a, b)| {
                    let mut part = Partial::default();
                    ctx.handle_pair(a, b, &mut part)?;
                    Ok(part)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };

    let records = merge_partials(parts, &mut report);
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok((report, records))
}

/// Ascending masks of the sharded A-side.
fn subset_masks(
    g: &Arc<FiniteGroup>,
    k_range: [usize; 2],
    shard: [u64; 2],
    caps: &Caps,
    self_only: bool,
    l_range: [usize; 2],
) -> Result<Vec<u64>> {
    let n = g.order();
    if n <= caps.all_pairs_group {
        let total = (1u64 << n) - 1;
        let (lo, hi) = shard_slice(total, shard)?;
        // mask = index + 1
        return Ok((lo..hi)
            .map(|i| i + 1)
            .filter(|&m| popcount_in(m, k_range))
            .collect());
    }
    // cardinality-restricted combination enumeration
    if n > 63 {
        return Err(Error::CapExceeded {
            what: "subset enumeration",
            needed: n,
            cap: 63,
        });
    }
    let k_cells: u64 = (k_range[0]..=k_range[1].min(n as usize))
        .map(|k| binomial(n, k as u64))
        .sum();
    let l_cells: u64 = if self_only {
        1
    } else {
        (l_range[0]..=l_range[1].min(n as usize))
            .map(|l| binomial(n, l as u64))
            .sum()
    };
    let estimate = k_cells.saturating_mul(l_cells);
    if estimate > caps.pair_estimate {
        return Err(Error::CapExceeded {
            what: "pair enumeration estimate",
            needed: estimate,
            cap: caps.pair_estimate,
        });
    }
    if k_cells > 20_000_000 {
        return Err(Error::CapExceeded {
            what: "subset list materialization",
            needed: k_cells,
            cap: 20_000_000,
        });
    }
    let mut masks = Vec::with_capacity(k_cells as usize);
    for k in k_range[0].max(1)..=k_range[1].min(n as usize) {
        combination_masks(n, k as u64, &mut masks);
    }
    masks.sort_unstable();
    let (lo, hi) = shard_slice(masks.len() as u64, shard)?;
    Ok(masks[lo as usize..hi as usize].to_vec())
}

fn full_masks(n: u64, l_range: [usize; 2]) -> Vec<u64> {
    if n <= 16 {
        (1..(1u64 << n))
            .filter(|&m| popcount_in(m, l_range))
            .collect()
    } else {
        let mut masks = Vec::new();
        for l in l_range[0].max(1)..=l_range[1].min(n as usize) {
            combination_masks(n, l as u64, &mut masks);
        }
        masks.sort_unstable();
        masks
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Append every k-of-n mask in ascending order (Gosper's hack).
fn combination_masks(n: u64, k: u64, out: &mut Vec<u64>) {
    if k == 0 || k > n || n > 63 {
        return;
    }
    let limit = 1u64 << n;
    let mut v = (1u64 << k) - 1;
    while v < limit {
        out.push(v);
        let c = v & v.wrapping_neg();
        let r = v + c;
        if r >= limit {
            break;
        }
        v = (((r ^ v) >> 2) / c) | r;
    }
}

/// (k, l, d) grid for same-difference scans, sharded on the flattened index.
fn ap_parameter_grid(
    n: u64,
    k_range: [usize; 2],
    l_range: [usize; 2],
    shard: [u64; 2],
) -> Result<Vec<(usize, usize, u64)>> {
    let mut combos = Vec::new();
    for k in k_range[0]..=k_range[1] {
        for l in l_range[0]..=l_range[1] {
            for d in 1..n {
                combos.push((k, l, d));
            }
        }
    }
    let (lo, hi) = shard_slice(combos.len() as u64, shard)?;
    Ok(combos[lo as usize..hi as usize].to_vec())
}

/// {a0 + i*d : i < k} as a subset, None on collision.
fn ap_set(g: &Arc<FiniteGroup>, a0: u64, d: u64, k: usize) -> Option<Subset> {
    let n = g.order();
    if n / modmat::gcd(n, d) < k as u64 {
        return None;
    }
    let mut s = Subset::empty(g);
    let mut x = a0;
    for _ in 0..k {
        s.insert(x);
        x = (x + d) % n;
    }
    Some(s)
}

/// A = {a0 q^s : s < k}, B = {q^t b0 : t < l}; None on collision.
fn geometric_pair(
    g: &Arc<FiniteGroup>,
    a0: u64,
    q: u64,
    b0: u64,
    k: usize,
    l: usize,
) -> Option<(Subset, Subset)> {
    let mut a = Subset::empty(g);
    let mut x = a0;
    for _ in 0..k {
        if a.get(x) {
            return None;
        }
        a.insert(x);
        x = g.mul(x, q);
    }
    let mut b = Subset::empty(g);
    let mut y = b0;
    for _ in 0..l {
        if b.get(y) {
            return None;
        }
        b.insert(y);
        y = g.mul(q, y);
    }
    Some((a, b))
}

/// Deterministic (a, q, b) slice for same-ratio scans. Ratio candidates are
/// either supplied or derived (construction generators for composed groups,
/// every element otherwise), filtered to order > k+l-2; anchors run over the
/// cyclic subgroups generated by the construction generators.
fn geometric_triples(
    g: &Arc<FiniteGroup>,
    k: usize,
    l: usize,
    q_list: Option<&[u64]>,
    max_triples: u64,
    shard: [u64; 2],
) -> Result<Vec<(u64, u64, u64)>> {
    let n = g.order();
    let min_order = (k + l - 2) as u64;
    let qs: Vec<u64> = match q_list {
        Some(list) => list.to_vec(),
        None => {
            let raw: Vec<u64> = if g.is_cyclic_repr() || g.is_table_repr() {
                (1..n).collect()
            } else {
                g.generating_set()
            };
            let mut qs = Vec::new();
            for x in raw {
                if g.element_order(x)? > min_order {
                    qs.push(x);
                }
            }
            qs
        }
    };
    let anchors: Vec<u64> = if g.is_cyclic_repr() || g.is_table_repr() {
        (0..n).collect()
    } else {
        let mut set = std::collections::BTreeSet::new();
        for gen in g.generating_set() {
            let mut x = 0u64;
            loop {
                set.insert(x);
                x = g.mul(x, gen);
                if x == 0 {
                    break;
                }
            }
        }
        set.into_iter().collect()
    };
    let a_count = anchors.len() as u64;
    let total = (qs.len() as u64 * a_count * a_count).min(max_triples);
    let (lo, hi) = shard_slice(total, shard)?;
    let mut out = Vec::with_capacity((hi - lo) as usize);
    for idx in lo..hi {
        let q_i = idx / (a_count * a_count);
        let rem = idx % (a_count * a_count);
        let a_i = rem / a_count;
        let b_i = rem % a_count;
        out.push((anchors[a_i as usize], qs[q_i as usize], anchors[b_i as usize]));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// public verifiers
// ---------------------------------------------------------------------------

/// Check |AB| >= min(p(G), |A|+|B|-1) over the task's enumeration.
pub fn verify_cd_bound(task: &SearchTask, caps: Caps) -> Result<VerificationReport> {
    Ok(run_pair_scan(task, caps, BoundKind::Cd, false)?.0)
}

/// Check |A .theta B| >= min(p(G)-delta, |A|+|B|-3) over the task's
/// enumeration.
pub fn verify_eh_bound(task: &SearchTask, caps: Caps) -> Result<VerificationReport> {
    Ok(run_pair_scan(task, caps, BoundKind::Eh, false)?.0)
}

/// Olson inequality / stabilizer condition over the task's enumeration.
pub fn verify_olson(task: &SearchTask, caps: Caps) -> Result<VerificationReport> {
    Ok(run_pair_scan(task, caps, BoundKind::Olson, false)?.0)
}

/// Enumerate critical pairs and classify each against the matching
/// taxonomy; unclassifiable critical pairs are flagged in the report.
pub fn enumerate_critical_pairs(
    task: &SearchTask,
    caps: Caps,
    bound: BoundKind,
) -> Result<(VerificationReport, Vec<CriticalPairRecord>)> {
    run_pair_scan(task, caps, bound, true)
}

/// Composite-modulus sum bound under the coprimality side condition:
/// for Z/m with 0 in B and every nonzero b in B a unit mod m,
/// |A+B| >= min(m, |A|+|B|-1), exhaustively over all such pairs.
pub fn verify_chowla(m: u64, shard: [u64; 2], caps: Caps) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    if m > caps.all_pairs_group {
        return Err(Error::CapExceeded {
            what: "coprime-condition scan",
            needed: m,
            cap: caps.all_pairs_group,
        });
    }
    let g = FiniteGroup::from_spec_with(&GroupSpec::Cyclic(m), caps)?;
    let mut report = VerificationReport::new(
        "chowla",
        serde_json::json!({"modulus": m, "shard": shard}),
    );
    // B-masks: 0 present, all other members units mod m
    let allowed: u64 = (1..m).filter(|&x| modmat::gcd(x, m) == 1).fold(1, |acc, x| acc | 1 << x);
    let b_masks: Vec<u64> = (1..(1u64 << m))
        .filter(|&mb| mb & 1 == 1 && mb & !allowed == 0)
        .collect();
    let total = (1u64 << m) - 1;
    let (lo, hi) = shard_slice(total, shard)?;
    let parts: Vec<Partial> = (lo..hi)
        .into_par_iter()
        .map(|i| {
            let ma = i + 1;
            let mut part = Partial::default();
            let a = Subset::from_mask(&g, ma);
            for &mb in &b_masks {
                let b = Subset::from_mask(&g, mb);
                part.checked += 1;
                let size = sumset::product_set(&a, &b).expect("same group") .len() as u64;
                let bound = m.min((a.len() + b.len() - 1) as u64);
                if size < bound {
                    part.violations.push(PairFinding {
                        a_hex: a.to_hex(),
                        b_hex: b.to_hex(),
                        a: a.format_elements(),
                        b: b.format_elements(),
                        detail: format!("size {size} < bound {bound}"),
                    });
                }
            }
            part
        })
        .collect();
    merge_partials(parts, &mut report);
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Same-difference progression pairs in Z/n: enumerate every (a, d, b)
/// with d != 0 and progression lengths k and l; every restricted-sum
/// critical pair must satisfy A = B. Refuses to run when p(n) <= k+l-3.
pub fn verify_ap_critical_equality(
    n: u64,
    k: usize,
    l: usize,
    shard: [u64; 2],
    caps: Caps,
) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    if k < 3 || l < 3 {
        return Err(Error::HypothesisViolated(
            "k,l >= 3".into(),
            format!("k={k}, l={l}"),
        ));
    }
    let p = modmat::smallest_prime_factor(n).unwrap_or(u64::MAX);
    if p <= (k + l - 3) as u64 {
        return Err(Error::HypothesisViolated(
            "p(G) > k+l-3".into(),
            format!("p={p}"),
        ));
    }
    let g = FiniteGroup::from_spec_with(&GroupSpec::Cyclic(n), caps)?;
    let id = Automorphism::identity(&g);
    let mut report = VerificationReport::new(
        "thm51",
        serde_json::json!({"n": n, "k": k, "l": l, "shard": shard}),
    );
    let (lo, hi) = shard_slice(n - 1, shard)?;
    let parts: Vec<Partial> = (lo..hi)
        .into_par_iter()
        .map(|di| {
            let d = di + 1;
            let mut part = Partial::default();
            for a0 in 0..n {
                let a = match ap_set(&g, a0, d, k) {
                    Some(s) => s,
                    None => {
                        part.checked += n;
                        part.degenerate += n;
                        continue;
                    }
                };
                for b0 in 0..n {
                    part.checked += 1;
                    let b = match ap_set(&g, b0, d, l) {
                        Some(s) => s,
                        None => {
                            part.degenerate += 1;
                            continue;
                        }
                    };
                    let size = sumset::restricted_product_set(&a, &b, &id)
                        .expect("same group")
                        .len();
                    if size == k + l - 3 {
                        part.criticals += 1;
                        if a != b {
                            part.violations.push(PairFinding {
                                a_hex: a.to_hex(),
                                b_hex: b.to_hex(),
                                a: a.format_elements(),
                                b: b.format_elements(),
                                detail: "critical pair with A != B".into(),
                            });
                        }
                    }
                }
            }
            part
        })
        .collect();
    let _ = merge_partials(parts, &mut report);
    // equality failures are counterexamples, not bound violations
    report.counterexamples = std::mem::take(&mut report.bound_violations);
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Same-ratio geometric pairs in any finite group: over a deterministic
/// (a, q, b) slice, every critical pair A = {a q^s}, B = {q^t b} must share
/// both endpoints. Refuses to run when p(G) <= k+l-2.
pub fn verify_geometric_critical_endpoints(
    spec: &GroupSpec,
    k: usize,
    l: usize,
    q_literals: Option<&[String]>,
    max_triples: Option<u64>,
    shard: [u64; 2],
    caps: Caps,
) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    if k < 3 || l < 3 {
        return Err(Error::HypothesisViolated(
            "k,l >= 3".into(),
            format!("k={k}, l={l}"),
        ));
    }
    let g = FiniteGroup::from_spec_with(spec, caps)?;
    let p = g.p_of_g().unwrap_or(u64::MAX);
    if p <= (k + l - 2) as u64 {
        return Err(Error::HypothesisViolated(
            "p(G) > k+l-2".into(),
            format!("p={p}"),
        ));
    }
    let q_list: Option<Vec<u64>> = match q_literals {
        Some(ls) => Some(
            ls.iter()
                .map(|s| g.parse_element(s))
                .collect::<Result<Vec<u64>>>()?,
        ),
        None => None,
    };
    let id = Automorphism::identity(&g);
    let budget = max_triples.unwrap_or(caps.geometric_triples);
    let triples = geometric_triples(&g, k, l, q_list.as_deref(), budget, shard)?;
    let mut report = VerificationReport::new(
        "thm61",
        serde_json::json!({
            "group": spec,
            "k": k,
            "l": l,
            "max_triples": budget,
            "shard": shard,
        }),
    );
    let parts: Vec<Partial> = triples
        .par_iter()
        .map(|&(a0, q, b0)| {
            let mut part = Partial::default();
            part.checked += 1;
            let (a, b) = match geometric_pair(&g, a0, q, b0, k, l) {
                Some(pair) => pair,
                None => {
                    part.degenerate += 1;
                    return part;
                }
            };
            let size = sumset::restricted_product_set(&a, &b, &id)
                .expect("same group")
                .len();
            if size == k + l - 3 {
                part.criticals += 1;
                let end_a = g.mul(a0, g.power(q, k as u64 - 1).expect("valid"));
                let end_b = g.mul(g.power(q, l as u64 - 1).expect("valid"), b0);
                if a0 != b0 || end_a != end_b {
                    part.violations.push(PairFinding {
                        a_hex: a.to_hex(),
                        b_hex: b.to_hex(),
                        a: a.format_elements(),
                        b: b.format_elements(),
                        detail: format!(
                            "critical pair without shared endpoints (a={}, b={})",
                            g.format_element(a0),
                            g.format_element(b0)
                        ),
                    });
                }
            }
            part
        })
        .collect();
    let _ = merge_partials(parts, &mut report);
    report.counterexamples = std::mem::take(&mut report.bound_violations);
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Candidate source for the commutativity verifier.
pub enum CommutativityCandidates {
    Supplied(Vec<String>),
    Sampled { count: u64, size: usize, seed: u64 },
}

/// For candidate sets A with |A .i A| = 2|A|-3 and 2|A| < p(G)+3, every
/// pair of elements of A must commute.
pub fn verify_critical_commutativity(
    spec: &GroupSpec,
    candidates: CommutativityCandidates,
    caps: Caps,
) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let g = FiniteGroup::from_spec_with(spec, caps)?;
    let id = Automorphism::identity(&g);
    let p = g.p_of_g().unwrap_or(u64::MAX);
    let (sets, seed, task): (Vec<Subset>, Option<u64>, serde_json::Value) = match &candidates {
        CommutativityCandidates::Supplied(literals) => {
            let sets = literals
                .iter()
                .map(|s| Subset::parse(&g, s))
                .collect::<Result<Vec<_>>>()?;
            (
                sets,
                None,
                serde_json::json!({"group": spec, "candidates": literals}),
            )
        }
        CommutativityCandidates::Sampled { count, size, seed } => {
            let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(*seed);
            let n = g.order();
            let mut sets = Vec::with_capacity(*count as usize);
            for _ in 0..*count {
                let mut s = Subset::empty(&g);
                while s.len() < *size {
                    s.insert(rng.gen_range(0..n));
                }
                sets.push(s);
            }
            (
                sets,
                Some(*seed),
                serde_json::json!({"group": spec, "samples": count, "size": size, "seed": seed}),
            )
        }
    };
    let mut report = VerificationReport::new("dupan", task);
    report.seed = seed;
    let mut met = 0u64;
    for a in &sets {
        report.instances_checked += 1;
        let k = a.len();
        if k == 0 {
            continue;
        }
        if 2 * k as u64 >= p + 3 {
            continue;
        }
        let size = sumset::restricted_product_set(a, a, &id)?.len() as i64;
        if size != 2 * k as i64 - 3 {
            continue;
        }
        met += 1;
        let elems = a.indices();
        let mut commutative = true;
        'outer: for &x in &elems {
            for &y in &elems {
                if g.mul(x, y) != g.mul(y, x) {
                    commutative = false;
                    break 'outer;
                }
            }
        }
        if !commutative {
            report.bound_violations.push(PairFinding {
                a_hex: a.to_hex(),
                b_hex: a.to_hex(),
                a: a.format_elements(),
                b: a.format_elements(),
                detail: "critical set with non-commuting elements".into(),
            });
        }
    }
    report.critical_pairs_found = met;
    report
        .notes
        .push(format!("{met} candidates met the criticality premise"));
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Exhaustive inverse check in Z/p: over all k-subsets, restricted
/// self-sum criticality holds exactly for arithmetic progressions.
/// Requires p prime, k >= 5, p > 2k-3.
pub fn verify_criticality_iff_progression(
    p: u64,
    k: usize,
    shard: [u64; 2],
    caps: Caps,
) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    if !modmat::is_prime(p) {
        return Err(Error::NonPrimeModulus(p));
    }
    if k < 5 {
        return Err(Error::HypothesisViolated("k >= 5".into(), format!("k={k}")));
    }
    if p <= (2 * k - 3) as u64 {
        return Err(Error::HypothesisViolated(
            "p > 2k-3".into(),
            format!("p={p}"),
        ));
    }
    if p > 63 {
        return Err(Error::CapExceeded {
            what: "subset enumeration",
            needed: p,
            cap: 63,
        });
    }
    let cells = binomial(p, k as u64);
    if cells > caps.pair_estimate {
        return Err(Error::CapExceeded {
            what: "subset enumeration",
            needed: cells,
            cap: caps.pair_estimate,
        });
    }
    let g = FiniteGroup::from_spec_with(&GroupSpec::Cyclic(p), caps)?;
    let id = Automorphism::identity(&g);
    let mut masks = Vec::with_capacity(cells as usize);
    combination_masks(p, k as u64, &mut masks);
    let (lo, hi) = shard_slice(masks.len() as u64, shard)?;
    let mut report = VerificationReport::new(
        "inverse-dh",
        serde_json::json!({"p": p, "k": k, "shard": shard}),
    );
    let parts: Vec<Partial> = masks[lo as usize..hi as usize]
        .par_iter()
        .map(|&mask| {
            let mut part = Partial::default();
            part.checked += 1;
            let a = Subset::from_mask(&g, mask);
            let size = sumset::restricted_product_set(&a, &a, &id)
                .expect("same group")
                .len();
            let critical = size == 2 * k - 3;
            let is_ap = !structure::arithmetic_progression_descriptors(&a)
                .expect("cyclic")
                .is_empty();
            if critical {
                part.criticals += 1;
            }
            if critical != is_ap {
                part.violations.push(PairFinding {
                    a_hex: a.to_hex(),
                    b_hex: a.to_hex(),
                    a: a.format_elements(),
                    b: a.format_elements(),
                    detail: format!("critical={critical} but progression={is_ap}"),
                });
            }
            part
        })
        .collect();
    let _ = merge_partials(parts, &mut report);
    report.counterexamples = std::mem::take(&mut report.bound_violations);
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Rebuild the nonabelian witness instance from its generator expressions
/// and check every published quantity about it.
pub fn reproduce_eh_nonabelian(caps: Caps) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let spec = GroupSpec::Semidirect {
        normal: crate::group::NormalShape {
            modulus: 47,
            rank: 2,
        },
        quotient: 23,
        matrix: vec![vec![2, 0], vec![0, 1]],
    };
    let g = FiniteGroup::from_spec_with(&spec, caps)?;
    let mut report = VerificationReport::new(
        "example",
        serde_json::json!({"group": spec, "name": "eh-nonabelian"}),
    );
    let mut check = |name: &str, pass: bool, detail: String| {
        report.checks.push(CheckLine {
            name: name.to_string(),
            pass,
            detail,
        });
    };

    let w = g.parse_element("[[0,0],1]")?; // shared anchor
    let q = g.parse_element("[[1,0],0]")?; // shared ratio
    let mut a = Subset::empty(&g);
    for s in 0..5u64 {
        a.insert(g.mul(w, g.power(q, s)?));
    }
    let mut b = Subset::empty(&g);
    for t in 0..9u64 {
        b.insert(g.mul(g.power(q, t)?, w));
    }
    check("|A| = 5", a.len() == 5, format!("|A| = {}", a.len()));
    check("|B| = 9", b.len() == 9, format!("|B| = {}", b.len()));
    check(
        "p(G) = 23",
        g.p_of_g() == Some(23),
        format!(
            "p(G) = {}",
            g.p_of_g().map(|p| p.to_string()).unwrap_or("infinity".into())
        ),
    );
    let nilpotent = g.is_nilpotent()?;
    check("G non-nilpotent", !nilpotent, format!("nilpotent = {nilpotent}"));

    let id = Automorphism::identity(&g);
    let restricted = sumset::restricted_product_set(&a, &b, &id)?;
    check(
        "|A .i B| = 11 = |A|+|B|-3",
        restricted.len() == 11,
        format!("size = {}", restricted.len()),
    );
    let unrestricted = sumset::product_set(&a, &b)?;
    check(
        "|AB| = 13",
        unrestricted.len() == 13,
        format!("size = {}", unrestricted.len()),
    );

    // decode the restricted products: x-coordinates 2,4,...,22 with the
    // other two coordinates constant (0 and 2)
    let mut xs = Vec::new();
    let mut uniform = true;
    for idx in restricted.iter() {
        let x = idx % 47;
        let y = (idx / 47) % 47;
        let z = idx / (47 * 47);
        xs.push(x);
        if y != 0 || z != 2 {
            uniform = false;
        }
    }
    let expected_xs: Vec<u64> = (1..=11).map(|r| 2 * r).collect();
    check(
        "products are ((2r,0),2) for r=1..11",
        uniform && xs == expected_xs,
        format!("x = {xs:?}"),
    );

    let outcome = structure::conjecture_ieh_classify(&a, &b)?;
    check(
        "classified as shared-endpoint progressions",
        outcome.is_some(),
        match &outcome {
            Some(c) => format!("case {}", c.case_label),
            None => "no classification".into(),
        },
    );
    report.critical_pairs_found = 1;
    report.instances_checked = 1;
    report.notes.push(
        "restricted products all carry (y,z) = (0,2); a transcription showing (y,z) = (8,4) \
         is inconsistent with the displayed group operation"
            .to_string(),
    );
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::nonabelian_witness_spec;

    fn cyclic_task(n: u64) -> SearchTask {
        SearchTask::new(GroupSpec::Cyclic(n))
    }

    #[test]
    fn cd_all_pairs_small() {
        let report = verify_cd_bound(&cyclic_task(7), Caps::default()).unwrap();
        assert_eq!(report.instances_checked, 127 * 127);
        assert!(report.bound_violations.is_empty());
        assert_eq!(report.critical_pairs_found, 6384);
    }

    #[test]
    fn cd_trivial_group() {
        let report = verify_cd_bound(&cyclic_task(1), Caps::default()).unwrap();
        assert_eq!(report.instances_checked, 1);
        assert!(report.bound_violations.is_empty());
    }

    #[test]
    fn eh_self_pairs_small() {
        let task = cyclic_task(11).with_mode(SearchMode::SelfPairs);
        let report = verify_eh_bound(&task, Caps::default()).unwrap();
        assert_eq!(report.instances_checked, 2047);
        assert!(report.bound_violations.is_empty());
    }

    #[test]
    fn shard_union_equals_whole() {
        let whole = verify_cd_bound(&cyclic_task(7), Caps::default()).unwrap();
        let mut checked = 0;
        let mut criticals = 0;
        for i in 0..4 {
            let task = cyclic_task(7).with_shard(i, 4);
            let r = verify_cd_bound(&task, Caps::default()).unwrap();
            checked += r.instances_checked;
            criticals += r.critical_pairs_found;
        }
        assert_eq!(checked, whole.instances_checked);
        assert_eq!(criticals, whole.critical_pairs_found);
        assert!(matches!(
            shard_slice(10, [3, 3]),
            Err(Error::BadShard { .. })
        ));
    }

    #[test]
    fn determinism_across_worker_counts() {
        let task = cyclic_task(7);
        let r1 = {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .unwrap();
            pool.install(|| verify_cd_bound(&task, Caps::default()).unwrap())
        };
        let r4 = {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(4)
                .build()
                .unwrap();
            pool.install(|| verify_cd_bound(&task, Caps::default()).unwrap())
        };
        assert_eq!(r1.determinism_payload(), r4.determinism_payload());
    }

    #[test]
    fn affine_normalization_preserves_critical_count() {
        let plain = verify_cd_bound(&cyclic_task(5), Caps::default()).unwrap();
        let norm = verify_cd_bound(
            &cyclic_task(5).with_normalization(Normalization::Affine),
            Caps::default(),
        )
        .unwrap();
        assert_eq!(plain.critical_pairs_found, 635);
        assert_eq!(norm.critical_pairs_found, 635);
        assert!(norm.instances_checked < plain.instances_checked);
        // eh criticals agree as well
        let plain_eh = verify_eh_bound(&cyclic_task(5), Caps::default()).unwrap();
        let norm_eh = verify_eh_bound(
            &cyclic_task(5).with_normalization(Normalization::Affine),
            Caps::default(),
        )
        .unwrap();
        assert_eq!(plain_eh.critical_pairs_found, norm_eh.critical_pairs_found);
    }

    #[test]
    fn all_pairs_cap_is_hard() {
        let res = verify_cd_bound(&cyclic_task(17), Caps::default());
        assert!(matches!(res, Err(Error::CapExceeded { .. })));
        // but cardinality-restricted enumeration is allowed
        let task = cyclic_task(17).with_cardinalities([1, 2], [1, 2]);
        let report = verify_cd_bound(&task, Caps::default()).unwrap();
        // (17 + C(17,2))^2 pairs
        let cells = 17 + 136;
        assert_eq!(report.instances_checked, (cells * cells) as u64);
        assert!(report.bound_violations.is_empty());
    }

    #[test]
    fn supplied_candidates_classified() {
        let a_lit = "[[0,0],1];[[2,0],1];[[4,0],1];[[6,0],1];[[8,0],1]".to_string();
        let b_lit = (0..9)
            .map(|l| format!("[[{l},0],1]"))
            .collect::<Vec<_>>()
            .join(";");
        let task = SearchTask::new(nonabelian_witness_spec())
            .with_candidates(vec![[a_lit, b_lit]]);
        let (report, records) =
            enumerate_critical_pairs(&task, Caps::default(), BoundKind::Eh).unwrap();
        assert_eq!(report.critical_pairs_found, 1);
        assert!(report.classification_failures.is_empty());
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].outcome.case_label(), "progression_shared_endpoints");
    }

    #[test]
    fn critical_enumeration_counts_and_labels() {
        // singleton pairs are always critical for the unrestricted product
        let task = cyclic_task(7).with_cardinalities([1, 1], [1, 1]);
        let (report, records) =
            enumerate_critical_pairs(&task, Caps::default(), BoundKind::Cd).unwrap();
        assert_eq!(report.critical_pairs_found, 49);
        assert_eq!(records.len(), 49);
        assert!(records.iter().all(|r| r.outcome.case_label() == "i"));
        assert!(report.classification_failures.is_empty());
    }

    #[test]
    fn ap_pair_scan_equality() {
        let report =
            verify_ap_critical_equality(49, 3, 3, [0, 1], Caps::default()).unwrap();
        assert_eq!(report.instances_checked, 48 * 49 * 49);
        assert_eq!(report.critical_pairs_found, 2352);
        assert!(report.counterexamples.is_empty());

        let report = verify_ap_critical_equality(25, 3, 4, [0, 1], Caps::default()).unwrap();
        assert_eq!(report.instances_checked, 24 * 25 * 25);
        assert_eq!(report.critical_pairs_found, 0);
        assert!(report.counterexamples.is_empty());

        // hypothesis gate
        let err = verify_ap_critical_equality(15, 3, 3, [0, 1], Caps::default());
        match err {
            Err(Error::HypothesisViolated(h, d)) => {
                assert_eq!(h, "p(G) > k+l-3");
                assert_eq!(d, "p=3");
            }
            other => panic!("expected hypothesis gate, got {other:?}"),
        }
    }

    #[test]
    fn geometric_scan_abelian_specialization() {
        let report = verify_geometric_critical_endpoints(
            &GroupSpec::Cyclic(25),
            3,
            3,
            None,
            None,
            [0, 1],
            Caps::default(),
        )
        .unwrap();
        assert_eq!(report.instances_checked, 24 * 25 * 25);
        assert_eq!(report.critical_pairs_found, 600);
        assert!(report.counterexamples.is_empty());

        let gate = verify_geometric_critical_endpoints(
            &GroupSpec::Cyclic(9),
            3,
            3,
            None,
            None,
            [0, 1],
            Caps::default(),
        );
        assert!(matches!(gate, Err(Error::HypothesisViolated(_, _))));
    }

    #[test]
    fn inverse_dh_exhaustive_smallest() {
        let report =
            verify_criticality_iff_progression(13, 5, [0, 1], Caps::default()).unwrap();
        assert_eq!(report.instances_checked, 1287);
        assert_eq!(report.critical_pairs_found, 78);
        assert!(report.counterexamples.is_empty());

        assert!(matches!(
            verify_criticality_iff_progression(12, 5, [0, 1], Caps::default()),
            Err(Error::NonPrimeModulus(12))
        ));
        assert!(matches!(
            verify_criticality_iff_progression(11, 4, [0, 1], Caps::default()),
            Err(Error::HypothesisViolated(_, _))
        ));
        // p = 11, k = 5: gate 11 > 7 passes
        let r = verify_criticality_iff_progression(11, 5, [0, 1], Caps::default()).unwrap();
        assert_eq!(r.instances_checked, 462);
    }

    #[test]
    fn commutativity_verifier() {
        // supplied candidate: the witness progression is not critical for
        // the self pair (|A .i A| = 11 != 7), so the premise is unmet
        let a_lit = "[[0,0],1];[[2,0],1];[[4,0],1];[[6,0],1];[[8,0],1]".to_string();
        let report = verify_critical_commutativity(
            &nonabelian_witness_spec(),
            CommutativityCandidates::Supplied(vec![a_lit]),
            Caps::default(),
        )
        .unwrap();
        assert_eq!(report.critical_pairs_found, 0);
        assert!(report.bound_violations.is_empty());

        // abelian sanity: {0,1,2} in Z/7 meets the premise and commutes
        let report = verify_critical_commutativity(
            &GroupSpec::Cyclic(7),
            CommutativityCandidates::Supplied(vec!["0,1,2".into()]),
            Caps::default(),
        )
        .unwrap();
        assert_eq!(report.critical_pairs_found, 1);
        assert!(report.bound_violations.is_empty());

        // seeded sampling is reproducible
        let r1 = verify_critical_commutativity(
            &nonabelian_witness_spec(),
            CommutativityCandidates::Sampled {
                count: 200,
                size: 4,
                seed: 42,
            },
            Caps::default(),
        )
        .unwrap();
        let r2 = verify_critical_commutativity(
            &nonabelian_witness_spec(),
            CommutativityCandidates::Sampled {
                count: 200,
                size: 4,
                seed: 42,
            },
            Caps::default(),
        )
        .unwrap();
        assert!(r1.bound_violations.is_empty());
        assert_eq!(r1.determinism_payload(), r2.determinism_payload());
        assert_eq!(r1.seed, Some(42));
    }

    #[test]
    fn chowla_scan() {
        let report = verify_chowla(12, [0, 1], Caps::default()).unwrap();
        // B candidates: {0} union subsets of the 4 units
        assert_eq!(report.instances_checked, 4095 * 16);
        assert!(report.bound_violations.is_empty());
    }

    #[test]
    fn witness_reproduction() {
        let report = reproduce_eh_nonabelian(Caps::default()).unwrap();
        assert!(!report.has_findings(), "{}", report.render_text());
        assert!(report.checks.iter().all(|c| c.pass));
        assert_eq!(report.checks.len(), 8);
    }

    #[test]
    fn olson_scan_small() {
        let task = SearchTask::new(GroupSpec::Cyclic(6));
        let report = verify_olson(&task, Caps::default()).unwrap();
        assert_eq!(report.instances_checked, 63 * 63);
        assert!(report.bound_violations.is_empty());
    }

    #[test]
    fn task_json_roundtrip() {
        let task = SearchTask::new(GroupSpec::Cyclic(7))
            .with_mode(SearchMode::SelfPairs)
            .with_cardinalities([2, 5], [2, 5])
            .with_shard(1, 4);
        let j = serde_json::to_string(&task).unwrap();
        let back = SearchTask::from_json(&j).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), j);
        // defaults fill in
        let minimal = SearchTask::from_json("{\"group_spec\":{\"cyclic\":5}}").unwrap();
        assert!(matches!(minimal.mode, SearchMode::AllPairs));
        assert_eq!(minimal.shard, [0, 1]);
        assert_eq!(minimal.theta_spec, AutSpec::identity());
    }
}
