//! Subsets of a group as bit vectors over element indices.

use std::sync::Arc;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// A subset of one group's elements. The universal set type for all sumset
/// operations; immutable once built aside from explicit mutators used by the
/// search loops.
#[derive(Clone)]
pub struct Subset {
    group: Arc<FiniteGroup>,
    bits: Bits,
}

impl Subset {
    pub fn empty(group: &Arc<FiniteGroup>) -> Subset {
        Subset {
            bits: Bits::new(group.order() as usize),
            group: Arc::clone(group),
        }
    }

    pub fn full(group: &Arc<FiniteGroup>) -> Subset {
        let mut s = Subset::empty(group);
        s.bits.set_all();
        s
    }

    pub fn from_bits(group: Arc<FiniteGroup>, bits: Bits) -> Subset {
        assert_eq!(bits.len() as u64, group.order());
        Subset { group, bits }
    }

    pub fn from_indices<I: IntoIterator<Item = u64>>(
        group: &Arc<FiniteGroup>,
        indices: I,
    ) -> Result<Subset> {
        let mut s = Subset::empty(group);
        for i in indices {
            if i >= group.order() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    order: group.order(),
                });
            }
            s.bits.set(i as usize);
        }
        Ok(s)
    }

    pub fn from_mask(group: &Arc<FiniteGroup>, mask: u64) -> Subset {
        Subset {
            bits: Bits::from_mask(mask, group.order() as usize),
            group: Arc::clone(group),
        }
    }

    /// Parse a subset literal: comma-separated flat indices ("0,1,2"),
    /// semicolon-separated nested tuples ("[[0,0],1];[[2,0],1]"), or a hex
    /// bit vector ("0x07").
    pub fn parse(group: &Arc<FiniteGroup>, text: &str) -> Result<Subset> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Subset::empty(group));
        }
        if let Some(stripped) = text.strip_prefix("0x") {
            let bits = Bits::from_hex(stripped, group.order() as usize)
                .ok_or_else(|| Error::BadSubsetLiteral(text.to_string()))?;
            return Ok(Subset::from_bits(Arc::clone(group), bits));
        }
        let mut s = Subset::empty(group);
        let sep = if text.contains(';') || text.contains('[') {
            ';'
        } else {
            ','
        };
        for chunk in text.split(sep) {
            let chunk = chunk.trim();
            if chunk.is_empty() {
                continue;
            }
            let idx = group.parse_element(chunk)?;
            s.bits.set(idx as usize);
        }
        Ok(s)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        self.bits.get(i as usize)
    }

    pub fn insert(&mut self, i: u64) {
        self.bits.set(i as usize);
    }

    pub fn remove(&mut self, i: u64) {
        self.bits.clear(i as usize);
    }

    /// Ascending element indices.
    pub fn indices(&self) -> Vec<u64> {
        self.bits.iter_ones().map(|i| i as u64).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter_ones().map(|i| i as u64)
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.bits.is_subset_of(&other.bits)
    }

    pub fn to_hex(&self) -> String {
        self.bits.to_hex()
    }

    /// Flat index form "0,1,2".
    pub fn format_flat(&self) -> String {
        self.indices()
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Tuple form matching the construction tree, ';'-separated.
    pub fn format_elements(&self) -> String {
        self.indices()
            .iter()
            .map(|&i| self.group.format_element(i))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub(crate) fn same_group(&self, other: &Subset) -> bool {
        Arc::ptr_eq(&self.group, &other.group) || self.group.spec() == other.group.spec()
    }
}

impl PartialEq for Subset {
    fn eq(&self, other: &Self) -> bool {
        self.same_group(other) && self.bits == other.bits
    }
}
impl Eq for Subset {}

impl std::fmt::Debug for Subset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subset{{{}}}", self.format_flat())
    }
}
