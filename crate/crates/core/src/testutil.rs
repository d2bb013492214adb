//! Shared fixtures for unit tests.

use std::sync::Arc;

use crate::group::{FiniteGroup, GroupSpec, NormalShape};
use crate::subset::Subset;

/// Symmetric group on three letters as a raw table, identity first.
/// Elements: e, the three transpositions, then the two 3-cycles.
pub(crate) fn s3_rows() -> Vec<Vec<u32>> {
    vec![
        vec![0, 1, 2, 3, 4, 5],
        vec![1, 0, 5, 4, 3, 2],
        vec![2, 4, 0, 5, 1, 3],
        vec![3, 5, 4, 0, 2, 1],
        vec![4, 2, 3, 1, 5, 0],
        vec![5, 3, 1, 2, 0, 4],
    ]
}

pub(crate) fn s3() -> Arc<FiniteGroup> {
    FiniteGroup::from_spec(&GroupSpec::Table(s3_rows())).unwrap()
}

/// (Z/47 x Z/47) x| Z/23 with the quotient generator acting as diag(2, 1).
pub(crate) fn nonabelian_witness_spec() -> GroupSpec {
    GroupSpec::Semidirect {
        normal: NormalShape {
            modulus: 47,
            rank: 2,
        },
        quotient: 23,
        matrix: vec![vec![2, 0], vec![0, 1]],
    }
}

pub(crate) fn nonabelian_witness_group() -> Arc<FiniteGroup> {
    FiniteGroup::from_spec(&nonabelian_witness_spec()).unwrap()
}

/// The 5-element right progression and 9-element left progression with
/// shared ratio ((1,0),0) and shared endpoints in the witness group.
pub(crate) fn witness_sets(g: &Arc<FiniteGroup>) -> (Subset, Subset) {
    let a = Subset::parse(g, "[[0,0],1];[[2,0],1];[[4,0],1];[[6,0],1];[[8,0],1]").unwrap();
    let b = (0..9)
        .map(|l| format!("[[{l},0],1]"))
        .collect::<Vec<_>>()
        .join(";");
    (a, Subset::parse(g, &b).unwrap())
}
