#![allow(dead_code)]

//! Fixtures shared by the integration suites.

use std::sync::Arc;

use critpair_core::{FiniteGroup, GroupSpec, NormalShape, Subset};

/// Symmetric group on three letters, identity first: e, the three
/// transpositions, then the two 3-cycles.
pub fn s3_rows() -> Vec<Vec<u32>> {
    vec![
        vec![0, 1, 2, 3, 4, 5],
        vec![1, 0, 5, 4, 3, 2],
        vec![2, 4, 0, 5, 1, 3],
        vec![3, 5, 4, 0, 2, 1],
        vec![4, 2, 3, 1, 5, 0],
        vec![5, 3, 1, 2, 0, 4],
    ]
}

pub fn s3_spec() -> GroupSpec {
    GroupSpec::Table(s3_rows())
}

/// (Z/47 x Z/47) x| Z/23 with the quotient acting as diag(2, 1).
pub fn witness_spec() -> GroupSpec {
    GroupSpec::Semidirect {
        normal: NormalShape {
            modulus: 47,
            rank: 2,
        },
        quotient: 23,
        matrix: vec![vec![2, 0], vec![0, 1]],
    }
}

pub fn witness_group() -> Arc<FiniteGroup> {
    FiniteGroup::from_spec(&witness_spec()).unwrap()
}

/// The shared-ratio progressions with shared endpoints: |A| = 5 right,
/// |B| = 9 left, ratio ((1,0),0), anchor ((0,0),1).
pub fn witness_sets(g: &Arc<FiniteGroup>) -> (Subset, Subset) {
    let a = Subset::parse(g, "[[0,0],1];[[2,0],1];[[4,0],1];[[6,0],1];[[8,0],1]").unwrap();
    let b = (0..9)
        .map(|l| format!("[[{l},0],1]"))
        .collect::<Vec<_>>()
        .join(";");
    (a, Subset::parse(g, &b).unwrap())
}

/// Structured groups of order <= 512 paired against their materialized
/// tables, covering each construction shape.
pub fn structured_family_512() -> Vec<GroupSpec> {
    vec![
        GroupSpec::Cyclic(1),
        GroupSpec::Cyclic(2),
        GroupSpec::Cyclic(31),
        GroupSpec::Cyclic(512),
        GroupSpec::Direct(
            Box::new(GroupSpec::Cyclic(8)),
            Box::new(GroupSpec::Cyclic(64)),
        ),
        GroupSpec::Direct(
            Box::new(GroupSpec::Cyclic(3)),
            Box::new(GroupSpec::Direct(
                Box::new(GroupSpec::Cyclic(5)),
                Box::new(GroupSpec::Cyclic(7)),
            )),
        ),
        // (Z/3) x| Z/2 by inversion: the symmetric group again
        GroupSpec::Semidirect {
            normal: NormalShape {
                modulus: 3,
                rank: 1,
            },
            quotient: 2,
            matrix: vec![vec![2]],
        },
        // (Z/5) x| Z/4, ord(2 mod 5) = 4
        GroupSpec::Semidirect {
            normal: NormalShape {
                modulus: 5,
                rank: 1,
            },
            quotient: 4,
            matrix: vec![vec![2]],
        },
        // (Z/7)^2 x| Z/3 with diag(2,4); both entries have order 3 mod 7
        GroupSpec::Semidirect {
            normal: NormalShape {
                modulus: 7,
                rank: 2,
            },
            quotient: 3,
            matrix: vec![vec![2, 0], vec![0, 4]],
        },
        // (Z/31) x| Z/5, ord(2 mod 31) = 5
        GroupSpec::Semidirect {
            normal: NormalShape {
                modulus: 31,
                rank: 1,
            },
            quotient: 5,
            matrix: vec![vec![2]],
        },
    ]
}

/// Every group of order <= 13 we exhaust subset pairs over: cyclic groups,
/// a couple of direct products, and the nonabelian order-6 group in both
/// representations.
pub fn small_family() -> Vec<GroupSpec> {
    let mut specs: Vec<GroupSpec> = (1..=13).map(GroupSpec::Cyclic).collect();
    specs.push(GroupSpec::Direct(
        Box::new(GroupSpec::Cyclic(2)),
        Box::new(GroupSpec::Cyclic(2)),
    ));
    specs.push(GroupSpec::Direct(
        Box::new(GroupSpec::Cyclic(2)),
        Box::new(GroupSpec::Cyclic(6)),
    ));
    specs.push(GroupSpec::Direct(
        Box::new(GroupSpec::Cyclic(3)),
        Box::new(GroupSpec::Cyclic(3)),
    ));
    specs.push(s3_spec());
    specs.push(GroupSpec::Semidirect {
        normal: NormalShape {
            modulus: 3,
            rank: 1,
        },
        quotient: 2,
        matrix: vec![vec![2]],
    });
    specs
}
