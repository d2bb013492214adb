//! Verified group automorphisms.
//!
//! Only maps that pass the multiplicativity checks can be constructed, so a
//! value of type [`Automorphism`] is always a genuine automorphism — an
//! arbitrary bijection is rejected up front rather than silently producing
//! wrong bounds downstream.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Node};
use crate::modmat;

/// Wire descriptor: `{"identity": true}` | `{"multiplier": u}` |
/// `{"matrix": [[..]], "target": [..]}` | `{"permutation": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutSpec {
    Identity {
        identity: bool,
    },
    Multiplier {
        multiplier: u64,
    },
    Matrix {
        matrix: Vec<Vec<u64>>,
        #[serde(default)]
        target: Vec<usize>,
    },
    Permutation {
        permutation: Vec<u32>,
    },
}

impl AutSpec {
    pub fn identity() -> AutSpec {
        AutSpec::Identity { identity: true }
    }

    pub fn from_json(s: &str) -> Result<AutSpec> {
        serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }
}

#[derive(Debug, Clone)]
enum Form {
    Identity,
    Multiplier {
        u: u64,
        n: u64,
    },
    /// Acts as `matrix` on one (Z/m)^d digit of the mixed-radix encoding and
    /// fixes every other component.
    Matrix {
        matrix: Vec<u64>,
        modulus: u64,
        rank: usize,
        stride: u64,
        node_size: u64,
    },
    Permutation {
        map: Vec<u32>,
    },
}

/// A verified automorphism of a fixed group.
pub struct Automorphism {
    group: Arc<FiniteGroup>,
    spec: AutSpec,
    form: Form,
    cached_order: OnceLock<u64>,
}

impl std::fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Automorphism({})", self.spec.to_json())
    }
}

impl Automorphism {
    /// Build the identity automorphism.
    pub fn identity(group: &Arc<FiniteGroup>) -> Automorphism {
        Automorphism {
            group: Arc::clone(group),
            spec: AutSpec::identity(),
            form: Form::Identity,
            cached_order: OnceLock::new(),
        }
    }

    /// Build and verify an automorphism from its descriptor.
    pub fn new(group: &Arc<FiniteGroup>, spec: &AutSpec) -> Result<Automorphism> {
        let form = match spec {
            AutSpec::Identity { identity } => {
                if !identity {
                    return Err(Error::InvalidSpec("\"identity\" must be true".into()));
                }
                Form::Identity
            }
            AutSpec::Multiplier { multiplier } => {
                let node = group
                    .node()
                    .ok_or_else(|| Error::InvalidSpec("multiplier needs a cyclic group".into()))?;
                let n = match node {
                    Node::Cyclic { n } => *n,
                    _ => {
                        return Err(Error::InvalidSpec(
                            "multiplier form applies to cyclic groups; use matrix+target".into(),
                        ))
                    }
                };
                let u = multiplier % n;
                if modmat::gcd(u, n) != 1 {
                    return Err(Error::NotAUnit {
                        u: *multiplier,
                        n,
                    });
                }
                Form::Multiplier { u, n }
            }
            AutSpec::Matrix { matrix, target } => resolve_matrix(group, matrix, target)?,
            AutSpec::Permutation { permutation } => {
                let n = group.order();
                if n > group.caps().perm_aut {
                    return Err(Error::CapExceeded {
                        what: "permutation automorphism check",
                        needed: n,
                        cap: group.caps().perm_aut,
                    });
                }
                if permutation.len() as u64 != n {
                    return Err(Error::NotBijective);
                }
                let mut seen = vec![false; n as usize];
                for &v in permutation {
                    if v as u64 >= n || seen[v as usize] {
                        return Err(Error::NotBijective);
                    }
                    seen[v as usize] = true;
                }
                if permutation[0] != 0 {
                    return Err(Error::NotMultiplicative { a: 0, b: 0 });
                }
                for a in 0..n {
                    for b in 0..n {
                        let lhs = permutation[group.op(a, b)? as usize] as u64;
                        let rhs = group.op(
                            permutation[a as usize] as u64,
                            permutation[b as usize] as u64,
                        )?;
                        if lhs != rhs {
                            return Err(Error::NotMultiplicative {
                                a: a as u32,
                                b: b as u32,
                            });
                        }
                    }
                }
                Form::Permutation {
                    map: permutation.clone(),
                }
            }
        };
        Ok(Automorphism {
            group: Arc::clone(group),
            spec: spec.clone(),
            form,
            cached_order: OnceLock::new(),
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn spec(&self) -> &AutSpec {
        &self.spec
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.form, Form::Identity)
    }

    /// theta(a). The index must be valid for the owning group.
    #[inline]
    pub fn apply(&self, a: u64) -> u64 {
        debug_assert!(a < self.group.order());
        match &self.form {
            Form::Identity => a,
            Form::Multiplier { u, n } => a * u % n,
            Form::Matrix {
                matrix,
                modulus,
                rank,
                stride,
                node_size,
            } => {
                let low = a % stride;
                let rest = a / stride;
                let node_idx = rest % node_size;
                let high = rest / node_size;
                let mut v = [0u64; modmat::MAX_RANK];
                let mut tmp = node_idx;
                for slot in v.iter_mut().take(*rank) {
                    *slot = tmp % modulus;
                    tmp /= modulus;
                }
                let mut out = 0u64;
                let mut radix = 1u64;
                for i in 0..*rank {
                    let mut acc = 0u64;
                    for j in 0..*rank {
                        acc = (acc + matrix[i * rank + j] * v[j]) % modulus;
                    }
                    out += acc * radix;
                    radix *= modulus;
                }
                low + stride * (out + node_size * high)
            }
            Form::Permutation { map } => map[a as usize] as u64,
        }
    }

    /// For the cyclic rotation fast path: the scalar u with theta(b) = u*b,
    /// when the group is cyclic and theta is scalar.
    pub(crate) fn cyclic_multiplier(&self) -> Option<u64> {
        match &self.form {
            Form::Identity if self.group.is_cyclic_repr() => Some(1),
            Form::Multiplier { u, .. } => Some(*u),
            _ => None,
        }
    }

    /// Least t >= 1 with theta^t = id.
    pub fn order(&self) -> Result<u64> {
        if let Some(&o) = self.cached_order.get() {
            return Ok(o);
        }
        let cap = self.group.caps().aut_order_iters;
        let o = match &self.form {
            Form::Identity => 1,
            Form::Multiplier { u, n } => {
                modmat::mult_order(*u, *n, cap).ok_or(Error::CapExceeded {
                    what: "automorphism order",
                    needed: cap + 1,
                    cap,
                })?
            }
            Form::Matrix {
                matrix,
                modulus,
                rank,
                ..
            } => modmat::mat_order(matrix, *rank, *modulus, cap).ok_or(Error::CapExceeded {
                what: "automorphism order",
                needed: cap + 1,
                cap,
            })?,
            Form::Permutation { map } => {
                // lcm of cycle lengths
                let n = map.len();
                let mut seen = vec![false; n];
                let mut acc: u64 = 1;
                for start in 0..n {
                    if seen[start] {
                        continue;
                    }
                    let mut len = 0u64;
                    let mut x = start;
                    while !seen[x] {
                        seen[x] = true;
                        x = map[x] as usize;
                        len += 1;
                    }
                    acc = modmat::lcm_checked(acc, len)
                        .filter(|&v| v <= cap)
                        .ok_or(Error::CapExceeded {
                            what: "automorphism order",
                            needed: cap + 1,
                            cap,
                        })?;
                }
                acc
            }
        };
        let _ = self.cached_order.set(o);
        Ok(o)
    }

    /// 1 when theta has even order in Aut(G), else 0.
    pub fn delta(&self) -> Result<u8> {
        Ok(if self.order()? % 2 == 0 { 1 } else { 0 })
    }
}

fn resolve_matrix(group: &Arc<FiniteGroup>, matrix: &[Vec<u64>], target: &[usize]) -> Result<Form> {
    let mut node = group
        .node()
        .ok_or_else(|| Error::InvalidSpec("matrix form needs a structured group".into()))?;
    let mut stride = 1u64;
    for &step in target {
        match node {
            Node::Direct {
                left,
                right,
                left_order,
                ..
            } => match step {
                0 => node = left,
                1 => {
                    stride *= left_order;
                    node = right;
                }
                _ => return Err(Error::BadTargetPath),
            },
            // paths may only traverse direct-product nodes; acting deep
            // inside a semidirect factor would not fix the other components
            _ => return Err(Error::BadTargetPath),
        }
    }
    let (modulus, rank, node_size, action) = match node {
        Node::Cyclic { n } => (*n, 1usize, *n, None),
        Node::Semidirect {
            modulus,
            rank,
            powers,
            normal_order,
            ..
        } => (*modulus, *rank, *normal_order, powers.get(1)),
        Node::Direct { .. } => return Err(Error::BadTargetPath),
    };
    if matrix.len() != rank || matrix.iter().any(|r| r.len() != rank) {
        return Err(Error::InvalidSpec(format!(
            "matrix must be {rank}x{rank} for this target"
        )));
    }
    let flat: Vec<u64> = matrix.iter().flatten().map(|&x| x % modulus).collect();
    if !modmat::is_invertible_mod(&flat, rank, modulus) {
        return Err(Error::MatrixNotInvertible { modulus });
    }
    if let Some(a) = action {
        // theta(n,h) = (Mn, h) respects (n1,h1)(n2,h2) iff M commutes with
        // the action matrix
        let ma = modmat::mat_mul(&flat, a, rank, modulus);
        let am = modmat::mat_mul(a, &flat, rank, modulus);
        if ma != am {
            return Err(Error::MatrixActionConflict);
        }
    }
    Ok(Form::Matrix {
        matrix: flat,
        modulus,
        rank,
        stride,
        node_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::testutil::nonabelian_witness_group as example_group;

    #[test]
    fn identity_properties() {
        let g = FiniteGroup::cyclic(11);
        let id = Automorphism::identity(&g);
        assert_eq!(id.order().unwrap(), 1);
        assert_eq!(id.delta().unwrap(), 0);
        assert_eq!(id.apply(7), 7);
    }

    #[test]
    fn multiplier_validation_and_order() {
        let z7 = FiniteGroup::cyclic(7);
        let m3 = Automorphism::new(&z7, &AutSpec::Multiplier { multiplier: 3 }).unwrap();
        assert_eq!(m3.apply(5), 1); // 15 mod 7
        assert_eq!(m3.order().unwrap(), 6);
        assert_eq!(m3.delta().unwrap(), 1);
        let m2 = Automorphism::new(&z7, &AutSpec::Multiplier { multiplier: 2 }).unwrap();
        assert_eq!(m2.order().unwrap(), 3);
        assert_eq!(m2.delta().unwrap(), 0);

        let z6 = FiniteGroup::cyclic(6);
        assert!(matches!(
            Automorphism::new(&z6, &AutSpec::Multiplier { multiplier: 2 }),
            Err(Error::NotAUnit { .. })
        ));
    }

    #[test]
    fn matrix_on_semidirect_normal_part() {
        let g = example_group();
        let th = Automorphism::new(
            &g,
            &AutSpec::Matrix {
                matrix: vec![vec![2, 0], vec![0, 1]],
                target: vec![],
            },
        )
        .unwrap();
        // ((1,1),0) -> ((2,1),0)
        let e = g.parse_element("[[1,1],0]").unwrap();
        assert_eq!(g.format_element(th.apply(e)), "[[2,1],0]");
        assert_eq!(th.order().unwrap(), 23);
        assert_eq!(th.delta().unwrap(), 0);
        // quotient part is fixed
        let z = g.parse_element("[[0,0],5]").unwrap();
        assert_eq!(th.apply(z), z);
    }

    #[test]
    fn matrix_must_commute_with_action() {
        let g = example_group();
        // [[1,1],[0,1]] does not commute with diag(2,1)
        let bad = AutSpec::Matrix {
            matrix: vec![vec![1, 1], vec![0, 1]],
            target: vec![],
        };
        assert!(matches!(
            Automorphism::new(&g, &bad),
            Err(Error::MatrixActionConflict)
        ));
    }

    #[test]
    fn matrix_on_direct_component() {
        let spec = GroupSpec::Direct(
            Box::new(GroupSpec::Cyclic(5)),
            Box::new(GroupSpec::Cyclic(7)),
        );
        let g = FiniteGroup::from_spec(&spec).unwrap();
        // multiply the second component by 3 (order 6 mod 7)
        let th = Automorphism::new(
            &g,
            &AutSpec::Matrix {
                matrix: vec![vec![3]],
                target: vec![1],
            },
        )
        .unwrap();
        let e = g.parse_element("[2,5]").unwrap();
        assert_eq!(g.format_element(th.apply(e)), "[2,1]");
        assert_eq!(th.order().unwrap(), 6);
        // the whole group is not cyclic at the root, so multiplier is rejected
        assert!(Automorphism::new(&g, &AutSpec::Multiplier { multiplier: 2 }).is_err());
        // path into a non-direct node is rejected
        assert!(matches!(
            Automorphism::new(
                &g,
                &AutSpec::Matrix {
                    matrix: vec![vec![1]],
                    target: vec![2],
                }
            ),
            Err(Error::BadTargetPath)
        ));
    }

    #[test]
    fn permutation_automorphisms() {
        let g = crate::testutil::s3();
        // conjugation by element 1 is an inner automorphism
        let conj: Vec<u32> = (0..6)
            .map(|x| {
                g.op(g.op(1, x).unwrap(), g.inverse(1).unwrap()).unwrap() as u32
            })
            .collect();
        let th = Automorphism::new(&g, &AutSpec::Permutation { permutation: conj }).unwrap();
        assert_eq!(th.order().unwrap(), 2);
        assert_eq!(th.delta().unwrap(), 1);
        // swapping an involution with a 3-cycle breaks multiplicativity
        let swap = vec![0u32, 4, 2, 3, 1, 5];
        let res = Automorphism::new(&g, &AutSpec::Permutation { permutation: swap });
        assert!(matches!(res, Err(Error::NotMultiplicative { .. })));
        // ...while conjugation by the third transposition is a genuine
        // automorphism of order 2
        let conj3 = vec![0u32, 2, 1, 3, 5, 4];
        let th3 = Automorphism::new(&g, &AutSpec::Permutation { permutation: conj3 }).unwrap();
        assert_eq!(th3.order().unwrap(), 2);
        // wrong length
        assert!(matches!(
            Automorphism::new(&g, &AutSpec::Permutation { permutation: vec![0, 1] }),
            Err(Error::NotBijective)
        ));
    }

    #[test]
    fn spec_json_roundtrip() {
        for s in [
            AutSpec::identity(),
            AutSpec::Multiplier { multiplier: 3 },
            AutSpec::Matrix {
                matrix: vec![vec![2, 0], vec![0, 1]],
                target: vec![1],
            },
            AutSpec::Permutation {
                permutation: vec![0, 1, 2],
            },
        ] {
            assert_eq!(AutSpec::from_json(&s.to_json()).unwrap(), s);
        }
        assert_eq!(
            AutSpec::from_json("{\"identity\":true}").unwrap(),
            AutSpec::identity()
        );
        assert_eq!(
            AutSpec::from_json("{\"multiplier\":3}").unwrap(),
            AutSpec::Multiplier { multiplier: 3 }
        );
    }
}
