//! Product sets, restricted product sets, and the matching lower bounds.
//!
//! Cyclic groups get a rotation fast path: A*B is the union over a in A of
//! B's bit vector rotated by a, which turns the inner loop into word-wide
//! shifts. Everything else walks set bits through the group operation.

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::morphism::Automorphism;
use crate::subset::Subset;

fn check_pair(a: &Subset, b: &Subset) -> Result<()> {
    if !a.same_group(b) {
        return Err(Error::GroupMismatch);
    }
    Ok(())
}

fn check_nonempty(a: &Subset, b: &Subset) -> Result<()> {
    check_pair(a, b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Write {a*b : a in A, b in B} into `out` (cleared first).
pub(crate) fn product_into(a: &Subset, b: &Subset, out: &mut Bits) {
    out.clear_all();
    let g = a.group();
    if g.is_cyclic_repr() {
        for x in a.iter() {
            out.or_rotated(b.bits(), x as usize);
        }
    } else {
        for x in a.iter() {
            for y in b.iter() {
                out.set(g.mul(x, y) as usize);
            }
        }
    }
}

/// Write {a * theta(b) : a in A, b in B, a != b} into `out` (cleared first).
/// `scratch` must have the group's length; it is clobbered.
pub(crate) fn restricted_product_into(
    a: &Subset,
    b: &Subset,
    theta: &Automorphism,
    out: &mut Bits,
    scratch: &mut Bits,
) {
    out.clear_all();
    let g = a.group();
    if let Some(u) = theta.cyclic_multiplier() {
        // theta(B \ {x}) = (uB) \ {ux}; rotate by x to multiply by a = x
        let n = g.order();
        scratch.clear_all();
        for y in b.iter() {
            scratch.set((y * u % n) as usize);
        }
        let theta_b = scratch.clone();
        for x in a.iter() {
            if b.get(x) {
                scratch.copy_from(&theta_b);
                scratch.clear((x * u % n) as usize);
                out.or_rotated(scratch, x as usize);
            } else {
                out.or_rotated(&theta_b, x as usize);
            }
        }
    } else {
        for x in a.iter() {
            for y in b.iter() {
                if x != y {
                    out.set(g.mul(x, theta.apply(y)) as usize);
                }
            }
        }
    }
}

/// The product set {a*b | a in A, b in B}. Empty inputs give the empty set.
pub fn product_set(a: &Subset, b: &Subset) -> Result<Subset> {
    check_pair(a, b)?;
    let mut out = Bits::new(a.group().order() as usize);
    product_into(a, b, &mut out);
    Ok(Subset::from_bits(a.group().clone(), out))
}

/// The restricted product set {a * theta(b) | a in A, b in B, a != b}.
/// The restriction is element inequality a != b, not product uniqueness.
pub fn restricted_product_set(a: &Subset, b: &Subset, theta: &Automorphism) -> Result<Subset> {
    check_pair(a, b)?;
    let n = a.group().order() as usize;
    let mut out = Bits::new(n);
    let mut scratch = Bits::new(n);
    restricted_product_into(a, b, theta, &mut out, &mut scratch);
    Ok(Subset::from_bits(a.group().clone(), out))
}

/// min(p(G), |A|+|B|-1); an infinite p(G) (trivial group) yields the sum term.
pub fn cd_bound(a: &Subset, b: &Subset) -> Result<u64> {
    check_nonempty(a, b)?;
    let sum = (a.len() + b.len() - 1) as u64;
    Ok(match a.group().p_of_g() {
        Some(p) => p.min(sum),
        None => sum,
    })
}

/// min(p(G) - delta_theta, |A|+|B|-3). May be negative for tiny sets, in
/// which case the bound is vacuous.
pub fn eh_bound(a: &Subset, b: &Subset, theta: &Automorphism) -> Result<i64> {
    check_nonempty(a, b)?;
    let sum = a.len() as i64 + b.len() as i64 - 3;
    Ok(match a.group().p_of_g() {
        Some(p) => (p as i64 - theta.delta()? as i64).min(sum),
        None => sum,
    })
}

/// |A+B| = |A|+|B|-1 exactly.
pub fn is_critical_pair_cd(a: &Subset, b: &Subset) -> Result<bool> {
    check_nonempty(a, b)?;
    Ok(product_set(a, b)?.len() == a.len() + b.len() - 1)
}

/// |A .theta B| = |A|+|B|-3 exactly.
pub fn is_critical_pair_eh(a: &Subset, b: &Subset, theta: &Automorphism) -> Result<bool> {
    check_nonempty(a, b)?;
    let size = restricted_product_set(a, b, theta)?.len() as i64;
    Ok(size == a.len() as i64 + b.len() as i64 - 3)
}

/// Outcome of the Olson inequality check.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum OlsonCheck {
    /// 2|AB| >= 2|A| + |B|.
    Inequality { product_size: usize },
    /// The inequality fails but AB(B^-1 B) = AB.
    Exceptional { product_size: usize },
    /// Neither holds (never expected; would contradict the theorem).
    Violation { product_size: usize },
}

impl OlsonCheck {
    pub fn holds(&self) -> bool {
        !matches!(self, OlsonCheck::Violation { .. })
    }
}

/// Check |AB| >= |A| + |B|/2, falling back to the exceptional stabilizer
/// condition AB * (B^-1 B) = AB. The "-B*B" of the source inequality is read
/// multiplicatively as B^-1 * B.
pub fn olson_check(a: &Subset, b: &Subset) -> Result<OlsonCheck> {
    check_nonempty(a, b)?;
    let g = a.group();
    let ab = product_set(a, b)?;
    let product_size = ab.len();
    if 2 * product_size >= 2 * a.len() + b.len() {
        return Ok(OlsonCheck::Inequality { product_size });
    }
    let b_inv = Subset::from_indices(g, b.iter().map(|x| g.inv(x)).collect::<Vec<_>>())?;
    let binv_b = product_set(&b_inv, b)?;
    let ab_binv_b = product_set(&ab, &binv_b)?;
    if ab_binv_b == ab {
        Ok(OlsonCheck::Exceptional { product_size })
    } else {
        Ok(OlsonCheck::Violation { product_size })
    }
}
