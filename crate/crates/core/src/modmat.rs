//! Small dense matrices over Z/m, used for semidirect actions and matrix
//! automorphisms. Rank is capped well below anything where asymptotics
//! matter, so determinants go through Laplace expansion (no division, which
//! keeps composite moduli exact).

pub const MAX_RANK: usize = 8;

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm_checked(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime factor, or None for n <= 1.
pub fn smallest_prime_factor(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    if n % 2 == 0 {
        return Some(2);
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return Some(d);
        }
        d += 2;
    }
    Some(n)
}

/// Row-major d x d identity.
pub fn identity(d: usize) -> Vec<u64> {
    let mut m = vec![0; d * d];
    for i in 0..d {
        m[i * d + i] = 1;
    }
    m
}

pub fn mat_mul(a: &[u64], b: &[u64], d: usize, modulus: u64) -> Vec<u64> {
    let mut out = vec![0u64; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == 0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] = (out[i * d + j] + aik * b[k * d + j]) % modulus;
            }
        }
    }
    out
}

/// Apply matrix to a column vector mod m.
pub fn mat_apply(m: &[u64], v: &[u64], d: usize, modulus: u64) -> Vec<u64> {
    let mut out = vec![0u64; d];
    for i in 0..d {
        let mut acc = 0u64;
        for j in 0..d {
            acc = (acc + m[i * d + j] * v[j]) % modulus;
        }
        out[i] = acc;
    }
    out
}

/// Determinant mod m by Laplace expansion along the first row.
pub fn det_mod(m: &[u64], d: usize, modulus: u64) -> u64 {
    assert!(d <= MAX_RANK);
    if d == 0 {
        return 1 % modulus;
    }
    if d == 1 {
        return m[0] % modulus;
    }
    let mut acc: u64 = 0;
    for col in 0..d {
        let a = m[col] % modulus;
        if a == 0 {
            continue;
        }
        let minor: Vec<u64> = (1..d)
            .flat_map(|r| (0..d).filter(|&c| c != col).map(move |c| m[r * d + c]))
            .collect();
        let sub = det_mod(&minor, d - 1, modulus);
        let term = a * sub % modulus;
        if col % 2 == 0 {
            acc = (acc + term) % modulus;
        } else {
            acc = (acc + modulus - term) % modulus;
        }
    }
    acc
}

pub fn is_invertible_mod(m: &[u64], d: usize, modulus: u64) -> bool {
    gcd(det_mod(m, d, modulus), modulus) == 1
}

/// Order of the matrix in GL_d(Z/m), by repeated multiplication; None once
/// `iter_cap` products have been formed without reaching the identity.
pub fn mat_order(m: &[u64], d: usize, modulus: u64, iter_cap: u64) -> Option<u64> {
    let id = identity(d);
    let mut acc = m.to_vec();
    for w in &mut acc {
        *w %= modulus;
    }
    let mut t = 1u64;
    while acc != id {
        if t >= iter_cap {
            return None;
        }
        acc = mat_mul(&acc, m, d, modulus);
        t += 1;
    }
    Some(t)
}

/// Multiplicative order of u mod n (u must be a unit).
pub fn mult_order(u: u64, n: u64, iter_cap: u64) -> Option<u64> {
    let mut x = u % n;
    let mut t = 1u64;
    while x != 1 % n {
        if t >= iter_cap {
            return None;
        }
        x = x * (u % n) % n;
        t += 1;
    }
    Some(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small() {
        // det [[2,0],[0,1]] = 2 mod 47
        assert_eq!(det_mod(&[2, 0, 0, 1], 2, 47), 2);
        // det [[1,2],[3,4]] = -2 = 45 mod 47
        assert_eq!(det_mod(&[1, 2, 3, 4], 2, 47), 45);
        assert_eq!(det_mod(&[3], 1, 6), 3);
        // singular mod 6: det [[2,0],[0,3]] = 6 = 0
        assert_eq!(det_mod(&[2, 0, 0, 3], 2, 6), 0);
        assert!(!is_invertible_mod(&[2, 0, 0, 3], 2, 6));
        assert!(is_invertible_mod(&[2, 0, 0, 1], 2, 47));
    }

    #[test]
    fn matrix_orders() {
        // ord(2) = 23 mod 47, so diag(2,1) has order 23
        assert_eq!(mat_order(&[2, 0, 0, 1], 2, 47, 1000), Some(23));
        assert_eq!(mat_order(&[3, 0, 0, 1], 2, 47, 1000), Some(23));
        assert_eq!(mat_order(&[5, 0, 0, 1], 2, 47, 1000), Some(46));
        assert_eq!(mat_order(&[1, 0, 0, 1], 2, 47, 1000), Some(1));
        assert_eq!(mat_order(&[2, 0, 0, 1], 2, 47, 10), None);
    }

    #[test]
    fn scalar_orders() {
        assert_eq!(mult_order(3, 7, 100), Some(6));
        assert_eq!(mult_order(2, 7, 100), Some(3));
        assert_eq!(mult_order(2, 31, 100), Some(5));
        assert_eq!(mult_order(1, 1, 100), Some(1));
    }

    #[test]
    fn primality() {
        assert!(is_prime(2) && is_prime(23) && is_prime(47));
        assert!(!is_prime(1) && !is_prime(49) && !is_prime(50807));
        assert_eq!(smallest_prime_factor(50807), Some(23));
        assert_eq!(smallest_prime_factor(15), Some(3));
        assert_eq!(smallest_prime_factor(1), None);
    }
}
