//! Small modular-arithmetic helpers used throughout.

/// Trial-division primality; inputs here never exceed a few thousand.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Multiplicative order of `r` mod `q`; `r` must be a unit.
pub fn mult_order(r: u64, q: u64) -> u64 {
    let mut k = 1;
    let mut v = r % q;
    while v != 1 {
        v = v * r % q;
        k += 1;
        assert!(k <= q, "not a unit mod {q}");
    }
    k
}

/// Inverse of `a` mod `m` for gcd(a, m) = 1.
pub fn mod_inv(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (m as i64, (a % m) as i64);
    while new_r != 0 {
        let quot = r / new_r;
        (t, new_t) = (new_t, t - quot * new_t);
        (r, new_r) = (new_r, r - quot * new_r);
    }
    assert!(r == 1, "{a} is not a unit mod {m}");
    t.rem_euclid(m as i64) as u64
}

/// Canonical residue of a possibly negative exponent.
pub fn reduce(v: i64, m: u64) -> u64 {
    v.rem_euclid(m as i64) as u64
}
