//! Exact arithmetic in the cyclotomic field `Q(zeta_n)`, represented as
//! `Q[x]` modulo the n-th cyclotomic polynomial. Coefficients are arbitrary-
//! precision rationals, so equality, integrality and inversion are exact.

use num::{BigInt, BigRational, One, Signed, Zero};

type Rat = BigRational;
type Poly = Vec<Rat>;

fn rat(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

fn poly_trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if !cb.is_zero() {
                out[i + j] += ca * cb;
            }
        }
    }
    poly_trim(&mut out);
    out
}

/// Quotient and remainder of `a / b` over `Q`.
fn poly_divmod(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut rem = a.clone();
    poly_trim(&mut rem);
    let deg_b = b.len() - 1;
    let lead = b[deg_b].clone();
    let mut quot = vec![Rat::zero(); rem.len().saturating_sub(deg_b)];
    while rem.len() > deg_b {
        let k = rem.len() - 1 - deg_b;
        let c = rem.last().unwrap() / &lead;
        quot[k] = c.clone();
        for (i, cb) in b.iter().enumerate() {
            let sub = cb * &c;
            rem[k + i] -= sub;
        }
        poly_trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    poly_trim(&mut quot);
    (quot, rem)
}

/// The n-th cyclotomic polynomial, by dividing `x^n - 1` by the cyclotomic
/// polynomials of the proper divisors.
pub fn cyclotomic_polynomial(n: u64) -> Poly {
    if n == 1 {
        return vec![rat(-1), rat(1)];
    }
    let mut num = vec![Rat::zero(); n as usize + 1];
    num[0] = rat(-1);
    num[n as usize] = rat(1);
    let mut den = vec![rat(1)];
    for d in 1..n {
        if n % d == 0 {
            den = poly_mul(&den, &cyclotomic_polynomial(d));
        }
    }
    let (quot, rem) = poly_divmod(&num, &den);
    assert!(rem.is_empty(), "x^n - 1 is divisible by the proper-divisor product");
    quot
}

/// `Q(zeta_n)` with a precomputed power table `zeta^k` in the power basis.
pub struct CycField {
    pub n: u64,
    pub dim: usize,
    phi: Poly,
    /// `x^k mod Phi_n` for `k` up to `max(n, 2 dim) - 1`.
    powers: Vec<Vec<Rat>>,
}

impl CycField {
    pub fn new(n: u64) -> CycField {
        let phi = cyclotomic_polynomial(n);
        let dim = phi.len() - 1;
        let table_len = (n as usize).max(2 * dim);
        let mut powers: Vec<Vec<Rat>> = Vec::with_capacity(table_len);
        let mut cur = vec![Rat::zero(); dim];
        cur[0] = Rat::one();
        powers.push(cur.clone());
        for _ in 1..table_len {
            // multiply by x, reduce the overflow coefficient through Phi
            let top = cur[dim - 1].clone();
            for i in (1..dim).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = Rat::zero();
            if !top.is_zero() {
                // x^dim = -(phi - x^dim)
                for i in 0..dim {
                    cur[i] -= &phi[i] * &top;
                }
            }
            powers.push(cur.clone());
        }
        CycField { n, dim, phi, powers }
    }

    pub fn zero(&self) -> Cyc {
        Cyc { coeffs: vec![Rat::zero(); self.dim] }
    }

    pub fn one(&self) -> Cyc {
        self.from_rational(Rat::one())
    }

    pub fn from_rational(&self, v: Rat) -> Cyc {
        let mut coeffs = vec![Rat::zero(); self.dim];
        coeffs[0] = v;
        Cyc { coeffs }
    }

    pub fn from_integer(&self, v: i64) -> Cyc {
        self.from_rational(rat(v))
    }

    /// `zeta^k` for any integer exponent.
    pub fn zeta_pow(&self, k: i64) -> Cyc {
        let k = k.rem_euclid(self.n as i64) as usize;
        Cyc { coeffs: self.powers[k].clone() }
    }

    pub fn add(&self, a: &Cyc, b: &Cyc) -> Cyc {
        Cyc {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, a: &Cyc, b: &Cyc) -> Cyc {
        Cyc {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn neg(&self, a: &Cyc) -> Cyc {
        Cyc { coeffs: a.coeffs.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, a: &Cyc, s: &Rat) -> Cyc {
        Cyc { coeffs: a.coeffs.iter().map(|x| x * s).collect() }
    }

    pub fn mul(&self, a: &Cyc, b: &Cyc) -> Cyc {
        let mut out = vec![Rat::zero(); self.dim];
        for (i, ca) in a.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let prod = ca * cb;
                let row = &self.powers[i + j];
                for (k, rk) in row.iter().enumerate() {
                    if !rk.is_zero() {
                        out[k] += rk * &prod;
                    }
                }
            }
        }
        Cyc { coeffs: out }
    }

    /// Galois twist `zeta -> zeta^t`; `t` must be coprime to `n`.
    pub fn galois(&self, a: &Cyc, t: u64) -> Cyc {
        let mut out = self.zero();
        for (j, c) in a.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &self.powers[(t as usize * j) % self.n as usize];
            for (k, rk) in row.iter().enumerate() {
                if !rk.is_zero() {
                    out.coeffs[k] += rk * c;
                }
            }
        }
        out
    }

    /// Complex conjugation `zeta -> zeta^{-1}`.
    pub fn conj(&self, a: &Cyc) -> Cyc {
        self.galois(a, self.n - 1)
    }

    /// Embeds an element of `Q(zeta_m)` for `m | n` along
    /// `zeta_m = zeta_n^{n/m}`.
    pub fn embed_from(&self, sub: &CycField, x: &Cyc) -> Cyc {
        assert_eq!(self.n % sub.n, 0, "no subfield embedding");
        let stride = (self.n / sub.n) as i64;
        let mut out = self.zero();
        for (i, c) in x.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = self.add(&out, &self.scale(&self.zeta_pow(stride * i as i64), c));
            }
        }
        out
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// the (irreducible) cyclotomic polynomial.
    pub fn inv(&self, a: &Cyc) -> Cyc {
        assert!(!a.is_zero(), "division by zero in Q(zeta_n)");
        let mut r0 = self.phi.clone();
        let mut r1 = a.coeffs.clone();
        poly_trim(&mut r1);
        let mut t0: Poly = Vec::new();
        let mut t1: Poly = vec![Rat::one()];
        while r1.len() > 1 {
            let (q, r) = poly_divmod(&r0, &r1);
            let qt = poly_mul(&q, &t1);
            let mut t2 = t0.clone();
            t2.resize(t2.len().max(qt.len()), Rat::zero());
            for (i, c) in qt.iter().enumerate() {
                t2[i] -= c;
            }
            poly_trim(&mut t2);
            (r0, r1) = (r1, r);
            (t0, t1) = (t1, t2);
        }
        let c = r1[0].clone();
        assert!(!c.is_zero(), "cyclotomic polynomial is irreducible over Q");
        let mut coeffs = vec![Rat::zero(); self.dim];
        for (i, v) in t1.iter().enumerate() {
            // t1 has degree < dim already (deg t1 < deg phi - deg r1)
            coeffs[i] = v / &c;
        }
        Cyc { coeffs }
    }
}

/// An element of `Q(zeta_n)` in the power basis `1, zeta, ..`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyc {
    coeffs: Vec<Rat>,
}

impl Cyc {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Exactly decides whether the value lies in `Q` and returns it.
    pub fn as_rational(&self) -> Option<Rat> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| self.coeffs[0].clone())
    }

    /// Exactly decides whether the value is a rational integer `>= 0`.
    pub fn as_nonneg_integer(&self) -> Option<u64> {
        let r = self.as_rational()?;
        if r.is_integer() && !r.is_negative() {
            use num::ToPrimitive;
            r.to_integer().to_u64()
        } else {
            None
        }
    }

    /// Coefficient vector as strings, for JSON dumps.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}
