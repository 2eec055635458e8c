//! Signature arithmetic: hyperbolic area, Riemann-Hurwitz genus,
//! Teichmueller dimension and the closed-form genus expressions for the
//! families `s_{n,m} = (0; p, ..n.., p, q, ..m.., q)`.
//!
//! Everything here is exact rational arithmetic; a genus that fails to come
//! out a nonnegative integer is a hard error, never a rounding artifact.

use num::rational::Ratio;
use num::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupParams;

type Rat = Ratio<i64>;

/// `(gamma; k_1, ..., k_l)`: orbit genus plus ordered branch periods.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub gamma: u64,
    pub periods: Vec<u64>,
}

impl Signature {
    pub fn new(gamma: u64, periods: Vec<u64>) -> Signature {
        assert!(periods.iter().all(|&k| k >= 2), "periods must be >= 2");
        Signature { gamma, periods }
    }

    pub fn genus0(periods: Vec<u64>) -> Signature {
        Signature::new(0, periods)
    }

    /// Hyperbolic area of a fundamental region, in units of `2 pi`:
    /// `2 gamma - 2 + sum_i (1 - 1/k_i)`. Non-positive values are returned
    /// as-is; realizability is the caller's question.
    pub fn hyperbolic_area(&self) -> Rat {
        let mut area = Rat::from_integer(2 * self.gamma as i64 - 2);
        for &k in &self.periods {
            area += Rat::one() - Rat::new(1, k as i64);
        }
        area
    }

    /// Genus `g` of the covering surface from `2g - 2 = |G| * area`.
    pub fn rh_genus(&self, group_order: u64) -> Result<u64> {
        for &k in &self.periods {
            if group_order % k != 0 {
                return Err(Error::PeriodNotDividing { order: group_order, period: k });
            }
        }
        let area = self.hyperbolic_area();
        if !area.is_positive() {
            return Err(Error::NonPositiveArea);
        }
        let two_g = Rat::from_integer(group_order as i64) * area + Rat::from_integer(2);
        let g = two_g / Rat::from_integer(2);
        if !g.is_integer() || g.is_negative() {
            return Err(Error::NonIntegralGenus);
        }
        Ok(g.to_integer() as u64)
    }

    /// Dimension of the Teichmueller space: `3 gamma - 3 + l`.
    pub fn teich_dimension(&self) -> i64 {
        3 * self.gamma as i64 - 3 + self.periods.len() as i64
    }

    /// Same branch periods as multisets, ignoring order.
    pub fn same_periods_unordered(&self, other: &Signature) -> bool {
        if self.gamma != other.gamma {
            return false;
        }
        let mut x = self.periods.clone();
        let mut y = other.periods.clone();
        x.sort_unstable();
        y.sort_unstable();
        x == y
    }
}

/// A family `s_{n,m}`: `n` period-`p` cone points and `m` period-`q` cone
/// points over a genus-zero quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyParams {
    pub group: GroupParams,
    pub n: usize,
    pub m: usize,
}

impl FamilyParams {
    pub fn new(group: GroupParams, n: usize, m: usize) -> FamilyParams {
        assert!(n + m >= 3, "a hyperbolic genus-0 signature needs n + m >= 3");
        FamilyParams { group, n, m }
    }

    pub fn p(&self) -> u64 {
        self.group.p
    }

    pub fn q(&self) -> u64 {
        self.group.q
    }

    pub fn signature(&self) -> Signature {
        let mut periods = vec![self.p(); self.n];
        periods.extend(vec![self.q(); self.m]);
        Signature::genus0(periods)
    }

    /// Closed-form genus `1 - pq + nq(p-1)/2 + mp(q-1)/2`; requires `n >= 2`
    /// (otherwise no action exists at all).
    pub fn genus_formula(&self) -> Result<u64> {
        if self.n < 2 {
            return Err(Error::NoAction { n: self.n });
        }
        let (p, q) = (self.p() as i64, self.q() as i64);
        let (n, m) = (self.n as i64, self.m as i64);
        let g = Rat::from_integer(1 - p * q)
            + Rat::new(n * q * (p - 1), 2)
            + Rat::new(m * p * (q - 1), 2);
        if !g.is_integer() || g.is_negative() {
            return Err(Error::NonIntegralGenus);
        }
        Ok(g.to_integer() as u64)
    }

    /// Genera of the intermediate quotients `X = S/N` (by the normal `C_q`)
    /// and `Y = S/H` (by an order-`p` subgroup):
    /// `g_X = (p-1)(n-2)/2`, `g_Y = (q-1)(m-2)/2 + (p-1)(q-1)n/(2p)`.
    pub fn quotient_genera(&self) -> Result<(u64, u64)> {
        if self.n < 2 {
            return Err(Error::NoAction { n: self.n });
        }
        let (p, q) = (self.p() as i64, self.q() as i64);
        let (n, m) = (self.n as i64, self.m as i64);
        let gx = Rat::new((p - 1) * (n - 2), 2);
        let gy = Rat::new((q - 1) * (m - 2), 2) + Rat::new((p - 1) * (q - 1) * n, 2 * p);
        for g in [&gx, &gy] {
            if !g.is_integer() || g.is_negative() {
                return Err(Error::NonIntegralGenus);
            }
        }
        Ok((gx.to_integer() as u64, gy.to_integer() as u64))
    }

    /// Complex dimension of the family, `n + m - 3`.
    pub fn dimension(&self) -> i64 {
        self.signature().teich_dimension()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;

    fn fp(p: u64, q: u64, n: usize, m: usize) -> FamilyParams {
        FamilyParams::new(GroupParams::new(p, q).unwrap(), n, m)
    }

    #[test]
    fn areas_exact() {
        assert_eq!(Signature::genus0(vec![3, 3, 7]).hyperbolic_area(), Rat::new(4, 21));
        assert_eq!(Signature::new(1, vec![]).hyperbolic_area(), Rat::zero());
        assert_eq!(Signature::genus0(vec![3, 3, 7, 7]).hyperbolic_area(), Rat::new(22, 21));
    }

    #[test]
    fn rh_genus_table_values() {
        assert_eq!(Signature::genus0(vec![3, 3, 7, 7]).rh_genus(21).unwrap(), 12);
        assert_eq!(Signature::genus0(vec![3, 3, 3, 3]).rh_genus(21).unwrap(), 8);
        assert_eq!(Signature::genus0(vec![3, 3, 3, 7]).rh_genus(21).unwrap(), 10);
    }

    #[test]
    fn rh_genus_error_paths() {
        assert_eq!(
            Signature::genus0(vec![3, 3, 5]).rh_genus(21).unwrap_err(),
            Error::PeriodNotDividing { order: 21, period: 5 }
        );
        assert_eq!(
            Signature::genus0(vec![2, 2, 2]).rh_genus(8).unwrap_err(),
            Error::NonPositiveArea
        );
    }

    #[test]
    fn genus_formula_matches_table() {
        // the three one-dimensional families across desk-scale (p,q)
        for (p, q) in [(3u64, 7u64), (3, 13), (5, 11)] {
            let g22 = fp(p, q, 2, 2).genus_formula().unwrap();
            assert_eq!(g22, (p - 1) * (q - 1));
            let g40 = fp(p, q, 4, 0).genus_formula().unwrap();
            assert_eq!(g40, 1 + q * (p - 2));
            let g31 = fp(p, q, 3, 1).genus_formula().unwrap();
            assert_eq!(g31, 1 + p * q - (p + 3 * q) / 2);
        }
        assert_eq!(fp(3, 7, 2, 2).genus_formula().unwrap(), 12);
        assert_eq!(fp(3, 7, 4, 0).genus_formula().unwrap(), 8);
        assert_eq!(fp(3, 7, 1, 2).genus_formula(), Err(Error::NoAction { n: 1 }));
    }

    #[test]
    fn genus_formula_agrees_with_riemann_hurwitz() {
        for (p, q) in [(3u64, 7u64), (3, 13), (5, 11)] {
            for total in 3..=5usize {
                for n in 2..=total {
                    let f = fp(p, q, n, total - n);
                    if f.signature().hyperbolic_area().is_positive() {
                        assert_eq!(
                            f.genus_formula().unwrap(),
                            f.signature().rh_genus(p * q).unwrap()
                        );
                    } else {
                        // (0; 3,3,3) is Euclidean: the only non-hyperbolic
                        // cell in the sweep, with torus genus 1
                        assert_eq!((p, n, total - n), (3, 3, 0));
                        assert_eq!(f.genus_formula().unwrap(), 1);
                        assert_eq!(
                            f.signature().rh_genus(p * q),
                            Err(Error::NonPositiveArea)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn quotient_genera_examples() {
        assert_eq!(fp(3, 7, 2, 2).quotient_genera().unwrap(), (0, 4));
        assert_eq!(fp(3, 7, 4, 0).quotient_genera().unwrap(), (2, 2));
        assert_eq!(fp(3, 7, 3, 1).quotient_genera().unwrap(), (1, 3));
    }

    #[test]
    fn quotient_genera_consistent_with_genus() {
        // g = g_X + p g_Y
        for (p, q) in [(3u64, 7u64), (3, 13), (5, 11)] {
            for total in 3..=5usize {
                for n in 2..=total {
                    let f = fp(p, q, n, total - n);
                    let (gx, gy) = f.quotient_genera().unwrap();
                    assert_eq!(gx + p * gy, f.genus_formula().unwrap());
                }
            }
        }
    }

    #[test]
    fn teichmueller_dimensions() {
        assert_eq!(fp(3, 7, 2, 2).dimension(), 1);
        assert_eq!(Signature::genus0(vec![3, 3, 7]).teich_dimension(), 0);
        assert_eq!(fp(3, 7, 3, 2).dimension(), 2); // n + m - 3
    }
}
