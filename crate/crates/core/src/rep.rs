//! Exact character theory of `G_{p,q}`: the `p` linear characters, the
//! `(q-1)/p` degree-`p` characters, their grouping into the three rational
//! irreducibles by Galois twisting, and fixed-subspace dimensions of
//! subgroups by exact character averaging.
//!
//! The degree-`p` representations also come with their explicit monomial
//! matrix model over `Q(zeta_q)`, which certifies the relations and lets the
//! fixed-space dimensions be cross-checked against projector ranks.

use std::collections::BTreeSet;

use num::{BigInt, BigRational, One};
use serde_json::json;

use crate::arith::mod_pow;
use crate::cyclotomic::{Cyc, CycField};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupParams};

/// A conjugacy class, represented by its least element id.
#[derive(Clone, Debug)]
pub struct ConjClass {
    pub rep: u16,
    pub members: Vec<u16>,
}

/// Conjugacy classes by brute-force conjugation closure, sorted by
/// representative.
pub fn conjugacy_classes(g: &FiniteGroup) -> Vec<ConjClass> {
    let n = g.order();
    let mut seen = vec![false; n];
    let mut classes = Vec::new();
    for x in 0..n {
        if seen[x] {
            continue;
        }
        let mut members = BTreeSet::new();
        for h in 0..n {
            let c = g.mul_id(g.mul_id(h, x), g.inv_id(h));
            members.insert(c as u16);
        }
        for &m in &members {
            seen[m as usize] = true;
        }
        classes.push(ConjClass { rep: x as u16, members: members.into_iter().collect() });
    }
    classes
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrrepKind {
    /// `chi_l : a -> 1, b -> omega_p^l`.
    Linear { l: u64 },
    /// `psi_j : a -> diag(omega_q^{k_j}, omega_q^{k_j r}, ...)`, `b` the
    /// cyclic shift; `k_j` is the orbit representative.
    DegreeP { k: u64 },
}

#[derive(Clone, Debug)]
pub struct ComplexIrrep {
    pub kind: IrrepKind,
    pub degree: u64,
    /// character value on each conjugacy class
    pub values: Vec<Cyc>,
}

/// The full complex character table of `G_{p,q}`, with exact values in
/// `Q(zeta_pq)`, verified against both orthogonality relations at
/// construction time.
pub struct CharacterTable {
    pub params: GroupParams,
    pub field: CycField,
    pub classes: Vec<ConjClass>,
    pub irreps: Vec<ComplexIrrep>,
    class_of: Vec<usize>,
}

/// Orbit representatives of `Z_q^*` under multiplication by `r`; these index
/// the degree-`p` characters.
pub fn degree_p_orbit_reps(params: &GroupParams) -> Vec<u64> {
    let GroupParams { p, q, r } = *params;
    let mut seen = vec![false; q as usize];
    let mut reps = Vec::new();
    for k in 1..q {
        if seen[k as usize] {
            continue;
        }
        reps.push(k);
        let mut v = k;
        for _ in 0..p {
            seen[v as usize] = true;
            v = v * r % q;
        }
    }
    reps
}

impl CharacterTable {
    pub fn new(g: &FiniteGroup) -> Result<CharacterTable> {
        let params = g.params;
        let GroupParams { p, q, r } = params;
        let n = p * q;
        let field = CycField::new(n);
        let classes = conjugacy_classes(g);
        let mut class_of = vec![0usize; g.order()];
        for (ci, cls) in classes.iter().enumerate() {
            for &m in &cls.members {
                class_of[m as usize] = ci;
            }
        }

        let mut irreps = Vec::new();
        // linear characters: a -> 1, b -> omega_p^l = zeta^{ql}
        for l in 0..p {
            let values = classes
                .iter()
                .map(|cls| {
                    let (_, bn) = g.metacyclic_ln(g.elem(cls.rep as usize));
                    field.zeta_pow((q * l * bn) as i64)
                })
                .collect();
            irreps.push(ComplexIrrep { kind: IrrepKind::Linear { l }, degree: 1, values });
        }
        // degree-p characters: supported on <a>, zero elsewhere
        for k in degree_p_orbit_reps(&params) {
            let values = classes
                .iter()
                .map(|cls| {
                    let (al, bn) = g.metacyclic_ln(g.elem(cls.rep as usize));
                    if bn != 0 {
                        field.zero()
                    } else if al == 0 {
                        field.from_integer(p as i64)
                    } else {
                        let mut s = field.zero();
                        for i in 0..p {
                            let expo = p * (k * mod_pow(r, i, q) % q * al % q);
                            s = field.add(&s, &field.zeta_pow(expo as i64));
                        }
                        s
                    }
                })
                .collect();
            irreps.push(ComplexIrrep { kind: IrrepKind::DegreeP { k }, degree: p, values });
        }

        let table = CharacterTable { params, field, classes, irreps, class_of };
        table.verify()?;
        Ok(table)
    }

    fn verify(&self) -> Result<()> {
        let order = (self.params.p * self.params.q) as i64;
        let sum_sq: u64 = self.irreps.iter().map(|i| i.degree * i.degree).sum();
        if sum_sq != order as u64 {
            return Err(Error::CharacterCheckFailed(format!(
                "sum of squared degrees is {sum_sq}, group order is {order}"
            )));
        }
        let f = &self.field;
        // first orthogonality: <chi_i, chi_j> = delta_ij
        for (i, xi) in self.irreps.iter().enumerate() {
            for (j, xj) in self.irreps.iter().enumerate() {
                let mut s = f.zero();
                for (ci, cls) in self.classes.iter().enumerate() {
                    let term = f.mul(&xi.values[ci], &f.conj(&xj.values[ci]));
                    s = f.add(&s, &f.scale(&term, &rat(cls.members.len() as i64)));
                }
                let want = if i == j { f.from_integer(order) } else { f.zero() };
                if s != want {
                    return Err(Error::CharacterCheckFailed(format!(
                        "first orthogonality fails at rows {i}, {j}"
                    )));
                }
            }
        }
        // second orthogonality: column sums give |C_G(g)| on the diagonal
        for (ci, ca) in self.classes.iter().enumerate() {
            for (cj, _) in self.classes.iter().enumerate() {
                let mut s = f.zero();
                for irrep in &self.irreps {
                    s = f.add(&s, &f.mul(&irrep.values[ci], &f.conj(&irrep.values[cj])));
                }
                let want = if ci == cj {
                    f.from_integer(order / ca.members.len() as i64)
                } else {
                    f.zero()
                };
                if s != want {
                    return Err(Error::CharacterCheckFailed(format!(
                        "second orthogonality fails at classes {ci}, {cj}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn value_at(&self, irrep: usize, elem_id: usize) -> &Cyc {
        &self.irreps[irrep].values[self.class_of[elem_id]]
    }

    /// `dim V^H = (1/|H|) sum_{h in H} chi_V(h)`, exact; a non-integral
    /// average signals an arithmetic bug and is rejected.
    pub fn fixed_dim(&self, irrep: usize, subgroup: &BTreeSet<usize>) -> Result<u64> {
        let f = &self.field;
        let mut s = f.zero();
        for &h in subgroup {
            s = f.add(&s, self.value_at(irrep, h));
        }
        let avg = f.scale(&s, &BigRational::new(BigInt::one(), BigInt::from(subgroup.len())));
        avg.as_nonneg_integer().ok_or(Error::NonIntegralFixedDim)
    }

    /// Index of `chi_1` (the first nontrivial linear character).
    pub fn chi1(&self) -> usize {
        self.irreps
            .iter()
            .position(|i| matches!(i.kind, IrrepKind::Linear { l: 1 }))
            .expect("chi_1 exists")
    }

    /// Index of `psi_1` (the first degree-p character).
    pub fn psi1(&self) -> usize {
        self.irreps
            .iter()
            .position(|i| matches!(i.kind, IrrepKind::DegreeP { .. }))
            .expect("psi_1 exists")
    }

    /// JSON dump: per class the representative word and size, per irrep the
    /// exact values as coefficient vectors.
    pub fn to_json(&self, g: &FiniteGroup) -> serde_json::Value {
        let classes: Vec<_> = self
            .classes
            .iter()
            .map(|c| {
                json!({
                    "representative": g.describe(g.elem(c.rep as usize)),
                    "size": c.members.len(),
                })
            })
            .collect();
        let irreps: Vec<_> = self
            .irreps
            .iter()
            .map(|i| {
                let kind = match i.kind {
                    IrrepKind::Linear { l } => format!("chi_{l}"),
                    IrrepKind::DegreeP { k } => format!("psi[k={k}]"),
                };
                json!({
                    "kind": kind,
                    "degree": i.degree,
                    "values": i.values.iter().map(|v| v.coeff_strings()).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "p": self.params.p,
            "q": self.params.q,
            "r": self.params.r,
            "cyclotomic_order": self.params.p * self.params.q,
            "classes": classes,
            "irreps": irreps,
        })
    }
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// A rational irreducible representation: one Galois orbit of complex ones.
#[derive(Clone, Debug)]
pub struct RationalIrrep {
    pub label: String,
    /// indices into `CharacterTable::irreps`
    pub components: Vec<usize>,
    /// degree of one complex component
    pub degree: u64,
    /// Schur index; equals one here, certified by the monomial model
    pub schur_index: u64,
    /// degree of the character field over `Q` (= Galois orbit size)
    pub field_degree: u64,
    /// multiplicity in the isotypic decomposition, `d / s`
    pub multiplicity: u64,
}

/// Groups the complex irreducibles into Galois orbits by exponent-twisting
/// of character values. For `G_{p,q}` the result is exactly
/// `W_0` (trivial), `W_1` (the nontrivial linears) and `W_2` (the degree-p
/// characters).
pub fn rational_irreps(table: &CharacterTable) -> Result<Vec<RationalIrrep>> {
    let n = table.params.p * table.params.q;
    let f = &table.field;
    let nreps = table.irreps.len();
    let mut orbit_of = vec![usize::MAX; nreps];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..nreps {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let mut orbit = BTreeSet::new();
        orbit.insert(i);
        for t in 1..n {
            if num::integer::gcd(t, n) != 1 {
                continue;
            }
            let twisted: Vec<Cyc> =
                table.irreps[i].values.iter().map(|v| f.galois(v, t)).collect();
            let hit = (0..nreps)
                .find(|&j| table.irreps[j].values == twisted)
                .ok_or_else(|| {
                    Error::CharacterCheckFailed("Galois twist left the character table".into())
                })?;
            orbit.insert(hit);
        }
        let orbit: Vec<usize> = orbit.into_iter().collect();
        for &j in &orbit {
            orbit_of[j] = orbits.len();
        }
        orbits.push(orbit);
    }
    if orbits.len() != 3 {
        return Err(Error::CharacterCheckFailed(format!(
            "expected 3 rational irreducibles, found {}",
            orbits.len()
        )));
    }
    let mut out = Vec::new();
    for (w, orbit) in orbits.iter().enumerate() {
        let degree = table.irreps[orbit[0]].degree;
        let schur_index = 1; // certified by the explicit monomial model
        out.push(RationalIrrep {
            label: format!("W{w}"),
            components: orbit.clone(),
            degree,
            schur_index,
            field_degree: orbit.len() as u64,
            multiplicity: degree / schur_index,
        });
    }
    Ok(out)
}

/// Explicit monomial model of `psi` (orbit representative `k`) over
/// `Q(zeta_q)`: `a` acts diagonally, `b` by the cyclic shift.
pub struct MonomialModel {
    pub field: CycField,
    pub dim: usize,
    a_mat: Vec<Vec<Cyc>>,
    b_mat: Vec<Vec<Cyc>>,
    params: GroupParams,
}

impl MonomialModel {
    pub fn new(params: GroupParams, k: u64) -> MonomialModel {
        let GroupParams { p, q, r } = params;
        let field = CycField::new(q);
        let dim = p as usize;
        let mut a_mat = vec![vec![field.zero(); dim]; dim];
        let mut b_mat = vec![vec![field.zero(); dim]; dim];
        for i in 0..dim {
            a_mat[i][i] = field.zeta_pow((k * mod_pow(r, i as u64, q) % q) as i64);
            b_mat[i][(i + 1) % dim] = field.one();
        }
        MonomialModel { field, dim, a_mat, b_mat, params }
    }

    fn mat_mul(&self, x: &[Vec<Cyc>], y: &[Vec<Cyc>]) -> Vec<Vec<Cyc>> {
        let f = &self.field;
        let mut out = vec![vec![f.zero(); self.dim]; self.dim];
        for i in 0..self.dim {
            for kk in 0..self.dim {
                if x[i][kk].is_zero() {
                    continue;
                }
                for j in 0..self.dim {
                    if !y[kk][j].is_zero() {
                        let t = f.mul(&x[i][kk], &y[kk][j]);
                        out[i][j] = f.add(&out[i][j], &t);
                    }
                }
            }
        }
        out
    }

    fn mat_pow(&self, m: &[Vec<Cyc>], e: u64) -> Vec<Vec<Cyc>> {
        let mut acc = self.identity();
        for _ in 0..e {
            acc = self.mat_mul(&acc, m);
        }
        acc
    }

    fn identity(&self) -> Vec<Vec<Cyc>> {
        let f = &self.field;
        let mut out = vec![vec![f.zero(); self.dim]; self.dim];
        for (i, row) in out.iter_mut().enumerate() {
            row[i] = f.one();
        }
        out
    }

    /// `rho(a^l b^n) = A^l B^n`.
    pub fn rho(&self, l: u64, n: u64) -> Vec<Vec<Cyc>> {
        self.mat_mul(&self.mat_pow(&self.a_mat, l), &self.mat_pow(&self.b_mat, n))
    }

    /// Certifies `A^q = B^p = I` and `B A B^{-1} = A^r`; this realizes the
    /// representation over the q-th cyclotomic field.
    pub fn verify_relations(&self) -> bool {
        let GroupParams { p, q, r } = self.params;
        let id = self.identity();
        if self.mat_pow(&self.a_mat, q) != id || self.mat_pow(&self.b_mat, p) != id {
            return false;
        }
        let b_inv = self.mat_pow(&self.b_mat, p - 1);
        let lhs = self.mat_mul(&self.mat_mul(&self.b_mat, &self.a_mat), &b_inv);
        lhs == self.mat_pow(&self.a_mat, r)
    }

    pub fn trace(&self, m: &[Vec<Cyc>]) -> Cyc {
        let f = &self.field;
        let mut s = f.zero();
        for i in 0..self.dim {
            s = f.add(&s, &m[i][i]);
        }
        s
    }

    /// Rank of the averaging projector of a subgroup, by exact Gaussian
    /// elimination. For an idempotent this equals the fixed-space dimension.
    pub fn projector_rank(&self, g: &FiniteGroup, subgroup: &BTreeSet<usize>) -> usize {
        let f = &self.field;
        let mut sum = vec![vec![f.zero(); self.dim]; self.dim];
        for &h in subgroup {
            let (l, n) = g.metacyclic_ln(g.elem(h));
            let m = self.rho(l, n);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    sum[i][j] = f.add(&sum[i][j], &m[i][j]);
                }
            }
        }
        let scale = BigRational::new(BigInt::one(), BigInt::from(subgroup.len()));
        for row in sum.iter_mut() {
            for v in row.iter_mut() {
                *v = f.scale(v, &scale);
            }
        }
        matrix_rank(f, &mut sum)
    }
}

/// In-place Gaussian elimination rank over `Q(zeta_n)`.
pub fn matrix_rank(f: &CycField, m: &mut [Vec<Cyc>]) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = f.inv(&m[rank][col]);
        for j in col..cols {
            m[rank][j] = f.mul(&m[rank][j], &inv);
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for j in col..cols {
                    let t = f.mul(&factor, &m[rank][j]);
                    m[r][j] = f.sub(&m[r][j], &t);
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// The cyclic subgroup generated by one element, as an id set.
pub fn cyclic_subgroup(g: &FiniteGroup, id: usize) -> BTreeSet<usize> {
    let mut set = BTreeSet::new();
    let mut v = 0usize;
    loop {
        set.insert(v);
        v = g.mul_id(v, id);
        if v == 0 {
            break;
        }
    }
    set
}
