//! Concrete finite groups: the metacyclic group `G_{p,q}` and the order-2pq
//! and order-4pq overgroups that appear in the extension case analyses.
//!
//! Every group is materialized as a dense element list with full
//! multiplication, inverse and order tables. Elements are built by closing
//! the labeled generators under the coordinate multiplication law of the
//! kind (the regular-representation substrate), never by enumerating a
//! hand-guessed element set; for `G_{p,q}` itself a direct parameterized
//! constructor exists as a fast path and is cross-checked against the
//! closure construction in tests.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use crate::arith::{is_prime, mod_pow, mult_order, reduce};
use crate::error::{Error, Result};

/// Default bound for exhaustive automorphism/isomorphism searches.
pub const EXHAUSTIVE_BOUND: usize = 500;

static NEXT_GROUP_ID: AtomicU64 = AtomicU64::new(1);

/// Parameters of the metacyclic group: odd primes with `p | q - 1` and a
/// unit `r` of multiplicative order exactly `p` mod `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GroupParams {
    pub p: u64,
    pub q: u64,
    pub r: u64,
}

impl GroupParams {
    /// Validates `(p, q)` and picks the smallest `r > 1` of order `p` mod `q`.
    ///
    /// The choice of the smallest primitive `p`-th root keeps every normal
    /// form deterministic; any other valid root yields an isomorphic group.
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if p == 2 || q == 2 {
            return Err(Error::EvenPrime(2));
        }
        if (q - 1) % p != 0 {
            return Err(Error::DivisibilityFailure { p, qm1: q - 1 });
        }
        let r = (2..q)
            .find(|&r| mult_order(r, q) == p)
            .expect("a cyclic group of order q-1 has elements of order p | q-1");
        Ok(GroupParams { p, q, r })
    }

    /// Same validation but with an explicit primitive root `r`.
    pub fn with_r(p: u64, q: u64, r: u64) -> Result<Self> {
        let base = Self::new(p, q)?;
        if r <= 1 || r >= q || mult_order(r, q) != p {
            return Err(Error::BadPrimitiveRoot { r, p, q });
        }
        Ok(GroupParams { r, ..base })
    }

    /// All valid primitive `p`-th roots mod `q` (the powers of `r`).
    pub fn valid_roots(&self) -> Vec<u64> {
        (2..self.q).filter(|&r| mult_order(r, self.q) == self.p).collect()
    }
}

/// The overgroup shapes used by the extension case analyses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OvergroupKind {
    /// `G_{p,q} x C_2`, order 2pq.
    DirectProductC2,
    /// `<a, c : a^q = c^{2p} = 1, c a c^-1 = a^{-r}>`, order 2pq.
    CqRtimesC2p,
    /// `(C_q x| C_{2p}) x C_2` presented on `a, c, t` with `(ta)^2 = [t,c] = 1`,
    /// order 4pq.
    CqRtimesC2pTimesC2,
    /// `(C_q x| C_p) x| C_4` with `t a t^-1 = a^eps`, order 4pq.
    C4Ext(Eps4),
    /// `(C_q x| C_p) x| C_2^2` with `t a t = a^{e1}`, `u a u = a^{e2}`,
    /// each sign `+-1`, order 4pq.
    C2SquaredExt(i8, i8),
}

/// The three conjugation characters `eps` of the `C_4` extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Eps4 {
    One,
    MinusOne,
    /// A primitive fourth root of unity mod q; exists only when 4 | q - 1.
    FourthRoot,
}

impl OvergroupKind {
    pub fn all_order_2pq() -> [OvergroupKind; 2] {
        [OvergroupKind::DirectProductC2, OvergroupKind::CqRtimesC2p]
    }

    /// Every order-4pq kind constructible for the given `q`. The
    /// fourth-root `C_4` case only exists when `4 | q - 1`; its absence is
    /// reported by the caller.
    pub fn all_order_4pq(q: u64) -> Vec<OvergroupKind> {
        let mut kinds = vec![
            OvergroupKind::CqRtimesC2pTimesC2,
            OvergroupKind::C4Ext(Eps4::One),
            OvergroupKind::C4Ext(Eps4::MinusOne),
        ];
        if (q - 1) % 4 == 0 {
            kinds.push(OvergroupKind::C4Ext(Eps4::FourthRoot));
        }
        kinds.extend([
            OvergroupKind::C2SquaredExt(1, 1),
            OvergroupKind::C2SquaredExt(-1, -1),
            OvergroupKind::C2SquaredExt(1, -1),
            OvergroupKind::C2SquaredExt(-1, 1),
        ]);
        kinds
    }

    pub fn label(&self) -> String {
        match self {
            OvergroupKind::DirectProductC2 => "G x C2".into(),
            OvergroupKind::CqRtimesC2p => "Cq x| C2p".into(),
            OvergroupKind::CqRtimesC2pTimesC2 => "(Cq x| C2p) x C2".into(),
            OvergroupKind::C4Ext(e) => format!("(Cq x| Cp) x| C4 [eps = {}]", e.describe()),
            OvergroupKind::C2SquaredExt(e1, e2) => {
                format!("(Cq x| Cp) x| C2^2 [eps = ({e1}, {e2})]")
            }
        }
    }
}

impl Eps4 {
    fn describe(&self) -> &'static str {
        match self {
            Eps4::One => "1",
            Eps4::MinusOne => "-1",
            Eps4::FourthRoot => "i",
        }
    }

    /// The unit mod `q` this sign stands for.
    fn value(&self, q: u64) -> Result<u64> {
        match self {
            Eps4::One => Ok(1),
            Eps4::MinusOne => Ok(q - 1),
            Eps4::FourthRoot => (2..q)
                .find(|&e| mult_order(e, q) == 4)
                .ok_or(Error::FourthRootUnavailable { q }),
        }
    }
}

/// Internal structural tag of a constructed group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    /// Coordinates `(l, n)`: the word `a^l b^n`.
    Metacyclic,
    Overgroup(OvergroupKind),
}

/// Element coordinates; unused trailing slots stay zero so that
/// lexicographic order on the array is the canonical element order and the
/// identity always sorts first.
pub type Coords = [u32; 4];

/// An element handle carrying the id of the group it belongs to, so that
/// mixing elements of different groups is detected instead of silently
/// computing garbage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    gid: u64,
    pub(crate) id: u16,
}

impl Elem {
    pub fn index(&self) -> usize {
        self.id as usize
    }
}

/// A concrete finite group: sorted dense element list plus full tables.
#[derive(Debug)]
pub struct FiniteGroup {
    gid: u64,
    pub kind: GroupKind,
    pub params: GroupParams,
    tuples: Vec<Coords>,
    mul_table: Vec<u16>,
    inv_table: Vec<u16>,
    ord_table: Vec<u32>,
    generators: BTreeMap<String, u16>,
    /// BFS spanning data: element = derivation[i].0 * generator derivation[i].1,
    /// in `bfs_order` so homomorphisms extend by one table lookup per element.
    derivation: Vec<Option<(u16, u16)>>,
    bfs_order: Vec<u16>,
}

/// Builds `G_{p,q}` with the canonical smallest primitive root.
pub fn make_group(p: u64, q: u64) -> Result<FiniteGroup> {
    FiniteGroup::metacyclic(GroupParams::new(p, q)?)
}

/// Builds `G_{p,q}` with an explicitly chosen primitive root.
pub fn make_group_with_r(p: u64, q: u64, r: u64) -> Result<FiniteGroup> {
    FiniteGroup::metacyclic(GroupParams::with_r(p, q, r)?)
}

struct KindSpec {
    arity: usize,
    moduli: [u64; 4],
    /// multiplier applied to the `a`-part of the right factor, as a function
    /// of the non-`a` coordinates of the left factor.
    twist: Box<dyn Fn(&Coords) -> u64>,
    generators: Vec<(String, Coords)>,
    expected_order: usize,
}

fn kind_spec(kind: GroupKind, pr: GroupParams) -> Result<KindSpec> {
    let GroupParams { p, q, r } = pr;
    let two_p = 2 * p;
    let neg_r = q - r;
    let neg_one = q - 1;
    let spec = match kind {
        GroupKind::Metacyclic => KindSpec {
            arity: 2,
            moduli: [q, p, 1, 1],
            twist: Box::new(move |x| mod_pow(r, x[1] as u64, q)),
            generators: vec![("a".into(), [1, 0, 0, 0]), ("b".into(), [0, 1, 0, 0])],
            expected_order: (p * q) as usize,
        },
        GroupKind::Overgroup(OvergroupKind::DirectProductC2) => KindSpec {
            arity: 3,
            moduli: [q, p, 2, 1],
            twist: Box::new(move |x| mod_pow(r, x[1] as u64, q)),
            generators: vec![
                ("a".into(), [1, 0, 0, 0]),
                ("b".into(), [0, 1, 0, 0]),
                ("t".into(), [0, 0, 1, 0]),
            ],
            expected_order: (2 * p * q) as usize,
        },
        GroupKind::Overgroup(OvergroupKind::CqRtimesC2p) => KindSpec {
            arity: 2,
            moduli: [q, two_p, 1, 1],
            twist: Box::new(move |x| mod_pow(neg_r, x[1] as u64, q)),
            // b := c^{p+1} twists a by (-r)^{p+1} = r, so <a, b> is a copy of
            // G_{p,q} on the nose; t := c^p is the canonical involution class.
            generators: vec![
                ("a".into(), [1, 0, 0, 0]),
                ("c".into(), [0, 1, 0, 0]),
                ("b".into(), [0, (p + 1) as u32, 0, 0]),
                ("t".into(), [0, p as u32, 0, 0]),
            ],
            expected_order: (2 * p * q) as usize,
        },
        GroupKind::Overgroup(OvergroupKind::CqRtimesC2pTimesC2) => KindSpec {
            arity: 3,
            moduli: [q, two_p, 2, 1],
            twist: Box::new(move |x| {
                mod_pow(neg_r, x[1] as u64, q) * mod_pow(neg_one, x[2] as u64, q) % q
            }),
            generators: vec![
                ("a".into(), [1, 0, 0, 0]),
                ("c".into(), [0, 1, 0, 0]),
                ("t".into(), [0, 0, 1, 0]),
                ("b".into(), [0, (p + 1) as u32, 0, 0]),
            ],
            expected_order: (4 * p * q) as usize,
        },
        GroupKind::Overgroup(OvergroupKind::C4Ext(eps)) => {
            let e = eps.value(q)?;
            KindSpec {
                arity: 3,
                moduli: [q, p, 4, 1],
                twist: Box::new(move |x| {
                    mod_pow(r, x[1] as u64, q) * mod_pow(e, x[2] as u64, q) % q
                }),
                generators: vec![
                    ("a".into(), [1, 0, 0, 0]),
                    ("b".into(), [0, 1, 0, 0]),
                    ("t".into(), [0, 0, 1, 0]),
                ],
                expected_order: (4 * p * q) as usize,
            }
        }
        GroupKind::Overgroup(OvergroupKind::C2SquaredExt(s1, s2)) => {
            let e1 = if s1 == 1 { 1 } else { neg_one };
            let e2 = if s2 == 1 { 1 } else { neg_one };
            KindSpec {
                arity: 4,
                moduli: [q, p, 2, 2],
                twist: Box::new(move |x| {
                    mod_pow(r, x[1] as u64, q) * mod_pow(e1, x[2] as u64, q) % q
                        * mod_pow(e2, x[3] as u64, q)
                        % q
                }),
                generators: vec![
                    ("a".into(), [1, 0, 0, 0]),
                    ("b".into(), [0, 1, 0, 0]),
                    ("t".into(), [0, 0, 1, 0]),
                    ("u".into(), [0, 0, 0, 1]),
                ],
                expected_order: (4 * p * q) as usize,
            }
        }
    };
    Ok(spec)
}

impl FiniteGroup {
    /// Fast path for `G_{p,q}`: the element set is exactly
    /// `{(l, n) : l mod q, n mod p}` so no closure is needed. Tests
    /// cross-check this against the generic closure construction.
    pub fn metacyclic(params: GroupParams) -> Result<FiniteGroup> {
        let spec = kind_spec(GroupKind::Metacyclic, params)?;
        let mut tuples = Vec::with_capacity(spec.expected_order);
        for l in 0..params.q as u32 {
            for n in 0..params.p as u32 {
                tuples.push([l, n, 0, 0]);
            }
        }
        tuples.sort_unstable();
        Self::assemble(GroupKind::Metacyclic, params, spec, tuples)
    }

    /// Builds any group kind by closing the labeled generators under the
    /// coordinate law.
    pub fn by_closure(kind: GroupKind, params: GroupParams) -> Result<FiniteGroup> {
        let spec = kind_spec(kind, params)?;
        let mut seen: BTreeSet<Coords> = BTreeSet::new();
        seen.insert([0, 0, 0, 0]);
        let mut frontier: Vec<Coords> = vec![[0, 0, 0, 0]];
        for (_, g) in &spec.generators {
            if seen.insert(*g) {
                frontier.push(*g);
            }
        }
        while let Some(x) = frontier.pop() {
            let known: Vec<Coords> = seen.iter().copied().collect();
            for y in known {
                let products = {
                    let law = law_fn(&spec);
                    [law(&x, &y), law(&y, &x)]
                };
                for z in products {
                    if seen.insert(z) {
                        frontier.push(z);
                    }
                }
            }
        }
        if seen.len() != spec.expected_order {
            return Err(Error::RelationInconsistency {
                expected: spec.expected_order,
                actual: seen.len(),
            });
        }
        let tuples: Vec<Coords> = seen.into_iter().collect();
        Self::assemble(kind, params, spec, tuples)
    }

    fn assemble(
        kind: GroupKind,
        params: GroupParams,
        spec: KindSpec,
        tuples: Vec<Coords>,
    ) -> Result<FiniteGroup> {
        let n = tuples.len();
        assert!(n <= u16::MAX as usize);
        let law = law_fn(&spec);
        let index: HashMap<Coords, u16> =
            tuples.iter().enumerate().map(|(i, t)| (*t, i as u16)).collect();
        let mut mul_table = vec![0u16; n * n];
        for (i, x) in tuples.iter().enumerate() {
            for (j, y) in tuples.iter().enumerate() {
                mul_table[i * n + j] = index[&law(x, y)];
            }
        }
        let identity = index[&[0, 0, 0, 0]] as usize;
        debug_assert_eq!(identity, 0);
        let mut inv_table = vec![0u16; n];
        for i in 0..n {
            inv_table[i] = (0..n)
                .find(|&j| mul_table[i * n + j] as usize == identity)
                .expect("finite group has inverses") as u16;
        }
        let mut ord_table = vec![0u32; n];
        for i in 0..n {
            let mut k = 1u32;
            let mut v = i;
            while v != identity {
                v = mul_table[v * n + i] as usize;
                k += 1;
            }
            ord_table[i] = k;
        }
        let mut generators = BTreeMap::new();
        for (name, g) in &spec.generators {
            generators.insert(name.clone(), index[g]);
        }
        let mut group = FiniteGroup {
            gid: NEXT_GROUP_ID.fetch_add(1, Ordering::Relaxed),
            kind,
            params,
            tuples,
            mul_table,
            inv_table,
            ord_table,
            generators,
            derivation: Vec::new(),
            bfs_order: Vec::new(),
        };
        group.build_derivation();
        group.check_relations()?;
        Ok(group)
    }

    /// Spanning derivation of every element from the labeled generators,
    /// in BFS order. Also certifies that the labels generate the group.
    fn build_derivation(&mut self) {
        let n = self.order();
        let gens: Vec<u16> = self.generators.values().copied().collect();
        let mut derivation = vec![None; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        seen[0] = true;
        order.push(0u16);
        let mut head = 0;
        while head < order.len() {
            let x = order[head] as usize;
            head += 1;
            for &g in &gens {
                let y = self.mul_table[x * n + g as usize] as usize;
                if !seen[y] {
                    seen[y] = true;
                    derivation[y] = Some((x as u16, g));
                    order.push(y as u16);
                }
            }
        }
        assert_eq!(order.len(), n, "labeled generators must generate the group");
        self.derivation = derivation;
        self.bfs_order = order;
    }

    /// Every defining relation of the kind, evaluated in the finished tables.
    fn check_relations(&self) -> Result<()> {
        let GroupParams { p, q, r } = self.params;
        let e = self.identity();
        let a = self.generator("a")?;
        let rel_ok = |ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::RelationInconsistency {
                    expected: self.order(),
                    actual: self.order(),
                })
            }
        };
        rel_ok(self.pow(a, q as i64) == e)?;
        match self.kind {
            GroupKind::Metacyclic | GroupKind::Overgroup(OvergroupKind::DirectProductC2) => {
                let b = self.generator("b")?;
                rel_ok(self.pow(b, p as i64) == e)?;
                rel_ok(self.conjugate_unchecked(b, a) == self.pow(a, r as i64))?;
                if let GroupKind::Overgroup(_) = self.kind {
                    let t = self.generator("t")?;
                    rel_ok(self.pow(t, 2) == e)?;
                    rel_ok(self.mul_unchecked(t, a) == self.mul_unchecked(a, t))?;
                    rel_ok(self.mul_unchecked(t, b) == self.mul_unchecked(b, t))?;
                }
            }
            GroupKind::Overgroup(OvergroupKind::CqRtimesC2p)
            | GroupKind::Overgroup(OvergroupKind::CqRtimesC2pTimesC2) => {
                let c = self.generator("c")?;
                let b = self.generator("b")?;
                rel_ok(self.pow(c, 2 * p as i64) == e)?;
                rel_ok(self.conjugate_unchecked(c, a) == self.pow(a, (q - r) as i64))?;
                rel_ok(self.conjugate_unchecked(b, a) == self.pow(a, r as i64))?;
                if let GroupKind::Overgroup(OvergroupKind::CqRtimesC2pTimesC2) = self.kind {
                    let t = self.generator("t")?;
                    rel_ok(self.pow(t, 2) == e)?;
                    rel_ok(self.pow(self.mul_unchecked(t, a), 2) == e)?;
                    rel_ok(self.mul_unchecked(t, c) == self.mul_unchecked(c, t))?;
                } else {
                    // t := c^p is the involution used by the Schur-Zassenhaus
                    // case split; b := c^{p+1} commutes with it.
                    let t = self.generator("t")?;
                    rel_ok(self.pow(t, 2) == e)?;
                    rel_ok(self.pow(self.mul_unchecked(t, a), 2) == e)?;
                    rel_ok(self.mul_unchecked(t, b) == self.mul_unchecked(b, t))?;
                }
            }
            GroupKind::Overgroup(OvergroupKind::C4Ext(eps)) => {
                let b = self.generator("b")?;
                let t = self.generator("t")?;
                let ev = eps.value(q)? as i64;
                rel_ok(self.pow(b, p as i64) == e)?;
                rel_ok(self.pow(t, 4) == e)?;
                rel_ok(self.conjugate_unchecked(b, a) == self.pow(a, r as i64))?;
                rel_ok(self.conjugate_unchecked(t, a) == self.pow(a, ev))?;
                rel_ok(self.mul_unchecked(t, b) == self.mul_unchecked(b, t))?;
            }
            GroupKind::Overgroup(OvergroupKind::C2SquaredExt(s1, s2)) => {
                let b = self.generator("b")?;
                let t = self.generator("t")?;
                let u = self.generator("u")?;
                let e1 = if s1 == 1 { 1 } else { (q - 1) as i64 };
                let e2 = if s2 == 1 { 1 } else { (q - 1) as i64 };
                rel_ok(self.pow(b, p as i64) == e)?;
                rel_ok(self.pow(t, 2) == e)?;
                rel_ok(self.pow(u, 2) == e)?;
                rel_ok(self.pow(self.mul_unchecked(t, u), 2) == e)?;
                rel_ok(self.conjugate_unchecked(b, a) == self.pow(a, r as i64))?;
                rel_ok(self.conjugate_unchecked(t, a) == self.pow(a, e1))?;
                rel_ok(self.conjugate_unchecked(u, a) == self.pow(a, e2))?;
                rel_ok(self.mul_unchecked(t, b) == self.mul_unchecked(b, t))?;
                rel_ok(self.mul_unchecked(u, b) == self.mul_unchecked(b, u))?;
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.tuples.len()
    }

    pub fn identity(&self) -> Elem {
        Elem { gid: self.gid, id: 0 }
    }

    pub fn elem(&self, id: usize) -> Elem {
        assert!(id < self.order());
        Elem { gid: self.gid, id: id as u16 }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order()).map(|i| self.elem(i))
    }

    pub fn generator(&self, name: &str) -> Result<Elem> {
        self.generators
            .get(name)
            .map(|&id| Elem { gid: self.gid, id })
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn generator_names(&self) -> Vec<String> {
        self.generators.keys().cloned().collect()
    }

    fn own(&self, x: Elem) -> Result<usize> {
        if x.gid != self.gid {
            return Err(Error::MixedGroups);
        }
        Ok(x.id as usize)
    }

    // -- raw index arithmetic (hot paths) ------------------------------------

    #[inline]
    pub(crate) fn mul_id(&self, x: usize, y: usize) -> usize {
        self.mul_table[x * self.order() + y] as usize
    }

    #[inline]
    pub(crate) fn inv_id(&self, x: usize) -> usize {
        self.inv_table[x] as usize
    }

    #[inline]
    pub(crate) fn ord_id(&self, x: usize) -> u64 {
        self.ord_table[x] as u64
    }

    pub(crate) fn mul_unchecked(&self, x: Elem, y: Elem) -> Elem {
        self.elem(self.mul_id(x.id as usize, y.id as usize))
    }

    fn conjugate_unchecked(&self, g: Elem, x: Elem) -> Elem {
        let gi = self.inv_id(g.id as usize);
        self.elem(self.mul_id(self.mul_id(g.id as usize, x.id as usize), gi))
    }

    // -- checked element operations ------------------------------------------

    pub fn multiply(&self, x: Elem, y: Elem) -> Result<Elem> {
        let (xi, yi) = (self.own(x)?, self.own(y)?);
        Ok(self.elem(self.mul_id(xi, yi)))
    }

    pub fn inverse(&self, x: Elem) -> Result<Elem> {
        Ok(self.elem(self.inv_id(self.own(x)?)))
    }

    pub fn elem_order(&self, x: Elem) -> Result<u64> {
        Ok(self.ord_id(self.own(x)?))
    }

    /// `g x g^-1`.
    pub fn conjugate(&self, g: Elem, x: Elem) -> Result<Elem> {
        self.own(g)?;
        self.own(x)?;
        Ok(self.conjugate_unchecked(g, x))
    }

    /// Integer power, negative exponents through the inverse.
    pub fn pow(&self, x: Elem, k: i64) -> Elem {
        let (mut base, mut k) = if k < 0 {
            (self.inv_id(x.id as usize), (-k) as u64)
        } else {
            (x.id as usize, k as u64)
        };
        let mut acc = 0usize;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_id(acc, base);
            }
            base = self.mul_id(base, base);
            k >>= 1;
        }
        self.elem(acc)
    }

    /// Closure of a set of elements under multiplication; returns the sorted
    /// element-index set. The empty set closes to the trivial subgroup.
    pub fn subgroup_generated(&self, elems: &[Elem]) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        seen.insert(0usize);
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for e in elems {
                let y = self.mul_id(x, e.id as usize);
                if seen.insert(y) {
                    frontier.push(y);
                }
            }
        }
        seen
    }

    pub fn elements_of_order(&self, k: u64) -> Vec<Elem> {
        (0..self.order()).filter(|&i| self.ord_id(i) == k).map(|i| self.elem(i)).collect()
    }

    /// Exhaustive associativity check for orders within `limit`; above the
    /// limit a deterministic stride sample is used.
    pub fn verify_associativity(&self, limit: usize) -> bool {
        let n = self.order();
        let check = |x: usize, y: usize, z: usize| {
            self.mul_id(self.mul_id(x, y), z) == self.mul_id(x, self.mul_id(y, z))
        };
        if n <= limit {
            (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| check(x, y, z))))
        } else {
            let stride = n / 37 + 1;
            (0..n).step_by(stride).all(|x| {
                (0..n).step_by(2).all(|y| (0..n).step_by(3).all(|z| check(x, y, z)))
            })
        }
    }

    // -- metacyclic coordinates ----------------------------------------------

    /// `(l, n)` coordinates of an element of `G_{p,q}` (the word `a^l b^n`).
    pub fn metacyclic_ln(&self, x: Elem) -> (u64, u64) {
        assert!(matches!(self.kind, GroupKind::Metacyclic));
        let t = self.tuples[x.id as usize];
        (t[0] as u64, t[1] as u64)
    }

    /// The element `a^l b^n` of `G_{p,q}`.
    pub fn metacyclic_elem(&self, l: i64, n: i64) -> Elem {
        assert!(matches!(self.kind, GroupKind::Metacyclic));
        let coords = [reduce(l, self.params.q) as u32, reduce(n, self.params.p) as u32, 0, 0];
        let id = self
            .tuples
            .binary_search(&coords)
            .expect("metacyclic coordinates are always present");
        self.elem(id)
    }

    /// Human-readable word for an element in the kind's coordinate names.
    pub fn describe(&self, x: Elem) -> String {
        let spec_names = match self.kind {
            GroupKind::Metacyclic => ["a", "b", "", ""],
            GroupKind::Overgroup(OvergroupKind::DirectProductC2) => ["a", "b", "t", ""],
            GroupKind::Overgroup(OvergroupKind::CqRtimesC2p) => ["a", "c", "", ""],
            GroupKind::Overgroup(OvergroupKind::CqRtimesC2pTimesC2) => ["a", "c", "t", ""],
            GroupKind::Overgroup(OvergroupKind::C4Ext(_)) => ["a", "b", "t", ""],
            GroupKind::Overgroup(OvergroupKind::C2SquaredExt(_, _)) => ["a", "b", "t", "u"],
        };
        let t = self.tuples[x.id as usize];
        let mut out = String::new();
        for (i, name) in spec_names.iter().enumerate() {
            if name.is_empty() || t[i] == 0 {
                continue;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            if t[i] == 1 {
                out.push_str(name);
            } else {
                out.push_str(&format!("{}^{}", name, t[i]));
            }
        }
        if out.is_empty() {
            out.push('1');
        }
        out
    }

    /// Cayley table as CSV, row/column = element indices.
    pub fn cayley_csv(&self) -> String {
        let n = self.order();
        let mut out = String::new();
        for i in 0..n {
            let row: Vec<String> =
                (0..n).map(|j| self.mul_id(i, j).to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    // -- automorphisms and isomorphisms ---------------------------------------

    /// The complete automorphism group by exhaustive generator-image search.
    ///
    /// Candidate images preserve generator orders; each candidate extends
    /// along the BFS derivation and is kept only if fully multiplicative and
    /// bijective.
    pub fn automorphisms(&self) -> Result<Vec<Automorphism>> {
        if self.order() > EXHAUSTIVE_BOUND {
            return Err(Error::GroupTooLarge { order: self.order(), bound: EXHAUSTIVE_BOUND });
        }
        Ok(self.image_search(self))
    }

    /// Searches for an isomorphism onto `other`; returns the image table of
    /// one if it exists.
    pub fn find_isomorphism(&self, other: &FiniteGroup) -> Option<Automorphism> {
        if self.order() != other.order() {
            return None;
        }
        self.image_search(other).into_iter().next()
    }

    fn image_search(&self, target: &FiniteGroup) -> Vec<Automorphism> {
        let n = self.order();
        let gens: Vec<u16> = self.generators.values().copied().collect();
        let pools: Vec<Vec<u16>> = gens
            .iter()
            .map(|&g| {
                let o = self.ord_id(g as usize);
                (0..n).filter(|&i| target.ord_id(i) == o).map(|i| i as u16).collect()
            })
            .collect();
        let mut found = Vec::new();
        let mut choice = vec![0u16; gens.len()];
        self.search_rec(target, &gens, &pools, 0, &mut choice, &mut found);
        found
    }

    fn search_rec(
        &self,
        target: &FiniteGroup,
        gens: &[u16],
        pools: &[Vec<u16>],
        depth: usize,
        choice: &mut Vec<u16>,
        found: &mut Vec<Automorphism>,
    ) {
        if depth == gens.len() {
            if let Some(auto) = self.extend_images(target, gens, choice) {
                found.push(auto);
            }
            return;
        }
        for &cand in &pools[depth] {
            choice[depth] = cand;
            self.search_rec(target, gens, pools, depth + 1, choice, found);
        }
    }

    fn extend_images(
        &self,
        target: &FiniteGroup,
        gens: &[u16],
        choice: &[u16],
    ) -> Option<Automorphism> {
        let n = self.order();
        let gen_image: HashMap<u16, u16> =
            gens.iter().copied().zip(choice.iter().copied()).collect();
        let mut images = vec![0u16; n];
        for &x in &self.bfs_order {
            if let Some((parent, gen)) = self.derivation[x as usize] {
                images[x as usize] = target
                    .mul_id(images[parent as usize] as usize, gen_image[&gen] as usize)
                    as u16;
            }
        }
        // bijectivity
        let mut hit = vec![false; n];
        for &im in &images {
            if hit[im as usize] {
                return None;
            }
            hit[im as usize] = true;
        }
        // full multiplicativity
        for x in 0..n {
            for y in 0..n {
                if target.mul_id(images[x] as usize, images[y] as usize)
                    != images[self.mul_id(x, y)] as usize
                {
                    return None;
                }
            }
        }
        Some(Automorphism { images })
    }

    /// The two standard generators of `Aut(G_{p,q})`: `a -> a^g` for a
    /// primitive root `g` mod `q`, and `a -> a, b -> a b`. Together they
    /// generate the full automorphism group of order `q(q-1)`.
    pub fn metacyclic_aut_generators(&self) -> Vec<Automorphism> {
        let q = self.params.q;
        let g = (2..q).find(|&g| mult_order(g, q) == q - 1).expect("prime q has primitive roots");
        vec![self.metacyclic_aut(g, 0), self.metacyclic_aut(1, 1)]
    }

    /// The automorphism `a -> a^i, b -> a^j b` of `G_{p,q}`.
    pub fn metacyclic_aut(&self, i: u64, j: u64) -> Automorphism {
        assert!(matches!(self.kind, GroupKind::Metacyclic));
        let GroupParams { q, r, .. } = self.params;
        let mut images = vec![0u16; self.order()];
        for id in 0..self.order() {
            let [l, n, _, _] = self.tuples[id];
            // a^l b^n -> a^{il} (a^j b)^n and (a^j b)^n = a^{j(1 + r + .. + r^{n-1})} b^n
            let mut s = 0u64;
            for k in 0..n as u64 {
                s = (s + mod_pow(r, k, q)) % q;
            }
            let l2 = (i * l as u64 + j * s) % q;
            images[id] = self.metacyclic_elem(l2 as i64, n as i64).id;
        }
        Automorphism { images }
    }
}

fn law_fn(spec: &KindSpec) -> impl Fn(&Coords, &Coords) -> Coords + '_ {
    let moduli = spec.moduli;
    move |x: &Coords, y: &Coords| {
        let twist = (spec.twist)(x);
        let mut z = [0u32; 4];
        z[0] = ((x[0] as u64 + twist * y[0] as u64) % moduli[0]) as u32;
        for i in 1..4 {
            if moduli[i] > 1 {
                z[i] = ((x[i] as u64 + y[i] as u64) % moduli[i]) as u32;
            }
        }
        z
    }
}

/// Builds the overgroup of the requested kind for `(p, q)` by closure.
pub fn build_overgroup(kind: OvergroupKind, p: u64, q: u64) -> Result<FiniteGroup> {
    let params = GroupParams::new(p, q)?;
    FiniteGroup::by_closure(GroupKind::Overgroup(kind), params)
}

/// A verified automorphism (or isomorphism image table) of a finite group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    images: Vec<u16>,
}

impl Automorphism {
    pub fn apply(&self, x: Elem) -> Elem {
        Elem { gid: x.gid, id: self.images[x.id as usize] }
    }

    /// Image table into a possibly different group.
    pub fn apply_into(&self, target: &FiniteGroup, x: Elem) -> Elem {
        target.elem(self.images[x.id as usize] as usize)
    }

    pub(crate) fn image_id(&self, id: usize) -> usize {
        self.images[id] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &im)| i == im as usize)
    }

    /// For automorphisms of `G_{p,q}`: the parameters `(i, j)` such that the
    /// map is `a -> a^i, b -> a^j b`, if it has that shape (it always does).
    pub fn metacyclic_params(&self, g: &FiniteGroup) -> Option<(u64, u64)> {
        if !matches!(g.kind, GroupKind::Metacyclic) {
            return None;
        }
        let a = g.generator("a").ok()?;
        let b = g.generator("b").ok()?;
        let (i, na) = g.metacyclic_ln(self.apply(a));
        let (j, nb) = g.metacyclic_ln(self.apply(b));
        (na == 0 && nb == 1).then_some((i, j))
    }
}

/// Embedding of the standard `G_{p,q}` into an overgroup along the labeled
/// images of `a` and `b`.
pub struct MetacyclicEmbedding {
    /// image id in the overgroup, indexed by standard element id
    pub into_over: Vec<u16>,
    /// reverse lookup: overgroup id -> standard id
    pub from_over: HashMap<u16, u16>,
}

impl MetacyclicEmbedding {
    /// The labeled `a`, `b` of every overgroup kind satisfy
    /// `b a b^-1 = a^r`, so `a^l b^n -> A^l B^n` is an injective
    /// homomorphism; this is checked here.
    pub fn new(std: &FiniteGroup, over: &FiniteGroup) -> Result<MetacyclicEmbedding> {
        let a = over.generator("a")?;
        let b = over.generator("b")?;
        let mut into_over = vec![0u16; std.order()];
        let mut from_over = HashMap::new();
        for id in 0..std.order() {
            let (l, n) = std.metacyclic_ln(std.elem(id));
            let img = over.mul_unchecked(over.pow(a, l as i64), over.pow(b, n as i64));
            into_over[id] = img.id;
            if from_over.insert(img.id, id as u16).is_some() {
                return Err(Error::RestrictionMismatch(
                    "embedding of G_{p,q} into the overgroup is not injective".into(),
                ));
            }
        }
        // homomorphism check
        for x in 0..std.order() {
            for y in 0..std.order() {
                let lhs = over.mul_id(into_over[x] as usize, into_over[y] as usize);
                if lhs != into_over[std.mul_id(x, y)] as usize {
                    return Err(Error::RestrictionMismatch(
                        "embedding of G_{p,q} into the overgroup is not multiplicative".into(),
                    ));
                }
            }
        }
        Ok(MetacyclicEmbedding { into_over, from_over })
    }

    pub fn contains(&self, over_elem: Elem) -> bool {
        self.from_over.contains_key(&over_elem.id)
    }

    pub fn pull_back(&self, std: &FiniteGroup, over_elem: Elem) -> Option<Elem> {
        self.from_over.get(&over_elem.id).map(|&id| std.elem(id as usize))
    }
}
