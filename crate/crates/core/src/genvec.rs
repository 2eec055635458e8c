//! Generating vectors: tuples `(x_1..x_n, y_1..y_m)` in `G_{p,q}` with
//! `ord(x_i) = p`, `ord(y_j) = q`, product one and generating the whole
//! group. These are exactly the surface-kernel epimorphisms from a
//! genus-zero Fuchsian group of signature `s_{n,m}` onto `G_{p,q}`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup, GroupKind};
use crate::signature::{FamilyParams, Signature};

/// Default cap on the number of candidate prefixes in an enumeration.
pub const DEFAULT_SEARCH_BOUND: u128 = 100_000_000;

/// Structured validation failures, reported with the offending 0-based
/// position in the concatenated tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    WrongLength { expected: usize, actual: usize },
    WrongOrder(usize),
    ProductNotIdentity,
    NotSurjective,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::WrongLength { expected, actual } => {
                write!(f, "tuple length {actual}, family needs {expected}")
            }
            Violation::WrongOrder(i) => write!(f, "entry {i} has the wrong order"),
            Violation::ProductNotIdentity => write!(f, "ordered product is not the identity"),
            Violation::NotSurjective => write!(f, "entries do not generate the group"),
        }
    }
}

/// Existence of an action with signature `s_{n,m}`, with the reason for the
/// two failure shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Existence {
    Exists,
    /// `n = 1`: the lone period-`p` generator cannot cancel out of the
    /// product relation.
    ProductObstruction,
    /// `n = 0`: every homomorphism lands inside `<a>`, so `b` is missed.
    SurjectivityObstruction,
}

impl Existence {
    pub fn holds(&self) -> bool {
        matches!(self, Existence::Exists)
    }

    pub fn reason(&self) -> &'static str {
        match self {
            Existence::Exists => "action exists (n >= 2)",
            Existence::ProductObstruction => "product cannot be identity",
            Existence::SurjectivityObstruction => "b not in image",
        }
    }
}

/// Existence is decided by `n` alone: an action exists iff `n >= 2`.
pub fn exists(fp: &FamilyParams) -> Existence {
    match fp.n {
        0 => Existence::SurjectivityObstruction,
        1 => Existence::ProductObstruction,
        _ => Existence::Exists,
    }
}

/// An ordered tuple realizing a surface-kernel epimorphism for `s_{n,m}`.
#[derive(Clone, Debug)]
pub struct GeneratingVector {
    pub group: Arc<FiniteGroup>,
    pub fp: FamilyParams,
    ids: Vec<u16>,
}

impl PartialEq for GeneratingVector {
    fn eq(&self, other: &Self) -> bool {
        self.fp == other.fp && self.ids == other.ids
    }
}
impl Eq for GeneratingVector {}

impl GeneratingVector {
    pub fn from_elems(
        group: Arc<FiniteGroup>,
        fp: FamilyParams,
        xs: &[Elem],
        ys: &[Elem],
    ) -> GeneratingVector {
        let ids = xs.iter().chain(ys).map(|e| e.id).collect();
        GeneratingVector { group, fp, ids }
    }

    pub(crate) fn from_ids(
        group: Arc<FiniteGroup>,
        fp: FamilyParams,
        ids: Vec<u16>,
    ) -> GeneratingVector {
        GeneratingVector { group, fp, ids }
    }

    pub fn ids(&self) -> &[u16] {
        &self.ids
    }

    pub fn entries(&self) -> Vec<Elem> {
        self.ids.iter().map(|&id| self.group.elem(id as usize)).collect()
    }

    pub fn x_part(&self) -> Vec<Elem> {
        self.ids[..self.fp.n].iter().map(|&id| self.group.elem(id as usize)).collect()
    }

    pub fn y_part(&self) -> Vec<Elem> {
        self.ids[self.fp.n..].iter().map(|&id| self.group.elem(id as usize)).collect()
    }

    /// Checks the three defining invariants in order and reports the first
    /// failure: entry orders, ordered product one, generation.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        validate_ids(&self.group, &self.fp, &self.ids)
    }

    /// Branch periods as realized by the actual entry orders.
    pub fn realized_signature(&self) -> Signature {
        let periods =
            self.ids.iter().map(|&id| self.group.ord_id(id as usize)).collect();
        Signature::genus0(periods)
    }

    /// `{"p":.., "q":.., "x":[[l,n],..], "y":[[l,n],..]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let pair = |id: &u16| {
            let (l, n) = self.group.metacyclic_ln(self.group.elem(*id as usize));
            json!([l, n])
        };
        json!({
            "p": self.fp.p(),
            "q": self.fp.q(),
            "x": self.ids[..self.fp.n].iter().map(pair).collect::<Vec<_>>(),
            "y": self.ids[self.fp.n..].iter().map(pair).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn validate_ids(
    g: &FiniteGroup,
    fp: &FamilyParams,
    ids: &[u16],
) -> std::result::Result<(), Violation> {
    if ids.len() != fp.n + fp.m {
        return Err(Violation::WrongLength { expected: fp.n + fp.m, actual: ids.len() });
    }
    for (i, &id) in ids.iter().enumerate() {
        let want = if i < fp.n { fp.p() } else { fp.q() };
        if g.ord_id(id as usize) != want {
            return Err(Violation::WrongOrder(i));
        }
    }
    let mut acc = 0usize;
    for &id in ids {
        acc = g.mul_id(acc, id as usize);
    }
    if acc != 0 {
        return Err(Violation::ProductNotIdentity);
    }
    let elems: Vec<Elem> = ids.iter().map(|&id| g.elem(id as usize)).collect();
    if g.subgroup_generated(&elems).len() != g.order() {
        return Err(Violation::NotSurjective);
    }
    Ok(())
}

/// The explicit construction used in the existence proof, one recipe per
/// parity case of `(n, m)`. The output always passes `validate`.
pub fn canonical(group: &Arc<FiniteGroup>, fp: &FamilyParams) -> Result<GeneratingVector> {
    if fp.n < 2 {
        return Err(Error::NoAction { n: fp.n });
    }
    assert!(matches!(group.kind, GroupKind::Metacyclic));
    let e = |l: i64, n: i64| group.metacyclic_elem(l, n);
    let a = e(1, 0);
    let a_inv = e(-1, 0);
    let b = e(0, 1);
    let b_inv = e(0, -1);
    let ab = group.mul_unchecked(a, b);
    let ab_inv = group.pow(ab, -1);
    let (n, m) = (fp.n, fp.m);

    let mut xs: Vec<Elem> = Vec::with_capacity(n);
    let mut ys: Vec<Elem> = Vec::with_capacity(m);
    let push_pairs = |v: &mut Vec<Elem>, x: Elem, xi: Elem, t: usize| {
        for _ in 0..t {
            v.push(x);
            v.push(xi);
        }
    };
    match (n % 2 == 0, m) {
        (_, 0) if n == 3 => {
            // (ab, b, (ab^2)^{-1})
            xs.push(ab);
            xs.push(b);
            xs.push(group.pow(group.mul_unchecked(a, e(0, 2)), -1));
        }
        (true, 0) => {
            push_pairs(&mut xs, b, b_inv, n / 2 - 1);
            xs.push(ab);
            xs.push(ab_inv);
        }
        (false, 0) => {
            push_pairs(&mut xs, b, b_inv, (n - 5) / 2);
            xs.extend([ab, ab_inv, e(0, 2), b_inv, b_inv]);
        }
        (true, 1) => {
            push_pairs(&mut xs, b, b_inv, n / 2 - 1);
            xs.extend([b, ab_inv]);
            ys.push(a);
        }
        (false, 1) => {
            push_pairs(&mut xs, b, b_inv, (n - 3) / 2);
            xs.extend([e(0, 2), b_inv, ab_inv]);
            ys.push(a);
        }
        (x_even, _) => {
            let m_even = m % 2 == 0;
            push_pairs(&mut xs, b, b_inv, if x_even { n / 2 } else { (n - 3) / 2 });
            if !x_even {
                xs.extend([e(0, 2), b_inv, b_inv]);
            }
            push_pairs(&mut ys, a, a_inv, if m_even { m / 2 } else { (m - 3) / 2 });
            if !m_even {
                ys.extend([e(2, 0), a_inv, a_inv]);
            }
        }
    }
    let v = GeneratingVector::from_elems(Arc::clone(group), *fp, &xs, &ys);
    v.validate().unwrap_or_else(|viol| panic!("canonical recipe broken for {fp:?}: {viol}"));
    Ok(v)
}

/// Exhaustive enumeration of all generating vectors for `s_{n,m}`, as raw
/// id tuples in the canonical x-then-y layout.
///
/// The last entry is solved from the product-one relation rather than
/// searched, which cuts the space by one full factor. The result is sorted
/// and duplicate-free, independently of the parallel schedule.
pub fn enumerate_ids(
    g: &FiniteGroup,
    fp: &FamilyParams,
    bound: u128,
) -> Result<Vec<Vec<u16>>> {
    if fp.n < 2 {
        return Ok(Vec::new());
    }
    let p_elems: Vec<u16> = g.elements_of_order(fp.p()).iter().map(|e| e.id).collect();
    let q_elems: Vec<u16> = g.elements_of_order(fp.q()).iter().map(|e| e.id).collect();
    let (free_x, free_y, last_order) = if fp.m > 0 {
        (fp.n, fp.m - 1, fp.q())
    } else {
        (fp.n - 1, 0, fp.p())
    };
    let size = (p_elems.len() as u128).pow(free_x as u32)
        * (q_elems.len() as u128).pow(free_y as u32);
    if size > bound {
        return Err(Error::SearchSpaceTooLarge { size, bound });
    }

    // pools for the free slots, in tuple order
    let mut pools: Vec<&[u16]> = Vec::new();
    pools.extend(std::iter::repeat(&p_elems[..]).take(free_x));
    pools.extend(std::iter::repeat(&q_elems[..]).take(free_y));

    let mut found: Vec<Vec<u16>> = pools[0]
        .par_iter()
        .map(|&first| {
            let mut out = Vec::new();
            let rest = &pools[1..];
            let mut idx = vec![0usize; rest.len()];
            loop {
                let mut tuple = Vec::with_capacity(fp.n + fp.m);
                tuple.push(first);
                for (slot, &i) in idx.iter().enumerate() {
                    tuple.push(rest[slot][i]);
                }
                let mut acc = 0usize;
                for &id in &tuple {
                    acc = g.mul_id(acc, id as usize);
                }
                let last = g.inv_id(acc);
                if g.ord_id(last) == last_order {
                    tuple.push(last as u16);
                    if generates_metacyclic(g, &tuple, fp.m > 0) {
                        out.push(tuple);
                    }
                }
                // odometer
                let mut slot = rest.len();
                loop {
                    if slot == 0 {
                        return out;
                    }
                    slot -= 1;
                    idx[slot] += 1;
                    if idx[slot] < rest[slot].len() {
                        break;
                    }
                    idx[slot] = 0;
                }
            }
        })
        .flatten()
        .collect();
    found.sort_unstable();
    found.dedup();
    Ok(found)
}

/// Generation test specialized to `G_{p,q}`: with an order-`q` entry present
/// the subgroup contains `<a>` and an order-`p` element, hence everything;
/// for all-order-`p` tuples it suffices that not every entry is a power of
/// the first. The naive closure-based oracle in the tests cross-checks this.
fn generates_metacyclic(g: &FiniteGroup, ids: &[u16], has_q_entry: bool) -> bool {
    if has_q_entry {
        return true;
    }
    let first = ids[0] as usize;
    let mut powers = vec![false; g.order()];
    let mut v = first;
    powers[0] = true;
    while v != 0 {
        powers[v] = true;
        v = g.mul_id(v, first);
    }
    ids.iter().any(|&id| !powers[id as usize])
}

/// `enumerate_ids` wrapped into owned vectors.
pub fn enumerate(group: &Arc<FiniteGroup>, fp: &FamilyParams) -> Result<Vec<GeneratingVector>> {
    enumerate_with_bound(group, fp, DEFAULT_SEARCH_BOUND)
}

pub fn enumerate_with_bound(
    group: &Arc<FiniteGroup>,
    fp: &FamilyParams,
    bound: u128,
) -> Result<Vec<GeneratingVector>> {
    Ok(enumerate_ids(group, fp, bound)?
        .into_iter()
        .map(|ids| GeneratingVector::from_ids(Arc::clone(group), *fp, ids))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_group, GroupParams};
    use crate::signature::FamilyParams;

    fn setup(p: u64, q: u64) -> Arc<FiniteGroup> {
        Arc::new(make_group(p, q).unwrap())
    }

    fn fp(g: &Arc<FiniteGroup>, n: usize, m: usize) -> FamilyParams {
        FamilyParams::new(g.params, n, m)
    }

    /// Independent oracle: enumerate complete tuples (no solved last entry)
    /// and test generation by naive closure.
    fn oracle_count(g: &FiniteGroup, n: usize, m: usize) -> usize {
        let p_elems = g.elements_of_order(g.params.p);
        let q_elems = g.elements_of_order(g.params.q);
        let mut pools: Vec<&[Elem]> = Vec::new();
        pools.extend(std::iter::repeat(&p_elems[..]).take(n));
        pools.extend(std::iter::repeat(&q_elems[..]).take(m));
        let total = n + m;
        let mut idx = vec![0usize; total];
        let mut count = 0usize;
        'outer: loop {
            let tuple: Vec<Elem> = (0..total).map(|s| pools[s][idx[s]]).collect();
            let mut acc = g.identity();
            for e in &tuple {
                acc = g.multiply(acc, *e).unwrap();
            }
            if acc == g.identity() && g.subgroup_generated(&tuple).len() == g.order() {
                count += 1;
            }
            let mut slot = total;
            loop {
                if slot == 0 {
                    break 'outer;
                }
                slot -= 1;
                idx[slot] += 1;
                if idx[slot] < pools[slot].len() {
                    break;
                }
                idx[slot] = 0;
            }
        }
        count
    }

    #[test]
    fn existence_reasons() {
        let g = setup(3, 7);
        assert!(exists(&fp(&g, 2, 1)).holds());
        let e = exists(&fp(&g, 1, 2));
        assert_eq!(e, Existence::ProductObstruction);
        assert_eq!(e.reason(), "product cannot be identity");
        let e = exists(&fp(&g, 0, 3));
        assert_eq!(e, Existence::SurjectivityObstruction);
        assert_eq!(e.reason(), "b not in image");
    }

    #[test]
    fn validate_reports_violations() {
        let g = setup(3, 7);
        let a = g.generator("a").unwrap();
        let b = g.generator("b").unwrap();
        let b_inv = g.pow(b, -1);

        // the n=3 recipe from the existence proof
        let ab = g.multiply(a, b).unwrap();
        let ab2_inv = g.pow(g.multiply(a, g.pow(b, 2)).unwrap(), -1);
        let good =
            GeneratingVector::from_elems(Arc::clone(&g), fp(&g, 3, 0), &[ab, b, ab2_inv], &[]);
        assert_eq!(good.validate(), Ok(()));

        let bad = GeneratingVector::from_elems(
            Arc::clone(&g),
            fp(&g, 2, 2),
            &[b, b_inv],
            &[a, a],
        );
        assert_eq!(bad.validate(), Err(Violation::ProductNotIdentity));

        let bad = GeneratingVector::from_elems(Arc::clone(&g), fp(&g, 2, 1), &[b, b_inv], &[a]);
        assert_eq!(bad.validate(), Err(Violation::ProductNotIdentity));

        // wrong order in the x block
        let bad = GeneratingVector::from_elems(Arc::clone(&g), fp(&g, 2, 1), &[b, a], &[a]);
        assert_eq!(bad.validate(), Err(Violation::WrongOrder(1)));

        // right orders, product one, but stuck inside <b>
        let bad = GeneratingVector::from_elems(
            Arc::clone(&g),
            fp(&g, 3, 0),
            &[b, b, b],
            &[],
        );
        assert_eq!(bad.validate(), Err(Violation::NotSurjective));
    }

    #[test]
    fn canonical_recipes_all_parities() {
        let g = setup(3, 7);
        // every parity case that fits in n + m <= 7
        for (n, m) in [
            (3, 0), (4, 0), (5, 0), (6, 0), (7, 0),
            (2, 1), (3, 1), (4, 1), (5, 1),
            (2, 2), (3, 3), (2, 3), (3, 2), (4, 2), (2, 4), (4, 3), (3, 4),
        ] {
            let v = canonical(&g, &fp(&g, n, m)).unwrap();
            assert_eq!(v.validate(), Ok(()), "recipe failed at ({n},{m})");
        }
        assert!(matches!(canonical(&g, &fp(&g, 1, 2)), Err(Error::NoAction { n: 1 })));
    }

    #[test]
    fn canonical_matches_quoted_recipes() {
        let g = setup(3, 7);
        let ln = |e: Elem| g.metacyclic_ln(e);
        // (3,0): (ab, b, (ab^2)^{-1})
        let v = canonical(&g, &fp(&g, 3, 0)).unwrap();
        let e = v.entries();
        assert_eq!(ln(e[0]), (1, 1));
        assert_eq!(ln(e[1]), (0, 1));
        // (2,1): (b, (ab)^{-1}, a)
        let v = canonical(&g, &fp(&g, 2, 1)).unwrap();
        let e = v.entries();
        assert_eq!(ln(e[0]), (0, 1));
        assert_eq!(e[1], g.pow(g.mul_unchecked(g.elem(0), g.metacyclic_elem(1, 1)), -1));
        assert_eq!(ln(e[2]), (1, 0));
        // (2,2): (b, b^{-1}, a, a^{-1})
        let v = canonical(&g, &fp(&g, 2, 2)).unwrap();
        let e = v.entries();
        assert_eq!(ln(e[0]), (0, 1));
        assert_eq!(ln(e[1]), (0, 2));
        assert_eq!(ln(e[2]), (1, 0));
        assert_eq!(ln(e[3]), (6, 0));
    }

    #[test]
    fn enumerate_counts_at_3_7() {
        let g = setup(3, 7);
        // frozen from the independent full-tuple oracle (spot-checked below)
        let expected = [
            ((2usize, 1usize), 84usize),
            ((3, 0), 84),
            ((2, 2), 504),
            ((3, 1), 588),
            ((4, 0), 2016),
            ((1, 2), 0),
            ((0, 3), 0),
        ];
        for ((n, m), want) in expected {
            let got = enumerate(&g, &fp(&g, n, m)).unwrap().len();
            assert_eq!(got, want, "count mismatch at ({n},{m})");
        }
    }

    #[test]
    fn enumerate_matches_naive_oracle() {
        let g = setup(3, 7);
        for (n, m) in [(2, 1), (3, 0), (2, 2), (3, 1)] {
            let fast = enumerate(&g, &fp(&g, n, m)).unwrap().len();
            let slow = oracle_count(&g, n, m);
            assert_eq!(fast, slow, "oracle disagrees at ({n},{m})");
        }
    }

    #[test]
    fn enumerate_nonempty_iff_exists() {
        let g = setup(3, 7);
        for total in 3..=5usize {
            for n in 0..=total {
                let f = fp(&g, n, total - n);
                let vecs = enumerate(&g, &f).unwrap();
                assert_eq!(!vecs.is_empty(), exists(&f).holds(), "mismatch at ({n},{})", total - n);
            }
        }
    }

    #[test]
    fn enumerated_vectors_all_validate() {
        let g = setup(3, 7);
        for (n, m) in [(2, 2), (3, 1), (2, 1)] {
            for v in enumerate(&g, &fp(&g, n, m)).unwrap() {
                assert_eq!(v.validate(), Ok(()));
                assert_eq!(
                    v.realized_signature().rh_genus(21).unwrap(),
                    fp(&g, n, m).genus_formula().unwrap()
                );
            }
        }
    }

    #[test]
    fn forced_entry_lands_in_cyclic_subgroup() {
        let g = setup(3, 7);
        for v in enumerate(&g, &fp(&g, 2, 1)).unwrap() {
            let y = v.y_part()[0];
            let (_, n) = g.metacyclic_ln(y);
            assert_eq!(n, 0, "order-q entries are powers of a");
        }
    }

    #[test]
    fn canonical_is_enumerated() {
        let g = setup(3, 7);
        for (n, m) in [(2, 2), (3, 1), (4, 0), (2, 1), (3, 0)] {
            let f = fp(&g, n, m);
            let c = canonical(&g, &f).unwrap();
            let all = enumerate(&g, &f).unwrap();
            assert!(all.contains(&c), "canonical vector missing at ({n},{m})");
        }
    }

    #[test]
    fn conjugated_vectors_stay_valid() {
        let g = setup(3, 7);
        let f = fp(&g, 2, 2);
        let vecs = enumerate(&g, &f).unwrap();
        for h in g.elements() {
            let v = &vecs[h.index() % vecs.len()];
            let xs: Vec<Elem> =
                v.x_part().iter().map(|&x| g.conjugate(h, x).unwrap()).collect();
            let ys: Vec<Elem> =
                v.y_part().iter().map(|&y| g.conjugate(h, y).unwrap()).collect();
            let w = GeneratingVector::from_elems(Arc::clone(&g), f, &xs, &ys);
            assert_eq!(w.validate(), Ok(()));
        }
    }

    #[test]
    fn search_bound_enforced() {
        let g = setup(3, 7);
        let err = enumerate_with_bound(&g, &fp(&g, 4, 0), 10).unwrap_err();
        assert!(matches!(err, Error::SearchSpaceTooLarge { .. }));
    }

    #[test]
    fn json_shape() {
        let g = setup(3, 7);
        let v = canonical(&g, &fp(&g, 2, 2)).unwrap();
        let js = v.to_json();
        assert_eq!(js["p"], 3);
        assert_eq!(js["q"], 7);
        assert_eq!(js["x"].as_array().unwrap().len(), 2);
        assert_eq!(js["y"][0].as_array().unwrap().len(), 2);
    }

    #[test]
    fn group_params_reject() {
        assert!(GroupParams::new(3, 5).is_err());
    }
}
