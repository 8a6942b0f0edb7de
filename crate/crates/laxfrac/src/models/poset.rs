//! Finite posets on `{0..n-1}` (n ≤ 16), monotone maps, embeddings, lower-set
//! lattices, and the enumeration / quotient utilities the Pos model is built
//! from.
//!
//! A poset stores its full order relation as one `u16` row mask per element
//! (bit `j` of `row i` set iff `i ≤ j`). The canonical enumeration order —
//! element count first, then the relation bitmask `Σ 2^(i·n+j)` compared as an
//! integer — is the tie-breaking order every witness search in the crate
//! relies on, so it is part of the contract, not an implementation detail.
//!
//! Enumeration tables are built lazily per size and capped at [`ENUM_CAP`]
//! elements (the table sizes explode combinatorially); posets *constructed*
//! by quotients or amalgams may use the full 16-element headroom.

use std::collections::BTreeMap;
use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, LazyLock, Mutex};

/// Hard encoding limit for constructed posets.
pub const MAX_ELEMS: usize = 16;
/// Largest size for which exhaustive poset tables are built (130023 labeled
/// posets at 6; size 7 would already need ~6·10⁶).
pub const ENUM_CAP: usize = 6;

/// A labeled partial order on `{0..n-1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Poset {
    n: u8,
    rows: [u16; MAX_ELEMS],
}

impl PartialOrd for Poset {
    fn partial_cmp(&self, other: &Poset) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poset {
    /// Element count, then the relation bitmask Σ 2^(i·n+j) as an integer —
    /// i.e. rows compared numerically from the highest-index row down.
    fn cmp(&self, other: &Poset) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.rows.iter().rev().cmp(other.rows.iter().rev()))
    }
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}«", self.n)?;
        let mut first = true;
        for (i, j) in self.pairs() {
            if i == j {
                continue;
            }
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{i}≤{j}")?;
            first = false;
        }
        write!(f, "»")
    }
}

impl Poset {
    /// The empty poset.
    pub fn empty() -> Poset {
        Poset { n: 0, rows: [0; MAX_ELEMS] }
    }

    /// Discrete poset (antichain) on n elements.
    pub fn discrete(n: usize) -> Poset {
        assert!(n <= MAX_ELEMS);
        let mut rows = [0u16; MAX_ELEMS];
        for (i, row) in rows.iter_mut().enumerate().take(n) {
            *row = 1 << i;
        }
        Poset { n: n as u8, rows }
    }

    /// Total order 0 ≤ 1 ≤ … ≤ n-1.
    pub fn chain(n: usize) -> Poset {
        assert!(n <= MAX_ELEMS);
        let all = ones(n);
        let mut rows = [0u16; MAX_ELEMS];
        for (i, row) in rows.iter_mut().enumerate().take(n) {
            *row = all & !ones(i);
        }
        Poset { n: n as u8, rows }
    }

    /// Builds from related pairs; reflexivity is added, but the listed
    /// relation must already be transitive and antisymmetric.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Poset, String> {
        assert!(n <= MAX_ELEMS);
        let mut p = Poset::discrete(n);
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(format!("pair ({a},{b}) out of range for {n} elements"));
            }
            p.rows[a] |= 1 << b;
        }
        p.validate()?;
        Ok(p)
    }

    pub(crate) fn from_rows(n: usize, rows: [u16; MAX_ELEMS]) -> Poset {
        debug_assert!(n <= MAX_ELEMS);
        Poset { n: n as u8, rows }
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub(crate) fn rows(&self) -> &[u16; MAX_ELEMS] {
        &self.rows
    }

    #[inline]
    pub fn le(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    /// Bitmask of elements above `i` (including `i`).
    #[inline]
    pub fn up_mask(&self, i: usize) -> u16 {
        self.rows[i]
    }

    /// All related pairs (i ≤ j), including the diagonal.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (0..n).filter(move |&j| self.le(i, j)).map(move |j| (i, j)))
    }

    /// Checks reflexivity, antisymmetry and transitivity; names the first
    /// violation found.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.len();
        for i in 0..n {
            if self.rows[i] & !ones(n) != 0 {
                return Err(format!("row {i} relates out-of-range elements"));
            }
            if !self.le(i, i) {
                return Err(format!("missing reflexive pair ({i},{i})"));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && self.le(i, j) && self.le(j, i) {
                    return Err(format!("antisymmetry fails on ({i},{j})"));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.le(i, j) && self.rows[j] & !self.rows[i] != 0 {
                    let k = (self.rows[j] & !self.rows[i]).trailing_zeros();
                    return Err(format!("transitivity fails on {i}≤{j}≤{k}"));
                }
            }
        }
        Ok(())
    }
}

#[inline]
fn ones(n: usize) -> u16 {
    if n >= 16 { u16::MAX } else { (1u16 << n) - 1 }
}

/// Transitive closure (Warshall) of a row-mask relation in place.
pub fn transitive_closure(n: usize, rows: &mut [u16; MAX_ELEMS]) {
    for k in 0..n {
        for i in 0..n {
            if rows[i] >> k & 1 == 1 {
                rows[i] |= rows[k];
            }
        }
    }
}

static POSET_TABLES: LazyLock<Mutex<BTreeMap<usize, Arc<Vec<Poset>>>>> =
    LazyLock::new(|| Mutex::new(BTreeMap::new()));

/// All labeled posets on exactly `n` elements (n ≤ [`ENUM_CAP`]) in canonical
/// ascending order. Cached globally; sizes are built only when requested.
pub fn all_posets(n: usize) -> Arc<Vec<Poset>> {
    assert!(n <= ENUM_CAP, "poset enumeration capped at {ENUM_CAP} elements, asked for {n}");
    if let Some(t) = POSET_TABLES.lock().unwrap().get(&n) {
        return Arc::clone(t);
    }
    let table = if n == 0 {
        Arc::new(vec![Poset::empty()])
    } else {
        let prev = all_posets(n - 1);
        let m = n - 1;
        let mut out = Vec::new();
        // Extend each poset on {0..n-2} by a new greatest-index element with
        // a chosen down-set D (below it) and up-set U (above it): closure
        // demands D down-closed, U up-closed, disjoint, and d ≤ u for every
        // d ∈ D, u ∈ U. Each labeled poset arises exactly once this way.
        for p in prev.iter() {
            for d in 0..1u16 << m {
                if !subset_down_closed(p, d) {
                    continue;
                }
                'u: for u in 0..1u16 << m {
                    if d & u != 0 || !subset_up_closed(p, u) {
                        continue;
                    }
                    for i in 0..m {
                        if d >> i & 1 == 1 && u & !p.rows[i] != 0 {
                            continue 'u;
                        }
                    }
                    let mut rows = p.rows;
                    rows[m] = u | 1 << m;
                    for i in 0..m {
                        if d >> i & 1 == 1 {
                            rows[i] |= 1 << m;
                        }
                    }
                    out.push(Poset { n: n as u8, rows });
                }
            }
        }
        out.sort_unstable();
        Arc::new(out)
    };
    POSET_TABLES
        .lock()
        .unwrap()
        .entry(n)
        .or_insert(table)
        .clone()
}

fn subset_down_closed(p: &Poset, s: u16) -> bool {
    for i in 0..p.len() {
        if s >> i & 1 == 1 {
            for j in 0..p.len() {
                if p.le(j, i) && s >> j & 1 == 0 {
                    return false;
                }
            }
        }
    }
    true
}

fn subset_up_closed(p: &Poset, s: u16) -> bool {
    for i in 0..p.len() {
        if s >> i & 1 == 1 && p.rows[i] & !s != 0 {
            return false;
        }
    }
    true
}

/// A monotone map between finite posets, stored as its value table.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonotoneMap {
    pub dom: Poset,
    pub cod: Poset,
    pub map: Vec<u8>,
}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}→{:?}[", self.dom, self.cod)?;
        for (i, v) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl MonotoneMap {
    pub fn identity(p: Poset) -> MonotoneMap {
        MonotoneMap { dom: p, cod: p, map: (0..p.len() as u8).collect() }
    }

    pub fn new(dom: Poset, cod: Poset, map: Vec<u8>) -> Result<MonotoneMap, String> {
        if map.len() != dom.len() {
            return Err(format!("assignment has {} entries, domain has {}", map.len(), dom.len()));
        }
        if let Some(&v) = map.iter().find(|&&v| v as usize >= cod.len()) {
            return Err(format!("value {v} out of range for codomain of {} elements", cod.len()));
        }
        let m = MonotoneMap { dom, cod, map };
        match m.monotonicity_violation() {
            None => Ok(m),
            Some((a, b)) => Err(format!("not monotone on {a} ≤ {b}")),
        }
    }

    fn monotonicity_violation(&self) -> Option<(usize, usize)> {
        for (a, b) in self.dom.pairs() {
            if !self.cod.le(self.apply(a), self.apply(b)) {
                return Some((a, b));
            }
        }
        None
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i] as usize
    }

    /// g∘f, where `self` is applied first.
    pub fn then(&self, g: &MonotoneMap) -> MonotoneMap {
        debug_assert_eq!(self.cod, g.dom);
        MonotoneMap {
            dom: self.dom,
            cod: g.cod,
            map: self.map.iter().map(|&i| g.map[i as usize]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod && self.map.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    /// Embedding = injective and order-reflecting (monotonicity is assumed).
    pub fn is_embedding(&self) -> bool {
        let n = self.dom.len();
        for a in 0..n {
            for b in 0..n {
                if self.cod.le(self.apply(a), self.apply(b)) && !self.dom.le(a, b) {
                    return false;
                }
            }
        }
        // Order reflection makes equal values mutually ≤, so injectivity
        // reduces to antisymmetry; check it explicitly anyway for clarity.
        for a in 0..n {
            for b in a + 1..n {
                if self.apply(a) == self.apply(b) {
                    return false;
                }
            }
        }
        true
    }

    /// Pointwise ≤ against a parallel map.
    pub fn le_pointwise(&self, g: &MonotoneMap) -> bool {
        self.dom == g.dom
            && self.cod == g.cod
            && (0..self.dom.len()).all(|i| self.cod.le(self.apply(i), g.apply(i)))
    }
}

/// All monotone maps `x → y` in ascending assignment order.
pub fn monotone_maps(x: &Poset, y: &Poset) -> Vec<MonotoneMap> {
    maps_with_forced(x, y, &[])
}

/// All monotone maps `x → y` in ascending assignment order whose value at
/// index `i` equals `forced[i]` wherever that is `Some`. An empty slice
/// forces nothing.
pub fn maps_with_forced(x: &Poset, y: &Poset, forced: &[Option<u8>]) -> Vec<MonotoneMap> {
    let n = x.len();
    let mut out = Vec::new();
    if y.is_empty() && n > 0 {
        return out;
    }
    let mut map = vec![0u8; n];
    backtrack(x, y, forced, &mut map, 0, &mut out);
    out
}

fn backtrack(
    x: &Poset,
    y: &Poset,
    forced: &[Option<u8>],
    map: &mut Vec<u8>,
    i: usize,
    out: &mut Vec<MonotoneMap>,
) {
    if i == x.len() {
        out.push(MonotoneMap { dom: *x, cod: *y, map: map.clone() });
        return;
    }
    let range: Box<dyn Iterator<Item = usize>> = match forced.get(i).copied().flatten() {
        Some(v) => Box::new(std::iter::once(v as usize)),
        None => Box::new(0..y.len()),
    };
    'v: for v in range {
        for j in 0..i {
            if x.le(j, i) && !y.le(map[j] as usize, v) {
                continue 'v;
            }
            if x.le(i, j) && !y.le(v, map[j] as usize) {
                continue 'v;
            }
        }
        map[i] = v as u8;
        backtrack(x, y, forced, map, i + 1, out);
    }
}

/// All embeddings `x → y` in ascending assignment order.
pub fn embeddings(x: &Poset, y: &Poset) -> Vec<MonotoneMap> {
    monotone_maps(x, y).into_iter().filter(MonotoneMap::is_embedding).collect()
}

/// The lattice of down-closed subsets of a base poset, each a bitmask,
/// ascending. Contravariant along monotone maps by preimage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerSetLattice {
    pub base: Poset,
    pub sets: Vec<u16>,
}

impl LowerSetLattice {
    pub fn of(base: Poset) -> LowerSetLattice {
        let n = base.len();
        let sets = (0..1u32 << n)
            .map(|s| s as u16)
            .filter(|&s| {
                (0..n).all(|i| s >> i & 1 == 0 || (0..n).all(|j| !base.le(j, i) || s >> j & 1 == 1))
            })
            .collect();
        LowerSetLattice { base, sets }
    }

    pub fn contains(&self, s: u16) -> bool {
        self.sets.binary_search(&s).is_ok()
    }
}

/// Preimage of a subset along a map (sends lower sets to lower sets).
pub fn preimage(f: &MonotoneMap, s: u16) -> u16 {
    let mut out = 0u16;
    for i in 0..f.dom.len() {
        if s >> f.apply(i) & 1 == 1 {
            out |= 1 << i;
        }
    }
    out
}

/// Down-closure of the image of a subset along a map.
pub fn down_image(f: &MonotoneMap, s: u16) -> u16 {
    let mut out = 0u16;
    for i in 0..f.dom.len() {
        if s >> i & 1 == 1 {
            let v = f.apply(i);
            for j in 0..f.cod.len() {
                if f.cod.le(j, v) {
                    out |= 1 << j;
                }
            }
        }
    }
    out
}

/// Poset reflection of a reflexive transitive relation: collapses each
/// mutual-comparability class to one element. Classes are labeled in order
/// of their least original element; the second component maps original
/// elements to class labels.
pub fn poset_reflection(n: usize, pre: &[u16; MAX_ELEMS]) -> (Poset, Vec<u8>) {
    let at = |i: usize, j: usize| pre[i] >> j & 1 == 1;
    let mut label = vec![u8::MAX; n];
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..n {
        if label[i] != u8::MAX {
            continue;
        }
        let class = reps.len() as u8;
        label[i] = class;
        reps.push(i);
        for j in i + 1..n {
            if label[j] == u8::MAX && at(i, j) && at(j, i) {
                label[j] = class;
            }
        }
    }
    let k = reps.len();
    let mut rows = [0u16; MAX_ELEMS];
    for (a, &i) in reps.iter().enumerate() {
        for (b, &j) in reps.iter().enumerate() {
            if at(i, j) {
                rows[a] |= 1 << b;
            }
        }
    }
    let q = Poset { n: k as u8, rows };
    debug_assert!(q.validate().is_ok(), "reflection produced a non-poset");
    (q, label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labeled_poset_counts_are_frozen() {
        // Independent oracle values for the canonical enumeration, fixed
        // before any model code consumed the tables.
        assert_eq!(all_posets(0).len(), 1);
        assert_eq!(all_posets(1).len(), 1);
        assert_eq!(all_posets(2).len(), 3);
        assert_eq!(all_posets(3).len(), 19);
        assert_eq!(all_posets(4).len(), 219);
        assert_eq!(all_posets(5).len(), 4231);
    }

    #[test]
    fn enumeration_is_valid_sorted_and_duplicate_free() {
        for n in 0..=4 {
            let ps = all_posets(n);
            for p in ps.iter() {
                p.validate().unwrap();
                assert_eq!(p.len(), n);
            }
            for w in ps.windows(2) {
                assert!(w[0] < w[1], "not strictly ascending at n={n}");
            }
        }
    }

    #[test]
    fn chain_and_discrete_are_enumerated() {
        for n in 1..=4 {
            let ps = all_posets(n);
            assert!(ps.contains(&Poset::chain(n)));
            assert!(ps.contains(&Poset::discrete(n)));
        }
        // Every mask contains the diagonal, so the discrete poset (diagonal
        // only) has the least mask and comes first.
        assert_eq!(all_posets(3)[0], Poset::discrete(3));
    }

    #[test]
    fn monotone_map_counts_on_chains() {
        // Oracle: maps chain(m) → chain(k) are weakly increasing sequences,
        // counted by binomial(m + k - 1, m).
        let c = |m: usize, k: usize| monotone_maps(&Poset::chain(m), &Poset::chain(k)).len();
        assert_eq!(c(1, 3), 3);
        assert_eq!(c(2, 2), 3);
        assert_eq!(c(2, 3), 6);
        assert_eq!(c(3, 3), 10);
        // Into a discrete codomain only constants are monotone.
        assert_eq!(monotone_maps(&Poset::chain(3), &Poset::discrete(2)).len(), 2);
        // From a discrete domain everything is.
        assert_eq!(monotone_maps(&Poset::discrete(3), &Poset::chain(2)).len(), 8);
    }

    #[test]
    fn maps_enumerate_in_ascending_assignment_order() {
        let maps = monotone_maps(&Poset::discrete(2), &Poset::chain(2));
        let tables: Vec<Vec<u8>> = maps.into_iter().map(|m| m.map).collect();
        assert_eq!(tables, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn forced_positions_restrict_enumeration() {
        let x = Poset::discrete(2);
        let y = Poset::chain(2);
        let maps = maps_with_forced(&x, &y, &[None, Some(1)]);
        let tables: Vec<Vec<u8>> = maps.into_iter().map(|m| m.map).collect();
        assert_eq!(tables, vec![vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn embedding_examples() {
        let one = Poset::chain(1);
        let two = Poset::chain(2);
        assert!(MonotoneMap::identity(two).is_embedding());
        // 1 → chain2, * ↦ 0: embedding.
        let m = MonotoneMap::new(one, two, vec![0]).unwrap();
        assert!(m.is_embedding());
        // chain2 → 1: order-reflecting but not injective.
        let s = MonotoneMap::new(two, one, vec![0, 0]).unwrap();
        assert!(!s.is_embedding());
        // discrete2 → chain2, identity on points: injective, monotone, not
        // order-reflecting.
        let d = MonotoneMap::new(Poset::discrete(2), two, vec![0, 1]).unwrap();
        assert!(!d.is_embedding());
    }

    #[test]
    fn lower_sets_of_small_posets() {
        // chain(n) has n+1 lower sets; discrete(n) has 2^n.
        assert_eq!(LowerSetLattice::of(Poset::chain(3)).sets.len(), 4);
        assert_eq!(LowerSetLattice::of(Poset::discrete(3)).sets.len(), 8);
        // V-shape 0 ≤ 2, 1 ≤ 2: lower sets ∅,{0},{1},{0,1},{0,1,2}.
        let v = Poset::from_pairs(3, &[(0, 2), (1, 2)]).unwrap();
        assert_eq!(LowerSetLattice::of(v).sets, vec![0b000, 0b001, 0b010, 0b011, 0b111]);
    }

    #[test]
    fn lower_set_lattice_closed_under_union_intersection_and_preimage_preserves_them() {
        for n in 0..=4 {
            for p in all_posets(n).iter() {
                let l = LowerSetLattice::of(*p);
                for &a in &l.sets {
                    for &b in &l.sets {
                        assert!(l.contains(a | b));
                        assert!(l.contains(a & b));
                    }
                }
            }
        }
        // Preimage is a boolean-algebra homomorphism, hence preserves the
        // lattice operations of lower sets (unions and intersections).
        let x = Poset::chain(3);
        let y = Poset::from_pairs(3, &[(0, 2), (1, 2)]).unwrap();
        for f in monotone_maps(&x, &y) {
            let ly = LowerSetLattice::of(y);
            for &a in &ly.sets {
                for &b in &ly.sets {
                    assert_eq!(preimage(&f, a | b), preimage(&f, a) | preimage(&f, b));
                    assert_eq!(preimage(&f, a & b), preimage(&f, a) & preimage(&f, b));
                }
            }
        }
    }

    #[test]
    fn reflection_collapses_cycles() {
        // Preorder on 3 elements: 0 ≈ 1 (mutual), both ≤ 2.
        let mut pre = [0u16; MAX_ELEMS];
        for &(i, j) in &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (0, 2), (1, 2)] {
            pre[i] |= 1 << j;
        }
        let (q, label) = poset_reflection(3, &pre);
        assert_eq!(q.len(), 2);
        assert_eq!(label, vec![0, 0, 1]);
        assert!(q.le(0, 1) && !q.le(1, 0));
    }

    #[test]
    fn transitive_closure_examples() {
        let mut rel = [0u16; MAX_ELEMS];
        for &(i, j) in &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)] {
            rel[i] |= 1 << j;
        }
        transitive_closure(3, &mut rel);
        assert_eq!(rel[0] >> 2 & 1, 1);
    }
}
