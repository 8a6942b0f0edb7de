//! A finite fragment of the 2-category of posets.
//!
//! Objects are all labeled posets with at most `max_object_elems` elements,
//! 1-cells are monotone maps, and there is at most one 2-cell between
//! parallel maps: `f ⇒ g` exists iff `f ≤ g` pointwise. Σ consists of the
//! embeddings (injective order-reflecting maps), and a square qualifies as a
//! Σ-square when it commutes strictly (the only invertible 2-cells are
//! identities), its top and bottom are embeddings, and it satisfies the
//! elementwise lifting condition
//!
//! ```text
//! ∀ y ∈ cod(top), z ∈ dom(bottom):
//!     bottom(z) ≤ right(y)  ⟹  ∃ x ∈ dom(top): z ≤ left(x) ∧ top(x) ≤ y
//! ```
//!
//! equivalently: for every lower set S of cod(top),
//! `↓left[top⁻¹(S)] = bottom⁻¹(↓right[S])`.
//!
//! Witness providers search codomain posets in canonical order (size, then
//! relation bitmask), so results are deterministic and — within the
//! enumeration cap — minimal. Beyond the cap, `witness_square` falls back to
//! the amalgam construction (quotient of the disjoint union gluing the span),
//! which is validated before being returned.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::models::poset::{
    self, all_posets, down_image, maps_with_forced, poset_reflection, preimage,
    transitive_closure, LowerSetLattice, MonotoneMap, Poset, ENUM_CAP, MAX_ELEMS,
};
use crate::two_cat_core::{BoundaryError, RuleError, Square, SquareOf, TwoCatModel};

/// The 2-cell `src ⇒ tgt` witnessing `src ≤ tgt` pointwise.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PosTwo {
    pub src: MonotoneMap,
    pub tgt: MonotoneMap,
}

impl fmt::Debug for PosTwo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} ⇒ {:?}", self.src, self.tgt)
    }
}

impl PosTwo {
    pub fn new(src: MonotoneMap, tgt: MonotoneMap) -> Result<PosTwo, String> {
        if !src.le_pointwise(&tgt) {
            return Err(format!("no 2-cell: {src:?} is not pointwise ≤ {tgt:?}"));
        }
        Ok(PosTwo { src, tgt })
    }
}

#[derive(Default)]
struct Caches {
    homs: BTreeMap<(Poset, Poset), Arc<Vec<MonotoneMap>>>,
    witnesses: BTreeMap<(MonotoneMap, MonotoneMap, usize), Result<SquareOf<PosModel>, RuleError>>,
}

/// See the module documentation for the mathematical content.
pub struct PosModel {
    max_object_elems: usize,
    extra_objects: Vec<Poset>,
    caches: Mutex<Caches>,
}

impl fmt::Debug for PosModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PosModel").field("max_object_elems", &self.max_object_elems).finish()
    }
}

impl PosModel {
    /// Objects are the posets with at most `max_object_elems` elements;
    /// that bound must stay within the enumeration cap.
    pub fn new(max_object_elems: usize) -> PosModel {
        PosModel::with_extra_objects(max_object_elems, Vec::new())
    }

    /// Like [`PosModel::new`] but with explicitly listed additional objects
    /// (e.g. handpicked larger posets from a model file). Duplicates of
    /// enumerated objects are dropped.
    pub fn with_extra_objects(max_object_elems: usize, extras: Vec<Poset>) -> PosModel {
        assert!(
            max_object_elems <= ENUM_CAP,
            "object size bound {max_object_elems} exceeds enumeration cap {ENUM_CAP}"
        );
        let mut extra_objects: Vec<Poset> = Vec::new();
        for p in extras {
            let enumerated = p.len() <= max_object_elems;
            if !enumerated && !extra_objects.contains(&p) {
                extra_objects.push(p);
            }
        }
        PosModel { max_object_elems, extra_objects, caches: Mutex::new(Caches::default()) }
    }

    pub fn max_object_elems(&self) -> usize {
        self.max_object_elems
    }

    fn hom(&self, a: &Poset, b: &Poset) -> Arc<Vec<MonotoneMap>> {
        let key = (*a, *b);
        if let Some(h) = self.caches.lock().unwrap().homs.get(&key) {
            return Arc::clone(h);
        }
        let maps = Arc::new(poset::monotone_maps(a, b));
        self.caches.lock().unwrap().homs.entry(key).or_insert(maps).clone()
    }

    /// The amalgam witness for a span `(f, s)`: the quotient of
    /// `cod(s) ⊔ cod(f)` by the preorder generated by both orders and
    /// `s(a) ≈ f(a)`. Valid whenever it fits the encoding; validated before
    /// use.
    fn amalgam_witness(
        &self,
        s: &MonotoneMap,
        f: &MonotoneMap,
    ) -> Result<SquareOf<PosModel>, RuleError> {
        let nb = s.cod.len();
        let nc = f.cod.len();
        if nb + nc > MAX_ELEMS {
            return Err(RuleError::BoundExhausted {
                context: format!(
                    "amalgam witness for span needs {} elements before collapsing; \
                     encoding holds at most {MAX_ELEMS}",
                    nb + nc
                ),
                bound: MAX_ELEMS,
            });
        }
        let mut pre = [0u16; MAX_ELEMS];
        for (i, j) in s.cod.pairs() {
            pre[i] |= 1 << j;
        }
        for (i, j) in f.cod.pairs() {
            pre[nb + i] |= 1 << (nb + j);
        }
        for a in 0..s.dom.len() {
            let b = s.apply(a);
            let c = nb + f.apply(a);
            pre[b] |= 1 << c;
            pre[c] |= 1 << b;
        }
        transitive_closure(nb + nc, &mut pre);
        let (w, label) = poset_reflection(nb + nc, &pre);
        let f_prime = MonotoneMap { dom: s.cod, cod: w, map: label[..nb].to_vec() };
        let s_prime = MonotoneMap { dom: f.cod, cod: w, map: label[nb..].to_vec() };
        let glued = s.then(&f_prime);
        let sq = Square {
            top: s.clone(),
            left: f.clone(),
            right: f_prime,
            bottom: s_prime,
            cell: PosTwo { src: glued.clone(), tgt: glued },
        };
        if self.square_in_sigma(&sq) {
            Ok(sq)
        } else {
            Err(RuleError::BoundExhausted {
                context: "amalgam construction did not yield a valid witness square".into(),
                bound: MAX_ELEMS,
            })
        }
    }
}

/// A candidate that fails to commute strictly (or has mismatched
/// boundaries) before Σ-membership is even in question.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a commuting square: {0}")]
pub struct NotASquare(pub String);

/// Σ-membership of a strictly commuting square of monotone maps, decided by
/// the elementwise lifting condition and cross-checked against the
/// lower-set formulation. Non-commuting input is an error, not a `false`.
pub fn pos_square_in_sigma(sq: &SquareOf<PosModel>) -> Result<bool, NotASquare> {
    let Square { top, left, right, bottom, cell } = sq;
    if top.dom != left.dom
        || top.cod != right.dom
        || left.cod != bottom.dom
        || right.cod != bottom.cod
    {
        return Err(NotASquare("boundary mismatch".into()));
    }
    let around = left.then(bottom);
    let across = top.then(right);
    if around != across {
        return Err(NotASquare(format!(
            "bottom∘left = {around:?} differs from right∘top = {across:?}"
        )));
    }
    if cell.src != around || cell.tgt != across {
        return Err(NotASquare("cell does not fill the square".into()));
    }
    if !top.is_embedding() || !bottom.is_embedding() {
        return Ok(false);
    }
    let elementwise = lifting_condition(top, left, right, bottom);
    let lowersets = lifting_condition_lowersets(top, left, right, bottom);
    debug_assert_eq!(
        elementwise, lowersets,
        "lifting-condition formulations disagree on {sq:?}"
    );
    Ok(elementwise && lowersets)
}

/// Elementwise lifting condition of a strictly commuting candidate square.
pub fn lifting_condition(
    top: &MonotoneMap,
    left: &MonotoneMap,
    right: &MonotoneMap,
    bottom: &MonotoneMap,
) -> bool {
    let xs = top.dom.len();
    for y in 0..top.cod.len() {
        for z in 0..bottom.dom.len() {
            if right.cod.le(bottom.apply(z), right.apply(y))
                && !(0..xs)
                    .any(|x| bottom.dom.le(z, left.apply(x)) && top.cod.le(top.apply(x), y))
            {
                return false;
            }
        }
    }
    true
}

/// Lower-set formulation of the lifting condition; agrees with
/// [`lifting_condition`] on commuting squares of embeddings (kept as an
/// independent cross-check).
pub fn lifting_condition_lowersets(
    top: &MonotoneMap,
    left: &MonotoneMap,
    right: &MonotoneMap,
    bottom: &MonotoneMap,
) -> bool {
    let lattice = LowerSetLattice::of(top.cod);
    lattice
        .sets
        .iter()
        .all(|&s| down_image(left, preimage(top, s)) == preimage(bottom, down_image(right, s)))
}

impl TwoCatModel for PosModel {
    type Obj = Poset;
    type One = MonotoneMap;
    type Two = PosTwo;

    fn objects(&self) -> Vec<Poset> {
        (0..=self.max_object_elems)
            .flat_map(|n| all_posets(n).iter().copied().collect::<Vec<_>>())
            .chain(self.extra_objects.iter().copied())
            .collect()
    }

    fn one_cells(&self, a: &Poset, b: &Poset) -> Vec<MonotoneMap> {
        self.hom(a, b).as_ref().clone()
    }

    fn two_cells(&self, f: &MonotoneMap, g: &MonotoneMap) -> Vec<PosTwo> {
        if f.le_pointwise(g) {
            vec![PosTwo { src: f.clone(), tgt: g.clone() }]
        } else {
            Vec::new()
        }
    }

    fn dom(&self, f: &MonotoneMap) -> Poset {
        f.dom
    }

    fn cod(&self, f: &MonotoneMap) -> Poset {
        f.cod
    }

    fn src2(&self, a: &PosTwo) -> MonotoneMap {
        a.src.clone()
    }

    fn tgt2(&self, a: &PosTwo) -> MonotoneMap {
        a.tgt.clone()
    }

    fn id1(&self, a: &Poset) -> MonotoneMap {
        MonotoneMap::identity(*a)
    }

    fn id2(&self, f: &MonotoneMap) -> PosTwo {
        PosTwo { src: f.clone(), tgt: f.clone() }
    }

    fn comp1(&self, g: &MonotoneMap, f: &MonotoneMap) -> Result<MonotoneMap, BoundaryError> {
        if f.cod != g.dom {
            return Err(BoundaryError::new(format!(
                "cannot compose: codomain of {f:?} differs from domain of {g:?}"
            )));
        }
        Ok(f.then(g))
    }

    fn vcomp2(&self, b: &PosTwo, a: &PosTwo) -> Result<PosTwo, BoundaryError> {
        if a.tgt != b.src {
            return Err(BoundaryError::new(format!(
                "cannot stack 2-cells: target of {a:?} differs from source of {b:?}"
            )));
        }
        Ok(PosTwo { src: a.src.clone(), tgt: b.tgt.clone() })
    }

    fn whisker_post(&self, g: &MonotoneMap, a: &PosTwo) -> Result<PosTwo, BoundaryError> {
        if a.src.cod != g.dom {
            return Err(BoundaryError::new(format!(
                "cannot whisker {a:?} by {g:?} on the left of the target"
            )));
        }
        Ok(PosTwo { src: a.src.then(g), tgt: a.tgt.then(g) })
    }

    fn whisker_pre(&self, a: &PosTwo, f: &MonotoneMap) -> Result<PosTwo, BoundaryError> {
        if f.cod != a.src.dom {
            return Err(BoundaryError::new(format!(
                "cannot whisker {a:?} by {f:?} on the source side"
            )));
        }
        Ok(PosTwo { src: f.then(&a.src), tgt: f.then(&a.tgt) })
    }

    fn invert2(&self, a: &PosTwo) -> Option<PosTwo> {
        (a.src == a.tgt).then(|| a.clone())
    }

    fn in_sigma(&self, f: &MonotoneMap) -> bool {
        f.is_embedding()
    }

    fn square_in_sigma(&self, sq: &SquareOf<Self>) -> bool {
        let Square { top, left, right, bottom, cell } = sq;
        if top.dom != left.dom
            || top.cod != right.dom
            || left.cod != bottom.dom
            || right.cod != bottom.cod
        {
            return false;
        }
        let around = left.then(bottom);
        // The cell must be an invertible bottom∘left ⇒ right∘top; in Pos
        // that forces strict commutation.
        if cell.src != around || cell.tgt != top.then(right) || cell.src != cell.tgt {
            return false;
        }
        top.is_embedding()
            && bottom.is_embedding()
            && lifting_condition(top, left, right, bottom)
    }

    fn searches_complete(&self) -> bool {
        true
    }

    fn witness_square(
        &self,
        s: &MonotoneMap,
        f: &MonotoneMap,
        bound: usize,
    ) -> Result<SquareOf<Self>, RuleError> {
        if !self.in_sigma(s) {
            return Err(RuleError::Precondition(format!(
                "top of a witness square must be a Σ-arrow; {s:?} is not an embedding"
            )));
        }
        if s.dom != f.dom {
            return Err(RuleError::Boundary(format!(
                "span legs {s:?} and {f:?} must share their source"
            )));
        }
        // Normalisations first: they make cospan composition strictly
        // unital, so they take precedence over the minimal search.
        if f.is_identity() {
            let sq = Square {
                top: s.clone(),
                left: f.clone(),
                right: MonotoneMap::identity(s.cod),
                bottom: s.clone(),
                cell: self.id2(s),
            };
            return Ok(sq);
        }
        if s.is_identity() {
            let sq = Square {
                top: s.clone(),
                left: f.clone(),
                right: f.clone(),
                bottom: MonotoneMap::identity(f.cod),
                cell: self.id2(f),
            };
            return Ok(sq);
        }
        let b_cod = s.cod;
        let c_cod = f.cod;
        for size in c_cod.len()..=bound.min(ENUM_CAP) {
            for w in all_posets(size).iter() {
                for s_prime in poset::embeddings(&c_cod, w) {
                    // Commutation forces f′ on the image of s.
                    let mut forced = vec![None; b_cod.len()];
                    for a in 0..s.dom.len() {
                        forced[s.apply(a)] = Some(s_prime.map[f.apply(a)]);
                    }
                    for f_prime in maps_with_forced(&b_cod, w, &forced) {
                        if lifting_condition(s, f, &f_prime, &s_prime) {
                            let glued = s.then(&f_prime);
                            return Ok(Square {
                                top: s.clone(),
                                left: f.clone(),
                                right: f_prime,
                                bottom: s_prime,
                                cell: PosTwo { src: glued.clone(), tgt: glued },
                            });
                        }
                    }
                }
            }
        }
        if bound > ENUM_CAP {
            let sq = self.amalgam_witness(s, f)?;
            if sq.bottom.cod.len() <= bound {
                return Ok(sq);
            }
        }
        Err(RuleError::BoundExhausted {
            context: format!("no witness square over the span ({f:?}, {s:?})"),
            bound,
        })
    }

    fn witness_equi_insertion(
        &self,
        sq: &SquareOf<Self>,
        g: &MonotoneMap,
        alpha: &PosTwo,
        bound: usize,
    ) -> Result<(MonotoneMap, PosTwo), RuleError> {
        if !self.square_in_sigma(sq) {
            return Err(RuleError::Precondition(
                "equi-insertion needs a Σ-square as input".into(),
            ));
        }
        let f_prime = &sq.right;
        if g.dom != f_prime.dom || g.cod != f_prime.cod {
            return Err(RuleError::Boundary(format!(
                "{g:?} is not parallel to the square's right leg {f_prime:?}"
            )));
        }
        let expected_src = sq.top.then(f_prime);
        let expected_tgt = sq.top.then(g);
        if alpha.src != expected_src || alpha.tgt != expected_tgt {
            return Err(RuleError::Boundary(
                "cell must run from right∘top to g∘top of the given square".into(),
            ));
        }
        // Fast path: the inequality already holds before quotienting.
        if f_prime.le_pointwise(g) {
            return Ok((
                MonotoneMap::identity(f_prime.cod),
                PosTwo { src: f_prime.clone(), tgt: g.clone() },
            ));
        }
        // Quotient of the shared codomain by the added inequalities
        // f′(i) ≤ g(i); the lifting condition of the input square makes the
        // composite with the bottom an embedding again.
        let d_poset = f_prime.cod;
        let mut pre = *d_poset.rows();
        for i in 0..f_prime.dom.len() {
            pre[f_prime.apply(i)] |= 1 << g.apply(i);
        }
        transitive_closure(d_poset.len(), &mut pre);
        let (e, label) = poset_reflection(d_poset.len(), &pre);
        let d = MonotoneMap { dom: d_poset, cod: e, map: label };
        let ds = sq.bottom.then(&d);
        let vertical = Square {
            top: sq.bottom.clone(),
            left: MonotoneMap::identity(sq.bottom.dom),
            right: d.clone(),
            bottom: ds.clone(),
            cell: PosTwo { src: ds.clone(), tgt: ds },
        };
        if f_prime.then(&d).le_pointwise(&g.then(&d)) && self.square_in_sigma(&vertical) {
            let cell = PosTwo { src: f_prime.then(&d), tgt: g.then(&d) };
            return Ok((d, cell));
        }
        // The quotient construction is provably sufficient; a bounded search
        // remains as a defensive fallback so a failure here surfaces as an
        // exhausted bound instead of a wrong answer.
        for size in 0..=bound.min(ENUM_CAP) {
            for e in all_posets(size).iter() {
                for d in self.hom(&d_poset, e).iter() {
                    let ds = sq.bottom.then(d);
                    let vertical = Square {
                        top: sq.bottom.clone(),
                        left: MonotoneMap::identity(sq.bottom.dom),
                        right: d.clone(),
                        bottom: ds.clone(),
                        cell: PosTwo { src: ds.clone(), tgt: ds },
                    };
                    if f_prime.then(d).le_pointwise(&g.then(d)) && self.square_in_sigma(&vertical)
                    {
                        return Ok((d.clone(), PosTwo { src: f_prime.then(d), tgt: g.then(d) }));
                    }
                }
            }
        }
        Err(RuleError::BoundExhausted {
            context: "no equi-insertion quotient found".into(),
            bound,
        })
    }

    fn witness_equification(
        &self,
        sq: &SquareOf<Self>,
        g: &MonotoneMap,
        alpha: &PosTwo,
        beta: &PosTwo,
        _bound: usize,
    ) -> Result<MonotoneMap, RuleError> {
        if !self.square_in_sigma(sq) {
            return Err(RuleError::Precondition(
                "equification needs a Σ-square as input".into(),
            ));
        }
        let f_prime = &sq.right;
        if g.dom != f_prime.dom || g.cod != f_prime.cod {
            return Err(RuleError::Boundary(format!(
                "{g:?} is not parallel to the square's right leg {f_prime:?}"
            )));
        }
        for cell in [alpha, beta] {
            if cell.src != *f_prime || cell.tgt != *g {
                return Err(RuleError::Boundary(
                    "cells must run from the square's right leg to g".into(),
                ));
            }
        }
        // Parallel 2-cells are unique here, so the identity always equifies.
        Ok(MonotoneMap::identity(f_prime.cod))
    }

    fn canonical_square(
        &self,
        r: &MonotoneMap,
        f: &MonotoneMap,
        bound: usize,
    ) -> Result<SquareOf<Self>, RuleError> {
        let key = (r.clone(), f.clone(), bound);
        if let Some(hit) = self.caches.lock().unwrap().witnesses.get(&key) {
            return hit.clone();
        }
        let result = self.witness_square(r, f, bound);
        self.caches
            .lock()
            .unwrap()
            .witnesses
            .entry(key)
            .or_insert(result)
            .clone()
    }

    fn default_witness_bound(&self, s: &MonotoneMap, f: &MonotoneMap) -> usize {
        s.cod.len() + f.cod.len() + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::two_cat_core::comp;

    fn chain(n: usize) -> Poset {
        Poset::chain(n)
    }

    #[test]
    fn two_cells_exist_exactly_for_pointwise_order() {
        let m = PosModel::new(2);
        let c2 = chain(2);
        let bottom = MonotoneMap::new(c2, c2, vec![0, 0]).unwrap();
        let id = MonotoneMap::identity(c2);
        assert_eq!(m.two_cells(&bottom, &id).len(), 1);
        assert_eq!(m.two_cells(&id, &bottom).len(), 0);
        assert_eq!(m.two_cells(&id, &id).len(), 1);
    }

    #[test]
    fn only_identity_cells_invert() {
        let m = PosModel::new(2);
        let c2 = chain(2);
        let bottom = MonotoneMap::new(c2, c2, vec![0, 0]).unwrap();
        let id = MonotoneMap::identity(c2);
        let cell = m.two_cells(&bottom, &id).pop().unwrap();
        assert!(m.invert2(&cell).is_none());
        assert!(m.invert2(&m.id2(&id)).is_some());
    }

    #[test]
    fn sigma_is_the_class_of_embeddings() {
        let m = PosModel::new(3);
        let incl = MonotoneMap::new(chain(1), chain(2), vec![1]).unwrap();
        assert!(m.in_sigma(&incl));
        let collapse = MonotoneMap::new(chain(2), chain(1), vec![0, 0]).unwrap();
        assert!(!m.in_sigma(&collapse));
        let not_reflecting = MonotoneMap::new(Poset::discrete(2), chain(2), vec![0, 1]).unwrap();
        assert!(!m.in_sigma(&not_reflecting));
    }

    /// Pinned example: s = inclusion of {0} into chain2 at 0, f the identity
    /// on the point. A one-point W would pass the raw search conditions, but
    /// the identity normalisation takes precedence and yields W = chain2
    /// with the bottom equal to s itself.
    #[test]
    fn witness_square_identity_leg_normalisation_beats_smaller_candidates() {
        let m = PosModel::new(2);
        let s = MonotoneMap::new(chain(1), chain(2), vec![0]).unwrap();
        let f = MonotoneMap::new(chain(1), chain(1), vec![0]).unwrap();
        let sq = m.witness_square(&s, &f, m.default_witness_bound(&s, &f)).unwrap();
        assert!(m.square_in_sigma(&sq));
        assert_eq!(sq.bottom, s);
        assert_eq!(sq.right, MonotoneMap::identity(chain(2)));
    }

    /// Genuine minimal search: span out of the point into chain2 (at 0) and
    /// discrete2 (at 0). No one-point poset embeds discrete2, and W =
    /// discrete2 with the constant right leg passes the lifting condition,
    /// so the search must stop there.
    #[test]
    fn witness_square_finds_the_hand_computed_minimum() {
        let m = PosModel::new(2);
        let s = MonotoneMap::new(chain(1), chain(2), vec![0]).unwrap();
        let f = MonotoneMap::new(chain(1), Poset::discrete(2), vec![0]).unwrap();
        let sq = m.witness_square(&s, &f, m.default_witness_bound(&s, &f)).unwrap();
        assert!(m.square_in_sigma(&sq));
        assert_eq!(sq.bottom.cod, Poset::discrete(2));
        assert_eq!(sq.right.map, vec![0, 0]);
    }

    #[test]
    fn witness_square_identity_fast_paths() {
        let m = PosModel::new(3);
        let s = MonotoneMap::new(chain(1), chain(2), vec![1]).unwrap();
        let f = MonotoneMap::new(chain(1), chain(3), vec![2]).unwrap();
        // Identity left leg: the square degenerates to s on both sides even
        // though a smaller codomain would pass the raw search conditions.
        let id_a = MonotoneMap::identity(chain(1));
        let sq = m.witness_square(&s, &id_a, 9).unwrap();
        assert_eq!(sq.bottom, s);
        assert_eq!(sq.right, MonotoneMap::identity(chain(2)));
        // Identity top: the square degenerates to f.
        let sq = m.witness_square(&id_a, &f, 9).unwrap();
        assert_eq!(sq.right, f);
        assert_eq!(sq.bottom, MonotoneMap::identity(chain(3)));
    }

    /// Frozen oracle: both span legs include a point into chain2, s at 0 and
    /// f at 1. Hand check: a witness needs an embedding s′: chain2 ↪ W with
    /// f′(0) = s′(1), so |W| ≥ 2 and discrete W fails; W = chain2, s′ = id,
    /// f′ = [1,1] passes the lifting condition (every obligated pair lifts
    /// through the unique point). That candidate is therefore the first one
    /// in canonical order.
    #[test]
    fn witness_square_two_point_oracle() {
        let m = PosModel::new(2);
        let s = MonotoneMap::new(chain(1), chain(2), vec![0]).unwrap();
        let f = MonotoneMap::new(chain(1), chain(2), vec![1]).unwrap();
        let sq = m.witness_square(&s, &f, m.default_witness_bound(&s, &f)).unwrap();
        assert!(m.square_in_sigma(&sq));
        assert_eq!(sq.bottom.cod, chain(2));
        assert_eq!(sq.bottom.map, vec![0, 1]);
        assert_eq!(sq.right.map, vec![1, 1]);
    }

    #[test]
    fn amalgam_matches_search_on_small_spans() {
        let m = PosModel::new(2);
        for a in 0..=2usize {
            for b in 1..=2usize {
                for c in 1..=2usize {
                    let pa = chain(a);
                    for s in poset::embeddings(&pa, &chain(b)) {
                        for f in poset::monotone_maps(&pa, &chain(c)) {
                            let am = m.amalgam_witness(&s, &f).unwrap();
                            assert!(m.square_in_sigma(&am), "amalgam invalid for {s:?}, {f:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn equi_insertion_quotient_collapses_the_right_points() {
        let m = PosModel::new(3);
        // Square: top = bottom = inclusion of {0} at 0 into discrete2,
        // left = id. Right leg id, g swaps nothing but maps 0 ↦ 1: force
        // d(0) ≤ d(1).
        let d2 = Poset::discrete(2);
        let s = MonotoneMap::new(chain(1), d2, vec![0]).unwrap();
        let sq = Square {
            top: s.clone(),
            left: MonotoneMap::identity(chain(1)),
            right: MonotoneMap::identity(d2),
            bottom: s.clone(),
            cell: PosTwo { src: s.clone(), tgt: s.clone() },
        };
        assert!(m.square_in_sigma(&sq));
        let g = MonotoneMap::new(d2, d2, vec![0, 1]).unwrap(); // identity: trivial case
        let alpha = PosTwo { src: s.clone(), tgt: s.clone() };
        let (d, cell) = m.witness_equi_insertion(&sq, &g, &alpha, 5).unwrap();
        assert!(d.is_identity());
        assert_eq!(cell.src, cell.tgt);
    }

    #[test]
    fn equi_insertion_adds_an_inequality() {
        let m = PosModel::new(3);
        // top/bottom: {0} ↪ discrete2 at 0; right f′ = id, g = const 1 —
        // wait, g must be monotone discrete2 → discrete2 with f′(0)=0 vs
        // g(0)=1 incomparable, and α: f′∘top ⇒ g∘top must exist:
        // f′(top(*)) = 0, g(top(*)) = 1 are incomparable in discrete2, so no
        // α exists on the nose. Use instead g with g(0)=0, g(1)=0: then
        // α: f′∘top ⇒ g∘top is the identity at 0 and the quotient must make
        // d(1) ≤ d(0).
        let d2 = Poset::discrete(2);
        let s = MonotoneMap::new(chain(1), d2, vec![0]).unwrap();
        let sq = Square {
            top: s.clone(),
            left: MonotoneMap::identity(chain(1)),
            right: MonotoneMap::identity(d2),
            bottom: s.clone(),
            cell: PosTwo { src: s.clone(), tgt: s.clone() },
        };
        let g = MonotoneMap::new(d2, d2, vec![0, 0]).unwrap();
        let alpha = PosTwo { src: s.clone(), tgt: s.clone() };
        let (d, cell) = m.witness_equi_insertion(&sq, &g, &alpha, 5).unwrap();
        // d must merge or order 1 below 0; the quotient orders it: 1 ≤ 0.
        assert!(d.cod.le(d.apply(1), d.apply(0)));
        assert_eq!(cell.src, MonotoneMap::identity(d2).then(&d));
        // The composite with the bottom stays an embedding.
        assert!(s.then(&d).is_embedding());
    }

    #[test]
    fn square_membership_oracle_examples() {
        let c2 = chain(2);
        let point_at = |k: u8| MonotoneMap::new(chain(1), c2, vec![k]).unwrap();
        // Identity-sided square on the inclusion at 0: in Σ.
        let m0 = point_at(0);
        let sq = Square {
            top: m0.clone(),
            left: MonotoneMap::identity(chain(1)),
            right: MonotoneMap::identity(c2),
            bottom: m0.clone(),
            cell: PosTwo { src: m0.clone(), tgt: m0.clone() },
        };
        assert_eq!(pos_square_in_sigma(&sq), Ok(true));
        // Inclusion at 1 against the identity on chain2: the pair
        // (y, z) = (0, 0) has bottom(0) = 0 ≤ right(0) = 0 but the only lift
        // has top(x) = 1 ≰ 0.
        let m1 = point_at(1);
        let sq = Square {
            top: m1.clone(),
            left: m1.clone(),
            right: MonotoneMap::identity(c2),
            bottom: MonotoneMap::identity(c2),
            cell: PosTwo { src: m1.clone(), tgt: m1.clone() },
        };
        assert_eq!(pos_square_in_sigma(&sq), Ok(false));
        // Non-commuting candidate: inclusion at 0 on top of inclusion at 1.
        let bad = Square {
            top: m0.clone(),
            left: MonotoneMap::identity(chain(1)),
            right: MonotoneMap::identity(c2),
            bottom: m1.clone(),
            cell: PosTwo { src: m1.clone(), tgt: m1 },
        };
        assert!(pos_square_in_sigma(&bad).is_err());
    }

    #[test]
    fn lifting_condition_formulations_agree_on_small_squares() {
        // Exhaustive agreement check over commuting embedding squares with
        // all four objects chains or antichains of ≤ 2 elements (the broader
        // randomized agreement property lives in the integration suite).
        let objs = [chain(1), chain(2), Poset::discrete(2)];
        for x in objs {
            for y in objs {
                for z in objs {
                    for w in objs {
                        for top in poset::embeddings(&x, &y) {
                            for bottom in poset::embeddings(&z, &w) {
                                for left in poset::monotone_maps(&x, &z) {
                                    for right in poset::monotone_maps(&y, &w) {
                                        if left.then(&bottom) != top.then(&right) {
                                            continue;
                                        }
                                        assert_eq!(
                                            lifting_condition(&top, &left, &right, &bottom),
                                            lifting_condition_lowersets(
                                                &top, &left, &right, &bottom
                                            ),
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn interchange_holds_on_sampled_cells() {
        // Middle-four interchange for whiskers: (g∘β)·(α∘f) = (α∘f′)·(g′∘β)
        // pattern is covered more generally in the calculus tests; here we
        // pin the basic functoriality of whiskering.
        let m = PosModel::new(2);
        let c2 = chain(2);
        let bottom = MonotoneMap::new(c2, c2, vec![0, 0]).unwrap();
        let id = MonotoneMap::identity(c2);
        let alpha = PosTwo { src: bottom.clone(), tgt: id.clone() };
        let post = m.whisker_post(&bottom, &alpha).unwrap();
        assert_eq!(post.src, bottom.then(&bottom));
        assert_eq!(post.tgt, id.then(&bottom));
        let pre = m.whisker_pre(&alpha, &bottom).unwrap();
        assert_eq!(pre.src, bottom.then(&bottom));
        assert_eq!(pre.tgt, bottom.then(&id));
    }

    #[test]
    fn canonical_square_is_memoized_and_deterministic() {
        let m = PosModel::new(2);
        let s = MonotoneMap::new(chain(1), chain(2), vec![0]).unwrap();
        let f = MonotoneMap::new(chain(1), chain(2), vec![1]).unwrap();
        let b = m.default_witness_bound(&s, &f);
        let first = m.canonical_square(&s, &f, b).unwrap();
        let second = m.canonical_square(&s, &f, b).unwrap();
        assert_eq!(first, second);
        assert_eq!(first, m.witness_square(&s, &f, b).unwrap());
    }

    #[test]
    fn composition_helpers_respect_boundaries() {
        let m = PosModel::new(2);
        let s = MonotoneMap::new(chain(1), chain(2), vec![0]).unwrap();
        let t = MonotoneMap::new(chain(2), chain(2), vec![0, 1]).unwrap();
        assert_eq!(comp(&m, &t, &s), s.then(&t));
        assert!(m.comp1(&s, &t).is_err());
    }
}
