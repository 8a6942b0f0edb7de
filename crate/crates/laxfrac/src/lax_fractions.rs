//! The bicategory of lax fractions: Σ-cospans as 1-cells, 2-morphisms with
//! their certifying squares, the common-extension equivalence ≈, vertical
//! composition through the common-extension rule, and bounded hom-category
//! enumeration.
//!
//! A Σ-cospan from `A` to `B` is `A —left→ I ←right— B` with `right` a
//! Σ-arrow. A 2-morphism `(α, x₁, x₂, x₃, δ₁, δ₂): (f, r) ⇒ (g, s)` carries
//! a middle leg `x₃: B → X` in Σ, certifying squares
//! `(1, x₁, δ₁): r → x₃` and `(1, x₂, δ₂): s → x₃`, and a comparison cell
//! `α: x₁∘f ⇒ x₂∘g` (not required invertible). Two parallel 2-morphisms are
//! ≈-related when they admit a common Σ-extension; 2-cells of the fraction
//! bicategory are ≈-classes.

use std::cell::RefCell;
use std::collections::BTreeMap;

use crate::models::fincat::TrivialModel;
use crate::models::pos_model::PosModel;
use crate::models::poset::{Poset, MAX_ELEMS};
use crate::omega_paths::{
    omega_of_path, whisker_two_morphism, OmegaError, PlacedSquare, SigmaPath, SigmaScheme,
    SigmaStep, StepType,
};
use crate::sigma_calculus::{
    paste_vertical, rule4, rule6_insert, validate_square, Rule4Bundle, Rule6Output,
};
use crate::two_cat_core::{comp, vcomp, wpost, wpre, RuleError, Square, SquareOf, TwoCatModel};

/// A Σ-cospan `source —left→ apex ←right— target` with `right ∈ Σ`.
pub struct SigmaCospan<M: TwoCatModel> {
    pub left: M::One,
    pub right: M::One,
}

// Manual impls: the derives would demand the bounds on `M` itself rather
// than on the cell types the fields actually hold.
impl<M: TwoCatModel> Clone for SigmaCospan<M> {
    fn clone(&self) -> Self {
        SigmaCospan { left: self.left.clone(), right: self.right.clone() }
    }
}

impl<M: TwoCatModel> std::fmt::Debug for SigmaCospan<M> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SigmaCospan")
            .field("left", &self.left)
            .field("right", &self.right)
            .finish()
    }
}

impl<M: TwoCatModel> PartialEq for SigmaCospan<M> {
    fn eq(&self, other: &Self) -> bool {
        self.left == other.left && self.right == other.right
    }
}

impl<M: TwoCatModel> Eq for SigmaCospan<M> {}

impl<M: TwoCatModel> PartialOrd for SigmaCospan<M> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<M: TwoCatModel> Ord for SigmaCospan<M> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.left, &self.right).cmp(&(&other.left, &other.right))
    }
}

impl<M: TwoCatModel> SigmaCospan<M> {
    pub fn new(m: &M, left: M::One, right: M::One) -> Result<Self, RuleError> {
        if m.cod(&left) != m.cod(&right) {
            return Err(RuleError::Boundary("cospan legs must share their codomain".into()));
        }
        if !m.in_sigma(&right) {
            return Err(RuleError::Precondition("right leg must be a Σ-arrow".into()));
        }
        Ok(SigmaCospan { left, right })
    }

    /// The identity cospan `(1_A, 1_A)`.
    pub fn identity(m: &M, a: &M::Obj) -> Result<Self, RuleError> {
        let id = m.id1(a);
        SigmaCospan::new(m, id.clone(), id)
    }

    pub fn source(&self, m: &M) -> M::Obj {
        m.dom(&self.left)
    }

    pub fn target(&self, m: &M) -> M::Obj {
        m.dom(&self.right)
    }

    pub fn apex(&self, m: &M) -> M::Obj {
        m.cod(&self.left)
    }

    pub fn is_identity(&self, m: &M) -> bool {
        self.left == self.right && self.left == m.id1(&self.source(m))
    }
}

/// A 2-morphism between parallel Σ-cospans; see the module doc for the
/// shape of the data.
pub struct TwoMorphism<M: TwoCatModel> {
    pub src: SigmaCospan<M>,
    pub tgt: SigmaCospan<M>,
    pub alpha: M::Two,
    pub x1: M::One,
    pub x2: M::One,
    pub x3: M::One,
    pub delta1: M::Two,
    pub delta2: M::Two,
}

impl<M: TwoCatModel> TwoMorphism<M> {
    fn as_tuple(
        &self,
    ) -> (&SigmaCospan<M>, &SigmaCospan<M>, &M::Two, &M::One, &M::One, &M::One, &M::Two, &M::Two)
    {
        (
            &self.src,
            &self.tgt,
            &self.alpha,
            &self.x1,
            &self.x2,
            &self.x3,
            &self.delta1,
            &self.delta2,
        )
    }
}

impl<M: TwoCatModel> Clone for TwoMorphism<M> {
    fn clone(&self) -> Self {
        TwoMorphism {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            alpha: self.alpha.clone(),
            x1: self.x1.clone(),
            x2: self.x2.clone(),
            x3: self.x3.clone(),
            delta1: self.delta1.clone(),
            delta2: self.delta2.clone(),
        }
    }
}

impl<M: TwoCatModel> std::fmt::Debug for TwoMorphism<M> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TwoMorphism")
            .field("src", &self.src)
            .field("tgt", &self.tgt)
            .field("alpha", &self.alpha)
            .field("x1", &self.x1)
            .field("x2", &self.x2)
            .field("x3", &self.x3)
            .field("delta1", &self.delta1)
            .field("delta2", &self.delta2)
            .finish()
    }
}

impl<M: TwoCatModel> PartialEq for TwoMorphism<M> {
    fn eq(&self, other: &Self) -> bool {
        self.as_tuple() == other.as_tuple()
    }
}

impl<M: TwoCatModel> Eq for TwoMorphism<M> {}

impl<M: TwoCatModel> PartialOrd for TwoMorphism<M> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<M: TwoCatModel> Ord for TwoMorphism<M> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.as_tuple().cmp(&other.as_tuple())
    }
}

impl<M: TwoCatModel> TwoMorphism<M> {
    /// The certifying square `(1, x₁, δ₁): src.right → x₃`.
    pub fn square1(&self, m: &M) -> SquareOf<M> {
        Square {
            top: self.src.right.clone(),
            left: m.id1(&m.dom(&self.src.right)),
            right: self.x1.clone(),
            bottom: self.x3.clone(),
            cell: self.delta1.clone(),
        }
    }

    /// The certifying square `(1, x₂, δ₂): tgt.right → x₃`.
    pub fn square2(&self, m: &M) -> SquareOf<M> {
        Square {
            top: self.tgt.right.clone(),
            left: m.id1(&m.dom(&self.tgt.right)),
            right: self.x2.clone(),
            bottom: self.x3.clone(),
            cell: self.delta2.clone(),
        }
    }
}

/// The identity 2-morphism `(id_f, 1_I, 1_I, r, id, id)` on a cospan.
pub fn identity_two_morphism<M: TwoCatModel>(m: &M, c: &SigmaCospan<M>) -> TwoMorphism<M> {
    let apex_id = m.id1(&m.cod(&c.left));
    TwoMorphism {
        src: c.clone(),
        tgt: c.clone(),
        alpha: m.id2(&c.left),
        x1: apex_id.clone(),
        x2: apex_id,
        x3: c.right.clone(),
        delta1: m.id2(&c.right),
        delta2: m.id2(&c.right),
    }
}

/// Checks every invariant of a 2-morphism; returns the first failure.
pub fn validate_two_morphism<M: TwoCatModel>(m: &M, tm: &TwoMorphism<M>) -> Result<(), String> {
    if m.cod(&tm.src.left) != m.cod(&tm.src.right) || !m.in_sigma(&tm.src.right) {
        return Err("source cospan invalid".into());
    }
    if m.cod(&tm.tgt.left) != m.cod(&tm.tgt.right) || !m.in_sigma(&tm.tgt.right) {
        return Err("target cospan invalid".into());
    }
    if m.dom(&tm.src.left) != m.dom(&tm.tgt.left) || m.dom(&tm.src.right) != m.dom(&tm.tgt.right)
    {
        return Err("source and target cospans are not parallel".into());
    }
    let c1 = validate_square(m, &tm.square1(m));
    if !c1.ok {
        return Err(format!("first certifying square invalid: {}", c1.diagnosis.unwrap_or_default()));
    }
    let c2 = validate_square(m, &tm.square2(m));
    if !c2.ok {
        return Err(format!(
            "second certifying square invalid: {}",
            c2.diagnosis.unwrap_or_default()
        ));
    }
    let lhs = comp(m, &tm.x1, &tm.src.left);
    let rhs = comp(m, &tm.x2, &tm.tgt.left);
    if m.src2(&tm.alpha) != lhs || m.tgt2(&tm.alpha) != rhs {
        return Err("comparison cell does not run x₁∘f ⇒ x₂∘g".into());
    }
    Ok(())
}

/// Extension data for [`sigma_extend`]: a Σ-square `(1, d_x, ψ): x₃ → d`
/// plus invertible reshapings of the extended legs.
pub struct SigmaExtension<M: TwoCatModel> {
    pub square: SquareOf<M>,
    pub theta1: M::Two,
    pub theta2: M::Two,
}

impl<M: TwoCatModel> Clone for SigmaExtension<M> {
    fn clone(&self) -> Self {
        SigmaExtension {
            square: self.square.clone(),
            theta1: self.theta1.clone(),
            theta2: self.theta2.clone(),
        }
    }
}

impl<M: TwoCatModel> std::fmt::Debug for SigmaExtension<M> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SigmaExtension")
            .field("square", &self.square)
            .field("theta1", &self.theta1)
            .field("theta2", &self.theta2)
            .finish()
    }
}

impl<M: TwoCatModel> SigmaExtension<M> {
    /// Plain extension along a square, with identity reshapings.
    pub fn along(m: &M, tm: &TwoMorphism<M>, square: SquareOf<M>) -> SigmaExtension<M> {
        let dx = square.right.clone();
        SigmaExtension {
            square,
            theta1: m.id2(&comp(m, &dx, &tm.x1)),
            theta2: m.id2(&comp(m, &dx, &tm.x2)),
        }
    }
}

/// Builds the Σ-extension of `tm` along `ext`, replacing the middle leg by
/// the square's bottom and the comparison cell by
/// `(θ₂∘g)·(d_x∘α)·(θ₁⁻¹∘f)`.
pub fn sigma_extend<M: TwoCatModel>(
    m: &M,
    tm: &TwoMorphism<M>,
    ext: &SigmaExtension<M>,
) -> Result<TwoMorphism<M>, RuleError> {
    validate_two_morphism(m, tm).map_err(RuleError::Precondition)?;
    let sq = &ext.square;
    if sq.top != tm.x3 || sq.left != m.id1(&m.dom(&sq.left)) {
        return Err(RuleError::Precondition(
            "extension square must run from the middle leg with identity left edge".into(),
        ));
    }
    let check = validate_square(m, sq);
    if !check.ok {
        return Err(RuleError::Precondition(format!(
            "extension square invalid: {}",
            check.diagnosis.unwrap_or_default()
        )));
    }
    let dx = &sq.right;
    let dxx1 = comp(m, dx, &tm.x1);
    let dxx2 = comp(m, dx, &tm.x2);
    if m.src2(&ext.theta1) != dxx1 || m.src2(&ext.theta2) != dxx2 {
        return Err(RuleError::Boundary("reshaping cells must start at d_x∘xᵢ".into()));
    }
    let theta1_inv = m
        .invert2(&ext.theta1)
        .ok_or_else(|| RuleError::Precondition("θ₁ must be invertible".into()))?;
    if !m.is_invertible2(&ext.theta2) {
        return Err(RuleError::Precondition("θ₂ must be invertible".into()));
    }
    let z1 = m.tgt2(&ext.theta1);
    let z2 = m.tgt2(&ext.theta2);
    let f = &tm.src.left;
    let g = &tm.tgt.left;
    let r = &tm.src.right;
    let s = &tm.tgt.right;
    let alpha = vcomp(
        m,
        &wpre(m, &ext.theta2, g),
        &vcomp(m, &wpost(m, dx, &tm.alpha), &wpre(m, &theta1_inv, f)),
    );
    let delta1 = vcomp(
        m,
        &wpre(m, &ext.theta1, r),
        &vcomp(m, &wpost(m, dx, &tm.delta1), &sq.cell),
    );
    let delta2 = vcomp(
        m,
        &wpre(m, &ext.theta2, s),
        &vcomp(m, &wpost(m, dx, &tm.delta2), &sq.cell),
    );
    let out = TwoMorphism {
        src: tm.src.clone(),
        tgt: tm.tgt.clone(),
        alpha,
        x1: z1,
        x2: z2,
        x3: sq.bottom.clone(),
        delta1,
        delta2,
    };
    validate_two_morphism(m, &out).map_err(RuleError::Unsupported)?;
    Ok(out)
}

/// Three-valued answer of the ≈-decision.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum EquivVerdict {
    Equivalent,
    NotEquivalent,
    /// The search space was truncated at the stated extension-size bound
    /// without certainty either way.
    Undetermined { bound: usize },
}

impl EquivVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivVerdict::Equivalent)
    }
}

/// Models whose fraction bicategory this module can build. The provided
/// ≈-decision is a bounded generic search; models with sharper decision
/// procedures override it.
pub trait FractionModel: TwoCatModel + Sized {
    /// Size of an object, used to interpret extension/apex bounds. Models
    /// without a size notion live at size 1.
    fn object_size(&self, _o: &Self::Obj) -> usize {
        1
    }

    /// Decides whether two parallel, valid 2-morphisms have a common
    /// Σ-extension with extension object of size ≤ `bound`.
    fn are_equivalent(
        &self,
        a: &TwoMorphism<Self>,
        b: &TwoMorphism<Self>,
        bound: usize,
    ) -> EquivVerdict {
        generic_equiv_search(self, a, b, bound)
    }
}

/// Exhaustive search for common-extension data over the model's enumerated
/// objects of size ≤ `bound`: extension legs, their squares, and the two
/// comparison cells, checking the three pasting equations. Sound for every
/// model; complete exactly when the model's searches are.
pub fn generic_equiv_search<M: FractionModel>(
    m: &M,
    a: &TwoMorphism<M>,
    b: &TwoMorphism<M>,
    bound: usize,
) -> EquivVerdict {
    let f = &a.src.left;
    let g = &a.tgt.left;
    let r = &a.src.right;
    let s = &a.tgt.right;
    let b_obj = m.dom(r);
    let x_obj = m.cod(&a.x3);
    let y_obj = m.cod(&b.x3);
    let mut truncated = false;
    for d_obj in m.objects() {
        if m.object_size(&d_obj) > bound {
            truncated = true;
            continue;
        }
        for d in m.one_cells(&b_obj, &d_obj) {
            if !m.in_sigma(&d) {
                continue;
            }
            for d_x in m.one_cells(&x_obj, &d_obj) {
                let dxx3 = comp(m, &d_x, &a.x3);
                let chis: Vec<M::Two> = m
                    .two_cells(&d, &dxx3)
                    .into_iter()
                    .filter(|c| m.is_invertible2(c))
                    .collect();
                if chis.is_empty() {
                    continue;
                }
                for d_y in m.one_cells(&y_obj, &d_obj) {
                    let dyy3 = comp(m, &d_y, &b.x3);
                    for chi in &chis {
                        let sq_chi = Square {
                            top: a.x3.clone(),
                            left: m.id1(&b_obj),
                            right: d_x.clone(),
                            bottom: d.clone(),
                            cell: chi.clone(),
                        };
                        if !validate_square(m, &sq_chi).ok {
                            continue;
                        }
                        for psi in m.two_cells(&d, &dyy3) {
                            if !m.is_invertible2(&psi) {
                                continue;
                            }
                            let sq_psi = Square {
                                top: b.x3.clone(),
                                left: m.id1(&b_obj),
                                right: d_y.clone(),
                                bottom: d.clone(),
                                cell: psi.clone(),
                            };
                            if !validate_square(m, &sq_psi).ok {
                                continue;
                            }
                            let dx1 = comp(m, &d_x, &a.x1);
                            let dy1 = comp(m, &d_y, &b.x1);
                            let dx2 = comp(m, &d_x, &a.x2);
                            let dy2 = comp(m, &d_y, &b.x2);
                            for g1 in m.two_cells(&dx1, &dy1) {
                                if !m.is_invertible2(&g1) {
                                    continue;
                                }
                                let eq1 = m.eq2(
                                    &vcomp(
                                        m,
                                        &wpre(m, &g1, r),
                                        &vcomp(m, &wpost(m, &d_x, &a.delta1), chi),
                                    ),
                                    &vcomp(m, &wpost(m, &d_y, &b.delta1), &psi),
                                );
                                if !eq1 {
                                    continue;
                                }
                                for g2 in m.two_cells(&dx2, &dy2) {
                                    if !m.is_invertible2(&g2) {
                                        continue;
                                    }
                                    let eq2 = m.eq2(
                                        &vcomp(
                                            m,
                                            &wpre(m, &g2, s),
                                            &vcomp(m, &wpost(m, &d_x, &a.delta2), chi),
                                        ),
                                        &vcomp(m, &wpost(m, &d_y, &b.delta2), &psi),
                                    );
                                    if !eq2 {
                                        continue;
                                    }
                                    let eq3 = m.eq2(
                                        &vcomp(
                                            m,
                                            &wpre(m, &g2, g),
                                            &wpost(m, &d_x, &a.alpha),
                                        ),
                                        &vcomp(
                                            m,
                                            &wpost(m, &d_y, &b.alpha),
                                            &wpre(m, &g1, f),
                                        ),
                                    );
                                    if eq3 {
                                        return EquivVerdict::Equivalent;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if m.searches_complete() && !truncated {
        EquivVerdict::NotEquivalent
    } else {
        EquivVerdict::Undetermined { bound }
    }
}

impl FractionModel for TrivialModel {}

impl FractionModel for PosModel {
    fn object_size(&self, o: &Poset) -> usize {
        o.len()
    }

    /// Exact decision through the canonical amalgam: glue the two middle
    /// objects along the shared leg images, take the preorder it generates,
    /// and check the embedding and lifting conditions there. Any common
    /// extension factors through this quotient and the conditions pull back
    /// along the factorization, so the canonical candidate succeeds iff any
    /// witness exists; the verdict is never `Undetermined`.
    fn are_equivalent(
        &self,
        a: &TwoMorphism<Self>,
        b: &TwoMorphism<Self>,
        _bound: usize,
    ) -> EquivVerdict {
        if pos_amalgam(a, b).decides_equivalent() {
            EquivVerdict::Equivalent
        } else {
            EquivVerdict::NotEquivalent
        }
    }
}

/// The canonical gluing of the two middle posets of a parallel 2-morphism
/// pair: a preorder on the disjoint union of `X` and `Y` (indices of `Y`
/// shifted by `|X|`) generated by both orders plus the identifications
/// forced by any common extension.
struct PosAmalgam<'t> {
    a: &'t TwoMorphism<PosModel>,
    b: &'t TwoMorphism<PosModel>,
    nx: usize,
    n: usize,
    rows: Vec<u32>,
}

fn pos_amalgam<'t>(a: &'t TwoMorphism<PosModel>, b: &'t TwoMorphism<PosModel>) -> PosAmalgam<'t> {
    let x = &a.x3.cod;
    let y = &b.x3.cod;
    let nx = x.len();
    let n = nx + y.len();
    debug_assert!(n <= 32);
    let mut rows = vec![0u32; n];
    for (i, row) in rows.iter_mut().enumerate() {
        if i < nx {
            for j in 0..nx {
                if x.le(i, j) {
                    *row |= 1 << j;
                }
            }
        } else {
            for j in 0..(n - nx) {
                if y.le(i - nx, j) {
                    *row |= 1 << (nx + j);
                }
            }
        }
    }
    let mut glue = |u: usize, v: usize| {
        rows[u] |= 1 << v;
        rows[v] |= 1 << u;
    };
    for bi in 0..a.x3.dom.len() {
        glue(a.x3.map[bi] as usize, nx + b.x3.map[bi] as usize);
    }
    for i in 0..a.x1.dom.len() {
        glue(a.x1.map[i] as usize, nx + b.x1.map[i] as usize);
    }
    for j in 0..a.x2.dom.len() {
        glue(a.x2.map[j] as usize, nx + b.x2.map[j] as usize);
    }
    // Transitive closure.
    for k in 0..n {
        for i in 0..n {
            if rows[i] >> k & 1 == 1 {
                rows[i] |= rows[k];
            }
        }
    }
    PosAmalgam { a, b, nx, n, rows }
}

impl PosAmalgam<'_> {
    fn le(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    /// The three conditions every common extension must satisfy, evaluated
    /// on the canonical candidate: the glued bottom leg is an embedding and
    /// both extension squares satisfy the lifting condition.
    fn decides_equivalent(&self) -> bool {
        let bp = &self.a.x3.dom;
        let xp = &self.a.x3.cod;
        let yp = &self.b.x3.cod;
        let d_of = |bi: usize| self.a.x3.map[bi] as usize;
        // Embedding: order-reflecting (injectivity on classes follows).
        for b1 in 0..bp.len() {
            for b2 in 0..bp.len() {
                if self.le(d_of(b1), d_of(b2)) && !bp.le(b1, b2) {
                    return false;
                }
            }
        }
        // Lifting of (1, d_x, id): x₃ → d.
        for yv in 0..xp.len() {
            for bi in 0..bp.len() {
                if self.le(d_of(bi), yv) {
                    let ok = (0..bp.len()).any(|b2| {
                        bp.le(bi, b2) && xp.le(self.a.x3.map[b2] as usize, yv)
                    });
                    if !ok {
                        return false;
                    }
                }
            }
        }
        // Lifting of (1, d_y, id): y₃ → d.
        for yv in 0..yp.len() {
            for bi in 0..bp.len() {
                if self.le(d_of(bi), self.nx + yv) {
                    let ok = (0..bp.len()).any(|b2| {
                        bp.le(bi, b2) && yp.le(self.b.x3.map[b2] as usize, yv)
                    });
                    if !ok {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Materializes the canonical extension as a poset with the two
    /// quotient maps, when it fits the object encoding.
    fn witness(&self) -> Option<(Poset, Vec<u8>, Vec<u8>)> {
        let mut leader = vec![0usize; self.n];
        let mut leaders: Vec<usize> = Vec::new();
        for u in 0..self.n {
            let l = (0..self.n).find(|&v| self.le(u, v) && self.le(v, u)).unwrap();
            leader[u] = l;
            if l == u {
                leaders.push(u);
            }
        }
        if leaders.len() > MAX_ELEMS {
            return None;
        }
        let class_of = |u: usize| leaders.iter().position(|&l| l == leader[u]).unwrap() as u8;
        let mut rows16 = [0u16; MAX_ELEMS];
        for (ci, &u) in leaders.iter().enumerate() {
            for (cj, &v) in leaders.iter().enumerate() {
                if self.le(u, v) {
                    rows16[ci] |= 1 << cj;
                }
            }
        }
        let d_poset = Poset::from_rows(leaders.len(), rows16);
        let dx = (0..self.nx).map(class_of).collect();
        let dy = (self.nx..self.n).map(class_of).collect();
        Some((d_poset, dx, dy))
    }
}

/// Materialized canonical extension for cross-validation: the quotient
/// poset and the two extension maps, or `None` when the pair is not
/// equivalent or the quotient exceeds the object encoding.
pub fn pos_equiv_witness(
    a: &TwoMorphism<PosModel>,
    b: &TwoMorphism<PosModel>,
) -> Option<(Poset, Vec<u8>, Vec<u8>)> {
    let am = pos_amalgam(a, b);
    if am.decides_equivalent() {
        am.witness()
    } else {
        None
    }
}

/// A ≈-class, held by a representative plus the bound its comparisons use.
pub struct TwoCellClass<M: FractionModel> {
    pub rep: TwoMorphism<M>,
    pub bound: usize,
}

impl<M: FractionModel> Clone for TwoCellClass<M> {
    fn clone(&self) -> Self {
        TwoCellClass { rep: self.rep.clone(), bound: self.bound }
    }
}

impl<M: FractionModel> std::fmt::Debug for TwoCellClass<M> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TwoCellClass")
            .field("rep", &self.rep)
            .field("bound", &self.bound)
            .finish()
    }
}

/// Evaluation context: the model, the witness bound for rule applications,
/// the extension bound for ≈-decisions, and the memo table for
/// common-extension bundles.
pub struct Engine<'m, M: FractionModel> {
    pub model: &'m M,
    pub witness_bound: Option<usize>,
    pub ext_bound: usize,
    rule4_memo: RefCell<BTreeMap<(SquareOf<M>, SquareOf<M>), Rule4Bundle<M>>>,
    rule6_memo: RefCell<BTreeMap<(M::One, M::One, M::One, M::Two), Rule6Output<M>>>,
}

impl<'m, M: FractionModel> Engine<'m, M> {
    pub fn new(model: &'m M, witness_bound: Option<usize>, ext_bound: usize) -> Self {
        Engine {
            model,
            witness_bound,
            ext_bound,
            rule4_memo: RefCell::new(BTreeMap::new()),
            rule6_memo: RefCell::new(BTreeMap::new()),
        }
    }

    /// Memoized single-pair common-extension bundle.
    pub fn rule4_pair(
        &self,
        qx: &SquareOf<M>,
        qy: &SquareOf<M>,
    ) -> Result<Rule4Bundle<M>, RuleError> {
        let key = (qx.clone(), qy.clone());
        if let Some(hit) = self.rule4_memo.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let bundle = rule4(self.model, &[(qx.clone(), qy.clone())], self.witness_bound)?;
        self.rule4_memo.borrow_mut().insert(key, bundle.clone());
        Ok(bundle)
    }

    /// ≈ with the engine's bound, after checking the boundary precondition.
    pub fn equivalent(
        &self,
        a: &TwoMorphism<M>,
        b: &TwoMorphism<M>,
    ) -> Result<EquivVerdict, RuleError> {
        let m = self.model;
        validate_two_morphism(m, a).map_err(RuleError::Precondition)?;
        validate_two_morphism(m, b).map_err(RuleError::Precondition)?;
        if a.src != b.src || a.tgt != b.tgt {
            return Err(RuleError::Boundary(
                "≈ compares 2-morphisms with equal source and target cospans".into(),
            ));
        }
        Ok(m.are_equivalent(a, b, self.ext_bound))
    }

    /// Composite of two cospans through the canonical completion of the
    /// middle span. Strictly unital: composing with an identity cospan on
    /// either side returns the other operand unchanged.
    pub fn compose_cospans(
        &self,
        g_bar: &SigmaCospan<M>,
        f_bar: &SigmaCospan<M>,
    ) -> Result<SigmaCospan<M>, RuleError> {
        let m = self.model;
        if f_bar.target(m) != g_bar.source(m) {
            return Err(RuleError::Boundary("cospans do not chain".into()));
        }
        let bound = self
            .witness_bound
            .unwrap_or_else(|| m.default_witness_bound(&f_bar.right, &g_bar.left));
        let sq = m.canonical_square(&f_bar.right, &g_bar.left, bound)?;
        let check = validate_square(m, &sq);
        if !check.ok {
            return Err(RuleError::Unsupported(format!(
                "canonical completion invalid: {}",
                check.diagnosis.unwrap_or_default()
            )));
        }
        SigmaCospan::new(m, comp(m, &sq.right, &f_bar.left), comp(m, &sq.bottom, &g_bar.right))
    }

    /// Vertical composite of 2-morphisms (`beta` after `alpha`), built from
    /// the common-extension bundle of the two squares meeting at the shared
    /// cospan.
    pub fn vcompose(
        &self,
        beta: &TwoMorphism<M>,
        alpha: &TwoMorphism<M>,
    ) -> Result<TwoMorphism<M>, RuleError> {
        let m = self.model;
        validate_two_morphism(m, alpha).map_err(RuleError::Precondition)?;
        validate_two_morphism(m, beta).map_err(RuleError::Precondition)?;
        if alpha.tgt != beta.src {
            return Err(RuleError::Boundary(
                "target cospan of the first must equal source cospan of the second".into(),
            ));
        }
        let bundle = self.rule4_pair(&alpha.square2(m), &beta.square1(m))?;
        let sq1 = paste_vertical(m, &bundle.square_x, &alpha.square1(m))?;
        let sq2 = paste_vertical(m, &bundle.square_y, &beta.square2(m))?;
        let gamma = &bundle.gammas[0];
        let g = &alpha.tgt.left;
        let cell = vcomp(
            m,
            &wpost(m, &bundle.d_y, &beta.alpha),
            &vcomp(m, &wpre(m, gamma, g), &wpost(m, &bundle.d_x, &alpha.alpha)),
        );
        let out = TwoMorphism {
            src: alpha.src.clone(),
            tgt: beta.tgt.clone(),
            alpha: cell,
            x1: sq1.right.clone(),
            x2: sq2.right.clone(),
            x3: bundle.bottom.clone(),
            delta1: sq1.cell,
            delta2: sq2.cell,
        };
        validate_two_morphism(m, &out).map_err(RuleError::Unsupported)?;
        Ok(out)
    }

    /// Class-level vertical composition.
    pub fn vcompose_classes(
        &self,
        beta: &TwoCellClass<M>,
        alpha: &TwoCellClass<M>,
    ) -> Result<TwoCellClass<M>, RuleError> {
        let rep = self.vcompose(&beta.rep, &alpha.rep)?;
        Ok(TwoCellClass { rep, bound: self.ext_bound })
    }

    /// The identity 2-cell class on a cospan.
    pub fn identity_two_cell(&self, c: &SigmaCospan<M>) -> TwoCellClass<M> {
        TwoCellClass { rep: identity_two_morphism(self.model, c), bound: self.ext_bound }
    }

    /// All valid 2-morphisms between two parallel cospans whose middle
    /// object has size ≤ `ext_bound`, in canonical enumeration order.
    pub fn two_morphisms_between(
        &self,
        src: &SigmaCospan<M>,
        tgt: &SigmaCospan<M>,
        ext_bound: usize,
    ) -> Vec<TwoMorphism<M>> {
        let m = self.model;
        let mut out = Vec::new();
        let b_obj = src.target(m);
        let i_obj = src.apex(m);
        let j_obj = tgt.apex(m);
        for x_obj in m.objects() {
            if m.object_size(&x_obj) > ext_bound {
                continue;
            }
            for x3 in m.one_cells(&b_obj, &x_obj) {
                if !m.in_sigma(&x3) {
                    continue;
                }
                for x1 in m.one_cells(&i_obj, &x_obj) {
                    let x1r = comp(m, &x1, &src.right);
                    for delta1 in m.two_cells(&x3, &x1r) {
                        let sq1 = Square {
                            top: src.right.clone(),
                            left: m.id1(&b_obj),
                            right: x1.clone(),
                            bottom: x3.clone(),
                            cell: delta1.clone(),
                        };
                        if !validate_square(m, &sq1).ok {
                            continue;
                        }
                        for x2 in m.one_cells(&j_obj, &x_obj) {
                            let x2s = comp(m, &x2, &tgt.right);
                            for delta2 in m.two_cells(&x3, &x2s) {
                                let sq2 = Square {
                                    top: tgt.right.clone(),
                                    left: m.id1(&b_obj),
                                    right: x2.clone(),
                                    bottom: x3.clone(),
                                    cell: delta2.clone(),
                                };
                                if !validate_square(m, &sq2).ok {
                                    continue;
                                }
                                let from = comp(m, &x1, &src.left);
                                let to = comp(m, &x2, &tgt.left);
                                for alpha in m.two_cells(&from, &to) {
                                    out.push(TwoMorphism {
                                        src: src.clone(),
                                        tgt: tgt.clone(),
                                        alpha,
                                        x1: x1.clone(),
                                        x2: x2.clone(),
                                        x3: x3.clone(),
                                        delta1: delta1.clone(),
                                        delta2: delta2.clone(),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Groups 2-morphisms into ≈-classes; the second component counts
    /// comparisons that came back `Undetermined` (each opens a fresh
    /// class, conservatively).
    pub fn group_into_classes(
        &self,
        tms: Vec<TwoMorphism<M>>,
    ) -> (Vec<Vec<TwoMorphism<M>>>, usize) {
        let m = self.model;
        let mut classes: Vec<Vec<TwoMorphism<M>>> = Vec::new();
        let mut undetermined = 0usize;
        for tm in tms {
            let mut placed = false;
            for class in classes.iter_mut() {
                match m.are_equivalent(&class[0], &tm, self.ext_bound) {
                    EquivVerdict::Equivalent => {
                        class.push(tm.clone());
                        placed = true;
                        break;
                    }
                    EquivVerdict::NotEquivalent => {}
                    EquivVerdict::Undetermined { .. } => {
                        undetermined += 1;
                    }
                }
            }
            if !placed {
                classes.push(vec![tm]);
            }
        }
        (classes, undetermined)
    }

    /// Enumerated hom-category from `a` to `b`: every Σ-cospan with apex of
    /// size ≤ `apex_bound` (objects, not quotiented), and between each
    /// ordered pair the ≈-classes of 2-morphisms with middle object of size
    /// ≤ `ext_bound`.
    pub fn hom_category(
        &self,
        a: &M::Obj,
        b: &M::Obj,
        apex_bound: usize,
        ext_bound: usize,
    ) -> HomCategory<M> {
        let m = self.model;
        let mut cospans = Vec::new();
        for apex in m.objects() {
            if m.object_size(&apex) > apex_bound {
                continue;
            }
            for left in m.one_cells(a, &apex) {
                for right in m.one_cells(b, &apex) {
                    if m.in_sigma(&right) {
                        cospans.push(SigmaCospan { left: left.clone(), right });
                    }
                }
            }
        }
        let mut classes = Vec::with_capacity(cospans.len());
        let mut undetermined = 0usize;
        for src in &cospans {
            let mut row = Vec::with_capacity(cospans.len());
            for tgt in &cospans {
                let tms = self.two_morphisms_between(src, tgt, ext_bound);
                let (grouped, und) = self.group_into_classes(tms);
                undetermined += und;
                row.push(grouped);
            }
            classes.push(row);
        }
        HomCategory { cospans, classes, apex_bound, ext_bound, undetermined }
    }
}

/// Horizontal composition, the associator, unitors, and the coherence
/// comparisons built on them. The constructions follow the replacement-path
/// calculus: both composite cospans are carried onto a common shape by the
/// comparison cells of explicit level-2 replacement paths, and the middle is
/// the Rule 6 insertion of the second factor's comparison cell through the
/// first factor's Σ-extension.
impl<'m, M: FractionModel> Engine<'m, M> {
    /// Memoized Rule 6 insertion of `beta: f ⇒ g` through the Σ-arrow `v`.
    pub fn rule6_data(
        &self,
        v: &M::One,
        f: &M::One,
        g: &M::One,
        beta: &M::Two,
    ) -> Result<Rule6Output<M>, RuleError> {
        let key = (v.clone(), f.clone(), g.clone(), beta.clone());
        if let Some(hit) = self.rule6_memo.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let out = rule6_insert(self.model, v, f, g, beta, self.witness_bound)?;
        self.rule6_memo.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    fn square_bound(&self, top: &M::One, left: &M::One) -> usize {
        self.witness_bound.unwrap_or_else(|| self.model.default_witness_bound(top, left))
    }

    /// One leg of a horizontal composite: the comparison cell carrying the
    /// composite cospan of (`f_bar`, `g_bar`) onto the shape `(y′x f, w y₃)`.
    ///
    /// It is the Ω of the level-2 path over the border
    /// `[(r, g), (s, 1)]` that first replaces the identity bottom row by
    /// `eps` (the second factor's certifying square) next to the canonical
    /// completion, and then replaces the right column by the single square
    /// `xi ⊙ delta` (the Rule 6 square pasted under the first factor's
    /// certifying square) — whiskered on the left by `f`. With `reversed`
    /// the path is walked backwards, yielding the chosen inverse cell.
    fn hcompose_leg(
        &self,
        f_bar: &SigmaCospan<M>,
        g_bar: &SigmaCospan<M>,
        eps: &SquareOf<M>,
        delta: &SquareOf<M>,
        xi: &SquareOf<M>,
        reversed: bool,
    ) -> Result<TwoMorphism<M>, RuleError> {
        let m = self.model;
        let border = vec![
            (f_bar.right.clone(), g_bar.left.clone()),
            (g_bar.right.clone(), m.id1(&g_bar.target(m))),
        ];
        let start = SigmaScheme::canonical(m, &border, self.witness_bound)
            .map_err(OmegaError::into_rule)?;
        let dot = start
            .squares
            .iter()
            .find(|p| p.extents() == (0, 1, 1, 2))
            .expect("level-2 canonical scheme has a top-right cell")
            .square
            .clone();
        let rdot =
            m.canonical_square(&dot.bottom, &eps.right, self.square_bound(&dot.bottom, &eps.right))?;
        let d_after = SigmaScheme::new(
            m,
            2,
            2,
            vec![0, 1],
            vec![0, 1],
            border.clone(),
            vec![
                PlacedSquare { row0: 0, col0: 1, row1: 1, col1: 2, square: dot.clone() },
                PlacedSquare { row0: 1, col0: 0, row1: 2, col1: 1, square: eps.clone() },
                PlacedSquare { row0: 1, col0: 1, row1: 2, col1: 2, square: rdot },
            ],
        )
        .map_err(OmegaError::into_rule)?;
        let big = paste_vertical(m, xi, delta)?;
        let u_after = SigmaScheme::new(
            m,
            2,
            2,
            vec![0, 1],
            vec![0, 1],
            border,
            vec![
                PlacedSquare { row0: 1, col0: 0, row1: 2, col1: 1, square: eps.clone() },
                PlacedSquare { row0: 0, col0: 1, row1: 2, col1: 2, square: big },
            ],
        )
        .map_err(OmegaError::into_rule)?;
        let d_step =
            SigmaStep::new(m, start.clone(), d_after.clone(), StepType::D, (1, 0, 2, 2), (1, 0, 2, 2))
                .map_err(OmegaError::into_rule)?;
        let u_step = SigmaStep::new(m, d_after, u_after, StepType::U, (0, 1, 2, 2), (0, 1, 2, 2))
            .map_err(OmegaError::into_rule)?;
        let mut path =
            SigmaPath::new(start, vec![d_step, u_step]).map_err(OmegaError::into_rule)?;
        if reversed {
            path = path.reversed();
        }
        let om = omega_of_path(self, &path).map_err(OmegaError::into_rule)?;
        whisker_two_morphism(m, &om.class.rep, Some(&f_bar.left), None)
    }

    /// Representative-level horizontal composition of `beta` (over cospans
    /// B→C) after `alpha` (over cospans A→B).
    pub fn hcompose_reps(
        &self,
        beta: &TwoMorphism<M>,
        alpha: &TwoMorphism<M>,
    ) -> Result<TwoMorphism<M>, RuleError> {
        let m = self.model;
        validate_two_morphism(m, alpha).map_err(RuleError::Precondition)?;
        validate_two_morphism(m, beta).map_err(RuleError::Precondition)?;
        if alpha.src.target(m) != beta.src.source(m) || alpha.tgt.target(m) != beta.tgt.source(m)
        {
            return Err(RuleError::Boundary("cospans do not chain".into()));
        }
        let insert = self.rule6_data(
            &alpha.x3,
            &comp(m, &beta.x1, &beta.src.left),
            &comp(m, &beta.x2, &beta.tgt.left),
            &beta.alpha,
        )?;
        let omega1 = self.hcompose_leg(
            &alpha.src,
            &beta.src,
            &beta.square1(m),
            &alpha.square1(m),
            &insert.square_f,
            false,
        )?;
        let omega2_inv = self.hcompose_leg(
            &alpha.tgt,
            &beta.tgt,
            &beta.square2(m),
            &alpha.square2(m),
            &insert.square_g,
            true,
        )?;
        let v_apex = m.cod(&insert.w);
        let one_v = m.id1(&v_apex);
        let x3_mid = comp(m, &insert.w, &beta.x3);
        let mid_alpha = vcomp(
            m,
            &wpre(m, &insert.beta_prime, &comp(m, &alpha.x2, &alpha.tgt.left)),
            &wpost(m, &insert.square_f.right, &alpha.alpha),
        );
        let middle = TwoMorphism {
            src: omega1.tgt.clone(),
            tgt: omega2_inv.src.clone(),
            alpha: mid_alpha,
            x1: one_v.clone(),
            x2: one_v,
            x3: x3_mid.clone(),
            delta1: m.id2(&x3_mid),
            delta2: m.id2(&x3_mid),
        };
        validate_two_morphism(m, &middle).map_err(RuleError::Unsupported)?;
        let lower = crate::omega_paths::omega_compose(self, &middle, &omega1)?;
        let total = crate::omega_paths::omega_compose(self, &omega2_inv, &lower)?;
        let src_cospan = self.compose_cospans(&beta.src, &alpha.src)?;
        let tgt_cospan = self.compose_cospans(&beta.tgt, &alpha.tgt)?;
        if total.src != src_cospan || total.tgt != tgt_cospan {
            return Err(RuleError::Unsupported(
                "horizontal composite landed on unexpected cospans".into(),
            ));
        }
        Ok(total)
    }

    /// Class-level horizontal composition.
    pub fn hcompose(
        &self,
        beta: &TwoCellClass<M>,
        alpha: &TwoCellClass<M>,
    ) -> Result<TwoCellClass<M>, RuleError> {
        let rep = self.hcompose_reps(&beta.rep, &alpha.rep)?;
        Ok(TwoCellClass { rep, bound: self.ext_bound })
    }

    /// The three level-2 schemes of the association comparison, in order:
    /// right-column-merged, canonical, bottom-row-merged.
    fn association_schemes(
        &self,
        f_bar: &SigmaCospan<M>,
        g_bar: &SigmaCospan<M>,
        h_bar: &SigmaCospan<M>,
    ) -> Result<(SigmaScheme<M>, SigmaScheme<M>, SigmaScheme<M>), RuleError> {
        let m = self.model;
        let border = vec![
            (f_bar.right.clone(), g_bar.left.clone()),
            (g_bar.right.clone(), h_bar.left.clone()),
        ];
        let canonical = SigmaScheme::canonical(m, &border, self.witness_bound)
            .map_err(OmegaError::into_rule)?;
        let pick = |r0: u8, c0: u8| {
            canonical
                .squares
                .iter()
                .find(|p| (p.row0, p.col0) == (r0, c0))
                .expect("canonical level-2 scheme fills the staircase")
                .square
                .clone()
        };
        let dot_sh = pick(1, 0);
        let dot_rg = pick(0, 1);
        let edge = comp(m, &dot_sh.right, &g_bar.left);
        let big1 = m.canonical_square(&f_bar.right, &edge, self.square_bound(&f_bar.right, &edge))?;
        let one = SigmaScheme::new(
            m,
            2,
            2,
            vec![0, 1],
            vec![0, 1],
            border.clone(),
            vec![
                PlacedSquare { row0: 1, col0: 0, row1: 2, col1: 1, square: dot_sh },
                PlacedSquare { row0: 0, col0: 1, row1: 2, col1: 2, square: big1 },
            ],
        )
        .map_err(OmegaError::into_rule)?;
        let floor = comp(m, &dot_rg.bottom, &g_bar.right);
        let big3 = m.canonical_square(&floor, &h_bar.left, self.square_bound(&floor, &h_bar.left))?;
        let three = SigmaScheme::new(
            m,
            2,
            2,
            vec![0, 1],
            vec![0, 1],
            border,
            vec![
                PlacedSquare { row0: 0, col0: 1, row1: 1, col1: 2, square: dot_rg },
                PlacedSquare { row0: 1, col0: 0, row1: 2, col1: 2, square: big3 },
            ],
        )
        .map_err(OmegaError::into_rule)?;
        Ok((one, canonical, three))
    }

    /// The association comparison `(h̄∘ḡ)∘f̄ ⇒ h̄∘(ḡ∘f̄)`: the Ω of the
    /// level-2 path that first re-splits the right column at the canonical
    /// middle completion and then merges the bottom row, whiskered by the
    /// outer legs `f` and `t`. With `reversed`, the inverse comparison.
    fn association_cell(
        &self,
        f_bar: &SigmaCospan<M>,
        g_bar: &SigmaCospan<M>,
        h_bar: &SigmaCospan<M>,
        reversed: bool,
    ) -> Result<TwoMorphism<M>, RuleError> {
        let m = self.model;
        if f_bar.target(m) != g_bar.source(m) || g_bar.target(m) != h_bar.source(m) {
            return Err(RuleError::Boundary("cospans do not chain".into()));
        }
        let (one, canonical, three) = self.association_schemes(f_bar, g_bar, h_bar)?;
        let u_step =
            SigmaStep::new(m, one.clone(), canonical.clone(), StepType::U, (0, 1, 2, 2), (0, 1, 2, 2))
                .map_err(OmegaError::into_rule)?;
        let d_step = SigmaStep::new(m, canonical, three, StepType::D, (1, 0, 2, 2), (1, 0, 2, 2))
            .map_err(OmegaError::into_rule)?;
        let mut path =
            SigmaPath::new(one, vec![u_step, d_step]).map_err(OmegaError::into_rule)?;
        if reversed {
            path = path.reversed();
        }
        let om = omega_of_path(self, &path).map_err(OmegaError::into_rule)?;
        let rep = whisker_two_morphism(m, &om.class.rep, Some(&f_bar.left), Some(&h_bar.right))?;
        let gf = self.compose_cospans(g_bar, f_bar)?;
        let hg = self.compose_cospans(h_bar, g_bar)?;
        let left_assoc = self.compose_cospans(&hg, f_bar)?;
        let right_assoc = self.compose_cospans(h_bar, &gf)?;
        let (want_src, want_tgt) =
            if reversed { (right_assoc, left_assoc) } else { (left_assoc, right_assoc) };
        if rep.src != want_src || rep.tgt != want_tgt {
            return Err(RuleError::Unsupported(
                "association comparison landed on unexpected cospans".into(),
            ));
        }
        Ok(rep)
    }

    /// The associator class `(h̄∘ḡ)∘f̄ ⇒ h̄∘(ḡ∘f̄)`.
    pub fn associator(
        &self,
        f_bar: &SigmaCospan<M>,
        g_bar: &SigmaCospan<M>,
        h_bar: &SigmaCospan<M>,
    ) -> Result<TwoCellClass<M>, RuleError> {
        let rep = self.association_cell(f_bar, g_bar, h_bar, false)?;
        Ok(TwoCellClass { rep, bound: self.ext_bound })
    }

    /// The chosen inverse of [`Engine::associator`] — the reversed path's Ω.
    pub fn associator_inverse(
        &self,
        f_bar: &SigmaCospan<M>,
        g_bar: &SigmaCospan<M>,
        h_bar: &SigmaCospan<M>,
    ) -> Result<TwoCellClass<M>, RuleError> {
        let rep = self.association_cell(f_bar, g_bar, h_bar, true)?;
        Ok(TwoCellClass { rep, bound: self.ext_bound })
    }

    /// Left and right unitors on a cospan. Composition with an identity
    /// cospan returns the operand on the nose, so both are identity classes
    /// on `c` itself.
    pub fn unitors(&self, c: &SigmaCospan<M>) -> (TwoCellClass<M>, TwoCellClass<M>) {
        (self.identity_two_cell(c), self.identity_two_cell(c))
    }

    /// Compares the two pentagon composites for four chained cospans:
    /// the two-step route through `(k̄∘h̄)∘(ḡ∘f̄)` against the three-step
    /// route through `(k̄∘(h̄∘ḡ))∘f̄` and `k̄∘((h̄∘ḡ)∘f̄)`.
    pub fn check_pentagon(
        &self,
        f_bar: &SigmaCospan<M>,
        g_bar: &SigmaCospan<M>,
        h_bar: &SigmaCospan<M>,
        k_bar: &SigmaCospan<M>,
    ) -> Result<EquivVerdict, RuleError> {
        let gf = self.compose_cospans(g_bar, f_bar)?;
        let hg = self.compose_cospans(h_bar, g_bar)?;
        let kh = self.compose_cospans(k_bar, h_bar)?;
        let two_step = self.vcompose_classes(
            &self.associator(&gf, h_bar, k_bar)?,
            &self.associator(f_bar, g_bar, &kh)?,
        )?;
        let id_f = self.identity_two_cell(f_bar);
        let id_k = self.identity_two_cell(k_bar);
        let first = self.hcompose(&self.associator(g_bar, h_bar, k_bar)?, &id_f)?;
        let second = self.associator(f_bar, &hg, k_bar)?;
        let third = self.hcompose(&id_k, &self.associator(f_bar, g_bar, h_bar)?)?;
        let three_step =
            self.vcompose_classes(&third, &self.vcompose_classes(&second, &first)?)?;
        self.equivalent(&two_step.rep, &three_step.rep)
    }

    /// Triangle law: the association comparison across an identity middle
    /// leg, with identity unitors, must be the identity class.
    pub fn check_triangle(
        &self,
        f_bar: &SigmaCospan<M>,
        g_bar: &SigmaCospan<M>,
    ) -> Result<EquivVerdict, RuleError> {
        let m = self.model;
        let id_mid = SigmaCospan::identity(m, &f_bar.target(m))?;
        let assoc = self.associator(f_bar, &id_mid, g_bar)?;
        let composite = self.compose_cospans(g_bar, f_bar)?;
        self.equivalent(&assoc.rep, &self.identity_two_cell(&composite).rep)
    }

    /// Interchange: `(β₂·β₁)∘(α₂·α₁)` against `(β₂∘α₂)·(β₁∘α₁)`.
    pub fn check_interchange(
        &self,
        beta2: &TwoCellClass<M>,
        beta1: &TwoCellClass<M>,
        alpha2: &TwoCellClass<M>,
        alpha1: &TwoCellClass<M>,
    ) -> Result<EquivVerdict, RuleError> {
        let lhs = self.hcompose(
            &self.vcompose_classes(beta2, beta1)?,
            &self.vcompose_classes(alpha2, alpha1)?,
        )?;
        let rhs = self.vcompose_classes(
            &self.hcompose(beta2, alpha2)?,
            &self.hcompose(beta1, alpha1)?,
        )?;
        self.equivalent(&lhs.rep, &rhs.rep)
    }

    /// Whiskering law: `(β∘1_{f̄₂})·(1_{ḡ₁}∘α)` against `β∘α`.
    pub fn check_whiskering(
        &self,
        beta: &TwoCellClass<M>,
        alpha: &TwoCellClass<M>,
    ) -> Result<EquivVerdict, RuleError> {
        let id_f2 = self.identity_two_cell(&alpha.rep.tgt);
        let id_g1 = self.identity_two_cell(&beta.rep.src);
        let lhs = self.vcompose_classes(
            &self.hcompose(beta, &id_f2)?,
            &self.hcompose(&id_g1, alpha)?,
        )?;
        let rhs = self.hcompose(beta, alpha)?;
        self.equivalent(&lhs.rep, &rhs.rep)
    }

    /// Naturality of the association comparison in all three arguments:
    /// `Assoc · ((γ∘β)∘α)` against `(γ∘(β∘α)) · Assoc`.
    pub fn check_associator_naturality(
        &self,
        gamma: &TwoCellClass<M>,
        beta: &TwoCellClass<M>,
        alpha: &TwoCellClass<M>,
    ) -> Result<EquivVerdict, RuleError> {
        let a_src = self.associator(&alpha.rep.src, &beta.rep.src, &gamma.rep.src)?;
        let a_tgt = self.associator(&alpha.rep.tgt, &beta.rep.tgt, &gamma.rep.tgt)?;
        let lhs = self.vcompose_classes(
            &a_tgt,
            &self.hcompose(&self.hcompose(gamma, beta)?, alpha)?,
        )?;
        let rhs = self.vcompose_classes(
            &self.hcompose(gamma, &self.hcompose(beta, alpha)?)?,
            &a_src,
        )?;
        self.equivalent(&lhs.rep, &rhs.rep)
    }
}

/// Output of [`Engine::hom_category`].
pub struct HomCategory<M: FractionModel> {
    pub cospans: Vec<SigmaCospan<M>>,
    /// `classes[i][j]`: ≈-classes of 2-morphisms from `cospans[i]` to
    /// `cospans[j]`, each class listing its members.
    pub classes: Vec<Vec<Vec<Vec<TwoMorphism<M>>>>>,
    pub apex_bound: usize,
    pub ext_bound: usize,
    pub undetermined: usize,
}
