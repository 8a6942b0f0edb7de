//! Σ-squares as first-class data: validation, pasting, the six axioms of
//! the calculus as checkable predicates, and the derived rules every higher
//! layer builds on.
//!
//! Conventions (shared with [`crate::two_cat_core`]): a square
//! `(left, right, cell): top → bottom` has `cell: bottom∘left ⇒ right∘top`,
//! invertible. Vertical pasting stacks `top → mid` over `mid → bottom`;
//! horizontal pasting glues two squares sharing a vertical edge.
//!
//! Every derived rule is self-certifying: outputs are re-validated against
//! the model predicate and the rule's pasting equation before they are
//! returned, so a structurally wrong witness can never leak out — it
//! surfaces as an error instead.

use serde::Serialize;

use crate::two_cat_core::{
    comp, vcomp, wpost, wpre, BoundaryError, RuleError, Square, SquareOf, TwoCatModel,
};

/// Outcome of [`validate_square`]: a verdict plus the first failure found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareCheck {
    pub ok: bool,
    pub diagnosis: Option<String>,
}

impl SquareCheck {
    fn pass() -> SquareCheck {
        SquareCheck { ok: true, diagnosis: None }
    }

    fn fail(diagnosis: impl Into<String>) -> SquareCheck {
        SquareCheck { ok: false, diagnosis: Some(diagnosis.into()) }
    }
}

/// Checks every Σ-square invariant, in order: 1-cell boundaries, cell
/// boundaries, invertibility of the cell, Σ-membership of the horizontal
/// edges, and finally the model's Σ-square predicate.
pub fn validate_square<M: TwoCatModel>(m: &M, sq: &SquareOf<M>) -> SquareCheck {
    if m.dom(&sq.top) != m.dom(&sq.left)
        || m.cod(&sq.top) != m.dom(&sq.right)
        || m.cod(&sq.left) != m.dom(&sq.bottom)
        || m.cod(&sq.right) != m.cod(&sq.bottom)
    {
        return SquareCheck::fail("boundary mismatch among the four 1-cells");
    }
    let around = comp(m, &sq.bottom, &sq.left);
    let across = comp(m, &sq.right, &sq.top);
    if m.src2(&sq.cell) != around || m.tgt2(&sq.cell) != across {
        return SquareCheck::fail("cell does not run from bottom∘left to right∘top");
    }
    if !m.is_invertible2(&sq.cell) {
        return SquareCheck::fail("delta not invertible");
    }
    if !m.in_sigma(&sq.top) {
        return SquareCheck::fail("top edge not in Σ");
    }
    if !m.in_sigma(&sq.bottom) {
        return SquareCheck::fail("bottom edge not in Σ");
    }
    if !m.square_in_sigma(sq) {
        return SquareCheck::fail("Σ-membership");
    }
    SquareCheck::pass()
}

fn require_input<M: TwoCatModel>(m: &M, sq: &SquareOf<M>, what: &str) -> Result<(), RuleError> {
    let check = validate_square(m, sq);
    if check.ok {
        Ok(())
    } else {
        Err(RuleError::Precondition(format!(
            "{what} is not a Σ-square: {}",
            check.diagnosis.unwrap_or_default()
        )))
    }
}

fn certify_output<M: TwoCatModel>(m: &M, sq: &SquareOf<M>, what: &str) -> Result<(), RuleError> {
    let check = validate_square(m, sq);
    if check.ok {
        Ok(())
    } else {
        Err(RuleError::Unsupported(format!(
            "derived {what} failed validation ({}); the model violates a calculus axiom",
            check.diagnosis.unwrap_or_default()
        )))
    }
}

fn wb_for<M: TwoCatModel>(m: &M, s: &M::One, f: &M::One, wb: Option<usize>) -> usize {
    wb.unwrap_or_else(|| m.default_witness_bound(s, f))
}

/// Vertical pasting `q2 ⊙ q1` of `q1: r → s` over `q2: s → t`; the composite
/// runs `r → t` with witness `(right₂∘δ₁)·(δ₂∘left₁)`.
pub fn paste_vertical<M: TwoCatModel>(
    m: &M,
    q2: &SquareOf<M>,
    q1: &SquareOf<M>,
) -> Result<SquareOf<M>, BoundaryError> {
    if q1.bottom != q2.top {
        return Err(BoundaryError::new(
            "vertical pasting needs the bottom of the first square to equal the top of the second",
        ));
    }
    let left = m.comp1(&q2.left, &q1.left)?;
    let right = m.comp1(&q2.right, &q1.right)?;
    let upper = m.whisker_pre(&q2.cell, &q1.left)?;
    let lower = m.whisker_post(&q2.right, &q1.cell)?;
    Ok(Square {
        top: q1.top.clone(),
        left,
        right,
        bottom: q2.bottom.clone(),
        cell: m.vcomp2(&lower, &upper)?,
    })
}

/// Horizontal pasting of `q1: r → r′` and `q3: s → s′` sharing the vertical
/// edge `q1.right = q3.left`; the composite runs `s∘r → s′∘r′` with witness
/// `(δ₃∘r)·(s′∘δ₁)`.
pub fn paste_horizontal<M: TwoCatModel>(
    m: &M,
    q1: &SquareOf<M>,
    q3: &SquareOf<M>,
) -> Result<SquareOf<M>, BoundaryError> {
    if q1.right != q3.left {
        return Err(BoundaryError::new(
            "horizontal pasting needs the right of the first square to equal the left of the second",
        ));
    }
    let top = m.comp1(&q3.top, &q1.top)?;
    let bottom = m.comp1(&q3.bottom, &q1.bottom)?;
    let first = m.whisker_post(&q3.bottom, &q1.cell)?;
    let second = m.whisker_pre(&q3.cell, &q1.top)?;
    Ok(Square {
        top,
        left: q1.left.clone(),
        right: q3.right.clone(),
        bottom,
        cell: m.vcomp2(&second, &first)?,
    })
}

/// Self-certified vertical composite of two Σ-squares.
pub fn vcompose_squares<M: TwoCatModel>(
    m: &M,
    q2: &SquareOf<M>,
    q1: &SquareOf<M>,
) -> Result<SquareOf<M>, RuleError> {
    require_input(m, q1, "first square")?;
    require_input(m, q2, "second square")?;
    let pasted = paste_vertical(m, q2, q1)?;
    certify_output(m, &pasted, "vertical composite")?;
    Ok(pasted)
}

/// Self-certified horizontal composite of two Σ-squares.
pub fn hcompose_squares<M: TwoCatModel>(
    m: &M,
    q1: &SquareOf<M>,
    q3: &SquareOf<M>,
) -> Result<SquareOf<M>, RuleError> {
    require_input(m, q1, "first square")?;
    require_input(m, q3, "second square")?;
    let pasted = paste_horizontal(m, q1, q3)?;
    certify_output(m, &pasted, "horizontal composite")?;
    Ok(pasted)
}

/// Replaces the right leg along an invertible `rho: right ⇒ v′`, composing
/// `rho∘top` onto the witness.
pub fn adjust_right<M: TwoCatModel>(
    m: &M,
    q: &SquareOf<M>,
    rho: &M::Two,
) -> Result<SquareOf<M>, RuleError> {
    if m.src2(rho) != q.right {
        return Err(RuleError::Boundary(
            "adjustment cell must start at the square's right leg".into(),
        ));
    }
    if !m.is_invertible2(rho) {
        return Err(RuleError::Precondition("adjustment cell must be invertible".into()));
    }
    let whiskered = m.whisker_pre(rho, &q.top).map_err(RuleError::from)?;
    Ok(Square {
        top: q.top.clone(),
        left: q.left.clone(),
        right: m.tgt2(rho),
        bottom: q.bottom.clone(),
        cell: m.vcomp2(&whiskered, &q.cell)?,
    })
}

/// The identity square `(1, 1, id): s → s`.
pub fn identity_square<M: TwoCatModel>(m: &M, s: &M::One) -> SquareOf<M> {
    Square {
        top: s.clone(),
        left: m.id1(&m.dom(s)),
        right: m.id1(&m.cod(s)),
        bottom: s.clone(),
        cell: m.id2(s),
    }
}

/// The vertical square `(1, d, id): s → d∘s` induced by post-composition.
pub fn vertical_square<M: TwoCatModel>(
    m: &M,
    s: &M::One,
    d: &M::One,
) -> Result<SquareOf<M>, BoundaryError> {
    let ds = m.comp1(d, s)?;
    Ok(Square {
        top: s.clone(),
        left: m.id1(&m.dom(s)),
        right: d.clone(),
        bottom: ds.clone(),
        cell: m.id2(&ds),
    })
}

/// Identity-left square `(1, s, id): r → s∘r` for composable Σ-arrows.
pub fn rule2_square<M: TwoCatModel>(
    m: &M,
    r: &M::One,
    s: &M::One,
) -> Result<SquareOf<M>, RuleError> {
    if !m.in_sigma(r) || !m.in_sigma(s) {
        return Err(RuleError::Precondition("both arrows must be Σ-arrows".into()));
    }
    let sq = vertical_square(m, r, s)?;
    certify_output(m, &sq, "identity-left composite square")?;
    Ok(sq)
}

/// From a Σ-square `(s, u, δ): r → t` whose left edge `s` is itself a
/// Σ-arrow, derives the two certified squares with bottom `t∘s`:
/// `(1, u, δ): r → t∘s` (same witness cell) and `(1, t, id): s → t∘s`.
pub fn rule2_3_derive<M: TwoCatModel>(
    m: &M,
    q: &SquareOf<M>,
) -> Result<(SquareOf<M>, SquareOf<M>), RuleError> {
    require_input(m, q, "hypothesis square")?;
    if !m.in_sigma(&q.left) {
        return Err(RuleError::Precondition(
            "left edge of the hypothesis square must be a Σ-arrow".into(),
        ));
    }
    let ts = comp(m, &q.bottom, &q.left);
    let first = Square {
        top: q.top.clone(),
        left: m.id1(&m.dom(&q.top)),
        right: q.right.clone(),
        bottom: ts.clone(),
        cell: q.cell.clone(),
    };
    let second = Square {
        top: q.left.clone(),
        left: m.id1(&m.dom(&q.left)),
        right: q.bottom.clone(),
        bottom: ts,
        cell: m.id2(&m.src2(&q.cell)),
    };
    certify_output(m, &first, "square with the original witness over the composite bottom")?;
    certify_output(m, &second, "identity-witness square over the composite bottom")?;
    Ok((first, second))
}

/// Given a Σ-square `sq` with top `r` and 2-cells `alpha: right ⇒ g`,
/// `beta: g ⇒ right` whose whiskers along `r` are mutually inverse, finds
/// `d` making `d∘alpha` and `d∘beta` mutually inverse outright; returns `d`
/// with its certified vertical square on `sq.bottom`.
pub fn rule4a<M: TwoCatModel>(
    m: &M,
    sq: &SquareOf<M>,
    alpha: &M::Two,
    beta: &M::Two,
    wb: Option<usize>,
) -> Result<(M::One, SquareOf<M>), RuleError> {
    require_input(m, sq, "host square")?;
    let f_prime = &sq.right;
    let g = m.tgt2(alpha);
    if m.src2(alpha) != *f_prime || m.src2(beta) != g || m.tgt2(beta) != *f_prime {
        return Err(RuleError::Boundary(
            "cells must run right ⇒ g and g ⇒ right for a common g".into(),
        ));
    }
    let r = &sq.top;
    let ar = wpre(m, alpha, r);
    let br = wpre(m, beta, r);
    let fr = comp(m, f_prime, r);
    let gr = comp(m, &g, r);
    if !m.eq2(&vcomp(m, &br, &ar), &m.id2(&fr)) || !m.eq2(&vcomp(m, &ar, &br), &m.id2(&gr)) {
        return Err(RuleError::Precondition(
            "whiskered cells along the top are not mutually inverse".into(),
        ));
    }
    let round_fg = vcomp(m, beta, alpha);
    let round_gf = vcomp(m, alpha, beta);
    // Stage 0: nothing to do.
    if m.eq2(&round_fg, &m.id2(f_prime)) && m.eq2(&round_gf, &m.id2(&g)) {
        let sq0 = identity_square(m, &sq.bottom);
        certify_output(m, &sq0, "identity equifier square")?;
        return Ok((m.id1(&m.cod(&sq.bottom)), sq0));
    }
    // Stage 1: equify beta·alpha against the identity on the right leg.
    let bound = wb_for(m, &sq.bottom, f_prime, wb);
    let d1 = m.witness_equification(sq, f_prime, &round_fg, &m.id2(f_prime), bound)?;
    let v1 = vertical_square(m, &sq.bottom, &d1)?;
    certify_output(m, &v1, "equifier square")?;
    let d1_fg = wpost(m, &d1, &round_fg);
    let d1_gf = wpost(m, &d1, &round_gf);
    let d1f = comp(m, &d1, f_prime);
    let d1g = comp(m, &d1, &g);
    if m.eq2(&d1_fg, &m.id2(&d1f)) && m.eq2(&d1_gf, &m.id2(&d1g)) {
        return Ok((d1, v1));
    }
    // Stage 2: the other composite still resists; equify it through a host
    // square with right leg d1∘g, built from the original witness and the
    // invertible whisker of d1∘alpha.
    let d1_alpha = wpost(m, &d1, alpha);
    let pasted = paste_vertical(m, &v1, sq)?;
    let xi = vcomp(m, &wpre(m, &d1_alpha, r), &pasted.cell);
    let host = Square {
        top: r.clone(),
        left: sq.left.clone(),
        right: comp(m, &d1, &g),
        bottom: pasted.bottom.clone(),
        cell: xi,
    };
    if validate_square(m, &host).ok {
        let d2 =
            m.witness_equification(&host, &host.right, &d1_gf, &m.id2(&d1g), bound)?;
        let v2 = vertical_square(m, &pasted.bottom, &d2)?;
        certify_output(m, &v2, "second equifier square")?;
        let d = comp(m, &d2, &d1);
        let d_fg = wpost(m, &d, &round_fg);
        let d_gf = wpost(m, &d, &round_gf);
        let df = comp(m, &d, f_prime);
        let dg = comp(m, &d, &g);
        if m.eq2(&d_fg, &m.id2(&df)) && m.eq2(&d_gf, &m.id2(&dg)) {
            let total = vcompose_squares(m, &v2, &v1)?;
            return Ok((d, total));
        }
    }
    Err(RuleError::Unsupported(
        "could not equify both round-trips to identities; the generic derivation needs a \
         Σ-square unavailable in this model"
            .into(),
    ))
}

/// Output of [`rule4b`]: `d` with `(1, d, id): m → d∘m` certified and the
/// invertible comparison `gamma: d∘a ⇒ d∘b` (inverse included) satisfying
/// `(gamma∘r)·(d∘δ) = d∘ε`.
#[derive(Debug, Clone)]
pub struct Rule4bOutput<M: TwoCatModel> {
    pub d: M::One,
    pub gamma: M::Two,
    pub gamma_inverse: M::Two,
    pub square: SquareOf<M>,
}

/// Two Σ-squares `r → m` with equal left legs: produces the comparison of
/// their right legs after a Σ-extension of the common bottom.
pub fn rule4b<M: TwoCatModel>(
    m: &M,
    qx: &SquareOf<M>,
    qy: &SquareOf<M>,
    wb: Option<usize>,
) -> Result<Rule4bOutput<M>, RuleError> {
    require_input(m, qx, "first square")?;
    require_input(m, qy, "second square")?;
    if qx.top != qy.top || qx.left != qy.left || qx.bottom != qy.bottom {
        return Err(RuleError::Boundary(
            "the two squares must share top, left and bottom".into(),
        ));
    }
    let r = &qx.top;
    let a = &qx.right;
    let b = &qy.right;
    let delta_inv = m
        .invert2(&qx.cell)
        .ok_or_else(|| RuleError::Precondition("first witness cell not invertible".into()))?;
    // μ: a∘r ⇒ b∘r.
    let mu = vcomp(m, &qy.cell, &delta_inv);
    let bound = wb_for(m, &qx.bottom, a, wb);
    let (d1, gamma1) = m.witness_equi_insertion(qx, b, &mu, bound)?;
    let v1 = vertical_square(m, &qx.bottom, &d1)?;
    certify_output(m, &v1, "first equi-insertion square")?;
    // Paste the d1-extension below both inputs.
    let px = paste_vertical(m, &v1, qx)?;
    let py = paste_vertical(m, &v1, qy)?;
    // α₂: (d1∘b)∘r ⇒ (d1∘a)∘r through the common bottom.
    let py_inv = m
        .invert2(&py.cell)
        .ok_or_else(|| RuleError::Unsupported("pasted witness cell not invertible".into()))?;
    let alpha2 = vcomp(m, &px.cell, &py_inv);
    let bound2 = wb_for(m, &py.bottom, &py.right, wb);
    let (d2, gamma2) = m.witness_equi_insertion(&py, &px.right, &alpha2, bound2)?;
    let v2 = vertical_square(m, &py.bottom, &d2)?;
    certify_output(m, &v2, "second equi-insertion square")?;
    // Round-trip cells on the doubly extended legs.
    let d2_gamma1 = wpost(m, &d2, &gamma1);
    let host = paste_vertical(m, &v2, &px)?;
    let (d3, v3) = rule4a(m, &host, &d2_gamma1, &gamma2, wb)?;
    let d21 = comp(m, &d2, &d1);
    let d = comp(m, &d3, &d21);
    let gamma = wpost(m, &comp(m, &d3, &d2), &gamma1);
    let gamma_inverse = wpost(m, &d3, &gamma2);
    // Certify the accumulated vertical square and the pasting law.
    let v21 = vcompose_squares(m, &v2, &v1)?;
    let square = vcompose_squares(m, &v3, &v21)?;
    let da = comp(m, &d, a);
    let db = comp(m, &d, b);
    if !m.eq2(&vcomp(m, &gamma, &gamma_inverse), &m.id2(&db))
        || !m.eq2(&vcomp(m, &gamma_inverse, &gamma), &m.id2(&da))
    {
        return Err(RuleError::Unsupported(
            "comparison cell failed to become invertible after extension".into(),
        ));
    }
    let lhs = vcomp(m, &wpre(m, &gamma, r), &wpost(m, &d, &qx.cell));
    let rhs = wpost(m, &d, &qy.cell);
    if !m.eq2(&lhs, &rhs) {
        return Err(RuleError::Unsupported("pasting law of the comparison failed".into()));
    }
    Ok(Rule4bOutput { d, gamma, gamma_inverse, square })
}

/// Output of [`rule4`]: a common Σ-extension `bottom = u` of the two shared
/// bottoms `x₃`, `y₃`, the certified extension squares, and one invertible
/// comparison per input index satisfying the pasting law
/// `(γᵢ∘rᵢ)·(d_x∘δᵢ)·(φ∘bᵢ) = (d_y∘εᵢ)·(χ∘bᵢ)`.
pub struct Rule4Bundle<M: TwoCatModel> {
    pub d_x: M::One,
    pub d_y: M::One,
    pub bottom: M::One,
    pub gammas: Vec<M::Two>,
    pub gamma_inverses: Vec<M::Two>,
    pub square_x: SquareOf<M>,
    pub square_y: SquareOf<M>,
}

// Manual impls: deriving would put the bounds on `M` instead of the cell
// types the fields hold.
impl<M: TwoCatModel> Clone for Rule4Bundle<M> {
    fn clone(&self) -> Self {
        Rule4Bundle {
            d_x: self.d_x.clone(),
            d_y: self.d_y.clone(),
            bottom: self.bottom.clone(),
            gammas: self.gammas.clone(),
            gamma_inverses: self.gamma_inverses.clone(),
            square_x: self.square_x.clone(),
            square_y: self.square_y.clone(),
        }
    }
}

impl<M: TwoCatModel> std::fmt::Debug for Rule4Bundle<M> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Rule4Bundle")
            .field("d_x", &self.d_x)
            .field("d_y", &self.d_y)
            .field("bottom", &self.bottom)
            .field("gammas", &self.gammas)
            .field("gamma_inverses", &self.gamma_inverses)
            .field("square_x", &self.square_x)
            .field("square_y", &self.square_y)
            .finish()
    }
}

/// The common-extension rule. Each input pair `(Σ^{δᵢ}, Σ^{εᵢ})` consists of
/// squares `rᵢ → x₃` and `rᵢ → y₃` with equal top and left; all first
/// members share the bottom `x₃` and all second members share `y₃`. One
/// pair is the single-index form used by vertical composition; two pairs
/// give the two-index form used by the coherence layer.
pub fn rule4<M: TwoCatModel>(
    m: &M,
    pairs: &[(SquareOf<M>, SquareOf<M>)],
    wb: Option<usize>,
) -> Result<Rule4Bundle<M>, RuleError> {
    if pairs.is_empty() {
        return Err(RuleError::Precondition("at least one input pair required".into()));
    }
    let x3 = pairs[0].0.bottom.clone();
    let y3 = pairs[0].1.bottom.clone();
    for (i, (qx, qy)) in pairs.iter().enumerate() {
        require_input(m, qx, "first member of an input pair")?;
        require_input(m, qy, "second member of an input pair")?;
        if qx.top != qy.top || qx.left != qy.left {
            return Err(RuleError::Boundary(format!(
                "input pair {i} does not share top and left edges"
            )));
        }
        if qx.bottom != x3 || qy.bottom != y3 {
            return Err(RuleError::Boundary(format!(
                "input pair {i} does not share the common bottoms"
            )));
        }
    }
    // Identical inputs: extend by nothing.
    if pairs.iter().all(|(qx, qy)| qx == qy) {
        let idc = m.id1(&m.cod(&x3));
        let square = identity_square(m, &x3);
        certify_output(m, &square, "identity extension square")?;
        let gammas: Vec<M::Two> =
            pairs.iter().map(|(qx, _)| m.id2(&qx.right)).collect();
        return Ok(Rule4Bundle {
            d_x: idc.clone(),
            d_y: idc,
            bottom: x3.clone(),
            gammas: gammas.clone(),
            gamma_inverses: gammas,
            square_x: square.clone(),
            square_y: square,
        });
    }
    // Complete the span of the two bottoms and push both families onto the
    // common extension.
    let bound = wb_for(m, &x3, &y3, wb);
    let w = m.canonical_square(&x3, &y3, bound)?;
    certify_output(m, &w, "span completion square")?;
    let (sq_phi, sq_ida) = rule2_3_derive(m, &w)?;
    let mut qx_ext: Vec<SquareOf<M>> = Vec::new();
    let mut qy_ext: Vec<SquareOf<M>> = Vec::new();
    for (qx, qy) in pairs {
        qx_ext.push(vcompose_squares(m, &sq_phi, qx)?);
        qy_ext.push(vcompose_squares(m, &sq_ida, qy)?);
    }
    // Reconcile index after index, accumulating the extension.
    let ay3 = sq_phi.bottom.clone();
    let mut acc = identity_square(m, &ay3);
    let mut gammas: Vec<M::Two> = Vec::new();
    for i in 0..pairs.len() {
        let rx = paste_vertical(m, &acc, &qx_ext[i])?;
        let ry = paste_vertical(m, &acc, &qy_ext[i])?;
        let out = rule4b(m, &rx, &ry, wb)?;
        for g in gammas.iter_mut() {
            *g = wpost(m, &out.d, g);
        }
        gammas.push(out.gamma.clone());
        acc = vcompose_squares(m, &out.square, &acc)?;
    }
    let square_x = vcompose_squares(m, &acc, &sq_phi)?;
    let square_y = vcompose_squares(m, &acc, &sq_ida)?;
    let d_x = square_x.right.clone();
    let d_y = square_y.right.clone();
    let bottom = square_x.bottom.clone();
    // Verify the per-index pasting law and collect inverses.
    let mut gamma_inverses = Vec::new();
    for (i, (qx, qy)) in pairs.iter().enumerate() {
        let gamma = &gammas[i];
        let day = comp(m, &d_y, &qy.right);
        let dax = comp(m, &d_x, &qx.right);
        let inv = m.invert2(gamma).ok_or_else(|| {
            RuleError::Unsupported(format!("comparison {i} is not invertible"))
        })?;
        if !m.eq2(&vcomp(m, gamma, &inv), &m.id2(&day))
            || !m.eq2(&vcomp(m, &inv, gamma), &m.id2(&dax))
        {
            return Err(RuleError::Unsupported(format!(
                "comparison {i} has no two-sided inverse"
            )));
        }
        let ri = &qx.top;
        let bi = &qx.left;
        let lhs = vcomp(
            m,
            &wpre(m, gamma, ri),
            &vcomp(m, &wpost(m, &d_x, &qx.cell), &wpre(m, &square_x.cell, bi)),
        );
        let rhs = vcomp(m, &wpost(m, &d_y, &qy.cell), &wpre(m, &square_y.cell, bi));
        if !m.eq2(&lhs, &rhs) {
            return Err(RuleError::Unsupported(format!(
                "pasting law for index {i} failed after extension"
            )));
        }
        gamma_inverses.push(inv);
    }
    Ok(Rule4Bundle { d_x, d_y, bottom, gammas, gamma_inverses, square_x, square_y })
}

/// For two spans `(f, v)`, `(g, v)` with a common Σ-leg `v` and common
/// codomain of `f, g`: two Σ-squares with top `v` landing on one common
/// bottom `w`.
pub fn rule5_double_square<M: TwoCatModel>(
    m: &M,
    v: &M::One,
    f: &M::One,
    g: &M::One,
    wb: Option<usize>,
) -> Result<(M::One, SquareOf<M>, SquareOf<M>), RuleError> {
    if !m.in_sigma(v) {
        return Err(RuleError::Precondition("the shared leg must be a Σ-arrow".into()));
    }
    if m.dom(f) != m.dom(v) || m.dom(g) != m.dom(v) || m.cod(f) != m.cod(g) {
        return Err(RuleError::Boundary(
            "legs must share the source of v and land in one object".into(),
        ));
    }
    if f == g {
        let sq = m.canonical_square(v, f, wb_for(m, v, f, wb))?;
        certify_output(m, &sq, "span completion square")?;
        return Ok((sq.bottom.clone(), sq.clone(), sq));
    }
    let sq1 = m.canonical_square(v, f, wb_for(m, v, f, wb))?;
    certify_output(m, &sq1, "first span completion")?;
    let sq2 = m.canonical_square(v, g, wb_for(m, v, g, wb))?;
    certify_output(m, &sq2, "second span completion")?;
    let w1 = &sq1.bottom;
    let w2 = &sq2.bottom;
    let sq3 = m.canonical_square(w1, w2, wb_for(m, w1, w2, wb))?;
    certify_output(m, &sq3, "completion of the two bottoms")?;
    let (through, along) = rule2_3_derive(m, &sq3)?;
    let left = vcompose_squares(m, &through, &sq1)?;
    let right = vcompose_squares(m, &along, &sq2)?;
    debug_assert_eq!(left.bottom, right.bottom);
    Ok((left.bottom.clone(), left, right))
}

/// Output of [`rule6_insert`].
#[derive(Debug)]
pub struct Rule6Output<M: TwoCatModel> {
    pub w: M::One,
    pub square_f: SquareOf<M>,
    pub square_g: SquareOf<M>,
    pub beta_prime: M::Two,
}

impl<M: TwoCatModel> Clone for Rule6Output<M> {
    fn clone(&self) -> Self {
        Rule6Output {
            w: self.w.clone(),
            square_f: self.square_f.clone(),
            square_g: self.square_g.clone(),
            beta_prime: self.beta_prime.clone(),
        }
    }
}

/// Pushes a 2-cell `beta: f ⇒ g` through a Σ-arrow `v`: produces Σ-squares
/// `(f, f′, δ): v → w`, `(g, g′, ε): v → w` and `beta′: f′ ⇒ g′` with
/// `(beta′∘v)·δ = ε·(w∘beta)`.
pub fn rule6_insert<M: TwoCatModel>(
    m: &M,
    v: &M::One,
    f: &M::One,
    g: &M::One,
    beta: &M::Two,
    wb: Option<usize>,
) -> Result<Rule6Output<M>, RuleError> {
    if m.src2(beta) != *f || m.tgt2(beta) != *g {
        return Err(RuleError::Boundary("cell must run f ⇒ g".into()));
    }
    if m.eq2(beta, &m.id2(f)) {
        let (w, sq, _) = rule5_double_square(m, v, f, g, wb)?;
        let beta_prime = m.id2(&sq.right);
        return Ok(Rule6Output { w, square_f: sq.clone(), square_g: sq, beta_prime });
    }
    let (w_bar, sq_f, sq_g) = rule5_double_square(m, v, f, g, wb)?;
    let delta_inv = m
        .invert2(&sq_f.cell)
        .ok_or_else(|| RuleError::Unsupported("completion cell not invertible".into()))?;
    // μ: f̄∘v ⇒ ḡ∘v.
    let mu = vcomp(m, &sq_g.cell, &vcomp(m, &wpost(m, &w_bar, beta), &delta_inv));
    let bound = wb_for(m, &w_bar, &sq_f.right, wb);
    let (d, beta_prime) = m.witness_equi_insertion(&sq_f, &sq_g.right, &mu, bound)?;
    let v_d = vertical_square(m, &w_bar, &d)?;
    certify_output(m, &v_d, "equi-insertion square")?;
    let square_f = vcompose_squares(m, &v_d, &sq_f)?;
    let square_g = vcompose_squares(m, &v_d, &sq_g)?;
    let w = square_f.bottom.clone();
    // (β′∘v)·δ = ε·(w∘β).
    let lhs = vcomp(m, &wpre(m, &beta_prime, v), &square_f.cell);
    let rhs = vcomp(m, &square_g.cell, &wpost(m, &w, beta));
    if !m.eq2(&lhs, &rhs) {
        return Err(RuleError::Unsupported("insertion law failed".into()));
    }
    Ok(Rule6Output { w, square_f, square_g, beta_prime })
}

/// Enumerates Σ-squares of the model in a canonical, size-biased order
/// (object index sums ascending, then lexicographic), stopping at `limit`.
pub fn enumerate_sigma_squares<M: TwoCatModel>(m: &M, limit: usize) -> Vec<SquareOf<M>> {
    let objects = m.objects();
    let n = objects.len();
    let mut out = Vec::new();
    if n == 0 || limit == 0 {
        return out;
    }
    let max_total = 4 * (n - 1);
    for total in 0..=max_total {
        for ia in 0..n.min(total + 1) {
            for ib in 0..n {
                if ia + ib > total {
                    break;
                }
                for ic in 0..n {
                    if ia + ib + ic > total {
                        break;
                    }
                    let id = total - ia - ib - ic;
                    if id >= n {
                        continue;
                    }
                    let (a, b, c, d) = (&objects[ia], &objects[ib], &objects[ic], &objects[id]);
                    for top in m.one_cells(a, b) {
                        if !m.in_sigma(&top) {
                            continue;
                        }
                        for bottom in m.one_cells(c, d) {
                            if !m.in_sigma(&bottom) {
                                continue;
                            }
                            for left in m.one_cells(a, c) {
                                let around = comp(m, &bottom, &left);
                                for right in m.one_cells(b, d) {
                                    let across = comp(m, &right, &top);
                                    for cell in m.two_cells(&around, &across) {
                                        let sq = Square {
                                            top: top.clone(),
                                            left: left.clone(),
                                            right: right.clone(),
                                            bottom: bottom.clone(),
                                            cell,
                                        };
                                        if m.is_invertible2(&sq.cell)
                                            && m.square_in_sigma(&sq)
                                        {
                                            out.push(sq);
                                            if out.len() == limit {
                                                return out;
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Budgets and bounds of [`check_axioms`]. Instance truncation is recorded
/// in the report, never silent.
#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub witness_bound: Option<usize>,
    /// Cap on the Σ-square enumeration shared by the pasting and
    /// insertion/equification axioms.
    pub max_squares: usize,
    /// Cap on checked instances per axiom.
    pub max_instances: usize,
}

impl Default for CheckConfig {
    fn default() -> CheckConfig {
        CheckConfig { witness_bound: None, max_squares: 2000, max_instances: 50_000 }
    }
}

/// One row of the axiom report.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub pass: bool,
    pub instances: usize,
    pub truncated: bool,
    pub bound_exhausted: usize,
    pub failures: Vec<String>,
}

struct RowState {
    instances: usize,
    truncated: bool,
    bound_exhausted: usize,
    failures: Vec<String>,
    budget: usize,
}

impl RowState {
    fn new(budget: usize) -> RowState {
        RowState { instances: 0, truncated: false, bound_exhausted: 0, failures: Vec::new(), budget }
    }

    /// Returns false once the budget is exhausted.
    fn admit(&mut self) -> bool {
        if self.instances == self.budget {
            self.truncated = true;
            return false;
        }
        self.instances += 1;
        true
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < 5 {
            self.failures.push(msg);
        } else if self.failures.len() == 5 {
            self.failures.push("… further failures suppressed".into());
        }
    }

    fn finish(self, name: &str) -> AxiomCheck {
        AxiomCheck {
            name: name.into(),
            pass: self.failures.is_empty() && self.bound_exhausted == 0,
            instances: self.instances,
            truncated: self.truncated,
            bound_exhausted: self.bound_exhausted,
            failures: self.failures,
        }
    }
}

/// Checks the calculus axioms (and the two preamble closure conditions) on
/// every enumerable instance within the configured budgets. Existential
/// axioms call the model's witness providers and re-validate their outputs;
/// a `BoundExhausted` from a provider is counted and fails the row.
pub fn check_axioms<M: TwoCatModel>(m: &M, cfg: &CheckConfig) -> Vec<AxiomCheck> {
    let objects = m.objects();
    let squares = enumerate_sigma_squares(m, cfg.max_squares);
    let mut report = Vec::new();

    // Σ-arrows closed under composition.
    let mut row = RowState::new(cfg.max_instances);
    'p1: for a in &objects {
        for b in &objects {
            for r in m.one_cells(a, b).into_iter().filter(|r| m.in_sigma(r)) {
                for c in &objects {
                    for s in m.one_cells(b, c).into_iter().filter(|s| m.in_sigma(s)) {
                        if !row.admit() {
                            break 'p1;
                        }
                        let sr = comp(m, &s, &r);
                        if !m.in_sigma(&sr) {
                            row.fail(format!("{sr:?} = {s:?}∘{r:?} left Σ"));
                        }
                    }
                }
            }
        }
    }
    report.push(row.finish("Axiom preamble: Σ-arrows closed under composition"));

    // Σ-squares closed under vertical pasting.
    let mut row = RowState::new(cfg.max_instances);
    'p2: for q1 in &squares {
        for q2 in &squares {
            if q2.top != q1.bottom {
                continue;
            }
            if !row.admit() {
                break 'p2;
            }
            match paste_vertical(m, q2, q1) {
                Ok(sq) => {
                    let check = validate_square(m, &sq);
                    if !check.ok {
                        row.fail(format!(
                            "vertical paste failed ({}) on {q1:?} then {q2:?}",
                            check.diagnosis.unwrap_or_default()
                        ));
                    }
                }
                Err(e) => row.fail(format!("pasting errored: {e}")),
            }
        }
    }
    report.push(row.finish("Axiom preamble: Σ-squares closed under vertical pasting"));

    // Identity.
    let mut row = RowState::new(cfg.max_instances);
    for a in &objects {
        if !row.admit() {
            break;
        }
        let id = m.id1(a);
        if !m.in_sigma(&id) {
            row.fail(format!("identity on {a:?} not in Σ"));
        }
    }
    'a1: for a in &objects {
        for b in &objects {
            for s in m.one_cells(a, b).into_iter().filter(|s| m.in_sigma(s)) {
                if !row.admit() {
                    break 'a1;
                }
                let sq = Square {
                    top: m.id1(a),
                    left: m.id1(a),
                    right: s.clone(),
                    bottom: s.clone(),
                    cell: m.id2(&s),
                };
                if !validate_square(m, &sq).ok {
                    row.fail(format!("degenerate identity square on {s:?} not in Σ"));
                }
            }
        }
    }
    report.push(row.finish("Axiom 1: identity"));

    // Repletion.
    let mut row = RowState::new(cfg.max_instances);
    'a2: for a in &objects {
        for b in &objects {
            let homs = m.one_cells(a, b);
            for r in homs.iter().filter(|r| m.in_sigma(r)) {
                for s in &homs {
                    for delta in m.two_cells(r, s) {
                        if !m.is_invertible2(&delta) {
                            continue;
                        }
                        if !row.admit() {
                            break 'a2;
                        }
                        if !m.in_sigma(s) {
                            row.fail(format!(
                                "{s:?} invertibly isomorphic to Σ-arrow {r:?} but not in Σ"
                            ));
                            continue;
                        }
                        let sq = Square {
                            top: s.clone(),
                            left: m.id1(a),
                            right: m.id1(b),
                            bottom: r.clone(),
                            cell: delta,
                        };
                        if !validate_square(m, &sq).ok {
                            row.fail(format!("repletion square {r:?} ⇒ {s:?} not in Σ"));
                        }
                    }
                }
            }
            // Horizontal repletion: invertible cells become Σ-squares
            // between identities.
            for f in &homs {
                for g in &homs {
                    for gamma in m.two_cells(f, g) {
                        if !m.is_invertible2(&gamma) {
                            continue;
                        }
                        if !row.admit() {
                            break 'a2;
                        }
                        let sq = Square {
                            top: m.id1(a),
                            left: f.clone(),
                            right: g.clone(),
                            bottom: m.id1(b),
                            cell: gamma,
                        };
                        if !validate_square(m, &sq).ok {
                            row.fail(format!(
                                "invertible cell {f:?} ⇒ {g:?} gives no Σ-square of identities"
                            ));
                        }
                    }
                }
            }
        }
    }
    report.push(row.finish("Axiom 2: repletion"));

    // Composition (horizontal pasting).
    let mut row = RowState::new(cfg.max_instances);
    'a3: for q1 in &squares {
        for q3 in &squares {
            if q3.left != q1.right {
                continue;
            }
            if !row.admit() {
                break 'a3;
            }
            match paste_horizontal(m, q1, q3) {
                Ok(sq) => {
                    let check = validate_square(m, &sq);
                    if !check.ok {
                        row.fail(format!(
                            "horizontal paste failed ({}) on {q1:?} with {q3:?}",
                            check.diagnosis.unwrap_or_default()
                        ));
                    }
                }
                Err(e) => row.fail(format!("pasting errored: {e}")),
            }
        }
    }
    report.push(row.finish("Axiom 3: composition"));

    // Square (span completion).
    let mut row = RowState::new(cfg.max_instances);
    'a4: for a in &objects {
        for b in &objects {
            for s in m.one_cells(a, b).into_iter().filter(|s| m.in_sigma(s)) {
                for c in &objects {
                    for f in m.one_cells(a, c) {
                        if !row.admit() {
                            break 'a4;
                        }
                        let bound = wb_for(m, &s, &f, cfg.witness_bound);
                        match m.witness_square(&s, &f, bound) {
                            Ok(sq) => {
                                let check = validate_square(m, &sq);
                                if !check.ok {
                                    row.fail(format!(
                                        "witness for ({f:?}, {s:?}) invalid ({})",
                                        check.diagnosis.unwrap_or_default()
                                    ));
                                } else if sq.top != s || sq.left != f {
                                    row.fail(format!(
                                        "witness for ({f:?}, {s:?}) has the wrong frame"
                                    ));
                                }
                            }
                            Err(RuleError::BoundExhausted { .. }) => {
                                row.bound_exhausted += 1;
                                row.fail(format!(
                                    "no completion of ({f:?}, {s:?}) within bound {bound}"
                                ));
                            }
                            Err(e) => row.fail(format!("witness search errored: {e}")),
                        }
                    }
                }
            }
        }
    }
    report.push(row.finish("Axiom 4: square"));

    // Equi-insertion.
    let mut row = RowState::new(cfg.max_instances);
    'a5: for sq in &squares {
        let r = &sq.top;
        let f_prime = &sq.right;
        let fr = comp(m, f_prime, r);
        for g in m.one_cells(&m.dom(f_prime), &m.cod(f_prime)) {
            let gr = comp(m, &g, r);
            for alpha in m.two_cells(&fr, &gr) {
                if !row.admit() {
                    break 'a5;
                }
                let bound = wb_for(m, &sq.bottom, f_prime, cfg.witness_bound);
                match m.witness_equi_insertion(sq, &g, &alpha, bound) {
                    Ok((d, alpha_prime)) => {
                        let ok = vertical_square(m, &sq.bottom, &d)
                            .map(|v| validate_square(m, &v).ok)
                            .unwrap_or(false)
                            && m.src2(&alpha_prime) == comp(m, &d, f_prime)
                            && m.tgt2(&alpha_prime) == comp(m, &d, &g)
                            && m.eq2(&wpost(m, &d, &alpha), &wpre(m, &alpha_prime, r));
                        if !ok {
                            row.fail(format!(
                                "equi-insertion witness invalid on {sq:?} with g = {g:?}"
                            ));
                        }
                    }
                    Err(RuleError::BoundExhausted { .. }) => {
                        row.bound_exhausted += 1;
                        row.fail(format!("equi-insertion exhausted on {sq:?} with g = {g:?}"));
                    }
                    Err(e) => row.fail(format!("equi-insertion errored: {e}")),
                }
            }
        }
    }
    report.push(row.finish("Axiom 5: equi-insertion"));

    // Equification.
    let mut row = RowState::new(cfg.max_instances);
    'a6: for sq in &squares {
        let r = &sq.top;
        let f_prime = &sq.right;
        for g in m.one_cells(&m.dom(f_prime), &m.cod(f_prime)) {
            let cells = m.two_cells(f_prime, &g);
            for alpha in &cells {
                for beta in &cells {
                    if !m.eq2(&wpre(m, alpha, r), &wpre(m, beta, r)) {
                        continue;
                    }
                    if !row.admit() {
                        break 'a6;
                    }
                    let bound = wb_for(m, &sq.bottom, f_prime, cfg.witness_bound);
                    match m.witness_equification(sq, &g, alpha, beta, bound) {
                        Ok(d) => {
                            let ok = vertical_square(m, &sq.bottom, &d)
                                .map(|v| validate_square(m, &v).ok)
                                .unwrap_or(false)
                                && m.eq2(&wpost(m, &d, alpha), &wpost(m, &d, beta));
                            if !ok {
                                row.fail(format!("equification witness invalid on {sq:?}"));
                            }
                        }
                        Err(RuleError::BoundExhausted { .. }) => {
                            row.bound_exhausted += 1;
                            row.fail(format!("equification exhausted on {sq:?}"));
                        }
                        Err(e) => row.fail(format!("equification errored: {e}")),
                    }
                }
            }
        }
    }
    report.push(row.finish("Axiom 6: equification"));

    report
}

/// True iff every row passed.
pub fn all_pass(report: &[AxiomCheck]) -> bool {
    report.iter().all(|r| r.pass)
}
