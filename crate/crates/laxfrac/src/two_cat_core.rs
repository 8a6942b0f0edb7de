//! Abstract interface of a finite 2-category model with a chosen square class Σ.
//!
//! A model provides: enumerable objects, 1-cells and 2-cells; strict
//! composition and whiskering; decidable 2-cell equality and invertibility;
//! the Σ membership predicates for 1-cells and squares; and witness providers
//! for the three existential axioms (Square, Equi-insertion, Equification).
//! Everything downstream — the derived rules, the fraction bicategory, the
//! coherence engine — is generic over this trait.
//!
//! Orientation conventions used throughout the crate:
//!
//! * a square `(u, v, δ): r → s` has top `r: B→I`, left `u: B→B'`,
//!   right `v: I→I'`, bottom `s: B'→I'`, and cell `δ: s∘u ⇒ v∘r`;
//! * `comp1(g, f)` is `g∘f` (apply `f` first);
//! * `whisker_post(g, α) = g∘α` and `whisker_pre(α, f) = α∘f`.

use std::fmt::Debug;

use thiserror::Error;

/// Composition attempted on cells whose boundaries do not chain.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("boundary mismatch: {context}")]
pub struct BoundaryError {
    pub context: String,
}

impl BoundaryError {
    pub fn new(context: impl Into<String>) -> Self {
        BoundaryError { context: context.into() }
    }
}

/// Failure modes of witness providers and derived rules.
///
/// `BoundExhausted` means a search ran out of room and may succeed with a
/// larger bound; `Precondition` means the rule's hypothesis does not hold and
/// retrying is pointless. The two must never be conflated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("search bound exhausted: {context} (bound {bound})")]
    BoundExhausted { context: String, bound: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("boundary mismatch: {0}")]
    Boundary(String),
    /// A construction the bundled model families never reach; reported rather
    /// than silently guessed when a future model defeats the known recipes.
    #[error("construction not supported for this model: {0}")]
    Unsupported(String),
}

impl From<BoundaryError> for RuleError {
    fn from(e: BoundaryError) -> Self {
        RuleError::Boundary(e.context)
    }
}

/// A square of the arrow category: top and bottom are the source and target
/// 1-cells, `cell: bottom∘left ⇒ right∘top` is the (invertible, for Σ
/// membership) comparison 2-cell.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Square<O, T> {
    pub top: O,
    pub left: O,
    pub right: O,
    pub bottom: O,
    pub cell: T,
}

/// `Square` instantiated at a model's cell types.
pub type SquareOf<M> =
    Square<<M as TwoCatModel>::One, <M as TwoCatModel>::Two>;

/// A finite 2-category with a designated class Σ of arrows and squares.
///
/// Models are immutable after construction; all operations are pure, and all
/// enumerations are in a canonical deterministic order (so that "first
/// witness found" is a well-defined, replayable notion).
pub trait TwoCatModel {
    type Obj: Clone + Ord + Debug;
    type One: Clone + Ord + Debug;
    type Two: Clone + Ord + Debug;

    /// All objects, canonically ordered. For models with a size-graded object
    /// universe this is the default verification fragment, not the largest
    /// object that can appear inside witnesses.
    fn objects(&self) -> Vec<Self::Obj>;
    fn one_cells(&self, a: &Self::Obj, b: &Self::Obj) -> Vec<Self::One>;
    /// All 2-cells `f ⇒ g` (empty unless `f`, `g` are parallel).
    fn two_cells(&self, f: &Self::One, g: &Self::One) -> Vec<Self::Two>;

    fn dom(&self, f: &Self::One) -> Self::Obj;
    fn cod(&self, f: &Self::One) -> Self::Obj;
    fn src2(&self, a: &Self::Two) -> Self::One;
    fn tgt2(&self, a: &Self::Two) -> Self::One;

    fn id1(&self, a: &Self::Obj) -> Self::One;
    fn id2(&self, f: &Self::One) -> Self::Two;

    fn comp1(&self, g: &Self::One, f: &Self::One) -> Result<Self::One, BoundaryError>;
    fn vcomp2(&self, b: &Self::Two, a: &Self::Two) -> Result<Self::Two, BoundaryError>;
    fn whisker_post(&self, g: &Self::One, a: &Self::Two) -> Result<Self::Two, BoundaryError>;
    fn whisker_pre(&self, a: &Self::Two, f: &Self::One) -> Result<Self::Two, BoundaryError>;

    fn eq2(&self, a: &Self::Two, b: &Self::Two) -> bool {
        a == b
    }
    fn invert2(&self, a: &Self::Two) -> Option<Self::Two>;
    fn is_invertible2(&self, a: &Self::Two) -> bool {
        self.invert2(a).is_some()
    }

    /// Σ membership for 1-cells (the objects of the square class).
    fn in_sigma(&self, f: &Self::One) -> bool;
    /// Σ membership for squares. May assume the boundary sanity that
    /// `sigma_calculus::validate_square` checks, but must itself verify the
    /// model-specific condition (and is the ground truth for it).
    fn square_in_sigma(&self, sq: &SquareOf<Self>) -> bool;

    /// Whether this model's searches decide existence exactly (never
    /// `Undetermined`) at the bounds it uses internally.
    fn searches_complete(&self) -> bool;

    /// Square axiom witness: for a span `(f, s)` with `s ∈ Σ` and
    /// `dom f = dom s`, a Σ-square with top `s` and left `f`.
    fn witness_square(
        &self,
        s: &Self::One,
        f: &Self::One,
        bound: usize,
    ) -> Result<SquareOf<Self>, RuleError>;

    /// Equi-insertion witness: given a Σ-square `(f, f', δ): r → s` and
    /// `α: f'∘r ⇒ g∘r`, some `d` with `(1, d, id): s → d∘s` in Σ and
    /// `α': d∘f' ⇒ d∘g` satisfying `d∘α = α'∘r`.
    fn witness_equi_insertion(
        &self,
        sq: &SquareOf<Self>,
        g: &Self::One,
        alpha: &Self::Two,
        bound: usize,
    ) -> Result<(Self::One, Self::Two), RuleError>;

    /// Equification witness: given a Σ-square `(f, f', δ): r → s` and
    /// parallel `α, β: f' ⇒ g` with `α∘r = β∘r`, some `d` with
    /// `(1, d, id): s → d∘s` in Σ and `d∘α = d∘β`.
    fn witness_equification(
        &self,
        sq: &SquareOf<Self>,
        g: &Self::One,
        alpha: &Self::Two,
        beta: &Self::Two,
        bound: usize,
    ) -> Result<Self::One, RuleError>;

    /// The pre-chosen canonical Σ-square over a span `(r ∈ Σ, f)`: top `r`,
    /// left `f`. Required normalizations (they make composition of fraction
    /// 1-cells strictly unital):
    ///
    /// * `f` an identity → the square `(1, 1, id): r → r`;
    /// * `r` an identity → the square `(f, f, id): 1 → 1`.
    ///
    /// Must be deterministic per `(r, f)`; models memoize it.
    fn canonical_square(
        &self,
        r: &Self::One,
        f: &Self::One,
        bound: usize,
    ) -> Result<SquareOf<Self>, RuleError>;

    /// Default codomain-size bound for witness searches over the span
    /// `(f, s)` out of a common source. Models scale this with the sizes of
    /// the two target objects so nested constructions get proportional room.
    fn default_witness_bound(&self, s: &Self::One, f: &Self::One) -> usize;
}

/// Convenience: composition asserting that boundaries were already checked.
/// Used internally where chaining is guaranteed by construction; failures
/// indicate a bug, so they panic with the boundary context.
pub fn comp<M: TwoCatModel + ?Sized>(m: &M, g: &M::One, f: &M::One) -> M::One {
    m.comp1(g, f).expect("composite of pre-checked 1-cells")
}

/// See [`comp`]; vertical composition of pre-checked 2-cells.
pub fn vcomp<M: TwoCatModel + ?Sized>(m: &M, b: &M::Two, a: &M::Two) -> M::Two {
    m.vcomp2(b, a).expect("vertical composite of pre-checked 2-cells")
}

/// See [`comp`]; post-whiskering `g∘α` of pre-checked cells.
pub fn wpost<M: TwoCatModel + ?Sized>(m: &M, g: &M::One, a: &M::Two) -> M::Two {
    m.whisker_post(g, a).expect("post-whisker of pre-checked cells")
}

/// See [`comp`]; pre-whiskering `α∘f` of pre-checked cells.
pub fn wpre<M: TwoCatModel + ?Sized>(m: &M, a: &M::Two, f: &M::One) -> M::Two {
    m.whisker_pre(a, f).expect("pre-whisker of pre-checked cells")
}
