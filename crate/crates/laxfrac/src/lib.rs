//! # laxfrac
//!
//! Constructs the bicategory of lax fractions 𝒳[Σ*] from a finite 2-category
//! model 𝒳 together with a chosen class Σ of squares of its arrow category,
//! and verifies — by enumeration, bounded witness search, and seeded sampling —
//! the axioms of the calculus, the coherence laws of the construction, and the
//! agreement with an independent classical localization oracle on models with
//! trivial 2-cells.
//!
//! The layers, bottom to top:
//!
//! * [`two_cat_core`] — the abstract interface every finite 2-category model
//!   implements: enumeration, composition, whiskering, invertibility, the Σ
//!   predicates, and the witness providers for the existential axioms.
//! * [`models`] — the two concrete model families: finite posets with
//!   order-enriched 2-cells and embedding squares, and finite categories with
//!   trivial 2-cells and a designated fraction class.
//! * [`sigma_calculus`] — Σ-squares as data, the six calculus axioms as
//!   checkable predicates, pasting, and the derived rules used everywhere else.
//! * [`lax_fractions`] — Σ-cospans, 2-morphisms, the ≈ relation, vertical and
//!   horizontal composition, associators and unitors: the bicategory itself.
//! * [`omega_paths`] — pasting schemes, replacement steps, the induced Ω
//!   2-cells, path equivalence, and canonical paths: the coherence engine.
//! * [`universal`] — the localization pseudofunctor, lari detection, mates,
//!   and Beck–Chevalley verification.
//! * [`gz_oracle`] — classical category-of-fractions localization for
//!   trivial-2-cell models, used as independent ground truth.

pub mod lax_fractions;
pub mod models;
pub mod omega_paths;
pub mod sigma_calculus;
pub mod two_cat_core;
pub mod universal;
pub mod gz_oracle;

pub use two_cat_core::{BoundaryError, RuleError, Square, TwoCatModel};
