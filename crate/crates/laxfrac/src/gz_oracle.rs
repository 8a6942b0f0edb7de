//! Classical localization by left fractions for finite categories with
//! trivial 2-cells, used as independent ground truth for the fraction
//! engine.
//!
//! The construction here shares nothing with the 2-dimensional machinery:
//! hom-sets are equivalence classes of cospans under exhaustive amalgamation
//! search, composition goes through the first span completion in enumeration
//! order, and every decision is complete on a finite category rather than
//! bounded. Agreement between [`ClassicalLocalization`] and the engine's
//! [`hom_category`](crate::lax_fractions::Engine::hom_category) output is
//! what [`compare_hom`] certifies.

use std::collections::BTreeMap;
use std::fmt;

use crate::lax_fractions::Engine;
use crate::models::fincat::{FiniteCategorySpec, SpecError, TrivialModel};
use crate::two_cat_core::{comp, TwoCatModel};

/// A cospan `(left: A→X, right: B→X)` with `right` in the fraction class,
/// representing the formal composite `right⁻¹∘left : A → B`.
pub type Fraction = (u8, u8);

/// Why a category admits no left-fraction localization for its chosen
/// class, with the offending arrows by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotLocalizable {
    /// An object whose identity is outside the fraction class.
    MissingIdentity {
        /// The object's name.
        object: String,
    },
    /// Composable fraction arrows whose composite left the class.
    NotClosed {
        /// The first arrow applied.
        inner: String,
        /// The second arrow applied.
        outer: String,
    },
    /// A span `(fraction, arrow)` out of a common source admitting no
    /// commuting cospan completion with a fraction arrow opposite the
    /// original fraction.
    OreFails {
        /// The fraction leg of the span.
        fraction: String,
        /// The plain leg of the span.
        arrow: String,
    },
    /// Parallel arrows equalized by precomposing a fraction arrow but by no
    /// postcomposed fraction arrow.
    CancellationFails {
        /// The equalizing fraction arrow.
        fraction: String,
        /// First of the parallel pair.
        first: String,
        /// Second of the parallel pair.
        second: String,
    },
}

impl fmt::Display for NotLocalizable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotLocalizable::MissingIdentity { object } => {
                write!(f, "identity on `{object}` is not a fraction arrow")
            }
            NotLocalizable::NotClosed { inner, outer } => {
                write!(f, "`{outer}` ∘ `{inner}` leaves the fraction class")
            }
            NotLocalizable::OreFails { fraction, arrow } => write!(
                f,
                "span (`{fraction}`, `{arrow}`) has no commuting completion with a fraction arrow"
            ),
            NotLocalizable::CancellationFails { fraction, first, second } => write!(
                f,
                "`{first}` and `{second}` agree after `{fraction}` but no fraction arrow equalizes them"
            ),
        }
    }
}

/// Errors from [`localize_classical`]: a malformed category description or
/// a fraction class violating the classical axioms.
#[derive(Debug)]
pub enum OracleError {
    /// The category description failed validation.
    Spec(SpecError),
    /// The axioms failed, with a witness.
    NotLocalizable(NotLocalizable),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Spec(e) => write!(f, "{e}"),
            OracleError::NotLocalizable(w) => write!(f, "not localizable: {w}"),
        }
    }
}

impl std::error::Error for OracleError {}

/// One localized hom-set: the cospans in enumeration order and their
/// partition into amalgamation classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionHom {
    /// Every cospan `(left, right)` with `right` a fraction arrow.
    pub cospans: Vec<Fraction>,
    /// Class index of each cospan, numbered by first appearance.
    pub class_of: Vec<usize>,
    /// Number of distinct classes.
    pub class_count: usize,
}

/// The category of left fractions of a finite category at a class
/// satisfying the classical axioms: every hom-set fully enumerated and
/// partitioned by exhaustive amalgamation.
pub struct ClassicalLocalization {
    model: TrivialModel,
    homs: BTreeMap<(u8, u8), FractionHom>,
}

impl fmt::Debug for ClassicalLocalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassicalLocalization")
            .field("objects", &self.model.object_count())
            .field("homs", &self.homs)
            .finish()
    }
}

/// Checks the classical left-fraction axioms by enumeration: identities in
/// the class, closure under composition, span completion, and cancellation.
pub fn check_classical_axioms(m: &TrivialModel) -> Result<(), NotLocalizable> {
    let arrows: Vec<u8> = (0..m.morphism_count() as u8).collect();
    for a in m.objects() {
        if !m.in_sigma(&m.id1(&a)) {
            return Err(NotLocalizable::MissingIdentity { object: m.object_name(a).into() });
        }
    }
    for &s in arrows.iter().filter(|&&s| m.in_sigma(&s)) {
        for &t in arrows.iter().filter(|&&t| m.in_sigma(&t)) {
            if m.dom(&t) == m.cod(&s) && !m.in_sigma(&comp(m, &t, &s)) {
                return Err(NotLocalizable::NotClosed {
                    inner: m.morphism_name(s).into(),
                    outer: m.morphism_name(t).into(),
                });
            }
        }
    }
    for &s in arrows.iter().filter(|&&s| m.in_sigma(&s)) {
        for &f in arrows.iter().filter(|&&f| m.dom(&f) == m.dom(&s)) {
            let completed = arrows
                .iter()
                .filter(|&&g| m.dom(&g) == m.cod(&s))
                .any(|&g| {
                    arrows.iter().any(|&t| {
                        m.in_sigma(&t)
                            && m.dom(&t) == m.cod(&f)
                            && m.cod(&t) == m.cod(&g)
                            && comp(m, &g, &s) == comp(m, &t, &f)
                    })
                });
            if !completed {
                return Err(NotLocalizable::OreFails {
                    fraction: m.morphism_name(s).into(),
                    arrow: m.morphism_name(f).into(),
                });
            }
        }
    }
    for &s in arrows.iter().filter(|&&s| m.in_sigma(&s)) {
        for &f in arrows.iter().filter(|&&f| m.dom(&f) == m.cod(&s)) {
            for &g in arrows
                .iter()
                .filter(|&&g| m.dom(&g) == m.cod(&s) && m.cod(&g) == m.cod(&f))
            {
                if f == g || comp(m, &f, &s) != comp(m, &g, &s) {
                    continue;
                }
                let equalized = arrows.iter().any(|&t| {
                    m.in_sigma(&t)
                        && m.dom(&t) == m.cod(&f)
                        && comp(m, &t, &f) == comp(m, &t, &g)
                });
                if !equalized {
                    return Err(NotLocalizable::CancellationFails {
                        fraction: m.morphism_name(s).into(),
                        first: m.morphism_name(f).into(),
                        second: m.morphism_name(g).into(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Whether two cospans out of the same source/target pair amalgamate: some
/// pair of arrows out of their apexes merges them into one cospan whose
/// joined right leg is a fraction arrow.
fn amalgamated(m: &TrivialModel, (f, s): Fraction, (g, t): Fraction) -> bool {
    let arrows = 0..m.morphism_count() as u8;
    for u in arrows.clone().filter(|u| m.dom(u) == m.cod(&f)) {
        if !m.in_sigma(&comp(m, &u, &s)) {
            continue;
        }
        for v in arrows.clone().filter(|v| m.dom(v) == m.cod(&g)) {
            if m.cod(&v) == m.cod(&u)
                && comp(m, &u, &f) == comp(m, &v, &g)
                && comp(m, &u, &s) == comp(m, &v, &t)
            {
                return true;
            }
        }
    }
    false
}

/// Builds the classical localization of a category description, first
/// checking the axioms by enumeration.
pub fn localize_classical(spec: &FiniteCategorySpec) -> Result<ClassicalLocalization, OracleError> {
    let model = TrivialModel::from_spec(spec).map_err(OracleError::Spec)?;
    check_classical_axioms(&model).map_err(OracleError::NotLocalizable)?;
    let arrows: Vec<u8> = (0..model.morphism_count() as u8).collect();
    let mut homs = BTreeMap::new();
    for a in model.objects() {
        for b in model.objects() {
            let mut cospans = Vec::new();
            for &left in arrows.iter().filter(|&&f| model.dom(&f) == a) {
                for &right in arrows.iter().filter(|&&s| {
                    model.dom(&s) == b && model.in_sigma(&s) && model.cod(&s) == model.cod(&left)
                }) {
                    cospans.push((left, right));
                }
            }
            // Union-find over the amalgamation relation; the axioms make the
            // relation transitive, and the union keeps the output a
            // partition regardless.
            let mut parent: Vec<usize> = (0..cospans.len()).collect();
            fn find(parent: &mut Vec<usize>, i: usize) -> usize {
                if parent[i] != i {
                    let root = find(parent, parent[i]);
                    parent[i] = root;
                }
                parent[i]
            }
            for i in 0..cospans.len() {
                for j in i + 1..cospans.len() {
                    if amalgamated(&model, cospans[i], cospans[j]) {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        if ri != rj {
                            parent[rj] = ri;
                        }
                    }
                }
            }
            let mut class_of = vec![usize::MAX; cospans.len()];
            let mut seen: Vec<usize> = Vec::new();
            for i in 0..cospans.len() {
                let root = find(&mut parent, i);
                let idx = match seen.iter().position(|&r| r == root) {
                    Some(idx) => idx,
                    None => {
                        seen.push(root);
                        seen.len() - 1
                    }
                };
                class_of[i] = idx;
            }
            homs.insert(
                (a, b),
                FractionHom { cospans, class_of, class_count: seen.len() },
            );
        }
    }
    Ok(ClassicalLocalization { model, homs })
}

impl ClassicalLocalization {
    /// The validated category the localization was built from.
    pub fn model(&self) -> &TrivialModel {
        &self.model
    }

    /// The localized hom-set from `a` to `b`.
    pub fn hom(&self, a: u8, b: u8) -> &FractionHom {
        &self.homs[&(a, b)]
    }

    /// Class index of a cospan in its hom-set, if the cospan is one of the
    /// enumerated ones.
    pub fn class_of(&self, a: u8, b: u8, frac: Fraction) -> Option<usize> {
        let hom = self.hom(a, b);
        let pos = hom.cospans.iter().position(|&c| c == frac)?;
        Some(hom.class_of[pos])
    }

    /// Whether two cospans represent the same localized morphism.
    pub fn equivalent(&self, a: u8, b: u8, x: Fraction, y: Fraction) -> bool {
        match (self.class_of(a, b, x), self.class_of(a, b, y)) {
            (Some(cx), Some(cy)) => cx == cy,
            _ => false,
        }
    }

    /// Image of a base arrow `f: A → B` in the localization: the cospan
    /// `(f, 1_B)`.
    pub fn image_of_arrow(&self, f: u8) -> Fraction {
        (f, self.model.id1(&self.model.cod(&f)))
    }

    /// Composite of `second: B → C` after `first: A → B` through the first
    /// span completion in enumeration order.
    pub fn compose(&self, second: Fraction, first: Fraction) -> Option<Fraction> {
        let m = &self.model;
        let arrows: Vec<u8> = (0..m.morphism_count() as u8).collect();
        let (f1, s1) = first;
        let (f2, s2) = second;
        for &g in arrows.iter().filter(|&&g| m.dom(&g) == m.cod(&s1)) {
            for &t in arrows.iter().filter(|&&t| {
                m.in_sigma(&t) && m.dom(&t) == m.cod(&f2) && m.cod(&t) == m.cod(&g)
            }) {
                if comp(m, &g, &s1) == comp(m, &t, &f2) {
                    return Some((comp(m, &g, &f1), comp(m, &t, &s2)));
                }
            }
        }
        None
    }

    /// Whether a localized morphism is invertible: some cospan the other way
    /// composes with it to identity classes on both sides.
    pub fn is_invertible(&self, a: u8, b: u8, frac: Fraction) -> bool {
        let id_a = self.image_of_arrow(self.model.id1(&a));
        let id_b = self.image_of_arrow(self.model.id1(&b));
        self.hom(b, a).cospans.iter().any(|&cand| {
            let back = self.compose(cand, frac);
            let forth = self.compose(frac, cand);
            matches!(
                (back, forth),
                (Some(ba), Some(fo))
                    if self.equivalent(a, a, ba, id_a) && self.equivalent(b, b, fo, id_b)
            )
        })
    }
}

/// Comparison of one hom-set between the engine and the oracle: the same
/// cospans must appear, and the engine's "some 2-morphism exists" relation
/// must induce exactly the oracle's partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomComparison {
    /// Source object name.
    pub source: String,
    /// Target object name.
    pub target: String,
    /// Number of engine-side classes of cospans.
    pub engine_classes: usize,
    /// Number of oracle-side amalgamation classes.
    pub oracle_classes: usize,
    /// Whether the identification is a bijection with no mismatches.
    pub bijective: bool,
    /// Human-readable discrepancies, empty when bijective.
    pub mismatches: Vec<String>,
}

/// Comparison across every ordered pair of objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareReport {
    /// One entry per ordered object pair, in enumeration order.
    pub homs: Vec<HomComparison>,
    /// Conjunction of the per-hom verdicts.
    pub all_bijective: bool,
}

/// Compares the engine's hom-category from `a` to `b` with the oracle's
/// localized hom-set over the same cospans.
pub fn compare_hom(
    engine: &Engine<'_, TrivialModel>,
    oracle: &ClassicalLocalization,
    a: u8,
    b: u8,
) -> HomComparison {
    let m = engine.model;
    let hom = engine.hom_category(&a, &b, 1, 1);
    let oracle_hom = oracle.hom(a, b);
    let mut mismatches = Vec::new();
    let name = |frac: Fraction| {
        format!("({}, {})", m.morphism_name(frac.0), m.morphism_name(frac.1))
    };

    let engine_fracs: Vec<Fraction> = hom.cospans.iter().map(|c| (c.left, c.right)).collect();
    if engine_fracs != oracle_hom.cospans {
        mismatches.push(format!(
            "cospan enumerations differ: engine {:?}, oracle {:?}",
            engine_fracs.iter().map(|&c| name(c)).collect::<Vec<_>>(),
            oracle_hom.cospans.iter().map(|&c| name(c)).collect::<Vec<_>>(),
        ));
    }
    if hom.undetermined > 0 {
        mismatches.push(format!(
            "{} engine comparisons came back undetermined",
            hom.undetermined
        ));
    }

    // Engine-side partition: cospans joined by any 2-morphism class. With
    // trivial 2-cells the relation is already an equivalence; union-find
    // keeps the summary a partition regardless.
    let n = hom.cospans.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..n {
        if hom.classes[i][i].len() != 1 {
            mismatches.push(format!(
                "expected exactly the identity class on {}, found {} classes",
                name(engine_fracs[i]),
                hom.classes[i][i].len()
            ));
        }
        for j in 0..n {
            if !hom.classes[i][j].is_empty() {
                if hom.classes[i][j].len() != 1 {
                    mismatches.push(format!(
                        "{} parallel classes from {} to {}; a trivial-2-cell hom-category is a preorder",
                        hom.classes[i][j].len(),
                        name(engine_fracs[i]),
                        name(engine_fracs[j])
                    ));
                }
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut engine_class_of = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        let idx = match roots.iter().position(|&r| r == root) {
            Some(idx) => idx,
            None => {
                roots.push(root);
                roots.len() - 1
            }
        };
        engine_class_of[i] = idx;
    }

    if engine_fracs == oracle_hom.cospans {
        for i in 0..n {
            for j in i + 1..n {
                let engine_same = engine_class_of[i] == engine_class_of[j];
                let oracle_same = oracle_hom.class_of[i] == oracle_hom.class_of[j];
                if engine_same != oracle_same {
                    mismatches.push(format!(
                        "{} and {}: engine says {}, oracle says {}",
                        name(engine_fracs[i]),
                        name(engine_fracs[j]),
                        if engine_same { "equal" } else { "distinct" },
                        if oracle_same { "equal" } else { "distinct" },
                    ));
                }
            }
        }
    }

    let engine_classes = roots.len();
    let oracle_classes = oracle_hom.class_count;
    let bijective = mismatches.is_empty() && engine_classes == oracle_classes;
    HomComparison {
        source: m.object_name(a).into(),
        target: m.object_name(b).into(),
        engine_classes,
        oracle_classes,
        bijective,
        mismatches,
    }
}

/// Runs [`compare_hom`] over every ordered pair of objects.
pub fn compare_all_homs(
    engine: &Engine<'_, TrivialModel>,
    oracle: &ClassicalLocalization,
) -> CompareReport {
    let mut homs = Vec::new();
    for a in engine.model.objects() {
        for b in engine.model.objects() {
            homs.push(compare_hom(engine, oracle, a, b));
        }
    }
    let all_bijective = homs.iter().all(|h| h.bijective);
    CompareReport { homs, all_bijective }
}
