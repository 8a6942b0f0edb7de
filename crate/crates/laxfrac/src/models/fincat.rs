//! Finite 1-categories presented by explicit tables, viewed as 2-categories
//! with only identity 2-cells, together with a chosen class Σ of morphisms.
//!
//! The JSON grammar has four keys:
//!
//! ```json
//! {
//!   "objects": ["A", "B"],
//!   "morphisms": [{"name": "s", "dom": "A", "cod": "B"}],
//!   "compose": [["g", "f", "g_after_f"]],
//!   "sigma": ["s"]
//! }
//! ```
//!
//! `compose` lists `g ∘ f` for every composable pair exactly once. Identity
//! morphisms are not marked; the loader infers them (each object must carry
//! a morphism that is neutral on both sides) and rejects tables that are
//! partial, ambiguous, or non-associative, naming the offending entry.
//!
//! Because all 2-cells are identities, a Σ-square is a strictly commuting
//! square whose top and bottom are in Σ. Witness searches scan objects and
//! morphisms in declaration order and are exhaustive, so a failed search
//! refutes the corresponding axiom instance outright; the size bound of the
//! generic interface is not meaningful here and is ignored by the searches.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::two_cat_core::{BoundaryError, RuleError, Square, SquareOf, TwoCatModel};

/// A malformed model description; the message names the offending entry.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid model description: {0}")]
pub struct SpecError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDecl {
    pub name: String,
    pub dom: String,
    pub cod: String,
}

/// The raw JSON shape of a finite category with a chosen class Σ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteCategorySpec {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismDecl>,
    pub compose: Vec<[String; 3]>,
    pub sigma: Vec<String>,
}

impl FiniteCategorySpec {
    pub fn from_json(text: &str) -> Result<FiniteCategorySpec, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError(e.to_string()))
    }
}

/// A finite category with identity 2-cells only, fully tabulated.
///
/// Objects, morphisms and 2-cells are all `u8` indices; a 2-cell is the
/// index of the morphism it is the identity on.
pub struct TrivialModel {
    object_names: Vec<String>,
    morphism_names: Vec<String>,
    dom: Vec<u8>,
    cod: Vec<u8>,
    comp: Vec<Vec<Option<u8>>>,
    ids: Vec<u8>,
    sigma: Vec<bool>,
}

impl fmt::Debug for TrivialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrivialModel")
            .field("objects", &self.object_names)
            .field("morphisms", &self.morphism_names)
            .finish()
    }
}

impl TrivialModel {
    pub fn from_json(text: &str) -> Result<TrivialModel, SpecError> {
        TrivialModel::from_spec(&FiniteCategorySpec::from_json(text)?)
    }

    pub fn from_spec(spec: &FiniteCategorySpec) -> Result<TrivialModel, SpecError> {
        if spec.objects.len() > u8::MAX as usize || spec.morphisms.len() > u8::MAX as usize {
            return Err(SpecError("at most 255 objects and 255 morphisms supported".into()));
        }
        let find_obj = |name: &str| -> Result<u8, SpecError> {
            spec.objects
                .iter()
                .position(|o| o == name)
                .map(|i| i as u8)
                .ok_or_else(|| SpecError(format!("unknown object `{name}`")))
        };
        for (i, o) in spec.objects.iter().enumerate() {
            if spec.objects[..i].contains(o) {
                return Err(SpecError(format!("objects[{i}]: duplicate object `{o}`")));
            }
        }
        let mut dom = Vec::new();
        let mut cod = Vec::new();
        let mut names = Vec::new();
        for (i, m) in spec.morphisms.iter().enumerate() {
            if names.contains(&m.name) {
                return Err(SpecError(format!("morphisms[{i}]: duplicate morphism `{}`", m.name)));
            }
            dom.push(
                find_obj(&m.dom).map_err(|e| SpecError(format!("morphisms[{i}]: {e}")))?,
            );
            cod.push(
                find_obj(&m.cod).map_err(|e| SpecError(format!("morphisms[{i}]: {e}")))?,
            );
            names.push(m.name.clone());
        }
        let find_mor = |name: &str| -> Result<u8, SpecError> {
            names
                .iter()
                .position(|n| n == name)
                .map(|i| i as u8)
                .ok_or_else(|| SpecError(format!("unknown morphism `{name}`")))
        };
        let n = names.len();
        let mut comp: Vec<Vec<Option<u8>>> = vec![vec![None; n]; n];
        for (i, [g, f, gf]) in spec.compose.iter().enumerate() {
            let at = |e: SpecError| SpecError(format!("compose[{i}]: {e}"));
            let g = find_mor(g).map_err(at)?;
            let f = find_mor(f).map_err(at)?;
            let gf = find_mor(gf).map_err(at)?;
            let (g, f, gf) = (g as usize, f as usize, gf as usize);
            if cod[f] != dom[g] {
                return Err(SpecError(format!(
                    "compose[{i}]: `{}` and `{}` are not composable",
                    names[g], names[f]
                )));
            }
            if dom[gf] != dom[f] || cod[gf] != cod[g] {
                return Err(SpecError(format!(
                    "compose[{i}]: composite `{}` has the wrong boundary",
                    names[gf]
                )));
            }
            if comp[g][f].is_some() {
                return Err(SpecError(format!(
                    "compose[{i}]: pair (`{}`, `{}`) listed twice",
                    names[g], names[f]
                )));
            }
            comp[g][f] = Some(gf as u8);
        }
        for g in 0..n {
            for f in 0..n {
                if cod[f] == dom[g] && comp[g][f].is_none() {
                    return Err(SpecError(format!(
                        "compose table is partial: missing `{}` ∘ `{}`",
                        names[g], names[f]
                    )));
                }
            }
        }
        // Identities are inferred, not declared: on each object exactly one
        // self-morphism must be neutral on both sides.
        let mut ids = Vec::new();
        for (o, oname) in spec.objects.iter().enumerate() {
            let mut found = None;
            'e: for e in 0..n {
                if dom[e] != o as u8 || cod[e] != o as u8 {
                    continue;
                }
                for f in 0..n {
                    if cod[f] == o as u8 && comp[e][f] != Some(f as u8) {
                        continue 'e;
                    }
                    if dom[f] == o as u8 && comp[f][e] != Some(f as u8) {
                        continue 'e;
                    }
                }
                found = Some(e as u8);
                break;
            }
            ids.push(found.ok_or_else(|| {
                SpecError(format!("object `{oname}` has no identity morphism in the table"))
            })?);
        }
        for h in 0..n {
            for g in 0..n {
                for f in 0..n {
                    if cod[f] == dom[g] && cod[g] == dom[h] {
                        let left = comp[comp[h][g].unwrap() as usize][f];
                        let right = comp[h][comp[g][f].unwrap() as usize];
                        if left != right {
                            return Err(SpecError(format!(
                                "associativity fails on `{}` ∘ `{}` ∘ `{}`",
                                names[h], names[g], names[f]
                            )));
                        }
                    }
                }
            }
        }
        let mut sigma = vec![false; n];
        for (i, s) in spec.sigma.iter().enumerate() {
            let m = find_mor(s).map_err(|e| SpecError(format!("sigma[{i}]: {e}")))?;
            sigma[m as usize] = true;
        }
        Ok(TrivialModel {
            object_names: spec.objects.clone(),
            morphism_names: names,
            dom,
            cod,
            comp,
            ids,
            sigma,
        })
    }

    pub fn object_name(&self, o: u8) -> &str {
        &self.object_names[o as usize]
    }

    pub fn morphism_name(&self, f: u8) -> &str {
        &self.morphism_names[f as usize]
    }

    pub fn object_by_name(&self, name: &str) -> Option<u8> {
        self.object_names.iter().position(|o| o == name).map(|i| i as u8)
    }

    pub fn morphism_by_name(&self, name: &str) -> Option<u8> {
        self.morphism_names.iter().position(|m| m == name).map(|i| i as u8)
    }

    pub fn object_count(&self) -> usize {
        self.object_names.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphism_names.len()
    }

    fn compose_idx(&self, g: u8, f: u8) -> Option<u8> {
        self.comp[g as usize][f as usize]
    }
}

impl TwoCatModel for TrivialModel {
    type Obj = u8;
    type One = u8;
    type Two = u8;

    fn objects(&self) -> Vec<u8> {
        (0..self.object_names.len() as u8).collect()
    }

    fn one_cells(&self, a: &u8, b: &u8) -> Vec<u8> {
        (0..self.morphism_names.len() as u8)
            .filter(|&f| self.dom[f as usize] == *a && self.cod[f as usize] == *b)
            .collect()
    }

    fn two_cells(&self, f: &u8, g: &u8) -> Vec<u8> {
        if f == g {
            vec![*f]
        } else {
            Vec::new()
        }
    }

    fn dom(&self, f: &u8) -> u8 {
        self.dom[*f as usize]
    }

    fn cod(&self, f: &u8) -> u8 {
        self.cod[*f as usize]
    }

    fn src2(&self, a: &u8) -> u8 {
        *a
    }

    fn tgt2(&self, a: &u8) -> u8 {
        *a
    }

    fn id1(&self, a: &u8) -> u8 {
        self.ids[*a as usize]
    }

    fn id2(&self, f: &u8) -> u8 {
        *f
    }

    fn comp1(&self, g: &u8, f: &u8) -> Result<u8, BoundaryError> {
        self.compose_idx(*g, *f).ok_or_else(|| {
            BoundaryError::new(format!(
                "cannot compose `{}` after `{}`",
                self.morphism_name(*g),
                self.morphism_name(*f)
            ))
        })
    }

    fn vcomp2(&self, b: &u8, a: &u8) -> Result<u8, BoundaryError> {
        if a != b {
            return Err(BoundaryError::new(format!(
                "cannot stack identity cells on distinct morphisms `{}` and `{}`",
                self.morphism_name(*a),
                self.morphism_name(*b)
            )));
        }
        Ok(*a)
    }

    fn whisker_post(&self, g: &u8, a: &u8) -> Result<u8, BoundaryError> {
        self.comp1(g, a)
    }

    fn whisker_pre(&self, a: &u8, f: &u8) -> Result<u8, BoundaryError> {
        self.comp1(a, f)
    }

    fn invert2(&self, a: &u8) -> Option<u8> {
        Some(*a)
    }

    fn in_sigma(&self, f: &u8) -> bool {
        self.sigma[*f as usize]
    }

    fn square_in_sigma(&self, sq: &SquareOf<Self>) -> bool {
        let around = match self.comp1(&sq.bottom, &sq.left) {
            Ok(c) => c,
            Err(_) => return false,
        };
        let across = match self.comp1(&sq.right, &sq.top) {
            Ok(c) => c,
            Err(_) => return false,
        };
        around == across
            && sq.cell == around
            && self.in_sigma(&sq.top)
            && self.in_sigma(&sq.bottom)
    }

    fn searches_complete(&self) -> bool {
        true
    }

    fn witness_square(&self, s: &u8, f: &u8, bound: usize) -> Result<SquareOf<Self>, RuleError> {
        if !self.in_sigma(s) {
            return Err(RuleError::Precondition(format!(
                "top of a witness square must be a Σ-arrow; `{}` is not",
                self.morphism_name(*s)
            )));
        }
        if self.dom(s) != self.dom(f) {
            return Err(RuleError::Boundary(format!(
                "span legs `{}` and `{}` must share their source",
                self.morphism_name(*s),
                self.morphism_name(*f)
            )));
        }
        if *f == self.id1(&self.dom(f)) {
            return Ok(Square {
                top: *s,
                left: *f,
                right: self.id1(&self.cod(s)),
                bottom: *s,
                cell: *s,
            });
        }
        if *s == self.id1(&self.dom(s)) {
            let sq = Square {
                top: *s,
                left: *f,
                right: *f,
                bottom: self.id1(&self.cod(f)),
                cell: *f,
            };
            // Σ is user-chosen and need not contain identities; fall back to
            // the search when the degenerate square fails to qualify.
            if self.square_in_sigma(&sq) {
                return Ok(sq);
            }
        }
        for w in self.objects() {
            for s_prime in self.one_cells(&self.cod(f), &w) {
                if !self.in_sigma(&s_prime) {
                    continue;
                }
                for f_prime in self.one_cells(&self.cod(s), &w) {
                    let around = self.compose_idx(s_prime, *f).expect("composable");
                    let across = self.compose_idx(f_prime, *s).expect("composable");
                    if around == across {
                        return Ok(Square {
                            top: *s,
                            left: *f,
                            right: f_prime,
                            bottom: s_prime,
                            cell: around,
                        });
                    }
                }
            }
        }
        Err(RuleError::BoundExhausted {
            context: format!(
                "no commuting Σ-square over the span (`{}`, `{}`) in the whole category",
                self.morphism_name(*f),
                self.morphism_name(*s)
            ),
            bound,
        })
    }

    fn witness_equi_insertion(
        &self,
        sq: &SquareOf<Self>,
        g: &u8,
        alpha: &u8,
        bound: usize,
    ) -> Result<(u8, u8), RuleError> {
        if !self.square_in_sigma(sq) {
            return Err(RuleError::Precondition(
                "equi-insertion needs a Σ-square as input".into(),
            ));
        }
        let f_prime = sq.right;
        if self.dom(g) != self.dom(&f_prime) || self.cod(g) != self.cod(&f_prime) {
            return Err(RuleError::Boundary(format!(
                "`{}` is not parallel to the square's right leg",
                self.morphism_name(*g)
            )));
        }
        let fr = self.compose_idx(f_prime, sq.top).expect("composable");
        let gr = self.compose_idx(*g, sq.top).expect("composable");
        if fr != gr || *alpha != fr {
            return Err(RuleError::Boundary(
                "cell must be the identity on right∘top = g∘top".into(),
            ));
        }
        if f_prime == *g {
            let d = self.id1(&self.cod(&f_prime));
            return Ok((d, self.compose_idx(d, f_prime).expect("composable")));
        }
        for e in self.objects() {
            for d in self.one_cells(&self.cod(&f_prime), &e) {
                let ds = self.compose_idx(d, sq.bottom).expect("composable");
                if self.in_sigma(&ds)
                    && self.compose_idx(d, f_prime) == self.compose_idx(d, *g)
                {
                    return Ok((d, self.compose_idx(d, f_prime).expect("composable")));
                }
            }
        }
        Err(RuleError::BoundExhausted {
            context: "no equi-inserting morphism exists in the whole category".into(),
            bound,
        })
    }

    fn witness_equification(
        &self,
        sq: &SquareOf<Self>,
        g: &u8,
        alpha: &u8,
        beta: &u8,
        _bound: usize,
    ) -> Result<u8, RuleError> {
        if !self.square_in_sigma(sq) {
            return Err(RuleError::Precondition(
                "equification needs a Σ-square as input".into(),
            ));
        }
        let f_prime = sq.right;
        if self.dom(g) != self.dom(&f_prime) || self.cod(g) != self.cod(&f_prime) {
            return Err(RuleError::Boundary(format!(
                "`{}` is not parallel to the square's right leg",
                self.morphism_name(*g)
            )));
        }
        if alpha != beta {
            return Err(RuleError::Boundary(
                "parallel identity cells are necessarily equal".into(),
            ));
        }
        // All 2-cells are identities, so the identity morphism equifies.
        Ok(self.id1(&self.cod(&f_prime)))
    }

    fn canonical_square(&self, r: &u8, f: &u8, bound: usize) -> Result<SquareOf<Self>, RuleError> {
        self.witness_square(r, f, bound)
    }

    fn default_witness_bound(&self, _s: &u8, _f: &u8) -> usize {
        self.object_count().max(1)
    }
}
