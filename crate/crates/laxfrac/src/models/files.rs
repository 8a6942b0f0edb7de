//! JSON file formats for posets, monotone maps, and whole models.
//!
//! Poset files:
//!
//! ```json
//! {"elements": ["a", "b", "c"], "leq": [["a", "b"], ["b", "c"], ["a", "c"]]}
//! ```
//!
//! Reflexive pairs are implied and may be omitted; the listed relation must
//! already be antisymmetric and transitive — the loader rejects anything
//! else, naming the offending pair. Element order in `elements` fixes the
//! internal labeling.
//!
//! Map files:
//!
//! ```json
//! {"dom": {<poset>}, "cod": {<poset>}, "assignment": {"a": "x", "b": "y"}}
//! ```
//!
//! Model files are discriminated by `family`:
//!
//! ```json
//! {"family": "pos", "max_elements": 3, "objects": [<poset>, …]}
//! {"family": "trivial", "spec": {<category spec, see fincat>}}
//! ```
//!
//! For the `pos` family, `objects` (optional) lists additional posets beyond
//! the exhaustive enumeration up to `max_elements`.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::models::fincat::{FiniteCategorySpec, SpecError, TrivialModel};
use crate::models::pos_model::PosModel;
use crate::models::poset::{transitive_closure, MonotoneMap, Poset, ENUM_CAP, MAX_ELEMS};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PosetFile {
    elements: Vec<String>,
    leq: Vec<[String; 2]>,
}

/// A poset together with the element names it was declared with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedPoset {
    pub poset: Poset,
    pub names: Vec<String>,
}

impl NamedPoset {
    pub fn element(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub fn parse_poset_file(text: &str) -> Result<NamedPoset, SpecError> {
    let file: PosetFile = serde_json::from_str(text).map_err(|e| SpecError(e.to_string()))?;
    named_poset(&file, "")
}

fn named_poset(file: &PosetFile, at: &str) -> Result<NamedPoset, SpecError> {
    let n = file.elements.len();
    if n > MAX_ELEMS {
        return Err(SpecError(format!(
            "{at}poset has {n} elements; at most {MAX_ELEMS} supported"
        )));
    }
    for (i, e) in file.elements.iter().enumerate() {
        if file.elements[..i].contains(e) {
            return Err(SpecError(format!("{at}elements[{i}]: duplicate element `{e}`")));
        }
    }
    let index = |name: &str, pos: usize| -> Result<usize, SpecError> {
        file.elements
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| SpecError(format!("{at}leq[{pos}]: unknown element `{name}`")))
    };
    let mut listed = [0u16; MAX_ELEMS];
    for (pos, [a, b]) in file.leq.iter().enumerate() {
        listed[index(a, pos)?] |= 1 << index(b, pos)?;
    }
    let mut rows = listed;
    for (i, row) in rows.iter_mut().enumerate().take(n) {
        *row |= 1 << i;
    }
    // The listed relation must already be an order; silently closing it
    // would mask typos, so any gap is rejected with the witnessing triple.
    for i in 0..n {
        for j in 0..n {
            if i != j && rows[i] >> j & 1 == 1 && rows[j] >> i & 1 == 1 {
                return Err(SpecError(format!(
                    "{at}leq: antisymmetry fails between `{}` and `{}`",
                    file.elements[i], file.elements[j]
                )));
            }
        }
    }
    let mut closed = rows;
    transitive_closure(n, &mut closed);
    for i in 0..n {
        if closed[i] != rows[i] {
            let j = (0..n)
                .find(|&j| rows[i] >> j & 1 == 1 && closed[i] & rows[j] & !rows[i] != 0)
                .expect("a witnessing middle element exists");
            let k = (rows[j] & !rows[i]).trailing_zeros() as usize;
            return Err(SpecError(format!(
                "{at}leq: transitivity fails on `{}` ≤ `{}` ≤ `{}` (pair [`{}`, `{}`] missing)",
                file.elements[i],
                file.elements[j],
                file.elements[k],
                file.elements[i],
                file.elements[k],
            )));
        }
    }
    Ok(NamedPoset { poset: Poset::from_rows(n, rows), names: file.elements.clone() })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    dom: PosetFile,
    cod: PosetFile,
    assignment: BTreeMap<String, String>,
}

/// A monotone map together with the element names of its endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedMap {
    pub map: MonotoneMap,
    pub dom: NamedPoset,
    pub cod: NamedPoset,
}

pub fn parse_map_file(text: &str) -> Result<NamedMap, SpecError> {
    let file: MapFile = serde_json::from_str(text).map_err(|e| SpecError(e.to_string()))?;
    let dom = named_poset(&file.dom, "dom: ")?;
    let cod = named_poset(&file.cod, "cod: ")?;
    let mut table = vec![0u8; dom.names.len()];
    for (i, name) in dom.names.iter().enumerate() {
        let target = file.assignment.get(name).ok_or_else(|| {
            SpecError(format!("assignment: element `{name}` has no value"))
        })?;
        table[i] = cod
            .element(target)
            .ok_or_else(|| {
                SpecError(format!("assignment: `{name}` maps to unknown element `{target}`"))
            })? as u8;
    }
    for key in file.assignment.keys() {
        if dom.element(key).is_none() {
            return Err(SpecError(format!("assignment: unknown element `{key}`")));
        }
    }
    let map = MonotoneMap::new(dom.poset, cod.poset, table).map_err(|e| {
        SpecError(format!("assignment: {e}"))
    })?;
    Ok(NamedMap { map, dom, cod })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PosModelFile {
    family: String,
    max_elements: usize,
    #[serde(default)]
    objects: Vec<PosetFile>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrivialModelFile {
    family: String,
    spec: FiniteCategorySpec,
}

/// A model loaded from a family-tagged file.
#[derive(Debug)]
pub enum LoadedModel {
    Pos(PosModel),
    Trivial(TrivialModel),
}

pub fn parse_model_file(text: &str) -> Result<LoadedModel, SpecError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| SpecError(e.to_string()))?;
    let family = value
        .get("family")
        .and_then(|f| f.as_str())
        .ok_or_else(|| SpecError("model file needs a string `family` key".into()))?;
    match family {
        "pos" => {
            let file: PosModelFile =
                serde_json::from_value(value).map_err(|e| SpecError(e.to_string()))?;
            debug_assert_eq!(file.family, "pos");
            if file.max_elements > ENUM_CAP {
                return Err(SpecError(format!(
                    "max_elements {} exceeds the enumeration cap {ENUM_CAP}",
                    file.max_elements
                )));
            }
            let mut extras = Vec::new();
            for (i, pf) in file.objects.iter().enumerate() {
                extras.push(named_poset(pf, &format!("objects[{i}]: "))?.poset);
            }
            Ok(LoadedModel::Pos(PosModel::with_extra_objects(file.max_elements, extras)))
        }
        "trivial" => {
            let file: TrivialModelFile =
                serde_json::from_value(value).map_err(|e| SpecError(e.to_string()))?;
            debug_assert_eq!(file.family, "trivial");
            Ok(LoadedModel::Trivial(TrivialModel::from_spec(&file.spec)?))
        }
        other => Err(SpecError(format!("unknown model family `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_chain_with_implied_reflexivity() {
        let p = parse_poset_file(
            r#"{"elements": ["a", "b", "c"], "leq": [["a","b"],["b","c"],["a","c"]]}"#,
        )
        .unwrap();
        assert_eq!(p.poset, Poset::chain(3));
        assert_eq!(p.element("b"), Some(1));
    }

    #[test]
    fn rejects_non_transitive_leq_with_the_missing_pair() {
        let err = parse_poset_file(
            r#"{"elements": ["a", "b", "c"], "leq": [["a","b"],["b","c"]]}"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("transitivity"), "{msg}");
        assert!(msg.contains("[`a`, `c`]"), "{msg}");
    }

    #[test]
    fn rejects_antisymmetry_violations() {
        let err = parse_poset_file(r#"{"elements": ["a", "b"], "leq": [["a","b"],["b","a"]]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("antisymmetry"), "{}", err);
    }

    #[test]
    fn rejects_unknown_elements_with_position() {
        let err =
            parse_poset_file(r#"{"elements": ["a"], "leq": [["a","z"]]}"#).unwrap_err();
        assert!(err.to_string().contains("leq[0]"), "{}", err);
    }

    #[test]
    fn parses_a_monotone_map_and_rejects_non_monotone_ones() {
        let good = parse_map_file(
            r#"{
                "dom": {"elements": ["a", "b"], "leq": [["a","b"]]},
                "cod": {"elements": ["x", "y"], "leq": [["x","y"]]},
                "assignment": {"a": "x", "b": "y"}
            }"#,
        )
        .unwrap();
        assert!(good.map.is_embedding());
        let err = parse_map_file(
            r#"{
                "dom": {"elements": ["a", "b"], "leq": [["a","b"]]},
                "cod": {"elements": ["x", "y"], "leq": [["x","y"]]},
                "assignment": {"a": "y", "b": "x"}
            }"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("not monotone"), "{}", err);
    }

    #[test]
    fn loads_both_model_families() {
        let pos = parse_model_file(r#"{"family": "pos", "max_elements": 2}"#).unwrap();
        assert!(matches!(pos, LoadedModel::Pos(_)));
        let trivial = parse_model_file(
            r#"{
                "family": "trivial",
                "spec": {
                    "objects": ["A"],
                    "morphisms": [{"name": "idA", "dom": "A", "cod": "A"}],
                    "compose": [["idA", "idA", "idA"]],
                    "sigma": ["idA"]
                }
            }"#,
        )
        .unwrap();
        assert!(matches!(trivial, LoadedModel::Trivial(_)));
        assert!(parse_model_file(r#"{"family": "frames"}"#).is_err());
        assert!(parse_model_file(r#"{"max_elements": 2}"#).is_err());
    }

    #[test]
    fn embedded_poset_objects_are_validated() {
        let err = parse_model_file(
            r#"{
                "family": "pos",
                "max_elements": 2,
                "objects": [{"elements": ["a","b","c"], "leq": [["a","b"],["b","c"]]}]
            }"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("objects[0]"), "{msg}");
        assert!(msg.contains("transitivity"), "{msg}");
    }
}
