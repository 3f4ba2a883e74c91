//! On-disk JSON documents. One document per object, every cell and every
//! structure map written out explicitly, degenerate cells included, with
//! sorted keys everywhere, so files are diff-friendly and serialization is
//! byte-stable. Structure maps are keyed `d:<axis>:<i>` and `s:<axis>:<i>`
//! and grouped per level, since identifiers are only unique within a level.

use ngpd_core::groupoid::{FinGroupoid, FinGroupoidBuilder, GroupoidFunctor};
use ngpd_core::multi::{MultiMap, MultiSSet, MultiSSetBuilder};
use ngpd_core::ngroupoid::{NFunctor, NGroupoid};
use ngpd_core::sset::{SimplicialSet, SimplicialSetBuilder};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const KINDS: [&str; 6] = [
    "sset",
    "multisset",
    "groupoid",
    "functor",
    "ngroupoid",
    "nfunctor",
];

#[derive(Debug, Error)]
pub enum DocError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown document kind `{kind}`")]
    UnknownKind { kind: String },
    #[error("expected a {expected} document, got `{got}`")]
    WrongKind { expected: &'static str, got: String },
    #[error("{0}")]
    Core(#[from] ngpd_core::Error),
    #[error("malformed document: {detail}")]
    Structure { detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub name: String,
    pub seed: u64,
    pub provenance: String,
}

/// A single serialized object. The payload layout depends on `kind`; it
/// stays a plain JSON value here so parse errors can name the kind they
/// were decoding for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub kind: String,
    pub metadata: Metadata,
    pub payload: serde_json::Value,
}

pub fn parse_document(text: &str) -> Result<Document, DocError> {
    let doc: Document = serde_json::from_str(text)?;
    if !KINDS.contains(&doc.kind.as_str()) {
        return Err(DocError::UnknownKind { kind: doc.kind });
    }
    Ok(doc)
}

pub fn serialize_document(doc: &Document) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("documents serialize");
    out.push('\n');
    out
}

fn metadata(name: &str, seed: u64, provenance: &str) -> Metadata {
    Metadata {
        name: name.to_string(),
        seed,
        provenance: provenance.to_string(),
    }
}

// ---------------------------------------------------------------------------
// Payload layouts

type CellMap = BTreeMap<String, String>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelPayload {
    cells: Vec<String>,
    #[serde(default)]
    maps: BTreeMap<String, CellMap>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SsetPayload {
    dim_bound: usize,
    levels: Vec<LevelPayload>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiLevelPayload {
    index: Vec<usize>,
    cells: Vec<String>,
    #[serde(default)]
    maps: BTreeMap<String, CellMap>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiPayload {
    dim_bounds: Vec<usize>,
    levels: Vec<MultiLevelPayload>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MorphismPayload {
    id: String,
    source: String,
    target: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupoidPayload {
    objects: Vec<String>,
    morphisms: Vec<MorphismPayload>,
    identities: CellMap,
    inverses: CellMap,
    /// Composable pairs as `[f, g, f then g]`, diagrammatic order.
    composites: Vec<(String, String, String)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctorPayload {
    source: GroupoidPayload,
    target: GroupoidPayload,
    objects: CellMap,
    morphisms: CellMap,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NgroupoidPayload {
    n: usize,
    carrier: MultiPayload,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapLevelPayload {
    index: Vec<usize>,
    cells: CellMap,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NfunctorPayload {
    n: usize,
    source: MultiPayload,
    target: MultiPayload,
    map: Vec<MapLevelPayload>,
}

// ---------------------------------------------------------------------------
// Encoding

fn sset_payload(x: &SimplicialSet) -> SsetPayload {
    let d = x.dim_bound();
    let mut levels = Vec::new();
    for k in 0..=d {
        let mut maps: BTreeMap<String, CellMap> = BTreeMap::new();
        if k > 0 {
            for i in 0..=k {
                let table: CellMap = (0..x.cell_count(k))
                    .map(|c| {
                        (
                            x.cell_id(k, c).to_string(),
                            x.cell_id(k - 1, x.face(k, i, c)).to_string(),
                        )
                    })
                    .collect();
                maps.insert(format!("d:0:{i}"), table);
            }
        }
        if k < d {
            for i in 0..=k {
                let table: CellMap = (0..x.cell_count(k))
                    .map(|c| {
                        (
                            x.cell_id(k, c).to_string(),
                            x.cell_id(k + 1, x.degeneracy(k, i, c)).to_string(),
                        )
                    })
                    .collect();
                maps.insert(format!("s:0:{i}"), table);
            }
        }
        levels.push(LevelPayload {
            cells: x.cells(k).to_vec(),
            maps,
        });
    }
    SsetPayload {
        dim_bound: d,
        levels,
    }
}

fn multi_payload(x: &MultiSSet) -> MultiPayload {
    let bounds = x.dim_bounds().to_vec();
    let mut levels = Vec::new();
    for idx in x.indices() {
        let mut maps: BTreeMap<String, CellMap> = BTreeMap::new();
        for axis in 0..x.arity() {
            if idx[axis] > 0 {
                let mut lowered = idx.clone();
                lowered[axis] -= 1;
                for i in 0..=idx[axis] {
                    let table: CellMap = (0..x.cell_count(&idx))
                        .map(|c| {
                            (
                                x.cell_id(&idx, c).to_string(),
                                x.cell_id(&lowered, x.face(&idx, axis, i, c)).to_string(),
                            )
                        })
                        .collect();
                    maps.insert(format!("d:{axis}:{i}"), table);
                }
            }
            if idx[axis] < bounds[axis] {
                let mut raised = idx.clone();
                raised[axis] += 1;
                for i in 0..=idx[axis] {
                    let table: CellMap = (0..x.cell_count(&idx))
                        .map(|c| {
                            (
                                x.cell_id(&idx, c).to_string(),
                                x.cell_id(&raised, x.degeneracy(&idx, axis, i, c)).to_string(),
                            )
                        })
                        .collect();
                    maps.insert(format!("s:{axis}:{i}"), table);
                }
            }
        }
        levels.push(MultiLevelPayload {
            index: idx.clone(),
            cells: x.cells(&idx).to_vec(),
            maps,
        });
    }
    MultiPayload {
        dim_bounds: bounds,
        levels,
    }
}

fn groupoid_payload(g: &FinGroupoid) -> GroupoidPayload {
    let morphisms = (0..g.morphism_count())
        .map(|m| MorphismPayload {
            id: g.morphism_id(m).to_string(),
            source: g.object_id(g.src(m)).to_string(),
            target: g.object_id(g.tgt(m)).to_string(),
        })
        .collect();
    let identities = (0..g.object_count())
        .map(|x| {
            (
                g.object_id(x).to_string(),
                g.morphism_id(g.identity_of(x)).to_string(),
            )
        })
        .collect();
    let inverses = (0..g.morphism_count())
        .map(|m| {
            (
                g.morphism_id(m).to_string(),
                g.morphism_id(g.inverse_of(m)).to_string(),
            )
        })
        .collect();
    let mut composites = Vec::new();
    for f in 0..g.morphism_count() {
        for h in 0..g.morphism_count() {
            if let Some(c) = g.compose(f, h) {
                composites.push((
                    g.morphism_id(f).to_string(),
                    g.morphism_id(h).to_string(),
                    g.morphism_id(c).to_string(),
                ));
            }
        }
    }
    GroupoidPayload {
        objects: g.object_ids().to_vec(),
        morphisms,
        identities,
        inverses,
        composites,
    }
}

fn functor_payload(f: &GroupoidFunctor) -> FunctorPayload {
    let g = f.source();
    let h = f.target();
    FunctorPayload {
        source: groupoid_payload(g),
        target: groupoid_payload(h),
        objects: (0..g.object_count())
            .map(|x| {
                (
                    g.object_id(x).to_string(),
                    h.object_id(f.apply_object(x)).to_string(),
                )
            })
            .collect(),
        morphisms: (0..g.morphism_count())
            .map(|m| {
                (
                    g.morphism_id(m).to_string(),
                    h.morphism_id(f.apply_morphism(m)).to_string(),
                )
            })
            .collect(),
    }
}

fn nfunctor_payload(f: &NFunctor) -> NfunctorPayload {
    let map = f.map();
    let (s, t) = (map.source(), map.target());
    let levels = s
        .indices()
        .into_iter()
        .map(|idx| MapLevelPayload {
            cells: (0..s.cell_count(&idx))
                .map(|c| {
                    (
                        s.cell_id(&idx, c).to_string(),
                        t.cell_id(&idx, map.apply(&idx, c)).to_string(),
                    )
                })
                .collect(),
            index: idx,
        })
        .collect();
    NfunctorPayload {
        n: f.n(),
        source: multi_payload(s),
        target: multi_payload(t),
        map: levels,
    }
}

fn wrap(kind: &str, name: &str, seed: u64, provenance: &str, payload: impl Serialize) -> Document {
    Document {
        kind: kind.to_string(),
        metadata: metadata(name, seed, provenance),
        payload: serde_json::to_value(payload).expect("payloads serialize"),
    }
}

pub fn sset_document(name: &str, seed: u64, provenance: &str, x: &SimplicialSet) -> Document {
    wrap("sset", name, seed, provenance, sset_payload(x))
}

pub fn multi_document(name: &str, seed: u64, provenance: &str, x: &MultiSSet) -> Document {
    wrap("multisset", name, seed, provenance, multi_payload(x))
}

pub fn groupoid_document(name: &str, seed: u64, provenance: &str, g: &FinGroupoid) -> Document {
    wrap("groupoid", name, seed, provenance, groupoid_payload(g))
}

pub fn functor_document(name: &str, seed: u64, provenance: &str, f: &GroupoidFunctor) -> Document {
    wrap("functor", name, seed, provenance, functor_payload(f))
}

pub fn ngroupoid_document(name: &str, seed: u64, provenance: &str, phi: &NGroupoid) -> Document {
    let payload = NgroupoidPayload {
        n: phi.n(),
        carrier: multi_payload(phi.carrier()),
    };
    wrap("ngroupoid", name, seed, provenance, payload)
}

pub fn nfunctor_document(name: &str, seed: u64, provenance: &str, f: &NFunctor) -> Document {
    wrap("nfunctor", name, seed, provenance, nfunctor_payload(f))
}

// ---------------------------------------------------------------------------
// Decoding

fn check_kind(doc: &Document, expected: &'static str) -> Result<(), DocError> {
    if doc.kind != expected {
        return Err(DocError::WrongKind {
            expected,
            got: doc.kind.clone(),
        });
    }
    Ok(())
}

/// Splits a `d:<axis>:<i>` or `s:<axis>:<i>` key and checks it belongs at
/// this level. Anything unexpected is an error rather than silence.
fn parse_map_key(
    key: &str,
    idx: &[usize],
    bounds: &[usize],
) -> Result<(bool, usize, usize), DocError> {
    let bad = || DocError::Structure {
        detail: format!("unexpected structure map key `{key}` at level {idx:?}"),
    };
    let mut parts = key.split(':');
    let ds = parts.next().ok_or_else(bad)?;
    let axis: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    let i: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    if parts.next().is_some() || axis >= idx.len() || i > idx[axis] {
        return Err(bad());
    }
    match ds {
        "d" if idx[axis] > 0 => Ok((true, axis, i)),
        "s" if idx[axis] < bounds[axis] => Ok((false, axis, i)),
        _ => Err(bad()),
    }
}

fn sset_from_payload(p: &SsetPayload) -> Result<SimplicialSet, DocError> {
    if p.levels.len() != p.dim_bound + 1 {
        return Err(DocError::Structure {
            detail: format!(
                "expected {} levels, found {}",
                p.dim_bound + 1,
                p.levels.len()
            ),
        });
    }
    let mut b = SimplicialSetBuilder::new(p.dim_bound);
    for (k, level) in p.levels.iter().enumerate() {
        for id in &level.cells {
            b.cell(k, id);
        }
        for (key, table) in &level.maps {
            let (is_face, _, i) = parse_map_key(key, &[k], &[p.dim_bound])?;
            for (from, to) in table {
                if is_face {
                    b.face(k, i, from, to);
                } else {
                    b.degeneracy(k, i, from, to);
                }
            }
        }
    }
    Ok(b.build()?)
}

fn multi_from_payload(p: &MultiPayload) -> Result<MultiSSet, DocError> {
    let mut b = MultiSSetBuilder::new(p.dim_bounds.clone());
    for level in &p.levels {
        if level.index.len() != p.dim_bounds.len() {
            return Err(DocError::Structure {
                detail: format!("index {:?} has the wrong arity", level.index),
            });
        }
        for id in &level.cells {
            b.cell(&level.index, id);
        }
        for (key, table) in &level.maps {
            let (is_face, axis, i) = parse_map_key(key, &level.index, &p.dim_bounds)?;
            for (from, to) in table {
                if is_face {
                    b.face(&level.index, axis, i, from, to);
                } else {
                    b.degeneracy(&level.index, axis, i, from, to);
                }
            }
        }
    }
    Ok(b.build()?)
}

fn groupoid_from_payload(p: &GroupoidPayload) -> Result<FinGroupoid, DocError> {
    let mut b = FinGroupoidBuilder::new();
    for x in &p.objects {
        b.object(x);
    }
    for m in &p.morphisms {
        b.morphism(&m.id, &m.source, &m.target);
    }
    for (x, e) in &p.identities {
        b.identity(x, e);
    }
    for (m, i) in &p.inverses {
        b.inverse(m, i);
    }
    for (f, g, h) in &p.composites {
        b.compose(f, g, h);
    }
    Ok(b.build()?)
}

fn payload_of<T: for<'de> Deserialize<'de>>(doc: &Document) -> Result<T, DocError> {
    Ok(serde_json::from_value(doc.payload.clone())?)
}

pub fn document_sset(doc: &Document) -> Result<SimplicialSet, DocError> {
    check_kind(doc, "sset")?;
    sset_from_payload(&payload_of(doc)?)
}

pub fn document_multi(doc: &Document) -> Result<MultiSSet, DocError> {
    check_kind(doc, "multisset")?;
    multi_from_payload(&payload_of(doc)?)
}

pub fn document_groupoid(doc: &Document) -> Result<FinGroupoid, DocError> {
    check_kind(doc, "groupoid")?;
    groupoid_from_payload(&payload_of(doc)?)
}

pub fn document_functor(doc: &Document) -> Result<GroupoidFunctor, DocError> {
    check_kind(doc, "functor")?;
    let p: FunctorPayload = payload_of(doc)?;
    let source = groupoid_from_payload(&p.source)?;
    let target = groupoid_from_payload(&p.target)?;
    Ok(GroupoidFunctor::from_ids(
        &source,
        &target,
        &p.objects,
        &p.morphisms,
    )?)
}

pub fn document_ngroupoid(doc: &Document) -> Result<NGroupoid, DocError> {
    check_kind(doc, "ngroupoid")?;
    let p: NgroupoidPayload = payload_of(doc)?;
    Ok(NGroupoid::new(p.n, multi_from_payload(&p.carrier)?)?)
}

pub fn document_nfunctor(doc: &Document) -> Result<NFunctor, DocError> {
    check_kind(doc, "nfunctor")?;
    let p: NfunctorPayload = payload_of(doc)?;
    let source = multi_from_payload(&p.source)?;
    let target = multi_from_payload(&p.target)?;
    let by_index: BTreeMap<&[usize], &CellMap> = p
        .map
        .iter()
        .map(|l| (l.index.as_slice(), &l.cells))
        .collect();
    let mut tables = BTreeMap::new();
    for idx in source.indices() {
        let cells = by_index.get(idx.as_slice()).ok_or_else(|| DocError::Structure {
            detail: format!("map is missing level {idx:?}"),
        })?;
        let mut table = Vec::new();
        for c in 0..source.cell_count(&idx) {
            let from = source.cell_id(&idx, c);
            let to = cells.get(from).ok_or_else(|| DocError::Structure {
                detail: format!("map is missing cell `{from}` at level {idx:?}"),
            })?;
            let t = target
                .cell_index(&idx, to)
                .ok_or_else(|| DocError::Structure {
                    detail: format!("map sends `{from}` to unknown cell `{to}`"),
                })?;
            table.push(t);
        }
        tables.insert(idx, table);
    }
    let map = MultiMap::from_tables(source, target, tables)?;
    Ok(NFunctor::new(p.n, map)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ngpd_core::groupoid::{cyclic_group, nerve, symmetric_3};
    use ngpd_core::multi::{external_product, from_sset, MultiMap};
    use ngpd_core::ngroupoid::{nerve_ngroupoid, NFunctor};
    use ngpd_core::sset::constant_sset;

    fn reserialized(doc: &Document) -> String {
        let text = serialize_document(doc);
        serialize_document(&parse_document(&text).unwrap())
    }

    #[test]
    fn documents_round_trip_for_every_kind() {
        let z2 = cyclic_group(2);
        let n = nerve(z2.underlying(), 2).sset;
        let product = external_product(&from_sset(&n), &from_sset(&constant_sset(&["p".into()], 2)));
        let phi = nerve_ngroupoid(z2.underlying(), 2);
        let id = NFunctor::new(1, MultiMap::identity(phi.carrier())).unwrap();
        let swap = GroupoidFunctor::from_ids(
            z2.underlying(),
            z2.underlying(),
            &[("x".to_string(), "x".to_string())].into(),
            &[
                ("0".to_string(), "0".to_string()),
                ("1".to_string(), "1".to_string()),
            ]
            .into(),
        )
        .unwrap();

        let docs = [
            sset_document("a", 0, "test", &n),
            multi_document("b", 0, "test", &product),
            groupoid_document("c", 0, "test", symmetric_3().underlying()),
            functor_document("d", 0, "test", &swap),
            ngroupoid_document("e", 0, "test", &phi),
            nfunctor_document("f", 0, "test", &id),
        ];
        for doc in &docs {
            let text = serialize_document(doc);
            assert_eq!(text, reserialized(doc), "{} drifts", doc.kind);
        }
        assert_eq!(document_sset(&docs[0]).unwrap(), n);
        assert_eq!(document_multi(&docs[1]).unwrap(), product);
        assert_eq!(
            document_groupoid(&docs[2]).unwrap().morphism_count(),
            symmetric_3().order()
        );
        assert_eq!(document_ngroupoid(&docs[4]).unwrap().carrier(), phi.carrier());
        assert!(document_nfunctor(&docs[5])
            .unwrap()
            .map()
            .is_levelwise_bijection());
    }

    #[test]
    fn parse_errors_name_their_position() {
        let err = parse_document("{\n  \"kind\": \"sset\",\n").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn kind_mismatches_are_refused() {
        let doc = groupoid_document("g", 0, "test", cyclic_group(2).underlying());
        match document_sset(&doc) {
            Err(DocError::WrongKind { got, .. }) => assert_eq!(got, "groupoid"),
            other => panic!("expected a kind mismatch, got {other:?}"),
        }
    }

    #[test]
    fn unknown_structure_keys_are_refused() {
        let mut doc = sset_document("s", 0, "test", &constant_sset(&["p".into()], 1));
        let levels = doc
            .payload
            .get_mut("levels")
            .and_then(|l| l.as_array_mut())
            .unwrap();
        levels[0]
            .get_mut("maps")
            .and_then(|m| m.as_object_mut())
            .unwrap()
            .insert("d:7:0".into(), serde_json::json!({}));
        match document_sset(&doc) {
            Err(DocError::Structure { detail }) => assert!(detail.contains("d:7:0")),
            other => panic!("expected a structure error, got {other:?}"),
        }
    }
}
