//! Serializes the named example families into documents. The list is
//! fixed: the seed is recorded in every document's metadata and reports,
//! but the families themselves are deterministic, so two runs with the
//! same seed agree byte for byte and two runs with different seeds differ
//! only in metadata.
//!
//! The heaviest two-groupoids (double nerves of groups of order three and
//! up) stay in-memory for the acceptance suite and are not serialized;
//! their carriers grow as |A|^(m*k) and make poor fixtures on disk.

use crate::document::{
    functor_document, groupoid_document, multi_document, nfunctor_document, ngroupoid_document,
    sset_document, Document,
};
use ngpd_core::corpus;
use ngpd_core::groupoid::{cyclic_group, spread_groupoid, trivial_group, GroupoidFunctor};
use std::collections::BTreeMap;

/// Documents too large to serialize comfortably; see the module note.
const OVERSIZED: [&str; 6] = [
    "multi/kspace-3-carrier",
    "two/kspace-3",
    "two/kspace-klein",
    "map/double-shift-3",
    "map/double-reduce-4-to-2",
    "map/double-embed-2-in-4",
];

fn functor_examples() -> Vec<(String, GroupoidFunctor)> {
    let z2 = cyclic_group(2);
    let point = spread_groupoid(&trivial_group(), &["p"]);
    let pair = spread_groupoid(&trivial_group(), &["a", "b"]);
    let collapse = GroupoidFunctor::from_ids(
        z2.underlying(),
        &point,
        &BTreeMap::from([("x".to_string(), "p".to_string())]),
        &BTreeMap::from([
            ("0".to_string(), "p>p:0".to_string()),
            ("1".to_string(), "p>p:0".to_string()),
        ]),
    )
    .expect("collapse is a functor");
    let include = GroupoidFunctor::from_ids(
        &point,
        &pair,
        &BTreeMap::from([("p".to_string(), "a".to_string())]),
        &BTreeMap::from([("p>p:0".to_string(), "a>a:0".to_string())]),
    )
    .expect("inclusion is a functor");
    let swap = GroupoidFunctor::from_ids(
        &pair,
        &pair,
        &BTreeMap::from([
            ("a".to_string(), "b".to_string()),
            ("b".to_string(), "a".to_string()),
        ]),
        &BTreeMap::from([
            ("a>a:0".to_string(), "b>b:0".to_string()),
            ("a>b:0".to_string(), "b>a:0".to_string()),
            ("b>a:0".to_string(), "a>b:0".to_string()),
            ("b>b:0".to_string(), "a>a:0".to_string()),
        ]),
    )
    .expect("swap is a functor");
    vec![
        ("collapse-loop-2".to_string(), collapse),
        ("include-point".to_string(), include),
        ("swap-pair".to_string(), swap),
    ]
}

fn provenance(seed: u64) -> String {
    format!("corpus small, seed {seed}")
}

fn groupoid_documents(seed: u64) -> Vec<Document> {
    let prov = provenance(seed);
    corpus::groupoid_corpus()
        .into_iter()
        .map(|(name, g)| groupoid_document(&format!("groupoid/{name}"), seed, &prov, &g))
        .collect()
}

fn sset_documents(seed: u64) -> Vec<Document> {
    let prov = provenance(seed);
    let mut docs: Vec<Document> = corpus::sset_corpus()
        .into_iter()
        .map(|f| sset_document(&format!("sset/{}", f.name), seed, &prov, &f.sset))
        .collect();
    for (name, x) in corpus::segal_failure_corpus() {
        docs.push(sset_document(&format!("sset/{name}"), seed, &prov, &x));
    }
    docs
}

fn multi_documents(seed: u64) -> Vec<Document> {
    let prov = provenance(seed);
    corpus::bisimplicial_corpus()
        .into_iter()
        .map(|(name, x)| multi_document(&format!("multi/{name}"), seed, &prov, &x))
        .collect()
}

fn two_documents(seed: u64) -> Vec<Document> {
    let prov = provenance(seed);
    corpus::two_groupoid_corpus()
        .into_iter()
        .map(|(name, phi)| ngroupoid_document(&format!("two/{name}"), seed, &prov, &phi))
        .collect()
}

fn map_documents(seed: u64) -> Vec<Document> {
    let prov = provenance(seed);
    corpus::nfunctor_corpus()
        .into_iter()
        .map(|f| nfunctor_document(&format!("map/{}", f.name), seed, &prov, &f.functor))
        .collect()
}

fn functor_documents(seed: u64) -> Vec<Document> {
    let prov = provenance(seed);
    functor_examples()
        .into_iter()
        .map(|(name, f)| functor_document(&format!("functor/{name}"), seed, &prov, &f))
        .collect()
}

/// All corpus families as documents, in a fixed order. The only supported
/// size class is `small`; its document count is pinned by a test.
pub fn generate_corpus(seed: u64, size_class: &str) -> Result<Vec<Document>, String> {
    if size_class != "small" {
        return Err(format!(
            "unknown size class `{size_class}` (only `small` is defined)"
        ));
    }
    let mut docs = Vec::new();
    docs.extend(groupoid_documents(seed));
    docs.extend(sset_documents(seed));
    docs.extend(multi_documents(seed));
    docs.extend(two_documents(seed));
    docs.extend(map_documents(seed));
    docs.extend(functor_documents(seed));
    docs.retain(|d| !OVERSIZED.contains(&d.metadata.name.as_str()));
    Ok(docs)
}

/// Looks a named document up in the generated corpus. Only the family
/// named by the prefix is built.
pub fn corpus_document(name: &str, seed: u64) -> Result<Document, String> {
    let family = match name.split('/').next().unwrap_or_default() {
        "groupoid" => groupoid_documents(seed),
        "sset" => sset_documents(seed),
        "multi" => multi_documents(seed),
        "two" => two_documents(seed),
        "map" => map_documents(seed),
        "functor" => functor_documents(seed),
        _ => Vec::new(),
    };
    family
        .into_iter()
        .filter(|d| !OVERSIZED.contains(&d.metadata.name.as_str()))
        .find(|d| d.metadata.name == name)
        .ok_or_else(|| format!("no corpus document named `{name}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_small_corpus_is_stable() {
        let docs = generate_corpus(0, "small").unwrap();
        assert_eq!(docs.len(), 63);
        let names: std::collections::BTreeSet<&str> =
            docs.iter().map(|d| d.metadata.name.as_str()).collect();
        assert_eq!(names.len(), docs.len(), "names are unique");
        assert!(names.contains("groupoid/loop-2"));
        assert!(names.contains("two/kspace-2"));
        for big in OVERSIZED {
            assert!(!names.contains(big), "{big} should stay in-memory");
        }
        assert!(generate_corpus(0, "large").is_err());
    }
}
