//! Named example families used by the test suites and the command line
//! driver.
//!
//! Every family is a fixed list: names are stable, identifiers are
//! canonical, and repeated calls rebuild identical objects, so reports
//! built from the corpus are reproducible byte for byte. Sizes stay small
//! enough for exhaustive checking, with three levels per axis throughout.

use crate::groupoid::{
    cyclic_group, dihedral_8, disjoint_union_groupoid, klein_four_group, nerve, quaternion_8,
    spread_groupoid, symmetric_3, trivial_group, FinGroupoid, FinGroupoidBuilder, GroupoidFunctor,
};
use crate::monotone::MonotoneMap;
use crate::multi::{
    disjoint_union_multi, external_product, from_sset, outer_monotone_map, MultiMap, MultiSSet,
};
use crate::ngroupoid::{
    collapse_to_point_map, constant_endo, constant_inner_lift, disjoint_union_ngroupoid,
    double_nerve, double_nerve_map, lift_nfunctor, nerve_nfunctor, nerve_ngroupoid, NFunctor,
    NGroupoid,
};
use crate::sset::{
    boundary_simplex, constant_sset, disjoint_union, free_simplicial_set, standard_simplex,
    SemiSimplicialData, SimplicialSet,
};
use std::collections::BTreeMap;

/// Dimension bound used for every corpus object, per axis.
pub const BOUND: usize = 3;

// ---------------------------------------------------------------------------
// Small builders

/// The groupoid with the given objects and nothing but identities.
fn discrete_groupoid(objects: &[&str]) -> FinGroupoid {
    let mut b = FinGroupoidBuilder::new();
    for x in objects {
        let e = format!("{x}>{x}:0");
        b.object(x);
        b.morphism(&e, x, x);
        b.identity(x, &e);
        b.inverse(&e, &e);
        b.compose(&e, &e, &e);
    }
    b.build().expect("discrete tables are total")
}

fn lifted(g: &FinGroupoid) -> NGroupoid {
    constant_inner_lift(&nerve_ngroupoid(g, BOUND), BOUND).expect("lift stays within bounds")
}

fn identity_nfunctor(phi: &NGroupoid) -> NFunctor {
    NFunctor::new(phi.n(), MultiMap::identity(phi.carrier())).expect("identity arities match")
}

// ---------------------------------------------------------------------------
// Groupoids

/// Twenty three small groupoids: one object groups, connected spreads,
/// discrete sets, and disjoint unions. Every entry has at most five
/// objects and sixteen morphisms.
pub fn groupoid_corpus() -> Vec<(String, FinGroupoid)> {
    let z2 = cyclic_group(2);
    let z3 = cyclic_group(3);
    let point = spread_groupoid(&trivial_group(), &["p"]);
    let pair = spread_groupoid(&trivial_group(), &["a", "b"]);
    let pair_loop_2 = spread_groupoid(&z2, &["a", "b"]);
    let entries: Vec<(&str, FinGroupoid)> = vec![
        ("point", point.clone()),
        ("dots-2", discrete_groupoid(&["a", "b"])),
        ("dots-3", discrete_groupoid(&["a", "b", "c"])),
        ("loop-2", z2.underlying().clone()),
        ("loop-3", z3.underlying().clone()),
        ("loop-4", cyclic_group(4).underlying().clone()),
        ("loop-5", cyclic_group(5).underlying().clone()),
        ("loop-6", cyclic_group(6).underlying().clone()),
        ("klein", klein_four_group().underlying().clone()),
        ("perm-3", symmetric_3().underlying().clone()),
        ("dihedral-8", dihedral_8().underlying().clone()),
        ("quaternion-8", quaternion_8().underlying().clone()),
        ("pair", pair.clone()),
        ("triple", spread_groupoid(&trivial_group(), &["a", "b", "c"])),
        ("quad", spread_groupoid(&trivial_group(), &["a", "b", "c", "d"])),
        ("pair-loop-2", pair_loop_2.clone()),
        ("pair-loop-3", spread_groupoid(&z3, &["a", "b"])),
        ("pair-klein", spread_groupoid(&klein_four_group(), &["a", "b"])),
        (
            "loop-2-plus-point",
            disjoint_union_groupoid(z2.underlying(), &point, "l", "r"),
        ),
        (
            "loop-2-plus-loop-3",
            disjoint_union_groupoid(z2.underlying(), z3.underlying(), "l", "r"),
        ),
        (
            "loop-3-plus-pair",
            disjoint_union_groupoid(z3.underlying(), &pair, "l", "r"),
        ),
        (
            "perm-3-plus-point",
            disjoint_union_groupoid(symmetric_3().underlying(), &point, "l", "r"),
        ),
        (
            "pair-loop-2-plus-point",
            disjoint_union_groupoid(&pair_loop_2, &point, "l", "r"),
        ),
    ];
    entries
        .into_iter()
        .map(|(n, g)| (n.to_string(), g))
        .collect()
}

/// The members of the groupoid corpus small enough for exhaustive functor
/// enumeration: at most three objects and eight morphisms.
pub fn small_equiv_corpus() -> Vec<(String, FinGroupoid)> {
    let keep = [
        "point",
        "dots-2",
        "loop-2",
        "loop-3",
        "pair",
        "loop-2-plus-point",
        "perm-3",
        "pair-loop-2",
    ];
    groupoid_corpus()
        .into_iter()
        .filter(|(n, _)| keep.contains(&n.as_str()))
        .collect()
}

// ---------------------------------------------------------------------------
// Simplicial sets

/// A corpus simplicial set with its expected homotopy level: `discrete`
/// entries have no cells beyond degenerate points, while every other
/// entry carries at least one component with a loop.
pub struct SsetFixture {
    pub name: String,
    pub sset: SimplicialSet,
    pub discrete: bool,
}

/// Ten simplicial sets split between discrete fixtures and fixtures with
/// loops. Kept free of contractible non-discrete shapes on purpose: the
/// reassembly suite flags exactly the discrete entries as truncated.
pub fn sset_corpus() -> Vec<SsetFixture> {
    let z2 = cyclic_group(2);
    let z3 = cyclic_group(3);
    let dot = constant_sset(&["p".into()], BOUND);
    let dots2 = constant_sset(&["p".into(), "q".into()], BOUND);
    let circle = boundary_simplex(2, BOUND);
    let entries: Vec<(&str, SimplicialSet, bool)> = vec![
        ("dot", dot.clone(), true),
        ("dots-2", dots2.clone(), true),
        (
            "dots-3",
            constant_sset(&["p".into(), "q".into(), "r".into()], BOUND),
            true,
        ),
        ("loop-2-nerve", nerve(z2.underlying(), BOUND).sset, false),
        ("loop-3-nerve", nerve(z3.underlying(), BOUND).sset, false),
        (
            "perm-3-nerve",
            nerve(symmetric_3().underlying(), BOUND).sset,
            false,
        ),
        ("circle", circle.clone(), false),
        (
            "circle-plus-dots",
            disjoint_union(&circle, &dots2, "l", "r").expect("bounds match"),
            false,
        ),
        (
            "loop-2-nerve-plus-dot",
            disjoint_union(&nerve(z2.underlying(), BOUND).sset, &dot, "l", "r")
                .expect("bounds match"),
            false,
        ),
        (
            "two-loops",
            disjoint_union(
                &nerve(z2.underlying(), BOUND).sset,
                &nerve(z3.underlying(), BOUND).sset,
                "l",
                "r",
            )
            .expect("bounds match"),
            false,
        ),
    ];
    entries
        .into_iter()
        .map(|(n, s, d)| SsetFixture {
            name: n.to_string(),
            sset: s,
            discrete: d,
        })
        .collect()
}

/// Shapes on which the spine comparison or the nerve check fails: a horn
/// with no filler and a filled triangle with no inverses. They stay out
/// of the main corpus and exist to demonstrate failure reports.
pub fn segal_failure_corpus() -> Vec<(String, SimplicialSet)> {
    let mut horn = SemiSimplicialData::new(1);
    horn.cell(0, "a").cell(0, "b").cell(0, "c");
    horn.cell(1, "ab").cell(1, "bc");
    horn.face(1, 0, "ab", "b").face(1, 1, "ab", "a");
    horn.face(1, 0, "bc", "c").face(1, 1, "bc", "b");
    vec![
        (
            "horn".to_string(),
            free_simplicial_set(&horn, BOUND).expect("horn data is closed"),
        ),
        ("triangle".to_string(), standard_simplex(2, BOUND)),
    ]
}

// ---------------------------------------------------------------------------
// Two axis sets

/// Twelve two axis sets: external products of nerves (some disconnected),
/// double nerve carriers, and lifted nerves.
pub fn bisimplicial_corpus() -> Vec<(String, MultiSSet)> {
    let z2 = cyclic_group(2);
    let z3 = cyclic_group(3);
    let n_z2 = from_sset(&nerve(z2.underlying(), BOUND).sset);
    let n_z3 = from_sset(&nerve(z3.underlying(), BOUND).sset);
    let dots2 = from_sset(&constant_sset(&["p".into(), "q".into()], BOUND));
    let dots3 = from_sset(&constant_sset(&["p".into(), "q".into(), "r".into()], BOUND));
    let split = disjoint_union_groupoid(
        z2.underlying(),
        &spread_groupoid(&trivial_group(), &["p"]),
        "l",
        "r",
    );
    let point_lift = lifted(&spread_groupoid(&trivial_group(), &["p"]));
    let k2 = double_nerve(&z2, BOUND, BOUND).expect("commutative group");
    let entries: Vec<(&str, MultiSSet)> = vec![
        ("torus-2-2", external_product(&n_z2, &n_z2)),
        ("torus-2-3", external_product(&n_z2, &n_z3)),
        (
            "torus-perm",
            external_product(
                &from_sset(&nerve(symmetric_3().underlying(), BOUND).sset),
                &n_z2,
            ),
        ),
        (
            "cylinder",
            external_product(
                &from_sset(&nerve(&spread_groupoid(&trivial_group(), &["a", "b"]), BOUND).sset),
                &n_z2,
            ),
        ),
        ("dots-times-loop", external_product(&dots2, &n_z2)),
        (
            "split-times-loop",
            external_product(&from_sset(&nerve(&split, BOUND).sset), &n_z3),
        ),
        ("dots-times-dots", external_product(&dots2, &dots3)),
        ("kspace-2-carrier", k2.carrier().clone()),
        (
            "kspace-3-carrier",
            double_nerve(&z3, BOUND, BOUND)
                .expect("commutative group")
                .carrier()
                .clone(),
        ),
        (
            "lift-perm-3-carrier",
            lifted(symmetric_3().underlying()).carrier().clone(),
        ),
        (
            "lift-split-carrier",
            lifted(&split).carrier().clone(),
        ),
        (
            "kspace-split-carrier",
            disjoint_union_multi(k2.carrier(), point_lift.carrier(), "l", "r")
                .expect("bounds match"),
        ),
    ];
    entries
        .into_iter()
        .map(|(n, x)| (n.to_string(), x))
        .collect()
}

// ---------------------------------------------------------------------------
// Two-groupoids

/// Nine two-groupoids: lifted nerves, double nerves, and a disconnected
/// union. Everything validates, at the usual bounds.
pub fn two_groupoid_corpus() -> Vec<(String, NGroupoid)> {
    let z2 = cyclic_group(2);
    let z3 = cyclic_group(3);
    let point = spread_groupoid(&trivial_group(), &["p"]);
    let k2 = double_nerve(&z2, BOUND, BOUND).expect("commutative group");
    let entries: Vec<(&str, NGroupoid)> = vec![
        ("lift-loop-2", lifted(z2.underlying())),
        ("lift-loop-3", lifted(z3.underlying())),
        ("lift-perm-3", lifted(symmetric_3().underlying())),
        ("lift-pair-loop-2", lifted(&spread_groupoid(&z2, &["a", "b"]))),
        (
            "lift-split",
            lifted(&disjoint_union_groupoid(z2.underlying(), &point, "l", "r")),
        ),
        ("kspace-2", k2.clone()),
        (
            "kspace-3",
            double_nerve(&z3, BOUND, BOUND).expect("commutative group"),
        ),
        (
            "kspace-klein",
            double_nerve(&klein_four_group(), BOUND, BOUND).expect("commutative group"),
        ),
        (
            "kspace-2-plus-point",
            disjoint_union_ngroupoid(&k2, &lifted(&point), "l", "r").expect("bounds match"),
        ),
    ];
    entries
        .into_iter()
        .map(|(n, p)| (n.to_string(), p))
        .collect()
}

// ---------------------------------------------------------------------------
// Maps of two-groupoids

/// A corpus map with the verdict its construction promises.
pub struct MapFixture {
    pub name: String,
    pub functor: NFunctor,
    /// Whether the map is an equivalence, known from how it was built.
    pub equivalence: bool,
}

/// Ten maps of two-groupoids, half equivalences and half not, covering
/// identities, lifted functors, double nerve maps, collapses, and a map
/// that misses a component.
pub fn nfunctor_corpus() -> Vec<MapFixture> {
    let z2 = cyclic_group(2);
    let z3 = cyclic_group(3);
    let z4 = cyclic_group(4);
    let point = spread_groupoid(&trivial_group(), &["a"]);
    let pair = spread_groupoid(&trivial_group(), &["a", "b"]);
    let point_lift = lifted(&spread_groupoid(&trivial_group(), &["p"]));
    let k2 = double_nerve(&z2, BOUND, BOUND).expect("commutative group");
    let union = disjoint_union_ngroupoid(&k2, &point_lift, "l", "r").expect("bounds match");

    let include = GroupoidFunctor::from_ids(
        &point,
        &pair,
        &BTreeMap::from([("a".to_string(), "a".to_string())]),
        &BTreeMap::from([("a>a:0".to_string(), "a>a:0".to_string())]),
    )
    .expect("inclusion is a functor");
    let swap_objects: BTreeMap<String, String> = BTreeMap::from([
        ("a".to_string(), "b".to_string()),
        ("b".to_string(), "a".to_string()),
    ]);
    let swap_morphisms: BTreeMap<String, String> = BTreeMap::from([
        ("a>a:0".to_string(), "b>b:0".to_string()),
        ("a>b:0".to_string(), "b>a:0".to_string()),
        ("b>a:0".to_string(), "a>b:0".to_string()),
        ("b>b:0".to_string(), "a>a:0".to_string()),
    ]);
    let swap = GroupoidFunctor::from_ids(&pair, &pair, &swap_objects, &swap_morphisms)
        .expect("swap is a functor");

    let miss = NFunctor::new(
        2,
        MultiMap::from_fn(point_lift.carrier(), union.carrier(), |_, id| {
            format!("r:{id}")
        })
        .expect("tagged cells exist"),
    )
    .expect("arities match");

    let entries: Vec<(&str, NFunctor, bool)> = vec![
        ("identity-kspace-2", identity_nfunctor(&k2), true),
        ("identity-kspace-split", identity_nfunctor(&union), true),
        (
            "lift-point-into-pair",
            lift_nfunctor(
                &nerve_nfunctor(&include, BOUND).expect("nerve map within bounds"),
                BOUND,
            )
            .expect("lift within bounds"),
            true,
        ),
        (
            "lift-swap-pair",
            lift_nfunctor(
                &nerve_nfunctor(&swap, BOUND).expect("nerve map within bounds"),
                BOUND,
            )
            .expect("lift within bounds"),
            true,
        ),
        (
            "double-shift-3",
            double_nerve_map(&z3, &z3, |x| (2 * x) % 3, BOUND, BOUND)
                .expect("doubling is a homomorphism"),
            true,
        ),
        (
            "double-reduce-4-to-2",
            double_nerve_map(&z4, &z2, |x| x % 2, BOUND, BOUND)
                .expect("reduction is a homomorphism"),
            false,
        ),
        (
            "double-embed-2-in-4",
            double_nerve_map(&z2, &z4, |x| 2 * x, BOUND, BOUND)
                .expect("embedding is a homomorphism"),
            false,
        ),
        (
            "collapse-lift-loop-2",
            collapse_to_point_map(&lifted(z2.underlying()), "pt").expect("collapse is simplicial"),
            false,
        ),
        (
            "squash-lift-pair-loop-2",
            constant_endo(&lifted(&spread_groupoid(&z2, &["a", "b"])), "a")
                .expect("constant map at a known object"),
            false,
        ),
        ("miss-a-component", miss, false),
    ];
    entries
        .into_iter()
        .map(|(n, f, e)| MapFixture {
            name: n.to_string(),
            functor: f,
            equivalence: e,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Pullback squares

/// A pair of maps with a common target, ready for a fiber product.
pub struct PullbackFixture {
    pub name: String,
    pub left: MultiMap,
    pub right: MultiMap,
}

/// Six pullback squares over double nerves, lifted nerves, and plain
/// nerves; the diagonal commutes with each of them strictly.
pub fn pullback_corpus() -> Vec<PullbackFixture> {
    let z2 = cyclic_group(2);
    let z3 = cyclic_group(3);
    let k2 = double_nerve(&z2, BOUND, BOUND).expect("commutative group");
    let k3 = double_nerve(&z3, BOUND, BOUND).expect("commutative group");
    let lift = lifted(symmetric_3().underlying());
    let endpoints = |x: &MultiSSet| -> (MultiMap, MultiMap) {
        (
            outer_monotone_map(x, &MonotoneMap::vertex(1, 0)).expect("vertex map"),
            outer_monotone_map(x, &MonotoneMap::vertex(1, 1)).expect("vertex map"),
        )
    };
    let section = outer_monotone_map(k2.carrier(), &MonotoneMap::codegeneracy(1, 0))
        .expect("degeneracy map");
    let point = from_sset(&constant_sset(&["*".into()], BOUND));
    let to_point = |x: &MultiSSet| -> MultiMap {
        MultiMap::from_fn(x, &point, |idx, _| point.cell_id(idx, 0).to_string())
            .expect("constant map")
    };
    let product = external_product(
        &from_sset(&nerve(symmetric_3().underlying(), BOUND).sset),
        &from_sset(&nerve(z2.underlying(), BOUND).sset),
    );
    let (k2_src, k2_tgt) = endpoints(k2.carrier());
    let (k3_src, k3_tgt) = endpoints(k3.carrier());
    let (lift_src, lift_tgt) = endpoints(lift.carrier());
    let entries: Vec<(&str, MultiMap, MultiMap)> = vec![
        ("kspace-2-endpoints", k2_src, k2_tgt),
        ("kspace-3-endpoints", k3_src, k3_tgt),
        ("kspace-2-section", section.clone(), section),
        (
            "nerves-to-point",
            to_point(&from_sset(&nerve(z3.underlying(), BOUND).sset)),
            to_point(&from_sset(&nerve(z2.underlying(), BOUND).sset)),
        ),
        (
            "product-identity",
            MultiMap::identity(&product),
            MultiMap::identity(&product),
        ),
        ("lift-endpoints", lift_src, lift_tgt),
    ];
    entries
        .into_iter()
        .map(|(n, l, r)| PullbackFixture {
            name: n.to_string(),
            left: l,
            right: r,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi::component_representatives;
    use crate::ngroupoid::n_equivalence;
    use std::collections::BTreeSet;

    #[test]
    fn the_groupoid_corpus_respects_its_limits() {
        let corpus = groupoid_corpus();
        assert!(corpus.len() >= 20);
        let names: BTreeSet<&str> = corpus.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names.len(), corpus.len());
        for (name, g) in &corpus {
            assert!(g.object_count() <= 5, "{name} has too many objects");
            assert!(g.morphism_count() <= 16, "{name} has too many morphisms");
        }
        for (name, g) in small_equiv_corpus() {
            assert!(g.object_count() <= 3, "{name} has too many objects");
            assert!(g.morphism_count() <= 8, "{name} has too many morphisms");
        }
    }

    #[test]
    fn the_sset_corpus_marks_exactly_the_discrete_entries() {
        let corpus = sset_corpus();
        assert!(corpus.len() >= 10);
        for f in &corpus {
            assert_eq!(
                from_sset(&f.sset).is_discrete(),
                f.discrete,
                "{} is mislabeled",
                f.name
            );
        }
    }

    #[test]
    fn the_two_axis_corpus_has_disconnected_members() {
        let corpus = bisimplicial_corpus();
        assert!(corpus.len() >= 10);
        let disconnected = corpus
            .iter()
            .filter(|(_, x)| component_representatives(x).unwrap().len() > 1)
            .count();
        assert!(disconnected >= 3);
        for (_, x) in &corpus {
            assert_eq!(x.arity(), 2);
        }
    }

    #[test]
    fn map_fixtures_carry_usable_verdicts() {
        let fixtures = nfunctor_corpus();
        assert_eq!(fixtures.len(), 10);
        let include = fixtures
            .iter()
            .find(|f| f.name == "lift-point-into-pair")
            .unwrap();
        assert!(n_equivalence(&include.functor).unwrap().passed());
        let miss = fixtures.iter().find(|f| f.name == "miss-a-component").unwrap();
        assert!(!n_equivalence(&miss.functor).unwrap().passed());
    }

    #[test]
    fn pullback_fixtures_share_targets() {
        for f in pullback_corpus() {
            assert_eq!(f.left.target(), f.right.target(), "{}", f.name);
        }
    }
}
