//! Weak n-groupoids as multi-simplicial sets.
//!
//! An n-groupoid here is an n-fold simplicial set whose first axis plays
//! the role of composition: level zero is discrete, every outer level is
//! determined by spine tuples up to equivalence one dimension down, and
//! collapsing all the arrow directions leaves the nerve of an ordinary
//! groupoid. The checks run exhaustively within the stored dimension
//! bounds and report violations rather than failing, so invalid input can
//! be inspected. Homotopy groups come out as honest finite groups: degree
//! one from the collapsed nerve, higher degrees by passing to the object
//! of arrows at a base point and going down one degree.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::edge_path::fundamental_group;
use crate::fp::{group_invariants, table_presentation};
use crate::groupoid::{
    automorphism_group, group_hom, is_equivalence, nerve, nerve_map, nerve_map_tables,
    product_group, trivial_group, FinGroup, FinGroupoid, GroupoidFunctor, NerveData,
};
use crate::monotone::MonotoneMap;
use crate::multi::{
    all_indices, collapse_inner_iterated, diagonal_components, from_sset, index_string,
    multi_fiber_product, outer_level, outer_monotone_map, pi0_axis_classes, to_sset, total_diag,
    validate_multi, MultiMap, MultiSSet,
};
use crate::report::{Report, ValidationReport};
use crate::sset::{is_nerve_of_groupoid, pair_id, pi0, segal_map, Partition};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// The type and its validation

/// An n-fold simplicial set carried around with its arity and a cached
/// verdict on the groupoid laws. Construction only fixes the arity;
/// validation is exhaustive and runs once on demand.
#[derive(Debug, Clone)]
pub struct NGroupoid {
    n: usize,
    carrier: MultiSSet,
    checked: OnceLock<ValidationReport>,
}

impl NGroupoid {
    pub fn new(n: usize, carrier: MultiSSet) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput {
                detail: "an n-groupoid needs at least one axis".into(),
            });
        }
        if carrier.arity() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                got: carrier.arity(),
            });
        }
        Ok(NGroupoid {
            n,
            carrier,
            checked: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn carrier(&self) -> &MultiSSet {
        &self.carrier
    }

    pub fn dim_bounds(&self) -> &[usize] {
        self.carrier.dim_bounds()
    }

    /// The full law check, computed on first use and cached.
    pub fn validation(&self) -> &ValidationReport {
        self.checked
            .get_or_init(|| compute_validation(self.n, &self.carrier))
    }

    pub fn is_valid(&self) -> bool {
        self.validation().is_valid()
    }

    /// The objects: cells at the all-zeros multi-index. Fails when level
    /// zero along the first axis carries more than a bare set, since then
    /// there is no honest set of objects to speak of.
    pub fn objects(&self) -> Result<Vec<String>> {
        let zero_level = outer_level(&self.carrier, 0)?;
        if !zero_level.is_discrete() {
            return Err(Error::BadStructure {
                detail: "outer level zero is not discrete".into(),
            });
        }
        Ok(self.carrier.cells(&vec![0; self.n]).to_vec())
    }
}

/// Checks every groupoid law on the carrier and lists the violations.
pub fn validate_ngroupoid(phi: &NGroupoid) -> ValidationReport {
    phi.validation().clone()
}

fn compute_validation(n: usize, carrier: &MultiSSet) -> ValidationReport {
    let mut rep = validate_multi(carrier);
    let bounds = carrier.dim_bounds().to_vec();

    // Level zero along the composition axis must be a bare set.
    match outer_level(carrier, 0) {
        Ok(zero) => {
            if !zero.is_discrete() {
                rep.push(
                    "outer level zero is discrete",
                    format!("level {}", index_string(&vec![0; n])),
                );
            }
        }
        Err(e) => rep.push("outer level zero is discrete", e.to_string()),
    }

    // Outer levels against their spine tuples.
    for m in 2..=bounds[0] {
        if n == 1 {
            match to_sset(carrier).and_then(|s| segal_map(&s, m)) {
                Ok(s) => {
                    if !s.is_bijection() {
                        let witness = if let Some(w) = s.non_surjective_witness() {
                            format!("tuple `{w}` has no filler")
                        } else {
                            let (a, b) = s.non_injective_witness().unwrap();
                            format!("cells `{a}` and `{b}` share a spine")
                        };
                        rep.push(
                            format!("spine comparison at outer level {m} is a bijection"),
                            witness,
                        );
                    }
                }
                Err(e) => rep.push(
                    format!("spine comparison at outer level {m} is defined"),
                    e.to_string(),
                ),
            }
        } else {
            match spine_comparison(carrier, m).and_then(|cmp| equivalence_of_map(&cmp, n - 1)) {
                Ok(sub) => {
                    if !sub.passed() {
                        let c = sub.first_failure().unwrap();
                        let witness = match &c.detail {
                            Some(d) => format!("{}; {}", c.name, d),
                            None => c.name.clone(),
                        };
                        rep.push(
                            format!("spine comparison at outer level {m} is an equivalence"),
                            witness,
                        );
                    }
                }
                Err(e) => rep.push(
                    format!("spine comparison at outer level {m} is defined"),
                    e.to_string(),
                ),
            }
        }
    }

    // Collapsing every arrow direction must leave the nerve of a groupoid.
    let collapsed = collapse_inner_iterated(carrier, n - 1)
        .and_then(|t| to_sset(&t))
        .and_then(|s| is_nerve_of_groupoid(&s));
    match collapsed {
        Ok(check) => {
            if !check.holds() {
                let c = check.report.first_failure().unwrap();
                let witness = match &c.detail {
                    Some(d) => format!("{}; {}", c.name, d),
                    None => c.name.clone(),
                };
                rep.push("collapsing the arrows yields the nerve of a groupoid", witness);
            }
        }
        Err(e) => rep.push(
            "collapsing the arrows yields the nerve of a groupoid",
            e.to_string(),
        ),
    }

    // Each outer level must itself be a groupoid one arity down.
    if n >= 2 {
        for m in 0..=bounds[0] {
            let level = outer_level(carrier, m).expect("level within bounds");
            let sub = compute_validation(n - 1, &level);
            rep.merge_under(&format!("outer level {m}"), sub);
        }
    }

    rep
}

/// The comparison from an outer level to the tuples along its spine,
/// built by fibered products of level one over level zero.
fn spine_comparison(carrier: &MultiSSet, m: usize) -> Result<MultiMap> {
    let level_m = outer_level(carrier, m)?;
    let edges = outer_level(carrier, 1)?;
    // An edge restricted to its endpoints: vertex 0 is the source.
    let src = outer_monotone_map(carrier, &MonotoneMap::vertex(1, 0))?;
    let tgt = outer_monotone_map(carrier, &MonotoneMap::vertex(1, 1))?;
    let mut tuples = edges.clone();
    let mut end = tgt.clone();
    for _ in 1..m {
        let fp = multi_fiber_product(&end, &src)?;
        end = fp.pr2.then(&tgt)?;
        tuples = fp.object;
    }
    MultiMap::from_fn(&level_m, &tuples, |inner, id| {
        let mut full = vec![m];
        full.extend_from_slice(inner);
        let c = carrier.cell_index(&full, id).expect("cell of the outer level");
        let mut tuple_id: Option<String> = None;
        for j in 0..m {
            let (at, e) = carrier
                .apply_axis_monotone(0, &MonotoneMap::spine_edge(m, j), full.clone(), c)
                .expect("spine edge within bounds");
            let eid = carrier.cell_id(&at, e);
            tuple_id = Some(match tuple_id {
                None => eid.to_string(),
                Some(p) => pair_id(&p, eid),
            });
        }
        tuple_id.expect("at least one spine edge")
    })
}

// ---------------------------------------------------------------------------
// Equivalences

/// Whether a map of carriers is an equivalence of n-groupoids: reaching
/// every component of the target, and inducing equivalences between all
/// objects of arrows, down to honest groupoid equivalences at arity one.
pub fn equivalence_of_map(f: &MultiMap, n: usize) -> Result<Report> {
    if n == 0 {
        return Err(Error::InvalidInput {
            detail: "equivalence needs at least one axis".into(),
        });
    }
    if f.source().arity() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: f.source().arity(),
        });
    }
    if n == 1 {
        let s = to_sset(f.source())?;
        let t = to_sset(f.target())?;
        let mut rep = Report::new("equivalence of a map of 1-groupoids");
        let sc = is_nerve_of_groupoid(&s)?;
        let tc = is_nerve_of_groupoid(&t)?;
        if !sc.holds() {
            let c = sc.report.first_failure().unwrap();
            rep.fail("the source is the nerve of a groupoid", c.name.clone());
            return Ok(rep);
        }
        rep.pass("the source is the nerve of a groupoid");
        if !tc.holds() {
            let c = tc.report.first_failure().unwrap();
            rep.fail("the target is the nerve of a groupoid", c.name.clone());
            return Ok(rep);
        }
        rep.pass("the target is the nerve of a groupoid");
        let g = sc.groupoid.unwrap();
        let h = tc.groupoid.unwrap();
        let mut objects = BTreeMap::new();
        for c in 0..s.cell_count(0) {
            objects.insert(
                s.cell_id(0, c).to_string(),
                t.cell_id(0, f.apply(&[0], c)).to_string(),
            );
        }
        let mut morphisms = BTreeMap::new();
        for e in 0..s.cell_count(1) {
            morphisms.insert(
                s.cell_id(1, e).to_string(),
                t.cell_id(1, f.apply(&[1], e)).to_string(),
            );
        }
        match GroupoidFunctor::from_ids(&g, &h, &objects, &morphisms) {
            Ok(functor) => {
                rep.pass("the map is a functor of the reconstructed groupoids");
                let eq = is_equivalence(&functor);
                rep.checks.extend(eq.report.checks);
                rep.not_checked.extend(eq.report.not_checked);
            }
            Err(e) => rep.fail(
                "the map is a functor of the reconstructed groupoids",
                e.to_string(),
            ),
        }
        return Ok(rep);
    }

    let mut rep = Report::new(format!("equivalence of a map of {n}-groupoids"));
    let zero = vec![0; n];
    let classes = diagonal_components(f.target())?;
    let mut hit = vec![false; classes.len()];
    for c in 0..f.source().cell_count(&zero) {
        let image = f.target().cell_id(&zero, f.apply(&zero, c));
        if let Some(k) = classes.class_of(image) {
            hit[k] = true;
        }
    }
    let missed = hit.iter().position(|&h| !h);
    rep.record(
        "every component of the target is reached",
        missed.is_none(),
        missed
            .map(|k| format!("component of `{}`", classes.representative(k)))
            .unwrap_or_default(),
    );
    let source_objects = f.source().cells(&zero).to_vec();
    for x in &source_objects {
        for y in &source_objects {
            let arrows = arrow_carrier_of(f.source(), x, y)?;
            let xi = f.source().cell_index(&zero, x).unwrap();
            let yi = f.source().cell_index(&zero, y).unwrap();
            let fx = f.target().cell_id(&zero, f.apply(&zero, xi)).to_string();
            let fy = f.target().cell_id(&zero, f.apply(&zero, yi)).to_string();
            let target_arrows = arrow_carrier_of(f.target(), &fx, &fy)?;
            let induced = MultiMap::from_fn(&arrows, &target_arrows, |inner, id| {
                let mut full = vec![1];
                full.extend_from_slice(inner);
                let c = f.source().cell_index(&full, id).expect("arrow cell");
                f.target().cell_id(&full, f.apply(&full, c)).to_string()
            })?;
            let sub = equivalence_of_map(&induced, n - 1)?;
            let witness = sub
                .first_failure()
                .map(|c| c.name.clone())
                .unwrap_or_default();
            rep.record(
                format!("arrows `{x}` -> `{y}` map by an equivalence"),
                sub.passed(),
                witness,
            );
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Arrows between two objects

/// Walks a cell at an inner index of level zero down to the all-zeros
/// index. On a valid carrier all routes agree, so first faces suffice.
fn canonical_object(carrier: &MultiSSet, mut idx: Vec<usize>, mut cell: usize) -> usize {
    while let Some(axis) = idx.iter().position(|&v| v > 0) {
        cell = carrier.face(&idx, axis, 0, cell);
        idx[axis] -= 1;
    }
    cell
}

fn arrow_carrier_of(carrier: &MultiSSet, x: &str, y: &str) -> Result<MultiSSet> {
    let n = carrier.arity();
    if n == 0 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: 0,
        });
    }
    if carrier.dim_bounds()[0] < 1 {
        return Err(Error::NeedsLevel {
            needed: 1,
            bound: carrier.dim_bounds()[0],
        });
    }
    let zero = vec![0; n];
    let xi = carrier
        .cell_index(&zero, x)
        .ok_or_else(|| Error::UnknownObject { id: x.to_string() })?;
    let yi = carrier
        .cell_index(&zero, y)
        .ok_or_else(|| Error::UnknownObject { id: y.to_string() })?;
    let edges = outer_level(carrier, 1)?;
    let mut keep = BTreeMap::new();
    for inner in edges.indices() {
        let mut full = vec![1];
        full.extend_from_slice(&inner);
        let mut at0 = full.clone();
        at0[0] = 0;
        let flags = (0..carrier.cell_count(&full))
            .map(|c| {
                let s = carrier.face(&full, 0, 1, c);
                let t = carrier.face(&full, 0, 0, c);
                canonical_object(carrier, at0.clone(), s) == xi
                    && canonical_object(carrier, at0.clone(), t) == yi
            })
            .collect();
        keep.insert(inner, flags);
    }
    edges.restrict(&keep)
}

/// The carrier of arrows from `x` to `y`: the part of outer level one
/// whose endpoints land on the two objects, with the composition axis
/// dropped.
pub fn arrow_carrier(phi: &NGroupoid, x: &str, y: &str) -> Result<MultiSSet> {
    arrow_carrier_of(&phi.carrier, x, y)
}

/// The arrows from `x` to `y` as an (n-1)-groupoid. Needs n at least two;
/// for a 1-groupoid the arrows form a bare set, see `hom_set`.
pub fn arrow_object(phi: &NGroupoid, x: &str, y: &str) -> Result<NGroupoid> {
    if phi.n < 2 {
        return Err(Error::InvalidInput {
            detail: "arrows of a 1-groupoid form a plain set; use hom_set".into(),
        });
    }
    NGroupoid::new(phi.n - 1, arrow_carrier_of(&phi.carrier, x, y)?)
}

/// The arrows of a 1-groupoid from `x` to `y`, as a sorted list of cells.
pub fn hom_set(phi: &NGroupoid, x: &str, y: &str) -> Result<Vec<String>> {
    if phi.n != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: phi.n,
        });
    }
    Ok(arrow_carrier_of(&phi.carrier, x, y)?.cells(&[]).to_vec())
}

// ---------------------------------------------------------------------------
// Homotopy

/// Components of the objects, by collapsing one axis at a time from the
/// inside and tracking where each object ends up.
pub fn pi0_set(phi: &NGroupoid) -> Result<Partition> {
    let objects = phi.objects()?;
    let mut current = phi.carrier.clone();
    let mut class: Vec<usize> = (0..objects.len()).collect();
    for _ in 0..phi.n {
        let (next, tables) = pi0_axis_classes(&current, current.arity() - 1)?;
        let table = &tables[&vec![0; current.arity() - 1]];
        for c in class.iter_mut() {
            *c = table[*c];
        }
        current = next;
    }
    let mut groups = vec![Vec::new(); current.cell_count(&[])];
    for (i, id) in objects.iter().enumerate() {
        groups[class[i]].push(id.clone());
    }
    Ok(Partition::from_groups(groups))
}

/// The homotopy group of `phi` at the object `x` in degree `i`, for
/// degrees from 1 up to n. Degree one is the vertex group of the
/// collapsed nerve; higher degrees recurse into the arrows at `x`.
pub fn homotopy_group(phi: &NGroupoid, x: &str, i: usize) -> Result<FinGroup> {
    if i < 1 || i > phi.n {
        return Err(Error::DegreeOutOfRange {
            degree: i,
            n: phi.n,
        });
    }
    let zero = vec![0; phi.n];
    let xi = phi
        .carrier
        .cell_index(&zero, x)
        .ok_or_else(|| Error::UnknownObject { id: x.to_string() })?;
    if i == 1 {
        let collapsed = collapse_inner_iterated(&phi.carrier, phi.n - 1)?;
        let s = to_sset(&collapsed)?;
        let check = is_nerve_of_groupoid(&s)?;
        let g = check.groupoid.ok_or_else(|| Error::BadStructure {
            detail: "the collapsed carrier is not the nerve of a groupoid".into(),
        })?;
        return automorphism_group(&g, x);
    }
    let arrows = arrow_object(phi, x, x)?;
    // The identity arrow on x: its degenerate image one outer level up.
    let identity_cell = phi.carrier.degeneracy(&zero, 0, 0, xi);
    let mut up = zero.clone();
    up[0] = 1;
    let identity_id = phi.carrier.cell_id(&up, identity_cell).to_string();
    homotopy_group(&arrows, &identity_id, i - 1)
}

// ---------------------------------------------------------------------------
// Maps

/// A map of n-groupoids: a levelwise map of carriers of matching arity.
/// Commutation with all structure maps is checked on construction of the
/// underlying `MultiMap`; the groupoid laws of the two sides are not.
#[derive(Debug, Clone)]
pub struct NFunctor {
    n: usize,
    map: MultiMap,
}

impl NFunctor {
    pub fn new(n: usize, map: MultiMap) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput {
                detail: "a map of n-groupoids needs at least one axis".into(),
            });
        }
        if map.source().arity() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                got: map.source().arity(),
            });
        }
        Ok(NFunctor { n, map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn map(&self) -> &MultiMap {
        &self.map
    }

    pub fn source(&self) -> Result<NGroupoid> {
        NGroupoid::new(self.n, self.map.source().clone())
    }

    pub fn target(&self) -> Result<NGroupoid> {
        NGroupoid::new(self.n, self.map.target().clone())
    }
}

/// Whether the map is an equivalence of n-groupoids, as a full report.
pub fn n_equivalence(f: &NFunctor) -> Result<Report> {
    equivalence_of_map(&f.map, f.n)
}

// ---------------------------------------------------------------------------
// Constructors

/// The nerve of a groupoid as a 1-groupoid.
pub fn nerve_ngroupoid(g: &FinGroupoid, dim_bound: usize) -> NGroupoid {
    let data = nerve(g, dim_bound);
    NGroupoid::new(1, from_sset(&data.sset)).expect("nerve has arity one")
}

fn constant_carrier(objects: &[String], bounds: &[usize]) -> MultiSSet {
    let mut ids = objects.to_vec();
    ids.sort();
    ids.dedup();
    let identity: Vec<usize> = (0..ids.len()).collect();
    let mut data = BTreeMap::new();
    for idx in all_indices(bounds) {
        let faces = (0..bounds.len())
            .map(|a| {
                if idx[a] == 0 {
                    Vec::new()
                } else {
                    vec![identity.clone(); idx[a] + 1]
                }
            })
            .collect();
        let degens = (0..bounds.len())
            .map(|a| {
                if idx[a] == bounds[a] {
                    Vec::new()
                } else {
                    vec![identity.clone(); idx[a] + 1]
                }
            })
            .collect();
        data.insert(idx, (ids.clone(), faces, degens));
    }
    MultiSSet::from_parts(bounds.to_vec(), data).expect("constant tables are consistent")
}

/// The discrete n-groupoid on a set of objects: constant at every level,
/// with identity structure maps.
pub fn discrete_ngroupoid(objects: &[&str], n: usize, bound: usize) -> Result<NGroupoid> {
    if n == 0 {
        return Err(Error::InvalidInput {
            detail: "an n-groupoid needs at least one axis".into(),
        });
    }
    let ids: Vec<String> = objects.iter().map(|s| s.to_string()).collect();
    NGroupoid::new(n, constant_carrier(&ids, &vec![bound; n]))
}

fn constant_inner_lift_set(x: &MultiSSet, bound: usize) -> MultiSSet {
    let old = x.arity();
    let mut bounds = x.dim_bounds().to_vec();
    bounds.push(bound);
    let mut data = BTreeMap::new();
    for idx in all_indices(&bounds) {
        let base = &idx[..old];
        let cells = x.cells(base).to_vec();
        let identity: Vec<usize> = (0..cells.len()).collect();
        let mut faces: Vec<Vec<Vec<usize>>> = (0..old)
            .map(|a| {
                if idx[a] == 0 {
                    Vec::new()
                } else {
                    (0..=idx[a])
                        .map(|i| (0..cells.len()).map(|c| x.face(base, a, i, c)).collect())
                        .collect()
                }
            })
            .collect();
        faces.push(if idx[old] == 0 {
            Vec::new()
        } else {
            vec![identity.clone(); idx[old] + 1]
        });
        let mut degens: Vec<Vec<Vec<usize>>> = (0..old)
            .map(|a| {
                if idx[a] == x.dim_bounds()[a] {
                    Vec::new()
                } else {
                    (0..=idx[a])
                        .map(|i| {
                            (0..cells.len())
                                .map(|c| x.degeneracy(base, a, i, c))
                                .collect()
                        })
                        .collect()
                }
            })
            .collect();
        degens.push(if idx[old] == bound {
            Vec::new()
        } else {
            vec![identity; idx[old] + 1]
        });
        data.insert(idx, (cells, faces, degens));
    }
    MultiSSet::from_parts(bounds, data).expect("lifted tables are consistent")
}

/// Appends a constant innermost axis, turning an n-groupoid into an
/// (n+1)-groupoid with the same objects and homotopy in the old degrees
/// and nothing in the new one.
pub fn constant_inner_lift(phi: &NGroupoid, bound: usize) -> Result<NGroupoid> {
    NGroupoid::new(phi.n + 1, constant_inner_lift_set(&phi.carrier, bound))
}

/// Pairs two carriers of equal arity side by side with tagged cells.
pub fn disjoint_union_ngroupoid(
    a: &NGroupoid,
    b: &NGroupoid,
    tag_a: &str,
    tag_b: &str,
) -> Result<NGroupoid> {
    if a.n != b.n {
        return Err(Error::ArityMismatch {
            expected: a.n,
            got: b.n,
        });
    }
    let carrier = crate::multi::disjoint_union_multi(&a.carrier, &b.carrier, tag_a, tag_b)?;
    NGroupoid::new(a.n, carrier)
}

// ---------------------------------------------------------------------------
// Double nerves of commutative groups

// Mirrors the naming convention of `product_group`: pair identifiers nest
// to the left, so a tuple splits at the last bar at depth zero.
fn split_pair(e: &str) -> (&str, &str) {
    let inner = &e[1..e.len() - 1];
    let mut depth = 0usize;
    let mut cut = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '|' if depth == 0 => cut = i,
            _ => {}
        }
    }
    (&inner[..cut], &inner[cut + 1..])
}

fn decode_tuple(a: &FinGroup, m: usize, id: &str) -> Vec<usize> {
    match m {
        0 => Vec::new(),
        1 => vec![a.element_index(id).expect("element of the group")],
        _ => {
            let (left, right) = split_pair(id);
            let mut out = decode_tuple(a, m - 1, left);
            out.push(a.element_index(right).expect("element of the group"));
            out
        }
    }
}

fn encode_tuple(a: &FinGroup, parts: &[usize]) -> String {
    if parts.is_empty() {
        return "0".to_string();
    }
    let mut id = a.element_id(parts[0]).to_string();
    for &p in &parts[1..] {
        id = pair_id(&id, a.element_id(p));
    }
    id
}

struct DoubleNerveParts {
    set: MultiSSet,
    powers: Vec<FinGroup>,
    nerves: Vec<NerveData>,
}

fn double_nerve_parts(
    a: &FinGroup,
    outer_bound: usize,
    inner_bound: usize,
) -> Result<DoubleNerveParts> {
    if !a.is_abelian() {
        return Err(Error::InvalidInput {
            detail: "the double nerve needs a commutative group: merging two adjacent \
                     entries of a tuple is only a homomorphism then"
                .into(),
        });
    }
    let mut powers: Vec<FinGroup> = vec![trivial_group()];
    for m in 1..=outer_bound {
        powers.push(if m == 1 {
            a.clone()
        } else {
            product_group(&powers[m - 1], a)
        });
    }
    let nerves: Vec<NerveData> = powers
        .iter()
        .map(|p| nerve(p.underlying(), inner_bound))
        .collect();

    // Tuple operations as group homomorphisms: the two outermost faces
    // drop an end, the middle ones multiply two adjacent entries, and
    // degeneracies insert the identity.
    let face_hom = |m: usize, i: usize| -> Result<GroupoidFunctor> {
        group_hom(&powers[m], &powers[m - 1], |e| {
            let mut t = decode_tuple(a, m, powers[m].element_id(e));
            if i == 0 {
                t.remove(0);
            } else if i == m {
                t.pop();
            } else {
                let merged = a.mult(t[i - 1], t[i]);
                t[i - 1] = merged;
                t.remove(i);
            }
            powers[m - 1]
                .element_index(&encode_tuple(a, &t))
                .expect("tuple of the smaller power")
        })
    };
    let degeneracy_hom = |m: usize, i: usize| -> Result<GroupoidFunctor> {
        group_hom(&powers[m], &powers[m + 1], |e| {
            let mut t = decode_tuple(a, m, powers[m].element_id(e));
            t.insert(i, a.identity());
            powers[m + 1]
                .element_index(&encode_tuple(a, &t))
                .expect("tuple of the larger power")
        })
    };

    // Tables per outer operation, for all inner levels at once.
    let mut face_tabs: Vec<Vec<Vec<Vec<usize>>>> = Vec::new();
    let mut degen_tabs: Vec<Vec<Vec<Vec<usize>>>> = Vec::new();
    for m in 0..=outer_bound {
        let mut row = Vec::new();
        if m > 0 {
            for i in 0..=m {
                row.push(nerve_map_tables(&nerves[m], &nerves[m - 1], &face_hom(m, i)?)?);
            }
        }
        face_tabs.push(row);
        let mut row = Vec::new();
        if m < outer_bound {
            for i in 0..=m {
                row.push(nerve_map_tables(
                    &nerves[m],
                    &nerves[m + 1],
                    &degeneracy_hom(m, i)?,
                )?);
            }
        }
        degen_tabs.push(row);
    }

    let mut data = BTreeMap::new();
    for m in 0..=outer_bound {
        let s = &nerves[m].sset;
        for k in 0..=inner_bound {
            let cells = s.cells(k).to_vec();
            let outer_faces: Vec<Vec<usize>> =
                face_tabs[m].iter().map(|t| t[k].clone()).collect();
            let inner_faces: Vec<Vec<usize>> = if k == 0 {
                Vec::new()
            } else {
                (0..=k)
                    .map(|i| (0..cells.len()).map(|c| s.face(k, i, c)).collect())
                    .collect()
            };
            let outer_degens: Vec<Vec<usize>> =
                degen_tabs[m].iter().map(|t| t[k].clone()).collect();
            let inner_degens: Vec<Vec<usize>> = if k == inner_bound {
                Vec::new()
            } else {
                (0..=k)
                    .map(|i| (0..cells.len()).map(|c| s.degeneracy(k, i, c)).collect())
                    .collect()
            };
            data.insert(
                vec![m, k],
                (
                    cells,
                    vec![outer_faces, inner_faces],
                    vec![outer_degens, inner_degens],
                ),
            );
        }
    }
    let set = MultiSSet::from_parts(vec![outer_bound, inner_bound], data)?;
    Ok(DoubleNerveParts { set, powers, nerves })
}

/// The 2-groupoid with one object whose only homotopy is the given
/// commutative group in degree two: outer level m carries the nerve of
/// the m-th power of the group, with faces given by tuple operations.
pub fn double_nerve(a: &FinGroup, outer_bound: usize, inner_bound: usize) -> Result<NGroupoid> {
    let parts = double_nerve_parts(a, outer_bound, inner_bound)?;
    NGroupoid::new(2, parts.set)
}

/// The map of double nerves induced by a homomorphism of commutative
/// groups, given elementwise on the first group.
pub fn double_nerve_map(
    a: &FinGroup,
    b: &FinGroup,
    image: impl Fn(usize) -> usize,
    outer_bound: usize,
    inner_bound: usize,
) -> Result<NFunctor> {
    let pa = double_nerve_parts(a, outer_bound, inner_bound)?;
    let pb = double_nerve_parts(b, outer_bound, inner_bound)?;
    let mut tables = BTreeMap::new();
    for m in 0..=outer_bound {
        let hom = group_hom(&pa.powers[m], &pb.powers[m], |e| {
            let t = decode_tuple(a, m, pa.powers[m].element_id(e));
            let im: Vec<usize> = t.iter().map(|&g| image(g)).collect();
            pb.powers[m]
                .element_index(&encode_tuple(b, &im))
                .expect("image tuple")
        })?;
        let per_level = nerve_map_tables(&pa.nerves[m], &pb.nerves[m], &hom)?;
        for (k, table) in per_level.into_iter().enumerate() {
            tables.insert(vec![m, k], table);
        }
    }
    NFunctor::new(2, MultiMap::from_tables(pa.set, pb.set, tables)?)
}

// ---------------------------------------------------------------------------
// Map builders

/// The nerve of a functor as a map of 1-groupoids.
pub fn nerve_nfunctor(f: &GroupoidFunctor, dim_bound: usize) -> Result<NFunctor> {
    let sm = nerve_map(f, dim_bound)?;
    let mut tables = BTreeMap::new();
    for k in 0..=dim_bound {
        tables.insert(
            vec![k],
            (0..sm.source().cell_count(k)).map(|c| sm.apply(k, c)).collect(),
        );
    }
    let map = MultiMap::from_tables(from_sset(sm.source()), from_sset(sm.target()), tables)?;
    NFunctor::new(1, map)
}

/// Lifts a map along constant innermost axes on both sides.
pub fn lift_nfunctor(f: &NFunctor, bound: usize) -> Result<NFunctor> {
    let n = f.n;
    let source = constant_inner_lift_set(f.map.source(), bound);
    let target = constant_inner_lift_set(f.map.target(), bound);
    let map = MultiMap::from_fn(&source, &target, |idx, id| {
        let base = &idx[..n];
        let c = f.map.source().cell_index(base, id).expect("lifted cell");
        f.map.target().cell_id(base, f.map.apply(base, c)).to_string()
    })?;
    NFunctor::new(n + 1, map)
}

/// The map collapsing everything to a single named object.
pub fn collapse_to_point_map(phi: &NGroupoid, name: &str) -> Result<NFunctor> {
    let target = constant_carrier(&[name.to_string()], phi.carrier.dim_bounds());
    let map = MultiMap::from_fn(&phi.carrier, &target, |_, _| name.to_string())?;
    NFunctor::new(phi.n, map)
}

/// The endomorphism sending every cell to the fully degenerate image of
/// one object.
pub fn constant_endo(phi: &NGroupoid, x: &str) -> Result<NFunctor> {
    let zero = vec![0; phi.n];
    let xi = phi
        .carrier
        .cell_index(&zero, x)
        .ok_or_else(|| Error::UnknownObject { id: x.to_string() })?;
    let carrier = &phi.carrier;
    let map = MultiMap::from_fn(carrier, carrier, |idx, _| {
        let mut at = zero.clone();
        let mut cell = xi;
        for (axis, &target) in idx.iter().enumerate() {
            while at[axis] < target {
                cell = carrier.degeneracy(&at, axis, 0, cell);
                at[axis] += 1;
            }
        }
        carrier.cell_id(&at, cell).to_string()
    })?;
    NFunctor::new(phi.n, map)
}

// ---------------------------------------------------------------------------
// Units: a groupoid against the loops of its nerve, and a 2-groupoid
// against its diagonal

/// Compares a groupoid with the fundamental group presentations of its
/// nerve, one component at a time. Every tree path is evaluated back in
/// the groupoid, so the comparison exercises actual arrows rather than
/// only counting.
pub fn unit_check_n1(g: &FinGroupoid) -> Result<Report> {
    let data = nerve(g, 2);
    let x = &data.sset;
    let mut rep = Report::new("groupoid against the loops of its nerve");
    let components = pi0(x)?;
    for class in components.classes() {
        let base_id = &class[0];
        let lp = crate::edge_path::loop_presentation(x, base_id)?;
        let base_obj = g.object_index(base_id).expect("vertex is an object");
        let arrow_of = |e: usize| data.chain(1, e)[0];
        let path_to = |v: usize| -> usize {
            let mut m = g.identity_of(base_obj);
            for (e, forward) in lp.tree_path(v) {
                let mut step = arrow_of(e);
                if !forward {
                    step = g.inverse_of(step);
                }
                m = g.compose(m, step).expect("tree path composes");
            }
            m
        };
        // A loop generator evaluates to the conjugate of its arrow by the
        // tree paths at both ends.
        let evaluate = |e: usize| -> usize {
            let u = path_to(x.face(1, 1, e));
            let v = path_to(x.face(1, 0, e));
            let with_arrow = g.compose(u, arrow_of(e)).expect("endpoint matches");
            g.compose(with_arrow, g.inverse_of(v)).expect("loop closes")
        };
        let gen_image: Vec<usize> = lp
            .group
            .gen_names()
            .iter()
            .map(|name| evaluate(x.cell_index(1, name).expect("generator edge")))
            .collect();

        let mut relators_ok = true;
        let mut relator_witness = String::new();
        for word in lp.group.relators() {
            let mut acc = g.identity_of(base_obj);
            for &(gen, inverted) in word {
                let mut step = gen_image[gen];
                if inverted {
                    step = g.inverse_of(step);
                }
                acc = g.compose(acc, step).expect("loops compose");
            }
            if !g.is_identity(acc) {
                relators_ok = false;
                relator_witness = lp.group.word_string(word);
                break;
            }
        }
        rep.record(
            format!("component `{base_id}`: relators evaluate to the identity"),
            relators_ok,
            relator_witness,
        );

        // Every arrow in the component must agree with the loop it
        // collapses to: generators by construction, tree and identity
        // arrows because their conjugate closes up trivially.
        let mut arrows_ok = true;
        let mut arrow_witness = String::new();
        for e in 0..x.cell_count(1) {
            if !lp.contains_vertex(x.face(1, 1, e)) {
                continue;
            }
            let direct = evaluate(e);
            let expected = match lp.edge_generator(e) {
                Some(gen) => gen_image[gen],
                None => g.identity_of(base_obj),
            };
            if direct != expected {
                arrows_ok = false;
                arrow_witness = format!("arrow `{}`", x.cell_id(1, e));
                break;
            }
        }
        rep.record(
            format!("component `{base_id}`: every arrow matches its collapsed loop"),
            arrows_ok,
            arrow_witness,
        );

        let aut = automorphism_group(g, base_id)?;
        rep.record(
            format!("component `{base_id}`: loop invariants match the vertex group"),
            group_invariants(&lp.group) == group_invariants(&table_presentation(&aut)),
            "abelian invariants or counting profile differ",
        );
    }
    Ok(rep)
}

/// Compares a 2-groupoid with the diagonal of its carrier at a base
/// object: component counts and first homotopy must agree. Homotopy above
/// degree one is out of reach of the diagonal's edge paths and is
/// reported as not checked.
pub fn unit_invariants_n2(phi: &NGroupoid, x: &str) -> Result<Report> {
    if phi.n != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: phi.n,
        });
    }
    let mut rep = Report::new("a 2-groupoid against its diagonal");
    let diag = total_diag(&phi.carrier)?;
    let diag_components = pi0(&diag)?;
    let classes = pi0_set(phi)?;
    rep.record(
        "component counts agree",
        diag_components.len() == classes.len(),
        format!("{} against {}", diag_components.len(), classes.len()),
    );
    let loops = fundamental_group(&diag, x)?;
    let first = homotopy_group(phi, x, 1)?;
    rep.record(
        "loop invariants at the base match the first homotopy group",
        group_invariants(&loops) == group_invariants(&table_presentation(&first)),
        "abelian invariants or counting profile differ",
    );
    rep.skip("homotopy above degree 1");
    Ok(rep)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{
        cyclic_group, disjoint_union_groupoid, klein_four_group, spread_groupoid, symmetric_3,
    };
    use crate::multi::external_product;
    use crate::sset::standard_simplex;

    #[test]
    fn the_nerve_of_a_group_is_a_one_groupoid() {
        let phi = nerve_ngroupoid(cyclic_group(3).underlying(), 3);
        assert!(phi.is_valid(), "{}", phi.validation().render());
        assert_eq!(phi.objects().unwrap(), vec!["x"]);
        assert_eq!(pi0_set(&phi).unwrap().len(), 1);
        let g = homotopy_group(&phi, "x", 1).unwrap();
        assert!(g.is_isomorphic(&cyclic_group(3)));
    }

    #[test]
    fn a_filled_triangle_is_not_a_one_groupoid() {
        let phi = NGroupoid::new(1, from_sset(&standard_simplex(2, 3))).unwrap();
        assert!(!phi.is_valid());
        let report = phi.validation().clone();
        assert!(
            report
                .violations
                .iter()
                .any(|v| v.witness.contains("two-sided inverse")),
            "{}",
            report.render()
        );
    }

    #[test]
    fn lifting_a_nerve_gives_a_valid_two_groupoid() {
        let base = nerve_ngroupoid(symmetric_3().underlying(), 3);
        let phi = constant_inner_lift(&base, 3).unwrap();
        assert!(phi.is_valid(), "{}", phi.validation().render());
        let first = homotopy_group(&phi, "x", 1).unwrap();
        assert!(first.is_isomorphic(&symmetric_3()));
        let second = homotopy_group(&phi, "x", 2).unwrap();
        assert_eq!(second.order(), 1);
        assert!(matches!(
            homotopy_group(&phi, "x", 3),
            Err(Error::DegreeOutOfRange { degree: 3, n: 2 })
        ));
        assert!(matches!(
            homotopy_group(&phi, "x", 0),
            Err(Error::DegreeOutOfRange { degree: 0, n: 2 })
        ));
    }

    #[test]
    fn a_product_of_intervals_is_not_a_two_groupoid() {
        let interval = from_sset(&standard_simplex(1, 2));
        let square = external_product(&interval, &interval);
        let phi = NGroupoid::new(2, square).unwrap();
        let report = phi.validation().clone();
        assert!(
            report
                .violations
                .iter()
                .any(|v| v.law.contains("discrete")),
            "{}",
            report.render()
        );
    }

    #[test]
    fn a_lifted_triangle_fails_the_collapsed_nerve_check() {
        let carrier = constant_inner_lift_set(&from_sset(&standard_simplex(2, 3)), 3);
        let phi = NGroupoid::new(2, carrier).unwrap();
        let report = phi.validation().clone();
        assert!(!report.is_valid());
        assert!(
            report
                .violations
                .iter()
                .any(|v| v.law.contains("collapsing the arrows")),
            "{}",
            report.render()
        );
    }

    #[test]
    fn the_double_nerve_of_a_cyclic_group_validates() {
        let phi = double_nerve(&cyclic_group(2), 3, 3).unwrap();
        assert!(phi.is_valid(), "{}", phi.validation().render());
        assert_eq!(phi.objects().unwrap(), vec!["x"]);
        assert_eq!(pi0_set(&phi).unwrap().len(), 1);
    }

    #[test]
    fn double_nerve_homotopy_sits_in_degree_two() {
        let phi = double_nerve(&cyclic_group(3), 3, 3).unwrap();
        let first = homotopy_group(&phi, "x", 1).unwrap();
        assert_eq!(first.order(), 1);
        let second = homotopy_group(&phi, "x", 2).unwrap();
        assert!(second.is_isomorphic(&cyclic_group(3)));
        assert!(second.is_abelian());
    }

    #[test]
    fn the_double_nerve_needs_a_commutative_group() {
        assert!(matches!(
            double_nerve(&symmetric_3(), 2, 2),
            Err(Error::InvalidInput { .. })
        ));
    }

    #[test]
    fn arrows_of_a_double_nerve_carry_the_group() {
        let phi = double_nerve(&cyclic_group(2), 3, 3).unwrap();
        let arrows = arrow_object(&phi, "x", "x").unwrap();
        assert!(arrows.is_valid(), "{}", arrows.validation().render());
        let counts: Vec<usize> = (0..=3)
            .map(|k| arrows.carrier().cell_count(&[k]))
            .collect();
        assert_eq!(counts, vec![1, 2, 4, 8]);
    }

    #[test]
    fn hom_sets_count_the_arrows_of_a_groupoid() {
        let g = spread_groupoid(&cyclic_group(2), &["a", "b"]);
        let phi = nerve_ngroupoid(&g, 3);
        assert_eq!(hom_set(&phi, "a", "b").unwrap().len(), 2);
        assert_eq!(hom_set(&phi, "a", "a").unwrap().len(), 2);
        assert!(arrow_object(&phi, "a", "b").is_err());
        let two = double_nerve(&cyclic_group(2), 2, 2).unwrap();
        assert!(hom_set(&two, "x", "x").is_err());
    }

    #[test]
    fn components_of_a_disjoint_union_stay_apart() {
        let a = nerve_ngroupoid(cyclic_group(2).underlying(), 3);
        let b = nerve_ngroupoid(trivial_group().underlying(), 3);
        let both = disjoint_union_ngroupoid(&a, &b, "l", "r").unwrap();
        assert!(both.is_valid(), "{}", both.validation().render());
        let classes = pi0_set(&both).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes.representatives(), vec!["l:x", "r:x"]);
    }

    #[test]
    fn the_identity_is_an_equivalence_and_the_collapse_is_not() {
        let phi = double_nerve(&cyclic_group(2), 3, 3).unwrap();
        let identity = NFunctor::new(2, MultiMap::identity(phi.carrier())).unwrap();
        assert!(n_equivalence(&identity).unwrap().passed());
        let collapse = collapse_to_point_map(&phi, "pt").unwrap();
        let report = n_equivalence(&collapse).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn a_constant_endomorphism_is_not_an_equivalence() {
        let phi = double_nerve(&cyclic_group(2), 3, 3).unwrap();
        let endo = constant_endo(&phi, "x").unwrap();
        let report = n_equivalence(&endo).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn lifted_functors_stay_equivalences() {
        let g = spread_groupoid(&cyclic_group(2), &["a", "b"]);
        let f = crate::groupoid::constant_functor(&g, &g, "a");
        // Constant functors are not equivalences, but the identity is.
        let id = GroupoidFunctor::from_ids(
            &g,
            &g,
            &g.object_ids()
                .iter()
                .map(|x| (x.clone(), x.clone()))
                .collect(),
            &(0..g.morphism_count())
                .map(|m| (g.morphism_id(m).to_string(), g.morphism_id(m).to_string()))
                .collect(),
        )
        .unwrap();
        let lifted_id = lift_nfunctor(&nerve_nfunctor(&id, 3).unwrap(), 3).unwrap();
        assert!(n_equivalence(&lifted_id).unwrap().passed());
        let lifted_const = lift_nfunctor(&nerve_nfunctor(&f.unwrap(), 3).unwrap(), 3).unwrap();
        assert!(!n_equivalence(&lifted_const).unwrap().passed());
    }

    #[test]
    fn a_double_nerve_map_of_a_proper_subgroup_is_not_an_equivalence() {
        let four = cyclic_group(4);
        let two = cyclic_group(2);
        // Inclusion of the subgroup of order two: 0 -> 0, 1 -> 2.
        let include = double_nerve_map(&two, &four, |e| 2 * e, 2, 3).unwrap();
        let report = n_equivalence(&include).unwrap();
        assert!(!report.passed());
        // Doubling is an endomorphism with kernel, not an equivalence.
        let double = double_nerve_map(&four, &four, |e| (2 * e) % 4, 2, 3).unwrap();
        assert!(!n_equivalence(&double).unwrap().passed());
        // The identity map of double nerves passes.
        let identity = double_nerve_map(&four, &four, |e| e, 2, 3).unwrap();
        assert!(n_equivalence(&identity).unwrap().passed());
    }

    #[test]
    fn unit_comparison_holds_for_small_groupoids() {
        let spread = spread_groupoid(&cyclic_group(2), &["a", "b"]);
        let lone = trivial_group();
        let g = disjoint_union_groupoid(&spread, lone.underlying(), "s", "t");
        let report = unit_check_n1(&g).unwrap();
        assert!(report.passed(), "{}", report.render(true));
        let spun = spread_groupoid(&symmetric_3(), &["p", "q", "r"]);
        assert!(unit_check_n1(&spun).unwrap().passed());
    }

    #[test]
    fn diagonal_invariants_match_for_double_nerves_and_lifts() {
        let k = double_nerve(&cyclic_group(2), 3, 3).unwrap();
        let report = unit_invariants_n2(&k, "x").unwrap();
        assert!(report.passed(), "{}", report.render(true));
        assert_eq!(report.not_checked.len(), 1);
        let lifted = constant_inner_lift(&nerve_ngroupoid(klein_four_group().underlying(), 3), 3)
            .unwrap();
        let report = unit_invariants_n2(&lifted, "x").unwrap();
        assert!(report.passed(), "{}", report.render(true));
    }
}
