//! Finite groupoids with explicit composition tables, their nerves, and
//! functor checks.
//!
//! Composition is written diagrammatically: `compose(f, g)` means "f, then
//! g" and needs the target of f to be the source of g. The same reading is
//! used for chains in the nerve, so a chain lists its arrows in the order
//! they are traversed.

use crate::report::{Report, ValidationReport};
use crate::sset::{pair_id, Partition, SSetMap, SimplicialSet, UnionFind};
use crate::{Error, Result};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    id: String,
    src: usize,
    tgt: usize,
}

/// A finite groupoid: objects, morphisms with endpoints, a total identity
/// and inverse assignment, and a composition table over composable pairs.
/// Construction through the builder guarantees the tables are total and
/// endpoint-consistent; the algebraic laws are a separate check so that
/// broken tables can be built on purpose and diagnosed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinGroupoid {
    objects: Vec<String>,
    object_index: BTreeMap<String, usize>,
    morphisms: Vec<Morphism>,
    morphism_index: BTreeMap<String, usize>,
    identities: Vec<usize>,
    inverses: Vec<usize>,
    compose: BTreeMap<(usize, usize), usize>,
}

impl FinGroupoid {
    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn object_ids(&self) -> &[String] {
        &self.objects
    }

    pub fn object_id(&self, i: usize) -> &str {
        &self.objects[i]
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.object_index.get(id).copied()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn morphism_id(&self, m: usize) -> &str {
        &self.morphisms[m].id
    }

    pub fn morphism_index(&self, id: &str) -> Option<usize> {
        self.morphism_index.get(id).copied()
    }

    pub fn src(&self, m: usize) -> usize {
        self.morphisms[m].src
    }

    pub fn tgt(&self, m: usize) -> usize {
        self.morphisms[m].tgt
    }

    pub fn identity_of(&self, object: usize) -> usize {
        self.identities[object]
    }

    pub fn inverse_of(&self, m: usize) -> usize {
        self.inverses[m]
    }

    /// Diagrammatic composite, defined when `tgt(f) == src(g)`.
    pub fn compose(&self, f: usize, g: usize) -> Option<usize> {
        self.compose.get(&(f, g)).copied()
    }

    pub fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.morphisms.len())
            .filter(|&m| self.src(m) == x && self.tgt(m) == y)
            .collect()
    }

    pub fn is_identity(&self, m: usize) -> bool {
        self.identities[self.src(m)] == m
    }
}

// ---------------------------------------------------------------------------
// Builder

#[derive(Debug, Default)]
pub struct FinGroupoidBuilder {
    objects: Vec<String>,
    morphisms: Vec<(String, String, String)>,
    identities: BTreeMap<String, String>,
    inverses: BTreeMap<String, String>,
    compose: BTreeMap<(String, String), String>,
}

impl FinGroupoidBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(&mut self, id: &str) -> &mut Self {
        self.objects.push(id.to_string());
        self
    }

    pub fn morphism(&mut self, id: &str, src: &str, tgt: &str) -> &mut Self {
        self.morphisms
            .push((id.to_string(), src.to_string(), tgt.to_string()));
        self
    }

    pub fn identity(&mut self, object: &str, morphism: &str) -> &mut Self {
        self.identities
            .insert(object.to_string(), morphism.to_string());
        self
    }

    pub fn inverse(&mut self, morphism: &str, inverse: &str) -> &mut Self {
        self.inverses
            .insert(morphism.to_string(), inverse.to_string());
        self
    }

    pub fn compose(&mut self, f: &str, g: &str, composite: &str) -> &mut Self {
        self.compose
            .insert((f.to_string(), g.to_string()), composite.to_string());
        self
    }

    pub fn build(&self) -> Result<FinGroupoid> {
        let mut objects = self.objects.clone();
        objects.sort();
        if objects.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadStructure {
                detail: "duplicate object id".into(),
            });
        }
        let object_index: BTreeMap<String, usize> = objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), i))
            .collect();
        let find_object = |id: &String| -> Result<usize> {
            object_index
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownObject { id: id.clone() })
        };
        let mut raw = self.morphisms.clone();
        raw.sort();
        if raw.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::BadStructure {
                detail: "duplicate morphism id".into(),
            });
        }
        let mut morphisms = Vec::with_capacity(raw.len());
        for (id, s, t) in &raw {
            morphisms.push(Morphism {
                id: id.clone(),
                src: find_object(s)?,
                tgt: find_object(t)?,
            });
        }
        let morphism_index: BTreeMap<String, usize> = morphisms
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.clone(), i))
            .collect();
        let find_morphism = |id: &String, place: &str| -> Result<usize> {
            morphism_index
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownCell {
                    id: id.clone(),
                    place: place.to_string(),
                })
        };

        let mut identities = Vec::with_capacity(objects.len());
        for (x, id) in objects.iter().enumerate() {
            let mid = self.identities.get(id).ok_or_else(|| Error::BadStructure {
                detail: format!("object `{id}` has no identity"),
            })?;
            let m = find_morphism(mid, "identities")?;
            if morphisms[m].src != x || morphisms[m].tgt != x {
                return Err(Error::BadStructure {
                    detail: format!("identity of `{id}` is not an endomorphism"),
                });
            }
            identities.push(m);
        }

        let mut inverses = Vec::with_capacity(morphisms.len());
        for m in 0..morphisms.len() {
            let id = &morphisms[m].id;
            let iid = self.inverses.get(id).ok_or_else(|| Error::BadStructure {
                detail: format!("morphism `{id}` has no inverse assigned"),
            })?;
            let i = find_morphism(iid, "inverses")?;
            if morphisms[i].src != morphisms[m].tgt || morphisms[i].tgt != morphisms[m].src {
                return Err(Error::BadStructure {
                    detail: format!("inverse of `{id}` has the wrong endpoints"),
                });
            }
            inverses.push(i);
        }

        let mut compose = BTreeMap::new();
        for ((fid, gid), cid) in &self.compose {
            let f = find_morphism(fid, "composition table")?;
            let g = find_morphism(gid, "composition table")?;
            let c = find_morphism(cid, "composition table")?;
            if morphisms[f].tgt != morphisms[g].src {
                return Err(Error::BadStructure {
                    detail: format!("`{fid}` and `{gid}` are not composable"),
                });
            }
            if morphisms[c].src != morphisms[f].src || morphisms[c].tgt != morphisms[g].tgt {
                return Err(Error::BadStructure {
                    detail: format!("composite of `{fid}` and `{gid}` has the wrong endpoints"),
                });
            }
            compose.insert((f, g), c);
        }
        for f in 0..morphisms.len() {
            for g in 0..morphisms.len() {
                if morphisms[f].tgt == morphisms[g].src && !compose.contains_key(&(f, g)) {
                    return Err(Error::BadStructure {
                        detail: format!(
                            "no composite for `{}` then `{}`",
                            morphisms[f].id, morphisms[g].id
                        ),
                    });
                }
            }
        }

        Ok(FinGroupoid {
            objects,
            object_index,
            morphisms,
            morphism_index,
            identities,
            inverses,
            compose,
        })
    }
}

// ---------------------------------------------------------------------------
// Validation and invariants

/// Checks the groupoid laws exhaustively: units, associativity, and the
/// two inverse laws.
pub fn validate_groupoid(g: &FinGroupoid) -> ValidationReport {
    let mut rep = ValidationReport::new();
    for m in 0..g.morphism_count() {
        let id = g.morphism_id(m);
        if g.compose(g.identity_of(g.src(m)), m) != Some(m) {
            rep.push("identity is a left unit", format!("morphism `{id}`"));
        }
        if g.compose(m, g.identity_of(g.tgt(m))) != Some(m) {
            rep.push("identity is a right unit", format!("morphism `{id}`"));
        }
        let inv = g.inverse_of(m);
        if g.compose(m, inv) != Some(g.identity_of(g.src(m))) {
            rep.push(
                "a morphism then its inverse is the identity",
                format!("morphism `{id}`"),
            );
        }
        if g.compose(inv, m) != Some(g.identity_of(g.tgt(m))) {
            rep.push(
                "an inverse then its morphism is the identity",
                format!("morphism `{id}`"),
            );
        }
    }
    for f in 0..g.morphism_count() {
        for gg in 0..g.morphism_count() {
            let Some(fg) = g.compose(f, gg) else { continue };
            for h in 0..g.morphism_count() {
                let Some(gh) = g.compose(gg, h) else { continue };
                if g.compose(fg, h) != g.compose(f, gh) {
                    rep.push(
                        "composition is associative",
                        format!(
                            "`{}`;`{}`;`{}`",
                            g.morphism_id(f),
                            g.morphism_id(gg),
                            g.morphism_id(h)
                        ),
                    );
                }
            }
        }
    }
    rep
}

/// Partition of the objects into isomorphism classes, which for a groupoid
/// coincide with connected components.
pub fn iso_classes(g: &FinGroupoid) -> Partition {
    let mut uf = UnionFind::new(g.object_count());
    for m in 0..g.morphism_count() {
        uf.union(g.src(m), g.tgt(m));
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for x in 0..g.object_count() {
        groups
            .entry(uf.find(x))
            .or_default()
            .push(g.object_id(x).to_string());
    }
    Partition::from_groups(groups.into_values().collect())
}

// ---------------------------------------------------------------------------
// Groups

/// A finite group presented as a one-object groupoid. Multiplication is
/// diagrammatic like all composition here; for the abelian groups this
/// never matters, and the nonabelian tables are written with that reading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinGroup {
    groupoid: FinGroupoid,
}

impl FinGroup {
    pub fn new(groupoid: FinGroupoid) -> Result<Self> {
        if groupoid.object_count() != 1 {
            return Err(Error::BadStructure {
                detail: format!(
                    "a group needs exactly one object, got {}",
                    groupoid.object_count()
                ),
            });
        }
        Ok(FinGroup { groupoid })
    }

    pub fn underlying(&self) -> &FinGroupoid {
        &self.groupoid
    }

    pub fn order(&self) -> usize {
        self.groupoid.morphism_count()
    }

    pub fn element_ids(&self) -> Vec<String> {
        (0..self.order())
            .map(|m| self.groupoid.morphism_id(m).to_string())
            .collect()
    }

    pub fn element_id(&self, e: usize) -> &str {
        self.groupoid.morphism_id(e)
    }

    pub fn element_index(&self, id: &str) -> Option<usize> {
        self.groupoid.morphism_index(id)
    }

    pub fn identity(&self) -> usize {
        self.groupoid.identity_of(0)
    }

    pub fn inverse(&self, e: usize) -> usize {
        self.groupoid.inverse_of(e)
    }

    pub fn mult(&self, a: usize, b: usize) -> usize {
        self.groupoid.compose(a, b).expect("group is total")
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a..n).all(|b| self.mult(a, b) == self.mult(b, a)))
    }

    pub fn element_order(&self, e: usize) -> usize {
        let mut x = e;
        let mut n = 1;
        while x != self.identity() {
            x = self.mult(x, e);
            n += 1;
        }
        n
    }

    /// Brute-force isomorphism test, feasible for the orders used here.
    pub fn is_isomorphic(&self, other: &FinGroup) -> bool {
        if self.order() != other.order() {
            return false;
        }
        let n = self.order();
        let my_orders: Vec<usize> = (0..n).map(|e| self.element_order(e)).collect();
        let their_orders: Vec<usize> = (0..n).map(|e| other.element_order(e)).collect();
        {
            let mut a = my_orders.clone();
            let mut b = their_orders.clone();
            a.sort();
            b.sort();
            if a != b {
                return false;
            }
        }
        fn dfs(
            this: &FinGroup,
            other: &FinGroup,
            my_orders: &[usize],
            their_orders: &[usize],
            image: &mut Vec<Option<usize>>,
            used: &mut Vec<bool>,
            e: usize,
        ) -> bool {
            let n = this.order();
            if e == n {
                return true;
            }
            for t in 0..n {
                if used[t] || my_orders[e] != their_orders[t] {
                    continue;
                }
                image[e] = Some(t);
                used[t] = true;
                let ok = (0..=e).all(|a| {
                    (0..=e).all(|b| {
                        let p = this.mult(a, b);
                        match (image[a], image[b], image[p]) {
                            (Some(ia), Some(ib), Some(ip)) => other.mult(ia, ib) == ip,
                            _ => true,
                        }
                    })
                });
                if ok && dfs(this, other, my_orders, their_orders, image, used, e + 1) {
                    return true;
                }
                image[e] = None;
                used[t] = false;
            }
            false
        }
        let mut image = vec![None; n];
        let mut used = vec![false; n];
        dfs(self, other, &my_orders, &their_orders, &mut image, &mut used, 0)
    }
}

/// Builds a one-object groupoid from a multiplication on named elements.
pub fn group_from_table(
    object: &str,
    elements: &[String],
    identity: &str,
    mult: impl Fn(&str, &str) -> String,
) -> Result<FinGroup> {
    let mut b = FinGroupoidBuilder::new();
    b.object(object);
    for e in elements {
        b.morphism(e, object, object);
    }
    b.identity(object, identity);
    for e in elements {
        let inv = elements
            .iter()
            .find(|f| mult(e, f) == identity)
            .ok_or_else(|| Error::BadStructure {
                detail: format!("element `{e}` has no inverse under the given table"),
            })?;
        b.inverse(e, inv);
    }
    for e in elements {
        for f in elements {
            b.compose(e, f, &mult(e, f));
        }
    }
    FinGroup::new(b.build()?)
}

/// The cyclic group of order n, elements named by residues.
pub fn cyclic_group(n: usize) -> FinGroup {
    assert!(n >= 1);
    let elements: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mult = |a: &str, b: &str| -> String {
        let x: usize = a.parse().unwrap();
        let y: usize = b.parse().unwrap();
        ((x + y) % n).to_string()
    };
    group_from_table("x", &elements, "0", mult).expect("cyclic table is a group")
}

pub fn trivial_group() -> FinGroup {
    cyclic_group(1)
}

/// Direct product, with paired element names.
pub fn product_group(a: &FinGroup, b: &FinGroup) -> FinGroup {
    let mut elements = Vec::new();
    for x in a.element_ids() {
        for y in b.element_ids() {
            elements.push(pair_id(&x, &y));
        }
    }
    let split = |e: &str| -> (usize, usize) {
        // Pair ids nest to the left, so split at the last top-level bar.
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
        let (l, r) = (&inner[..cut], &inner[cut + 1..]);
        (
            a.element_index(l).expect("left factor"),
            b.element_index(r).expect("right factor"),
        )
    };
    let identity = pair_id(a.element_id(a.identity()), b.element_id(b.identity()));
    let mult = |x: &str, y: &str| -> String {
        let (xa, xb) = split(x);
        let (ya, yb) = split(y);
        pair_id(
            a.element_id(a.mult(xa, ya)),
            b.element_id(b.mult(xb, yb)),
        )
    };
    group_from_table("x", &elements, &identity, mult).expect("product table is a group")
}

pub fn klein_four_group() -> FinGroup {
    product_group(&cyclic_group(2), &cyclic_group(2))
}

/// The symmetric group on three letters, elements named in one-line
/// notation; the product applies the left permutation first.
pub fn symmetric_3() -> FinGroup {
    let mut elements = Vec::new();
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for p in perms {
        elements.push(p.map(|i| i.to_string()).join(""));
    }
    let parse = |e: &str| -> Vec<usize> {
        e.chars().map(|c| c.to_digit(10).unwrap() as usize).collect()
    };
    let mult = |x: &str, y: &str| -> String {
        let p = parse(x);
        let q = parse(y);
        (0..3).map(|i| q[p[i]].to_string()).collect()
    };
    group_from_table("x", &elements, "012", mult).expect("permutation table is a group")
}

/// The dihedral group of order 8: rotations `r0..r3` and reflections
/// `s0..s3`, with `sK` the reflection after K quarter turns.
pub fn dihedral_8() -> FinGroup {
    let mut elements = Vec::new();
    for k in 0..4 {
        elements.push(format!("r{k}"));
        elements.push(format!("s{k}"));
    }
    let parse = |e: &str| -> (usize, bool) {
        let k = e[1..].parse().unwrap();
        (k, e.starts_with('s'))
    };
    let mult = |x: &str, y: &str| -> String {
        let (k1, f1) = parse(x);
        let (k2, f2) = parse(y);
        let k = if f1 { (k1 + 4 - k2) % 4 } else { (k1 + k2) % 4 };
        format!("{}{}", if f1 != f2 { 's' } else { 'r' }, k)
    };
    group_from_table("x", &elements, "r0", mult).expect("dihedral table is a group")
}

/// The quaternion group of order 8 with the usual unit names.
pub fn quaternion_8() -> FinGroup {
    let elements: Vec<String> = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let parse = |e: &str| -> (bool, char) {
        let neg = e.starts_with('-');
        (neg, e.chars().last().unwrap())
    };
    let mult = |x: &str, y: &str| -> String {
        let (nx, ax) = parse(x);
        let (ny, ay) = parse(y);
        let (nz, az) = match (ax, ay) {
            ('1', a) => (false, a),
            (a, '1') => (false, a),
            (a, b) if a == b => (true, '1'),
            ('i', 'j') => (false, 'k'),
            ('j', 'i') => (true, 'k'),
            ('j', 'k') => (false, 'i'),
            ('k', 'j') => (true, 'i'),
            ('k', 'i') => (false, 'j'),
            ('i', 'k') => (true, 'j'),
            _ => unreachable!(),
        };
        let neg = nx ^ ny ^ nz;
        let a = if az == '1' { "1".to_string() } else { az.to_string() };
        if neg {
            format!("-{a}")
        } else {
            a
        }
    };
    group_from_table("x", &elements, "1", mult).expect("quaternion table is a group")
}

/// The connected groupoid over the given objects whose vertex groups are
/// copies of `group`: a morphism `x>y:g` for every ordered pair and element.
pub fn spread_groupoid(group: &FinGroup, objects: &[&str]) -> FinGroupoid {
    let mut b = FinGroupoidBuilder::new();
    let mid = |x: &str, y: &str, g: &str| format!("{x}>{y}:{g}");
    let e = group.element_id(group.identity());
    for x in objects {
        b.object(x);
    }
    for x in objects {
        for y in objects {
            for g in group.element_ids() {
                b.morphism(&mid(x, y, &g), x, y);
            }
        }
    }
    for x in objects {
        b.identity(x, &mid(x, x, e));
    }
    for x in objects {
        for y in objects {
            for g in 0..group.order() {
                b.inverse(
                    &mid(x, y, group.element_id(g)),
                    &mid(y, x, group.element_id(group.inverse(g))),
                );
            }
        }
    }
    for x in objects {
        for y in objects {
            for z in objects {
                for g in 0..group.order() {
                    for h in 0..group.order() {
                        b.compose(
                            &mid(x, y, group.element_id(g)),
                            &mid(y, z, group.element_id(h)),
                            &mid(x, z, group.element_id(group.mult(g, h))),
                        );
                    }
                }
            }
        }
    }
    b.build().expect("spread tables are total")
}

/// Disjoint union with tagged identifiers on both sides.
pub fn disjoint_union_groupoid(
    a: &FinGroupoid,
    b: &FinGroupoid,
    tag_a: &str,
    tag_b: &str,
) -> FinGroupoid {
    let mut builder = FinGroupoidBuilder::new();
    let sides: [(&FinGroupoid, &str); 2] = [(a, tag_a), (b, tag_b)];
    for (g, tag) in sides {
        for x in g.object_ids() {
            builder.object(&format!("{tag}:{x}"));
        }
        for m in 0..g.morphism_count() {
            builder.morphism(
                &format!("{tag}:{}", g.morphism_id(m)),
                &format!("{tag}:{}", g.object_id(g.src(m))),
                &format!("{tag}:{}", g.object_id(g.tgt(m))),
            );
        }
        for x in 0..g.object_count() {
            builder.identity(
                &format!("{tag}:{}", g.object_id(x)),
                &format!("{tag}:{}", g.morphism_id(g.identity_of(x))),
            );
        }
        for m in 0..g.morphism_count() {
            builder.inverse(
                &format!("{tag}:{}", g.morphism_id(m)),
                &format!("{tag}:{}", g.morphism_id(g.inverse_of(m))),
            );
        }
        for f in 0..g.morphism_count() {
            for h in 0..g.morphism_count() {
                if let Some(c) = g.compose(f, h) {
                    builder.compose(
                        &format!("{tag}:{}", g.morphism_id(f)),
                        &format!("{tag}:{}", g.morphism_id(h)),
                        &format!("{tag}:{}", g.morphism_id(c)),
                    );
                }
            }
        }
    }
    builder.build().expect("tagged union is total")
}

/// The group of automorphisms of one object, as a standalone group whose
/// elements keep their morphism names.
pub fn automorphism_group(g: &FinGroupoid, object: &str) -> Result<FinGroup> {
    let x = g
        .object_index(object)
        .ok_or_else(|| Error::UnknownObject {
            id: object.to_string(),
        })?;
    let elements: Vec<String> = g
        .hom(x, x)
        .into_iter()
        .map(|m| g.morphism_id(m).to_string())
        .collect();
    let identity = g.morphism_id(g.identity_of(x)).to_string();
    let mult = |a: &str, b: &str| -> String {
        let f = g.morphism_index(a).unwrap();
        let h = g.morphism_index(b).unwrap();
        g.morphism_id(g.compose(f, h).unwrap()).to_string()
    };
    group_from_table(object, &elements, &identity, mult)
}

// ---------------------------------------------------------------------------
// Nerve

/// The nerve of a groupoid together with the chain behind every cell, so
/// that maps of nerves can be computed without parsing identifiers.
#[derive(Debug, Clone)]
pub struct NerveData {
    pub sset: SimplicialSet,
    /// chains[0][c] is a single object index; chains[k][c] for k >= 1 lists
    /// the k morphisms of the chain in traversal order.
    chains: Vec<Vec<Vec<usize>>>,
    chain_index: Vec<BTreeMap<Vec<usize>, usize>>,
}

impl NerveData {
    pub fn chain(&self, level: usize, cell: usize) -> &[usize] {
        &self.chains[level][cell]
    }

    pub fn find_chain(&self, level: usize, chain: &[usize]) -> Option<usize> {
        self.chain_index[level].get(chain).copied()
    }
}

pub fn chain_id(g: &FinGroupoid, chain: &[usize]) -> String {
    let parts: Vec<&str> = chain.iter().map(|&m| g.morphism_id(m)).collect();
    format!("[{}]", parts.join(","))
}

/// The nerve truncated at `dim_bound`: level k holds the composable chains
/// of k morphisms. Vertices keep the object names; longer chains are named
/// `[f,g,...]`. Inner faces compose, the outer two drop an end, and
/// degeneracies insert identities.
pub fn nerve(g: &FinGroupoid, dim_bound: usize) -> NerveData {
    let mut chains: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut ids: Vec<Vec<String>> = Vec::new();
    // Vertices: objects are already sorted, so cell index equals object index.
    chains.push((0..g.object_count()).map(|x| vec![x]).collect());
    ids.push(g.object_ids().to_vec());
    let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for m in 0..g.morphism_count() {
        by_source.entry(g.src(m)).or_default().push(m);
    }
    for k in 1..=dim_bound {
        let mut level: Vec<Vec<usize>> = Vec::new();
        if k == 1 {
            level.extend((0..g.morphism_count()).map(|m| vec![m]));
        } else {
            for chain in &chains[k - 1] {
                let end = g.tgt(*chain.last().unwrap());
                if let Some(nexts) = by_source.get(&end) {
                    for &m in nexts {
                        let mut c = chain.clone();
                        c.push(m);
                        level.push(c);
                    }
                }
            }
        }
        let mut named: Vec<(String, Vec<usize>)> =
            level.into_iter().map(|c| (chain_id(g, &c), c)).collect();
        named.sort();
        ids.push(named.iter().map(|(id, _)| id.clone()).collect());
        chains.push(named.into_iter().map(|(_, c)| c).collect());
    }
    let chain_index: Vec<BTreeMap<Vec<usize>, usize>> = chains
        .iter()
        .map(|level| {
            level
                .iter()
                .enumerate()
                .map(|(i, c)| (c.clone(), i))
                .collect()
        })
        .collect();

    let mut faces = vec![Vec::new(); dim_bound + 1];
    for k in 1..=dim_bound {
        let mut tables = vec![Vec::new(); k + 1];
        for chain in &chains[k] {
            for (i, table) in tables.iter_mut().enumerate() {
                let target: Vec<usize> = if k == 1 {
                    // d0 keeps the endpoint, d1 keeps the start.
                    if i == 0 {
                        vec![g.tgt(chain[0])]
                    } else {
                        vec![g.src(chain[0])]
                    }
                } else if i == 0 {
                    chain[1..].to_vec()
                } else if i == k {
                    chain[..k - 1].to_vec()
                } else {
                    let mut c = chain[..i - 1].to_vec();
                    c.push(g.compose(chain[i - 1], chain[i]).expect("chain is composable"));
                    c.extend_from_slice(&chain[i + 1..]);
                    c
                };
                table.push(chain_index[k - 1][&target]);
            }
        }
        faces[k] = tables;
    }
    let mut degens = vec![Vec::new(); dim_bound + 1];
    for k in 0..dim_bound {
        let mut tables = vec![Vec::new(); k + 1];
        for chain in &chains[k] {
            for (i, table) in tables.iter_mut().enumerate() {
                let target: Vec<usize> = if k == 0 {
                    vec![g.identity_of(chain[0])]
                } else {
                    // Insert the identity at vertex i of the chain.
                    let at = if i < k {
                        g.src(chain[i])
                    } else {
                        g.tgt(chain[k - 1])
                    };
                    let mut c = chain[..i].to_vec();
                    c.push(g.identity_of(at));
                    c.extend_from_slice(&chain[i..]);
                    c
                };
                table.push(chain_index[k + 1][&target]);
            }
        }
        degens[k] = tables;
    }
    let sset = SimplicialSet::from_parts(dim_bound, ids, faces, degens)
        .expect("nerve tables are total");
    NerveData {
        sset,
        chains,
        chain_index,
    }
}

// ---------------------------------------------------------------------------
// Functors

/// A functor between finite groupoids, validated on construction: it must
/// preserve endpoints, identities, and every composite.
#[derive(Debug, Clone)]
pub struct GroupoidFunctor {
    source: FinGroupoid,
    target: FinGroupoid,
    object_map: Vec<usize>,
    morphism_map: Vec<usize>,
}

impl GroupoidFunctor {
    pub fn new(
        source: &FinGroupoid,
        target: &FinGroupoid,
        object_map: Vec<usize>,
        morphism_map: Vec<usize>,
    ) -> Result<Self> {
        if object_map.len() != source.object_count()
            || morphism_map.len() != source.morphism_count()
        {
            return Err(Error::BadStructure {
                detail: "functor tables have the wrong length".into(),
            });
        }
        if object_map.iter().any(|&x| x >= target.object_count())
            || morphism_map.iter().any(|&m| m >= target.morphism_count())
        {
            return Err(Error::BadStructure {
                detail: "functor tables point outside the target".into(),
            });
        }
        for m in 0..source.morphism_count() {
            let fm = morphism_map[m];
            if target.src(fm) != object_map[source.src(m)]
                || target.tgt(fm) != object_map[source.tgt(m)]
            {
                return Err(Error::BadStructure {
                    detail: format!(
                        "image of `{}` has the wrong endpoints",
                        source.morphism_id(m)
                    ),
                });
            }
        }
        for x in 0..source.object_count() {
            if morphism_map[source.identity_of(x)] != target.identity_of(object_map[x]) {
                return Err(Error::BadStructure {
                    detail: format!(
                        "identity of `{}` is not sent to an identity",
                        source.object_id(x)
                    ),
                });
            }
        }
        for f in 0..source.morphism_count() {
            for g in 0..source.morphism_count() {
                if let Some(c) = source.compose(f, g) {
                    let want = target
                        .compose(morphism_map[f], morphism_map[g])
                        .expect("images are composable");
                    if morphism_map[c] != want {
                        return Err(Error::BadStructure {
                            detail: format!(
                                "composition of `{}` and `{}` is not preserved",
                                source.morphism_id(f),
                                source.morphism_id(g)
                            ),
                        });
                    }
                }
            }
        }
        Ok(GroupoidFunctor {
            source: source.clone(),
            target: target.clone(),
            object_map,
            morphism_map,
        })
    }

    /// Builds the tables from identifier assignments.
    pub fn from_ids(
        source: &FinGroupoid,
        target: &FinGroupoid,
        objects: &BTreeMap<String, String>,
        morphisms: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let mut object_map = Vec::with_capacity(source.object_count());
        for x in source.object_ids() {
            let to = objects.get(x).ok_or_else(|| Error::BadStructure {
                detail: format!("object `{x}` has no image"),
            })?;
            object_map.push(target.object_index(to).ok_or_else(|| Error::UnknownObject {
                id: to.clone(),
            })?);
        }
        let mut morphism_map = Vec::with_capacity(source.morphism_count());
        for m in 0..source.morphism_count() {
            let id = source.morphism_id(m);
            let to = morphisms.get(id).ok_or_else(|| Error::BadStructure {
                detail: format!("morphism `{id}` has no image"),
            })?;
            morphism_map.push(target.morphism_index(to).ok_or_else(|| Error::UnknownCell {
                id: to.clone(),
                place: "target morphisms".into(),
            })?);
        }
        GroupoidFunctor::new(source, target, object_map, morphism_map)
    }

    pub fn source(&self) -> &FinGroupoid {
        &self.source
    }

    pub fn target(&self) -> &FinGroupoid {
        &self.target
    }

    pub fn apply_object(&self, x: usize) -> usize {
        self.object_map[x]
    }

    pub fn apply_morphism(&self, m: usize) -> usize {
        self.morphism_map[m]
    }
}

/// The functor collapsing everything to one object and its identity.
pub fn constant_functor(
    source: &FinGroupoid,
    target: &FinGroupoid,
    object: &str,
) -> Result<GroupoidFunctor> {
    let x = target
        .object_index(object)
        .ok_or_else(|| Error::UnknownObject {
            id: object.to_string(),
        })?;
    let object_map = vec![x; source.object_count()];
    let morphism_map = vec![target.identity_of(x); source.morphism_count()];
    GroupoidFunctor::new(source, target, object_map, morphism_map)
}

/// A group homomorphism given elementwise, as a functor of one-object
/// groupoids.
pub fn group_hom(
    a: &FinGroup,
    b: &FinGroup,
    image: impl Fn(usize) -> usize,
) -> Result<GroupoidFunctor> {
    let morphism_map = (0..a.order()).map(image).collect();
    GroupoidFunctor::new(a.underlying(), b.underlying(), vec![0], morphism_map)
}

/// Levelwise tables of the induced map of nerves, chain by chain.
pub fn nerve_map_tables(
    source: &NerveData,
    target: &NerveData,
    f: &GroupoidFunctor,
) -> Result<Vec<Vec<usize>>> {
    let d = source.sset.dim_bound();
    if target.sset.dim_bound() != d {
        return Err(Error::BoundsMismatch);
    }
    let mut tables = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let mut table = Vec::with_capacity(source.chains[k].len());
        for chain in &source.chains[k] {
            let image: Vec<usize> = if k == 0 {
                vec![f.apply_object(chain[0])]
            } else {
                chain.iter().map(|&m| f.apply_morphism(m)).collect()
            };
            let cell = target
                .find_chain(k, &image)
                .ok_or_else(|| Error::BadStructure {
                    detail: format!("image chain at level {k} is missing from the target nerve"),
                })?;
            table.push(cell);
        }
        tables.push(table);
    }
    Ok(tables)
}

/// The induced map of nerves of a functor.
pub fn nerve_map(f: &GroupoidFunctor, dim_bound: usize) -> Result<SSetMap> {
    let source = nerve(f.source(), dim_bound);
    let target = nerve(f.target(), dim_bound);
    let tables = nerve_map_tables(&source, &target, f)?;
    SSetMap::from_tables(source.sset, target.sset, tables)
}

// ---------------------------------------------------------------------------
// Equivalences

/// Verdict on a functor being an equivalence: fully faithful and
/// essentially surjective, each reported with a witness on failure.
#[derive(Debug, Clone)]
pub struct EquivCheck {
    pub report: Report,
}

impl EquivCheck {
    pub fn holds(&self) -> bool {
        self.report.passed()
    }
}

pub fn is_equivalence(f: &GroupoidFunctor) -> EquivCheck {
    let g = f.source();
    let h = f.target();
    let mut report = Report::new("equivalence of groupoids");

    let mut faithful = true;
    let mut faithful_witness = String::new();
    'fa: for x in 0..g.object_count() {
        for y in 0..g.object_count() {
            let hom = g.hom(x, y);
            let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
            for m in hom {
                if let Some(&prev) = seen.get(&f.apply_morphism(m)) {
                    faithful = false;
                    faithful_witness = format!(
                        "`{}` and `{}` have the same image",
                        g.morphism_id(prev),
                        g.morphism_id(m)
                    );
                    break 'fa;
                }
                seen.insert(f.apply_morphism(m), m);
            }
        }
    }
    report.record("faithful", faithful, faithful_witness);

    let mut full = true;
    let mut full_witness = String::new();
    'fu: for x in 0..g.object_count() {
        for y in 0..g.object_count() {
            let image: std::collections::BTreeSet<usize> =
                g.hom(x, y).into_iter().map(|m| f.apply_morphism(m)).collect();
            for m in h.hom(f.apply_object(x), f.apply_object(y)) {
                if !image.contains(&m) {
                    full = false;
                    full_witness = format!(
                        "`{}` between images of `{}` and `{}` is not hit",
                        h.morphism_id(m),
                        g.object_id(x),
                        g.object_id(y)
                    );
                    break 'fu;
                }
            }
        }
    }
    report.record("full", full, full_witness);

    let mut surjective = true;
    let mut surj_witness = String::new();
    for z in 0..h.object_count() {
        let reached = (0..g.object_count())
            .any(|x| !h.hom(f.apply_object(x), z).is_empty());
        if !reached {
            surjective = false;
            surj_witness = format!(
                "object `{}` is not isomorphic to any image",
                h.object_id(z)
            );
            break;
        }
    }
    report.record("essentially surjective", surjective, surj_witness);

    EquivCheck { report }
}

/// Every functor from `g` to `h`, by exhaustive search. Identities are
/// forced and composition prunes the search, but this is still only meant
/// for the small instances in the test corpus.
pub fn all_functors(g: &FinGroupoid, h: &FinGroupoid) -> Vec<GroupoidFunctor> {
    let mut out = Vec::new();
    let nm = g.morphism_count();
    let mut object_map = vec![0usize; g.object_count()];

    fn assign_morphisms(
        g: &FinGroupoid,
        h: &FinGroupoid,
        object_map: &[usize],
        morphism_map: &mut Vec<Option<usize>>,
        m: usize,
        out: &mut Vec<GroupoidFunctor>,
    ) {
        let nm = g.morphism_count();
        if m == nm {
            let map: Vec<usize> = morphism_map.iter().map(|o| o.unwrap()).collect();
            if let Ok(f) = GroupoidFunctor::new(g, h, object_map.to_vec(), map) {
                out.push(f);
            }
            return;
        }
        if morphism_map[m].is_some() {
            assign_morphisms(g, h, object_map, morphism_map, m + 1, out);
            return;
        }
        let candidates = h.hom(object_map[g.src(m)], object_map[g.tgt(m)]);
        for c in candidates {
            morphism_map[m] = Some(c);
            let ok = (0..=m).all(|a| {
                let Some(fa) = morphism_map[a] else { return true };
                let fwd = g
                    .compose(a, m)
                    .map_or(true, |p| match morphism_map[p] {
                        Some(fp) => h.compose(fa, c) == Some(fp),
                        None => true,
                    });
                let bwd = g
                    .compose(m, a)
                    .map_or(true, |p| match morphism_map[p] {
                        Some(fp) => h.compose(c, fa) == Some(fp),
                        None => true,
                    });
                fwd && bwd
            });
            if ok {
                assign_morphisms(g, h, object_map, morphism_map, m + 1, out);
            }
            morphism_map[m] = None;
        }
    }

    fn assign_objects(
        g: &FinGroupoid,
        h: &FinGroupoid,
        object_map: &mut Vec<usize>,
        x: usize,
        nm: usize,
        out: &mut Vec<GroupoidFunctor>,
    ) {
        if x == g.object_count() {
            let mut morphism_map: Vec<Option<usize>> = vec![None; nm];
            for obj in 0..g.object_count() {
                morphism_map[g.identity_of(obj)] = Some(h.identity_of(object_map[obj]));
            }
            assign_morphisms(g, h, object_map, &mut morphism_map, 0, out);
            return;
        }
        for t in 0..h.object_count() {
            object_map[x] = t;
            assign_objects(g, h, object_map, x + 1, nm, out);
        }
    }

    if g.object_count() == 0 {
        if let Ok(f) = GroupoidFunctor::new(g, h, Vec::new(), Vec::new()) {
            out.push(f);
        }
        return out;
    }
    if h.object_count() == 0 {
        return out;
    }
    assign_objects(g, h, &mut object_map, 0, nm, &mut out);
    out
}

/// Searches for any equivalence between the two groupoids.
pub fn equivalence_exists(g: &FinGroupoid, h: &FinGroupoid) -> Option<GroupoidFunctor> {
    all_functors(g, h).into_iter().find(|f| is_equivalence(f).holds())
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_three_is_a_valid_groupoid() {
        let g = cyclic_group(3);
        assert!(validate_groupoid(g.underlying()).is_valid());
        assert_eq!(g.order(), 3);
        assert_eq!(g.element_order(g.element_index("1").unwrap()), 3);
        assert!(g.is_abelian());
    }

    #[test]
    fn broken_unit_is_reported() {
        // One object, two endomorphisms, with a composition table that
        // sends id;a to id. Everything is endpoint-consistent, so it
        // builds, but the unit law fails at `a`.
        let mut b = FinGroupoidBuilder::new();
        b.object("x");
        b.morphism("id", "x", "x");
        b.morphism("a", "x", "x");
        b.identity("x", "id");
        b.inverse("id", "id");
        b.inverse("a", "a");
        b.compose("id", "id", "id");
        b.compose("id", "a", "id");
        b.compose("a", "id", "a");
        b.compose("a", "a", "id");
        let g = b.build().unwrap();
        let rep = validate_groupoid(&g);
        assert!(!rep.is_valid());
        assert!(rep
            .violations
            .iter()
            .any(|v| v.law.contains("left unit") && v.witness.contains("`a`")));
    }

    #[test]
    fn spread_groupoid_shape() {
        let g = spread_groupoid(&cyclic_group(2), &["p", "q"]);
        assert_eq!(g.object_count(), 2);
        assert_eq!(g.morphism_count(), 8);
        assert!(validate_groupoid(&g).is_valid());
        assert_eq!(iso_classes(&g).len(), 1);
        let aut = automorphism_group(&g, "p").unwrap();
        assert_eq!(aut.order(), 2);
        assert!(aut.is_isomorphic(&cyclic_group(2)));
    }

    #[test]
    fn nerve_levels_count_chains() {
        let c2 = cyclic_group(2);
        let n = nerve(c2.underlying(), 3);
        let counts: Vec<usize> = (0..=3).map(|k| n.sset.cell_count(k)).collect();
        assert_eq!(counts, vec![1, 2, 4, 8]);
        assert!(crate::sset::validate_sset(&n.sset).is_valid());
    }

    #[test]
    fn nerve_edge_endpoints_follow_the_arrow() {
        let g = spread_groupoid(&trivial_group(), &["p", "q"]);
        let n = nerve(&g, 3);
        let e = n.sset.cell_index(1, "[p>q:0]").unwrap();
        let d0 = n.sset.face(1, 0, e);
        let d1 = n.sset.face(1, 1, e);
        assert_eq!(n.sset.cell_id(0, d0), "q");
        assert_eq!(n.sset.cell_id(0, d1), "p");
    }

    #[test]
    fn nerve_inner_face_composes() {
        let c2 = cyclic_group(2);
        let n = nerve(c2.underlying(), 3);
        let c = n.sset.cell_index(2, "[1,1]").unwrap();
        let d1 = n.sset.face(2, 1, c);
        assert_eq!(n.sset.cell_id(1, d1), "[0]");
    }

    #[test]
    fn nerve_recognition_recovers_the_groupoid() {
        let g = spread_groupoid(&cyclic_group(2), &["p", "q"]);
        let n = nerve(&g, 3);
        let check = crate::sset::is_nerve_of_groupoid(&n.sset).unwrap();
        assert!(check.holds());
        let back = check.groupoid.unwrap();
        assert_eq!(back.object_count(), 2);
        assert_eq!(back.morphism_count(), 8);
        assert!(validate_groupoid(&back).is_valid());
    }

    #[test]
    fn quotient_functor_is_not_faithful() {
        let c4 = cyclic_group(4);
        let c2 = cyclic_group(2);
        let f = group_hom(&c4, &c2, |a| {
            let v: usize = c4.element_id(a).parse().unwrap();
            c2.element_index(&(v % 2).to_string()).unwrap()
        })
        .unwrap();
        let check = is_equivalence(&f);
        assert!(!check.holds());
        assert_eq!(
            check.report.first_failure().map(|c| c.name.as_str()),
            Some("faithful")
        );
    }

    #[test]
    fn skeleton_functor_is_an_equivalence() {
        let c2 = cyclic_group(2);
        let spread = spread_groupoid(&c2, &["p", "q"]);
        // Collapse both objects to the single object of the group, sending
        // x>y:g to g.
        let mut objects = BTreeMap::new();
        objects.insert("p".to_string(), "x".to_string());
        objects.insert("q".to_string(), "x".to_string());
        let mut morphisms = BTreeMap::new();
        for m in 0..spread.morphism_count() {
            let id = spread.morphism_id(m);
            let g = id.rsplit(':').next().unwrap();
            morphisms.insert(id.to_string(), g.to_string());
        }
        let f = GroupoidFunctor::from_ids(&spread, c2.underlying(), &objects, &morphisms).unwrap();
        assert!(is_equivalence(&f).holds());
    }

    #[test]
    fn inclusion_into_larger_group_is_not_full() {
        let t = trivial_group();
        let c2 = cyclic_group(2);
        let f = group_hom(&t, &c2, |_| c2.identity()).unwrap();
        let check = is_equivalence(&f);
        assert!(!check.holds());
        assert_eq!(
            check.report.first_failure().map(|c| c.name.as_str()),
            Some("full")
        );
    }

    #[test]
    fn functor_enumeration_counts_endomorphisms() {
        let c2 = cyclic_group(2);
        let fs = all_functors(c2.underlying(), c2.underlying());
        // The identity and the collapse.
        assert_eq!(fs.len(), 2);
    }

    #[test]
    fn equivalence_search_agrees_with_construction() {
        let c2 = cyclic_group(2);
        let c3 = cyclic_group(3);
        let spread = spread_groupoid(&c2, &["p", "q"]);
        assert!(equivalence_exists(&spread, c2.underlying()).is_some());
        assert!(equivalence_exists(c2.underlying(), c3.underlying()).is_none());
        let split = disjoint_union_groupoid(c2.underlying(), c3.underlying(), "l", "r");
        assert!(equivalence_exists(&split, c2.underlying()).is_none());
    }

    #[test]
    fn nonabelian_tables_are_groups() {
        for g in [symmetric_3(), dihedral_8(), quaternion_8()] {
            assert!(validate_groupoid(g.underlying()).is_valid());
            assert!(!g.is_abelian());
        }
        assert_eq!(symmetric_3().order(), 6);
        assert!(!dihedral_8().is_isomorphic(&quaternion_8()));
        assert!(dihedral_8().is_isomorphic(&dihedral_8()));
        assert!(klein_four_group().is_abelian());
        assert!(!klein_four_group().is_isomorphic(&cyclic_group(4)));
    }

    #[test]
    fn nerve_map_of_quotient_commutes() {
        let c4 = cyclic_group(4);
        let c2 = cyclic_group(2);
        let f = group_hom(&c4, &c2, |a| {
            let v: usize = c4.element_id(a).parse().unwrap();
            c2.element_index(&(v % 2).to_string()).unwrap()
        })
        .unwrap();
        let m = nerve_map(&f, 3).unwrap();
        let e = m.source().cell_index(1, "[3]").unwrap();
        assert_eq!(m.target().cell_id(1, m.apply(1, e)), "[1]");
    }

    #[test]
    fn constant_functor_collapses() {
        let s3 = symmetric_3();
        let f = constant_functor(s3.underlying(), s3.underlying(), "x").unwrap();
        for m in 0..s3.order() {
            assert_eq!(f.apply_morphism(m), s3.identity());
        }
    }
}
