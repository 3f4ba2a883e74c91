//! Cross-cutting law suites tying the diagonal, the components, and the
//! spine comparisons together.
//!
//! The suites here are self-checks at heart: each states a fact that holds
//! for every valid object, so a failure points at a bug or at an invalid
//! input rather than at an interesting counterexample. They all share the
//! same desk-scale reading of "weak equivalence", a bijection on components
//! together with agreement of the loop invariants at matched base points,
//! and every report carries an explicit entry for the degrees left
//! unchecked. Splitting a finite simplicial set into its components and
//! reassembling it is an isomorphism on the nose; the reports say exactly
//! that instead of claiming anything stronger.

use std::collections::BTreeMap;

use crate::edge_path::fundamental_group;
use crate::fp::{group_invariants, table_presentation};
use crate::groupoid::trivial_group;
use crate::monotone::MonotoneMap;
use crate::multi::{
    diagonal_components, inner_diag_pair, multi_fiber_product, outer_level, outer_monotone_map,
    pi0_axis_classes, slice_sset, to_sset, total_diag, total_diag_map, MultiMap, MultiSSet,
};
use crate::ngroupoid::{pi0_set, validate_ngroupoid, NGroupoid};
use crate::report::{Check, Report};
use crate::sset::{
    fiber_product, pair_id, pi0, Partition, SSetMap, SimplicialSet, SimplicialSetBuilder,
    UnionFind,
};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Shared checks

// Merges a sub-report's checks under a prefix, deduplicating the skips.
fn absorb(rep: &mut Report, prefix: &str, sub: Report) {
    for c in sub.checks {
        rep.checks.push(Check {
            name: format!("{prefix}: {}", c.name),
            status: c.status,
            detail: c.detail,
        });
    }
    for n in sub.not_checked {
        if !rep.not_checked.contains(&n) {
            rep.not_checked.push(n);
        }
    }
}

/// The part of a weak equivalence that finite data can decide: the map
/// matches components one to one and the loop invariants agree at every
/// matched base point. Degrees two and up are recorded as unchecked.
pub fn weak_equiv_check(f: &SSetMap) -> Result<Report> {
    let mut rep = Report::new("components and loops of a map");
    let sp = pi0(f.source())?;
    let tp = pi0(f.target())?;
    let mut image = Vec::new();
    for class in 0..sp.len() {
        let v = f
            .source()
            .cell_index(0, sp.representative(class))
            .expect("representative vertex");
        let w = f.target().cell_id(0, f.apply(0, v));
        image.push(tp.class_of(w).expect("image vertex"));
    }
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    let mut clash = None;
    for (class, &im) in image.iter().enumerate() {
        if let Some(&other) = seen.get(&im) {
            if clash.is_none() {
                clash = Some(format!(
                    "components `{}` and `{}` land together",
                    sp.representative(other),
                    sp.representative(class)
                ));
            }
        } else {
            seen.insert(im, class);
        }
    }
    let missed = (0..tp.len()).find(|t| !seen.contains_key(t));
    let witness = clash.clone().unwrap_or_else(|| match missed {
        Some(t) => format!("component `{}` is not reached", tp.representative(t)),
        None => String::new(),
    });
    rep.record(
        "components are matched one to one",
        clash.is_none() && missed.is_none(),
        witness,
    );
    for class in 0..sp.len() {
        let base = sp.representative(class).to_string();
        let v = f.source().cell_index(0, &base).expect("representative vertex");
        let over = f.target().cell_id(0, f.apply(0, v)).to_string();
        let ours = group_invariants(&fundamental_group(f.source(), &base)?);
        let theirs = group_invariants(&fundamental_group(f.target(), &over)?);
        rep.record(
            format!("component `{base}`: loop invariants agree"),
            ours == theirs,
            format!("the loops at `{over}` differ"),
        );
    }
    rep.skip("homotopy above degree 1");
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Component decompositions

/// A simplicial set split into its components, with the reassembly map
/// from their coproduct back onto the original set.
#[derive(Debug, Clone)]
pub struct ComponentDecomposition {
    pub base: SimplicialSet,
    /// One piece per component, cells keeping their original names.
    pub components: Vec<SimplicialSet>,
    /// The coproduct of the pieces (ids prefixed with the piece number)
    /// mapped back onto the base.
    pub pr1: SSetMap,
    /// Components of the base. Piece `i` covers class `i`, which is also
    /// where the projection to the component set sends it.
    pub classes: Partition,
}

/// Splits a simplicial set by the component of each cell's leading vertex.
/// Faces and degeneracies never leave a component, so the pieces are
/// simplicial sets in their own right and together they cover every cell
/// exactly once.
pub fn components_decomposition(x: &SimplicialSet) -> Result<ComponentDecomposition> {
    let classes = pi0(x)?;
    let d = x.dim_bound();
    let mut keeps: Vec<Vec<Vec<bool>>> = (0..classes.len())
        .map(|_| (0..=d).map(|k| vec![false; x.cell_count(k)]).collect())
        .collect();
    for k in 0..=d {
        for c in 0..x.cell_count(k) {
            let v = x.vertex_zero(k, c);
            let class = classes
                .class_of(x.cell_id(0, v))
                .expect("vertex has a component");
            keeps[class][k][c] = true;
        }
    }
    let mut components = Vec::new();
    for keep in &keeps {
        components.push(x.restrict(keep)?);
    }
    let mut b = SimplicialSetBuilder::new(d);
    for (tag, comp) in components.iter().enumerate() {
        for k in 0..=d {
            for c in 0..comp.cell_count(k) {
                let id = format!("{tag}:{}", comp.cell_id(k, c));
                b.cell(k, id.clone());
                for i in 0..=k {
                    if k > 0 {
                        b.face(
                            k,
                            i,
                            id.clone(),
                            format!("{tag}:{}", comp.cell_id(k - 1, comp.face(k, i, c))),
                        );
                    }
                    if k < d {
                        b.degeneracy(
                            k,
                            i,
                            id.clone(),
                            format!("{tag}:{}", comp.cell_id(k + 1, comp.degeneracy(k, i, c))),
                        );
                    }
                }
            }
        }
    }
    let coproduct = b.build()?;
    let pr1 = SSetMap::from_fn(&coproduct, x, |_, id| {
        id.splitn(2, ':').nth(1).expect("tagged id").to_string()
    })?;
    Ok(ComponentDecomposition {
        base: x.clone(),
        components,
        pr1,
        classes,
    })
}

/// Reassembly checks for a component decomposition, plus the flag telling
/// whether the set was discrete up to its loops.
#[derive(Debug, Clone)]
pub struct PrWeakEquiv {
    pub decomposition: ComponentDecomposition,
    pub report: Report,
    /// True when every component has trivial loop invariants. Discrete
    /// fixtures have it set; anything carrying a loop does not.
    pub zero_truncated: bool,
}

/// Checks that reassembling the components gives the set back: a levelwise
/// bijection matching components one to one with the same loop invariants,
/// while the projection to the component set collapses each piece to a
/// point.
pub fn check_pr_weak_equiv(x: &SimplicialSet) -> Result<PrWeakEquiv> {
    let dec = components_decomposition(x)?;
    let mut rep = Report::new("reassembly of the components");
    rep.record(
        "the reassembly is a bijection on every level",
        dec.pr1.is_levelwise_bijection(),
        "some cell is missed or hit twice",
    );
    let sub = weak_equiv_check(&dec.pr1)?;
    absorb(&mut rep, "reassembly", sub);
    let mut collapse_ok = true;
    let mut collapse_witness = String::new();
    let mut zero_truncated = true;
    let trivial = group_invariants(&table_presentation(&trivial_group()));
    for (i, comp) in dec.components.iter().enumerate() {
        let pieces = pi0(comp)?;
        if pieces.len() != 1 && collapse_ok {
            collapse_ok = false;
            collapse_witness = format!(
                "component `{}` keeps {} pieces",
                dec.classes.representative(i),
                pieces.len()
            );
        }
        let loops = fundamental_group(comp, dec.classes.representative(i))?;
        if group_invariants(&loops) != trivial {
            zero_truncated = false;
        }
    }
    rep.record(
        "the projection collapses each component to a point",
        collapse_ok,
        collapse_witness,
    );
    Ok(PrWeakEquiv {
        decomposition: dec,
        report: rep,
        zero_truncated,
    })
}

// ---------------------------------------------------------------------------
// The collapse law

/// Components of the total diagonal against components of the innermost
/// collapse: for a two axis set the two counts must agree, and sending a
/// vertex to its inner component is the canonical bijection between them.
pub fn segal_pi0_law(x: &MultiSSet) -> Result<Report> {
    if x.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: x.arity(),
        });
    }
    let mut rep = Report::new("components of the diagonal against the collapse");
    let dpart = diagonal_components(x)?;
    let (collapsed, tables) = pi0_axis_classes(x, 1)?;
    let t0 = &tables[&vec![0usize]];
    let tpart = pi0(&to_sset(&collapsed)?)?;
    rep.record(
        "component counts agree",
        dpart.len() == tpart.len(),
        format!("{} against {}", dpart.len(), tpart.len()),
    );
    let mut image: Vec<Option<usize>> = vec![None; dpart.len()];
    let mut split = None;
    for (c, id) in x.cells(&[0, 0]).iter().enumerate() {
        let dc = dpart.class_of(id).expect("diagonal vertex");
        let tc = tpart
            .class_of(collapsed.cell_id(&[0], t0[c]))
            .expect("collapsed vertex");
        match image[dc] {
            None => image[dc] = Some(tc),
            Some(prev) => {
                if prev != tc && split.is_none() {
                    split = Some(format!("`{id}` leaves its component"));
                }
            }
        }
    }
    rep.record(
        "vertices of one diagonal component collapse together",
        split.is_none(),
        split.unwrap_or_default(),
    );
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    let mut merged = None;
    for (dc, im) in image.iter().enumerate() {
        let im = im.expect("every diagonal component has a vertex");
        if let Some(&other) = seen.get(&im) {
            if merged.is_none() {
                merged = Some(format!(
                    "`{}` and `{}` collapse together",
                    dpart.representative(other),
                    dpart.representative(dc)
                ));
            }
        } else {
            seen.insert(im, dc);
        }
    }
    rep.record(
        "distinct diagonal components stay apart",
        merged.is_none(),
        merged.unwrap_or_default(),
    );
    let missed = (0..tpart.len()).find(|t| !seen.contains_key(t));
    rep.record(
        "every collapsed component is reached",
        missed.is_none(),
        match missed {
            Some(t) => format!("component `{}`", tpart.representative(t)),
            None => String::new(),
        },
    );
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Levelwise maps and the diagonal

/// Checks a map of two axis sets one outer level at a time and then on the
/// total diagonal: each slice must pass the component and loop checks, and
/// so must the diagonal as a whole. Together these are the finitely
/// checkable shadow of "levelwise equivalences glue to an equivalence".
pub fn levelwise_equiv_to_diag(t: &MultiMap) -> Result<Report> {
    let x = t.source();
    let y = t.target();
    if x.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: x.arity(),
        });
    }
    let mut rep = Report::new("levelwise checks against the diagonal");
    for m in 0..=x.dim_bounds()[0] {
        let sm = slice_sset(x, 1, &[m, 0])?;
        let tm = slice_sset(y, 1, &[m, 0])?;
        let slice = SSetMap::from_fn(&sm, &tm, |k, id| {
            let c = x.cell_index(&[m, k], id).expect("cell of the slice");
            y.cell_id(&[m, k], t.apply(&[m, k], c)).to_string()
        })?;
        absorb(&mut rep, &format!("outer level {m}"), weak_equiv_check(&slice)?);
    }
    let diag = total_diag_map(t)?;
    absorb(&mut rep, "total diagonal", weak_equiv_check(&diag)?);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Pullbacks

/// Strict commutation of the diagonal with pullbacks: the total diagonal
/// of a fiber product must equal the fiber product of the total diagonals
/// cell for cell. Both sides name cells by the same pairing scheme, so the
/// comparison is literal equality.
pub fn diag_fiber_product_check(f: &MultiMap, g: &MultiMap) -> Result<bool> {
    let pullback = multi_fiber_product(f, g)?;
    let left = total_diag(&pullback.object)?;
    let right = fiber_product(&total_diag_map(f)?, &total_diag_map(g)?)?;
    Ok(left == right.object)
}

// ---------------------------------------------------------------------------
// The space of inner diagonals

// A witness that a simplicial set is not discrete: a level with the wrong
// count, or a face table that is not a bijection.
fn discrete_failure(x: &SimplicialSet) -> Option<String> {
    let points = x.cell_count(0);
    for k in 1..=x.dim_bound() {
        if x.cell_count(k) != points {
            return Some(format!(
                "level {k} has {} cells for {points} points",
                x.cell_count(k)
            ));
        }
        for i in 0..=k {
            let mut seen = vec![false; points];
            for c in 0..points {
                let f = x.face(k, i, c);
                if std::mem::replace(&mut seen[f], true) {
                    return Some(format!(
                        "face {i} at level {k} repeats `{}`",
                        x.cell_id(k - 1, f)
                    ));
                }
            }
        }
    }
    None
}

/// Report on the simplicial space of inner diagonals: level `m` is the
/// diagonal of the slice at outer level `m`. For a valid input, level zero
/// is discrete, every higher level passes the component and loop checks
/// against its spine of ones, and collapsing the levelwise components
/// recovers the component set of the whole object.
pub fn segal_space_report(phi: &NGroupoid) -> Result<Report> {
    if phi.n() < 2 {
        return Err(Error::InvalidInput {
            detail: "the inner diagonal needs at least two axes".into(),
        });
    }
    let mut rep = Report::new("inner diagonals as a Segal space");
    if let Some(v) = validate_ngroupoid(phi).violations.first() {
        rep.fail(
            "the carrier satisfies the groupoid laws",
            format!("{} at {}", v.law, v.witness),
        );
        return Ok(rep);
    }
    let pd = inner_diag_pair(phi.carrier())?;
    let outer = pd.dim_bounds()[0];
    if outer < 1 {
        return Err(Error::NeedsLevel {
            needed: 1,
            bound: outer,
        });
    }
    let mut level = Vec::new();
    for m in 0..=outer {
        level.push(total_diag(&outer_level(&pd, m)?)?);
    }
    let flaw = discrete_failure(&level[0]);
    rep.record(
        "level zero is discrete",
        flaw.is_none(),
        flaw.unwrap_or_default(),
    );
    let src = total_diag_map(&outer_monotone_map(&pd, &MonotoneMap::vertex(1, 0))?)?;
    let tgt = total_diag_map(&outer_monotone_map(&pd, &MonotoneMap::vertex(1, 1))?)?;
    for m in 2..=outer {
        let mut tuples = level[1].clone();
        let mut end = tgt.clone();
        for _ in 1..m {
            let fp = fiber_product(&end, &src)?;
            end = fp.pr2.then(&tgt)?;
            tuples = fp.object;
        }
        let mut spines = Vec::new();
        for j in 0..m {
            spines.push(total_diag_map(&outer_monotone_map(
                &pd,
                &MonotoneMap::spine_edge(m, j),
            )?)?);
        }
        let cmp = SSetMap::from_fn(&level[m], &tuples, |k, id| {
            let c = level[m].cell_index(k, id).expect("cell of the level");
            let mut out: Option<String> = None;
            for s in &spines {
                let eid = level[1].cell_id(k, s.apply(k, c));
                out = Some(match out {
                    None => eid.to_string(),
                    Some(p) => pair_id(&p, eid),
                });
            }
            out.expect("at least one spine edge")
        })?;
        absorb(
            &mut rep,
            &format!("level {m} against its spine"),
            weak_equiv_check(&cmp)?,
        );
    }
    // Collapse the levelwise components: one point per vertex component,
    // the edge components merging them.
    let p0 = pi0(&level[0])?;
    let p1 = pi0(&level[1])?;
    let mut uf = UnionFind::new(p0.len());
    for class in p1.classes() {
        let v = level[1]
            .cell_index(0, class[0].as_str())
            .expect("edge component vertex");
        let a = p0
            .class_of(level[0].cell_id(0, src.apply(0, v)))
            .expect("source vertex");
        let b = p0
            .class_of(level[0].cell_id(0, tgt.apply(0, v)))
            .expect("target vertex");
        uf.union(a, b);
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (class, members) in p0.classes().iter().enumerate() {
        groups
            .entry(uf.find(class))
            .or_default()
            .extend(members.iter().cloned());
    }
    let truncated = Partition::from_groups(groups.into_values().collect());
    let whole = pi0_set(phi)?;
    rep.record(
        "collapsing the levels recovers the component set",
        truncated.classes() == whole.classes(),
        format!(
            "`{}` against `{}`",
            truncated.representatives().join(","),
            whole.representatives().join(",")
        ),
    );
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{
        cyclic_group, disjoint_union_groupoid, nerve, spread_groupoid, symmetric_3,
    };
    use crate::multi::{external_product, from_sset};
    use crate::ngroupoid::{constant_inner_lift, double_nerve, nerve_ngroupoid};
    use crate::sset::{boundary_simplex, constant_sset, disjoint_union, standard_simplex};

    #[test]
    fn splitting_a_nerve_by_components() {
        let pair = spread_groupoid(&trivial_group(), &["a", "b"]);
        let point = spread_groupoid(&trivial_group(), &["c"]);
        let g = disjoint_union_groupoid(&pair, &point, "l", "r");
        let x = nerve(&g, 3).sset;
        let dec = components_decomposition(&x).unwrap();
        assert_eq!(dec.components.len(), 2);
        let sizes: Vec<Vec<usize>> = dec
            .components
            .iter()
            .map(|c| (0..=3).map(|k| c.cell_count(k)).collect())
            .collect();
        assert!(sizes.contains(&vec![2, 4, 8, 16]));
        assert!(sizes.contains(&vec![1, 1, 1, 1]));
        assert!(dec.pr1.is_levelwise_bijection());
    }

    #[test]
    fn reassembly_passes_and_the_flag_sees_loops() {
        let points = constant_sset(&["p".into(), "q".into()], 2);
        let flat = check_pr_weak_equiv(&points).unwrap();
        assert!(flat.report.passed());
        assert!(flat.zero_truncated);

        let hole = disjoint_union(
            &boundary_simplex(2, 2),
            &constant_sset(&["p".into()], 2),
            "l",
            "r",
        )
        .unwrap();
        let round = check_pr_weak_equiv(&hole).unwrap();
        assert!(round.report.passed());
        assert!(!round.zero_truncated);
    }

    #[test]
    fn the_collapse_counts_the_diagonal_components() {
        let z2 = cyclic_group(2);
        let connected = external_product(
            &from_sset(&nerve(z2.underlying(), 3).sset),
            &from_sset(&nerve(z2.underlying(), 3).sset),
        );
        assert!(segal_pi0_law(&connected).unwrap().passed());

        let split = external_product(
            &from_sset(&constant_sset(&["u".into(), "v".into()], 3)),
            &from_sset(&nerve(z2.underlying(), 3).sset),
        );
        assert!(segal_pi0_law(&split).unwrap().passed());
    }

    #[test]
    fn levelwise_checks_pass_for_the_identity_and_catch_a_collapse() {
        let z2 = cyclic_group(2);
        let point = trivial_group();
        let prod = external_product(
            &from_sset(&nerve(point.underlying(), 3).sset),
            &from_sset(&nerve(z2.underlying(), 3).sset),
        );
        let id = MultiMap::identity(&prod);
        let rep = levelwise_equiv_to_diag(&id).unwrap();
        assert!(rep.passed());
        assert!(rep.not_checked.iter().any(|n| n.contains("degree 1")));

        let flat = external_product(
            &from_sset(&nerve(point.underlying(), 3).sset),
            &from_sset(&nerve(point.underlying(), 3).sset),
        );
        let collapse =
            MultiMap::from_fn(&prod, &flat, |idx, _| flat.cell_id(idx, 0).to_string()).unwrap();
        let rep = levelwise_equiv_to_diag(&collapse).unwrap();
        assert!(!rep.passed());
        assert!(rep.first_failure().unwrap().name.contains("loop invariants"));
    }

    #[test]
    fn the_diagonal_commutes_with_pullbacks() {
        let k = double_nerve(&cyclic_group(2), 3, 3).unwrap();
        let ends = outer_monotone_map(k.carrier(), &MonotoneMap::vertex(1, 0)).unwrap();
        let other = outer_monotone_map(k.carrier(), &MonotoneMap::vertex(1, 1)).unwrap();
        assert!(diag_fiber_product_check(&ends, &other).unwrap());

        let point = from_sset(&constant_sset(&["*".into()], 3));
        let a = from_sset(&nerve(cyclic_group(3).underlying(), 3).sset);
        let b = from_sset(&nerve(cyclic_group(2).underlying(), 3).sset);
        let f = MultiMap::from_fn(&a, &point, |idx, _| point.cell_id(idx, 0).to_string()).unwrap();
        let g = MultiMap::from_fn(&b, &point, |idx, _| point.cell_id(idx, 0).to_string()).unwrap();
        assert!(diag_fiber_product_check(&f, &g).unwrap());
    }

    #[test]
    fn inner_diagonals_form_a_segal_space() {
        let s3 = symmetric_3();
        let lifted = constant_inner_lift(&nerve_ngroupoid(s3.underlying(), 3), 3).unwrap();
        assert!(segal_space_report(&lifted).unwrap().passed());

        let k = double_nerve(&cyclic_group(2), 3, 3).unwrap();
        assert!(segal_space_report(&k).unwrap().passed());

        let triangle = NGroupoid::new(1, from_sset(&standard_simplex(2, 3))).unwrap();
        let bad = constant_inner_lift(&triangle, 3).unwrap();
        let rep = segal_space_report(&bad).unwrap();
        assert!(!rep.passed());
        assert_eq!(
            rep.first_failure().unwrap().name,
            "the carrier satisfies the groupoid laws"
        );
    }
}
