//! Fundamental groups of dimension-bounded simplicial sets by edge paths.
//!
//! The generators are the nondegenerate 1-cells. Every nondegenerate
//! 2-cell imposes the relation saying its long edge equals its two short
//! edges in order, with degenerate edges contributing nothing. The group
//! at a vertex is read off after collapsing a breadth-first spanning tree
//! of the vertex's component. Needs at least two levels of cells; with
//! exactly two the answer is the group of the 2-truncation, which is all
//! the data there is.

use crate::fp::{free_reduce, FpGroup, Letter};
use crate::sset::SimplicialSet;
use crate::{Error, Result};

/// Presentation of the fundamental group of `x` at the vertex `base`.
pub fn fundamental_group(x: &SimplicialSet, base: &str) -> Result<FpGroup> {
    Ok(loop_presentation(x, base)?.group)
}

/// A fundamental group presentation together with the spanning tree it
/// came from, kept around so loops can be traced back to edges.
///
/// Vertex and edge arguments are cell indices at levels 0 and 1 of the
/// set that produced this value.
pub struct LoopPresentation {
    /// The presentation itself; generators are named by edge cells.
    pub group: FpGroup,
    in_component: Vec<bool>,
    parent: Vec<Option<(usize, bool)>>,
    generator_of: Vec<Option<usize>>,
    endpoints: Vec<(usize, usize)>,
}

impl LoopPresentation {
    /// Whether the vertex lies in the base's component.
    pub fn contains_vertex(&self, v: usize) -> bool {
        self.in_component[v]
    }

    /// The tree path from the base to a vertex in its component, as
    /// edges paired with whether each is traversed forwards.
    pub fn tree_path(&self, v: usize) -> Vec<(usize, bool)> {
        let mut steps = Vec::new();
        let mut at = v;
        while let Some((e, forward)) = self.parent[at] {
            steps.push((e, forward));
            let (s, t) = self.endpoints[e];
            // Step back to wherever the tree came from.
            at = if forward { s } else { t };
        }
        steps.reverse();
        steps
    }

    /// The generator an edge maps to after collapsing the tree, if any.
    /// Tree edges and degenerate edges map to nothing.
    pub fn edge_generator(&self, e: usize) -> Option<usize> {
        self.generator_of[e]
    }
}

/// Computes the fundamental group of `x` at `base` and keeps the
/// spanning tree used to present it.
pub fn loop_presentation(x: &SimplicialSet, base: &str) -> Result<LoopPresentation> {
    if x.dim_bound() < 2 {
        return Err(Error::NeedsLevel {
            needed: 2,
            bound: x.dim_bound(),
        });
    }
    let base = x.cell_index(0, base).ok_or_else(|| Error::UnknownCell {
        id: base.to_string(),
        place: "level 0".into(),
    })?;

    // Directed edges: d1 is the source, d0 the target.
    let degenerate_edge = x.degenerate_flags(1);
    let src = |e: usize| x.face(1, 1, e);
    let tgt = |e: usize| x.face(1, 0, e);

    // Breadth-first spanning tree of the base's component, walking edges
    // in identifier order so the tree is canonical.
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); x.cell_count(0)];
    for e in 0..x.cell_count(1) {
        if degenerate_edge[e] {
            continue;
        }
        adjacency[src(e)].push((e, tgt(e)));
        adjacency[tgt(e)].push((e, src(e)));
    }
    for list in adjacency.iter_mut() {
        list.sort();
    }
    let mut in_component = vec![false; x.cell_count(0)];
    let mut tree_edge = vec![false; x.cell_count(1)];
    let mut parent: Vec<Option<(usize, bool)>> = vec![None; x.cell_count(0)];
    let mut queue = std::collections::VecDeque::new();
    in_component[base] = true;
    queue.push_back(base);
    while let Some(v) = queue.pop_front() {
        for &(e, w) in &adjacency[v] {
            if !in_component[w] {
                in_component[w] = true;
                tree_edge[e] = true;
                parent[w] = Some((e, tgt(e) == w));
                queue.push_back(w);
            }
        }
    }

    // Generators: nondegenerate non-tree edges inside the component.
    let mut generator_of: Vec<Option<usize>> = vec![None; x.cell_count(1)];
    let mut gen_names = Vec::new();
    for e in 0..x.cell_count(1) {
        if degenerate_edge[e] || tree_edge[e] || !in_component[src(e)] {
            continue;
        }
        generator_of[e] = Some(gen_names.len());
        gen_names.push(x.cell_id(1, e).to_string());
    }

    // Letter of an edge after collapsing the tree: nothing for degenerate
    // or tree edges, its generator otherwise.
    let letter = |e: usize| -> Option<Letter> {
        generator_of[e].map(|g| (g, false))
    };

    let degenerate_face = x.degenerate_flags(2);
    let mut relators: Vec<Vec<Letter>> = Vec::new();
    for c in 0..x.cell_count(2) {
        if degenerate_face[c] {
            continue;
        }
        let long = x.face(2, 1, c);
        if !in_component[src(long)] {
            continue;
        }
        // d2 then d0 traverses the two short edges; the relator says this
        // equals the long edge d1.
        let mut word: Vec<Letter> = Vec::new();
        word.extend(letter(x.face(2, 2, c)));
        word.extend(letter(x.face(2, 0, c)));
        word.extend(letter(long).map(|(g, _)| (g, true)));
        let word = free_reduce(&word);
        if !word.is_empty() {
            relators.push(word);
        }
    }
    relators.sort();
    relators.dedup();

    let endpoints = (0..x.cell_count(1)).map(|e| (src(e), tgt(e))).collect();
    Ok(LoopPresentation {
        group: FpGroup::new(gen_names, relators)?,
        in_component,
        parent,
        generator_of,
        endpoints,
    })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::{abelianization, hom_count};
    use crate::groupoid::{cyclic_group, nerve};
    use crate::sset::{boundary_simplex, standard_simplex};

    #[test]
    fn boundary_of_triangle_is_free_of_rank_one() {
        let x = boundary_simplex(2, 3);
        let g = fundamental_group(&x, "0").unwrap();
        // Three edges, two in the tree, no 2-cells to impose relations.
        assert_eq!(g.num_gens(), 1);
        assert!(g.relators().is_empty());
        let ab = abelianization(&g);
        assert_eq!(ab.free_rank, 1);
        assert!(ab.torsion.is_empty());
    }

    #[test]
    fn filled_triangle_is_simply_connected() {
        let x = standard_simplex(2, 3);
        let g = fundamental_group(&x, "0").unwrap();
        assert_eq!(g.num_gens(), 1);
        assert_eq!(g.relators().len(), 1);
        assert!(abelianization(&g).is_trivial());
    }

    #[test]
    fn nerve_of_cyclic_group_recovers_it() {
        let n = nerve(cyclic_group(3).underlying(), 2);
        let g = fundamental_group(&n.sset, "x").unwrap();
        assert_eq!(g.num_gens(), 2);
        assert_eq!(g.relators().len(), 4);
        let ab = abelianization(&g);
        assert_eq!(ab.free_rank, 0);
        assert_eq!(ab.torsion, vec![3]);
        assert_eq!(hom_count(&g, &cyclic_group(3)), 3);
        assert_eq!(hom_count(&g, &cyclic_group(2)), 1);
    }

    #[test]
    fn base_vertex_must_exist() {
        let x = standard_simplex(1, 2);
        assert!(fundamental_group(&x, "9").is_err());
    }

    #[test]
    fn other_components_do_not_contribute() {
        let a = standard_simplex(0, 2);
        let b = boundary_simplex(2, 2);
        let both = crate::sset::disjoint_union(&a, &b, "pt", "ring").unwrap();
        let at_point = fundamental_group(&both, "pt:0").unwrap();
        assert_eq!(at_point.num_gens(), 0);
        let at_ring = fundamental_group(&both, "ring:0").unwrap();
        assert_eq!(at_ring.num_gens(), 1);
    }

    #[test]
    fn tree_paths_start_at_the_base_and_end_at_the_vertex() {
        let x = boundary_simplex(2, 2);
        let p = loop_presentation(&x, "0").unwrap();
        for v in 0..3 {
            assert!(p.contains_vertex(v));
            let mut at = x.cell_index(0, "0").unwrap();
            for (e, forward) in p.tree_path(v) {
                let (s, t) = (x.face(1, 1, e), x.face(1, 0, e));
                if forward {
                    assert_eq!(s, at);
                    at = t;
                } else {
                    assert_eq!(t, at);
                    at = s;
                }
            }
            assert_eq!(at, v);
        }
    }
}
