//! Randomized invariants: components computed through the simplicial
//! machinery must agree with plain graph reachability, and component
//! counts must behave under unions and products.

use ngpd_core::multi::{diagonal_components, external_product, from_sset};
use ngpd_core::sset::{
    disjoint_union, free_simplicial_set, pi0, validate_sset, SemiSimplicialData, SimplicialSet,
};
use proptest::prelude::*;

/// Reachability classes of an undirected graph, counted directly.
fn graph_components(vertices: usize, edges: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(parent: &mut Vec<usize>, mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    (0..vertices).filter(|&v| find(&mut parent, v) == v).count()
}

fn graph_sset(vertices: usize, edges: &[(usize, usize)]) -> SimplicialSet {
    let mut data = SemiSimplicialData::new(1);
    for v in 0..vertices {
        data.cell(0, format!("v{v}"));
    }
    for (k, (a, b)) in edges.iter().enumerate() {
        let id = format!("e{k}");
        data.cell(1, &id);
        data.face(1, 0, &id, format!("v{b}"));
        data.face(1, 1, &id, format!("v{a}"));
    }
    free_simplicial_set(&data, 2).expect("graph data is closed")
}

fn graphs() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..=5).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec((0..n, 0..n), 0..=8),
        )
    })
}

proptest! {
    #[test]
    fn free_graphs_validate_and_count_components_like_reachability(
        (n, edges) in graphs()
    ) {
        let x = graph_sset(n, &edges);
        prop_assert!(validate_sset(&x).is_valid());
        prop_assert_eq!(pi0(&x).unwrap().len(), graph_components(n, &edges));
    }

    #[test]
    fn component_counts_add_under_union_and_multiply_under_product(
        (n, edges) in graphs(),
        (m, fdges) in graphs()
    ) {
        let x = graph_sset(n, &edges);
        let y = graph_sset(m, &fdges);
        let cx = pi0(&x).unwrap().len();
        let cy = pi0(&y).unwrap().len();

        let both = disjoint_union(&x, &y, "l", "r").unwrap();
        prop_assert_eq!(pi0(&both).unwrap().len(), cx + cy);

        let square = external_product(&from_sset(&x), &from_sset(&y));
        prop_assert_eq!(diagonal_components(&square).unwrap().len(), cx * cy);
    }
}
