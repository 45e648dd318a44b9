use crate::mergetree::AbstractMergeTree;

/// Nine node tree with vertices A..I = 0..8 and three saddles, one of them
/// with three children.
pub fn nine_node_tree() -> AbstractMergeTree {
    let values = [0.0, 2.0, 4.0, 6.0, 10.0, 5.0, 8.0, 8.5, 9.0];
    let nodes: Vec<_> = values.iter().copied().enumerate().collect();
    let edges = [(1, 0), (2, 1), (4, 2), (3, 2), (6, 3), (7, 3), (8, 3), (5, 1)];
    AbstractMergeTree::from_edges(&nodes, &edges).unwrap()
}

/// Root at 0, a saddle at 6 and two leaves `a` and `b` above the saddle.
pub fn small_tree(a: f64, b: f64) -> AbstractMergeTree {
    AbstractMergeTree::from_edges(&[(0, 0.0), (1, 6.0), (2, 6.0 + a), (3, 6.0 + b)], &[(1, 0), (2, 1), (3, 1)])
        .unwrap()
}
