use mtstab_bench::{grid_field, tree_pair};
use mtstab_core::io::TreeDump;

#[test]
fn tree_pairs_have_the_requested_size_and_repeat() {
    for n in [2, 5, 9] {
        let (a, b) = tree_pair(7, n);
        assert_eq!((a.len(), b.len()), (n, n));
        let (c, _) = tree_pair(7, n);
        assert_eq!(TreeDump::from_tree(&a), TreeDump::from_tree(&c));
    }
}

#[test]
fn grid_fields_repeat() {
    let f = grid_field(3, 6);
    assert_eq!(f.len(), 36);
    assert_eq!(f, grid_field(3, 6));
}
