use super::ChangeClass;
use crate::field::{validate_field, Domain1Skeleton, ScalarField};

/// A hand-built pair of fields and the class its change belongs to.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub f: ScalarField,
    pub f2: ScalarField,
    pub expected: ChangeClass,
}

fn pair(
    name: &str,
    edges: &[(usize, usize)],
    values: &[f64],
    vertex: usize,
    new_value: f64,
    expected: ChangeClass,
) -> Scenario {
    let domain = Domain1Skeleton::new(values.len(), edges).expect("scenario domain");
    let f = validate_field(domain, values.to_vec()).expect("scenario field");
    let f2 = f.apply_value_change(vertex, new_value).expect("scenario move");
    Scenario {
        name: name.to_string(),
        f,
        f2,
        expected,
    }
}

fn forward() -> Vec<Scenario> {
    use ChangeClass::*;
    let mut out = Vec::new();
    let mut add = |name: &str, e: &[(usize, usize)], v: &[f64], x: usize, to: f64, c| {
        out.push(pair(name, e, v, x, to, c))
    };

    let path3 = [(0, 1), (1, 2)];
    add("regular vertex moves", &path3, &[0.0, 1.0, 3.0], 1, 2.0, SimpleChange);
    add("minimum moves", &path3, &[0.0, 1.0, 3.0], 0, 0.5, SimpleChange);
    let star = [(0, 1), (1, 2), (1, 3)];
    add("saddle moves", &star, &[3.0, 1.0, 2.0, 0.0], 1, 1.5, SimpleChange);
    add("maximum moves", &star, &[3.0, 1.0, 2.0, 0.0], 0, 3.5, SimpleChange);

    // r s a A b B
    add(
        "regular passes non-neighbour",
        &[(0, 1), (1, 2), (2, 3), (1, 4), (4, 5)],
        &[0.0, 0.5, 1.0, 5.0, 2.0, 6.0],
        2,
        2.5,
        SimpleChange,
    );
    // r s A B c
    add(
        "saddle passes non-neighbour",
        &[(0, 1), (1, 2), (1, 3), (0, 4), (4, 3)],
        &[0.0, 1.0, 5.0, 6.0, 2.0],
        1,
        2.5,
        SimpleChange,
    );

    // r s x y
    add(
        "maximum passes maximum on parent and child branch",
        &[(0, 1), (1, 2), (1, 3)],
        &[0.0, 1.0, 5.0, 6.0],
        2,
        6.5,
        VerticalSwap,
    );
    // r s1 s2 M x y
    add(
        "maximum passes maximum on unrelated branches",
        &[(0, 1), (1, 2), (2, 3), (1, 4), (2, 5)],
        &[0.0, 1.0, 2.0, 10.0, 5.0, 6.0],
        4,
        6.5,
        SimpleChange,
    );
    // r s x y M
    add(
        "maximum passes regular vertex",
        &[(0, 1), (1, 2), (1, 3), (3, 4)],
        &[0.0, 1.0, 5.0, 6.0, 10.0],
        2,
        6.5,
        SimpleChange,
    );
    // r y m
    add(
        "minimum passes neighbour",
        &[(0, 1), (1, 2), (0, 2)],
        &[0.0, 1.0, 5.0],
        0,
        1.5,
        SimpleChange,
    );

    // r x y c
    let line = [(0, 1), (1, 2), (2, 3)];
    add("regular passes regular neighbour", &line, &[0.0, 1.0, 2.0, 5.0], 1, 2.5, EdgeSplit);
    add(
        "regular passes regular neighbour sharing the upper vertex",
        &[(0, 1), (1, 2), (2, 3), (1, 3)],
        &[0.0, 1.0, 2.0, 5.0],
        1,
        2.5,
        SimpleChange,
    );
    add("regular passes maximum", &path3, &[0.0, 1.0, 5.0], 1, 5.5, SimpleChange);

    // r x y c1 c2 c3
    let fan = |extra: &[usize]| {
        let mut e = vec![(0, 1), (1, 2), (2, 3), (2, 4), (2, 5)];
        e.extend(extra.iter().map(|&c| (1, c)));
        e
    };
    let base = [0.0, 1.0, 2.0, 5.0, 6.0, 7.0];
    add("regular passes saddle taking all children", &fan(&[3, 4, 5]), &base, 1, 2.5, SimpleChange);
    add("regular passes saddle taking no children", &fan(&[]), &base, 1, 2.5, SimpleChange);
    add("regular passes saddle taking one child", &fan(&[3]), &base, 1, 2.5, SimpleChange);
    add(
        "regular passes saddle taking two children, ordered",
        &fan(&[3, 4]),
        &[0.0, 1.0, 2.0, 5.0, 7.0, 6.0],
        1,
        2.5,
        OrderedHorizontalSwap,
    );
    add(
        "regular passes saddle taking two children, unordered",
        &fan(&[3, 4]),
        &base,
        1,
        2.5,
        UnorderedHorizontalSwap,
    );

    // r x y c1 c2 c3, x is a saddle reaching c1 through y
    let sad = |extra: &[(usize, usize)]| {
        let mut e = vec![(0, 1), (1, 2), (2, 3), (1, 4)];
        e.extend_from_slice(extra);
        e
    };
    add(
        "saddle passes regular neighbour, ordered",
        &sad(&[(1, 5)]),
        &base,
        1,
        2.5,
        OrderedHorizontalSwap,
    );
    add(
        "saddle passes regular neighbour, unordered",
        &sad(&[(1, 5)]),
        &[0.0, 1.0, 2.0, 7.0, 5.0, 6.0],
        1,
        2.5,
        UnorderedHorizontalSwap,
    );
    add(
        "saddle with two children passes regular neighbour",
        &sad(&[]),
        &base[..5],
        1,
        2.5,
        SimpleChange,
    );
    add(
        "saddle passes regular neighbour sharing its child",
        &sad(&[(1, 5), (1, 3)]),
        &base,
        1,
        2.5,
        SimpleChange,
    );

    // r x y c2 c3
    add(
        "saddle passes maximum child",
        &[(0, 1), (1, 2), (1, 3), (1, 4)],
        &[0.0, 1.0, 2.0, 5.0, 6.0],
        1,
        2.5,
        SimpleChange,
    );
    add(
        "saddle passes maximum leaving one child",
        &[(0, 1), (1, 2), (1, 3)],
        &[0.0, 1.0, 2.0, 5.0],
        1,
        2.5,
        EdgeSplit,
    );

    // r x y d1 d2 c
    let ss = |extra: &[usize]| {
        let mut e = vec![(0, 1), (1, 2), (2, 3), (2, 4), (1, 5)];
        e.extend(extra.iter().map(|&d| (1, d)));
        e
    };
    let cases: [(&str, &[usize], [f64; 3], ChangeClass); 6] = [
        ("saddle passes saddle taking all children, ordered", &[3, 4], [7.0, 5.0, 6.0], OrderedHorizontalSwap),
        ("saddle passes saddle taking all children, unordered", &[3, 4], [6.0, 5.0, 7.0], UnorderedHorizontalSwap),
        ("saddle passes saddle taking one child, ordered", &[3], [7.0, 5.0, 6.0], OrderedHorizontalSwap),
        ("saddle passes saddle taking one child, unordered", &[3], [5.0, 6.0, 7.0], UnorderedHorizontalSwap),
        ("saddle passes saddle taking no children, ordered", &[], [7.0, 5.0, 6.0], OrderedHorizontalSwap),
        ("saddle passes saddle taking no children, unordered", &[], [6.0, 5.0, 7.0], UnorderedHorizontalSwap),
    ];
    for (name, extra, [d1, d2, c], class) in cases {
        add(name, &ss(extra), &[0.0, 1.0, 2.0, d1, d2, c], 1, 2.5, class);
    }
    // r x y d1 d2 c1 c2
    add(
        "saddle with two own children passes saddle",
        &[(0, 1), (1, 2), (2, 3), (2, 4), (1, 5), (1, 6)],
        &[0.0, 1.0, 2.0, 7.0, 5.0, 6.0, 5.5],
        1,
        2.5,
        UnorderedHorizontalSwap,
    );
    out
}

/// One small instance per case of the vertex-passing case analysis, followed
/// by every instance played backwards.
pub fn scenario_suite() -> Vec<Scenario> {
    let fwd = forward();
    let back: Vec<Scenario> = fwd
        .iter()
        .map(|s| Scenario {
            name: format!("{} (reversed)", s.name),
            f: s.f2.clone(),
            f2: s.f.clone(),
            expected: s.expected,
        })
        .collect();
    fwd.into_iter().chain(back).collect()
}
