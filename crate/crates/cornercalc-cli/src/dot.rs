//! Graphviz rendering of face posets.
//!
//! One node per ray, labeled by its coordinate vector; a solid directed
//! edge for each covering relation of the order; a dashed undirected edge
//! for each incident pair the order does not relate. Nodes and edges are
//! emitted in sorted order, so the output is byte-stable.

use std::collections::BTreeSet;

use cornercalc::corners::FacePoset;
use cornercalc::monoid_fan::MonoidVector;

fn covers(
    order: &BTreeSet<(MonoidVector, MonoidVector)>,
) -> BTreeSet<(&MonoidVector, &MonoidVector)> {
    order
        .iter()
        .filter(|(a, b)| {
            !order
                .iter()
                .any(|(c, d)| c == a && order.contains(&(d.clone(), b.clone())))
        })
        .map(|(a, b)| (a, b))
        .collect()
}

pub fn render(poset: &FacePoset) -> String {
    let mut nodes: Vec<String> = poset.rays().iter().map(|r| r.to_string()).collect();
    nodes.sort();

    let mut solid: BTreeSet<(String, String)> = BTreeSet::new();
    if let Some(order) = poset.order() {
        for (a, b) in covers(order) {
            solid.insert((a.to_string(), b.to_string()));
        }
    }

    let mut dashed: BTreeSet<(String, String)> = BTreeSet::new();
    for simplex in poset.incidence() {
        let members: Vec<&MonoidVector> = simplex.iter().collect();
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                let related = poset.order().is_some_and(|order| {
                    order.contains(&((*a).clone(), (*b).clone()))
                        || order.contains(&((*b).clone(), (*a).clone()))
                });
                if !related {
                    let mut pair = [a.to_string(), b.to_string()];
                    pair.sort();
                    let [x, y] = pair;
                    dashed.insert((x, y));
                }
            }
        }
    }

    let mut out = String::from("digraph faces {\n");
    for node in &nodes {
        out.push_str(&format!("  \"{node}\";\n"));
    }
    for (a, b) in &solid {
        out.push_str(&format!("  \"{a}\" -> \"{b}\";\n"));
    }
    for (a, b) in &dashed {
        out.push_str(&format!("  \"{a}\" -> \"{b}\" [dir=none, style=dashed];\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use cornercalc::Label;

    fn unit(name: &str) -> MonoidVector {
        MonoidVector::unit(Label::new(name))
    }

    #[test]
    fn single_node_without_edges() {
        let poset = FacePoset::new(
            BTreeSet::from([unit("h")]),
            BTreeSet::from([BTreeSet::from([unit("h")])]),
            Some(BTreeSet::new()),
        );
        assert_eq!(render(&poset), "digraph faces {\n  \"h\";\n}\n");
    }

    #[test]
    fn transitive_edges_are_dropped_from_covers() {
        let (a, b, c) = (unit("a"), unit("b"), unit("c"));
        let order = BTreeSet::from([
            (a.clone(), b.clone()),
            (b.clone(), c.clone()),
            (a.clone(), c.clone()),
        ]);
        let poset = FacePoset::new(
            BTreeSet::from([a.clone(), b.clone(), c.clone()]),
            BTreeSet::from([BTreeSet::from([a, b, c])]),
            Some(order),
        );
        let text = render(&poset);
        assert!(text.contains("\"a\" -> \"b\";"));
        assert!(text.contains("\"b\" -> \"c\";"));
        assert!(!text.contains("\"a\" -> \"c\";"));
        assert!(!text.contains("dashed"));
    }

    #[test]
    fn unordered_incidence_is_dashed() {
        let (a, b) = (unit("a"), unit("b"));
        let poset = FacePoset::new(
            BTreeSet::from([a.clone(), b.clone()]),
            BTreeSet::from([BTreeSet::from([a, b])]),
            None,
        );
        let text = render(&poset);
        assert!(text.contains("\"a\" -> \"b\" [dir=none, style=dashed];"));
    }
}
