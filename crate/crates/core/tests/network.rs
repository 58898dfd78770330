use annulus_core::arith::{frac, Field, Scalar};
use annulus_core::geometry::Circle;
use annulus_core::network::{self, fixtures, label_boundary, Network};

fn labels(n: &Network) -> Vec<String> {
    let l = label_boundary(n);
    l.order.iter().map(|&v| n.vertices[v].id.clone()).collect()
}

#[test]
fn pergrann_is_valid() {
    let n = fixtures::pergrann();
    assert_eq!(network::validate(&n), Vec::<String>::new());
    assert_eq!(labels(&n), ["b", "b''", "b'"]);
}

#[test]
fn moving_inner_base_relabels() {
    let n = network::move_cut_base(&fixtures::pergrann(), Circle::Inner).unwrap();
    assert_eq!(network::validate(&n), Vec::<String>::new());
    assert_eq!(labels(&n), ["b", "b'", "b''"]);
}

#[test]
fn moving_outer_base_keeps_single_outer_label() {
    let n = network::move_cut_base(&fixtures::pergrann(), Circle::Outer).unwrap();
    assert!(network::validate(&n).is_empty());
    assert_eq!(labels(&n), ["b", "b''", "b'"]);
}

#[test]
fn reversals_stay_valid() {
    let n = fixtures::pergrann();
    let r = network::reverse_cut(&n).unwrap();
    assert!(network::validate(&r).is_empty());
    let o = network::reverse_orientation(&n);
    assert!(network::validate(&o).is_empty());
}

#[test]
fn json_round_trip() {
    let n = fixtures::pergrann().with_weights(&fixtures::pergrann_values());
    let back = Network::from_json(&n.to_json()).unwrap();
    assert_eq!(back.to_json(), n.to_json());
}

#[test]
fn face_weights_multiply_to_one() {
    let n = fixtures::pergrann().with_weights(&fixtures::pergrann_values());
    let faces = network::face_weights(&n).unwrap();
    // V - E + F = 0 for the annulus with boundary arcs counted as edges
    let arcs = 3;
    assert_eq!(n.vertices.len() as i64 - (n.edges.len() + arcs) as i64 + faces.len() as i64, 0);
    let prod = faces.iter().fold(<Scalar as Field>::one(), |acc, f| acc * &f.weight);
    assert_eq!(prod, frac(1, 1));
}

#[test]
fn connecting_trail_exists() {
    let n = fixtures::pergrann().with_weights(&fixtures::pergrann_values());
    let t = network::find_connecting_trail(&n).unwrap();
    network::trail_weight(&n, &t).unwrap();
}

#[test]
fn crossings_are_resolved() {
    let n = fixtures::crossed();
    assert!(!network::validate(&n).is_empty());
    let r = network::resolve_crossings(&n).unwrap();
    assert_eq!(network::validate(&r), Vec::<String>::new());
    assert_eq!(r.vertices.len(), 10);
}

#[test]
fn invalid_degree_is_reported() {
    let mut n = fixtures::pergrann();
    n.edges.retain(|e| e.id != "e9");
    let msgs = network::validate(&n);
    assert!(msgs.iter().any(|m| m.contains("v1")), "{msgs:?}");
}

#[test]
fn random_networks_are_valid() {
    for seed in 0..20 {
        let n = network::random_network(network::RandomSpec { internal: 8, acyclic: seed % 2 == 0, seed });
        assert_eq!(network::validate(&n), Vec::<String>::new(), "seed {seed}");
        let internal = n.vertices.iter().filter(|v| !v.kind.is_boundary()).count();
        assert!((4..=8).contains(&internal), "seed {seed}: {internal}");
    }
}
