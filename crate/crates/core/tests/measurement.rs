use annulus_core::arith::{frac, Field, RatLambda, Scalar, SymFrac};
use annulus_core::geometry::Circle;
use annulus_core::measurement::{self, Order, Symbolic};
use annulus_core::network::{self, fixtures, Network};
use num_traits::Signed;

fn ids(s: &str) -> Vec<String> {
    s.split(',').map(String::from).collect()
}

// parse a product like "-L^-1*w1*w2^2" over the network's symbol order
fn mono(s: &Symbolic, text: &str) -> SymFrac {
    let (neg, body) = match text.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, text),
    };
    let mut acc = SymFrac::one();
    for f in body.split('*') {
        let (name, exp) = match f.split_once('^') {
            Some((n, e)) => (n, e.parse::<i64>().unwrap()),
            None => (f, 1),
        };
        let idx = if name == "L" { 0 } else { s.names.iter().position(|x| x == name).unwrap() };
        acc = acc * SymFrac::var(idx).powi(exp).unwrap();
    }
    if neg {
        -acc
    } else {
        acc
    }
}

#[test]
fn pergrann_path_weights() {
    let n = fixtures::pergrann();
    for (p, want) in [
        ("e1,e2,e3,e4", "w1*w2*w3*w4"),
        ("e7,e8,e3,e4", "L^-1*w3*w4*w7*w8"),
        ("e1,e2,e3,e5,e6,e8,e3,e4", "-L^-1*w1*w2*w3^2*w4*w5*w6*w8"),
    ] {
        let (v, s) = measurement::path_weight_symbolic(&n, &ids(p)).unwrap();
        assert_eq!(v, mono(&s, want), "{p}: got {}", s.format(&v));
    }
}

#[test]
fn cycle_weight_and_decomposition() {
    let n = fixtures::pergrann();
    let s = Symbolic::new(&n);
    let cyc: Vec<usize> = measurement::parse_path(&n, &ids("e3,e5,e6,e8")).unwrap();
    let c = measurement::cycle_weight_over(&n, &cyc, &s.weights, &s.lambda()).unwrap();
    assert_eq!(c, mono(&s, "L^-1*w3*w5*w6*w8"));
    assert!(measurement::cycle_decompose_check(&n, &ids("e1,e2,e3,e5,e6,e8,e3,e4")).unwrap());
    assert!(matches!(
        measurement::cycle_decompose_check(&n, &ids("e1,e2,e3,e4")),
        Err(annulus_core::Error::NothingToDecompose)
    ));
}

#[test]
fn moved_cut_measurement_formula() {
    let n = network::move_cut_base(&fixtures::pergrann(), Circle::Inner).unwrap();
    let (m, s) = measurement::symbolic_matrix(&n).unwrap();
    let num = mono(&s, "w1*w3*w4") * (mono(&s, "w6*w8*w9") - mono(&s, "L*w2"));
    let den = SymFrac::one() + mono(&s, "L^-1*w3*w5*w6*w8");
    let want = num.checked_div(&den).unwrap();
    let got = m.get(1, 2).unwrap();
    assert_eq!(*got, want, "got {}", s.format(got));
}

#[test]
fn elimination_orders_agree() {
    let n = fixtures::pergrann().with_weights(&fixtures::pergrann_values());
    let a = measurement::measurement_matrix_with(&n, Order::Natural).unwrap();
    for o in [Order::Reverse, Order::Shuffled(1), Order::Shuffled(7)] {
        assert_eq!(measurement::measurement_matrix_with(&n, o).unwrap(), a);
    }
}

#[test]
fn series_converges_to_exact() {
    let n = fixtures::pergrann().with_weights(&fixtures::pergrann_values());
    let n = measurement::rescaled_for_series(&n).unwrap();
    let t = frac(1, 1);
    let exact = measurement::boundary_measurement(&n, 1, 3).unwrap().eval(&t).unwrap();
    let e1 = (&exact - measurement::series_oracle(&n, 1, 3, 6, &t).unwrap()).abs();
    let e2 = (&exact - measurement::series_oracle(&n, 1, 3, 14, &t).unwrap()).abs();
    assert!(e2 < e1 && e2 < frac(1, 1_000_000), "{e1} {e2}");
}

#[test]
fn spoke_measures_its_weight() {
    let n = fixtures::spoke().with_weights(&[frac(5, 3)]);
    let m = measurement::measurement_matrix(&n).unwrap();
    assert_eq!(m.entries.get(0, 0), &RatLambda::from_scalar(&frac(5, 3)));
}

#[test]
fn crossing_gadget_preserves_measurements() {
    let n = fixtures::crossed().with_weights(&[frac(2, 1), frac(3, 1)]);
    let r = network::resolve_crossings(&n).unwrap();
    let a = measurement::measurement_matrix(&n);
    let b = measurement::measurement_matrix(&r).unwrap();
    // the crossed drawing is still a valid path system; compare entries
    assert_eq!(a.unwrap().entries, b.entries);
}

#[allow(dead_code)]
fn scalar(n: &Network) -> Vec<Scalar> {
    n.numeric_weights().unwrap()
}

fn by_id(n: &Network) -> std::collections::BTreeMap<(String, String), RatLambda> {
    let m = measurement::measurement_matrix(n).unwrap();
    let l = network::label_boundary(n);
    let mut out = std::collections::BTreeMap::new();
    for &i in &m.sources {
        for &j in &m.sinks {
            let key = (n.vertices[l.vertex(i)].id.clone(), n.vertices[l.vertex(j)].id.clone());
            out.insert(key, m.get(i, j).unwrap().clone());
        }
    }
    out
}

#[test]
fn cut_moves_follow_lambda_rules() {
    let n = fixtures::pergrann().with_weights(&fixtures::pergrann_values());
    let m = measurement::measurement_matrix(&n).unwrap();
    for c in [Circle::Inner, Circle::Outer] {
        let moved = network::move_cut_base(&n, c).unwrap();
        let want = measurement::cut_move_rule(&m, c).unwrap();
        assert_eq!(measurement::measurement_matrix(&moved).unwrap(), want, "{c:?}");
    }
}

#[test]
fn reversals_invert_lambda() {
    let n = fixtures::pergrann().with_weights(&fixtures::pergrann_values());
    let base = by_id(&n);
    for r in [network::reverse_cut(&n).unwrap(), network::reverse_orientation(&n)] {
        let flipped = by_id(&r);
        assert_eq!(flipped.len(), base.len());
        for (k, v) in &base {
            assert_eq!(&flipped[k].invert_var(), v, "{k:?}");
        }
    }
}

#[test]
fn gauge_leaves_measurements() {
    let n = fixtures::pergrann().with_weights(&fixtures::pergrann_values());
    let mut g = network::GaugeAssignment::new();
    for (v, q) in [("v1", frac(3, 2)), ("v2", frac(-5, 7)), ("v3", frac(2, 9)), ("v5", frac(11, 4))] {
        g.insert(v.to_string(), q);
    }
    let h = network::gauge_transform(&n, &g).unwrap();
    assert_ne!(h.numeric_weights().unwrap(), n.numeric_weights().unwrap());
    assert_eq!(measurement::measurement_matrix(&h).unwrap(), measurement::measurement_matrix(&n).unwrap());
}

#[test]
fn cut_move_path_factors() {
    let n = fixtures::pergrann();
    let moved = network::move_cut_base(&n, Circle::Inner).unwrap();
    let lam = RatLambda::lambda();
    for (p, factor, want) in [("e1,e2,e3,e4", -lam.clone(), "-L*w1*w2*w3*w4"), ("e7,e8,e3,e4", lam, "w3*w4*w7*w8")] {
        let path = measurement::parse_path(&n, &ids(p)).unwrap();
        assert_eq!(measurement::cut_move_path_factor(&n, Circle::Inner, &path).unwrap(), factor, "{p}");
        let (v, s) = measurement::path_weight_symbolic(&moved, &ids(p)).unwrap();
        assert_eq!(v, mono(&s, want), "{p}: got {}", s.format(&v));
    }
    for net in [n, moved] {
        for which in [Circle::Inner, Circle::Outer] {
            let (checked, agree) = measurement::cut_move_path_check(&net, which, 10).unwrap();
            assert!(checked > 0);
            assert_eq!(checked, agree, "{which:?}");
        }
    }
}
