use annulus_core::arith::{frac, int, Field, Matrix, Poly, RatLambda, Scalar, SymFrac};
use annulus_core::error::Error;
use annulus_core::measurement::{measurement_matrix, symbolic_matrix, Symbolic};
use annulus_core::network::validate;
use annulus_core::realize::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn poly(c: &[i64]) -> Poly<Scalar> {
    Poly::new(c.iter().map(|&x| int(x)).collect())
}

fn rat(n: &[i64], d: &[i64]) -> RatLambda {
    RatLambda::new(poly(n), poly(d)).unwrap()
}

fn monomial(a: Scalar, d: i64) -> RatLambda {
    RatLambda::laurent_monomial(a, d)
}

fn measure(g: &Gadget) -> Matrix<RatLambda> {
    let n = g.to_network().unwrap();
    assert_eq!(validate(&n), Vec::<String>::new());
    measurement_matrix(&n).unwrap().entries
}

fn scalar_of(g: &Gadget) -> RatLambda {
    let m = measure(g);
    assert_eq!((m.rows(), m.cols()), (1, 1));
    m.get(0, 0).clone()
}

fn random_scalar(rng: &mut ChaCha8Rng, max_deg: usize) -> RatLambda {
    loop {
        let coeffs = |rng: &mut ChaCha8Rng| -> Poly<Scalar> {
            let len = rng.gen_range(1..=max_deg + 1);
            Poly::new((0..len).map(|_| frac(rng.gen_range(-4..5), rng.gen_range(1..4))).collect())
        };
        let num = coeffs(rng);
        let den = coeffs(rng);
        if let Ok(f) = RatLambda::new(num, den) {
            if !Field::is_zero(&f) {
                return f;
            }
        }
    }
}

#[test]
fn monomials_of_both_signs() {
    for d in [-2, -1, 0, 1, 2, 3] {
        let a = frac(3, 2);
        let g = scalar_monomial(&a, d).unwrap();
        assert_eq!(scalar_of(&g), monomial(a, d), "degree {d}");
    }
    assert!(scalar_monomial(&int(0), 1).is_err());
}

#[test]
fn one_is_a_single_edge() {
    let g = realize_scalar(&RatLambda::one()).unwrap();
    let n = g.to_network().unwrap();
    assert_eq!(n.edges.len(), 1);
    assert_eq!(scalar_of(&g), RatLambda::one());
}

#[test]
fn products_by_concatenation() {
    let f = rat(&[1, 2], &[1]);
    let g = rat(&[3], &[0, 1]);
    let c = concat(scalar_monomial(&int(1), 0).unwrap(), realize_scalar(&f).unwrap()).unwrap();
    assert_eq!(scalar_of(&c), f);
    let c = concat(realize_scalar(&f).unwrap(), realize_scalar(&g).unwrap()).unwrap();
    assert_eq!(scalar_of(&c), f * g);
}

#[test]
fn direct_sum_is_antidiagonal_and_ordered() {
    let f1 = monomial(int(2), 1);
    let f2 = monomial(int(5), -1);
    let ab = measure(&direct_sum(realize_scalar(&f1).unwrap(), realize_scalar(&f2).unwrap()).unwrap());
    let ba = measure(&direct_sum(realize_scalar(&f2).unwrap(), realize_scalar(&f1).unwrap()).unwrap());
    let zero = RatLambda::zero();
    assert_eq!(ab, Matrix::from_rows(vec![vec![zero.clone(), f1.clone()], vec![f2.clone(), zero.clone()]]).unwrap());
    assert_eq!(ba, Matrix::from_rows(vec![vec![zero.clone(), f2], vec![f1, zero]]).unwrap());
    assert_ne!(ab, ba);
}

#[test]
fn sums() {
    let f = rat(&[1, 1], &[2, 1]);
    assert_eq!(scalar_of(&add(realize_scalar(&f).unwrap(), zero().unwrap()).unwrap()), f);
    let (a, b) = (frac(2, 3), int(-3));
    let g = add(scalar_monomial(&a, 1).unwrap(), scalar_monomial(&b, 2).unwrap()).unwrap();
    assert_eq!(scalar_of(&g), monomial(a, 1) + monomial(b, 2));
    assert_eq!(scalar_of(&zero().unwrap()), RatLambda::zero());
}

#[test]
fn feedback_loops() {
    assert_eq!(scalar_of(&feedback(zero().unwrap(), false).unwrap()), RatLambda::zero());
    let f = monomial(int(2), 1);
    let one = RatLambda::one();
    let want = f.clone() * Field::inv(&(one.clone() + f.clone())).unwrap();
    assert_eq!(scalar_of(&feedback(realize_scalar(&f).unwrap(), false).unwrap()), want);
    assert_eq!(scalar_of(&feedback(realize_scalar(&f).unwrap(), true).unwrap()), -want);
    let r = reciprocal(realize_scalar(&f).unwrap()).unwrap();
    assert_eq!(scalar_of(&r), Field::inv(&(one + f)).unwrap());
    let minus_one = constant(&int(-1)).unwrap();
    assert_eq!(feedback(minus_one, false).unwrap_err(), Error::SingularFeedback);
}

#[test]
fn a_over_one_plus_b_lambda() {
    let f = rat(&[3], &[1, 2]);
    assert_eq!(scalar_of(&realize_scalar(&f).unwrap()), f);
}

#[test]
fn random_scalars_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..6 {
        let f = random_scalar(&mut rng, 3);
        assert_eq!(scalar_of(&realize_scalar(&f).unwrap()), f);
    }
}

#[test]
fn gadget_operations_commute_with_measurement() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3 {
        let f = random_scalar(&mut rng, 1);
        let g = random_scalar(&mut rng, 1);
        let (nf, ng) = (realize_scalar(&f).unwrap(), realize_scalar(&g).unwrap());
        let (mf, mg) = (scalar_of(&nf), scalar_of(&ng));
        assert_eq!(scalar_of(&add(nf.clone(), ng.clone()).unwrap()), mf.clone() + mg.clone());
        assert_eq!(scalar_of(&concat(nf.clone(), ng).unwrap()), mf.clone() * mg);
        let one = RatLambda::one();
        if !Field::is_zero(&(one.clone() + mf.clone())) {
            let want = mf.clone() * Field::inv(&(one + mf)).unwrap();
            assert_eq!(scalar_of(&feedback(nf, false).unwrap()), want);
        }
    }
}

fn relocated(f: &RatLambda, layout: Layout) -> (Vec<usize>, Vec<usize>, RatLambda) {
    let n = relocate_terminals(realize_scalar(f).unwrap(), layout).unwrap().to_network().unwrap();
    assert_eq!(validate(&n), Vec::<String>::new());
    let m = measurement_matrix(&n).unwrap();
    let v = m.entries.get(0, 0).clone();
    (m.sources, m.sinks, v)
}

#[test]
fn relocation_keeps_the_function() {
    let f = rat(&[3], &[1, 2]);
    let base = realize_scalar(&f).unwrap();
    assert_eq!(relocate_terminals(base.clone(), Layout::Separated).unwrap(), base);
    assert_eq!(relocated(&f, Layout::OuterSourceFirst), (vec![1], vec![2], f.clone()));
    assert_eq!(relocated(&f, Layout::OuterSinkFirst), (vec![2], vec![1], f.clone()));
    assert_eq!(relocated(&f, Layout::Swapped), (vec![2], vec![1], f));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for layout in Layout::ALL {
        let f = random_scalar(&mut rng, 2);
        assert_eq!(relocated(&f, layout).2, f, "{layout:?}");
    }
    for layout in Layout::ALL {
        let f = monomial(int(5), 2);
        assert_eq!(relocated(&f, layout).2, f, "{layout:?}");
    }
}

fn mono(s: &Symbolic, names: &[&str]) -> SymFrac {
    names.iter().fold(SymFrac::one(), |acc, n| acc * SymFrac::var(s.names.iter().position(|x| x == n).unwrap()))
}

#[test]
fn identity_network() {
    let n = make_identity_network().unwrap();
    assert_eq!(validate(&n), Vec::<String>::new());
    let m = measurement_matrix(&n).unwrap();
    assert_eq!((m.sources.clone(), m.sinks.clone()), (vec![1, 2], vec![3, 4]));
    assert_eq!(m.entries, Matrix::identity(2));

    let n = identity_network_symbolic().unwrap();
    let (m, s) = symbolic_matrix(&n).unwrap();
    let p = |names: &[&str]| mono(&s, names);
    let want = [
        [
            p(&["w1", "w8", "w3", "w11", "w2"])
                + p(&["w1", "w8", "w3", "w11", "w6", "w9", "w10"])
                + p(&["w1", "w8", "w6", "w7", "w9"]),
            p(&["w1", "w3", "w4", "w2"]) + p(&["w1", "w3", "w4", "w6", "w9", "w10"]),
        ],
        // the first factor is the weight of the edge leaving source 2
        [
            p(&["w5", "w6", "w8", "w7"]) + p(&["w5", "w6", "w8", "w3", "w10", "w11"]),
            p(&["w3", "w4", "w5", "w6", "w10"]),
        ],
    ];
    for (i, row) in want.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            assert_eq!(m.entries.get(i, j), w, "entry ({}, {})", i + 1, j + 1);
        }
    }
}

fn matrix(rows: Vec<Vec<RatLambda>>) -> Matrix<RatLambda> {
    Matrix::from_rows(rows).unwrap()
}

#[test]
fn small_matrices() {
    let cases = vec![
        Matrix::identity(2),
        matrix(vec![vec![monomial(int(1), 1), RatLambda::one()], vec![RatLambda::zero(), rat(&[1], &[1, 1])]]),
        matrix(vec![vec![RatLambda::constant(frac(2, 5)), monomial(int(-3), 1)]]),
        matrix(vec![vec![rat(&[1], &[1, 1])], vec![monomial(int(2), -1)]]),
    ];
    for f in cases {
        let r = realize(&RationalMatrixSpec::new(f.clone())).unwrap();
        let m = measurement_matrix(&r.network).unwrap();
        assert_eq!(m.entries, f);
        assert_eq!(m.sources.len(), f.rows());
        assert!(!r.provenance.is_empty());
    }
}

fn w0(m: usize) -> Matrix<RatLambda> {
    Matrix::from_fn(m, m, |i, j| if i + j + 1 == m { RatLambda::one() } else { RatLambda::zero() })
}

#[test]
fn concatenation_inserts_the_reversal() {
    let a =
        matrix(vec![vec![monomial(int(1), 1), RatLambda::one()], vec![RatLambda::constant(int(2)), RatLambda::zero()]]);
    let b =
        matrix(vec![vec![RatLambda::one(), RatLambda::constant(int(3))], vec![rat(&[1], &[1, 1]), RatLambda::zero()]]);
    let g = concat(realize_matrix(&a).unwrap(), realize_matrix(&b).unwrap()).unwrap();
    let want = a.mul(&w0(2)).unwrap().mul(&b).unwrap();
    assert_eq!(measure(&g), want);
    // with the constant reversal network the columns come out reversed
    let g = concat(realize_matrix(&a).unwrap(), realize_matrix(&w0(2)).unwrap()).unwrap();
    assert_eq!(measure(&g), a);
}

#[test]
fn spec_files() {
    let text = r#"{"k": 1, "m": 2, "entries": [["2/5", "1"], [[0, -3], "1,0"]]}"#;
    let s = RationalMatrixSpec::from_json(text).unwrap();
    assert_eq!(s.entries, matrix(vec![vec![RatLambda::constant(frac(2, 5)), monomial(int(-3), 1)]]));
    assert_eq!(RationalMatrixSpec::from_json(&s.to_json()).unwrap(), s);
    assert!(RationalMatrixSpec::from_json(r#"{"k": 2, "m": 2, "entries": [["1", "1"]]}"#).is_err());
    assert!(RationalMatrixSpec::from_json(r#"{"k": 1, "m": 1, "entries": [["1", "0"]]}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn spec_json_round_trip(
        k in 1usize..3,
        m in 1usize..4,
        coeffs in proptest::collection::vec((proptest::collection::vec(-5i64..6, 1..4), proptest::collection::vec(1i64..6, 1..4)), 6),
    ) {
        let entries = Matrix::from_fn(k, m, |i, j| {
            let (n, d) = &coeffs[i * m + j];
            rat(n, d)
        });
        let s = RationalMatrixSpec::new(entries);
        prop_assert_eq!(RationalMatrixSpec::from_json(&s.to_json()).unwrap(), s);
    }
}
