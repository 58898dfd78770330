use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use annulus_core::arith::{frac, int, Field, Matrix, Poly, RatLambda, Scalar, SymFrac};
use annulus_core::geometry::Circle;
use annulus_core::grassmann::{
    chart_consistency, check_pathrev, cut_free_paths, reverse_path, reversed_path, subsets, PathReversal, PluckerRatio,
};
use annulus_core::measurement::{self, Symbolic};
use annulus_core::network::{
    face_weights, find_connecting_trail, fixtures, gauge_transform, label_boundary, move_cut_base, random_network,
    trail_weight, validate, GaugeAssignment, Network, RandomSpec,
};
use annulus_core::par::Exec;
use annulus_core::poisson::{sklyanin_check, BracketData, CaseTag, Checker, Formula, PoissonParams};
use annulus_core::realize::{concat, make_identity_network, realize, realize_matrix, RationalMatrixSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ids(s: &str) -> Vec<String> {
    s.split(',').map(String::from).collect()
}

fn pergrann() -> Network {
    fixtures::pergrann().with_weights(&fixtures::pergrann_values())
}

fn random(internal: usize, acyclic: bool, seed: u64) -> Network {
    random_network(RandomSpec { internal, acyclic, seed })
}

fn points(n: usize) -> Vec<(Scalar, Scalar)> {
    (0..n as i64).map(|k| (frac(2 + k, 3 + 2 * k), frac(-5 - 3 * k, 7 + k))).collect()
}

fn nonzero(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let n: i64 = rng.gen_range(-9..=9);
        if n != 0 {
            return frac(n, rng.gen_range(1..=7));
        }
    }
}

// a product like "-L^-1*w1*w3^2" over the symbols of `s`
fn mono(s: &Symbolic, text: &str) -> SymFrac {
    let (neg, body) = match text.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, text),
    };
    let acc = body.split('*').fold(SymFrac::one(), |acc, f| {
        let (name, exp) = f.split_once('^').map_or((f, 1), |(n, e)| (n, e.parse::<i64>().unwrap()));
        let idx = if name == "L" { 0 } else { s.names.iter().position(|x| x == name).unwrap() };
        acc * SymFrac::var(idx).powi(exp).unwrap()
    });
    if neg {
        -acc
    } else {
        acc
    }
}

fn fixture_path_weights() -> String {
    let n = fixtures::pergrann();
    let cases = [
        ("e1,e2,e3,e4", "w1*w2*w3*w4"),
        ("e7,e8,e3,e4", "L^-1*w3*w4*w7*w8"),
        ("e1,e2,e3,e5,e6,e8,e3,e4", "-L^-1*w1*w2*w3^2*w4*w5*w6*w8"),
    ];
    for (p, want) in cases {
        let (v, s) = measurement::path_weight_symbolic(&n, &ids(p)).unwrap();
        assert_eq!(v, mono(&s, want), "{p}: got {}", s.format(&v));
    }
    format!("{} paths", cases.len())
}

fn moved_measurement() -> String {
    let n = move_cut_base(&fixtures::pergrann(), Circle::Inner).unwrap();
    let (m, s) = measurement::symbolic_matrix(&n).unwrap();
    let num = mono(&s, "w1*w3*w4") * (mono(&s, "w6*w8*w9") - mono(&s, "L*w2"));
    let den = SymFrac::one() + mono(&s, "L^-1*w3*w5*w6*w8");
    let got = m.get(1, 2).unwrap();
    assert_eq!(*got, num.checked_div(&den).unwrap(), "got {}", s.format(got));
    s.format(got)
}

fn cut_moves() -> String {
    let moved = move_cut_base(&pergrann(), Circle::Inner).unwrap();
    let mut nets = vec![pergrann(), moved];
    // both circles need a boundary vertex for the base points to move
    let both = |n: &Network| {
        let l = label_boundary(n);
        l.n1 > 0 && l.n() > l.n1
    };
    nets.extend((0..).map(|seed| random(6, seed % 2 == 0, seed)).filter(both).take(4));
    let (mut paths, mut matrices) = (0, 0);
    for n in &nets {
        let m = measurement::measurement_matrix(n).unwrap();
        for c in [Circle::Inner, Circle::Outer] {
            let (checked, agree) = measurement::cut_move_path_check(n, c, n.edges.len() + 2).unwrap();
            assert_eq!(checked, agree, "{c:?}");
            paths += checked;
            let after = measurement::measurement_matrix(&move_cut_base(n, c).unwrap()).unwrap();
            assert_eq!(after, measurement::cut_move_rule(&m, c).unwrap(), "{c:?}");
            matrices += 1;
        }
    }
    format!("{} networks, {paths} paths, {matrices} matrices", nets.len())
}

// natural log of |q| to within ln 2, safe for tiny values
fn log_abs(q: &Scalar) -> f64 {
    (q.numer().bits() as f64 - q.denom().bits() as f64) * std::f64::consts::LN_2
}

// exp of the least-squares slope of ln|e_L| against L
fn decay_ratio(errs: &[(usize, Scalar)]) -> f64 {
    let pts: Vec<(f64, f64)> =
        errs.iter().filter(|(_, e)| !Field::is_zero(e)).map(|(l, e)| (*l as f64, log_abs(e))).collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (sxy / sxx).exp()
}

fn oracle() -> String {
    let t = int(1);
    let (mut exact_pairs, mut decaying, mut worst) = (0, 0, 0.0f64);
    for seed in 0..12u64 {
        let acyclic = seed % 2 == 0;
        let n = measurement::rescaled_for_series(&random(8, acyclic, seed)).unwrap();
        let l = label_boundary(&n);
        let e = n.edges.len();
        let max = if acyclic { e } else { e + 10 };
        for &i in &l.sources {
            for &j in &l.sinks {
                let exact = measurement::boundary_measurement(&n, i, j).unwrap().eval(&t).unwrap();
                // partial sums by path length, from one enumeration at the largest length
                let mut by_len = vec![Scalar::zero(); max + 1];
                for term in measurement::series_terms(&n, i, j, max).unwrap() {
                    let v = term.monomial * t.powi(term.lambda_power).unwrap();
                    by_len[term.edges.len()] += if term.sign < 0 { -v } else { v };
                }
                let mut acc = Scalar::zero();
                let errs: Vec<(usize, Scalar)> = (1..=max)
                    .map(|len| {
                        acc += by_len[len].clone();
                        (len, exact.clone() - acc.clone())
                    })
                    .collect();
                assert_eq!(exact.clone() - measurement::series_oracle(&n, i, j, e, &t).unwrap(), errs[e - 1].1);
                let last = &errs.last().unwrap().1;
                if acyclic || Field::is_zero(last) {
                    assert!(Field::is_zero(&errs[e - 1].1), "seed {seed}, M({i},{j}) at L = |E|");
                    exact_pairs += 1;
                } else {
                    let rho = decay_ratio(&errs[e / 2..]);
                    assert!(rho < 1.0, "seed {seed}, M({i},{j}): ratio {rho}");
                    decaying += 1;
                    worst = worst.max(rho);
                }
            }
        }
    }
    assert!(decaying > 0);
    format!("12 networks, {exact_pairs} exact pairs, {decaying} decaying pairs, worst ratio {worst:.3}")
}

fn faces_and_gauges() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut trails = 0;
    for seed in 0..20u64 {
        let n = random(8, seed % 3 == 0, 100 + seed);
        let m = measurement::measurement_matrix(&n).unwrap();
        let faces = face_weights(&n).unwrap();
        let prod = faces.iter().fold(Scalar::one(), |acc, f| acc * f.weight.clone());
        assert_eq!(prod, int(1), "seed {seed}");
        let trail = find_connecting_trail(&n);
        let y = trail.as_ref().map(|t| trail_weight(&n, t).unwrap());
        trails += trail.is_some() as usize;
        let internal: Vec<String> = n.vertices.iter().filter(|v| !v.kind.is_boundary()).map(|v| v.id.clone()).collect();
        for _ in 0..20 {
            let g: GaugeAssignment = internal.iter().map(|v| (v.clone(), nonzero(&mut rng))).collect();
            let h = gauge_transform(&n, &g).unwrap();
            assert_eq!(measurement::measurement_matrix(&h).unwrap(), m, "seed {seed}");
            let hf = face_weights(&h).unwrap();
            assert!(faces.iter().zip(&hf).all(|(a, b)| a.id == b.id && a.weight == b.weight), "seed {seed}");
            if let Some(t) = &trail {
                assert_eq!(Some(trail_weight(&h, t).unwrap()), y, "seed {seed}");
            }
        }
    }
    format!("20 networks x 20 gauges, {trails} with a connecting trail")
}

fn bracket_nets() -> Vec<Network> {
    let mut v = vec![pergrann()];
    for seed in [0, 3, 4, 6, 7, 9, 10, 12] {
        v.push(random(6 + (seed % 5) as usize, seed % 3 == 0, seed));
    }
    v
}

fn all_tags(formula: Formula) -> Vec<(u8, u8)> {
    match formula {
        Formula::Psre => vec![(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)],
        _ => vec![(1, 1), (1, 2), (1, 3), (1, 4), (1, 5), (2, 1), (2, 2), (3, 1), (3, 2)],
    }
}

fn brackets() -> String {
    let pts = points(5);
    let nets = bracket_nets();
    let mut summary = Vec::new();
    for formula in [Formula::Psre, Formula::Psre2] {
        let mut reached: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        for (k, n) in nets.iter().enumerate() {
            let ch = Checker::new(formula, n, &pts, Exec::Auto).unwrap();
            let pairs = ch.pairs();
            for &(c, br) in &all_tags(formula) {
                let accept = move |t: &CaseTag| t.case == c && t.branch == br;
                let mut hits = 0;
                'pairs: for &a in &pairs {
                    for &b in &pairs {
                        let Ok(v) = ch.check_where(a, b, &accept) else { continue };
                        for o in &v {
                            assert!(o.pass, "{} {a:?} {b:?} at ({}, {})", o.reduction.case.tag, o.t, o.s);
                        }
                        reached.entry(v[0].reduction.case.tag.to_string()).or_default().insert(k);
                        hits += 1;
                        if hits == 6 {
                            break 'pairs;
                        }
                    }
                }
            }
        }
        assert_eq!(reached.len(), all_tags(formula).len(), "{formula:?}: {reached:?}");
        for (tag, on) in &reached {
            assert!(on.len() >= 2, "{tag} reached on {on:?}");
        }
        summary.push(format!("{formula:?} {} cases", reached.len()));
    }
    let mut overlaps = 0;
    for n in &nets {
        let ch = Checker::new(Formula::Psre, n, &pts, Exec::Auto).unwrap();
        let n1 = ch.labels().n1;
        for a in ch.pairs() {
            for b in ch.pairs() {
                let ((ip, jq), (ipb, jqb)) = (a, b);
                if !(ip < ipb && ipb <= n1 && n1 < jqb && jqb < jq) {
                    continue;
                }
                let one = ch.check_where(a, b, &|t: &CaseTag| t.case == 1).unwrap();
                let two = ch.check_where(a, b, &|t: &CaseTag| t.case == 2).unwrap();
                for (x, y) in one.iter().zip(&two) {
                    assert_eq!(x.reference, y.reference, "overlap {a:?} {b:?}");
                    assert!(x.pass && y.pass);
                }
                overlaps += 1;
            }
        }
    }
    assert!(overlaps > 0);
    format!("{}, {overlaps} overlap pairs", summary.join(", "))
}

fn alpha_beta() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pts = points(5);
    let mut compared = 0;
    for n in bracket_nets().into_iter().take(4) {
        let p = PoissonParams::new(std::array::from_fn(|_| frac(rng.gen_range(-5..=5), rng.gen_range(1..=3))));
        // shifts that leave α and β alone
        let h = nonzero(&mut rng);
        let q = PoissonParams {
            a12: p.a12.clone() + h.clone(),
            a13: p.a13.clone() + h.clone(),
            a23: p.a23.clone(),
            b12: p.b12.clone() - h.clone(),
            b13: p.b13.clone(),
            b23: p.b23.clone() - h.clone(),
        };
        assert_eq!((p.alpha(), p.beta()), (q.alpha(), q.beta()));
        assert_ne!(p, q);
        let l = label_boundary(&n);
        let pairs: Vec<_> = l.sources.iter().flat_map(|&i| l.sinks.iter().map(move |&j| (i, j))).collect();
        for (t, s) in &pts {
            let dp = BracketData::new(&n, &p, t, s, Exec::Auto).unwrap();
            let dq = BracketData::new(&n, &q, t, s, Exec::Auto).unwrap();
            for &a in &pairs {
                for &b in &pairs {
                    assert_eq!(dp.bracket(a, b).unwrap(), dq.bracket(a, b).unwrap(), "{a:?} {b:?}");
                    compared += 1;
                }
            }
        }
    }
    format!("{compared} brackets on 4 networks")
}

fn rat(num: &[i64], den: &[i64]) -> RatLambda {
    let p = |c: &[i64]| Poly::new(c.iter().map(|&x| int(x)).collect());
    RatLambda::new(p(num), p(den)).unwrap()
}

fn sklyanin() -> String {
    let f1 = Matrix::from_rows(vec![
        vec![rat(&[2, 1], &[1]), rat(&[3], &[1, -1])],
        vec![rat(&[0, 1], &[1]), rat(&[5], &[1])],
    ])
    .unwrap();
    let f2 =
        Matrix::from_rows(vec![vec![rat(&[1, 1], &[1]), rat(&[0], &[1])], vec![rat(&[2], &[1]), rat(&[-1], &[1])]])
            .unwrap();
    let n = concat(realize_matrix(&f1).unwrap(), realize_matrix(&f2).unwrap()).unwrap().to_network().unwrap();
    assert_eq!(validate(&n), Vec::<String>::new());
    let l = label_boundary(&n);
    assert_eq!((l.k(), l.n1, l.sources.len(), l.sinks.len()), (2, 2, 2, 2));
    let out = sklyanin_check(&n, &points(5), Exec::Auto).unwrap();
    assert_eq!(out.len(), 16 * 5);
    for o in &out {
        assert!(o.pass, "{:?} {:?} at ({}, {}): {} vs {}", o.a, o.b, o.t, o.s, o.chain_rule, o.reference);
    }
    let zeros = out.iter().filter(|o| Field::is_zero(&o.reference)).count();
    format!("{} brackets, {zeros} vanishing", out.len())
}

fn pathrev() -> String {
    let pts: Vec<Scalar> = vec![frac(2, 3), frac(-5, 7), int(3), frac(1, 11), frac(-9, 4)];
    let mut nets = vec![pergrann()];
    nets.extend((0..12u64).map(|seed| random(5 + (seed % 4) as usize, seed % 3 == 0, seed)));
    let (mut used, mut signs, mut checks, mut involutions) = (0, [0usize; 2], 0, 0);
    for n in &nets {
        let l = label_boundary(n);
        if l.n() > 6 {
            continue;
        }
        let ks = subsets(l.n(), l.k());
        let mut any = false;
        for path in cut_free_paths(n, 3) {
            let rec = PathReversal::new(n, &path).unwrap();
            for t in &pts {
                let out = check_pathrev(n, &path, &ks, t, Exec::Auto).unwrap();
                assert_eq!(out.len(), ks.len());
                for o in &out {
                    assert!(o.pass, "{o:?}");
                }
                checks += out.len();
            }
            let back = reverse_path(&reverse_path(n, &path).unwrap(), &reversed_path(&path)).unwrap();
            assert_eq!(&back, n);
            involutions += 1;
            signs[(rec.t_sign < 0) as usize] += 1;
            any = true;
        }
        used += any as usize;
    }
    assert!(used >= 5, "{used} networks");
    assert!(signs[0] > 0 && signs[1] > 0, "{signs:?}");
    format!(
        "{used} networks, {checks} identities, paths with t^P = 1/-1: {}/{}, {involutions} involutions",
        signs[0], signs[1]
    )
}

fn random_entry(rng: &mut ChaCha8Rng) -> RatLambda {
    if rng.gen_bool(0.15) {
        return RatLambda::zero();
    }
    loop {
        let mut poly = || {
            let len = rng.gen_range(1..=4);
            Poly::new((0..len).map(|_| frac(rng.gen_range(-4..5), rng.gen_range(1..4))).collect())
        };
        let (num, den) = (poly(), poly());
        if let Ok(f) = RatLambda::new(num, den) {
            if !Field::is_zero(&f) {
                return f;
            }
        }
    }
}

fn compiler() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut edges = 0;
    for _ in 0..25 {
        let (k, m) = (rng.gen_range(1..=2), rng.gen_range(1..=3));
        let f = Matrix::from_fn(k, m, |_, _| random_entry(&mut rng));
        let r = realize(&RationalMatrixSpec::new(f.clone())).unwrap();
        assert_eq!(validate(&r.network), Vec::<String>::new());
        assert_eq!(measurement::measurement_matrix(&r.network).unwrap().entries, f);
        edges = edges.max(r.network.edges.len());
    }
    let id = make_identity_network().unwrap();
    let m = measurement::measurement_matrix(&id).unwrap();
    assert_eq!((m.sources.clone(), m.sinks.clone()), (vec![1, 2], vec![3, 4]));
    assert_eq!(m.entries, Matrix::identity(2));
    format!("25 matrices, largest {edges} edges, identity network ok")
}

fn charts() -> String {
    let params = [PoissonParams::poi1(), PoissonParams::poi2(), PoissonParams::parse("1,2/3,-1,3,1/2,2").unwrap()];
    let mut nets = vec![pergrann()];
    nets.extend((0..7u64).map(|seed| random(5 + (seed % 4) as usize, seed % 3 == 0, seed)));
    let (mut used, mut checks) = (0, 0);
    for n in &nets {
        let l = label_boundary(n);
        let ks = subsets(l.n(), l.k());
        let mut any = false;
        for path in cut_free_paths(n, 2) {
            let rec = PathReversal::new(n, &path).unwrap();
            // I and I' = I(i -> j) share k - 1 indices
            let i_set: BTreeSet<usize> = l.sources.iter().copied().collect();
            let mut j_set = i_set.clone();
            j_set.remove(&rec.source);
            j_set.insert(rec.sink);
            assert_eq!(i_set.intersection(&j_set).count(), l.k() - 1);
            let mut done = 0;
            for (i, a) in ks.iter().enumerate() {
                let f = PluckerRatio { num: a.clone(), den: ks[(i + 1) % ks.len()].clone() };
                let g =
                    PluckerRatio { num: ks[(i * 7 + 3) % ks.len()].clone(), den: ks[(i * 3 + 2) % ks.len()].clone() };
                let p = &params[i % params.len()];
                let Ok(o) = chart_consistency(n, &path, p, &f, &g, &frac(2, 3), &frac(-5, 7), Exec::Auto) else {
                    continue;
                };
                assert!(o.pass, "{o:?}");
                done += 1;
                if done == 4 {
                    break;
                }
            }
            checks += done;
            any |= done > 0;
        }
        used += any as usize;
    }
    assert!(used >= 3, "{used} networks");
    format!("{used} networks, {checks} ratio brackets")
}

type Criterion = (&'static str, u64, fn() -> String);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("fixture path weights", 1, fixture_path_weights),
        ("measurement after moving the cut", 1, moved_measurement),
        ("cut-move laws", 5, cut_moves),
        ("series oracle", 60, oracle),
        ("faces and gauges", 30, faces_and_gauges),
        ("bracket cases", 120, brackets),
        ("(alpha, beta) dependence", 60, alpha_beta),
        ("Sklyanin bracket", 60, sklyanin),
        ("path reversal", 60, pathrev),
        ("compiler round trip", 300, compiler),
        ("chart consistency", 60, charts),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = panic::catch_unwind(AssertUnwindSafe(run));
        let took = start.elapsed();
        let over = took > Duration::from_secs(*budget);
        let (ok, detail) = match res {
            Ok(d) if !over => (true, d),
            Ok(d) => (false, format!("{d}; over budget")),
            Err(e) => (
                false,
                e.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default(),
            ),
        };
        failed += !ok as usize;
        println!(
            "{} {:>2} {name}: {detail} ({:.2} s of {budget} s)",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            took.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
