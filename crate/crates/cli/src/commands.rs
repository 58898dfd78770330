use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use annulus_core::arith::{fmt_scalar, frac, parse_scalar, RatLambda, Scalar};
use annulus_core::geometry::Circle;
use annulus_core::grassmann::{
    chart_consistency, check_pathrev, cut_free_paths, extended_matrix, reverse_path, subsets, PathReversal,
    PluckerRatio,
};
use annulus_core::measurement::{
    boundary_measurement, cut_move_rule, measurement_matrix, oracle_table, parse_path, symbolic_matrix,
    MeasurementMatrix,
};
use annulus_core::network::{
    face_weights, find_connecting_trail, label_boundary, move_cut_base, reverse_cut, trail_weight, validate, Network,
};
use annulus_core::par::Exec;
use annulus_core::poisson::{measurement_bracket, sklyanin_check, Checker, Formula, PoissonParams};
use annulus_core::realize::{realize, RationalMatrixSpec};
use annulus_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{read_input, write_file, Fail, Report};
use crate::{Opts, Which};

type Point2 = (Scalar, Scalar);

const PSRE_POINTS: usize = 5;
const SKLYANIN_POINTS: usize = 3;
const PATHREV_POINTS: usize = 5;
const CHART_POINTS: usize = 2;
const CHART_RATIOS: usize = 3;

/// Runs one subcommand; `Ok(false)` means a check failed.
pub fn run(name: &'static str, file: &Path, which: Option<Which>, opts: &Opts) -> Result<bool, Fail> {
    let (text, hash) = read_input(file)?;
    let makes_network = matches!(name, "move-cut" | "reverse-cut" | "reverse-path" | "realize");
    let report =
        Report { command: name, input_sha256: hash, target: if makes_network { None } else { opts.output.clone() } };
    if name == "realize" {
        return run_realize(&text, &report, opts);
    }
    let n = Network::from_json(&text)?;
    if name == "validate" {
        let problems = validate(&n);
        report.document(json!(problems))?;
        return Ok(problems.is_empty());
    }
    let problems = validate(&n);
    if !problems.is_empty() {
        return Err(Fail(format!("invalid network: {}", problems.join("; "))));
    }
    match name {
        "measure" => measure(&n, &report, opts),
        "matrix" => matrix(&n, &report, opts),
        "faces" => faces(&n, &report),
        "trail" => trail(&n, &report, opts),
        "move-cut" => move_cut(&n, &report, opts, which.unwrap_or(Which::Outer)),
        "reverse-cut" => reverse_cut_cmd(&n, &report, opts),
        "bracket" => bracket(&n, &report, opts),
        "psre-check" => psre(&n, &report, opts, Formula::Psre),
        "psre2-check" => psre(&n, &report, opts, Formula::Psre2),
        "sklyanin-check" => sklyanin(&n, &report, opts),
        "plucker" => plucker(&n, &report, opts),
        "reverse-path" => reverse_path_cmd(&n, &report, opts),
        "pathrev-check" => pathrev(&n, &report, opts),
        "chart-check" => chart(&n, &report, opts),
        "oracle" => oracle(&n, &report, opts),
        _ => Err(Fail(format!("unknown command {name}"))),
    }
}

fn scalar(q: &Scalar) -> Value {
    json!(fmt_scalar(q))
}

fn rational(f: &RatLambda) -> Value {
    json!({ "value": f.to_list_string(), "display": f.to_string() })
}

fn network_value(n: &Network) -> Value {
    serde_json::from_str(&n.to_json()).expect("network json")
}

/// Writes the network to `-o` or embeds it in the report.
fn place_network(n: &Network, opts: &Opts, out: &mut serde_json::Map<String, Value>) -> Result<(), Fail> {
    match &opts.output {
        Some(p) => {
            write_file(p, &(n.to_json() + "\n"))?;
            out.insert("output".into(), json!(p.display().to_string()));
        }
        None => {
            out.insert("network".into(), network_value(n));
        }
    }
    Ok(())
}

fn params(opts: &Opts) -> Result<PoissonParams, Fail> {
    match &opts.params {
        Some(s) => Ok(PoissonParams::parse(s)?),
        None => Ok(PoissonParams::poi1()),
    }
}

fn parse_at(opts: &Opts) -> Result<Option<Vec<Scalar>>, Fail> {
    let Some(s) = &opts.at else { return Ok(None) };
    let v: Vec<Scalar> = s.split(',').map(|x| parse_scalar(x.trim())).collect::<Result<_, _>>()?;
    if v.is_empty() || v.len() > 2 {
        return Err(Fail("--at takes t or t,s".into()));
    }
    Ok(Some(v))
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let (p, q) = (rng.gen_range(-9i64..=9), rng.gen_range(1i64..=7));
        let x = frac(p, q);
        if p != 0 && x != frac(1, 1) && x != frac(-1, 1) {
            return x;
        }
    }
}

/// Points from `--at`, or an endless seeded stream of distinct pairs.
fn point_stream(opts: &Opts) -> Result<Box<dyn Iterator<Item = Point2>>, Fail> {
    if let Some(v) = parse_at(opts)? {
        let s = v.get(1).cloned().unwrap_or_else(|| v[0].clone());
        return Ok(Box::new(std::iter::once((v[0].clone(), s))));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    Ok(Box::new(std::iter::from_fn(move || loop {
        let (t, s) = (random_scalar(&mut rng), random_scalar(&mut rng));
        if t != s && t != -s.clone() {
            return Some((t, s));
        }
    })))
}

fn unlucky(e: &Error) -> bool {
    matches!(e, Error::Pole | Error::DivisionByZero | Error::NonGenericWeights(_) | Error::Precondition(_))
}

/// Runs `f` on `count` points, skipping sampled points where it hits a
/// pole. With `--at` the single given point is used and errors surface.
fn sampled<R>(
    opts: &Opts,
    count: usize,
    mut f: impl FnMut(&Point2) -> Result<R, Error>,
) -> Result<Vec<(Point2, R)>, Fail> {
    let fixed = opts.at.is_some();
    let mut out = Vec::new();
    for (tries, p) in point_stream(opts)?.enumerate() {
        if out.len() == count || tries >= 20 * count {
            break;
        }
        match f(&p) {
            Ok(r) => out.push((p, r)),
            Err(e) if !fixed && unlucky(&e) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    if out.is_empty() {
        return Err(Fail("no usable sample point".into()));
    }
    Ok(out)
}

fn one_point(opts: &Opts) -> Result<Point2, Fail> {
    Ok(point_stream(opts)?.next().expect("nonempty"))
}

fn entry(opts: &Opts) -> Result<(usize, usize), Fail> {
    match (opts.source.first(), opts.sink.first()) {
        (Some(&i), Some(&j)) => Ok((i, j)),
        _ => Err(Fail("needs --source and --sink".into())),
    }
}

fn edge_path(n: &Network, opts: &Opts) -> Result<Option<Vec<usize>>, Fail> {
    if opts.path.is_empty() {
        return Ok(None);
    }
    Ok(Some(parse_path(n, &opts.path)?))
}

fn edge_ids(n: &Network, path: &[usize]) -> Vec<String> {
    path.iter().map(|&e| n.edges[e].id.clone()).collect()
}

fn is_symbolic(n: &Network) -> bool {
    !n.symbols().is_empty()
}

fn measure(n: &Network, report: &Report, opts: &Opts) -> Result<bool, Fail> {
    let (i, j) = entry(opts)?;
    let mut out = json!({ "source": i, "sink": j });
    if is_symbolic(n) {
        let (m, s) = symbolic_matrix(n)?;
        let v = m.get(i, j).ok_or_else(|| Fail(format!("({i}, {j}) is not a source/sink pair")))?;
        out["value"] = json!(s.format(v));
    } else {
        let v = boundary_measurement(n, i, j)?;
        out["value"] = rational(&v);
        if let Some(at) = parse_at(opts)? {
            out["at"] = json!({ "t": scalar(&at[0]), "value": scalar(&v.eval(&at[0])?) });
        }
    }
    report.document(out)?;
    Ok(true)
}

fn matrix_value(m: &MeasurementMatrix) -> Value {
    let rows: Vec<Vec<String>> = (0..m.entries.rows())
        .map(|r| (0..m.entries.cols()).map(|c| m.entries.get(r, c).to_list_string()).collect())
        .collect();
    json!({ "sources": m.sources, "sinks": m.sinks, "n1": m.n1, "entries": rows })
}

fn matrix(n: &Network, report: &Report, opts: &Opts) -> Result<bool, Fail> {
    if is_symbolic(n) {
        let (m, s) = symbolic_matrix(n)?;
        let rows: Vec<Vec<String>> = (0..m.entries.rows())
            .map(|r| (0..m.entries.cols()).map(|c| s.format(m.entries.get(r, c))).collect())
            .collect();
        report.document(json!({ "sources": m.sources, "sinks": m.sinks, "n1": m.n1, "entries": rows }))?;
        return Ok(true);
    }
    let m = measurement_matrix(n)?;
    let mut out = matrix_value(&m);
    if let Some(at) = parse_at(opts)? {
        let t = &at[0];
        let rows = (0..m.entries.rows())
            .map(|r| (0..m.entries.cols()).map(|c| Ok(fmt_scalar(&m.entries.get(r, c).eval(t)?))).collect())
            .collect::<Result<Vec<Vec<String>>, Error>>()?;
        out["at"] = json!({ "t": scalar(t), "entries": rows });
    }
    report.document(out)?;
    Ok(true)
}

fn faces(n: &Network, report: &Report) -> Result<bool, Fail> {
    let fs = face_weights(n)?;
    let product = fs.iter().fold(frac(1, 1), |acc, f| acc * f.weight.clone());
    report.document(json!({ "faces": fs, "product": scalar(&product) }))?;
    Ok(true)
}

fn trail(n: &Network, report: &Report, opts: &Opts) -> Result<bool, Fail> {
    let ids = if opts.path.is_empty() {
        find_connecting_trail(n).ok_or_else(|| Fail("no trail joins the two boundary circles".into()))?
    } else {
        opts.path.clone()
    };
    let w = trail_weight(n, &ids)?;
    report.document(json!({ "trail": ids, "weight": scalar(&w) }))?;
    Ok(true)
}

fn numeric(n: &Network) -> bool {
    n.numeric_weights().is_ok()
}

fn move_cut(n: &Network, report: &Report, opts: &Opts, which: Which) -> Result<bool, Fail> {
    let circle = match which {
        Which::Inner => Circle::Inner,
        Which::Outer => Circle::Outer,
    };
    let moved = move_cut_base(n, circle)?;
    let mut out = serde_json::Map::new();
    out.insert("circle".into(), json!(format!("{which:?}").to_lowercase()));
    let mut ok = true;
    if numeric(n) {
        let predicted = cut_move_rule(&measurement_matrix(n)?, circle)?;
        ok = predicted == measurement_matrix(&moved)?;
        out.insert("measurement_law".into(), json!({ "pass": ok }));
    }
    place_network(&moved, opts, &mut out)?;
    report.document(Value::Object(out))?;
    Ok(ok)
}

fn by_ids(n: &Network) -> Result<BTreeMap<(String, String), RatLambda>, Fail> {
    let m = measurement_matrix(n)?;
    let l = label_boundary(n);
    let mut out = BTreeMap::new();
    for (r, &i) in m.sources.iter().enumerate() {
        for (c, &j) in m.sinks.iter().enumerate() {
            let key = (n.vertices[l.vertex(i)].id.clone(), n.vertices[l.vertex(j)].id.clone());
            out.insert(key, m.entries.get(r, c).clone());
        }
    }
    Ok(out)
}

fn reverse_cut_cmd(n: &Network, report: &Report, opts: &Opts) -> Result<bool, Fail> {
    let r = reverse_cut(n)?;
    let mut out = serde_json::Map::new();
    let mut ok = true;
    if numeric(n) {
        let (a, b) = (by_ids(n)?, by_ids(&r)?);
        ok = a.len() == b.len() && a.iter().all(|(k, v)| b.get(k).map(|w| w.invert_var()) == Some(v.clone()));
        out.insert("inverts_lambda".into(), json!({ "pass": ok }));
    }
    place_network(&r, opts, &mut out)?;
    report.document(Value::Object(out))?;
    Ok(ok)
}

fn bracket(n: &Network, report: &Report, opts: &Opts) -> Result<bool, Fail> {
    let (i, j) = entry(opts)?;
    let a = (i, j);
    let b = (*opts.source.get(1).unwrap_or(&i), *opts.sink.get(1).unwrap_or(&j));
    let p = params(opts)?;
    let (t, s) = one_point(opts)?;
    let v = measurement_bracket(n, &p, a, b, &t, &s)?;
    report.document(json!({
        "a": a, "b": b, "t": scalar(&t), "s": scalar(&s),
        "alpha": scalar(&p.alpha()), "beta": scalar(&p.beta()),
        "bracket": scalar(&v),
    }))?;
    Ok(true)
}

fn pairs_to_check(opts: &Opts, all: &[(usize, usize)]) -> Vec<((usize, usize), (usize, usize))> {
    if let (Some(&i), Some(&j)) = (opts.source.first(), opts.sink.first()) {
        let b = (*opts.source.get(1).unwrap_or(&i), *opts.sink.get(1).unwrap_or(&j));
        return vec![((i, j), b)];
    }
    all.iter().flat_map(|&a| all.iter().map(move |&b| (a, b))).collect()
}

fn psre(n: &Network, report: &Report, opts: &Opts, formula: Formula) -> Result<bool, Fail> {
    let runs = sampled(opts, PSRE_POINTS, |p| Checker::new(formula, n, std::slice::from_ref(p), Exec::Auto))?;
    let all = runs[0].1.pairs();
    let todo = pairs_to_check(opts, &all);
    if let Some((a, b)) = todo.iter().find(|(a, b)| !all.contains(a) || !all.contains(b)) {
        return Err(Fail(format!("{a:?} or {b:?} is not a source/sink pair")));
    }
    let mut records = Vec::new();
    for (_, ch) in &runs {
        for &(a, b) in &todo {
            match ch.check(a, b) {
                Ok(v) => records.extend(v.iter().map(|o| {
                    let mut r = serde_json::to_value(o).expect("json");
                    r["case"] = json!(o.reduction.case.tag.to_string());
                    r
                })),
                Err(Error::CaseReductionFailed(why)) => {
                    records.push(json!({ "a": a, "b": b, "skipped": why }));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let pts: Vec<Value> = runs.iter().map(|((t, s), _)| json!([fmt_scalar(t), fmt_scalar(s)])).collect();
    report.lines(json!({ "seed": opts.seed, "points": pts }), &records)
}

fn sklyanin(n: &Network, report: &Report, opts: &Opts) -> Result<bool, Fail> {
    let runs = sampled(opts, SKLYANIN_POINTS, |p| sklyanin_check(n, std::slice::from_ref(p), Exec::Auto))?;
    let records: Vec<Value> =
        runs.iter().flat_map(|(_, v)| v.iter().map(|o| serde_json::to_value(o).expect("json"))).collect();
    report.lines(json!({ "seed": opts.seed, "alpha": "1", "beta": "-1" }), &records)
}

fn plucker(n: &Network, report: &Report, opts: &Opts) -> Result<bool, Fail> {
    let x = extended_matrix(n)?;
    let sets = if opts.set.is_empty() { subsets(x.n(), x.k()) } else { vec![opts.set.clone()] };
    let at = parse_at(opts)?;
    let mut rows = Vec::new();
    for k in sets {
        let v = x.plucker(&k)?;
        let mut r = json!({ "set": k, "value": rational(&v) });
        if let Some(at) = &at {
            r["at"] = json!({ "t": scalar(&at[0]), "value": scalar(&v.eval(&at[0])?) });
        }
        rows.push(r);
    }
    report.document(json!({ "k": x.k(), "n": x.n(), "coordinates": rows }))?;
    Ok(true)
}

fn reverse_path_cmd(n: &Network, report: &Report, opts: &Opts) -> Result<bool, Fail> {
    let path = edge_path(n, opts)?.ok_or_else(|| Fail("needs --path".into()))?;
    let rec = PathReversal::new(n, &path)?;
    let r = reverse_path(n, &path)?;
    let mut out = serde_json::Map::new();
    out.insert("path".into(), json!(edge_ids(n, &path)));
    out.insert("source".into(), json!(rec.source));
    out.insert("sink".into(), json!(rec.sink));
    out.insert("t_sign".into(), json!(rec.t_sign));
    place_network(&r, opts, &mut out)?;
    report.document(Value::Object(out))?;
    Ok(true)
}

fn paths(n: &Network, opts: &Opts, limit: usize) -> Result<Vec<Vec<usize>>, Fail> {
    let ps = match edge_path(n, opts)? {
        Some(p) => vec![p],
        None => cut_free_paths(n, limit),
    };
    if ps.is_empty() {
        return Err(Fail("no source-to-sink path avoids the cut".into()));
    }
    Ok(ps)
}

fn pathrev(n: &Network, report: &Report, opts: &Opts) -> Result<bool, Fail> {
    let l = label_boundary(n);
    let ks = if opts.set.is_empty() { subsets(l.n(), l.k()) } else { vec![opts.set.clone()] };
    let mut records = Vec::new();
    for path in paths(n, opts, 3)? {
        let ids = edge_ids(n, &path);
        let runs = sampled(opts, PATHREV_POINTS, |(t, _)| check_pathrev(n, &path, &ks, t, Exec::Auto))?;
        for ((t, _), outcomes) in runs {
            for o in outcomes {
                let mut r = serde_json::to_value(&o).expect("json");
                r["path"] = json!(ids);
                r["t"] = scalar(&t);
                records.push(r);
            }
        }
    }
    report.lines(json!({ "seed": opts.seed }), &records)
}

fn chart(n: &Network, report: &Report, opts: &Opts) -> Result<bool, Fail> {
    let p = params(opts)?;
    let l = label_boundary(n);
    let ks = subsets(l.n(), l.k());
    if ks.len() < 2 {
        return Err(Fail("too few Plücker coordinates for a ratio".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pick = move || {
        let a = rng.gen_range(0..ks.len());
        let b = (a + rng.gen_range(1..ks.len())) % ks.len();
        PluckerRatio { num: ks[a].clone(), den: ks[b].clone() }
    };
    let mut records = Vec::new();
    for path in paths(n, opts, 2)? {
        let ids = edge_ids(n, &path);
        let mut found = 0;
        for _ in 0..10 * CHART_RATIOS {
            if found == CHART_RATIOS {
                break;
            }
            let (f, g) = (pick(), pick());
            let Ok(runs) =
                sampled(opts, CHART_POINTS, |(t, s)| chart_consistency(n, &path, &p, &f, &g, t, s, Exec::Auto))
            else {
                continue;
            };
            found += 1;
            for ((t, s), o) in runs {
                let mut r = serde_json::to_value(&o).expect("json");
                r["path"] = json!(ids);
                r["f"] = json!(f);
                r["g"] = json!(g);
                r["t"] = scalar(&t);
                r["s"] = scalar(&s);
                records.push(r);
            }
        }
    }
    report.lines(json!({ "seed": opts.seed, "alpha": scalar(&p.alpha()), "beta": scalar(&p.beta()) }), &records)
}

fn oracle(n: &Network, report: &Report, opts: &Opts) -> Result<bool, Fail> {
    let (i, j) = entry(opts)?;
    let max = opts.maxlen.unwrap_or(n.edges.len());
    let runs = sampled(opts, 1, |(t, _)| oracle_table(n, i, j, max, t, Exec::Auto))?;
    let ((t, _), rows) = runs.into_iter().next().expect("one point");
    report.document(json!({ "source": i, "sink": j, "t": scalar(&t), "rows": rows }))?;
    Ok(true)
}

fn provenance_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".provenance.json");
    PathBuf::from(s)
}

fn run_realize(text: &str, report: &Report, opts: &Opts) -> Result<bool, Fail> {
    let spec = RationalMatrixSpec::from_json(text)?;
    let r = realize(&spec)?;
    let mut out = serde_json::Map::new();
    out.insert("k".into(), json!(spec.k));
    out.insert("m".into(), json!(spec.m));
    out.insert("vertices".into(), json!(r.network.vertices.len()));
    out.insert("edges".into(), json!(r.network.edges.len()));
    out.insert("crossings_resolved".into(), json!(r.crossings_resolved));
    out.insert("provenance".into(), json!(r.provenance));
    if let Some(p) = &opts.output {
        let log = json!({ "input_sha256": report.input_sha256, "steps": r.provenance });
        let lp = provenance_path(p);
        write_file(&lp, &(serde_json::to_string_pretty(&log).expect("json") + "\n"))?;
        out.insert("provenance_log".into(), json!(lp.display().to_string()));
    }
    place_network(&r.network, opts, &mut out)?;
    report.document(Value::Object(out))?;
    Ok(true)
}
