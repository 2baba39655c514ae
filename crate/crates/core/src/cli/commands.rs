use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};

use super::report::{num, violation, Report, Witness};
use super::{Cli, Command};
use crate::coarse::{
    check_coarse_equivalence, image_bg_bound, induced_conjugation, nesting_disagreements,
    CoarseViolation, ExpansionProfile, MoritaIndex,
};
use crate::error::{Error, Result};
use crate::format::{self, MapFile};
use crate::metric_order::{check_membership, join_metric, precedes, restriction_metric};
use crate::operators::{
    band_sparsity, block_embedding, certify_membership, decompose_banded, op_norm_estimate,
    propagation_witness, support_metric, BlockAction, BlockRep, FiniteGroup, NormOptions, SparseOp,
};
use crate::schur::{
    convergence_run, cp_decomposition, gram_kernel, hr_check_at, schur_apply, HRFamily, HRParams,
    Scale, Stage,
};
use crate::space::{
    greedy_clusters, greedy_net, same_points, validate_metric, ExtMetric, GrowthProfile, PointSet,
};

pub(super) fn execute(cli: &Cli) -> Report {
    let name = cli.command.name();
    let mut report = Report::new(name);
    match dispatch(cli, &mut report) {
        Ok(()) => report,
        Err(e) => Report::error(name, &e),
    }
}

fn dispatch(cli: &Cli, r: &mut Report) -> Result<()> {
    let tol = cli.tol;
    match &cli.command {
        Command::CheckMetric { file, base, output } => {
            check_metric(r, file, base.as_deref(), output.as_deref())
        }
        Command::Join {
            base,
            d1,
            d2,
            output,
        } => join(r, base, d1, d2, output.as_deref()),
        Command::Restrict {
            base,
            subset,
            output,
        } => restrict(r, base, subset, output.as_deref()),
        Command::Propagation {
            operator,
            metric,
            max,
        } => propagation(r, operator, metric, *max),
        Command::Certify {
            operator,
            base,
            output,
        } => certify(r, operator, base, output.as_deref()),
        Command::SupportMetric {
            operator,
            base,
            radius,
            output,
        } => support(r, operator, base, *radius, output.as_deref()),
        Command::Decompose {
            operator,
            max_terms,
        } => decompose(r, operator, *max_terms),
        Command::Norm { operator, max } => norm(r, operator, *max, tol),
        Command::Net {
            metric,
            radius,
            max_size,
        } => net(r, metric, *radius, *max_size),
        Command::Clusters {
            metric,
            radius,
            min_length,
        } => clusters(r, metric, *radius, *min_length),
        Command::HrCheck {
            family,
            metric,
            radius,
            eps,
            support,
        } => hr(r, family, metric, *radius, *eps, *support),
        Command::Gram { family } => gram(r, family, tol),
        Command::Schur {
            family,
            operator,
            output,
        } => schur(r, family, operator, output.as_deref()),
        Command::CpDecompose {
            family,
            metric,
            support,
            tests,
        } => cp(r, family, metric, *support, tests, tol),
        Command::Converge {
            operator,
            metric,
            stages,
        } => converge(r, operator, metric, stages),
        Command::CoarseCheck {
            map,
            dx,
            dy,
            surjective,
            bg_radius,
        } => coarse(r, map, dx, dy, *surjective, *bg_radius),
        Command::Morita {
            map,
            dx,
            dy,
            subset,
            window,
            out_window,
            operator,
            nested,
            output,
        } => morita(
            r,
            MoritaArgs {
                map,
                dx,
                dy,
                subset,
                window: *window,
                out_window: *out_window,
                operator: operator.as_deref(),
                nested: nested.as_deref(),
                output: output.as_deref(),
            },
        ),
        Command::BlockEmbed {
            metric,
            group,
            blocks,
            element,
            output,
        } => block(
            r,
            metric,
            group,
            blocks,
            element.as_deref(),
            output.as_deref(),
        ),
    }
}

fn in_file(path: &Path) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::InFile {
        path: path.display().to_string(),
        source: Box::new(e),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn write(r: &mut Report, path: Option<&Path>, text: &str) -> Result<()> {
    if let Some(path) = path {
        std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        r.outputs.push(path.display().to_string());
    }
    Ok(())
}

fn load_metric(path: &Path) -> Result<ExtMetric> {
    let table = format::parse_emx(&read(path)?).map_err(in_file(path))?;
    validate_metric(&table).map_err(in_file(path))
}

fn load_operator(path: &Path) -> Result<SparseOp> {
    format::parse_smx(&read(path)?).map_err(in_file(path))
}

fn load_family(path: &Path) -> Result<HRFamily> {
    format::parse_hrf(&read(path)?).map_err(in_file(path))
}

fn ids(points: &PointSet, xs: &[usize]) -> Value {
    xs.iter().map(|&x| points.id(x)).collect()
}

fn growth(profile: &GrowthProfile) -> Value {
    profile
        .breakpoints
        .iter()
        .zip(&profile.counts)
        .map(|(&radius, &count)| json!({"radius": num(radius), "max_ball": count}))
        .collect()
}

fn fail_on<T>(r: &mut Report, result: Result<T>) -> Result<Option<T>> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(e) => {
            r.fail(violation(e)?);
            Ok(None)
        }
    }
}

fn check_metric(
    r: &mut Report,
    file: &Path,
    base: Option<&Path>,
    output: Option<&Path>,
) -> Result<()> {
    let table = format::parse_emx(&read(file)?).map_err(in_file(file))?;
    let d = match validate_metric(&table) {
        Ok(d) => d,
        Err(Error::InvalidMetric(violations)) => {
            for v in violations {
                r.fail(Witness::new(v.rule(), v.to_string(), json!({})));
            }
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    r.set("points", d.len());
    r.set("gap", num(d.discreteness_gap()));
    r.set("growth", growth(&d.growth_profile()));
    if let Some(base) = base {
        let base = load_metric(base)?;
        same_points(base.points(), d.points())?;
        if let Some(cert) = fail_on(r, check_membership(&base, &d))? {
            r.set("domination", num(cert.c()));
        }
    }
    write(r, output, &format::write_emx(&d))
}

fn join(r: &mut Report, base: &Path, d1: &Path, d2: &Path, output: Option<&Path>) -> Result<()> {
    let (base, d1, d2) = (load_metric(base)?, load_metric(d1)?, load_metric(d2)?);
    same_points(base.points(), d1.points())?;
    same_points(base.points(), d2.points())?;
    let (Some(c1), Some(c2)) = (
        fail_on(r, check_membership(&base, &d1))?,
        fail_on(r, check_membership(&base, &d2))?,
    ) else {
        return Ok(());
    };
    let j = join_metric(&base, &d1, &d2)?;
    let cert = check_membership(&base, &j)?;
    r.set("c1", num(c1.c()));
    r.set("c2", num(c2.c()));
    r.set("domination", num(cert.c()));
    r.set("dominates_d1", precedes(&d1, &j)?);
    r.set("dominates_d2", precedes(&d2, &j)?);
    r.set("growth", growth(&cert.profile));
    write(r, output, &format::write_emx(&j))
}

fn restrict(r: &mut Report, base: &Path, subset: &[String], output: Option<&Path>) -> Result<()> {
    let base = load_metric(base)?;
    let subset = base.points().indices_of(subset)?;
    let d = restriction_metric(&base, &subset)?;
    r.set("subset", ids(base.points(), &subset));
    r.set("gap", num(d.discreteness_gap()));
    if let Some((x, y, v)) = d.gap_witness().filter(|w| w.2 < 1.0) {
        let p = d.points();
        r.fail(violation(Error::GapBelowOne {
            x: p.id(x).into(),
            y: p.id(y).into(),
            value: v,
        })?);
    }
    write(r, output, &format::write_emx(&d))
}

fn propagation(r: &mut Report, operator: &Path, metric: &Path, max: Option<f64>) -> Result<()> {
    let (t, d) = (load_operator(operator)?, load_metric(metric)?);
    same_points(t.points(), d.points())?;
    let witness = propagation_witness(&t, &d)?;
    let value = witness.map_or(0.0, |w| w.2);
    r.set("propagation", num(value));
    if let Some((x, y, v)) = witness {
        let p = t.points();
        r.set("witness", json!([p.id(x), p.id(y)]));
        if v.is_infinite() {
            r.fail(violation(Error::InfinitePropagation {
                x: p.id(x).into(),
                y: p.id(y).into(),
            })?);
        } else if let Some(max) = max.filter(|&m| v > m) {
            r.fail(violation(Error::PropagationExceeds {
                x: p.id(x).into(),
                y: p.id(y).into(),
                distance: v,
                radius: max,
            })?);
        }
    }
    Ok(())
}

fn certify(r: &mut Report, operator: &Path, base: &Path, output: Option<&Path>) -> Result<()> {
    let (t, base) = (load_operator(operator)?, load_metric(base)?);
    same_points(t.points(), base.points())?;
    let Some(cert) = fail_on(r, certify_membership(&t, &base))? else {
        return Ok(());
    };
    r.set("k", cert.k);
    r.set("s", num(cert.s));
    r.set("domination", num(cert.cert.c()));
    r.set("max_unit_ball", cert.metric.max_ball_size(1.0));
    write(r, output, &format::write_emx(&cert.metric))
}

fn support(
    r: &mut Report,
    operator: &Path,
    base: &Path,
    radius: f64,
    output: Option<&Path>,
) -> Result<()> {
    let (t, base) = (load_operator(operator)?, load_metric(base)?);
    same_points(t.points(), base.points())?;
    let Some(d) = fail_on(r, support_metric(&t, &base, radius))? else {
        return Ok(());
    };
    r.set("band_sparsity", band_sparsity(&t));
    r.set("max_unit_ball", d.max_ball_size(1.0));
    r.set("gap", num(d.discreteness_gap()));
    write(r, output, &format::write_emx(&d))
}

fn decompose(r: &mut Report, operator: &Path, max_terms: Option<usize>) -> Result<()> {
    let t = load_operator(operator)?;
    let dec = decompose_banded(&t);
    let terms = dec.terms.len();
    r.set("terms", terms);
    r.set("band_sparsity", band_sparsity(&t));
    r.set("sup_norm_sum", num(dec.sup_norm_sum()));
    r.set("exact", dec.reconstruct() == t);
    r.set(
        "partial_isometries",
        dec.terms.iter().all(|term| term.is_partial_isometry_term()),
    );
    if let Some(max) = max_terms.filter(|&m| terms > m) {
        r.fail(Witness::new(
            "term-count",
            format!("{terms} terms, above the limit of {max}"),
            json!({"terms": terms, "max": max}),
        ));
    }
    Ok(())
}

fn norm(r: &mut Report, operator: &Path, max: Option<f64>, tol: f64) -> Result<()> {
    let t = load_operator(operator)?;
    let est = op_norm_estimate(&t, NormOptions::default());
    r.set("norm", num(est.value));
    r.set("iterations", est.iterations);
    r.set("converged", est.converged);
    if !est.converged {
        r.fail(violation(Error::NormNotConverged {
            estimate: est.value,
            iterations: est.iterations,
        })?);
    }
    if let Some(max) = max.filter(|&m| est.value > m + tol) {
        r.fail(Witness::new(
            "norm-bound",
            format!("norm {} exceeds {max}", est.value),
            json!({"norm": num(est.value), "max": num(max)}),
        ));
    }
    Ok(())
}

fn net(r: &mut Report, metric: &Path, radius: f64, max_size: Option<usize>) -> Result<()> {
    let d = load_metric(metric)?;
    let net = greedy_net(&d, radius)?;
    let p = d.points();
    r.set("net", ids(p, &net.net));
    let assignment: serde_json::Map<String, Value> = net
        .assignment
        .iter()
        .enumerate()
        .map(|(x, &u)| (p.id(x).to_string(), Value::from(p.id(u))))
        .collect();
    r.set("assignment", assignment);
    if let Some(max) = max_size.filter(|&m| net.net.len() > m) {
        r.fail(Witness::new(
            "net-size",
            format!("net has {} points, above {max}", net.net.len()),
            json!({"size": net.net.len(), "max": max}),
        ));
    }
    Ok(())
}

fn clusters(r: &mut Report, metric: &Path, radius: f64, min_length: Option<usize>) -> Result<()> {
    let d = load_metric(metric)?;
    let chain = greedy_clusters(&d, radius)?;
    let p = d.points();
    r.set("sizes", chain.sizes());
    r.set("centers", ids(p, &chain.centers));
    r.set(
        "clusters",
        chain.clusters.iter().map(|c| ids(p, c)).collect::<Vec<_>>(),
    );
    if let Some(min) = min_length.filter(|&m| chain.clusters.len() < m) {
        r.fail(Witness::new(
            "chain-length",
            format!("chain has {} clusters, below {min}", chain.clusters.len()),
            json!({"length": chain.clusters.len(), "min": min}),
        ));
    }
    Ok(())
}

fn hr(
    r: &mut Report,
    family: &Path,
    metric: &Path,
    radius: f64,
    eps: f64,
    support: f64,
) -> Result<()> {
    let (xi, d) = (load_family(family)?, load_metric(metric)?);
    same_points(xi.points(), d.points())?;
    let Some(rep) = fail_on(r, hr_check_at(&xi, &d, Scale::Closed(radius), eps, support))? else {
        return Ok(());
    };
    let p = d.points();
    r.set("max_deviation", num(rep.max_deviation));
    r.set("support_radius", num(rep.support_radius));
    if !rep.hr2_ok() {
        let (x, y) = rep
            .deviation_witness
            .expect("a deviation at or above eps has a pair");
        r.fail(Witness::new(
            "HR2",
            format!("‖ξ_{} − ξ_{}‖ = {} is not below {eps}", p.id(x), p.id(y), rep.max_deviation),
            json!({"x": p.id(x), "y": p.id(y), "deviation": num(rep.max_deviation), "eps": num(eps)}),
        ));
    }
    if !rep.hr3_ok() {
        let (x, z) = rep
            .support_witness
            .expect("a positive support radius has a pair");
        r.fail(violation(Error::SupportTooWide {
            x: p.id(x).into(),
            z: p.id(z).into(),
            distance: rep.support_radius,
            radius: support,
        })?);
    }
    Ok(())
}

fn gram(r: &mut Report, family: &Path, tol: f64) -> Result<()> {
    let xi = load_family(family)?;
    let Some(k) = fail_on(r, gram_kernel(&xi))? else {
        return Ok(());
    };
    let min = k.min_eigenvalue();
    r.set("min_eigenvalue", num(min));
    if min < -tol {
        r.fail(Witness::new(
            "psd",
            format!("Gram kernel has eigenvalue {min}"),
            json!({"min_eigenvalue": num(min)}),
        ));
    }
    Ok(())
}

fn schur(r: &mut Report, family: &Path, operator: &Path, output: Option<&Path>) -> Result<()> {
    let (xi, t) = (load_family(family)?, load_operator(operator)?);
    same_points(xi.points(), t.points())?;
    let Some(k) = fail_on(r, gram_kernel(&xi))? else {
        return Ok(());
    };
    let m = schur_apply(&k, &t)?;
    r.set("nnz", m.nnz());
    write(r, output, &format::write_smx(&m))
}

fn cp(
    r: &mut Report,
    family: &Path,
    metric: &Path,
    support: f64,
    tests: &[std::path::PathBuf],
    tol: f64,
) -> Result<()> {
    let (xi, d) = (load_family(family)?, load_metric(metric)?);
    same_points(xi.points(), d.points())?;
    let tests = tests
        .iter()
        .map(|p| load_operator(p))
        .collect::<Result<Vec<_>>>()?;
    for t in &tests {
        same_points(xi.points(), t.points())?;
    }
    let Some(terms) = fail_on(r, cp_decomposition(&xi, &d, support))? else {
        return Ok(());
    };
    let k = gram_kernel(&xi)?;
    let error = terms.certify(&k, &tests)?;
    r.set("terms", terms.terms.len());
    r.set("groups", terms.group_count());
    r.set("coloring_bound", terms.coloring_bound);
    r.set("tests", tests.len());
    r.set("max_error", num(error));
    if error > tol {
        r.fail(Witness::new(
            "cp-identity",
            format!("Σ φ T φ differs from the Schur product by {error}"),
            json!({"max_error": num(error)}),
        ));
    }
    Ok(())
}

fn parse_stage(spec: &str) -> Result<(f64, f64, f64, &str)> {
    let parts: Vec<&str> = spec.split(',').collect();
    let number = |s: &str| {
        format::parse_value(s, 0)
            .map_err(|_| Error::InvalidArgument(format!("stage `{spec}`: `{s}` is not a number")))
    };
    match parts[..] {
        [radius, eps, file] => Ok((number(radius)?, number(eps)?, f64::INFINITY, file)),
        [radius, eps, s, file] => Ok((number(radius)?, number(eps)?, number(s)?, file)),
        _ => Err(Error::InvalidArgument(format!(
            "stage `{spec}` is not R,EPS[,S],FILE"
        ))),
    }
}

fn converge(r: &mut Report, operator: &Path, metric: &Path, specs: &[String]) -> Result<()> {
    let (t, d) = (load_operator(operator)?, load_metric(metric)?);
    same_points(t.points(), d.points())?;
    let mut stages = Vec::with_capacity(specs.len());
    for spec in specs {
        let (radius, eps, support, file) = parse_stage(spec)?;
        let family = load_family(Path::new(file))?;
        same_points(family.points(), d.points())?;
        stages.push(Stage {
            radius,
            eps,
            family: family.with_params(HRParams {
                radius,
                eps,
                support,
            }),
        });
    }
    let Some(devs) = fail_on(
        r,
        convergence_run(&d, &t, &stages, NormOptions::default().tol),
    )?
    else {
        return Ok(());
    };
    r.set("nonincreasing", devs.windows(2).all(|w| w[1] <= w[0]));
    r.set("deviations", devs.into_iter().map(num).collect::<Vec<_>>());
    Ok(())
}

fn profile_json(p: &ExpansionProfile) -> Value {
    p.breakpoints
        .iter()
        .zip(&p.bounds)
        .map(|(&radius, &bound)| json!({"radius": num(radius), "bound": num(bound)}))
        .collect()
}

fn load_map(path: &Path, dx: &ExtMetric, dy: &ExtMetric) -> Result<crate::coarse::CoarseMapData> {
    MapFile::parse(&read(path)?)
        .and_then(|m| m.resolve(dx.points(), dy.points()))
        .map_err(in_file(path))
}

fn coarse(
    r: &mut Report,
    map: &Path,
    dx: &Path,
    dy: &Path,
    surjective: bool,
    bg_radius: Option<f64>,
) -> Result<()> {
    let (dx, dy) = (load_metric(dx)?, load_metric(dy)?);
    let mut data = load_map(map, &dx, &dy)?;
    data.surjective = surjective;
    let rep = check_coarse_equivalence(&data, &dx, &dy)?;
    let (px, py) = (dx.points(), dy.points());
    r.set("f_profile", profile_json(&rep.f_profile));
    if let Some(g) = &rep.g_profile {
        r.set("g_profile", profile_json(g));
    }
    if let Some((c, _)) = rep.closeness_needed {
        r.set("closeness_needed", num(c));
    }
    if let Some((c, _)) = rep.back_closeness_needed {
        r.set("back_closeness_needed", num(c));
    }
    for v in &rep.violations {
        let (message, payload) = match *v {
            CoarseViolation::ForwardUnbounded { radius, x, x2 } => (
                format!(
                    "f sends `{}`, `{}` at distance {radius} infinitely apart",
                    px.id(x),
                    px.id(x2)
                ),
                json!({"radius": num(radius), "x": px.id(x), "x2": px.id(x2)}),
            ),
            CoarseViolation::BackwardUnbounded { radius, y, y2 } => (
                format!(
                    "g sends `{}`, `{}` at distance {radius} infinitely apart",
                    py.id(y),
                    py.id(y2)
                ),
                json!({"radius": num(radius), "y": py.id(y), "y2": py.id(y2)}),
            ),
            CoarseViolation::MissingInverse => ("no `g:` section".into(), json!({})),
            CoarseViolation::Closeness { x, distance, bound } => (
                format!("d(g(f({0})), {0}) = {distance} exceeds {bound}", px.id(x)),
                json!({"x": px.id(x), "distance": num(distance), "bound": num(bound)}),
            ),
            CoarseViolation::BackCloseness { y, distance, bound } => (
                format!("d(f(g({0})), {0}) = {distance} exceeds {bound}", py.id(y)),
                json!({"y": py.id(y), "distance": num(distance), "bound": num(bound)}),
            ),
            CoarseViolation::NotSurjective { y } => {
                (format!("`{}` is not hit", py.id(y)), json!({"y": py.id(y)}))
            }
        };
        r.fail(Witness::new(v.rule(), message, payload));
    }
    if let (Some(radius), true) = (bg_radius, rep.passes()) {
        let all: Vec<usize> = (0..dx.len()).collect();
        let bg = image_bg_bound(&data, &all, &dx, &dy, radius)?;
        r.set("bg_source_radius", num(bg.source_radius));
        for row in bg.rows.iter().filter(|row| row.left > row.right) {
            r.fail(Witness::new(
                "bg-transfer",
                format!(
                    "at `{}`: {} image points against {} source points",
                    px.id(row.x),
                    row.left,
                    row.right
                ),
                json!({"x": px.id(row.x), "left": row.left, "right": row.right}),
            ));
        }
    }
    Ok(())
}

struct MoritaArgs<'a> {
    map: &'a Path,
    dx: &'a Path,
    dy: &'a Path,
    subset: &'a [String],
    window: usize,
    out_window: Option<usize>,
    operator: Option<&'a Path>,
    nested: Option<&'a [String]>,
    output: Option<&'a Path>,
}

fn morita(r: &mut Report, a: MoritaArgs<'_>) -> Result<()> {
    let (dx, dy) = (load_metric(a.dx)?, load_metric(a.dy)?);
    let data = load_map(a.map, &dx, &dy)?;
    let (px, py) = (dx.points(), dy.points());
    let idx = MoritaIndex::new(data.f.clone(), &px.indices_of(a.subset)?)?;
    let fibers: serde_json::Map<String, Value> = idx
        .image()
        .into_iter()
        .map(|y| (py.id(y).to_string(), ids(px, idx.fiber(y))))
        .collect();
    r.set("fibers", fibers);
    r.set("window", a.window);

    let mut round_trips = 0usize;
    for &x in idx.subset() {
        for j in 0..a.window {
            let (y, m) = idx.forward(x, j)?;
            if idx.inverse(y, m)? != (x, j) {
                r.fail(Witness::new(
                    "round-trip",
                    format!("({}, {j}) does not come back", px.id(x)),
                    json!({"x": px.id(x), "j": j}),
                ));
            }
            round_trips += 1;
        }
    }
    r.set("round_trips", round_trips);

    if let Some(nested) = a.nested {
        let large = MoritaIndex::new(data.f.clone(), &px.indices_of(nested)?)?;
        if let Some(&x) = idx.subset().iter().find(|x| !large.subset().contains(x)) {
            return Err(Error::NotInSubset(px.id(x).into()));
        }
        r.set("prefix_coherent", idx.is_prefix_of(&large));
        let bad = nesting_disagreements(&idx, &large, a.window)?;
        r.set("nesting_disagreements", bad.len());
        for (x, j) in bad {
            let (small_img, large_img) = (idx.forward(x, j)?, large.forward(x, j)?);
            r.fail(Witness::new(
                "nesting",
                format!(
                    "({}, {j}) goes to index {} on the subset and {} on the larger one",
                    px.id(x),
                    small_img.1,
                    large_img.1
                ),
                json!({"x": px.id(x), "j": j, "m": small_img.1, "m_nested": large_img.1}),
            ));
        }
    }

    if let Some(operator) = a.operator {
        let t = load_operator(operator)?;
        if let Some(out) = fail_on(r, induced_conjugation(&idx, &t, a.window, a.out_window))? {
            r.set("nnz", out.nnz());
            write(r, a.output, &format::write_smx(&out))?;
        }
    }
    Ok(())
}

fn parse_group(spec: &str) -> Result<FiniteGroup> {
    let bad = || Error::InvalidArgument(format!("group `{spec}` is not sym:N or cyc:N"));
    let (kind, n) = spec.split_once(':').ok_or_else(bad)?;
    let n: usize = n.parse().map_err(|_| bad())?;
    match kind {
        "sym" if (1..=6).contains(&n) => Ok(FiniteGroup::symmetric(n)),
        "cyc" if n >= 1 => Ok(FiniteGroup::cyclic(n)),
        _ => Err(bad()),
    }
}

fn block(
    r: &mut Report,
    metric: &Path,
    group: &str,
    specs: &[String],
    element: Option<&str>,
    output: Option<&Path>,
) -> Result<()> {
    let d = load_metric(metric)?;
    let points = Arc::clone(d.points());
    let group = parse_group(group)?;
    let mut blocks = Vec::with_capacity(specs.len());
    for spec in specs {
        let (kind, list) = spec
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("block `{spec}` is not KIND:IDS")))?;
        let members = points.indices_of(&list.split(',').collect::<Vec<_>>())?;
        let action = match kind {
            "regular" => BlockAction::regular(&group, members),
            "natural" => BlockAction::natural(&group, members),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown block kind `{kind}`"
                )))
            }
        };
        match fail_on(r, action)? {
            Some(action) => blocks.push(action),
            None => return Ok(()),
        }
    }
    let Some(rep) = fail_on(r, BlockRep::new(points, group, blocks))? else {
        return Ok(());
    };
    let n = rep.group.order();
    let ops = (0..n)
        .map(|g| block_embedding(&rep, g))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs_ok = true;
    for g in 0..n {
        for h in 0..n {
            pairs_ok &= ops[rep.group.mul(g, h)] == ops[g].mul(&ops[h])?;
        }
    }
    r.set("order", n);
    r.set("homomorphism", pairs_ok);
    r.set(
        "band_sparsity",
        ops.iter().map(band_sparsity).max().unwrap_or(0),
    );
    r.set("max_block_diameter", num(rep.max_block_diameter(&d)));
    if !pairs_ok {
        r.fail(Witness::new(
            "homomorphism",
            "φ(gh) differs from φ(g)φ(h)",
            json!({}),
        ));
    }
    if let Some(name) = element {
        let g = rep.group.element(name)?;
        write(r, output, &format::write_smx(&ops[g]))?;
    }
    Ok(())
}
