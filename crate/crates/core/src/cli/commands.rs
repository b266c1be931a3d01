use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use crate::building::{
    distance, distance_to_sigma_apartment, quasi_density_experiment, relative_position, sigma_dual, ExperimentConfig,
    ExperimentReport, LatticeClass, SampleModel, SigmaApartmentRef,
};
use crate::error::{Error, Result};
use crate::padic::{class_vector_label, PadicScalar, PrimeContext, SquareClass};
use crate::plinalg::{is_integral_unit, smith_cartan_ordered, ExponentOrder, PMatrix};
use crate::polar::{kah_decompose, verify_witness, KahWitness, SymmetricSpaceContext};
use crate::precision::{with_precision_retry, PrecisionInfo};
use crate::quadform::{diagonalize_sup, isometry_agreement, witt_isometry, FormInvariants, QuadraticForm};

use super::input::{rational_vector, read_document, Rational, RationalMatrix};
use super::render::{self, Emitted};
use super::{Command, RunConfig};

/// Digits of slack for diagonalisation and Cartan reconstruction.
const FACTOR_SLACK: i64 = 8;
const ISOMETRY_SLACK: i64 = 10;

pub fn execute(cfg: &RunConfig) -> Result<Emitted> {
    let ctx = PrimeContext::new(cfg.p.expect("validated"), cfg.precision)?;
    match cfg.command.expect("validated") {
        Command::Diagonalize => diagonalize(cfg, ctx, &read_document(cfg.input.as_deref())?),
        Command::Cartan => cartan(cfg, ctx, &read_document(cfg.input.as_deref())?),
        Command::Kah => kah(cfg, ctx, &read_document(cfg.input.as_deref())?),
        Command::Classify => classify(cfg, ctx, &read_document(cfg.input.as_deref())?),
        Command::Distance => lattice_distance(cfg, ctx, &read_document(cfg.input.as_deref())?),
        Command::Experiment => experiment(cfg, ctx),
    }
}

fn check_n(cfg: &RunConfig, n: usize) -> Result<()> {
    match cfg.n {
        Some(m) if m != n => Err(Error::DimensionMismatch(format!("--n {m} but the input has rank {n}"))),
        _ => Ok(()),
    }
}

fn invertible(m: RationalMatrix) -> Result<RationalMatrix> {
    if m.is_singular() {
        return Err(Error::InvalidInput("matrix is singular".into()));
    }
    Ok(m)
}

/// A degenerate-looking Gram matrix whose exact input is known to be
/// non-degenerate only lacks digits.
fn degenerate_as_loss(e: Error) -> Error {
    match e {
        Error::Degenerate => Error::InsufficientPrecision,
        other => other,
    }
}

fn meta(info: &PrecisionInfo) -> Value {
    json!({ "precision": info.requested, "working": info.working, "retries": info.retries })
}

fn meta_line(info: &PrecisionInfo) -> String {
    format!(
        "precision {} (working {}, retries {})\n",
        info.requested, info.working, info.retries
    )
}

/// Agreement digits as JSON: `null` when exact.
fn digits_json(d: i64) -> Value {
    if d == i64::MAX {
        Value::Null
    } else {
        json!(d)
    }
}

fn digits_text(d: i64) -> String {
    if d == i64::MAX {
        "exactly".into()
    } else {
        format!("to {d} digits")
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn labels(classes: &[SquareClass]) -> Vec<&'static str> {
    classes.iter().map(|c| c.label()).collect()
}

fn invariants_json(inv: &FormInvariants) -> Value {
    json!({ "dim": inv.dim, "disc": inv.disc.label(), "hasse": inv.hasse })
}

fn square_classes(values: &[PadicScalar]) -> Result<Vec<SquareClass>> {
    values.iter().map(crate::padic::unit_square_class).collect()
}

fn embed_vector(values: &[Rational], ctx: PrimeContext) -> Result<Vec<PadicScalar>> {
    values.iter().map(|x| x.embed(ctx)).collect()
}

// ---- diagonalize

/// `(U in GL(n, Z_p), digits of U^T B U = diag(D))`.
fn diagonalization_checks(b: &PMatrix, u: &PMatrix, d: &[PadicScalar]) -> Result<(bool, i64)> {
    let work = b.ctx().precision().max(u.ctx().precision());
    let (b, u) = (b.with_precision(work)?, u.with_precision(work)?);
    let ctx = b.ctx();
    let target: Vec<PadicScalar> = d.iter().map(|x| x.in_context(ctx)).collect();
    let agreement = u.transpose().mul(&b)?.mul(&u)?.agreement(&PMatrix::diagonal(ctx, &target))?;
    Ok((is_integral_unit(&u)?, agreement))
}

fn diagonalize(cfg: &RunConfig, ctx: PrimeContext, doc: &Value) -> Result<Emitted> {
    let gram = RationalMatrix::from_value(doc)?;
    check_n(cfg, gram.dim())?;
    if !gram.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if gram.is_singular() {
        return Err(Error::Degenerate);
    }
    let target = ctx.precision() as i64 - FACTOR_SLACK;
    let ((b, q, diag, agreement), info) = with_precision_retry(ctx, |c| {
        let b = gram.embed(c)?;
        let q = QuadraticForm::new(b.clone()).map_err(degenerate_as_loss)?;
        let diag = diagonalize_sup(&q).map_err(degenerate_as_loss)?;
        let (unit, agreement) = diagonalization_checks(&b, &diag.transform, &diag.diagonal)?;
        if !unit {
            return Err(Error::InternalInvariantViolation("U is not in GL(n, Z_p)".into()));
        }
        if agreement < target {
            return Err(Error::InsufficientPrecision);
        }
        Ok((b, q, diag, agreement))
    })?;
    let classes = square_classes(&diag.diagonal)?;
    let inv = q.invariants();
    let json = json!({
        "command": "diagonalize",
        "p": ctx.p(),
        "n": gram.dim(),
        "gram": b,
        "U": diag.transform,
        "D": diag.diagonal,
        "classes": labels(&classes),
        "invariants": invariants_json(&inv),
        "checks": { "integral_unit": true, "agreement": digits_json(agreement) },
        "meta": meta(&info),
    });
    let pretty = format!(
        "diagonalize  p = {}  n = {}\nU =\n{}D = {}\nclasses {}  disc {}  hasse {}\nU in GL(n, Z_p): pass; U^T B U = D {}\n{}",
        ctx.p(),
        gram.dim(),
        render::matrix(&diag.transform),
        render::scalars(&diag.diagonal),
        class_vector_label(&classes),
        inv.disc,
        inv.hasse,
        digits_text(agreement),
        meta_line(&info)
    );
    Ok(Emitted::new(json, pretty))
}

// ---- cartan

fn cartan(cfg: &RunConfig, ctx: PrimeContext, doc: &Value) -> Result<Emitted> {
    let gm = invertible(RationalMatrix::from_value(doc)?)?;
    check_n(cfg, gm.dim())?;
    let order = if cfg.descending {
        ExponentOrder::Descending
    } else {
        ExponentOrder::Ascending
    };
    let target = ctx.precision() as i64 - FACTOR_SLACK;
    let ((g, f, agreement), info) = with_precision_retry(ctx, |c| {
        let g = gm.embed(c)?;
        let f = smith_cartan_ordered(&g, order)?;
        if !is_integral_unit(&f.k1)? || !is_integral_unit(&f.k2)? {
            return Err(Error::InternalInvariantViolation("Cartan factor outside GL(n, Z_p)".into()));
        }
        let agreement = f.reconstruct()?.agreement(&g)?;
        if agreement < target {
            return Err(Error::InsufficientPrecision);
        }
        Ok((g, f, agreement))
    })?;
    let json = json!({
        "command": "cartan",
        "p": ctx.p(),
        "n": gm.dim(),
        "order": order,
        "g": g,
        "k1": f.k1,
        "exponents": f.exponents,
        "k2": f.k2,
        "checks": { "integral_units": true, "agreement": digits_json(agreement) },
        "meta": meta(&info),
    });
    let pretty = format!(
        "cartan  p = {}  n = {}\nk1 =\n{}exponents = {:?}\nk2 =\n{}k1, k2 in GL(n, Z_p): pass; k1 diag(p^a) k2 = g {}\n{}",
        ctx.p(),
        gm.dim(),
        render::matrix(&f.k1),
        f.exponents,
        render::matrix(&f.k2),
        digits_text(agreement),
        meta_line(&info)
    );
    Ok(Emitted::new(json, pretty))
}

// ---- kah

fn kah(cfg: &RunConfig, ctx: PrimeContext, doc: &Value) -> Result<Emitted> {
    let (g_value, q0_value) = match doc {
        Value::Object(map) if map.contains_key("g") => (&map["g"], map.get("q0")),
        other => (other, None),
    };
    let gm = invertible(RationalMatrix::from_value(g_value)?)?;
    let n = gm.dim();
    check_n(cfg, n)?;
    let q0 = match q0_value {
        None | Some(Value::Null) => vec![PadicScalar::one(ctx); n],
        Some(v) => embed_vector(&rational_vector(v)?, ctx)?,
    };
    if q0.len() != n {
        return Err(Error::DimensionMismatch("q0 must have n coefficients".into()));
    }
    let ssc = SymmetricSpaceContext::new(ctx, &q0)?;
    let g = gm.embed(ctx)?;
    let (w, info) = kah_decompose(&g, &ssc)?;
    let report = verify_witness(&g, &w, &ssc)?;
    let json = json!({
        "command": "kah",
        "p": ctx.p(),
        "n": n,
        "q0": q0,
        "g": g,
        "k": w.k,
        "s": labels(&w.s),
        "a": w.a,
        "h": w.h,
        "checks": report,
        "passed": report.passed(),
        "meta": meta(&info),
    });
    let pretty = format!(
        "kah  p = {}  n = {}  q0 = {}\nk =\n{}s = {}\na = {}\nh =\n{}checks: reconstruct {}, integral {}, diagonal {}, H-membership {}\n{}",
        ctx.p(),
        n,
        render::scalars(&q0),
        render::matrix(&w.k),
        w.class_label(),
        render::scalars(&w.a.diagonal_entries()),
        render::matrix(&w.h),
        pass(report.reconstruct.pass),
        pass(report.integral.pass),
        pass(report.diagonal.pass),
        pass(report.h_membership.pass),
        meta_line(&info)
    );
    let mut emitted = Emitted::new(json, pretty);
    if !report.passed() {
        emitted.status = 4;
    }
    Ok(emitted)
}

// ---- classify

fn form_from(m: &RationalMatrix, ctx: PrimeContext) -> Result<QuadraticForm> {
    QuadraticForm::new(m.embed(ctx)?).map_err(degenerate_as_loss)
}

fn gram_input(v: &Value) -> Result<RationalMatrix> {
    let m = RationalMatrix::from_value(v)?;
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if m.is_singular() {
        return Err(Error::Degenerate);
    }
    Ok(m)
}

fn classify(cfg: &RunConfig, ctx: PrimeContext, doc: &Value) -> Result<Emitted> {
    if let Value::Object(map) = doc {
        if map.contains_key("q1") || map.contains_key("q2") {
            let field = |k: &str| map.get(k).ok_or_else(|| Error::InvalidInput(format!("classify needs {k}")));
            return classify_pair(cfg, ctx, &gram_input(field("q1")?)?, &gram_input(field("q2")?)?);
        }
    }
    let gram = gram_input(doc)?;
    check_n(cfg, gram.dim())?;
    let ((q, diag), info) = with_precision_retry(ctx, |c| {
        let q = form_from(&gram, c)?;
        let diag = diagonalize_sup(&q).map_err(degenerate_as_loss)?;
        Ok((q, diag))
    })?;
    let classes = square_classes(&diag.diagonal)?;
    let inv = q.invariants();
    let json = json!({
        "command": "classify",
        "p": ctx.p(),
        "gram": q.gram(),
        "invariants": invariants_json(&inv),
        "diagonal": diag.diagonal,
        "classes": labels(&classes),
        "meta": meta(&info),
    });
    let pretty = format!(
        "classify  p = {}\ndim {}  disc {}  hasse {}\ndiagonal {}  classes {}\n{}",
        ctx.p(),
        inv.dim,
        inv.disc,
        inv.hasse,
        render::scalars(&diag.diagonal),
        class_vector_label(&classes),
        meta_line(&info)
    );
    Ok(Emitted::new(json, pretty))
}

fn classify_pair(cfg: &RunConfig, ctx: PrimeContext, m1: &RationalMatrix, m2: &RationalMatrix) -> Result<Emitted> {
    check_n(cfg, m1.dim())?;
    check_n(cfg, m2.dim())?;
    let ((q1, q2, gamma), info) = with_precision_retry(ctx, |c| {
        let (q1, q2) = (form_from(m1, c)?, form_from(m2, c)?);
        let gamma = match witt_isometry(&q1, &q2) {
            Ok(gamma) => Some(gamma),
            Err(Error::InvariantMismatch) => None,
            Err(e) => return Err(e),
        };
        Ok((q1, q2, gamma))
    })?;
    let agreement = gamma.as_ref().map(|g| isometry_agreement(g, &q1, &q2)).transpose()?;
    let (i1, i2) = (q1.invariants(), q2.invariants());
    let json = json!({
        "command": "classify",
        "p": ctx.p(),
        "q1": { "gram": q1.gram(), "invariants": invariants_json(&i1) },
        "q2": { "gram": q2.gram(), "invariants": invariants_json(&i2) },
        "equivalent": gamma.is_some(),
        "gamma": gamma,
        "agreement": agreement.map(digits_json),
        "meta": meta(&info),
    });
    let mut pretty = format!(
        "classify  p = {}\nq1: dim {}  disc {}  hasse {}\nq2: dim {}  disc {}  hasse {}\n",
        ctx.p(),
        i1.dim,
        i1.disc,
        i1.hasse,
        i2.dim,
        i2.disc,
        i2.hasse
    );
    match (&gamma, agreement) {
        (Some(g), Some(a)) => pretty.push_str(&format!(
            "equivalent; gamma^T B1 gamma = B2 {}\ngamma =\n{}",
            digits_text(a),
            render::matrix(g)
        )),
        _ => pretty.push_str("not equivalent\n"),
    }
    pretty.push_str(&meta_line(&info));
    Ok(Emitted::new(json, pretty))
}

// ---- distance

fn lattice_distance(cfg: &RunConfig, ctx: PrimeContext, doc: &Value) -> Result<Emitted> {
    let (x_value, y_value, q0_value) = match doc {
        Value::Object(map) if map.contains_key("x") => (&map["x"], map.get("y"), map.get("q0")),
        other => (other, None, None),
    };
    let xm = invertible(RationalMatrix::from_value(x_value)?)?;
    let n = xm.dim();
    check_n(cfg, n)?;
    let ym = match y_value {
        None | Some(Value::Null) => None,
        Some(v) => Some(invertible(RationalMatrix::from_value(v)?)?),
    };
    if ym.as_ref().is_some_and(|y| y.dim() != n) {
        return Err(Error::DimensionMismatch("x and y have different rank".into()));
    }
    let q0_rational = match q0_value {
        None | Some(Value::Null) => None,
        Some(v) => Some(rational_vector(v)?),
    };
    let (json, info) = with_precision_retry(ctx, |c| {
        let q0_diag = match &q0_rational {
            None => vec![PadicScalar::one(c); n],
            Some(v) => embed_vector(v, c)?,
        };
        let q0 = QuadraticForm::diagonal(c, &q0_diag)?;
        let x = LatticeClass::from_basis(&xm.embed(c)?)?;
        distance_document(&x, ym.as_ref().map(|y| y.embed(c)).transpose()?.as_ref(), &q0)
    })?;
    let mut json = json;
    json["p"] = json!(ctx.p());
    json["meta"] = meta(&info);
    let pretty = distance_pretty(&json, &info);
    Ok(Emitted::new(json, pretty))
}

fn distance_document(x: &LatticeClass, y_basis: Option<&PMatrix>, q0: &QuadraticForm) -> Result<Value> {
    let ctx = x.hnf().ctx();
    let n = x.dim();
    let l0 = LatticeClass::standard(ctx, n);
    let sx = sigma_dual(x, q0)?;
    let near = distance_to_sigma_apartment(x, &SigmaApartmentRef::standard(ctx, n))?;
    let mut doc = json!({
        "command": "distance",
        "n": n,
        "q0": q0.gram().diagonal_entries(),
        "x": { "hnf": x.hnf(), "exponents": x.diagonal_exponents() },
        "position_from_origin": relative_position(&l0, x)?,
        "distance_from_origin": distance(&l0, x)?,
        "sigma_x": { "hnf": sx.hnf(), "exponents": sx.diagonal_exponents() },
        "distance_to_sigma_x": distance(x, &sx)?,
        "sigma_fixed": sx == *x,
        "standard_apartment": near,
    });
    if let Some(yb) = y_basis {
        let y = LatticeClass::from_basis(yb)?;
        doc["y"] = json!({ "hnf": y.hnf(), "exponents": y.diagonal_exponents() });
        doc["relative_position"] = json!(relative_position(x, &y)?);
        doc["distance"] = json!(distance(x, &y)?);
    }
    Ok(doc)
}

fn distance_pretty(doc: &Value, info: &PrecisionInfo) -> String {
    let mut out = format!(
        "distance  p = {}  n = {}\nx exponents {}\nd(x0, x) = {}  position {}\nd(x, sigma x) = {}  sigma-fixed {}\nstandard apartment: distance {}  nearest exponents {}\n",
        doc["p"], doc["n"], doc["x"]["exponents"], doc["distance_from_origin"], doc["position_from_origin"],
        doc["distance_to_sigma_x"], doc["sigma_fixed"], doc["standard_apartment"]["distance"],
        doc["standard_apartment"]["exponents"]
    );
    if doc.get("y").is_some() {
        out.push_str(&format!("d(x, y) = {}  position {}\n", doc["distance"], doc["relative_position"]));
    }
    out.push_str(&meta_line(info));
    out
}

// ---- experiment

fn run_experiment(
    ctx: PrimeContext,
    n: usize,
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    let ssc = SymmetricSpaceContext::standard(ctx, n)?;
    quasi_density_experiment(&ssc, config)
}

fn report_json(report: &ExperimentReport) -> Value {
    let mut json = serde_json::to_value(report).expect("reports serialise");
    json["command"] = json!("experiment");
    json
}

fn experiment(cfg: &RunConfig, ctx: PrimeContext) -> Result<Emitted> {
    let n = cfg.n.expect("validated");
    let mut config = ExperimentConfig::new(n, cfg.samples, cfg.val_bound, cfg.seed.expect("validated"));
    config.model = cfg.model;
    config.jobs = cfg.jobs;
    if let Some(exact) = cfg.exact {
        config.exact = exact;
    }
    let report = run_experiment(ctx, n, &config)?;
    let mut pretty = format!(
        "experiment  p = {}  n = {}  V = {}  samples = {}  seed = {}  model {:?}\nC_emp = {:.6}  chamber vertex diameter = {:.6}\nwitness table {} classes, {} retries\n",
        report.p,
        report.n,
        report.val_bound,
        report.samples,
        report.seed,
        report.model,
        report.c_emp,
        report.chamber_vertex_diameter,
        report.witness_table_size,
        report.total_retries
    );
    for (class, usage) in &report.per_class {
        pretty.push_str(&format!("  {class:<16} {:>6}  max {:.6}\n", usage.count, usage.max_disp));
    }
    if let Some(gap) = &report.gap {
        pretty.push_str(&format!(
            "exact search: {} compared, max exact {:.6}, max gap {:.6}, mean gap {:.6}, {} violations\n",
            gap.compared, gap.max_exact, gap.max_gap, gap.mean_gap, gap.violations
        ));
    }
    pretty.push_str(&format!("note: {}\n", report.note));
    let mut emitted = Emitted::new(report_json(&report), pretty);
    emitted.csv = Some(report.to_csv());
    Ok(emitted)
}

// ---- verify

fn field<T: DeserializeOwned>(doc: &Value, key: &str) -> Result<T> {
    let v = doc
        .get(key)
        .ok_or_else(|| Error::Parse(format!("document lacks {key:?}")))?;
    serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("{key}: {e}")))
}

fn requested_precision(doc: &Value) -> Result<u32> {
    doc.get("meta")
        .and_then(|m| m.get("precision"))
        .or_else(|| doc.get("precision"))
        .and_then(Value::as_u64)
        .map(|v| v as u32)
        .ok_or_else(|| Error::Parse("document lacks its precision".into()))
}

fn doc_context(doc: &Value) -> Result<PrimeContext> {
    PrimeContext::new(field(doc, "p")?, requested_precision(doc)?)
}

fn class_labels(doc: &Value, key: &str) -> Result<Vec<SquareClass>> {
    let raw: Vec<String> = field(doc, key)?;
    raw.iter().map(|s| SquareClass::from_label(s)).collect()
}

/// Re-checks an emitted document. Failing checks exit with status 2.
pub fn verify(cfg: &RunConfig) -> Result<Emitted> {
    let doc = read_document(cfg.input.as_deref())?;
    let name: String = field(&doc, "command")?;
    let command = Command::from_name(&name)?;
    if cfg.command.is_some_and(|c| c != command) {
        return Err(Error::InvalidInput(format!("document was emitted by {name}")));
    }
    let checks = match command {
        Command::Diagonalize => verify_diagonalize(&doc)?,
        Command::Cartan => verify_cartan(&doc)?,
        Command::Kah => verify_kah(&doc)?,
        Command::Classify => verify_classify(&doc)?,
        Command::Distance => verify_distance(&doc)?,
        Command::Experiment => verify_experiment(&doc, cfg.jobs)?,
    };
    let passed = checks.values().all(|v| v.as_bool() == Some(true));
    let mut pretty = format!("verify {name}: {}\n", pass(passed));
    for (k, v) in &checks {
        pretty.push_str(&format!("  {k}: {}\n", pass(v.as_bool() == Some(true))));
    }
    let json = json!({ "command": "verify", "document": name, "passed": passed, "checks": checks });
    let mut emitted = Emitted::new(json, pretty);
    if !passed {
        emitted.status = 2;
    }
    Ok(emitted)
}

fn verify_diagonalize(doc: &Value) -> Result<Map<String, Value>> {
    let ctx = doc_context(doc)?;
    let b: PMatrix = field(doc, "gram")?;
    let u: PMatrix = field(doc, "U")?;
    let d: Vec<PadicScalar> = field(doc, "D")?;
    let (unit, agreement) = diagonalization_checks(&b, &u, &d)?;
    let classes = square_classes(&d)?;
    let mut checks = Map::new();
    checks.insert("integral_unit".into(), json!(unit));
    checks.insert(
        "diagonalizes".into(),
        json!(agreement >= ctx.precision() as i64 - FACTOR_SLACK),
    );
    checks.insert("classes".into(), json!(class_labels(doc, "classes")? == classes));
    Ok(checks)
}

fn verify_cartan(doc: &Value) -> Result<Map<String, Value>> {
    let ctx = doc_context(doc)?;
    let g: PMatrix = field(doc, "g")?;
    let k1: PMatrix = field(doc, "k1")?;
    let k2: PMatrix = field(doc, "k2")?;
    let exponents: Vec<i64> = field(doc, "exponents")?;
    let order: ExponentOrder = field(doc, "order")?;
    let work = [&g, &k1, &k2].iter().map(|m| m.ctx().precision()).max().unwrap_or(ctx.precision());
    let c = ctx.with_precision(work)?;
    let diag: Vec<PadicScalar> = exponents.iter().map(|&e| PadicScalar::p_power(c, e)).collect();
    let rebuilt = k1
        .with_precision(work)?
        .mul(&PMatrix::diagonal(c, &diag))?
        .mul(&k2.with_precision(work)?)?;
    let sorted = exponents.windows(2).all(|w| match order {
        ExponentOrder::Ascending => w[0] <= w[1],
        ExponentOrder::Descending => w[0] >= w[1],
    });
    let mut checks = Map::new();
    checks.insert(
        "integral_units".into(),
        json!(is_integral_unit(&k1)? && is_integral_unit(&k2)?),
    );
    checks.insert(
        "reconstruct".into(),
        json!(rebuilt.agreement(&g.with_precision(work)?)? >= ctx.precision() as i64 - FACTOR_SLACK),
    );
    checks.insert("ordered".into(), json!(sorted));
    Ok(checks)
}

fn verify_kah(doc: &Value) -> Result<Map<String, Value>> {
    let ctx = doc_context(doc)?;
    let q0: Vec<PadicScalar> = field(doc, "q0")?;
    let ssc = SymmetricSpaceContext::new(ctx, &q0)?;
    let g: PMatrix = field(doc, "g")?;
    let w = KahWitness {
        k: field(doc, "k")?,
        s: class_labels(doc, "s")?,
        a: field(doc, "a")?,
        h: field(doc, "h")?,
    };
    let report = verify_witness(&g, &w, &ssc)?;
    let mut checks = Map::new();
    checks.insert("reconstruct".into(), json!(report.reconstruct.pass));
    checks.insert("integral".into(), json!(report.integral.pass));
    checks.insert("diagonal".into(), json!(report.diagonal.pass));
    checks.insert("H_membership".into(), json!(report.h_membership.pass));
    Ok(checks)
}

fn doc_invariants(doc: &Value) -> Result<(QuadraticForm, bool)> {
    let q = QuadraticForm::new(field(doc, "gram")?)?;
    let inv = doc.get("invariants").ok_or_else(|| Error::Parse("document lacks invariants".into()))?;
    Ok((q.clone(), invariants_json(&q.invariants()) == *inv))
}

fn verify_classify(doc: &Value) -> Result<Map<String, Value>> {
    let ctx = doc_context(doc)?;
    let mut checks = Map::new();
    if doc.get("q1").is_none() {
        let (q, same) = doc_invariants(doc)?;
        checks.insert("invariants".into(), json!(same));
        let d: Vec<PadicScalar> = field(doc, "diagonal")?;
        let d: Vec<PadicScalar> = d.iter().map(|x| x.in_context(q.ctx())).collect();
        let equivalent = QuadraticForm::diagonal(q.ctx(), &d)?.invariants() == q.invariants();
        checks.insert("diagonal_equivalent".into(), json!(equivalent));
        checks.insert("classes".into(), json!(class_labels(doc, "classes")? == square_classes(&d)?));
        return Ok(checks);
    }
    let (q1, same1) = doc_invariants(&doc["q1"])?;
    let (q2, same2) = doc_invariants(&doc["q2"])?;
    checks.insert("invariants".into(), json!(same1 && same2));
    let equivalent: bool = field(doc, "equivalent")?;
    checks.insert("equivalence".into(), json!(equivalent == (q1.invariants() == q2.invariants())));
    if equivalent {
        let gamma: PMatrix = field(doc, "gamma")?;
        let digits = isometry_agreement(&gamma, &q1, &q2)?;
        checks.insert(
            "isometry".into(),
            json!(digits >= ctx.precision() as i64 - ISOMETRY_SLACK),
        );
    }
    Ok(checks)
}

fn verify_distance(doc: &Value) -> Result<Map<String, Value>> {
    let ctx = doc_context(doc)?;
    let x_hnf: PMatrix = field(&doc["x"], "hnf")?;
    let c = ctx.with_precision(x_hnf.ctx().precision())?;
    let q0_diag: Vec<PadicScalar> = field(doc, "q0")?;
    let q0 = QuadraticForm::diagonal(c, &q0_diag.iter().map(|x| x.in_context(c)).collect::<Vec<_>>())?;
    let y_hnf: Option<PMatrix> = match doc.get("y") {
        Some(y) => Some(field(y, "hnf")?),
        None => None,
    };
    let x = LatticeClass::from_basis(&x_hnf)?;
    let fresh = distance_document(&x, y_hnf.as_ref(), &q0)?;
    let mut checks = Map::new();
    for key in [
        "x",
        "position_from_origin",
        "distance_from_origin",
        "sigma_x",
        "distance_to_sigma_x",
        "sigma_fixed",
        "standard_apartment",
        "y",
        "relative_position",
        "distance",
    ] {
        if fresh.get(key).is_some() || doc.get(key).is_some() {
            checks.insert(key.into(), json!(fresh.get(key) == doc.get(key)));
        }
    }
    Ok(checks)
}

fn verify_experiment(doc: &Value, jobs: usize) -> Result<Map<String, Value>> {
    let ctx = doc_context(doc)?;
    let n: usize = field(doc, "n")?;
    let mut config = ExperimentConfig::new(n, field(doc, "samples")?, field(doc, "V")?, field(doc, "seed")?);
    config.model = field::<SampleModel>(doc, "model")?;
    config.exact = !doc.get("gap").is_none_or(Value::is_null);
    config.jobs = jobs;
    let fresh = report_json(&run_experiment(ctx, n, &config)?);
    let mut checks = Map::new();
    checks.insert("reproduced".into(), json!(fresh == *doc));
    Ok(checks)
}
