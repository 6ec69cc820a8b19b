use mk_core::qseries::coideal_eigenvalue;
use mk_core::scalar::parse_rational;
use mk_core::*;
use std::result::Result;
use serde_json::{json, Value};

use crate::report::{error_object, f64_of, poly_json, usage, Failure, Precision as Num, Report};
use crate::{Command, NumericArgs, Precision};

pub const DEFAULT_GRID_TOL: f64 = 1e-12;
pub const DEFAULT_GRAM_THRESHOLD: f64 = 1e-10;
pub const DEFAULT_AW_THRESHOLD: f64 = 1e-9;
pub const DEFAULT_ROSENGREN_THRESHOLD: f64 = 1e-11;
pub const DEFAULT_SPECTRUM_THRESHOLD: f64 = 1e-10;

/// Recorded in every report.
pub fn defaults() -> Value {
    let f = TruncationPolicy::default();
    let h = TruncationPolicy::for_scalar::<Hp>();
    json!({
        "grid_tol": DEFAULT_GRID_TOL,
        "auto_grid_start": "2*max_degree+16",
        "auto_grid_max_doublings": torus::AUTO_GRID_MAX_DOUBLINGS,
        "trunc_eps": { "f64": f.epsilon, "hp": h.epsilon },
        "max_terms": { "f64": f.max_terms, "hp": h.max_terms },
        "singular_gram_threshold": koornwinder::SINGULAR_GRAM_THRESHOLD,
        "gram_warning_threshold": koornwinder::GRAM_WARNING_THRESHOLD,
        "gram_threshold": DEFAULT_GRAM_THRESHOLD,
        "aw_threshold": DEFAULT_AW_THRESHOLD,
        "rosengren_threshold": { "f64": DEFAULT_ROSENGREN_THRESHOLD, "hp": DEFAULT_ROSENGREN_THRESHOLD, "exact": 0.0 },
        "spectrum_threshold": DEFAULT_SPECTRUM_THRESHOLD,
        "hp_bits": hp::HP_BITS,
    })
}

pub fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Compute { .. } => "compute",
        Command::Gram { .. } => "gram",
        Command::Groundstate { .. } => "groundstate",
        Command::AwVerify { .. } => "aw-verify",
        Command::Rosengren { .. } => "rosengren",
        Command::Spectrum { .. } => "spectrum",
    }
}

pub fn run(cmd: &Command) -> Result<Report, Failure> {
    match cmd {
        Command::Compute { numeric, .. }
        | Command::Gram { numeric, .. }
        | Command::Groundstate { numeric, .. }
        | Command::AwVerify { numeric, .. } => match numeric.precision {
            Precision::F64 => run_numeric::<f64>(cmd, numeric),
            Precision::Hp => run_numeric::<Hp>(cmd, numeric),
            Precision::Exact => Err(usage(format!("--precision exact is only available for `rosengren`, not `{}`", name(cmd)))),
        },
        Command::Rosengren { m, sigma, q, threshold, precision } => {
            let thr = threshold.unwrap_or(if *precision == Precision::Exact { 0.0 } else { DEFAULT_ROSENGREN_THRESHOLD });
            check_threshold(thr)?;
            match precision {
                Precision::F64 => rosengren::<f64>(*m, sigma, q, thr, f64::parse_num),
                Precision::Hp => rosengren::<Hp>(*m, sigma, q, thr, Hp::parse_num),
                Precision::Exact => rosengren::<BigRational>(*m, sigma, q, thr, parse_rational),
            }
        }
        Command::Spectrum { m, sigma, q, threshold, precision } => {
            check_threshold(*threshold)?;
            match precision {
                Precision::F64 => spectrum_cmd::<f64>(*m, sigma, q, *threshold),
                Precision::Hp => spectrum_cmd::<Hp>(*m, sigma, q, *threshold),
                Precision::Exact => Err(usage("--precision exact is not available for `spectrum` (eigenvalues are irrational)")),
            }
        }
    }
}

fn check_threshold(t: f64) -> Result<(), Failure> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(usage(format!("threshold must be a finite number ≥ 0, got {t}")))
    }
}

fn parse_one<T>(s: &str, what: &str, parse: fn(&str) -> Option<T>) -> Result<T, Failure> {
    parse(s).ok_or_else(|| usage(format!("cannot parse {what} from {s:?}")))
}

fn parse_list<T: Num>(s: &str, len: usize, what: &str) -> Result<Vec<T>, Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != len {
        return Err(usage(format!("{what} needs {len} comma-separated values, got {}", parts.len())));
    }
    parts.iter().map(|p| parse_one(p, what, T::parse_num)).collect()
}

fn parse_int(s: &str, what: &str) -> Result<i64, Failure> {
    s.trim().parse().map_err(|_| usage(format!("{what}: expected an integer, got {s:?}")))
}

fn qbase<T: Scalar>(q: T) -> Result<QBase<T>, Failure> {
    QBase::new(q).map_err(|e| usage(format!("q: {e}")))
}

fn policy<T: Scalar>(a: &NumericArgs) -> Result<TruncationPolicy, Failure> {
    let base = TruncationPolicy::for_scalar::<T>();
    TruncationPolicy::new(a.trunc_eps.unwrap_or(base.epsilon), a.max_terms.unwrap_or(base.max_terms))
        .map_err(|e| usage(e.to_string()))
}

fn numeric_config<T: Num>(a: &NumericArgs) -> Value {
    json!({
        "grid": a.grid,
        "auto_grid": a.auto_grid || a.grid.is_none(),
        "grid_tol": a.grid_tol,
        "trunc_eps": a.trunc_eps,
        "max_terms": a.max_terms,
        "precision": T::NAME,
    })
}

fn validate_numeric(a: &NumericArgs) -> Result<(), Failure> {
    if let Some(m) = a.grid {
        QuadratureGrid::new(m, 1).map_err(|e| usage(format!("--grid: {e}")))?;
    }
    if !(a.grid_tol > 0.0) {
        return Err(usage("--grid-tol must be > 0"));
    }
    Ok(())
}

fn grid_for<T: Real>(
    a: &NumericArgs,
    max_degree: i64,
    rank: usize,
    params: &MKParams<T>,
    policy: &TruncationPolicy,
) -> mk_core::Result<QuadratureGrid> {
    match a.grid {
        Some(m) => QuadratureGrid::new(m, rank),
        None => auto_grid(max_degree, rank, params, a.grid_tol, policy),
    }
}

fn params_json<T: Num>(p: &MKParams<T>) -> Value {
    json!({
        "a": p.a.json(), "b": p.b.json(), "c": p.c.json(), "d": p.d.json(),
        "t": p.t.json(), "q": p.q.value().json(),
    })
}

fn parse_params<T: Num>(s: &str) -> Result<MKParams<T>, Failure> {
    let v: Vec<T> = parse_list(s, 6, "--params (a,b,c,d,t,q)")?;
    let [a, b, c, d, t, q]: [T; 6] = v.try_into().map_err(|_| usage("--params"))?;
    if !(t > T::zero() && t < T::one()) {
        return Err(usage("--params: t must lie in (0, 1)"));
    }
    Ok(MKParams::new(a, b, c, d, t, qbase(q)?))
}

/// Finishes a report from the outcome of a computation.
fn finish(mut report: Report, outcome: mk_core::Result<(Value, bool)>) -> Report {
    match outcome {
        Ok((result, pass)) => {
            report.result = result;
            report.pass = pass;
            report
        }
        Err(e) => report.fail_with(&e),
    }
}

fn run_numeric<T: Num>(cmd: &Command, numeric: &NumericArgs) -> Result<Report, Failure> {
    validate_numeric(numeric)?;
    let pol = policy::<T>(numeric)?;
    match cmd {
        Command::Compute { n, lambda, params, .. } => {
            let entries: Vec<i64> =
                lambda.split(',').map(|s| parse_int(s, "--lambda")).collect::<Result<_, _>>()?;
            if entries.len() != *n {
                return Err(usage(format!("--lambda has {} parts but --n is {n}", entries.len())));
            }
            let lambda = Partition::new(entries).map_err(|e| usage(format!("--lambda: {e}")))?;
            let params = parse_params::<T>(params)?;
            let report = Report::new(
                "compute",
                json!({ "n": n, "lambda": lambda.entries(), "params": params_json(&params), "numeric": numeric_config::<T>(numeric) }),
                Value::Null,
            );
            let outcome = grid_for(numeric, lambda.size(), *n, &params, &pol)
                .and_then(|grid| Ok((grid, mk_polynomial(&lambda, &params, &grid, &pol)?)))
                .map(|(grid, p)| {
                    let expansion: Vec<Value> = p
                        .expansion
                        .iter()
                        .map(|(mu, c)| json!({ "label": mu.entries(), "re": c.re.json(), "im": c.im.json() }))
                        .collect();
                    let result = json!({
                        "grid": grid.points_per_circle(),
                        "polynomial": poly_json(&p.poly),
                        "orbit_expansion": expansion,
                        "gram_diag": p.gram_diag.json(),
                        "condition": p.condition,
                    });
                    (result, true)
                });
            Ok(finish(report, outcome))
        }
        Command::Gram { n, max_deg, params, threshold, .. } => {
            check_threshold(*threshold)?;
            if *n == 0 || *max_deg < 0 {
                return Err(usage("gram needs --n ≥ 1 and --max-deg ≥ 0"));
            }
            let params = parse_params::<T>(params)?;
            let report = Report::new(
                "gram",
                json!({ "n": n, "max_deg": max_deg, "params": params_json(&params), "numeric": numeric_config::<T>(numeric) }),
                json!({ "off_diagonal": threshold }),
            );
            let outcome = grid_for(numeric, *max_deg, *n, &params, &pol)
                .and_then(|grid| Ok((grid, mk_family(*n, *max_deg, &params, &grid, &pol)?)))
                .map(|(grid, fam)| {
                    let labels: Vec<Value> = fam.polys.iter().map(|p| json!(p.label.entries())).collect();
                    let pass = fam.max_off_diagonal < *threshold;
                    let result = json!({
                        "grid": grid.points_per_circle(),
                        "labels": labels,
                        "residual": fam.residual,
                        "max_off_diagonal": fam.max_off_diagonal,
                    });
                    (result, pass)
                });
            Ok(finish(report, outcome))
        }
        Command::Groundstate { labels, .. } => {
            let parts: Vec<&str> = labels.split(',').collect();
            if parts.len() != 7 {
                return Err(usage(format!("--labels needs n,k1,k2,k,sigma,tau,q (7 values), got {}", parts.len())));
            }
            let n = parse_int(parts[0], "n")?;
            let k1 = parse_int(parts[1], "k1")?;
            let k2 = parse_int(parts[2], "k2")?;
            let k = parse_int(parts[3], "k")?;
            let sigma = parse_one(parts[4], "sigma", T::parse_num)?;
            let tau = parse_one(parts[5], "tau", T::parse_num)?;
            let q = qbase(parse_one(parts[6], "q", T::parse_num)?)?;
            if n < 1 {
                return Err(usage("n must be ≥ 1"));
            }
            let labels = SphericalLabels::new(n as usize, k1, k2, k, sigma, tau, q)
                .map_err(|e| usage(format!("--labels: {e}")))?;
            let report = Report::new("groundstate", labels_json(&labels, numeric), Value::Null);
            let outcome = ground_state_restriction(&labels).and_then(|f| {
                let mapped = spherical_parameter_map(&labels)?;
                Ok((
                    json!({
                        "ground_state": poly_json(&f),
                        "delta": delta_partition(labels.kappa, labels.kappa1, labels.n)?.entries(),
                        "mapped_params": params_json(&mapped),
                        "mapped_params_admissible": torus::admissible(&mapped),
                    }),
                    true,
                ))
            });
            Ok(finish(report, outcome))
        }
        Command::AwVerify { q, sigma, tau, k1, k2, k, max_mu, threshold, .. } => {
            check_threshold(*threshold)?;
            let q = qbase(parse_one(q, "--q", T::parse_num)?)?;
            let sigma = parse_one(sigma, "--sigma", T::parse_num)?;
            let tau = parse_one(tau, "--tau", T::parse_num)?;
            let labels =
                SphericalLabels::new(1, *k1, *k2, *k, sigma, tau, q).map_err(|e| usage(format!("labels: {e}")))?;
            let mut report = Report::new(
                "aw-verify",
                json!({ "labels": labels_json(&labels, numeric), "max_mu": max_mu }),
                json!({ "residual": threshold }),
            );
            let grid = spherical_parameter_map(&labels)
                .and_then(|params| Ok((grid_for(numeric, *max_mu as i64, 1, &params, &pol)?, params)));
            let (grid, params) = match grid {
                Ok(g) => g,
                Err(e) => return Ok(report.fail_with(&e)),
            };
            let mut rows = Vec::new();
            let mut pass = true;
            let mut first_error = None;
            for mu in 0..=*max_mu {
                match rankone::verify_theorem_iii_rank1(mu, &labels, &grid, &pol) {
                    Ok(check) => {
                        let ok = check.residual < *threshold;
                        pass &= ok;
                        let (sre, sim) = crate::report::complex_json(&check.scale);
                        rows.push(json!({ "mu": mu, "residual": check.residual, "pass": ok, "scale": { "re": sre, "im": sim } }));
                    }
                    Err(e) => {
                        pass = false;
                        rows.push(json!({ "mu": mu, "pass": false, "error": error_object(&e) }));
                        first_error.get_or_insert(e);
                    }
                }
            }
            report.result = json!({ "grid": grid.points_per_circle(), "mapped_params": params_json(&params), "per_mu": rows });
            report.pass = pass;
            report.error = first_error.as_ref().map(error_object);
            Ok(report)
        }
        Command::Rosengren { .. } | Command::Spectrum { .. } => unreachable!("dispatched separately"),
    }
}

fn labels_json<T: Num>(l: &SphericalLabels<T>, numeric: &NumericArgs) -> Value {
    json!({
        "n": l.n, "k1": l.kappa1, "k2": l.kappa2, "k": l.kappa,
        "sigma": l.sigma.json(), "tau": l.tau.json(), "q": l.q.value().json(),
        "numeric": numeric_config::<T>(numeric),
    })
}

fn rosengren<T: Scalar>(m: usize, sigma: &str, q: &str, threshold: f64, parse: fn(&str) -> Option<T>) -> Result<Report, Failure> {
    let s = parse_one(sigma, "--sigma", parse)?;
    let qb = qbase(parse_one(q, "--q", parse)?)?;
    let precision = if T::is_exact() { "exact" } else if T::epsilon() < f64::EPSILON { "hp" } else { "f64" };
    let report = Report::new(
        "rosengren",
        json!({ "m": m, "sigma": sigma.trim(), "q": q.trim(), "precision": precision }),
        json!({ "residual": threshold }),
    );
    let outcome = build_module(m, &qb).and_then(|module| rosengren_check(&module, &s)).map(|r| {
        (
            json!({ "dim": 2 * m + 1, "residual": r.residual, "condition": r.condition }),
            r.residual <= threshold && (threshold > 0.0 || r.residual == 0.0),
        )
    });
    Ok(finish(report, outcome))
}

fn spectrum_cmd<T: Num>(m: usize, sigma: &str, q: &str, threshold: f64) -> Result<Report, Failure> {
    let s = parse_one(sigma, "--sigma", T::parse_num)?;
    let qb = qbase(parse_one(q, "--q", T::parse_num)?)?;
    let report = Report::new(
        "spectrum",
        json!({ "m": m, "sigma": s.json(), "q": qb.value().json(), "precision": T::NAME }),
        json!({ "eigenvalue": threshold }),
    );
    let outcome = build_module(m, &qb).and_then(|module| spectrum(&module, &s)).and_then(|ev| {
        let mi = m as i64;
        let mut rows = Vec::new();
        let mut worst = 0.0f64;
        for (k, e) in ev.iter().enumerate() {
            let l = k as i64 - mi;
            let target = coideal_eigenvalue(l, &s, &qb)?;
            let diff = f64_of(&(e.clone() - target.clone()).abs());
            worst = worst.max(diff);
            rows.push(json!({ "l": l, "eigenvalue": e.json(), "s_l": target.json(), "abs_diff": diff }));
        }
        let simple = ev.windows(2).all(|w| w[1] > w[0]);
        Ok((json!({ "dim": ev.len(), "table": rows, "max_abs_diff": worst, "simple": simple }), worst < threshold && simple))
    });
    Ok(finish(report, outcome))
}

/// CSV rendering of a `gram` report: header of labels, one row per label.
pub fn gram_csv(report: &Report) -> String {
    let label = |v: &Value| -> String {
        v.as_array()
            .map(|a| a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            .unwrap_or_default()
    };
    let labels: Vec<String> = report.result["labels"].as_array().map(|a| a.iter().map(label).collect()).unwrap_or_default();
    let mut out = String::from("label");
    for l in &labels {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');
    if let Some(rows) = report.result["residual"].as_array() {
        for (l, row) in labels.iter().zip(rows) {
            out.push_str(l);
            for x in row.as_array().into_iter().flatten() {
                out.push(',');
                out.push_str(&x.to_string());
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        let v: Vec<f64> = parse_list("0.3,-0.2, 0.5,-0.4,0.6,0.5", 6, "p").unwrap();
        assert_eq!(v[1], -0.2);
        assert!(parse_list::<f64>("1,2", 6, "p").is_err());
        assert!(parse_list::<f64>("1,x,3", 3, "p").is_err());
        assert!(parse_params::<f64>("0.3,-0.2,0.5,-0.4,0.6,1.5").is_err());
    }

    #[test]
    fn csv_layout() {
        let mut r = Report::new("gram", Value::Null, Value::Null);
        r.result = json!({ "labels": [[0], [1]], "residual": [[1.0, 0.0], [0.0, 1.0]] });
        assert_eq!(gram_csv(&r), "label,0,1\n0,1.0,0.0\n1,0.0,1.0\n");
    }
}
