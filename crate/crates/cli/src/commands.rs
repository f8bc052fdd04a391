use logmax::contour::{crosscheck, evaluate_nested, pole_tree, ContourSpec, CrosscheckStatus};
use logmax::extremes::{
    caveat, format_float, position_value_correlation, vm_cumulant, vm_laplace, CorrelationQuery, VmSpec,
};
use logmax::jacobi_moments::{moment, moment_negative_lshift, moment_terms, moment_with_terms};
use logmax::montecarlo::{
    circular_cos_moments, jacobi_moments, sample_fbm0_argmin, sample_gue_argmax, CircularParams, Fbm0Factor,
    JacobiParams, McEstimate, SamplerConfig,
};
use logmax::replica::{
    affine_moments, cauchy_conjecture_eval, circular_conjecture_eval, cumulants_from_moments, disorder_moment_at,
    freeze, replica_query, shape, Conjecture,
};
use logmax::{Error, Laurent, Model, MomentQuery, Rational, Result, Scalar};
use serde_json::json;

use crate::output::{Cell, Report};
use crate::{ChainArgs, Command, Ensemble, Jacobi, ModelArgs, ModelName, Variable};

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Divergent(_) | Error::Pole { .. } | Error::DivisionByZero => "divergent",
        Error::Invalid(_) | Error::Parse(_) => "invalid",
        Error::Precision | Error::TermBudget(_) => "budget",
        Error::Numerical(_) => "numerical",
        Error::Internal(_) => "internal",
    }
}

fn query(q: &Jacobi) -> MomentQuery<Rational> {
    MomentQuery::new(q.kappa.clone(), q.a.clone(), q.b.clone(), q.n.clone(), q.k)
}

fn model(m: &ModelArgs) -> Result<Model<Rational>> {
    let need = |v: &Option<Rational>, name: &str| {
        v.clone().ok_or_else(|| Error::Invalid(format!("--{name} is required for this model")))
    };
    Ok(match m.model {
        ModelName::Gue => Model::Gue { q: m.q.clone() },
        ModelName::Lcgp => Model::Lcgp { abar: need(&m.abar, "abar")?, bbar: need(&m.bbar, "bbar")? },
        ModelName::Fbm0 => Model::Fbm0,
        ModelName::Laguerre => Model::Laguerre { abar: need(&m.abar, "abar")? },
        ModelName::Gaussian => Model::Gaussian,
    })
}

fn variable_name(m: &Model<Rational>) -> &'static str {
    if m.is_jacobi() {
        "y"
    } else {
        "z"
    }
}

fn position_moment(m: &Model<Rational>, beta: Option<&Rational>, k: i64) -> Result<Rational> {
    match beta {
        Some(b) => disorder_moment_at(m, b, k),
        None => freeze(m, k),
    }
}

fn position_moments(m: &Model<Rational>, beta: Option<&Rational>, kmax: u32) -> Result<Vec<Rational>> {
    (1..=kmax as i64).map(|k| position_moment(m, beta, k)).collect()
}

fn laurent_text(l: &Laurent<Rational>) -> String {
    let mut parts = Vec::new();
    for e in l.valuation().min(0)..=0 {
        let Some(c) = l.coeff(e) else { break };
        if c.is_zero() {
            continue;
        }
        parts.push(match e {
            0 => c.to_string(),
            _ => format!("({c})·ε^{e}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn per_partition_frozen(r: &mut Report, m: &Model<Rational>, k: i64) -> Result<()> {
    if !m.is_jacobi() {
        return Err(Error::Invalid(format!("per-partition terms are only available for Jacobi models, not {}", m.name())));
    }
    let order = 16 + 2 * k.unsigned_abs() as usize;
    let beta = Laurent::<Rational>::var(order).add_int(1);
    let terms = moment_terms(&replica_query(m, &beta, k)?)?;
    let list: Vec<_> = terms
        .iter()
        .map(|(p, t)| json!({ "partition": p, "contribution": laurent_text(t) }))
        .collect();
    r.attachments.push(("per_partition".into(), json!(list)));
    Ok(())
}

fn predict(margs: &ModelArgs, k: Option<i64>, kmax: u32, beta: Option<&Rational>, per_partition: bool) -> Result<Report> {
    let m = model(margs)?;
    let v = variable_name(&m);
    let gue = matches!(m, Model::Gue { .. });
    let ycol = format!("{v}_moment");
    let mut cols = vec!["k", ycol.as_str()];
    if gue {
        cols.push("x_moment");
    }
    let mut r = Report::new(&cols);
    r.summary("model", m.to_string());
    r.summary("beta", beta.cloned().unwrap_or_else(Rational::one));
    let xmoments = |ms: &[Rational]| affine_moments(ms, &Rational::one(), &Rational::integer(-2));
    match k {
        Some(k) if k > 0 => {
            let ms = position_moments(&m, beta, k as u32)?;
            let mut row: Vec<Cell> = vec![k.into(), ms[k as usize - 1].clone().into()];
            if gue {
                row.push(xmoments(&ms)[k as usize - 1].clone().into());
            }
            r.row(row);
        }
        Some(k) => {
            let mut row: Vec<Cell> = vec![k.into(), position_moment(&m, beta, k)?.into()];
            if gue {
                row.push(Cell::Missing);
            }
            r.row(row);
        }
        None => {
            let ms = position_moments(&m, beta, kmax)?;
            let xs = xmoments(&ms);
            for (i, y) in ms.iter().enumerate() {
                let mut row: Vec<Cell> = vec![(i as i64 + 1).into(), y.clone().into()];
                if gue {
                    row.push(xs[i].clone().into());
                }
                r.row(row);
            }
            if kmax >= 2 {
                let c = cumulants_from_moments(&ms);
                r.summary("mean", c[0].clone());
                r.summary("variance", c[1].clone());
                if gue {
                    r.summary("x_variance", xs[1].clone() - xs[0].clone() * xs[0].clone());
                }
                if kmax >= 4 {
                    let s = shape(&c)?;
                    r.summary("skewness_squared", s.skewness_squared);
                    r.summary("skewness_sign", s.skewness_sign as i64);
                    r.summary("kurtosis", s.kurtosis);
                }
            }
        }
    }
    if per_partition {
        if beta.is_some() {
            return Err(Error::Invalid("--per-partition expands around the frozen point; drop --beta".into()));
        }
        per_partition_frozen(&mut r, &m, k.unwrap_or(kmax as i64))?;
    }
    Ok(r)
}

fn cumulants(margs: &ModelArgs, kmax: u32, beta: Option<&Rational>) -> Result<Report> {
    let m = model(margs)?;
    let ms = position_moments(&m, beta, kmax)?;
    let c = cumulants_from_moments(&ms);
    let col = format!("{}_cumulant", variable_name(&m));
    let mut r = Report::new(&["k", col.as_str()]);
    for (i, v) in c.into_iter().enumerate() {
        r.row(vec![(i as i64 + 1).into(), v.into()]);
    }
    r.summary("model", m.to_string());
    r.summary("beta", beta.cloned().unwrap_or_else(Rational::one));
    Ok(r)
}

fn moment_cmd(q: &Jacobi, per_partition: bool, shift: Option<i64>) -> Result<Report> {
    let mq = query(q);
    let mut r = Report::new(&["kappa", "a", "b", "n", "k", "value"]);
    let row = |v: Rational| -> Vec<Cell> {
        vec![q.kappa.clone().into(), q.a.clone().into(), q.b.clone().into(), q.n.clone().into(), q.k.into(), v.into()]
    };
    if let Some(l) = shift {
        r.row(row(moment_negative_lshift(&mq, l)?));
        r.summary("shift", l);
        return Ok(r);
    }
    if per_partition {
        let (v, terms) = moment_with_terms(&mq)?;
        r.row(row(v));
        let list: Vec<_> = terms.iter().map(|(p, t)| json!({ "partition": p, "contribution": t })).collect();
        r.attachments.push(("per_partition".into(), json!(list)));
    } else {
        r.row(row(moment(&mq)?));
    }
    Ok(r)
}

fn contour_cmd(q: &Jacobi, tree: bool, max_nodes: usize) -> Result<Report> {
    let spec = ContourSpec::for_query(&query(q))?;
    let mut r = Report::new(&["kind", "k", "value"]);
    let v = evaluate_nested(&spec)?;
    r.row(vec![spec.kind.name().into(), q.k.into(), v.into()]);
    if tree {
        let t = pole_tree(&spec, max_nodes)?;
        r.attachments.push(("pole_tree".into(), serde_json::to_value(&t).expect("serializable")));
    }
    Ok(r)
}

fn crosscheck_cmd(q: &Jacobi) -> Result<Report> {
    let rep = crosscheck(&query(q))?;
    let mut r = Report::new(&["kind", "partition_sum", "contour", "status"]);
    let status = match &rep.status {
        CrosscheckStatus::Equal => "equal".to_string(),
        CrosscheckStatus::Mismatch => "MISMATCH".to_string(),
        CrosscheckStatus::Skipped(why) => format!("skipped: {why}"),
    };
    r.row(vec![
        rep.kind.map_or(Cell::Missing, |k| k.name().into()),
        rep.partition_sum.into(),
        rep.contour.into(),
        status.into(),
    ]);
    if rep.status == CrosscheckStatus::Mismatch {
        return Err(Error::Internal(format!("engines disagree for {:?}", rep.query)));
    }
    Ok(r)
}

fn conjecture_cmd(ensemble: Ensemble, kappa: &Rational, weight: &Rational, n: &Rational, k: i64) -> Result<Report> {
    let Conjecture(v) = match ensemble {
        Ensemble::Circular => circular_conjecture_eval(kappa, weight, n, k)?,
        Ensemble::Cauchy => cauchy_conjecture_eval(kappa, weight, n, k)?,
    };
    let obs = match ensemble {
        Ensemble::Circular => "cos(kθ)",
        Ensemble::Cauchy => "Re((i−z)/(i+z))^k",
    };
    let mut r = Report::new(&["observable", "k", "value", "status"]);
    r.row(vec![obs.into(), k.into(), v.into(), "CONJECTURE".into()]);
    Ok(r)
}

fn vmin_cmd(margs: &ModelArgs, pmax: u32, digits: u32, laplace: &[Rational]) -> Result<Report> {
    let m = model(margs)?;
    let spec = VmSpec::for_model(&m, digits)?;
    let mut r = Report::new(&["quantity", "order", "value", "digits"]);
    for p in 1..=pmax {
        let v = vm_cumulant(&spec, p)?;
        r.row(vec!["cumulant".into(), (p as i64).into(), format_float(&v, digits).into(), (digits as i64).into()]);
    }
    for n in laplace {
        let v = vm_laplace(&spec, n)?;
        r.row(vec!["laplace".into(), Cell::Exact(n.clone()), format_float(&v, digits).into(), (digits as i64).into()]);
    }
    r.summary("model", m.to_string());
    r.summary("a", spec.a.clone());
    r.summary("b", spec.b.clone());
    Ok(r)
}

fn corr_cmd(margs: &ModelArgs, k: u32, order: u32, variable: Variable) -> Result<Report> {
    let m = model(margs)?;
    let q = match variable {
        Variable::Y => CorrelationQuery::moment(m.clone(), k as usize, order),
        Variable::X => CorrelationQuery::x_moment(m.clone(), k, order),
    };
    let v = position_value_correlation(&q)?;
    let obs = format!("{}^{k}", if variable == Variable::X { "x" } else { "y" });
    let mut r = Report::new(&["observable", "order", "value"]);
    r.row(vec![obs.into(), (order as i64).into(), v.into()]);
    r.summary("model", m.to_string());
    if let Some(c) = caveat(&m) {
        r.note(format!("CAVEAT: {c}"));
    }
    Ok(r)
}

fn appendix_c(name: ModelName) -> Result<Report> {
    let m = match name {
        ModelName::Fbm0 => Model::Fbm0,
        ModelName::Gue => Model::gue(),
        other => return Err(Error::Invalid(format!("no appendix table for {other:?}"))),
    };
    let ms = logmax::replica::frozen_moments(&m, 14)?;
    let cs = cumulants_from_moments(&ms[..12]);
    let mut r = Report::new(&["kind", "k", "value"]);
    for k in (6..=14).step_by(2) {
        r.row(vec!["moment".into(), (k as i64).into(), ms[k - 1].clone().into()]);
    }
    for k in (4..=12).step_by(2) {
        r.row(vec!["cumulant".into(), (k as i64).into(), cs[k - 1].clone().into()]);
    }
    Ok(r)
}

fn mc_report(rows: Vec<(String, String, McEstimate, Option<f64>)>, against: bool) -> Report {
    let mut cols = vec!["observable", "size", "estimate", "stderr", "samples", "seed"];
    if against {
        cols.extend(["exact", "z"]);
    }
    let mut r = Report::new(&cols);
    for (obs, size, e, exact) in rows {
        let mut row: Vec<Cell> = vec![
            obs.into(),
            size.into(),
            e.mean.into(),
            e.stderr.into(),
            (e.samples as i64).into(),
            format!("{:#x}", e.seed).into(),
        ];
        if against {
            row.push(exact.map_or(Cell::Missing, Cell::Float));
            row.push(exact.map_or(Cell::Missing, |x| Cell::Float(e.z_score(x))));
        }
        r.row(row);
    }
    r
}

fn chain_config(c: &ChainArgs) -> SamplerConfig {
    SamplerConfig {
        sweeps: c.sweeps,
        burn_in: c.burn_in,
        thin: c.thin,
        batches: c.batches,
        seed: c.seed,
        ..Default::default()
    }
}

fn exact_f64(v: Result<Rational>) -> Option<f64> {
    v.ok().map(|q| q.to_f64())
}

pub fn run(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Moment { q, per_partition, shift } => moment_cmd(q, *per_partition, *shift),
        Command::Contour { q, pole_tree, max_nodes } => contour_cmd(q, *pole_tree, *max_nodes),
        Command::Crosscheck { q } => crosscheck_cmd(q),
        Command::Predict { model, k, kmax, beta, per_partition } => predict(model, *k, *kmax, beta.as_ref(), *per_partition),
        Command::Cumulants { model, kmax, beta } => cumulants(model, *kmax, beta.as_ref()),
        Command::Conjecture { ensemble, kappa, weight, n, k } => conjecture_cmd(*ensemble, kappa, weight, n, *k),
        Command::Vmin { model, pmax, digits, laplace } => vmin_cmd(model, *pmax, *digits, laplace),
        Command::Corr { model, k, order, variable } => corr_cmd(model, *k, *order, *variable),
        Command::Table { table: _, model } => appendix_c(*model),
        Command::McJacobi { kappa, a, b, n, k, chain, against_exact } => {
            let p = JacobiParams::new(kappa.to_f64(), a.to_f64(), b.to_f64(), *n)?;
            let est = jacobi_moments(&chain_config(chain), &p, k)?;
            let nq = Rational::integer(*n as i64);
            let rows = k
                .iter()
                .zip(est)
                .map(|(&k, e)| {
                    let exact = against_exact
                        .then(|| exact_f64(moment(&MomentQuery::new(kappa.clone(), a.clone(), b.clone(), nq.clone(), k as i64))))
                        .flatten();
                    (format!("y^{k}"), n.to_string(), e, exact)
                })
                .collect();
            Ok(mc_report(rows, *against_exact))
        }
        Command::McCircular { kappa, mu, n, k, chain, against_exact } => {
            let p = CircularParams::new(kappa.to_f64(), mu.to_f64(), *n)?;
            let est = circular_cos_moments(&chain_config(chain), &p, k)?;
            let nq = Rational::integer(*n as i64);
            let rows = k
                .iter()
                .zip(est)
                .map(|(&k, e)| {
                    let exact = against_exact
                        .then(|| circular_conjecture_eval(kappa, mu, &nq, k as i64).ok().map(|c| c.0.to_f64()))
                        .flatten();
                    (format!("cos({k}θ)"), n.to_string(), e, exact)
                })
                .collect();
            let mut r = mc_report(rows, *against_exact);
            if *against_exact {
                r.note("exact column is a CONJECTURE");
            }
            Ok(r)
        }
        Command::McGue { sizes, realizations, grid, seed, against_exact } => {
            let cfg = SamplerConfig { realizations: *realizations, grid: *grid, seed: *seed, ..Default::default() };
            let m = Model::gue();
            let ys = logmax::replica::frozen_moments(&m, 4)?;
            let xs = affine_moments(&ys, &Rational::one(), &Rational::integer(-2));
            let c = cumulants_from_moments(&xs);
            let kurt = shape(&c)?.kurtosis.to_f64();
            let mut rows = Vec::new();
            let mut notes = Vec::new();
            for &n in sizes {
                let g = sample_gue_argmax(&cfg, n)?;
                let size = n.to_string();
                rows.push(("x^2".to_string(), size.clone(), g.x2, Some(xs[1].to_f64())));
                rows.push(("x^4".to_string(), size.clone(), g.x4, Some(xs[3].to_f64())));
                rows.push(("1/(1-x)".to_string(), size.clone(), g.inverse, Some(2.0)));
                rows.push(("kurtosis".to_string(), size.clone(), g.kurtosis, Some(kurt)));
                rows.push(("spectrum_m2".to_string(), size, g.spectrum_m2, Some(0.25)));
                notes.push(format!("N={n}: scale variable 1/[10(ln N)^3] = {:.6e}, discarded {}", g.scale_variable, g.discarded));
            }
            let mut r = mc_report(rows, *against_exact);
            r.notes = notes;
            r.note("exact columns are N → ∞ values; finite-N data are reported raw");
            Ok(r)
        }
        Command::McFbm0 { grid, eta, realizations, seed, against_exact } => {
            let f = Fbm0Factor::new(*grid, *eta, 1.0)?;
            let cfg = SamplerConfig { realizations: *realizations, seed: *seed, ..Default::default() };
            let a = sample_fbm0_argmin(&cfg, &f)?;
            let size = grid.to_string();
            let mut rows = vec![("y-1/2".to_string(), size.clone(), a.centered, Some(0.0))];
            for (k, e) in a.moments.into_iter().enumerate() {
                let exact = exact_f64(freeze(&Model::Fbm0, k as i64 + 1));
                rows.push((format!("y^{}", k + 1), size.clone(), e, exact));
            }
            let mut r = mc_report(rows, *against_exact);
            r.summary("eta", *eta);
            r.summary("jitter", f.jitter);
            Ok(r)
        }
    }
}
