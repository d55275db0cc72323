use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use fedosov_core::algebroid::ChartJson;
use fedosov_core::fedosov::{
    characteristic_class, curvature, fedosov_construct, gauge_apply, gauge_solve, mask_key, Connection, ConnectionJson,
    CurvatureClass, GaugeOutcome,
};
use fedosov_core::quantization::{bidiff_tensor, verify_star, Quantizer, SampleSpec};
use fedosov_core::text::{format_poly, format_series, parse_poly};
use fedosov_core::torus::{fourier_moyal, format_fourier, random_fourier, trace_torus, FourierPoly};
use fedosov_core::{AlgebroidChart, Error, MultiPoly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{self, located, Job, Overrides};
use crate::{Common, Failure};

pub struct Report {
    pub pass: bool,
    pub json: Value,
    pub text: Vec<String>,
}

/// Loads the job, runs the command and writes `report.json` and
/// `report.txt`. Returns whether the run passed. A mathematical failure
/// after the job is loaded still leaves a failing report behind.
pub fn run<F>(name: &str, c: &Common, f: F) -> Result<bool, Failure>
where
    F: FnOnce(&Job) -> Result<Report, Failure>,
{
    let job = config::load(
        &c.config,
        Overrides {
            order: c.order,
            seed: c.seed,
            out: c.out.clone(),
        },
    )?;
    let report = match f(&job) {
        Ok(r) => r,
        Err(Failure::Math(m)) => {
            let failed = Report {
                pass: false,
                json: json!({ "command": name, "error": m }),
                text: vec![format!("{name}: {m}")],
            };
            emit(&job, failed, false)?;
            return Err(Failure::Math(m));
        }
        Err(usage) => return Err(usage),
    };
    emit(&job, report, true)
}

fn emit(job: &Job, report: Report, echo: bool) -> Result<bool, Failure> {
    std::fs::create_dir_all(&job.out_dir).map_err(|e| io(&job.out_dir, e))?;
    let mut json = report.json;
    json["pass"] = Value::Bool(report.pass);
    write(&job.out_dir.join("report.json"), &pretty(&json)?)?;
    let mut text = report.text.join("\n");
    text.push('\n');
    text.push_str(if report.pass { "result: PASS\n" } else { "result: FAIL\n" });
    write(&job.out_dir.join("report.txt"), &text)?;
    if echo {
        print!("{text}");
    }
    Ok(report.pass)
}

fn io(p: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", p.display()))
}

fn write(p: &Path, s: &str) -> Result<(), Failure> {
    std::fs::write(p, s).map_err(|e| io(p, e))
}

fn pretty<T: Serialize>(v: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn math(e: Error) -> Failure {
    match e {
        Error::Json(m) => Failure::Usage(m),
        other => Failure::Math(other.to_string()),
    }
}

/// The `build` artifact.
#[derive(Serialize, Deserialize)]
struct BuildArtifact {
    chart: ChartJson,
    theta: BTreeMap<String, String>,
    connection: ConnectionJson,
    certificate: Certificate,
}

#[derive(Serialize, Deserialize)]
struct Certificate {
    flat: bool,
    /// Lowest Fedosov degree with non-central curvature.
    first_defect: Option<i32>,
    curvature: BTreeMap<String, String>,
}

fn validated_chart(job: &Job) -> Result<Arc<AlgebroidChart>, Failure> {
    let chart = job.chart()?;
    let report = chart.validate();
    if let Some(bad) = report.checks.iter().find(|c| !c.pass) {
        return Err(Failure::Math(format!(
            "chart fails `{}` at {:?}: residual {}",
            bad.axiom, bad.witness, bad.residual
        )));
    }
    if !chart.is_darboux() {
        return Err(Failure::Math(Error::NotDarboux.to_string()));
    }
    Ok(chart)
}

/// Rejects a non-closed `θ` with the first nonzero component of `^Edθ`.
fn closed_theta(chart: &AlgebroidChart, theta: &CurvatureClass) -> Result<(), Failure> {
    if theta.is_closed(chart).map_err(math)? {
        return Ok(());
    }
    let d = chart.d(theta.theta()).map_err(math)?;
    let (m, s) = d.coeffs().iter().next().expect("not closed");
    Err(Failure::Math(format!(
        "theta is not closed: d(theta)[{}] = {}",
        mask_key(*m),
        format_series(s)
    )))
}

fn build_from(
    job: &Job,
    chart: &Arc<AlgebroidChart>,
    gamma_at: &str,
    gamma: &Option<Vec<Vec<Vec<String>>>>,
    theta_at: &str,
    theta: &BTreeMap<String, String>,
) -> Result<(Connection, CurvatureClass), Failure> {
    let gamma = job.gamma_of(gamma_at, gamma, chart)?;
    let theta = job.theta_of(theta_at, theta, chart)?;
    closed_theta(chart, &theta)?;
    let c = fedosov_construct(chart, gamma.as_ref(), &theta, job.config.order).map_err(math)?;
    Ok((c, theta))
}

fn load_artifact(job: &Job, path: &Path, chart: &Arc<AlgebroidChart>) -> Result<(Connection, CurvatureClass), Failure> {
    let p = job.resolve(path);
    let text = std::fs::read_to_string(&p).map_err(|e| io(&p, e))?;
    let art: BuildArtifact = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}:{}:{}: {e}", p.display(), e.line(), e.column())))?;
    let built_for = AlgebroidChart::from_json_value(&art.chart).map_err(|e| located(&p.display().to_string(), e))?;
    let (a, b) = (built_for.to_json_value(), chart.to_json_value());
    if a.base_vars != b.base_vars || a.anchor != b.anchor || a.structure != b.structure || a.omega != b.omega {
        return Err(Failure::Usage(format!("{}: artifact was built for a different chart", p.display())));
    }
    if job.config.order != art.connection.order {
        return Err(Failure::Usage(format!(
            "{}: artifact has order {}, job asks for {}",
            p.display(),
            art.connection.order,
            job.config.order
        )));
    }
    let c = Connection::from_json(chart, &art.connection).map_err(|e| located(&p.display().to_string(), e))?;
    let theta = CurvatureClass::from_json(chart, &art.theta, (art.connection.order / 2) as i32)
        .map_err(|e| located(&p.display().to_string(), e))?;
    Ok((c, theta))
}

/// The job's connection: the referenced artifact, or a fresh construction.
fn connection(job: &Job) -> Result<(Arc<AlgebroidChart>, Connection, CurvatureClass), Failure> {
    let chart = validated_chart(job)?;
    let (c, theta) = match &job.config.connection {
        Some(p) => load_artifact(job, p, &chart)?,
        None => build_from(job, &chart, "gamma", &job.config.gamma, "theta", &job.config.theta)?,
    };
    Ok((chart, c, theta))
}

fn quantizer(job: &Job) -> Result<(Arc<AlgebroidChart>, Quantizer), Failure> {
    let (chart, c, _) = connection(job)?;
    Ok((chart, Quantizer::new(&c).map_err(math)?))
}

fn chart_label(job: &Job) -> Value {
    match &job.config.chart {
        config::ChartSpec::Catalogue { catalogue, params } => json!({ "catalogue": catalogue, "params": params }),
        config::ChartSpec::Inline { .. } => json!("inline"),
    }
}

pub fn check(job: &Job) -> Result<Report, Failure> {
    let chart = job.chart()?;
    let v = chart.validate();
    let mut text = vec![format!("check: rank {}, base {}", chart.rank(), chart.base_vars().join(", "))];
    for c in v.checks.iter() {
        let w = c
            .witness
            .as_ref()
            .map(|w| format!(" witness ({})", w.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")))
            .unwrap_or_default();
        text.push(format!(
            "  {}: {}{} residual {}",
            c.axiom,
            if c.pass { "pass" } else { "FAIL" },
            w,
            c.residual
        ));
    }
    text.push(format!("  darboux frame: {}", chart.is_darboux()));
    Ok(Report {
        pass: v.all_pass(),
        json: json!({
            "command": "check",
            "chart": chart_label(job),
            "axioms": v.checks,
            "darboux": chart.is_darboux(),
        }),
        text,
    })
}

fn certificate(c: &Connection) -> Result<Certificate, Failure> {
    let curv = curvature(c).map_err(math)?;
    Ok(Certificate {
        flat: curv.weyl.is_zero(),
        first_defect: curv.weyl.min_degree(),
        curvature: curv.scalar.to_json(),
    })
}

pub fn build(job: &Job) -> Result<Report, Failure> {
    let chart = validated_chart(job)?;
    let (c, theta) = build_from(job, &chart, "gamma", &job.config.gamma, "theta", &job.config.theta)?;
    let cert = certificate(&c)?;
    let matches = cert.curvature == theta.to_json();
    let art = BuildArtifact {
        chart: chart.to_json_value(),
        theta: theta.to_json(),
        connection: c.to_json(),
        certificate: cert,
    };
    std::fs::create_dir_all(&job.out_dir).map_err(|e| io(&job.out_dir, e))?;
    let path = job.out_dir.join("connection.json");
    write(&path, &pretty(&art)?)?;
    let degrees: Vec<i32> = art.connection.a.keys().copied().collect();
    let trivial = degrees == [-1];
    let text = vec![
        format!("build: order {}, rank {}", job.config.order, chart.rank()),
        format!("  A components in Fedosov degrees {degrees:?}{}", if trivial { " (A = A_-1)" } else { "" }),
        format!("  curvature central: {}", art.certificate.flat),
        format!("  curvature equals theta: {matches}"),
        "  wrote connection.json".to_string(),
    ];
    Ok(Report {
        pass: art.certificate.flat && matches,
        json: json!({
            "command": "build",
            "chart": chart_label(job),
            "order": job.config.order,
            "degrees": degrees,
            "flat": art.certificate.flat,
            "first_defect": art.certificate.first_defect,
            "class_matches_theta": matches,
            "artifact": "connection.json",
        }),
        text,
    })
}

fn parse_arg(name: &str, s: &str, chart: &AlgebroidChart) -> Result<MultiPoly, Failure> {
    parse_poly(s, chart.base_vars()).map_err(|e| located(&format!("argument {name}"), e))
}

pub fn star(job: &Job, f: &str, g: &str) -> Result<Report, Failure> {
    let chart = job.chart()?;
    let (fp, gp) = (parse_arg("F", f, &chart)?, parse_arg("G", g, &chart)?);
    let (_, q) = quantizer(job)?;
    let s = q.star(&fp, &gp).map_err(math)?;
    let out = format_series(&s);
    Ok(Report {
        pass: true,
        json: json!({
            "command": "star",
            "f": format_poly(&fp),
            "g": format_poly(&gp),
            "hbar_order": q.hbar_order(),
            "product": out,
        }),
        text: vec![format!("({}) * ({}) = {out}   [through hbar^{}]", format_poly(&fp), format_poly(&gp), q.hbar_order())],
    })
}

pub fn tensor(job: &Job) -> Result<Report, Failure> {
    let (chart, q) = quantizer(job)?;
    let k = job.config.tensor.hbar_order.unwrap_or(q.hbar_order());
    let d = job.config.tensor.degree_bound.unwrap_or(job.config.order as u32);
    let t = bidiff_tensor(&q, k, d).map_err(math)?;
    std::fs::create_dir_all(&job.out_dir).map_err(|e| io(&job.out_dir, e))?;
    write(&job.out_dir.join("tensor.json"), &pretty(&t.to_json())?)?;
    // the tables must reproduce the product on random inputs within the bound
    let mut rng = ChaCha8Rng::seed_from_u64(job.config.seed);
    let mut checks = Vec::new();
    for i in 0..job.config.samples.count {
        let f = fedosov_core::sample::random_poly(&mut rng, chart.base_vars(), d, 3);
        let g = fedosov_core::sample::random_poly(&mut rng, chart.base_vars(), d, 3);
        let res = t
            .apply(&f, &g)
            .and_then(|a| a.try_sub(&q.star(&f, &g)?.truncate(t.order())))
            .map_err(math)?;
        checks.push(json!({ "sample": i, "pass": res.is_zero(), "residual": format_series(&res) }));
    }
    let pass = checks.iter().all(|c| c["pass"] == true);
    let sizes: Vec<usize> = (0..=t.order() as usize).map(|k| t.table(k).len()).collect();
    Ok(Report {
        pass,
        json: json!({
            "command": "tensor",
            "hbar_order": t.order(),
            "degree_bound": d,
            "records_per_order": sizes,
            "reproduction_checks": checks,
            "artifact": "tensor.json",
        }),
        text: vec![
            format!("tensor: hbar order {}, degree bound {d}", t.order()),
            format!("  records per order {sizes:?}"),
            format!("  reproduces the product on {} samples: {pass}", job.config.samples.count),
        ],
    })
}

pub fn verify(job: &Job) -> Result<Report, Failure> {
    let (_, q) = quantizer(job)?;
    let spec = SampleSpec {
        count: job.config.samples.count,
        degree: job.config.samples.degree,
        seed: job.config.seed,
    };
    let r = verify_star(&q, &spec).map_err(math)?;
    let mut text = vec![format!(
        "verify: {} samples, degree {}, seed {}, hbar order {}",
        spec.count, spec.degree, spec.seed, r.hbar_order
    )];
    let mut by_identity: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for c in r.checks.iter() {
        let e = by_identity.entry(&c.identity).or_default();
        e.0 += c.pass as usize;
        e.1 += 1;
    }
    for (id, (ok, all)) in by_identity.iter() {
        text.push(format!("  {id}: {ok}/{all}"));
    }
    for c in r.failures() {
        text.push(format!(
            "  FAIL {} sample {} at hbar^{}: {}",
            c.identity,
            c.sample,
            c.failing_order.unwrap_or(0),
            c.residual
        ));
    }
    Ok(Report {
        pass: r.all_pass(),
        json: json!({ "command": "verify", "sample": spec, "report": r }),
        text,
    })
}

pub fn class(job: &Job) -> Result<Report, Failure> {
    let (_, c, theta) = connection(job)?;
    let cls = characteristic_class(&c).map_err(math)?;
    let max = (c.order() / 2) as i32;
    let matches = cls == theta.truncate(max);
    let mut text = vec![format!("class: through hbar^{max}")];
    for (k, v) in cls.to_json() {
        text.push(format!("  theta[{k}] = {v}"));
    }
    text.push(format!("  equals the input theta: {matches}"));
    Ok(Report {
        pass: matches,
        json: json!({ "command": "class", "theta": cls.to_json(), "matches_input": matches }),
        text,
    })
}

pub fn gauge(job: &Job) -> Result<Report, Failure> {
    let (chart, target, _) = connection(job)?;
    let spec = &job.config.gauge;
    let (source, _) = match &spec.connection {
        Some(p) => load_artifact(job, p, &chart)?,
        None => {
            let gamma = spec.gamma.clone().or_else(|| job.config.gamma.clone());
            let theta = spec.theta.as_ref().unwrap_or(&job.config.theta);
            build_from(job, &chart, "gauge.gamma", &gamma, "gauge.theta", theta)?
        }
    };
    match gauge_solve(&target, &source).map_err(math)? {
        GaugeOutcome::Obstruction { degree, residual } => {
            let res: BTreeMap<String, String> =
                residual.coeffs().iter().map(|(m, p)| (mask_key(*m), format_poly(p))).collect();
            Ok(Report {
                pass: false,
                json: json!({ "command": "gauge", "outcome": "obstruction", "degree": degree, "residual": res }),
                text: vec![
                    format!("gauge: obstruction in Fedosov degree {degree}"),
                    format!("  non-exact class difference {res:?}"),
                ],
            })
        }
        GaugeOutcome::Equivalent(sol) => {
            let moved = gauge_apply(&sol.deltas, &source.shift_scalar(&sol.alpha).map_err(math)?).map_err(math)?;
            let d = target.order() as i32;
            let residual = target.full_form().try_sub(&moved.full_form()).map_err(math)?.truncate_degree(d);
            let ok = residual.is_zero();
            let alpha: BTreeMap<String, String> =
                sol.alpha.coeffs().iter().map(|(m, s)| (mask_key(*m), format_series(s))).collect();
            let deltas: Vec<String> = sol.deltas.iter().map(|g| g.to_string()).collect();
            std::fs::create_dir_all(&job.out_dir).map_err(|e| io(&job.out_dir, e))?;
            let file = json!({ "alpha": alpha, "deltas": deltas });
            write(&job.out_dir.join("gauge.json"), &pretty(&file)?)?;
            Ok(Report {
                pass: ok,
                json: json!({
                    "command": "gauge",
                    "outcome": "equivalent",
                    "steps": deltas.len(),
                    "reproduces_target": ok,
                    "residual": residual.to_json(),
                    "artifact": "gauge.json",
                }),
                text: vec![
                    format!("gauge: equivalent, {} gauge steps, scalar shift {alpha:?}", deltas.len()),
                    format!("  transported connection equals the target through degree {d}: {ok}"),
                ],
            })
        }
    }
}

pub fn trace(job: &Job) -> Result<Report, Failure> {
    let t = &job.config.torus;
    if t.n == 0 || t.max_freq < 0 {
        return Err(Failure::Usage("torus.n must be positive and torus.max_freq non-negative".into()));
    }
    let trunc = job.config.order as i32;
    let mut rng = ChaCha8Rng::seed_from_u64(job.config.seed);
    let mut samples = Vec::new();
    let mut pass = true;
    for i in 0..t.samples {
        let f = random_fourier(&mut rng, t.n, t.max_freq, t.terms, trunc);
        let g = random_fourier(&mut rng, t.n, t.max_freq, t.terms, trunc);
        let comm = fourier_moyal(&f, &g)
            .and_then(|a| a.try_sub(&fourier_moyal(&g, &f)?))
            .map_err(math)?;
        let tr = trace_torus(&comm);
        pass &= tr.is_zero();
        samples.push(json!({
            "sample": i,
            "f": format_fourier(&f),
            "g": format_fourier(&g),
            "trace_of_commutator": tr.to_string(),
        }));
    }
    let one = trace_torus(&FourierPoly::one(t.n, trunc)).to_string();
    Ok(Report {
        pass,
        json: json!({ "command": "trace", "n": t.n, "hbar_order": trunc, "trace_of_one": one, "samples": samples }),
        text: vec![
            format!("trace: torus T^{}, hbar order {trunc}", 2 * t.n),
            format!("  Tr(1) = {one}"),
            format!("  commutators with zero trace: {pass} ({} samples)", t.samples),
        ],
    })
}
