use std::fmt;
use std::path::Path;

use polylyap::dynamics::{boolean_equilibria, integrate_batch, lyapunov_monotonic, SimConfig, Terminal, Trajectory};
use polylyap::lyap::{
    converse_power_search, sample_points, search_sos_lyapunov, trajectory_check, LyapunovProblem,
    LyapunovResult, PowerAttempt, PowerSearch,
};
use polylyap::poly::rational::{format_rational, parse_rational};
use polylyap::poly::{lie_derivative, Rational, VectorField};
use polylyap::reductions::{
    augmented_point, boolean_zero, gadget, one_in_three_brute_force, GadgetBase, GadgetKind,
    GadgetSet, OneInThree, ReductionChain, Stage, GALLERY_NAMES,
};
use polylyap::sos::{check_sos, rationalize_with_schedule, BasisMode, SosVerdict};
use serde_json::{json, Value};

use crate::certfile::{self, Certificate, Evidence};
use crate::input::{gallery_params, Inputs};
use crate::plot::render_svg;
use crate::{
    BasisArg, CertifyArgs, CheckSosArgs, Command, FindArgs, GalleryArgs, MarginOpts, OracleArgs, ReduceArgs,
    SimulateArgs, StageArg, SweepArgs, EXIT_ERROR, EXIT_OK, EXIT_UNRESOLVED,
};

#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<polylyap::Error> for CliError {
    fn from(e: polylyap::Error) -> Self {
        CliError(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

pub struct Reply {
    pub status: String,
    pub code: i32,
    pub results: Value,
    pub diagnostics: Value,
}

impl Reply {
    fn new(status: &str, code: i32, results: Value) -> Self {
        Reply {
            status: status.into(),
            code,
            results,
            diagnostics: json!({}),
        }
    }

    fn with_diagnostics(mut self, d: Value) -> Self {
        self.diagnostics = d;
        self
    }

    pub fn error(e: &CliError) -> Self {
        Reply::new("error", EXIT_ERROR, json!({ "message": e.0 }))
    }
}

pub fn dispatch(cmd: &Command, inputs: &mut Inputs) -> CliResult<Reply> {
    match cmd {
        Command::CheckSos(a) => check_sos_cmd(a, inputs),
        Command::FindLyapunov(a) => find_cmd(a, inputs),
        Command::Sweep(a) => sweep_cmd(a, inputs),
        Command::Reduce(a) => reduce_cmd(a, inputs),
        Command::Oracle(a) => oracle_cmd(a, inputs),
        Command::Simulate(a) => simulate_cmd(a, inputs),
        Command::Certify(a) => certify_cmd(a, inputs),
        Command::Gallery(a) => gallery_cmd(a, inputs),
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError(format!("cannot write {}: {e}", path.display())))
}

/// Embeds the certificate and, when asked, writes it to its own file.
fn attach(results: &mut Value, cert: &Certificate, out: Option<&Path>) -> CliResult<()> {
    results["certificate"] = cert.to_value();
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&cert.to_value()).expect("certificate serializes") + "\n";
        write_file(path, &text)?;
        results["certificate_file"] = json!(path.display().to_string());
    }
    Ok(())
}

fn check_sos_cmd(a: &CheckSosArgs, inputs: &mut Inputs) -> CliResult<Reply> {
    let p = inputs.poly(&a.poly, None)?;
    let mode = match a.basis {
        Some(BasisArg::Full) => BasisMode::Full,
        Some(BasisArg::Homogeneous) => BasisMode::Homogeneous,
        Some(BasisArg::Newton) => BasisMode::Newton,
        None => BasisMode::default_for(&p),
    };
    let mut results = json!({ "polynomial": p.to_string(), "basis_mode": mode });
    let reply = match check_sos(&p, mode)? {
        SosVerdict::Sos(cert) => {
            let mut cert = cert;
            let mut note = Value::Null;
            if a.rationalize {
                match rationalize_with_schedule(&p, &cert)? {
                    SosVerdict::Sos(exact) => cert = exact,
                    SosVerdict::Indeterminate(m) => note = json!(m),
                    SosVerdict::NotSos(_) => unreachable!("rounding never refutes"),
                }
            }
            results["exact"] = json!(cert.gram.is_rational());
            results["basis_size"] = json!(cert.basis.len());
            if !note.is_null() {
                results["rounding"] = note;
            }
            attach(&mut results, &Certificate::sos(&p, &cert), a.cert_out.as_deref())?;
            Reply::new("sos", EXIT_OK, results)
        }
        SosVerdict::NotSos(ev) => {
            let cert = Certificate::not_sos(&p, &ev);
            results["evidence"] = json!(match &cert {
                Certificate::NotSos { evidence: Evidence::DualRay { .. }, .. } => "dual-ray",
                Certificate::NotSos { evidence: Evidence::OddDegree { .. }, .. } => "odd-degree",
                _ => "negative-value",
            });
            attach(&mut results, &cert, a.cert_out.as_deref())?;
            Reply::new("not-sos", EXIT_OK, results)
        }
        SosVerdict::Indeterminate(m) => {
            results["message"] = json!(m);
            Reply::new("unresolved", EXIT_UNRESOLVED, results)
        }
    };
    Ok(reply)
}

fn rational_flag(name: &str, s: &str) -> CliResult<Rational> {
    let r = parse_rational(s).ok_or_else(|| CliError(format!("invalid --{name} `{s}`")))?;
    if r < Rational::from_integer(0.into()) {
        return Err(CliError(format!("--{name} must be nonnegative")));
    }
    Ok(r)
}

fn problem(f: VectorField, degree: u32, homogeneous: bool, m: &MarginOpts) -> CliResult<LyapunovProblem> {
    let mut p = if m.plain {
        LyapunovProblem::plain(f, degree, homogeneous)
    } else {
        LyapunovProblem::new(f, degree, homogeneous)
    };
    if m.margin.is_some() || m.margin_deriv.is_some() {
        let e = match &m.margin {
            Some(s) => rational_flag("margin", s)?,
            None => p.margin.clone(),
        };
        let e2 = match &m.margin_deriv {
            Some(s) => rational_flag("margin-deriv", s)?,
            None => p.margin_deriv.clone(),
        };
        p = p.with_margins(e, e2);
    }
    Ok(p)
}

fn sim_check_config() -> SimConfig {
    SimConfig {
        t_end: 10.0,
        ..Default::default()
    }
}

/// JSON for one search result; `code` is the exit code it implies.
fn lyapunov_json(p: &LyapunovProblem, r: &LyapunovResult, trajectories: usize) -> CliResult<(Value, &'static str, i32)> {
    let mut out = json!({
        "degree": p.degree,
        "homogeneous": p.homogeneous,
        "margin": format_rational(&p.margin),
        "margin_deriv": format_rational(&p.margin_deriv),
    });
    Ok(match r {
        LyapunovResult::Found(c) => {
            out["v"] = json!(c.v.to_string());
            out["exact"] = json!(c.exact);
            out["certificate"] = Certificate::lyapunov(p, c).to_value();
            if trajectories > 0 {
                let chk = trajectory_check(&c.v, &p.field, trajectories, &sim_check_config())?;
                let monotone = chk.all_monotone();
                out["trajectory_check"] = json!({
                    "count": trajectories,
                    "all_monotone": monotone,
                    "terminals": chk.results.iter().map(|(_, t)| t).collect::<Vec<_>>(),
                });
                if !monotone {
                    out["message"] = json!("V increases along a simulated trajectory");
                    return Ok((out, "unresolved", EXIT_UNRESOLVED));
                }
            }
            (out, "found", EXIT_OK)
        }
        LyapunovResult::CertifiedInfeasible(c) => {
            out["certificate"] = Certificate::infeasible(p, c).to_value();
            (out, "infeasible", EXIT_OK)
        }
        LyapunovResult::Indeterminate(m) => {
            out["message"] = json!(m);
            (out, "unresolved", EXIT_UNRESOLVED)
        }
    })
}

fn find_cmd(a: &FindArgs, inputs: &mut Inputs) -> CliResult<Reply> {
    let f = inputs.system(&a.system, &a.gallery)?;
    if let Some(vspec) = &a.power_of {
        return power_cmd(a, f, vspec, inputs);
    }
    let degree = a.degree.expect("clap requires --degree without --power-of");
    let p = problem(f, degree, a.homogeneous, &a.margins)?;
    let r = search_sos_lyapunov(&p)?;
    let (mut results, status, code) = lyapunov_json(&p, &r, a.trajectories)?;
    if let (Some(path), Some(c)) = (&a.cert_out, results.get("certificate").cloned()) {
        write_file(path, &(serde_json::to_string_pretty(&c).expect("serializes") + "\n"))?;
        results["certificate_file"] = json!(path.display().to_string());
    }
    Ok(Reply::new(status, code, results).with_diagnostics(json!({ "field": p.field.to_text() })))
}

fn power_cmd(a: &FindArgs, f: VectorField, vspec: &str, inputs: &mut Inputs) -> CliResult<Reply> {
    let v = inputs.poly(vspec, Some(f.nvars()))?;
    let res = converse_power_search(&v, &f, a.k_max, a.planar)?;
    let failures = match &res {
        PowerSearch::FoundPower { failures, .. } | PowerSearch::NotFoundUpTo { failures, .. } => failures,
    };
    let mut failed = Vec::new();
    for (k, attempt) in failures {
        let mut entry = json!({ "k": k });
        match attempt {
            PowerAttempt::NotSos(ev) => {
                let product = polylyap::lyap::power_product(&v, &f, *k, a.planar)?;
                entry["verdict"] = json!("not-sos");
                entry["certificate"] = Certificate::not_sos(&product, ev).to_value();
            }
            PowerAttempt::Indeterminate(m) => {
                entry["verdict"] = json!("unresolved");
                entry["message"] = json!(m);
            }
        }
        failed.push(entry);
    }
    let mut results = json!({ "v": v.to_string(), "planar": a.planar, "k_max": a.k_max, "failures": failed });
    let (status, code) = match Certificate::power(&f, &v, a.planar, &res) {
        Some(cert) => {
            let PowerSearch::FoundPower { k, .. } = &res else { unreachable!() };
            results["k"] = json!(k);
            attach(&mut results, &cert, a.cert_out.as_deref())?;
            ("found", EXIT_OK)
        }
        None => ("not-found", EXIT_UNRESOLVED),
    };
    Ok(Reply::new(status, code, results))
}

fn sweep_cmd(a: &SweepArgs, inputs: &mut Inputs) -> CliResult<Reply> {
    let f = inputs.system(&a.system, &a.gallery)?;
    if a.degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError("--degrees must be strictly ascending".into()));
    }
    let mut rows = Vec::new();
    let mut code = EXIT_OK;
    let mut first_found = None;
    for &d in &a.degrees {
        let p = problem(f.clone(), d, a.homogeneous, &a.margins)?;
        let r = search_sos_lyapunov(&p)?;
        let (row, status, c) = lyapunov_json(&p, &r, 10)?;
        let mut row = row;
        row["status"] = json!(status);
        rows.push(row);
        code = code.max(c);
        if status == "found" && first_found.is_none() {
            first_found = Some(d);
            if a.stop_on_found {
                break;
            }
        }
    }
    let status = match (code, first_found) {
        (EXIT_UNRESOLVED, _) => "unresolved",
        (_, Some(_)) => "found",
        _ => "infeasible",
    };
    Ok(Reply::new(status, code, json!({ "degrees": rows, "first_found": first_found })))
}

fn reduce_cmd(a: &ReduceArgs, inputs: &mut Inputs) -> CliResult<Reply> {
    let inst = inputs.cnf(&a.cnf)?;
    let chain = ReductionChain::build(&inst)?;
    let stage = match a.emit {
        StageArg::Poly => Stage::Poly,
        StageArg::Form => Stage::Form,
        StageArg::Field => Stage::Field,
    };
    let mut results = json!({ "metadata": chain.metadata(&inst, stage) });
    let text = match &a.gadget {
        Some(name) => {
            let kind = GadgetKind::from_name(name).ok_or_else(|| {
                let names: Vec<_> = GadgetKind::ALL.iter().map(|k| k.name()).collect();
                CliError(format!("unknown gadget `{name}`, expected one of {}", names.join(", ")))
            })?;
            let base = if kind.takes_form() {
                GadgetBase::Form(chain.form.clone())
            } else {
                GadgetBase::Field(chain.field.clone())
            };
            let g = gadget(kind, &base)?;
            results["gadget"] = json!({
                "kind": kind,
                "identity_holds": g.identity.as_ref().map(|_| g.identity_holds()),
                "set": g.set.as_ref().map(set_json),
                "control": g.control.as_ref().map(|m| m.iter().map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()),
            });
            g.field.to_text()
        }
        None => match stage {
            Stage::Poly => chain.quartic.to_string() + "\n",
            Stage::Form => chain.form.to_string() + "\n",
            Stage::Field => chain.field.to_text(),
        },
    };
    match &a.output {
        Some(path) => {
            write_file(path, &text)?;
            results["output"] = json!(path.display().to_string());
        }
        None => results["text"] = json!(text),
    }
    Ok(Reply::new("written", EXIT_OK, results))
}

fn set_json(s: &GadgetSet) -> Value {
    match s {
        GadgetSet::Ball(r) => json!({ "ball_radius": format_rational(r) }),
        GadgetSet::Sublevel(p, c) => json!({ "sublevel": p.to_string(), "level": format_rational(c) }),
        GadgetSet::Polytope(hs) => json!({
            "polytope": hs.iter().map(|h| json!({
                "normal": h.normal.iter().map(format_rational).collect::<Vec<_>>(),
                "bound": format_rational(&h.bound),
            })).collect::<Vec<_>>()
        }),
    }
}

fn oracle_cmd(a: &OracleArgs, inputs: &mut Inputs) -> CliResult<Reply> {
    let inst = inputs.cnf(&a.cnf)?;
    let verdict = one_in_three_brute_force(&inst)?;
    let mut results = json!({ "nvars": inst.nvars(), "clauses": inst.clauses().len() });
    let (status, cert) = match &verdict {
        OneInThree::Satisfiable(x) => {
            results["assignment"] = json!(x);
            (
                "satisfiable",
                Certificate::OneInThreeWitness { cnf: inst.to_dimacs(), assignment: x.clone() },
            )
        }
        OneInThree::Unsatisfiable => ("unsatisfiable", Certificate::OneInThreeExhaustive { cnf: inst.to_dimacs() }),
    };
    if a.chain {
        let chain = ReductionChain::build(&inst)?;
        let zero = boolean_zero(&chain.quartic)?;
        let eq = boolean_equilibria(&chain.field, true)?;
        let agrees = zero.is_some() == verdict.is_satisfiable()
            && !eq.is_empty() == verdict.is_satisfiable()
            && match &verdict {
                OneInThree::Satisfiable(x) => eq.contains(&augmented_point(x)),
                OneInThree::Unsatisfiable => true,
            };
        results["chain"] = json!({
            "quartic_zero": zero,
            "equilibria": eq.iter().map(|p| p.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "agrees": agrees,
        });
        if !agrees {
            return Err(CliError("reduction chain disagrees with the oracle".into()));
        }
    }
    results["certificate"] = cert.to_value();
    Ok(Reply::new(status, EXIT_OK, results))
}

fn parse_point(s: &str, n: usize) -> CliResult<Vec<f64>> {
    let x: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError(format!("invalid --x0 `{s}`")))?;
    if x.len() != n {
        return Err(CliError(format!("--x0 `{s}` has {} entries, the system has {n} variables", x.len())));
    }
    Ok(x)
}

fn trajectories_csv(trajs: &[Trajectory], n: usize) -> String {
    let mut s = String::from("traj,t");
    for i in 1..=n {
        s.push_str(&format!(",x{i}"));
    }
    s.push('\n');
    for (k, t) in trajs.iter().enumerate() {
        for line in t.to_csv().lines().skip(1) {
            s.push_str(&format!("{k},{line}\n"));
        }
    }
    s
}

fn terminal_name(t: &Terminal) -> &'static str {
    match t {
        Terminal::Converged => "converged",
        Terminal::Escaped { non_finite: true } => "escaped-non-finite",
        Terminal::Escaped { non_finite: false } => "escaped",
        Terminal::MaxSteps => "max-steps",
        Terminal::TimeLimit => "time-limit",
    }
}

fn simulate_cmd(a: &SimulateArgs, inputs: &mut Inputs) -> CliResult<Reply> {
    let f = inputs.system(&a.system, &a.gallery)?;
    let n = f.nvars();
    let mut x0s = a.x0.iter().map(|s| parse_point(s, n)).collect::<CliResult<Vec<_>>>()?;
    if let Some(count) = a.random {
        x0s.extend(sample_points(n, count, a.radius));
    }
    if x0s.is_empty() {
        return Err(CliError("no initial states; pass --x0 or --random".into()));
    }
    let v = match &a.v {
        Some(spec) => Some(inputs.poly(spec, Some(n))?),
        None => None,
    };
    let cfg = SimConfig {
        t_end: a.t_end,
        max_steps: a.max_steps,
        abs_tol: a.abs_tol,
        rel_tol: a.rel_tol,
        ..Default::default()
    };
    let trajs = integrate_batch(&f, &x0s, &cfg)?;
    let mut rows = Vec::new();
    for t in &trajs {
        let mut row = json!({
            "x0": t.states[0],
            "terminal": terminal_name(&t.terminal),
            "steps": t.len() - 1,
            "t_final": t.times.last(),
            "x_final": t.last_state(),
        });
        if let Some(v) = &v {
            let m = lyapunov_monotonic(v, t)?;
            row["monotone"] = json!(m.is_monotone());
        }
        rows.push(row);
    }
    let mut results = json!({ "trajectories": rows });
    if let Some(v) = &v {
        results["v"] = json!(v.to_string());
        results["vdot"] = json!(lie_derivative(v, &f)?.to_string());
    }
    if let Some(path) = &a.svg {
        let svg = render_svg(&trajs, v.as_ref()).map_err(|e| CliError(e.0))?;
        write_file(path, &svg)?;
        results["svg"] = json!(path.display().to_string());
    }
    if let Some(path) = &a.csv {
        write_file(path, &trajectories_csv(&trajs, n))?;
        results["csv"] = json!(path.display().to_string());
    }
    Ok(Reply::new("simulated", EXIT_OK, results).with_diagnostics(json!({ "config": cfg })))
}

fn certify_cmd(a: &CertifyArgs, inputs: &mut Inputs) -> CliResult<Reply> {
    let text = inputs.read(&a.cert)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| {
        CliError(format!("{}: line {}, column {}: {e}", a.cert.display(), e.line(), e.column()))
    })?;
    let certs = certfile::collect(&doc).map_err(|e| CliError(format!("{}: {e}", a.cert.display())))?;
    if certs.is_empty() {
        return Err(CliError(format!("{}: no certificates found", a.cert.display())));
    }
    let mut rows = Vec::new();
    let mut all = true;
    for c in &certs {
        let ok = c.verify(a.tol).map_err(CliError)?;
        all &= ok;
        rows.push(json!({ "kind": c.kind(), "verified": ok }));
    }
    let results = json!({ "certificates": rows, "tolerance": a.tol });
    if all {
        Ok(Reply::new("verified", EXIT_OK, results))
    } else {
        Ok(Reply::new("rejected", EXIT_ERROR, results))
    }
}

fn gallery_cmd(a: &GalleryArgs, inputs: &mut Inputs) -> CliResult<Reply> {
    let Some(name) = &a.name else {
        let params = gallery_params(&a.gallery)?;
        let list = GALLERY_NAMES
            .iter()
            .map(|n| {
                let e = polylyap::reductions::gallery(n, &params)?;
                Ok(json!({ "name": e.name, "description": e.description, "params": e.params }))
            })
            .collect::<CliResult<Vec<_>>>()?;
        return Ok(Reply::new("listed", EXIT_OK, json!({ "systems": list })));
    };
    let e = inputs.gallery(name, &a.gallery)?;
    let text = e.field.to_text();
    let mut results = json!({ "name": e.name, "description": e.description, "params": e.params });
    match &a.output {
        Some(path) => {
            write_file(path, &text)?;
            results["output"] = json!(path.display().to_string());
        }
        None => results["text"] = json!(text),
    }
    Ok(Reply::new("written", EXIT_OK, results))
}
