//! Command dispatch: problem in, certificate out.

use sha2::{Digest, Sha256};

use renyivar::dist::{abs_cont, rel_entropy, renyi_div};
use renyivar::markov::{abs_cont_pair, rel_entropy_rate, renyi_rate};
use renyivar::oracles::{
    easyvar_oracle, random_search_extremum, rel_entropy_rate_oracle, renyi_rate_oracle, ConvergenceReport, LimitReport,
    SearchProblem, HILL_CLIMB_TOLERANCE, SEARCH_TOLERANCE,
};
use renyivar::spectral::{class_perrons, classes, growth_rate, PerronData};
use renyivar::var_iid::{
    acd_certify, acd_inf, acd_sup, certify_inequality, dv_solve, gibbs_objective, log_exp_integral, solve_variational,
};
use renyivar::var_markov::{
    certify_markov_acd, certify_markov_inequality, markov_acd_inf, markov_acd_sup, rho_identities_check,
    solve_markov_variational, varadhan_growth, varadhan_objective, varadhan_solve,
};
use renyivar::{tol, Alpha, CertResult, Dist, Error, ExtReal, MarkovVarSolution, Regime, VarSolution};

use crate::cert::Node;
use crate::problem::{parse, Body, Kind, OracleTarget, Problem, VarForm};
use crate::{CliError, Result};

/// Default path length for convergence oracles.
pub const DEFAULT_N_MAX: usize = 500;

/// Default number of random-search trials.
pub const DEFAULT_TRIALS: usize = 1000;

/// Default gap accepted between a difference-mode oracle and its limit.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Div,
    Rate,
    Growth,
    Solve,
    Certify,
    Oracle,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Div => "div",
            Command::Rate => "rate",
            Command::Growth => "growth",
            Command::Solve => "solve",
            Command::Certify => "certify",
            Command::Oracle => "oracle",
        }
    }
}

/// Command-line overrides. Each takes precedence over the file's `options`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Flags {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub node: Node,
    pub pass: bool,
}

fn is_markov(kind: Kind) -> bool {
    matches!(kind, Kind::MarkovRate | Kind::MarkovVariational | Kind::MarkovAcd)
}

fn default_tolerance(command: Command, problem: &Problem) -> f64 {
    match (command, &problem.body) {
        (Command::Oracle, Body::Oracle(OracleTarget::RandomSearch(_))) => SEARCH_TOLERANCE,
        (Command::Oracle, _) => ORACLE_TOLERANCE,
        (Command::Solve | Command::Certify, _) if is_markov(problem.kind) => tol::MARKOV_CERTIFY,
        (Command::Solve | Command::Certify, _) => tol::IID_CERTIFY,
        _ => tol::EQUALITY,
    }
}

/// Parse `input`, run `command`, and assemble the certificate.
pub fn run(command: Command, input: &[u8], flags: Flags) -> Result<Certificate> {
    let text = std::str::from_utf8(input).map_err(|e| CliError::Syntax {
        line: 1 + input[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count(),
        column: 1,
        message: "input is not valid UTF-8".into(),
    })?;
    let problem = parse(text)?;
    let tolerance = flags.tol.or(problem.options.tol).unwrap_or_else(|| default_tolerance(command, &problem));
    let (result, pass) = match command {
        Command::Div => div(&problem)?,
        Command::Rate => rate(&problem)?,
        Command::Growth => growth(&problem, tolerance)?,
        Command::Solve => solve(&problem, tolerance)?,
        Command::Certify => certify(&problem, tolerance)?,
        Command::Oracle => oracle(&problem, tolerance, flags.seed)?,
    };
    let node = Node::map(vec![
        ("library", "renyivar".into()),
        ("version", renyivar::VERSION.into()),
        ("command", command.as_str().into()),
        ("kind", problem.kind.as_str().into()),
        ("input_sha256", Node::Str(hex::encode(Sha256::digest(input)))),
        ("tolerance", tolerance.into()),
        ("result", result),
        ("pass", pass.into()),
    ]);
    Ok(Certificate { node, pass })
}

fn unsupported(command: Command, problem: &Problem) -> CliError {
    CliError::Unsupported { command: command.as_str(), kind: problem.kind.as_str() }
}

fn needed<'a, T>(x: &'a Option<T>, name: &str, command: Command) -> Result<&'a T> {
    x.as_ref().ok_or_else(|| CliError::field(name, format!("required by command `{}`", command.as_str())))
}

fn alpha_node(alpha: Option<Alpha>) -> Node {
    Node::opt(alpha.map(|a| a.value().into()))
}

fn regime_node(regime: Option<Regime>) -> Node {
    Node::opt(regime.map(|r| r.as_str().into()))
}

fn div(problem: &Problem) -> Result<(Node, bool)> {
    let Body::IidDivergence { alpha, nu, theta } = &problem.body else {
        return Err(unsupported(Command::Div, problem));
    };
    let value = match alpha {
        Some(a) => renyi_div(*a, nu, theta)?,
        None => rel_entropy(nu, theta)?,
    };
    let node = Node::map(vec![
        ("divergence", if alpha.is_some() { "renyi" } else { "relative_entropy" }.into()),
        ("alpha", alpha_node(*alpha)),
        ("abs_cont", abs_cont(nu, theta)?.into()),
        ("value", value.into()),
    ]);
    Ok((node, true))
}

fn rate(problem: &Problem) -> Result<(Node, bool)> {
    let Body::MarkovRate { alpha, nu, theta } = &problem.body else {
        return Err(unsupported(Command::Rate, problem));
    };
    let value = match alpha {
        Some(a) => renyi_rate(*a, nu, theta)?,
        None => rel_entropy_rate(nu, theta)?,
    };
    let node = Node::map(vec![
        ("rate", if alpha.is_some() { "renyi" } else { "relative_entropy" }.into()),
        ("alpha", alpha_node(*alpha)),
        ("abs_cont", abs_cont_pair(nu, theta)?.into()),
        ("value", value.into()),
    ]);
    Ok((node, true))
}

fn perron_node(p: &PerronData, relative_residual: f64) -> Node {
    Node::map(vec![
        ("class", Node::ints(&p.class)),
        ("lambda", p.lambda.into()),
        ("log_lambda", p.log_lambda.into()),
        ("right", Node::nums(&p.right)),
        ("left", Node::nums(&p.left)),
        ("relative_residual", relative_residual.into()),
    ])
}

fn growth(problem: &Problem, tolerance: f64) -> Result<(Node, bool)> {
    let Body::Growth { m } = &problem.body else {
        return Err(unsupported(Command::Growth, problem));
    };
    let all: Vec<usize> = (0..m.dim()).collect();
    let dec = classes(m, &all);
    let class_nodes = dec
        .classes
        .iter()
        .zip(&dec.cyclic)
        .map(|(c, &cyc)| Node::map(vec![("states", Node::ints(c)), ("cyclic", cyc.into())]))
        .collect();
    let mut pass = true;
    let mut perrons = Vec::new();
    for p in class_perrons(&m.to_log(), &all)? {
        let rel = p.residual(m) / p.lambda;
        pass &= rel <= tolerance;
        perrons.push(perron_node(&p, rel));
    }
    let node = Node::map(vec![
        ("value", growth_rate(m)?.into()),
        ("classes", Node::List(class_nodes)),
        ("perron", Node::List(perrons)),
    ]);
    Ok((node, pass))
}

fn iid_solution(sol: &VarSolution) -> Node {
    Node::map(vec![
        ("value", sol.value.into()),
        ("optimizer", Node::opt(sol.optimizer.as_ref().map(|d| Node::nums(d.weights())))),
        ("residual", sol.residual.into()),
    ])
}

fn markov_solution(sol: &MarkovVarSolution) -> Node {
    Node::map(vec![
        ("value", sol.value.into()),
        ("optimizer", Node::opt(sol.optimizer.as_ref().map(|p| Node::matrix(&p.rows())))),
        ("class_used", Node::ints(&sol.class_used)),
        ("log_perron_root", Node::opt(sol.perron.as_ref().map(|p| p.log_lambda.into()))),
        ("residual", sol.residual.into()),
    ])
}

/// Merge `{formula, alpha, regime}` in front of a solution node.
fn with_header(formula: &str, alpha: Option<Alpha>, regime: Option<Regime>, body: Node) -> Node {
    let mut fields = vec![
        ("formula".to_string(), formula.into()),
        ("alpha".to_string(), alpha_node(alpha)),
        ("regime".to_string(), regime_node(regime)),
    ];
    if let Node::Map(rest) = body {
        fields.extend(rest);
    }
    Node::Map(fields)
}

fn solve(problem: &Problem, tolerance: f64) -> Result<(Node, bool)> {
    let ok = |r: f64| r <= tolerance;
    let out = match &problem.body {
        Body::IidVariational(VarForm::Renyi { alpha, nu, theta, .. }) => {
            let sol = solve_variational(*alpha, nu, theta)?;
            (with_header("renyi", Some(*alpha), sol.regime, iid_solution(&sol)), ok(sol.residual))
        }
        Body::IidVariational(VarForm::Gibbs { g, mu, .. }) => {
            let sol = dv_solve(g, mu)?;
            (with_header("gibbs", None, None, iid_solution(&sol)), ok(sol.residual))
        }
        Body::IidAcd { alpha, g, nu, theta } => {
            let sup = theta.as_ref().map(|t| acd_sup(*alpha, g, t)).transpose()?;
            let inf = nu.as_ref().map(|n| acd_inf(*alpha, g, n)).transpose()?;
            let pass = sup.iter().chain(&inf).all(|s| ok(s.residual));
            let node = Node::map(vec![
                ("formula", "exp_integral".into()),
                ("alpha", alpha_node(Some(*alpha))),
                ("regime", regime_node(Some(Regime::of(*alpha)))),
                ("sup", Node::opt(sup.as_ref().map(iid_solution))),
                ("inf", Node::opt(inf.as_ref().map(iid_solution))),
            ]);
            (node, pass)
        }
        Body::MarkovVariational(VarForm::Renyi { alpha, nu, theta, .. }) => {
            let sol = solve_markov_variational(*alpha, nu, theta)?;
            (with_header("renyi", Some(*alpha), sol.regime, markov_solution(&sol)), ok(sol.residual))
        }
        Body::MarkovVariational(VarForm::Gibbs { g, mu, .. }) => {
            let sol = varadhan_solve(g, mu)?;
            (with_header("gibbs", None, None, markov_solution(&sol)), ok(sol.residual))
        }
        Body::MarkovAcd { alpha, g, nu, theta } => {
            let sup = theta.as_ref().map(|t| markov_acd_sup(*alpha, g, t)).transpose()?;
            let inf = nu.as_ref().map(|n| markov_acd_inf(*alpha, g, n)).transpose()?;
            let pass = sup.iter().chain(&inf).all(|s| ok(s.residual));
            let node = Node::map(vec![
                ("formula", "exp_integral".into()),
                ("alpha", alpha_node(Some(*alpha))),
                ("regime", regime_node(Some(Regime::of(*alpha)))),
                ("sup", Node::opt(sup.as_ref().map(markov_solution))),
                ("inf", Node::opt(inf.as_ref().map(markov_solution))),
            ]);
            (node, pass)
        }
        _ => return Err(unsupported(Command::Solve, problem)),
    };
    Ok(out)
}

fn cert_node(inequality: &str, alpha: Option<Alpha>, c: CertResult) -> Node {
    Node::map(vec![
        ("inequality", inequality.into()),
        ("alpha", alpha_node(alpha)),
        ("regime", regime_node(alpha.map(Regime::of))),
        ("slack", c.slack.into()),
        ("pass", c.pass.into()),
    ])
}

/// Slack of `closed ≥ objective` judged at `tolerance`.
fn gibbs_cert(closed: ExtReal, objective: ExtReal, tolerance: f64) -> CertResult {
    CertResult::new(closed.gap(objective), tolerance)
}

fn certify(problem: &Problem, tolerance: f64) -> Result<(Node, bool)> {
    let c = Command::Certify;
    let out = match &problem.body {
        Body::IidVariational(VarForm::Renyi { alpha, nu, theta, mu }) => {
            let r = certify_inequality(*alpha, needed(mu, "mu", c)?, nu, theta)?.with_tolerance(tolerance);
            (cert_node("renyi", Some(*alpha), r), r.pass)
        }
        Body::IidVariational(VarForm::Gibbs { g, mu, theta }) => {
            let theta: &Dist = needed(theta, "theta", c)?;
            let closed = ExtReal::Finite(log_exp_integral(g, mu)?);
            let r = gibbs_cert(closed, gibbs_objective(g, theta, mu)?, tolerance);
            (cert_node("gibbs", None, r), r.pass)
        }
        Body::IidAcd { alpha, g, nu, theta } => {
            let r = acd_certify(*alpha, g, needed(nu, "nu", c)?, needed(theta, "theta", c)?)?.with_tolerance(tolerance);
            (cert_node("exp_integral", Some(*alpha), r), r.pass)
        }
        Body::MarkovVariational(VarForm::Renyi { alpha, nu, theta, mu }) => {
            let r = certify_markov_inequality(*alpha, needed(mu, "mu", c)?, nu, theta)?.with_tolerance(tolerance);
            (cert_node("renyi", Some(*alpha), r), r.pass)
        }
        Body::MarkovVariational(VarForm::Gibbs { g, mu, theta }) => {
            let theta = needed(theta, "theta", c)?;
            let r = gibbs_cert(varadhan_growth(g, mu)?, varadhan_objective(g, theta, mu)?, tolerance);
            (cert_node("gibbs", None, r), r.pass)
        }
        Body::MarkovAcd { alpha, g, nu, theta } => {
            let theta = needed(theta, "theta", c)?;
            let r = certify_markov_acd(*alpha, g, needed(nu, "nu", c)?, theta)?.with_tolerance(tolerance);
            let (rho, rho_pass) = match rho_identities_check(*alpha, g, theta) {
                Ok(rep) => {
                    let pass = rep.drift_tilted <= tolerance && rep.drift_weighted <= tolerance;
                    let node = Node::map(vec![
                        ("rho_n", rep.rho_n.into()),
                        ("rho_m", rep.rho_m.into()),
                        ("drift_tilted", rep.drift_tilted.into()),
                        ("drift_weighted", rep.drift_weighted.into()),
                        ("pass", pass.into()),
                    ]);
                    (node, pass)
                }
                // no twisted optimizer exists, so there is nothing to check
                Err(Error::Infeasible(_)) => (Node::Null, true),
                Err(e) => return Err(e.into()),
            };
            let mut node = cert_node("exp_integral", Some(*alpha), r);
            if let Node::Map(fields) = &mut node {
                fields.push(("rho_identities".into(), rho));
            }
            (node, r.pass && rho_pass)
        }
        _ => return Err(unsupported(c, problem)),
    };
    Ok(out)
}

fn report_node(r: &ConvergenceReport) -> Node {
    let seq = r.sequence.iter().map(|(n, v)| Node::List(vec![Node::Int(*n as u64), (*v).into()])).collect();
    Node::map(vec![("final_gap", r.final_gap.into()), ("sequence", Node::List(seq))])
}

fn limit_node(name: &str, alpha: Option<Alpha>, n_max: usize, rep: &LimitReport, tolerance: f64) -> (Node, bool) {
    let pass = rep.difference.final_gap <= tolerance;
    let node = Node::map(vec![
        ("oracle", name.into()),
        ("alpha", alpha_node(alpha)),
        ("n_max", n_max.into()),
        ("limit_claim", rep.difference.limit_claim.into()),
        ("cesaro", report_node(&rep.cesaro)),
        ("difference", report_node(&rep.difference)),
    ]);
    (node, pass)
}

fn search_name(p: &SearchProblem) -> &'static str {
    match p {
        SearchProblem::IidRenyi { .. } => "iid_renyi",
        SearchProblem::IidExpIntegral { .. } => "iid_exp_integral",
        SearchProblem::IidAcd { .. } => "iid_acd",
        SearchProblem::MarkovRenyi { .. } => "markov_renyi",
        SearchProblem::MarkovExpIntegral { .. } => "markov_exp_integral",
        SearchProblem::MarkovAcd { .. } => "markov_acd",
    }
}

fn oracle(problem: &Problem, tolerance: f64, seed: Option<u64>) -> Result<(Node, bool)> {
    let n_max = problem.options.n_max.unwrap_or(DEFAULT_N_MAX);
    let out = match &problem.body {
        Body::MarkovRate { alpha: Some(a), nu, theta } => {
            limit_node("renyi_rate", Some(*a), n_max, &renyi_rate_oracle(*a, nu, theta, n_max)?, tolerance)
        }
        Body::MarkovRate { alpha: None, nu, theta } => {
            limit_node("rel_entropy_rate", None, n_max, &rel_entropy_rate_oracle(nu, theta, n_max)?, tolerance)
        }
        Body::Oracle(OracleTarget::Easyvar { g, mu }) => {
            limit_node("easyvar", None, n_max, &easyvar_oracle(g, mu, n_max)?, tolerance)
        }
        Body::Oracle(OracleTarget::RandomSearch(p)) => {
            let trials = problem.options.trials.unwrap_or(DEFAULT_TRIALS);
            let seed = seed.or(problem.options.seed).unwrap_or(0);
            let rep = random_search_extremum(p, trials, seed)?;
            let climb_ok = rep.hill_climb.as_ref().is_none_or(|h| h.gap <= HILL_CLIMB_TOLERANCE);
            let pass = rep.violation <= tolerance && climb_ok;
            let climb = rep.hill_climb.as_ref().map(|h| {
                Node::map(vec![("value", h.value.into()), ("gap", h.gap.into()), ("sweeps", h.sweeps.into())])
            });
            let node = Node::map(vec![
                ("oracle", "random_search".into()),
                ("problem", search_name(p).into()),
                ("trials", trials.into()),
                ("seed", Node::Int(seed)),
                ("is_sup", rep.is_sup.into()),
                ("reference", rep.reference.into()),
                ("best", rep.best.into()),
                ("best_trial", Node::opt(rep.best_trial.map(Node::from))),
                ("violation", rep.violation.into()),
                ("hill_climb", Node::opt(climb)),
            ]);
            (node, pass)
        }
        _ => return Err(unsupported(Command::Oracle, problem)),
    };
    Ok(out)
}
