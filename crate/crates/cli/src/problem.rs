//! Problem files: one JSON object with a `kind`, the objects that kind
//! needs, and optional `options`.
//!
//! Distributions are arrays, pair measures and edge functions are row-major
//! nested arrays. Every object must share one alphabet size, and fields not
//! used by the kind are rejected.

use std::collections::BTreeSet;

use serde_json::{Map, Value};

use renyivar::oracles::SearchProblem;
use renyivar::{Alpha, BoundedFn, Dist, EdgeFn, NonnegMatrix, PairMeasure};

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    IidDivergence,
    IidVariational,
    IidAcd,
    MarkovRate,
    MarkovVariational,
    MarkovAcd,
    Growth,
    Oracle,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::IidDivergence,
        Kind::IidVariational,
        Kind::IidAcd,
        Kind::MarkovRate,
        Kind::MarkovVariational,
        Kind::MarkovAcd,
        Kind::Growth,
        Kind::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::IidDivergence => "iid_divergence",
            Kind::IidVariational => "iid_variational",
            Kind::IidAcd => "iid_acd",
            Kind::MarkovRate => "markov_rate",
            Kind::MarkovVariational => "markov_variational",
            Kind::MarkovAcd => "markov_acd",
            Kind::Growth => "growth",
            Kind::Oracle => "oracle",
        }
    }

    fn parse(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Options {
    pub tol: Option<f64>,
    pub n_max: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

/// Either the Rényi form (`alpha`, `nu`, `theta`, optional `mu`) or the
/// Gibbs form (`g`, `mu`, optional `theta`).
#[derive(Debug, Clone, PartialEq)]
pub enum VarForm<P, G> {
    Renyi { alpha: Alpha, nu: P, theta: P, mu: Option<P> },
    Gibbs { g: G, mu: P, theta: Option<P> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleTarget {
    Easyvar { g: EdgeFn, mu: PairMeasure },
    RandomSearch(SearchProblem),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    IidDivergence { alpha: Option<Alpha>, nu: Dist, theta: Dist },
    IidVariational(VarForm<Dist, BoundedFn>),
    IidAcd { alpha: Alpha, g: BoundedFn, nu: Option<Dist>, theta: Option<Dist> },
    MarkovRate { alpha: Option<Alpha>, nu: PairMeasure, theta: PairMeasure },
    MarkovVariational(VarForm<PairMeasure, EdgeFn>),
    MarkovAcd { alpha: Alpha, g: EdgeFn, nu: Option<PairMeasure>, theta: Option<PairMeasure> },
    Growth { m: NonnegMatrix },
    Oracle(OracleTarget),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub kind: Kind,
    pub body: Body,
    pub options: Options,
}

/// Field reader that remembers which keys were consumed and which
/// alphabet size has been seen.
struct Fields<'a> {
    map: &'a Map<String, Value>,
    used: BTreeSet<&'static str>,
    dim: Option<(usize, &'static str)>,
}

impl<'a> Fields<'a> {
    fn new(map: &'a Map<String, Value>) -> Self {
        Self { map, used: BTreeSet::from(["kind", "options"]), dim: None }
    }

    fn take(&mut self, name: &'static str) -> Option<&'a Value> {
        self.used.insert(name);
        self.map.get(name)
    }

    fn has(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }

    fn check_dim(&mut self, name: &'static str, d: usize) -> Result<()> {
        match self.dim {
            None => self.dim = Some((d, name)),
            Some((d0, first)) if d0 != d => {
                return Err(CliError::field(name, format!("dimension {d} does not match dimension {d0} of `{first}`")));
            }
            Some(_) => {}
        }
        Ok(())
    }

    fn number(&mut self, name: &'static str) -> Result<Option<f64>> {
        match self.take(name) {
            None => Ok(None),
            Some(v) => v.as_f64().map(Some).ok_or_else(|| CliError::field(name, "expected a number")),
        }
    }

    fn string(&mut self, name: &'static str) -> Result<Option<&'a str>> {
        match self.take(name) {
            None => Ok(None),
            Some(v) => v.as_str().map(Some).ok_or_else(|| CliError::field(name, "expected a string")),
        }
    }

    fn vector(&mut self, name: &'static str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.take(name) else { return Ok(None) };
        let values = numbers(v).ok_or_else(|| CliError::field(name, "expected an array of numbers"))?;
        if values.is_empty() {
            return Err(CliError::field(name, "array is empty"));
        }
        self.check_dim(name, values.len())?;
        Ok(Some(values))
    }

    fn matrix(&mut self, name: &'static str) -> Result<Option<Vec<Vec<f64>>>> {
        let Some(v) = self.take(name) else { return Ok(None) };
        let rows: Option<Vec<Vec<f64>>> = v.as_array().and_then(|rs| rs.iter().map(numbers).collect());
        let rows = rows.ok_or_else(|| CliError::field(name, "expected a nested array of numbers (rows)"))?;
        if rows.is_empty() {
            return Err(CliError::field(name, "matrix is empty"));
        }
        if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != rows.len()) {
            return Err(CliError::field(
                format!("{name}[{r}]"),
                format!("row has {} entries, expected {} (square matrix)", row.len(), rows.len()),
            ));
        }
        self.check_dim(name, rows.len())?;
        Ok(Some(rows))
    }

    fn alpha(&mut self) -> Result<Option<Alpha>> {
        self.number("alpha")?.map(|a| Alpha::new(a).map_err(|e| CliError::field("alpha", e))).transpose()
    }

    fn dist(&mut self, name: &'static str) -> Result<Option<Dist>> {
        self.vector(name)?.map(|w| Dist::new(w).map_err(|e| CliError::field(name, e))).transpose()
    }

    fn pair(&mut self, name: &'static str) -> Result<Option<PairMeasure>> {
        self.matrix(name)?.map(|r| PairMeasure::new(r).map_err(|e| CliError::field(name, e))).transpose()
    }

    fn bounded_fn(&mut self, name: &'static str) -> Result<Option<BoundedFn>> {
        self.vector(name)?.map(|v| BoundedFn::new(v).map_err(|e| CliError::field(name, e))).transpose()
    }

    fn edge_fn(&mut self, name: &'static str) -> Result<Option<EdgeFn>> {
        self.matrix(name)?.map(|r| EdgeFn::new(r).map_err(|e| CliError::field(name, e))).transpose()
    }

    fn finish(self, kind: &str) -> Result<()> {
        match self.map.keys().find(|k| !self.used.contains(k.as_str())) {
            Some(k) => Err(CliError::field(k.clone(), format!("not used by kind `{kind}`"))),
            None => Ok(()),
        }
    }
}

fn numbers(v: &Value) -> Option<Vec<f64>> {
    v.as_array()?.iter().map(Value::as_f64).collect()
}

fn required<T>(x: Option<T>, name: &str, kind: &str) -> Result<T> {
    x.ok_or_else(|| CliError::field(name, format!("required by kind `{kind}`")))
}

fn parse_options(v: Option<&Value>) -> Result<Options> {
    let Some(v) = v else { return Ok(Options::default()) };
    let map = v.as_object().ok_or_else(|| CliError::field("options", "expected an object"))?;
    let mut o = Options::default();
    for (key, value) in map {
        let field = format!("options.{key}");
        let count = |min: u64| {
            value
                .as_u64()
                .filter(|&n| n >= min)
                .ok_or_else(|| CliError::field(field.clone(), format!("expected an integer >= {min}")))
        };
        match key.as_str() {
            "tol" => {
                let t = value
                    .as_f64()
                    .filter(|t| t.is_finite() && *t >= 0.0)
                    .ok_or_else(|| CliError::field(field.clone(), "expected a nonnegative number"))?;
                o.tol = Some(t);
            }
            "n_max" => o.n_max = Some(count(2)? as usize),
            "trials" => o.trials = Some(count(1)? as usize),
            "seed" => o.seed = Some(count(0)?),
            _ => return Err(CliError::field(field, "unknown option")),
        }
    }
    Ok(o)
}

fn var_form<'a, P, G>(
    f: &mut Fields<'a>,
    kind: &str,
    read_p: fn(&mut Fields<'a>, &'static str) -> Result<Option<P>>,
    read_g: fn(&mut Fields<'a>, &'static str) -> Result<Option<G>>,
) -> Result<VarForm<P, G>> {
    if f.has("alpha") {
        let alpha = required(f.alpha()?, "alpha", kind)?;
        let nu = required(read_p(f, "nu")?, "nu", kind)?;
        let theta = required(read_p(f, "theta")?, "theta", kind)?;
        let mu = read_p(f, "mu")?;
        Ok(VarForm::Renyi { alpha, nu, theta, mu })
    } else if f.has("g") {
        let g = required(read_g(f, "g")?, "g", kind)?;
        let mu = required(read_p(f, "mu")?, "mu", kind)?;
        let theta = read_p(f, "theta")?;
        Ok(VarForm::Gibbs { g, mu, theta })
    } else {
        Err(CliError::field("alpha", format!("kind `{kind}` needs either `alpha` (with nu, theta) or `g` (with mu)")))
    }
}

fn search_problem(f: &mut Fields, kind: &str) -> Result<SearchProblem> {
    let name = required(f.string("problem")?, "problem", kind)?;
    let p = match name {
        "iid_renyi" => SearchProblem::IidRenyi {
            alpha: required(f.alpha()?, "alpha", name)?,
            nu: required(f.dist("nu")?, "nu", name)?,
            theta: required(f.dist("theta")?, "theta", name)?,
        },
        "iid_exp_integral" => SearchProblem::IidExpIntegral {
            g: required(f.bounded_fn("g")?, "g", name)?,
            mu: required(f.dist("mu")?, "mu", name)?,
        },
        "iid_acd" => SearchProblem::IidAcd {
            alpha: required(f.alpha()?, "alpha", name)?,
            g: required(f.bounded_fn("g")?, "g", name)?,
            theta: required(f.dist("theta")?, "theta", name)?,
        },
        "markov_renyi" => SearchProblem::MarkovRenyi {
            alpha: required(f.alpha()?, "alpha", name)?,
            nu: required(f.pair("nu")?, "nu", name)?,
            theta: required(f.pair("theta")?, "theta", name)?,
        },
        "markov_exp_integral" => SearchProblem::MarkovExpIntegral {
            g: required(f.edge_fn("g")?, "g", name)?,
            mu: required(f.pair("mu")?, "mu", name)?,
        },
        "markov_acd" => SearchProblem::MarkovAcd {
            alpha: required(f.alpha()?, "alpha", name)?,
            g: required(f.edge_fn("g")?, "g", name)?,
            theta: required(f.pair("theta")?, "theta", name)?,
        },
        other => {
            return Err(CliError::field(
                "problem",
                format!(
                    "unknown search problem `{other}` (expected iid_renyi, iid_exp_integral, iid_acd, \
                     markov_renyi, markov_exp_integral or markov_acd)"
                ),
            ))
        }
    };
    Ok(p)
}

/// Parse and validate a problem file.
pub fn parse(text: &str) -> Result<Problem> {
    let root: Value = serde_json::from_str(text).map_err(|e| CliError::Syntax {
        line: e.line(),
        column: e.column(),
        message: {
            let full = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            full.strip_suffix(&suffix).unwrap_or(&full).to_string()
        },
    })?;
    let map = root.as_object().ok_or(CliError::Syntax {
        line: 1,
        column: 1,
        message: "top level must be an object".into(),
    })?;
    let mut f = Fields::new(map);
    let kind_name = required(f.string("kind")?, "kind", "any")?;
    let kind = Kind::parse(kind_name).ok_or_else(|| {
        let names: Vec<&str> = Kind::ALL.iter().map(|k| k.as_str()).collect();
        CliError::field("kind", format!("unknown kind `{kind_name}` (expected one of {})", names.join(", ")))
    })?;
    let options = parse_options(map.get("options"))?;
    let k = kind.as_str();
    let body = match kind {
        Kind::IidDivergence => Body::IidDivergence {
            alpha: f.alpha()?,
            nu: required(f.dist("nu")?, "nu", k)?,
            theta: required(f.dist("theta")?, "theta", k)?,
        },
        Kind::IidVariational => Body::IidVariational(var_form(&mut f, k, Fields::dist, Fields::bounded_fn)?),
        Kind::IidAcd => {
            let alpha = required(f.alpha()?, "alpha", k)?;
            let g = required(f.bounded_fn("g")?, "g", k)?;
            let (nu, theta) = (f.dist("nu")?, f.dist("theta")?);
            if nu.is_none() && theta.is_none() {
                return Err(CliError::field("theta", format!("kind `{k}` needs `theta`, `nu` or both")));
            }
            Body::IidAcd { alpha, g, nu, theta }
        }
        Kind::MarkovRate => Body::MarkovRate {
            alpha: f.alpha()?,
            nu: required(f.pair("nu")?, "nu", k)?,
            theta: required(f.pair("theta")?, "theta", k)?,
        },
        Kind::MarkovVariational => Body::MarkovVariational(var_form(&mut f, k, Fields::pair, Fields::edge_fn)?),
        Kind::MarkovAcd => {
            let alpha = required(f.alpha()?, "alpha", k)?;
            let g = required(f.edge_fn("g")?, "g", k)?;
            let (nu, theta) = (f.pair("nu")?, f.pair("theta")?);
            if nu.is_none() && theta.is_none() {
                return Err(CliError::field("theta", format!("kind `{k}` needs `theta`, `nu` or both")));
            }
            Body::MarkovAcd { alpha, g, nu, theta }
        }
        Kind::Growth => {
            let rows = required(f.matrix("m")?, "m", k)?;
            Body::Growth { m: NonnegMatrix::new(rows).map_err(|e| CliError::field("m", e))? }
        }
        Kind::Oracle => {
            let target = required(f.string("target")?, "target", k)?;
            match target {
                "easyvar" => Body::Oracle(OracleTarget::Easyvar {
                    g: required(f.edge_fn("g")?, "g", target)?,
                    mu: required(f.pair("mu")?, "mu", target)?,
                }),
                "random_search" => Body::Oracle(OracleTarget::RandomSearch(search_problem(&mut f, target)?)),
                other => {
                    return Err(CliError::field(
                        "target",
                        format!("unknown oracle target `{other}` (expected easyvar or random_search)"),
                    ))
                }
            }
        }
    };
    f.finish(k)?;
    Ok(Problem { kind, body, options })
}
