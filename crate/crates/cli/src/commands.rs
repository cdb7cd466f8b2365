use std::fmt;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use vsc_core::extend::verify_cocycles;
use vsc_core::fock::checks::{
    check_deformed_character, check_delta_axioms, check_delta_closed_forms, jacobi_instances, jacobi_mismatch, CheckOutcome,
};
use vsc_core::fock::ops::series_to_json;
use vsc_core::lattice::quotient as lattice_quotient;
use vsc_core::rational::{fmt_q, inverse, q};
use vsc_core::rootsys::minimal_weights;
use vsc_core::{
    classify as classify_spec, parse_q, Cyclotomic, Error, ExtensionSpec, FockSpace, FockVector, Mat, RationalLattice,
    SimpleLieType, Sublattice, VertexEngine, Q,
};

use crate::RunConfig;

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Invariant(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "{m}"),
            Failure::Invariant(m) => write!(f, "internal invariant violated: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(m) => Failure::Invariant(m),
            other => Failure::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl Check {
    fn from_outcome(prefix: &str, o: &CheckOutcome) -> Self {
        Check {
            name: format!("{prefix}{}", o.name),
            passed: o.passed,
            first_failure: o.first_failure.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub suite: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    fn new(suite: &'static str, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        VerifyReport {
            suite,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

// ---------------------------------------------------------------- parsing

fn read_q(v: &Value) -> Result<Q, Failure> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|x| q(x as i128))
            .ok_or_else(|| Failure::Input(format!("{n} is not an integer; write fractions as \"p/q\""))),
        Value::String(s) => Ok(parse_q(s)?),
        other => Err(Failure::Input(format!("expected a rational, got {other}"))),
    }
}

fn read_mat(v: &Value) -> Result<Mat, Failure> {
    let rows = v.as_array().ok_or_else(|| Failure::Input("expected a matrix".into()))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Failure::Input("expected a matrix row".into()))?
                .iter()
                .map(read_q)
                .collect()
        })
        .collect()
}

fn parse_json(s: &str) -> Result<Value, Failure> {
    serde_json::from_str(s).map_err(|e| Failure::Input(format!("malformed JSON: {e}")))
}

fn read_vec(s: &str) -> Result<Vec<Q>, Failure> {
    s.split(',').map(|x| Ok(parse_q(x.trim())?)).collect()
}

fn space(gram: Option<&str>) -> Result<FockSpace, Failure> {
    match gram {
        None => Ok(FockSpace::a1()),
        Some(g) => Ok(FockSpace::new(read_mat(&parse_json(g)?)?)?),
    }
}

/// Rows of the inverse Gram matrix: the dual basis in lattice coordinates.
fn dual_basis(sp: &FockSpace) -> Result<Mat, Failure> {
    inverse(&sp.gram).ok_or_else(|| Failure::Input("singular Gram matrix".into()))
}

fn show_vec(v: &[Q]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_q).collect();
    format!("({})", parts.join(","))
}

// ---------------------------------------------------------------- commands

pub fn classify(spec: &str) -> Result<Value, Failure> {
    let spec = ExtensionSpec::from_json(spec)?;
    let v = classify_spec(&spec)?;
    Ok(serde_json::to_value(v).expect("verdict serializes"))
}

pub fn minimal(ty: &str) -> Result<Value, Failure> {
    let t: SimpleLieType = ty.parse()?;
    Ok(json!(minimal_weights(t)))
}

pub fn verify_delta(cfg: &RunConfig, gram: Option<&str>) -> Result<VerifyReport, Failure> {
    let e = VertexEngine::new(space(gram)?);
    let rank = e.space.rank;
    let mut alphas = dual_basis(&e.space)?;
    alphas.extend((0..rank).map(|i| e.space.unit(i)));
    let mut checks = Vec::new();
    for a in &alphas {
        let tag = format!("alpha={} ", show_vec(a));
        let closed = alphas.iter().all(|b| check_delta_closed_forms(&e, a, b));
        checks.push(Check {
            name: format!("{tag}closed forms"),
            passed: closed,
            first_failure: (!closed).then(|| "Δ(α,z)β or Δ(α,z)ω differs from its closed form".into()),
        });
        let r = check_delta_axioms(&e, a, cfg.cutoff as i64, 1);
        for o in [&r.finite, &r.vacuum, &r.derivative, &r.conjugation] {
            checks.push(Check::from_outcome(&tag, o));
        }
    }
    Ok(VerifyReport::new("delta", checks))
}

pub fn verify_characters(cfg: &RunConfig, gram: Option<&str>) -> Result<VerifyReport, Failure> {
    let e = VertexEngine::new(space(gram)?);
    let mut betas = vec![vec![q(0); e.space.rank]];
    betas.extend(dual_basis(&e.space)?);
    let checks = betas
        .iter()
        .map(|b| Check::from_outcome(&format!("beta={} ", show_vec(b)), &check_deformed_character(&e, b, cfg.cutoff as i64).outcome))
        .collect();
    Ok(VerifyReport::new("characters", checks))
}

pub fn verify_cocycle(spec: Option<&str>) -> Result<VerifyReport, Failure> {
    let spec = match spec {
        Some(s) => ExtensionSpec::from_json(&crate::read_input(s)?)?,
        None => ExtensionSpec::affine("D4".parse()?, 2)?,
    };
    let checks = verify_cocycles(&spec)?
        .into_iter()
        .map(|c| Check {
            first_failure: (!c.passed).then(|| "identity fails on the exhaustive sample".into()),
            name: c.name,
            passed: c.passed,
        })
        .collect();
    Ok(VerifyReport::new("cocycle", checks))
}

pub fn verify_jacobi(
    cfg: &RunConfig,
    gram: Option<&str>,
    max_weight: &str,
    window: u32,
    n_sample: usize,
    inject_sign_error: bool,
) -> Result<VerifyReport, Failure> {
    let e = VertexEngine::new(space(gram)?);
    let mut labels = vec![vec![q(0); e.space.rank]];
    labels.extend(dual_basis(&e.space)?);
    let all = jacobi_instances(&e, &labels, &parse_q(max_weight)?);
    let chosen: Vec<usize> = if n_sample == 0 || n_sample >= all.len() {
        (0..all.len()).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut idx = sample(&mut rng, all.len(), n_sample).into_vec();
        idx.sort_unstable();
        idx
    };
    let twist = Cyclotomic::from_int(if inject_sign_error { -1 } else { 1 });
    let mut failure = None;
    for &i in &chosen {
        let t = &all[i];
        if let Some((a, b, c)) = jacobi_mismatch(&e, t, window as i64, &twist) {
            failure = Some(format!(
                "u={} in {}, v={} in {}, w={} in {}: coefficient of z0^{} z1^{} z2^{}",
                t.u,
                show_vec(&t.alpha),
                t.v,
                show_vec(&t.beta),
                t.w,
                show_vec(&t.gamma),
                fmt_q(&a),
                fmt_q(&b),
                fmt_q(&c)
            ));
            break;
        }
    }
    let check = Check {
        name: format!("generalized jacobi ({} of {} triples, window {window})", chosen.len(), all.len()),
        passed: failure.is_none(),
        first_failure: failure,
    };
    Ok(VerifyReport::new("jacobi", vec![check]))
}

/// `vacuum`, `omega`, `h:<rationals>` or `exp:<integers>`.
fn parse_vector(sp: &FockSpace, s: &str) -> Result<FockVector, Failure> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    let check_len = |n: usize| {
        if n == sp.rank {
            Ok(())
        } else {
            Err(Failure::Input(format!("vector needs {} coordinates, got {n}", sp.rank)))
        }
    };
    match kind {
        "vacuum" => Ok(sp.vacuum()),
        "omega" => Ok(sp.virasoro()),
        "h" => {
            let h = read_vec(rest)?;
            check_len(h.len())?;
            Ok(sp.cartan(&h))
        }
        "exp" => {
            let g = rest
                .split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|e| Failure::Input(format!("exp coordinate {x:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            check_len(g.len())?;
            Ok(sp.exp(&g))
        }
        other => Err(Failure::Input(format!("unknown vector {other:?}"))),
    }
}

pub fn delta_apply(gram: Option<&str>, alpha: &str, vector: &str) -> Result<Value, Failure> {
    let e = VertexEngine::new(space(gram)?);
    let a = read_vec(alpha)?;
    if a.len() != e.space.rank {
        return Err(Failure::Input(format!("alpha needs {} coordinates", e.space.rank)));
    }
    let v = parse_vector(&e.space, vector)?;
    Ok(json!({
        "alpha": a.iter().map(fmt_q).collect::<Vec<_>>(),
        "vector": v.to_json(),
        "series": series_to_json(&e.delta(&a, &v)),
    }))
}

pub fn character(cfg: &RunConfig, gram: Option<&str>, beta: &str) -> Result<Value, Failure> {
    let e = VertexEngine::new(space(gram)?);
    let b = read_vec(beta)?;
    if b.len() != e.space.rank {
        return Err(Failure::Input(format!("beta needs {} coordinates", e.space.rank)));
    }
    let r = check_deformed_character(&e, &b, cfg.cutoff as i64);
    Ok(serde_json::to_value(r).expect("report serializes"))
}

#[derive(Serialize)]
struct QuotientOut {
    order: usize,
    invariant_factors: Vec<i128>,
    reps: Vec<Vec<String>>,
}

/// `{"gram": G, "outer": B₁?, "inner": B₂?}`; outer defaults to the dual
/// lattice and inner to the lattice itself.
pub fn quotient(input: &str) -> Result<Value, Failure> {
    let v = parse_json(input)?;
    let obj = v.as_object().ok_or_else(|| Failure::Input("expected an object".into()))?;
    if let Some(k) = obj.keys().find(|k| !["gram", "outer", "inner"].contains(&k.as_str())) {
        return Err(Failure::Input(format!("unknown field {k:?}")));
    }
    let gram = read_mat(obj.get("gram").ok_or_else(|| Failure::Input("missing gram".into()))?)?;
    let frame = RationalLattice::new(gram.clone(), None)?;
    let outer = match obj.get("outer") {
        Some(m) => Sublattice::new(frame.clone(), read_mat(m)?)?,
        None => Sublattice::new(frame.clone(), inverse(&gram).ok_or(Error::Singular)?)?,
    };
    let inner = match obj.get("inner") {
        Some(m) => Sublattice::new(frame.clone(), read_mat(m)?)?,
        None => Sublattice::full(frame),
    };
    if !outer.contains_lattice(&inner) {
        return Err(Failure::Input("inner lattice is not contained in outer".into()));
    }
    let g = lattice_quotient(&outer, &inner)?;
    let out = QuotientOut {
        order: g.order(),
        invariant_factors: g.invariant_factors.clone(),
        reps: g.reps.iter().map(|r| r.iter().map(fmt_q).collect()).collect(),
    };
    Ok(serde_json::to_value(out).expect("quotient serializes"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(Failure::from(Error::Parse("x".into())).code(), 2);
        assert_eq!(Failure::from(Error::Singular).code(), 2);
        assert_eq!(Failure::from(Error::Invariant("L0 is not even".into())).code(), 3);
    }

    #[test]
    fn vector_syntax() {
        let sp = FockSpace::a2();
        assert_eq!(parse_vector(&sp, "exp:1,-1").unwrap(), sp.exp(&[1, -1]));
        assert_eq!(parse_vector(&sp, "h:1/2,0").unwrap(), sp.cartan(&[vsc_core::rational::qf(1, 2), q(0)]));
        assert!(parse_vector(&sp, "exp:1").is_err());
        assert!(parse_vector(&sp, "psi").is_err());
    }
}
