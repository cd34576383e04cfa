//! One function per subcommand; each delegates to a single library entry
//! point and wraps the outcome in a self-describing report.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};
use vdelta_core::cube::{center_circuits, orbit, ConvexCircuit, Subset};
use vdelta_core::delta::{is_delta_matroid, is_even, neg_rank_as_valuation, rank_function, BasisFamily, BasisFamilyJson, ExchangeViolation};
use vdelta_core::repr::{
    det_poly, isotropic_rep, principal_minor_valuations, principal_minors, realize3, rayleigh, residue_poly, unit_vectors,
    verify_factorization, FormKind, MatrixK, SearchConfig, Shape,
};
use vdelta_core::subdivision::{
    cone_dimension_with, is_valuated_delta_matroid_with, long_edges_with, maximal_cells_with, CellMode, SubsetFunction,
};
use vdelta_core::{Error, VERSION};

use crate::input::{self, field, usize_field};
use crate::{Cli, Command, InputError, Mode, Report};

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Check => "check",
        Command::Edges => "edges",
        Command::Cells => "cells",
        Command::ConeDim => "cone-dim",
        Command::DomCheck => "dom-check",
        Command::Rank => "rank",
        Command::Minors => "minors",
        Command::Rayleigh => "rayleigh",
        Command::Factorize => "factorize",
        Command::Realize3 => "realize3",
        Command::Isotropic => "isotropic",
        Command::Circuits => "circuits",
        Command::Search => "search",
    }
}

pub fn run(cli: &Cli) -> Result<Report, InputError> {
    let raw = input::load(cli.input.as_deref())?;
    let (code, input, result) = match cli.command {
        Command::Check => check(cli, &raw)?,
        Command::Edges => edges(cli, &raw)?,
        Command::Cells => cells(cli, &raw)?,
        Command::ConeDim => cone_dim(cli, &raw)?,
        Command::DomCheck => dom_check(&raw)?,
        Command::Rank => rank(&raw)?,
        Command::Minors => minors(raw)?,
        Command::Rayleigh => rayleigh_cmd(raw)?,
        Command::Factorize => factorize(raw)?,
        Command::Realize3 => realize(&raw)?,
        Command::Isotropic => isotropic(raw)?,
        Command::Circuits => circuits(&raw)?,
        Command::Search => search(cli, &raw)?,
    };
    let body = json!({
        "command": command_name(cli.command),
        "version": VERSION,
        "input": input,
        "result": result,
    });
    Ok(Report { code, body })
}

type Outcome = (u8, Value, Value);

fn exit(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

/// A subset function given directly, or the `p` of an earlier report.
fn subset_function(v: &Value) -> Result<SubsetFunction, InputError> {
    let (inner, path) = if v.get("values").is_some() {
        (v, "")
    } else if let Some(p) = v.get("result").and_then(|r| r.get("p")) {
        (p, "/result/p")
    } else if let Some(p) = v.get("p") {
        (p, "/p")
    } else {
        return Err(InputError("expected a subset function {\"n\", \"values\"} or a report containing \"p\"".into()));
    };
    SubsetFunction::from_json(inner).map_err(|e| InputError(format!("{}: {e}", if path.is_empty() { "/" } else { path })))
}

fn check(cli: &Cli, raw: &Value) -> Result<Outcome, InputError> {
    let p = subset_function(raw)?;
    let verdict = is_valuated_delta_matroid_with(&p, cli.exec())?;
    Ok((exit(verdict.valuated), p.to_json(), serde_json::to_value(&verdict)?))
}

fn edges(cli: &Cli, raw: &Value) -> Result<Outcome, InputError> {
    let p = subset_function(raw)?;
    let edges = long_edges_with(&p, cli.min_len, cli.exec())?;
    let result = json!({ "min_len": cli.min_len, "edges": edges });
    Ok((exit(edges.is_empty()), p.to_json(), result))
}

fn cell_mode(mode: Option<Mode>, n: usize) -> CellMode {
    match mode {
        Some(Mode::Exhaustive) => CellMode::Exhaustive,
        Some(Mode::Bfs) => CellMode::bfs(),
        None => CellMode::auto(n),
    }
}

fn mode_name(mode: CellMode) -> &'static str {
    match mode {
        CellMode::Exhaustive => "exhaustive",
        CellMode::Bfs { .. } => "bfs",
    }
}

fn cells(cli: &Cli, raw: &Value) -> Result<Outcome, InputError> {
    let p = subset_function(raw)?;
    let mode = cell_mode(cli.mode, p.n());
    let cells = maximal_cells_with(&p, mode, cli.exec())?;
    let result = json!({ "mode": mode_name(mode), "count": cells.len(), "cells": cells });
    Ok((0, p.to_json(), result))
}

fn cone_dim(cli: &Cli, raw: &Value) -> Result<Outcome, InputError> {
    let p = subset_function(raw)?;
    let mode = cell_mode(cli.mode, p.n());
    let dim = cone_dimension_with(&p, mode, cli.exec())?;
    let ambient = 1usize << p.n();
    Ok((0, p.to_json(), json!({ "dim": dim, "codim": ambient - dim })))
}

fn violation_json(v: &ExchangeViolation) -> Value {
    json!({ "a": v.a, "b": v.b, "element": v.elem + 1 })
}

fn basis_family(raw: &Value) -> Result<BasisFamily, InputError> {
    let j: BasisFamilyJson = serde_json::from_value(raw.clone()).map_err(|e| InputError(format!("basis family: {e}")))?;
    Ok(BasisFamily::try_from(j)?)
}

fn dom_check(raw: &Value) -> Result<Outcome, InputError> {
    let (family, input) = if raw.get("bases").is_some() {
        let f = basis_family(raw)?;
        let input = serde_json::to_value(BasisFamilyJson::from(&f))?;
        (f, input)
    } else {
        let p = subset_function(raw)?;
        (p.dom_family(), p.to_json())
    };
    let mut result = Map::new();
    result.insert("bases".into(), json!(family.len()));
    match is_delta_matroid(&family) {
        Ok(()) => {
            result.insert("delta_matroid".into(), json!(true));
            result.insert("even".into(), json!(is_even(&family)));
            Ok((0, input, Value::Object(result)))
        }
        Err(v) => {
            result.insert("delta_matroid".into(), json!(false));
            result.insert("violation".into(), violation_json(&v));
            Ok((1, input, Value::Object(result)))
        }
    }
}

fn rank(raw: &Value) -> Result<Outcome, InputError> {
    let f = basis_family(raw)?;
    let input = serde_json::to_value(BasisFamilyJson::from(&f))?;
    if let Err(v) = is_delta_matroid(&f) {
        return Ok((1, input, json!({ "delta_matroid": false, "violation": violation_json(&v) })));
    }
    let table = rank_function(&f);
    let ranks: Map<String, Value> = Subset::all(f.n()).map(|s| (s.to_string(), json!(table.get(s)))).collect();
    let result = json!({ "delta_matroid": true, "rank": ranks, "neg_rank": neg_rank_as_valuation(&f).to_json() });
    Ok((0, input, result))
}

/// Accepts a bare matrix object or `{"matrix": {...}, ...}`.
fn matrix_input(mut raw: Value) -> Result<(MatrixK, Value), InputError> {
    if raw.get("matrix").is_some() {
        let a = input::matrix(&mut raw["matrix"], "/matrix")?;
        Ok((a, raw))
    } else {
        let a = input::matrix(&mut raw, "")?;
        Ok((a, raw))
    }
}

fn minors(raw: Value) -> Result<Outcome, InputError> {
    let (a, input) = matrix_input(raw)?;
    let k = a.field().clone();
    let values = principal_minors(&a)?;
    let minors: Map<String, Value> =
        Subset::all(a.rows()).map(|s| (s.to_string(), Value::String(k.format(&values[s.bits as usize])))).collect();
    let p = principal_minor_valuations(&a)?;
    Ok((0, a.to_json(), json!({ "minors": minors, "p": p.to_json() })).map_input(input))
}

trait MapInput {
    fn map_input(self, input: Value) -> Outcome;
}

impl MapInput for Outcome {
    /// Keeps the caller's input object, with the matrix in canonical form.
    fn map_input(self, mut input: Value) -> Outcome {
        let (code, canonical, result) = self;
        if input.get("matrix").is_some() {
            input["matrix"] = canonical;
        } else {
            input = canonical;
        }
        (code, input, result)
    }
}

/// `{"matrix", "vectors"?, "i", "j"}` with 1-based `i`, `j`; vectors default
/// to the unit vectors.
fn rayleigh_input(raw: Value) -> Result<(MatrixK, Vec<Vec<vdelta_core::field::Elem>>, usize, usize, Value), InputError> {
    let (a, input) = matrix_input(raw)?;
    let k = a.field().clone();
    let vectors = match input.get("vectors") {
        Some(v) => input::rows(&k, v, "/vectors")?,
        None => unit_vectors(&k, a.rows()),
    };
    let i = usize_field(&input, "", "i")?;
    let j = usize_field(&input, "", "j")?;
    if i == 0 || j == 0 {
        return Err(InputError("/i, /j: indices are 1-based".into()));
    }
    Ok((a, vectors, i - 1, j - 1, input))
}

fn rayleigh_cmd(raw: Value) -> Result<Outcome, InputError> {
    let (a, vectors, i, j, input) = rayleigh_input(raw)?;
    let f = det_poly(&a, &vectors)?;
    let delta = rayleigh(&f, i, j)?;
    let residue = residue_poly(&delta).ok().map(|r| r.to_string());
    let result = json!({ "f": f.format(), "delta": delta.to_string(), "residue": residue });
    Ok((0, a.to_json(), result).map_input(input))
}

fn factorize(raw: Value) -> Result<Outcome, InputError> {
    let (a, vectors, i, j, input) = rayleigh_input(raw)?;
    let fac = verify_factorization(&a, &vectors, i, j)?;
    let result = json!({
        "branch": fac.branch,
        "sigma": fac.sigma,
        "size": fac.size,
        "g": fac.g.to_string(),
        "rayleigh": fac.rayleigh.to_string(),
        "product": fac.product.to_string(),
        "holds": fac.holds,
    });
    Ok((exit(fac.holds), a.to_json(), result).map_input(input))
}

fn realize(raw: &Value) -> Result<Outcome, InputError> {
    let p = subset_function(raw)?;
    match realize3(&p) {
        Ok(r) => Ok((exit(r.pass), p.to_json(), serde_json::to_value(&r)?)),
        Err(Error::Precondition(msg)) => Ok((1, p.to_json(), json!({ "pass": false, "error": msg }))),
        Err(e) => Err(e.into()),
    }
}

fn isotropic(raw: Value) -> Result<Outcome, InputError> {
    let form: FormKind =
        serde_json::from_value(field(&raw, "", "form")?.clone()).map_err(|e| InputError(format!("/form: {e}")))?;
    let (m, input) = matrix_input(raw)?;
    let k = m.field().clone();
    let alpha = input.get("alpha").map(|v| input::elem(&k, v, "/alpha")).transpose()?;
    let v = input.get("v").map(|v| input::vector(&k, v, "/v")).transpose()?;
    let mixing = input.get("mixing").map(|v| input::rows(&k, v, "/mixing")).transpose()?;
    let r = isotropic_rep(form, &m, alpha.as_ref(), v.as_deref(), mixing.as_deref())?;
    let generator: Vec<Vec<String>> = r.generator.iter().map(|row| row.iter().map(|x| k.format(x)).collect()).collect();
    let result = json!({
        "form": r.form,
        "generator": generator,
        "p": r.p.to_json(),
        "isotropic": r.isotropic,
        "minors_agree": r.minors_agree,
        "verdict": r.verdict,
    });
    Ok((exit(r.pass()), m.to_json(), result).map_input(input))
}

fn circuit_json(c: &ConvexCircuit) -> Value {
    let terms: Vec<Value> = c.support.iter().zip(&c.weights).map(|(s, w)| json!([s, w.to_string()])).collect();
    Value::Array(terms)
}

fn circuits(raw: &Value) -> Result<Outcome, InputError> {
    let n = usize_field(raw, "", "n")?;
    let all = center_circuits(n)?;
    let mut remaining: BTreeSet<ConvexCircuit> = all.iter().cloned().collect();
    let mut orbits = Vec::new();
    while let Some(rep) = remaining.iter().next().cloned() {
        let o = orbit(n, &rep);
        remaining.retain(|c| !o.contains(c));
        orbits.push(json!({ "size": o.len(), "representative": circuit_json(&rep) }));
    }
    let result = json!({ "count": all.len(), "orbits": orbits });
    Ok((0, json!({ "n": n }), result))
}

fn search(cli: &Cli, raw: &Value) -> Result<Outcome, InputError> {
    let seed = cli.seed.ok_or_else(|| InputError("search is randomized: --seed is required".into()))?;
    let shape: Shape =
        serde_json::from_value(field(raw, "", "shape")?.clone()).map_err(|e| InputError(format!("/shape: {e}")))?;
    let spec = input::spec(field(raw, "", "spec")?, "/spec")?;
    let n = usize_field(raw, "", "n")?;
    let config = SearchConfig { shape, spec, n, trials: cli.trials, seed };
    let report = vdelta_core::repr::conjecture_search(&config, cli.exec())?;
    let input = serde_json::to_value(&config)?;
    Ok((exit(report.counterexamples.is_empty()), input, serde_json::to_value(&report)?))
}
