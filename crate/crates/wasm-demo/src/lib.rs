//! Browser bindings: cohomology tables, spectra and restriction scans for
//! the zoo families. Every export returns a string (JSON or TSV) so the
//! page needs no glue beyond the generated module.

use monadcoh::cohomology::{chern, coh_table, spectrum};
use monadcoh::scanners::{self, Universe};
use monadcoh::zoo::{self, FamilyParams};
use monadcoh::{Error, Field, FieldSpec, MonadSpec, PrimeField, Rationals};
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_WINDOW: i64 = 12;
const MAX_SAMPLES: usize = 500;

fn params(family: &str, params: &str, seed: u64) -> FamilyParams {
    let params = params.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
    FamilyParams { family: family.to_string(), params, seed }
}

fn with_field<T>(
    field: &str,
    q: impl FnOnce(&Rationals) -> Result<T, Error>,
    p: impl FnOnce(&PrimeField) -> Result<T, Error>,
) -> Result<T, Error> {
    match FieldSpec::parse(field)? {
        FieldSpec::Rationals => q(&Rationals),
        FieldSpec::PrimeField(c) => p(&PrimeField::new(c)?),
    }
}

fn table_json<F: Field>(m: &MonadSpec<F>, lo: i64, hi: i64) -> Result<String, Error> {
    if hi < lo || hi - lo > MAX_WINDOW {
        return Err(Error::Parse(format!("window {lo}..{hi} must hold 1 to {} twists", MAX_WINDOW + 1)));
    }
    let c = chern(m)?;
    let table = coh_table(m, lo, hi)?;
    let rows: Vec<_> = (lo..=hi)
        .map(|l| {
            let cells: Vec<String> = (0..=m.n).map(|i| table.get(i, l).unwrap().to_string()).collect();
            json!({ "l": l, "h": cells, "exact": table.column_exact(l) })
        })
        .collect();
    let spec = if m.rank() == 3 && m.n == 3 && c.c1 == 0 {
        let t = coh_table(m, -c.c2 - 3, 1)?;
        Some(spectrum(&t, &c)?.to_string())
    } else {
        None
    };
    Ok(json!({
        "chern": c.to_string(),
        "rank": m.rank(),
        "stability": scanners::stability_check(m).map(|s| s.to_string()).ok(),
        "spectrum": spec,
        "table": rows,
    })
    .to_string())
}

/// JSON with the Chern data, stability, spectrum and a table of h^i(E(l)).
pub fn cohomology_report(family: &str, raw: &str, field: &str, seed: u64, lo: i64, hi: i64) -> Result<String, Error> {
    let p = params(family, raw, seed);
    with_field(
        field,
        |f| table_json(&zoo::build(f, &p)?.monad, lo, hi),
        |f| table_json(&zoo::build(f, &p)?.monad, lo, hi),
    )
}

fn scan<F: Field>(m: &MonadSpec<F>, kind: &str, u: Universe) -> Result<String, Error> {
    let report = match kind {
        "lines" => scanners::jumping_line_scan(m, u)?,
        "planes" => scanners::plane_scan(m, u)?,
        _ => return Err(Error::Parse(format!("unknown scan `{kind}`, expected lines or planes"))),
    };
    Ok(report.to_tsv())
}

/// Line or plane scan as TSV. `samples = 0` means every line or plane of
/// a small prime field.
pub fn scan_report(family: &str, raw: &str, field: &str, seed: u64, kind: &str, samples: usize) -> Result<String, Error> {
    if samples > MAX_SAMPLES {
        return Err(Error::Parse(format!("at most {MAX_SAMPLES} samples")));
    }
    let u = if samples == 0 { Universe::Exhaustive } else { Universe::Sample { count: samples, seed } };
    let p = params(family, raw, seed);
    with_field(
        field,
        |f| scan(&zoo::build(f, &p)?.monad, kind, u),
        |f| {
            if samples == 0 && f.spec().characteristic() > 13 {
                return Err(Error::Unsupported("exhaustive scans are limited to p <= 13 in the browser".into()));
            }
            scan(&zoo::build(f, &p)?.monad, kind, u)
        },
    )
}

#[wasm_bindgen]
pub fn families() -> String {
    zoo::FAMILIES.join("\n")
}

#[wasm_bindgen]
pub fn cohomology(family: &str, params: &str, field: &str, seed: u64, lo: i32, hi: i32) -> Result<String, JsError> {
    cohomology_report(family, params, field, seed, lo.into(), hi.into()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn restriction_scan(family: &str, params: &str, field: &str, seed: u64, kind: &str, samples: u32) -> Result<String, JsError> {
    scan_report(family, params, field, seed, kind, samples as usize).map_err(|e| JsError::new(&e.to_string()))
}
