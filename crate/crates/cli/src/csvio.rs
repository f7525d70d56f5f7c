//! CSV schemas and serialization. Emission is fully deterministic: fields
//! are written in schema order, rationals as reduced `num`/`den` columns or
//! `num/den` strings, floats in shortest round-trip form.

use std::collections::BTreeMap;

use strata_core::dynamo::StrataReport;
use strata_core::unifam::{SweepFilter, SweepResult};
use strata_core::Rat;

use crate::AppError;

/// Column sets for every CSV the tool emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaId {
    Strata,
    Wreath,
    WreathMc,
    Bounds,
    ImageVsWreath,
}

impl SchemaId {
    pub fn header(&self) -> &'static [&'static str] {
        match self {
            SchemaId::Strata => &[
                "p",
                "r",
                "d",
                "alpha_code",
                "q",
                "periodic_count",
                "tail_length",
                "w0_num",
                "w0_den",
                "strata_json",
            ],
            SchemaId::Wreath => &[
                "d",
                "n",
                "fix_num",
                "fix_den",
                "fix_float",
                "band_lower",
                "band_upper",
                "in_band",
            ],
            SchemaId::WreathMc => &["d", "n", "samples", "seed", "estimate", "std_err"],
            SchemaId::Bounds => &[
                "theorem",
                "p",
                "r",
                "d",
                "m",
                "n",
                "log_base",
                "lower",
                "upper",
                "empirical_num",
                "empirical_den",
                "in_force",
                "label",
            ],
            SchemaId::ImageVsWreath => &[
                "p",
                "d",
                "n",
                "mean_num",
                "mean_den",
                "mean_float",
                "fix_float",
                "ratio",
            ],
        }
    }
}

/// Serialize rows under a schema; every row must have exactly the schema's
/// column count.
pub fn emit_csv(schema: SchemaId, rows: &[Vec<String>]) -> Result<String, AppError> {
    let header = schema.header();
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(AppError::Domain(format!(
                "schema violation: expected {} columns, row has {}",
                header.len(),
                row.len()
            )));
        }
        w.write_record(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| AppError::Domain(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| AppError::Domain(e.to_string()))
}

fn csv_err(e: csv::Error) -> AppError {
    AppError::Domain(e.to_string())
}

pub fn rat_num_den(r: &Rat) -> (String, String) {
    (r.numer().to_string(), r.denom().to_string())
}

pub fn rat_slash(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `num/den`, a decimal like `0.5`, or a plain integer.
pub fn parse_rat(s: &str) -> Result<Rat, AppError> {
    use std::str::FromStr;
    let bad = || AppError::Usage(format!("cannot parse rational: {s:?}"));
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || frac.contains('-') {
            return Err(bad());
        }
        let digits: i128 = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let mut den: i128 = 1;
        for _ in 0..frac.len() {
            den *= 10;
        }
        return Ok(Rat::new(digits.into(), den.into()));
    }
    let r = Rat::from_str(s).map_err(|_| bad())?;
    Ok(r)
}

/// `{"0":k0,"1":k1,...}` with keys in numeric order.
pub fn strata_json(strata: &BTreeMap<u32, u64>) -> String {
    let mut s = String::from("{");
    let mut first = true;
    for (n, w) in strata {
        if !first {
            s.push(',');
        }
        s.push_str(&format!("\"{n}\":{w}"));
        first = false;
    }
    s.push('}');
    s
}

/// One per-alpha row of the strata schema.
pub fn strata_row(
    p: u64,
    r: u32,
    d: u64,
    alpha_label: &str,
    report: &StrataReport,
) -> Vec<String> {
    let (w0n, w0d) = rat_num_den(&report.w(0));
    vec![
        p.to_string(),
        r.to_string(),
        d.to_string(),
        alpha_label.to_string(),
        report.q().to_string(),
        report.periodic_count().to_string(),
        report.tail_length().to_string(),
        w0n,
        w0d,
        strata_json(report.strata()),
    ]
}

/// Whole sweep: per-alpha rows plus the trailing aggregate row flagged
/// `AGG`. The aggregate's `strata_json` column carries the filter and the
/// exact mean `w_n` values; `periodic_count` is the total over alphas and
/// `tail_length` the maximum.
pub fn sweep_to_csv(sweep: &SweepResult) -> Result<String, AppError> {
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(sweep.entries.len() + 1);
    for (alpha, report) in &sweep.entries {
        rows.push(strata_row(sweep.p, sweep.r, sweep.d, &alpha.to_string(), report));
    }
    let total_periodic: u64 = sweep.entries.iter().map(|(_, r)| r.periodic_count()).sum();
    let max_tail: usize = sweep.entries.iter().map(|(_, r)| r.tail_length()).max().unwrap_or(0);
    let mean_w0 = sweep.mean_w.first().cloned().unwrap_or_else(|| Rat::from_integer(0.into()));
    let (w0n, w0d) = rat_num_den(&mean_w0);
    let mut agg_json = format!("{{\"filter\":\"{}\",\"mean_w\":{{", sweep.filter.as_str());
    for (n, w) in sweep.mean_w.iter().enumerate() {
        if n > 0 {
            agg_json.push(',');
        }
        agg_json.push_str(&format!("\"{n}\":\"{}\"", rat_slash(w)));
    }
    agg_json.push_str("}}");
    rows.push(vec![
        sweep.p.to_string(),
        sweep.r.to_string(),
        sweep.d.to_string(),
        "AGG".to_string(),
        sweep.q.to_string(),
        total_periodic.to_string(),
        max_tail.to_string(),
        w0n,
        w0d,
        agg_json,
    ]);
    emit_csv(SchemaId::Strata, &rows)
}

/// Inverse of [`sweep_to_csv`]; rebuilds the identical `SweepResult`.
pub fn parse_sweep_csv(text: &str) -> Result<SweepResult, AppError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_err)?.clone();
    let expected = SchemaId::Strata.header();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(AppError::Domain("sweep CSV header mismatch".into()));
    }
    let mut entries: Vec<(u64, StrataReport)> = Vec::new();
    let mut agg: Option<(u64, u32, u64, u64, serde_json::Value)> = None;
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let field = |i: usize| record.get(i).unwrap_or("").to_string();
        let p: u64 = parse_field(&field(0))?;
        let r: u32 = parse_field(&field(1))?;
        let d: u64 = parse_field(&field(2))?;
        let q: u64 = parse_field(&field(4))?;
        if field(3) == "AGG" {
            let json: serde_json::Value = serde_json::from_str(&field(9))
                .map_err(|e| AppError::Domain(format!("bad AGG json: {e}")))?;
            agg = Some((p, r, d, q, json));
            continue;
        }
        let alpha: u64 = parse_field(&field(3))?;
        let periodic: u64 = parse_field(&field(5))?;
        let tail: usize = parse_field(&field(6))?;
        let json: serde_json::Value = serde_json::from_str(&field(9))
            .map_err(|e| AppError::Domain(format!("bad strata json: {e}")))?;
        let mut strata = BTreeMap::new();
        if let serde_json::Value::Object(map) = json {
            for (k, v) in map {
                let n: u32 = parse_field(&k)?;
                let w = v
                    .as_u64()
                    .ok_or_else(|| AppError::Domain("stratum size must be an integer".into()))?;
                strata.insert(n, w);
            }
        } else {
            return Err(AppError::Domain("strata_json must be an object".into()));
        }
        let report = StrataReport::from_parts(q, periodic, tail, strata)
            .map_err(|e| AppError::Domain(e.to_string()))?;
        entries.push((alpha, report));
    }
    let (p, r, d, q, agg_json) = agg.ok_or_else(|| AppError::Domain("missing AGG row".into()))?;
    let filter = match agg_json["filter"].as_str() {
        Some("all") => SweepFilter::All,
        Some("primitive_only") => SweepFilter::PrimitiveOnly,
        other => return Err(AppError::Domain(format!("bad filter in AGG row: {other:?}"))),
    };
    let mean_obj = agg_json["mean_w"]
        .as_object()
        .ok_or_else(|| AppError::Domain("missing mean_w in AGG row".into()))?;
    let mut mean_w = vec![Rat::from_integer(0.into()); mean_obj.len()];
    for (k, v) in mean_obj {
        let n: usize = parse_field(k)?;
        let s = v
            .as_str()
            .ok_or_else(|| AppError::Domain("mean_w values must be num/den strings".into()))?;
        if n >= mean_w.len() {
            return Err(AppError::Domain("non-contiguous mean_w keys".into()));
        }
        mean_w[n] = parse_rat(s).map_err(|e| AppError::Domain(format!("{e}")))?;
    }
    let n_max = mean_w.len().saturating_sub(1) as u32;
    Ok(SweepResult { p, r, q, d, n_max, filter, entries, mean_w })
}

fn parse_field<T: std::str::FromStr>(s: &str) -> Result<T, AppError> {
    s.trim()
        .parse()
        .map_err(|_| AppError::Domain(format!("cannot parse field: {s:?}")))
}
