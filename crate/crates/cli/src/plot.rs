//! `Γ_N / φ(N)` bounds from an existing growth table.

use slowtorus_core::arithmetic::{format_sci, Dyadic, Round, DEFAULT_DIGITS};
use slowtorus_core::Rat;

use crate::config::RunConfig;
use crate::output::write_atomic;
use crate::CliError;

/// One plotted point: `N` and outward bounds on `Γ_N / φ(N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioRow {
    pub n: String,
    pub lo: String,
    pub hi: String,
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize, CliError> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Input(format!("growth table has no `{name}` column")))
}

fn parse(s: &str, line: u64) -> Result<Rat, CliError> {
    s.parse()
        .map_err(|e| CliError::Input(format!("line {line}: {e}")))
}

/// `gamma_lo / phi_hi` rounded down and `gamma_hi / phi_lo` rounded up.
pub fn ratio_rows(table: &[u8]) -> Result<Vec<RatioRow>, CliError> {
    let mut rd = csv::Reader::from_reader(table);
    let headers = rd.headers().map_err(CliError::csv)?.clone();
    let (n, plo, phi, glo, ghi) = (
        column(&headers, "N")?,
        column(&headers, "phi_lo")?,
        column(&headers, "phi_hi")?,
        column(&headers, "gamma_lo")?,
        column(&headers, "gamma_hi")?,
    );
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(CliError::csv)?;
        let line = i as u64 + 2;
        let get = |k: usize| parse(&rec[k], line);
        let (p_lo, p_hi) = (get(plo)?, get(phi)?);
        if !p_lo.is_positive() {
            return Err(CliError::Input(format!(
                "line {line}: φ lower bound is not positive"
            )));
        }
        let lo = get(glo)?
            .checked_div(&p_hi)
            .map_err(|e| CliError::Input(e.to_string()))?;
        let hi = get(ghi)?
            .checked_div(&p_lo)
            .map_err(|e| CliError::Input(e.to_string()))?;
        let prec = DEFAULT_DIGITS * 4 + 16;
        out.push(RatioRow {
            n: rec[n].to_string(),
            lo: format_sci(
                &Dyadic::from_rat(&lo, prec, Round::Down),
                DEFAULT_DIGITS,
                Round::Down,
            ),
            hi: format_sci(
                &Dyadic::from_rat(&hi, prec, Round::Up),
                DEFAULT_DIGITS,
                Round::Up,
            ),
        });
    }
    Ok(out)
}

/// Reads the growth table of a prior run and writes `N,ratio_lo,ratio_hi`.
/// An empty table gives an empty file.
pub fn plotdata(config: &RunConfig) -> Result<Vec<RatioRow>, CliError> {
    let input = config.output.csv();
    let table = std::fs::read(&input).map_err(|e| {
        CliError::Input(format!("cannot read growth table {}: {e}", input.display()))
    })?;
    let rows = ratio_rows(&table)?;
    write_atomic(&config.output.plot(), &ratio_csv(&rows)?)?;
    Ok(rows)
}

pub fn ratio_csv(rows: &[RatioRow]) -> Result<Vec<u8>, CliError> {
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["N", "ratio_lo", "ratio_hi"])
        .map_err(CliError::csv)?;
    for r in rows {
        w.write_record([&r.n, &r.lo, &r.hi])
            .map_err(CliError::csv)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}
