use crate::config::{Format, RunConfig};
use crate::CliError;
use num_traits::ToPrimitive;
use pgeo_core::chamber::{psi as psi_sum, GeodesicRecord};
use pgeo_core::dirichlet::{leading_term, partial_l, q_m_minimal_parabolic, rescaled_partial_l, DirichletError, SeriesPoint};
use pgeo_core::exactpoly::discriminant;
use pgeo_core::harvest::{enumerate_units, harvest, sweep_ratios, Harvest, HarvestCache, HarvestError, SweepRow};
use pgeo_lmfdb::{Client, ClientConfig, FactCache, LocalInvariants, RowStatus};
use serde::Serialize;
use std::io::Write;

fn env_err(e: impl std::fmt::Display) -> CliError {
    CliError::Env(e.to_string())
}

fn harvest_err(e: HarvestError) -> CliError {
    match e {
        HarvestError::InvalidConfig(m) => CliError::Config(m),
        other => CliError::Env(other.to_string()),
    }
}

fn open_cache(rc: &RunConfig) -> Result<Option<HarvestCache>, CliError> {
    rc.harvest_cache.as_ref().map(|p| HarvestCache::open(p, &rc.sweep).map_err(harvest_err)).transpose()
}

fn run_harvest(rc: &RunConfig) -> Result<Harvest, CliError> {
    let mut cache = open_cache(rc)?;
    let h = harvest(&rc.sweep, cache.as_mut()).map_err(harvest_err)?;
    if let Some(c) = cache.as_mut() {
        c.flush().map_err(harvest_err)?;
    }
    Ok(h)
}

fn t_headers(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("T_{i}")).collect()
}

fn write_json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(env_err)?;
    writeln!(out).map_err(env_err)
}

fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new().from_writer(out)
}

#[derive(Serialize)]
struct UnitRow {
    charpoly: String,
    disc: String,
    alpha: Vec<f64>,
    multiplicity: u32,
}

pub fn enumerate(rc: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let stream = enumerate_units(&rc.sweep).map_err(harvest_err)?;
    eprintln!(
        "{} candidates, {} units, skipped {:?}",
        stream.candidates,
        stream.units.len(),
        stream.skipped
    );
    let rows: Vec<UnitRow> = stream
        .units
        .iter()
        .map(|u| UnitRow {
            charpoly: u.poly.to_string(),
            disc: discriminant(&u.poly).to_string(),
            alpha: u.alpha.values.clone(),
            multiplicity: u.multiplicity,
        })
        .collect();
    match rc.format {
        Format::Json => write_json(out, &rows),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["charpoly", "disc", "alpha", "multiplicity"]).map_err(env_err)?;
            for r in &rows {
                let alpha = r.alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(";");
                w.write_record([r.charpoly.clone(), r.disc.clone(), alpha, r.multiplicity.to_string()]).map_err(env_err)?;
            }
            w.flush().map_err(env_err)
        }
    }
}

#[derive(Serialize)]
struct SweepSummary {
    convention: String,
    skipped_mass: u64,
    acceptance_grade: bool,
}

#[derive(Serialize)]
struct SweepReport<'a> {
    rows: &'a [SweepRow],
    summary: SweepSummary,
}

pub fn theta_sweep(rc: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let mut cache = open_cache(rc)?;
    let rows = sweep_ratios(&rc.sweep, &rc.grid, cache.as_mut()).map_err(harvest_err)?;
    drop(cache);
    let skipped: u64 = rows.iter().map(|r| r.skipped_mass).max().unwrap_or(0);
    let summary = SweepSummary {
        convention: rc.sweep.box_spec.convention.to_string(),
        skipped_mass: skipped,
        acceptance_grade: skipped == 0,
    };
    if skipped > 0 {
        eprintln!("NOT acceptance-grade: skipped mass {skipped} (raise the caps or inspect the harvest cache)");
    } else {
        eprintln!("{} rows, skipped mass 0", rows.len());
    }
    match rc.format {
        Format::Json => write_json(out, &SweepReport { rows: &rows, summary }),
        Format::Csv => {
            let mut w = csv_writer(out);
            let mut head = t_headers(rc.sweep.rank());
            head.extend(["theta", "ratio", "target", "skipped_mass"].map(String::from));
            w.write_record(&head).map_err(env_err)?;
            for r in &rows {
                let mut rec: Vec<String> = r.thresholds.iter().map(|t| t.to_string()).collect();
                rec.extend([r.theta.to_string(), r.ratio.to_string(), r.target.to_string(), r.skipped_mass.to_string()]);
                w.write_record(&rec).map_err(env_err)?;
            }
            w.flush().map_err(env_err)
        }
    }
}

#[derive(Serialize)]
struct DirichletRow {
    s: Vec<f64>,
    j: u32,
    partial: f64,
    rescaled: f64,
    leading_term: f64,
}

/// Largest relative gap between L at j+1 and L at j with weights multiplied by prod alpha.
pub fn j_consistency(records: &[GeodesicRecord], point: &SeriesPoint) -> Result<f64, DirichletError> {
    let hi = partial_l(records, &SeriesPoint { s: point.s.clone(), j: point.j + 1 })?;
    let scaled: Vec<GeodesicRecord> = records
        .iter()
        .map(|r| GeodesicRecord { index_weight: r.index_weight * r.alpha.values.iter().product::<f64>(), ..r.clone() })
        .collect();
    let lo = partial_l(&scaled, point)?;
    Ok(if hi.norm() == 0.0 { lo.norm() } else { (hi - lo).norm() / hi.norm() })
}

pub fn dirichlet(rc: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    if rc.points.is_empty() {
        return Err(CliError::Config("no points: pass --eps or --s, or set dirichlet.eps".into()));
    }
    let points: Vec<SeriesPoint> = rc.points.iter().map(|p| SeriesPoint::real(p, rc.j)).collect();
    // refuse before harvesting
    for p in &points {
        partial_l(&[], p).map_err(|e| CliError::Check(format!("DivergenceWarning: {e}")))?;
    }
    let h = run_harvest(rc)?;
    let records = h.geodesics(&rc.sweep.box_spec);
    eprintln!("{} geodesics in the box", records.len());
    let q_m = q_m_minimal_parabolic(rc.sweep.degree).0;
    let mut rows = Vec::with_capacity(points.len());
    let mut worst: f64 = 0.0;
    for (raw, p) in rc.points.iter().zip(&points) {
        let check = |e: DirichletError| CliError::Check(e.to_string());
        worst = worst.max(j_consistency(&records, p).map_err(check)?);
        rows.push(DirichletRow {
            s: raw.clone(),
            j: rc.j,
            partial: partial_l(&records, p).map_err(check)?.re,
            rescaled: rescaled_partial_l(&records, p).map_err(check)?.re,
            leading_term: leading_term(p, q_m).map_err(check)?.re,
        });
    }
    eprintln!("j-consistency: max relative deviation {worst:e}");
    match rc.format {
        Format::Json => write_json(out, &rows)?,
        Format::Csv => {
            let mut w = csv_writer(out);
            let mut head: Vec<String> = (1..=rc.sweep.rank()).map(|i| format!("s_{i}")).collect();
            head.extend(["j", "partial", "rescaled", "leading_term"].map(String::from));
            w.write_record(&head).map_err(env_err)?;
            for r in &rows {
                let mut rec: Vec<String> = r.s.iter().map(|x| x.to_string()).collect();
                rec.extend([r.j.to_string(), r.partial.to_string(), r.rescaled.to_string(), r.leading_term.to_string()]);
                w.write_record(&rec).map_err(env_err)?;
            }
            w.flush().map_err(env_err)?;
        }
    }
    if worst > 1e-12 {
        return Err(CliError::Check(format!("j-consistency violated: {worst:e}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct PsiRow {
    thresholds: Vec<f64>,
    psi: f64,
    volume: f64,
    ratio: f64,
}

pub fn psi(rc: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let h = run_harvest(rc)?;
    let records = h.geodesics(&rc.sweep.box_spec);
    let mut rows = Vec::with_capacity(rc.grid.len());
    for b in &rc.grid {
        let v = psi_sum(&records, b).map_err(|e| CliError::Check(e.to_string()))?;
        rows.push(PsiRow { thresholds: b.thresholds.clone(), psi: v, volume: b.volume(), ratio: v / b.volume() });
    }
    match rc.format {
        Format::Json => write_json(out, &rows),
        Format::Csv => {
            let mut w = csv_writer(out);
            let mut head = t_headers(rc.sweep.rank());
            head.extend(["psi", "volume", "ratio"].map(String::from));
            w.write_record(&head).map_err(env_err)?;
            for r in &rows {
                let mut rec: Vec<String> = r.thresholds.iter().map(|t| t.to_string()).collect();
                rec.extend([r.psi.to_string(), r.volume.to_string(), r.ratio.to_string()]);
                w.write_record(&rec).map_err(env_err)?;
            }
            w.flush().map_err(env_err)
        }
    }
}

/// Certified (disc, h, R) of the harvested fields, smallest |disc| first.
pub fn local_invariants(h: &Harvest) -> Vec<LocalInvariants> {
    let mut rows: Vec<LocalInvariants> = h
        .fields
        .values()
        .filter_map(|f| {
            Some(LocalInvariants { discriminant: f.key.disc.to_i64()?, h: f.h?, regulator: f.regulator? })
        })
        .collect();
    rows.sort_by_key(|r| (r.discriminant.unsigned_abs(), r.discriminant));
    rows
}

pub fn lmfdb_client(rc: &RunConfig) -> Result<Client, CliError> {
    let cache = match &rc.lmfdb_cache {
        Some(p) => FactCache::open(p).map_err(env_err)?,
        None => FactCache::in_memory(),
    };
    let mut cfg = ClientConfig { offline: rc.offline, ..Default::default() };
    if let Some(u) = &rc.lmfdb_url {
        cfg.base_url = u.clone();
    }
    Ok(Client::new(cfg, cache))
}

pub fn crosscheck(rc: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let h = run_harvest(rc)?;
    let uncertified = h.fields.values().filter(|f| f.h.is_none() || f.regulator.is_none()).count();
    if uncertified > 0 {
        eprintln!("{uncertified} harvested fields have no certified invariants and are left out");
    }
    let mut rows = local_invariants(&h);
    if let Some(n) = rc.limit {
        rows.truncate(n);
    }
    let client = lmfdb_client(rc)?;
    let report = client.crosscheck(&rows);
    match rc.format {
        Format::Json => write_json(out, &report)?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["disc", "h", "R", "status", "label", "detail"]).map_err(env_err)?;
            for row in &report.rows {
                let (status, label, detail) = match &row.status {
                    RowStatus::Verified { label } => ("verified", label.clone(), String::new()),
                    RowStatus::Mismatch { label, detail, .. } => ("mismatch", label.clone(), detail.clone()),
                    RowStatus::Unverifiable { reason } => ("unverifiable", String::new(), reason.clone()),
                    RowStatus::Error { message } => ("error", String::new(), message.clone()),
                };
                let l = &row.local;
                w.write_record([l.discriminant.to_string(), l.h.to_string(), l.regulator.to_string(), status.into(), label, detail])
                    .map_err(env_err)?;
            }
            w.flush().map_err(env_err)?;
        }
    }
    let (bad, errs) = (report.discrepancies(), report.errors());
    eprintln!("{} rows: {} verified, {} mismatched, {} errors", report.rows.len(), report.verified(), bad.len(), errs.len());
    if !errs.is_empty() {
        let hint = if client.is_offline() {
            "NetworkUnavailable: offline and the fact cache does not cover these fields; point --lmfdb-cache at \
             data/lmfdb_fixture.json, or drop --offline (and unset PGEO_LMFDB_OFFLINE) to fetch them"
        } else {
            "NetworkUnavailable or upstream error while fetching; retry, or run --offline against a fact cache"
        };
        return Err(CliError::Env(hint.into()));
    }
    if !bad.is_empty() {
        let detail: Vec<String> = bad
            .iter()
            .map(|r| match &r.status {
                RowStatus::Mismatch { label, detail, .. } => format!("disc {} ({label}): {detail}", r.local.discriminant),
                _ => unreachable!(),
            })
            .collect();
        return Err(CliError::Check(format!("{} discrepancies:\n  {}", bad.len(), detail.join("\n  "))));
    }
    Ok(())
}
