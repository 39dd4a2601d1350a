use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dynamics::{RunOutcome, Trajectory};
use crate::error::Result;
use crate::grid::{lp_norm, Field};
use crate::monitors::{oned_series, upvr_functional};

/// Opens `path` and writes the `# config_hash=` line every CSV starts with.
pub fn create_csv(path: &Path, hash: &str) -> Result<csv::Writer<BufWriter<File>>> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "# config_hash={hash}")?;
    Ok(csv::WriterBuilder::new().flexible(true).from_writer(f))
}

/// Pretty JSON with the hash as a top-level `config_hash` key.
pub fn write_json<T: Serialize>(path: &Path, hash: &str, body: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut value = serde_json::to_value(body)?;
    let doc = match value.as_object_mut() {
        Some(obj) => {
            obj.insert("config_hash".into(), hash.into());
            value
        }
        None => serde_json::json!({ "config_hash": hash, "body": value }),
    };
    std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(())
}

fn norm(f: &Field, p: f64) -> f64 {
    lp_norm(f, p).expect("p >= 1")
}

/// One row per snapshot: norms of `u` and `v`, the weighted functional when
/// configured, and the one-dimensional series when `dim = 1`.
pub fn write_series(path: &Path, hash: &str, traj: &Trajectory) -> Result<()> {
    let mut w = create_csv(path, hash)?;
    let mut header: Vec<String> =
        ["t", "u_l1", "u_l2", "u_inf", "v_l1", "v_inf", "v_min"].iter().map(|s| s.to_string()).collect();
    if traj.energy_exponents.is_some() {
        header.push("energy".into());
    }
    let oned = if traj.grid.dim() == 1 { Some(oned_series(traj)?) } else { None };
    if let Some(s) = &oned {
        header.extend(s.named().iter().map(|(n, _)| format!("oned_{n}")));
    }
    w.write_record(&header)?;
    for (k, s) in traj.snapshots.iter().enumerate() {
        let mut row = vec![s.t, norm(&s.u, 1.0), norm(&s.u, 2.0), s.u.max(), norm(&s.v, 1.0), s.v.max(), s.v.min()];
        if let Some((p, r)) = traj.energy_exponents {
            row.push(upvr_functional(&s.u, &s.v, s.w.as_ref(), traj.v0_sup, p, r));
        }
        if let Some(series) = &oned {
            row.extend(series.named().iter().map(|(_, v)| v[k]));
        }
        w.write_record(row.iter().map(|x| format!("{x:e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Field dump: hash line, the literal header `t,dim,nx[,ny]`, its values, then
/// the cell values with one grid row (fixed `j`) per line.
pub fn write_field(path: &Path, hash: &str, t: f64, f: &Field) -> Result<()> {
    let g = f.grid();
    let mut w = create_csv(path, hash)?;
    if g.dim() == 1 {
        w.write_record(["t", "dim", "nx"])?;
        w.write_record([format!("{t:e}"), "1".into(), g.nx().to_string()])?;
    } else {
        w.write_record(["t", "dim", "nx", "ny"])?;
        w.write_record([format!("{t:e}"), "2".into(), g.nx().to_string(), g.ny().to_string()])?;
    }
    for row in f.values().chunks(g.nx()) {
        w.write_record(row.iter().map(|x| format!("{x:e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a field dump back into `(t, dim, cells per axis, values)`.
pub fn read_field(path: &Path) -> Result<(f64, usize, Vec<usize>, Vec<f64>)> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).has_headers(true).flexible(true).from_path(path)?;
    let mut records = r.records();
    let bad = |m: &str| crate::error::Error::Config(format!("{}: {m}", path.display()));
    let meta = records.next().ok_or_else(|| bad("missing metadata row"))??;
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("non-numeric entry"));
    let t = parse(&meta[0])?;
    let dim = parse(&meta[1])? as usize;
    let cells: Vec<usize> = (0..dim).map(|a| parse(&meta[2 + a]).map(|x| x as usize)).collect::<Result<_>>()?;
    let mut values = Vec::new();
    for rec in records {
        for s in rec?.iter() {
            values.push(parse(s)?);
        }
    }
    Ok((t, dim, cells, values))
}

/// Writes `u`, `v` and, when present, `w` for every snapshot; returns the directory.
pub fn write_fields(dir: &Path, hash: &str, outcome: &RunOutcome) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    for (k, s) in outcome.trajectory.snapshots.iter().enumerate() {
        write_field(&dir.join(format!("u_{k:05}.csv")), hash, s.t, &s.u)?;
        write_field(&dir.join(format!("v_{k:05}.csv")), hash, s.t, &s.v)?;
        if let Some(w) = &s.w {
            write_field(&dir.join(format!("w_{k:05}.csv")), hash, s.t, w)?;
        }
    }
    Ok(dir.to_path_buf())
}
