//! File formats: dataset CSV with a small sidecar for metadata, a compact
//! binary container for dissimilarity matrices, and a human-readable audit
//! file for generated mixtures.
//!
//! The CSV layout is deliberately plain: continuous columns first (named
//! `x1..`), categorical columns prefixed `cat:`, and an optional trailing
//! `truth` column with generating labels. Floats are written in Rust's
//! shortest round-trip form, so write-read cycles are lossless.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::data::MixedDataset;
use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::simgen::{MixtureSpec, ScenarioConfig};

/// Magic prefix of the binary dissimilarity container.
const DISSIM_MAGIC: &[u8; 8] = b"MXDIS001";

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        message: message.into(),
    }
}

/// Writes a dataset as CSV; the truth column is included when present.
///
/// # Errors
///
/// I/O errors from the filesystem.
pub fn write_dataset_csv(path: &Path, data: &MixedDataset) -> Result<()> {
    let mut out = String::new();
    let mut header: Vec<String> = (1..=data.p_r()).map(|j| format!("x{j}")).collect();
    header.extend((1..=data.p_c()).map(|j| format!("cat:z{j}")));
    if data.truth().is_some() {
        header.push("truth".into());
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..data.n() {
        let mut fields: Vec<String> = (0..data.p_r())
            .map(|j| format!("{}", data.continuous()[(i, j)]))
            .collect();
        fields.extend((0..data.p_c()).map(|j| data.cat_column(j)[i].to_string()));
        if let Some(truth) = data.truth() {
            fields.push(truth[i].to_string());
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes the metadata sidecar (`<path>.meta`) recording shape, declared
/// level counts, and the generating seed.
///
/// # Errors
///
/// I/O errors from the filesystem.
pub fn write_dataset_meta(path: &Path, data: &MixedDataset, seed: u64) -> Result<()> {
    let levels = data
        .levels()
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let text = format!(
        "n = {}\np_r = {}\np_c = {}\nlevels = {}\nseed = {}\n",
        data.n(),
        data.p_r(),
        data.p_c(),
        levels,
        seed
    );
    fs::write(meta_path(path), text)?;
    Ok(())
}

fn meta_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    s.into()
}

/// Reads a dataset written by [`write_dataset_csv`].
///
/// Column roles come from the header: a `cat:` prefix marks a categorical
/// column and a column named `truth` holds labels. Declared level counts
/// are taken from the sidecar when one exists, otherwise inferred as one
/// past the largest observed code.
///
/// # Errors
///
/// [`Error::Parse`] for malformed content, plus I/O errors.
pub fn read_dataset_csv(path: &Path) -> Result<MixedDataset> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(path, "empty file"))?;
    let names: Vec<&str> = header.split(',').collect();
    let mut cont_cols = Vec::new();
    let mut cat_cols = Vec::new();
    let mut truth_col = None;
    for (idx, name) in names.iter().enumerate() {
        if *name == "truth" {
            if truth_col.is_some() {
                return Err(parse_err(path, "duplicate truth column"));
            }
            truth_col = Some(idx);
        } else if name.starts_with("cat:") {
            cat_cols.push(idx);
        } else {
            cont_cols.push(idx);
        }
    }
    let mut cont_data: Vec<Vec<f64>> = vec![Vec::new(); cont_cols.len()];
    let mut cat_data: Vec<Vec<usize>> = vec![Vec::new(); cat_cols.len()];
    let mut truth: Vec<usize> = Vec::new();
    for (line_no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != names.len() {
            return Err(parse_err(
                path,
                format!(
                    "line {}: expected {} fields, found {}",
                    line_no + 2,
                    names.len(),
                    fields.len()
                ),
            ));
        }
        for (slot, &idx) in cont_cols.iter().enumerate() {
            let v: f64 = fields[idx].parse().map_err(|_| {
                parse_err(
                    path,
                    format!("line {}: bad float {:?}", line_no + 2, fields[idx]),
                )
            })?;
            cont_data[slot].push(v);
        }
        for (slot, &idx) in cat_cols.iter().enumerate() {
            let v: usize = fields[idx].parse().map_err(|_| {
                parse_err(
                    path,
                    format!("line {}: bad level code {:?}", line_no + 2, fields[idx]),
                )
            })?;
            cat_data[slot].push(v);
        }
        if let Some(idx) = truth_col {
            let v: usize = fields[idx].parse().map_err(|_| {
                parse_err(
                    path,
                    format!("line {}: bad label {:?}", line_no + 2, fields[idx]),
                )
            })?;
            truth.push(v);
        }
    }
    let n = cont_data
        .first()
        .map(Vec::len)
        .or_else(|| cat_data.first().map(Vec::len))
        .ok_or_else(|| parse_err(path, "no data columns"))?;
    let cont = DMatrix::from_fn(n, cont_data.len(), |i, j| cont_data[j][i]);
    let levels = match read_meta_levels(&meta_path(path))? {
        Some(levels) if levels.len() == cat_data.len() => levels,
        _ => cat_data
            .iter()
            .map(|col| col.iter().max().map_or(1, |&m| m + 1))
            .collect(),
    };
    let truth = if truth_col.is_some() {
        Some(truth)
    } else {
        None
    };
    MixedDataset::new(cont, cat_data, levels, truth)
}

/// Level counts from a sidecar, or `None` when the file does not exist.
fn read_meta_levels(path: &Path) -> Result<Option<Vec<usize>>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path)?;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("levels = ") {
            if rest.trim().is_empty() {
                return Ok(Some(Vec::new()));
            }
            let levels = rest
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| parse_err(path, format!("bad level count {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(Some(levels));
        }
    }
    Ok(None)
}

/// Writes a dissimilarity matrix as a compact binary file: an 8-byte magic,
/// the order as a little-endian u64, then the lower triangle (diagonal
/// included) row-major as little-endian f64.
///
/// # Errors
///
/// I/O errors from the filesystem.
pub fn write_dissimilarity(path: &Path, d: &DissimilarityMatrix) -> Result<()> {
    let n = d.n();
    let mut file = fs::File::create(path)?;
    file.write_all(DISSIM_MAGIC)?;
    file.write_all(&(n as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(n * (n + 1) / 2 * 8);
    for i in 0..n {
        for j in 0..=i {
            buf.extend_from_slice(&d.get(i, j).to_le_bytes());
        }
    }
    file.write_all(&buf)?;
    Ok(())
}

/// Reads a file written by [`write_dissimilarity`].
///
/// # Errors
///
/// [`Error::Parse`] for a wrong magic or truncated payload, plus I/O
/// errors.
pub fn read_dissimilarity(path: &Path) -> Result<DissimilarityMatrix> {
    let mut file = fs::File::open(path)?;
    let mut magic = [0u8; 8];
    file.read_exact(&mut magic)
        .map_err(|_| parse_err(path, "file too short for magic"))?;
    if &magic != DISSIM_MAGIC {
        return Err(parse_err(path, "not a dissimilarity container"));
    }
    let mut n_bytes = [0u8; 8];
    file.read_exact(&mut n_bytes)
        .map_err(|_| parse_err(path, "missing matrix order"))?;
    let n = u64::from_le_bytes(n_bytes) as usize;
    let expected = n * (n + 1) / 2 * 8;
    let mut payload = Vec::with_capacity(expected);
    file.read_to_end(&mut payload)?;
    if payload.len() != expected {
        return Err(parse_err(
            path,
            format!("expected {expected} payload bytes, found {}", payload.len()),
        ));
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut pos = 0usize;
    for i in 0..n {
        for j in 0..=i {
            let bytes: [u8; 8] = payload[pos..pos + 8].try_into().expect("length checked");
            let v = f64::from_le_bytes(bytes);
            m[(i, j)] = v;
            m[(j, i)] = v;
            pos += 8;
        }
    }
    DissimilarityMatrix::from_matrix(m)
}

/// Writes a human-readable audit of a calibrated mixture: the scenario
/// factors, weights, means, covariances, and the overlap bookkeeping.
///
/// # Errors
///
/// I/O errors from the filesystem.
pub fn write_mixture_audit(path: &Path, cfg: &ScenarioConfig, spec: &MixtureSpec) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# calibrated mixture audit");
    let _ = writeln!(out, "k = {}", cfg.k);
    let _ = writeln!(out, "n = {}", cfg.n);
    let _ = writeln!(out, "p = {}", cfg.p);
    let _ = writeln!(out, "pct_categorical = {}", cfg.pct_categorical);
    let _ = writeln!(out, "density = {:?}", cfg.density);
    let _ = writeln!(out, "sphericity = {:?}", cfg.sphericity);
    let _ = writeln!(out, "replicate = {}", cfg.replicate);
    let _ = writeln!(out, "master_seed = {}", cfg.master_seed);
    let _ = writeln!(out, "dataset_seed = {}", cfg.dataset_seed());
    let _ = writeln!(out, "target_overlap = {}", spec.target_overlap);
    let _ = writeln!(out, "achieved_overlap = {}", spec.achieved_overlap);
    let _ = writeln!(out, "covariance_scale = {}", spec.scale);
    let weights = spec
        .weights
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let _ = writeln!(out, "weights = {weights}");
    for (l, mean) in spec.means.iter().enumerate() {
        let row = mean
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(out, "mean[{l}] = {row}");
    }
    for (l, cov) in spec.covariances.iter().enumerate() {
        let rows = (0..cov.nrows())
            .map(|i| {
                (0..cov.ncols())
                    .map(|j| cov[(i, j)].to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("; ");
        let _ = writeln!(out, "cov[{l}] = {rows}");
    }
    let rows = (0..spec.pairwise.nrows())
        .map(|i| {
            (0..spec.pairwise.ncols())
                .map(|j| spec.pairwise[(i, j)].to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("; ");
    let _ = writeln!(out, "pairwise_overlap = {rows}");
    fs::write(path, out)?;
    Ok(())
}
