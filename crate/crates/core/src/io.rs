//! File formats: two-column series CSV, curve CSVs, 16-bit PGM, and the
//! raw frame container.
//!
//! Every writer takes a list of comment lines (written as `# ...`) so run
//! provenance can ride along; every reader skips them.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::ccd::{CcdSpec, Frame, FrameMeta};
use crate::error::{Error, Result};
use crate::grid::{Grid2, IntensityMap};
use crate::metrology::{AllanCurve, PsdCurve};
use crate::registration::ShiftEstimate;
use crate::scalar::Real;
use crate::series::TimeSeries;

const FRAME_MAGIC: &[u8; 4] = b"WVAF";

fn open_writer(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_comments(w: &mut impl Write, comments: &[String]) -> Result<()> {
    for line in comments {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

/// Write a (t_seconds, value) series.
pub fn write_series_csv<R: Real>(
    path: &Path,
    series: &TimeSeries<R>,
    comments: &[String],
) -> Result<()> {
    let mut w = open_writer(path)?;
    write_comments(&mut w, comments)?;
    writeln!(w, "t_seconds,value")?;
    for (i, &v) in series.samples().iter().enumerate() {
        writeln!(w, "{},{}", series.time_of(i).to64(), v.to64())?;
    }
    Ok(())
}

/// Read a two-column (t_seconds, value) CSV with uniform sampling.
/// Comment (`#`) and blank lines are skipped; a header line of
/// non-numeric column names is tolerated.
pub fn read_series_csv(path: &Path) -> Result<TimeSeries<f64>> {
    let reader = BufReader::new(File::open(path)?);
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::Format {
                line: lineno,
                msg: format!("expected 2 columns, found {}", fields.len()),
            });
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(nums) => {
                times.push(nums[0]);
                values.push(nums[1]);
            }
            Err(_) if times.is_empty() => continue, // header row
            Err(e) => {
                return Err(Error::Format {
                    line: lineno,
                    msg: format!("unparsable number: {e}"),
                })
            }
        }
    }
    if times.len() < 2 {
        return Err(Error::InsufficientData(
            "series file holds fewer than 2 samples".into(),
        ));
    }
    let dt = times[1] - times[0];
    if dt <= 0.0 {
        return Err(Error::Format {
            line: 2,
            msg: "non-increasing timestamps".into(),
        });
    }
    for (i, pair) in times.windows(2).enumerate() {
        let step = pair[1] - pair[0];
        if ((step - dt) / dt).abs() > 1e-6 {
            return Err(Error::Format {
                line: i + 2,
                msg: format!("non-uniform sampling: step {step} vs {dt}"),
            });
        }
    }
    TimeSeries::new(values, dt)
}

/// allan.csv: T_seconds, allan_variance, n, windows_used, sql_variance.
pub fn write_allan_csv<R: Real>(
    path: &Path,
    curve: &AllanCurve<R>,
    sql_variance: Option<f64>,
    comments: &[String],
) -> Result<()> {
    let mut w = open_writer(path)?;
    write_comments(&mut w, comments)?;
    writeln!(w, "T_seconds,allan_variance,n,windows_used,sql_variance")?;
    let sql = sql_variance
        .map(|s| s.to_string())
        .unwrap_or_else(|| "nan".into());
    for p in &curve.points {
        writeln!(
            w,
            "{},{},{},{},{}",
            p.t.to64(),
            p.sigma2.to64(),
            p.n,
            p.windows_used,
            sql
        )?;
    }
    Ok(())
}

/// psd.csv: freq_hz, psd.
pub fn write_psd_csv<R: Real>(path: &Path, curve: &PsdCurve<R>, comments: &[String]) -> Result<()> {
    let mut w = open_writer(path)?;
    write_comments(&mut w, comments)?;
    writeln!(w, "freq_hz,psd")?;
    for &(f, s) in &curve.points {
        writeln!(w, "{},{}", f.to64(), s.to64())?;
    }
    Ok(())
}

/// shifts.csv: frame_index, t_seconds, dy_pixels, dx_pixels, peak_value.
pub fn write_shifts_csv<R: Real>(
    path: &Path,
    estimates: &[ShiftEstimate<R>],
    dt: f64,
    comments: &[String],
) -> Result<()> {
    let mut w = open_writer(path)?;
    write_comments(&mut w, comments)?;
    writeln!(w, "frame_index,t_seconds,dy_pixels,dx_pixels,peak_value")?;
    for (i, e) in estimates.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{}",
            i,
            i as f64 * dt,
            e.dy.to64(),
            e.dx.to64(),
            e.peak_value.to64()
        )?;
    }
    Ok(())
}

/// Intensity map as a bare CSV matrix (rows as lines).
pub fn write_intensity_csv<R: Real>(
    path: &Path,
    map: &IntensityMap<R>,
    comments: &[String],
) -> Result<()> {
    let mut w = open_writer(path)?;
    write_comments(&mut w, comments)?;
    for r in 0..map.values.rows() {
        let line: Vec<String> = map
            .values
            .row(r)
            .iter()
            .map(|v| v.to64().to_string())
            .collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// Row marginals as CSV: row_index, counts.
pub fn write_marginal_csv(path: &Path, marginal: &[u64], comments: &[String]) -> Result<()> {
    let mut w = open_writer(path)?;
    write_comments(&mut w, comments)?;
    writeln!(w, "row,counts")?;
    for (i, &k) in marginal.iter().enumerate() {
        writeln!(w, "{i},{k}")?;
    }
    Ok(())
}

/// 16-bit binary PGM (P5, big-endian samples, maxval 65535).
pub fn write_frame_pgm(path: &Path, frame: &Frame) -> Result<()> {
    let mut w = open_writer(path)?;
    write!(
        w,
        "P5\n{} {}\n65535\n",
        frame.counts.cols(),
        frame.counts.rows()
    )?;
    for &c in frame.counts.as_slice() {
        w.write_all(&c.to_be_bytes())?;
    }
    Ok(())
}

/// Intensity map as 16-bit PGM, normalized to full scale.
pub fn write_intensity_pgm<R: Real>(path: &Path, map: &IntensityMap<R>) -> Result<()> {
    let peak = map
        .values
        .as_slice()
        .iter()
        .copied()
        .fold(R::zero(), R::max)
        .to64();
    let scale = if peak > 0.0 { 65535.0 / peak } else { 0.0 };
    let mut w = open_writer(path)?;
    write!(w, "P5\n{} {}\n65535\n", map.values.cols(), map.values.rows())?;
    for &v in map.values.as_slice() {
        let q = (v.to64() * scale).round().clamp(0.0, 65535.0) as u16;
        w.write_all(&q.to_be_bytes())?;
    }
    Ok(())
}

/// Flat binary frame: 32-byte header (magic, version, rows, cols,
/// bit depth, frame index, seed) followed by little-endian u16 counts.
pub fn write_frame_raw(path: &Path, frame: &Frame, seed: u64) -> Result<()> {
    let mut w = open_writer(path)?;
    let mut header = [0u8; 32];
    header[0..4].copy_from_slice(FRAME_MAGIC);
    header[4..8].copy_from_slice(&1u32.to_le_bytes());
    header[8..12].copy_from_slice(&(frame.counts.rows() as u32).to_le_bytes());
    header[12..16].copy_from_slice(&(frame.counts.cols() as u32).to_le_bytes());
    header[16..20].copy_from_slice(&(frame.spec.bit_depth as u32).to_le_bytes());
    header[20..24].copy_from_slice(&(frame.meta.index as u32).to_le_bytes());
    header[24..32].copy_from_slice(&seed.to_le_bytes());
    w.write_all(&header)?;
    for &c in frame.counts.as_slice() {
        w.write_all(&c.to_le_bytes())?;
    }
    Ok(())
}

/// Read a flat binary frame written by [`write_frame_raw`].
pub fn read_frame_raw(path: &Path, spec_template: &CcdSpec) -> Result<(Frame, u64)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = [0u8; 32];
    r.read_exact(&mut header)?;
    if &header[0..4] != FRAME_MAGIC {
        return Err(Error::Format {
            line: 0,
            msg: "bad frame magic".into(),
        });
    }
    let rows = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
    let bit_depth = u32::from_le_bytes(header[16..20].try_into().unwrap()) as u8;
    let index = u32::from_le_bytes(header[20..24].try_into().unwrap()) as u64;
    let seed = u64::from_le_bytes(header[24..32].try_into().unwrap());
    let mut bytes = vec![0u8; rows * cols * 2];
    r.read_exact(&mut bytes)?;
    let counts: Vec<u16> = bytes
        .chunks_exact(2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .collect();
    let mut spec = *spec_template;
    spec.rows = rows;
    spec.cols = cols;
    spec.bit_depth = bit_depth;
    Ok((
        Frame {
            counts: Grid2::from_vec(rows, cols, counts)?,
            spec,
            meta: FrameMeta {
                index,
                timestamp: 0.0,
                rng_stream: index,
            },
        },
        seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("wva_io_test_{}_{name}", std::process::id()));
        p
    }

    #[test]
    fn series_roundtrip() {
        let path = tmp("series.csv");
        let s = TimeSeries::new(vec![1.5, -2.0, 0.25, 7.0], 0.01).unwrap();
        write_series_csv(&path, &s, &["seed: 42".into()]).unwrap();
        let back = read_series_csv(&path).unwrap();
        assert_eq!(back.samples(), s.samples());
        assert!((back.dt() - 0.01).abs() < 1e-12);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn single_column_rejected_with_line_number() {
        let path = tmp("ragged.csv");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "# comment").unwrap();
        writeln!(f, "0.0,1.0").unwrap();
        writeln!(f, "0.01").unwrap();
        drop(f);
        match read_series_csv(&path) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected format error, got {other:?}"),
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn nonuniform_sampling_rejected() {
        let path = tmp("nonuniform.csv");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "0.0,1.0\n0.01,2.0\n0.03,3.0").unwrap();
        drop(f);
        assert!(matches!(
            read_series_csv(&path),
            Err(Error::Format { .. })
        ));
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn frame_raw_roundtrip() {
        let path = tmp("frame.bin");
        let spec = CcdSpec::paper_default(4, 6);
        let frame = Frame {
            counts: Grid2::from_fn(4, 6, |r, c| (r * 6 + c) as u16),
            spec,
            meta: FrameMeta {
                index: 3,
                timestamp: 0.03,
                rng_stream: 3,
            },
        };
        write_frame_raw(&path, &frame, 99).unwrap();
        let (back, seed) = read_frame_raw(&path, &spec).unwrap();
        assert_eq!(back.counts, frame.counts);
        assert_eq!(seed, 99);
        assert_eq!(back.meta.index, 3);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn pgm_header_and_size() {
        let path = tmp("frame.pgm");
        let spec = CcdSpec::paper_default(3, 5);
        let frame = Frame {
            counts: Grid2::filled(3, 5, 260u16),
            spec,
            meta: FrameMeta {
                index: 0,
                timestamp: 0.0,
                rng_stream: 0,
            },
        };
        write_frame_pgm(&path, &frame).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n5 3\n65535\n"));
        assert_eq!(bytes.len(), b"P5\n5 3\n65535\n".len() + 3 * 5 * 2);
        std::fs::remove_file(&path).ok();
    }
}
