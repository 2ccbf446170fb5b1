//! Artifact formatting and atomic file writes.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use pseudohyp_core::curves::Trajectory;
use serde::Serialize;

/// Header `s,x0..,v0..,lambda,drift,speed`.
pub fn csv_header(dim: usize) -> String {
    let mut cols = vec!["s".to_string()];
    cols.extend((0..dim).map(|i| format!("x{i}")));
    cols.extend((0..dim).map(|i| format!("v{i}")));
    cols.extend(["lambda", "drift", "speed"].map(String::from));
    cols.join(",")
}

/// One row per state; every value carries 17 significant digits.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = csv_header(traj.dim());
    out.push('\n');
    for st in &traj.states {
        let values = std::iter::once(st.s)
            .chain(st.x.iter().copied())
            .chain(st.v.iter().copied())
            .chain([st.lambda, st.drift, st.speed]);
        for (i, v) in values.enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pseudohyp_core::curves::{integrate, CurveKind, InitialState, IntegratorSettings};
    use pseudohyp_core::forms::{CatalogForm, CovectorFieldSpec, MetricSpec};

    #[test]
    fn csv_shape() {
        let f = CovectorFieldSpec::catalog(3, CatalogForm::ExactSphere).compile().unwrap();
        let init = InitialState::new(vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]);
        let t = integrate(&f, &MetricSpec::euclidean(3).unwrap(), CurveKind::Geodesic, &init, &IntegratorSettings::new(0.01, 10))
            .unwrap();
        let csv = trajectory_csv(&t);
        let lines: Vec<&str> = csv.split('\n').collect();
        assert_eq!(lines.len(), 13);
        assert_eq!(lines[12], "");
        assert_eq!(lines[0], "s,x0,x1,x2,v0,v1,v2,lambda,drift,speed");
        assert!(lines[1..12].iter().all(|l| l.split(',').count() == 10));
        assert!(!csv.contains('\r'));
        let first: f64 = lines[2].split(',').next().unwrap().parse().unwrap();
        assert_eq!(first, 0.01);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
