use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::regions::RdiPoint;

/// Rounds to 12 significant digits and prints the shortest form that
/// round-trips the rounded value.
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".into()
    } else {
        format!("{rounded}")
    }
}

/// `D,R,Delta[,Rh]` with a one-line header. The `Rh` column appears when any
/// point carries a helper rate.
pub fn curve_csv(points: &[RdiPoint]) -> String {
    let with_rh = points.iter().any(|p| p.r_h.is_some());
    let mut out = String::from(if with_rh { "D,R,Delta,Rh\n" } else { "D,R,Delta\n" });
    for p in points {
        out.push_str(&format!("{},{},{}", fmt_sig(p.d), fmt_sig(p.r), fmt_sig(p.delta)));
        if with_rh {
            out.push(',');
            out.push_str(&p.r_h.map(fmt_sig).unwrap_or_default());
        }
        out.push('\n');
    }
    out
}

/// Generic CSV with a header row; values use [`fmt_sig`].
pub fn table_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.iter().map(|&v| fmt_sig(v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Named file contents produced by one run, written only after every
/// computation succeeded.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_slice())
    }

    /// Writes every file into `dir` through a temporary file and a rename.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, contents) in &self.files {
            let target = dir.join(name);
            let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
            let result = (|| -> std::io::Result<()> {
                let mut f = fs::File::create(&tmp)?;
                f.write_all(contents)?;
                f.sync_all()?;
                fs::rename(&tmp, &target)
            })();
            if let Err(e) = result {
                let _ = fs::remove_file(&tmp);
                return Err(e.into());
            }
            written.push(target);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(0.292481250360578), "0.292481250361");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(123456789.123456), "123456789.123");
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_columns() {
        let p = RdiPoint::new(0.25, 0.1, 0.5);
        assert_eq!(curve_csv(&[p]), "D,R,Delta\n0.1,0.25,0.5\n");
        let q = RdiPoint { r_h: Some(1.0), ..p };
        assert_eq!(curve_csv(&[q]), "D,R,Delta,Rh\n0.1,0.25,0.5,1\n");
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::default();
        a.add("x.csv", "a\n");
        let paths = a.write_to(&dir.path().join("sub")).unwrap();
        assert_eq!(fs::read_to_string(&paths[0]).unwrap(), "a\n");
        assert_eq!(fs::read_dir(dir.path().join("sub")).unwrap().count(), 1);
    }
}
