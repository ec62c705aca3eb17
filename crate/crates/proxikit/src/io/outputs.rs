//! Run artifacts: delimited text files with fixed column orders, plus a
//! manifest naming every file with its SHA-256 hash and size.
//!
//! Nothing here depends on the clock or on iteration order, so a rerun
//! with the same inputs produces byte-identical files and an identical
//! manifest; comparing manifests is how reproducibility is checked.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::aggregate::WeightedNetwork;
use crate::stats::LogitFit;
use crate::validity::{ClassificationTable, SweepResult};

use super::IoError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Every artifact a run produced, sorted by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("file,sha256,bytes\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{}\n", e.name, e.sha256, e.bytes));
        }
        out
    }
}

/// Writes artifacts into one directory and records each in a manifest.
/// Creating the writer probes that the directory is writable, so a bad
/// output path fails before any computation is spent.
#[derive(Debug)]
pub struct OutputWriter {
    dir: PathBuf,
    entries: BTreeMap<String, ManifestEntry>,
}

impl OutputWriter {
    pub fn create(dir: impl AsRef<Path>) -> Result<Self, IoError> {
        let dir = dir.as_ref().to_path_buf();
        let probe = || -> std::io::Result<()> {
            std::fs::create_dir_all(&dir)?;
            let marker = dir.join(".write_probe");
            std::fs::write(&marker, b"")?;
            std::fs::remove_file(&marker)
        };
        probe().map_err(|source| IoError::NotWritable {
            path: dir.clone(),
            source,
        })?;
        Ok(OutputWriter {
            dir,
            entries: BTreeMap::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes one named artifact and records its hash. Names are flat;
    /// separators are not allowed.
    pub fn write_text(&mut self, name: &str, content: &str) -> Result<(), IoError> {
        assert!(
            !name.contains(['/', '\\']),
            "artifact names must not contain path separators"
        );
        let path = self.dir.join(name);
        std::fs::write(&path, content).map_err(|source| IoError::WriteFailed {
            path: path.clone(),
            source,
        })?;
        let digest = Sha256::digest(content.as_bytes());
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.entries.insert(
            name.to_owned(),
            ManifestEntry {
                name: name.to_owned(),
                sha256,
                bytes: content.len() as u64,
            },
        );
        Ok(())
    }

    /// `measure,value` rows: the four counts, then the derived rates.
    pub fn write_classification(
        &mut self,
        name: &str,
        table: &ClassificationTable,
    ) -> Result<(), IoError> {
        let m = table.metrics();
        let mut out = String::from("measure,value\n");
        out.push_str(&format!("true_positive,{}\n", table.true_positive));
        out.push_str(&format!("false_positive,{}\n", table.false_positive));
        out.push_str(&format!("false_negative,{}\n", table.false_negative));
        out.push_str(&format!("true_negative,{}\n", table.true_negative));
        out.push_str(&format!("sensitivity,{}\n", fmt_opt(m.sensitivity)));
        out.push_str(&format!("specificity,{}\n", fmt_opt(m.specificity)));
        out.push_str(&format!("accuracy,{}\n", fmt_opt(m.accuracy)));
        out.push_str(&format!("sum_sens_spec,{}\n", fmt_opt(m.sum_sens_spec)));
        self.write_text(name, &out)
    }

    /// One row per sweep point, the unrepaired baseline first with the
    /// value `none`.
    pub fn write_sweep(&mut self, name: &str, sweep: &SweepResult) -> Result<(), IoError> {
        let mut out = String::from(
            "value,true_positive,false_positive,false_negative,true_negative,\
             sensitivity,specificity,accuracy,sum_sens_spec\n",
        );
        for p in &sweep.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                p.label(),
                p.table.true_positive,
                p.table.false_positive,
                p.table.false_negative,
                p.table.true_negative,
                fmt_opt(p.metrics.sensitivity),
                fmt_opt(p.metrics.specificity),
                fmt_opt(p.metrics.accuracy),
                fmt_opt(p.metrics.sum_sens_spec),
            ));
        }
        self.write_text(name, &out)
    }

    /// Square adjacency matrix in roster order, minutes with six
    /// decimals, zero diagonal.
    pub fn write_network(&mut self, name: &str, network: &WeightedNetwork) -> Result<(), IoError> {
        let ids: Vec<_> = network.roster().iter().collect();
        let mut out = String::from("badge");
        for id in &ids {
            out.push_str(&format!(",{id}"));
        }
        out.push('\n');
        for &a in &ids {
            out.push_str(&a.to_string());
            for &b in &ids {
                out.push_str(&format!(",{:.6}", network.weight(a, b).unwrap_or(0.0)));
            }
            out.push('\n');
        }
        self.write_text(name, &out)
    }

    /// `measure,value` rows for a fitted logistic model.
    pub fn write_logit(&mut self, name: &str, fit: &LogitFit) -> Result<(), IoError> {
        let mut out = String::from("measure,value\n");
        out.push_str(&format!("intercept,{:.6}\n", fit.intercept));
        out.push_str(&format!("slope,{:.6}\n", fit.slope));
        out.push_str(&format!("se_intercept,{:.6}\n", fit.se_intercept));
        out.push_str(&format!("se_slope,{:.6}\n", fit.se_slope));
        out.push_str(&format!("log_likelihood,{:.6}\n", fit.log_likelihood));
        out.push_str(&format!(
            "null_log_likelihood,{:.6}\n",
            fit.null_log_likelihood
        ));
        out.push_str(&format!("mcfadden_r2,{:.6}\n", fit.mcfadden_r2));
        out.push_str(&format!("aic,{:.6}\n", fit.aic()));
        out.push_str(&format!("n,{}\n", fit.n));
        out.push_str(&format!("converged,{}\n", fit.converged));
        self.write_text(name, &out)
    }

    /// Arbitrary `measure,value` rows, for summaries without a dedicated
    /// format.
    pub fn write_pairs(&mut self, name: &str, rows: &[(&str, String)]) -> Result<(), IoError> {
        let mut out = String::from("measure,value\n");
        for (k, v) in rows {
            out.push_str(&format!("{k},{v}\n"));
        }
        self.write_text(name, &out)
    }

    /// The resolved configuration of the run, `key=value` per line,
    /// sorted by key.
    pub fn write_config(&mut self, pairs: &[(String, String)]) -> Result<(), IoError> {
        let sorted: BTreeMap<&str, &str> = pairs
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect();
        let mut out = String::new();
        for (k, v) in sorted {
            out.push_str(&format!("{k}={v}\n"));
        }
        self.write_text("run_config.txt", &out)
    }

    /// Writes `manifest.csv` and returns the manifest (which does not
    /// list itself).
    pub fn finish(self) -> Result<Manifest, IoError> {
        let manifest = Manifest {
            entries: self.entries.into_values().collect(),
        };
        let path = self.dir.join("manifest.csv");
        std::fs::write(&path, manifest.to_csv_string()).map_err(|source| IoError::WriteFailed {
            path: path.clone(),
            source,
        })?;
        Ok(manifest)
    }
}

/// `{:.6}` for defined values, `NA` for undefined ones; the one float
/// format used across artifacts.
pub fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.6}"),
        None => "NA".to_owned(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table2() -> ClassificationTable {
        ClassificationTable {
            true_positive: 25_326,
            false_positive: 6_086,
            false_negative: 25_674,
            true_negative: 196_025,
        }
    }

    #[test]
    fn classification_file_has_the_published_accuracy() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = OutputWriter::create(dir.path()).unwrap();
        w.write_classification("metrics.csv", &table2()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
        let accuracy = text.lines().find(|l| l.starts_with("accuracy,")).unwrap();
        assert!(accuracy.starts_with("accuracy,0.8745"), "{accuracy}");
        assert!(text.contains("true_positive,25326\n"));
    }

    #[test]
    fn undefined_metrics_serialize_as_na() {
        let empty = ClassificationTable {
            true_positive: 0,
            false_positive: 0,
            false_negative: 0,
            true_negative: 0,
        };
        let dir = tempfile::tempdir().unwrap();
        let mut w = OutputWriter::create(dir.path()).unwrap();
        w.write_classification("metrics.csv", &empty).unwrap();
        let text = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
        assert!(text.contains("sensitivity,NA\n"));
    }

    #[test]
    fn manifest_lists_every_artifact_with_hashes() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = OutputWriter::create(dir.path()).unwrap();
        w.write_classification("metrics.csv", &table2()).unwrap();
        w.write_pairs("kappa.csv", &[("kappa", "0.96".into())])
            .unwrap();
        let manifest = w.finish().unwrap();
        let names: Vec<&str> = manifest.entries.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["kappa.csv", "metrics.csv"]);
        assert!(manifest.entries.iter().all(|e| e.sha256.len() == 64));
        let written = std::fs::read_to_string(dir.path().join("manifest.csv")).unwrap();
        assert_eq!(written, manifest.to_csv_string());
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let run = |sub: &str| {
            let mut w = OutputWriter::create(dir.path().join(sub)).unwrap();
            w.write_classification("metrics.csv", &table2()).unwrap();
            w.write_config(&[
                ("seed".into(), "7".into()),
                ("pipeline".into(), "interpolate:75".into()),
            ])
            .unwrap();
            w.finish().unwrap()
        };
        let a = run("a");
        let b = run("b");
        assert_eq!(a, b);
        assert_eq!(
            std::fs::read(dir.path().join("a/metrics.csv")).unwrap(),
            std::fs::read(dir.path().join("b/metrics.csv")).unwrap()
        );
    }

    #[test]
    fn empty_run_yields_an_empty_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = OutputWriter::create(dir.path()).unwrap().finish().unwrap();
        assert!(manifest.entries.is_empty());
        assert_eq!(
            std::fs::read_to_string(dir.path().join("manifest.csv")).unwrap(),
            "file,sha256,bytes\n"
        );
    }

    #[test]
    fn unwritable_path_fails_at_creation() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("occupied");
        std::fs::write(&blocker, b"a file, not a directory").unwrap();
        assert!(matches!(
            OutputWriter::create(blocker.join("out")),
            Err(IoError::NotWritable { .. })
        ));
    }

    #[test]
    fn network_matrix_is_square_with_zero_diagonal() {
        use crate::model::Roster;
        let roster = Roster::from_ids([1, 2, 3]);
        let net = WeightedNetwork::from_minutes(
            roster,
            [(crate::model::Dyad::new(1.into(), 2.into()).unwrap(), 4.5)],
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let mut w = OutputWriter::create(dir.path()).unwrap();
        w.write_network("minutes.csv", &net).unwrap();
        let text = std::fs::read_to_string(dir.path().join("minutes.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "badge,1,2,3");
        assert_eq!(lines[1], "1,0.000000,4.500000,0.000000");
        assert_eq!(lines[2], "2,4.500000,0.000000,0.000000");
        assert_eq!(lines[3], "3,0.000000,0.000000,0.000000");
    }
}
