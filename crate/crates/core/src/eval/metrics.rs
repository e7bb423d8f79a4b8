//! On-disk run artifacts: `metrics.csv` (one row per round), `alphas.csv`
//! (downsampled hedge weights), `summary.json`.
//!
//! All three are written to `.tmp` siblings and renamed into place only on
//! [`RunWriter::finalize`], so a crashed or failed run never leaves a
//! partial file behind and a rerun replaces outputs wholesale instead of
//! appending. Float columns use Rust's shortest round-trip formatting, so
//! identical runs produce byte-identical files.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::train::StepRecord;

const METRICS_FILE: &str = "metrics.csv";
const ALPHAS_FILE: &str = "alphas.csv";
const SUMMARY_FILE: &str = "summary.json";

pub struct RunWriter {
    dir: PathBuf,
    metrics: Option<BufWriter<File>>,
    alphas: Option<BufWriter<File>>,
    finalized: bool,
}

impl RunWriter {
    /// Opens temp files under `dir` (created if missing) and writes CSV
    /// headers. `num_classifiers` fixes the alpha column count.
    pub fn create(dir: &Path, num_classifiers: usize) -> io::Result<RunWriter> {
        fs::create_dir_all(dir)?;
        let mut metrics = BufWriter::new(File::create(tmp_path(dir, METRICS_FILE))?);
        writeln!(metrics, "round,correct,combined_loss,cumulative_error")?;
        let mut alphas = BufWriter::new(File::create(tmp_path(dir, ALPHAS_FILE))?);
        let header: Vec<String> =
            (1..=num_classifiers).map(|k| format!("alpha_{k}")).collect();
        writeln!(alphas, "round,{}", header.join(","))?;
        Ok(RunWriter {
            dir: dir.to_path_buf(),
            metrics: Some(metrics),
            alphas: Some(alphas),
            finalized: false,
        })
    }

    pub fn write_step(&mut self, rec: &StepRecord) -> io::Result<()> {
        let w = self.metrics.as_mut().expect("writer already finalized");
        writeln!(
            w,
            "{},{},{},{}",
            rec.round,
            rec.correct as u8,
            rec.combined_loss,
            rec.cumulative_error
        )
    }

    pub fn write_alphas(&mut self, round: u64, alphas: &[f64]) -> io::Result<()> {
        let w = self.alphas.as_mut().expect("writer already finalized");
        let row: Vec<String> = alphas.iter().map(|a| a.to_string()).collect();
        writeln!(w, "{},{}", round, row.join(","))
    }

    /// Writes `summary.json` and atomically renames all three files into
    /// place. After this the run directory holds only final artifacts.
    pub fn finalize(mut self, summary: &serde_json::Value) -> io::Result<()> {
        let summary_tmp = tmp_path(&self.dir, SUMMARY_FILE);
        {
            let mut w = BufWriter::new(File::create(&summary_tmp)?);
            serde_json::to_writer_pretty(&mut w, summary)?;
            writeln!(w)?;
            w.flush()?;
            w.get_ref().sync_all()?;
        }
        for writer in [self.metrics.take(), self.alphas.take()].into_iter().flatten() {
            let f = writer.into_inner().map_err(|e| e.into_error())?;
            f.sync_all()?;
        }
        for name in [METRICS_FILE, ALPHAS_FILE, SUMMARY_FILE] {
            fs::rename(tmp_path(&self.dir, name), self.dir.join(name))?;
        }
        self.finalized = true;
        Ok(())
    }
}

impl Drop for RunWriter {
    fn drop(&mut self) {
        if self.finalized {
            return;
        }
        drop(self.metrics.take());
        drop(self.alphas.take());
        for name in [METRICS_FILE, ALPHAS_FILE, SUMMARY_FILE] {
            let _ = fs::remove_file(tmp_path(&self.dir, name));
        }
    }
}

fn tmp_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.tmp"))
}
