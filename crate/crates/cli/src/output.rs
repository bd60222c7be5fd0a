//! Criterion records and artifact writers.

use serde::Serialize;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn holds(self, measured: f64, threshold: f64) -> bool {
        match self {
            Relation::Lt => measured < threshold,
            Relation::Le => measured <= threshold,
            Relation::Ge => measured >= threshold,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        })
    }
}

/// One checked quantity. A criterion may have several cases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub criterion: u8,
    pub case: String,
    pub model: &'static str,
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn new(
        criterion: u8,
        case: impl Into<String>,
        model: &'static str,
        measured: f64,
        relation: Relation,
        threshold: f64,
    ) -> Self {
        Self {
            criterion,
            case: case.into(),
            model,
            measured,
            relation,
            threshold,
            // NaN never passes
            passed: relation.holds(measured, threshold),
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {:<24} {:<9} {}  {:.3e} {} {:.3e}",
            self.criterion,
            self.case,
            self.model,
            if self.passed { "PASS" } else { "FAIL" },
            self.measured,
            self.relation,
            self.threshold
        )?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

/// Writes artifacts into one directory and remembers what it wrote.
#[derive(Debug)]
pub struct ArtifactDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl ArtifactDir {
    pub fn create(root: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), csv::Error> {
        let path = self.root.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        self.written.push(path);
        Ok(())
    }

    /// A CSV with an explicit header, for tables whose width varies.
    pub fn csv_records(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<(), csv::Error> {
        let path = self.root.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        self.written.push(path);
        Ok(())
    }

    /// Whitespace-separated columns with a `#` header, for plotting tools.
    pub fn dat(&mut self, name: &str, columns: &[&str], rows: &[Vec<f64>]) -> std::io::Result<()> {
        let path = self.root.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(w, "# {}", columns.join(" "))?;
        for r in rows {
            let line: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        w.flush()?;
        self.written.push(path);
        Ok(())
    }
}
