//! Report documents and the output directory.
//!
//! Everything written here is a pure function of the resolved config: no
//! timestamps, host names or worker counts, so reruns compare byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use dissipde::analysis::Estimate;
use dissipde::sde::format_f64;

/// One verified inequality or agreement, flattened for the CSV report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: Option<f64>,
    pub ratio: Option<f64>,
    pub se: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            constant: None,
            ratio: None,
            se: None,
            pass,
        }
    }

    /// `lhs ≤ rhs + 3 se`
    pub fn upper(name: impl Into<String>, lhs: f64, rhs: f64, se: f64) -> Self {
        Self::new(name, lhs, rhs, lhs <= rhs + 3.0 * se).se(se)
    }

    /// `|estimate - exact| ≤ k se`
    pub fn agrees(name: impl Into<String>, est: &Estimate, exact: f64, k: f64) -> Self {
        Self::new(name, est.mean, exact, (est.mean - exact).abs() <= k * est.se).se(est.se)
    }

    pub fn constant(mut self, c: f64) -> Self {
        self.constant = Some(c);
        self
    }

    pub fn ratio(mut self, r: f64) -> Self {
        self.ratio = Some(r);
        self
    }

    pub fn se(mut self, se: f64) -> Self {
        self.se = Some(se);
        self
    }
}

/// What an experiment produced besides its files.
#[derive(Debug, Default)]
pub struct Findings {
    pub checks: Vec<Check>,
    pub sections: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
}

impl Findings {
    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn section(&mut self, name: &str, value: impl Serialize) -> serde_json::Result<()> {
        self.sections.insert(name.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub experiment: String,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub sections: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
    pub config: Value,
}

fn opt(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

impl Report {
    pub fn csv(&self) -> String {
        let mut s = String::from("check_name,lhs,rhs,constant,ratio,se,pass\n");
        for c in &self.checks {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                c.name,
                format_f64(c.lhs),
                format_f64(c.rhs),
                opt(c.constant),
                opt(c.ratio),
                opt(c.se),
                c.pass
            ));
        }
        s
    }
}

/// A CSV cell: numbers get 17 significant digits.
#[derive(Clone, Debug)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Output directory that remembers what it wrote.
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Names written so far, sorted.
    pub fn files(&self) -> Vec<String> {
        let mut f = self.files.clone();
        f.sort();
        f.dedup();
        f
    }

    pub fn write_with<F>(&mut self, name: &str, body: F) -> io::Result<()>
    where
        F: FnOnce(&mut dyn Write) -> io::Result<()>,
    {
        let file = fs::File::create(self.dir.join(name))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn text(&mut self, name: &str, text: &str) -> io::Result<()> {
        self.write_with(name, |w| w.write_all(text.as_bytes()))
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> io::Result<()> {
        self.write_with(name, |w| {
            writeln!(w, "{}", header.join(","))?;
            for row in rows {
                let cells: Vec<String> = row.iter().map(Cell::render).collect();
                writeln!(w, "{}", cells.join(","))?;
            }
            Ok(())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_fixed_columns_and_blank_missing_fields() {
        let r = Report {
            experiment: "x".into(),
            seed: 1,
            pass: true,
            checks: vec![Check::upper("a", 1.0, 2.0, 0.1).ratio(0.5)],
            sections: BTreeMap::new(),
            warnings: vec![],
            files: vec![],
            config: Value::Null,
        };
        let csv = r.csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("check_name,lhs,rhs,constant,ratio,se,pass"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 7);
        assert_eq!(row[3], "");
        assert_eq!(row[1].parse::<f64>().unwrap(), 1.0);
        assert_eq!(row[6], "true");
    }

    #[test]
    fn agreement_is_two_sided() {
        let e = Estimate {
            mean: 1.0,
            se: 0.1,
            n: 10,
        };
        assert!(Check::agrees("a", &e, 1.29, 3.0).pass);
        assert!(!Check::agrees("a", &e, 0.69, 3.0).pass);
    }
}
