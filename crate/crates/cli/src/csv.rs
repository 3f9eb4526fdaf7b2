//! Fixed-format CSV writing: 17 significant digits, `\n` line endings.

use crate::config::ExperimentConfig;

/// `# icf <engine version> config_sha256=<hash> command=<name>`.
pub fn header_comment(config: &ExperimentConfig, command: &str) -> String {
    format!("# icf {} config_sha256={} command={command}\n", icf_core::VERSION, config.hash())
}

pub fn float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    text: String,
    columns: usize,
}

impl Table {
    pub fn new(config: &ExperimentConfig, command: &str, columns: &[&str]) -> Self {
        let mut text = header_comment(config, command);
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text, columns: columns.len() }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "row width");
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn float_row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&x| float(x)).collect();
        self.row(&cells);
    }

    pub fn finish(self) -> String {
        self.text
    }
}

impl std::fmt::Display for Table {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text)
    }
}

/// Parses the numeric body of a CSV produced here, skipping the comment and
/// header lines.
pub fn parse(text: &str) -> Vec<Vec<f64>> {
    let mut rows = Vec::new();
    for line in text.lines().skip_while(|l| l.starts_with('#')).skip(1) {
        rows.push(line.split(',').map(|c| c.parse::<f64>().unwrap_or(f64::NAN)).collect());
    }
    rows
}

pub fn column(text: &str, name: &str) -> Option<Vec<f64>> {
    let header = text.lines().find(|l| !l.starts_with('#'))?;
    let idx = header.split(',').position(|c| c == name)?;
    Some(parse(text).into_iter().map(|r| r[idx]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-0.5), "-5.0000000000000000e-1");
        assert_eq!(float(f64::NAN), "NaN");
        let x = std::f64::consts::PI;
        assert_eq!(float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn table_round_trip() {
        let cfg = ExperimentConfig::default();
        let mut t = Table::new(&cfg, "test", &["a", "b"]);
        t.float_row(&[1.0, f64::NAN]);
        t.float_row(&[-2.5, 3.0]);
        let text = t.finish();
        assert!(text.starts_with("# icf "));
        assert!(!text.contains('\r'));
        assert_eq!(column(&text, "a").unwrap(), vec![1.0, -2.5]);
        assert!(column(&text, "b").unwrap()[0].is_nan());
        assert!(column(&text, "c").is_none());
    }
}
