//! Seeded synthetic structured logs with planted failure patterns.
//!
//! Each planted pattern owns `length` dedicated columns. A row that carries
//! the pattern takes the planted value `v0` in all of them and is labeled as a
//! failure unless its label is flipped by noise. Other rows take `v0` in each
//! planted column independently with probability `coincidence_rate`, so every
//! proper subset of a pattern is strictly weaker than the whole. Independent
//! noise columns supply items with lift close to one.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::StructuredLog;
use crate::error::{Error, Result};

pub const LABEL_COLUMN: &str = "status";
pub const TARGET_VALUE: &str = "fail";
pub const OK_VALUE: &str = "ok";
pub const PLANTED_VALUE: &str = "v0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub rows: usize,
    pub seed: u64,
    /// One entry per planted pattern: its number of items.
    pub planted_lengths: Vec<usize>,
    /// Fraction of rows carrying each planted pattern.
    pub planted_fraction: f64,
    pub planted_cardinality: usize,
    pub coincidence_rate: f64,
    pub noise_columns: usize,
    pub noise_cardinality: usize,
    /// Probability of flipping a row's label.
    pub noise_rate: f64,
    /// Every distinct row is emitted this many times.
    pub duplicates: usize,
    /// Adds a unique `request_id` column.
    pub id_column: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            rows: 50_000,
            seed: 7,
            planted_lengths: vec![5],
            planted_fraction: 0.05,
            planted_cardinality: 4,
            coincidence_rate: 0.3,
            noise_columns: 6,
            noise_cardinality: 2,
            noise_rate: 0.01,
            duplicates: 1,
            id_column: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticLog {
    pub log: StructuredLog,
    /// `(column, value)` pairs of each planted pattern.
    pub planted: Vec<Vec<(String, String)>>,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let frac = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be in [0, 1], got {v}")))
            }
        };
        frac("planted_fraction", self.planted_fraction)?;
        frac("coincidence_rate", self.coincidence_rate)?;
        frac("noise_rate", self.noise_rate)?;
        if self.planted_fraction * self.planted_lengths.len() as f64 > 1.0 {
            return Err(Error::Config(
                "planted fractions add up to more than 1".into(),
            ));
        }
        if self.planted_lengths.contains(&0) {
            return Err(Error::Config(
                "planted patterns need at least one item".into(),
            ));
        }
        if self.planted_cardinality < 2 || (self.noise_columns > 0 && self.noise_cardinality < 1) {
            return Err(Error::Config("column cardinalities are too small".into()));
        }
        if self.duplicates == 0 || !self.rows.is_multiple_of(self.duplicates) {
            return Err(Error::Config(format!(
                "rows ({}) must be a multiple of duplicates ({})",
                self.rows, self.duplicates
            )));
        }
        if self.id_column && self.duplicates > 1 {
            return Err(Error::Config(
                "a unique id column cannot be combined with duplicated rows".into(),
            ));
        }
        Ok(())
    }

    fn columns(&self) -> Vec<String> {
        let mut columns = Vec::new();
        if self.id_column {
            columns.push("request_id".to_owned());
        }
        for (r, &len) in self.planted_lengths.iter().enumerate() {
            columns.extend((0..len).map(|j| format!("p{r}_{j}")));
        }
        columns.extend((0..self.noise_columns).map(|i| format!("n{i}")));
        columns.push(LABEL_COLUMN.to_owned());
        columns
    }
}

pub fn generate(config: &SynthConfig) -> Result<SyntheticLog> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let columns = config.columns();
    let distinct = config.rows / config.duplicates;
    let max_attempts = distinct.saturating_mul(50).max(1000);

    let mut seen: HashSet<Vec<Option<String>>> = HashSet::new();
    let mut rows = Vec::with_capacity(config.rows);
    let mut attempts = 0;
    while rows.len() < config.rows {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Config(format!(
                "could not draw {distinct} distinct rows; widen the column space"
            )));
        }
        let row = draw_row(config, &mut rng, rows.len());
        if config.duplicates > 1 {
            let features = row[..row.len() - 1].to_vec();
            if !seen.insert(features) {
                continue;
            }
        }
        for _ in 0..config.duplicates {
            rows.push(row.clone());
        }
    }

    let planted = config
        .planted_lengths
        .iter()
        .enumerate()
        .map(|(r, &len)| {
            (0..len)
                .map(|j| (format!("p{r}_{j}"), PLANTED_VALUE.to_owned()))
                .collect()
        })
        .collect();
    Ok(SyntheticLog {
        log: StructuredLog::new(columns, rows, LABEL_COLUMN)?,
        planted,
    })
}

fn draw_row(config: &SynthConfig, rng: &mut ChaCha8Rng, index: usize) -> Vec<Option<String>> {
    let mut row = Vec::new();
    if config.id_column {
        row.push(Some(format!("req{index:08}")));
    }
    let pick: f64 = rng.random();
    let carried = (pick / config.planted_fraction.max(f64::MIN_POSITIVE)) as usize;
    let carried = (carried < config.planted_lengths.len()).then_some(carried);

    for (r, &len) in config.planted_lengths.iter().enumerate() {
        for _ in 0..len {
            let value = if carried == Some(r) || rng.random_bool(config.coincidence_rate) {
                0
            } else {
                rng.random_range(1..config.planted_cardinality)
            };
            row.push(Some(format!("v{value}")));
        }
    }
    for _ in 0..config.noise_columns {
        let value = rng.random_range(0..config.noise_cardinality);
        row.push(Some(format!("v{value}")));
    }
    let failing = carried.is_some() != rng.random_bool(config.noise_rate);
    row.push(Some(
        if failing { TARGET_VALUE } else { OK_VALUE }.to_owned(),
    ));
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_seed() {
        let cfg = SynthConfig {
            rows: 500,
            ..SynthConfig::default()
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.log, b.log);
        let c = generate(&SynthConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.log, c.log);
    }

    #[test]
    fn duplicated_rows_come_in_blocks() {
        let cfg = SynthConfig {
            rows: 2_000,
            duplicates: 100,
            ..SynthConfig::default()
        };
        let s = generate(&cfg).unwrap();
        assert_eq!(s.log.row_count(), 2_000);
        let distinct: HashSet<_> = s.log.rows().iter().collect();
        assert_eq!(distinct.len(), 20);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = |f: fn(&mut SynthConfig)| {
            let mut c = SynthConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.noise_rate = 1.5));
        assert!(bad(|c| c.duplicates = 3));
        assert!(bad(|c| c.planted_lengths = vec![0]));
        assert!(bad(|c| {
            c.id_column = true;
            c.duplicates = 10
        }));
    }

    #[test]
    fn planted_columns_listed() {
        let s = generate(&SynthConfig {
            rows: 100,
            planted_lengths: vec![2, 3],
            ..SynthConfig::default()
        })
        .unwrap();
        assert_eq!(s.planted.len(), 2);
        assert_eq!(s.planted[1][2].0, "p1_2");
        assert!(s.log.column_index("p1_2").is_some());
    }
}
