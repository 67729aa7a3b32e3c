//! Betti numbers of the excursion sets of one grid over a level schedule.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::chain::{body_betti, BettiTriple};
use crate::error::{Error, Result};
use crate::grid::{excursion, Direction, LevelSchedule, ScalarGrid};
use crate::oracle::oracle_betti;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Morse,
    Oracle,
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "morse" => Ok(Engine::Morse),
            "oracle" => Ok(Engine::Oracle),
            other => Err(Error::InvalidParams(format!("unknown engine {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub level: f64,
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
    pub chi: i64,
    pub wall_seconds: f64,
}

impl SweepRow {
    pub fn betti(&self) -> BettiTriple {
        BettiTriple::new(self.b0, self.b1, self.b2)
    }
}

/// One row per level, in schedule order, computed in parallel.
pub fn sweep(grid: &ScalarGrid, schedule: &LevelSchedule, engine: Engine) -> Result<Vec<SweepRow>> {
    schedule
        .levels()
        .par_iter()
        .map(|&level| {
            let start = Instant::now();
            let body = excursion(grid, level, schedule.direction());
            let t = match engine {
                Engine::Morse => body_betti(&body)?,
                Engine::Oracle => oracle_betti(&body)?,
            };
            Ok(SweepRow {
                level,
                b0: t.b0,
                b1: t.b1,
                b2: t.b2,
                chi: t.chi,
                wall_seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "level,b0,b1,b2,chi,wall_seconds";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = format!("{SWEEP_HEADER}\n");
    for r in rows {
        s += &format!(
            "{},{},{},{},{},{:.6}\n",
            r.level, r.b0, r.b1, r.b2, r.chi, r.wall_seconds
        );
    }
    s
}

pub fn parse_sweep_csv(text: &str, path: &Path) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == SWEEP_HEADER => {}
        Some((i, h)) => {
            return Err(Error::parse(
                path,
                i + 1,
                format!("expected header {SWEEP_HEADER:?}, found {h:?}"),
            ))
        }
        None => return Err(Error::parse(path, 1, "empty sweep file")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let err = || Error::parse(path, i + 1, format!("bad row {line:?}"));
        if f.len() != 6 {
            return Err(err());
        }
        let row = SweepRow {
            level: f[0].parse().map_err(|_| err())?,
            b0: f[1].parse().map_err(|_| err())?,
            b1: f[2].parse().map_err(|_| err())?,
            b2: f[3].parse().map_err(|_| err())?,
            chi: f[4].parse().map_err(|_| err())?,
            wall_seconds: f[5].parse().map_err(|_| err())?,
        };
        if row.chi != row.betti().chi {
            return Err(Error::parse(path, i + 1, "chi != b0 - b1 + b2"));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Parses `a,b,c` or `start:stop:step` (stop included); values are rounded
/// to 12 decimals so that `0.2:1.0:0.1` yields exactly nine levels.
pub fn parse_levels(spec: &str) -> Result<Vec<f64>> {
    let round = |v: f64| (v * 1e12).round() / 1e12;
    let bad = || Error::InvalidParams(format!("cannot parse levels {spec:?}"));
    let s = spec.trim();
    if s.contains(':') {
        let parts: Vec<f64> = s
            .split(':')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if step == 0.0 || !step.is_finite() || (stop - start) * step < 0.0 {
            return Err(Error::InvalidParams(format!(
                "step {step} cannot reach {stop} from {start}"
            )));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        if n > 1_000_000 {
            return Err(Error::InvalidParams(format!("levels {spec:?} give too many values")));
        }
        Ok((0..=n).map(|i| round(start + i as f64 * step)).collect())
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map(round).map_err(|_| bad()))
            .collect()
    }
}

/// Levels 0.2, 0.3, …, 1.0.
pub fn default_levels() -> Vec<f64> {
    parse_levels("0.2:1.0:0.1").expect("valid default")
}

pub fn default_schedule(direction: Direction) -> Result<LevelSchedule> {
    let mut levels = default_levels();
    if direction == Direction::Geq {
        levels.reverse();
    }
    LevelSchedule::new(levels, direction)
}
