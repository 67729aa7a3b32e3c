//! Command-line interface.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O, 4 data contract violation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::fieldgen::{parse_config, FieldConfig};
use crate::grid::{filtration, normalize, Direction, LevelSchedule, ScalarGrid};
use crate::io::{load_grid, save_grid, GridFormat};
use crate::oracle::oracle_barcode;
use crate::persistence::morse_barcode;
use crate::svg::{barcode_svg, sweep_svg};
use crate::sweep::{default_schedule, parse_levels, parse_sweep_csv, sweep, sweep_csv, Engine};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_DATA: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "cubetopo", version, about = "Topology of voxel excursion sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Levels as `a,b,c` or `start:stop:step` [default: 0.2:1.0:0.1]
    #[arg(long, global = true, allow_hyphen_values = true)]
    levels: Option<String>,
    /// Keep cubes with value <= level (leq) or >= level (geq)
    #[arg(long, global = true, default_value = "leq")]
    direction: String,
    /// Rescale the grid onto [0, 1] before thresholding
    #[arg(long, global = true)]
    normalize: bool,
    /// Random seed for `generate`
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Grid file format: text or raw (input is detected when omitted)
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic field
    Generate {
        /// `key = value` parameter file
        #[arg(long)]
        config: Option<PathBuf>,
        /// Grid dimensions, e.g. `32,32,64`
        #[arg(long)]
        dims: Option<String>,
        /// spectral or sgs (overrides the config)
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Betti numbers and Euler characteristic per level, as CSV
    Analyze {
        grid: PathBuf,
        #[arg(long, default_value = "morse")]
        engine: String,
    },
    /// Persistence barcode of one dimension, as CSV
    Barcode {
        grid: PathBuf,
        #[arg(long)]
        q: usize,
        /// Also write the barcode as SVG
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value = "morse")]
        engine: String,
    },
    /// Render a sweep CSV as SVG curves
    Plot {
        csv: PathBuf,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { .. } => EXIT_IO,
            Error::InvalidParams(_) | Error::NonMonotoneSchedule { .. } | Error::IndexOutOfRange(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        msg: msg.into(),
    }
}

/// Runs the CLI on `args` (including the program name); returns the exit code.
pub fn run(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    // Output is buffered so the work can run inside a thread pool.
    let (mut obuf, mut ebuf) = (Vec::new(), Vec::new());
    let result = match cli.threads {
        Some(0) => Err(usage("--threads must be positive")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut obuf, &mut ebuf)),
            Err(e) => Err(usage(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(&cli, &mut obuf, &mut ebuf),
    };
    let _ = err.write_all(&ebuf);
    let result = result.and_then(|()| write_out(out, &obuf));
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut Vec<u8>, err: &mut Vec<u8>) -> Result<(), Failure> {
    match &cli.command {
        Command::Generate {
            config,
            dims,
            method,
            out: path,
        } => generate(cli, config.as_deref(), dims.as_deref(), method.as_deref(), path, out),
        Command::Analyze { grid, engine } => {
            let engine: Engine = engine.parse()?;
            let (g, schedule) = load_with_schedule(cli, grid)?;
            let rows = sweep(&g, &schedule, engine)?;
            write_out(out, sweep_csv(&rows).as_bytes())
        }
        Command::Barcode { grid, q, svg, engine } => {
            if *q > 2 {
                return Err(usage(format!("--q must be 0, 1 or 2, got {q}")));
            }
            let engine: Engine = engine.parse()?;
            let (g, schedule) = load_with_schedule(cli, grid)?;
            let bodies = filtration(&g, &schedule);
            let bc = match engine {
                Engine::Morse => morse_barcode(&bodies, schedule.levels(), *q)?,
                Engine::Oracle => oracle_barcode(&bodies, schedule.levels(), *q)?,
            };
            if let Some(p) = svg {
                let title = format!("H{q} barcode, {} levels ({})", schedule.len(), schedule.direction());
                fs::write(p, barcode_svg(&bc, &title)).map_err(|e| Error::io(p, e))?;
                let _ = writeln!(err, "wrote {}", p.display());
            }
            write_out(out, bc.to_csv().as_bytes())
        }
        Command::Plot { csv, out: path } => {
            let text = fs::read_to_string(csv).map_err(|e| Error::io(csv, e))?;
            if text.trim().is_empty() {
                return Err(usage(format!("{} is empty", csv.display())));
            }
            let rows = parse_sweep_csv(&text, csv)?;
            if rows.is_empty() {
                return Err(usage(format!("{} has no data rows", csv.display())));
            }
            let svg = sweep_svg(&rows, "Betti numbers and Euler characteristic");
            match path {
                Some(p) => fs::write(p, svg).map_err(|e| Error::io(p, e).into()),
                None => write_out(out, svg.as_bytes()),
            }
        }
    }
}

fn write_out(out: &mut dyn Write, bytes: &[u8]) -> Result<(), Failure> {
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io("<stdout>", e).into())
}

fn grid_format(cli: &Cli, path: &Path) -> Result<GridFormat, Failure> {
    match &cli.format {
        Some(f) => Ok(f.parse()?),
        None => Ok(GridFormat::detect(path)?),
    }
}

fn load_with_schedule(cli: &Cli, path: &Path) -> Result<(ScalarGrid, LevelSchedule), Failure> {
    let direction: Direction = cli.direction.parse()?;
    let format = grid_format(cli, path)?;
    let mut grid = load_grid(path, format)?;
    if cli.normalize {
        grid = normalize(&grid)?;
    }
    let schedule = match &cli.levels {
        Some(spec) => LevelSchedule::new(parse_levels(spec)?, direction)?,
        None => default_schedule(direction)?,
    };
    Ok((grid, schedule))
}

fn parse_dims(s: &str) -> Result<[usize; 3], Failure> {
    let d: Vec<usize> = s
        .split(|c: char| c == ',' || c == 'x' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage(format!("cannot parse dims {s:?}")))?;
    match d[..] {
        [x, y, z] if x > 0 && y > 0 && z > 0 => Ok([x, y, z]),
        _ => Err(usage(format!("dims needs three positive integers, got {s:?}"))),
    }
}

fn generate(
    cli: &Cli,
    config: Option<&Path>,
    dims: Option<&str>,
    method: Option<&str>,
    path: &Path,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let mut cfg = match config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            parse_config(&text, p).map_err(|e| usage(e.to_string()))?
        }
        None => FieldConfig::default(),
    };
    if let Some(m) = method {
        cfg.method = m.parse()?;
    }
    if let Some(d) = dims {
        cfg.dims = Some(parse_dims(d)?);
    }
    let Some(dims) = cfg.dims else {
        return Err(usage("dims are required (config `dims = X Y Z` or --dims X,Y,Z)"));
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    cfg.seed = Some(seed);
    let format = match &cli.format {
        Some(f) => f.parse()?,
        None => GridFormat::Text,
    };
    let grid = cfg.generate(dims, seed)?;
    save_grid(&grid, path, format)?;
    write_out(out, cfg.describe().as_bytes())
}
