use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use coarray::api::{self, AnalysisRequest, DoaRequest, Limits};
use coarray::error::{ApiError, ApiResult, ErrorKind};
use coarray::service::{self, ServiceConfig};
use coarray::{render, svg};
use coarray_core::DEFAULT_MAX_APERTURE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Parser)]
#[command(
    name = "coarray",
    version,
    about = "Difference-coarray robustness analysis of sparse linear arrays"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Largest accepted array aperture
    #[arg(long, global = true, env = "COARRAY_MAX_APERTURE", default_value_t = DEFAULT_MAX_APERTURE)]
    max_aperture: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weight function and coarray holes
    Weights {
        /// Sensor positions, e.g. "[0 1 4]" or 0,1,4
        #[arg(required = true, num_args = 1.., allow_hyphen_values = true)]
        positions: Vec<String>,
    },
    /// Double-difference check, single-failure sweep and verdict
    Analyze {
        #[arg(required = true, num_args = 1.., allow_hyphen_values = true)]
        positions: Vec<String>,
        /// Also sweep arrays that fail the double-difference check
        #[arg(long)]
        sweep_all: bool,
    },
    /// Closed-form two-fold redundant array with N sensors
    #[command(name = "gen-2fra")]
    Gen2fra {
        #[arg(short = 'n', long = "n")]
        n: usize,
    },
    /// Generate and classify every family member in a range of N
    Scan {
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        /// Write the rows as CSV here and print only the summary
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coarray MUSIC on a simulated field, healthy and with failed sensors
    Doa {
        #[arg(long, allow_hyphen_values = true)]
        array: String,
        /// Failure set: "none", "16" or "16,17"; repeatable
        #[arg(long = "fail")]
        fail: Vec<String>,
        /// Source angles in degrees, comma separated [default: -20:4:20]
        #[arg(long, allow_hyphen_values = true)]
        sources: Option<String>,
        /// Per-source SNR in dB; "inf" disables noise
        #[arg(long, allow_hyphen_values = true)]
        snr: Option<f64>,
        #[arg(long)]
        snapshots: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        grid_step: Option<f64>,
        /// Peak matching tolerance in degrees
        #[arg(long)]
        tolerance: Option<f64>,
        /// Permit failing the end sensors
        #[arg(long)]
        allow_edge: bool,
        /// Also write the spectrum plot here
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Serve the JSON API and web UI
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory with the web UI; a minimal built-in page is used otherwise
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
}

fn unsupported(cmd: &str, f: Format) -> ApiError {
    ApiError::new(
        ErrorKind::Input,
        "UNSUPPORTED_FORMAT",
        format!(
            "{cmd} does not support --format {}",
            format!("{f:?}").to_lowercase()
        ),
    )
}

fn parse_fail_set(s: &str) -> ApiResult<Vec<i64>> {
    let t = s.trim();
    if t.is_empty() || t.eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| ApiError::bad_request(format!("invalid --fail entry {p:?}")))
        })
        .collect()
}

fn parse_angles(s: &str) -> ApiResult<Vec<f64>> {
    s.split(',')
        .map(|a| {
            a.trim()
                .parse()
                .map_err(|_| ApiError::bad_request(format!("invalid angle {a:?}")))
        })
        .collect()
}

fn write_file(path: &PathBuf, text: &str) -> ApiResult<()> {
    std::fs::write(path, text)?;
    Ok(())
}

fn run(cli: Cli) -> ApiResult<String> {
    let limits = Limits {
        max_aperture: cli.max_aperture,
        ..Limits::default()
    };
    let fmt = cli.format;
    match cli.command {
        Command::Weights { positions } => {
            let w = api::weights(&AnalysisRequest::new(positions.join(" ")), &limits)?;
            Ok(match fmt {
                Format::Human => render::weights_human(&w),
                Format::Json => api::to_json(&w),
                Format::Csv => render::weights_csv(&w),
                Format::Svg => svg::weights_svg(&w),
            })
        }
        Command::Analyze {
            positions,
            sweep_all,
        } => {
            let mut req = AnalysisRequest::new(positions.join(" "));
            req.options.include_sweep_on_non_ddb = sweep_all;
            let (arr, _, r) = api::analyze(&req, &limits)?;
            match fmt {
                Format::Human => Ok(render::report_human(arr.positions(), &r)),
                Format::Json => Ok(api::to_json(&r)),
                Format::Csv => Ok(render::report_csv(&r)),
                Format::Svg => Err(unsupported("analyze", fmt)),
            }
        }
        Command::Gen2fra { n } => {
            let f = api::family(n, &limits)?;
            match fmt {
                Format::Human => Ok(render::family_human(&f)),
                Format::Json => Ok(api::to_json(&f)),
                Format::Csv => Ok(render::family_csv(&f)),
                Format::Svg => Err(unsupported("gen-2fra", fmt)),
            }
        }
        Command::Scan { from, to, out } => {
            if fmt == Format::Svg {
                return Err(unsupported("scan", fmt));
            }
            let (_, scan) = api::scan(from, to, &limits)?;
            if let Some(path) = out {
                write_file(&path, &render::scan_csv(&scan))?;
                return Ok(match fmt {
                    Format::Json => api::to_json(&scan.summary),
                    _ => render::scan_summary(&scan),
                });
            }
            Ok(match fmt {
                Format::Json => api::to_json(&scan),
                Format::Csv => render::scan_csv(&scan),
                _ => render::scan_human(&scan),
            })
        }
        Command::Doa {
            array,
            fail,
            sources,
            snr,
            snapshots,
            seed,
            grid_step,
            tolerance,
            allow_edge,
            svg: svg_out,
        } => {
            let mut req = DoaRequest::new(array);
            if !fail.is_empty() {
                req.fail = fail
                    .iter()
                    .map(|s| parse_fail_set(s))
                    .collect::<ApiResult<_>>()?;
            }
            req.sources = sources.as_deref().map(parse_angles).transpose()?;
            req.snr_db = snr;
            req.snapshots = snapshots;
            req.seed = seed;
            req.grid_step = grid_step;
            req.tolerance = tolerance;
            req.allow_edge = allow_edge;
            let (_, d) = api::doa(&req, &limits)?;
            if let Some(path) = svg_out {
                write_file(&path, &svg::doa_svg(&d))?;
            }
            Ok(match fmt {
                Format::Human => render::doa_human(&d),
                Format::Json => api::to_json(&d),
                Format::Csv => render::doa_csv(&d),
                Format::Svg => svg::doa_svg(&d),
            })
        }
        Command::Serve { bind, port, ui_dir } => {
            let config = ServiceConfig { limits, ui_dir };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(service::serve(config, SocketAddr::new(bind, port)))
                .map_err(|e| {
                    ApiError::new(ErrorKind::Internal, "SERVER_ERROR", format!("{e:#}"))
                })?;
            Ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if out
                .write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(match err.kind {
                ErrorKind::Input | ErrorKind::NotFound | ErrorKind::MethodNotAllowed => 2,
                ErrorKind::Domain => 3,
                ErrorKind::Internal => 1,
            })
        }
    }
}
