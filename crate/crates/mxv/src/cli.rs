//! The `mxv` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use mxv_core::geometry::MeasurementReport;
use mxv_core::isosurface::Algorithm;
use mxv_core::parsers::{parse_file, DetectedFormat, Parsed};
use mxv_core::writers::{write_mesh, MeshFormat, StructureFormat};

use crate::api::{self, MeasureRequest, MeshRequest};
use crate::error::{AppError, AppResult};
use crate::service::ServiceConfig;

#[derive(Debug, Parser)]
#[command(name = "mxv", version, about = "Structure, volumetric and band data toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detected format and a summary of the contents.
    Info {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Rewrites a structure in another format.
    Convert {
        file: PathBuf,
        #[arg(long, value_parser = parse_format)]
        to: StructureFormat,
        #[arg(short, long)]
        output: PathBuf,
        /// 1-based frame; defaults to the last one.
        #[arg(long)]
        frame: Option<usize>,
    },
    /// Replicates a periodic cell; the output format follows the extension.
    Supercell {
        file: PathBuf,
        #[arg(long, value_parser = parse_dims_arg)]
        dims: [usize; 3],
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        frame: Option<usize>,
    },
    /// Distances, angles and the dihedral between picked atoms.
    Measure {
        file: PathBuf,
        /// 1-based serials, e.g. 1,2,3,4.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        atoms: Vec<usize>,
        #[arg(long)]
        frame: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Bond list.
    Bonds {
        file: PathBuf,
        #[arg(long)]
        factor: Option<f64>,
        #[arg(long)]
        frame: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Isosurface of a cube file written as OBJ or PLY.
    Isosurface {
        file: PathBuf,
        /// Defaults to max|value|/200.
        #[arg(long)]
        isovalue: Option<f64>,
        #[arg(long, default_value = "mc", value_parser = parse_algorithm)]
        algorithm: Algorithm,
        #[arg(long, value_parser = parse_dims_arg)]
        supercell: Option<[usize; 3]>,
        /// Also write the surface at −isovalue.
        #[arg(long)]
        negative: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Band energies as CSV, in eV relative to the chemical potential.
    Band {
        file: PathBuf,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, requires = "emax", allow_hyphen_values = true)]
        emin: Option<f64>,
        #[arg(long, requires = "emin", allow_hyphen_values = true)]
        emax: Option<f64>,
    },
    /// Runs the HTTP service.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        bind: Option<String>,
    },
}

fn parse_format(s: &str) -> Result<StructureFormat, String> {
    s.parse()
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn parse_dims_arg(s: &str) -> Result<[usize; 3], String> {
    mxv_core::geometry::parse_dims(s).ok_or_else(|| format!("expected AxBxC with positive integers, got '{s}'"))
}

fn load(path: &Path) -> AppResult<(DetectedFormat, Parsed)> {
    let bytes = std::fs::read(path).map_err(|source| AppError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(parse_file(&name, &bytes)?)
}

fn save(path: &Path, text: &str) -> AppResult<()> {
    std::fs::write(path, text).map_err(|source| AppError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn structure_format_for(path: &Path) -> AppResult<StructureFormat> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("xyz") => Ok(StructureFormat::Xyz),
        Some("cif") => Ok(StructureFormat::Cif),
        Some("dat") => Ok(StructureFormat::OmxCart),
        _ => Err(AppError::Usage(format!(
            "cannot choose an output format for {} (use .xyz, .cif or .dat)",
            path.display()
        ))),
    }
}

fn write_measurement(out: &mut dyn Write, r: &MeasurementReport) -> std::io::Result<()> {
    for a in &r.picked {
        let [x, y, z] = a.position;
        writeln!(out, "atom {:>5} {:<4} {:>12.6} {:>12.6} {:>12.6}", a.serial, a.species, x, y, z)?;
    }
    let serials: Vec<usize> = r.picked.iter().map(|a| a.serial).collect();
    for (n, d) in r.distances.iter().enumerate() {
        writeln!(out, "distance {}-{}: {:.6} Å", serials[n], serials[n + 1], d)?;
    }
    for (n, a) in r.angles.iter().enumerate() {
        writeln!(out, "angle {}-{}-{}: {:.4}°", serials[n], serials[n + 1], serials[n + 2], a)?;
    }
    if serials.len() == 4 {
        let label = format!("{}-{}-{}-{}", serials[0], serials[1], serials[2], serials[3]);
        match (r.dihedral, &r.dihedral_note) {
            (Some(d), _) => writeln!(out, "dihedral {label}: {d:.4}°")?,
            (None, Some(note)) => writeln!(out, "dihedral {label}: undefined ({note})")?,
            (None, None) => writeln!(out, "dihedral {label}: undefined")?,
        }
    }
    Ok(())
}

fn execute(cmd: Command, out: &mut dyn Write) -> AppResult<()> {
    let io = |e: std::io::Error| AppError::Write {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    match cmd {
        Command::Info { file, json } => {
            let (format, parsed) = load(&file)?;
            let report = api::info(format, &parsed);
            if json {
                out.write_all(api::to_json(&report).as_bytes()).map_err(io)?;
            } else {
                writeln!(out, "format: {} ({})", format.kind.name(), confidence_text(format)).map_err(io)?;
                writeln!(out, "data: {}", report.data).map_err(io)?;
                let summary = serde_json::to_value(&report.summary).expect("summary serializes");
                for (k, v) in summary.as_object().into_iter().flatten() {
                    writeln!(out, "{k}: {v}").map_err(io)?;
                }
            }
        }
        Command::Convert { file, to, output, frame } => {
            let (_, parsed) = load(&file)?;
            let text = api::export(&parsed, to, frame)?;
            save(&output, &text)?;
            writeln!(out, "wrote {} ({})", output.display(), to.name()).map_err(io)?;
        }
        Command::Supercell {
            file,
            dims,
            output,
            frame,
        } => {
            let format = structure_format_for(&output)?;
            let (_, parsed) = load(&file)?;
            let text = api::supercell_text(&parsed, dims, format, frame)?;
            save(&output, &text)?;
            writeln!(
                out,
                "wrote {} ({}x{}x{} supercell, {})",
                output.display(),
                dims[0],
                dims[1],
                dims[2],
                format.name()
            )
            .map_err(io)?;
        }
        Command::Measure {
            file,
            atoms,
            frame,
            json,
        } => {
            let (_, parsed) = load(&file)?;
            let report = api::measure(
                &parsed,
                &MeasureRequest {
                    atoms,
                    frame,
                    supercell: None,
                },
            )?;
            if json {
                out.write_all(api::to_json(&report).as_bytes()).map_err(io)?;
            } else {
                write_measurement(out, &report).map_err(io)?;
            }
        }
        Command::Bonds {
            file,
            factor,
            frame,
            json,
        } => {
            let (_, parsed) = load(&file)?;
            let report = api::bonds(&parsed, frame, factor)?;
            if json {
                out.write_all(api::to_json(&report).as_bytes()).map_err(io)?;
            } else {
                writeln!(out, "{} bonds (factor {})", report.count, report.factor).map_err(io)?;
                for b in &report.bonds {
                    let [x, y, z] = b.image;
                    writeln!(out, "{:>6} {:>6}  [{x:>2} {y:>2} {z:>2}]  {:.6}", b.i + 1, b.j + 1, b.length)
                        .map_err(io)?;
                }
            }
        }
        Command::Isosurface {
            file,
            isovalue,
            algorithm,
            supercell,
            negative,
            output,
        } => {
            let format = output
                .to_str()
                .and_then(MeshFormat::from_path)
                .ok_or_else(|| AppError::Usage(format!("{}: mesh output must end in .obj or .ply", output.display())))?;
            let (_, parsed) = load(&file)?;
            let Parsed::Volume(grid) = &parsed else {
                return Err(AppError::WrongKind {
                    expected: "volumetric",
                    found: api::kind_label(&parsed),
                });
            };
            let (pos, neg, iso) = api::meshes(
                grid,
                &MeshRequest {
                    isovalue,
                    algorithm: Some(algorithm),
                    supercell,
                },
            )?;
            let meshes = if negative { vec![&pos, &neg] } else { vec![&pos] };
            save(&output, &write_mesh(&meshes, format))?;
            let how = if isovalue.is_some() { "given" } else { "default max|value|/200" };
            writeln!(out, "isovalue {iso} ({how}), algorithm {algorithm}").map_err(io)?;
            for m in meshes {
                writeln!(
                    out,
                    "{:?}: {} vertices, {} triangles",
                    m.sign,
                    m.vertices.len(),
                    m.triangles.len()
                )
                .map_err(io)?;
            }
            writeln!(out, "wrote {}", output.display()).map_err(io)?;
        }
        Command::Band { file, csv, emin, emax } => {
            let (_, parsed) = load(&file)?;
            let text = api::band_table(&parsed, api::energy_window(emin, emax)?)?;
            save(&csv, &text)?;
            let rows = text.lines().count().saturating_sub(2);
            writeln!(out, "wrote {} ({rows} rows)", csv.display()).map_err(io)?;
        }
        Command::Serve { port, bind } => {
            let mut config = ServiceConfig::default();
            if let Some(p) = port {
                config.port = p;
            }
            if let Some(b) = bind {
                config.bind = b;
            }
            config.apply_env(|k| std::env::var(k).ok()).map_err(AppError::Usage)?;
            let rt = tokio::runtime::Runtime::new().map_err(|source| AppError::Write {
                path: PathBuf::from("<runtime>"),
                source,
            })?;
            rt.block_on(crate::service::serve(config)).map_err(|source| AppError::Write {
                path: PathBuf::from("<socket>"),
                source,
            })?;
        }
    }
    Ok(())
}

fn confidence_text(f: DetectedFormat) -> &'static str {
    match f.confidence {
        mxv_core::parsers::Confidence::ByExtension => "by extension",
        mxv_core::parsers::Confidence::ByContent => "by content",
    }
}

fn input_path(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Info { file, .. }
        | Command::Convert { file, .. }
        | Command::Supercell { file, .. }
        | Command::Measure { file, .. }
        | Command::Bonds { file, .. }
        | Command::Isosurface { file, .. }
        | Command::Band { file, .. } => Some(file),
        Command::Serve { .. } => None,
    }
}

/// Runs one command line and returns the process exit code:
/// 0 on success, 1 on usage errors, 2 on parse or data errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let path = input_path(&cli.command).map(Path::to_path_buf);
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let context = match (&e, &path) {
                (AppError::Read { .. } | AppError::Write { .. }, _) | (_, None) => String::new(),
                (_, Some(p)) => format!("{}: ", p.display()),
            };
            let _ = writeln!(err, "error: {context}{e} [{}]", e.name());
            if e.is_usage() {
                1
            } else {
                2
            }
        }
    }
}
