//! The `nilm-meta` command line. [`run`] is the whole program minus the
//! process boundary, so tests can drive it with in-memory streams.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nilm_meta::export::{canonical_json, canonical_json_resolved};
use nilm_meta::loader::{bind, load_dataset_path};
use nilm_meta::model::Dataset;
use nilm_meta::typedb::{load_type_library, LibrarySource, TypeLibrary};
use nilm_meta::validate::{validate_raw, ValidateOptions};
use nilm_meta::wiring::validate_wiring;
use nilm_meta::{Diagnostic, ValidationReport};

pub const EXIT_VALID: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "nilm-meta",
    version,
    about = "Validate, resolve and export NILM dataset metadata"
)]
struct Cli {
    /// Folder of appliance types, rooms and taxonomies layered over the built-in library.
    #[arg(long, global = true, env = "NILM_META_LIBRARY", value_name = "PATH")]
    library: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a metadata folder (or a single exported document).
    Validate {
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        /// Treat warnings as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Print the resolved appliances of one meter as JSON.
    Resolve {
        dir: PathBuf,
        /// Building instance; omit for a dataset-level meter.
        #[arg(long)]
        building: Option<u32>,
        #[arg(long)]
        meter: u32,
    },
    /// Print the mains wiring tree.
    Tree { dir: PathBuf },
    /// Query the appliance type library.
    Types {
        #[command(subcommand)]
        query: TypesQuery,
    },
    /// Write the dataset as one canonical JSON document.
    Export {
        dir: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
        /// Inline resolved appliance types.
        #[arg(long)]
        resolved: bool,
    },
}

#[derive(Subcommand, Debug)]
enum TypesQuery {
    /// The type with everything it inherits.
    Show { name: String },
    /// Parent chain, nearest first.
    Ancestry { name: String },
    /// Priors collected up the chain, tagged with their distance.
    Priors { name: String },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OutputFormat {
    Text,
    Json,
}

/// Fatal condition: message for stderr plus exit code.
struct Exit(i32, String);

impl Exit {
    fn failure(msg: impl Into<String>) -> Self {
        Exit(EXIT_FAILURE, msg.into())
    }
}

type CmdResult = Result<i32, Exit>;

/// Runs the program on `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_FAILURE
            } else {
                EXIT_VALID
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let library = library(cli.library.as_deref())?;
    match cli.command {
        Command::Validate {
            dir,
            format,
            strict,
        } => cmd_validate(&dir, &library, format, strict, out),
        Command::Resolve {
            dir,
            building,
            meter,
        } => cmd_resolve(&dir, &library, building, meter, out, err),
        Command::Tree { dir } => cmd_tree(&dir, out, err),
        Command::Types { query } => cmd_types(&library, query, out),
        Command::Export {
            dir,
            output,
            resolved,
        } => cmd_export(&dir, &library, &output, resolved, err),
    }
}

fn library(overlay: Option<&Path>) -> Result<TypeLibrary, Exit> {
    let Some(path) = overlay else {
        return Ok(TypeLibrary::seed());
    };
    load_type_library(&LibrarySource::SeedWithOverlay(path.to_path_buf())).map_err(|e| {
        let mut msg = format!("cannot load library {}: {e}", path.display());
        for d in e.diagnostics() {
            msg.push_str(&format!("\n{d}"));
        }
        Exit::failure(msg)
    })
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Exit> {
    out.write_all(text.as_bytes())
        .map_err(|e| Exit::failure(format!("cannot write output: {e}")))
}

fn emit_diagnostics(err: &mut dyn Write, diags: &[Diagnostic]) {
    for d in diags {
        let _ = writeln!(err, "{d}");
    }
}

fn validated(
    dir: &Path,
    library: &TypeLibrary,
    strict: bool,
) -> Result<(Dataset, ValidationReport), Exit> {
    let raw = load_dataset_path(dir).map_err(|e| Exit::failure(format!("[{}] {e}", e.code())))?;
    let (dataset, report) = validate_raw(&raw, library, &ValidateOptions::default());
    Ok((dataset, if strict { report.strict() } else { report }))
}

fn loaded(dir: &Path) -> Result<(Dataset, Vec<Diagnostic>), Exit> {
    let raw = load_dataset_path(dir).map_err(|e| Exit::failure(format!("[{}] {e}", e.code())))?;
    let (dataset, mut diags) = bind(&raw);
    diags.splice(0..0, raw.diagnostics);
    Ok((dataset, diags))
}

fn exit_for(valid: bool) -> i32 {
    if valid {
        EXIT_VALID
    } else {
        EXIT_INVALID
    }
}

fn pretty(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn cmd_validate(
    dir: &Path,
    library: &TypeLibrary,
    format: OutputFormat,
    strict: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let (_, report) = validated(dir, library, strict)?;
    emit(
        out,
        &match format {
            OutputFormat::Text => report.to_text(),
            OutputFormat::Json => report.to_json(),
        },
    )?;
    Ok(exit_for(report.is_valid()))
}

fn cmd_resolve(
    dir: &Path,
    library: &TypeLibrary,
    building: Option<u32>,
    meter: u32,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let (dataset, _) = loaded(dir)?;
    let Some(m) = dataset.meter(building, meter) else {
        let place = building.map_or("dataset level".to_owned(), |b| format!("building {b}"));
        return Err(Exit::failure(format!("no meter {meter} at {place}")));
    };
    let base = nilm_meta::model::meter_path(building, meter).join("appliances");
    let mut records = Vec::new();
    let mut problems = Vec::new();
    for (i, a) in m.appliances.iter().enumerate() {
        match library.resolve_appliance(a, &base.join(i)) {
            Ok(r) => records.push(r.to_json()),
            Err(d) => problems.extend(d),
        }
    }
    emit_diagnostics(err, &problems);
    emit(out, &pretty(&records))?;
    Ok(exit_for(problems.is_empty()))
}

fn cmd_tree(dir: &Path, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let (dataset, _) = loaded(dir)?;
    let (forest, diags) = validate_wiring(&dataset, ValidateOptions::default().depth_limit);
    emit(out, &forest.render_tree())?;
    emit_diagnostics(err, &diags);
    Ok(exit_for(diags.iter().all(|d| !d.is_error())))
}

fn cmd_types(library: &TypeLibrary, query: TypesQuery, out: &mut dyn Write) -> CmdResult {
    let unknown = |name: &str| Exit::failure(format!("unknown appliance type `{name}`"));
    match query {
        TypesQuery::Show { name } => {
            let resolved = library.resolve_type(&name).map_err(|_| unknown(&name))?;
            let mut value = resolved.properties.to_json();
            if let Some(obj) = value.as_object_mut() {
                obj.insert("ancestry".into(), serde_json::json!(resolved.ancestry));
            }
            emit(out, &pretty(&value))?;
        }
        TypesQuery::Ancestry { name } => {
            let chain = library.ancestry(&name).map_err(|_| unknown(&name))?;
            emit(
                out,
                &chain.iter().map(|t| format!("{t}\n")).collect::<String>(),
            )?;
        }
        TypesQuery::Priors { name } => {
            let priors = library
                .collect_all_priors(&name)
                .map_err(|_| unknown(&name))?;
            let map: serde_json::Map<String, serde_json::Value> = priors
                .iter()
                .map(|(k, v)| {
                    (
                        k.as_str().to_owned(),
                        serde_json::to_value(v).expect("priors serialize"),
                    )
                })
                .collect();
            emit(out, &pretty(&map))?;
        }
    }
    Ok(EXIT_VALID)
}

fn cmd_export(
    dir: &Path,
    library: &TypeLibrary,
    output: &Path,
    resolved: bool,
    err: &mut dyn Write,
) -> CmdResult {
    let (dataset, report) = validated(dir, library, false)?;
    if !report.is_valid() {
        let _ = err.write_all(report.to_text().as_bytes());
        return Ok(EXIT_INVALID);
    }
    emit_diagnostics(err, &report.diagnostics);
    let json = if resolved {
        canonical_json_resolved(&dataset, library).map_err(|d| {
            emit_diagnostics(err, &d);
            Exit(EXIT_INVALID, "appliances failed to resolve".into())
        })?
    } else {
        canonical_json(&dataset)
    };
    std::fs::write(output, json)
        .map_err(|e| Exit::failure(format!("cannot write {}: {e}", output.display())))?;
    Ok(EXIT_VALID)
}
