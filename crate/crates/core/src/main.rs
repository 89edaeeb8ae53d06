//! Command-line front end for the link engine.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use toric_sarkisov::classify::{classify_dim3, load_dataset, p4_weight_search, verify_dataset};
use toric_sarkisov::error::Error;
use toric_sarkisov::extraction::{candidate_points, extraction_site, is_terminal_extraction};
use toric_sarkisov::fan::{gorenstein_data, SimplexVariety};
use toric_sarkisov::format::{parse_fan_str, variety_to_string, FanFile};
use toric_sarkisov::lattice::IntVec;
use toric_sarkisov::link::{enumerate_links, pair_inverses, run_link, run_web, WebConfig};
use toric_sarkisov::notation::{blowup_notation, pretty_record};
use toric_sarkisov::rat::Rat;
use toric_sarkisov::svg::{shed_off, shed_svg};

#[derive(Parser)]
#[command(
    name = "toric-sarkisov",
    about = "Two-ray game on toric Fano simplices: terminal extractions, flips, flops and the Sarkisov links between fake weighted projective spaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Jsonl,
    Pretty,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Report the predicates of a fan file: terminal, canonical, Fano,
    /// weights and discriminant.
    Check { file: PathBuf },
    /// Weights, discriminant, normal form and anticanonical data of a
    /// simplex entry.
    Info { file: PathBuf },
    /// List the terminal extractions up to a discrepancy bound.
    Extract {
        file: PathBuf,
        #[arg(long, default_value = "5")]
        dmax: Rat,
        #[arg(long, value_enum, default_value = "on")]
        dedup_symmetry: OnOff,
        #[arg(long, value_enum, default_value = "pretty")]
        format: Format,
    },
    /// Run Sarkisov links from a simplex entry.
    Link {
        file: PathBuf,
        /// Blow up exactly this lattice point, e.g. `1,1,0`.
        #[arg(long, conflicts_with = "all")]
        point: Option<String>,
        /// Run every extraction within the discrepancy bound.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value = "5")]
        dmax: Rat,
        #[arg(long, value_enum, default_value = "on")]
        dedup_symmetry: OnOff,
        #[arg(long, value_enum, default_value = "pretty")]
        format: Format,
    },
    /// Run the web of links over a dataset file, streaming JSON records.
    Web {
        dataset: PathBuf,
        #[arg(long, default_value = "5")]
        dmax: Rat,
        #[arg(long, value_enum, default_value = "on")]
        dedup_symmetry: OnOff,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Skip this many leading dataset entries (resume support).
        #[arg(long, default_value_t = 0)]
        offset: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-derive the eight toric Mori--Fano 3-folds.
    Classify3 {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a dataset of terminal Fano simplices: counts, duplicates,
    /// failures with witness points.
    Verify4 { file: PathBuf },
    /// Diophantine search for weighted point blowups of 4-space whose links
    /// start with a flop (first list) or a flip (second list).
    P4Search {
        #[arg(long, default_value_t = 100)]
        bound_abc: i64,
        #[arg(long, default_value_t = 100)]
        bound_d: i64,
    },
    /// Render the shed of a fan entry as SVG (dimensions 2 and 3) or an OFF
    /// mesh (dimension 3).
    ShedSvg {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// `svg` or `off`.
        #[arg(long, default_value = "svg")]
        mesh: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn read_fan(path: &Path) -> Result<FanFile, Error> {
    parse_fan_str(&fs::read_to_string(path)?)
}

fn read_simplex(path: &Path) -> Result<SimplexVariety, Error> {
    read_fan(path)?.into_simplex()
}

/// Writes atomically: no partial output files on failure.
fn write_output(path: &Path, contents: &str) -> Result<(), Error> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn parse_point(s: &str, dim: usize) -> Result<IntVec, Error> {
    let coords: Vec<i64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::arg(format!("bad point `{s}`")))
        })
        .collect::<Result<_, _>>()?;
    if coords.len() != dim {
        return Err(Error::arg(format!("point must have {dim} coordinates")));
    }
    Ok(IntVec(coords))
}

fn require_terminal(x: &SimplexVariety) -> Result<(), Error> {
    if let Some((w, d)) = x.fan().terminal_witness() {
        return Err(Error::arg(format!(
            "variety is not terminal: point {w} has discrepancy {d}"
        )));
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<(), Error> {
    match command {
        Command::Check { file } => {
            let entry = read_fan(&file)?;
            let simplex = entry.cones.is_none();
            let fan = entry.into_fan()?;
            let mut parts: Vec<String> = Vec::new();
            if fan.is_terminal() {
                parts.push("terminal".into());
            } else if fan.is_canonical() {
                parts.push("canonical, not terminal".into());
            } else {
                parts.push("not canonical".into());
            }
            parts.push(if fan.is_fano() {
                "Fano".into()
            } else {
                "not Fano".into()
            });
            if simplex {
                let x = SimplexVariety::from_rays(fan.rays().to_vec())?;
                parts.push("simplex".into());
                let w: Vec<String> = x.weights_sorted().iter().map(|a| a.to_string()).collect();
                parts.push(format!("weights ({})", w.join(",")));
                if x.discriminant().is_empty() {
                    parts.push("trivial discriminant".into());
                } else {
                    let d: Vec<String> =
                        x.discriminant().iter().map(|d| format!("Z/{d}")).collect();
                    parts.push(format!("discriminant {}", d.join(" x ")));
                }
            } else {
                parts.push(format!(
                    "{} rays, {} cones",
                    fan.rays().len(),
                    fan.cones().len()
                ));
            }
            println!("{}", parts.join(", "));
            Ok(())
        }
        Command::Info { file } => {
            let x = read_simplex(&file)?;
            println!("name: {}", x.info().name());
            println!("normal form: {}", x.key());
            println!("terminal: {}", x.is_terminal());
            println!("canonical: {}", x.fan().is_canonical());
            match gorenstein_data(x.fan().rays()) {
                Ok(g) => {
                    println!("anticanonical degree: {}", g.degree);
                    println!("h0(-K): {}", g.h0);
                    println!("gorenstein: {}", g.reflexive);
                }
                Err(e) => println!("anticanonical data: {e}"),
            }
            Ok(())
        }
        Command::Extract {
            file,
            dmax,
            dedup_symmetry,
            format,
        } => {
            let x = read_simplex(&file)?;
            require_terminal(&x)?;
            let sites = candidate_points(&x, dmax, dedup_symmetry == OnOff::On);
            for site in &sites {
                match format {
                    Format::Pretty => println!(
                        "{}  point {}  discrepancy {}",
                        blowup_notation(x.dim(), site),
                        site.point,
                        site.discrepancy
                    ),
                    Format::Jsonl => {
                        let rec = serde_json::json!({
                            "point": site.point,
                            "relation": site.relation_display(),
                            "centre": site.centre_weights,
                            "index": site.cone_index,
                            "discrepancy": site.discrepancy.to_string(),
                            "notation": blowup_notation(x.dim(), site),
                        });
                        println!("{rec}");
                    }
                }
            }
            eprintln!("{} extractions", sites.len());
            Ok(())
        }
        Command::Link {
            file,
            point,
            all,
            dmax,
            dedup_symmetry,
            format,
        } => {
            let x = read_simplex(&file)?;
            require_terminal(&x)?;
            let mut records = Vec::new();
            if let Some(p) = point {
                let v = parse_point(&p, x.dim())?;
                if !is_terminal_extraction(&x, &v) {
                    return Err(Error::arg(format!("{v} is not a terminal extraction")));
                }
                let site = extraction_site(&x, &v)?;
                records.push(run_link(&x, &site));
            } else if all {
                let config = WebConfig {
                    dmax,
                    symmetry_dedup: dedup_symmetry == OnOff::On,
                    ..WebConfig::default()
                };
                records = enumerate_links(&x, &config);
                for (i, r) in records.iter_mut().enumerate() {
                    r.id = Some(i as u64);
                }
                pair_inverses(&mut records);
            } else {
                return Err(Error::arg("pass --point x,y,... or --all"));
            }
            for r in &records {
                match format {
                    Format::Pretty => println!("{}", pretty_record(r)),
                    Format::Jsonl => println!(
                        "{}",
                        serde_json::to_string(r).map_err(|e| Error::arg(e.to_string()))?
                    ),
                }
            }
            eprintln!(
                "{} records, {} complete",
                records.len(),
                records.iter().filter(|r| r.is_complete()).count()
            );
            Ok(())
        }
        Command::Web {
            dataset,
            dmax,
            dedup_symmetry,
            jobs,
            offset,
            out,
        } => {
            let data = load_dataset(&fs::read_to_string(&dataset)?)?;
            let config = WebConfig {
                dmax,
                symmetry_dedup: dedup_symmetry == OnOff::On,
                jobs,
                offset,
            };
            let mut buffer = Vec::new();
            let stats = run_web(&data, &config, &mut buffer)?;
            let text = String::from_utf8(buffer).expect("records are utf8");
            match out {
                Some(path) => write_output(&path, &text)?,
                None => print!("{text}"),
            }
            eprintln!(
                "{} varieties, {} records ({} complete, {} bad antiflip, {} bad endpoint)",
                stats.varieties,
                stats.records,
                stats.complete,
                stats.bad_antiflip,
                stats.bad_endpoint
            );
            Ok(())
        }
        Command::Classify3 { out } => {
            let list = classify_dim3();
            let mut text = String::new();
            for x in &list {
                text.push_str(&format!("# {}\n", x.info().name()));
                text.push_str(&variety_to_string(x));
                text.push('\n');
            }
            match out {
                Some(path) => write_output(&path, &text)?,
                None => print!("{text}"),
            }
            eprintln!("{} varieties", list.len());
            Ok(())
        }
        Command::Verify4 { file } => {
            let report = verify_dataset(&fs::read_to_string(&file)?)?;
            println!(
                "{} entries: {} valid ({} weighted projective, {} fake quotients)",
                report.total, report.valid, report.wps, report.fake
            );
            for (a, b) in &report.duplicates {
                println!("duplicate: entries {a} and {b}");
            }
            for (ordinal, msg, witness) in &report.failures {
                match witness {
                    Some(w) => println!("entry {ordinal}: {msg} (witness point {w})"),
                    None => println!("entry {ordinal}: {msg}"),
                }
            }
            if report.ok() {
                Ok(())
            } else {
                Err(Error::arg("dataset verification failed"))
            }
        }
        Command::P4Search { bound_abc, bound_d } => {
            let (flops, flips) = p4_weight_search(bound_abc, bound_d);
            println!("blowups followed by a flop (d, a, b, c -> endpoint):");
            for h in &flops {
                println!("  {:?} -> P({})", h.tuple, join_weights(&h.endpoint));
            }
            println!("blowups followed by a flip (d, a, b, c -> endpoint):");
            for h in &flips {
                println!("  {:?} -> P({})", h.tuple, join_weights(&h.endpoint));
            }
            Ok(())
        }
        Command::ShedSvg { file, out, mesh } => {
            let fan = read_fan(&file)?.into_fan()?;
            let contents = match mesh.as_str() {
                "svg" => shed_svg(&fan)?,
                "off" => shed_off(&fan)?,
                other => return Err(Error::arg(format!("unknown mesh format `{other}`"))),
            };
            write_output(&out, &contents)
        }
    }
}

fn join_weights(w: &[i64]) -> String {
    w.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
