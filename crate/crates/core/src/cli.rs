use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ppforge::families::{default_grid, FamilyId, GridOptions, GridSpec};
use ppforge::oracle::DEFAULT_CAP;
use ppforge::report::{run_agw, run_grid, write_csv, AgwRunReport, RunReport};
use ppforge::{Error, FieldCtx, FieldSpec, ResidueClass, Result};

pub const EXIT_OK: u8 = 0;
pub const EXIT_DISAGREE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "ppforge", version, about = "Construct permutation polynomial families and verify them exhaustively")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Print a JSON report instead of the human summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write one CSV row per instance to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Largest field order a scan may touch.
    #[arg(long, global = true, env = "PPFORGE_CAP", default_value_t = DEFAULT_CAP)]
    pub cap: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for `random` q-polynomials and `sample:N` grids.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// List every skipped instance instead of grouping by reason.
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the parameters of a field given as `p^e:n[:mod=c0,c1,...,1]`.
    FieldInfo { spec: String },
    /// Check every instance of a grid against the oracle.
    Verify(Source),
    /// Tabulate predictions and verdicts as CSV.
    Census {
        #[command(flatten)]
        source: Source,
        /// Replace the grid's fields (repeatable).
        #[arg(long = "field", value_name = "SPEC")]
        fields: Vec<String>,
        /// Output file; `-` for stdout.
        #[arg(long, short, default_value = "-")]
        out: PathBuf,
    },
    /// Check the commutative-diagram lemma on every instance.
    AgwCheck(Source),
}

#[derive(Debug, Args)]
pub struct Source {
    /// Grid or instance JSON, inline or as a file path.
    pub spec: Option<String>,
    /// Use the built-in grid for a family instead.
    #[arg(long, conflicts_with = "spec")]
    pub family: Option<FamilyId>,
}

impl Source {
    fn grid(&self) -> Result<GridSpec> {
        match (&self.spec, self.family) {
            (_, Some(f)) => Ok(default_grid(f)),
            (Some(s), None) => {
                let text = if s.trim_start().starts_with('{') {
                    s.clone()
                } else {
                    fs::read_to_string(s).map_err(|e| Error::Io(format!("{s}: {e}")))?
                };
                GridSpec::parse(&text)
            }
            (None, None) => Err(Error::Schema("give a spec (JSON or file) or --family".into())),
        }
    }
}

pub fn run(cli: Cli) -> u8 {
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return EXIT_USAGE;
        }
    }
    let g = &cli.global;
    let result = match &cli.command {
        Command::FieldInfo { spec } => field_info(g, spec),
        Command::Verify(src) => src.grid().and_then(|grid| verify(g, &grid)),
        Command::Census { source, fields, out } => source.grid().and_then(|mut grid| {
            if !fields.is_empty() {
                grid.fields = fields.clone();
            }
            census(g, &grid, out)
        }),
        Command::AgwCheck(src) => src.grid().and_then(|grid| agw_check(g, &grid)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn modulus_text(ctx: &FieldCtx) -> String {
    let m = ctx.modulus();
    let mut terms = Vec::new();
    for (i, &c) in m.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
        terms.push(match i {
            0 => c.to_string(),
            1 => format!("{coef}x"),
            _ => format!("{coef}x^{i}"),
        });
    }
    terms.join(" + ")
}

fn field_info(g: &Global, spec: &str) -> Result<u8> {
    let ctx = FieldSpec::from_str(spec)?.build()?;
    let d0 = match ctx.residue_class(ctx.one()) {
        Ok(_) => Some(ctx.elements().filter(|&x| ctx.residue_class(x) == Ok(ResidueClass::D0)).count()),
        Err(_) => None,
    };
    let gen = ctx.generator();
    if g.json {
        let v = json!({
            "schema_version": ppforge::families::SCHEMA_VERSION,
            "spec": ctx.spec().to_string(),
            "p": ctx.p(), "e": ctx.e(), "n": ctx.n(), "q": ctx.q(), "order": ctx.order(),
            "modulus": ctx.modulus(),
            "modulus_text": modulus_text(&ctx),
            "generator": ctx.format_elem(gen),
            "d0_size": d0,
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        println!("field     {}", ctx.spec());
        println!("p e n     {} {} {}", ctx.p(), ctx.e(), ctx.n());
        println!("q         {}", ctx.q());
        println!("order     {}", ctx.order());
        println!("modulus   {} over F_{}", modulus_text(&ctx), ctx.p());
        println!("generator {}", ctx.format_elem(gen));
        match d0 {
            Some(d) => println!("|D0|      {d}"),
            None => println!("|D0|      undefined in characteristic 2"),
        }
    }
    Ok(EXIT_OK)
}

fn check_cap(g: &Global, grid: &GridSpec) -> Result<()> {
    for f in &grid.fields {
        let order = FieldSpec::from_str(f)?.build()?.order();
        if order > g.cap {
            return Err(Error::FieldTooLarge { order, cap: g.cap });
        }
    }
    Ok(())
}

fn options(g: &Global) -> GridOptions {
    GridOptions { seed: g.seed, ..GridOptions::default() }
}

fn write_csv_file(path: &Path, report: &RunReport) -> Result<()> {
    if path == Path::new("-") {
        return write_csv(report.family, &report.rows, io::stdout().lock());
    }
    let file = fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_csv(report.family, &report.rows, io::BufWriter::new(file))
}

fn exit_for(report: &RunReport) -> u8 {
    if report.all_agree() {
        EXIT_OK
    } else {
        EXIT_DISAGREE
    }
}

fn print_skips(g: &Global, labels_reasons: impl Iterator<Item = (String, String)>) {
    let mut grouped: Vec<(String, usize)> = Vec::new();
    for (label, reason) in labels_reasons {
        if g.verbose {
            println!("  skipped {label}: {reason}");
        }
        match grouped.iter_mut().find(|(r, _)| *r == reason) {
            Some((_, n)) => *n += 1,
            None => grouped.push((reason, 1)),
        }
    }
    if !g.verbose {
        for (reason, n) in grouped {
            println!("  skipped {n:>6} × {reason}");
        }
    }
}

fn summary(g: &Global, r: &RunReport) {
    println!("family       {}", r.family);
    println!("fields       {}", r.fields.join(", "));
    println!("grid size    {}", r.grid_size);
    println!("agreements   {}", r.agreements);
    println!("disagreements {}", r.disagreements.len());
    println!("skipped      {}", r.skipped.len());
    println!("wall time    {:.3}s", r.wall_time_secs);
    let mut per_field: Vec<(String, [usize; 3])> = Vec::new();
    for row in &r.rows {
        let i = match per_field.iter().position(|(f, _)| *f == row.field) {
            Some(i) => i,
            None => {
                per_field.push((row.field.clone(), [0; 3]));
                per_field.len() - 1
            }
        };
        let slot = &mut per_field[i].1;
        match &row.outcome {
            ppforge::report::Outcome::Checked { observed, .. } => {
                slot[0] += 1;
                slot[1] += usize::from(*observed);
            }
            ppforge::report::Outcome::Skipped { .. } => slot[2] += 1,
        }
    }
    println!("{:<16} {:>9} {:>9} {:>9}", "field", "checked", "PPs", "skipped");
    for (f, [c, p, s]) in per_field {
        println!("{f:<16} {c:>9} {p:>9} {s:>9}");
    }
    for d in &r.disagreements {
        println!(
            "DISAGREE {}: predicted {}, observed {}\n  reproduce: {}",
            d.label,
            d.predicted,
            d.observed,
            serde_json::to_string(&d.spec).expect("json")
        );
    }
    print_skips(g, r.skipped.iter().map(|s| (s.label.clone(), s.reason.clone())));
}

fn verify(g: &Global, grid: &GridSpec) -> Result<u8> {
    check_cap(g, grid)?;
    let report = run_grid(grid, &options(g), g.cap)?;
    if let Some(path) = &g.csv {
        write_csv_file(path, &report)?;
    }
    if g.json {
        println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("json"));
    } else {
        summary(g, &report);
    }
    Ok(exit_for(&report))
}

fn census(g: &Global, grid: &GridSpec, out: &Path) -> Result<u8> {
    check_cap(g, grid)?;
    let report = run_grid(grid, &options(g), g.cap)?;
    write_csv_file(out, &report)?;
    if let Some(path) = &g.csv {
        write_csv_file(path, &report)?;
    }
    if out != Path::new("-") {
        let mut err = io::stderr().lock();
        let _ = writeln!(
            err,
            "wrote {} rows to {} ({} agree, {} disagree, {} skipped)",
            report.rows.len(),
            out.display(),
            report.agreements,
            report.disagreements.len(),
            report.skipped.len()
        );
    }
    Ok(exit_for(&report))
}

fn agw_summary(g: &Global, r: &AgwRunReport) {
    println!("family          {}", r.family);
    println!("checked         {}", r.checked);
    println!("counterexamples {}", r.counterexamples.len());
    println!("inapplicable    {}", r.inapplicable.len());
    println!("skipped         {}", r.skipped);
    println!("wall time       {:.3}s", r.wall_time_secs);
    for c in &r.counterexamples {
        println!("COUNTEREXAMPLE {c}");
    }
    let mut shown = 0;
    for row in &r.inapplicable {
        if g.verbose || shown < 5 {
            println!("  inapplicable {}: {}", row.label, row.note);
            shown += 1;
        }
    }
    if !g.verbose && r.inapplicable.len() > shown {
        println!("  ... {} more (use --verbose)", r.inapplicable.len() - shown);
    }
    let skips = r
        .rows
        .iter()
        .filter(|&row| row.diagram.is_none())
        .map(|row| (row.label.clone(), row.note.trim_start_matches("skipped: ").to_string()));
    print_skips(g, skips);
}

fn agw_check(g: &Global, grid: &GridSpec) -> Result<u8> {
    check_cap(g, grid)?;
    let report = run_agw(grid, &options(g))?;
    if g.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    } else {
        agw_summary(g, &report);
    }
    Ok(if report.counterexamples.is_empty() { EXIT_OK } else { EXIT_DISAGREE })
}
