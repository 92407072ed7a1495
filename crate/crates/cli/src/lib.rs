//! The `i3rab` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use i3rab::converter::{load_checked_rules, ConversionRules};
use i3rab::eval::{self, CardinalityClass, EvalOptions};
use i3rab::parser::{parse_treebank_with, ParserModel};
use i3rab::render::{render_svg, render_text, RenderFormat, SvgOptions};
use i3rab::schema::validate_treebank;
use i3rab::{convert_treebank, emit_treebank, load_schema, parse_treebank, Schema, Treebank};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

const SYNOPSIS: &str =
    "usage: i3rab <validate|convert|stats|train|parse|eval|crossval|render> [OPTIONS] FILES (see i3rab --help)";

#[derive(Parser, Debug)]
#[command(name = "i3rab", version, about = "I3rab Arabic dependency treebank toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SchemaArg {
    /// Schema config file, or `default` for the built-in schema.
    #[arg(long, default_value = "default")]
    schema: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every sentence against the schema.
    Validate {
        #[command(flatten)]
        schema: SchemaArg,
        #[arg(long)]
        machine: bool,
        file: PathBuf,
    },
    /// Convert a PADT-style treebank to I3rab.
    Convert {
        #[command(flatten)]
        schema: SchemaArg,
        /// Rules file, or `default` for the built-in rules.
        #[arg(long, default_value = "default")]
        rules: String,
        /// Hand-corrected sentences keyed by `# sent_id`.
        #[arg(long)]
        overrides: Option<PathBuf>,
        /// Write the token accounting here instead of stderr.
        #[arg(long)]
        report: Option<PathBuf>,
        input: PathBuf,
        output: PathBuf,
    },
    /// Direction, distance and label cardinality statistics.
    Stats {
        #[command(flatten)]
        schema: SchemaArg,
        #[arg(long)]
        exclude_punct: bool,
        #[arg(long)]
        exclude_root_dot: bool,
        #[arg(long)]
        machine: bool,
        file: PathBuf,
    },
    /// Train a parser model.
    Train {
        #[command(flatten)]
        schema: SchemaArg,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        train: PathBuf,
        model: PathBuf,
    },
    /// Parse a treebank with a trained model.
    Parse {
        #[arg(long)]
        model: PathBuf,
        /// Refuse models trained under a different schema.
        #[arg(long)]
        schema: Option<String>,
        input: PathBuf,
        output: PathBuf,
    },
    /// Attachment scores of PRED against GOLD.
    Eval {
        #[arg(long)]
        exclude_punct: bool,
        #[arg(long)]
        machine: bool,
        gold: PathBuf,
        pred: PathBuf,
    },
    /// k-fold cross-validation of the parser.
    Crossval {
        #[command(flatten)]
        schema: SchemaArg,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        exclude_punct: bool,
        file: PathBuf,
    },
    /// Draw trees as indented text or SVG.
    Render {
        #[arg(long, default_value = "text")]
        format: RenderFormat,
        /// Mirror the SVG layout right to left.
        #[arg(long)]
        rtl: bool,
        /// 1-based sentence to draw; text output draws all by default,
        /// SVG output draws the first.
        #[arg(long)]
        sentence: Option<usize>,
        file: PathBuf,
        output: PathBuf,
    },
}

/// A failed command and the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {}", path.display(), e),
        }
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_INTERNAL,
            message: e.to_string(),
        }
    }

    fn usage(message: String) -> Self {
        Failure {
            code: EXIT_USAGE,
            message,
        }
    }
}

type Outcome = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

fn read_treebank(path: &Path) -> Result<Treebank, Failure> {
    let mut tb = parse_treebank(&read(path)?).map_err(|e| Failure::io(path, e))?;
    tb.source = Some(path.display().to_string());
    Ok(tb)
}

fn load_schema_arg(arg: &str) -> Result<Schema, Failure> {
    if arg == "default" {
        return Ok(Schema::default());
    }
    let path = Path::new(arg);
    load_schema(&read(path)?).map_err(|e| Failure::io(path, e))
}

fn load_rules_arg(arg: &str, schema: Schema) -> Result<ConversionRules, Failure> {
    if arg == "default" {
        return ConversionRules::with_schema(schema).map_err(Failure::internal);
    }
    let path = Path::new(arg);
    load_checked_rules(&read(path)?, schema).map_err(|e| Failure::io(path, e))
}

fn emit(out: &mut dyn Write, text: &str) {
    // A closed stdout is not worth failing the command over.
    let _ = out.write_all(text.as_bytes());
}

/// Runs one command line (including the program name) and returns its exit
/// code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                emit(out, &e.to_string());
                return EXIT_OK;
            }
            let first = e.to_string().lines().next().unwrap_or_default().to_string();
            let _ = writeln!(err, "{first}\n{SYNOPSIS}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "i3rab: {}", f.message);
            if f.code == EXIT_USAGE {
                let _ = writeln!(err, "{SYNOPSIS}");
            }
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Validate { schema, machine, file } => validate(&schema.schema, machine, &file, out),
        Command::Convert {
            schema,
            rules,
            overrides,
            report,
            input,
            output,
        } => convert(
            &schema.schema,
            &rules,
            overrides.as_deref(),
            report.as_deref(),
            &input,
            &output,
            err,
        ),
        Command::Stats {
            schema,
            exclude_punct,
            exclude_root_dot,
            machine,
            file,
        } => {
            let schema = load_schema_arg(&schema.schema)?;
            let opts = EvalOptions {
                exclude_punct,
                exclude_root_dot_distance: exclude_root_dot,
                ..EvalOptions::for_schema(&schema)
            };
            let tb = read_treebank(&file)?;
            emit(out, &stats_text(&tb, &opts, machine));
            Ok(EXIT_OK)
        }
        Command::Train {
            schema,
            epochs,
            seed,
            train,
            model,
        } => {
            let schema = load_schema_arg(&schema.schema)?;
            let tb = read_treebank(&train)?;
            let (m, report) = i3rab::train(&tb, epochs, seed, &schema).map_err(Failure::internal)?;
            write(&model, &m.save())?;
            let _ = writeln!(
                err,
                "trained on {} sentences ({} non-projective skipped)",
                report.sentences_used, report.skipped_nonprojective
            );
            Ok(EXIT_OK)
        }
        Command::Parse {
            model,
            schema,
            input,
            output,
        } => {
            let m = ParserModel::load(&read(&model)?).map_err(|e| Failure::io(&model, e))?;
            if let Some(arg) = schema {
                m.check_schema(&load_schema_arg(&arg)?).map_err(Failure::internal)?;
            }
            let tb = read_treebank(&input)?;
            write(&output, &emit_treebank(&parse_treebank_with(&tb, &m)))?;
            Ok(EXIT_OK)
        }
        Command::Eval {
            exclude_punct,
            machine,
            gold,
            pred,
        } => {
            let opts = EvalOptions {
                exclude_punct,
                ..EvalOptions::for_schema(&Schema::default())
            };
            let (g, p) = (read_treebank(&gold)?, read_treebank(&pred)?);
            let r = eval::treebank_scores(&g, &p, &opts).map_err(Failure::internal)?;
            if machine {
                emit(
                    out,
                    &format!("uas\t{:.2}\nlas\t{:.2}\ntokens\t{}\n", r.uas, r.las, r.token_count),
                );
            } else {
                emit(out, &format!("UAS {:.2} / LAS {:.2}\n", r.uas, r.las));
            }
            Ok(EXIT_OK)
        }
        Command::Crossval {
            schema,
            k,
            epochs,
            seed,
            exclude_punct,
            file,
        } => {
            let schema = load_schema_arg(&schema.schema)?;
            let opts = EvalOptions {
                exclude_punct,
                ..EvalOptions::for_schema(&schema)
            };
            let tb = read_treebank(&file)?;
            let scores = eval::cross_validate(&tb, k, epochs, seed, &schema, &opts).map_err(|e| match e {
                eval::EvalError::KTooLarge { .. } | eval::EvalError::ZeroFolds => Failure::usage(e.to_string()),
                e => Failure::internal(e),
            })?;
            let mut text = String::from("fold\tuas\tlas\n");
            for (i, (u, l)) in scores.folds.iter().enumerate() {
                text.push_str(&format!("{}\t{:.2}\t{:.2}\n", i + 1, u, l));
            }
            text.push_str(&format!("avg\t{:.2}\t{:.2}\n", scores.avg_uas, scores.avg_las));
            emit(out, &text);
            Ok(EXIT_OK)
        }
        Command::Render {
            format,
            rtl,
            sentence,
            file,
            output,
        } => {
            let tb = read_treebank(&file)?;
            let pick = |i: usize| {
                tb.sentences
                    .get(i.wrapping_sub(1))
                    .ok_or_else(|| Failure::usage(format!("sentence {i} not in a file of {}", tb.len())))
            };
            let text = match (format, sentence) {
                (RenderFormat::Text, Some(i)) => render_text(pick(i)?),
                (RenderFormat::Text, None) => tb.iter().map(render_text).collect::<Vec<_>>().join("\n"),
                (RenderFormat::Svg, i) => render_svg(pick(i.unwrap_or(1))?, SvgOptions { rtl }),
            };
            write(&output, &text)?;
            Ok(EXIT_OK)
        }
    }
}

fn validate(schema: &str, machine: bool, file: &Path, out: &mut dyn Write) -> Outcome {
    let schema = load_schema_arg(schema)?;
    let tb = read_treebank(file)?;
    let violations = validate_treebank(&tb, &schema);
    let errors = violations.iter().filter(|v| v.is_error()).count();
    let mut text = String::new();
    for v in &violations {
        if machine {
            let token = v.token_id.map_or("-".to_string(), |t| t.to_string());
            text.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                v.sentence_index, token, v.severity, v.code, v.message
            ));
        } else {
            text.push_str(&format!("{v}\n"));
        }
    }
    if !machine {
        text.push_str(&format!(
            "{} sentences, {} errors, {} warnings\n",
            tb.len(),
            errors,
            violations.len() - errors
        ));
    }
    emit(out, &text);
    Ok(if errors > 0 { EXIT_INVALID } else { EXIT_OK })
}

fn convert(
    schema: &str,
    rules: &str,
    overrides: Option<&Path>,
    report: Option<&Path>,
    input: &Path,
    output: &Path,
    err: &mut dyn Write,
) -> Outcome {
    let schema = load_schema_arg(schema)?;
    let rules = load_rules_arg(rules, schema)?;
    let tb = read_treebank(input)?;
    let overrides = overrides.map(read_treebank).transpose()?;
    let (out_tb, rep) = convert_treebank(&tb, &rules, overrides.as_ref()).map_err(Failure::internal)?;
    write(output, &emit_treebank(&out_tb))?;
    match report {
        Some(path) => write(path, &rep.to_text())?,
        None => emit(err, &rep.to_text()),
    }
    Ok(EXIT_OK)
}

fn stats_text(tb: &Treebank, opts: &EvalOptions, machine: bool) -> String {
    let d = eval::direction_stats(tb);
    let (root, other) = eval::distance_histogram(tb, opts);
    let shares = eval::label_shares(tb);
    let mut s = String::new();
    if machine {
        s.push_str(&format!("direction\tleft\t{}\ndirection\tright\t{}\n", d.left, d.right));
        s.push_str(&format!("direction\troot\t{}\ndirection\ttotal\t{}\n", d.root, d.total));
        for (k, v) in &root {
            s.push_str(&format!("distance_root\t{k}\t{v}\n"));
        }
        for (k, v) in &other {
            s.push_str(&format!("distance\t{k}\t{v}\n"));
        }
        for (label, pct) in &shares {
            s.push_str(&format!(
                "cardinality\t{label}\t{pct:.4}\t{}\n",
                CardinalityClass::of_share(*pct)
            ));
        }
        return s;
    }
    s.push_str("direction\n");
    s.push_str(&format!("  left\t{}\t{:.2}%\n", d.left, d.left_pct));
    s.push_str(&format!("  right\t{}\t{:.2}%\n", d.right, d.right_pct));
    s.push_str(&format!("  root\t{}\n  total\t{}\n", d.root, d.total));
    s.push_str("\ndistance (root arcs)\n");
    for (k, v) in &root {
        s.push_str(&format!("  {k}\t{v}\n"));
    }
    s.push_str("\ndistance (other arcs)\n");
    for (k, v) in &other {
        s.push_str(&format!("  {k}\t{v}\n"));
    }
    s.push_str("\ncardinality\n");
    for (label, pct) in &shares {
        s.push_str(&format!("  {label}\t{pct:.2}%\t{}\n", CardinalityClass::of_share(*pct)));
    }
    s
}
