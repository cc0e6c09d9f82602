//! End-to-end driver: parse, normalize, validate, emit, render, write and
//! optionally check, for one or more input files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::checker::{
    check_context_against, derive_interpretation, CheckReport, Encoding, DEFAULT_CAP,
};
use crate::deep::emit_deep;
use crate::diag::{has_errors, Code, Diagnostic, Location};
use crate::eventb::{check_context, print_context, EventBContext, Style};
use crate::owl::parse_owl;
use crate::pivot::{sanitize_identifier, to_pivot, validate_pivot, PivotOntology};
use crate::shallow::emit_shallow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Shallow,
    Deep,
    Both,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub output_dir: PathBuf,
    pub mode: Mode,
    pub style: Style,
    pub check: bool,
    /// Cap on materialized sets and enumerated bindings during checking.
    pub max_domain: u64,
    pub dump_pivot: bool,
    /// Writes the check report as JSON next to the text report.
    pub report_json: bool,
    pub name: Option<String>,
    pub verbose: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            inputs: vec![input.into()],
            output_dir: output_dir.into(),
            mode: Mode::Shallow,
            style: Style::Ascii,
            check: false,
            max_domain: DEFAULT_CAP,
            dump_pivot: false,
            report_json: false,
            name: None,
            verbose: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Success = 0,
    Diagnostics = 1,
    CheckFailed = 2,
    Io = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// What a run produced. Nothing is printed; the caller decides where the
/// console text goes.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: ExitStatus,
    pub written: Vec<PathBuf>,
    /// Check reports, in input order.
    pub stdout: String,
    /// Rendered diagnostics and, when verbose, stage messages.
    pub stderr: Vec<String>,
}

/// Context name for an input path: the sanitized file stem with its first
/// letter upper-cased, suffixed `_Ontology` unless it already ends so.
pub fn default_context_name(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut name = sanitize_identifier(&stem);
    if let Some(first) = name.get(..1) {
        name = first.to_ascii_uppercase() + &name[1..];
    }
    if !name.ends_with("_Ontology") {
        name.push_str("_Ontology");
    }
    name
}

struct Run<'a> {
    config: &'a RunConfig,
    file: String,
    out: RunOutcome,
}

impl Run<'_> {
    fn stage(&mut self, msg: impl Into<String>) {
        if self.config.verbose {
            self.out
                .stderr
                .push(format!("{}: {}", self.file, msg.into()));
        }
    }

    fn report(&mut self, diags: &[Diagnostic]) {
        self.out
            .stderr
            .extend(diags.iter().map(|d| d.render(&self.file)));
        if has_errors(diags) {
            self.fail(ExitStatus::Diagnostics);
        }
    }

    fn fail(&mut self, s: ExitStatus) {
        self.out.status = self.out.status.max(s);
    }

    fn write(&mut self, path: PathBuf, text: &str) -> bool {
        let res = path
            .parent()
            .map_or(Ok(()), fs::create_dir_all)
            .and_then(|_| fs::write(&path, text));
        match res {
            Ok(()) => {
                self.stage(format!("wrote {}", path.display()));
                self.out.written.push(path);
                true
            }
            Err(e) => {
                let d = Diagnostic::error(
                    Code::Io,
                    Location::NONE,
                    format!("cannot write {}: {e}", path.display()),
                );
                self.out.stderr.push(d.render(&self.file));
                self.fail(ExitStatus::Io);
                false
            }
        }
    }

    fn render(&mut self, ctx: &EventBContext, parent: Option<&EventBContext>) -> Option<String> {
        let diags = check_context(ctx, parent);
        self.report(&diags);
        if has_errors(&diags) {
            return None;
        }
        match print_context(ctx, parent, self.config.style) {
            Ok(text) => Some(text),
            Err(e) => {
                self.report(&[Diagnostic::error(
                    Code::UndeclaredIdentifier,
                    Location::NONE,
                    e.to_string(),
                )]);
                None
            }
        }
    }

    fn check(
        &mut self,
        dir: &Path,
        ctx: &EventBContext,
        parent: Option<&EventBContext>,
        p: &PivotOntology,
        enc: Encoding,
    ) {
        self.stage(format!(
            "checking {} encoding",
            if enc == Encoding::Shallow {
                "shallow"
            } else {
                "deep"
            }
        ));
        let interp = derive_interpretation(p, enc);
        match check_context_against(ctx, parent, &interp, self.config.max_domain) {
            Ok(report) => self.emit_report(dir, &ctx.name, &report),
            Err(e) => {
                let d = Diagnostic::error(e.error.kind.code(), Location::NONE, e.to_string());
                self.report(&[d]);
            }
        }
    }

    fn emit_report(&mut self, dir: &Path, name: &str, report: &CheckReport) {
        let text = report.to_string();
        self.out.stdout.push_str(&text);
        self.write(dir.join(format!("{name}.check.txt")), &text);
        if self.config.report_json {
            self.write(dir.join(format!("{name}.check.json")), &report.to_json());
        }
        if !report.all_true() {
            self.fail(ExitStatus::CheckFailed);
        }
    }

    fn input(&mut self, path: &Path, out_dir: &Path) {
        self.stage("reading");
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                let d =
                    Diagnostic::error(Code::Io, Location::NONE, format!("cannot read input: {e}"));
                self.out.stderr.push(d.render(&self.file));
                self.fail(ExitStatus::Io);
                return;
            }
        };
        self.stage("parsing OWL");
        let doc = match parse_owl(&text) {
            Ok(doc) => doc,
            Err(diags) => return self.report(&diags),
        };
        self.report(&doc.warnings);
        self.stage("building pivot model");
        let pivot = match to_pivot(&doc) {
            Ok(p) => p,
            Err(diags) => return self.report(&diags),
        };
        self.stage("validating pivot model");
        self.report(&validate_pivot(&pivot));

        let name = self
            .config
            .name
            .as_deref()
            .map_or_else(|| default_context_name(path), sanitize_identifier);
        if self.config.dump_pivot {
            self.write(out_dir.join(format!("{name}.pivot.json")), &pivot.to_json());
        }
        let (shallow_dir, deep_dir) = match self.config.mode {
            Mode::Both => (out_dir.join("shallow"), out_dir.join("deep")),
            _ => (out_dir.to_path_buf(), out_dir.to_path_buf()),
        };
        if matches!(self.config.mode, Mode::Shallow | Mode::Both) {
            self.stage("emitting shallow context");
            let ctx = emit_shallow(&pivot, &name);
            if let Some(text) = self.render(&ctx, None) {
                if self.write(shallow_dir.join(format!("{name}.ctx")), &text) && self.config.check {
                    self.check(&shallow_dir, &ctx, None, &pivot, Encoding::Shallow);
                }
            }
        }
        if matches!(self.config.mode, Mode::Deep | Mode::Both) {
            self.stage("emitting deep contexts");
            let (pair, warnings) = emit_deep(&pivot, &name);
            self.report(&warnings);
            let generic = self.render(&pair.generic, None);
            let specific = self.render(&pair.specific, Some(&pair.generic));
            if let (Some(g), Some(s)) = (generic, specific) {
                let ok = self.write(deep_dir.join(format!("{}.ctx", pair.generic.name)), &g)
                    & self.write(deep_dir.join(format!("{name}.ctx")), &s);
                if ok && self.config.check {
                    self.check(
                        &deep_dir,
                        &pair.specific,
                        Some(&pair.generic),
                        &pivot,
                        Encoding::Deep,
                    );
                }
            }
        }
    }
}

/// Runs the pipeline over every input. With several inputs each one writes
/// into its own subdirectory named after its file stem.
pub fn run(config: &RunConfig) -> RunOutcome {
    let mut outcome = RunOutcome {
        status: ExitStatus::Success,
        written: Vec::new(),
        stdout: String::new(),
        stderr: Vec::new(),
    };
    for path in &config.inputs {
        let out_dir = if config.inputs.len() > 1 {
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            config.output_dir.join(sanitize_identifier(&stem))
        } else {
            config.output_dir.clone()
        };
        let mut r = Run {
            config,
            file: path.display().to_string(),
            out: outcome,
        };
        r.input(path, &out_dir);
        outcome = r.out;
    }
    outcome
}
