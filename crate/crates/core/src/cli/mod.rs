//! Command-line front end: model text format, commands and reports.
//!
//! Exit codes: 0 on success, 1 for model or flag errors (including a model
//! that fails validation), 2 when the zone graph hit the state limit and the
//! command needs a complete graph.

mod parse;
mod print;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

pub use parse::{parse_bindings, parse_model, ParseError, Pos};
pub use print::print_model;

use crate::bundled;
use crate::consistency::{ipta_consistent, ConsistencyError, IptaConsistency};
use crate::model::{LocId, Pipta};
use crate::rational;
use crate::synthesis::{const_ef_synth, const_synth, lu_consistency_empty_jobs, SynthesisError, SynthesisOptions, SynthesisResult};
use crate::zonegraph::{self, build_zone_graph, CollisionMode, SymbolicImdp, ZoneGraphError, ZoneGraphOptions, DEFAULT_MAX_STATES};

#[derive(Debug, Parser)]
#[command(name = "pipta", version, about = "Consistency and parameter synthesis for parametric interval probabilistic timed automata")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// Model file, or `bundled:NAME` for a shipped example.
    pub model: String,
    /// Stop exploring after this many symbolic states.
    #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
    pub max_states: usize,
    /// Merge entries of one edge that reach the same symbolic state instead of failing.
    #[arg(long)]
    pub merge_collisions: bool,
    /// Print a JSON report instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a model is well formed.
    Validate {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Build and print the (parametric) zone graph.
    Zonegraph {
        #[command(flatten)]
        model: ModelArgs,
        /// Emit Graphviz instead of text.
        #[arg(long)]
        dot: bool,
        /// Bind a parameter before building, as NAME=VALUE.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Decide consistency of a parameter-free (or fully bound) model.
    Consistency {
        #[command(flatten)]
        model: ModelArgs,
        /// Bind a parameter, as NAME=VALUE.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Synthesise the parameter valuations under which the model is consistent.
    Synth {
        #[command(flatten)]
        model: ModelArgs,
        /// Accept a truncated zone graph and report an under-approximation.
        #[arg(long)]
        allow_truncated: bool,
    },
    /// Synthesise valuations that are consistent and reach a goal location.
    ReachSynth {
        #[command(flatten)]
        model: ModelArgs,
        /// Goal locations, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        goal: Vec<String>,
        /// Accept a truncated zone graph and report an under-approximation.
        #[arg(long)]
        allow_truncated: bool,
    },
    /// Decide whether no valuation makes a lower/upper-bound model consistent.
    LuEmpty {
        #[command(flatten)]
        model: ModelArgs,
        /// Support combinations checked concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print a model whose locations are the zone graph's states.
    Reconstruct {
        #[command(flatten)]
        model: ModelArgs,
        /// Bind a parameter before building, as NAME=VALUE.
        #[arg(long = "param")]
        params: Vec<String>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Model(String),
    #[error("zone graph truncated at {0} states; raise --max-states or pass --allow-truncated where supported")]
    Truncated(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Truncated(_) => 2,
            _ => 1,
        }
    }
}

impl From<ZoneGraphError> for CliError {
    fn from(e: ZoneGraphError) -> Self {
        CliError::Model(e.to_string())
    }
}

impl From<SynthesisError> for CliError {
    fn from(e: SynthesisError) -> Self {
        CliError::Model(e.to_string())
    }
}

#[derive(Debug, Serialize, Clone, PartialEq, Eq)]
pub struct JsonProbability {
    pub to: String,
    pub p: String,
}

#[derive(Debug, Serialize, Clone, PartialEq, Eq)]
pub struct JsonWitnessTransition {
    pub from: String,
    pub action: String,
    pub probabilities: Vec<JsonProbability>,
}

#[derive(Debug, Serialize, Clone, PartialEq, Eq)]
pub struct JsonWitness {
    pub states: Vec<String>,
    pub transitions: Vec<JsonWitnessTransition>,
}

#[derive(Debug, Serialize, Clone, PartialEq, Eq)]
pub struct JsonState {
    pub id: String,
    pub location: String,
    pub zone: String,
    pub projection: String,
}

#[derive(Debug, Serialize, Clone, PartialEq, Eq)]
pub struct JsonTarget {
    pub state: String,
    pub interval: [String; 2],
    pub resets: Vec<String>,
}

#[derive(Debug, Serialize, Clone, PartialEq, Eq)]
pub struct JsonTransition {
    pub source: String,
    pub action: String,
    pub targets: Vec<JsonTarget>,
}

#[derive(Debug, Serialize, Clone, PartialEq, Eq)]
pub struct JsonGraph {
    pub states: Vec<JsonState>,
    pub transitions: Vec<JsonTransition>,
}

/// Result of one command. Serialises to the JSON report; `text` is the
/// human-readable form.
#[derive(Debug, Serialize, Clone)]
pub struct RunReport {
    pub command: String,
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transitions: Option<usize>,
    pub truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<JsonWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<JsonGraph>,
    #[serde(skip)]
    pub text: String,
    #[serde(skip)]
    pub exit_code: i32,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl RunReport {
    fn new(command: &str, model: &Pipta) -> Self {
        RunReport {
            command: command.to_string(),
            model: model.name.clone(),
            verdict: None,
            region: None,
            states: None,
            transitions: None,
            truncated: false,
            witness: None,
            graph: None,
            text: String::new(),
            exit_code: 0,
            elapsed: Duration::ZERO,
        }
    }

    fn graph_size(&mut self, g: &SymbolicImdp) {
        self.states = Some(g.states.len());
        self.transitions = Some(g.transitions.len());
        self.truncated = !g.is_complete();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Loads a model from a path or `bundled:NAME`.
pub fn load_model(spec: &str) -> Result<Pipta, CliError> {
    let text = match spec.strip_prefix("bundled:") {
        Some(name) => bundled::SOURCES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, s)| s.to_string())
            .ok_or_else(|| CliError::Usage(format!("no bundled model named `{name}`")))?,
        None => std::fs::read_to_string(spec).map_err(|e| CliError::Usage(format!("{spec}: {e}")))?,
    };
    parse_model(&text).map_err(|source| CliError::Parse { path: spec.to_string(), source })
}

fn graph_options(a: &ModelArgs) -> ZoneGraphOptions {
    ZoneGraphOptions {
        max_states: a.max_states,
        collisions: if a.merge_collisions { CollisionMode::Merge } else { CollisionMode::Reject },
    }
}

fn checked(m: Pipta) -> Result<Pipta, CliError> {
    let report = m.validate();
    if report.is_ok() {
        Ok(m)
    } else {
        Err(CliError::Model(format!("invalid model:\n{report}")))
    }
}

fn bind(m: Pipta, params: &[String]) -> Result<Pipta, CliError> {
    if params.is_empty() {
        return Ok(m);
    }
    let values = parse_bindings(&m, params).map_err(CliError::Usage)?;
    Ok(m.instantiate(&values))
}

fn json_graph(g: &SymbolicImdp) -> JsonGraph {
    let names = g.names();
    JsonGraph {
        states: g
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| JsonState {
                id: g.state_label(i),
                location: g.locations[s.loc.0].clone(),
                zone: s.zone.render(&names),
                projection: s.zone.project_params().render(&names),
            })
            .collect(),
        transitions: g
            .transitions
            .iter()
            .map(|t| JsonTransition {
                source: g.state_label(t.source),
                action: g.actions[g.edge_actions[t.edge]].clone(),
                targets: t
                    .targets
                    .iter()
                    .map(|x| JsonTarget {
                        state: g.state_label(x.state),
                        interval: [rational::format(&x.interval.lo), rational::format(&x.interval.hi)],
                        resets: x.resets.iter().map(|c| g.clocks[c.0].clone()).collect(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn graph_text(g: &SymbolicImdp) -> String {
    let mut out = String::new();
    let names = g.names();
    for i in 0..g.states.len() {
        let _ = write!(out, "{}", g.render_state(i));
        if !g.params.is_empty() {
            let _ = write!(out, "  [{}]", g.states[i].zone.project_params().render(&names));
        }
        out.push('\n');
    }
    for t in &g.transitions {
        let targets: Vec<String> = t
            .targets
            .iter()
            .map(|x| {
                let mut s = format!("{} {}", zonegraph::format_interval(&x.interval), g.state_label(x.state));
                if !x.resets.is_empty() {
                    let r: Vec<&str> = x.resets.iter().map(|c| g.clocks[c.0].as_str()).collect();
                    let _ = write!(s, " reset {{{}}}", r.join(", "));
                }
                s
            })
            .collect();
        let _ = writeln!(
            out,
            "{} -{}-> {{ {} }}",
            g.state_label(t.source),
            g.actions[g.edge_actions[t.edge]],
            targets.join("; ")
        );
    }
    let _ = write!(out, "{} states, {} transitions", g.states.len(), g.transitions.len());
    if !g.is_complete() {
        out.push_str(" (truncated)");
    }
    out
}

fn consistency_report(report: &mut RunReport, r: &IptaConsistency) {
    let g = &r.graph;
    report.graph_size(g);
    report.verdict = Some(if r.verdict.consistent { "consistent" } else { "inconsistent" }.to_string());
    let mut text = report.verdict.clone().unwrap_or_default();
    if let Some(w) = &r.verdict.witness {
        let json = JsonWitness {
            states: w.states.iter().map(|s| g.state_label(*s)).collect(),
            transitions: w
                .transitions
                .iter()
                .map(|t| JsonWitnessTransition {
                    from: g.state_label(t.source),
                    action: g.actions[g.edge_actions[g.transitions[t.transition].edge]].clone(),
                    probabilities: t
                        .probabilities
                        .iter()
                        .map(|(s, p)| JsonProbability { to: g.state_label(*s), p: rational::format(p) })
                        .collect(),
                })
                .collect(),
        };
        for t in &json.transitions {
            let ps: Vec<String> = t.probabilities.iter().map(|p| format!("{} {}", p.p, p.to)).collect();
            let _ = write!(text, "\n  {} -{}-> {{ {} }}", t.from, t.action, ps.join("; "));
        }
        let _ = write!(text, "\nimplementation keeps {} of {} states", w.states.len(), g.states.len());
        report.witness = Some(json);
    } else {
        let pruned: Vec<String> = r
            .verdict
            .pruned
            .iter()
            .map(|s| format!("{} ({})", g.state_label(*s), g.locations[g.states[*s].loc.0]))
            .collect();
        let _ = write!(text, "\npruned: {}", pruned.join(", "));
    }
    report.text = text;
}

fn region_report(report: &mut RunReport, g: &SymbolicImdp, r: &SynthesisResult) {
    let names = g.names();
    report.graph_size(g);
    report.region = Some(r.region.render_disjuncts(&names));
    let mut text = r.region.render(&names);
    if !r.complete {
        text.push_str("\n(under-approximation: zone graph truncated)");
    }
    report.text = text;
}

fn resolve_goal(m: &Pipta, goal: &[String]) -> Result<BTreeSet<LocId>, CliError> {
    goal.iter()
        .map(|g| m.location(g.trim()).ok_or_else(|| CliError::Usage(format!("unknown goal location `{}`", g.trim()))))
        .collect()
}

/// Runs one parsed command.
pub fn run(cmd: &Command) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut report = match cmd {
        Command::Validate { model } => {
            let m = load_model(&model.model)?;
            let mut r = RunReport::new("validate", &m);
            let v = m.validate();
            if v.is_ok() {
                r.verdict = Some("valid".into());
                r.text = format!(
                    "valid: {} ({} locations, {} edges, {} clocks, {} parameters)",
                    m.name,
                    m.locations.len(),
                    m.edges.len(),
                    m.clocks.len(),
                    m.params.len()
                );
            } else {
                r.verdict = Some("invalid".into());
                r.text = v.to_string();
                r.exit_code = 1;
            }
            r
        }
        Command::Zonegraph { model, dot, params } => {
            let m = bind(checked(load_model(&model.model)?)?, params)?;
            let g = build_zone_graph(&m, &graph_options(model))?;
            let mut r = RunReport::new("zonegraph", &m);
            r.graph_size(&g);
            r.text = if *dot { zonegraph::export_dot(&g) } else { graph_text(&g) };
            r.graph = Some(json_graph(&g));
            r
        }
        Command::Consistency { model, params } => {
            let m = checked(load_model(&model.model)?)?;
            if m.is_parametric() && params.is_empty() {
                return Err(CliError::Usage(format!(
                    "model has parameters ({}); bind each with --param NAME=VALUE or use `synth`",
                    m.params.join(", ")
                )));
            }
            let m = bind(m, params)?;
            let mut r = RunReport::new("consistency", &m);
            match ipta_consistent(&m, &graph_options(model)) {
                Ok(res) => consistency_report(&mut r, &res),
                Err(ConsistencyError::ZoneGraph(ZoneGraphError::Truncated)) => return Err(CliError::Truncated(model.max_states)),
                Err(e) => return Err(CliError::Model(e.to_string())),
            }
            r
        }
        Command::Synth { model, allow_truncated } => {
            let m = checked(load_model(&model.model)?)?;
            let g = build_zone_graph(&m, &graph_options(model))?;
            if !g.is_complete() && !allow_truncated {
                return Err(CliError::Truncated(model.max_states));
            }
            let res = const_synth(&g, &SynthesisOptions { allow_truncated: *allow_truncated })?;
            let mut r = RunReport::new("synth", &m);
            region_report(&mut r, &g, &res);
            r
        }
        Command::ReachSynth { model, goal, allow_truncated } => {
            let m = checked(load_model(&model.model)?)?;
            let goal = resolve_goal(&m, goal)?;
            let g = build_zone_graph(&m, &graph_options(model))?;
            if !g.is_complete() && !allow_truncated {
                return Err(CliError::Truncated(model.max_states));
            }
            let res = const_ef_synth(&g, &goal, &SynthesisOptions { allow_truncated: *allow_truncated })?;
            let mut r = RunReport::new("reach-synth", &m);
            region_report(&mut r, &g, &res);
            r
        }
        Command::LuEmpty { model, jobs } => {
            let m = checked(load_model(&model.model)?)?;
            let v = lu_consistency_empty_jobs(&m, &graph_options(model), *jobs)?;
            let mut r = RunReport::new("lu-empty", &m);
            r.verdict = Some(v.as_str().to_string());
            r.text = match v {
                crate::synthesis::Verdict::True => "true: no parameter valuation makes the model consistent".into(),
                crate::synthesis::Verdict::False => "false: some parameter valuation makes the model consistent".into(),
                crate::synthesis::Verdict::Unknown => "unknown: state limit reached before a decision".into(),
            };
            r
        }
        Command::Reconstruct { model, params } => {
            let m = bind(checked(load_model(&model.model)?)?, params)?;
            let g = build_zone_graph(&m, &graph_options(model))?;
            if !g.is_complete() {
                return Err(CliError::Truncated(model.max_states));
            }
            let rec = zonegraph::reconstruct(&g, &m)?;
            let mut r = RunReport::new("reconstruct", &m);
            r.graph_size(&g);
            r.text = print_model(&rec).trim_end().to_string();
            r
        }
    };
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Output of a full command-line invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses arguments (including the program name) and runs the command.
pub fn execute<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let json = match &cli.command {
        Command::Validate { model }
        | Command::Zonegraph { model, .. }
        | Command::Consistency { model, .. }
        | Command::Synth { model, .. }
        | Command::ReachSynth { model, .. }
        | Command::LuEmpty { model, .. }
        | Command::Reconstruct { model, .. } => model.json,
    };
    match run(&cli.command) {
        Ok(r) => {
            let mut stdout = if json { r.to_json() } else { r.text.clone() };
            stdout.push('\n');
            Outcome { code: r.exit_code, stdout, stderr: String::new() }
        }
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> Outcome {
        execute(std::iter::once("pipta").chain(args.iter().copied()))
    }

    #[test]
    fn synth_prints_the_region() {
        let o = go(&["synth", "bundled:example_pipta"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert_eq!(o.stdout, "p < 2 (with p >= 0)\n");
    }

    #[test]
    fn consistency_needs_bindings() {
        let o = go(&["consistency", "bundled:example_pipta"]);
        assert_eq!(o.code, 1);
        let o = go(&["consistency", "bundled:example_pipta", "--param", "p=1"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.starts_with("consistent"));
        let o = go(&["consistency", "bundled:example_pipta", "--param", "p=3"]);
        assert!(o.stdout.starts_with("inconsistent"));
    }

    #[test]
    fn flag_errors_exit_with_one() {
        assert_eq!(go(&["synth"]).code, 1);
        assert_eq!(go(&["frobnicate"]).code, 1);
        assert_eq!(go(&["synth", "/no/such/file"]).code, 1);
        assert_eq!(go(&["--help"]).code, 0);
    }

    #[test]
    fn json_reports_are_deterministic() {
        let a = go(&["synth", "bundled:lu_pipta", "--json"]);
        let b = go(&["synth", "bundled:lu_pipta", "--json"]);
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a.stdout).unwrap();
        assert_eq!(v["command"], "synth");
        assert_eq!(v["region"][0], "0 <= p1 <= 2 && p2 >= 0");
        assert_eq!(v["truncated"], false);
    }

    #[test]
    fn truncation_exits_with_two() {
        let o = go(&["synth", "bundled:example_pipta", "--max-states", "3"]);
        assert_eq!(o.code, 2);
        let o = go(&["synth", "bundled:example_pipta", "--max-states", "3", "--allow-truncated"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("under-approximation"));
    }
}
