use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use nibble::applications::latin::{latin_square, LatinKind};
use nibble::applications::patterns::Pattern;
use nibble::applications::rainbow::{ColouredEdge, RainbowInstance};
use nibble::applications::runs::{
    rainbow_run, steiner_run, verify_rainbow, verify_steiner, RainbowReport, RunSettings,
    SteinerReport,
};
use nibble::applications::steiner::SteinerInstance;
use nibble::generators::{near_regular, random_r_graph};
use nibble::matcher::{derive_params, run_pipeline, verify_report, MatchReport, VerifyFailure};
use nibble::oracle::lab::{concentration_lab, shipped_configs, LabConfig, LabResult};
use nibble::weights::{check_hypotheses, ConditionReport, WeightFile};
use nibble::{Error, Hypergraph, Weights};

use crate::{Command, GenKind, LatinArg, PipelineArgs, TheoremArgs};

pub enum Failure {
    Verify(VerifyFailure),
    Strict(Vec<String>),
    Retries(Error),
    Input(Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Verify(_) => 1,
            Failure::Strict(_) => 2,
            Failure::Retries(_) => 3,
            Failure::Input(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::RetriesExhausted { .. } => Failure::Retries(e),
            e => Failure::Input(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Verify(v) => write!(f, "verify failed: {v}"),
            Failure::Strict(names) => write!(f, "hypothesis checks failed: {}", names.join(", ")),
            Failure::Retries(Error::RetriesExhausted {
                step,
                attempts,
                best,
            }) => {
                let transcript = serde_json::to_string_pretty(best).unwrap_or_default();
                write!(f, "error: {step} conditions still failing after {attempts} attempts; best transcript:\n{transcript}")
            }
            Failure::Retries(e) | Failure::Input(e) => write!(f, "error: {e}"),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Sidecar written next to a Latin-square instance.
#[derive(Debug, Serialize, Deserialize)]
struct ColouredGraph {
    n_left: usize,
    n_right: usize,
    edges: Vec<ColouredEdge>,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| {
        Failure::Input(Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        )))
    })
}

fn emit(output: Option<&Path>, text: &str) -> Outcome {
    match output {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(output: Option<&Path>, value: &T) -> Outcome {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(output, &text)
}

fn load_instance(path: &Path) -> Result<Hypergraph, Failure> {
    Ok(Hypergraph::from_hgr(&read(path)?)?)
}

/// The weight files, or ω ≡ 1 when there are none.
fn load_weights(paths: &[PathBuf], h: &Hypergraph) -> Result<Vec<Weights>, Failure> {
    if paths.is_empty() {
        return Ok(vec![Weights::uniform(h.num_edges(), 1.0)?]);
    }
    paths
        .iter()
        .map(|p| {
            let file: WeightFile = serde_json::from_str(&read(p)?)?;
            Ok(Weights::from_file(&file, h.num_edges())?)
        })
        .collect()
}

fn arity(theorem: &TheoremArgs, weights: &[Weights]) -> usize {
    let own = weights.iter().map(Weights::ell).max().unwrap_or(1);
    theorem.arity.map_or(own, |l| l.max(own))
}

fn hypotheses(
    h: &Hypergraph,
    theorem: &TheoremArgs,
    weights: &[Weights],
) -> Result<ConditionReport, Failure> {
    let delta = theorem
        .big_delta
        .unwrap_or_else(|| h.max_degree().max(1) as f64);
    Ok(check_hypotheses(
        h,
        delta,
        theorem.delta,
        arity(theorem, weights),
        weights,
    )?)
}

fn strict_gate(report: &ConditionReport) -> Outcome {
    let failed: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.clone())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Strict(failed))
    }
}

fn settings(args: &PipelineArgs) -> RunSettings {
    RunSettings {
        overrides: args.overrides(),
        codegree_exponent: args.theorem.delta,
        max_arity: args.theorem.arity,
    }
}

fn latin_kind(kind: LatinArg, seed: u64) -> LatinKind {
    match kind {
        LatinArg::Cyclic => LatinKind::Cyclic,
        LatinArg::Random => LatinKind::Random { seed },
    }
}

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Gen { kind, output } => gen(kind, output.as_deref()),
        Command::Check {
            instance,
            weights,
            theorem,
            output,
            strict,
        } => {
            let h = load_instance(&instance)?;
            let weights = load_weights(&weights, &h)?;
            let report = hypotheses(&h, &theorem, &weights)?;
            emit_json(output.as_deref(), &report)?;
            if strict {
                strict_gate(&report)?;
            }
            Ok(())
        }
        Command::Match {
            instance,
            weights,
            pipeline,
            output,
        } => {
            let h = load_instance(&instance)?;
            let weights = load_weights(&weights, &h)?;
            if pipeline.strict {
                strict_gate(&hypotheses(&h, &pipeline.theorem, &weights)?)?;
            }
            let params = derive_params(
                &h,
                pipeline.theorem.delta,
                arity(&pipeline.theorem, &weights),
                &pipeline.overrides(),
            )?;
            let report = run_pipeline(&h, &weights, &params)?;
            emit(output.as_deref(), &(report.to_json() + "\n"))
        }
        Command::Steiner {
            n,
            k,
            t,
            patterns,
            pair_samples,
            pipeline,
            output,
        } => {
            let patterns = match patterns {
                Some(path) => {
                    let raw: Vec<Vec<Vec<u32>>> = serde_json::from_str(&read(&path)?)?;
                    raw.into_iter()
                        .map(|edges| Pattern::new(k, edges))
                        .collect::<Result<Vec<_>, _>>()?
                }
                None => Vec::new(),
            };
            let report = steiner_run(n, k, t, &patterns, pair_samples, &settings(&pipeline))?;
            if pipeline.strict {
                strict_gate(&report.pipeline.hypotheses)?;
            }
            emit_json(output.as_deref(), &report)
        }
        Command::Rainbow {
            n,
            kind,
            colours,
            pipeline,
            output,
        } => {
            let instance = match (colours, n) {
                (Some(path), _) => {
                    let g: ColouredGraph = serde_json::from_str(&read(&path)?)?;
                    RainbowInstance::new(g.n_left, g.n_right, g.edges)?
                }
                (None, Some(n)) => {
                    RainbowInstance::from_latin(&latin_square(n, latin_kind(kind, pipeline.seed)))?
                }
                (None, None) => {
                    return Err(Failure::Input(Error::BadParams(
                        "give --n or --colours".into(),
                    )))
                }
            };
            let report = rainbow_run(&instance, &settings(&pipeline))?;
            if pipeline.strict {
                strict_gate(&report.pipeline.hypotheses)?;
            }
            emit_json(output.as_deref(), &report)
        }
        Command::Lab {
            config,
            output,
            strict,
        } => {
            let configs = match config {
                Some(path) => vec![serde_json::from_str::<LabConfig>(&read(&path)?)?],
                None => shipped_configs(),
            };
            let results = configs
                .iter()
                .map(concentration_lab)
                .collect::<Result<Vec<LabResult>, _>>()?;
            if results.len() == 1 {
                emit_json(output.as_deref(), &results[0])?;
            } else {
                emit_json(output.as_deref(), &results)?;
            }
            if strict {
                let failed: Vec<String> = results
                    .iter()
                    .filter(|r| !(r.mean_ok() && r.tails_ok()))
                    .map(|r| format!("lab.{}", r.name))
                    .collect();
                if !failed.is_empty() {
                    return Err(Failure::Strict(failed));
                }
            }
            Ok(())
        }
        Command::Verify {
            report,
            instance,
            weights,
        } => verify(&report, instance.as_deref(), &weights),
    }
}

fn gen(kind: GenKind, output: Option<&Path>) -> Outcome {
    let h = match kind {
        GenKind::Random {
            r,
            n,
            m,
            codegree,
            seed,
        } => random_r_graph(r, n, m, codegree, seed)?,
        GenKind::NearRegular {
            r,
            n,
            d,
            codegree,
            seed,
        } => near_regular(r, n, d, codegree, seed)?,
        GenKind::Steiner { n, k, t } => SteinerInstance::new(n, k, t)?.hypergraph,
        GenKind::Latin { n, kind, seed } => {
            let instance = RainbowInstance::from_latin(&latin_square(n, latin_kind(kind, seed)))?;
            let sidecar = ColouredGraph {
                n_left: instance.n_left,
                n_right: instance.n_right,
                edges: instance.edges.clone(),
            };
            match output {
                Some(path) => {
                    let mut side = path.as_os_str().to_owned();
                    side.push(".colours.json");
                    emit_json(Some(Path::new(&side)), &sidecar)?;
                }
                None => eprintln!("note: no --output, colour sidecar not written"),
            }
            instance.hypergraph
        }
    };
    emit(output, &h.to_hgr())
}

fn verify(report_path: &Path, instance: Option<&Path>, weight_paths: &[PathBuf]) -> Outcome {
    let text = read(report_path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let outcome = if value.get("blocks").is_some() {
        let report: SteinerReport = serde_json::from_value(value)?;
        verify_steiner(&report).map(|()| format!("{} blocks", report.blocks.len()))
    } else if value.get("edges").is_some() && value.get("pipeline").is_some() {
        let report: RainbowReport = serde_json::from_value(value)?;
        verify_rainbow(&report).map(|()| format!("{} rainbow edges", report.size))
    } else {
        let report: MatchReport = serde_json::from_value(value)?;
        let Some(instance) = instance else {
            return Err(Failure::Input(Error::BadParams(
                "verifying a match report needs --instance".into(),
            )));
        };
        let h = load_instance(instance)?;
        let weights = load_weights(weight_paths, &h)?;
        verify_report(&h, &weights, &report)
            .map(|()| format!("{} matching edges", report.matching.len()))
    };
    match outcome {
        Ok(summary) => {
            println!("ok: {summary}");
            Ok(())
        }
        Err(v) => Err(Failure::Verify(v)),
    }
}
