//! Experiment configuration: JSON schema, strict parsing, and the mapping
//! from specs to generators and reader factories.
//!
//! Parsing is hand-rolled over `serde_json::Value` so that every object can
//! reject unknown keys, including internally tagged ones where serde's
//! `deny_unknown_fields` does not apply.

use std::path::{Path, PathBuf};

use rao_core::generators::{gen_lemma3, gen_lemma4, gen_lemma5, gen_random, RandomParams};
use rao_core::harness::{Metric, OptSource};
use rao_core::rat::{parse_rat, rat_from_f64, rat_to_f64, Rat};
use rao_core::readers::{
    DirectKnapsackFactory, PrefixFactory, ReaderFactory, ReductionFactory, SecretaryFactory,
    ThresholdFactory, BASELINE_ALPHA,
};
use rao_core::Instance;
use serde_json::Value;

use crate::error::CliError;

/// One full sweep: defaults plus a list of experiments.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    pub workers: Option<usize>,
    pub opt_source: OptSource,
    pub metric: Metric,
    pub experiments: Vec<Experiment>,
}

/// One instance paired with the readers to run on it.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub instance: InstanceSource,
    pub readers: Vec<ReaderSpec>,
    pub trials: Option<usize>,
    pub opt_source: Option<OptSource>,
    pub metric: Option<Metric>,
}

/// Where an experiment's instance comes from.
#[derive(Debug, Clone)]
pub enum InstanceSource {
    File(PathBuf),
    Generator(GeneratorSpec),
}

impl InstanceSource {
    /// Loads or generates the instance; file instances take their id from
    /// the file stem.
    pub fn load(&self) -> Result<Instance, CliError> {
        match self {
            InstanceSource::File(path) => read_instance(path),
            InstanceSource::Generator(spec) => spec.build(),
        }
    }
}

/// Reads a schema-conformant instance file.
pub fn read_instance(path: &Path) -> Result<Instance, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let mut inst: Instance = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    inst.set_id(stem);
    Ok(inst)
}

/// Seeded generator invocation.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Lemma3 { l: u64, seed: u64 },
    Lemma4 { n: usize, seed: u64 },
    Lemma5 { n: usize, c_acc: u64, seed: u64 },
    Random { params: RandomParams, seed: u64 },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Instance, CliError> {
        Ok(match self {
            GeneratorSpec::Lemma3 { l, seed } => gen_lemma3(*l, *seed)?,
            GeneratorSpec::Lemma4 { n, seed } => gen_lemma4(*n, *seed)?,
            GeneratorSpec::Lemma5 { n, c_acc, seed } => gen_lemma5(*n, *c_acc, *seed)?,
            GeneratorSpec::Random { params, seed } => gen_random(params, *seed)?,
        })
    }
}

/// Reader selection with parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ReaderSpec {
    Secretary,
    Prefix { len: Rat },
    Threshold { g: Rat },
    Reduction { alpha: f64 },
    Direct { alpha: f64 },
}

impl ReaderSpec {
    pub fn to_factory(&self) -> Result<Box<dyn ReaderFactory>, CliError> {
        Ok(match self {
            ReaderSpec::Secretary => Box::new(SecretaryFactory),
            ReaderSpec::Prefix { len } => {
                Box::new(PrefixFactory::new(len.clone()).map_err(CliError::Validation)?)
            }
            ReaderSpec::Threshold { g } => {
                Box::new(ThresholdFactory::new(g.clone()).map_err(CliError::Validation)?)
            }
            ReaderSpec::Reduction { alpha } => {
                Box::new(ReductionFactory::new(*alpha).map_err(CliError::Validation)?)
            }
            ReaderSpec::Direct { alpha } => {
                Box::new(DirectKnapsackFactory::new(*alpha).map_err(CliError::Validation)?)
            }
        })
    }
}

/// Object wrapper that pops keys and rejects leftovers.
struct Fields {
    map: serde_json::Map<String, Value>,
    context: String,
}

impl Fields {
    fn new(value: Value, context: &str) -> Result<Self, CliError> {
        match value {
            Value::Object(map) => Ok(Fields {
                map,
                context: context.to_string(),
            }),
            other => Err(CliError::Validation(format!(
                "{context}: expected an object, got {other}"
            ))),
        }
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.map.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<Value, CliError> {
        self.take(key).ok_or_else(|| {
            CliError::Validation(format!("{}: missing required key {key:?}", self.context))
        })
    }

    fn finish(self) -> Result<(), CliError> {
        if self.map.is_empty() {
            Ok(())
        } else {
            let keys: Vec<String> = self.map.keys().map(|k| format!("{k:?}")).collect();
            Err(CliError::Validation(format!(
                "{}: unknown keys {}",
                self.context,
                keys.join(", ")
            )))
        }
    }

    fn rest(self) -> Value {
        Value::Object(self.map)
    }
}

fn expect_u64(value: Value, context: &str) -> Result<u64, CliError> {
    value
        .as_u64()
        .ok_or_else(|| CliError::Validation(format!("{context}: expected a non-negative integer")))
}

fn expect_usize(value: Value, context: &str) -> Result<usize, CliError> {
    Ok(expect_u64(value, context)? as usize)
}

fn expect_string(value: Value, context: &str) -> Result<String, CliError> {
    match value {
        Value::String(s) => Ok(s),
        _ => Err(CliError::Validation(format!(
            "{context}: expected a string"
        ))),
    }
}

/// Accepts a JSON number or a rational string like `"43/2000"`.
fn expect_rat(value: Value, context: &str) -> Result<Rat, CliError> {
    match value {
        Value::String(s) => {
            parse_rat(&s).map_err(|e| CliError::Validation(format!("{context}: {e}")))
        }
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                return Ok(Rat::from_integer(u.into()));
            }
            if let Some(i) = n.as_i64() {
                return Ok(Rat::from_integer(i.into()));
            }
            let f = n
                .as_f64()
                .ok_or_else(|| CliError::Validation(format!("{context}: unrepresentable number")))?;
            rat_from_f64(f).map_err(|e| CliError::Validation(format!("{context}: {e}")))
        }
        other => Err(CliError::Validation(format!(
            "{context}: expected a number or rational string, got {other}"
        ))),
    }
}

fn expect_f64(value: Value, context: &str) -> Result<f64, CliError> {
    value
        .as_f64()
        .ok_or_else(|| CliError::Validation(format!("{context}: expected a number")))
}

fn opt_source_from(value: Value, context: &str) -> Result<OptSource, CliError> {
    serde_json::from_value(value).map_err(|e| CliError::Validation(format!("{context}: {e}")))
}

fn metric_from(value: Value, context: &str) -> Result<Metric, CliError> {
    serde_json::from_value(value).map_err(|e| CliError::Validation(format!("{context}: {e}")))
}

/// Parses and schema-validates a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let root: Value = serde_json::from_str(text)?;
    let mut fields = Fields::new(root, "config")?;

    let seed = expect_u64(fields.require("seed")?, "config.seed")?;
    let trials = expect_usize(fields.require("trials")?, "config.trials")?;
    if trials == 0 {
        return Err(CliError::Validation(
            "config.trials: must be at least 1".to_string(),
        ));
    }
    let workers = match fields.take("workers") {
        Some(v) => {
            let w = expect_usize(v, "config.workers")?;
            if w == 0 {
                return Err(CliError::Validation(
                    "config.workers: must be at least 1".to_string(),
                ));
            }
            Some(w)
        }
        None => None,
    };
    let opt_source = match fields.take("opt_source") {
        Some(v) => opt_source_from(v, "config.opt_source")?,
        None => OptSource::Auto,
    };
    let metric = match fields.take("metric") {
        Some(v) => metric_from(v, "config.metric")?,
        None => Metric::Value,
    };

    let experiments_value = fields.require("experiments")?;
    let Value::Array(entries) = experiments_value else {
        return Err(CliError::Validation(
            "config.experiments: expected an array".to_string(),
        ));
    };
    if entries.is_empty() {
        return Err(CliError::Validation(
            "config.experiments: must not be empty".to_string(),
        ));
    }
    fields.finish()?;

    let experiments = entries
        .into_iter()
        .enumerate()
        .map(|(i, entry)| parse_experiment(entry, i))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(ExperimentConfig {
        seed,
        trials,
        workers,
        opt_source,
        metric,
        experiments,
    })
}

fn parse_experiment(value: Value, index: usize) -> Result<Experiment, CliError> {
    let context = format!("experiments[{index}]");
    let mut fields = Fields::new(value, &context)?;

    let instance = parse_instance_source(fields.require("instance")?, &context)?;

    let readers_value = fields.require("readers")?;
    let Value::Array(reader_entries) = readers_value else {
        return Err(CliError::Validation(format!(
            "{context}.readers: expected an array"
        )));
    };
    if reader_entries.is_empty() {
        return Err(CliError::Validation(format!(
            "{context}.readers: must not be empty"
        )));
    }
    let readers = reader_entries
        .into_iter()
        .enumerate()
        .map(|(i, entry)| parse_reader(entry, &format!("{context}.readers[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;

    let trials = match fields.take("trials") {
        Some(v) => {
            let t = expect_usize(v, &format!("{context}.trials"))?;
            if t == 0 {
                return Err(CliError::Validation(format!(
                    "{context}.trials: must be at least 1"
                )));
            }
            Some(t)
        }
        None => None,
    };
    let opt_source = match fields.take("opt_source") {
        Some(v) => Some(opt_source_from(v, &format!("{context}.opt_source"))?),
        None => None,
    };
    let metric = match fields.take("metric") {
        Some(v) => Some(metric_from(v, &format!("{context}.metric"))?),
        None => None,
    };
    fields.finish()?;

    Ok(Experiment {
        instance,
        readers,
        trials,
        opt_source,
        metric,
    })
}

fn parse_instance_source(value: Value, context: &str) -> Result<InstanceSource, CliError> {
    let context = format!("{context}.instance");
    let mut fields = Fields::new(value, &context)?;
    let file = fields.take("file");
    let generator = fields.take("generator");
    fields.finish()?;
    match (file, generator) {
        (Some(f), None) => Ok(InstanceSource::File(PathBuf::from(expect_string(
            f,
            &format!("{context}.file"),
        )?))),
        (None, Some(g)) => Ok(InstanceSource::Generator(parse_generator(
            g,
            &format!("{context}.generator"),
        )?)),
        _ => Err(CliError::Validation(format!(
            "{context}: exactly one of \"file\" or \"generator\" required"
        ))),
    }
}

/// Parses a generator spec: `family`, `seed`, plus family parameters.
pub fn parse_generator(value: Value, context: &str) -> Result<GeneratorSpec, CliError> {
    let mut fields = Fields::new(value, context)?;
    let family = expect_string(fields.require("family")?, &format!("{context}.family"))?;
    let seed = match fields.take("seed") {
        Some(v) => expect_u64(v, &format!("{context}.seed"))?,
        None => 0,
    };
    match family.as_str() {
        "lemma3" => {
            let l = expect_u64(fields.require("l")?, &format!("{context}.l"))?;
            fields.finish()?;
            Ok(GeneratorSpec::Lemma3 { l, seed })
        }
        "lemma4" => {
            let n = expect_usize(fields.require("n")?, &format!("{context}.n"))?;
            fields.finish()?;
            Ok(GeneratorSpec::Lemma4 { n, seed })
        }
        "lemma5" => {
            let n = expect_usize(fields.require("n")?, &format!("{context}.n"))?;
            let c_acc = expect_u64(fields.require("c_acc")?, &format!("{context}.c_acc"))?;
            fields.finish()?;
            Ok(GeneratorSpec::Lemma5 { n, c_acc, seed })
        }
        "random" => {
            let params: RandomParams = serde_json::from_value(fields.rest())
                .map_err(|e| CliError::Validation(format!("{context}: {e}")))?;
            Ok(GeneratorSpec::Random { params, seed })
        }
        other => Err(CliError::Validation(format!(
            "{context}.family: unknown family {other:?} \
             (expected lemma3, lemma4, lemma5, or random)"
        ))),
    }
}

/// Parses one reader spec: `name` plus per-reader parameters.
pub fn parse_reader(value: Value, context: &str) -> Result<ReaderSpec, CliError> {
    let mut fields = Fields::new(value, context)?;
    let name = expect_string(fields.require("name")?, &format!("{context}.name"))?;
    let spec = match name.as_str() {
        "secretary" => ReaderSpec::Secretary,
        "prefix" => {
            let len = expect_rat(fields.require("len")?, &format!("{context}.len"))?;
            ReaderSpec::Prefix { len }
        }
        "threshold" => {
            let g = expect_rat(fields.require("g")?, &format!("{context}.g"))?;
            ReaderSpec::Threshold { g }
        }
        "reduction" => ReaderSpec::Reduction {
            alpha: take_alpha(&mut fields, context)?,
        },
        "direct" => ReaderSpec::Direct {
            alpha: take_alpha(&mut fields, context)?,
        },
        other => {
            return Err(CliError::Validation(format!(
                "{context}.name: unknown reader {other:?} \
                 (expected secretary, prefix, threshold, reduction, or direct)"
            )))
        }
    };
    fields.finish()?;
    Ok(spec)
}

/// Alpha defaults to the baseline 10e; the string `"baseline"` selects it
/// explicitly.
fn take_alpha(fields: &mut Fields, context: &str) -> Result<f64, CliError> {
    match fields.take("alpha") {
        None => Ok(BASELINE_ALPHA),
        Some(Value::String(s)) if s == "baseline" => Ok(BASELINE_ALPHA),
        Some(v) => expect_f64(v, &format!("{context}.alpha")),
    }
}

/// Parses a CLI-facing real number: plain decimal or `"p/q"` rational.
pub fn parse_real(s: &str) -> Result<f64, CliError> {
    Ok(rat_to_f64(&parse_rat(s)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rao_core::rat::rat;

    fn reader(json: &str) -> Result<ReaderSpec, CliError> {
        parse_reader(serde_json::from_str(json).unwrap(), "r")
    }

    #[test]
    fn threshold_g_accepts_decimals_and_fractions() {
        let from_number = reader(r#"{"name": "threshold", "g": 0.0215}"#).unwrap();
        let from_string = reader(r#"{"name": "threshold", "g": "43/2000"}"#).unwrap();
        assert_eq!(from_number, ReaderSpec::Threshold { g: rat(43, 2000) });
        assert_eq!(from_number, from_string);
    }

    #[test]
    fn alpha_defaults_to_baseline() {
        let implicit = reader(r#"{"name": "reduction"}"#).unwrap();
        let named = reader(r#"{"name": "reduction", "alpha": "baseline"}"#).unwrap();
        assert_eq!(implicit, ReaderSpec::Reduction { alpha: BASELINE_ALPHA });
        assert_eq!(implicit, named);
        let custom = reader(r#"{"name": "direct", "alpha": 30.0}"#).unwrap();
        assert_eq!(custom, ReaderSpec::Direct { alpha: 30.0 });
    }

    #[test]
    fn unknown_reader_keys_are_rejected() {
        let err = reader(r#"{"name": "secretary", "cutoff": 37}"#).unwrap_err();
        assert!(err.to_string().contains("unknown keys"), "{err}");
        let err = reader(r#"{"name": "prefix"}"#).unwrap_err();
        assert!(err.to_string().contains("len"), "{err}");
    }

    #[test]
    fn generator_spec_rejects_unknown_and_missing_fields() {
        let parse = |json: &str| {
            parse_generator(serde_json::from_str::<Value>(json).unwrap(), "gen")
        };
        assert_eq!(
            parse(r#"{"family": "lemma3", "l": 4, "seed": 7}"#).unwrap(),
            GeneratorSpec::Lemma3 { l: 4, seed: 7 }
        );
        let err = parse(r#"{"family": "lemma3", "l": 4, "n": 16}"#).unwrap_err();
        assert!(err.to_string().contains("unknown keys"), "{err}");
        let err = parse(r#"{"family": "lemma5", "n": 5}"#).unwrap_err();
        assert!(err.to_string().contains("c_acc"), "{err}");
        let err = parse(
            r#"{"family": "random", "n": 2, "budget": 5, "hint_min": 1, "hint_max": 9,
                "length": {"fixed": 2}, "shape": "constant", "bogus": 1}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn config_overrides_fall_back_to_defaults() {
        let config = parse_config(
            r#"{
                "seed": 5,
                "trials": 100,
                "experiments": [
                    {
                        "instance": {"generator": {"family": "lemma4", "n": 9, "seed": 1}},
                        "readers": [{"name": "secretary"}],
                        "trials": 7,
                        "metric": "select_max"
                    },
                    {
                        "instance": {"file": "inst.json"},
                        "readers": [{"name": "prefix", "len": "3/2"}]
                    }
                ]
            }"#,
        )
        .unwrap();
        assert_eq!(config.trials, 100);
        assert_eq!(config.opt_source, OptSource::Auto);
        assert_eq!(config.metric, Metric::Value);
        assert_eq!(config.experiments[0].trials, Some(7));
        assert_eq!(config.experiments[0].metric, Some(Metric::SelectMax));
        assert_eq!(config.experiments[1].trials, None);
        assert!(matches!(
            &config.experiments[1].instance,
            InstanceSource::File(p) if p == Path::new("inst.json")
        ));
    }

    #[test]
    fn instance_source_must_be_exclusive() {
        let err = parse_config(
            r#"{"seed": 1, "trials": 1, "experiments": [
                {"instance": {"file": "a", "generator": {"family": "lemma4", "n": 9}},
                 "readers": [{"name": "secretary"}]}
            ]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("exactly one"), "{err}");
    }
}
