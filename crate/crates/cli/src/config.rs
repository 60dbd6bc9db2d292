//! Run configuration: defaults, then an optional JSON config file, then flags.

use std::path::{Path, PathBuf};

use asymlab::asymptotics::Tolerances;
use asymlab::rank_one::SpacerPlan;
use asymlab::{Error, Result};
use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    WeakLimit,
    Backward,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Theorem1 => "theorem1",
            Experiment::Theorem2 => "theorem2",
            Experiment::Theorem3 => "theorem3",
            Experiment::Theorem4 => "theorem4",
            Experiment::WeakLimit => "weak-limit",
            Experiment::Backward => "backward",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        <Experiment as ValueEnum>::from_str(s, false)
            .map_err(|_| Error::Parse(format!("unknown experiment {s:?}")))
    }

    pub fn default_stages(self) -> Vec<usize> {
        match self {
            Experiment::Theorem3 => (3..=16).collect(),
            Experiment::Theorem4 => (3..=10).collect(),
            _ => (3..=8).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum PlanSource {
    File(PathBuf),
    Inline(Value),
}

impl PlanSource {
    fn from_str(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            let v =
                serde_json::from_str(s).map_err(|e| Error::Parse(format!("inline plan: {e}")))?;
            Ok(PlanSource::Inline(v))
        } else {
            Ok(PlanSource::File(PathBuf::from(s)))
        }
    }

    pub fn load(&self) -> Result<SpacerPlan> {
        match self {
            PlanSource::File(p) => {
                if !p.exists() {
                    return Err(Error::Parse(format!(
                        "plan file {} does not exist",
                        p.display()
                    )));
                }
                SpacerPlan::load(p)
            }
            PlanSource::Inline(v) => SpacerPlan::from_json(&v.to_string()),
        }
    }
}

/// Raw values supplied on the command line (all optional).
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub experiment: Option<Experiment>,
    pub plan: Option<String>,
    pub sets: Vec<String>,
    pub seed: Option<u64>,
    pub depth: Option<usize>,
    pub samples: Option<u64>,
    pub m_max: Option<u32>,
    pub stages: Option<String>,
    pub n: Option<u64>,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
    pub tolerances: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub plan: Option<PlanSource>,
    pub sets: Vec<String>,
    pub seed: u64,
    pub depth: usize,
    pub samples: u64,
    pub m_max: u32,
    pub stages: Vec<usize>,
    pub n: u64,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
    pub tolerances: Tolerances,
    /// `KEY=VAL` strings exactly as given, for the run summary.
    pub tolerance_overrides: Vec<String>,
}

fn parse_stages(s: &str) -> Result<Vec<usize>> {
    let bad = || {
        Error::Parse(format!(
            "stage list {s:?}: expected \"a..b\" (inclusive) or \"a,b,c\""
        ))
    };
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| bad()))
        .collect()
}

fn split_tolerance(kv: &str) -> Result<(&str, &str)> {
    kv.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| Error::Parse(format!("tolerance {kv:?} is not KEY=VAL")))
}

fn apply_tolerance(tol: &mut Tolerances, key: &str, value: &str) -> Result<()> {
    if key == "all" {
        let v = asymlab::rational::parse(value)
            .ok_or_else(|| Error::Parse(format!("bad tolerance value {value:?}")))?;
        tol.set_all(&v);
        Ok(())
    } else {
        tol.set(key, value)
    }
}

fn field<'a>(cfg: &'a Value, key: &str) -> Option<&'a Value> {
    cfg.get(key).or_else(|| cfg.get(key.replace('_', "-")))
}

fn as_string(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Merges the config file (if any) and the flags.
pub fn resolve(config_path: Option<&Path>, flags: Overrides) -> Result<RunConfig> {
    let file: Value = match config_path {
        None => Value::Object(Default::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Parse(format!("config file {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("config file {}: {e}", p.display())))?
        }
    };
    let base = config_path.and_then(Path::parent).unwrap_or(Path::new(""));
    let uint = |key: &str| -> Result<Option<u64>> {
        match field(&file, key) {
            None => Ok(None),
            Some(v) => v.as_u64().map(Some).ok_or_else(|| {
                Error::Parse(format!("config {key:?} must be a nonnegative integer"))
            }),
        }
    };
    let path = |key: &str| field(&file, key).map(|v| base.join(as_string(v)));

    let experiment = match flags.experiment {
        Some(e) => e,
        None => match field(&file, "experiment") {
            Some(v) => Experiment::parse(&as_string(v))?,
            None => {
                return Err(Error::Parse(
                    "no experiment given (use --experiment or the config file)".into(),
                ))
            }
        },
    };
    let plan = match (&flags.plan, field(&file, "plan")) {
        (Some(s), _) => Some(PlanSource::from_str(s)?),
        (None, Some(Value::String(s))) => Some(match PlanSource::from_str(s)? {
            PlanSource::File(p) => PlanSource::File(base.join(p)),
            inline => inline,
        }),
        (None, Some(v @ Value::Object(_))) => Some(PlanSource::Inline(v.clone())),
        (None, Some(_)) => {
            return Err(Error::Parse(
                "config \"plan\" must be a path or an object".into(),
            ))
        }
        (None, None) => None,
    };
    let sets = if !flags.sets.is_empty() {
        flags.sets.clone()
    } else {
        match field(&file, "sets") {
            None => Vec::new(),
            Some(Value::Array(items)) => items.iter().map(as_string).collect(),
            Some(_) => return Err(Error::Parse("config \"sets\" must be a list".into())),
        }
    };
    let stages = match (&flags.stages, field(&file, "stages")) {
        (Some(s), _) => parse_stages(s)?,
        (None, Some(Value::Array(items))) => items
            .iter()
            .map(|v| v.as_u64().map(|x| x as usize))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Parse("config \"stages\" must hold integers".into()))?,
        (None, Some(Value::String(s))) => parse_stages(s)?,
        (None, Some(_)) => {
            return Err(Error::Parse(
                "config \"stages\" must be a list or \"a..b\"".into(),
            ))
        }
        (None, None) => experiment.default_stages(),
    };
    if stages.is_empty() {
        return Err(Error::Parse("empty stage list".into()));
    }

    let mut tolerances = Tolerances::default();
    let mut tolerance_overrides = Vec::new();
    if let Some(t) = field(&file, "tolerances") {
        let obj = t
            .as_object()
            .ok_or_else(|| Error::Parse("config \"tolerances\" must be an object".into()))?;
        for (k, v) in obj {
            let v = as_string(v);
            apply_tolerance(&mut tolerances, k, &v)?;
            tolerance_overrides.push(format!("{k}={v}"));
        }
    }
    for kv in &flags.tolerances {
        let (k, v) = split_tolerance(kv)?;
        apply_tolerance(&mut tolerances, k, v)?;
        tolerance_overrides.push(kv.clone());
    }

    let depth = flags
        .depth
        .or(uint("depth")?.map(|d| d as usize))
        .unwrap_or(6);
    let m_max = flags
        .m_max
        .or(uint("m_max")?.map(|m| m as u32))
        .unwrap_or(10);
    Ok(RunConfig {
        experiment,
        plan,
        sets,
        seed: flags.seed.or(uint("seed")?).unwrap_or(1),
        depth,
        samples: flags.samples.or(uint("samples")?).unwrap_or(20_000),
        m_max,
        stages,
        n: flags.n.or(uint("n")?).unwrap_or(1),
        out_csv: flags.out_csv.clone().or_else(|| path("out_csv")),
        out_json: flags.out_json.clone().or_else(|| path("out_json")),
        tolerances,
        tolerance_overrides,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_lists() {
        assert_eq!(parse_stages("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_stages("2, 7").unwrap(), vec![2, 7]);
        assert!(parse_stages("5..3").is_err());
        assert!(parse_stages("x").is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.json");
        std::fs::write(
            &cfg,
            r#"{"experiment": "theorem2", "seed": 4, "depth": 5, "tolerances": {"theorem2": "0.01"}, "out_csv": "t.csv"}"#,
        )
        .unwrap();
        let flags = Overrides {
            seed: Some(9),
            tolerances: vec!["theorem2=0.02".into()],
            ..Default::default()
        };
        let rc = resolve(Some(&cfg), flags).unwrap();
        assert_eq!(rc.experiment, Experiment::Theorem2);
        assert_eq!(rc.seed, 9);
        assert_eq!(rc.depth, 5);
        assert_eq!(rc.tolerances.theorem2, asymlab::rational::ratio(2, 100));
        assert_eq!(
            rc.tolerance_overrides,
            vec!["theorem2=0.01", "theorem2=0.02"]
        );
        assert_eq!(rc.out_csv, Some(dir.path().join("t.csv")));
    }

    #[test]
    fn missing_experiment_is_rejected() {
        assert!(resolve(None, Overrides::default()).is_err());
    }
}
