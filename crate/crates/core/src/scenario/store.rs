use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::config::{ActionSpec, ModelConfig};
use crate::error::{Error, Result};
use crate::io::InputPaths;
use crate::spatial::SpreadNetwork;

use super::engine::simulate;
use super::result::SimulationResult;

/// A named, immutable configuration. Branches record where they split off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_day: Option<u32>,
    pub config: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<InputPaths>,
}

/// Outcome of [`ScenarioStore::run`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub result: Arc<SimulationResult>,
    /// True when an earlier run's result was returned unchanged.
    pub cached: bool,
}

#[derive(Default)]
struct Inner {
    scenarios: BTreeMap<u64, Scenario>,
    results: HashMap<String, Arc<SimulationResult>>,
    next: u64,
}

/// Append-only scenario registry with result caching.
///
/// Scenarios are never modified after creation; what-ifs are new branches.
/// With a directory attached, scenarios and results are written as JSON and
/// reloaded on [`ScenarioStore::open`], so ids stay stable across restarts.
/// All methods take `&self` and are safe to call from many threads. Runs of
/// the same scenario are single-flight: concurrent callers wait for the first
/// and share its result.
pub struct ScenarioStore {
    dir: Option<PathBuf>,
    inner: RwLock<Inner>,
    run_locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

fn format_id(n: u64) -> String {
    format!("sc-{n:04}")
}

fn parse_id(id: &str) -> Option<u64> {
    id.strip_prefix("sc-")?.parse().ok()
}

fn io_err(context: String) -> impl FnOnce(std::io::Error) -> Error {
    move |source| Error::Io { context, source }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_vec(value).map_err(|source| Error::Json {
        context: format!("serializing {}", path.display()),
        source,
    })?;
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text).map_err(io_err(format!("writing {}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(io_err(format!("renaming to {}", path.display())))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read(path).map_err(io_err(format!("reading {}", path.display())))?;
    serde_json::from_slice(&text).map_err(|source| Error::Json {
        context: format!("parsing {}", path.display()),
        source,
    })
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(format!("listing {}", dir.display())))? {
        let path = entry
            .map_err(io_err(format!("listing {}", dir.display())))?
            .path();
        if path.extension().is_some_and(|e| e == "json") {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

impl Default for ScenarioStore {
    fn default() -> Self {
        Self::in_memory()
    }
}

impl ScenarioStore {
    pub fn in_memory() -> Self {
        Self {
            dir: None,
            inner: RwLock::new(Inner {
                next: 1,
                ..Inner::default()
            }),
            run_locks: Mutex::default(),
        }
    }

    /// Opens (creating if needed) a store persisted under `dir`.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        let (sdir, rdir) = (dir.join("scenarios"), dir.join("results"));
        for d in [&sdir, &rdir] {
            fs::create_dir_all(d).map_err(io_err(format!("creating {}", d.display())))?;
        }
        let mut inner = Inner {
            next: 1,
            ..Inner::default()
        };
        for path in json_files(&sdir)? {
            let s: Scenario = read_json(&path)?;
            let n = parse_id(&s.id).ok_or_else(|| Error::UnknownScenario(s.id.clone()))?;
            inner.next = inner.next.max(n + 1);
            inner.scenarios.insert(n, s);
        }
        for path in json_files(&rdir)? {
            let r: SimulationResult = read_json(&path)?;
            if inner.scenarios.values().any(|s| s.id == r.scenario_id) {
                inner.results.insert(r.scenario_id.clone(), Arc::new(r));
            }
        }
        Ok(Self {
            dir: Some(dir),
            inner: RwLock::new(inner),
            run_locks: Mutex::default(),
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, Inner> {
        self.inner.read().unwrap_or_else(|e| e.into_inner())
    }

    fn write(&self) -> std::sync::RwLockWriteGuard<'_, Inner> {
        self.inner.write().unwrap_or_else(|e| e.into_inner())
    }

    fn insert(
        &self,
        parent_id: Option<String>,
        branch_day: Option<u32>,
        config: ModelConfig,
        inputs: Option<InputPaths>,
    ) -> Result<Scenario> {
        config.validate().into_result()?;
        let mut inner = self.write();
        let n = inner.next;
        let scenario = Scenario {
            id: format_id(n),
            parent_id,
            branch_day,
            config,
            inputs,
        };
        if let Some(dir) = &self.dir {
            write_json(
                &dir.join("scenarios").join(format!("{}.json", scenario.id)),
                &scenario,
            )?;
        }
        inner.next = n + 1;
        inner.scenarios.insert(n, scenario.clone());
        Ok(scenario)
    }

    /// Registers a new root scenario after validating its configuration.
    pub fn create(&self, config: ModelConfig, inputs: Option<InputPaths>) -> Result<Scenario> {
        self.insert(None, None, config, inputs)
    }

    /// Creates a child that shares the parent's history up to `branch_day`.
    ///
    /// The child keeps the parent's configuration and every parent action
    /// starting before `branch_day`, then adds `new_actions` (resolved
    /// against the parent's measure defaults). New actions may not start
    /// before the branch day.
    pub fn branch(
        &self,
        parent_id: &str,
        branch_day: u32,
        new_actions: &[ActionSpec],
    ) -> Result<Scenario> {
        let parent = self.get(parent_id)?;
        let horizon = parent.config.disease.horizon;
        if branch_day > horizon {
            return Err(Error::DayOutOfRange {
                day: branch_day,
                horizon,
            });
        }
        if let Some(a) = new_actions.iter().find(|a| a.start_day < branch_day) {
            return Err(Error::BranchHistory {
                kind: a.kind.to_string(),
                start_day: a.start_day,
                branch_day,
            });
        }
        let mut config = parent.config.clone();
        let mut actions = parent.config.timeline().before(branch_day);
        actions.extend(new_actions.iter().map(|a| config.measures.resolve(a)));
        config.actions = actions;
        self.insert(Some(parent.id), Some(branch_day), config, parent.inputs)
    }

    pub fn get(&self, id: &str) -> Result<Scenario> {
        parse_id(id)
            .and_then(|n| self.read().scenarios.get(&n).cloned())
            .ok_or_else(|| Error::UnknownScenario(id.to_string()))
    }

    /// Every scenario, oldest first.
    pub fn list(&self) -> Vec<Scenario> {
        self.read().scenarios.values().cloned().collect()
    }

    pub fn result(&self, id: &str) -> Result<Arc<SimulationResult>> {
        self.get(id)?;
        self.read()
            .results
            .get(id)
            .cloned()
            .ok_or_else(|| Error::NotRun(id.to_string()))
    }

    /// Runs a scenario, or returns its cached result.
    ///
    /// `network` is only called on a cache miss; it must build the spread
    /// network for the scenario's inputs and `config.spread`.
    pub fn run(
        &self,
        id: &str,
        network: impl FnOnce(&Scenario) -> Result<SpreadNetwork>,
    ) -> Result<RunOutcome> {
        let scenario = self.get(id)?;
        let lock = {
            let mut locks = self.run_locks.lock().unwrap_or_else(|e| e.into_inner());
            locks.entry(scenario.id.clone()).or_default().clone()
        };
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());

        if let Some(result) = self.read().results.get(&scenario.id).cloned() {
            return Ok(RunOutcome {
                result,
                cached: true,
            });
        }
        let net = network(&scenario)?;
        let result = Arc::new(simulate(scenario.id.clone(), &scenario.config, &net)?);
        if let Some(dir) = &self.dir {
            write_json(
                &dir.join("results").join(format!("{}.json", scenario.id)),
                &*result,
            )?;
        }
        self.write()
            .results
            .insert(scenario.id.clone(), result.clone());
        Ok(RunOutcome {
            result,
            cached: false,
        })
    }
}
