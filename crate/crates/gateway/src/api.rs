//! The `/v1` HTTP surface.
//!
//! | Method | Path | Result |
//! |---|---|---|
//! | GET | `/v1/health` | `{"status":"ok"}` |
//! | POST | `/v1/scenarios` | new scenario (201) |
//! | GET | `/v1/scenarios` | scenario tree, oldest first |
//! | GET | `/v1/scenarios/{id}` | one scenario with its full configuration |
//! | POST | `/v1/scenarios/{id}/run` | run status and summary |
//! | POST | `/v1/scenarios/{id}/branch` | child scenario (201) |
//! | GET | `/v1/scenarios/{id}/frames/{day}?metric=` | map frame |
//! | GET | `/v1/scenarios/{id}/series?counties=&metric=` | time series |
//! | GET | `/v1/scenarios/{id}/summary` | statewide summary |
//! | GET | `/v1/scenarios/{id}/export.csv` | full frame export |
//! | GET | `/v1/inputs/geometry` | county GeoJSON |

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use epiplan::config::config_from_value;
use epiplan::scenario::write_export;
use epiplan::spatial::SpreadNetwork;
use epiplan::{
    ActionSpec, DecisionAction, Frame, InputBundle, InputPaths, Metric, ModelConfig, Scenario,
    ScenarioStore, Series, StateSummary,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{ApiError, ApiResult};

/// Shared server state. Cheap to clone.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Shared>,
}

struct Shared {
    store: Arc<ScenarioStore>,
    default_inputs: Option<InputPaths>,
    bundles: Mutex<HashMap<InputPaths, Arc<InputBundle>>>,
}

impl AppState {
    /// `default_inputs` are used for scenarios created without their own.
    pub fn new(store: Arc<ScenarioStore>, default_inputs: Option<InputPaths>) -> Self {
        Self {
            inner: Arc::new(Shared {
                store,
                default_inputs,
                bundles: Mutex::default(),
            }),
        }
    }

    pub fn store(&self) -> &ScenarioStore {
        &self.inner.store
    }

    /// Loads (once) and returns the inputs at `paths`.
    pub fn bundle(&self, paths: &InputPaths) -> epiplan::Result<Arc<InputBundle>> {
        let mut cache = self.inner.bundles.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(b) = cache.get(paths) {
            return Ok(b.clone());
        }
        let bundle = Arc::new(InputBundle::load(paths)?);
        cache.insert(paths.clone(), bundle.clone());
        Ok(bundle)
    }

    fn network(&self, scenario: &Scenario) -> epiplan::Result<SpreadNetwork> {
        let paths = scenario
            .inputs
            .as_ref()
            .ok_or_else(|| epiplan::Error::Network(format!("{} has no inputs", scenario.id)))?;
        self.bundle(paths)?.network(scenario.config.spread)
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/scenarios", post(create_scenario).get(list_scenarios))
        .route("/v1/scenarios/{id}", get(get_scenario))
        .route("/v1/scenarios/{id}/run", post(run_scenario))
        .route("/v1/scenarios/{id}/branch", post(branch_scenario))
        .route("/v1/scenarios/{id}/frames/{day}", get(frame))
        .route("/v1/scenarios/{id}/series", get(series))
        .route("/v1/scenarios/{id}/summary", get(summary))
        .route("/v1/scenarios/{id}/export.csv", get(export_csv))
        .route("/v1/inputs/geometry", get(geometry))
        .with_state(state)
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ApiError::bad_request(e.body_text()))
}

fn path<T>(p: Result<Path<T>, PathRejection>) -> ApiResult<T> {
    p.map(|Path(v)| v)
        .map_err(|e| ApiError::bad_request(e.body_text()))
}

fn query<T>(q: Result<Query<T>, QueryRejection>) -> ApiResult<T> {
    q.map(|Query(v)| v)
        .map_err(|e| ApiError::bad_request(e.body_text()))
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Created,
    Complete,
}

/// One node of the scenario tree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioNode {
    pub id: String,
    pub parent_id: Option<String>,
    pub branch_day: u32,
    pub status: RunStatus,
    pub horizon: u32,
    pub actions: Vec<DecisionAction>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioDetail {
    #[serde(flatten)]
    pub node: ScenarioNode,
    pub config: ModelConfig,
    pub inputs: Option<InputPaths>,
}

fn node(state: &AppState, s: &Scenario) -> ScenarioNode {
    ScenarioNode {
        id: s.id.clone(),
        parent_id: s.parent_id.clone(),
        branch_day: s.branch_day.unwrap_or(0),
        status: if state.store().result(&s.id).is_ok() {
            RunStatus::Complete
        } else {
            RunStatus::Created
        },
        horizon: s.config.disease.horizon,
        actions: s.config.timeline().actions().to_vec(),
    }
}

fn detail(state: &AppState, s: Scenario) -> ScenarioDetail {
    ScenarioDetail {
        node: node(state, &s),
        config: s.config,
        inputs: s.inputs,
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    #[serde(default)]
    pub config: Option<Value>,
    #[serde(default)]
    pub inputs: Option<InputPaths>,
}

async fn create_scenario(
    State(state): State<AppState>,
    payload: Result<Json<CreateRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<ScenarioDetail>)> {
    let req = body(payload)?;
    let config = config_from_value(req.config.unwrap_or_else(|| json!({})))?.config;
    let inputs = req
        .inputs
        .or_else(|| state.inner.default_inputs.clone())
        .ok_or_else(|| {
            ApiError::bad_request("no inputs given and the server has no default inputs")
        })?;

    // Check inputs and seed counties now, so a bad scenario never enters the store.
    let bundle = state.bundle(&inputs)?;
    let network = bundle.network(config.spread)?;
    let mut bad = epiplan::error::Violations::default();
    for (i, seed) in config.seeds.iter().enumerate() {
        if network.index_of(&seed.fips).is_none() {
            bad.push(
                format!("seeds[{i}].fips"),
                format!("unknown county {}", seed.fips),
            );
        }
    }
    bad.into_result()?;

    let scenario = state.store().create(config, Some(inputs))?;
    Ok((StatusCode::CREATED, Json(detail(&state, scenario))))
}

async fn list_scenarios(State(state): State<AppState>) -> Json<Vec<ScenarioNode>> {
    Json(
        state
            .store()
            .list()
            .iter()
            .map(|s| node(&state, s))
            .collect(),
    )
}

async fn get_scenario(
    State(state): State<AppState>,
    id: Result<Path<String>, PathRejection>,
) -> ApiResult<Json<ScenarioDetail>> {
    let scenario = state.store().get(&path(id)?)?;
    Ok(Json(detail(&state, scenario)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResponse {
    pub id: String,
    pub status: RunStatus,
    /// True when the result already existed and was returned unchanged.
    pub cached: bool,
    pub summary: StateSummary,
}

async fn run_scenario(
    State(state): State<AppState>,
    id: Result<Path<String>, PathRejection>,
) -> ApiResult<Json<RunResponse>> {
    let id = path(id)?;
    let worker = state.clone();
    let run_id = id.clone();
    let outcome =
        tokio::task::spawn_blocking(move || worker.store().run(&run_id, |s| worker.network(s)))
            .await
            .map_err(|e| {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
            })??;
    Ok(Json(RunResponse {
        id,
        status: RunStatus::Complete,
        cached: outcome.cached,
        summary: outcome.result.summary(),
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchRequest {
    pub branch_day: u32,
    #[serde(default)]
    pub actions: Vec<ActionSpec>,
}

async fn branch_scenario(
    State(state): State<AppState>,
    id: Result<Path<String>, PathRejection>,
    payload: Result<Json<BranchRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<ScenarioDetail>)> {
    let id = path(id)?;
    let req = body(payload)?;
    let child = state.store().branch(&id, req.branch_day, &req.actions)?;
    Ok((StatusCode::CREATED, Json(detail(&state, child))))
}

#[derive(Debug, Default, Deserialize)]
pub struct MetricQuery {
    pub metric: Option<String>,
}

fn metric(name: Option<&str>) -> ApiResult<Metric> {
    Ok(name.unwrap_or("active_sick").parse::<Metric>()?)
}

async fn frame(
    State(state): State<AppState>,
    p: Result<Path<(String, u32)>, PathRejection>,
    q: Result<Query<MetricQuery>, QueryRejection>,
) -> ApiResult<Json<Frame>> {
    let (id, day) = path(p)?;
    let m = metric(query(q)?.metric.as_deref())?;
    let result = state.store().result(&id)?;
    Ok(Json(result.frame(day, m)?))
}

#[derive(Debug, Default, Deserialize)]
pub struct SeriesQuery {
    pub counties: Option<String>,
    pub metric: Option<String>,
}

async fn series(
    State(state): State<AppState>,
    id: Result<Path<String>, PathRejection>,
    q: Result<Query<SeriesQuery>, QueryRejection>,
) -> ApiResult<Json<Vec<Series>>> {
    let id = path(id)?;
    let q = query(q)?;
    let m = metric(q.metric.as_deref())?;
    let result = state.store().result(&id)?;
    let fips: Vec<&str> = q
        .counties
        .as_deref()
        .unwrap_or("")
        .split(',')
        .map(str::trim)
        .filter(|f| !f.is_empty())
        .collect();
    Ok(Json(result.series(&fips, m)?))
}

async fn summary(
    State(state): State<AppState>,
    id: Result<Path<String>, PathRejection>,
) -> ApiResult<Json<StateSummary>> {
    Ok(Json(state.store().result(&path(id)?)?.summary()))
}

async fn export_csv(
    State(state): State<AppState>,
    id: Result<Path<String>, PathRejection>,
) -> ApiResult<impl IntoResponse> {
    let result = state.store().result(&path(id)?)?;
    let mut buf = Vec::new();
    write_export(&mut buf, &result)?;
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], buf))
}

async fn geometry(State(state): State<AppState>) -> ApiResult<Json<Value>> {
    let missing = || ApiError::not_found("no_geometry", "the server has no county geometry loaded");
    let paths = state.inner.default_inputs.as_ref().ok_or_else(missing)?;
    let bundle = state.bundle(paths)?;
    bundle.geometry.clone().map(Json).ok_or_else(missing)
}
