#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use epiplan::{InputPaths, ScenarioStore};
use epiplan_gateway::{router, AppState};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/oklahoma")
}

pub fn fixture_inputs() -> InputPaths {
    let d = fixture_dir();
    InputPaths {
        counties: d.join("counties.csv"),
        adjacency: d.join("adjacency.csv"),
        air_routes: Some(d.join("air_routes.csv")),
        geometry: Some(d.join("counties.geojson")),
    }
}

pub fn baseline_json() -> Value {
    serde_json::from_str(&std::fs::read_to_string(fixture_dir().join("baseline.json")).unwrap())
        .unwrap()
}

pub fn app() -> Router {
    router(AppState::new(
        Arc::new(ScenarioStore::in_memory()),
        Some(fixture_inputs()),
    ))
}

pub struct Reply {
    pub status: StatusCode,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }

    pub fn text(&self) -> String {
        String::from_utf8(self.body.clone()).unwrap()
    }
}

pub async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let body = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    Reply { status, body }
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    call(app, Method::GET, uri, None).await
}

pub async fn post(app: &Router, uri: &str, body: Value) -> Reply {
    call(app, Method::POST, uri, Some(body)).await
}

/// Creates and runs the baseline scenario, returning its id.
pub async fn baseline(app: &Router) -> String {
    let created = post(
        app,
        "/v1/scenarios",
        serde_json::json!({ "config": baseline_json() }),
    )
    .await;
    assert_eq!(created.status, StatusCode::CREATED, "{}", created.text());
    let id = created.json()["id"].as_str().unwrap().to_string();
    let run = post(
        app,
        &format!("/v1/scenarios/{id}/run"),
        serde_json::json!({}),
    )
    .await;
    assert_eq!(run.status, StatusCode::OK, "{}", run.text());
    id
}

/// The export parsed as `(header, rows)`.
pub fn parse_export(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}
