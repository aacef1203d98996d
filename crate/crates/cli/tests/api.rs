use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use strata_cli::server::router;
use strata_core::{parse_dataset, Format, GraphDataset};
use tower::ServiceExt;

fn fixture(name: &str) -> GraphDataset {
    let path = format!("{}/../../fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    parse_dataset(&std::fs::read_to_string(path).unwrap(), Format::Json).unwrap()
}

async fn call(ds: &GraphDataset, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = router(ds.clone(), None).oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn get(ds: &GraphDataset, uri: &str) -> (StatusCode, Value) {
    let (s, b) = call(ds, Request::get(uri).body(Body::empty()).unwrap()).await;
    (s, serde_json::from_slice(&b).unwrap())
}

async fn post_raw(ds: &GraphDataset, body: &str) -> (StatusCode, Vec<u8>) {
    let req = Request::post("/api/layout")
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    call(ds, req).await
}

async fn post(ds: &GraphDataset, body: Value) -> (StatusCode, Value) {
    let (s, b) = post_raw(ds, &body.to_string()).await;
    (s, serde_json::from_slice(&b).unwrap())
}

fn position(doc: &Value, mode: &str, id: &str) -> (f64, f64) {
    let p = doc["modes"][mode]["positions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["id"] == id)
        .unwrap();
    (p["x"].as_f64().unwrap(), p["y"].as_f64().unwrap())
}

#[tokio::test]
async fn health_and_dataset() {
    let ds = fixture("trio");
    assert_eq!(get(&ds, "/api/health").await, (StatusCode::OK, json!({"status": "ok"})));
    let (s, doc) = get(&ds, "/api/dataset").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(doc, ds.to_json_value());
}

#[tokio::test]
async fn layout_is_deterministic() {
    let ds = fixture("fig2_13");
    let body = r#"{"mode":"force_layered","seed":11,"pins":[]}"#;
    let a = post_raw(&ds, body).await;
    let b = post_raw(&ds, body).await;
    assert_eq!(a.0, StatusCode::OK);
    assert_eq!(a, b);
}

#[tokio::test]
async fn pins_are_honoured() {
    let ds = fixture("trio");
    let (s, doc) = post(&ds, json!({"mode": "force_directed", "seed": 11, "pins": [{"id": "A", "x": 100, "y": 100}]})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(position(&doc, "force_directed", "A"), (100.0, 100.0));

    let (s, doc) = post(&ds, json!({"mode": "force_layered", "seed": 11, "pins": [{"id": "A", "x": 100, "y": 100}]})).await;
    assert_eq!(s, StatusCode::OK);
    // A is on layer 0: margin + band_height / 2
    assert_eq!(position(&doc, "force_layered", "A"), (100.0, 100.0));
    let (s, doc) = post(&ds, json!({"mode": "force_layered", "seed": 11, "pins": [{"id": "C", "x": 250.5, "y": 10}]})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(position(&doc, "force_layered", "C"), (250.5, 220.0));
}

#[tokio::test]
async fn layout_errors() {
    let ds = fixture("trio");
    let (s, b) = post_raw(&ds, "{not json").await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let err: Value = serde_json::from_slice(&b).unwrap();
    assert_eq!(err["code"], "bad_request");
    assert!(err["message"].is_string());

    assert_eq!(post(&ds, json!({"mode": "sideways"})).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(post(&ds, json!({"bogus": 1})).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(post(&ds, json!({"config": {"theta": 3}})).await.0, StatusCode::BAD_REQUEST);

    let (s, err) = post(&ds, json!({"pins": [{"id": "nobody", "x": 1, "y": 1}]})).await;
    assert_eq!((s, err["code"].as_str()), (StatusCode::NOT_FOUND, Some("unknown_id")));

    let overflow = json!({"mode": "force_directed", "config": {"canvas_width": 1e308, "canvas_height": 1e308, "repulsion_strength": 1e308}});
    let (s, err) = post(&ds, overflow).await;
    assert_eq!((s, err["code"].as_str()), (StatusCode::INTERNAL_SERVER_ERROR, Some("numerical")));
}

#[tokio::test]
async fn layout_with_trace() {
    let ds = fixture("trio");
    let (s, doc) = post(&ds, json!({"seed": 3, "trace": true})).await;
    assert_eq!(s, StatusCode::OK);
    let ticks = doc["trace"]["ticks"].as_array().unwrap();
    assert!(ticks.len() > 2);
    assert_eq!(ticks.last().unwrap()["snap"], true);
    let (_, plain) = post(&ds, json!({"seed": 3})).await;
    assert!(plain.get("trace").is_none());
}

#[tokio::test]
async fn queries() {
    let ds = fixture("trio");
    assert_eq!(get(&ds, "/api/query/most-connected").await.1["ids"], json!(["A", "B", "C"]));
    assert_eq!(get(&ds, "/api/query/common?a=A&b=B").await.1["ids"], json!(["C"]));
    let (s, err) = get(&ds, "/api/query/common?a=A&b=Q").await;
    assert_eq!((s, err["code"].as_str()), (StatusCode::NOT_FOUND, Some("unknown_id")));
    assert_eq!(get(&ds, "/api/query/common?a=A").await.0, StatusCode::BAD_REQUEST);
    assert_eq!(get(&ds, "/api/query/common?a=A&b=A").await.0, StatusCode::BAD_REQUEST);

    let ds = fixture("cornelia38");
    let (s, snap) = get(&ds, "/api/query/snapshot?year=1650").await;
    assert_eq!(s, StatusCode::OK);
    let sub = parse_dataset(&snap["dataset"].to_string(), Format::Json).unwrap();
    assert!(strata_core::model::validate(&sub).is_empty());
    assert_eq!(snap["ids"].as_array().unwrap().len(), sub.len());
    assert_eq!(get(&ds, "/api/query/snapshot?year=soon").await.0, StatusCode::BAD_REQUEST);
    assert_eq!(get(&ds, "/api/query/snapshot").await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn report() {
    let ds = fixture("cornelia38");
    let (s, doc) = get(&ds, "/api/report?seed=11").await;
    assert_eq!(s, StatusCode::OK);
    let fl = &doc["modes"]["force_layered"]["report"];
    let fd = &doc["modes"]["force_directed"]["report"];
    assert_eq!(fl["layer_violation"], 0.0);
    assert!(fd["layer_violation"].as_f64().unwrap() > 0.0);
    assert_eq!(fl["node_count"], 38);
    assert!(fl["bridge_nodes"].as_array().unwrap().contains(&json!("x1")));
    assert!(doc["comparison"]["table"].is_string());
    assert_eq!(get(&ds, "/api/report?seed=-1").await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn unknown_route_and_assets() {
    let ds = fixture("trio");
    let (s, err) = get(&ds, "/api/nothing").await;
    assert_eq!((s, err["code"].as_str()), (StatusCode::NOT_FOUND, Some("not_found")));

    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<!doctype html><title>viewer</title>").unwrap();
    let app = router(ds, Some(dir.path().to_path_buf()));
    let resp = app.oneshot(Request::get("/").body(Body::empty()).unwrap()).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let body = resp.into_body().collect().await.unwrap().to_bytes();
    assert!(String::from_utf8_lossy(&body).contains("viewer"));
}
