use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use seedcheck_cli::cli::mutate_payload;
use seedcheck_cli::service::{self, router, AppState, ServeOptions};
use seedcheck_core::{EngineOptions, IntMatrix};

fn app() -> Router {
    router(AppState::new(ServeOptions::default()).unwrap())
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(match body {
            Some(v) => Body::from(v.to_string()),
            None => Body::empty(),
        })
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value)
}

async fn create(app: &Router, b: Value) -> Value {
    let (status, body) = call(app, Method::POST, "/sessions", Some(json!({"n": 2, "B": b}))).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body
}

fn a2() -> IntMatrix {
    IntMatrix::from_rows(&[[0i64, 1], [-1, 0]]).unwrap()
}

/// The service view minus its session id.
fn payload_of(view: &Value) -> Value {
    let mut v = view.clone();
    v.as_object_mut().unwrap().remove("id");
    v
}

#[tokio::test]
async fn create_mutate_undo() {
    let app = app();
    let start = create(&app, json!([[0, 1], [-1, 0]])).await;
    assert_eq!(start["v"], 1);
    assert_eq!(start["id"], 1);
    assert_eq!(start["variables"], json!(["x1", "x2"]));

    let (status, after) = call(&app, Method::POST, "/sessions/1/mutate", Some(json!({"k": 1}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(after["variables"][0], "x1^-1*x2 + x1^-1*y1");
    assert_eq!(after["C"], json!([[-1, 1], [0, 1]]));
    assert_eq!(after["G"], json!([[-1, 0], [1, 1]]));
    assert_eq!(after["f_polynomials"], json!(["y1 + 1", "1"]));
    assert_eq!(after["path"], json!([1]));

    let (_, history) = call(&app, Method::GET, "/sessions/1/history", None).await;
    assert_eq!(history["entries"][0]["k"], 1);
    assert_eq!(history["entries"][0]["fingerprint"], after["fingerprint"]);

    let (status, undone) = call(&app, Method::POST, "/sessions/1/undo", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(undone, start);

    let (status, err) = call(&app, Method::POST, "/sessions/1/undo", None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["error"]["code"], "empty_history");
    assert_eq!(err["v"], 1);
}

#[tokio::test]
async fn service_and_cli_payloads_agree() {
    let app = app();
    create(&app, json!([[0, 1], [-1, 0]])).await;
    let path = [1, 2, 1, 2, 2, 1];
    let mut view = Value::Null;
    for (i, &k) in path.iter().enumerate() {
        let (status, v) = call(&app, Method::POST, "/sessions/1/mutate", Some(json!({ "k": k }))).await;
        assert_eq!(status, StatusCode::OK);
        view = v;
        let cli = mutate_payload(&a2(), &path[..=i], &EngineOptions::default()).unwrap();
        assert_eq!(payload_of(&view), serde_json::to_value(&cli).unwrap());
    }
    let (_, got) = call(&app, Method::GET, "/sessions/1", None).await;
    assert_eq!(got, view);
}

#[tokio::test]
async fn sessions_are_isolated() {
    let app = app();
    create(&app, json!([[0, 1], [-1, 0]])).await;
    create(&app, json!([[0, 1], [-3, 0]])).await;
    let mut handles = Vec::new();
    for round in 0..6 {
        for id in [1, 2] {
            let app = app.clone();
            let k = if (round + id) % 2 == 0 { 1 } else { 2 };
            handles.push(tokio::spawn(async move {
                call(&app, Method::POST, &format!("/sessions/{id}/mutate"), Some(json!({ "k": k }))).await
            }));
        }
    }
    for h in handles {
        assert_eq!(h.await.unwrap().0, StatusCode::OK);
    }
    for (id, b) in [(1, a2()), (2, IntMatrix::from_rows(&[[0i64, 1], [-3, 0]]).unwrap())] {
        let (_, history) = call(&app, Method::GET, &format!("/sessions/{id}/history"), None).await;
        let path: Vec<usize> = history["entries"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["k"].as_u64().unwrap() as usize)
            .collect();
        assert_eq!(path.len(), 6);
        let (_, view) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
        let replayed = mutate_payload(&b, &path, &EngineOptions::default()).unwrap();
        assert_eq!(payload_of(&view), serde_json::to_value(&replayed).unwrap());
    }
}

#[tokio::test]
async fn verify_endpoint_runs_the_suite() {
    let app = app();
    create(&app, json!([[0, 1], [-1, 0]])).await;
    call(&app, Method::POST, "/sessions/1/mutate", Some(json!({"k": 2}))).await;
    let (status, report) = call(&app, Method::GET, "/sessions/1/verify?depth=12", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(report["v"], 1);
    assert_eq!(report["exploration"]["seeds"], 10);
    assert_eq!(report["summary"]["failed"], 0);

    let (status, err) = call(&app, Method::GET, "/sessions/1/verify?depth=99", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"]["code"], "bad_request");
    let (status, _) = call(&app, Method::GET, "/sessions/1/verify?depth=x", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn malformed_requests_get_structured_errors() {
    let app = app();
    let cases: Vec<(Method, &str, Option<Value>, StatusCode)> = vec![
        (Method::POST, "/sessions", Some(json!({"n": 2, "B": [[0, 1], [1, 0]]})), StatusCode::BAD_REQUEST),
        (Method::POST, "/sessions", Some(json!({"n": 3, "B": [[0, 1], [-1, 0]]})), StatusCode::BAD_REQUEST),
        (Method::POST, "/sessions", Some(json!("nonsense")), StatusCode::BAD_REQUEST),
        (Method::GET, "/sessions/7", None, StatusCode::NOT_FOUND),
        (Method::GET, "/sessions/abc", None, StatusCode::NOT_FOUND),
        (Method::GET, "/nowhere", None, StatusCode::NOT_FOUND),
        (Method::DELETE, "/sessions", None, StatusCode::METHOD_NOT_ALLOWED),
    ];
    for (method, uri, body, expected) in cases {
        let (status, err) = call(&app, method, uri, body).await;
        assert_eq!(status, expected, "{uri}");
        assert_eq!(err["v"], 1, "{uri}");
        assert!(err["error"]["message"].is_string(), "{uri}");
    }

    create(&app, json!([[0, 1], [-1, 0]])).await;
    for body in [json!({"k": 0}), json!({"k": 3}), json!({"direction": 1}), json!([1])] {
        let (status, err) = call(&app, Method::POST, "/sessions/1/mutate", Some(body.clone())).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert_eq!(err["error"]["code"], "bad_request");
    }
    let (_, view) = call(&app, Method::GET, "/sessions/1", None).await;
    assert_eq!(view["path"], json!([]));
}

#[tokio::test]
async fn snapshot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let opts = ServeOptions {
        snapshot: Some(dir.path().join("snap.json")),
        ..ServeOptions::default()
    };
    let state = AppState::new(opts.clone()).unwrap();
    let app = router(state.clone());
    create(&app, json!([[0, 1], [-2, 0]])).await;
    for k in [1, 2, 1] {
        call(&app, Method::POST, "/sessions/1/mutate", Some(json!({ "k": k }))).await;
    }
    let (_, before) = call(&app, Method::GET, "/sessions/1", None).await;
    state.save_snapshot().await.unwrap();

    let restored = router(AppState::new(opts).unwrap());
    let (_, after) = call(&restored, Method::GET, "/sessions/1", None).await;
    assert_eq!(after, before);
    let fresh = create(&restored, json!([[0, 1], [-1, 0]])).await;
    assert_eq!(fresh["id"], 2);
}

#[tokio::test]
async fn busy_port_is_an_error() {
    let taken = service::bind("127.0.0.1:0".parse().unwrap()).await.unwrap();
    let addr = taken.local_addr().unwrap();
    let err = service::bind(addr).await.unwrap_err();
    assert!(err.to_string().contains("port busy"), "{err}");
}

#[tokio::test]
async fn serves_over_tcp_and_snapshots_on_shutdown() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("snap.json");
    let listener = service::bind("127.0.0.1:0".parse().unwrap()).await.unwrap();
    let addr = listener.local_addr().unwrap();
    let (tx, rx) = tokio::sync::oneshot::channel::<()>();
    let opts = ServeOptions {
        snapshot: Some(snap.clone()),
        ..ServeOptions::default()
    };
    let server = tokio::spawn(service::serve(listener, opts, async {
        let _ = rx.await;
    }));

    let mut stream = tokio::net::TcpStream::connect(addr).await.unwrap();
    let body = r#"{"n":2,"B":[[0,1],[-1,0]]}"#;
    let req = format!(
        "POST /sessions HTTP/1.1\r\nhost: localhost\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
        body.len()
    );
    tokio::io::AsyncWriteExt::write_all(&mut stream, req.as_bytes()).await.unwrap();
    let mut resp = String::new();
    tokio::io::AsyncReadExt::read_to_string(&mut stream, &mut resp).await.unwrap();
    assert!(resp.starts_with("HTTP/1.1 201"), "{resp}");

    tx.send(()).unwrap();
    server.await.unwrap().unwrap();
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(snap).unwrap()).unwrap();
    assert_eq!(saved["sessions"][0]["B0"], json!([[0, 1], [-1, 0]]));
}
