//! The `/translate` client against a local server.

use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use mtlens::translation::{
    translate, BatchLimits, DecodingSpec, HttpBackend, TranslationBackend, TranslationError,
    TranslationRequest,
};
use serde_json::{json, Value};
use tiny_http::{Header, Response, Server};

#[derive(Clone, Copy)]
enum Behaviour {
    Upper,
    DropLast,
    Status(u16),
    Garbage,
    Slow,
}

struct TestServer {
    endpoint: String,
    seen: Arc<Mutex<Vec<Value>>>,
}

fn serve(behaviour: Behaviour) -> TestServer {
    let server = Server::http("127.0.0.1:0").unwrap();
    let endpoint = format!("http://{}", server.server_addr().to_ip().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&seen);
    thread::spawn(move || {
        for mut req in server.incoming_requests() {
            let mut body = String::new();
            req.as_reader().read_to_string(&mut body).unwrap();
            let path_ok = req.url() == "/translate" && req.method().as_str() == "POST";
            let parsed: Value = serde_json::from_str(&body).unwrap_or(Value::Null);
            log.lock().unwrap().push(parsed.clone());
            let json_header = Header::from_bytes("Content-Type", "application/json").unwrap();
            let texts: Vec<String> = parsed["texts"]
                .as_array()
                .map(|a| a.iter().map(|t| t.as_str().unwrap().to_string()).collect())
                .unwrap_or_default();
            let reply = |translations: Vec<String>| {
                Response::from_string(json!({ "translations": translations }).to_string())
                    .with_header(json_header.clone())
            };
            let response = match behaviour {
                _ if !path_ok => Response::from_string("not found").with_status_code(404),
                Behaviour::Upper => reply(texts.iter().map(|t| t.to_uppercase()).collect()),
                Behaviour::DropLast => reply(texts[..texts.len() - 1].to_vec()),
                Behaviour::Status(code) => Response::from_string("nope").with_status_code(code),
                Behaviour::Garbage => Response::from_string("{\"oops\": 1}"),
                Behaviour::Slow => {
                    thread::sleep(Duration::from_millis(1500));
                    reply(texts)
                }
            };
            let _ = req.respond(response);
        }
    });
    TestServer { endpoint, seen }
}

fn backend(endpoint: &str, max_batch: usize) -> HttpBackend {
    HttpBackend::new(
        endpoint,
        Duration::from_secs(5),
        BatchLimits {
            max_batch,
            max_in_flight: 3,
        },
    )
}

fn texts(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("question {i}?")).collect()
}

#[test]
fn order_and_length_preserved_across_batches() {
    let server = serve(Behaviour::Upper);
    let b = backend(&server.endpoint, 4);
    let input = texts(10);
    let spec = DecodingSpec::roundtrip_backward();
    let out = translate(&b, &input, "en", "de", &spec).unwrap();
    let expected: Vec<String> = input.iter().map(|t| t.to_uppercase()).collect();
    assert_eq!(out, expected);

    let seen = server.seen.lock().unwrap();
    let mut sizes: Vec<usize> = seen
        .iter()
        .map(|r| r["texts"].as_array().unwrap().len())
        .collect();
    sizes.sort_unstable();
    assert_eq!(sizes, [2, 4, 4]);
    let req: TranslationRequest = serde_json::from_value(seen[0].clone()).unwrap();
    assert_eq!((req.source.as_str(), req.target.as_str()), ("en", "de"));
    assert_eq!(req.decoding, spec);
    assert_eq!(
        seen[0]["decoding"]["strategy"],
        json!({"kind": "beam", "size": 5})
    );
    assert_eq!(seen[0]["decoding"]["no_repeat_ngram"], 5);
}

#[test]
fn empty_strings_skip_the_wire() {
    let server = serve(Behaviour::Upper);
    let b = backend(&server.endpoint, 8);
    let input = vec!["a".to_string(), String::new(), "b".to_string()];
    let out = translate(&b, &input, "en", "de", &DecodingSpec::translate_test()).unwrap();
    assert_eq!(out, ["A", "", "B"]);
    assert_eq!(server.seen.lock().unwrap()[0]["texts"], json!(["a", "b"]));
}

fn error_for(behaviour: Behaviour) -> TranslationError {
    let server = serve(behaviour);
    let b = HttpBackend::new(
        &server.endpoint,
        Duration::from_millis(500),
        BatchLimits::default(),
    );
    translate(&b, &texts(3), "en", "ko", &DecodingSpec::translate_test()).unwrap_err()
}

#[test]
fn error_mapping() {
    assert_eq!(
        error_for(Behaviour::DropLast).name(),
        "BackendProtocolError"
    );
    assert_eq!(
        error_for(Behaviour::Status(500)).name(),
        "BackendProtocolError"
    );
    assert_eq!(
        error_for(Behaviour::Status(422)).name(),
        "BackendProtocolError"
    );
    assert_eq!(error_for(Behaviour::Garbage).name(), "BackendProtocolError");
    assert_eq!(error_for(Behaviour::Slow).name(), "Timeout");
}

#[test]
fn unreachable_endpoint() {
    // Bind then drop to get a port nobody listens on.
    let port = std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let b = backend(&format!("http://127.0.0.1:{port}"), 4);
    let err = translate(&b, &texts(1), "en", "de", &DecodingSpec::translate_test()).unwrap_err();
    assert_eq!(err.name(), "BackendUnavailable");
    assert_eq!(b.id(), format!("http://127.0.0.1:{port}"));
}
