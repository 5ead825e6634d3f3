use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use graphlin::{Labeling, LinearizationSpec, Method, Model, PromptRecord, Shots, TaskKind};
use graphlin_gateway::{
    Backend, Completion, Gateway, GatewayError, HttpBackend, ModelConfig, PerfectOracle, ResponseCache, RetryPolicy,
};

/// Serves canned `(status, body)` replies in order, repeating the last one.
/// Returns the URL and the captured request bodies and headers.
fn serve(replies: Vec<(u16, String)>) -> (String, Arc<Mutex<Vec<(String, String)>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&seen);
    thread::spawn(move || {
        for (i, stream) in listener.incoming().enumerate() {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut headers = String::new();
            let mut len = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                headers.push_str(&line);
            }
            let mut body = vec![0; len];
            reader.read_exact(&mut body).unwrap();
            log.lock().unwrap().push((headers, String::from_utf8(body).unwrap()));
            let (status, reply) = &replies[i.min(replies.len() - 1)];
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
                reply.len()
            )
            .unwrap();
        }
    });
    (url, seen)
}

fn ok_body(text: &str) -> String {
    serde_json::json!({
        "choices": [{"message": {"role": "assistant", "content": text}}],
        "usage": {"prompt_tokens": 12, "completion_tokens": 1}
    })
    .to_string()
}

fn config(url: &str) -> ModelConfig {
    ModelConfig {
        endpoint: url.into(),
        model: "test-model".into(),
        retry: RetryPolicy {
            max_retries: 2,
            initial_backoff_ms: 1,
            multiplier: 2.0,
            max_backoff_ms: 5,
        },
        timeout_secs: 10,
        ..ModelConfig::default()
    }
}

fn prompt(i: usize, task: TaskKind) -> PromptRecord {
    PromptRecord {
        record_id: format!("r{i}"),
        task,
        shots: Shots::Zero,
        spec: LinearizationSpec::new("pagerank".parse::<Method>().unwrap(), Labeling::RandomLabels, 1),
        exemplar_ref: None,
        text: format!("question {i}"),
        token_estimate: 150,
        answer: i.to_string(),
    }
}

#[test]
fn request_shape_and_response_parsing() {
    let (url, seen) = serve(vec![(200, ok_body("The answer is 4"))]);
    let backend = HttpBackend::new(config(&url)).unwrap();
    let c = backend.complete(&prompt(0, TaskKind::Diameter), 16).unwrap();
    assert_eq!(c.text, "The answer is 4");
    assert_eq!(c.prompt_tokens, Some(12));
    let (_, body) = &seen.lock().unwrap()[0];
    let v: serde_json::Value = serde_json::from_str(body).unwrap();
    assert_eq!(v["model"], "test-model");
    assert_eq!(v["messages"][0]["role"], "user");
    assert_eq!(v["messages"][0]["content"], "question 0");
    assert_eq!(v["temperature"], 1e-3);
    assert_eq!(v["top_p"], 0.1);
    assert_eq!(v["max_tokens"], 16);
    assert!(v.get("top_k").is_none());
}

#[test]
fn retries_server_errors_then_succeeds() {
    let (url, seen) = serve(vec![(503, "busy".into()), (500, "oops".into()), (200, ok_body("yes"))]);
    let c = HttpBackend::new(config(&url)).unwrap().complete(&prompt(0, TaskKind::EdgeExistence), 128).unwrap();
    assert_eq!(c.text, "yes");
    assert_eq!(seen.lock().unwrap().len(), 3);
}

#[test]
fn rate_limit_exhausts_retries() {
    let (url, seen) = serve(vec![(429, "slow down".into())]);
    let err = HttpBackend::new(config(&url)).unwrap().complete(&prompt(0, TaskKind::Diameter), 16).unwrap_err();
    assert_eq!(err, GatewayError::RateLimited { attempts: 3 });
    assert_eq!(seen.lock().unwrap().len(), 3);
}

#[test]
fn client_errors_and_bad_bodies_are_not_retried() {
    let (url, seen) = serve(vec![(400, "bad request".into())]);
    let err = HttpBackend::new(config(&url)).unwrap().complete(&prompt(0, TaskKind::Diameter), 16).unwrap_err();
    assert!(matches!(err, GatewayError::Status { status: 400, .. }));
    assert_eq!(seen.lock().unwrap().len(), 1);

    let (url, seen) = serve(vec![(200, "{not json".into())]);
    let err = HttpBackend::new(config(&url)).unwrap().complete(&prompt(0, TaskKind::Diameter), 16).unwrap_err();
    assert!(matches!(err, GatewayError::Decode(_)));
    assert_eq!(seen.lock().unwrap().len(), 1);
}

#[test]
fn bearer_token_comes_from_the_environment() {
    std::env::set_var("GRAPHLIN_GATEWAY_TEST_KEY", "s3cret");
    let (url, seen) = serve(vec![(200, ok_body("1"))]);
    let cfg = ModelConfig {
        api_key_env: Some("GRAPHLIN_GATEWAY_TEST_KEY".into()),
        ..config(&url)
    };
    HttpBackend::new(cfg).unwrap().complete(&prompt(0, TaskKind::Diameter), 16).unwrap();
    let (headers, _) = &seen.lock().unwrap()[0];
    assert!(headers.to_ascii_lowercase().contains("authorization: bearer s3cret"));
}

#[test]
fn unreachable_endpoint_is_a_transport_error() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let cfg = config(&format!("http://127.0.0.1:{port}/v1/chat/completions"));
    let err = HttpBackend::new(cfg).unwrap().complete(&prompt(0, TaskKind::Diameter), 16).unwrap_err();
    assert!(matches!(err, GatewayError::Transport(_)));
}

/// Counts calls and sleeps briefly so requests overlap.
struct Slow {
    calls: AtomicUsize,
}

impl Backend for Slow {
    fn id(&self) -> String {
        "slow".into()
    }
    fn complete(&self, p: &PromptRecord, _: usize) -> Result<Completion, GatewayError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        thread::sleep(Duration::from_millis(5));
        Ok(Completion::text(p.answer.clone()))
    }
}

#[test]
fn pool_bounds_concurrency_and_keeps_order() {
    let cfg = ModelConfig {
        parallelism: 3,
        ..ModelConfig::default()
    };
    let gw = Gateway::new(Slow { calls: AtomicUsize::new(0) }, cfg).unwrap();
    let prompts: Vec<_> = (0..40).map(|i| prompt(i, TaskKind::NodeCounting)).collect();
    let out = gw.complete_all(&prompts);
    let texts: Vec<String> = out.into_iter().map(|r| r.unwrap().text).collect();
    assert_eq!(texts, (0..40).map(|i| i.to_string()).collect::<Vec<_>>());
    let max = gw.stats().max_in_flight.load(Ordering::SeqCst);
    assert!((1..=3).contains(&max), "max in flight {max}");
}

#[test]
fn cached_rerun_makes_no_backend_calls() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("responses.jsonl");
    let prompts: Vec<_> = (0..10).map(|i| prompt(i, TaskKind::MaxDegree)).collect();

    let first = Gateway::new(Slow { calls: AtomicUsize::new(0) }, ModelConfig::default())
        .unwrap()
        .with_cache(ResponseCache::open(&path).unwrap());
    let a: Vec<String> = first.complete_all(&prompts).into_iter().map(|r| r.unwrap().text).collect();
    assert_eq!(first.stats().backend_calls.load(Ordering::SeqCst), 10);

    let second = Gateway::new(Slow { calls: AtomicUsize::new(0) }, ModelConfig::default())
        .unwrap()
        .with_cache(ResponseCache::open(&path).unwrap());
    let out = second.complete_all(&prompts);
    assert!(out.iter().all(|r| r.as_ref().unwrap().cached));
    let b: Vec<String> = out.into_iter().map(|r| r.unwrap().text).collect();
    assert_eq!(a, b);
    assert_eq!(second.stats().backend_calls.load(Ordering::SeqCst), 0);
}

#[test]
fn oversized_prompts_are_refused_before_any_call() {
    let cfg = ModelConfig {
        context_window: 200,
        ..ModelConfig::default()
    };
    let gw = Gateway::new(PerfectOracle, cfg).unwrap();
    let mut big = prompt(0, TaskKind::Diameter);
    big.token_estimate = 100;
    let err = gw.complete_one(&big).unwrap_err();
    assert_eq!(err, GatewayError::ContextOverflow { needed: 228, window: 200 });
    assert_eq!(gw.stats().backend_calls.load(Ordering::SeqCst), 0);
    big.token_estimate = 72;
    assert!(gw.complete_one(&big).is_ok());
}
