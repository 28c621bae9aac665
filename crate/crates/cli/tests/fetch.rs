//! Remote fetching against an in-process HTTP stub.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use chrono::NaiveDate;
use slowdown_cli::fetch::{cache_path, fetch_remote, FetchConfig};
use slowdown_cli::PipelineError;

struct Stub {
    base: String,
    calls: Arc<AtomicUsize>,
    requests: Arc<Mutex<Vec<String>>>,
}

/// Serves `responses` in order (the last one repeats), one per connection.
fn stub(responses: Vec<(u16, String)>) -> Stub {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let calls = Arc::new(AtomicUsize::new(0));
    let requests = Arc::new(Mutex::new(Vec::new()));
    let (c, r) = (calls.clone(), requests.clone());
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { break };
            let k = c.fetch_add(1, Ordering::SeqCst);
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut head = String::new();
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
                    break;
                }
                head.push_str(&line);
            }
            r.lock().unwrap().push(head);
            let (status, body) = &responses[k.min(responses.len() - 1)];
            let reason = if *status == 200 { "OK" } else { "Error" };
            let _ = write!(
                stream,
                "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
        }
    });
    Stub { base, calls, requests }
}

fn day(i: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(2016, 1, 1).unwrap() + chrono::Duration::days(i as i64)
}

fn page(days: std::ops::Range<u32>, next: Option<u32>) -> String {
    let rows: Vec<String> =
        days.map(|i| format!(r#"{{"date":"{}","close":{}}}"#, day(i), 100.0 + i as f64)).collect();
    let next = next.map_or("null".to_string(), |n| n.to_string());
    format!(r#"{{"data":[{}],"next_page":{next}}}"#, rows.join(","))
}

fn config(base: &str) -> FetchConfig {
    let mut cfg = FetchConfig::new(base);
    cfg.base_delay = Duration::from_millis(5);
    cfg.timeout = Duration::from_secs(5);
    cfg
}

#[test]
fn ten_day_payload() {
    let s = stub(vec![(200, page(0..10, None))]);
    let mut cfg = config(&s.base);
    cfg.api_key = Some("secret".into());
    let series = fetch_remote("BTC", day(0), day(9), &cfg).unwrap();
    assert_eq!(series.len(), 10);
    assert_eq!(series.prices()[9], 109.0);
    let req = &s.requests.lock().unwrap()[0];
    assert!(req.starts_with("GET /v1/history?symbol=BTC&start=2016-01-01&end=2016-01-10&page=1 "), "{req}");
    assert!(req.to_ascii_lowercase().contains("x-api-key: secret"), "{req}");
}

#[test]
fn pages_are_followed() {
    let s = stub(vec![(200, page(0..4, Some(2))), (200, page(4..10, None))]);
    let series = fetch_remote("XRP", day(0), day(9), &config(&s.base)).unwrap();
    assert_eq!(series.len(), 10);
    assert_eq!(s.calls.load(Ordering::SeqCst), 2);
    assert!(s.requests.lock().unwrap()[1].contains("page=2"));
}

#[test]
fn rate_limit_then_success() {
    let s = stub(vec![(429, "{}".into()), (200, page(0..10, None))]);
    let series = fetch_remote("BTC", day(0), day(9), &config(&s.base)).unwrap();
    assert_eq!(series.len(), 10);
    assert_eq!(s.calls.load(Ordering::SeqCst), 2);
}

#[test]
fn persistent_rate_limit_gives_up_after_five_attempts() {
    let s = stub(vec![(429, "{}".into())]);
    let err = fetch_remote("BTC", day(0), day(9), &config(&s.base)).unwrap_err();
    assert!(matches!(err, PipelineError::RateLimited { attempts: 5, .. }), "{err}");
    assert_eq!(s.calls.load(Ordering::SeqCst), 5);
}

#[test]
fn http_error_surfaces_status() {
    let s = stub(vec![(503, "down".into())]);
    let err = fetch_remote("BTC", day(0), day(9), &config(&s.base)).unwrap_err();
    assert!(matches!(err, PipelineError::Http { status: 503, .. }), "{err}");
    assert!(err.to_string().contains("503"));
}

#[test]
fn missing_field_is_schema_error() {
    let s = stub(vec![(200, r#"{"data":[{"date":"2016-01-01"}]}"#.into())]);
    let err = fetch_remote("BTC", day(0), day(0), &config(&s.base)).unwrap_err();
    assert!(matches!(err, PipelineError::Schema(_)), "{err}");
}

#[test]
fn cache_hit_makes_no_calls() {
    let dir = tempfile::tempdir().unwrap();
    let s = stub(vec![(200, page(0..10, None))]);
    let mut cfg = config(&s.base);
    cfg.cache_dir = Some(dir.path().to_path_buf());
    let first = fetch_remote("LTC", day(0), day(9), &cfg).unwrap();
    assert_eq!(s.calls.load(Ordering::SeqCst), 1);
    assert!(cache_path(dir.path(), "LTC", day(0), day(9)).exists());
    let second = fetch_remote("LTC", day(0), day(9), &cfg).unwrap();
    assert_eq!(s.calls.load(Ordering::SeqCst), 1);
    assert_eq!(first, second);
    // A different range is a different cache entry.
    fetch_remote("LTC", day(0), day(4), &cfg).unwrap();
    assert_eq!(s.calls.load(Ordering::SeqCst), 2);
}

#[test]
fn analyze_falls_back_to_remote_for_missing_files() {
    use slowdown_cli::analyze::{run_analyze, AssetStatus};
    use slowdown_cli::config::AnalysisSettings;

    let n = 300;
    let rows: Vec<String> = (0..n)
        .map(|i| {
            let wiggle = ((i * 7919) % 97) as f64 / 97.0 - 0.5;
            format!(r#"{{"date":"{}","close":{}}}"#, day(i), (4.0 + 0.002 * i as f64 + 0.05 * wiggle).exp())
        })
        .collect();
    let s = stub(vec![(200, format!(r#"{{"data":[{}]}}"#, rows.join(",")))]);
    let cache = tempfile::tempdir().unwrap();
    let empty = tempfile::tempdir().unwrap();
    let mut cfg = config(&s.base);
    cfg.cache_dir = Some(cache.path().to_path_buf());
    let settings: AnalysisSettings = serde_json::from_value(serde_json::json!({
        "assets": ["REMOTE"], "from": day(0), "to": day(n - 1), "windows": [60]
    }))
    .unwrap();

    let a = run_analyze(&settings, empty.path(), Some(&cfg)).unwrap();
    let r = &a.report.assets[0];
    assert_ne!(r.status, AssetStatus::Failed, "{:?}", r.reason);
    assert_eq!(a.report.provenance.inputs["REMOTE"].n_points, n as usize);
    assert_eq!(a.report.provenance.inputs["REMOTE"].source, s.base);
    assert_eq!(s.calls.load(Ordering::SeqCst), 1);
    let again = run_analyze(&settings, empty.path(), Some(&cfg)).unwrap();
    assert_eq!(s.calls.load(Ordering::SeqCst), 1);
    assert_eq!(again.report, a.report);
}
