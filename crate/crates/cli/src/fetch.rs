//! Paged HTTP client for daily closes, with an on-disk cache.
//!
//! Wire format: `GET {base}/v1/history?symbol=BTC&start=2016-01-01&end=2018-03-31&page=1`
//! answered by `{"data": [{"date": "2016-01-01", "close": 434.33}, ...], "next_page": 2}`;
//! `next_page` is `null` (or absent) on the last page. An API key, when set,
//! is sent as `X-API-Key`.

use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::NaiveDate;
use serde::Deserialize;
use slowdown_core::PriceSeries;

use crate::error::{io_err, PipelineError, Result};
use crate::load::{parse_csv, to_csv, GapPolicy};

pub const ENV_API_BASE: &str = "SLOWDOWN_API_BASE";
pub const ENV_API_KEY: &str = "SLOWDOWN_API_KEY";
pub const ENV_CACHE_DIR: &str = "SLOWDOWN_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct FetchConfig {
    pub base_url: String,
    pub api_key: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub max_attempts: u32,
    /// First backoff after a 429; doubled on each further retry.
    pub base_delay: Duration,
    pub timeout: Duration,
}

impl FetchConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into().trim_end_matches('/').to_owned(),
            api_key: None,
            cache_dir: None,
            max_attempts: 5,
            base_delay: Duration::from_millis(500),
            timeout: Duration::from_secs(30),
        }
    }

    /// Built from the environment; `None` when no base URL is set.
    pub fn from_env() -> Option<Self> {
        let base = std::env::var(ENV_API_BASE).ok().filter(|s| !s.is_empty())?;
        let mut cfg = Self::new(base);
        cfg.api_key = std::env::var(ENV_API_KEY).ok().filter(|s| !s.is_empty());
        cfg.cache_dir = std::env::var_os(ENV_CACHE_DIR).map(PathBuf::from);
        Some(cfg)
    }
}

#[derive(Debug, Deserialize)]
struct Page {
    data: Vec<Row>,
    #[serde(default)]
    next_page: Option<u32>,
}

#[derive(Debug, Deserialize)]
struct Row {
    date: NaiveDate,
    close: f64,
}

pub fn cache_path(dir: &Path, asset: &str, from: NaiveDate, to: NaiveDate) -> PathBuf {
    dir.join(format!("{asset}_{from}_{to}.csv"))
}

/// Daily closes for `asset` over `[from, to]`. A cached copy is used when
/// present; otherwise the endpoint is paged through and the result cached.
pub fn fetch_remote(asset: &str, from: NaiveDate, to: NaiveDate, cfg: &FetchConfig) -> Result<PriceSeries> {
    let cached = cfg.cache_dir.as_deref().map(|d| cache_path(d, asset, from, to));
    if let Some(path) = cached.as_deref().filter(|p| p.exists()) {
        let bytes = std::fs::read(path).map_err(io_err(path))?;
        return Ok(parse_csv(&bytes, path, asset, GapPolicy::Error)?.series);
    }

    let agent = ureq::AgentBuilder::new().timeout(cfg.timeout).build();
    let mut text = String::from("date,close\n");
    let mut page = 1;
    loop {
        let url = format!("{}/v1/history?symbol={asset}&start={from}&end={to}&page={page}", cfg.base_url);
        let body = get_with_retry(&agent, &url, cfg)?;
        let parsed: Page = serde_json::from_str(&body).map_err(|e| PipelineError::Schema(format!("{url}: {e}")))?;
        for row in parsed.data.iter().filter(|r| r.date >= from && r.date <= to) {
            text.push_str(&format!("{},{}\n", row.date, row.close));
        }
        match parsed.next_page {
            Some(next) if next > page => page = next,
            Some(next) => return Err(PipelineError::Schema(format!("{url}: next_page {next} does not advance"))),
            None => break,
        }
    }

    let source = PathBuf::from(&cfg.base_url);
    let series = parse_csv(text.as_bytes(), &source, asset, GapPolicy::Error)?.series;
    if let Some(path) = cached {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        std::fs::write(&path, to_csv(&series)).map_err(io_err(&path))?;
    }
    Ok(series)
}

fn get_with_retry(agent: &ureq::Agent, url: &str, cfg: &FetchConfig) -> Result<String> {
    let mut delay = cfg.base_delay;
    for attempt in 1..=cfg.max_attempts.max(1) {
        let mut req = agent.get(url);
        if let Some(key) = &cfg.api_key {
            req = req.set("X-API-Key", key);
        }
        match req.call() {
            Ok(resp) => {
                return resp
                    .into_string()
                    .map_err(|e| PipelineError::Transport { url: url.to_owned(), message: e.to_string() })
            }
            Err(ureq::Error::Status(429, _)) => {
                if attempt < cfg.max_attempts {
                    std::thread::sleep(delay);
                    delay *= 2;
                }
            }
            Err(ureq::Error::Status(status, _)) => return Err(PipelineError::Http { status, url: url.to_owned() }),
            Err(e) => return Err(PipelineError::Transport { url: url.to_owned(), message: e.to_string() }),
        }
    }
    Err(PipelineError::RateLimited { url: url.to_owned(), attempts: cfg.max_attempts.max(1) })
}
