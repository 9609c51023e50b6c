//! Page fetching: a `Fetcher` trait with a live HTTP client, an offline
//! fixture-directory reader, and composable throttling/retry wrappers.
//!
//! All tests and reproducible runs use [`FixtureFetcher`]; the HTTP client
//! exists for real crawls and is kept deliberately thin.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchedPage {
    pub url: String,
    pub body: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FetchError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("rate limited: {0}")]
    RateLimited(String),
    #[error("network error fetching {url}: {reason}")]
    Network { url: String, reason: String },
}

pub trait Fetcher: Send + Sync {
    fn fetch(&self, url: &str) -> Result<FetchedPage, FetchError>;
}

/// Time source abstraction so politeness and backoff are testable without
/// real sleeps.
pub trait Clock: Send + Sync {
    fn now_ms(&self) -> u64;
    fn sleep_ms(&self, ms: u64);
}

impl<C: Clock + ?Sized> Clock for &C {
    fn now_ms(&self) -> u64 {
        (**self).now_ms()
    }

    fn sleep_ms(&self, ms: u64) {
        (**self).sleep_ms(ms)
    }
}

pub struct SystemClock {
    start: Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        SystemClock {
            start: Instant::now(),
        }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }

    fn sleep_ms(&self, ms: u64) {
        std::thread::sleep(Duration::from_millis(ms));
    }
}

/// A clock that only moves when slept on. Sleeping is the only way time
/// passes, which makes gap assertions exact.
pub struct FakeClock {
    now: Mutex<u64>,
}

impl FakeClock {
    pub fn new() -> Self {
        FakeClock { now: Mutex::new(0) }
    }
}

impl Default for FakeClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for FakeClock {
    fn now_ms(&self) -> u64 {
        *self.now.lock().unwrap()
    }

    fn sleep_ms(&self, ms: u64) {
        *self.now.lock().unwrap() += ms;
    }
}

/// Enforces a minimum gap between consecutive acquisitions, globally across
/// threads (the lock is held while sleeping).
pub struct RateLimiter<C: Clock> {
    min_gap_ms: u64,
    clock: C,
    last: Mutex<Option<u64>>,
}

impl<C: Clock> RateLimiter<C> {
    pub fn new(clock: C, min_gap_ms: u64) -> Self {
        RateLimiter {
            min_gap_ms,
            clock,
            last: Mutex::new(None),
        }
    }

    pub fn acquire(&self) {
        let mut last = self.last.lock().unwrap();
        if let Some(prev) = *last {
            let due = prev + self.min_gap_ms;
            let now = self.clock.now_ms();
            if due > now {
                self.clock.sleep_ms(due - now);
            }
        }
        *last = Some(self.clock.now_ms());
    }
}

/// Applies a [`RateLimiter`] in front of any fetcher.
pub struct ThrottledFetcher<F, C: Clock> {
    inner: F,
    limiter: RateLimiter<C>,
}

impl<F: Fetcher, C: Clock> ThrottledFetcher<F, C> {
    pub fn new(inner: F, clock: C, min_gap_ms: u64) -> Self {
        ThrottledFetcher {
            inner,
            limiter: RateLimiter::new(clock, min_gap_ms),
        }
    }
}

impl<F: Fetcher, C: Clock> Fetcher for ThrottledFetcher<F, C> {
    fn fetch(&self, url: &str) -> Result<FetchedPage, FetchError> {
        self.limiter.acquire();
        self.inner.fetch(url)
    }
}

/// Retries rate-limited requests with exponential backoff (base 2s doubling,
/// 3 retries by default).
pub struct RetryingFetcher<F, C: Clock> {
    inner: F,
    clock: C,
    max_retries: u32,
    base_backoff_ms: u64,
}

pub const DEFAULT_BACKOFF_MS: u64 = 2_000;
pub const DEFAULT_MAX_RETRIES: u32 = 3;

impl<F: Fetcher, C: Clock> RetryingFetcher<F, C> {
    pub fn new(inner: F, clock: C) -> Self {
        RetryingFetcher {
            inner,
            clock,
            max_retries: DEFAULT_MAX_RETRIES,
            base_backoff_ms: DEFAULT_BACKOFF_MS,
        }
    }

    pub fn with_policy(inner: F, clock: C, max_retries: u32, base_backoff_ms: u64) -> Self {
        RetryingFetcher {
            inner,
            clock,
            max_retries,
            base_backoff_ms,
        }
    }
}

impl<F: Fetcher, C: Clock> Fetcher for RetryingFetcher<F, C> {
    fn fetch(&self, url: &str) -> Result<FetchedPage, FetchError> {
        let mut attempt = 0;
        loop {
            match self.inner.fetch(url) {
                Err(FetchError::RateLimited(_)) if attempt < self.max_retries => {
                    self.clock.sleep_ms(self.base_backoff_ms << attempt);
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}

/// In-memory url-to-body fetcher; unknown URLs are `NotFound`.
#[derive(Debug, Default)]
pub struct MemoryFetcher {
    pages: BTreeMap<String, String>,
}

impl MemoryFetcher {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, url: impl Into<String>, body: impl Into<String>) {
        self.pages.insert(url.into(), body.into());
    }

    pub fn from_pairs<U: Into<String>, B: Into<String>>(
        pairs: impl IntoIterator<Item = (U, B)>,
    ) -> Self {
        MemoryFetcher {
            pages: pairs
                .into_iter()
                .map(|(u, b)| (u.into(), b.into()))
                .collect(),
        }
    }
}

impl Fetcher for MemoryFetcher {
    fn fetch(&self, url: &str) -> Result<FetchedPage, FetchError> {
        self.pages
            .get(url)
            .map(|body| FetchedPage {
                url: url.to_string(),
                body: body.clone(),
            })
            .ok_or_else(|| FetchError::NotFound(url.to_string()))
    }
}

enum FixtureTarget {
    File(PathBuf),
    Redirect(String),
}

/// Serves pages from disk via a manifest of `url<TAB>relative_path` lines
/// (blank lines and `#` comments allowed), paths relative to the manifest.
/// A value of `-><other_url>` declares a redirect, mirroring how the
/// `ISO_639:` search URLs resolve to article URLs on the live site; the
/// fetched page then reports the final URL.
pub struct FixtureFetcher {
    pages: BTreeMap<String, FixtureTarget>,
}

const MAX_REDIRECTS: usize = 5;

impl FixtureFetcher {
    pub fn from_manifest(manifest: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(manifest)?;
        let root = manifest.parent().unwrap_or(Path::new(".")).to_path_buf();
        let mut pages = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (url, value) = line.split_once('\t').ok_or_else(|| {
                io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("manifest line {}: expected `url<TAB>path`", i + 1),
                )
            })?;
            let target = match value.trim().strip_prefix("->") {
                Some(redirect) => FixtureTarget::Redirect(redirect.trim().to_string()),
                None => FixtureTarget::File(root.join(value.trim())),
            };
            pages.insert(url.trim().to_string(), target);
        }
        Ok(FixtureFetcher { pages })
    }
}

impl Fetcher for FixtureFetcher {
    fn fetch(&self, url: &str) -> Result<FetchedPage, FetchError> {
        let mut current = url.to_string();
        for _ in 0..=MAX_REDIRECTS {
            match self.pages.get(&current) {
                None => return Err(FetchError::NotFound(current)),
                Some(FixtureTarget::Redirect(next)) => current = next.clone(),
                Some(FixtureTarget::File(path)) => {
                    let body = fs::read_to_string(path).map_err(|err| FetchError::Network {
                        url: current.clone(),
                        reason: err.to_string(),
                    })?;
                    return Ok(FetchedPage { url: current, body });
                }
            }
        }
        Err(FetchError::Network {
            url: url.to_string(),
            reason: "too many fixture redirects".to_string(),
        })
    }
}

/// Plain blocking HTTP GET client. Maps 404/410 to `NotFound` and 429/503 to
/// `RateLimited` so the retry wrapper can do its job.
pub struct HttpFetcher {
    agent: ureq::Agent,
    user_agent: String,
}

impl HttpFetcher {
    pub fn new(user_agent: impl Into<String>) -> Self {
        HttpFetcher {
            agent: ureq::AgentBuilder::new()
                .timeout(Duration::from_secs(30))
                .build(),
            user_agent: user_agent.into(),
        }
    }
}

impl Fetcher for HttpFetcher {
    fn fetch(&self, url: &str) -> Result<FetchedPage, FetchError> {
        let response = self
            .agent
            .get(url)
            .set("User-Agent", &self.user_agent)
            .call();
        match response {
            Ok(resp) => {
                let final_url = resp.get_url().to_string();
                let body = resp.into_string().map_err(|err| FetchError::Network {
                    url: url.to_string(),
                    reason: err.to_string(),
                })?;
                Ok(FetchedPage {
                    url: final_url,
                    body,
                })
            }
            Err(ureq::Error::Status(404 | 410, _)) => Err(FetchError::NotFound(url.to_string())),
            Err(ureq::Error::Status(429 | 503, _)) => {
                Err(FetchError::RateLimited(url.to_string()))
            }
            Err(err) => Err(FetchError::Network {
                url: url.to_string(),
                reason: err.to_string(),
            }),
        }
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Records the clock time of every fetch; scripted responses per call.
    pub struct RecordingFetcher<'a, C: Clock> {
        pub clock: &'a C,
        pub times: Mutex<Vec<u64>>,
        pub script: Mutex<Vec<Result<FetchedPage, FetchError>>>,
    }

    impl<'a, C: Clock> RecordingFetcher<'a, C> {
        pub fn ok_pages(clock: &'a C, n: usize) -> Self {
            let page = FetchedPage {
                url: "https://example.org".to_string(),
                body: "ok".to_string(),
            };
            RecordingFetcher {
                clock,
                times: Mutex::new(Vec::new()),
                script: Mutex::new(vec![Ok(page); n]),
            }
        }

        pub fn scripted(clock: &'a C, script: Vec<Result<FetchedPage, FetchError>>) -> Self {
            RecordingFetcher {
                clock,
                times: Mutex::new(Vec::new()),
                script: Mutex::new(script),
            }
        }
    }

    impl<C: Clock> Fetcher for RecordingFetcher<'_, C> {
        fn fetch(&self, _url: &str) -> Result<FetchedPage, FetchError> {
            self.times.lock().unwrap().push(self.clock.now_ms());
            let mut script = self.script.lock().unwrap();
            if script.is_empty() {
                Err(FetchError::NotFound("script exhausted".to_string()))
            } else {
                script.remove(0)
            }
        }
    }
}
