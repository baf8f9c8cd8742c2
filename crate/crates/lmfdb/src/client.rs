use crate::cache::{CacheEntry, FactCache};
use crate::{FieldFact, LmfdbError, LmfdbRecord, Query, Source, FIELDS};
use chrono::Utc;
use serde::Deserialize;
use std::sync::{Mutex, RwLock};
use std::time::{Duration, Instant};

pub const DEFAULT_BASE_URL: &str = "https://www.lmfdb.org";
/// Any non-empty value other than "0" or "false" forces offline mode.
pub const OFFLINE_ENV: &str = "PGEO_LMFDB_OFFLINE";
/// Minimum spacing between two remote calls.
pub const MIN_INTERVAL: Duration = Duration::from_secs(1);

pub fn offline_requested(value: Option<&str>) -> bool {
    match value.map(str::trim) {
        None | Some("") => false,
        Some(v) => !(v == "0" || v.eq_ignore_ascii_case("false")),
    }
}

#[derive(Clone, Debug)]
pub struct ClientConfig {
    pub base_url: String,
    pub user_agent: String,
    pub offline: bool,
    pub timeout: Duration,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            base_url: DEFAULT_BASE_URL.into(),
            user_agent: format!("pgeo-lmfdb/{} (cubic field invariant cross-check)", env!("CARGO_PKG_VERSION")),
            offline: false,
            timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Deserialize)]
struct ApiPage {
    data: Vec<serde_json::Value>,
}

/// One request in flight at a time; the cache is shared and safe to read from
/// several threads, with writes serialized behind the lock.
pub struct Client {
    config: ClientConfig,
    offline: bool,
    agent: ureq::Agent,
    cache: RwLock<FactCache>,
    last_call: Mutex<Option<Instant>>,
}

impl Client {
    pub fn new(config: ClientConfig, cache: FactCache) -> Self {
        let offline = config.offline || offline_requested(std::env::var(OFFLINE_ENV).ok().as_deref());
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .user_agent(config.user_agent.as_str())
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Client { config, offline, agent, cache: RwLock::new(cache), last_call: Mutex::new(None) }
    }

    pub fn is_offline(&self) -> bool {
        self.offline
    }

    pub fn cache_len(&self) -> usize {
        self.cache.read().unwrap().len()
    }

    /// The unique field matching `q`.
    pub fn fetch_field(&self, q: &Query) -> Result<FieldFact, LmfdbError> {
        let mut all = self.fetch_all(q)?;
        match all.len() {
            0 => Err(LmfdbError::NotFound(q.clone())),
            1 => Ok(all.pop().unwrap()),
            _ => Err(LmfdbError::Ambiguous { query: q.clone(), labels: all.into_iter().map(|f| f.label).collect() }),
        }
    }

    /// Every field matching `q`, possibly none.
    pub fn fetch_all(&self, q: &Query) -> Result<Vec<FieldFact>, LmfdbError> {
        if let Some(hit) = self.cached(q) {
            return Ok(hit);
        }
        if self.offline {
            return Err(LmfdbError::NetworkUnavailable { query: q.clone(), reason: "offline mode".into() });
        }
        let mut last = self.last_call.lock().unwrap();
        // someone else may have fetched it while we waited for the lock
        if let Some(hit) = self.cached(q) {
            return Ok(hit);
        }
        if let Some(t) = *last {
            let since = t.elapsed();
            if since < MIN_INTERVAL {
                std::thread::sleep(MIN_INTERVAL - since);
            }
        }
        *last = Some(Instant::now());
        let records = self.remote(q);
        drop(last);
        let records = records?;
        let entry = CacheEntry { fetched_at: Utc::now(), fields: records };
        let facts = entry.fields.iter().map(|r| FieldFact::from_record(r, Source::Remote, entry.fetched_at)).collect();
        self.cache.write().unwrap().insert(q, entry)?;
        Ok(facts)
    }

    fn cached(&self, q: &Query) -> Option<Vec<FieldFact>> {
        let cache = self.cache.read().unwrap();
        let e = cache.get(q)?;
        Some(e.fields.iter().map(|r| FieldFact::from_record(r, Source::Cache, e.fetched_at)).collect())
    }

    pub fn url(&self, q: &Query) -> String {
        let filter = match q {
            Query::Discriminant(d) => format!("disc_abs=i{}&disc_sign=i{}", d.unsigned_abs(), d.signum()),
            Query::Polynomial(c) => {
                format!("coeffs=li{}", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            }
        };
        format!(
            "{}/api/nf_fields/?degree=i3&{filter}&_format=json&_fields={}",
            self.config.base_url.trim_end_matches('/'),
            FIELDS.join(",")
        )
    }

    fn remote(&self, q: &Query) -> Result<Vec<LmfdbRecord>, LmfdbError> {
        let url = self.url(q);
        log::info!("GET {url}");
        let unavailable = |e: ureq::Error| LmfdbError::NetworkUnavailable { query: q.clone(), reason: e.to_string() };
        let mut resp = self.agent.get(&url).call().map_err(unavailable)?;
        let status = resp.status().as_u16();
        if status != 200 {
            return Err(LmfdbError::Http { status, url });
        }
        let body = resp.body_mut().read_to_string().map_err(unavailable)?;
        parse_page(q, &body)
    }
}

pub(crate) fn parse_page(q: &Query, body: &str) -> Result<Vec<LmfdbRecord>, LmfdbError> {
    let page: ApiPage = serde_json::from_str(body).map_err(|e| LmfdbError::SchemaMismatch(e.to_string()))?;
    let mut out = Vec::with_capacity(page.data.len());
    for row in page.data {
        let rec: LmfdbRecord =
            serde_json::from_value(row).map_err(|e| LmfdbError::SchemaMismatch(e.to_string()))?;
        rec.validate()?;
        let matches = match q {
            Query::Discriminant(d) => rec.discriminant() == *d,
            Query::Polynomial(c) => rec.coeffs == *c,
        };
        if !matches {
            return Err(LmfdbError::SchemaMismatch(format!("{} returned for {q}", rec.label)));
        }
        out.push(rec);
    }
    out.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offline_env_values() {
        assert!(!offline_requested(None));
        assert!(!offline_requested(Some("")));
        assert!(!offline_requested(Some("0")));
        assert!(!offline_requested(Some("false")));
        assert!(offline_requested(Some("1")));
        assert!(offline_requested(Some("yes")));
    }

    #[test]
    fn query_urls() {
        let c = Client::new(ClientConfig { base_url: "http://h/".into(), ..Default::default() }, FactCache::in_memory());
        assert!(c.url(&Query::Discriminant(-23)).starts_with("http://h/api/nf_fields/?degree=i3&disc_abs=i23&disc_sign=i-1&"));
        assert!(c.url(&Query::Polynomial(vec![-1, 1, 0, 1])).contains("&coeffs=li-1,1,0,1&"));
    }

    #[test]
    fn wrong_field_in_page_is_rejected() {
        let body = r#"{"data":[{"label":"3.1.31.1","degree":3,"disc_abs":31,"disc_sign":-1,"r1":1,"r2":1,
            "class_number":1,"regulator":0.38224508584,"coeffs":[-1,1,0,1]}]}"#;
        assert!(matches!(parse_page(&Query::Discriminant(-23), body), Err(LmfdbError::SchemaMismatch(_))));
        assert_eq!(parse_page(&Query::Discriminant(-31), body).unwrap().len(), 1);
    }
}
