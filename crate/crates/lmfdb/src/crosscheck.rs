use crate::{Client, LmfdbError, Query};
use serde::{Deserialize, Serialize};

/// Largest accepted |R_local - R_remote|.
pub const R_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalInvariants {
    pub discriminant: i64,
    pub h: u64,
    #[serde(rename = "R")]
    pub regulator: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RowStatus {
    Verified { label: String },
    Mismatch { label: String, h_remote: u64, r_remote: f64, detail: String },
    /// The field is not known upstream; nothing to compare against.
    Unverifiable { reason: String },
    /// Fetch failed for another reason. Does not stop the remaining rows.
    Error { message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowOutcome {
    #[serde(flatten)]
    pub local: LocalInvariants,
    #[serde(flatten)]
    pub status: RowStatus,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub rows: Vec<RowOutcome>,
}

impl CrosscheckReport {
    pub fn discrepancies(&self) -> Vec<&RowOutcome> {
        self.rows.iter().filter(|r| matches!(r.status, RowStatus::Mismatch { .. })).collect()
    }

    pub fn errors(&self) -> Vec<&RowOutcome> {
        self.rows.iter().filter(|r| matches!(r.status, RowStatus::Error { .. })).collect()
    }

    pub fn verified(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.status, RowStatus::Verified { .. })).count()
    }
}

impl Client {
    /// Compares each row against the upstream field of the same discriminant.
    /// When several fields share it, the one with the closest regulator is used.
    pub fn crosscheck(&self, rows: &[LocalInvariants]) -> CrosscheckReport {
        let rows = rows
            .iter()
            .map(|local| {
                let status = match self.fetch_all(&Query::Discriminant(local.discriminant)) {
                    Ok(facts) if facts.is_empty() => RowStatus::Unverifiable { reason: "not in LMFDB".into() },
                    Ok(facts) => {
                        let f = facts
                            .iter()
                            .min_by(|a, b| {
                                (a.regulator - local.regulator).abs().total_cmp(&(b.regulator - local.regulator).abs())
                            })
                            .unwrap();
                        let mut detail = Vec::new();
                        if f.h != local.h {
                            detail.push(format!("h {} != {}", local.h, f.h));
                        }
                        let dr = (f.regulator - local.regulator).abs();
                        if !(dr <= R_TOLERANCE) {
                            detail.push(format!("|R - R_remote| = {dr:e}"));
                        }
                        if detail.is_empty() {
                            RowStatus::Verified { label: f.label.clone() }
                        } else {
                            RowStatus::Mismatch {
                                label: f.label.clone(),
                                h_remote: f.h,
                                r_remote: f.regulator,
                                detail: detail.join("; "),
                            }
                        }
                    }
                    Err(LmfdbError::NotFound(_)) => RowStatus::Unverifiable { reason: "not in LMFDB".into() },
                    Err(e) => RowStatus::Error { message: e.to_string() },
                };
                RowOutcome { local: local.clone(), status }
            })
            .collect();
        CrosscheckReport { rows }
    }
}
