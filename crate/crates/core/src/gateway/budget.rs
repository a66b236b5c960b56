use std::path::Path;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use super::cache::write_atomic;
use crate::{Error, Result};

/// Source of the current time; swapped out in tests to cross day boundaries.
pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;

    fn today(&self) -> NaiveDate {
        self.now().date_naive()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// A clock frozen at one instant.
#[derive(Debug, Clone, Copy)]
pub struct FixedClock(pub DateTime<Utc>);

impl Clock for FixedClock {
    fn now(&self) -> DateTime<Utc> {
        self.0
    }
}

/// Per-day query allowance, keyed by UTC calendar date.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetLedger {
    pub daily_limit: u64,
    pub day_key: NaiveDate,
    pub used_today: u64,
    pub total_issued: u64,
}

impl BudgetLedger {
    pub fn new(daily_limit: u64, today: NaiveDate) -> Result<Self> {
        if daily_limit == 0 {
            return Err(Error::Config("daily limit must be positive".into()));
        }
        Ok(Self {
            daily_limit,
            day_key: today,
            used_today: 0,
            total_issued: 0,
        })
    }

    /// Resets the daily counter when `today` is a later day than `day_key`.
    pub fn roll(&mut self, today: NaiveDate) {
        if today != self.day_key {
            self.day_key = today;
            self.used_today = 0;
        }
    }

    pub fn remaining(&self) -> u64 {
        self.daily_limit.saturating_sub(self.used_today)
    }

    /// Takes one query from today's allowance.
    pub fn reserve(&mut self, today: NaiveDate) -> Result<()> {
        self.roll(today);
        if self.used_today >= self.daily_limit {
            return Err(Error::BudgetExhausted {
                daily_limit: self.daily_limit,
                used: self.used_today,
                day: self.day_key.to_string(),
            });
        }
        self.used_today += 1;
        self.total_issued += 1;
        Ok(())
    }

    /// Loads persisted usage and applies the configured limit. A missing file
    /// starts a fresh ledger.
    pub fn load(path: impl AsRef<Path>, daily_limit: u64, today: NaiveDate) -> Result<Self> {
        let path = path.as_ref();
        let mut ledger = match std::fs::read(path) {
            Ok(bytes) => serde_json::from_slice::<BudgetLedger>(&bytes)
                .map_err(|e| Error::json(path.display().to_string(), e))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Self::new(daily_limit, today)
            }
            Err(e) => return Err(Error::io(path, e)),
        };
        if daily_limit == 0 {
            return Err(Error::Config("daily limit must be positive".into()));
        }
        ledger.daily_limit = daily_limit;
        ledger.roll(today);
        Ok(ledger)
    }

    /// Reads a persisted ledger as-is, without applying a limit or rolling the day.
    pub fn read(path: impl AsRef<Path>) -> Result<Option<Self>> {
        let path = path.as_ref();
        match std::fs::read(path) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map(Some)
                .map_err(|e| Error::json(path.display().to_string(), e)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let bytes =
            serde_json::to_vec_pretty(self).map_err(|e| Error::json("serializing ledger", e))?;
        write_atomic(path.as_ref(), &bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2026, 10, d).unwrap()
    }

    #[test]
    fn reserve_counts_until_limit() {
        let mut l = BudgetLedger::new(2, day(1)).unwrap();
        l.reserve(day(1)).unwrap();
        l.reserve(day(1)).unwrap();
        assert_eq!((l.used_today, l.total_issued), (2, 2));
        let err = l.reserve(day(1)).unwrap_err();
        assert!(matches!(err, Error::BudgetExhausted { used: 2, .. }));
        assert_eq!((l.used_today, l.total_issued), (2, 2));
    }

    #[test]
    fn new_day_resets_daily_usage_only() {
        let mut l = BudgetLedger::new(1, day(1)).unwrap();
        l.reserve(day(1)).unwrap();
        assert!(l.reserve(day(1)).is_err());
        l.reserve(day(2)).unwrap();
        assert_eq!(l.day_key, day(2));
        assert_eq!((l.used_today, l.total_issued), (1, 2));
    }

    #[test]
    fn zero_limit_rejected() {
        assert!(matches!(
            BudgetLedger::new(0, day(1)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn persisted_usage_survives_reload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.json");
        let mut l = BudgetLedger::new(3, day(4)).unwrap();
        l.reserve(day(4)).unwrap();
        l.save(&path).unwrap();

        let same_day = BudgetLedger::load(&path, 10, day(4)).unwrap();
        assert_eq!((same_day.daily_limit, same_day.used_today), (10, 1));
        let next_day = BudgetLedger::load(&path, 10, day(5)).unwrap();
        assert_eq!((next_day.used_today, next_day.total_issued), (0, 1));
    }
}
