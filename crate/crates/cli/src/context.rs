//! Sieve sizing, cache handling, and the auto-extension retry loop shared by
//! every subcommand.

use std::path::PathBuf;

use supernorm::{Error, PrimeTable};

pub struct Context {
    pub configured_limit: u64,
    pub cache_dir: Option<PathBuf>,
    pub quiet: bool,
    pub auto_extend: bool,
}

pub const DEFAULT_SIEVE_LIMIT: u64 = 10_000_000;

impl Context {
    pub fn log(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    fn cache_path(&self, limit: u64) -> Option<PathBuf> {
        self.cache_dir
            .as_ref()
            .map(|dir| dir.join(format!("snlb-{limit}.bits")))
    }

    pub fn build_table(&self, limit: u64) -> supernorm::Result<PrimeTable> {
        let limit = limit.max(16);
        if let Some(path) = self.cache_path(limit) {
            if path.exists() {
                match PrimeTable::from_cache(&path) {
                    Ok(table) if table.limit() == limit => {
                        self.log(&format!("loaded sieve cache {}", path.display()));
                        return Ok(table);
                    }
                    Ok(_) => self.log("cache limit mismatch; rebuilding"),
                    Err(e) => self.log(&format!("ignoring bad sieve cache: {e}")),
                }
            }
        }
        self.log(&format!("sieving to {limit}"));
        let table = PrimeTable::new(limit);
        if let Some(path) = self.cache_path(limit) {
            if let Some(dir) = path.parent() {
                let _ = std::fs::create_dir_all(dir);
            }
            match table.write_cache(&path) {
                Ok(()) => self.log(&format!("wrote sieve cache {}", path.display())),
                Err(e) => self.log(&format!("could not write sieve cache: {e}")),
            }
        }
        Ok(table)
    }

    /// Build a table covering at least `required` and run the job,
    /// rebuilding larger if the sieve turns out to be exhausted mid-run.
    pub fn with_table<T>(
        &self,
        required: u64,
        mut run: impl FnMut(&PrimeTable) -> supernorm::Result<T>,
    ) -> supernorm::Result<T> {
        if required >= u32::MAX as u64 {
            return Err(Error::InvalidArgument(format!(
                "this request needs a sieve past {required}, beyond what the table supports"
            )));
        }
        let mut limit = self.configured_limit.max(required);
        loop {
            let table = self.build_table(limit)?;
            match run(&table) {
                Err(Error::SieveExhausted { needed, .. }) if self.auto_extend => {
                    let next = needed.max(limit).saturating_mul(2).min(u32::MAX as u64 - 1);
                    if next <= limit {
                        return Err(Error::SieveExhausted { limit, needed });
                    }
                    self.log(&format!("sieve exhausted (needs {needed}); extending"));
                    limit = next;
                }
                other => return other,
            }
        }
    }

    /// A limit that certainly covers the first `n` primes.
    pub fn limit_for_nth_prime(n: u64) -> u64 {
        if n < 6 {
            return 16;
        }
        let x = n as f64;
        ((x * (x.ln() + x.ln().ln())).ceil() as u64).saturating_add(16)
    }
}

/// Parse "250", "1e6", or "2.5e3" into a u64.
pub fn parse_magnitude(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 && v <= u64::MAX as f64 && v.fract() == 0.0 => {
            Ok(v as u64)
        }
        _ => Err(format!(
            "expected a non-negative integer (like 250 or 1e6), got {s:?}"
        )),
    }
}

pub fn parse_magnitude_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(',').map(parse_magnitude).collect()
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number {tok:?}"))
        })
        .collect()
}
