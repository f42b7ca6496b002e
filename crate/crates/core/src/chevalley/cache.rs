use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::ball::{Ball, BallData, ProductTable};
use super::matrix::IntMatrix;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rootsys::Family;

/// Bumped whenever enumeration order or file layout changes.
pub const CACHE_VERSION: u32 = 1;

/// Environment variable consulted when no cache directory is given.
pub const CACHE_ENV: &str = "KAZHDAN_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct CacheKey {
    family: Family,
    rank: usize,
    radius: usize,
    table_radius: Option<usize>,
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct Stored<T> {
    key: CacheKey,
    payload: T,
}

/// Binary cache for balls and product tables.
#[derive(Debug, Clone)]
pub struct BallCache {
    dir: PathBuf,
}

impl BallCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        BallCache { dir: dir.into() }
    }

    /// Uses `KAZHDAN_CACHE_DIR` if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).map(|d| Self::new(PathBuf::from(d)))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &CacheKey) -> PathBuf {
        let name = match key.table_radius {
            None => format!("ball-{}{}-R{}-v{}.bin", key.family, key.rank, key.radius, key.version),
            Some(r) => format!(
                "table-{}{}-R{}-r{}-v{}.bin",
                key.family, key.rank, key.radius, r, key.version
            ),
        };
        self.dir.join(name)
    }

    fn load<T: DeserializeOwned>(&self, key: &CacheKey) -> Result<Option<T>> {
        let path = self.path(key);
        let file = match fs::File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(path, e)),
        };
        let stored: Stored<T> = bincode::deserialize_from(BufReader::new(file)).map_err(|e| Error::format(&path, e))?;
        if stored.key != *key {
            return Err(Error::format(&path, "cache key does not match file name"));
        }
        Ok(Some(stored.payload))
    }

    fn store<T: Serialize>(&self, key: &CacheKey, payload: &T) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let path = self.path(key);
        let tmp = path.with_extension("tmp");
        let file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        let stored = Stored {
            key: key.clone(),
            payload,
        };
        bincode::serialize_into(BufWriter::new(file), &stored).map_err(|e| Error::format(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }

    pub fn ball(
        &self,
        family: Family,
        rank: usize,
        radius: usize,
        build: impl FnOnce() -> Result<Ball<IntMatrix>>,
    ) -> Result<Ball<IntMatrix>> {
        let key = CacheKey {
            family,
            rank,
            radius,
            table_radius: None,
            version: CACHE_VERSION,
        };
        if let Some(d) = self.load::<BallData<IntMatrix>>(&key)? {
            tracing::debug!(path = %self.path(&key).display(), "ball cache hit");
            return Ball::from_data(d);
        }
        let ball = build()?;
        self.store(&key, &ball.to_data())?;
        Ok(ball)
    }

    pub fn table(
        &self,
        family: Family,
        rank: usize,
        ball: &Ball<IntMatrix>,
        r: usize,
        exec: Exec,
    ) -> Result<ProductTable> {
        let key = CacheKey {
            family,
            rank,
            radius: ball.radius(),
            table_radius: Some(r),
            version: CACHE_VERSION,
        };
        if let Some(t) = self.load::<ProductTable>(&key)? {
            tracing::debug!(path = %self.path(&key).display(), "table cache hit");
            return Ok(t);
        }
        let t = ProductTable::within(ball, r, exec)?;
        self.store(&key, &t)?;
        Ok(t)
    }
}
