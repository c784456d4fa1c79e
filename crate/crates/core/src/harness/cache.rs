//! On-disk cache of expensive objects, one JSON file per key.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rug::Float;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numerics::Ball;
use crate::qseries::{float_from_str, float_to_string};

#[derive(Clone, Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir: Some(dir) })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        let dir = self.dir.as_ref()?;
        let digest = hex::encode(Sha256::digest(key.as_bytes()));
        Some(dir.join(format!("{}.json", &digest[..32])))
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        let Some(path) = self.path(key) else {
            return Ok(None);
        };
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let entry: Entry<T> = serde_json::from_str(&text)?;
        if entry.key != key {
            return Err(Error::Parse(format!("cache collision in {}", path.display())));
        }
        Ok(Some(entry.value))
    }

    /// Writes through a temporary file and a rename, so readers never see
    /// a partial entry.
    pub fn put<T: Serialize>(&self, key: &str, value: &T) -> Result<()> {
        let Some(path) = self.path(key) else {
            return Ok(());
        };
        let entry = Entry {
            key: key.to_string(),
            value,
        };
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(serde_json::to_string(&entry)?.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct Entry<T> {
    key: String,
    value: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallRecord {
    pub prec: u32,
    pub mid: String,
    pub rad: f64,
}

impl From<&Ball> for BallRecord {
    fn from(b: &Ball) -> Self {
        Self {
            prec: b.mid.prec(),
            mid: float_to_string(&b.mid),
            rad: b.rad,
        }
    }
}

impl BallRecord {
    pub fn to_ball(&self) -> Result<Ball> {
        Ok(Ball {
            mid: float_from_str(self.prec, &self.mid)?,
            rad: self.rad,
        })
    }
}

pub(crate) fn float_record(x: &Float) -> (u32, String) {
    (x.prec(), float_to_string(x))
}

pub(crate) fn float_from_record(r: &(u32, String)) -> Result<Float> {
    float_from_str(r.0, &r.1)
}
