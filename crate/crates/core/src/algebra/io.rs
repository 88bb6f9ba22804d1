//! JSON file format for systems and points.
//!
//! A system file looks like
//!
//! ```json
//! {
//!   "n": 1,
//!   "degrees": [2],
//!   "polys": [
//!     [ {"exponents": [2, 0], "re": 1.0, "im": 0.0},
//!       {"exponents": [0, 2], "re": -1.0, "im": 0.0} ]
//!   ]
//! }
//! ```
//!
//! Monomials not listed are zero. The reader rejects exponent tuples whose
//! degree or arity does not match the component, naming the offending entry.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DegreeProfile, HomogeneousPoly, PolySystem};
use crate::C64;

#[derive(Debug, Error)]
pub enum SystemIoError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed system: {0}")]
    Malformed(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct MonomialEntry {
    exponents: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SystemFile {
    n: usize,
    degrees: Vec<u32>,
    polys: Vec<Vec<MonomialEntry>>,
}

fn to_file(system: &PolySystem) -> SystemFile {
    let polys = system
        .components()
        .iter()
        .map(|p| {
            p.basis()
                .exponents()
                .iter()
                .zip(p.coeffs())
                .filter(|(_, &c)| c != C64::new(0.0, 0.0))
                .map(|(alpha, &c)| MonomialEntry {
                    exponents: alpha.exponents().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect()
        })
        .collect();
    SystemFile {
        n: system.n(),
        degrees: system.profile().degrees().to_vec(),
        polys,
    }
}

fn from_file(file: SystemFile) -> Result<PolySystem, SystemIoError> {
    if file.degrees.len() != file.n {
        return Err(SystemIoError::Malformed(format!(
            "degrees has length {}, expected n = {}",
            file.degrees.len(),
            file.n
        )));
    }
    if file.polys.len() != file.n {
        return Err(SystemIoError::Malformed(format!(
            "polys has length {}, expected n = {}",
            file.polys.len(),
            file.n
        )));
    }
    DegreeProfile::new(file.degrees.clone()).map_err(|e| SystemIoError::Malformed(e.to_string()))?;
    let mut components = Vec::with_capacity(file.n);
    for (i, entries) in file.polys.iter().enumerate() {
        let d = file.degrees[i];
        let mut poly = HomogeneousPoly::zero(file.n, d);
        for (j, entry) in entries.iter().enumerate() {
            if entry.exponents.len() != file.n + 1 {
                return Err(SystemIoError::Malformed(format!(
                    "polys[{i}][{j}]: exponent tuple {:?} has {} entries, expected {}",
                    entry.exponents,
                    entry.exponents.len(),
                    file.n + 1
                )));
            }
            let total: u32 = entry.exponents.iter().sum();
            if total != d {
                return Err(SystemIoError::Malformed(format!(
                    "polys[{i}][{j}]: exponent tuple {:?} has degree {total}, component degree is {d}",
                    entry.exponents
                )));
            }
            let idx = poly
                .basis()
                .index_of(&entry.exponents)
                .expect("degree-checked exponent is in the basis");
            if poly.coeffs()[idx] != C64::new(0.0, 0.0) {
                return Err(SystemIoError::Malformed(format!(
                    "polys[{i}][{j}]: duplicate exponent tuple {:?}",
                    entry.exponents
                )));
            }
            poly.coeffs_mut()[idx] = C64::new(entry.re, entry.im);
        }
        components.push(poly);
    }
    PolySystem::new(components).map_err(|e| SystemIoError::Malformed(e.to_string()))
}

pub fn system_to_json(system: &PolySystem) -> String {
    serde_json::to_string_pretty(&to_file(system)).expect("system serialization cannot fail")
}

pub fn system_from_json(json: &str) -> Result<PolySystem, SystemIoError> {
    from_file(serde_json::from_str(json)?)
}

pub fn write_system(path: &Path, system: &PolySystem) -> Result<(), SystemIoError> {
    std::fs::write(path, system_to_json(system))?;
    Ok(())
}

pub fn read_system(path: &Path) -> Result<PolySystem, SystemIoError> {
    system_from_json(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct PointEntry {
    re: f64,
    im: f64,
}

pub fn write_point(path: &Path, point: &[C64]) -> Result<(), SystemIoError> {
    let entries: Vec<PointEntry> = point.iter().map(|c| PointEntry { re: c.re, im: c.im }).collect();
    std::fs::write(path, serde_json::to_string_pretty(&entries)?)?;
    Ok(())
}

pub fn read_point(path: &Path) -> Result<Vec<C64>, SystemIoError> {
    let entries: Vec<PointEntry> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if entries.is_empty() {
        return Err(SystemIoError::Malformed("point has no coordinates".into()));
    }
    Ok(entries.into_iter().map(|e| C64::new(e.re, e.im)).collect())
}
