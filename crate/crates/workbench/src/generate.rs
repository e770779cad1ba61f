//! Random instance generation, optionally shifted to satisfy a k-Ricci upper
//! bound.

use std::path::Path;

use kricci_core::certify::{shift_to_ric_k_upper, CertifyOptions};
use kricci_core::random::{random_bihermitian, random_metric, rng_for_stream};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, io_err, Result};
use crate::formats::{read_json, write_json, LoadedTensor, TensorFile};

/// Largest dimension accepted for constrained generation.
pub const MAX_CONSTRAINED_DIM: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    None,
    RicKUpper { k: usize, bound: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    /// `σ` added to reach the constraint (0 when unconstrained).
    pub shift: f64,
    pub attempts: usize,
    /// Certified extreme k-Ricci value after the shift.
    pub extremal_value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub constraint: Constraint,
    pub instances: Vec<ManifestEntry>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Generates `count` instances into `out`, writing one tensor file each and a
/// manifest.
pub fn generate(out: &Path, n: usize, count: usize, seed: u64, constraint: Constraint) -> Result<Manifest> {
    if n == 0 {
        return Err(invalid("dimension must be positive"));
    }
    if let Constraint::RicKUpper { k, .. } = constraint {
        if n > MAX_CONSTRAINED_DIM {
            return Err(invalid(format!("constrained generation needs n <= {MAX_CONSTRAINED_DIM}, got {n}")));
        }
        if k == 0 || k > n {
            return Err(invalid(format!("k = {k} outside [1, {n}]")));
        }
    }
    let made: Vec<(TensorFile, ManifestEntry)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for_stream(seed, i as u64);
            let s = random_bihermitian(n, &mut rng);
            let h = random_metric(n, &mut rng);
            let file = format!("s{i:04}.json");
            Ok(match constraint {
                Constraint::None => (
                    TensorFile::new(&s, &h, None),
                    ManifestEntry { file, shift: 0.0, attempts: 0, extremal_value: None },
                ),
                Constraint::RicKUpper { k, bound } => {
                    let opts = CertifyOptions { seed: seed ^ ((i as u64) << 20), ..CertifyOptions::default() };
                    let sh = shift_to_ric_k_upper(&s, &h, k, bound, &opts)?;
                    (
                        TensorFile::new(&sh.form, &h, Some(sh.shift)),
                        ManifestEntry {
                            file,
                            shift: sh.shift,
                            attempts: sh.attempts,
                            extremal_value: Some(sh.certificate.extremal_value),
                        },
                    )
                }
            })
        })
        .collect::<Result<_>>()?;
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let mut instances = Vec::with_capacity(count);
    for (tensor, entry) in made {
        write_json(&out.join(&entry.file), &tensor)?;
        instances.push(entry);
    }
    let manifest = Manifest { n, count, seed, constraint, instances };
    write_json(&out.join(MANIFEST_NAME), &manifest)?;
    Ok(manifest)
}

/// Loads every instance listed in a manifest (paths relative to it).
pub fn load_manifest(path: &Path) -> Result<(Manifest, Vec<LoadedTensor>)> {
    let manifest: Manifest = read_json(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let tensors = manifest
        .instances
        .iter()
        .map(|e| read_json::<TensorFile>(&base.join(&e.file))?.load())
        .collect::<Result<Vec<_>>>()?;
    Ok((manifest, tensors))
}
