use std::path::Path;

use polylyap::poly::rational::parse_rational;
use polylyap::poly::{parse_polynomial, parse_vector_field, Polynomial, VectorField};
use polylyap::reductions::{gallery, motzkin, parse_cnf, rotation_pair, shifted_motzkin, CnfInstance, GalleryEntry, GalleryParams};
use sha2::{Digest, Sha256};

use crate::commands::CliError;
use crate::{GalleryOpts, InputHash};

/// Reads inputs and records a SHA-256 hash for each.
#[derive(Default)]
pub struct Inputs {
    hashes: Vec<InputHash>,
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn gallery_params(opts: &GalleryOpts) -> Result<GalleryParams, CliError> {
    let lambda = match &opts.lambda {
        Some(s) => Some(parse_rational(s).ok_or_else(|| CliError(format!("invalid --lambda `{s}`")))?),
        None => None,
    };
    let rotation = match opts.theta {
        Some(t) => Some(rotation_pair(t, 1000)?),
        None => None,
    };
    Ok(GalleryParams { lambda, rotation })
}

impl Inputs {
    pub fn into_hashes(self) -> Vec<InputHash> {
        self.hashes
    }

    fn record(&mut self, name: String, bytes: &[u8]) {
        self.hashes.push(InputHash {
            name,
            sha256: sha256(bytes),
        });
    }

    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
        self.record(path.display().to_string(), &bytes);
        String::from_utf8(bytes).map_err(|_| CliError(format!("{}: not valid UTF-8", path.display())))
    }

    pub fn gallery(&mut self, name: &str, opts: &GalleryOpts) -> Result<GalleryEntry, CliError> {
        let entry = gallery(name, &gallery_params(opts)?)?;
        self.record(format!("gallery:{name}"), entry.field.to_text().as_bytes());
        Ok(entry)
    }

    /// `gallery:NAME` or a vector field file.
    pub fn system(&mut self, spec: &str, opts: &GalleryOpts) -> Result<VectorField, CliError> {
        if let Some(name) = spec.strip_prefix("gallery:") {
            return Ok(self.gallery(name, opts)?.field);
        }
        let path = Path::new(spec);
        let text = self.read(path)?;
        parse_vector_field(&text).map_err(|e| CliError(format!("{}: {e}", path.display())))
    }

    /// `gallery:motzkin`, `gallery:shifted-motzkin` or a polynomial file.
    pub fn poly(&mut self, spec: &str, nvars: Option<usize>) -> Result<Polynomial, CliError> {
        let p = match spec.strip_prefix("gallery:") {
            Some("motzkin") => motzkin(),
            Some("shifted-motzkin") => shifted_motzkin(),
            Some(other) => {
                return Err(CliError(format!(
                    "unknown built-in polynomial `{other}`, expected motzkin or shifted-motzkin"
                )))
            }
            None => {
                let path = Path::new(spec);
                let text = self.read(path)?;
                return parse_polynomial(&text, nvars).map_err(|e| CliError(format!("{}: {e}", path.display())));
            }
        };
        self.record(spec.to_string(), p.to_string().as_bytes());
        match nvars {
            Some(n) if n != p.nvars() => Err(CliError(format!("{spec} has {} variables, expected {n}", p.nvars()))),
            _ => Ok(p),
        }
    }

    pub fn cnf(&mut self, path: &Path) -> Result<CnfInstance, CliError> {
        let text = self.read(path)?;
        parse_cnf(&text).map_err(|e| CliError(format!("{}: {e}", path.display())))
    }
}
