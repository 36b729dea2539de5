use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use fofana_core::weights::WeightKind;
use fofana_core::{Exponent, FunctionSpec, GridFunction, LatticeSpec};
use serde::{Deserialize, Serialize};

/// `f.json`: a lattice plus either a descriptor or raw values.
#[derive(Debug, Deserialize)]
pub struct FunctionFile {
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub function: Option<FunctionSpec>,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
}

pub fn read_function(path: &Path) -> Result<GridFunction<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("--input: cannot read {}", path.display()))?;
    let file: FunctionFile =
        serde_json::from_str(&text).with_context(|| format!("--input: malformed JSON in {}", path.display()))?;
    let lattice = file.lattice.build::<f64>().context("--input: field `lattice`")?;
    match (file.function, file.values) {
        (Some(spec), None) => spec.sample(&lattice).context("--input: field `function`"),
        (None, Some(values)) => GridFunction::new(lattice, values).context("--input: field `values`"),
        (Some(_), Some(_)) => bail!("--input: give either `function` or `values`, not both"),
        (None, None) => bail!("--input: missing field `function` or `values`"),
    }
}

/// `{"kind":"power","alpha":2}` or the shorthands `power(2)`, `power-log(2,-1)`.
pub fn parse_phi(s: &str) -> Result<WeightKind> {
    let t = s.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| anyhow!("--phi: {e}"));
    }
    let (name, rest) = t.split_once('(').ok_or_else(|| anyhow!("--phi: expected JSON or kind(args), got {t:?}"))?;
    let args: Vec<&str> = rest.strip_suffix(')').ok_or_else(|| anyhow!("--phi: missing `)`"))?.split(',').collect();
    let alpha = |i: usize| -> Result<Exponent> {
        let a = args.get(i).ok_or_else(|| anyhow!("--phi: missing alpha"))?;
        a.parse::<Exponent>().map_err(|e| anyhow!("--phi: field `alpha`: {e}"))
    };
    match (name.trim(), args.len()) {
        ("power", 1) => Ok(WeightKind::Power { alpha: alpha(0)? }),
        ("power-log", 2) => Ok(WeightKind::PowerLog {
            alpha: alpha(0)?,
            beta: args[1].trim().parse().map_err(|_| anyhow!("--phi: field `beta` is not a number"))?,
        }),
        (kind, _) => bail!("--phi: unknown kind or arity {kind:?}"),
    }
}

/// Resolves `path` against the output directory when it is relative.
pub fn resolve(out_dir: Option<&Path>, path: &Path) -> PathBuf {
    match out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}
