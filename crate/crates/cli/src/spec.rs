//! Density spec resolution: the `family:params` mini-grammar, `@file`
//! indirection, and bare JSON file paths.

use std::fs;
use std::path::Path;

use genjs::descriptor::DensityDescriptor;
use genjs::oracle::Density;

use crate::CliError;

/// Resolves a command-line density spec. Accepted forms:
///
/// - `cauchy:0.3`, `cauchy_ls:0.0,0.3`, `normal:0,1`,
///   `categorical:0.2,0.8` (inline mini-grammar);
/// - `mvn:@params.json` or `cauchy:@params.json` (family with parameters
///   from a JSON file);
/// - `params.json` (a JSON density file carrying `"family"` or an MVN
///   `"chart"` object).
pub fn parse_spec(spec: &str) -> Result<DensityDescriptor, CliError> {
    if let Some((family, rest)) = spec.split_once(":@") {
        let json = read(Path::new(rest))?;
        let desc = DensityDescriptor::from_json(&json).map_err(|e| CliError::Spec(e.to_string()))?;
        return check_family(family, desc);
    }
    if spec.contains(':') {
        return DensityDescriptor::parse_inline(spec).map_err(|e| CliError::Spec(e.to_string()));
    }
    if spec.ends_with(".json") {
        let json = read(Path::new(spec))?;
        return DensityDescriptor::from_json(&json).map_err(|e| CliError::Spec(e.to_string()));
    }
    Err(CliError::Spec(format!(
        "cannot parse density spec {spec:?}: expected family:params or a .json path"
    )))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Spec(format!("cannot read {}: {e}", path.display())))
}

fn check_family(family: &str, desc: DensityDescriptor) -> Result<DensityDescriptor, CliError> {
    let ok = matches!(
        (family.to_ascii_lowercase().as_str(), &desc),
        ("mvn", DensityDescriptor::Mvn { .. })
            | ("mvn", DensityDescriptor::Normal { .. })
            | ("cauchy", DensityDescriptor::Cauchy { .. })
            | ("cauchy_ls", DensityDescriptor::CauchyLs { .. })
            | ("normal", DensityDescriptor::Normal { .. })
            | ("categorical", DensityDescriptor::Categorical { .. })
    );
    if ok {
        Ok(desc)
    } else {
        Err(CliError::Spec(format!(
            "file does not describe a {family} density"
        )))
    }
}

pub fn build(desc: &DensityDescriptor) -> Result<Density, CliError> {
    desc.build().map_err(CliError::from)
}
