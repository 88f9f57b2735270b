use std::path::Path;

use super::CrystalSpec;
use crate::error::{Result, SpdcError};

const BUILTIN: [(&str, &str); 4] = [
    ("knbo3.json", include_str!("../../catalog/knbo3.json")),
    ("ppln.json", include_str!("../../catalog/ppln.json")),
    ("ppln_mgo.json", include_str!("../../catalog/ppln_mgo.json")),
    ("ppktp.json", include_str!("../../catalog/ppktp.json")),
];

/// A set of crystal entries, looked up by case-insensitive name.
#[derive(Debug, Clone)]
pub struct Catalog {
    entries: Vec<CrystalSpec>,
}

impl Catalog {
    /// The entries shipped with the library.
    pub fn builtin() -> Self {
        let entries = BUILTIN
            .iter()
            .map(|(file, text)| {
                CrystalSpec::from_json_str(text).unwrap_or_else(|e| panic!("builtin catalog {file}: {e}"))
            })
            .collect();
        Catalog { entries }
    }

    /// Load every `*.json` file in `dir` (sorted by file name).
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let mut paths: Vec<_> = std::fs::read_dir(dir.as_ref())?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut entries = Vec::with_capacity(paths.len());
        for p in paths {
            let text = std::fs::read_to_string(&p)?;
            let spec = CrystalSpec::from_json_str(&text)
                .map_err(|e| SpdcError::Catalog(format!("{}: {e}", p.display())))?;
            entries.push(spec);
        }
        let cat = Catalog { entries };
        cat.check_unique()?;
        Ok(cat)
    }

    fn check_unique(&self) -> Result<()> {
        for (i, e) in self.entries.iter().enumerate() {
            if self.entries[..i].iter().any(|o| o.name.eq_ignore_ascii_case(&e.name)) {
                return Err(SpdcError::Catalog(format!("duplicate crystal name `{}`", e.name)));
            }
        }
        Ok(())
    }

    /// Add or replace an entry.
    pub fn insert(&mut self, spec: CrystalSpec) -> Result<()> {
        spec.validate()?;
        self.entries.retain(|e| !e.name.eq_ignore_ascii_case(&spec.name));
        self.entries.push(spec);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&CrystalSpec> {
        self.entries
            .iter()
            .find(|e| e.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| {
                SpdcError::Catalog(format!(
                    "unknown crystal `{name}` (known: {})",
                    self.names().join(", ")
                ))
            })
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CrystalSpec> {
        self.entries.iter()
    }
}
