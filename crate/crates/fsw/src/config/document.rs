//! Line-oriented `[section]` / `key = value` documents.

use std::collections::BTreeMap;

use crate::config::ConfigError;
use crate::units::Dimension;

#[derive(Debug, Clone)]
pub(crate) struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Section {
    pub name: String,
    pub line: usize,
    entries: Vec<Entry>,
}

pub(crate) fn parse_document(text: &str) -> Result<Vec<Section>, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .map(str::trim)
                .filter(|s| {
                    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                })
                .ok_or_else(|| {
                    ConfigError::syntax(line, format!("malformed section header `{content}`"))
                })?;
            sections.push(Section {
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            ConfigError::syntax(line, format!("expected `key = value`, found `{content}`"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::syntax(
                line,
                "key and value must both be present",
            ));
        }
        let section = sections.last_mut().ok_or_else(|| {
            ConfigError::syntax(line, format!("`{key}` appears before any section header"))
        })?;
        if section.entries.iter().any(|e| e.key == key) {
            return Err(ConfigError::syntax(
                line,
                format!("duplicate key `{key}` in [{}]", section.name),
            ));
        }
        section.entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
        });
    }
    Ok(sections)
}

/// Consumes the keys of one section; whatever is left over is an unknown key.
pub(crate) struct Reader {
    section: String,
    line: usize,
    entries: BTreeMap<String, Entry>,
}

fn split_number(entry: &Entry) -> Result<(f64, &str), ConfigError> {
    let text = entry.value.trim();
    let (number, unit) = match text.find(char::is_whitespace) {
        Some(at) => (&text[..at], text[at..].trim()),
        None => (text, ""),
    };
    let value = number
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            ConfigError::syntax(
                entry.line,
                format!("`{}`: `{number}` is not a number", entry.key),
            )
        })?;
    Ok((value, unit))
}

pub(crate) fn entry_quantity(entry: &Entry, dim: Dimension) -> Result<f64, ConfigError> {
    let (value, unit) = split_number(entry)?;
    convert(entry, dim, value, unit)
}

fn convert(entry: &Entry, dim: Dimension, value: f64, unit: &str) -> Result<f64, ConfigError> {
    if unit.is_empty() {
        return Err(ConfigError::MissingUnit {
            line: entry.line,
            key: entry.key.clone(),
            accepted: dim.accepted(),
        });
    }
    dim.to_si(value, unit).ok_or_else(|| {
        ConfigError::syntax(
            entry.line,
            format!(
                "`{}`: unit `{unit}` not accepted (use one of {})",
                entry.key,
                dim.accepted()
            ),
        )
    })
}

/// Splits `a b, c d [u1, u2]` into rows of numbers and the bracketed units.
fn split_rows(entry: &Entry, width: usize) -> Result<(Vec<Vec<f64>>, Vec<&str>), ConfigError> {
    let text = entry.value.trim();
    let err = |msg: String| ConfigError::syntax(entry.line, format!("`{}`: {msg}", entry.key));
    let (body, units) = match text.rfind('[') {
        Some(open) if text.ends_with(']') => (
            &text[..open],
            text[open + 1..text.len() - 1]
                .split(',')
                .map(str::trim)
                .collect::<Vec<_>>(),
        ),
        _ => (text, Vec::new()),
    };
    let mut rows = Vec::new();
    for row in body.split(',') {
        let values = row
            .split_whitespace()
            .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| err(format!("`{}` is not a list of numbers", row.trim())))?;
        if values.len() != width {
            return Err(err(format!(
                "each entry needs {width} numbers, found `{}`",
                row.trim()
            )));
        }
        rows.push(values);
    }
    Ok((rows, units))
}

impl Reader {
    pub fn new(section: Section) -> Self {
        Self {
            line: section.line,
            entries: section
                .entries
                .into_iter()
                .map(|e| (e.key.clone(), e))
                .collect(),
            section: section.name,
        }
    }

    pub fn line(&self) -> usize {
        self.line
    }

    /// Line of `key` if it was given, else of the section header.
    pub fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map_or(self.line, |e| e.line)
    }

    pub fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    pub fn require(&mut self, key: &str) -> Result<Entry, ConfigError> {
        self.take(key).ok_or_else(|| ConfigError::MissingKey {
            line: self.line,
            section: self.section.clone(),
            key: key.to_string(),
        })
    }

    pub fn quantity(&mut self, key: &str, dim: Dimension) -> Result<f64, ConfigError> {
        entry_quantity(&self.require(key)?, dim)
    }

    pub fn opt_quantity(&mut self, key: &str, dim: Dimension) -> Result<Option<f64>, ConfigError> {
        if self.entries.contains_key(key) {
            self.quantity(key, dim).map(Some)
        } else {
            Ok(None)
        }
    }

    fn bare(&mut self, entry: &Entry) -> Result<f64, ConfigError> {
        let (value, unit) = split_number(entry)?;
        if !unit.is_empty() {
            return Err(ConfigError::syntax(
                entry.line,
                format!("`{}` is dimensionless and takes no unit", entry.key),
            ));
        }
        Ok(value)
    }

    pub fn number(&mut self, key: &str) -> Result<f64, ConfigError> {
        let entry = self.require(key)?;
        self.bare(&entry)
    }

    pub fn opt_number(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(key) {
            Some(entry) => self.bare(&entry).map(Some),
            None => Ok(None),
        }
    }

    pub fn opt_count(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.take(key) {
            Some(entry) => entry.value.parse::<usize>().map(Some).map_err(|_| {
                ConfigError::syntax(
                    entry.line,
                    format!("`{key}` must be a non-negative integer"),
                )
            }),
            None => Ok(None),
        }
    }

    pub fn count(&mut self, key: &str) -> Result<usize, ConfigError> {
        let line = self.line;
        let section = self.section.clone();
        self.opt_count(key)?.ok_or(ConfigError::MissingKey {
            line,
            section,
            key: key.to_string(),
        })
    }

    pub fn text(&mut self, key: &str) -> Result<String, ConfigError> {
        self.require(key).map(|e| e.value)
    }

    pub fn opt_text(&mut self, key: &str) -> Option<String> {
        self.take(key).map(|e| e.value)
    }

    /// One of a fixed set of words.
    pub fn choice<'c>(
        &mut self,
        key: &str,
        options: &[&'c str],
        default: Option<&'c str>,
    ) -> Result<&'c str, ConfigError> {
        let Some(entry) = self.take(key) else {
            return default.ok_or_else(|| ConfigError::MissingKey {
                line: self.line,
                section: self.section.clone(),
                key: key.to_string(),
            });
        };
        options
            .iter()
            .copied()
            .find(|o| *o == entry.value)
            .ok_or_else(|| {
                ConfigError::syntax(
                    entry.line,
                    format!(
                        "`{key}` must be one of {}, got `{}`",
                        options.join(", "),
                        entry.value
                    ),
                )
            })
    }

    /// Temperature table `T v, T v, ... [temperature unit, value unit]`.
    pub fn table(
        &mut self,
        key: &str,
        value_dim: Dimension,
    ) -> Result<Vec<(f64, f64)>, ConfigError> {
        let entry = self.require(key)?;
        let (rows, units) = split_rows(&entry, 2)?;
        if units.len() != 2 {
            return Err(ConfigError::MissingUnit {
                line: entry.line,
                key: entry.key.clone(),
                accepted: format!("[temperature unit, {}]", value_dim.accepted()),
            });
        }
        rows.iter()
            .map(|r| {
                Ok((
                    convert(&entry, Dimension::Temperature, r[0], units[0])?,
                    convert(&entry, value_dim, r[1], units[1])?,
                ))
            })
            .collect()
    }

    /// List of points `x y z, x y z [length unit]`.
    pub fn points(&mut self, key: &str) -> Result<Vec<[f64; 3]>, ConfigError> {
        let entry = self.require(key)?;
        let (rows, units) = split_rows(&entry, 3)?;
        if units.len() != 1 || units[0].is_empty() {
            return Err(ConfigError::MissingUnit {
                line: entry.line,
                key: entry.key.clone(),
                accepted: format!("[{}]", Dimension::Length.accepted()),
            });
        }
        rows.iter()
            .map(|r| {
                let mut p = [0.0; 3];
                for (a, v) in r.iter().enumerate() {
                    p[a] = convert(&entry, Dimension::Length, *v, units[0])?;
                }
                Ok(p)
            })
            .collect()
    }

    pub fn opt_point(&mut self, key: &str) -> Result<Option<[f64; 3]>, ConfigError> {
        if !self.entries.contains_key(key) {
            return Ok(None);
        }
        let line = self.line_of(key);
        let mut pts = self.points(key)?;
        if pts.len() != 1 {
            return Err(ConfigError::syntax(
                line,
                format!("`{key}` takes a single point"),
            ));
        }
        Ok(pts.pop())
    }

    /// Fails on the first key nobody asked for.
    pub fn finish(self) -> Result<(), ConfigError> {
        match self.entries.into_values().min_by_key(|e| e.line) {
            Some(e) => Err(ConfigError::UnknownKey {
                line: e.line,
                section: self.section,
                key: e.key,
            }),
            None => Ok(()),
        }
    }
}
