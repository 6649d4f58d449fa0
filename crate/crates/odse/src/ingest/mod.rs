//! Dataset ingestion: IAM-style GXL collections and the native
//! line-delimited JSON format, both addressed through a plain-text master
//! manifest naming the three splits.
//!
//! Master manifest: one line per split, `<split-name> <relative-path>`, with
//! split names `train`, `validation`, `test`. A GXL split file is either a
//! plain-text listing (`<graph-file> <class-label>` per line) or an XML
//! collection manifest with `print` elements; paths resolve relative to the
//! listing file. Passing a directory instead of a master manifest looks up
//! conventionally named split files inside it.

pub mod gxl;
pub mod native;
pub mod synth;

use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{OdseError, Result};
use crate::graph::LabeledGraph;

pub use gxl::{parse_cxl, parse_gxl};
pub use native::{read_native, write_native};
pub use synth::{generate_synthetic, SyntheticSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DatasetFormat {
    #[serde(rename = "gxl-collection")]
    GxlCollection,
    #[serde(rename = "native")]
    Native,
}

impl std::str::FromStr for DatasetFormat {
    type Err = OdseError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gxl-collection" => Ok(DatasetFormat::GxlCollection),
            "native" => Ok(DatasetFormat::Native),
            other => Err(OdseError::Config(format!(
                "unknown dataset format `{other}` (expected gxl-collection or native)"
            ))),
        }
    }
}

/// Train/validation/test splits with the ordered set of class labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub train: Vec<(LabeledGraph, String)>,
    pub validation: Vec<(LabeledGraph, String)>,
    pub test: Vec<(LabeledGraph, String)>,
    /// Unique class labels in order of first appearance across the splits.
    pub class_set: Vec<String>,
}

impl Dataset {
    pub fn from_splits(
        train: Vec<(LabeledGraph, String)>,
        validation: Vec<(LabeledGraph, String)>,
        test: Vec<(LabeledGraph, String)>,
    ) -> Self {
        let mut class_set: Vec<String> = Vec::new();
        for (_, class) in train.iter().chain(&validation).chain(&test) {
            if !class_set.contains(class) {
                class_set.push(class.clone());
            }
        }
        Dataset {
            train,
            validation,
            test,
            class_set,
        }
    }

    /// Number of classes (zeta).
    pub fn zeta(&self) -> usize {
        self.class_set.len()
    }

    pub fn validate_for_training(&self) -> Result<()> {
        for (name, split) in [
            ("train", &self.train),
            ("validation", &self.validation),
            ("test", &self.test),
        ] {
            if split.is_empty() {
                return Err(OdseError::Dataset(format!("{name} split is empty")));
            }
        }
        Ok(())
    }
}

struct SplitPaths {
    train: PathBuf,
    validation: PathBuf,
    test: PathBuf,
}

fn resolve_master(manifest_path: &Path, format: DatasetFormat) -> Result<SplitPaths> {
    if manifest_path.is_dir() {
        let find = |names: &[&str]| -> Result<PathBuf> {
            for name in names {
                let candidate = manifest_path.join(name);
                if candidate.is_file() {
                    return Ok(candidate);
                }
            }
            Err(OdseError::Dataset(format!(
                "no split file among {names:?} in {}",
                manifest_path.display()
            )))
        };
        return match format {
            DatasetFormat::Native => Ok(SplitPaths {
                train: find(&["train.jsonl"])?,
                validation: find(&["validation.jsonl"])?,
                test: find(&["test.jsonl"])?,
            }),
            DatasetFormat::GxlCollection => Ok(SplitPaths {
                train: find(&["train.cxl", "train.txt"])?,
                validation: find(&["validation.cxl", "valid.cxl", "validation.txt"])?,
                test: find(&["test.cxl", "test.txt"])?,
            }),
        };
    }

    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let text = std::fs::read_to_string(manifest_path)
        .map_err(|e| OdseError::io(manifest_path.display().to_string(), e))?;
    let mut train = None;
    let mut validation = None;
    let mut test = None;
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (split, rest) = line.split_once(char::is_whitespace).ok_or_else(|| {
            OdseError::Parse {
                source_name: manifest_path.display().to_string(),
                line: line_no + 1,
                reason: "expected `<split-name> <path>`".into(),
            }
        })?;
        let path = base.join(rest.trim());
        match split {
            "train" => train = Some(path),
            "validation" => validation = Some(path),
            "test" => test = Some(path),
            other => {
                return Err(OdseError::Parse {
                    source_name: manifest_path.display().to_string(),
                    line: line_no + 1,
                    reason: format!("unknown split `{other}`"),
                })
            }
        }
    }
    let missing = |name: &str| OdseError::Dataset(format!("master manifest lacks a {name} split"));
    Ok(SplitPaths {
        train: train.ok_or_else(|| missing("train"))?,
        validation: validation.ok_or_else(|| missing("validation"))?,
        test: test.ok_or_else(|| missing("test"))?,
    })
}

fn load_gxl_split(split_path: &Path) -> Result<Vec<(LabeledGraph, String)>> {
    let bytes = std::fs::read(split_path)
        .map_err(|e| OdseError::io(split_path.display().to_string(), e))?;
    let name = split_path.display().to_string();
    let is_xml = split_path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("cxl"))
        .unwrap_or(false)
        || bytes.trim_ascii_start().starts_with(b"<");
    let entries: Vec<(String, String)> = if is_xml {
        parse_cxl(&bytes, &name)?
    } else {
        let text = String::from_utf8(bytes).map_err(|_| OdseError::Parse {
            source_name: name.clone(),
            line: 1,
            reason: "split manifest is not UTF-8".into(),
        })?;
        let mut out = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (file, class) =
                line.split_once(char::is_whitespace)
                    .ok_or_else(|| OdseError::Parse {
                        source_name: name.clone(),
                        line: line_no + 1,
                        reason: "expected `<graph-file> <class-label>`".into(),
                    })?;
            out.push((file.to_string(), class.trim().to_string()));
        }
        out
    };
    if entries.is_empty() {
        return Err(OdseError::Dataset(format!("{name}: empty split")));
    }

    let base = split_path.parent().unwrap_or(Path::new("."));
    let mut samples = Vec::with_capacity(entries.len());
    for (file, class) in entries {
        if class.is_empty() {
            return Err(OdseError::Dataset(format!("{name}: empty class for {file}")));
        }
        let graph_path = base.join(&file);
        let bytes = std::fs::read(&graph_path)
            .map_err(|e| OdseError::io(graph_path.display().to_string(), e))?;
        let graph = parse_gxl(&bytes, &graph_path.display().to_string())?;
        samples.push((graph, class));
    }
    Ok(samples)
}

fn load_native_split(split_path: &Path) -> Result<Vec<(LabeledGraph, String)>> {
    let file = std::fs::File::open(split_path)
        .map_err(|e| OdseError::io(split_path.display().to_string(), e))?;
    let samples = read_native(BufReader::new(file), &split_path.display().to_string())?;
    if samples.is_empty() {
        return Err(OdseError::Dataset(format!(
            "{}: empty split",
            split_path.display()
        )));
    }
    Ok(samples)
}

/// Loads the three splits named by a master manifest (or directory).
pub fn load_dataset(manifest_path: &Path, format: DatasetFormat) -> Result<Dataset> {
    let paths = resolve_master(manifest_path, format)?;
    let load = |p: &Path| match format {
        DatasetFormat::GxlCollection => load_gxl_split(p),
        DatasetFormat::Native => load_native_split(p),
    };
    Ok(Dataset::from_splits(
        load(&paths.train)?,
        load(&paths.validation)?,
        load(&paths.test)?,
    ))
}

/// Writes a dataset in native format: three `.jsonl` split files next to the
/// master manifest, which references them by file name.
pub fn write_native_dataset(dataset: &Dataset, manifest_path: &Path) -> Result<()> {
    let stem = manifest_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| OdseError::io(dir.display().to_string(), e))?;

    let mut manifest = String::new();
    for (split, samples) in [
        ("train", &dataset.train),
        ("validation", &dataset.validation),
        ("test", &dataset.test),
    ] {
        let file_name = format!("{stem}.{split}.jsonl");
        let path = dir.join(&file_name);
        let mut buf = Vec::new();
        write_native(samples, &mut buf)?;
        std::fs::write(&path, buf).map_err(|e| OdseError::io(path.display().to_string(), e))?;
        manifest.push_str(&format!("{split} {file_name}\n"));
    }
    std::fs::write(manifest_path, manifest)
        .map_err(|e| OdseError::io(manifest_path.display().to_string(), e))
}
