//! Helpers shared by the integration and acceptance suites.
#![allow(dead_code)] // not every suite uses every helper

use std::path::{Path, PathBuf};
use std::process::Output;

use semforge::config::{validate_config, PipelineConfig};
use semforge::llm::Mode;

/// Workspace-level fixtures directory.
pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .canonicalize()
        .expect("fixtures directory exists")
}

/// Loads the fixture config with output redirected to `out`.
pub fn fixture_config(out: &Path, mode: Mode) -> PipelineConfig {
    let (mut config, warnings) =
        validate_config(&fixtures_dir().join("semforge.toml")).expect("fixture config valid");
    assert!(warnings.is_empty(), "{warnings:?}");
    config.output_dir = out.to_path_buf();
    config.mode = mode;
    config
}

/// Runs the semforge binary, returning its output.
pub fn semforge_cmd(args: &[&str], out: &Path) -> Output {
    let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_semforge"));
    cmd.arg("--config")
        .arg(fixtures_dir().join("semforge.toml"))
        .arg("--out")
        .arg(out);
    cmd.args(args);
    cmd.output().expect("binary runs")
}

/// Reads every file under a directory tree into (relative path, bytes),
/// sorted by path.
pub fn read_tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(dir: &Path, root: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        let mut entries: Vec<_> = std::fs::read_dir(dir)
            .expect("readable dir")
            .map(|e| e.expect("entry").path())
            .collect();
        entries.sort();
        for path in entries {
            if path.is_dir() {
                walk(&path, root, out);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .expect("under root")
                    .to_string_lossy()
                    .into_owned();
                out.push((rel, std::fs::read(&path).expect("readable file")));
            }
        }
    }
    let mut out = Vec::new();
    if root.is_dir() {
        walk(root, root, &mut out);
    }
    out
}
