//! Output paths and metadata sidecars.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

/// Overrides the directory used when `-o` is not given.
pub const OUTPUT_DIR_ENV: &str = "ULAM_OUTPUT_DIR";

pub fn resolve(explicit: Option<&Path>, default_name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => {
            let dir = std::env::var_os(OUTPUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from);
            dir.join(default_name)
        }
    }
}

/// `out.tsv` with tag `density` becomes `out.density.tsv`.
pub fn companion(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    path.with_file_name(name)
}

/// Creates the file (and missing parent directories), runs `body` on a
/// buffered writer and flushes.
pub fn write_file<F>(path: &Path, body: F) -> io::Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()
}

#[derive(Serialize)]
struct Meta<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a C,
    resolved: Value,
    outputs: Vec<String>,
    summary: Value,
}

/// Writes `<primary>.meta.json`. Contains no timestamps, so it is as
/// reproducible as the data files.
pub fn write_meta<C: Serialize>(
    primary: &Path,
    config: &C,
    resolved: Value,
    outputs: &[PathBuf],
    summary: Value,
) -> io::Result<()> {
    let meta = Meta {
        tool: "ulam",
        version: env!("CARGO_PKG_VERSION"),
        config,
        resolved,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        summary,
    };
    write_file(&meta_path(primary), |w| {
        serde_json::to_writer_pretty(&mut *w, &meta)?;
        writeln!(w)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_names() {
        let p = Path::new("runs/pr.tsv");
        assert_eq!(companion(p, "fit"), Path::new("runs/pr.fit.tsv"));
        assert_eq!(companion(Path::new("m"), "fit"), Path::new("m.fit"));
        assert_eq!(meta_path(p), Path::new("runs/pr.tsv.meta.json"));
    }

    #[test]
    fn explicit_path_wins() {
        assert_eq!(resolve(Some(Path::new("a.tsv")), "b.tsv"), Path::new("a.tsv"));
    }

    #[test]
    fn writes_nested_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x/y/z.tsv");
        write_file(&p, |w| writeln!(w, "ok")).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "ok\n");
    }
}
