use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use newsgraph::numerics::rng::fnv1a64;
use newsgraph::Result;

pub const VERSION: &str = concat!("newsgraph ", env!("CARGO_PKG_VERSION"));

/// 64-bit FNV-1a of `bytes`.
pub fn digest(bytes: &[u8]) -> u64 {
    fnv1a64(bytes)
}

pub fn file_digest(path: &Path) -> Result<u64> {
    Ok(digest(&fs::read(path)?))
}

/// Writes via a sibling temp file and a rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Record of one command run: what went in, what came out, how long it took.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seeds: Vec<(String, u64)>,
    pub inputs: Vec<(PathBuf, u64)>,
    pub outputs: Vec<PathBuf>,
    pub duration: Duration,
    /// The effective configuration, in config-file syntax.
    pub config: String,
}

impl RunManifest {
    pub fn new(command: &str, config: String) -> Self {
        RunManifest {
            command: command.to_string(),
            version: VERSION.to_string(),
            seeds: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            duration: Duration::ZERO,
            config,
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let d = file_digest(path)?;
        self.inputs.push((path.to_path_buf(), d));
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut o = String::from("# run manifest\n");
        o.push_str(&format!("command = {}\n", self.command));
        o.push_str(&format!("version = {}\n", self.version));
        o.push_str(&format!("duration_seconds = {:.3}\n", self.duration.as_secs_f64()));
        for (name, seed) in &self.seeds {
            o.push_str(&format!("seed.{name} = {seed}\n"));
        }
        for (path, d) in &self.inputs {
            o.push_str(&format!("input = {} fnv1a64:{d:016x}\n", path.display()));
        }
        for path in &self.outputs {
            o.push_str(&format!("output = {}\n", path.display()));
        }
        o.push_str("\n# effective configuration\n");
        for line in self.config.lines() {
            o.push_str(&format!("# {line}\n"));
        }
        o
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_values() {
        // published FNV-1a 64 test vectors
        assert_eq!(digest(b""), 0xcbf29ce484222325);
        assert_eq!(digest(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(digest(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn manifest_digests_its_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("edges.tsv");
        fs::write(&input, "topic\tt0\thas_topic\tarticle\ta0\n").unwrap();
        let mut m = RunManifest::new("stats", String::from("[train]\nepochs = 1\n"));
        m.add_input(&input).unwrap();
        m.seeds.push(("train".into(), 7));
        let out = dir.path().join("manifest.txt");
        m.write(&out).unwrap();
        let text = fs::read_to_string(&out).unwrap();
        let expected = format!("fnv1a64:{:016x}", digest(&fs::read(&input).unwrap()));
        assert!(text.contains(&expected), "{text}");
        assert!(text.contains("seed.train = 7"));
        assert!(text.contains("# epochs = 1"));
        assert!(!dir.path().join("manifest.txt.tmp").exists());
    }
}
