//! Parameter snapshots: one raw little-endian `f64` file per parameter plus
//! a plain-text index (`name  file  rows  cols  offset  count`).

use std::fs;
use std::io::Write;
use std::path::Path;

use super::dense::Dense2D;
use super::params::ParameterStore;
use crate::error::{Error, Result};

pub const INDEX_FILE: &str = "params.index";

fn file_name(name: &str) -> String {
    let safe: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '_' || c == '-' { c } else { '_' })
        .collect();
    format!("{safe}.f64")
}

pub fn write_snapshot(store: &ParameterStore, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut index = String::from("# name\tfile\trows\tcols\toffset\tcount\n");
    for p in store.iter() {
        let file = file_name(&p.name);
        let mut bytes = Vec::with_capacity(p.value.len() * 8);
        for v in p.value.data() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        fs::write(dir.join(&file), bytes)?;
        index.push_str(&format!(
            "{}\t{}\t{}\t{}\t0\t{}\n",
            p.name,
            file,
            p.value.rows(),
            p.value.cols(),
            p.value.len()
        ));
    }
    let tmp = dir.join(format!("{INDEX_FILE}.tmp"));
    fs::File::create(&tmp)?.write_all(index.as_bytes())?;
    fs::rename(tmp, dir.join(INDEX_FILE))?;
    Ok(())
}

pub fn read_snapshot(dir: &Path) -> Result<Vec<(String, Dense2D)>> {
    let index = fs::read_to_string(dir.join(INDEX_FILE))?;
    let mut out = Vec::new();
    for (lineno, line) in index.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Snapshot(format!("index line {}: {msg}", lineno + 1));
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 6 {
            return Err(bad("expected 6 columns"));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad number"));
        let (rows, ncols, offset, count) = (num(cols[2])?, num(cols[3])?, num(cols[4])?, num(cols[5])?);
        if rows * ncols != count {
            return Err(bad("rows x cols != count"));
        }
        let bytes = fs::read(dir.join(cols[1]))?;
        let end = offset + count * 8;
        if bytes.len() < end {
            return Err(bad("array file too short"));
        }
        let data = bytes[offset..end]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        out.push((cols[0].to_string(), Dense2D::from_vec(rows, ncols, data)?));
    }
    Ok(out)
}

/// Overwrites store values from a snapshot; names and shapes must match
/// exactly.
pub fn load_snapshot_into(store: &mut ParameterStore, dir: &Path) -> Result<()> {
    let loaded = read_snapshot(dir)?;
    if loaded.len() != store.len() {
        return Err(Error::Snapshot(format!(
            "snapshot has {} parameters, model expects {}",
            loaded.len(),
            store.len()
        )));
    }
    for (name, value) in loaded {
        let slot = store
            .value_mut(&name)
            .ok_or_else(|| Error::Snapshot(format!("unexpected parameter `{name}`")))?;
        if slot.shape() != value.shape() {
            return Err(Error::Snapshot(format!(
                "parameter `{name}` has shape {:?}, model expects {:?}",
                value.shape(),
                slot.shape()
            )));
        }
        *slot = value;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = ParameterStore::new(3);
        s.insert("rgcn.w.cites", Dense2D::from_rows(&[vec![0.1, -0.0], vec![f64::MIN_POSITIVE, 1e300]]).unwrap());
        s.insert("emb.topic", Dense2D::row_vector(&[std::f64::consts::PI]));
        write_snapshot(&s, dir.path()).unwrap();
        let mut t = ParameterStore::new(3);
        t.insert("rgcn.w.cites", Dense2D::zeros(2, 2));
        t.insert("emb.topic", Dense2D::zeros(1, 1));
        load_snapshot_into(&mut t, dir.path()).unwrap();
        for (a, b) in s.iter().zip(t.iter()) {
            let bits = |d: &Dense2D| d.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(&a.value), bits(&b.value));
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = ParameterStore::new(0);
        s.insert("w", Dense2D::zeros(2, 2));
        write_snapshot(&s, dir.path()).unwrap();
        let mut t = ParameterStore::new(0);
        t.insert("w", Dense2D::zeros(2, 3));
        assert!(matches!(load_snapshot_into(&mut t, dir.path()), Err(Error::Snapshot(_))));
    }
}
