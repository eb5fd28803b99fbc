use std::path::Path;

use crate::dynamics::{vorticity_pairs, WaveState};
use crate::error::{Error, Result};
use crate::spectral::{GridSpec, StripField, SurfaceField};

const MAGIC: &[u8; 4] = b"WWSN";
pub const SNAPSHOT_VERSION: u32 = 1;

/// Self-describing binary dump of a [`WaveState`].
///
/// Layout (little-endian): `"WWSN"`, `u32` version, `u64` header length,
/// UTF-8 header of `key=value` lines, then per field a `u64` count followed
/// by that many `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub grid: GridSpec,
    pub t: f64,
    pub fields: Vec<(String, Vec<f64>)>,
}

fn field_names(dim: usize) -> Vec<String> {
    let mut names = vec!["eta".to_string()];
    names.extend((1..=dim).map(|i| format!("V{i}")));
    names.push("B".into());
    names.extend((1..=dim).map(|i| format!("Vb{i}")));
    names.extend(vorticity_pairs(dim).iter().map(|(i, j)| format!("omega_{}{}", i + 1, j + 1)));
    names
}

fn bits(x: f64) -> String {
    format!("{:016x}", x.to_bits())
}

fn unbits(s: &str) -> Result<f64> {
    u64::from_str_radix(s, 16).map(f64::from_bits).map_err(|_| Error::Snapshot(format!("bad float field `{s}`")))
}

impl Snapshot {
    pub fn from_state(state: &WaveState) -> Self {
        let mut values: Vec<Vec<f64>> = vec![state.eta.values().to_vec()];
        values.extend(state.v.iter().map(|f| f.values().to_vec()));
        values.push(state.b.values().to_vec());
        values.extend(state.vb.iter().map(|f| f.values().to_vec()));
        values.extend(state.omega.iter().map(|f| f.values().to_vec()));
        Snapshot { grid: *state.grid(), t: state.t, fields: field_names(state.dim()).into_iter().zip(values).collect() }
    }

    pub fn to_state(&self) -> Result<WaveState> {
        let g = self.grid;
        let names = field_names(g.dim);
        if self.fields.len() != names.len() || self.fields.iter().zip(&names).any(|((a, _), b)| a != b) {
            return Err(Error::Snapshot("field manifest does not match the grid dimension".into()));
        }
        let mut it = self.fields.iter().map(|(_, v)| v.clone());
        let mut surface = || SurfaceField::from_values(&g, it.next().expect("manifest checked"));
        let eta = surface()?;
        let v = (0..g.dim).map(|_| surface()).collect::<Result<Vec<_>>>()?;
        let b = surface()?;
        let vb = (0..g.dim).map(|_| surface()).collect::<Result<Vec<_>>>()?;
        let omega = self.fields[2 + 2 * g.dim..]
            .iter()
            .map(|(_, v)| StripField::from_values(&g, v.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(WaveState { t: self.t, eta, v, b, vb, omega })
    }

    fn header(&self) -> String {
        let g = &self.grid;
        let manifest: Vec<String> = self.fields.iter().map(|(n, v)| format!("{n}:{}", v.len())).collect();
        format!(
            "version={SNAPSHOT_VERSION}\ndim={}\nn={}\nnz={}\nlength={}\ndealias_fraction={}\nt={}\nfields={}\n",
            g.dim,
            g.n,
            g.nz,
            bits(g.length),
            bits(g.dealias_fraction),
            bits(self.t),
            manifest.join(",")
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = self.header();
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
        out.extend_from_slice(&(header.len() as u64).to_le_bytes());
        out.extend_from_slice(header.as_bytes());
        for (_, v) in &self.fields {
            out.extend_from_slice(&(v.len() as u64).to_le_bytes());
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0;
        let mut take = |n: usize| -> Result<&[u8]> {
            let s = bytes.get(pos..pos + n).ok_or_else(|| Error::Snapshot("truncated snapshot".into()))?;
            pos += n;
            Ok(s)
        };
        if take(4)? != MAGIC {
            return Err(Error::Snapshot("missing WWSN magic".into()));
        }
        let version = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes"));
        if version != SNAPSHOT_VERSION {
            return Err(Error::Snapshot(format!("unsupported snapshot version {version} (this build reads {SNAPSHOT_VERSION})")));
        }
        let len = u64::from_le_bytes(take(8)?.try_into().expect("8 bytes")) as usize;
        let header = std::str::from_utf8(take(len)?).map_err(|_| Error::Snapshot("header is not UTF-8".into()))?.to_string();
        let mut kv = std::collections::HashMap::new();
        for line in header.lines() {
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Snapshot(format!("bad header line `{line}`")))?;
            kv.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| kv.get(k).cloned().ok_or_else(|| Error::Snapshot(format!("header lacks `{k}`")));
        let int = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| Error::Snapshot(format!("bad `{k}`"))) };
        if int("version")? != SNAPSHOT_VERSION as usize {
            return Err(Error::Snapshot("header version disagrees with preamble".into()));
        }
        let grid = GridSpec::new(int("dim")?, int("n")?, int("nz")?)?
            .with_length(unbits(&get("length")?)?)?
            .with_dealias_fraction(unbits(&get("dealias_fraction")?)?)?;
        let t = unbits(&get("t")?)?;
        let mut fields = Vec::new();
        for entry in get("fields")?.split(',').filter(|s| !s.is_empty()) {
            let (name, count) = entry.split_once(':').ok_or_else(|| Error::Snapshot(format!("bad manifest entry `{entry}`")))?;
            let count: usize = count.parse().map_err(|_| Error::Snapshot(format!("bad count in `{entry}`")))?;
            let stored = u64::from_le_bytes(take(8)?.try_into().expect("8 bytes")) as usize;
            if stored != count {
                return Err(Error::Snapshot(format!("field `{name}` has {stored} values, manifest says {count}")));
            }
            let raw = take(8 * count)?;
            let values = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
            fields.push((name.to_string(), values));
        }
        if pos != bytes.len() {
            return Err(Error::Snapshot("trailing bytes after the last field".into()));
        }
        Ok(Snapshot { grid, t, fields })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

pub fn write_snapshot(state: &WaveState, path: &Path) -> Result<()> {
    Snapshot::from_state(state).write(path)
}

pub fn read_snapshot(path: &Path) -> Result<WaveState> {
    Snapshot::read(path)?.to_state()
}
