//! Self-describing binary checkpoint container.
//!
//! Byte layout (all integers and floats little-endian):
//!
//! ```text
//! magic        8 bytes   "SACFLTCK"
//! version      u32       FORMAT_VERSION
//! kind_len     u16       followed by kind_len bytes of UTF-8 (e.g. "network", "sac-agent")
//! entry_count  u32
//! entry_count × {
//!     name_len u16, name bytes (UTF-8)
//!     dtype    u8        0 = f64, 1 = u64
//!     ndim     u8
//!     dims     ndim × u64
//!     payload  product(dims) × 8 bytes
//! }
//! ```
//!
//! Entries keep insertion order. Network parameters are stored under
//! `<prefix>.spec` (u64 rows of `[input_width, output_width, kind]`, kind 0 =
//! hidden, 1 = linear) and `<prefix>.<layer>.{weight,bias,gain,offset}`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::nn::{AdamState, LayerKind, LayerSpec, NetworkParams};

pub const MAGIC: &[u8; 8] = b"SACFLTCK";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum EntryData {
    F64(Vec<f64>),
    U64(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub name: String,
    pub dims: Vec<usize>,
    pub data: EntryData,
}

impl Entry {
    pub fn len(&self) -> usize {
        match &self.data {
            EntryData::F64(v) => v.len(),
            EntryData::U64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dtype_name(&self) -> &'static str {
        match self.data {
            EntryData::F64(_) => "f64",
            EntryData::U64(_) => "u64",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub kind: String,
    pub entries: Vec<Entry>,
}

impl Checkpoint {
    pub fn new(kind: impl Into<String>) -> Self {
        Self { kind: kind.into(), entries: Vec::new() }
    }

    pub fn put_f64(&mut self, name: impl Into<String>, dims: &[usize], data: Vec<f64>) {
        debug_assert_eq!(dims.iter().product::<usize>(), data.len());
        self.entries.push(Entry { name: name.into(), dims: dims.to_vec(), data: EntryData::F64(data) });
    }

    pub fn put_u64(&mut self, name: impl Into<String>, dims: &[usize], data: Vec<u64>) {
        debug_assert_eq!(dims.iter().product::<usize>(), data.len());
        self.entries.push(Entry { name: name.into(), dims: dims.to_vec(), data: EntryData::U64(data) });
    }

    pub fn entry(&self, name: &str) -> Result<&Entry> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::Checkpoint(format!("missing entry `{name}`")))
    }

    pub fn get_f64(&self, name: &str) -> Result<(&[usize], &[f64])> {
        let e = self.entry(name)?;
        match &e.data {
            EntryData::F64(v) => Ok((&e.dims, v)),
            EntryData::U64(_) => Err(Error::Checkpoint(format!("entry `{name}` is not f64"))),
        }
    }

    pub fn get_u64(&self, name: &str) -> Result<(&[usize], &[u64])> {
        let e = self.entry(name)?;
        match &e.data {
            EntryData::U64(v) => Ok((&e.dims, v)),
            EntryData::F64(_) => Err(Error::Checkpoint(format!("entry `{name}` is not u64"))),
        }
    }

    pub fn get_scalar_f64(&self, name: &str) -> Result<f64> {
        let (_, v) = self.get_f64(name)?;
        v.first().copied().ok_or_else(|| Error::Checkpoint(format!("entry `{name}` is empty")))
    }

    pub fn get_scalar_u64(&self, name: &str) -> Result<u64> {
        let (_, v) = self.get_u64(name)?;
        v.first().copied().ok_or_else(|| Error::Checkpoint(format!("entry `{name}` is empty")))
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        write_str(w, &self.kind)?;
        w.write_all(&(self.entries.len() as u32).to_le_bytes())?;
        for e in &self.entries {
            write_str(w, &e.name)?;
            let dtype: u8 = match e.data {
                EntryData::F64(_) => 0,
                EntryData::U64(_) => 1,
            };
            w.write_all(&[dtype, e.dims.len() as u8])?;
            for &d in &e.dims {
                w.write_all(&(d as u64).to_le_bytes())?;
            }
            match &e.data {
                EntryData::F64(v) => v.iter().try_for_each(|x| w.write_all(&x.to_le_bytes()))?,
                EntryData::U64(v) => v.iter().try_for_each(|x| w.write_all(&x.to_le_bytes()))?,
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 8];
        read_exact(r, &mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Checkpoint("bad magic bytes".into()));
        }
        let version = read_u32(r)?;
        if version != FORMAT_VERSION {
            return Err(Error::CheckpointVersion { found: version, expected: FORMAT_VERSION });
        }
        let kind = read_str(r)?;
        let count = read_u32(r)? as usize;
        let mut entries = Vec::with_capacity(count.min(4096));
        for _ in 0..count {
            let name = read_str(r)?;
            let mut head = [0u8; 2];
            read_exact(r, &mut head)?;
            let mut dims = Vec::with_capacity(head[1] as usize);
            for _ in 0..head[1] {
                dims.push(read_u64(r)? as usize);
            }
            let n: usize = dims.iter().product();
            let data = match head[0] {
                0 => EntryData::F64((0..n).map(|_| read_u64(r).map(f64::from_bits)).collect::<Result<_>>()?),
                1 => EntryData::U64((0..n).map(|_| read_u64(r)).collect::<Result<_>>()?),
                other => return Err(Error::Checkpoint(format!("entry `{name}`: unknown dtype {other}"))),
            };
            entries.push(Entry { name, dims, data });
        }
        Ok(Self { kind, entries })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        // write-then-rename so an interrupted save never clobbers the previous file
        let tmp = path.with_extension("tmp");
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            self.write_to(&mut w)?;
            w.flush()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        Self::read_from(&mut r)
    }
}

fn write_str<W: Write>(w: &mut W, s: &str) -> Result<()> {
    let len = u16::try_from(s.len()).map_err(|_| Error::Checkpoint(format!("name too long: {s}")))?;
    w.write_all(&len.to_le_bytes())?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Checkpoint("truncated file".into()),
        _ => Error::Io(e),
    })
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_str<R: Read>(r: &mut R) -> Result<String> {
    let mut b = [0u8; 2];
    read_exact(r, &mut b)?;
    let mut s = vec![0u8; u16::from_le_bytes(b) as usize];
    read_exact(r, &mut s)?;
    String::from_utf8(s).map_err(|_| Error::Checkpoint("invalid UTF-8 name".into()))
}

impl NetworkParams {
    pub fn write_checkpoint(&self, ckpt: &mut Checkpoint, prefix: &str) {
        let spec: Vec<u64> = self
            .spec()
            .iter()
            .flat_map(|s| {
                let kind = match s.kind {
                    LayerKind::Hidden => 0,
                    LayerKind::Linear => 1,
                };
                [s.input_width as u64, s.output_width as u64, kind]
            })
            .collect();
        ckpt.put_u64(format!("{prefix}.spec"), &[self.layers.len(), 3], spec);
        for (i, l) in self.layers.iter().enumerate() {
            let (o, n) = l.weight.dim();
            ckpt.put_f64(format!("{prefix}.{i}.weight"), &[o, n], l.weight.iter().copied().collect());
            ckpt.put_f64(format!("{prefix}.{i}.bias"), &[o], l.bias.to_vec());
            ckpt.put_f64(format!("{prefix}.{i}.gain"), &[l.gain.len()], l.gain.to_vec());
            ckpt.put_f64(format!("{prefix}.{i}.offset"), &[l.offset.len()], l.offset.to_vec());
        }
    }

    pub fn read_checkpoint(ckpt: &Checkpoint, prefix: &str) -> Result<Self> {
        let (dims, raw) = ckpt.get_u64(&format!("{prefix}.spec"))?;
        if dims.len() != 2 || dims[1] != 3 {
            return Err(Error::Checkpoint(format!("`{prefix}.spec` has shape {dims:?}")));
        }
        let spec: Vec<LayerSpec> = raw
            .chunks(3)
            .map(|c| {
                let kind = match c[2] {
                    0 => LayerKind::Hidden,
                    1 => LayerKind::Linear,
                    k => return Err(Error::Checkpoint(format!("unknown layer kind {k}"))),
                };
                Ok(LayerSpec { input_width: c[0] as usize, output_width: c[1] as usize, kind })
            })
            .collect::<Result<_>>()?;
        let mut params = NetworkParams::zeros(&spec).map_err(|e| Error::Checkpoint(e.to_string()))?;
        for (i, l) in params.layers.iter_mut().enumerate() {
            let (wd, w) = ckpt.get_f64(&format!("{prefix}.{i}.weight"))?;
            l.weight = Array2::from_shape_vec((wd[0], wd[1]), w.to_vec())
                .map_err(|e| Error::Checkpoint(e.to_string()))?;
            for (name, slot) in [("bias", &mut l.bias), ("gain", &mut l.gain), ("offset", &mut l.offset)] {
                let (_, v) = ckpt.get_f64(&format!("{prefix}.{i}.{name}"))?;
                if v.len() != slot.len() {
                    return Err(Error::Checkpoint(format!("`{prefix}.{i}.{name}` has wrong length")));
                }
                *slot = Array1::from(v.to_vec());
            }
        }
        if params.spec() != spec {
            return Err(Error::Checkpoint(format!("`{prefix}` tensors do not match its spec")));
        }
        Ok(params)
    }
}

impl AdamState {
    pub fn write_checkpoint(&self, ckpt: &mut Checkpoint, prefix: &str) {
        ckpt.put_u64(format!("{prefix}.steps"), &[1], vec![self.steps]);
        for (i, (m, v)) in self.first_moment.iter().zip(&self.second_moment).enumerate() {
            ckpt.put_f64(format!("{prefix}.m{i}"), &[m.len()], m.clone());
            ckpt.put_f64(format!("{prefix}.v{i}"), &[v.len()], v.clone());
        }
    }

    /// Reads a state shaped like `template`.
    pub fn read_checkpoint(ckpt: &Checkpoint, prefix: &str, template: &AdamState) -> Result<Self> {
        let mut state = template.clone();
        state.steps = ckpt.get_scalar_u64(&format!("{prefix}.steps"))?;
        for i in 0..state.first_moment.len() {
            let (_, m) = ckpt.get_f64(&format!("{prefix}.m{i}"))?;
            let (_, v) = ckpt.get_f64(&format!("{prefix}.v{i}"))?;
            if m.len() != state.first_moment[i].len() || v.len() != m.len() {
                return Err(Error::Checkpoint(format!("`{prefix}` tensor {i} has wrong length")));
            }
            state.first_moment[i] = m.to_vec();
            state.second_moment[i] = v.to_vec();
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{mlp_spec, xavier_init};

    #[test]
    fn network_and_adam_round_trip() {
        let p = xavier_init(&mlp_spec(4, &[8, 8], 2), 5).unwrap();
        let mut adam = AdamState::for_network(&p);
        let mut q = p.clone();
        adam.step(&mut q, &p, 1e-3).unwrap();
        let mut ckpt = Checkpoint::new("network");
        q.write_checkpoint(&mut ckpt, "net");
        adam.write_checkpoint(&mut ckpt, "adam");
        let mut bytes = Vec::new();
        ckpt.write_to(&mut bytes).unwrap();
        let back = Checkpoint::read_from(&mut bytes.as_slice()).unwrap();
        assert_eq!(back, ckpt);
        assert_eq!(NetworkParams::read_checkpoint(&back, "net").unwrap(), q);
        let template = AdamState::for_network(&q);
        assert_eq!(AdamState::read_checkpoint(&back, "adam", &template).unwrap(), adam);
    }

    #[test]
    fn header_layout_is_little_endian() {
        let mut ckpt = Checkpoint::new("x");
        ckpt.put_f64("a", &[1], vec![1.0]);
        let mut bytes = Vec::new();
        ckpt.write_to(&mut bytes).unwrap();
        assert_eq!(&bytes[..8], MAGIC);
        assert_eq!(&bytes[8..12], &FORMAT_VERSION.to_le_bytes());
        assert_eq!(&bytes[12..14], &1u16.to_le_bytes());
        assert_eq!(bytes[14], b'x');
        assert_eq!(&bytes[15..19], &1u32.to_le_bytes());
        // name "a", dtype 0, ndim 1, dim 1, payload 1.0
        assert_eq!(&bytes[19..22], &[1, 0, b'a']);
        assert_eq!(&bytes[22..24], &[0, 1]);
        assert_eq!(&bytes[24..32], &1u64.to_le_bytes());
        assert_eq!(&bytes[32..40], &1.0f64.to_le_bytes());
        assert_eq!(bytes.len(), 40);
    }

    #[test]
    fn version_mismatch_is_distinct_error() {
        let mut bytes = Vec::new();
        Checkpoint::new("x").write_to(&mut bytes).unwrap();
        bytes[8..12].copy_from_slice(&99u32.to_le_bytes());
        let err = Checkpoint::read_from(&mut bytes.as_slice()).unwrap_err();
        assert!(matches!(err, Error::CheckpointVersion { found: 99, expected: FORMAT_VERSION }));
    }

    #[test]
    fn truncated_and_garbage_inputs_fail_cleanly() {
        let mut bytes = Vec::new();
        let mut ckpt = Checkpoint::new("x");
        ckpt.put_f64("a", &[3], vec![1.0, 2.0, 3.0]);
        ckpt.write_to(&mut bytes).unwrap();
        bytes.truncate(bytes.len() - 3);
        assert!(matches!(Checkpoint::read_from(&mut bytes.as_slice()), Err(Error::Checkpoint(_))));
        assert!(matches!(Checkpoint::read_from(&mut &b"nonsense"[..]), Err(Error::Checkpoint(_))));
    }
}
