//! Weight checkpoints.
//!
//! ```text
//! magic "CHKW" | version u16 | spec hash u64 | tensor count u32
//! per tensor, in declaration order: length u64 | length × f32
//! ```
//!
//! All integers and floats are little-endian. The architecture itself lives
//! in a separate architecture file; the hash ties the two together.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{ModelSpec, Network, NnError, Tensor};

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"CHKW";
pub const CHECKPOINT_VERSION: u16 = 1;

pub fn write_checkpoint<W: Write>(mut w: W, net: &Network<f32>) -> Result<(), NnError> {
    w.write_all(&CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&net.spec().spec_hash().to_le_bytes())?;
    w.write_all(&(net.params().len() as u32).to_le_bytes())?;
    for p in net.params() {
        w.write_all(&(p.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(p.len() * 4);
        for v in p.data() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<(), NnError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => NnError::Checkpoint(format!("truncated while reading {what}")),
        _ => NnError::Io(e),
    })
}

/// Reads weights for `spec`, rejecting checkpoints written for another
/// architecture.
pub fn read_checkpoint<R: Read>(mut r: R, spec: &ModelSpec) -> Result<Network<f32>, NnError> {
    let mut magic = [0u8; 4];
    read_exact(&mut r, &mut magic, "magic")?;
    if magic != CHECKPOINT_MAGIC {
        return Err(NnError::Checkpoint("not a weight checkpoint (bad magic)".into()));
    }
    let mut b2 = [0u8; 2];
    read_exact(&mut r, &mut b2, "version")?;
    let version = u16::from_le_bytes(b2);
    if version != CHECKPOINT_VERSION {
        return Err(NnError::Checkpoint(format!(
            "unsupported version {version}, expected {CHECKPOINT_VERSION}"
        )));
    }
    let mut b8 = [0u8; 8];
    read_exact(&mut r, &mut b8, "spec hash")?;
    let found = u64::from_le_bytes(b8);
    let expected = spec.spec_hash();
    if found != expected {
        return Err(NnError::SpecHashMismatch { expected, found });
    }
    let shapes = spec.param_shapes()?;
    let mut b4 = [0u8; 4];
    read_exact(&mut r, &mut b4, "tensor count")?;
    let count = u32::from_le_bytes(b4) as usize;
    if count != shapes.len() {
        return Err(NnError::Checkpoint(format!(
            "{count} tensors stored, model has {}",
            shapes.len()
        )));
    }
    let mut params = Vec::with_capacity(count);
    for (i, shape) in shapes.iter().enumerate() {
        read_exact(&mut r, &mut b8, "tensor length")?;
        let len = u64::from_le_bytes(b8);
        let want: usize = shape.iter().product();
        if len != want as u64 {
            return Err(NnError::Checkpoint(format!(
                "tensor {i} stores {len} values, expected {want}"
            )));
        }
        let mut raw = vec![0u8; want * 4];
        read_exact(&mut r, &mut raw, "tensor data")?;
        let data = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        params.push(Tensor::from_vec(shape, data)?);
    }
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(NnError::Checkpoint("trailing bytes after last tensor".into()));
    }
    Network::from_params(spec.clone(), params)
}

pub fn save_checkpoint(path: &Path, net: &Network<f32>) -> Result<(), NnError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_checkpoint(&mut w, net)?;
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path, spec: &ModelSpec) -> Result<Network<f32>, NnError> {
    read_checkpoint(BufReader::new(File::open(path)?), spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::spec::{Activation, LayerSpec};

    fn spec(units: usize) -> ModelSpec {
        let mut s = ModelSpec::new(&[5]);
        let h = s.add(
            "h",
            LayerSpec::Dense {
                units,
                activation: Activation::Relu,
            },
            &[0],
        );
        s.add(
            "o",
            LayerSpec::Dense {
                units: 1,
                activation: Activation::Linear,
            },
            &[h],
        );
        s
    }

    #[test]
    fn layout_and_round_trip() {
        let net = Network::<f32>::new(spec(3), 11).unwrap();
        let mut bytes = Vec::new();
        write_checkpoint(&mut bytes, &net).unwrap();
        assert_eq!(&bytes[..4], b"CHKW");
        assert_eq!(bytes.len(), 4 + 2 + 8 + 4 + 4 * 8 + 4 * (15 + 3 + 3 + 1));
        let back = read_checkpoint(bytes.as_slice(), &spec(3)).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn rejects_other_architectures_and_damage() {
        let net = Network::<f32>::new(spec(3), 11).unwrap();
        let mut bytes = Vec::new();
        write_checkpoint(&mut bytes, &net).unwrap();
        assert!(matches!(
            read_checkpoint(bytes.as_slice(), &spec(4)),
            Err(NnError::SpecHashMismatch { .. })
        ));
        assert!(matches!(
            read_checkpoint(&bytes[..bytes.len() - 1], &spec(3)),
            Err(NnError::Checkpoint(_))
        ));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(read_checkpoint(extra.as_slice(), &spec(3)), Err(NnError::Checkpoint(_))));
        let mut bad = bytes;
        bad[0] = b'X';
        assert!(matches!(read_checkpoint(bad.as_slice(), &spec(3)), Err(NnError::Checkpoint(_))));
    }
}
