//! Binary container for tensor trains.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic   b"QTTF"
//! version u32 = 1
//! L       u64
//! L × (left u64, phys u64, right u64)
//! for each core, row-major over (left, phys, right): re f64, im f64
//! ```

use std::io::{Read, Write};
use std::path::Path;

use super::{Core, TensorTrain, C64};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"QTTF";
const VERSION: u32 = 1;

impl TensorTrain {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        for c in self.cores() {
            let (l, s, r) = c.shape();
            for v in [l, s, r] {
                w.write_all(&(v as u64).to_le_bytes())?;
            }
        }
        for c in self.cores() {
            for v in c.data() {
                w.write_all(&v.re.to_le_bytes())?;
                w.write_all(&v.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a tensor-train file (bad magic)".into()));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported tensor-train file version {version}")));
        }
        let len = read_u64(&mut r)? as usize;
        if len == 0 || len > 1 << 20 {
            return Err(Error::Format(format!("implausible core count {len}")));
        }
        let mut shapes = Vec::with_capacity(len);
        for _ in 0..len {
            let l = read_u64(&mut r)? as usize;
            let s = read_u64(&mut r)? as usize;
            let rr = read_u64(&mut r)? as usize;
            shapes.push((l, s, rr));
        }
        let mut cores = Vec::with_capacity(len);
        for (l, s, rr) in shapes {
            let n = l
                .checked_mul(s)
                .and_then(|x| x.checked_mul(rr))
                .ok_or_else(|| Error::Format("core size overflows".into()))?;
            let mut data = Vec::with_capacity(n);
            for _ in 0..n {
                let re = read_f64(&mut r)?;
                let im = read_f64(&mut r)?;
                data.push(C64::new(re, im));
            }
            cores.push(Core::new(l, s, rr, data).map_err(|e| Error::Format(e.to_string()))?);
        }
        TensorTrain::new(cores).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn header_layout_is_fixed() {
        let tt = TensorTrain::constant(&[2], C64::new(1.5, -2.0)).unwrap();
        let mut buf = Vec::new();
        tt.write_to(&mut buf).unwrap();
        let mut expected = Vec::new();
        expected.extend_from_slice(b"QTTF");
        expected.extend_from_slice(&1u32.to_le_bytes());
        expected.extend_from_slice(&1u64.to_le_bytes());
        for v in [1u64, 2, 1] {
            expected.extend_from_slice(&v.to_le_bytes());
        }
        for _ in 0..2 {
            expected.extend_from_slice(&1.5f64.to_le_bytes());
            expected.extend_from_slice(&(-2.0f64).to_le_bytes());
        }
        assert_eq!(buf, expected);
    }

    #[test]
    fn rejects_garbage() {
        assert!(TensorTrain::read_from(&b"NOPE"[..]).is_err());
        let tt = TensorTrain::constant(&[2, 2], C64::new(1.0, 0.0)).unwrap();
        let mut buf = Vec::new();
        tt.write_to(&mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(TensorTrain::read_from(&buf[..]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(seed in any::<u64>(), len in 1usize..6, chi in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dims = vec![2; len];
            let bonds = vec![chi; len - 1];
            let tt = TensorTrain::random(&dims, &bonds, &mut rng).unwrap();
            let mut buf = Vec::new();
            tt.write_to(&mut buf).unwrap();
            prop_assert_eq!(TensorTrain::read_from(&buf[..]).unwrap(), tt);
        }
    }
}
