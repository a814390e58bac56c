//! Little-endian primitives for the versioned binary file formats.
//!
//! All multi-byte values are little-endian. Strings and sequences are
//! length-prefixed with a u32. Readers fail with a `Corrupt` error on
//! truncation, oversized lengths, or trailing bytes.

use std::io::{Read, Write};

use crate::error::{Error, Result};

// Upper bound on any single length prefix; a corrupt length field should
// fail fast instead of attempting a huge allocation.
const MAX_LEN: u32 = 1 << 30;

pub struct BinWriter<W: Write> {
    inner: W,
}

impl<W: Write> BinWriter<W> {
    pub fn new(inner: W) -> Self {
        Self { inner }
    }

    pub fn magic(&mut self, magic: &[u8; 4]) -> Result<()> {
        self.inner.write_all(magic)?;
        Ok(())
    }

    pub fn u8(&mut self, v: u8) -> Result<()> {
        self.inner.write_all(&[v])?;
        Ok(())
    }

    pub fn u32(&mut self, v: u32) -> Result<()> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn u64(&mut self, v: u64) -> Result<()> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn f32(&mut self, v: f32) -> Result<()> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn f64(&mut self, v: f64) -> Result<()> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn string(&mut self, s: &str) -> Result<()> {
        self.u32(s.len() as u32)?;
        self.inner.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

pub struct BinReader<R: Read> {
    inner: R,
    what: &'static str,
}

impl<R: Read> BinReader<R> {
    pub fn new(inner: R, what: &'static str) -> Self {
        Self { inner, what }
    }

    fn fill(&mut self, buf: &mut [u8]) -> Result<()> {
        self.inner
            .read_exact(buf)
            .map_err(|_| Error::corrupt(self.what, "unexpected end of file"))
    }

    pub fn expect_magic(&mut self, magic: &[u8; 4]) -> Result<()> {
        let mut buf = [0u8; 4];
        self.fill(&mut buf)?;
        if &buf != magic {
            return Err(Error::corrupt(self.what, "bad magic bytes"));
        }
        Ok(())
    }

    pub fn expect_version(&mut self, expected: u32) -> Result<()> {
        let found = self.u32()?;
        if found != expected {
            return Err(Error::VersionMismatch {
                what: self.what,
                expected,
                found,
            });
        }
        Ok(())
    }

    pub fn u8(&mut self) -> Result<u8> {
        let mut buf = [0u8; 1];
        self.fill(&mut buf)?;
        Ok(buf[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        let mut buf = [0u8; 4];
        self.fill(&mut buf)?;
        Ok(u32::from_le_bytes(buf))
    }

    pub fn u64(&mut self) -> Result<u64> {
        let mut buf = [0u8; 8];
        self.fill(&mut buf)?;
        Ok(u64::from_le_bytes(buf))
    }

    pub fn f32(&mut self) -> Result<f32> {
        let mut buf = [0u8; 4];
        self.fill(&mut buf)?;
        Ok(f32::from_le_bytes(buf))
    }

    pub fn f64(&mut self) -> Result<f64> {
        let mut buf = [0u8; 8];
        self.fill(&mut buf)?;
        Ok(f64::from_le_bytes(buf))
    }

    pub fn len(&mut self) -> Result<usize> {
        let v = self.u32()?;
        if v > MAX_LEN {
            return Err(Error::corrupt(self.what, format!("implausible length {v}")));
        }
        Ok(v as usize)
    }

    pub fn string(&mut self) -> Result<String> {
        let len = self.len()?;
        let mut buf = vec![0u8; len];
        self.fill(&mut buf)?;
        String::from_utf8(buf).map_err(|_| Error::corrupt(self.what, "invalid utf-8 string"))
    }

    /// Assert the stream is fully consumed.
    pub fn expect_eof(&mut self) -> Result<()> {
        let mut buf = [0u8; 1];
        match self.inner.read(&mut buf) {
            Ok(0) => Ok(()),
            Ok(_) => Err(Error::corrupt(self.what, "trailing bytes")),
            Err(e) => Err(e.into()),
        }
    }
}
