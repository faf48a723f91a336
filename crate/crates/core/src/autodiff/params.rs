use std::collections::HashMap;

use super::Tensor;
use crate::binio::{DecodeError, Reader, Writer};

pub const PARAMS_MAGIC: &[u8; 6] = b"EXPRM\0";
pub const PARAMS_VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(pub(crate) usize);

/// Named trainable tensors with a gradient buffer of the same shape each.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamStore {
    names: Vec<String>,
    values: Vec<Tensor>,
    grads: Vec<Tensor>,
    by_name: HashMap<String, ParamId>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a parameter. Panics on a duplicate name.
    pub fn add(&mut self, name: impl Into<String>, value: Tensor) -> ParamId {
        let name = name.into();
        assert!(!self.by_name.contains_key(&name), "duplicate parameter `{name}`");
        let id = ParamId(self.values.len());
        self.grads.push(Tensor::zeros(value.rows, value.cols));
        self.values.push(value);
        self.by_name.insert(name.clone(), id);
        self.names.push(name);
        id
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.values.len()).map(ParamId)
    }

    pub fn id(&self, name: &str) -> Option<ParamId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn value(&self, id: ParamId) -> &Tensor {
        &self.values[id.0]
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.values[id.0]
    }

    pub fn grad(&self, id: ParamId) -> &Tensor {
        &self.grads[id.0]
    }

    pub(crate) fn grad_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.grads[id.0]
    }

    pub fn zero_grads(&mut self) {
        for g in &mut self.grads {
            g.data.fill(0.0);
        }
    }

    pub fn grad_norm(&self) -> f64 {
        self.grads.iter().map(Tensor::squared_norm).sum::<f64>().sqrt()
    }

    pub fn parameter_count(&self) -> usize {
        self.values.iter().map(Tensor::len).sum()
    }

    pub(crate) fn encode_into(&self, w: &mut Writer) {
        w.bytes(PARAMS_MAGIC);
        w.u16(PARAMS_VERSION);
        w.u32(self.values.len() as u32);
        for (name, t) in self.names.iter().zip(&self.values) {
            w.string(name);
            w.u32(t.rows as u32);
            w.u32(t.cols as u32);
            for &v in &t.data {
                w.f64(v);
            }
        }
    }

    pub(crate) fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        r.magic(PARAMS_MAGIC)?;
        let version = r.u16()?;
        if version != PARAMS_VERSION {
            return Err(DecodeError::Version(version));
        }
        let n = r.count(12)?;
        let mut store = ParamStore::new();
        for _ in 0..n {
            let name = r.string()?;
            if store.by_name.contains_key(&name) {
                return Err(DecodeError::Invalid(format!("duplicate parameter `{name}`")));
            }
            let rows = r.u32()? as usize;
            let cols = r.u32()? as usize;
            let len = rows
                .checked_mul(cols)
                .filter(|l| l.saturating_mul(8) <= r.remaining())
                .ok_or_else(|| DecodeError::Invalid(format!("bad shape for `{name}`")))?;
            let mut data = Vec::with_capacity(len);
            for _ in 0..len {
                let v = r.f64()?;
                if !v.is_finite() {
                    return Err(DecodeError::Invalid(format!("non-finite value in `{name}`")));
                }
                data.push(v);
            }
            store.add(name, Tensor::new(rows, cols, data));
        }
        Ok(store)
    }

    /// Versioned little-endian file of `(name, shape, values)` entries.
    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::default();
        self.encode_into(&mut w);
        w.buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        let store = Self::decode_from(&mut r)?;
        if !r.is_empty() {
            return Err(DecodeError::Invalid("trailing bytes after parameters".into()));
        }
        Ok(store)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut s = ParamStore::new();
        s.add("w", Tensor::new(2, 2, vec![1.0, -2.0, 0.5, 3.25]));
        s.add("b", Tensor::row_vector(vec![0.1]));
        let bytes = s.encode();
        let back = ParamStore::decode(&bytes).unwrap();
        assert_eq!(back, s);
        assert!(ParamStore::decode(&bytes[..bytes.len() - 3]).is_err());
        let mut nan = bytes.clone();
        let tail = nan.len() - 8;
        nan[tail..].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(ParamStore::decode(&nan).is_err());
    }

    #[test]
    #[should_panic(expected = "duplicate")]
    fn duplicate_names_panic() {
        let mut s = ParamStore::new();
        s.add("w", Tensor::zeros(1, 1));
        s.add("w", Tensor::zeros(1, 1));
    }
}
