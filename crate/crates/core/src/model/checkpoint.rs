//! Checkpoint file.
//!
//! ```text
//! magic "EXCKP\0" | version u16 | config str (key=value lines)
//! 3 x (count u32, count x token str)       code, SBT, comment vocabularies
//! parameter block                            see ParamStore::encode
//! ```

use super::{ModelConfig, ModelError, RefineModel, Vocabulary};
use crate::autodiff::ParamStore;
use crate::binio::{DecodeError, Reader, Writer};
use crate::formats::{format_key_values, parse_key_values};

pub const CHECKPOINT_MAGIC: &[u8; 6] = b"EXCKP\0";
pub const CHECKPOINT_VERSION: u16 = 1;

fn invalid(msg: impl Into<String>) -> ModelError {
    ModelError::Checkpoint(DecodeError::Invalid(msg.into()))
}

impl RefineModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.bytes(CHECKPOINT_MAGIC);
        w.u16(CHECKPOINT_VERSION);
        w.string(&format_key_values(&self.config.to_pairs()));
        for v in [&self.code_vocab, &self.sbt_vocab, &self.comment_vocab] {
            w.u32(v.len() as u32);
            for t in v.tokens() {
                w.string(t);
            }
        }
        self.params.encode_into(&mut w);
        w.buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ModelError> {
        let mut r = Reader::new(bytes);
        r.magic(CHECKPOINT_MAGIC)?;
        let version = r.u16()?;
        if version != CHECKPOINT_VERSION {
            return Err(DecodeError::Version(version).into());
        }
        let text = r.string()?;
        let pairs = parse_key_values(&text).map_err(|e| invalid(e.to_string()))?;
        let config = ModelConfig::from_pairs(&pairs)?;
        let mut vocabs = Vec::with_capacity(3);
        for _ in 0..3 {
            let n = r.count(4)?;
            let tokens = (0..n).map(|_| r.string()).collect::<Result<Vec<_>, _>>()?;
            vocabs.push(Vocabulary::from_tokens(tokens).ok_or_else(|| invalid("malformed vocabulary"))?);
        }
        let params = ParamStore::decode_from(&mut r)?;
        if !r.is_empty() {
            return Err(invalid("trailing bytes after checkpoint"));
        }
        let comment = vocabs.pop().expect("three vocabularies");
        let sbt = vocabs.pop().expect("three vocabularies");
        let code = vocabs.pop().expect("three vocabularies");
        RefineModel::from_parts(config, code, sbt, comment, params)
    }
}
