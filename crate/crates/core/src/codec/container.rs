//! On-disk container: `"BLC1"`, bit length as `u64` little-endian, then the
//! stream bits packed MSB-first and zero-padded to a byte boundary.

use super::{Bits, CodeStream, CodecError};

pub const CONTAINER_MAGIC: &[u8; 4] = b"BLC1";
const PREFIX_LEN: usize = 12;

pub fn write_container(stream: &CodeStream) -> Vec<u8> {
    let mut out = Vec::with_capacity(PREFIX_LEN + stream.bits().as_bytes().len());
    out.extend_from_slice(CONTAINER_MAGIC);
    out.extend_from_slice(&(stream.bit_length() as u64).to_le_bytes());
    out.extend_from_slice(stream.bits().as_bytes());
    out
}

/// Parses a container. Offsets in errors count stream bits, not file bytes.
pub fn read_container(bytes: &[u8]) -> Result<CodeStream, CodecError> {
    if bytes.len() < PREFIX_LEN {
        return Err(CodecError::Malformed {
            offset: 0,
            reason: format!(
                "container prefix needs {PREFIX_LEN} bytes, file has {}",
                bytes.len()
            ),
        });
    }
    if &bytes[..4] != CONTAINER_MAGIC {
        return Err(CodecError::Malformed {
            offset: 0,
            reason: format!("bad magic {:02x?}", &bytes[..4]),
        });
    }
    let declared = u64::from_le_bytes(bytes[4..PREFIX_LEN].try_into().expect("8 bytes"));
    let payload = &bytes[PREFIX_LEN..];
    let available = (payload.len() as u64 * 8).min(declared) as usize;
    let bits = Bits::from_bytes(payload.to_vec(), available);
    let stream = CodeStream::from_bits(&bits)?;
    if stream.bit_length() as u64 != declared {
        return Err(CodecError::Malformed {
            offset: stream.bit_length(),
            reason: format!(
                "container declares {declared} bits but the stream ends after {}",
                stream.bit_length()
            ),
        });
    }
    Ok(stream)
}
