//! Canonical Recursive Length Prefix codec.
//!
//! Every hashed structure in the simulator (headers, trie nodes, receipts,
//! logs, call data arguments) goes through this module. Decoding is strict:
//! any encoding that is not the unique canonical form of its item is
//! rejected, so two distinct octet strings never decode to the same item.

use thiserror::Error;

use crate::primitives::{Address, Digest};

/// Nesting bound for the decoder. Encodings deeper than this are rejected
/// as malformed so adversarial input cannot exhaust the stack.
pub const MAX_DEPTH: usize = 128;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum RlpItem {
    Bytes(Vec<u8>),
    List(Vec<RlpItem>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RlpError {
    #[error("malformed rlp: {0}")]
    Malformed(&'static str),
    #[error("non-canonical rlp: {0}")]
    NonCanonical(&'static str),
    #[error("unexpected rlp shape: {0}")]
    Shape(&'static str),
}

impl std::fmt::Debug for RlpItem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RlpItem::Bytes(b) => write!(f, "Bytes(0x{})", hex::encode(b)),
            RlpItem::List(items) => f.debug_list().entries(items).finish(),
        }
    }
}

impl RlpItem {
    pub fn bytes(b: impl Into<Vec<u8>>) -> Self {
        RlpItem::Bytes(b.into())
    }

    pub fn empty() -> Self {
        RlpItem::Bytes(Vec::new())
    }

    /// Big-endian minimal integer; zero is the empty byte string.
    pub fn uint(value: u128) -> Self {
        RlpItem::Bytes(uint_to_bytes(value))
    }

    pub fn digest(d: &Digest) -> Self {
        RlpItem::Bytes(d.0.to_vec())
    }

    pub fn address(a: &Address) -> Self {
        RlpItem::Bytes(a.0.to_vec())
    }

    pub fn as_bytes(&self) -> Result<&[u8], RlpError> {
        match self {
            RlpItem::Bytes(b) => Ok(b),
            RlpItem::List(_) => Err(RlpError::Shape("expected bytes, found list")),
        }
    }

    pub fn as_list(&self) -> Result<&[RlpItem], RlpError> {
        match self {
            RlpItem::List(items) => Ok(items),
            RlpItem::Bytes(_) => Err(RlpError::Shape("expected list, found bytes")),
        }
    }

    /// List with exactly `n` elements.
    pub fn as_list_of(&self, n: usize) -> Result<&[RlpItem], RlpError> {
        let items = self.as_list()?;
        if items.len() != n {
            return Err(RlpError::Shape("list has the wrong number of items"));
        }
        Ok(items)
    }

    pub fn as_uint(&self) -> Result<u128, RlpError> {
        bytes_to_uint(self.as_bytes()?)
    }

    pub fn as_u64(&self) -> Result<u64, RlpError> {
        u64::try_from(self.as_uint()?).map_err(|_| RlpError::Shape("integer exceeds 64 bits"))
    }

    pub fn as_digest(&self) -> Result<Digest, RlpError> {
        Digest::from_slice(self.as_bytes()?).ok_or(RlpError::Shape("expected 32 octets"))
    }

    pub fn as_address(&self) -> Result<Address, RlpError> {
        Address::from_slice(self.as_bytes()?).ok_or(RlpError::Shape("expected 20 octets"))
    }

    /// Empty bytes decode to `None`, 20 octets to an address.
    pub fn as_optional_address(&self) -> Result<Option<Address>, RlpError> {
        let b = self.as_bytes()?;
        if b.is_empty() {
            Ok(None)
        } else {
            self.as_address().map(Some)
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        encode(self)
    }
}

pub fn uint_to_bytes(value: u128) -> Vec<u8> {
    let raw = value.to_be_bytes();
    let skip = raw.iter().take_while(|b| **b == 0).count();
    raw[skip..].to_vec()
}

/// Strict inverse of [`uint_to_bytes`]: leading zero octets are rejected.
pub fn bytes_to_uint(bytes: &[u8]) -> Result<u128, RlpError> {
    if bytes.len() > 16 {
        return Err(RlpError::Shape("integer exceeds 128 bits"));
    }
    if bytes.first() == Some(&0) {
        return Err(RlpError::NonCanonical("integer with leading zero octet"));
    }
    Ok(bytes.iter().fold(0u128, |acc, b| (acc << 8) | u128::from(*b)))
}

pub fn encode(item: &RlpItem) -> Vec<u8> {
    let mut out = Vec::new();
    encode_into(item, &mut out);
    out
}

fn encode_into(item: &RlpItem, out: &mut Vec<u8>) {
    match item {
        RlpItem::Bytes(b) if b.len() == 1 && b[0] < 0x80 => out.push(b[0]),
        RlpItem::Bytes(b) => {
            push_header(out, 0x80, b.len());
            out.extend_from_slice(b);
        }
        RlpItem::List(items) => {
            let mut payload = Vec::new();
            for it in items {
                encode_into(it, &mut payload);
            }
            push_header(out, 0xc0, payload.len());
            out.extend_from_slice(&payload);
        }
    }
}

fn push_header(out: &mut Vec<u8>, offset: u8, len: usize) {
    if len <= 55 {
        out.push(offset + len as u8);
    } else {
        let len_bytes = uint_to_bytes(len as u128);
        out.push(offset + 55 + len_bytes.len() as u8);
        out.extend_from_slice(&len_bytes);
    }
}

/// Decodes exactly one item, consuming all of `data`.
pub fn decode(data: &[u8]) -> Result<RlpItem, RlpError> {
    let (item, used) = decode_one(data, 0)?;
    if used != data.len() {
        return Err(RlpError::Malformed("trailing octets after item"));
    }
    Ok(item)
}

enum Header {
    Bytes { start: usize, len: usize },
    List { start: usize, len: usize },
    Single,
}

fn read_header(data: &[u8]) -> Result<Header, RlpError> {
    let prefix = *data.first().ok_or(RlpError::Malformed("empty input"))?;
    let header = match prefix {
        0x00..=0x7f => Header::Single,
        0x80..=0xb7 => {
            let len = usize::from(prefix - 0x80);
            if len == 1 {
                match data.get(1) {
                    Some(b) if *b < 0x80 => {
                        return Err(RlpError::NonCanonical("single octet below 0x80 wrapped in a string prefix"))
                    }
                    _ => {}
                }
            }
            Header::Bytes { start: 1, len }
        }
        0xb8..=0xbf => {
            let len = read_long_length(data, usize::from(prefix - 0xb7))?;
            Header::Bytes { start: 1 + usize::from(prefix - 0xb7), len }
        }
        0xc0..=0xf7 => Header::List { start: 1, len: usize::from(prefix - 0xc0) },
        0xf8..=0xff => {
            let len = read_long_length(data, usize::from(prefix - 0xf7))?;
            Header::List { start: 1 + usize::from(prefix - 0xf7), len }
        }
    };
    Ok(header)
}

fn read_long_length(data: &[u8], len_of_len: usize) -> Result<usize, RlpError> {
    let raw = data
        .get(1..1 + len_of_len)
        .ok_or(RlpError::Malformed("truncated length prefix"))?;
    if raw[0] == 0 {
        return Err(RlpError::NonCanonical("length prefix with leading zero"));
    }
    if raw.len() > std::mem::size_of::<usize>() {
        return Err(RlpError::Malformed("length prefix exceeds input"));
    }
    let len = raw.iter().fold(0usize, |acc, b| (acc << 8) | usize::from(*b));
    if len <= 55 {
        return Err(RlpError::NonCanonical("long form used for a short payload"));
    }
    Ok(len)
}

fn payload(data: &[u8], start: usize, len: usize) -> Result<&[u8], RlpError> {
    let end = start
        .checked_add(len)
        .ok_or(RlpError::Malformed("length prefix exceeds input"))?;
    data.get(start..end)
        .ok_or(RlpError::Malformed("payload truncated"))
}

fn decode_one(data: &[u8], depth: usize) -> Result<(RlpItem, usize), RlpError> {
    if depth > MAX_DEPTH {
        return Err(RlpError::Malformed("nesting too deep"));
    }
    match read_header(data)? {
        Header::Single => Ok((RlpItem::Bytes(vec![data[0]]), 1)),
        Header::Bytes { start, len } => {
            let body = payload(data, start, len)?;
            Ok((RlpItem::Bytes(body.to_vec()), start + len))
        }
        Header::List { start, len } => {
            let mut body = payload(data, start, len)?;
            let mut items = Vec::new();
            while !body.is_empty() {
                let (item, used) = decode_one(body, depth + 1)?;
                items.push(item);
                body = &body[used..];
            }
            Ok((RlpItem::List(items), start + len))
        }
    }
}

/// Splits a list encoding into the raw encodings of its elements without
/// decoding them. The slices are exactly what [`encode`] would produce for
/// each element.
pub fn list_elements(data: &[u8]) -> Result<Vec<&[u8]>, RlpError> {
    // Full strict decode first so non-canonical nested content is rejected.
    decode(data)?.as_list()?;
    let Header::List { start, len } = read_header(data)? else {
        return Err(RlpError::Shape("expected list, found bytes"));
    };
    let mut body = &data[start..start + len];
    let mut out = Vec::new();
    while !body.is_empty() {
        let used = match read_header(body)? {
            Header::Single => 1,
            Header::Bytes { start, len } | Header::List { start, len } => start + len,
        };
        out.push(&body[..used]);
        body = &body[used..];
    }
    Ok(out)
}
