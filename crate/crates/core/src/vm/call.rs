//! Call-data and contract-creation payload conventions.
//!
//! Invocation data is a 4-octet selector (first four octets of the keccak256
//! of the function signature) followed by the RLP encoding of the argument
//! list. Creation data is `rlp([handler name, [args..]])`.

use std::fmt;

use crate::primitives::keccak256;
use crate::rlp::{self, RlpError, RlpItem};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Selector(pub [u8; 4]);

impl Selector {
    pub fn of(signature: &str) -> Self {
        let d = keccak256(signature.as_bytes());
        Selector([d.0[0], d.0[1], d.0[2], d.0[3]])
    }
}

impl fmt::Debug for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

pub fn encode_call(signature: &str, args: Vec<RlpItem>) -> Vec<u8> {
    let mut out = Selector::of(signature).0.to_vec();
    out.extend(RlpItem::List(args).encode());
    out
}

pub fn decode_call(data: &[u8]) -> Result<(Selector, Vec<RlpItem>), RlpError> {
    if data.len() < 4 {
        return Err(RlpError::Malformed("call data shorter than a selector"));
    }
    let selector = Selector([data[0], data[1], data[2], data[3]]);
    match rlp::decode(&data[4..])? {
        RlpItem::List(args) => Ok((selector, args)),
        RlpItem::Bytes(_) => Err(RlpError::Shape("call arguments must be a list")),
    }
}

/// What a creation transaction or message carries in place of bytecode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CreationPayload {
    pub handler: String,
    pub args: Vec<RlpItem>,
}

impl CreationPayload {
    pub fn new(handler: impl Into<String>, args: Vec<RlpItem>) -> Self {
        CreationPayload {
            handler: handler.into(),
            args,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        RlpItem::List(vec![
            RlpItem::bytes(self.handler.as_bytes().to_vec()),
            RlpItem::List(self.args.clone()),
        ])
        .encode()
    }

    pub fn decode(data: &[u8]) -> Result<Self, RlpError> {
        let item = rlp::decode(data)?;
        let items = item.as_list_of(2)?;
        let handler = String::from_utf8(items[0].as_bytes()?.to_vec())
            .map_err(|_| RlpError::Shape("handler name is not utf-8"))?;
        Ok(CreationPayload {
            handler,
            args: items[1].as_list()?.to_vec(),
        })
    }
}
