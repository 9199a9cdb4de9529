//! Small contracts used by scenarios and tests as event sources and
//! release targets.

use std::sync::Arc;

use thiserror::Error;

use crate::primitives::Digest;
use crate::rlp::{RlpError, RlpItem};
use crate::vm::{encode_call, ContractHandler, HandlerError, HandlerRegistry, Host, Selector, VmError};

pub const EVENT_SOURCE: &str = "event-source";
pub const SENTINEL: &str = "sentinel";
pub const REVERTER: &str = "reverter";

pub const SIG_EMIT: &str = "emit(bytes32[],bytes)";
pub const SIG_POKE: &str = "poke(uint256)";
pub const SIG_DEPOSIT: &str = "deposit()";

/// Storage key the sentinel writes on `poke`.
pub const SENTINEL_KEY: &[u8] = b"sentinel";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("reverter always reverts")]
pub struct Reverted;

fn unknown_selector() -> HandlerError {
    VmError::MalformedCallData(RlpError::Shape("unknown selector")).into()
}

/// Emits whatever log the caller asks for.
pub struct EventSource;

impl ContractHandler for EventSource {
    fn init(&self, _: &mut Host<'_, '_>, _: &[RlpItem]) -> Result<(), HandlerError> {
        Ok(())
    }

    fn call(&self, host: &mut Host<'_, '_>, selector: Selector, args: &[RlpItem]) -> Result<(), HandlerError> {
        if selector != Selector::of(SIG_EMIT) {
            return Err(unknown_selector());
        }
        let [topics, data] = args else {
            return Err(RlpError::Shape("emit takes topics and data").into());
        };
        let topics = topics
            .as_list()?
            .iter()
            .map(RlpItem::as_digest)
            .collect::<Result<Vec<_>, _>>()?;
        host.emit_log(topics, data.as_bytes()?.to_vec())?;
        Ok(())
    }
}

/// Records the last poked value; also accepts plain deposits.
pub struct Sentinel;

impl ContractHandler for Sentinel {
    fn init(&self, host: &mut Host<'_, '_>, args: &[RlpItem]) -> Result<(), HandlerError> {
        if let Some(tag) = args.first() {
            host.storage_set(b"tag", tag.as_bytes()?.to_vec())?;
        }
        Ok(())
    }

    fn call(&self, host: &mut Host<'_, '_>, selector: Selector, args: &[RlpItem]) -> Result<(), HandlerError> {
        if selector == Selector::of(SIG_POKE) {
            let v = args.first().ok_or(RlpError::Shape("poke takes a value"))?.as_uint()?;
            host.storage_set(SENTINEL_KEY, crate::rlp::uint_to_bytes(v))?;
            Ok(())
        } else if selector == Selector::of(SIG_DEPOSIT) {
            Ok(())
        } else {
            Err(unknown_selector())
        }
    }
}

pub struct Reverter;

impl ContractHandler for Reverter {
    fn init(&self, _: &mut Host<'_, '_>, _: &[RlpItem]) -> Result<(), HandlerError> {
        Ok(())
    }

    fn call(&self, _: &mut Host<'_, '_>, _: Selector, _: &[RlpItem]) -> Result<(), HandlerError> {
        Err(Reverted.into())
    }
}

/// Call data asking an [`EventSource`] to emit `topics` and `data`.
pub fn emit_call_data(topics: &[Digest], data: &[u8]) -> Vec<u8> {
    encode_call(
        SIG_EMIT,
        vec![
            RlpItem::List(topics.iter().map(RlpItem::digest).collect()),
            RlpItem::bytes(data.to_vec()),
        ],
    )
}

pub fn register_stock(reg: &mut HandlerRegistry) {
    reg.register(EVENT_SOURCE, Arc::new(EventSource));
    reg.register(SENTINEL, Arc::new(Sentinel));
    reg.register(REVERTER, Arc::new(Reverter));
}
