//! Proxy and hub contracts for event-driven transactions.
//!
//! A user deploys a proxy holding a reserved transaction, funds it with the
//! service fee plus the reserved value, and announces it through the hub.
//! Anyone who can show, with a receipt proof against a recent block header,
//! that the prescribed log entry was emitted gets the reserved transaction
//! released and is paid the fee.
//!
//! Lifecycle: `Deployed -> Funded -> Registered -> Triggered | Closed`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{BlockHeader, Chain, LogEntry, Receipt};
use crate::contracts;
use crate::primitives::{keccak256, Address, BlockNumber, Digest, Gas, Wei};
use crate::rlp::{self, RlpError, RlpItem};
use crate::trie::{self, MerkleProof, TrieError};
use crate::vm::{
    encode_call, ContractHandler, CreationPayload, HandlerError, HandlerRegistry, Host, Selector,
    Transaction, TxKind, VmError, World,
};

pub const PROXY_HANDLER: &str = "warden-proxy";
pub const HUB_HANDLER: &str = "warden-hub";

pub const SIG_CHARGE: &str = "charge()";
pub const SIG_EVENT_VERIFY: &str = "eventVerify(uint256,bytes,bytes[],uint256,uint256)";
pub const SIG_CLOSE: &str = "close()";
pub const SIG_ON_REGISTERED: &str = "onRegistered(address)";
pub const SIG_NEW_SERVICE: &str = "newService(address)";
pub const NEW_SERVICE_EVENT: &str = "NewService(address)";

/// Topic of the hub's announcement log.
pub fn new_service_topic() -> Digest {
    keccak256(NEW_SERVICE_EVENT.as_bytes())
}

mod keys {
    pub const OWNER: &[u8] = b"owner";
    pub const HUB: &[u8] = b"hub";
    pub const ET_DATA: &[u8] = b"et-data";
    pub const COMMITMENT: &[u8] = b"commitment";
    pub const EMITTER: &[u8] = b"emitter";
    pub const FEE: &[u8] = b"fee";
    pub const STATE: &[u8] = b"state";
    pub const RELEASE_OK: &[u8] = b"release-ok";
    pub const SERVICE_PREFIX: &[u8] = b"service:";
    pub const SERVICE_COUNT: &[u8] = b"service-count";
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WardenError {
    #[error("proxy is {found}, expected {expected}")]
    WrongState { expected: &'static str, found: ProxyState },
    #[error("charge of {provided} is below the required {required}")]
    InsufficientFunding { required: Wei, provided: Wei },
    #[error("caller is not the proxy owner")]
    NotOwner,
    #[error("caller is not the proxy's hub")]
    NotHub,
    #[error("proxy already registered")]
    AlreadyRegistered,
    #[error("block {0} is outside the blockhash window")]
    BlockOutOfWindow(BlockNumber),
    #[error("block data does not hash to the block's header digest")]
    BlockMismatch,
    #[error("receipt proof rejected: {0}")]
    ProofInvalid(#[from] TrieError),
    #[error("log does not match the prescribed event: {0}")]
    LogMismatch(&'static str),
    #[error("bad arguments: {0}")]
    BadArguments(#[from] RlpError),
    #[error("account is not a warden proxy")]
    NotAProxy,
    #[error("reserved transaction is inconsistent: {0}")]
    InconsistentReservation(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProxyState {
    Deployed,
    Funded,
    Registered,
    Triggered,
    Closed,
}

impl ProxyState {
    fn to_byte(self) -> u8 {
        match self {
            ProxyState::Deployed => 0,
            ProxyState::Funded => 1,
            ProxyState::Registered => 2,
            ProxyState::Triggered => 3,
            ProxyState::Closed => 4,
        }
    }

    fn from_byte(b: u8) -> Option<Self> {
        Some(match b {
            0 => ProxyState::Deployed,
            1 => ProxyState::Funded,
            2 => ProxyState::Registered,
            3 => ProxyState::Triggered,
            4 => ProxyState::Closed,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            ProxyState::Deployed => "deployed",
            ProxyState::Funded => "funded",
            ProxyState::Registered => "registered",
            ProxyState::Triggered => "triggered",
            ProxyState::Closed => "closed",
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, ProxyState::Triggered | ProxyState::Closed)
    }
}

impl fmt::Display for ProxyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProxyState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            ProxyState::Deployed,
            ProxyState::Funded,
            ProxyState::Registered,
            ProxyState::Triggered,
            ProxyState::Closed,
        ]
        .into_iter()
        .find(|p| p.name() == s)
        .ok_or_else(|| format!("unknown proxy state {s:?}"))
    }
}

/// The transaction a proxy holds back until the event is proven.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReservedTransaction {
    pub kind: TxKind,
    pub recipient: Option<Address>,
    pub value: Wei,
    /// Call data for invocations, a [`CreationPayload`] for creations.
    pub payload: Vec<u8>,
}

impl ReservedTransaction {
    pub fn fund_transfer(recipient: Address, value: Wei) -> Self {
        ReservedTransaction {
            kind: TxKind::FundTransfer,
            recipient: Some(recipient),
            value,
            payload: vec![],
        }
    }

    pub fn function_invocation(recipient: Address, value: Wei, call_data: Vec<u8>) -> Self {
        ReservedTransaction {
            kind: TxKind::FunctionInvocation,
            recipient: Some(recipient),
            value,
            payload: call_data,
        }
    }

    pub fn contract_creation(payload: CreationPayload) -> Self {
        ReservedTransaction {
            kind: TxKind::ContractCreation,
            recipient: None,
            value: 0,
            payload: payload.encode(),
        }
    }

    /// Same shape rules the vm applies when classifying transactions.
    pub fn check(&self) -> Result<(), WardenError> {
        let bad = WardenError::InconsistentReservation;
        match self.kind {
            TxKind::FundTransfer if self.recipient.is_none() => Err(bad("transfer without recipient")),
            TxKind::FundTransfer if self.value == 0 => Err(bad("transfer of zero value")),
            TxKind::FunctionInvocation if self.recipient.is_none() => Err(bad("invocation without recipient")),
            TxKind::FunctionInvocation if self.payload.is_empty() => Err(bad("invocation without call data")),
            TxKind::ContractCreation if self.recipient.is_some() => Err(bad("creation with a recipient")),
            TxKind::ContractCreation if self.value > 0 => Err(bad("value-bearing creation")),
            TxKind::ContractCreation if self.payload.is_empty() => Err(bad("creation without payload")),
            _ => Ok(()),
        }
    }

    pub fn to_rlp(&self) -> RlpItem {
        let kind = match self.kind {
            TxKind::FundTransfer => 0,
            TxKind::FunctionInvocation => 1,
            TxKind::ContractCreation => 2,
        };
        RlpItem::List(vec![
            RlpItem::uint(kind),
            self.recipient.as_ref().map_or_else(RlpItem::empty, RlpItem::address),
            RlpItem::uint(self.value),
            RlpItem::bytes(self.payload.clone()),
        ])
    }

    pub fn from_rlp(item: &RlpItem) -> Result<Self, WardenError> {
        let items = item.as_list_of(4)?;
        let kind = match items[0].as_uint()? {
            0 => TxKind::FundTransfer,
            1 => TxKind::FunctionInvocation,
            2 => TxKind::ContractCreation,
            _ => return Err(RlpError::Shape("unknown reserved transaction kind").into()),
        };
        let reserved = ReservedTransaction {
            kind,
            recipient: items[1].as_optional_address()?,
            value: items[2].as_uint()?,
            payload: items[3].as_bytes()?.to_vec(),
        };
        reserved.check()?;
        Ok(reserved)
    }
}

/// Construction parameters of a proxy. The owner is whoever creates it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProxyParams {
    pub hub: Address,
    pub reserved: ReservedTransaction,
    pub expected_event: LogEntry,
    pub service_fee: Wei,
}

impl ProxyParams {
    /// Minimum `charge` amount: service fee plus reserved value.
    pub fn required_funding(&self) -> Wei {
        self.service_fee + self.reserved.value
    }

    pub fn creation_payload(&self) -> CreationPayload {
        CreationPayload::new(
            PROXY_HANDLER,
            vec![
                RlpItem::address(&self.hub),
                self.reserved.to_rlp(),
                RlpItem::digest(&self.expected_event.digest()),
                RlpItem::address(&self.expected_event.emitter),
                RlpItem::uint(self.service_fee),
            ],
        )
    }
}

/// Proof that a log entry sits in a receipt of a recent block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofBundle {
    pub block_number: BlockNumber,
    /// RLP-encoded block header.
    pub block_data: Vec<u8>,
    pub proof: MerkleProof,
    pub receipt_index: u64,
    pub log_index: u64,
}

impl ProofBundle {
    pub fn to_args(&self) -> Vec<RlpItem> {
        vec![
            RlpItem::uint(u128::from(self.block_number)),
            RlpItem::bytes(self.block_data.clone()),
            self.proof.to_rlp(),
            RlpItem::uint(u128::from(self.receipt_index)),
            RlpItem::uint(u128::from(self.log_index)),
        ]
    }

    pub fn from_args(args: &[RlpItem]) -> Result<Self, WardenError> {
        if args.len() != 5 {
            return Err(RlpError::Shape("eventVerify takes five arguments").into());
        }
        Ok(ProofBundle {
            block_number: args[0].as_u64()?,
            block_data: args[1].as_bytes()?.to_vec(),
            proof: MerkleProof::from_rlp(&args[2]).map_err(|_| RlpError::Shape("proof must be a list of bytes"))?,
            receipt_index: args[3].as_u64()?,
            log_index: args[4].as_u64()?,
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        RlpItem::List(self.to_args()).encode()
    }

    pub fn decode(data: &[u8]) -> Result<Self, WardenError> {
        let item = rlp::decode(data)?;
        Self::from_args(item.as_list()?)
    }

    /// Honest bundle for receipt `receipt_index` of block `block_number`,
    /// read straight from the chain's stores.
    pub fn from_chain(
        chain: &Chain,
        block_number: BlockNumber,
        receipt_index: u64,
        log_index: u64,
    ) -> Result<Self, TrieError> {
        let block = chain
            .get_block(block_number)
            .map_err(|_| TrieError::UnknownIndex(receipt_index))?;
        let trie = chain
            .receipt_trie(block_number)
            .ok()
            .flatten()
            .ok_or(TrieError::UnknownIndex(receipt_index))?;
        Ok(ProofBundle {
            block_number,
            block_data: block.header.encode(),
            proof: trie.prove(receipt_index)?,
            receipt_index,
            log_index,
        })
    }

    /// Octets the proxy hashes while verifying this bundle.
    pub fn verified_octets(&self) -> usize {
        self.block_data.len() + self.proof.octets()
    }
}

/// Decoded view of a proxy's storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProxyStorage {
    pub owner: Address,
    pub hub: Address,
    pub et_data: ReservedTransaction,
    pub event_commitment: Digest,
    pub expected_emitter: Address,
    pub service_fee: Wei,
    pub state: ProxyState,
    /// Outcome of the release message once triggered.
    pub release_ok: Option<bool>,
    pub balance: Wei,
}

impl ProxyStorage {
    pub fn load(world: &World, proxy: &Address) -> Result<Self, WardenError> {
        let account = world.account(proxy).ok_or(WardenError::NotAProxy)?;
        match &account.kind {
            crate::vm::AccountKind::Contract { handler, .. } if handler == PROXY_HANDLER => {}
            _ => return Err(WardenError::NotAProxy),
        }
        let get = |key: &[u8]| account.storage(key).ok_or(WardenError::NotAProxy);
        let state = if account.is_destroyed() {
            ProxyState::Closed
        } else {
            read_state(get(keys::STATE)?)?
        };
        Ok(ProxyStorage {
            owner: Address::from_slice(get(keys::OWNER)?).ok_or(WardenError::NotAProxy)?,
            hub: Address::from_slice(get(keys::HUB)?).ok_or(WardenError::NotAProxy)?,
            et_data: ReservedTransaction::from_rlp(&rlp::decode(get(keys::ET_DATA)?)?)?,
            event_commitment: Digest::from_slice(get(keys::COMMITMENT)?).ok_or(WardenError::NotAProxy)?,
            expected_emitter: Address::from_slice(get(keys::EMITTER)?).ok_or(WardenError::NotAProxy)?,
            service_fee: rlp::bytes_to_uint(get(keys::FEE)?)?,
            state,
            release_ok: account.storage(keys::RELEASE_OK).map(|b| b == [1]),
            balance: account.balance,
        })
    }
}

fn read_state(raw: &[u8]) -> Result<ProxyState, WardenError> {
    match raw {
        [b] => ProxyState::from_byte(*b).ok_or(WardenError::NotAProxy),
        _ => Err(WardenError::NotAProxy),
    }
}

/// The proxy contract.
pub struct ProxyContract;

impl ProxyContract {
    fn state(host: &Host<'_, '_>) -> Result<ProxyState, WardenError> {
        read_state(&host.storage_get(keys::STATE).ok_or(WardenError::NotAProxy)?)
    }

    fn require_state(host: &Host<'_, '_>, expected: ProxyState, label: &'static str) -> Result<(), WardenError> {
        let found = Self::state(host)?;
        if found != expected {
            return Err(WardenError::WrongState { expected: label, found });
        }
        Ok(())
    }

    fn set_state(host: &mut Host<'_, '_>, state: ProxyState) -> Result<(), VmError> {
        host.storage_set(keys::STATE, vec![state.to_byte()])
    }

    fn address_at(host: &Host<'_, '_>, key: &[u8]) -> Result<Address, WardenError> {
        host.storage_get(key)
            .and_then(|b| Address::from_slice(&b))
            .ok_or(WardenError::NotAProxy)
    }

    fn fee(host: &Host<'_, '_>) -> Result<Wei, WardenError> {
        Ok(rlp::bytes_to_uint(&host.storage_get(keys::FEE).ok_or(WardenError::NotAProxy)?)?)
    }

    fn et_data(host: &Host<'_, '_>) -> Result<ReservedTransaction, WardenError> {
        let raw = host.storage_get(keys::ET_DATA).ok_or(WardenError::NotAProxy)?;
        ReservedTransaction::from_rlp(&rlp::decode(&raw)?)
    }

    fn charge(host: &mut Host<'_, '_>) -> Result<(), HandlerError> {
        Self::require_state(host, ProxyState::Deployed, "deployed")?;
        if host.caller() != Self::address_at(host, keys::OWNER)? {
            return Err(WardenError::NotOwner.into());
        }
        let required = Self::fee(host)? + Self::et_data(host)?.value;
        if host.value() < required {
            return Err(WardenError::InsufficientFunding {
                required,
                provided: host.value(),
            }
            .into());
        }
        Self::set_state(host, ProxyState::Funded)?;
        Ok(())
    }

    fn on_registered(host: &mut Host<'_, '_>, requester: Address) -> Result<(), HandlerError> {
        if host.caller() != Self::address_at(host, keys::HUB)? {
            return Err(WardenError::NotHub.into());
        }
        if requester != Self::address_at(host, keys::OWNER)? {
            return Err(WardenError::NotOwner.into());
        }
        Self::require_state(host, ProxyState::Funded, "funded")?;
        Self::set_state(host, ProxyState::Registered)?;
        Ok(())
    }

    fn event_verify(host: &mut Host<'_, '_>, bundle: ProofBundle) -> Result<(), HandlerError> {
        Self::require_state(host, ProxyState::Registered, "registered")?;
        let per_octet = host.schedule().per_proof_octet_verified;
        host.charge_gas(per_octet.saturating_mul(bundle.verified_octets() as Gas))?;

        let receipts_root = verify_block(host, &bundle)?;
        let receipt = trie::verify(&receipts_root, bundle.receipt_index, &bundle.proof).map_err(WardenError::from)?;
        let commitment = host
            .storage_get(keys::COMMITMENT)
            .and_then(|b| Digest::from_slice(&b))
            .ok_or(WardenError::NotAProxy)?;
        let emitter = Self::address_at(host, keys::EMITTER)?;
        verify_log(&receipt, bundle.log_index, &emitter, &commitment)?;

        Self::set_state(host, ProxyState::Triggered)?;
        Self::msg_release(host)?;
        let fee = Self::fee(host)?;
        let executor = host.caller();
        host.send_message(Some(executor), fee, &[])?;
        let leftover = host.self_balance();
        if leftover > 0 {
            let owner = Self::address_at(host, keys::OWNER)?;
            host.send_message(Some(owner), leftover, &[])?;
        }
        Ok(())
    }

    /// Sends the reserved transaction as a message. A failing target does
    /// not undo the trigger; the reserved value then goes back to the owner.
    fn msg_release(host: &mut Host<'_, '_>) -> Result<(), HandlerError> {
        let et = Self::et_data(host)?;
        let result = match et.kind {
            TxKind::FundTransfer | TxKind::FunctionInvocation => {
                host.send_message(et.recipient, et.value, &et.payload)
            }
            TxKind::ContractCreation => host.send_message(None, 0, &et.payload),
        };
        if let Err(err) = &result {
            if matches!(err.downcast_ref::<VmError>(), Some(VmError::OutOfGas)) {
                return Err(VmError::OutOfGas.into());
            }
        }
        host.storage_set(keys::RELEASE_OK, vec![u8::from(result.is_ok())])?;
        Ok(())
    }

    fn close(host: &mut Host<'_, '_>) -> Result<(), HandlerError> {
        let owner = Self::address_at(host, keys::OWNER)?;
        if host.caller() != owner {
            return Err(WardenError::NotOwner.into());
        }
        match Self::state(host)? {
            ProxyState::Funded | ProxyState::Registered => {}
            found => {
                return Err(WardenError::WrongState {
                    expected: "funded or registered",
                    found,
                }
                .into())
            }
        }
        host.self_destruct(owner)?;
        Ok(())
    }
}

/// Checks the header against the in-window block hash and returns the
/// receipts root it commits to.
fn verify_block(host: &Host<'_, '_>, bundle: &ProofBundle) -> Result<Digest, WardenError> {
    let expected = host
        .blockhash(bundle.block_number)
        .ok_or(WardenError::BlockOutOfWindow(bundle.block_number))?;
    if keccak256(&bundle.block_data) != expected {
        return Err(WardenError::BlockMismatch);
    }
    let header = BlockHeader::decode(&bundle.block_data).map_err(|_| WardenError::BlockMismatch)?;
    Ok(header.receipts_root)
}

/// Checks that log `log_index` of the receipt is the committed entry.
pub fn verify_log(receipt: &[u8], log_index: u64, emitter: &Address, commitment: &Digest) -> Result<(), WardenError> {
    let receipt = Receipt::decode(receipt).map_err(|_| WardenError::LogMismatch("receipt does not decode"))?;
    let log = usize::try_from(log_index)
        .ok()
        .and_then(|i| receipt.logs.get(i))
        .ok_or(WardenError::LogMismatch("no log at that index"))?;
    if log.emitter != *emitter {
        return Err(WardenError::LogMismatch("emitter differs"));
    }
    if log.digest() != *commitment {
        return Err(WardenError::LogMismatch("log digest differs from the commitment"));
    }
    Ok(())
}

impl ContractHandler for ProxyContract {
    fn init(&self, host: &mut Host<'_, '_>, args: &[RlpItem]) -> Result<(), HandlerError> {
        if args.len() != 5 {
            return Err(WardenError::BadArguments(RlpError::Shape("proxy takes five arguments")).into());
        }
        let hub = args[0].as_address()?;
        let reserved = ReservedTransaction::from_rlp(&args[1])?;
        let commitment = args[2].as_digest()?;
        let emitter = args[3].as_address()?;
        let fee = args[4].as_uint()?;
        let owner = host.caller();
        host.storage_set(keys::OWNER, owner.0.to_vec())?;
        host.storage_set(keys::HUB, hub.0.to_vec())?;
        host.storage_set(keys::ET_DATA, reserved.to_rlp().encode())?;
        host.storage_set(keys::COMMITMENT, commitment.0.to_vec())?;
        host.storage_set(keys::EMITTER, emitter.0.to_vec())?;
        host.storage_set(keys::FEE, rlp::uint_to_bytes(fee))?;
        Self::set_state(host, ProxyState::Deployed)?;
        Ok(())
    }

    fn call(&self, host: &mut Host<'_, '_>, selector: Selector, args: &[RlpItem]) -> Result<(), HandlerError> {
        if selector == Selector::of(SIG_CHARGE) {
            Self::charge(host)
        } else if selector == Selector::of(SIG_EVENT_VERIFY) {
            let bundle = ProofBundle::from_args(args)?;
            Self::event_verify(host, bundle)
        } else if selector == Selector::of(SIG_CLOSE) {
            Self::close(host)
        } else if selector == Selector::of(SIG_ON_REGISTERED) {
            let requester = args
                .first()
                .ok_or(RlpError::Shape("missing requester"))?
                .as_address()?;
            Self::on_registered(host, requester)
        } else {
            Err(VmError::MalformedCallData(RlpError::Shape("unknown selector")).into())
        }
    }
}

/// Registry that announces new proxies to executors.
pub struct HubContract;

impl ContractHandler for HubContract {
    fn init(&self, _: &mut Host<'_, '_>, _: &[RlpItem]) -> Result<(), HandlerError> {
        Ok(())
    }

    fn call(&self, host: &mut Host<'_, '_>, selector: Selector, args: &[RlpItem]) -> Result<(), HandlerError> {
        if selector != Selector::of(SIG_NEW_SERVICE) {
            return Err(VmError::MalformedCallData(RlpError::Shape("unknown selector")).into());
        }
        let proxy = args
            .first()
            .ok_or(RlpError::Shape("missing proxy address"))?
            .as_address()?;
        let key = [keys::SERVICE_PREFIX, &proxy.0].concat();
        if host.storage_get(&key).is_some() {
            return Err(WardenError::AlreadyRegistered.into());
        }
        let requester = host.caller();
        host.send_message(
            Some(proxy),
            0,
            &encode_call(SIG_ON_REGISTERED, vec![RlpItem::address(&requester)]),
        )?;
        let count = host
            .storage_get(keys::SERVICE_COUNT)
            .map(|b| rlp::bytes_to_uint(&b))
            .transpose()?
            .unwrap_or(0);
        host.storage_set(&key, rlp::uint_to_bytes(count + 1))?;
        host.storage_set(keys::SERVICE_COUNT, rlp::uint_to_bytes(count + 1))?;
        host.emit_log(vec![new_service_topic()], RlpItem::address(&proxy).encode())?;
        Ok(())
    }
}

/// Proxy address announced by a hub log, if `log` is one.
pub fn parse_new_service(log: &LogEntry, hub: &Address) -> Option<Address> {
    if log.emitter != *hub || log.topics != [new_service_topic()] {
        return None;
    }
    rlp::decode(&log.data).ok()?.as_address().ok()
}

/// Proxy, hub, and the stock contracts used by scenarios.
pub fn default_registry() -> HandlerRegistry {
    let mut reg = HandlerRegistry::default();
    reg.register(PROXY_HANDLER, Arc::new(ProxyContract));
    reg.register(HUB_HANDLER, Arc::new(HubContract));
    contracts::register_stock(&mut reg);
    reg
}

pub fn deploy_proxy_tx(owner: Address, params: &ProxyParams, gas_limit: Gas) -> Transaction {
    Transaction {
        sender: owner,
        recipient: None,
        value: 0,
        data: params.creation_payload().encode(),
        gas_limit,
    }
}

pub fn deploy_hub_tx(sender: Address, gas_limit: Gas) -> Transaction {
    Transaction {
        sender,
        recipient: None,
        value: 0,
        data: CreationPayload::new(HUB_HANDLER, vec![]).encode(),
        gas_limit,
    }
}

pub fn charge_tx(owner: Address, proxy: Address, amount: Wei, gas_limit: Gas) -> Transaction {
    Transaction {
        sender: owner,
        recipient: Some(proxy),
        value: amount,
        data: encode_call(SIG_CHARGE, vec![]),
        gas_limit,
    }
}

pub fn new_service_tx(owner: Address, hub: Address, proxy: Address, gas_limit: Gas) -> Transaction {
    Transaction {
        sender: owner,
        recipient: Some(hub),
        value: 0,
        data: encode_call(SIG_NEW_SERVICE, vec![RlpItem::address(&proxy)]),
        gas_limit,
    }
}

pub fn event_verify_tx(caller: Address, proxy: Address, bundle: &ProofBundle, gas_limit: Gas) -> Transaction {
    Transaction {
        sender: caller,
        recipient: Some(proxy),
        value: 0,
        data: encode_call(SIG_EVENT_VERIFY, bundle.to_args()),
        gas_limit,
    }
}

pub fn close_tx(owner: Address, proxy: Address, gas_limit: Gas) -> Transaction {
    Transaction {
        sender: owner,
        recipient: Some(proxy),
        value: 0,
        data: encode_call(SIG_CLOSE, vec![]),
        gas_limit,
    }
}
