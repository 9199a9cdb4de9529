//! Accounts, transactions, contract messages, and gas metering.
//!
//! Contracts are native handlers registered by name. A transaction runs
//! against a snapshot of the account set: if anything inside it fails, the
//! snapshot is restored and only the sender's nonce bump and gas deduction
//! survive.

mod call;
mod host;

use std::collections::BTreeMap;
use std::error::Error as StdError;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::chain::Receipt;
use crate::primitives::{keccak256, Address, BlockNumber, Digest, Gas, Wei};
use crate::rlp::{self, RlpError, RlpItem};

pub use call::{decode_call, encode_call, CreationPayload, Selector};
pub use host::Host;

/// Boxed error a contract handler reverts with.
pub type HandlerError = Box<dyn StdError + Send + Sync + 'static>;

/// Maximum message nesting inside one transaction.
pub const MAX_CALL_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VmError {
    #[error("sender {0} does not exist")]
    UnknownSender(Address),
    #[error("sender balance {available} cannot cover {required}")]
    InsufficientBalance { required: Wei, available: Wei },
    #[error("transaction is unclassifiable: {0}")]
    Unclassifiable(&'static str),
    #[error("contract balance {available} cannot cover {required}")]
    InsufficientContractBalance { required: Wei, available: Wei },
    #[error("message target {0} cannot accept call data")]
    UnknownTarget(Address),
    #[error("no handler registered as {0:?}")]
    UnknownHandler(String),
    #[error("account {0} already exists")]
    AddressCollision(Address),
    #[error("contract {0} has self-destructed")]
    ContractDestroyed(Address),
    #[error("malformed call data: {0}")]
    MalformedCallData(RlpError),
    #[error("value-bearing contract creation is not supported")]
    ValueBearingCreation,
    #[error("call depth limit exceeded")]
    CallDepthExceeded,
    #[error("out of gas")]
    OutOfGas,
}

/// Gas charged per metered operation. Gas price is fixed at 1 and all gas
/// is burned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GasSchedule {
    pub base_tx: Gas,
    pub per_data_octet: Gas,
    pub per_storage_write: Gas,
    pub per_log: Gas,
    pub per_message: Gas,
    pub per_contract_created: Gas,
    pub per_proof_octet_verified: Gas,
}

impl Default for GasSchedule {
    fn default() -> Self {
        GasSchedule {
            base_tx: 21_000,
            per_data_octet: 16,
            per_storage_write: 5_000,
            per_log: 1_125,
            per_message: 700,
            per_contract_created: 32_000,
            per_proof_octet_verified: 6,
        }
    }
}

impl GasSchedule {
    pub fn is_valid(&self) -> bool {
        [
            self.base_tx,
            self.per_data_octet,
            self.per_storage_write,
            self.per_log,
            self.per_message,
            self.per_contract_created,
            self.per_proof_octet_verified,
        ]
        .iter()
        .all(|g| *g > 0)
    }

    /// Gas charged before any handler runs.
    pub fn intrinsic(&self, tx: &Transaction) -> Gas {
        self.base_tx
            .saturating_add(self.per_data_octet.saturating_mul(tx.data.len() as Gas))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AccountKind {
    Eoa,
    Contract {
        handler: String,
        storage: BTreeMap<Vec<u8>, Vec<u8>>,
        destroyed: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Account {
    pub balance: Wei,
    pub nonce: u64,
    pub kind: AccountKind,
}

impl Account {
    pub fn eoa(balance: Wei) -> Self {
        Account {
            balance,
            nonce: 0,
            kind: AccountKind::Eoa,
        }
    }

    pub fn contract(handler: &str) -> Self {
        Account {
            balance: 0,
            nonce: 0,
            kind: AccountKind::Contract {
                handler: handler.to_owned(),
                storage: BTreeMap::new(),
                destroyed: false,
            },
        }
    }

    pub fn balance(&self) -> Wei {
        self.balance
    }

    pub fn is_contract(&self) -> bool {
        matches!(self.kind, AccountKind::Contract { .. })
    }

    pub fn is_destroyed(&self) -> bool {
        matches!(self.kind, AccountKind::Contract { destroyed: true, .. })
    }

    pub fn storage(&self, key: &[u8]) -> Option<&[u8]> {
        match &self.kind {
            AccountKind::Contract { storage, .. } => storage.get(key).map(Vec::as_slice),
            AccountKind::Eoa => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TxKind {
    FundTransfer,
    FunctionInvocation,
    ContractCreation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub sender: Address,
    /// `None` for contract creation.
    pub recipient: Option<Address>,
    pub value: Wei,
    pub data: Vec<u8>,
    pub gas_limit: Gas,
}

impl Transaction {
    pub fn to_rlp(&self) -> RlpItem {
        RlpItem::List(vec![
            RlpItem::address(&self.sender),
            self.recipient.as_ref().map_or_else(RlpItem::empty, RlpItem::address),
            RlpItem::uint(self.value),
            RlpItem::bytes(self.data.clone()),
            RlpItem::uint(u128::from(self.gas_limit)),
        ])
    }

    pub fn from_rlp(item: &RlpItem) -> Result<Self, RlpError> {
        let items = item.as_list_of(5)?;
        Ok(Transaction {
            sender: items[0].as_address()?,
            recipient: items[1].as_optional_address()?,
            value: items[2].as_uint()?,
            data: items[3].as_bytes()?.to_vec(),
            gas_limit: items[4].as_u64()?,
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        self.to_rlp().encode()
    }

    pub fn decode(data: &[u8]) -> Result<Self, RlpError> {
        Self::from_rlp(&rlp::decode(data)?)
    }
}

/// A contract-originated transfer, call, or creation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub from: Address,
    pub to: Option<Address>,
    pub value: Wei,
    pub data: Vec<u8>,
}

/// Address of the contract created by `creator` at `nonce`.
pub fn derive_address(creator: &Address, nonce: u64) -> Address {
    let item = RlpItem::List(vec![RlpItem::address(creator), RlpItem::uint(u128::from(nonce))]);
    Address::from_digest(&keccak256(&item.encode()))
}

/// Behavior of a contract account.
pub trait ContractHandler: Send + Sync {
    /// Runs once when the contract is created.
    fn init(&self, host: &mut Host<'_, '_>, args: &[RlpItem]) -> Result<(), HandlerError>;

    /// Runs on every invocation; `host.value()` has already been credited.
    fn call(&self, host: &mut Host<'_, '_>, selector: Selector, args: &[RlpItem]) -> Result<(), HandlerError>;
}

#[derive(Clone, Default)]
pub struct HandlerRegistry {
    handlers: BTreeMap<String, Arc<dyn ContractHandler>>,
}

impl HandlerRegistry {
    pub fn register(&mut self, name: &str, handler: Arc<dyn ContractHandler>) -> &mut Self {
        self.handlers.insert(name.to_owned(), handler);
        self
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn ContractHandler>> {
        self.handlers.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.handlers.keys().map(String::as_str)
    }
}

impl fmt::Debug for HandlerRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.handlers.keys()).finish()
    }
}

/// Header digests visible from inside the block being built.
pub trait BlockHashes {
    fn blockhash(&self, number: BlockNumber) -> Option<Digest>;
}

pub struct BlockEnv<'a> {
    pub number: BlockNumber,
    pub timestamp: u64,
    pub hashes: &'a dyn BlockHashes,
}

/// Why a transaction ended with status 0.
#[derive(Clone)]
pub struct Failure(Arc<dyn StdError + Send + Sync + 'static>);

impl Failure {
    pub fn downcast_ref<E: StdError + 'static>(&self) -> Option<&E> {
        self.0.downcast_ref::<E>()
    }
}

impl fmt::Debug for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Failure({})", self.0)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceKind {
    Message {
        from: Address,
        to: Option<Address>,
        value: Wei,
        ok: bool,
    },
    StorageWrite {
        address: Address,
        key: Vec<u8>,
    },
    Log {
        emitter: Address,
    },
    Created {
        address: Address,
        handler: String,
    },
    Destructed {
        address: Address,
        beneficiary: Address,
        value: Wei,
    },
}

/// One state-changing step inside a transaction. Depth 0 is the
/// transaction itself; deeper entries are messages it caused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub depth: usize,
    pub kind: TraceKind,
}

#[derive(Debug, Clone)]
pub struct TxOutcome {
    pub kind: TxKind,
    pub receipt: Receipt,
    pub gas_used: Gas,
    pub created: Option<Address>,
    pub failure: Option<Failure>,
    /// Effects that persisted. Empty for failed transactions.
    pub trace: Vec<TraceEntry>,
}

impl TxOutcome {
    pub fn succeeded(&self) -> bool {
        self.receipt.status
    }

    pub fn failure_as<E: StdError + 'static>(&self) -> Option<&E> {
        self.failure.as_ref().and_then(Failure::downcast_ref)
    }

    /// Sum of persisted value moved from `from` to `to` by messages.
    pub fn transferred(&self, from: &Address, to: &Address) -> Wei {
        self.trace
            .iter()
            .filter_map(|t| match &t.kind {
                TraceKind::Message {
                    from: f,
                    to: Some(dst),
                    value,
                    ok: true,
                } if f == from && dst == to => Some(*value),
                TraceKind::Destructed {
                    address,
                    beneficiary,
                    value,
                } if address == from && beneficiary == to => Some(*value),
                _ => None,
            })
            .sum()
    }
}

/// Account state plus the handler registry and gas schedule.
#[derive(Clone)]
pub struct World {
    accounts: BTreeMap<Address, Account>,
    registry: Arc<HandlerRegistry>,
    schedule: GasSchedule,
    burned: Wei,
}

impl World {
    pub fn new(registry: Arc<HandlerRegistry>, schedule: GasSchedule) -> Self {
        World {
            accounts: BTreeMap::new(),
            registry,
            schedule,
            burned: 0,
        }
    }

    pub fn insert_account(&mut self, address: Address, account: Account) {
        self.accounts.insert(address, account);
    }

    pub fn account(&self, address: &Address) -> Option<&Account> {
        self.accounts.get(address)
    }

    pub fn accounts(&self) -> &BTreeMap<Address, Account> {
        &self.accounts
    }

    pub fn balance(&self, address: &Address) -> Wei {
        self.accounts.get(address).map_or(0, |a| a.balance)
    }

    pub fn storage(&self, address: &Address, key: &[u8]) -> Option<&[u8]> {
        self.accounts.get(address).and_then(|a| a.storage(key))
    }

    pub fn schedule(&self) -> &GasSchedule {
        &self.schedule
    }

    /// Total gas burned so far, in wei.
    pub fn burned(&self) -> Wei {
        self.burned
    }

    /// Sum of all balances.
    pub fn total_balance(&self) -> Wei {
        self.accounts.values().map(|a| a.balance).sum()
    }

    pub fn classify(&self, tx: &Transaction) -> Result<TxKind, VmError> {
        match tx.recipient {
            None if tx.data.is_empty() => Err(VmError::Unclassifiable("creation without payload")),
            None if tx.value > 0 => Err(VmError::ValueBearingCreation),
            None => Ok(TxKind::ContractCreation),
            Some(to) => match self.accounts.get(&to) {
                Some(acct) if acct.is_contract() => {
                    if tx.data.is_empty() {
                        Err(VmError::Unclassifiable("contract call without data"))
                    } else {
                        Ok(TxKind::FunctionInvocation)
                    }
                }
                _ if tx.value > 0 => Ok(TxKind::FundTransfer),
                _ => Err(VmError::Unclassifiable("zero-value transfer to an externally owned account")),
            },
        }
    }

    /// Pre-execution checks. Failures here mean the transaction is not
    /// included at all.
    pub fn validate(&self, tx: &Transaction) -> Result<TxKind, VmError> {
        let sender = self
            .accounts
            .get(&tx.sender)
            .ok_or(VmError::UnknownSender(tx.sender))?;
        if sender.is_contract() {
            return Err(VmError::UnknownSender(tx.sender));
        }
        let kind = self.classify(tx)?;
        let required = tx.value.saturating_add(Wei::from(tx.gas_limit));
        if sender.balance < required {
            return Err(VmError::InsufficientBalance {
                required,
                available: sender.balance,
            });
        }
        Ok(kind)
    }

    pub fn execute_transaction(
        &mut self,
        tx: &Transaction,
        env: &BlockEnv<'_>,
        cumulative_gas_before: Gas,
    ) -> Result<TxOutcome, VmError> {
        let kind = self.validate(tx)?;
        let sender = self.accounts.get_mut(&tx.sender).expect("validated sender");
        let nonce = sender.nonce;
        sender.nonce += 1;

        let snapshot = self.accounts.clone();
        let registry = Arc::clone(&self.registry);
        let schedule = self.schedule.clone();
        let mut state = host::ExecState::new(&mut self.accounts, &registry, &schedule, env, tx.gas_limit);
        let intrinsic = schedule.intrinsic(tx);
        let result = state
            .charge(intrinsic)
            .map_err(HandlerError::from)
            .and_then(|()| match kind {
                TxKind::ContractCreation => {
                    let address = derive_address(&tx.sender, nonce);
                    state.create(tx.sender, address, &tx.data, 0).map(Some)
                }
                _ => state
                    .dispatch(tx.sender, tx.recipient, tx.value, &tx.data, 0)
                    .map(|_| None),
            })
            .and_then(|created| {
                if state.out_of_gas() {
                    Err(VmError::OutOfGas.into())
                } else {
                    Ok(created)
                }
            });
        let gas_used = state.gas_used();
        let (logs, trace) = state.finish();

        let (created, failure, logs, trace) = match result {
            Ok(created) => (created, None, logs, trace),
            Err(err) => {
                self.accounts = snapshot;
                (None, Some(Failure(Arc::from(err))), vec![], vec![])
            }
        };
        let sender = self.accounts.get_mut(&tx.sender).expect("sender survives");
        sender.balance -= Wei::from(gas_used);
        self.burned += Wei::from(gas_used);

        Ok(TxOutcome {
            kind,
            receipt: Receipt {
                status: failure.is_none(),
                cumulative_gas_used: cumulative_gas_before + gas_used,
                logs,
            },
            gas_used,
            created,
            failure,
            trace,
        })
    }
}
