use std::collections::BTreeMap;

use crate::chain::LogEntry;
use crate::primitives::{Address, BlockNumber, Digest, Gas, Wei};

use super::{
    decode_call, derive_address, Account, AccountKind, BlockEnv, CreationPayload, GasSchedule,
    HandlerError, HandlerRegistry, TraceEntry, TraceKind, VmError, MAX_CALL_DEPTH,
};

/// Mutable state of one transaction in flight.
pub(super) struct ExecState<'w> {
    accounts: &'w mut BTreeMap<Address, Account>,
    registry: &'w HandlerRegistry,
    schedule: &'w GasSchedule,
    env: &'w BlockEnv<'w>,
    gas_limit: Gas,
    gas_used: Gas,
    exhausted: bool,
    logs: Vec<LogEntry>,
    trace: Vec<TraceEntry>,
}

struct Frame {
    address: Address,
    caller: Address,
    value: Wei,
    depth: usize,
}

impl<'w> ExecState<'w> {
    pub(super) fn new(
        accounts: &'w mut BTreeMap<Address, Account>,
        registry: &'w HandlerRegistry,
        schedule: &'w GasSchedule,
        env: &'w BlockEnv<'w>,
        gas_limit: Gas,
    ) -> Self {
        ExecState {
            accounts,
            registry,
            schedule,
            env,
            gas_limit,
            gas_used: 0,
            exhausted: false,
            logs: Vec::new(),
            trace: Vec::new(),
        }
    }

    /// Once the limit is hit every later charge fails too, so a handler
    /// that swallows an inner error cannot continue for free.
    pub(super) fn charge(&mut self, gas: Gas) -> Result<(), VmError> {
        match self.gas_used.checked_add(gas) {
            Some(total) if !self.exhausted && total <= self.gas_limit => {
                self.gas_used = total;
                Ok(())
            }
            _ => {
                self.gas_used = self.gas_limit;
                self.exhausted = true;
                Err(VmError::OutOfGas)
            }
        }
    }

    pub(super) fn out_of_gas(&self) -> bool {
        self.exhausted
    }

    pub(super) fn gas_used(&self) -> Gas {
        self.gas_used
    }

    pub(super) fn finish(self) -> (Vec<LogEntry>, Vec<TraceEntry>) {
        (self.logs, self.trace)
    }

    fn move_value(&mut self, from: Address, to: Address, value: Wei, depth: usize) -> Result<(), VmError> {
        if value == 0 {
            return Ok(());
        }
        let src = self.accounts.get_mut(&from).ok_or(VmError::UnknownSender(from))?;
        if src.balance < value {
            let err = if depth == 0 {
                VmError::InsufficientBalance {
                    required: value,
                    available: src.balance,
                }
            } else {
                VmError::InsufficientContractBalance {
                    required: value,
                    available: src.balance,
                }
            };
            return Err(err);
        }
        src.balance -= value;
        self.accounts.entry(to).or_insert_with(|| Account::eoa(0)).balance += value;
        Ok(())
    }

    /// Transfers `value` and runs the target handler, all-or-nothing.
    pub(super) fn dispatch(
        &mut self,
        from: Address,
        to: Option<Address>,
        value: Wei,
        data: &[u8],
        depth: usize,
    ) -> Result<Option<Address>, HandlerError> {
        if depth > MAX_CALL_DEPTH {
            return Err(VmError::CallDepthExceeded.into());
        }
        let snapshot = (self.accounts.clone(), self.logs.len(), self.trace.len());
        let result = self.dispatch_inner(from, to, value, data, depth);
        if result.is_err() {
            *self.accounts = snapshot.0;
            self.logs.truncate(snapshot.1);
            self.trace.truncate(snapshot.2);
        }
        self.trace.push(TraceEntry {
            depth,
            kind: TraceKind::Message {
                from,
                to,
                value,
                ok: result.is_ok(),
            },
        });
        result
    }

    fn dispatch_inner(
        &mut self,
        from: Address,
        to: Option<Address>,
        value: Wei,
        data: &[u8],
        depth: usize,
    ) -> Result<Option<Address>, HandlerError> {
        let Some(to) = to else {
            if value > 0 {
                return Err(VmError::ValueBearingCreation.into());
            }
            let creator = self.accounts.get_mut(&from).ok_or(VmError::UnknownSender(from))?;
            let address = derive_address(&from, creator.nonce);
            creator.nonce += 1;
            return self.create(from, address, data, depth).map(Some);
        };
        let handler_name = match self.accounts.get(&to).map(|a| &a.kind) {
            Some(AccountKind::Contract { destroyed: true, .. }) => {
                return Err(VmError::ContractDestroyed(to).into())
            }
            Some(AccountKind::Contract { handler, .. }) => Some(handler.clone()),
            Some(AccountKind::Eoa) => None,
            None if data.is_empty() => None,
            None => return Err(VmError::UnknownTarget(to).into()),
        };
        self.move_value(from, to, value, depth)?;
        let Some(name) = handler_name else {
            return Ok(None);
        };
        let handler = self
            .registry
            .get(&name)
            .ok_or_else(|| VmError::UnknownHandler(name.clone()))?;
        let (selector, args) = decode_call(data).map_err(VmError::MalformedCallData)?;
        let mut host = Host {
            state: self,
            frame: Frame {
                address: to,
                caller: from,
                value,
                depth,
            },
        };
        handler.call(&mut host, selector, &args)?;
        Ok(None)
    }

    pub(super) fn create(
        &mut self,
        creator: Address,
        address: Address,
        payload: &[u8],
        depth: usize,
    ) -> Result<Address, HandlerError> {
        let payload = CreationPayload::decode(payload).map_err(VmError::MalformedCallData)?;
        let handler = self
            .registry
            .get(&payload.handler)
            .ok_or_else(|| VmError::UnknownHandler(payload.handler.clone()))?;
        self.charge(self.schedule.per_contract_created)?;
        if self.accounts.contains_key(&address) {
            return Err(VmError::AddressCollision(address).into());
        }
        self.accounts.insert(address, Account::contract(&payload.handler));
        self.trace.push(TraceEntry {
            depth,
            kind: TraceKind::Created {
                address,
                handler: payload.handler.clone(),
            },
        });
        let mut host = Host {
            state: self,
            frame: Frame {
                address,
                caller: creator,
                value: 0,
                depth,
            },
        };
        handler.init(&mut host, &payload.args)?;
        Ok(address)
    }
}

/// The interface a contract handler sees while it runs.
pub struct Host<'a, 'w> {
    state: &'a mut ExecState<'w>,
    frame: Frame,
}

impl Host<'_, '_> {
    /// Address of the running contract.
    pub fn address(&self) -> Address {
        self.frame.address
    }

    /// Immediate caller: the transaction sender or the calling contract.
    pub fn caller(&self) -> Address {
        self.frame.caller
    }

    /// Value attached to this call, already credited.
    pub fn value(&self) -> Wei {
        self.frame.value
    }

    pub fn block_number(&self) -> BlockNumber {
        self.state.env.number
    }

    pub fn timestamp(&self) -> u64 {
        self.state.env.timestamp
    }

    pub fn blockhash(&self, number: BlockNumber) -> Option<Digest> {
        self.state.env.hashes.blockhash(number)
    }

    pub fn schedule(&self) -> &GasSchedule {
        self.state.schedule
    }

    pub fn balance(&self, address: &Address) -> Wei {
        self.state.accounts.get(address).map_or(0, |a| a.balance)
    }

    pub fn self_balance(&self) -> Wei {
        self.balance(&self.frame.address)
    }

    pub fn nonce(&self, address: &Address) -> u64 {
        self.state.accounts.get(address).map_or(0, |a| a.nonce)
    }

    pub fn charge_gas(&mut self, gas: Gas) -> Result<(), VmError> {
        self.state.charge(gas)
    }

    pub fn storage_get(&self, key: &[u8]) -> Option<Vec<u8>> {
        self.state
            .accounts
            .get(&self.frame.address)
            .and_then(|a| a.storage(key))
            .map(<[u8]>::to_vec)
    }

    pub fn storage_set(&mut self, key: &[u8], value: Vec<u8>) -> Result<(), VmError> {
        self.state.charge(self.state.schedule.per_storage_write)?;
        let address = self.frame.address;
        if let Some(Account {
            kind: AccountKind::Contract { storage, .. },
            ..
        }) = self.state.accounts.get_mut(&address)
        {
            storage.insert(key.to_vec(), value);
        }
        self.state.trace.push(TraceEntry {
            depth: self.frame.depth,
            kind: TraceKind::StorageWrite {
                address,
                key: key.to_vec(),
            },
        });
        Ok(())
    }

    pub fn emit_log(&mut self, topics: Vec<Digest>, data: Vec<u8>) -> Result<(), VmError> {
        self.state.charge(self.state.schedule.per_log)?;
        let emitter = self.frame.address;
        self.state.logs.push(LogEntry { emitter, topics, data });
        self.state.trace.push(TraceEntry {
            depth: self.frame.depth,
            kind: TraceKind::Log { emitter },
        });
        Ok(())
    }

    /// Sends a message from this contract. `to = None` creates a contract
    /// from a [`CreationPayload`] and returns its address. A failed message
    /// leaves no effects but the gas it consumed.
    pub fn send_message(&mut self, to: Option<Address>, value: Wei, data: &[u8]) -> Result<Option<Address>, HandlerError> {
        self.state.charge(self.state.schedule.per_message)?;
        let from = self.frame.address;
        self.state.dispatch(from, to, value, data, self.frame.depth + 1)
    }

    /// Moves the whole balance to `beneficiary` and disables the contract.
    pub fn self_destruct(&mut self, beneficiary: Address) -> Result<(), VmError> {
        self.state.charge(self.state.schedule.per_message)?;
        let address = self.frame.address;
        let value = self.self_balance();
        self.state.move_value(address, beneficiary, value, self.frame.depth + 1)?;
        if let Some(Account {
            kind: AccountKind::Contract { destroyed, .. },
            ..
        }) = self.state.accounts.get_mut(&address)
        {
            *destroyed = true;
        }
        self.state.trace.push(TraceEntry {
            depth: self.frame.depth,
            kind: TraceKind::Destructed {
                address,
                beneficiary,
                value,
            },
        });
        Ok(())
    }
}
