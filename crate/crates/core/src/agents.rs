//! Users and executors driven block by block over a simulated chain.
//!
//! Each block is assembled from the scripted user steps due at that height
//! followed by executor submissions, ordered by (reaction delay, executor
//! address). After a block is sealed every active executor reads it: hub
//! announcements extend its watchlist, and a log matching a watched proxy
//! schedules one `eventVerify` submission `max(delay, 1)` blocks later.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::chain::{Block, Chain, ChainConfig, Genesis, LogEntry};
use crate::contracts::emit_call_data;
use crate::primitives::{keccak256, Address, BlockNumber, Digest, Gas, Wei};
use crate::report::{
    Conservation, EntryStatus, ExecutorSummary, ExpectationResult, Function, ProxySummary, ReleaseStatus,
    ReportRow, ScenarioReport, TimelineEntry, UsdRates,
};
use crate::rlp::RlpItem;
use crate::scenario::{steps_by_block, Action, ActorKind, Arg, ReleaseDecl, ScenarioConfig, ScenarioError};
use crate::vm::{encode_call, CreationPayload, Transaction, TxOutcome, VmError};
use crate::warden::{
    self, charge_tx, close_tx, deploy_proxy_tx, event_verify_tx, new_service_tx, parse_new_service, ProofBundle,
    ProxyParams, ProxyState, ProxyStorage, ReservedTransaction, WardenError, HUB_HANDLER,
};

/// What an executor needs to recognise a proxy's event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WatchEntry {
    pub proxy: Address,
    pub emitter: Address,
    pub commitment: Digest,
}

impl WatchEntry {
    pub fn from_storage(proxy: Address, storage: &ProxyStorage) -> Self {
        WatchEntry {
            proxy,
            emitter: storage.expected_emitter,
            commitment: storage.event_commitment,
        }
    }

    pub fn matches(&self, log: &LogEntry) -> bool {
        log.emitter == self.emitter && log.digest() == self.commitment
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct LogMatch {
    pub proxy: Address,
    pub receipt_index: u64,
    pub log_index: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("no log for proxy {proxy} in block {block}")]
    EventNotFound { proxy: Address, block: BlockNumber },
    #[error("block {block} is outside the window for a submission in block {submit_at}")]
    WindowExpired { block: BlockNumber, submit_at: BlockNumber },
}

/// Every log in `block` matching a watched proxy, in receipt then log order.
pub fn scan_block_for_matches(block: &Block, watchlist: &[WatchEntry]) -> Vec<LogMatch> {
    let mut out = Vec::new();
    for (r, receipt) in block.receipts.iter().enumerate() {
        for (l, log) in receipt.logs.iter().enumerate() {
            for w in watchlist.iter().filter(|w| w.matches(log)) {
                out.push(LogMatch {
                    proxy: w.proxy,
                    receipt_index: r as u64,
                    log_index: l as u64,
                });
            }
        }
    }
    out
}

/// Bundle proving the first matching log of `event_block`, for a
/// transaction that will be included in block `submit_at`.
pub fn build_proof_bundle(
    chain: &Chain,
    watch: &WatchEntry,
    event_block: BlockNumber,
    submit_at: BlockNumber,
) -> Result<ProofBundle, AgentError> {
    let not_found = AgentError::EventNotFound {
        proxy: watch.proxy,
        block: event_block,
    };
    let block = chain.get_block(event_block).map_err(|_| not_found.clone())?;
    if event_block >= submit_at || event_block.saturating_add(chain.config().blockhash_window) < submit_at {
        return Err(AgentError::WindowExpired {
            block: event_block,
            submit_at,
        });
    }
    let found = scan_block_for_matches(block, std::slice::from_ref(watch));
    let m = found.first().ok_or(not_found)?;
    Ok(ProofBundle::from_chain(chain, event_block, m.receipt_index, m.log_index)
        .expect("matched receipt is in the block's trie"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pending {
    watch: WatchEntry,
    event_block: BlockNumber,
    submit_at: BlockNumber,
}

/// A third party that proves events to proxies for their fees.
#[derive(Debug, Clone)]
pub struct ExecutorAgent {
    pub name: String,
    pub id: Address,
    pub active: bool,
    pub reaction_delay: u64,
    pub watchlist: Vec<WatchEntry>,
    attempted: BTreeSet<Address>,
    pending: Vec<Pending>,
}

impl ExecutorAgent {
    pub fn new(name: impl Into<String>, id: Address, reaction_delay: u64) -> Self {
        ExecutorAgent {
            name: name.into(),
            id,
            active: true,
            reaction_delay,
            watchlist: vec![],
            attempted: BTreeSet::new(),
            pending: vec![],
        }
    }

    /// Stops the agent; queued submissions are dropped.
    pub fn disable(&mut self) {
        self.active = false;
        self.pending.clear();
    }

    /// Block in which a reaction to block `number` lands.
    pub fn landing_block(&self, number: BlockNumber) -> BlockNumber {
        number + self.reaction_delay.max(1)
    }

    /// Reads sealed block `number`. Newly announced proxies are checked
    /// against every block still inside the window, older ones against
    /// `number` only.
    pub fn observe(&mut self, chain: &Chain, hub: &Address, number: BlockNumber) {
        if !self.active {
            return;
        }
        let Ok(block) = chain.get_block(number) else {
            return;
        };
        let mut fresh = Vec::new();
        for log in block.receipts.iter().flat_map(|r| &r.logs) {
            let Some(proxy) = parse_new_service(log, hub) else {
                continue;
            };
            if self.watchlist.iter().any(|w| w.proxy == proxy) {
                continue;
            }
            if let Ok(storage) = ProxyStorage::load(chain.world(), &proxy) {
                fresh.push(WatchEntry::from_storage(proxy, &storage));
            }
        }
        let submit_at = self.landing_block(number);
        let mut found: Vec<(BlockNumber, LogMatch)> = scan_block_for_matches(block, &self.watchlist)
            .into_iter()
            .map(|m| (number, m))
            .collect();
        if !fresh.is_empty() {
            let lo = number.saturating_sub(chain.config().blockhash_window).max(1);
            for b in lo..=number {
                let block = chain.get_block(b).expect("sealed block");
                found.extend(scan_block_for_matches(block, &fresh).into_iter().map(|m| (b, m)));
            }
            self.watchlist.extend(fresh);
        }
        for (event_block, m) in found {
            if !self.attempted.insert(m.proxy) {
                continue;
            }
            let watch = *self.watchlist.iter().find(|w| w.proxy == m.proxy).expect("watched");
            self.pending.push(Pending {
                watch,
                event_block,
                submit_at,
            });
        }
    }

    fn take_due(&mut self, block: BlockNumber) -> Vec<Pending> {
        let (due, rest) = self.pending.iter().partition(|p| p.submit_at <= block);
        self.pending = rest;
        due
    }

    pub fn has_pending(&self) -> bool {
        !self.pending.is_empty()
    }
}

fn derived(seed: u64, tag: &str, name: &str) -> Address {
    let mut input = seed.to_be_bytes().to_vec();
    input.extend_from_slice(tag.as_bytes());
    input.push(b':');
    input.extend_from_slice(name.as_bytes());
    Address::from_digest(&keccak256(&input))
}

pub fn actor_address(seed: u64, name: &str) -> Address {
    derived(seed, "actor", name)
}

pub fn hub_address(seed: u64) -> Address {
    derived(seed, "hub", "")
}

pub fn executor_address(seed: u64, index: usize) -> Address {
    derived(seed, "executor", &index.to_string())
}

pub fn executor_name(index: usize) -> String {
    format!("executor-{index}")
}

#[derive(Debug, Clone)]
struct TxLabel {
    actor: String,
    action: String,
    function: Option<Function>,
    proxy: Option<String>,
    executor: Option<usize>,
}

#[derive(Debug, Clone, Default)]
struct ExecutorTally {
    submissions: u32,
    wins: u32,
    fees: Wei,
    gas: Gas,
}

#[derive(Debug, Clone, Default)]
struct ProxyTally {
    trigger_block: Option<BlockNumber>,
    triggered_by: Option<String>,
    verifications: u32,
    payouts: u32,
    gas: Vec<(Function, Gas)>,
}

/// A finished scenario run with its chain kept for inspection.
pub struct Simulation {
    config: ScenarioConfig,
    chain: Chain,
    hub: Address,
    addresses: BTreeMap<String, Address>,
    proxies: BTreeMap<String, Address>,
    executors: Vec<ExecutorAgent>,
    initial_balances: BTreeMap<Address, Wei>,
    timeline: Vec<TimelineEntry>,
    first_gas: BTreeMap<Function, Gas>,
    executor_tally: Vec<ExecutorTally>,
    proxy_tally: BTreeMap<String, ProxyTally>,
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport, ScenarioError> {
    Ok(Simulation::run(config)?.report())
}

impl Simulation {
    pub fn run(config: &ScenarioConfig) -> Result<Self, ScenarioError> {
        config.validate()?;
        let mut sim = Simulation::setup(config.clone());
        let steps = steps_by_block(&config.steps);
        let horizon = config
            .steps
            .iter()
            .map(|s| match s.action {
                Action::AdvanceBlocks(k) => s.block.saturating_add(k),
                _ => s.block,
            })
            .max()
            .unwrap_or(0);
        let mut number = 1;
        while number <= horizon || sim.executors.iter().any(ExecutorAgent::has_pending) {
            let due = steps.get(&number).map(Vec::as_slice).unwrap_or(&[]);
            sim.advance(number, due);
            number += 1;
        }
        Ok(sim)
    }

    fn setup(config: ScenarioConfig) -> Self {
        let seed = config.seed;
        let hub = hub_address(seed);
        let mut genesis = Genesis::default().contract(hub, HUB_HANDLER);
        let mut addresses = BTreeMap::new();
        for a in &config.actors {
            let addr = actor_address(seed, &a.name);
            addresses.insert(a.name.clone(), addr);
            genesis = match &a.kind {
                ActorKind::User { balance } => genesis.fund(addr, *balance),
                ActorKind::Contract { handler } => genesis.contract(addr, handler),
            };
        }
        let executors: Vec<ExecutorAgent> = config
            .executor_delays
            .iter()
            .enumerate()
            .map(|(i, d)| ExecutorAgent::new(executor_name(i), executor_address(seed, i), *d))
            .collect();
        for e in &executors {
            genesis = genesis.fund(e.id, config.executor_balance);
        }
        let chain_config = ChainConfig {
            block_interval: config.block_interval,
            blockhash_window: config.blockhash_window,
            gas_schedule: config.gas_schedule.clone(),
        };
        let chain = Chain::new(chain_config, Arc::new(warden::default_registry()), genesis);
        let initial_balances = chain
            .world()
            .accounts()
            .iter()
            .map(|(a, acc)| (*a, acc.balance))
            .collect();
        Simulation {
            executor_tally: vec![ExecutorTally::default(); executors.len()],
            proxy_tally: config
                .proxies
                .iter()
                .map(|p| (p.name.clone(), ProxyTally::default()))
                .collect(),
            config,
            chain,
            hub,
            addresses,
            proxies: BTreeMap::new(),
            executors,
            initial_balances,
            timeline: vec![],
            first_gas: BTreeMap::new(),
        }
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn hub(&self) -> Address {
        self.hub
    }

    pub fn actor_address(&self, name: &str) -> Option<Address> {
        self.addresses.get(name).copied()
    }

    /// Address of a deployed proxy.
    pub fn proxy_address(&self, name: &str) -> Option<Address> {
        self.proxies.get(name).copied()
    }

    pub fn executors(&self) -> &[ExecutorAgent] {
        &self.executors
    }

    pub fn proxy_state(&self, name: &str) -> Option<ProxyState> {
        let addr = self.proxy_address(name)?;
        ProxyStorage::load(self.chain.world(), &addr).ok().map(|s| s.state)
    }

    fn addr(&self, name: &str) -> Address {
        self.addresses[name]
    }

    fn expected_event(&self, proxy: &str) -> LogEntry {
        let event = self.config.proxy(proxy).and_then(|p| p.event.as_ref()).expect("validated");
        LogEntry {
            emitter: self.addr(&event.emitter),
            topics: event.topics.clone(),
            data: event.data.clone(),
        }
    }

    fn arg(&self, a: &Arg) -> RlpItem {
        match a {
            Arg::Uint(v) => RlpItem::uint(*v),
            Arg::Bytes(b) => RlpItem::bytes(b.clone()),
            Arg::Actor(name) => RlpItem::address(&self.addr(name)),
        }
    }

    fn params(&self, proxy: &str) -> ProxyParams {
        let decl = self.config.proxy(proxy).expect("validated");
        let reserved = match decl.release.as_ref().expect("validated") {
            ReleaseDecl::Transfer { to, value } => ReservedTransaction::fund_transfer(self.addr(to), *value),
            ReleaseDecl::Invoke {
                target,
                value,
                signature,
                args,
            } => ReservedTransaction::function_invocation(
                self.addr(target),
                *value,
                encode_call(signature, args.iter().map(|a| self.arg(a)).collect()),
            ),
            ReleaseDecl::Create { handler, args } => ReservedTransaction::contract_creation(CreationPayload::new(
                handler.clone(),
                args.iter().map(|a| self.arg(a)).collect(),
            )),
        };
        ProxyParams {
            hub: self.hub,
            reserved,
            expected_event: self.expected_event(proxy),
            service_fee: decl.fee,
        }
    }

    fn skip(&mut self, block: BlockNumber, actor: &str, action: String, detail: String) {
        self.timeline.push(TimelineEntry {
            block,
            actor: actor.to_owned(),
            action,
            status: EntryStatus::Skipped,
            gas: 0,
            detail: Some(detail),
        });
    }

    /// Transaction for a scripted step, or `None` for steps without one.
    fn user_tx(&mut self, block: BlockNumber, action: &Action) -> Option<(Transaction, TxLabel)> {
        let gas = self.config.gas_limit;
        let label = |actor: &str, action: String, function: Option<Function>, proxy: Option<&str>| TxLabel {
            actor: actor.to_owned(),
            action,
            function,
            proxy: proxy.map(str::to_owned),
            executor: None,
        };
        let owner_of = |sim: &Self, p: &str| sim.config.proxy(p).expect("validated").owner.clone();
        let deployed = |sim: &mut Self, p: &str, verb: &str| -> Option<(String, Address)> {
            let owner = owner_of(sim, p);
            match sim.proxy_address(p) {
                Some(addr) => Some((owner, addr)),
                None => {
                    sim.skip(block, &owner, format!("{verb} {p}"), "proxy not deployed".into());
                    None
                }
            }
        };
        match action {
            Action::DeployProxy(p) => {
                let owner = owner_of(self, p);
                let tx = deploy_proxy_tx(self.addr(&owner), &self.params(p), gas);
                Some((tx, label(&owner, format!("deploy {p}"), Some(Function::Deploy), Some(p))))
            }
            Action::Charge { proxy: p, amount } => {
                let (owner, addr) = deployed(self, p, "charge")?;
                let amount = amount.unwrap_or_else(|| self.params(p).required_funding());
                let tx = charge_tx(self.addr(&owner), addr, amount, gas);
                Some((tx, label(&owner, format!("charge {p}"), Some(Function::Charge), Some(p))))
            }
            Action::Register(p) => {
                let (owner, addr) = deployed(self, p, "register")?;
                let tx = new_service_tx(self.addr(&owner), self.hub, addr, gas);
                Some((tx, label(&owner, format!("register {p}"), Some(Function::NewService), Some(p))))
            }
            Action::Close(p) => {
                let (owner, addr) = deployed(self, p, "close")?;
                let tx = close_tx(self.addr(&owner), addr, gas);
                Some((tx, label(&owner, format!("close {p}"), Some(Function::Close), Some(p))))
            }
            Action::EmitEvent { proxy: p, by } => {
                let sender = by.clone().unwrap_or_else(|| owner_of(self, p));
                let event = self.expected_event(p);
                let tx = Transaction {
                    sender: self.addr(&sender),
                    recipient: Some(event.emitter),
                    value: 0,
                    data: emit_call_data(&event.topics, &event.data),
                    gas_limit: gas,
                };
                Some((tx, label(&sender, format!("emit event of {p}"), None, None)))
            }
            Action::EmitLog { event } => {
                let sender = self
                    .config
                    .actors
                    .iter()
                    .find(|a| matches!(a.kind, ActorKind::User { .. }))
                    .expect("validated")
                    .name
                    .clone();
                let tx = Transaction {
                    sender: self.addr(&sender),
                    recipient: Some(self.addr(&event.emitter)),
                    value: 0,
                    data: emit_call_data(&event.topics, &event.data),
                    gas_limit: gas,
                };
                Some((tx, label(&sender, format!("emit log on {}", event.emitter), None, None)))
            }
            Action::DisableExecutor(_) | Action::AdvanceBlocks(_) => None,
        }
    }

    fn advance(&mut self, number: BlockNumber, steps: &[&crate::scenario::Step]) {
        for s in steps {
            if let Action::DisableExecutor(i) = s.action {
                self.executors[i].disable();
                let name = self.executors[i].name.clone();
                self.skip(number, &name, "disable".into(), "executor stops".into());
            }
        }

        let mut txs = Vec::new();
        let mut labels = Vec::new();
        for s in steps {
            if let Some((tx, label)) = self.user_tx(number, &s.action) {
                txs.push(tx);
                labels.push(label);
            }
        }

        let mut due: Vec<(u64, Address, usize, Pending)> = Vec::new();
        for (i, e) in self.executors.iter_mut().enumerate() {
            for p in e.take_due(number) {
                due.push((e.reaction_delay, e.id, i, p));
            }
        }
        due.sort_by_key(|(delay, id, _, _)| (*delay, *id));
        let proxy_names: BTreeMap<Address, String> =
            self.proxies.iter().map(|(n, a)| (*a, n.clone())).collect();
        for (_, id, i, p) in due {
            let name = self.executors[i].name.clone();
            let proxy_name = proxy_names.get(&p.watch.proxy).cloned().unwrap_or_else(|| p.watch.proxy.to_string());
            let action = format!("eventVerify {proxy_name}");
            match build_proof_bundle(&self.chain, &p.watch, p.event_block, number) {
                Ok(bundle) => {
                    txs.push(event_verify_tx(id, p.watch.proxy, &bundle, self.config.gas_limit));
                    labels.push(TxLabel {
                        actor: name,
                        action,
                        function: Some(Function::EventVerify),
                        proxy: Some(proxy_name),
                        executor: Some(i),
                    });
                }
                Err(err) => self.skip(number, &name, action, err.to_string()),
            }
        }

        let (_, rejected) = self.chain.append_block(txs.clone());
        let outcomes = self.chain.outcomes(number).expect("just sealed").to_vec();
        let mut rejected = rejected.into_iter().peekable();
        let mut outcomes = outcomes.into_iter();
        for (tx, label) in txs.iter().zip(labels) {
            if rejected.peek().is_some_and(|r| &r.transaction == tx) {
                let r = rejected.next().expect("peeked");
                self.record_rejected(number, label, &r.error);
            } else {
                let outcome = outcomes.next().expect("included transaction has an outcome");
                self.record(number, tx, label, &outcome);
            }
        }

        for e in &mut self.executors {
            e.observe(&self.chain, &self.hub, number);
        }
    }

    fn record_rejected(&mut self, block: BlockNumber, label: TxLabel, error: &VmError) {
        self.timeline.push(TimelineEntry {
            block,
            actor: label.actor,
            action: label.action,
            status: EntryStatus::Rejected,
            gas: 0,
            detail: Some(error.to_string()),
        });
    }

    fn record(&mut self, block: BlockNumber, tx: &Transaction, label: TxLabel, outcome: &TxOutcome) {
        let ok = outcome.succeeded();
        if let (Some(Function::Deploy), Some(p), Some(addr)) = (label.function, &label.proxy, outcome.created) {
            self.proxies.insert(p.clone(), addr);
        }
        if ok {
            if let Some(f) = label.function {
                self.first_gas.entry(f).or_insert(outcome.gas_used);
                if let Some(t) = label.proxy.as_ref().and_then(|p| self.proxy_tally.get_mut(p)) {
                    t.gas.push((f, outcome.gas_used));
                }
            }
        }
        if let Some(i) = label.executor {
            let proxy = tx.recipient.expect("eventVerify has a recipient");
            let fee = outcome.transferred(&proxy, &tx.sender);
            let tally = &mut self.executor_tally[i];
            tally.submissions += 1;
            tally.gas += outcome.gas_used;
            tally.fees += fee;
            if ok {
                tally.wins += 1;
                if let Some(t) = label.proxy.as_ref().and_then(|p| self.proxy_tally.get_mut(p)) {
                    t.verifications += 1;
                    t.payouts += u32::from(fee > 0);
                    if t.trigger_block.is_none() {
                        t.trigger_block = Some(block);
                        t.triggered_by = Some(label.actor.clone());
                    }
                }
            }
        }
        let detail = outcome.failure.as_ref().map(|f| match f.downcast_ref::<WardenError>() {
            Some(w) => w.to_string(),
            None => f.to_string(),
        });
        self.timeline.push(TimelineEntry {
            block,
            actor: label.actor,
            action: label.action,
            status: if ok { EntryStatus::Success } else { EntryStatus::Reverted },
            gas: outcome.gas_used,
            detail,
        });
    }

    fn first_event_block(&self, name: &str) -> Option<BlockNumber> {
        let event = self.expected_event(name);
        let digest = event.digest();
        self.chain
            .blocks()
            .iter()
            .find(|b| {
                b.receipts
                    .iter()
                    .flat_map(|r| &r.logs)
                    .any(|l| l.emitter == event.emitter && l.digest() == digest)
            })
            .map(Block::number)
    }

    pub fn report(&self) -> ScenarioReport {
        let rates = UsdRates::default();
        let world = self.chain.world();
        let cost_table = Function::ALL
            .iter()
            .map(|f| ReportRow::new(*f, self.first_gas.get(f).copied(), &rates))
            .collect();

        let proxies = self
            .config
            .proxies
            .iter()
            .map(|decl| {
                let address = self.proxy_address(&decl.name);
                let storage = address.and_then(|a| ProxyStorage::load(world, &a).ok());
                let state = storage.as_ref().map(|s| s.state);
                let release = match (state, storage.as_ref().and_then(|s| s.release_ok)) {
                    (None, _) => ReleaseStatus::NotDeployed,
                    (Some(ProxyState::Triggered), Some(false)) => ReleaseStatus::ReleaseFailed,
                    (Some(ProxyState::Triggered), _) => ReleaseStatus::Released,
                    (Some(ProxyState::Closed), _) => ReleaseStatus::Refunded,
                    _ => ReleaseStatus::NotTriggered,
                };
                let tally = &self.proxy_tally[&decl.name];
                ProxySummary {
                    name: decl.name.clone(),
                    address,
                    owner: decl.owner.clone(),
                    state,
                    release,
                    event_block: self.first_event_block(&decl.name),
                    trigger_block: tally.trigger_block,
                    triggered_by: tally.triggered_by.clone(),
                    successful_verifications: tally.verifications,
                    fee_payouts: tally.payouts,
                    service_fee: decl.fee,
                    gas: tally.gas.clone(),
                }
            })
            .collect();

        let executors = self
            .executors
            .iter()
            .zip(&self.executor_tally)
            .map(|(e, t)| ExecutorSummary {
                name: e.name.clone(),
                address: e.id,
                delay: e.reaction_delay,
                active: e.active,
                submissions: t.submissions,
                wins: t.wins,
                fees_earned: t.fees,
                gas_burned: t.gas,
                profit: t.fees as i128 - i128::from(t.gas),
                balance_delta: world.balance(&e.id) as i128 - self.initial_balances[&e.id] as i128,
            })
            .collect();

        let expectations = self
            .config
            .expectations
            .iter()
            .map(|x| {
                let actual = self.proxy_state(&x.proxy);
                ExpectationResult {
                    proxy: x.proxy.clone(),
                    expected: x.state,
                    actual,
                    holds: actual == Some(x.state),
                }
            })
            .collect();

        let initial_total: Wei = self.initial_balances.values().sum();
        let final_total = world.total_balance();
        let burned = world.burned();
        ScenarioReport {
            seed: self.config.seed,
            blockhash_window: self.config.blockhash_window,
            final_block: self.chain.height(),
            rates,
            cost_table,
            proxies,
            executors,
            timeline: self.timeline.clone(),
            expectations,
            conservation: Conservation {
                initial_total,
                final_total,
                burned,
                holds: initial_total == final_total + burned,
            },
        }
    }
}

#[cfg(test)]
mod tests;
