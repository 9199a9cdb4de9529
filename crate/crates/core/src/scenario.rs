//! Line-oriented scenario files.
//!
//! ```text
//! # comments start with '#'
//! seed 7
//! window 256
//! block-interval 15
//! gas-limit 3000000
//! gas per-storage-write 5000
//! executors 3 delays 1,1,2
//! executor-balance 10000000000
//!
//! actor user alice balance 1000000000000
//! actor user bob balance 0
//! actor contract oracle event-source
//! actor contract vault sentinel
//!
//! proxy p1 owner alice fee 1000000
//! event p1 emitter oracle topics keccak:Expiry(uint256),0x00..2a data 0x01
//! release p1 transfer bob 5000
//!
//! step AT BLOCK 1: deploy-proxy p1
//! step AT BLOCK 2: charge p1
//! step AT BLOCK 3: register p1
//! step AT BLOCK 10: emit-event p1
//! expect p1 triggered
//! ```
//!
//! Release forms: `transfer <to> <value>`, `invoke <contract> <value>
//! <signature> [args..]`, and `create <handler> [args..]`. Arguments are
//! decimal integers, `0x` hex byte strings, or actor names (addresses).
//!
//! Step verbs: `deploy-proxy p`, `charge p [amount]`, `register p`,
//! `emit-event p [by actor]`, `emit-log contract topics .. data ..`,
//! `disable-executor i`, `close p`, `advance-blocks k`.
//!
//! Topics are comma-separated: 32-byte hex, `keccak:<text>`, or `-` for none.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use thiserror::Error;

use crate::contracts::{EVENT_SOURCE, REVERTER, SENTINEL};
use crate::primitives::{keccak256, BlockNumber, Digest, Gas, Wei};
use crate::vm::GasSchedule;
use crate::warden::{ProxyState, HUB_HANDLER, PROXY_HANDLER};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_GAS_LIMIT: Gas = 3_000_000;
pub const DEFAULT_EXECUTOR_BALANCE: Wei = 10_000_000_000;
pub const DEFAULT_EXECUTOR_DELAY: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid script: {0}")]
    InvalidScript(String),
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::InvalidScript(msg.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActorKind {
    User { balance: Wei },
    Contract { handler: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActorDecl {
    pub name: String,
    pub kind: ActorKind,
}

/// Argument of a reserved invocation or creation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arg {
    Uint(u128),
    Bytes(Vec<u8>),
    Actor(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReleaseDecl {
    Transfer { to: String, value: Wei },
    Invoke { target: String, value: Wei, signature: String, args: Vec<Arg> },
    Create { handler: String, args: Vec<Arg> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDecl {
    pub emitter: String,
    pub topics: Vec<Digest>,
    pub data: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProxyDecl {
    pub name: String,
    pub owner: String,
    pub fee: Wei,
    pub event: Option<EventDecl>,
    pub release: Option<ReleaseDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    DeployProxy(String),
    Charge { proxy: String, amount: Option<Wei> },
    Register(String),
    EmitEvent { proxy: String, by: Option<String> },
    EmitLog { event: EventDecl },
    DisableExecutor(usize),
    Close(String),
    AdvanceBlocks(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub block: BlockNumber,
    pub action: Action,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expectation {
    pub proxy: String,
    pub state: ProxyState,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub blockhash_window: u64,
    pub block_interval: u64,
    pub gas_limit: Gas,
    pub gas_schedule: GasSchedule,
    /// One reaction delay per executor; the length is the executor count.
    pub executor_delays: Vec<u64>,
    pub executor_balance: Wei,
    pub actors: Vec<ActorDecl>,
    pub proxies: Vec<ProxyDecl>,
    pub steps: Vec<Step>,
    pub expectations: Vec<Expectation>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let chain = crate::chain::ChainConfig::default();
        ScenarioConfig {
            seed: DEFAULT_SEED,
            blockhash_window: chain.blockhash_window,
            block_interval: chain.block_interval,
            gas_limit: DEFAULT_GAS_LIMIT,
            gas_schedule: chain.gas_schedule,
            executor_delays: vec![DEFAULT_EXECUTOR_DELAY],
            executor_balance: DEFAULT_EXECUTOR_BALANCE,
            actors: vec![],
            proxies: vec![],
            steps: vec![],
            expectations: vec![],
        }
    }
}

impl ScenarioConfig {
    /// Resizes the executor set, reusing the declared delays cyclically.
    pub fn set_executor_count(&mut self, n: usize) {
        let delays = if self.executor_delays.is_empty() {
            vec![DEFAULT_EXECUTOR_DELAY]
        } else {
            self.executor_delays.clone()
        };
        self.executor_delays = delays.iter().copied().cycle().take(n).collect();
    }

    pub fn actor(&self, name: &str) -> Option<&ActorDecl> {
        self.actors.iter().find(|a| a.name == name)
    }

    pub fn proxy(&self, name: &str) -> Option<&ProxyDecl> {
        self.proxies.iter().find(|p| p.name == name)
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut cfg = ScenarioConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            parse_line(&mut cfg, content).map_err(|message| ScenarioError::Parse { line, message })?;
            if let Some(step) = cfg.steps.last_mut() {
                if step.line == 0 {
                    step.line = line;
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks cross-references; parsing alone only checks each line.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.blockhash_window == 0 {
            return Err(invalid("window must be at least 1"));
        }
        if !self.gas_schedule.is_valid() {
            return Err(invalid("gas schedule has a zero entry"));
        }
        let mut names = BTreeSet::new();
        for a in &self.actors {
            if !names.insert(a.name.as_str()) {
                return Err(invalid(format!("duplicate name {:?}", a.name)));
            }
            if let ActorKind::Contract { handler } = &a.kind {
                if !stock_handler(handler) {
                    return Err(invalid(format!("actor {:?}: unknown handler {handler:?}", a.name)));
                }
            }
        }
        for p in &self.proxies {
            if !names.insert(p.name.as_str()) {
                return Err(invalid(format!("duplicate name {:?}", p.name)));
            }
            self.validate_proxy(p)?;
        }
        for s in &self.steps {
            if s.block == 0 {
                return Err(invalid(format!("line {}: block 0 is genesis", s.line)));
            }
            self.validate_action(&s.action)
                .map_err(|m| invalid(format!("line {}: {m}", s.line)))?;
        }
        for e in &self.expectations {
            if self.proxy(&e.proxy).is_none() {
                return Err(invalid(format!("expectation names unknown proxy {:?}", e.proxy)));
            }
        }
        Ok(())
    }

    fn user(&self, name: &str) -> Result<(), String> {
        match self.actor(name).map(|a| &a.kind) {
            Some(ActorKind::User { .. }) => Ok(()),
            Some(_) => Err(format!("{name:?} is not a user")),
            None => Err(format!("unknown actor {name:?}")),
        }
    }

    fn contract(&self, name: &str) -> Result<&str, String> {
        match self.actor(name).map(|a| &a.kind) {
            Some(ActorKind::Contract { handler }) => Ok(handler),
            Some(_) => Err(format!("{name:?} is not a contract")),
            None => Err(format!("unknown actor {name:?}")),
        }
    }

    fn event_source(&self, name: &str) -> Result<(), String> {
        match self.contract(name)? {
            EVENT_SOURCE => Ok(()),
            _ => Err(format!("{name:?} is not an {EVENT_SOURCE}")),
        }
    }

    fn args(&self, args: &[Arg]) -> Result<(), String> {
        for a in args {
            if let Arg::Actor(name) = a {
                if self.actor(name).is_none() {
                    return Err(format!("unknown actor {name:?}"));
                }
            }
        }
        Ok(())
    }

    fn validate_proxy(&self, p: &ProxyDecl) -> Result<(), ScenarioError> {
        let ctx = |m: String| invalid(format!("proxy {:?}: {m}", p.name));
        self.user(&p.owner).map_err(ctx)?;
        let event = p.event.as_ref().ok_or_else(|| ctx("no event declared".into()))?;
        self.event_source(&event.emitter).map_err(ctx)?;
        match p.release.as_ref().ok_or_else(|| ctx("no release declared".into()))? {
            ReleaseDecl::Transfer { to, value } => {
                if self.actor(to).is_none() {
                    return Err(ctx(format!("unknown actor {to:?}")));
                }
                if *value == 0 {
                    return Err(ctx("transfer of zero value".into()));
                }
            }
            ReleaseDecl::Invoke { target, args, .. } => {
                self.contract(target).map_err(ctx)?;
                self.args(args).map_err(ctx)?;
            }
            ReleaseDecl::Create { handler, args } => {
                if !stock_handler(handler) {
                    return Err(ctx(format!("unknown handler {handler:?}")));
                }
                self.args(args).map_err(ctx)?;
            }
        }
        Ok(())
    }

    fn validate_action(&self, action: &Action) -> Result<(), String> {
        let proxy = |name: &str| {
            self.proxy(name)
                .map(|_| ())
                .ok_or_else(|| format!("unknown proxy {name:?}"))
        };
        match action {
            Action::DeployProxy(p) | Action::Register(p) | Action::Close(p) => proxy(p),
            Action::Charge { proxy: p, .. } => proxy(p),
            Action::EmitEvent { proxy: p, by } => {
                proxy(p)?;
                by.as_deref().map_or(Ok(()), |u| self.user(u))
            }
            Action::EmitLog { event } => {
                self.event_source(&event.emitter)?;
                match self.actors.iter().any(|a| matches!(a.kind, ActorKind::User { .. })) {
                    true => Ok(()),
                    false => Err("emit-log needs at least one user to send it".into()),
                }
            }
            Action::DisableExecutor(i) if *i >= self.executor_delays.len() => {
                Err(format!("executor {i} does not exist"))
            }
            Action::DisableExecutor(_) | Action::AdvanceBlocks(_) => Ok(()),
        }
    }
}

fn stock_handler(name: &str) -> bool {
    matches!(name, EVENT_SOURCE | SENTINEL | REVERTER | PROXY_HANDLER | HUB_HANDLER)
}

fn num<T: FromStr>(s: Option<&str>, what: &str) -> Result<T, String> {
    let s = s.ok_or_else(|| format!("missing {what}"))?;
    s.replace('_', "")
        .parse()
        .map_err(|_| format!("bad {what} {s:?}"))
}

fn word<'a>(s: Option<&'a str>, what: &str) -> Result<&'a str, String> {
    s.ok_or_else(|| format!("missing {what}"))
}

fn keyword(s: Option<&str>, expected: &str) -> Result<(), String> {
    match s {
        Some(w) if w == expected => Ok(()),
        Some(w) => Err(format!("expected {expected:?}, found {w:?}")),
        None => Err(format!("expected {expected:?}")),
    }
}

fn end(mut it: impl Iterator) -> Result<(), String> {
    match it.next() {
        None => Ok(()),
        Some(_) => Err("trailing input".into()),
    }
}

fn hex_bytes(s: &str) -> Result<Vec<u8>, String> {
    if s == "-" {
        return Ok(vec![]);
    }
    let digits = s.strip_prefix("0x").ok_or_else(|| format!("expected 0x-prefixed hex, found {s:?}"))?;
    hex::decode(digits).map_err(|e| format!("bad hex {s:?}: {e}"))
}

fn topics(s: &str) -> Result<Vec<Digest>, String> {
    if s == "-" {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|t| match t.strip_prefix("keccak:") {
            Some(text) => Ok(keccak256(text.as_bytes())),
            None => t.parse::<Digest>().map_err(|_| format!("bad topic {t:?}")),
        })
        .collect()
}

fn arg(s: &str) -> Result<Arg, String> {
    if s.starts_with("0x") {
        hex_bytes(s).map(Arg::Bytes)
    } else if s.starts_with(|c: char| c.is_ascii_digit()) {
        num(Some(s), "integer").map(Arg::Uint)
    } else {
        Ok(Arg::Actor(s.to_owned()))
    }
}

fn event_tail<'a>(emitter: &str, mut it: impl Iterator<Item = &'a str>) -> Result<EventDecl, String> {
    keyword(it.next(), "topics")?;
    let topics = topics(word(it.next(), "topics")?)?;
    keyword(it.next(), "data")?;
    let data = hex_bytes(word(it.next(), "data")?)?;
    end(it)?;
    Ok(EventDecl {
        emitter: emitter.to_owned(),
        topics,
        data,
    })
}

fn proxy_mut<'c>(cfg: &'c mut ScenarioConfig, name: &str) -> Result<&'c mut ProxyDecl, String> {
    cfg.proxies
        .iter_mut()
        .find(|p| p.name == name)
        .ok_or_else(|| format!("unknown proxy {name:?}"))
}

fn parse_line(cfg: &mut ScenarioConfig, line: &str) -> Result<(), String> {
    let mut it = line.split_whitespace();
    let head = it.next().expect("non-empty line");
    match head {
        "seed" => cfg.seed = num(it.next(), "seed")?,
        "window" => cfg.blockhash_window = num(it.next(), "window")?,
        "block-interval" => cfg.block_interval = num(it.next(), "block interval")?,
        "gas-limit" => cfg.gas_limit = num(it.next(), "gas limit")?,
        "executor-balance" => cfg.executor_balance = num(it.next(), "balance")?,
        "gas" => {
            let key = word(it.next(), "gas key")?;
            let v: Gas = num(it.next(), "gas value")?;
            let s = &mut cfg.gas_schedule;
            let slot = match key {
                "base-tx" => &mut s.base_tx,
                "per-data-octet" => &mut s.per_data_octet,
                "per-storage-write" => &mut s.per_storage_write,
                "per-log" => &mut s.per_log,
                "per-message" => &mut s.per_message,
                "per-contract-created" => &mut s.per_contract_created,
                "per-proof-octet" => &mut s.per_proof_octet_verified,
                _ => return Err(format!("unknown gas key {key:?}")),
            };
            *slot = v;
        }
        "executors" => {
            let n: usize = num(it.next(), "executor count")?;
            match it.next() {
                None => cfg.executor_delays = vec![DEFAULT_EXECUTOR_DELAY; n],
                Some("delays") => {
                    let list = word(it.next(), "delays")?;
                    let delays = list
                        .split(',')
                        .map(|d| num(Some(d), "delay"))
                        .collect::<Result<Vec<u64>, _>>()?;
                    if delays.len() != n {
                        return Err(format!("{n} executors but {} delays", delays.len()));
                    }
                    cfg.executor_delays = delays;
                }
                Some(w) => return Err(format!("expected \"delays\", found {w:?}")),
            }
        }
        "actor" => {
            let kind = word(it.next(), "actor kind")?;
            let name = word(it.next(), "actor name")?.to_owned();
            let kind = match kind {
                "user" | "eoa" => {
                    keyword(it.next(), "balance")?;
                    ActorKind::User {
                        balance: num(it.next(), "balance")?,
                    }
                }
                "contract" => ActorKind::Contract {
                    handler: word(it.next(), "handler")?.to_owned(),
                },
                _ => return Err(format!("unknown actor kind {kind:?}")),
            };
            cfg.actors.push(ActorDecl { name, kind });
        }
        "proxy" => {
            let name = word(it.next(), "proxy name")?.to_owned();
            keyword(it.next(), "owner")?;
            let owner = word(it.next(), "owner")?.to_owned();
            keyword(it.next(), "fee")?;
            let fee = num(it.next(), "fee")?;
            cfg.proxies.push(ProxyDecl {
                name,
                owner,
                fee,
                event: None,
                release: None,
            });
        }
        "event" => {
            let p = word(it.next(), "proxy name")?.to_owned();
            keyword(it.next(), "emitter")?;
            let emitter = word(it.next(), "emitter")?.to_owned();
            let event = event_tail(&emitter, &mut it)?;
            proxy_mut(cfg, &p)?.event = Some(event);
        }
        "release" => {
            let p = word(it.next(), "proxy name")?.to_owned();
            let release = match word(it.next(), "release kind")? {
                "transfer" => ReleaseDecl::Transfer {
                    to: word(it.next(), "recipient")?.to_owned(),
                    value: num(it.next(), "value")?,
                },
                "invoke" => ReleaseDecl::Invoke {
                    target: word(it.next(), "target")?.to_owned(),
                    value: num(it.next(), "value")?,
                    signature: word(it.next(), "signature")?.to_owned(),
                    args: it.by_ref().map(arg).collect::<Result<_, _>>()?,
                },
                "create" => ReleaseDecl::Create {
                    handler: word(it.next(), "handler")?.to_owned(),
                    args: it.by_ref().map(arg).collect::<Result<_, _>>()?,
                },
                k => return Err(format!("unknown release kind {k:?}")),
            };
            proxy_mut(cfg, &p)?.release = Some(release);
        }
        "step" => {
            keyword(it.next(), "AT")?;
            keyword(it.next(), "BLOCK")?;
            let at = word(it.next(), "block number")?;
            let block = num(Some(at.strip_suffix(':').ok_or("expected ':' after the block number")?), "block number")?;
            let verb = word(it.next(), "step verb")?;
            let action = match verb {
                "deploy-proxy" => Action::DeployProxy(word(it.next(), "proxy")?.to_owned()),
                "register" => Action::Register(word(it.next(), "proxy")?.to_owned()),
                "close" => Action::Close(word(it.next(), "proxy")?.to_owned()),
                "charge" => Action::Charge {
                    proxy: word(it.next(), "proxy")?.to_owned(),
                    amount: it.next().map(|a| num(Some(a), "amount")).transpose()?,
                },
                "emit-event" => {
                    let proxy = word(it.next(), "proxy")?.to_owned();
                    let by = match it.next() {
                        None => None,
                        Some("by") => Some(word(it.next(), "sender")?.to_owned()),
                        Some(w) => return Err(format!("expected \"by\", found {w:?}")),
                    };
                    Action::EmitEvent { proxy, by }
                }
                "emit-log" => {
                    let emitter = word(it.next(), "emitter")?.to_owned();
                    Action::EmitLog {
                        event: event_tail(&emitter, &mut it)?,
                    }
                }
                "disable-executor" => Action::DisableExecutor(num(it.next(), "executor index")?),
                "advance-blocks" => Action::AdvanceBlocks(num(it.next(), "block count")?),
                v => return Err(format!("unknown step verb {v:?}")),
            };
            cfg.steps.push(Step { block, action, line: 0 });
        }
        "expect" => {
            let proxy = word(it.next(), "proxy")?.to_owned();
            let state = word(it.next(), "state")?.parse::<ProxyState>()?;
            cfg.expectations.push(Expectation { proxy, state });
        }
        _ => return Err(format!("unknown directive {head:?}")),
    }
    end(it)
}

/// Steps grouped by block, script order kept within a block.
pub(crate) fn steps_by_block(steps: &[Step]) -> BTreeMap<BlockNumber, Vec<&Step>> {
    let mut map: BTreeMap<BlockNumber, Vec<&Step>> = BTreeMap::new();
    for s in steps {
        map.entry(s.block).or_default().push(s);
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
        seed 7
        window 64
        executors 3 delays 1,1,2
        gas per-log 2000
        actor user alice balance 1_000_000
        actor user bob balance 0
        actor contract oracle event-source
        actor contract vault sentinel
        proxy p1 owner alice fee 100   # trailing comment
        event p1 emitter oracle topics keccak:Expiry,0x000000000000000000000000000000000000000000000000000000000000002a data 0x01ff
        release p1 invoke vault 5 poke(uint256) 42
        step AT BLOCK 1: deploy-proxy p1
        step AT BLOCK 2: charge p1 250
        step AT BLOCK 3: register p1
        step AT BLOCK 9: emit-log oracle topics - data -
        step AT BLOCK 10: emit-event p1 by bob
        step AT BLOCK 12: disable-executor 2
        expect p1 triggered
    ";

    #[test]
    fn parses_sample() {
        let cfg = ScenarioConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.blockhash_window, 64);
        assert_eq!(cfg.executor_delays, vec![1, 1, 2]);
        assert_eq!(cfg.gas_schedule.per_log, 2000);
        assert_eq!(cfg.actors.len(), 4);
        let p = cfg.proxy("p1").unwrap();
        let ev = p.event.as_ref().unwrap();
        assert_eq!(ev.topics[0], keccak256(b"Expiry"));
        assert_eq!(ev.topics[1].0[31], 42);
        assert_eq!(ev.data, vec![1, 0xff]);
        assert_eq!(
            p.release,
            Some(ReleaseDecl::Invoke {
                target: "vault".into(),
                value: 5,
                signature: "poke(uint256)".into(),
                args: vec![Arg::Uint(42)]
            })
        );
        assert_eq!(cfg.steps.len(), 6);
        assert_eq!(cfg.steps[1].action, Action::Charge { proxy: "p1".into(), amount: Some(250) });
        assert_eq!(cfg.steps[0].line, 13);
        assert_eq!(cfg.expectations[0].state, ProxyState::Triggered);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        for (text, line) in [
            ("seed x", 1),
            ("\n\nactor wizard merlin", 3),
            ("window 5\nstep AT BLOCK 3 deploy-proxy p", 2),
            ("executors 2 delays 1", 1),
            ("step AT BLOCK 1: fly p", 1),
            ("seed 1 2", 1),
            ("event nope emitter x topics - data -", 1),
        ] {
            match ScenarioConfig::parse(text) {
                Err(ScenarioError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn invalid_references() {
        let base = "actor user alice balance 10\nactor contract oracle event-source\n";
        for tail in [
            "proxy p owner ghost fee 1\nevent p emitter oracle topics - data -\nrelease p transfer alice 1",
            "proxy p owner alice fee 1\nrelease p transfer alice 1",
            "proxy p owner alice fee 1\nevent p emitter alice topics - data -\nrelease p transfer alice 1",
            "proxy p owner alice fee 1\nevent p emitter oracle topics - data -\nrelease p create nothing",
            "step AT BLOCK 2: register q",
            "step AT BLOCK 0: advance-blocks 1",
            "step AT BLOCK 2: disable-executor 5",
            "actor user alice balance 3",
            "window 0",
        ] {
            let text = format!("{base}{tail}");
            assert!(
                matches!(ScenarioConfig::parse(&text), Err(ScenarioError::InvalidScript(_))),
                "{tail}"
            );
        }
    }

    #[test]
    fn executor_count_override_cycles_delays() {
        let mut cfg = ScenarioConfig::parse("executors 2 delays 0,5").unwrap();
        cfg.set_executor_count(5);
        assert_eq!(cfg.executor_delays, vec![0, 5, 0, 5, 0]);
        cfg.set_executor_count(0);
        assert!(cfg.executor_delays.is_empty());
        cfg.set_executor_count(2);
        assert_eq!(cfg.executor_delays, vec![1, 1]);
    }
}
