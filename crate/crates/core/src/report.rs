//! Scenario reports: a stable-keyed JSON tree and a human table.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::primitives::{Address, BlockNumber, Gas, Wei};
use crate::warden::ProxyState;

pub const GAS_TO_ETHER: f64 = 1.67e-8;
pub const ETHER_TO_USD: f64 = 175.0;

/// Gas measured for a Solidity deployment of the same protocol. Shown next
/// to the simulated figures for comparison, never asserted.
pub const REFERENCE_GAS: [(Function, Gas); 5] = [
    (Function::Deploy, 889_764),
    (Function::Charge, 21_497),
    (Function::NewService, 45_612),
    (Function::EventVerify, 175_674),
    (Function::Close, 13_662),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UsdRates {
    pub gas_to_ether: f64,
    pub ether_to_usd: f64,
}

impl Default for UsdRates {
    fn default() -> Self {
        UsdRates {
            gas_to_ether: GAS_TO_ETHER,
            ether_to_usd: ETHER_TO_USD,
        }
    }
}

impl UsdRates {
    pub fn usd(&self, gas: Gas) -> f64 {
        gas as f64 * self.gas_to_ether * self.ether_to_usd
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "ET.schedule")]
    Schedule,
    #[serde(rename = "ET.execute")]
    Execute,
    #[serde(rename = "Other")]
    Other,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::Schedule => "ET.schedule",
            Phase::Execute => "ET.execute",
            Phase::Other => "Other",
        }
    }
}

/// Protocol functions that get a cost-table row, in protocol order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Function {
    Deploy,
    Charge,
    NewService,
    EventVerify,
    Close,
}

impl Function {
    pub const ALL: [Function; 5] = [
        Function::Deploy,
        Function::Charge,
        Function::NewService,
        Function::EventVerify,
        Function::Close,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Function::Deploy => "deploy",
            Function::Charge => "charge()",
            Function::NewService => "newService()",
            Function::EventVerify => "eventVerify()",
            Function::Close => "close()",
        }
    }

    pub fn phase(self) -> Phase {
        match self {
            Function::Deploy | Function::Charge | Function::NewService => Phase::Schedule,
            Function::EventVerify => Phase::Execute,
            Function::Close => Phase::Other,
        }
    }

    /// Step number inside the two-phase process; `close` has none.
    pub fn step(self) -> Option<u32> {
        match self {
            Function::Deploy => Some(1),
            Function::Charge => Some(2),
            Function::NewService => Some(3),
            Function::EventVerify => Some(4),
            Function::Close => None,
        }
    }

    pub fn reference_gas(self) -> Gas {
        REFERENCE_GAS
            .iter()
            .find(|(f, _)| *f == self)
            .map(|(_, g)| *g)
            .expect("every function has a reference")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub phase: Phase,
    pub step: Option<u32>,
    pub function: Function,
    /// Gas of the first successful call in the run, if any.
    pub simulated_gas: Option<Gas>,
    pub simulated_usd: Option<f64>,
    pub reference_gas: Gas,
    pub reference_usd: f64,
}

impl ReportRow {
    pub fn new(function: Function, simulated_gas: Option<Gas>, rates: &UsdRates) -> Self {
        ReportRow {
            phase: function.phase(),
            step: function.step(),
            function,
            simulated_gas,
            simulated_usd: simulated_gas.map(|g| rates.usd(g)),
            reference_gas: function.reference_gas(),
            reference_usd: rates.usd(function.reference_gas()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReleaseStatus {
    NotDeployed,
    NotTriggered,
    Released,
    /// Triggered, but the reserved transaction's target failed.
    ReleaseFailed,
    Refunded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProxySummary {
    pub name: String,
    pub address: Option<Address>,
    pub owner: String,
    pub state: Option<ProxyState>,
    pub release: ReleaseStatus,
    /// First block holding a log that matches the commitment.
    pub event_block: Option<BlockNumber>,
    pub trigger_block: Option<BlockNumber>,
    pub triggered_by: Option<String>,
    pub successful_verifications: u32,
    pub fee_payouts: u32,
    pub service_fee: Wei,
    /// Gas of each successful protocol call on this proxy.
    pub gas: Vec<(Function, Gas)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutorSummary {
    pub name: String,
    pub address: Address,
    pub delay: u64,
    pub active: bool,
    pub submissions: u32,
    pub wins: u32,
    pub fees_earned: Wei,
    pub gas_burned: Gas,
    /// Fees earned minus gas burned.
    pub profit: i128,
    /// Final minus initial balance; equals `profit` when accounts reconcile.
    pub balance_delta: i128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryStatus {
    Success,
    Reverted,
    /// Refused before execution; not in any block.
    Rejected,
    /// Not submitted.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelineEntry {
    pub block: BlockNumber,
    pub actor: String,
    pub action: String,
    pub status: EntryStatus,
    pub gas: Gas,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectationResult {
    pub proxy: String,
    pub expected: ProxyState,
    pub actual: Option<ProxyState>,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conservation {
    pub initial_total: Wei,
    pub final_total: Wei,
    pub burned: Wei,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub seed: u64,
    pub blockhash_window: u64,
    pub final_block: BlockNumber,
    pub rates: UsdRates,
    pub cost_table: Vec<ReportRow>,
    pub proxies: Vec<ProxySummary>,
    pub executors: Vec<ExecutorSummary>,
    pub timeline: Vec<TimelineEntry>,
    pub expectations: Vec<ExpectationResult>,
    pub conservation: Conservation,
}

impl ScenarioReport {
    pub fn expectations_hold(&self) -> bool {
        self.expectations.iter().all(|e| e.holds)
    }

    pub fn proxy(&self, name: &str) -> Option<&ProxySummary> {
        self.proxies.iter().find(|p| p.name == name)
    }

    pub fn row(&self, function: Function) -> Option<&ReportRow> {
        self.cost_table.iter().find(|r| r.function == function)
    }

    pub fn to_tree(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_tree(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "seed {}  window {}  blocks {}", self.seed, self.blockhash_window, self.final_block);
        let _ = writeln!(
            w,
            "USD = gas x {:e} ether/gas x {} USD/ether",
            self.rates.gas_to_ether, self.rates.ether_to_usd
        );
        let _ = writeln!(w);
        let _ = writeln!(
            w,
            "{:<12} {:>4}  {:<14} {:>10} {:>9}  {:>10} {:>9}",
            "phase", "step", "function", "gas", "usd", "ref gas", "ref usd"
        );
        let mut rows: Vec<&ReportRow> = self.cost_table.iter().collect();
        rows.sort_by_key(|r| (r.phase, r.function));
        for r in rows {
            let _ = writeln!(
                w,
                "{:<12} {:>4}  {:<14} {:>10} {:>9}  {:>10} {:>9.2}",
                r.phase.label(),
                r.step.map_or_else(|| "-".to_owned(), |s| s.to_string()),
                r.function.label(),
                r.simulated_gas.map_or_else(|| "-".to_owned(), |g| g.to_string()),
                r.simulated_usd.map_or_else(|| "-".to_owned(), |u| format!("{u:.4}")),
                r.reference_gas,
                r.reference_usd,
            );
        }

        let _ = writeln!(w, "\nproxies");
        for p in &self.proxies {
            let _ = writeln!(
                w,
                "  {:<10} {:<11} {:<14} event {:>5}  trigger {:>5}  by {:<12} payouts {}",
                p.name,
                p.state.map_or("-", ProxyState::name),
                release_label(p.release),
                opt(p.event_block),
                opt(p.trigger_block),
                p.triggered_by.as_deref().unwrap_or("-"),
                p.fee_payouts,
            );
        }

        let _ = writeln!(w, "\nexecutors");
        for e in &self.executors {
            let _ = writeln!(
                w,
                "  {:<12} delay {:>3}  {:<8} sent {:>2}  won {:>2}  fees {:>12}  gas {:>9}  profit {:>12}",
                e.name,
                e.delay,
                if e.active { "active" } else { "disabled" },
                e.submissions,
                e.wins,
                e.fees_earned,
                e.gas_burned,
                e.profit,
            );
        }

        let _ = writeln!(w, "\ntimeline");
        for t in &self.timeline {
            let _ = write!(
                w,
                "  {:>5}  {:<12} {:<24} {:<9} {:>9}",
                t.block,
                t.actor,
                t.action,
                status_label(t.status),
                t.gas
            );
            if let Some(d) = &t.detail {
                let _ = write!(w, "  {d}");
            }
            let _ = writeln!(w);
        }

        if !self.expectations.is_empty() {
            let _ = writeln!(w, "\nexpectations");
            for e in &self.expectations {
                let _ = writeln!(
                    w,
                    "  {:<4} {} is {} (expected {})",
                    if e.holds { "ok" } else { "FAIL" },
                    e.proxy,
                    e.actual.map_or("not deployed", ProxyState::name),
                    e.expected
                );
            }
        }
        let c = &self.conservation;
        let _ = writeln!(
            w,
            "\nconservation: initial {} = final {} + burned {}: {}",
            c.initial_total,
            c.final_total,
            c.burned,
            if c.holds { "ok" } else { "VIOLATED" }
        );
        out
    }
}

fn opt(v: Option<BlockNumber>) -> String {
    v.map_or_else(|| "-".to_owned(), |n| n.to_string())
}

fn release_label(r: ReleaseStatus) -> &'static str {
    match r {
        ReleaseStatus::NotDeployed => "not-deployed",
        ReleaseStatus::NotTriggered => "not-triggered",
        ReleaseStatus::Released => "released",
        ReleaseStatus::ReleaseFailed => "release-failed",
        ReleaseStatus::Refunded => "refunded",
    }
}

fn status_label(s: EntryStatus) -> &'static str {
    match s {
        EntryStatus::Success => "ok",
        EntryStatus::Reverted => "reverted",
        EntryStatus::Rejected => "rejected",
        EntryStatus::Skipped => "skipped",
    }
}
