//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eventwarden_core::agents::{executor_address, Simulation};
use eventwarden_core::chain::{Chain, ChainConfig, Genesis, LogEntry, Receipt};
use eventwarden_core::contracts::{emit_call_data, EVENT_SOURCE, SENTINEL, SENTINEL_KEY};
use eventwarden_core::report::Function;
use eventwarden_core::rlp::{self, RlpError, RlpItem};
use eventwarden_core::scenario::ScenarioConfig;
use eventwarden_core::trie::{self, ReceiptTrie};
use eventwarden_core::vm::{Selector, TraceKind, Transaction, TxOutcome};
use eventwarden_core::warden::{
    self, charge_tx, deploy_proxy_tx, event_verify_tx, new_service_tx, ProofBundle, ProxyParams, ProxyState,
    ProxyStorage, ReservedTransaction, WardenError, HUB_HANDLER,
};
use eventwarden_core::{keccak256, Address, BlockNumber, Digest, Gas, Wei};

const CANONICAL: &str = include_str!("../../../scenarios/canonical.scn");

type Check = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("rlp roundtrip and canonical form", rlp_roundtrip),
        ("keccak-256 known answers", keccak_vectors),
        ("receipt trie completeness and soundness", trie_soundness),
        ("release only on a proven event", safety_enumeration),
        ("single executor liveness and profit", liveness),
        ("exactly one payout under races", race_exactly_once),
        ("all reserved transaction kinds release", release_kinds),
        ("window expiry and owner refund", window_expiry),
        ("determinism and gas ordering", determinism_and_gas_order),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS  {}  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}  {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    let _ = panic::take_hook();
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure!(elapsed < limit, "took {elapsed:?}, limit {limit:?}");
    Ok(())
}

// ---------------------------------------------------------------- rlp

fn random_item(rng: &mut ChaCha8Rng, depth: u32) -> RlpItem {
    if depth == 0 || rng.gen_bool(0.55) {
        let len = match rng.gen_range(0..10) {
            0 => 0,
            1 => 1,
            2..=6 => rng.gen_range(0..56),
            7 | 8 => rng.gen_range(56..300),
            _ if rng.gen_bool(0.2) => rng.gen_range(300..=1024),
            _ => rng.gen_range(56..70),
        };
        let mut b = vec![0u8; len];
        rng.fill(b.as_mut_slice());
        if len == 1 && rng.gen_bool(0.5) {
            b[0] &= 0x7f;
        }
        RlpItem::Bytes(b)
    } else {
        let n = match rng.gen_range(0..8) {
            0 => 0,
            1..=6 => rng.gen_range(1..4),
            _ => rng.gen_range(4..12),
        };
        RlpItem::List((0..n).map(|_| random_item(rng, depth - 1)).collect())
    }
}

fn depth_of(item: &RlpItem) -> u32 {
    match item {
        RlpItem::Bytes(_) => 0,
        RlpItem::List(items) => 1 + items.iter().map(depth_of).max().unwrap_or(0),
    }
}

/// Straightforward reference encoder, written from the format definition.
fn reference_encode(item: &RlpItem) -> Vec<u8> {
    fn length_prefix(len: usize, short: u8, long: u8) -> Vec<u8> {
        if len <= 55 {
            vec![short + len as u8]
        } else {
            let be: Vec<u8> = len.to_be_bytes().into_iter().skip_while(|b| *b == 0).collect();
            let mut out = vec![long + be.len() as u8];
            out.extend(be);
            out
        }
    }
    match item {
        RlpItem::Bytes(b) if b.len() == 1 && b[0] < 0x80 => b.clone(),
        RlpItem::Bytes(b) => [length_prefix(b.len(), 0x80, 0xb7), b.clone()].concat(),
        RlpItem::List(items) => {
            let body: Vec<u8> = items.iter().flat_map(reference_encode).collect();
            [length_prefix(body.len(), 0xc0, 0xf7), body].concat()
        }
    }
}

fn rlp_roundtrip() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut deepest = 0;
    let mut total = 0usize;
    for i in 0..10_000 {
        let item = random_item(&mut rng, 8);
        deepest = deepest.max(depth_of(&item));
        let enc = item.encode();
        total += enc.len();
        ensure!(enc == reference_encode(&item), "item {i}: encoding differs from the reference encoder");
        let back = rlp::decode(&enc).map_err(|e| format!("item {i}: {e}"))?;
        ensure!(back == item, "item {i}: roundtrip changed the item");
    }
    let mut padded = vec![0xb9, 0x00, 0x38];
    padded.extend([0xaa; 0x38]);
    let fixtures: [(&str, Vec<u8>); 4] = [
        ("single octet in a string prefix", vec![0x81, 0x00]),
        ("long string form for two octets", vec![0xb8, 0x02, 0xaa, 0xbb]),
        ("long list form for one octet", vec![0xf8, 0x01, 0x80]),
        ("length with a leading zero", padded),
    ];
    for (name, bytes) in &fixtures {
        ensure!(
            matches!(rlp::decode(bytes), Err(RlpError::NonCanonical(_))),
            "fixture accepted: {name}"
        );
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("10000 items ({total} octets) up to depth {deepest}, {} fixtures rejected", fixtures.len()))
}

// ---------------------------------------------------------------- keccak

/// Keccak-f[1600] sponge written out from the permutation definition, with
/// round constants and rotation offsets generated rather than tabulated.
mod oracle {
    fn rc_bit(t: usize) -> u64 {
        let t = t % 255;
        let mut r: u16 = 1;
        for _ in 0..t {
            r <<= 1;
            if r & 0x100 != 0 {
                r ^= 0x171;
            }
        }
        u64::from(r & 1)
    }

    fn round_constant(round: usize) -> u64 {
        (0..=6).fold(0, |acc, j| acc | (rc_bit(j + 7 * round) << ((1 << j) - 1)))
    }

    fn rotations() -> [[u32; 5]; 5] {
        let mut r = [[0u32; 5]; 5];
        let (mut x, mut y) = (1, 0);
        for t in 0..24 {
            r[x][y] = (((t + 1) * (t + 2) / 2) % 64) as u32;
            (x, y) = (y, (2 * x + 3 * y) % 5);
        }
        r
    }

    fn permute(a: &mut [[u64; 5]; 5]) {
        let rot = rotations();
        for round in 0..24 {
            let c: Vec<u64> = (0..5).map(|x| (0..5).fold(0, |acc, y| acc ^ a[x][y])).collect();
            for x in 0..5 {
                let d = c[(x + 4) % 5] ^ c[(x + 1) % 5].rotate_left(1);
                for y in 0..5 {
                    a[x][y] ^= d;
                }
            }
            let mut b = [[0u64; 5]; 5];
            for x in 0..5 {
                for y in 0..5 {
                    b[y][(2 * x + 3 * y) % 5] = a[x][y].rotate_left(rot[x][y]);
                }
            }
            for x in 0..5 {
                for y in 0..5 {
                    a[x][y] = b[x][y] ^ (!b[(x + 1) % 5][y] & b[(x + 2) % 5][y]);
                }
            }
            a[0][0] ^= round_constant(round);
        }
    }

    pub fn keccak256(input: &[u8]) -> [u8; 32] {
        const RATE: usize = 136;
        let mut msg = input.to_vec();
        msg.push(0x01);
        while msg.len() % RATE != 0 {
            msg.push(0);
        }
        *msg.last_mut().unwrap() |= 0x80;
        let mut a = [[0u64; 5]; 5];
        for block in msg.chunks(RATE) {
            for (i, lane) in block.chunks(8).enumerate() {
                a[i % 5][i / 5] ^= u64::from_le_bytes(lane.try_into().unwrap());
            }
            permute(&mut a);
        }
        let mut out = [0u8; 32];
        for i in 0..4 {
            out[8 * i..8 * i + 8].copy_from_slice(&a[i % 5][i / 5].to_le_bytes());
        }
        out
    }
}

fn keccak_vectors() -> Result<String, String> {
    let empty = "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470";
    let abc = "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45";
    ensure!(keccak256(b"").to_string() == format!("0x{empty}"), "empty input digest differs");
    ensure!(keccak256(b"abc").to_string() == format!("0x{abc}"), "\"abc\" digest differs");
    ensure!(hex::encode(oracle::keccak256(b"")) == empty, "oracle disagrees on empty input");
    ensure!(hex::encode(oracle::keccak256(b"abc")) == abc, "oracle disagrees on \"abc\"");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut lengths: Vec<usize> = vec![1, 55, 56, 135, 136, 137, 271, 272, 273, 1000];
    lengths.extend((0..200).map(|_| rng.gen_range(0..600)));
    for len in &lengths {
        let mut data = vec![0u8; *len];
        rng.fill(data.as_mut_slice());
        ensure!(
            keccak256(&data).0 == oracle::keccak256(&data),
            "library and oracle differ at length {len}"
        );
    }
    Ok(format!("2 vectors exact, {} lengths agree with the oracle", lengths.len()))
}

// ---------------------------------------------------------------- trie

fn random_receipt(rng: &mut ChaCha8Rng, cumulative: u64) -> Vec<u8> {
    let logs = (0..rng.gen_range(0..4))
        .map(|_| {
            let mut emitter = [0u8; 20];
            rng.fill(&mut emitter);
            let topics = (0..rng.gen_range(0..4))
                .map(|_| {
                    let mut t = [0u8; 32];
                    rng.fill(&mut t);
                    Digest(t)
                })
                .collect();
            let mut data = vec![0u8; rng.gen_range(0..80)];
            rng.fill(data.as_mut_slice());
            LogEntry {
                emitter: Address(emitter),
                topics,
                data,
            }
        })
        .collect();
    Receipt {
        status: rng.gen_bool(0.9),
        cumulative_gas_used: cumulative,
        logs,
    }
    .encode()
}

fn trie_soundness() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut mutations = 0;
    for size in [1usize, 2, 16, 17, 200] {
        let receipts: Vec<Vec<u8>> = (0..size).map(|i| random_receipt(&mut rng, 21_000 * (i as u64 + 1))).collect();
        let trie = ReceiptTrie::build(&receipts).map_err(|e| e.to_string())?;
        let root = trie.root();
        let proofs: Vec<_> = (0..size as u64).map(|i| trie.prove(i).unwrap()).collect();
        for (i, proof) in proofs.iter().enumerate() {
            let got = trie::verify(&root, i as u64, proof).map_err(|e| format!("size {size}, index {i}: {e}"))?;
            ensure!(got == receipts[i], "size {size}, index {i}: wrong receipt returned");
        }
        for _ in 0..1000 {
            let i = rng.gen_range(0..size);
            let mut proof = proofs[i].clone();
            let node = rng.gen_range(0..proof.nodes.len());
            let pos = rng.gen_range(0..proof.nodes[node].len());
            proof.nodes[node][pos] ^= rng.gen_range(1..=255u8);
            ensure!(
                trie::verify(&root, i as u64, &proof).is_err(),
                "size {size}: mutated proof for {i} accepted (node {node}, octet {pos})"
            );
            mutations += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("5 tries round-trip every receipt, {mutations} mutations all rejected"))
}

// ---------------------------------------------------------------- protocol fixtures

const GAS: Gas = 3_000_000;
const FEE: Wei = 1_000_000;

struct Bench {
    chain: Chain,
    user: Address,
    executor: Address,
    hub: Address,
    sources: [Address; 2],
}

impl Bench {
    fn new() -> Self {
        let user = Address([1; 20]);
        let executor = Address([2; 20]);
        let hub = Address([0xa0; 20]);
        let sources = [Address([0xa1; 20]), Address([0xa2; 20])];
        let genesis = Genesis::default()
            .fund(user, 10u128.pow(15))
            .fund(executor, 10u128.pow(12))
            .contract(hub, HUB_HANDLER)
            .contract(sources[0], EVENT_SOURCE)
            .contract(sources[1], EVENT_SOURCE);
        Bench {
            chain: Chain::new(ChainConfig::default(), Arc::new(warden::default_registry()), genesis),
            user,
            executor,
            hub,
            sources,
        }
    }

    fn single(&mut self, tx: Transaction) -> TxOutcome {
        let (_, rejected) = self.chain.append_block(vec![tx]);
        assert!(rejected.is_empty(), "rejected {rejected:?}");
        self.chain.outcomes(self.chain.height()).unwrap()[0].clone()
    }

    fn emit(&self, log: &LogEntry) -> Transaction {
        Transaction {
            sender: self.user,
            recipient: Some(log.emitter),
            value: 0,
            data: emit_call_data(&log.topics, &log.data),
            gas_limit: GAS,
        }
    }
}

// ---------------------------------------------------------------- safety

fn safety_enumeration() -> Result<String, String> {
    let mut bench = Bench::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let topic = keccak256(b"Expiry(uint256)");
    let expected = LogEntry {
        emitter: bench.sources[0],
        topics: vec![topic, Digest([7; 32])],
        data: vec![0x2a],
    };
    let params = ProxyParams {
        hub: bench.hub,
        reserved: ReservedTransaction::fund_transfer(Address([9; 20]), 5_000),
        expected_event: expected.clone(),
        service_fee: FEE,
    };
    let proxy = bench.single(deploy_proxy_tx(bench.user, &params, GAS)).created.unwrap();
    ensure!(bench.single(charge_tx(bench.user, proxy, params.required_funding(), GAS)).succeeded(), "charge failed");
    ensure!(bench.single(new_service_tx(bench.user, bench.hub, proxy, GAS)).succeeded(), "register failed");

    // near misses: each differs from the expected entry in one field
    let near_misses = [
        LogEntry { emitter: bench.sources[1], ..expected.clone() },
        LogEntry { data: vec![0x2b], ..expected.clone() },
        LogEntry { data: vec![], ..expected.clone() },
        LogEntry { topics: vec![topic], ..expected.clone() },
        LogEntry { topics: vec![Digest([7; 32]), topic], ..expected.clone() },
        LogEntry { topics: vec![topic, Digest([7; 32]), Digest([0; 32])], ..expected.clone() },
    ];
    while bench.chain.height() < 30 {
        let n = rng.gen_range(0..5);
        let txs: Vec<Transaction> = (0..n)
            .map(|_| {
                let log = if rng.gen_bool(0.6) {
                    near_misses[rng.gen_range(0..near_misses.len())].clone()
                } else {
                    let mut data = vec![0u8; rng.gen_range(0..8)];
                    rng.fill(data.as_mut_slice());
                    LogEntry {
                        emitter: bench.sources[rng.gen_range(0..2)],
                        topics: vec![keccak256(&[rng.gen()])],
                        data,
                    }
                };
                bench.emit(&log)
            })
            .collect();
        bench.chain.append_block(txs);
    }

    let enumerate = |chain: &Chain| -> (usize, Vec<(BlockNumber, u64, u64)>) {
        let mut tried = 0;
        let mut accepted = Vec::new();
        for b in 1..=chain.height() {
            let block = chain.get_block(b).unwrap();
            for (r, receipt) in block.receipts.iter().enumerate() {
                for l in 0..=receipt.logs.len() as u64 {
                    let bundle = ProofBundle::from_chain(chain, b, r as u64, l).unwrap();
                    let out = chain.call(&event_verify_tx(bench.executor, proxy, &bundle, GAS)).unwrap();
                    tried += 1;
                    if out.succeeded() {
                        accepted.push((b, r as u64, l));
                    } else {
                        assert!(out.failure_as::<WardenError>().is_some(), "non-protocol failure {:?}", out.failure);
                    }
                }
            }
        }
        (tried, accepted)
    };

    ensure!(bench.chain.height() == 30, "chain height {}", bench.chain.height());
    let (tried_before, accepted) = enumerate(&bench.chain);
    ensure!(accepted.is_empty(), "accepted without the event: {accepted:?}");

    let mut txs: Vec<Transaction> = near_misses.iter().take(3).map(|l| bench.emit(l)).collect();
    txs.insert(2, bench.emit(&expected));
    bench.chain.append_block(txs);
    let event_block = bench.chain.height();
    let oracle: Vec<(BlockNumber, u64, u64)> = bench
        .chain
        .blocks()
        .iter()
        .flat_map(|blk| {
            let expected = &expected;
            blk.receipts.iter().enumerate().flat_map(move |(r, rc)| {
                rc.logs
                    .iter()
                    .enumerate()
                    .filter(move |(_, log)| *log == expected)
                    .map(move |(l, _)| (blk.header.number, r as u64, l as u64))
            })
        })
        .collect();
    ensure!(oracle == vec![(event_block, 2, 0)], "oracle found {oracle:?}");
    let (tried_after, accepted) = enumerate(&bench.chain);
    ensure!(accepted == oracle, "accepted {accepted:?}, expected {oracle:?}");
    Ok(format!(
        "0 of {tried_before} triples accepted on 30 blocks; after the event exactly 1 of {tried_after}"
    ))
}

// ---------------------------------------------------------------- scenarios

fn single_service(executors: &str, window: u64, event_at: BlockNumber, release: &str, extra: &str) -> String {
    format!(
        "seed 11
         window {window}
         {executors}
         actor user alice balance 1000000000000
         actor user bob balance 0
         actor contract oracle event-source
         actor contract vault sentinel
         proxy p owner alice fee {FEE}
         event p emitter oracle topics keccak:Expiry(uint256) data 0x2a
         release p {release}
         step AT BLOCK 1: deploy-proxy p
         step AT BLOCK 2: charge p
         step AT BLOCK 3: register p
         step AT BLOCK {event_at}: emit-event p
         {extra}"
    )
}

fn simulate(text: &str) -> Result<Simulation, String> {
    let config = ScenarioConfig::parse(text).map_err(|e| e.to_string())?;
    Simulation::run(&config).map_err(|e| e.to_string())
}

/// Successful and failed eventVerify outcomes on `proxy`, with their blocks.
fn verify_calls(chain: &Chain, proxy: Address) -> Vec<(BlockNumber, Transaction, TxOutcome)> {
    let mut out = Vec::new();
    for b in chain.blocks() {
        let outcomes = chain.outcomes(b.header.number).unwrap();
        for (tx, o) in b.transactions.iter().zip(outcomes) {
            if tx.recipient == Some(proxy) && tx.data.get(..4) == Some(&Selector::of(warden::SIG_EVENT_VERIFY).0[..]) {
                out.push((b.header.number, tx.clone(), o.clone()));
            }
        }
    }
    out
}

fn liveness() -> Result<String, String> {
    let mut runs = 0;
    for delay in [0u64, 1, 5] {
        for event_at in [4u64, 10, 40] {
            let text = single_service(&format!("executors 1 delays {delay}"), 256, event_at, "transfer bob 5000", "");
            let sim = simulate(&text)?;
            let proxy = sim.proxy_address("p").ok_or("proxy not deployed")?;
            let storage = ProxyStorage::load(sim.chain().world(), &proxy).map_err(|e| e.to_string())?;
            ensure!(storage.state == ProxyState::Triggered, "delay {delay}, event {event_at}: {}", storage.state);
            let calls = verify_calls(sim.chain(), proxy);
            ensure!(calls.len() == 1, "delay {delay}: {} verify calls", calls.len());
            let (block, tx, outcome) = &calls[0];
            ensure!(outcome.succeeded(), "verify failed");
            ensure!(
                *block > event_at && *block <= event_at + delay + 1,
                "delay {delay}: event {event_at}, triggered in {block}"
            );
            let executor = executor_address(11, 0);
            ensure!(tx.sender == executor, "unexpected caller");
            let balance = sim.chain().world().balance(&executor);
            let profit = balance as i128 - sim.config().executor_balance as i128;
            let expected = FEE as i128 - i128::from(outcome.gas_used);
            ensure!(profit == expected, "delay {delay}: profit {profit}, expected {expected}");
            let report = sim.report();
            ensure!(report.executors[0].profit == expected, "reported profit differs");
            runs += 1;
        }
    }
    Ok(format!("{runs} configurations triggered within delay+1 blocks with profit = fee - gas"))
}

fn race_exactly_once() -> Result<String, String> {
    let mut summary = Vec::new();
    for (n, delays) in [(2, "1,1"), (3, "1,1,2"), (10, "3,1,0,2,1,5,1,0,4,2")] {
        let text = single_service(&format!("executors {n} delays {delays}"), 256, 10, "transfer bob 5000", "");
        let sim = simulate(&text)?;
        let proxy = sim.proxy_address("p").ok_or("proxy not deployed")?;
        let bob = sim.actor_address("bob").unwrap();
        let calls = verify_calls(sim.chain(), proxy);
        ensure!(calls.len() == n, "{n} executors: {} calls", calls.len());
        let winners: Vec<_> = calls.iter().filter(|(_, _, o)| o.succeeded()).collect();
        ensure!(winners.len() == 1, "{n} executors: {} successful calls", winners.len());
        let payouts: usize = calls
            .iter()
            .filter(|(_, tx, o)| o.transferred(&proxy, &tx.sender) > 0)
            .count();
        ensure!(payouts == 1, "{n} executors: {payouts} fee payouts");
        let releases: usize = calls
            .iter()
            .flat_map(|(_, _, o)| &o.trace)
            .filter(|t| matches!(t.kind, TraceKind::Message { from, to: Some(to), ok: true, .. } if from == proxy && to == bob))
            .count();
        ensure!(releases == 1, "{n} executors: {releases} releases");
        ensure!(sim.chain().world().balance(&bob) == 5000, "recipient balance wrong");
        for (_, tx, o) in calls.iter().filter(|(_, _, o)| !o.succeeded()) {
            ensure!(o.gas_used > 0, "losing call burned no gas");
            ensure!(
                matches!(
                    o.failure_as::<WardenError>(),
                    Some(WardenError::WrongState { found: ProxyState::Triggered, .. })
                ),
                "loser {} failed with {:?}",
                tx.sender,
                o.failure
            );
        }
        ensure!(sim.proxy_state("p") == Some(ProxyState::Triggered), "final state not triggered");
        let report = sim.report();
        let total_profit: i128 = report.executors.iter().map(|e| e.profit).sum();
        let total_gas: i128 = calls.iter().map(|(_, _, o)| i128::from(o.gas_used)).sum();
        ensure!(total_profit == FEE as i128 - total_gas, "profits do not reconcile");
        summary.push(format!("{n}:{}", n - 1));
    }
    Ok(format!("one winner each, losers reverted ({})", summary.join(" ")))
}

/// CREATE address computed from raw bytes: keccak(0xd6 0x94 ‖ creator ‖ nonce)[12..].
fn create_address(creator: &Address, nonce: u8) -> Address {
    assert!(nonce < 0x80 && nonce > 0 || nonce == 0);
    let mut pre = vec![0xd6, 0x94];
    pre.extend_from_slice(&creator.0);
    pre.push(if nonce == 0 { 0x80 } else { nonce });
    Address::from_slice(&oracle::keccak256(&pre)[12..]).unwrap()
}

fn release_kinds() -> Result<String, String> {
    // fund transfer
    let sim = simulate(&single_service("executors 1", 256, 10, "transfer bob 123456", ""))?;
    let bob = sim.actor_address("bob").unwrap();
    ensure!(sim.chain().world().balance(&bob) == 123_456, "transfer moved {}", sim.chain().world().balance(&bob));
    ensure!(sim.proxy_state("p") == Some(ProxyState::Triggered), "transfer proxy not triggered");

    // function invocation
    let sim = simulate(&single_service("executors 1", 256, 10, "invoke vault 0 poke(uint256) 77", ""))?;
    let vault = sim.actor_address("vault").unwrap();
    ensure!(
        sim.chain().world().storage(&vault, SENTINEL_KEY) == Some(&[77u8][..]),
        "sentinel key not written"
    );
    ensure!(sim.proxy_state("p") == Some(ProxyState::Triggered), "invocation proxy not triggered");

    // contract creation
    let sim = simulate(&single_service("executors 1", 256, 10, &format!("create {SENTINEL} 0x6b6964"), ""))?;
    let proxy = sim.proxy_address("p").unwrap();
    let child = create_address(&proxy, 0);
    let account = sim.chain().world().account(&child).ok_or("no account at the recomputed address")?;
    ensure!(account.is_contract(), "created account is not a contract");
    ensure!(account.storage(b"tag") == Some(&b"kid"[..]), "constructor did not run");
    ensure!(sim.proxy_state("p") == Some(ProxyState::Triggered), "creation proxy not triggered");
    Ok(format!("transfer exact, sentinel written, contract at {child}"))
}

fn window_expiry() -> Result<String, String> {
    let window = 8;
    let text = single_service(
        &format!("executors 1 delays {}", window + 4),
        window,
        10,
        "transfer bob 5000",
        "step AT BLOCK 30: close p",
    );
    let config = ScenarioConfig::parse(&text).map_err(|e| e.to_string())?;
    let mut before_close = config.clone();
    before_close.steps.retain(|s| s.block < 30);
    let sim = Simulation::run(&before_close).map_err(|e| e.to_string())?;
    ensure!(sim.proxy_state("p") == Some(ProxyState::Registered), "not registered before close");
    ensure!(verify_calls(sim.chain(), sim.proxy_address("p").unwrap()).is_empty(), "stale proof submitted");

    let sim = Simulation::run(&config).map_err(|e| e.to_string())?;
    let chain = sim.chain();
    let world = chain.world();
    let alice = sim.actor_address("alice").unwrap();
    let proxy = sim.proxy_address("p").unwrap();
    ensure!(sim.proxy_state("p") == Some(ProxyState::Closed), "not closed");
    ensure!(world.balance(&proxy) == 0, "proxy kept {}", world.balance(&proxy));

    let mut alice_gas: Wei = 0;
    let mut total_gas: Wei = 0;
    let mut refund = 0;
    for b in chain.blocks() {
        for (tx, o) in b.transactions.iter().zip(chain.outcomes(b.header.number).unwrap()) {
            total_gas += Wei::from(o.gas_used);
            if tx.sender == alice {
                alice_gas += Wei::from(o.gas_used);
                refund += o.transferred(&proxy, &alice);
            }
        }
    }
    let funded = FEE + 5000;
    ensure!(refund == funded, "refund {refund}, funded {funded}");
    ensure!(
        world.balance(&alice) == 1_000_000_000_000 - alice_gas,
        "owner balance off by {}",
        (1_000_000_000_000 - alice_gas) as i128 - world.balance(&alice) as i128
    );
    let initial: Wei = 1_000_000_000_000 + sim.config().executor_balance;
    ensure!(world.burned() == total_gas, "burned {} vs gas {total_gas}", world.burned());
    ensure!(world.total_balance() + world.burned() == initial, "ether not conserved");
    ensure!(sim.report().conservation.holds, "report conservation flag");
    Ok(format!("stayed registered past the window, refund {refund} wei, conservation exact"))
}

fn determinism_and_gas_order() -> Result<String, String> {
    let config = ScenarioConfig::parse(CANONICAL).map_err(|e| e.to_string())?;
    let a = Simulation::run(&config).map_err(|e| e.to_string())?.report().to_tree();
    let b = Simulation::run(&config).map_err(|e| e.to_string())?.report().to_tree();
    ensure!(a == b, "tree reports differ between runs");
    let report = Simulation::run(&config).map_err(|e| e.to_string())?.report();
    ensure!(report.expectations_hold(), "canonical expectations fail");
    let gas: BTreeMap<Function, Gas> = report
        .cost_table
        .iter()
        .filter_map(|r| r.simulated_gas.map(|g| (r.function, g)))
        .collect();
    let order = [
        Function::Deploy,
        Function::EventVerify,
        Function::NewService,
        Function::Charge,
        Function::Close,
    ];
    let values: Vec<Gas> = order
        .iter()
        .map(|f| gas.get(f).copied().ok_or(format!("{} missing", f.label())))
        .collect::<Result<_, _>>()?;
    ensure!(values.windows(2).all(|w| w[0] > w[1]), "gas order violated: {values:?}");
    Ok(format!("{} byte tree identical; gas {values:?} strictly decreasing", a.len()))
}
