use super::*;

const CANONICAL: &str = include_str!("../../../../scenarios/canonical.scn");

fn single(delay: u64, window: u64, event_at: BlockNumber) -> String {
    format!(
        "window {window}
         executors 1 delays {delay}
         actor user alice balance 1000000000000
         actor user bob balance 0
         actor contract oracle event-source
         proxy p owner alice fee 1000000
         event p emitter oracle topics keccak:Expiry data 0x2a
         release p transfer bob 5000
         step AT BLOCK 1: deploy-proxy p
         step AT BLOCK 2: charge p
         step AT BLOCK 3: register p
         step AT BLOCK {event_at}: emit-event p
         expect p triggered"
    )
}

fn run(text: &str) -> Simulation {
    Simulation::run(&ScenarioConfig::parse(text).unwrap()).unwrap()
}

#[test]
fn single_executor_releases_next_block() {
    let sim = run(&single(1, 256, 10));
    let report = sim.report();
    let p = report.proxy("p").unwrap();
    assert_eq!(p.event_block, Some(10));
    assert_eq!(p.trigger_block, Some(11));
    assert_eq!(p.release, ReleaseStatus::Released);
    let e = &report.executors[0];
    let verify_gas = p.gas.iter().find(|(f, _)| *f == Function::EventVerify).unwrap().1;
    assert_eq!(e.profit, 1_000_000 - i128::from(verify_gas));
    assert_eq!(e.profit, e.balance_delta);
    assert!(report.expectations_hold());
    assert!(report.conservation.holds);
    assert_eq!(sim.chain().world().balance(&sim.actor_address("bob").unwrap()), 5000);
}

#[test]
fn race_lowest_id_among_fastest_wins() {
    let text = single(1, 256, 10).replace("executors 1 delays 1", "executors 3 delays 1,1,2");
    let sim = run(&text);
    let report = sim.report();
    let ids: Vec<Address> = sim.executors().iter().map(|e| e.id).collect();
    let winner = if ids[0] < ids[1] { 0 } else { 1 };
    let p = report.proxy("p").unwrap();
    assert_eq!(p.trigger_block, Some(11));
    assert_eq!(p.triggered_by.as_deref(), Some(executor_name(winner).as_str()));
    assert_eq!(p.fee_payouts, 1);
    for (i, e) in report.executors.iter().enumerate() {
        assert_eq!(e.submissions, 1);
        assert_eq!(e.wins, u32::from(i == winner));
        if i != winner {
            assert_eq!(e.profit, -i128::from(e.gas_burned));
            assert!(e.gas_burned > 0);
        }
        assert_eq!(e.profit, e.balance_delta);
    }
    let losers: Vec<&TimelineEntry> = report
        .timeline
        .iter()
        .filter(|t| t.action == "eventVerify p" && t.status == EntryStatus::Reverted)
        .collect();
    assert_eq!(losers.len(), 2);
    assert!(losers.iter().all(|t| t.detail.as_deref().unwrap().contains("triggered")));
    assert_eq!(losers.iter().map(|t| t.block).collect::<Vec<_>>(), vec![11, 12]);
}

#[test]
fn no_executors_leaves_proxy_registered() {
    let text = single(1, 256, 10).replace("executors 1 delays 1", "executors 0");
    let report = run(&text).report();
    let p = report.proxy("p").unwrap();
    assert_eq!(p.state, Some(ProxyState::Registered));
    assert_eq!(p.release, ReleaseStatus::NotTriggered);
    assert!(!report.expectations_hold());
}

#[test]
fn disabled_executor_drops_its_submission() {
    let text = single(3, 256, 10) + "\nstep AT BLOCK 12: disable-executor 0";
    let report = run(&text).report();
    assert_eq!(report.proxy("p").unwrap().state, Some(ProxyState::Registered));
    assert_eq!(report.executors[0].submissions, 0);
    assert!(!report.executors[0].active);
}

#[test]
fn event_before_registration_is_found_by_backscan() {
    let text = single(1, 256, 10).replace("BLOCK 3: register", "BLOCK 15: register");
    let report = run(&text).report();
    let p = report.proxy("p").unwrap();
    assert_eq!(p.event_block, Some(10));
    assert_eq!(p.trigger_block, Some(16));
}

#[test]
fn slow_executor_misses_window() {
    let report = run(&single(10, 4, 10)).report();
    let p = report.proxy("p").unwrap();
    assert_eq!(p.state, Some(ProxyState::Registered));
    let skipped: Vec<&TimelineEntry> = report
        .timeline
        .iter()
        .filter(|t| t.status == EntryStatus::Skipped)
        .collect();
    assert_eq!(skipped.len(), 1);
    assert_eq!(skipped[0].block, 20);
    assert_eq!(report.executors[0].gas_burned, 0);
}

fn watch_chain() -> (Chain, WatchEntry, Address) {
    let source = Address([0xa1; 20]);
    let sender = Address([1; 20]);
    let genesis = Genesis::default()
        .fund(sender, 10u128.pow(12))
        .contract(source, crate::contracts::EVENT_SOURCE);
    let chain = Chain::new(ChainConfig::default(), Arc::new(warden::default_registry()), genesis);
    let event = LogEntry {
        emitter: source,
        topics: vec![keccak256(b"E")],
        data: vec![1],
    };
    let watch = WatchEntry {
        proxy: Address([0xee; 20]),
        emitter: source,
        commitment: event.digest(),
    };
    (chain, watch, sender)
}

fn emit(sender: Address, source: Address, topics: &[Digest], data: &[u8]) -> Transaction {
    Transaction {
        sender,
        recipient: Some(source),
        value: 0,
        data: emit_call_data(topics, data),
        gas_limit: 1_000_000,
    }
}

#[test]
fn scan_finds_matches_in_receipt_order() {
    let (mut chain, watch, sender) = watch_chain();
    let hit = emit(sender, watch.emitter, &[keccak256(b"E")], &[1]);
    let miss = emit(sender, watch.emitter, &[keccak256(b"E")], &[2]);
    chain.append_block(vec![miss.clone()]);
    assert!(scan_block_for_matches(chain.head(), &[watch]).is_empty());
    chain.append_block(vec![miss.clone(), hit.clone()]);
    assert_eq!(
        scan_block_for_matches(chain.head(), &[watch]),
        vec![LogMatch {
            proxy: watch.proxy,
            receipt_index: 1,
            log_index: 0
        }]
    );
    chain.append_block(vec![hit.clone(), miss, hit]);
    let found = scan_block_for_matches(chain.head(), &[watch]);
    assert_eq!(found.iter().map(|m| m.receipt_index).collect::<Vec<_>>(), vec![0, 2]);
}

#[test]
fn bundle_building() {
    let (mut chain, watch, sender) = watch_chain();
    let hit = emit(sender, watch.emitter, &[keccak256(b"E")], &[1]);
    let miss = emit(sender, watch.emitter, &[], &[]);
    chain.append_block(vec![miss.clone(), miss.clone(), hit]);
    chain.append_block(vec![miss]);
    let bundle = build_proof_bundle(&chain, &watch, 1, 3).unwrap();
    assert_eq!((bundle.receipt_index, bundle.log_index), (2, 0));
    let leaf = crate::trie::verify(&chain.get_block(1).unwrap().header.receipts_root, 2, &bundle.proof).unwrap();
    crate::warden::verify_log(&leaf, 0, &watch.emitter, &watch.commitment).unwrap();

    assert!(matches!(build_proof_bundle(&chain, &watch, 2, 3), Err(AgentError::EventNotFound { .. })));
    assert!(matches!(build_proof_bundle(&chain, &watch, 9, 10), Err(AgentError::EventNotFound { .. })));
    let w = chain.config().blockhash_window;
    assert!(build_proof_bundle(&chain, &watch, 1, 1 + w).is_ok());
    assert_eq!(
        build_proof_bundle(&chain, &watch, 1, 1 + w + 1),
        Err(AgentError::WindowExpired {
            block: 1,
            submit_at: w + 2
        })
    );
}

#[test]
fn canonical_scenario_outcome() {
    let report = run(CANONICAL).report();
    assert!(report.expectations_hold(), "{}", report.to_table());
    assert!(report.conservation.holds);
    for row in &report.cost_table {
        assert!(row.simulated_gas.is_some(), "{:?}", row.function);
    }
    assert_eq!(report.proxy("p2").unwrap().release, ReleaseStatus::Refunded);
    for e in &report.executors {
        assert_eq!(e.profit, e.balance_delta);
    }
}

#[test]
fn seed_changes_addresses_only() {
    let a = run(CANONICAL).report();
    let b = run(&CANONICAL.replace("seed 2020", "seed 2021")).report();
    assert_ne!(a.proxies[0].address, b.proxies[0].address);
    assert_eq!(
        a.proxies.iter().map(|p| p.state).collect::<Vec<_>>(),
        b.proxies.iter().map(|p| p.state).collect::<Vec<_>>()
    );
}

#[test]
fn steps_on_undeployed_proxy_are_skipped() {
    let text = single(1, 256, 10).replace("step AT BLOCK 1: deploy-proxy p\n", "");
    let report = run(&text).report();
    assert_eq!(report.proxy("p").unwrap().release, ReleaseStatus::NotDeployed);
    assert!(report.timeline.iter().any(|t| t.status == EntryStatus::Skipped));
}
