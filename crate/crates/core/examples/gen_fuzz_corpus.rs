//! Writes seed inputs for the fuzz targets into `fuzz/corpus/<target>/`.
//!
//!     cargo run -p eventwarden-core --example gen_fuzz_corpus [-- <out dir>]

use std::fs;
use std::path::PathBuf;

use eventwarden_core::agents::Simulation;
use eventwarden_core::rlp::RlpItem;
use eventwarden_core::scenario::ScenarioConfig;
use eventwarden_core::vm::decode_call;
use eventwarden_core::warden::ProofBundle;

const CANONICAL: &str = include_str!("../../../scenarios/canonical.scn");

fn main() -> std::io::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus"));
    let config = ScenarioConfig::parse(CANONICAL).expect("canonical scenario parses");
    let sim = Simulation::run(&config).expect("canonical scenario runs");
    let chain = sim.chain();

    let mut seeds: Vec<(&str, String, Vec<u8>)> = Vec::new();
    let mut add = |target, name: String, bytes: Vec<u8>| seeds.push((target, name, bytes));

    let items = [
        RlpItem::bytes(vec![]),
        RlpItem::bytes(vec![0x7f]),
        RlpItem::bytes(vec![0xaa; 60]),
        RlpItem::List(vec![]),
        RlpItem::List(vec![RlpItem::uint(1024), RlpItem::List(vec![RlpItem::bytes(b"dog".to_vec())])]),
    ];
    for (i, item) in items.iter().enumerate() {
        add("rlp_decode", format!("item-{i}"), item.encode());
    }

    for block in chain.blocks() {
        let n = block.header.number;
        add("header_decode", format!("header-{n}"), block.header.encode());
        add("block_decode", format!("block-{n}"), block.encode());
        for (i, tx) in block.transactions.iter().enumerate() {
            if decode_call(&tx.data).is_ok() {
                add("call_data_decode", format!("call-{n}-{i}"), tx.data.clone());
            } else if tx.recipient.is_none() {
                add("creation_payload_decode", format!("create-{n}-{i}"), tx.data.clone());
            }
        }
        for (r, receipt) in block.receipts.iter().enumerate() {
            add("receipt_decode", format!("receipt-{n}-{r}"), receipt.encode());
            let trie = chain.receipt_trie(n).ok().flatten().expect("block has a trie");
            let proof = trie.prove(r as u64).expect("receipt is in the trie");
            let mut input = trie.root().0.to_vec();
            input.extend((r as u64).to_be_bytes());
            input.extend(proof.encode());
            add("proof_verify", format!("proof-{n}-{r}"), input);
            for l in 0..receipt.logs.len() as u64 {
                let bundle = ProofBundle::from_chain(chain, n, r as u64, l).expect("bundle builds");
                add("proof_bundle_decode", format!("bundle-{n}-{r}-{l}"), bundle.encode());
            }
        }
    }

    add("scenario_parse", "canonical.scn".into(), CANONICAL.as_bytes().to_vec());
    add(
        "scenario_parse",
        "minimal.scn".into(),
        b"actor user u balance 10\nproxy p owner u fee 1\nrelease p transfer u 1\n".to_vec(),
    );
    add("report_parse", "canonical.json".into(), sim.report().to_tree().into_bytes());

    let mut count = 0;
    for (target, name, bytes) in &seeds {
        let dir = out.join(target);
        fs::create_dir_all(&dir)?;
        fs::write(dir.join(name), bytes)?;
        count += 1;
    }
    println!("wrote {count} seeds under {}", out.display());
    Ok(())
}
