//! Entry points shared by the cargo-fuzz targets and the corpus replay test.
//!
//! Each function feeds arbitrary input to one decoder. Anything that decodes
//! must re-encode to the same octets, since every wire format here is
//! canonical.

use crate::chain::{Block, BlockHeader, Receipt};
use crate::primitives::Digest;
use crate::report::ScenarioReport;
use crate::rlp;
use crate::scenario::ScenarioConfig;
use crate::trie::{self, MerkleProof};
use crate::vm::{decode_call, encode_call, CreationPayload};
use crate::warden::ProofBundle;

pub type Target = fn(&[u8]);

pub const TARGETS: [(&str, Target); 10] = [
    ("rlp_decode", rlp_decode),
    ("proof_verify", proof_verify),
    ("header_decode", header_decode),
    ("receipt_decode", receipt_decode),
    ("block_decode", block_decode),
    ("call_data_decode", call_data_decode),
    ("creation_payload_decode", creation_payload_decode),
    ("proof_bundle_decode", proof_bundle_decode),
    ("scenario_parse", scenario_parse),
    ("report_parse", report_parse),
];

pub fn rlp_decode(data: &[u8]) {
    if let Ok(item) = rlp::decode(data) {
        assert_eq!(item.encode(), data);
    }
}

/// First 32 octets are the root, the next 8 the index, the rest an encoded proof.
pub fn proof_verify(data: &[u8]) {
    if data.len() < 40 {
        return;
    }
    let root = Digest(data[..32].try_into().unwrap());
    let index = u64::from_be_bytes(data[32..40].try_into().unwrap()) % 4096;
    if let Ok(proof) = MerkleProof::decode(&data[40..]) {
        assert_eq!(proof.encode(), &data[40..]);
        if let Ok(leaf) = trie::verify(&root, index, &proof) {
            // the last node must be the leaf carrying the returned value
            let last = proof.nodes.last().unwrap();
            assert!(last.windows(leaf.len()).any(|w| w == leaf.as_slice()));
        }
    }
}

pub fn header_decode(data: &[u8]) {
    if let Ok(h) = BlockHeader::decode(data) {
        assert_eq!(h.encode(), data);
    }
}

pub fn receipt_decode(data: &[u8]) {
    if let Ok(r) = Receipt::decode(data) {
        assert_eq!(r.encode(), data);
    }
}

pub fn block_decode(data: &[u8]) {
    if let Ok(b) = Block::decode(data) {
        assert_eq!(b.encode(), data);
    }
}

pub fn call_data_decode(data: &[u8]) {
    if let Ok((selector, args)) = decode_call(data) {
        let mut again = encode_call("", args);
        again[..4].copy_from_slice(&selector.0);
        assert_eq!(again, data);
    }
}

pub fn creation_payload_decode(data: &[u8]) {
    if let Ok(p) = CreationPayload::decode(data) {
        assert_eq!(p.encode(), data);
    }
}

pub fn proof_bundle_decode(data: &[u8]) {
    if let Ok(b) = ProofBundle::decode(data) {
        assert_eq!(b.encode(), data);
    }
}

pub fn scenario_parse(data: &[u8]) {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = ScenarioConfig::parse(text);
    }
}

pub fn report_parse(data: &[u8]) {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(report) = ScenarioReport::from_tree(text) {
            let tree = report.to_tree();
            assert_eq!(ScenarioReport::from_tree(&tree).unwrap().to_tree(), tree);
            let _ = report.to_table();
        }
    }
}
