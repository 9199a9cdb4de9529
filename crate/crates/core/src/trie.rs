//! Hexary receipt trie with Merkle proofs.
//!
//! The trie has two node kinds. Every nibble shared by two or more keys
//! becomes a [`TrieNode::Branch`]; the unshared tail of a key lives in a
//! [`TrieNode::Leaf`]. There are no extension nodes and children are always
//! referenced by digest, so a proof is a plain root-to-leaf hash chain.
//!
//! The key of receipt `i` is the nibble expansion of `rlp(uint(i))`. RLP
//! encodings are prefix-free, so no key ends at a branch.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::primitives::{keccak256, Digest};
use crate::rlp::{self, RlpItem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrieError {
    #[error("cannot build a trie from an empty receipt list")]
    EmptyReceipts,
    #[error("receipt index {0} is not in the trie")]
    UnknownIndex(u64),
    #[error("first proof node does not hash to the root")]
    RootMismatch,
    #[error("proof node {0} does not hash to its parent's child digest")]
    LinkMismatch(usize),
    #[error("proof path does not spell the key")]
    PathMismatch,
    #[error("malformed proof node: {0}")]
    MalformedNode(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrieNode {
    Branch {
        children: [Option<Digest>; 16],
        value: Option<Vec<u8>>,
    },
    Leaf {
        path: Vec<u8>,
        value: Vec<u8>,
    },
}

impl TrieNode {
    pub fn to_rlp(&self) -> RlpItem {
        match self {
            TrieNode::Branch { children, value } => {
                let mut items: Vec<RlpItem> = children
                    .iter()
                    .map(|c| c.as_ref().map_or_else(RlpItem::empty, RlpItem::digest))
                    .collect();
                items.push(RlpItem::bytes(value.clone().unwrap_or_default()));
                RlpItem::List(items)
            }
            TrieNode::Leaf { path, value } => {
                RlpItem::List(vec![RlpItem::bytes(pack_nibbles(path)), RlpItem::bytes(value.clone())])
            }
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        self.to_rlp().encode()
    }

    pub fn digest(&self) -> Digest {
        keccak256(&self.encode())
    }

    /// Strict decode. Rejects anything that would not re-encode to `data`.
    pub fn decode(data: &[u8]) -> Result<Self, TrieError> {
        let item = rlp::decode(data).map_err(|_| TrieError::MalformedNode("invalid rlp"))?;
        let items = item
            .as_list()
            .map_err(|_| TrieError::MalformedNode("node is not a list"))?;
        match items.len() {
            17 => {
                let mut children = [None; 16];
                for (slot, it) in children.iter_mut().zip(&items[..16]) {
                    let b = it
                        .as_bytes()
                        .map_err(|_| TrieError::MalformedNode("branch child is a list"))?;
                    *slot = match b.len() {
                        0 => None,
                        32 => Digest::from_slice(b),
                        _ => return Err(TrieError::MalformedNode("branch child is not a digest")),
                    };
                }
                let v = items[16]
                    .as_bytes()
                    .map_err(|_| TrieError::MalformedNode("branch value is a list"))?;
                let value = (!v.is_empty()).then(|| v.to_vec());
                if value.is_none() && children.iter().all(Option::is_none) {
                    return Err(TrieError::MalformedNode("empty branch"));
                }
                Ok(TrieNode::Branch { children, value })
            }
            2 => {
                let packed = items[0]
                    .as_bytes()
                    .map_err(|_| TrieError::MalformedNode("leaf path is a list"))?;
                let path = unpack_nibbles(packed)?;
                let value = items[1]
                    .as_bytes()
                    .map_err(|_| TrieError::MalformedNode("leaf value is a list"))?
                    .to_vec();
                Ok(TrieNode::Leaf { path, value })
            }
            _ => Err(TrieError::MalformedNode("node has neither 17 nor 2 items")),
        }
    }
}

pub fn to_nibbles(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().flat_map(|b| [b >> 4, b & 0x0f]).collect()
}

/// Trie key for receipt `index`.
pub fn receipt_key(index: u64) -> Vec<u8> {
    to_nibbles(&RlpItem::uint(u128::from(index)).encode())
}

/// Packs a nibble path behind a parity nibble: `0,0,path..` when even,
/// `1,path..` when odd.
pub fn pack_nibbles(path: &[u8]) -> Vec<u8> {
    let mut nibbles = Vec::with_capacity(path.len() + 2);
    if path.len() % 2 == 0 {
        nibbles.extend([0, 0]);
    } else {
        nibbles.push(1);
    }
    nibbles.extend_from_slice(path);
    nibbles.chunks(2).map(|p| (p[0] << 4) | p[1]).collect()
}

pub fn unpack_nibbles(packed: &[u8]) -> Result<Vec<u8>, TrieError> {
    let first = *packed
        .first()
        .ok_or(TrieError::MalformedNode("empty leaf path"))?;
    let nibbles = to_nibbles(packed);
    match first >> 4 {
        0 if first & 0x0f == 0 => Ok(nibbles[2..].to_vec()),
        0 => Err(TrieError::MalformedNode("nonzero padding nibble")),
        1 => Ok(nibbles[1..].to_vec()),
        _ => Err(TrieError::MalformedNode("bad parity nibble")),
    }
}

/// A built receipt trie: root digest plus every node encoding by digest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiptTrie {
    root: Digest,
    nodes: BTreeMap<Digest, Vec<u8>>,
    len: u64,
}

impl ReceiptTrie {
    pub fn build<R: AsRef<[u8]>>(receipts: &[R]) -> Result<Self, TrieError> {
        if receipts.is_empty() {
            return Err(TrieError::EmptyReceipts);
        }
        let entries: Vec<(Vec<u8>, &[u8])> = receipts
            .iter()
            .enumerate()
            .map(|(i, r)| (receipt_key(i as u64), r.as_ref()))
            .collect();
        let mut nodes = BTreeMap::new();
        let refs: Vec<&(Vec<u8>, &[u8])> = entries.iter().collect();
        let root = build_node(&refs, 0, &mut nodes);
        Ok(ReceiptTrie {
            root,
            nodes,
            len: receipts.len() as u64,
        })
    }

    pub fn root(&self) -> Digest {
        self.root
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn node(&self, digest: &Digest) -> Option<&[u8]> {
        self.nodes.get(digest).map(Vec::as_slice)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn prove(&self, index: u64) -> Result<MerkleProof, TrieError> {
        if index >= self.len {
            return Err(TrieError::UnknownIndex(index));
        }
        let key = receipt_key(index);
        let mut nodes = Vec::new();
        let mut cursor = self.root;
        let mut depth = 0;
        loop {
            let enc = self
                .nodes
                .get(&cursor)
                .ok_or(TrieError::UnknownIndex(index))?;
            nodes.push(enc.clone());
            match TrieNode::decode(enc)? {
                TrieNode::Leaf { .. } => break,
                TrieNode::Branch { children, .. } => {
                    let nib = *key.get(depth).ok_or(TrieError::UnknownIndex(index))?;
                    cursor = children[usize::from(nib)].ok_or(TrieError::UnknownIndex(index))?;
                    depth += 1;
                }
            }
        }
        Ok(MerkleProof { nodes })
    }
}

fn build_node(entries: &[&(Vec<u8>, &[u8])], depth: usize, nodes: &mut BTreeMap<Digest, Vec<u8>>) -> Digest {
    let node = if let [(key, value)] = entries {
        TrieNode::Leaf {
            path: key[depth..].to_vec(),
            value: value.to_vec(),
        }
    } else {
        let mut groups: [Vec<&(Vec<u8>, &[u8])>; 16] = Default::default();
        let mut value = None;
        for e in entries {
            match e.0.get(depth) {
                Some(n) => groups[usize::from(*n)].push(*e),
                None => value = Some(e.1.to_vec()),
            }
        }
        let mut children = [None; 16];
        for (slot, group) in children.iter_mut().zip(&groups) {
            if !group.is_empty() {
                *slot = Some(build_node(group, depth + 1, nodes));
            }
        }
        TrieNode::Branch { children, value }
    };
    let enc = node.encode();
    let digest = keccak256(&enc);
    nodes.insert(digest, enc);
    digest
}

/// Root-to-leaf node encodings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerkleProof {
    pub nodes: Vec<Vec<u8>>,
}

impl MerkleProof {
    pub fn to_rlp(&self) -> RlpItem {
        RlpItem::List(self.nodes.iter().cloned().map(RlpItem::Bytes).collect())
    }

    pub fn encode(&self) -> Vec<u8> {
        self.to_rlp().encode()
    }

    pub fn from_rlp(item: &RlpItem) -> Result<Self, TrieError> {
        let items = item
            .as_list()
            .map_err(|_| TrieError::MalformedNode("proof is not a list"))?;
        let nodes = items
            .iter()
            .map(|it| it.as_bytes().map(<[u8]>::to_vec))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| TrieError::MalformedNode("proof element is not bytes"))?;
        Ok(MerkleProof { nodes })
    }

    pub fn decode(data: &[u8]) -> Result<Self, TrieError> {
        let item = rlp::decode(data).map_err(|_| TrieError::MalformedNode("invalid rlp"))?;
        Self::from_rlp(&item)
    }

    /// Total octets across all node encodings.
    pub fn octets(&self) -> usize {
        self.nodes.iter().map(Vec::len).sum()
    }
}

/// Checks `proof` against `root` for receipt `index` and returns the receipt
/// encoding stored in the leaf.
///
/// The walk follows the proof's own hash chain: at each branch the slot
/// holding the next node's digest supplies one nibble. The nibbles gathered
/// this way plus the leaf's remainder must spell the key of `index`.
pub fn verify(root: &Digest, index: u64, proof: &MerkleProof) -> Result<Vec<u8>, TrieError> {
    let first = proof
        .nodes
        .first()
        .ok_or(TrieError::MalformedNode("empty proof"))?;
    if keccak256(first) != *root {
        return Err(TrieError::RootMismatch);
    }
    let mut path = Vec::new();
    for (i, enc) in proof.nodes.iter().enumerate() {
        match TrieNode::decode(enc)? {
            TrieNode::Branch { children, .. } => {
                let next = proof
                    .nodes
                    .get(i + 1)
                    .ok_or(TrieError::MalformedNode("proof ends at a branch"))?;
                let link = keccak256(next);
                let slot = children
                    .iter()
                    .position(|c| *c == Some(link))
                    .ok_or(TrieError::LinkMismatch(i + 1))?;
                path.push(slot as u8);
            }
            TrieNode::Leaf { path: rest, value } => {
                if i + 1 != proof.nodes.len() {
                    return Err(TrieError::MalformedNode("leaf before the end of the proof"));
                }
                path.extend_from_slice(&rest);
                if path != receipt_key(index) {
                    return Err(TrieError::PathMismatch);
                }
                return Ok(value);
            }
        }
    }
    unreachable!("a proof either ends at a leaf or fails at a branch")
}
