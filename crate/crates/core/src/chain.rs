//! Blocks, receipts, and the append-only canonical chain.

use std::sync::Arc;

use thiserror::Error;

use crate::primitives::{keccak256, Address, BlockNumber, Digest, Gas, Wei};
use crate::rlp::{self, RlpError, RlpItem};
use crate::trie::ReceiptTrie;
use crate::vm::{
    Account, BlockEnv, BlockHashes, GasSchedule, HandlerRegistry, Transaction, TxOutcome, VmError,
    World,
};

pub const BLOOM_OCTETS: usize = 256;
pub const DEFAULT_BLOCK_INTERVAL: u64 = 15;
pub const DEFAULT_BLOCKHASH_WINDOW: u64 = 256;
/// Position of `receiptsRoot` in the encoded header list.
pub const RECEIPTS_ROOT_INDEX: usize = 5;
/// Position of the logs list in the encoded receipt list.
pub const RECEIPT_LOGS_INDEX: usize = 3;

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("block {0} does not exist")]
    UnknownBlock(BlockNumber),
}

/// Root used by blocks that carry no receipts: keccak256 of the empty list.
pub fn empty_receipts_root() -> Digest {
    keccak256(&RlpItem::List(vec![]).encode())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogEntry {
    pub emitter: Address,
    pub topics: Vec<Digest>,
    pub data: Vec<u8>,
}

impl LogEntry {
    pub fn to_rlp(&self) -> RlpItem {
        RlpItem::List(vec![
            RlpItem::address(&self.emitter),
            RlpItem::List(self.topics.iter().map(RlpItem::digest).collect()),
            RlpItem::bytes(self.data.clone()),
        ])
    }

    pub fn from_rlp(item: &RlpItem) -> Result<Self, RlpError> {
        let items = item.as_list_of(3)?;
        Ok(LogEntry {
            emitter: items[0].as_address()?,
            topics: items[1]
                .as_list()?
                .iter()
                .map(RlpItem::as_digest)
                .collect::<Result<_, _>>()?,
            data: items[2].as_bytes()?.to_vec(),
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        self.to_rlp().encode()
    }

    /// The event commitment a proxy stores for this entry.
    pub fn digest(&self) -> Digest {
        keccak256(&self.encode())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Receipt {
    pub status: bool,
    pub cumulative_gas_used: Gas,
    pub logs: Vec<LogEntry>,
}

impl Receipt {
    pub fn to_rlp(&self) -> RlpItem {
        RlpItem::List(vec![
            RlpItem::uint(u128::from(self.status)),
            RlpItem::uint(u128::from(self.cumulative_gas_used)),
            RlpItem::bytes(vec![0u8; BLOOM_OCTETS]),
            RlpItem::List(self.logs.iter().map(LogEntry::to_rlp).collect()),
        ])
    }

    pub fn from_rlp(item: &RlpItem) -> Result<Self, RlpError> {
        let items = item.as_list_of(4)?;
        let status = match items[0].as_uint()? {
            0 => false,
            1 => true,
            _ => return Err(RlpError::Shape("receipt status is neither 0 nor 1")),
        };
        let bloom = items[2].as_bytes()?;
        if bloom.len() != BLOOM_OCTETS || bloom.iter().any(|b| *b != 0) {
            return Err(RlpError::Shape("bloom placeholder must be 256 zero octets"));
        }
        Ok(Receipt {
            status,
            cumulative_gas_used: items[1].as_u64()?,
            logs: items[RECEIPT_LOGS_INDEX]
                .as_list()?
                .iter()
                .map(LogEntry::from_rlp)
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        self.to_rlp().encode()
    }

    pub fn decode(data: &[u8]) -> Result<Self, RlpError> {
        Self::from_rlp(&rlp::decode(data)?)
    }
}

/// Header with placeholder fields so that `receipts_root` lands at list
/// index 5 of the encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockHeader {
    pub parent: Digest,
    pub receipts_root: Digest,
    pub number: BlockNumber,
    pub timestamp: u64,
}

impl BlockHeader {
    pub fn to_rlp(&self) -> RlpItem {
        RlpItem::List(vec![
            RlpItem::digest(&self.parent),
            RlpItem::digest(&Digest::ZERO),
            RlpItem::address(&Address::ZERO),
            RlpItem::digest(&Digest::ZERO),
            RlpItem::digest(&Digest::ZERO),
            RlpItem::digest(&self.receipts_root),
            RlpItem::uint(u128::from(self.number)),
            RlpItem::uint(u128::from(self.timestamp)),
        ])
    }

    pub fn from_rlp(item: &RlpItem) -> Result<Self, RlpError> {
        let items = item.as_list_of(8)?;
        if items[1].as_digest()? != Digest::ZERO
            || items[2].as_address()? != Address::ZERO
            || items[3].as_digest()? != Digest::ZERO
            || items[4].as_digest()? != Digest::ZERO
        {
            return Err(RlpError::Shape("header placeholder fields must be zero"));
        }
        Ok(BlockHeader {
            parent: items[0].as_digest()?,
            receipts_root: items[RECEIPTS_ROOT_INDEX].as_digest()?,
            number: items[6].as_u64()?,
            timestamp: items[7].as_u64()?,
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        self.to_rlp().encode()
    }

    pub fn decode(data: &[u8]) -> Result<Self, RlpError> {
        Self::from_rlp(&rlp::decode(data)?)
    }

    pub fn digest(&self) -> Digest {
        keccak256(&self.encode())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub header: BlockHeader,
    pub transactions: Vec<Transaction>,
    pub receipts: Vec<Receipt>,
}

impl Block {
    pub fn to_rlp(&self) -> RlpItem {
        RlpItem::List(vec![
            self.header.to_rlp(),
            RlpItem::List(self.transactions.iter().map(Transaction::to_rlp).collect()),
            RlpItem::List(self.receipts.iter().map(Receipt::to_rlp).collect()),
        ])
    }

    pub fn from_rlp(item: &RlpItem) -> Result<Self, RlpError> {
        let items = item.as_list_of(3)?;
        let block = Block {
            header: BlockHeader::from_rlp(&items[0])?,
            transactions: items[1]
                .as_list()?
                .iter()
                .map(Transaction::from_rlp)
                .collect::<Result<_, _>>()?,
            receipts: items[2]
                .as_list()?
                .iter()
                .map(Receipt::from_rlp)
                .collect::<Result<_, _>>()?,
        };
        if block.transactions.len() != block.receipts.len() {
            return Err(RlpError::Shape("transaction and receipt counts differ"));
        }
        Ok(block)
    }

    pub fn encode(&self) -> Vec<u8> {
        self.to_rlp().encode()
    }

    pub fn decode(data: &[u8]) -> Result<Self, RlpError> {
        Self::from_rlp(&rlp::decode(data)?)
    }

    pub fn encoded_receipts(&self) -> Vec<Vec<u8>> {
        self.receipts.iter().map(Receipt::encode).collect()
    }

    pub fn number(&self) -> BlockNumber {
        self.header.number
    }
}

#[derive(Debug, Clone)]
pub struct ChainConfig {
    pub block_interval: u64,
    pub blockhash_window: u64,
    pub gas_schedule: GasSchedule,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            block_interval: DEFAULT_BLOCK_INTERVAL,
            blockhash_window: DEFAULT_BLOCKHASH_WINDOW,
            gas_schedule: GasSchedule::default(),
        }
    }
}

/// Initial accounts.
#[derive(Debug, Clone, Default)]
pub struct Genesis {
    pub accounts: Vec<(Address, Account)>,
}

impl Genesis {
    pub fn fund(mut self, address: Address, balance: Wei) -> Self {
        self.accounts.push((address, Account::eoa(balance)));
        self
    }

    pub fn contract(mut self, address: Address, handler: &str) -> Self {
        self.accounts.push((address, Account::contract(handler)));
        self
    }
}

/// A transaction dropped before execution; it appears in no block.
#[derive(Debug, Clone)]
pub struct Rejected {
    pub transaction: Transaction,
    pub error: VmError,
}

/// `blockhash` lookups from inside block `current`.
struct WindowView<'a> {
    digests: &'a [Digest],
    current: BlockNumber,
    window: u64,
}

impl BlockHashes for WindowView<'_> {
    fn blockhash(&self, number: BlockNumber) -> Option<Digest> {
        window_lookup(self.digests, number, self.current, self.window)
    }
}

fn window_lookup(digests: &[Digest], number: BlockNumber, current: BlockNumber, window: u64) -> Option<Digest> {
    if number >= current || number.saturating_add(window) < current {
        return None;
    }
    digests.get(usize::try_from(number).ok()?).copied()
}

#[derive(Clone)]
pub struct Chain {
    config: ChainConfig,
    blocks: Vec<Block>,
    digests: Vec<Digest>,
    tries: Vec<Option<Arc<ReceiptTrie>>>,
    outcomes: Vec<Arc<Vec<TxOutcome>>>,
    world: World,
}

impl Chain {
    pub fn new(config: ChainConfig, registry: Arc<HandlerRegistry>, genesis: Genesis) -> Self {
        let mut world = World::new(registry, config.gas_schedule.clone());
        for (addr, account) in genesis.accounts {
            world.insert_account(addr, account);
        }
        let header = BlockHeader {
            parent: Digest::ZERO,
            receipts_root: empty_receipts_root(),
            number: 0,
            timestamp: 0,
        };
        let digest = header.digest();
        Chain {
            config,
            blocks: vec![Block {
                header,
                transactions: vec![],
                receipts: vec![],
            }],
            digests: vec![digest],
            tries: vec![None],
            outcomes: vec![Arc::new(vec![])],
            world,
        }
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn head(&self) -> &Block {
        self.blocks.last().expect("chain always holds genesis")
    }

    pub fn height(&self) -> BlockNumber {
        self.head().header.number
    }

    pub fn get_block(&self, number: BlockNumber) -> Result<&Block, ChainError> {
        usize::try_from(number)
            .ok()
            .and_then(|i| self.blocks.get(i))
            .ok_or(ChainError::UnknownBlock(number))
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn header_digest(&self, number: BlockNumber) -> Result<Digest, ChainError> {
        usize::try_from(number)
            .ok()
            .and_then(|i| self.digests.get(i).copied())
            .ok_or(ChainError::UnknownBlock(number))
    }

    /// Header digest of `number` as seen from inside block `current`, or
    /// `None` outside `[current - window, current)`.
    pub fn blockhash(&self, number: BlockNumber, current: BlockNumber) -> Option<Digest> {
        window_lookup(&self.digests, number, current, self.config.blockhash_window)
    }

    /// Receipt trie of a block, `None` for blocks without receipts.
    pub fn receipt_trie(&self, number: BlockNumber) -> Result<Option<&ReceiptTrie>, ChainError> {
        usize::try_from(number)
            .ok()
            .and_then(|i| self.tries.get(i))
            .map(|t| t.as_deref())
            .ok_or(ChainError::UnknownBlock(number))
    }

    /// Execution details for the transactions of a block, in block order.
    pub fn outcomes(&self, number: BlockNumber) -> Result<&[TxOutcome], ChainError> {
        usize::try_from(number)
            .ok()
            .and_then(|i| self.outcomes.get(i))
            .map(|o| o.as_slice())
            .ok_or(ChainError::UnknownBlock(number))
    }

    fn next_env(&self) -> (BlockNumber, u64) {
        let head = &self.head().header;
        (head.number + 1, head.timestamp + self.config.block_interval)
    }

    /// Executes `transactions` in order and seals them into a new block.
    /// Transactions the vm refuses before execution are returned separately
    /// and do not appear in the block.
    pub fn append_block(&mut self, transactions: Vec<Transaction>) -> (&Block, Vec<Rejected>) {
        let (number, timestamp) = self.next_env();
        let view = WindowView {
            digests: &self.digests,
            current: number,
            window: self.config.blockhash_window,
        };
        let env = BlockEnv {
            number,
            timestamp,
            hashes: &view,
        };
        let mut included = Vec::new();
        let mut receipts = Vec::new();
        let mut outcomes = Vec::new();
        let mut rejected = Vec::new();
        let mut cumulative = 0;
        for tx in transactions {
            match self.world.execute_transaction(&tx, &env, cumulative) {
                Ok(outcome) => {
                    cumulative = outcome.receipt.cumulative_gas_used;
                    receipts.push(outcome.receipt.clone());
                    outcomes.push(outcome);
                    included.push(tx);
                }
                Err(error) => rejected.push(Rejected {
                    transaction: tx,
                    error,
                }),
            }
        }
        let trie = if receipts.is_empty() {
            None
        } else {
            let encoded: Vec<Vec<u8>> = receipts.iter().map(Receipt::encode).collect();
            Some(Arc::new(ReceiptTrie::build(&encoded).expect("non-empty receipts")))
        };
        let header = BlockHeader {
            parent: *self.digests.last().expect("genesis digest"),
            receipts_root: trie.as_ref().map_or_else(empty_receipts_root, |t| t.root()),
            number,
            timestamp,
        };
        self.digests.push(header.digest());
        self.tries.push(trie);
        self.outcomes.push(Arc::new(outcomes));
        self.blocks.push(Block {
            header,
            transactions: included,
            receipts,
        });
        (self.head(), rejected)
    }

    /// Executes `tx` as if it were the only transaction of the next block
    /// and discards every effect.
    pub fn call(&self, tx: &Transaction) -> Result<TxOutcome, VmError> {
        let (number, timestamp) = self.next_env();
        let view = WindowView {
            digests: &self.digests,
            current: number,
            window: self.config.blockhash_window,
        };
        let env = BlockEnv {
            number,
            timestamp,
            hashes: &view,
        };
        let mut scratch = self.world.clone();
        scratch.execute_transaction(tx, &env, 0)
    }
}
