//! Word-addressed key/value tables backing every simulated round.

use std::fmt;
use std::io::{self, BufRead, Read, Write};
use std::str::FromStr;

use rustc_hash::FxHashMap;

use super::RuntimeError;

/// A machine word. Every stored key and every stored value costs one word.
pub type Word = u64;

/// Composite table key: a namespace tag plus two 32-bit coordinates.
///
/// Algorithms pick their own namespace constants; `a` is usually a vertex id
/// and `b` an adjacency slot or a second vertex id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Key {
    pub ns: u16,
    pub a: u32,
    pub b: u32,
}

impl Key {
    #[inline]
    pub const fn new(ns: u16, a: u32, b: u32) -> Self {
        Key { ns, a, b }
    }

    #[inline]
    pub const fn unit(ns: u16, a: u32) -> Self {
        Key { ns, a, b: 0 }
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.ns, self.a, self.b)
    }
}

impl FromStr for Key {
    type Err = RuntimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RuntimeError::Decode(format!("malformed key `{s}`"));
        let mut parts = s.split(':');
        let ns = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let a = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let b = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Key { ns, a, b })
    }
}

/// An immutable-while-serving key/value table.
///
/// A round reads from one sealed `KvTable` and produces another; the driver
/// may assemble the next input from several outputs with [`KvTable::extend`]
/// or [`KvTable::overlay`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KvTable {
    entries: FxHashMap<Key, Word>,
}

const BINARY_MAGIC: &[u8; 8] = b"AMPCKV01";

impl KvTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(cap: usize) -> Self {
        KvTable {
            entries: FxHashMap::with_capacity_and_hasher(cap, Default::default()),
        }
    }

    #[inline]
    pub fn get(&self, key: &Key) -> Option<Word> {
        self.entries.get(key).copied()
    }

    /// Driver-side insertion used when encoding structures into a table.
    #[inline]
    pub fn insert(&mut self, key: Key, value: Word) -> Option<Word> {
        self.entries.insert(key, value)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Live words: one for each key plus one for each value.
    pub fn word_count(&self) -> u64 {
        2 * self.entries.len() as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Key, &Word)> {
        self.entries.iter()
    }

    /// Entries of one namespace, in unspecified order.
    pub fn namespace(&self, ns: u16) -> impl Iterator<Item = (Key, Word)> + '_ {
        self.entries
            .iter()
            .filter(move |(k, _)| k.ns == ns)
            .map(|(k, v)| (*k, *v))
    }

    /// Entries sorted by key.
    pub fn sorted(&self) -> Vec<(Key, Word)> {
        let mut out: Vec<_> = self.entries.iter().map(|(k, v)| (*k, *v)).collect();
        out.sort_unstable();
        out
    }

    /// Union of two tables. Keys present in both must carry the same value.
    pub fn extend(&mut self, other: KvTable) -> Result<(), RuntimeError> {
        self.entries.reserve(other.len());
        for (k, v) in other.entries {
            match self.entries.insert(k, v) {
                Some(old) if old != v => return Err(RuntimeError::WriteConflict(k)),
                _ => {}
            }
        }
        Ok(())
    }

    /// Applies `updates` on top of `self`; updated keys take the new value.
    pub fn overlay(&mut self, updates: KvTable) {
        self.entries.extend(updates.entries);
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&Key, Word) -> bool) {
        self.entries.retain(|k, v| keep(k, *v));
    }

    /// Text dump: one `key<TAB>value` line per entry, sorted by key.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (k, v) in self.sorted() {
            writeln!(out, "{k}\t{v}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<KvTable, RuntimeError> {
        let mut table = KvTable::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| RuntimeError::Decode(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('\t')
                .ok_or_else(|| RuntimeError::Decode(format!("line {}: expected key<TAB>value", lineno + 1)))?;
            let key: Key = k.parse()?;
            let value: Word = v
                .trim()
                .parse()
                .map_err(|_| RuntimeError::Decode(format!("line {}: bad value", lineno + 1)))?;
            if table.insert(key, value).is_some() {
                return Err(RuntimeError::Decode(format!("duplicate key {key}")));
            }
        }
        Ok(table)
    }

    /// Binary dump: magic, little-endian entry count, then fixed 18-byte
    /// records `(ns: u16, a: u32, b: u32, value: u64)` sorted by key.
    pub fn write_binary<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(BINARY_MAGIC)?;
        out.write_all(&(self.len() as u64).to_le_bytes())?;
        for (k, v) in self.sorted() {
            out.write_all(&k.ns.to_le_bytes())?;
            out.write_all(&k.a.to_le_bytes())?;
            out.write_all(&k.b.to_le_bytes())?;
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<KvTable, RuntimeError> {
        let io_err = |e: io::Error| RuntimeError::Decode(e.to_string());
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic).map_err(io_err)?;
        if &magic != BINARY_MAGIC {
            return Err(RuntimeError::Decode("bad table magic".into()));
        }
        let mut count = [0u8; 8];
        input.read_exact(&mut count).map_err(io_err)?;
        let count = u64::from_le_bytes(count) as usize;
        let mut table = KvTable::with_capacity(count);
        let mut rec = [0u8; 18];
        for _ in 0..count {
            input.read_exact(&mut rec).map_err(io_err)?;
            let key = Key {
                ns: u16::from_le_bytes([rec[0], rec[1]]),
                a: u32::from_le_bytes(rec[2..6].try_into().unwrap()),
                b: u32::from_le_bytes(rec[6..10].try_into().unwrap()),
            };
            let value = u64::from_le_bytes(rec[10..18].try_into().unwrap());
            if table.insert(key, value).is_some() {
                return Err(RuntimeError::Decode(format!("duplicate key {key}")));
            }
        }
        Ok(table)
    }
}

impl FromIterator<(Key, Word)> for KvTable {
    fn from_iter<I: IntoIterator<Item = (Key, Word)>>(iter: I) -> Self {
        KvTable {
            entries: iter.into_iter().collect(),
        }
    }
}
