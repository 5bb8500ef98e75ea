//! Operation-cost accounting. Every homomorphic operation, group operation
//! and digest call a simulation performs is tallied here so mechanism costs
//! can be compared structurally.

use std::cell::RefCell;
use std::rc::Rc;

/// Operation kinds tracked by the meter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    Add,
    Sub,
    CmpLt,
    Select,
    Xor,
    And,
    Rotate,
    TableLookup,
    GroupAdd,
    GroupScalarMul,
    Digest,
    CipherCall,
}

/// Immutable view of the counters at a point in time.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize,
)]
pub struct CostSnapshot {
    pub add: u64,
    pub sub: u64,
    pub cmp_lt: u64,
    pub select: u64,
    pub xor: u64,
    pub and: u64,
    pub rotate: u64,
    pub table_lookup: u64,
    pub group_add: u64,
    pub group_scalar_mul: u64,
    pub digest: u64,
    pub cipher_call: u64,
}

impl CostSnapshot {
    pub fn total(&self) -> u64 {
        self.add
            + self.sub
            + self.cmp_lt
            + self.select
            + self.xor
            + self.and
            + self.rotate
            + self.table_lookup
            + self.group_add
            + self.group_scalar_mul
            + self.digest
            + self.cipher_call
    }

    /// Counter movement since `earlier`. Counters are monotone, so every
    /// field of the result is the plain difference.
    pub fn delta_since(&self, earlier: &CostSnapshot) -> CostSnapshot {
        CostSnapshot {
            add: self.add - earlier.add,
            sub: self.sub - earlier.sub,
            cmp_lt: self.cmp_lt - earlier.cmp_lt,
            select: self.select - earlier.select,
            xor: self.xor - earlier.xor,
            and: self.and - earlier.and,
            rotate: self.rotate - earlier.rotate,
            table_lookup: self.table_lookup - earlier.table_lookup,
            group_add: self.group_add - earlier.group_add,
            group_scalar_mul: self.group_scalar_mul - earlier.group_scalar_mul,
            digest: self.digest - earlier.digest,
            cipher_call: self.cipher_call - earlier.cipher_call,
        }
    }

    pub fn accumulate(&mut self, other: &CostSnapshot) {
        self.add += other.add;
        self.sub += other.sub;
        self.cmp_lt += other.cmp_lt;
        self.select += other.select;
        self.xor += other.xor;
        self.and += other.and;
        self.rotate += other.rotate;
        self.table_lookup += other.table_lookup;
        self.group_add += other.group_add;
        self.group_scalar_mul += other.group_scalar_mul;
        self.digest += other.digest;
        self.cipher_call += other.cipher_call;
    }
}

/// Shared monotone counter set. Clones share the same underlying counters;
/// a single-threaded run needs no synchronization, and independent runs own
/// independent meters whose snapshots merge deterministically.
#[derive(Clone, Debug, Default)]
pub struct CostMeter {
    counts: Rc<RefCell<CostSnapshot>>,
}

impl CostMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&self, kind: OpKind) {
        self.record_n(kind, 1);
    }

    pub fn record_n(&self, kind: OpKind, n: u64) {
        let mut c = self.counts.borrow_mut();
        match kind {
            OpKind::Add => c.add += n,
            OpKind::Sub => c.sub += n,
            OpKind::CmpLt => c.cmp_lt += n,
            OpKind::Select => c.select += n,
            OpKind::Xor => c.xor += n,
            OpKind::And => c.and += n,
            OpKind::Rotate => c.rotate += n,
            OpKind::TableLookup => c.table_lookup += n,
            OpKind::GroupAdd => c.group_add += n,
            OpKind::GroupScalarMul => c.group_scalar_mul += n,
            OpKind::Digest => c.digest += n,
            OpKind::CipherCall => c.cipher_call += n,
        }
    }

    pub fn snapshot(&self) -> CostSnapshot {
        *self.counts.borrow()
    }
}
