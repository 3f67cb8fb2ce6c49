//! Binary cache for rank tables, so repeated CLI invocations skip the
//! precomputation phase.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic        8 bytes  "GWRANKT\x01"
//! version      u32      currently 1
//! n            u32
//! support_len  u32
//! labels       support_len × i64
//! log2_probs   support_len × f64 (raw bit patterns)
//! class_count  u64
//! classes      class_count × {
//!     counts      support_len × u32
//!     log2_prob   f64 (raw bits)
//!     card_len    u32
//!     cardinality card_len bytes (BigUint little-endian)
//! }
//! ```
//!
//! Classes are stored in table order, which encodes the tie-break
//! resolution; cumulative arrays and the counts index are rebuilt on load.
//! The exact mass view is not persisted — loaded tables answer every rank,
//! mass and core-set query identically, but carry `masses: None`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::dist::{AtomDistribution, ProductDistribution};
use crate::error::{Error, Result};
use crate::logdomain::{log2_biguint, Log2Accumulator};

use super::{RankTable, TypeClass};

const MAGIC: &[u8; 8] = b"GWRANKT\x01";
const VERSION: u32 = 1;

impl RankTable {
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&self.n.to_le_bytes())?;
        w.write_all(&(self.atom.len() as u32).to_le_bytes())?;
        for &label in self.atom.support() {
            w.write_all(&label.to_le_bytes())?;
        }
        for &lp in self.atom.log2_probs() {
            w.write_all(&lp.to_bits().to_le_bytes())?;
        }
        w.write_all(&(self.classes.len() as u64).to_le_bytes())?;
        for class in &self.classes {
            for &c in &class.counts {
                w.write_all(&c.to_le_bytes())?;
            }
            w.write_all(&class.log2_prob.to_bits().to_le_bytes())?;
            let bytes = class.cardinality.to_bytes_le();
            w.write_all(&(bytes.len() as u32).to_le_bytes())?;
            w.write_all(&bytes)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load_cache(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::CacheFormat("bad magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(Error::CacheFormat(format!(
                "version {version}, expected {VERSION}"
            )));
        }
        let n = read_u32(&mut r)?;
        let support_len = read_u32(&mut r)? as usize;
        let mut labels = Vec::with_capacity(support_len);
        for _ in 0..support_len {
            labels.push(read_i64(&mut r)?);
        }
        let mut log_probs = Vec::with_capacity(support_len);
        for _ in 0..support_len {
            log_probs.push(f64::from_bits(read_u64(&mut r)?));
        }
        let atom = AtomDistribution::from_log2_probs_verbatim(labels, log_probs)
            .map_err(|e| Error::CacheFormat(format!("stored atom invalid: {e}")))?;
        let class_count = read_u64(&mut r)? as usize;
        let mut classes = Vec::with_capacity(class_count);
        for _ in 0..class_count {
            let mut counts = Vec::with_capacity(support_len);
            for _ in 0..support_len {
                counts.push(read_u32(&mut r)?);
            }
            let log2_prob = f64::from_bits(read_u64(&mut r)?);
            let card_len = read_u32(&mut r)? as usize;
            let mut bytes = vec![0u8; card_len];
            r.read_exact(&mut bytes)?;
            classes.push(TypeClass {
                counts,
                log2_prob,
                cardinality: BigUint::from_bytes_le(&bytes),
            });
        }

        let mut cum_counts = Vec::with_capacity(classes.len());
        let mut cum_log2_mass = Vec::with_capacity(classes.len());
        let mut running = BigUint::zero();
        let mut mass = Log2Accumulator::new();
        for class in &classes {
            running += &class.cardinality;
            cum_counts.push(running.clone());
            mass.push(log2_biguint(&class.cardinality) + class.log2_prob);
            cum_log2_mass.push(mass.log2_total());
        }
        let key_count = BigUint::from(support_len).pow(n);
        if cum_counts.last() != Some(&key_count) {
            return Err(Error::CacheFormat(
                "class cardinalities do not partition the key space".into(),
            ));
        }
        let mut counts_order: Vec<u32> = (0..classes.len() as u32).collect();
        counts_order.sort_by(|&a, &b| classes[a as usize].counts.cmp(&classes[b as usize].counts));

        Ok(Self {
            atom,
            n,
            classes,
            cum_counts,
            cum_log2_mass,
            counts_order,
            key_count,
        })
    }

    /// Whether this (possibly cache-loaded) table describes exactly the given
    /// product distribution: same n, same labels, bit-identical
    /// log-probabilities.
    pub fn same_instance(&self, d: &ProductDistribution) -> bool {
        self.n == d.n()
            && self.atom.support() == d.atom().support()
            && self
                .atom
                .log2_probs()
                .iter()
                .zip(d.atom().log2_probs())
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_i64(r: &mut impl Read) -> Result<i64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(i64::from_le_bytes(b))
}
