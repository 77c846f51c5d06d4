use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AgentError;
use crate::granulation::Feature;

const FORMAT: &str = "qrough-qtable";
const VERSION: u32 = 1;

/// Quantized granule feature; the identity under which states are reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateKey(pub [u16; 6]);

impl StateKey {
    /// `floor(v * levels)` per channel, clamped to `levels - 1`.
    pub fn quantize(feature: &Feature, levels: u16) -> Self {
        let top = levels.saturating_sub(1);
        let bins = feature.map(|v| {
            let b = (v.clamp(0.0, 1.0) * f64::from(levels)).floor() as u16;
            b.min(top)
        });
        Self(bins)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    /// Merge the granule into the lower approximation.
    Include,
    /// Leave the lower approximation unchanged.
    Exclude,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QEntry {
    pub q_include: f64,
    pub q_exclude: f64,
    pub chosen: Action,
    pub visits: u64,
}

/// Learned state-action values, persistent across the frames of a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    quant_levels: u16,
    entries: BTreeMap<StateKey, QEntry>,
}

#[derive(Serialize, Deserialize)]
struct QTableFile {
    format: String,
    version: u32,
    quant_levels: u16,
    entries: Vec<EntryRecord>,
}

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    key: StateKey,
    #[serde(flatten)]
    entry: QEntry,
}

impl QTable {
    pub fn new(quant_levels: u16) -> Self {
        Self {
            quant_levels,
            entries: BTreeMap::new(),
        }
    }

    pub fn quant_levels(&self) -> u16 {
        self.quant_levels
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &StateKey) -> Option<&QEntry> {
        self.entries.get(key)
    }

    pub fn contains(&self, key: &StateKey) -> bool {
        self.entries.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StateKey, &QEntry)> {
        self.entries.iter()
    }

    pub fn key_for(&self, feature: &Feature) -> StateKey {
        StateKey::quantize(feature, self.quant_levels)
    }

    /// Returns the stored action for a known state and bumps its visit count.
    pub(crate) fn recall(&mut self, key: &StateKey) -> Option<Action> {
        self.entries.get_mut(key).map(|e| {
            e.visits += 1;
            e.chosen
        })
    }

    pub(crate) fn record(&mut self, key: StateKey, q_include: f64, q_exclude: f64, chosen: Action) {
        self.entries.insert(
            key,
            QEntry {
                q_include,
                q_exclude,
                chosen,
                visits: 1,
            },
        );
    }

    pub fn to_writer<W: Write>(&self, w: W) -> Result<(), AgentError> {
        let file = QTableFile {
            format: FORMAT.to_string(),
            version: VERSION,
            quant_levels: self.quant_levels,
            entries: self.entries.iter().map(|(&key, &entry)| EntryRecord { key, entry }).collect(),
        };
        serde_json::to_writer(w, &file)?;
        Ok(())
    }

    pub fn from_reader<R: Read>(r: R) -> Result<Self, AgentError> {
        let file: QTableFile = serde_json::from_reader(r)?;
        if file.format != FORMAT || file.version != VERSION {
            return Err(AgentError::QTableVersion {
                format: file.format,
                version: file.version,
            });
        }
        if file.quant_levels < 2 {
            return Err(AgentError::InvalidConfig(format!(
                "stored quant_levels {} is below 2",
                file.quant_levels
            )));
        }
        let top = file.quant_levels - 1;
        let mut entries = BTreeMap::new();
        for rec in file.entries {
            if rec.key.0.iter().any(|&b| b > top) {
                return Err(AgentError::InvalidConfig(format!(
                    "state key {:?} out of range for {} levels",
                    rec.key.0, file.quant_levels
                )));
            }
            entries.insert(rec.key, rec.entry);
        }
        Ok(Self {
            quant_levels: file.quant_levels,
            entries,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), AgentError> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| AgentError::Io(path.display().to_string(), e))?;
        let mut w = BufWriter::new(f);
        self.to_writer(&mut w)?;
        w.flush().map_err(|e| AgentError::Io(path.display().to_string(), e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AgentError> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| AgentError::Io(path.display().to_string(), e))?;
        Self::from_reader(BufReader::new(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quantize_clamps_top_bin() {
        assert_eq!(StateKey::quantize(&[0.0; 6], 16).0, [0; 6]);
        assert_eq!(StateKey::quantize(&[1.0; 6], 16).0, [15; 6]);
        assert_eq!(StateKey::quantize(&[0.5, 0.49, 0.0625, 0.0624, 0.99, 1.0], 16).0, [8, 7, 1, 0, 15, 15]);
    }

    #[test]
    fn json_shape_and_rejects_unknown_version() {
        let mut qt = QTable::new(4);
        qt.record(StateKey([0, 1, 2, 3, 0, 1]), 1.4, -0.4, Action::Include);
        let mut buf = Vec::new();
        qt.to_writer(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"version\":1"));
        assert!(text.contains("\"chosen\":\"include\""));
        assert_eq!(QTable::from_reader(&buf[..]).unwrap(), qt);

        let bad = text.replace("\"version\":1", "\"version\":9");
        assert!(matches!(QTable::from_reader(bad.as_bytes()), Err(AgentError::QTableVersion { .. })));
        let out_of_range = text.replace("[0,1,2,3,0,1]", "[0,1,2,4,0,1]");
        assert!(QTable::from_reader(out_of_range.as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn quantize_is_total(f in prop::array::uniform6(-0.5f64..1.5), levels in 2u16..=64) {
            let k = StateKey::quantize(&f, levels);
            prop_assert!(k.0.iter().all(|&b| b < levels));
        }

        #[test]
        fn serialization_round_trips(
            rows in prop::collection::vec((prop::array::uniform6(0u16..8), -1.9f64..1.9, -1.9f64..1.9, any::<bool>(), 1u64..100), 0..20)
        ) {
            let mut qt = QTable::new(8);
            for (k, a, b, inc, visits) in rows {
                let chosen = if inc { Action::Include } else { Action::Exclude };
                qt.entries.insert(StateKey(k), QEntry { q_include: a, q_exclude: b, chosen, visits });
            }
            let mut buf = Vec::new();
            qt.to_writer(&mut buf).unwrap();
            prop_assert_eq!(QTable::from_reader(&buf[..]).unwrap(), qt);
        }
    }
}
