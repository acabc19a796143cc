//! A seeded synthetic classification table with ten primitive attributes:
//! four Boolean flags, four numeric scores in [0, 1] and two categorical
//! colours. With two thresholds per numeric column the candidate pool has
//! 4 + 8 + 6 = 18 conditions.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::RawTable;

const COLOURS: [&str; 3] = ["blue", "green", "red"];

/// Probability that a label is flipped.
const NOISE: f64 = 0.08;

pub fn synthetic_table(rows: usize, seed: u64) -> RawTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attributes: Vec<String> = (0..4).map(|i| format!("flag{i}")).collect();
    attributes.extend((0..4).map(|i| format!("score{i}")));
    attributes.extend((0..2).map(|i| format!("colour{i}")));
    let mut table = RawTable {
        attributes,
        ..RawTable::default()
    };
    for _ in 0..rows {
        let flags: [bool; 4] = std::array::from_fn(|_| rng.random_bool(0.5));
        // three decimals so the CSV text round-trips exactly
        let scores: [f64; 4] = std::array::from_fn(|_| f64::from(rng.random_range(0..1000u32)) / 1000.0);
        let colours: [usize; 2] = std::array::from_fn(|_| rng.random_range(0..COLOURS.len()));
        let mut s = 1.6 * f64::from(u8::from(flags[0])) - 1.1 * f64::from(u8::from(flags[1]));
        s += 2.4 * (scores[0] - 0.5) + 1.8 * (scores[1] - 0.5) * if flags[2] { 1.0 } else { -1.0 };
        s += if scores[2] > 0.7 && flags[3] { 1.3 } else { 0.0 };
        s += match colours[0] {
            0 => 0.9,
            1 => -0.4,
            _ => -0.6,
        };
        s += if colours[1] == 2 { 0.5 * (scores[3] - 0.3) } else { -0.2 };
        let mut label = s > 0.0;
        if rng.random_bool(NOISE) {
            label = !label;
        }
        let mut row = BTreeMap::new();
        for (i, f) in flags.iter().enumerate() {
            row.insert(format!("flag{i}"), u8::from(*f).to_string());
        }
        for (i, v) in scores.iter().enumerate() {
            row.insert(format!("score{i}"), format!("{v:.3}"));
        }
        for (i, c) in colours.iter().enumerate() {
            row.insert(format!("colour{i}"), COLOURS[*c].to_string());
        }
        table.rows.push(row);
        table.labels.push(label);
    }
    table
}
