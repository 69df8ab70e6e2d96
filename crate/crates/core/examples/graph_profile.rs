//! Profiles the attribute fixture and a random graph and prints the
//! property table.

use kgbench::analysis::{profile, render_profile_table, Modes, ProfileConfig};
use kgbench::fixtures::{attribute_fixture, random_kg};

fn main() {
    let cfg = ProfileConfig::default();
    let fixture = profile(&attribute_fixture(), Modes::Both, &cfg);
    let random = profile(&random_kg(60, 3, 150, 2), Modes::Both, &cfg);
    print!("{}", render_profile_table(&[("attributes", &fixture), ("random", &random)], true));
}
