//! Benchmarks live under `benches/`; this library only names the fixtures.

use udn_core::{Group, GroupSpec, Limits};

/// A group from a catalogue name, with default limits and seed 0.
pub fn group(name: &str) -> Group {
    let spec: GroupSpec = name.parse().expect("known group");
    Group::new(&spec, Limits::default(), 0).expect("group builds")
}
