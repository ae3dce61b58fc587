//! Scenario files shipped with the binary.

pub const PRESETS: [(&str, &str); 4] = [
    ("fig2", include_str!("../presets/fig2.json")),
    ("amplification", include_str!("../presets/amplification.json")),
    ("caseA", include_str!("../presets/caseA.json")),
    ("caseB", include_str!("../presets/caseB.json")),
];

pub fn get(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}
