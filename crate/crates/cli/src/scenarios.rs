//! Scenarios shipped inside the binary.

/// Name and text of every bundled scenario, sorted by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("addressing", include_str!("../scenarios/addressing.sem")),
    ("clos-t3-v4", include_str!("../scenarios/clos-t3-v4.sem")),
    ("deficit", include_str!("../scenarios/deficit.sem")),
    ("dispatch-six", include_str!("../scenarios/dispatch-six.sem")),
    (
        "highstreet-namespaces",
        include_str!("../scenarios/highstreet-namespaces.sem"),
    ),
    ("hybrid-scale", include_str!("../scenarios/hybrid-scale.sem")),
    ("landlord", include_str!("../scenarios/landlord.sem")),
    ("lattice-5x5", include_str!("../scenarios/lattice-5x5.sem")),
    ("molecular", include_str!("../scenarios/molecular.sem")),
    ("molecular-control", include_str!("../scenarios/molecular-control.sem")),
    ("osi-layers", include_str!("../scenarios/osi-layers.sem")),
    ("parking", include_str!("../scenarios/parking.sem")),
    ("processing-node", include_str!("../scenarios/processing-node.sem")),
    ("switch48", include_str!("../scenarios/switch48.sem")),
    ("translation", include_str!("../scenarios/translation.sem")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
