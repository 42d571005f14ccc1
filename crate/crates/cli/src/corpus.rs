//! Example workspaces bundled with the binary, one file per family.

pub const FAMILIES: [(&str, &str); 6] = [
    ("finset", include_str!("../corpus/finset.veq")),
    ("groups", include_str!("../corpus/groups.veq")),
    ("theories", include_str!("../corpus/theories.veq")),
    ("algebras", include_str!("../corpus/algebras.veq")),
    ("inserters", include_str!("../corpus/inserters.veq")),
    ("series", include_str!("../corpus/series.veq")),
];

/// Sources for a family name, or every family for `all`.
pub fn family(name: &str) -> Option<Vec<&'static str>> {
    if name == "all" {
        return Some(FAMILIES.iter().map(|(_, s)| *s).collect());
    }
    FAMILIES.iter().find(|(n, _)| *n == name).map(|(_, s)| vec![*s])
}
