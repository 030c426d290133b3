//! Suggested rewrites that would make a function functionally valid.

use super::{ReasonKind, Verdict};

pub const RETURN_INSTEAD: &str = "return the value instead of assigning nonlocally";
pub const SEED_ARGUMENT: &str = "accept the generator's initial state as an argument";
pub const EXPLICIT_SEED: &str = "require explicit set_seed in reproducible examples";
pub const MANUAL_AUDIT: &str = "no automatic remediation; manual audit required";

/// One suggestion per distinct remedy, in order of first cause.
pub fn suggest_remediation(v: &Verdict) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut push = |s: String| {
        if !out.contains(&s) {
            out.push(s);
        }
    };
    for r in &v.reasons {
        match r.kind {
            ReasonKind::NonlocalAssignment => push(RETURN_INSTEAD.into()),
            ReasonKind::StateRead => match r.subject.as_deref() {
                Some(name) if name != "options" && name != ".Options" && name != "get_option" => {
                    push(format!("lift option '{name}' to an explicit parameter"))
                }
                _ => push("lift options to explicit parameters".into()),
            },
            ReasonKind::RngDependence => {
                push(SEED_ARGUMENT.into());
                push(EXPLICIT_SEED.into());
            }
            ReasonKind::GlobalReference => match r.subject.as_deref() {
                Some(name) if name != "globalenv" => push(format!("declare an import or define '{name}' locally")),
                _ => push("declare an import or define locally".into()),
            },
            ReasonKind::ForeignCode | ReasonKind::DynamicCode => push(MANUAL_AUDIT.into()),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::purity::{FunctionId, Reason, Status};
    use crate::reader::Loc;

    fn verdict(kinds: &[(ReasonKind, Option<&str>)]) -> Verdict {
        let reasons = kinds
            .iter()
            .map(|(k, s)| Reason {
                origin: FunctionId::new(0, 0),
                loc: Loc::new(1, 1),
                kind: *k,
                detail: String::new(),
                subject: s.map(str::to_string),
            })
            .collect::<Vec<_>>();
        Verdict { status: Status::of_reasons(&reasons), reasons, via: vec![] }
    }

    #[test]
    fn functional_has_no_suggestions() {
        assert!(suggest_remediation(&verdict(&[])).is_empty());
    }

    #[test]
    fn rng_suggests_seed_as_argument() {
        let s = suggest_remediation(&verdict(&[(ReasonKind::RngDependence, Some("rng_draw"))]));
        assert_eq!(s, [SEED_ARGUMENT, EXPLICIT_SEED]);
    }

    #[test]
    fn state_read_names_the_option() {
        let s = suggest_remediation(&verdict(&[(ReasonKind::StateRead, Some("tol"))]));
        assert_eq!(s, ["lift option 'tol' to an explicit parameter"]);
    }

    #[test]
    fn duplicates_collapse() {
        let s = suggest_remediation(&verdict(&[
            (ReasonKind::ForeignCode, None),
            (ReasonKind::DynamicCode, None),
            (ReasonKind::NonlocalAssignment, None),
        ]));
        assert_eq!(s, [MANUAL_AUDIT, RETURN_INSTEAD]);
    }
}
