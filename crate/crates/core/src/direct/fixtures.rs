//! Worked examples shipped as data files.
//!
//! Each fixture is a design+nesting bundle in the canonical design format
//! together with the mode it claims and the `w` it achieves.

use crate::design::{Design, Nesting};
use crate::error::{NestError, Result};
use crate::format::read_design;
use crate::verify::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub mode: Mode,
    pub w: usize,
    pub summary: &'static str,
    text: &'static str,
}

macro_rules! fixture {
    ($name:literal, $mode:expr, $w:literal, $summary:literal) => {
        FixtureInfo {
            name: $name,
            mode: $mode,
            w: $w,
            summary: $summary,
            text: include_str!(concat!("../../fixtures/", $name, ".json")),
        }
    };
}

pub const CATALOG: &[FixtureInfo] = &[
    fixture!(
        "E4",
        Mode::Weak,
        5,
        "(4,3,2)-BIBD, every block nested by one new point"
    ),
    fixture!(
        "E4strong",
        Mode::Strong,
        7,
        "(4,3,2)-BIBD with three new points"
    ),
    fixture!(
        "E1",
        Mode::Weak,
        6,
        "(5,2,1)-BIBD from two base blocks mod 5"
    ),
    fixture!(
        "E2",
        Mode::Weak,
        11,
        "(9,2,1)-BIBD from four base blocks mod 9"
    ),
    fixture!(
        "E3",
        Mode::Weak,
        16,
        "(13,2,1)-BIBD from six base blocks mod 13"
    ),
    fixture!(
        "E7",
        Mode::Weak,
        8,
        "(7,3,2)-BIBD: nested STS(7) plus a cyclic STS(7) nested by ∞"
    ),
    fixture!(
        "E9",
        Mode::Weak,
        11,
        "(9,3,2)-BIBD from two copies of AG(2,3)"
    ),
    fixture!("E6", Mode::Weak, 7, "(6,3,2)-BIBD on Z_5 ∪ {∞}"),
    fixture!("E12", Mode::Weak, 14, "(12,3,2)-BIBD on Z_11 ∪ {∞}"),
    fixture!(
        "E10",
        Mode::Weak,
        12,
        "(10,3,2)-BIBD on Z_7 ∪ {∞_1,∞_2,∞_3}"
    ),
    fixture!(
        "E9strong",
        Mode::Strong,
        14,
        "(9,3,2)-BIBD from two copies of AG(2,3), five new points"
    ),
    fixture!(
        "E7strong",
        Mode::Strong,
        11,
        "(7,3,2)-BIBD on Z_6 ∪ {∞}, four new points"
    ),
    fixture!(
        "strongE6",
        Mode::Strong,
        11,
        "(6,3,2)-BIBD with developed new-point subscripts"
    ),
    fixture!(
        "E12strong",
        Mode::Strong,
        18,
        "(12,3,2)-BIBD on 1..12, new points 13..18"
    ),
    fixture!(
        "E10strong",
        Mode::Strong,
        16,
        "(10,3,2)-BIBD on Z_7 ∪ {∞_1,∞_2,∞_3}, six new points"
    ),
];

pub fn fixture_info(name: &str) -> Result<&'static FixtureInfo> {
    CATALOG
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| NestError::UnknownFixture(name.to_string()))
}

impl FixtureInfo {
    pub fn text(&self) -> &'static str {
        self.text
    }

    pub fn load(&self) -> Result<(Design, Nesting)> {
        let (design, nesting) = read_design(self.text)?;
        let nesting = nesting
            .ok_or_else(|| NestError::Malformed(format!("fixture {} has no nesting", self.name)))?;
        Ok((design, nesting))
    }
}

/// Load a fixture by name.
pub fn fixture(name: &str) -> Result<(Design, Nesting)> {
    fixture_info(name)?.load()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{canonicalize, render, to_file};
    use crate::verify::verify_nesting;

    #[test]
    fn every_fixture_verifies_with_its_w() {
        for info in CATALOG {
            let (d, n) = info.load().unwrap();
            let cert = verify_nesting(&d, &n, info.mode);
            assert!(cert.passed(), "{}: {:?}", info.name, cert.first_failure());
            assert_eq!(n.w(), info.w, "{}", info.name);
        }
    }

    #[test]
    fn fixture_files_are_canonical() {
        for info in CATALOG {
            let (d, n) = info.load().unwrap();
            let (cd, cn) = canonicalize(&d, Some(&n));
            assert_eq!(
                render(&to_file(&cd, cn.as_ref())),
                info.text(),
                "{}",
                info.name
            );
        }
    }

    #[test]
    fn unknown_name() {
        assert_eq!(
            fixture("E5").unwrap_err(),
            NestError::UnknownFixture("E5".into())
        );
    }

    #[test]
    fn e12strong_shape() {
        let (d, n) = fixture("E12strong").unwrap();
        assert_eq!(d.blocks.len(), 44);
        assert_eq!((d.v(), n.w()), (12, 18));
    }
}
