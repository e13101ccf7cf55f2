//! The five bundled exponent programs with their published optima and
//! argmax points.

use std::collections::BTreeMap;

use super::rational::Rational;
use super::{parse_program, PLProgram};

#[derive(Debug, Clone, Copy)]
pub struct BundledProgram {
    pub name: &'static str,
    pub source: &'static str,
    pub optimum: &'static str,
    /// Nonzero coordinates of the published argmax; all others are zero.
    pub witness: &'static [(&'static str, &'static str)],
}

pub const BUNDLED_PROGRAMS: [BundledProgram; 5] = [
    BundledProgram {
        name: "second-truncation-diagonal",
        source: include_str!("../../programs/second-truncation-diagonal.plp"),
        optimum: "5/6",
        witness: &[("d2", "1/3"), ("g", "1/6"), ("n", "1"), ("f", "1/2")],
    },
    BundledProgram {
        name: "second-truncation-offdiagonal",
        source: include_str!("../../programs/second-truncation-offdiagonal.plp"),
        optimum: "14/15",
        witness: &[("d2", "1/5"), ("n", "4/5"), ("f", "2/5")],
    },
    BundledProgram {
        name: "truncation-removal",
        source: include_str!("../../programs/truncation-removal.plp"),
        optimum: "31/32",
        witness: &[("d2", "9/40"), ("g", "1/32"), ("n", "67/80"), ("y", "-(13/60)")],
    },
    BundledProgram {
        name: "congruence-equality",
        source: include_str!("../../programs/congruence-equality.plp"),
        optimum: "1591/1600",
        witness: &[("nu", "93/400"), ("d2", "93/400"), ("n", "121/160"), ("y", "-(121/600)"), ("z", "-(121/200)")],
    },
    BundledProgram {
        name: "final-poisson",
        source: include_str!("../../programs/final-poisson.plp"),
        optimum: "119/120",
        witness: &[("nu", "1/320"), ("g", "1/960"), ("d", "1/192")],
    },
];

impl BundledProgram {
    pub fn program(&self) -> PLProgram {
        parse_program(self.name, self.source).expect("bundled program parses")
    }

    pub fn optimum(&self) -> Rational {
        self.optimum.parse().expect("bundled optimum parses")
    }

    /// The published point, completed with zeros.
    pub fn witness_point(&self, p: &PLProgram) -> BTreeMap<String, Rational> {
        let mut out: BTreeMap<String, Rational> = p.vars.iter().map(|v| (v.name.clone(), Rational::zero())).collect();
        for (k, v) in self.witness {
            out.insert(k.to_string(), v.parse().expect("bundled witness parses"));
        }
        out
    }

    pub fn by_name(name: &str) -> Option<&'static BundledProgram> {
        BUNDLED_PROGRAMS.iter().find(|p| p.name == name)
    }
}

pub fn paper_programs() -> Vec<PLProgram> {
    BUNDLED_PROGRAMS.iter().map(BundledProgram::program).collect()
}
