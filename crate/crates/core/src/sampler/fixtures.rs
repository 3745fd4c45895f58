//! Hand-built patches from a JSON catalog. Lengths and positions are
//! written as `l·ℓ + c` so a fixture can be instantiated at several ℓ.
//!
//! Fixture cells carry distinct relators and a derived labeling: every edge
//! gets its own generator. This makes each fixture fulfilled by its own
//! presentation without searching for words with prescribed overlaps.

use serde::{Deserialize, Serialize};

use crate::complex::{CellId, CellSpec, Gluing, Labeling, PatchComplex};
use crate::error::{Error, Result};
use crate::rational::{parse_q, Q};
use crate::word::PieceLabel;

const CATALOG: &str = include_str!("../../fixtures/catalog.json");

/// `l·ℓ + c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Amount {
    #[serde(default = "zero")]
    pub l: String,
    #[serde(default)]
    pub c: i64,
}

fn zero() -> String {
    "0".into()
}

fn yes() -> bool {
    true
}

impl Amount {
    pub fn eval(&self, ell: usize) -> Result<i64> {
        let v = parse_q(&self.l)? * Q::from_integer(ell as i64) + Q::from_integer(self.c);
        if !v.is_integer() {
            return Err(Error::Fixture { name: String::new(), reason: format!("{}·{ell} is not an integer", self.l) });
        }
        Ok(v.to_integer())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureGluing {
    pub a: String,
    pub start_a: Amount,
    pub b: String,
    pub start_b: Amount,
    pub length: Amount,
    #[serde(default = "yes")]
    pub reversed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub name: String,
    pub description: String,
    /// ℓ must be a multiple of this.
    pub ell_multiple: usize,
    pub default_ell: usize,
    pub d: String,
    pub eps: String,
    pub cells: Vec<String>,
    pub gluings: Vec<FixtureGluing>,
}

#[derive(Deserialize)]
struct Catalog {
    fixtures: Vec<FixtureSpec>,
}

pub fn catalog() -> Vec<FixtureSpec> {
    serde_json::from_str::<Catalog>(CATALOG).expect("shipped catalog parses").fixtures
}

/// Labels read from an explicit table, `table[relator][position]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableLabeling {
    pub table: Vec<Vec<PieceLabel>>,
}

impl Labeling for TableLabeling {
    fn label(&self, relator: usize, pos: usize) -> PieceLabel {
        self.table[relator][pos]
    }
}

/// Gives every edge its own generator, oriented along the edge's reference
/// direction. Requires distinct relators on distinct cells.
pub fn derived_labeling(patch: &PatchComplex) -> Result<TableLabeling> {
    let ell = patch.ell();
    let n_rel = patch.cells().iter().map(|c| c.relator + 1).max().unwrap_or(0);
    let mut table: Vec<Option<Vec<PieceLabel>>> = vec![None; n_rel];
    for c in patch.cell_ids() {
        let spec = patch.cell(c);
        if table[spec.relator].is_some() {
            return Err(Error::Presentation(format!("relator {} is used by two cells", spec.relator)));
        }
        let mut row = vec![PieceLabel { gen: 0, piece: 0, inv: false }; ell];
        for slot in 0..ell {
            let e = patch.slot_edge(c, slot);
            let label = PieceLabel { gen: e.0 as u16, piece: 0, inv: !patch.slot_forward(c, slot) };
            let (pos, backward) = spec.slot_position(slot, ell);
            row[pos] = if backward { label.inverse() } else { label };
        }
        table[spec.relator] = Some(row);
    }
    let blank = vec![PieceLabel { gen: u16::MAX, piece: 0, inv: false }; ell];
    Ok(TableLabeling { table: table.into_iter().map(|r| r.unwrap_or_else(|| blank.clone())).collect() })
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub spec: FixtureSpec,
    pub ell: usize,
    pub d: Q,
    pub eps: Q,
    pub patch: PatchComplex,
    pub labeling: TableLabeling,
}

impl Fixture {
    pub fn cell(&self, name: &str) -> CellId {
        CellId(self.spec.cells.iter().position(|c| c == name).expect("cell name in fixture") as u32)
    }

    pub fn cell_name(&self, c: CellId) -> &str {
        &self.spec.cells[c.idx()]
    }
}

pub fn build_fixture(name: &str, ell: Option<usize>) -> Result<Fixture> {
    let spec = catalog().into_iter().find(|f| f.name == name).ok_or_else(|| Error::UnknownFixture(name.into()))?;
    let ell = ell.unwrap_or(spec.default_ell);
    let fail = |reason: String| Error::Fixture { name: name.into(), reason };
    if ell % 4 != 0 || ell % spec.ell_multiple != 0 || ell == 0 {
        return Err(fail(format!("ℓ = {ell} must be a multiple of {} and 4", spec.ell_multiple)));
    }
    let index = |n: &str| {
        spec.cells.iter().position(|c| c == n).map(|i| i as u32).ok_or_else(|| fail(format!("unknown cell {n}")))
    };
    let eval = |a: &Amount| a.eval(ell).map_err(|e| fail(e.to_string()));
    let cells = (0..spec.cells.len() as u32).map(|i| CellSpec::plain(i, i as usize)).collect();
    let mut gluings = Vec::new();
    for g in &spec.gluings {
        let length = eval(&g.length)?;
        if length <= 0 {
            return Err(fail(format!("gluing length {length} at ℓ = {ell}")));
        }
        gluings.push(Gluing {
            cell_a: index(&g.a)?,
            start_a: eval(&g.start_a)?.rem_euclid(ell as i64) as usize,
            cell_b: index(&g.b)?,
            start_b: eval(&g.start_b)?.rem_euclid(ell as i64) as usize,
            length: length as usize,
            reversed: g.reversed,
        });
    }
    let patch = PatchComplex::new(ell, cells, gluings).map_err(|e| fail(e.to_string()))?;
    let labeling = derived_labeling(&patch)?;
    Ok(Fixture { d: parse_q(&spec.d)?, eps: parse_q(&spec.eps)?, spec, ell, patch, labeling })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{cancellation, check_fulfilled};

    #[test]
    fn every_fixture_builds_and_is_fulfilled() {
        for spec in catalog() {
            let f = build_fixture(&spec.name, None).unwrap();
            assert!(check_fulfilled(&f.patch, &f.labeling).is_empty(), "{}", spec.name);
        }
    }

    #[test]
    fn incompatible_ell_is_rejected() {
        assert!(build_fixture("balancing2tile", Some(24)).is_err());
        assert!(matches!(build_fixture("nope", None), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn mp_example_numbers() {
        let f = build_fixture("mp_example", Some(20)).unwrap();
        assert_eq!(f.patch.gluings()[0].length, 8);
        assert_eq!(cancellation(&f.patch, &f.patch.whole()).unwrap(), 14);
    }
}
