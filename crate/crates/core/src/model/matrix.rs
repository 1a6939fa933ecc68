use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DependencyValue, Dimension, Identifier};
use crate::diag::Origin;

/// An interdimensional dependency grid. A cell (row, col) reads "a change in
/// the row QA affects the column QA".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyMatrix {
    pub id: Identifier,
    pub row_dimension: Dimension,
    pub col_dimension: Dimension,
    /// Row headers in grid order.
    pub rows: Vec<Identifier>,
    /// Column headers in grid order.
    pub cols: Vec<Identifier>,
    /// Non-blank cells only.
    pub cells: BTreeMap<(Identifier, Identifier), DependencyValue>,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("a dependency matrix must relate two different dimensions (got {0} x {0})")]
pub struct SameDimension(pub Dimension);

impl DependencyMatrix {
    pub fn new(id: Identifier, row_dimension: Dimension, col_dimension: Dimension) -> Result<Self, SameDimension> {
        if row_dimension == col_dimension {
            return Err(SameDimension(row_dimension));
        }
        Ok(Self {
            id,
            row_dimension,
            col_dimension,
            rows: Vec::new(),
            cols: Vec::new(),
            cells: BTreeMap::new(),
            origin: Origin::default(),
        })
    }

    /// Sets a cell, adding the row and column headers when missing.
    pub fn set(&mut self, row: Identifier, col: Identifier, value: DependencyValue) {
        if !self.rows.contains(&row) {
            self.rows.push(row.clone());
        }
        if !self.cols.contains(&col) {
            self.cols.push(col.clone());
        }
        self.cells.insert((row, col), value);
    }

    pub fn cell(&self, row: &str, col: &str) -> Option<DependencyValue> {
        // BTreeMap lookup needs owned keys; linear scan stays cheap at matrix sizes.
        self.cells
            .iter()
            .find(|((r, c), _)| r.as_str() == row && c.as_str() == col)
            .map(|(_, v)| *v)
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = (&Identifier, &Identifier, DependencyValue)> {
        self.cells.iter().map(|((r, c), v)| (r, c, *v))
    }
}

#[derive(Serialize, Deserialize)]
struct CellWire {
    row: Identifier,
    col: Identifier,
    value: DependencyValue,
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    id: Identifier,
    row_dimension: Dimension,
    col_dimension: Dimension,
    #[serde(default)]
    rows: Vec<Identifier>,
    #[serde(default)]
    cols: Vec<Identifier>,
    #[serde(default)]
    cells: Vec<CellWire>,
}

impl Serialize for DependencyMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixWire {
            id: self.id.clone(),
            row_dimension: self.row_dimension,
            col_dimension: self.col_dimension,
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            cells: self
                .iter_cells()
                .map(|(r, c, v)| CellWire {
                    row: r.clone(),
                    col: c.clone(),
                    value: v,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DependencyMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = MatrixWire::deserialize(d)?;
        let mut m = DependencyMatrix::new(w.id, w.row_dimension, w.col_dimension)
            .map_err(serde::de::Error::custom)?;
        m.rows = w.rows;
        m.cols = w.cols;
        for c in w.cells {
            m.set(c.row, c.col, c.value);
        }
        Ok(m)
    }
}
