//! Published reference tables and their recomputation.
//!
//! Concurrence columns C_i are per-region maxima. Column C_i belongs to the
//! region of block λ = -N/2 + 1 + i, the first block above the lowest one
//! being C_0. Critical-coupling columns hold κ̃_λ for λ = -1, 0, 1, 2.

use std::fmt;
use std::str::FromStr;

use crate::entangle::region_max_concurrence_with;
use crate::error::{domain, Error, Result};
use crate::gsi::find_critical_coupling;
use crate::model::{CouplingScan, Excitation, ModelParams};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TableId {
    /// Two spins, one mode: concurrence maxima against r.
    I,
    /// Three spins, one mode: pairwise concurrence maxima against r.
    II,
    /// Two spins, two modes with κ_a = κ_b, r_a = 0: critical couplings against r_b.
    III,
    /// As III, concurrence maxima.
    IV,
    /// Two spins, two modes with κ_a = κ_b, r_a = 1.2: concurrence maxima against r_b.
    V,
}

impl TableId {
    pub const ALL: [TableId; 5] = [TableId::I, TableId::II, TableId::III, TableId::IV, TableId::V];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1..=5 => Ok(Self::ALL[usize::from(n - 1)]),
            _ => Err(domain(format!("no table {n}; tables are numbered 1 to 5"))),
        }
    }

    /// Largest accepted |computed - reference| per cell.
    pub fn tolerance(self) -> f64 {
        match self {
            TableId::I | TableId::III => 1e-3,
            TableId::II | TableId::IV | TableId::V => 2e-3,
        }
    }

    pub fn row_name(self) -> &'static str {
        match self {
            TableId::I | TableId::II => "r",
            TableId::III | TableId::IV | TableId::V => "r_b",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            TableId::I | TableId::IV | TableId::V => &["C0", "C1", "C2"],
            TableId::II => &["C0", "C1", "C2", "C3", "C4"],
            TableId::III => &["kappa_-1", "kappa_0", "kappa_1", "kappa_2"],
        }
    }

    /// Rows as (row parameter, column values).
    #[allow(clippy::approx_constant)] // published four-digit values
    pub fn reference(self) -> &'static [(f64, &'static [f64])] {
        match self {
            TableId::I => &[
                (-0.9, &[0.0977, 0.0425, 0.0327]),
                (-0.5, &[0.3613, 0.0626, 0.0273]),
                (0.0, &[0.5, 0.0286, 0.0101]),
                (0.5, &[0.5691, 0.0124, 0.0040]),
                (1.0, &[0.6667, 0.0035, 0.0008]),
                (1.2, &[0.6875, 0.0010, 0.0]),
                (1.3, &[0.6970, 0.0, 0.0]),
            ],
            TableId::II => &[
                (6.0, &[0.5833, 0.2944, 0.0029, 0.0007, 0.0002]),
                (7.2, &[0.5942, 0.3126, 0.0017, 0.0002, 0.0]),
                (8.0, &[0.6, 0.3233, 0.0011, 0.0, 0.0]),
                (10.0, &[0.6111, 0.3460, 0.0, 0.0, 0.0]),
            ],
            TableId::III => &[
                (0.0, &[0.7071, 0.9660, 1.4029, 1.7260]),
                (-0.9, &[0.2132, 0.2248, 0.2371, 0.2498]),
                (-0.1, &[0.4867, 0.6586, 0.9425, 1.1569]),
                (0.1, &[0.5118, 0.7043, 1.0354, 1.2758]),
                (1.0, &[0.5774, 0.8158, 1.2518, 1.5477]),
                (10.0, &[0.6770, 0.9393, 1.3910, 1.7197]),
                (100.0, &[0.7036, 0.9630, 1.4012, 1.7247]),
            ],
            TableId::IV => &[
                (0.0, &[0.5, 0.0286, 0.0101]),
                (-0.9, &[0.1074, 0.0508, 0.0394]),
                (-0.1, &[0.4898, 0.0324, 0.0114]),
                (1.0, &[0.5455, 0.0211, 0.0075]),
                (1.8, &[0.5462, 0.0226, 0.0084]),
                (5.0, &[0.5381, 0.0316, 0.0135]),
                (10.0, &[0.5253, 0.0348, 0.0161]),
            ],
            TableId::V => &[
                (1.0, &[0.6764, 0.0023, 0.0004]),
                (1.1, &[0.6823, 0.0016, 0.0002]),
                (1.3, &[0.6921, 0.0005, 0.0]),
                (1.5, &[0.6998, 0.0, 0.0]),
                (100.0, &[0.6920, 0.0043, 0.0035]),
                (10000.0, &[0.6875, 0.0011, 0.0]),
            ],
        }
    }

    /// Model behind one row. In tables III and IV the r_b = 0 row is the
    /// single-mode model at resonance.
    pub fn row_model(self, row: f64) -> Result<ModelParams> {
        match self {
            TableId::I => ModelParams::single_mode(2, row, 0.0),
            TableId::II => ModelParams::single_mode(3, row, 0.0),
            TableId::III | TableId::IV if row == 0.0 => ModelParams::single_mode(2, 0.0, 0.0),
            TableId::III | TableId::IV => ModelParams::two_mode(2, 0.0, 0.0, row, 0.0),
            TableId::V => ModelParams::two_mode(2, 1.2, 0.0, row, 0.0),
        }
    }

    /// Excitation block behind column `col`.
    pub fn column_lambda(self, n_spins: u32, col: usize) -> Excitation {
        match self {
            TableId::III => Excitation::integer(col as i32 - 1),
            _ => Excitation::lowest(n_spins).offset(col as i32 + 1),
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = match s.trim().to_ascii_uppercase().as_str() {
            "I" => 1,
            "II" => 2,
            "III" => 3,
            "IV" => 4,
            "V" => 5,
            other => other.parse().map_err(|_| domain(format!("unknown table '{s}'")))?,
        };
        Self::from_number(n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub row: f64,
    pub column: &'static str,
    pub lambda: Excitation,
    pub computed: f64,
    pub reference: f64,
    pub diff: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableReport {
    pub id: TableId,
    pub tolerance: f64,
    /// Row-major, in reference order.
    pub cells: Vec<CellResult>,
}

impl TableReport {
    pub fn all_passed(&self) -> bool {
        self.cells.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(|c| !c.passed)
    }
}

pub fn compute_cell(id: TableId, row: f64, col: usize) -> Result<f64> {
    let params = id.row_model(row)?;
    let scan = CouplingScan::common(params);
    let lambda = id.column_lambda(params.n_spins, col);
    match id {
        TableId::III => Ok(find_critical_coupling(&scan, lambda)?.kappa_tilde),
        _ => Ok(region_max_concurrence_with(Execution::Sequential, &scan, lambda)?.value),
    }
}

pub fn run_table(id: TableId) -> Result<TableReport> {
    run_table_with(Execution::default(), id)
}

pub fn run_table_with(exec: Execution, id: TableId) -> Result<TableReport> {
    let tolerance = id.tolerance();
    let jobs: Vec<(f64, usize, f64)> = id
        .reference()
        .iter()
        .flat_map(|&(row, vals)| vals.iter().enumerate().map(move |(c, &v)| (row, c, v)))
        .collect();
    let cells = exec.try_map(&jobs, |&(row, col, reference)| {
        let column = id.columns()[col];
        let computed = compute_cell(id, row, col).map_err(|e| Error::Cell {
            table: id.to_string(),
            row: row.to_string(),
            column: column.to_string(),
            source: Box::new(e),
        })?;
        let diff = (computed - reference).abs();
        let n = id.row_model(row)?.n_spins;
        Ok(CellResult {
            row,
            column,
            lambda: id.column_lambda(n, col),
            computed,
            reference,
            diff,
            passed: diff <= tolerance,
        })
    })?;
    Ok(TableReport { id, tolerance, cells })
}
