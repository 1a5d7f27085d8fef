use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use clap::Args;
use spinboson::entangle::{concurrence_profile_with, linspace};
use spinboson::gsi::{certify_sequential_gsi, ground_energy, gsi_sequence, phase_diagram_with, Condition, ScanLimits};
use spinboson::model::block_ground_energy;
use spinboson::tables::{run_table_with, TableId};
use spinboson::{CouplingAxis, CouplingScan, Excitation, Execution, ModelParams};

use crate::output::{Sheet, Value};

/// A `lo:hi:steps` grid; `steps` counts points, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Grid {
    pub fn single(x: f64) -> Self {
        Grid { lo: x, hi: x, steps: 1 }
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.steps)
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(format!("expected lo:hi:steps, got '{s}'"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
        let (lo, hi) = (num(lo)?, num(hi)?);
        let steps: usize = steps.trim().parse().map_err(|e| format!("'{steps}': {e}"))?;
        if !(lo.is_finite() && hi.is_finite()) {
            return Err("grid ends must be finite".into());
        }
        if steps == 0 {
            return Err("a grid needs at least one point".into());
        }
        if hi < lo {
            return Err(format!("grid runs backwards: {lo} > {hi}"));
        }
        if steps == 1 && hi != lo {
            return Err("a one-point grid needs lo == hi".into());
        }
        Ok(Grid { lo, hi, steps })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableChoice {
    All,
    One(TableId),
}

impl FromStr for TableChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(TableChoice::All);
        }
        s.parse::<TableId>().map(TableChoice::One).map_err(|e| e.to_string())
    }
}

/// Model selection. Giving `--rb` switches to two modes; `--kappa-b` then
/// holds the second coupling fixed while the first is scanned, otherwise
/// both couplings move together.
#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 2)]
    pub n_spins: u32,
    /// Detuning of the (first) mode.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "ra")]
    pub r: Option<f64>,
    /// Detuning of the first mode in the two-mode model.
    #[arg(long, allow_negative_numbers = true)]
    pub ra: Option<f64>,
    /// Detuning of the second mode.
    #[arg(long, allow_negative_numbers = true)]
    pub rb: Option<f64>,
    /// Coupling, when evaluating a single point.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Fixed coupling of the second mode.
    #[arg(long)]
    pub kappa_b: Option<f64>,
}

impl ModelArgs {
    pub fn scan(&self) -> Result<CouplingScan> {
        if self.ra.is_some() && self.rb.is_none() {
            bail!("--ra needs a second mode (--rb); use --r for one mode");
        }
        let r = self.r.or(self.ra).unwrap_or(0.0);
        let scan = match (self.rb, self.kappa_b) {
            (None, Some(_)) => bail!("--kappa-b needs a second mode (--rb)"),
            (None, None) => CouplingScan::common(ModelParams::single_mode(self.n_spins, r, 0.0)?),
            (Some(rb), None) => CouplingScan::common(ModelParams::two_mode(self.n_spins, r, 0.0, rb, 0.0)?),
            (Some(rb), Some(kb)) => {
                CouplingScan::new(ModelParams::two_mode(self.n_spins, r, 0.0, rb, kb)?, CouplingAxis::First)?
            }
        };
        Ok(scan)
    }

    fn grid(&self, range: Option<&Grid>, default: Grid) -> Grid {
        match (range, self.kappa) {
            (Some(g), _) => *g,
            (None, Some(k)) => Grid::single(k),
            (None, None) => default,
        }
    }
}

pub struct Outcome {
    pub sheet: Sheet,
    /// Set when the run itself reports a failed check.
    pub failure: Option<String>,
}

impl From<Sheet> for Outcome {
    fn from(sheet: Sheet) -> Self {
        Outcome { sheet, failure: None }
    }
}

fn lambda_value(l: Excitation) -> Value {
    Value::Text(l.to_string())
}

pub fn spectrum(exec: Execution, model: &ModelArgs, range: Option<&Grid>, lambda_max: Excitation) -> Result<Outcome> {
    let scan = model.scan()?;
    let kappas = model.grid(range, Grid { lo: 0.0, hi: 3.0, steps: 61 }).points();
    let lowest = scan.base.lowest_excitation();
    check_lambda(&scan, lambda_max)?;
    let per_kappa = exec.try_map(&kappas, |&k| -> spinboson::Result<_> {
        let p = scan.at(k);
        let (star, _) = ground_energy(&p, ScanLimits::for_model(&p))?;
        let mut energies = Vec::new();
        let mut l = lowest;
        while l <= lambda_max {
            energies.push((l, block_ground_energy(&p, l)?));
            l = l.next();
        }
        Ok((star, energies))
    })?;
    let mut sheet = Sheet::new(["kappa", "lambda", "energy", "ground"]);
    for (&k, (star, energies)) in kappas.iter().zip(per_kappa) {
        for (l, e) in energies {
            sheet.push(vec![k.into(), lambda_value(l), e.into(), (l == star).into()]);
        }
    }
    Ok(sheet.into())
}

fn check_lambda(scan: &CouplingScan, lambda_max: Excitation) -> Result<()> {
    let lowest = scan.base.lowest_excitation();
    if lambda_max < lowest || lambda_max.steps_above_lowest(scan.base.n_spins).is_none() {
        bail!("--lambda-max {lambda_max} is not an excitation number of {} spins", scan.base.n_spins);
    }
    Ok(())
}

pub fn gsi(model: &ModelArgs, lambda_max: Excitation) -> Result<Outcome> {
    let scan = model.scan()?;
    check_lambda(&scan, lambda_max)?;
    let mut sheet = Sheet::new(["lambda_from", "lambda_to", "kappa_tilde", "residual"]);
    for c in gsi_sequence(&scan, lambda_max)? {
        sheet.push(vec![lambda_value(c.lambda_from), lambda_value(c.lambda_to), c.kappa_tilde.into(), c.residual.into()]);
    }
    Ok(sheet.into())
}

pub fn concurrence(exec: Execution, model: &ModelArgs, range: Option<&Grid>) -> Result<Outcome> {
    let scan = model.scan()?;
    let g = model.grid(range, Grid { lo: 0.0, hi: 4.0, steps: 401 });
    let kappas = g.points();
    let (samples, profile) = if kappas.len() >= 2 {
        (kappas.len(), Some(concurrence_profile_with(exec, &scan, g.lo, g.hi, g.steps)?))
    } else {
        (1, None)
    };
    let mut sheet = Sheet::new(["kappa", "lambda_star", "energy", "concurrence", "marker"]);
    match profile {
        Some(p) => {
            for i in 0..samples {
                let k = p.kappa_samples[i];
                let prev = if i == 0 { f64::NEG_INFINITY } else { p.kappa_samples[i - 1] };
                let marker = if p.kink_markers.contains(&k) {
                    "kink"
                } else if p.gsi_markers.iter().any(|&m| m > prev && m <= k) {
                    "gsi"
                } else {
                    ""
                };
                sheet.push(vec![
                    k.into(),
                    lambda_value(p.lambda_star[i]),
                    p.energies[i].into(),
                    p.c_values[i].into(),
                    marker.into(),
                ]);
            }
        }
        None => {
            let k = kappas[0];
            let sol = spinboson::gsi::ground_state_at(&scan.at(k))?;
            let c = spinboson::entangle::pairwise_concurrence(&sol)?;
            sheet.push(vec![k.into(), lambda_value(sol.lambda_star), sol.energy.into(), c.into(), "".into()]);
        }
    }
    Ok(sheet.into())
}

pub fn phase_diagram(exec: Execution, n_spins: u32, range: &Grid, lambda_max: Excitation) -> Result<Outcome> {
    let lowest = Excitation::lowest(n_spins);
    let count = lambda_max
        .steps_above_lowest(n_spins)
        .ok_or_else(|| anyhow!("--lambda-max {lambda_max} is not an excitation number of {n_spins} spins"))?;
    let mut columns = vec!["r".to_string()];
    columns.extend((0..=count as i32).map(|i| format!("kappa_{}", lowest.offset(i))));
    let mut sheet = Sheet::new(columns);
    for col in phase_diagram_with(exec, n_spins, &range.points(), lambda_max)? {
        let mut row = vec![Value::from(col.detuning)];
        row.extend(col.crossings.iter().map(|c| Value::from(c.kappa_tilde)));
        sheet.push(row);
    }
    Ok(sheet.into())
}

pub fn table(exec: Execution, choice: &TableChoice) -> Result<Outcome> {
    let ids: Vec<TableId> = match choice {
        TableChoice::All => TableId::ALL.to_vec(),
        TableChoice::One(id) => vec![*id],
    };
    let mut sheet = Sheet::new(["table", "row", "column", "lambda", "computed", "reference", "diff", "tolerance", "pass"]);
    let mut failed = Vec::new();
    for id in ids {
        let rep = run_table_with(exec, id)?;
        for c in &rep.cells {
            if !c.passed {
                failed.push(format!("table {id} {}={} {}", id.row_name(), c.row, c.column));
            }
            sheet.push(vec![
                Value::Int(i64::from(id.number())),
                c.row.into(),
                c.column.into(),
                lambda_value(c.lambda),
                c.computed.into(),
                c.reference.into(),
                c.diff.into(),
                rep.tolerance.into(),
                c.passed.into(),
            ]);
        }
    }
    let failure = (!failed.is_empty())
        .then(|| format!("{} cell(s) outside tolerance: {}", failed.len(), failed.join(", ")));
    Ok(Outcome { sheet, failure })
}

fn condition_name(c: Condition) -> &'static str {
    match c {
        Condition::MonotoneEnergy => "monotone_energy",
        Condition::SingleCrossing => "single_crossing",
        Condition::NextBlockAbove => "next_block_above",
        Condition::IncreasingCrossings => "increasing_crossings",
    }
}

pub fn certify(exec: Execution, r: Option<f64>, range: Option<&Grid>, lambda_max: i32) -> Result<Outcome> {
    let rs = match (r, range) {
        (_, Some(g)) => g.points(),
        (Some(r), None) => vec![r],
        (None, None) => vec![0.0],
    };
    let reports = exec.try_map(&rs, |&r| certify_sequential_gsi(r, lambda_max))?;
    let mut sheet = Sheet::new(["r", "condition", "lambda", "passed", "witness"]);
    let mut failures = 0;
    for rep in &reports {
        for e in &rep.entries {
            failures += usize::from(!e.passed);
            sheet.push(vec![
                rep.detuning.into(),
                condition_name(e.condition).into(),
                Value::Int(i64::from(e.lambda)),
                e.passed.into(),
                e.witness.into(),
            ]);
        }
    }
    let failure = (failures > 0).then(|| format!("{failures} certification check(s) failed"));
    Ok(Outcome { sheet, failure })
}
