//! Columnar text format for grid wavefunctions.
//!
//! ```text
//! # n_particles=1 dx=0.05 lo=-5 hi=5
//! i0,re,im
//! 0,1.2e-6,0
//! ...
//! ```
//!
//! One row per cell in row-major order; `lo`/`hi` list the configuration
//! axes comma-separated. Floats use shortest round-trip formatting.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::GridWavefunction;
use crate::error::{Error, Result};
use crate::lattice::SpatialGrid;

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

pub fn write_wavefunction<W: Write>(wf: &GridWavefunction, mut out: W) -> std::io::Result<()> {
    let g = wf.grid();
    writeln!(out, "# n_particles={} dx={} lo={} hi={}", wf.n_particles(), g.dx(), join(g.lo()), join(g.hi()))?;
    let cols: Vec<String> = (0..g.dim()).map(|a| format!("i{a}")).collect();
    writeln!(out, "{},re,im", cols.join(","))?;
    for (idx, a) in wf.amplitudes().iter().enumerate() {
        let cell = g.cell_from_linear(idx);
        for c in cell.coords() {
            write!(out, "{c},")?;
        }
        writeln!(out, "{},{}", a.re, a.im)?;
    }
    Ok(())
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad number {t:?}: {e}"))))
        .collect()
}

pub fn read_wavefunction<R: BufRead>(input: R) -> Result<GridWavefunction> {
    let mut lines = input.lines();
    let mut next = || -> Result<Option<String>> { lines.next().transpose().map_err(|e| Error::Parse(e.to_string())) };
    let header = next()?.ok_or_else(|| Error::Parse("empty wavefunction file".into()))?;
    let meta = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing '#' metadata header".into()))?;
    let (mut n, mut dx, mut lo, mut hi) = (None, None, None, None);
    for kv in meta.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("bad header field {kv:?}")))?;
        match k {
            "n_particles" => n = Some(v.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?),
            "dx" => dx = Some(v.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?),
            "lo" => lo = Some(parse_floats(v)?),
            "hi" => hi = Some(parse_floats(v)?),
            other => return Err(Error::Parse(format!("unknown header field {other:?}"))),
        }
    }
    let missing = |f: &str| Error::Parse(format!("header lacks {f}"));
    let grid = SpatialGrid::new(lo.ok_or_else(|| missing("lo"))?, hi.ok_or_else(|| missing("hi"))?, dx.ok_or_else(|| missing("dx"))?)?;
    let n = n.ok_or_else(|| missing("n_particles"))?;
    let _columns = next()?.ok_or_else(|| Error::Parse("missing column header".into()))?;
    let mut amps = vec![Complex64::new(0.0, 0.0); grid.num_cells()];
    let mut seen = 0usize;
    while let Some(line) = next()? {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != grid.dim() + 2 {
            return Err(Error::Parse(format!("row {seen}: expected {} columns", grid.dim() + 2)));
        }
        let coords = fields[..grid.dim()]
            .iter()
            .map(|t| t.trim().parse::<u32>().map_err(|e| Error::Parse(format!("row {seen}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        for (a, (&c, &cells)) in coords.iter().zip(grid.cells_per_axis()).enumerate() {
            if c as usize >= cells {
                return Err(Error::Parse(format!("row {seen}: index {c} out of range on axis {a}")));
            }
        }
        let v = parse_floats(&fields[grid.dim()..].join(","))?;
        amps[grid.linear_index(&crate::lattice::CellIndex(coords))] = Complex64::new(v[0], v[1]);
        seen += 1;
    }
    GridWavefunction::from_amplitudes(grid, n, amps)
}
