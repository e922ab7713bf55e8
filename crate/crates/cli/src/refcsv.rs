//! Parser for user-supplied reference spectra.
//!
//! Format: UTF-8, one header line `width,level,energy_ref,source`, then one
//! row per reference energy. `width` and `energy_ref` are positive decimal
//! literals in the active unit system, `level` is a positive integer, and
//! `source` is free text (everything after the third comma, so it may itself
//! contain commas). CRLF line endings are tolerated. Errors carry the
//! offending line number.

use gpsne_core::box_model::{ReferenceRow, ReferenceTable};
use std::fs;
use std::path::Path;

pub const HEADER: &str = "width,level,energy_ref,source";

pub fn parse_reference(path: &Path) -> Result<ReferenceTable, String> {
    let name = path.display();
    let bytes = fs::read(path).map_err(|e| format!("cannot read {name}: {e}"))?;
    let text = String::from_utf8(bytes).map_err(|_| format!("{name}: not valid UTF-8"))?;

    let mut rows: Vec<ReferenceRow> = Vec::new();
    let mut row_lines: Vec<usize> = Vec::new();
    let mut saw_header = false;

    for (idx, raw) in text.split('\n').enumerate() {
        let lineno = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if !saw_header {
            if line != HEADER {
                return Err(format!("{name}:{lineno}: header must be exactly `{HEADER}`"));
            }
            saw_header = true;
            continue;
        }
        if line.is_empty() {
            continue;
        }

        let mut fields = line.splitn(4, ',');
        let width_s = fields.next().unwrap_or("");
        let level_s = fields.next();
        let energy_s = fields.next();
        let source = fields.next();
        let (Some(level_s), Some(energy_s), Some(source)) = (level_s, energy_s, source) else {
            return Err(format!("{name}:{lineno}: expected 4 fields `{HEADER}`, got fewer"));
        };

        let width: f64 = width_s
            .trim()
            .parse()
            .map_err(|_| format!("{name}:{lineno}: width `{width_s}` is not a number"))?;
        if !width.is_finite() || width <= 0.0 {
            return Err(format!("{name}:{lineno}: width must be positive, got {width_s}"));
        }
        let level: u32 = level_s
            .trim()
            .parse()
            .map_err(|_| format!("{name}:{lineno}: level `{level_s}` is not a positive integer"))?;
        if level == 0 {
            return Err(format!("{name}:{lineno}: level must be at least 1"));
        }
        let energy_ref: f64 = energy_s
            .trim()
            .parse()
            .map_err(|_| format!("{name}:{lineno}: energy_ref `{energy_s}` is not a number"))?;
        if !energy_ref.is_finite() || energy_ref <= 0.0 {
            return Err(format!("{name}:{lineno}: energy_ref must be positive, got {energy_s}"));
        }

        // duplicate keys get both line numbers; widths within 1e-9 relative
        // count as the same key, matching the lookup tolerance
        for (prev, &prev_line) in rows.iter().zip(&row_lines) {
            if prev.level == level
                && (prev.width - width).abs() <= 1e-9 * prev.width.abs().max(width.abs())
            {
                return Err(format!(
                    "{name}:{lineno}: duplicate (width, level) key, first seen on line {prev_line}"
                ));
            }
        }

        rows.push(ReferenceRow { width, level, energy_ref, source: source.trim().to_string() });
        row_lines.push(lineno);
    }

    if !saw_header {
        return Err(format!("{name}:1: file is empty; header `{HEADER}` required"));
    }

    ReferenceTable::new(rows).map_err(|e| format!("{name}: {e}"))
}
