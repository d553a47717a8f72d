//! Binary storage of spectral fields.
//!
//! Layout (little endian): the 8-byte magic `DLFIELD1`, `n` as `u64`, the
//! box length as `f64`, then the three components one after another, each
//! as `n³` pairs `(re, im)` of `f64` in row-major order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;

pub const MAGIC: &[u8; 8] = b"DLFIELD1";

pub fn write_field(u: &SpectralField, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let grid = u.grid();
    let mut put = |bytes: &[u8]| w.write_all(bytes).map_err(|e| Error::io(path, e));
    put(MAGIC)?;
    put(&(grid.n as u64).to_le_bytes())?;
    put(&grid.box_length.to_le_bytes())?;
    for comp in u.components() {
        for z in comp {
            put(&z.re.to_le_bytes())?;
            put(&z.im.to_le_bytes())?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_field(path: &Path) -> Result<SpectralField> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut word = [0u8; 8];
    let mut next = |r: &mut BufReader<File>| -> Result<[u8; 8]> {
        r.read_exact(&mut word).map_err(|e| Error::io(path, e))?;
        Ok(word)
    };
    if &next(&mut r)? != MAGIC {
        return Err(Error::Domain(format!(
            "{} is not a field file",
            path.display()
        )));
    }
    let n = u64::from_le_bytes(next(&mut r)?);
    let box_length = f64::from_le_bytes(next(&mut r)?);
    let n = usize::try_from(n)
        .ok()
        .filter(|&n| n <= 1 << 12)
        .ok_or_else(|| Error::Grid(format!("unreasonable grid size {n} in {}", path.display())))?;
    let grid = Grid::new(n, box_length)?;
    let mut comps: [Vec<Complex64>; 3] = Default::default();
    for comp in &mut comps {
        comp.reserve_exact(grid.len());
        for _ in 0..grid.len() {
            let re = f64::from_le_bytes(next(&mut r)?);
            let im = f64::from_le_bytes(next(&mut r)?);
            comp.push(Complex64::new(re, im));
        }
    }
    SpectralField::from_components(grid, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::synthesize_with_character;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.field");
        let u = synthesize_with_character(0.25, Grid::new(8, 7.0).unwrap(), 4, 0.3).unwrap();
        write_field(&u, &path).unwrap();
        assert_eq!(read_field(&path).unwrap(), u);
    }

    #[test]
    fn rejects_foreign_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk");
        std::fs::write(&path, b"not a field at all").unwrap();
        assert!(matches!(read_field(&path), Err(Error::Domain(_))));
        assert!(matches!(
            read_field(&dir.path().join("missing")),
            Err(Error::Io { .. })
        ));
    }
}
