//! Binary snapshot format.
//!
//! Layout (little-endian): magic `PNPCNS1\0`, `dim: u32`, `n: u32` per axis,
//! `t: f64`, then `rho`, each velocity component, `c+`, `c-`, `psi`, `Psi`
//! as row-major `f64` arrays. Domain length is not stored.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::real::Real;
use crate::state::State;

pub const MAGIC: &[u8; 8] = b"PNPCNS1\0";

pub fn write_snapshot<T: Real, W: Write>(state: &State<T>, mut out: W) -> Result<()> {
    let grid = state.grid();
    out.write_all(MAGIC)?;
    out.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for _ in 0..grid.dim() {
        out.write_all(&(grid.n() as u32).to_le_bytes())?;
    }
    out.write_all(&state.t.as_f64().to_le_bytes())?;
    let mut fields: Vec<&ScalarField<T>> = vec![&state.rho];
    fields.extend(state.u.components());
    fields.extend([&state.c_plus, &state.c_minus, &state.psi, &state.psi_cap]);
    let mut buf = Vec::with_capacity(8 * grid.cells());
    for f in fields {
        buf.clear();
        for v in f.values() {
            buf.extend_from_slice(&v.as_f64().to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    out.flush()?;
    Ok(())
}

fn read_u32(input: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    input.read_exact(&mut b).map_err(truncated)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(input: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    input.read_exact(&mut b).map_err(truncated)?;
    Ok(f64::from_le_bytes(b))
}

fn truncated(err: std::io::Error) -> Error {
    if err.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::BadSnapshot("truncated file".into())
    } else {
        Error::Io(err)
    }
}

/// Reads a snapshot on a domain of side `length`. The potential is trusted
/// as stored and the state is flagged consistent.
pub fn read_snapshot<T: Real, R: Read>(mut input: R, length: T) -> Result<State<T>> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MAGIC {
        return Err(Error::BadSnapshot("wrong magic bytes".into()));
    }
    let dim = read_u32(&mut input)? as usize;
    if !(1..=2).contains(&dim) {
        return Err(Error::BadSnapshot(format!("unsupported dimension {dim}")));
    }
    let ns: Vec<u32> = (0..dim).map(|_| read_u32(&mut input)).collect::<Result<_>>()?;
    if ns.iter().any(|&n| n != ns[0]) {
        return Err(Error::BadSnapshot("axes of unequal length".into()));
    }
    let grid = Grid::new(dim, ns[0] as usize, length).map_err(|e| Error::BadSnapshot(e.to_string()))?;
    let t = T::lit(read_f64(&mut input)?);
    let mut field = || -> Result<ScalarField<T>> {
        let mut bytes = vec![0u8; 8 * grid.cells()];
        input.read_exact(&mut bytes).map_err(truncated)?;
        let values = bytes
            .chunks_exact(8)
            .map(|c| T::lit(f64::from_le_bytes(c.try_into().expect("8 bytes"))))
            .collect();
        ScalarField::from_vec(grid, values)
    };
    let rho = field()?;
    let u = VectorField::from_components((0..dim).map(|_| field()).collect::<Result<_>>()?)?;
    let c_plus = field()?;
    let c_minus = field()?;
    let psi = field()?;
    let psi_cap = field()?;
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::BadSnapshot("trailing bytes".into()));
    }
    Ok(State { t, rho, u, c_plus, c_minus, psi, psi_cap, consistent: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(dim: usize) -> State<f64> {
        let g = Grid::<f64>::new(dim, 8, 2.0).unwrap();
        let mut s = State::rest(g);
        s.t = 0.37;
        s.rho = ScalarField::from_fn(g, |x| 1.0 + 0.1 * x[0] + 1e-17 * x[1]);
        s.c_plus = ScalarField::from_fn(g, |x| (x[0] * 3.0).sin().abs());
        s.psi = ScalarField::from_fn(g, |x| std::f64::consts::PI * x[0] - x[1]);
        s.u.comp_mut(dim - 1).values_mut()[3] = -2.5e-300;
        s
    }

    #[test]
    fn round_trip_is_bit_exact() {
        for dim in [1, 2] {
            let s = sample(dim);
            let mut buf = Vec::new();
            write_snapshot(&s, &mut buf).unwrap();
            assert_eq!(&buf[..8], MAGIC);
            let back: State<f64> = read_snapshot(buf.as_slice(), 2.0).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn layout_size() {
        let s = sample(2);
        let mut buf = Vec::new();
        write_snapshot(&s, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 4 + 8 + 8 + 7 * 64 * 8);
    }

    #[test]
    fn corrupt_input_rejected() {
        let mut buf = Vec::new();
        write_snapshot(&sample(1), &mut buf).unwrap();
        let mut wrong = buf.clone();
        wrong[0] = b'X';
        assert!(matches!(read_snapshot::<f64, _>(wrong.as_slice(), 1.0), Err(Error::BadSnapshot(_))));
        assert!(matches!(read_snapshot::<f64, _>(&buf[..buf.len() - 1], 1.0), Err(Error::BadSnapshot(_))));
        buf.push(0);
        assert!(matches!(read_snapshot::<f64, _>(buf.as_slice(), 1.0), Err(Error::BadSnapshot(_))));
    }
}
