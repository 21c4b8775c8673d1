//! Binary trajectory checkpoints.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! offset  size        field
//! 0       8           magic "QFLOWTRJ"
//! 8       4   u32     format version (currently 1)
//! 12      4   u32     N, qubits per chain
//! 16      8   f64     J_SE
//! 24      8   f64     J_E
//! 32      8   u64     number of grid points P
//! 40      8*P f64     grid times
//! ...     P blocks, one per grid point, each holding the psi(+) amplitudes
//!         followed by the psi(-) amplitudes; every amplitude is (re, im)
//!         as two f64, 2^(2N+1) amplitudes per state
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::evolve::Trajectory;
use crate::hamiltonian::ModelParams;
use crate::qreg::{PureState, QubitLayout, C64};

pub const MAGIC: &[u8; 8] = b"QFLOWTRJ";
pub const VERSION: u32 = 1;

pub fn write_checkpoint(traj: &Trajectory, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(traj.params.layout.n_per_chain() as u32).to_le_bytes())?;
    w.write_all(&traj.params.j_se.to_le_bytes())?;
    w.write_all(&traj.params.j_e.to_le_bytes())?;
    w.write_all(&(traj.len() as u64).to_le_bytes())?;
    for t in &traj.times {
        w.write_all(&t.to_le_bytes())?;
    }
    for (p, m) in traj.states_plus.iter().zip(&traj.states_minus) {
        for a in p.amplitudes().iter().chain(m.amplitudes()) {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Trajectory> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::InvalidParams("not a trajectory checkpoint (bad magic)".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::InvalidParams(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    let n = read_u32(&mut r)? as usize;
    let j_se = read_f64(&mut r)?;
    let j_e = read_f64(&mut r)?;
    let points = read_u64(&mut r)? as usize;
    let params = ModelParams::new(QubitLayout::new(n)?, j_se, j_e)?;
    let times = (0..points).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?;
    let n_qubits = params.layout.total_qubits();
    let dim = params.layout.dimension();
    let read_state = |r: &mut BufReader<File>| -> Result<PureState> {
        let amps = (0..dim)
            .map(|_| Ok(C64::new(read_f64(r)?, read_f64(r)?)))
            .collect::<Result<Vec<_>>>()?;
        PureState::from_amplitudes(n_qubits, amps)
    };
    let mut states_plus = Vec::with_capacity(points);
    let mut states_minus = Vec::with_capacity(points);
    for _ in 0..points {
        states_plus.push(read_state(&mut r)?);
        states_minus.push(read_state(&mut r)?);
    }
    Ok(Trajectory {
        times,
        states_plus,
        states_minus,
        params,
    })
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
