use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{GridDistribution, ParticleEnsemble};
use crate::error::{Error, Result};
use crate::kinetic::KineticParams;
use crate::timeseries::format_value;

/// Metadata written next to every snapshot as `<name>.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub time: f64,
    pub params: KineticParams,
    pub seed: Option<u64>,
}

fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn write_rows(path: &Path, header: [&str; 2], rows: impl Iterator<Item = (String, f64)>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(header)?;
    for (key, value) in rows {
        w.write_record([key, format_value(value)])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn write_sidecar(path: &Path, sidecar: &Sidecar) -> Result<()> {
    let path = sidecar_path(path);
    let mut file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::to_writer_pretty(&mut file, sidecar)?;
    writeln!(file).map_err(|e| Error::io(&path, e))
}

/// Writes `x,f` rows and the sidecar.
pub fn write_grid_csv(dist: &GridDistribution, path: impl AsRef<Path>, sidecar: &Sidecar) -> Result<()> {
    let path = path.as_ref();
    write_rows(
        path,
        ["x", "f"],
        dist.x_grid().iter().zip(dist.f_values()).map(|(x, f)| (format_value(*x), *f)),
    )?;
    write_sidecar(path, sidecar)
}

/// Writes `index,x` rows and the sidecar.
pub fn write_ensemble_csv(ens: &ParticleEnsemble, path: impl AsRef<Path>, sidecar: &Sidecar) -> Result<()> {
    let path = path.as_ref();
    write_rows(
        path,
        ["index", "x"],
        ens.positions().iter().enumerate().map(|(i, x)| (i.to_string(), *x)),
    )?;
    write_sidecar(path, sidecar)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridDistribution::lognormal(5.0, 0.2, 20.0, 64).unwrap();
        let side = Sidecar {
            time: 0.0,
            params: KineticParams::reference(),
            seed: None,
        };
        let path = dir.path().join("f.csv");
        write_grid_csv(&g, &path, &side).unwrap();
        let mut r = csv::Reader::from_path(&path).unwrap();
        let back: Vec<f64> = r.records().map(|rec| rec.unwrap()[1].parse().unwrap()).collect();
        assert_eq!(back, g.f_values());
        let s: Sidecar = serde_json::from_reader(File::open(dir.path().join("f.json")).unwrap()).unwrap();
        assert_eq!(s, side);
    }
}
