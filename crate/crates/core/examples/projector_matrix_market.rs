// Builds a parallel-beam projector, writes it in Matrix Market format with
// a sinogram CSV and a phantom PGM, and reads all three back.

use std::error::Error;
use std::fs::File;
use std::io::{BufReader, BufWriter};

use wcfb::linalg::{read_matrix_market, write_matrix_market};
use wcfb::tomography::{
    build_projector, make_phantom, read_pgm, read_sinogram_csv, simulate_sinogram, write_pgm, write_sinogram_csv,
    PhantomKind, ScanGeometry,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = std::env::temp_dir().join(format!("wcfb-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;

    let geometry = ScanGeometry::new(vec![0.0, 50.0, 100.0, 150.0], 12)?;
    let a = build_projector(8, 8, &geometry)?;
    let mtx = dir.join("projector.mtx");
    write_matrix_market(&a, BufWriter::new(File::create(&mtx)?))?;
    let back = read_matrix_market(BufReader::new(File::open(&mtx)?))?;
    println!("{} -> {} nonzeros, identical: {}", mtx.display(), back.nnz(), back == a);

    let img = make_phantom(PhantomKind::Blob, 8, 8, 3)?;
    let pgm = dir.join("phantom.pgm");
    write_pgm(&img, BufWriter::new(File::create(&pgm)?))?;
    println!("{} roundtrip: {}", pgm.display(), read_pgm(File::open(&pgm)?)? == img);

    let sino = simulate_sinogram(&a, &img, 0.01, 1)?;
    let csv = dir.join("sinogram.csv");
    write_sinogram_csv(BufWriter::new(File::create(&csv)?), &sino.values, &geometry)?;
    let (values, g2) = read_sinogram_csv(BufReader::new(File::open(&csv)?))?;
    println!("{} roundtrip: {}", csv.display(), values == sino.values && g2 == geometry);

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
