//! The interferogram computed from sampled fields through the delay kernel
//! agrees with the closed-form cosine series.

use std::f64::consts::TAU;

use cinterf::modal::{apply_kernel, delay_kernel, field_interferogram, ModeTable};
use cinterf::rng::{stream, Purpose};
use cinterf::sensing::analytic_interferogram;
use cinterf::{ComplexModalField, ModeBasis, SampledGrid};
use num_complex::Complex64;
use rand::Rng;

fn random_field(basis: ModeBasis, index: u64) -> ComplexModalField {
    let mut rng = stream(2024, Purpose::Field, index);
    let n = basis.max_order();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..rng.random_range(1..=4) {
        let k = rng.random_range(0..n);
        coeffs[k] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    ComplexModalField::normalized(basis, coeffs).unwrap()
}

fn check_basis(basis: ModeBasis) {
    let grid = SampledGrid::default_for(&basis);
    let table = ModeTable::new(&basis, &grid);
    let mut rng = stream(2024, Purpose::Schedule, basis.max_order() as u64);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let f = random_field(basis, i);
        let x = f.spectrum();
        for _ in 0..32 {
            let alpha = rng.random_range(0.0..TAU);
            let got = table.field_interferogram(&f, alpha).unwrap();
            worst = worst.max((got - analytic_interferogram(&x, alpha)).abs());
        }
    }
    assert!(worst <= 1e-6, "{:?}: worst deviation {worst}", basis.kind());
}

#[test]
fn hermite_gauss_fields() {
    check_basis(ModeBasis::hermite_gauss(64).unwrap());
}

#[test]
fn laguerre_gauss_fields() {
    check_basis(ModeBasis::laguerre_gauss(64).unwrap());
}

#[test]
fn kernel_acts_as_eigenphase_multiplier() {
    let basis = ModeBasis::hermite_gauss(12).unwrap();
    let grid = SampledGrid::default_for(&basis);
    let table = ModeTable::new(&basis, &grid);
    let f = random_field(basis, 7);
    let alpha = 1.3;
    let kernel = delay_kernel(&basis, alpha, &grid);
    let delayed = apply_kernel(&kernel, &table.synthesize(f.coeffs()).unwrap(), &grid).unwrap();
    let coeffs = table.project(&delayed).unwrap();
    for (k, (got, c)) in coeffs.iter().zip(f.coeffs()).enumerate() {
        let want = c * Complex64::from_polar(1.0, (k + 1) as f64 * alpha);
        assert!((got - want).norm() < 1e-7, "mode {}: {got} vs {want}", k + 1);
    }
}

#[test]
fn free_function_matches_table() {
    let basis = ModeBasis::laguerre_gauss(8).unwrap();
    let grid = SampledGrid::default_for(&basis);
    let f = random_field(basis, 3);
    let a = field_interferogram(&f, 0.4, &grid).unwrap();
    let b = ModeTable::new(&basis, &grid).field_interferogram(&f, 0.4).unwrap();
    assert_eq!(a, b);
}
