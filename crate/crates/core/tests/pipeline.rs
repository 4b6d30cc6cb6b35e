use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use realfunm_core::funm::{funm, FunmConfig, Mode};
use realfunm_core::harness::{gen_instance, ExperimentSpec};
use realfunm_core::la::{matmul, CMatrix, MulCounter, C64};
use realfunm_core::scalarfun::catalog_get;
use realfunm_core::schur::unitarity_defect;
use realfunm_core::Error;

fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let mut q = CMatrix::from_fn(n, n, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    for j in 0..n {
        for k in 0..j {
            let dot: C64 = (0..n).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
            for i in 0..n {
                let v = q[(i, k)];
                q[(i, j)] -= dot * v;
            }
        }
        let nrm = (0..n).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            q[(i, j)] /= nrm;
        }
    }
    q
}

fn conj(u: &CMatrix, a: &CMatrix) -> CMatrix {
    let c = MulCounter::new();
    matmul(&matmul(u, a, &c).unwrap(), &u.adjoint(), &c).unwrap()
}

fn spec(n: usize, n_blocks: usize, func: &str, seed: u64) -> ExperimentSpec {
    ExperimentSpec { n, n_blocks, func: func.into(), seed, gen_digits: 48, ..ExperimentSpec::default() }
}

#[test]
fn dense_input_matches_rotated_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..3 {
        let inst = gen_instance(&spec(20, 3, "exp", 5), trial).unwrap();
        let u = random_unitary(20, &mut rng);
        assert!(unitarity_defect(&u) < 1e-13);
        let r = conj(&u, &inst.t);
        let f_ref = conj(&u, &inst.f_ref);
        let f = catalog_get("exp", 30).unwrap();
        let out = funm(&r, &f, &FunmConfig::default()).unwrap();
        let err = out.f.max_abs_diff(&f_ref);
        assert!(err < 1e-9, "trial {trial}: {err:e}");
        assert!(out.report.schur_residual < 1e-12);
    }
}

#[test]
fn result_commutes_with_input() {
    let inst = gen_instance(&spec(16, 3, "cos", 2), 0).unwrap();
    let u = random_unitary(16, &mut ChaCha8Rng::seed_from_u64(3));
    let r = conj(&u, &inst.t);
    let f = catalog_get("cos", 30).unwrap();
    let fr = funm(&r, &f, &FunmConfig::default()).unwrap().f;
    let c = MulCounter::new();
    let lhs = matmul(&r, &fr, &c).unwrap();
    let rhs = matmul(&fr, &r, &c).unwrap();
    assert!(lhs.max_abs_diff(&rhs) < 1e-10 * lhs.norms().max_abs);
}

#[test]
fn exp_of_negation_inverts() {
    let inst = gen_instance(&spec(12, 2, "exp", 9), 1).unwrap();
    let f = catalog_get("exp", 30).unwrap();
    let cfg = FunmConfig::default();
    let a = funm(&inst.t, &f, &cfg).unwrap().f;
    let b = funm(&inst.t.scale(C64::new(-1.0, 0.0)), &f, &cfg).unwrap().f;
    let prod = matmul(&a, &b, &MulCounter::new()).unwrap();
    assert!(prod.max_abs_diff(&CMatrix::identity(12)) < 1e-10);
}

#[test]
fn function_aliases_agree() {
    let inst = gen_instance(&spec(10, 2, "exp", 4), 0).unwrap();
    let cfg = FunmConfig::default();
    let e = funm(&inst.t, &catalog_get("exp", 30).unwrap(), &cfg).unwrap().f;
    let e1 = funm(&inst.t, &catalog_get("exp_t:1", 30).unwrap(), &cfg).unwrap().f;
    assert!(e.max_abs_diff(&e1) < 1e-14);
    let id = funm(&inst.t, &catalog_get("identity", 30).unwrap(), &cfg).unwrap().f;
    assert!(id.max_abs_diff(&inst.t) < 1e-13);
}

#[test]
fn double_block_mode_agrees_on_dense_input() {
    let inst = gen_instance(&spec(14, 3, "sin", 8), 0).unwrap();
    let u = random_unitary(14, &mut ChaCha8Rng::seed_from_u64(8));
    let r = conj(&u, &inst.t);
    let f = catalog_get("sin", 30).unwrap();
    let a = funm(&r, &f, &FunmConfig::default()).unwrap().f;
    let b = funm(&r, &f, &FunmConfig { mode: Mode::DoubleBlock, ..FunmConfig::default() }).unwrap().f;
    assert!(a.max_abs_diff(&b) < 1e-9);
}

#[test]
fn complex_spectrum_is_rejected() {
    let r = CMatrix::from_real(2, 2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
    let f = catalog_get("exp", 30).unwrap();
    assert!(matches!(funm(&r, &f, &FunmConfig::default()), Err(Error::RealSpectrumViolation { .. })));
}
