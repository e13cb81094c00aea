//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use imaginarity::channels::{
    self, apply, dilation_from_kraus, is_completely_rng, is_free_unitary, is_rng, kraus_from_choi,
    rng_oracle, rng_witness_channel, sample_channel, sample_real_choi_channel, sample_rng_channel,
    Channel,
};
use imaginarity::io::{MatrixFile, MatrixKind};
use imaginarity::linalg::{self, ComplexMatrix, Tolerance};
use imaginarity::measures::{measure_m, measure_m_qubit, robustness};
use imaginarity::random::{
    haar_orthogonal, haar_unitary, random_density, random_ket, random_real_density, seeded,
};
use imaginarity::states::{
    bloch_of_qubit, canonical_pure_form, half_diagonal_form, is_free_state, qubit_of_bloch,
    BlochVector, DensityMatrix, PureState,
};
use imaginarity::transforms::{mixture_error, synthesize, synthesize_to_mixed, transform_exists};
use num_complex::Complex64;
use rand::Rng;

const TOL: Tolerance = Tolerance {
    atol: 1e-9,
    eig_floor: 1e-9,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn plus_i() -> PureState {
    PureState::from_slice(&[c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)], TOL).unwrap()
}

fn random_pure<R: Rng>(d: usize, rng: &mut R) -> PureState {
    PureState::normalized(random_ket(d, rng)).unwrap()
}

fn tol_with(atol: f64) -> Tolerance {
    Tolerance::uniform(atol).unwrap()
}

// 1. is_rng agrees with the brute-force oracle.
fn criterion_1() -> Outcome {
    let tol = tol_with(1e-8);
    let mut rng = seeded(101);
    let (mut total, mut free, mut nonfree) = (0usize, 0usize, 0usize);
    for i in 0..1000u64 {
        let d = 2 + (i % 2) as usize;
        let seed = 10_000 + i;
        let ch = match i % 5 {
            0 => sample_real_choi_channel(d, seed),
            1 => sample_channel(d, seed),
            2 => sample_rng_channel(d, seed),
            3 => {
                let a = sample_rng_channel(d, seed).unwrap();
                let b = sample_real_choi_channel(d, seed + 1).unwrap();
                let p: f64 = rng.random();
                Channel::mixture(&[(p, &a), (1.0 - p, &b)], TOL)
            }
            _ => {
                let a = sample_real_choi_channel(d, seed).unwrap();
                let b = sample_channel(d, seed + 1).unwrap();
                let p: f64 = rng.random_range(0.05..0.95);
                Channel::mixture(&[(p, &a), (1.0 - p, &b)], TOL)
            }
        }
        .map_err(|e| format!("sampler {i}: {e}"))?;
        let fast = is_rng(&ch, tol);
        let oracle = rng_oracle(&ch, tol);
        check(fast == oracle, || {
            format!("channel {i}: is_rng={fast}, oracle={oracle}")
        })?;
        total += 1;
        if fast {
            free += 1;
        } else {
            nonfree += 1;
        }
    }
    check(free > 0 && nonfree > 0, || {
        format!("population not mixed: {free} free, {nonfree} non-free")
    })?;
    Ok(format!(
        "{total} channels agree ({free} RNG, {nonfree} resource generating)"
    ))
}

// 2. Real Choi, real Kraus, real dilation and tensor-extension freeness coincide.
fn criterion_2() -> Outcome {
    let mut rng = seeded(202);
    let mut worst_kraus = 0.0f64;
    let mut worst_dilation = 0.0f64;
    let mut worst_ext = 0.0f64;
    for i in 0..200u64 {
        let d = 2 + (i % 2) as usize;
        let ch = sample_real_choi_channel(d, 20_000 + i).map_err(|e| e.to_string())?;
        check(is_completely_rng(&ch, TOL), || {
            format!("real sample {i} has complex Choi")
        })?;
        let ks = kraus_from_choi(&ch, TOL).map_err(|e| e.to_string())?;
        worst_kraus = worst_kraus.max(ks.max_imag());
        let dil = dilation_from_kraus(&ks, TOL).map_err(|e| e.to_string())?;
        let rho = random_density(d, &mut rng);
        let via_dilation = dil.apply(&rho).map_err(|e| e.to_string())?;
        let direct = channels::apply_to_operator(&ch, &rho).map_err(|e| e.to_string())?;
        worst_dilation = worst_dilation
            .max(linalg::max_abs_diff(&via_dilation, &direct))
            .max(dil.orthogonality_error());
        for k in [2usize, 3] {
            let ext = ch.tensor_identity(k, TOL).map_err(|e| e.to_string())?;
            let sigma = DensityMatrix::new(random_real_density(d * k, &mut rng), TOL).unwrap();
            let out = apply(&ext, &sigma).map_err(|e| e.to_string())?;
            worst_ext = worst_ext.max(linalg::max_abs_imag(out.mat()));
        }
    }
    check(worst_kraus <= 1e-8, || {
        format!("Kraus imaginary part {worst_kraus:.3e} > 1e-8")
    })?;
    check(worst_dilation <= 1e-9, || {
        format!("dilation error {worst_dilation:.3e} > 1e-9")
    })?;
    check(worst_ext <= 1e-9, || {
        format!("extended output imaginary part {worst_ext:.3e}")
    })?;

    let mut rng_not_real = 0usize;
    for i in 0..200u64 {
        let d = 2 + (i % 2) as usize;
        let ch = if i % 2 == 0 {
            sample_channel(d, 30_000 + i)
        } else {
            sample_rng_channel(d, 30_000 + i)
        }
        .map_err(|e| e.to_string())?;
        check(!is_completely_rng(&ch, TOL), || {
            format!("non-real sample {i} passed the real-Choi test")
        })?;
        if is_rng(&ch, TOL) {
            rng_not_real += 1;
        }
    }

    let w = rng_witness_channel();
    let validated =
        Channel::new(w.choi().clone(), 2, 2, TOL).map_err(|e| format!("witness not CPTP: {e}"))?;
    check(is_rng(&validated, TOL), || "witness fails is_rng".into())?;
    check(!is_completely_rng(&validated, TOL), || {
        "witness passes is_completely_rng".into()
    })?;
    Ok(format!(
        "kraus imag {worst_kraus:.1e}, dilation {worst_dilation:.1e}, extension imag {worst_ext:.1e}; \
         200 non-real rejected ({rng_not_real} RNG-only); witness confirmed"
    ))
}

// 3. Free unitaries are recognised and factorised; Haar unitaries are not.
fn criterion_3() -> Outcome {
    let mut rng = seeded(303);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let d = 1 + i % 5;
        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let q = linalg::complexify(&haar_orthogonal(d, &mut rng));
        let u = q * Complex64::from_polar(1.0, theta);
        let f = is_free_unitary(&u, TOL)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("constructed unitary {i} (d={d}) rejected"))?;
        worst = worst.max(linalg::max_abs_diff(&f.unitary(), &u));
    }
    check(worst <= 1e-9, || {
        format!("reconstruction error {worst:.3e} > 1e-9")
    })?;
    let mut accepted = 0usize;
    for i in 0..100 {
        let d = 2 + i % 4;
        let u = haar_unitary(d, &mut rng);
        if is_free_unitary(&u, TOL)
            .map_err(|e| e.to_string())?
            .is_some()
        {
            accepted += 1;
        }
    }
    check(accepted < 1, || {
        format!("{accepted}/100 Haar unitaries accepted")
    })?;
    Ok(format!(
        "reconstruction error {worst:.1e}; Haar acceptance {accepted}/100"
    ))
}

// 4. Faithfulness, monotonicity under real channels and the qubit closed form.
fn criterion_4() -> Outcome {
    let mut rng = seeded(404);
    for i in 0..1000 {
        let d = 2 + i % 4;
        let m = if i % 2 == 0 {
            random_real_density(d, &mut rng)
        } else {
            random_density(d, &mut rng)
        };
        let rho = DensityMatrix::new(m, TOL).unwrap();
        let zero = measure_m(&rho).value <= TOL.atol;
        let free = is_free_state(&rho, TOL);
        check(zero == free, || {
            format!("state {i}: M=0 is {zero}, free is {free}")
        })?;
    }

    let mut worst = f64::NEG_INFINITY;
    for i in 0..1000u64 {
        let d = 2 + (i % 2) as usize;
        let ch = sample_real_choi_channel(d, 40_000 + i).map_err(|e| e.to_string())?;
        for j in 0..10 {
            let m = if j % 3 == 0 {
                random_pure(d, &mut rng).density().into_mat()
            } else {
                random_density(d, &mut rng)
            };
            let rho = DensityMatrix::new(m, TOL).unwrap();
            let out = apply(&ch, &rho).map_err(|e| e.to_string())?;
            let gain = measure_m(&out).value - measure_m(&rho).value;
            worst = worst.max(gain);
        }
    }
    check(worst <= 1e-9, || format!("M increased by {worst:.3e}"))?;

    let mut closed = 0.0f64;
    for _ in 0..1000 {
        let rho = DensityMatrix::new(random_density(2, &mut rng), TOL).unwrap();
        let a = measure_m_qubit(&rho).map_err(|e| e.to_string())?.value;
        closed = closed.max((a - measure_m(&rho).value).abs());
    }
    check(closed <= 1e-12, || {
        format!("qubit closed form off by {closed:.3e}")
    })?;
    Ok(format!(
        "faithful on 1000 states; max gain {worst:.1e} over 10000 pairs; closed form {closed:.1e}"
    ))
}

// Robustness oracle: π ranges over a cubic mesh of the Bloch ball (shrunk
// towards I/2 where needed), bisection over s.
struct BlochMesh {
    points: Vec<[f64; 3]>,
}

impl BlochMesh {
    fn new(n: usize) -> Self {
        let step = 2.0 / (n - 1) as f64;
        let mut points = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let p = [
                        -1.0 + i as f64 * step,
                        -1.0 + j as f64 * step,
                        -1.0 + k as f64 * step,
                    ];
                    if p.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12 {
                        points.push(p);
                    }
                }
            }
        }
        Self { points }
    }

    fn witness(&self, r: &BlochVector, s: f64) -> Option<DensityMatrix> {
        if r.y == 0.0 {
            return Some(DensityMatrix::maximally_mixed(2));
        }
        let p = self
            .points
            .iter()
            .find(|p| p[1] * r.y < 0.0 && s * p[1].abs() >= r.y.abs())?;
        let lambda = (r.y.abs() / (s * p[1].abs())).min(1.0);
        let b = BlochVector::new(lambda * p[0], lambda * p[1], lambda * p[2], TOL).ok()?;
        Some(qubit_of_bloch(b))
    }

    fn feasible(&self, rho: &DensityMatrix, s: f64) -> bool {
        let r = bloch_of_qubit(rho).unwrap();
        match self.witness(&r, s) {
            Some(pi) => {
                let mixed = (rho.mat() + pi.mat() * c(s, 0.0)) / c(1.0 + s, 0.0);
                linalg::max_abs_imag(&mixed) <= 1e-12
            }
            None => false,
        }
    }

    fn robustness(&self, rho: &DensityMatrix) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 2.0f64);
        if self.feasible(rho, 0.0) {
            return 0.0;
        }
        while hi - lo > 1e-9 {
            let mid = 0.5 * (lo + hi);
            if self.feasible(rho, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

// 5. Robustness bisection against the mesh oracle and the closed form.
fn criterion_5() -> Outcome {
    let mesh = BlochMesh::new(59);
    check(mesh.points.len() >= 100_000, || {
        format!("mesh has only {} points", mesh.points.len())
    })?;
    let mut rng = seeded(505);
    let (mut vs_oracle, mut vs_closed) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let rho = DensityMatrix::new(random_density(2, &mut rng), TOL).unwrap();
        let r = robustness(&rho, TOL).value;
        let (_, im) = rho.split_real_imag();
        let closed = linalg::trace_norm(&linalg::complexify(&im));
        vs_oracle = vs_oracle.max((r - mesh.robustness(&rho)).abs());
        vs_closed = vs_closed.max((r - closed).abs());
    }
    check(vs_oracle <= 2e-3, || {
        format!("oracle mismatch {vs_oracle:.3e} > 2e-3")
    })?;
    check(vs_closed <= 1e-6, || {
        format!("closed-form mismatch {vs_closed:.3e} > 1e-6")
    })?;
    Ok(format!(
        "{} mesh points; oracle gap {vs_oracle:.1e}, closed-form gap {vs_closed:.1e}",
        mesh.points.len()
    ))
}

// 6. Canonicalisation of pure states and the half-diagonal form.
fn criterion_6() -> Outcome {
    let mut rng = seeded(606);
    let (mut support, mut drift) = (0.0f64, 0.0f64);
    for i in 0..200 {
        let d = 2 + i % 4;
        let psi = random_pure(d, &mut rng);
        let cf = canonical_pure_form(&psi);
        let u = cf.u_free();
        check(
            is_free_unitary(&u, TOL)
                .map_err(|e| e.to_string())?
                .is_some(),
            || format!("state {i}: u_free is not a free unitary"),
        )?;
        let out = PureState::normalized(psi.transformed(&u).map_err(|e| e.to_string())?).unwrap();
        for k in 2..d {
            support = support.max(out.amplitudes()[k].norm());
        }
        drift =
            drift.max((measure_m(&out.density()).value - measure_m(&psi.density()).value).abs());
    }
    check(support <= 1e-10, || {
        format!("support outside {{0,1}} is {support:.3e}")
    })?;
    check(drift <= 1e-10, || format!("M changed by {drift:.3e}"))?;

    let mut radius = 0.0f64;
    for _ in 0..200 {
        let psi = random_pure(2, &mut rng);
        let hd = half_diagonal_form(&psi.density()).map_err(|e| e.to_string())?;
        radius = radius.max((hd.x * hd.x + hd.y * hd.y - 0.25).abs());
    }
    check(radius <= 1e-9, || format!("x²+y² off by {radius:.3e}"))?;
    Ok(format!(
        "support {support:.1e}, M drift {drift:.1e}, half-diagonal radius {radius:.1e}"
    ))
}

// 7. Pure-state conversion under free operations.
fn criterion_7() -> Outcome {
    let mut rng = seeded(707);
    let mut worst_fid = 1.0f64;
    let mut worst_imag = 0.0f64;
    let mut infeasible = 0usize;
    let mut feasible = 0usize;
    while feasible < 200 || infeasible < 200 {
        let d = 2 + rng.random_range(0..3usize);
        let a = random_pure(d, &mut rng);
        let b = random_pure(d, &mut rng);
        let (ma, mb) = (measure_m(&a.density()).value, measure_m(&b.density()).value);
        if (ma - mb).abs() < 1e-6 {
            continue;
        }
        let (psi, phi) = if ma > mb { (a, b) } else { (b, a) };
        if feasible < 200 {
            check(transform_exists(&psi, &phi), || {
                "feasible pair rejected".into()
            })?;
            let plan = synthesize(&psi, &phi, TOL).map_err(|e| format!("synthesize: {e}"))?;
            Channel::new(plan.total.choi().clone(), d, d, TOL)
                .map_err(|e| format!("not CPTP: {e}"))?;
            worst_imag = worst_imag.max(linalg::max_abs_imag(plan.total.choi()));
            worst_fid = worst_fid.min(plan.fidelity(&psi, &phi).map_err(|e| e.to_string())?);
            feasible += 1;
        }
        if infeasible < 200 {
            check(!transform_exists(&phi, &psi), || {
                "infeasible pair accepted".into()
            })?;
            infeasible += 1;
        }
    }
    check(worst_imag <= TOL.atol, || {
        format!("synthesized Choi imaginary part {worst_imag:.3e}")
    })?;
    check(worst_fid >= 1.0 - 1e-9, || format!("fidelity {worst_fid}"))?;

    let source = plus_i();
    let mut from_plus_i = 1.0f64;
    for i in 0..100 {
        let phi = random_pure(2 + i % 3, &mut rng);
        check(transform_exists(&source, &phi), || {
            "|+i> not convertible".into()
        })?;
        let plan = synthesize(&source, &phi, TOL).map_err(|e| e.to_string())?;
        from_plus_i = from_plus_i.min(plan.fidelity(&source, &phi).map_err(|e| e.to_string())?);
    }
    check(from_plus_i >= 1.0 - 1e-9, || {
        format!("|+i> fidelity {from_plus_i}")
    })?;

    let mut worst_mix = 0.0f64;
    for i in 0..50 {
        let d = 2 + i % 3;
        let n = 1 + i % 4;
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let ensemble: Vec<(f64, PureState)> = weights
            .iter()
            .map(|w| (w / total, random_pure(d, &mut rng)))
            .collect();
        let ch = synthesize_to_mixed(&source, &ensemble, TOL).map_err(|e| e.to_string())?;
        check(is_completely_rng(&ch, TOL), || {
            "mixture channel not real".into()
        })?;
        worst_mix =
            worst_mix.max(mixture_error(&ch, &source, &ensemble).map_err(|e| e.to_string())?);
    }
    check(worst_mix <= 1e-8, || {
        format!("mixture error {worst_mix:.3e} > 1e-8")
    })?;
    Ok(format!(
        "min fidelity {worst_fid:.12}, Choi imag {worst_imag:.1e}; 200 infeasible rejected; \
         |+i> fidelity {from_plus_i:.12}; mixture error {worst_mix:.1e}"
    ))
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_imaginarity"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn expect(run: &Run, code: i32, first_line: &str, label: &str) -> Result<(), String> {
    let line = run.stdout.lines().next().unwrap_or("");
    check(run.code == code && line == first_line, || {
        format!(
            "{label}: expected ({code}, {first_line:?}), got ({}, {line:?}); stderr {:?}",
            run.code, run.stderr
        )
    })?;
    check(
        !run.stderr.contains("true") && !run.stderr.contains("false"),
        || format!("{label}: verdict on stderr"),
    )
}

fn line_value(run: &Run, key: &str) -> Option<f64> {
    run.stdout
        .lines()
        .find_map(|l| l.strip_prefix(key))
        .and_then(|v| v.trim().parse().ok())
}

fn write(dir: &Path, name: &str, file: &MatrixFile) -> String {
    let path: PathBuf = dir.join(name);
    file.write(&path).expect("write fixture");
    path.to_string_lossy().into_owned()
}

fn unitary_file(entries: [[Complex64; 2]; 2]) -> MatrixFile {
    let u = ComplexMatrix::from_fn(2, 2, |r, c| entries[r][c]);
    MatrixFile::from_unitary(&u, None)
}

fn state_from(path: &str) -> ComplexMatrix {
    MatrixFile::read(path).unwrap().to_matrix()
}

// 8. Golden command-line invocations.
fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = dir.path();
    let h = FRAC_1_SQRT_2;
    let mut count = 0usize;
    let mut ok = |r: Result<(), String>| -> Result<(), String> {
        count += 1;
        r
    };

    let plus_i_pure = write(dir, "plus_i.json", &MatrixFile::from_pure(&plus_i()));
    let plus_i_state = write(
        dir,
        "plus_i_state.json",
        &MatrixFile::from_state(&plus_i().density()),
    );
    let plus_pure = write(
        dir,
        "plus.json",
        &MatrixFile::from_pure(&PureState::from_slice(&[c(h, 0.0), c(h, 0.0)], TOL).unwrap()),
    );
    let zero_pure = write(
        dir,
        "zero.json",
        &MatrixFile::from_pure(&PureState::basis(0, 2).unwrap()),
    );
    let mixed = write(
        dir,
        "mixed.json",
        &MatrixFile::from_state(&DensityMatrix::maximally_mixed(2)),
    );
    let bloch = write(
        dir,
        "bloch.json",
        &MatrixFile::from_state(&qubit_of_bloch(
            BlochVector::new(0.0, 0.6, 0.0, TOL).unwrap(),
        )),
    );

    ok(expect(
        &cli(&["measure", &plus_i_state]),
        0,
        "M = 1.00000000000",
        "measure |+i>",
    ))?;
    ok(expect(
        &cli(&["measure", &plus_i_pure]),
        0,
        "M = 1.00000000000",
        "measure |+i> pure",
    ))?;
    ok(expect(
        &cli(&["measure", &mixed]),
        0,
        "M = 0",
        "measure I/2",
    ))?;
    let r = cli(&["measure", "--robustness", &bloch]);
    ok(expect(&r, 0, "R = 0.600000", "robustness"))?;
    ok(check(
        line_value(&r, "R =").is_some_and(|v| (v - 0.6).abs() <= 1e-6),
        || "R value".into(),
    ))?;

    let s_gate = write(
        dir,
        "s.json",
        &unitary_file([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]]),
    );
    let hadamard = write(
        dir,
        "h.json",
        &unitary_file([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]),
    );
    ok(expect(
        &cli(&["check", "--unitary", &s_gate, "--predicate", "free-unitary"]),
        1,
        "false",
        "S gate",
    ))?;
    let r = cli(&[
        "check",
        "--unitary",
        &hadamard,
        "--predicate",
        "free-unitary",
    ]);
    ok(expect(&r, 0, "true", "Hadamard"))?;
    ok(check(
        r.stdout.contains("theta = 0\n") && r.stdout.contains("q_extracted = true"),
        || format!("Hadamard witness data: {:?}", r.stdout),
    ))?;

    let witness = write(
        dir,
        "witness.json",
        &MatrixFile::from_channel(&rng_witness_channel()),
    );
    ok(expect(
        &cli(&["check", "--choi", &witness, "--predicate", "rng"]),
        0,
        "true",
        "witness rng",
    ))?;
    ok(expect(
        &cli(&["check", "--choi", &witness, "--predicate", "real"]),
        1,
        "false",
        "witness real",
    ))?;

    let canon = |file: &str, label: &str| -> Result<f64, String> {
        let out = dir.join(format!("{label}_u.json"));
        let r = cli(&["canonicalize", file, "-o", out.to_str().unwrap()]);
        check(r.code == 0, || {
            format!("canonicalize {label}: exit {}", r.code)
        })?;
        let f = MatrixFile::read(&out).map_err(|e| e.to_string())?;
        check(f.kind == MatrixKind::Unitary && f.phase.is_some(), || {
            format!("{label}: bad unitary file")
        })?;
        line_value(&r, "theta =").ok_or_else(|| format!("{label}: no theta"))
    };
    let t = canon(&plus_i_pure, "plus_i")?;
    ok(check((t - FRAC_PI_2).abs() <= 1e-10, || {
        format!("canonicalize |+i>: {t}")
    }))?;
    let t = canon(&zero_pure, "zero")?;
    ok(check(t == 0.0, || format!("canonicalize |0>: {t}")))?;
    let k = 1.0 / 3f64.sqrt();
    let three = write(
        dir,
        "three.json",
        &MatrixFile::from_pure(
            &PureState::from_slice(&[c(k, 0.0), c(0.0, k), c(0.0, k)], TOL).unwrap(),
        ),
    );
    let t = canon(&three, "three")?;
    ok(check((t - 1.23096).abs() <= 1e-5, || {
        format!("canonicalize 3-level: {t}")
    }))?;

    let synth_out = dir.join("synth.json");
    let r = cli(&[
        "synth",
        "--from",
        &plus_i_pure,
        "--to",
        &plus_pure,
        "-o",
        synth_out.to_str().unwrap(),
    ]);
    ok(check(r.code == 0, || {
        format!("synth |+i> -> |+>: exit {} {}", r.code, r.stderr)
    }))?;
    ok(check(
        line_value(&r, "fidelity =").is_some_and(|f| f >= 1.0 - 1e-9),
        || format!("fidelity {:?}", r.stdout),
    ))?;
    let total = MatrixFile::read(&synth_out).map_err(|e| e.to_string())?;
    ok(check(
        total.kind == MatrixKind::Choi && linalg::max_abs_imag(&total.to_matrix()) <= 1e-9,
        || "synth output not a real Choi file".into(),
    ))?;
    let r = cli(&["synth", "--from", &plus_pure, "--to", &plus_i_pure]);
    ok(expect(
        &r,
        1,
        "not convertible: M(source) < M(target)",
        "synth infeasible",
    ))?;
    let r = cli(&["synth", "--from", &three, "--to", &three]);
    ok(check(
        r.code == 0 && line_value(&r, "fidelity =").is_some_and(|f| (f - 1.0).abs() <= 1e-9),
        || format!("synth psi -> psi: {:?}", r.stdout),
    ))?;

    let mut rng = seeded(808);
    let rho = random_density(2, &mut rng);
    let rho_path = write(
        dir,
        "rho.json",
        &MatrixFile::from_state(&DensityMatrix::new(rho.clone(), TOL).unwrap()),
    );
    let id = write(
        dir,
        "id.json",
        &MatrixFile::from_channel(&Channel::identity(2)),
    );
    let dep = write(
        dir,
        "dep.json",
        &MatrixFile::from_channel(&Channel::replacement(&DensityMatrix::maximally_mixed(2), 2)),
    );
    let apply_to = |choi: &str, state: &str, name: &str| -> Result<ComplexMatrix, String> {
        let out = dir.join(name);
        let r = cli(&[
            "apply",
            "--choi",
            choi,
            "--state",
            state,
            "-o",
            out.to_str().unwrap(),
        ]);
        check(r.code == 0, || {
            format!("apply {name}: exit {} {}", r.code, r.stderr)
        })?;
        Ok(state_from(out.to_str().unwrap()))
    };
    let out = apply_to(&id, &rho_path, "id_out.json")?;
    ok(check(linalg::max_abs_diff(&out, &rho) <= 1e-12, || {
        "identity changed the state".into()
    }))?;
    let out = apply_to(&dep, &rho_path, "dep_out.json")?;
    let half = linalg::identity(2) * c(0.5, 0.0);
    ok(check(linalg::max_abs_diff(&out, &half) <= 1e-12, || {
        "depolarizing output is not I/2".into()
    }))?;
    let out = apply_to(&witness, &plus_i_state, "witness_out.json")?;
    let expected = ComplexMatrix::from_fn(2, 2, |r, col| match (r, col) {
        (0, 0) => c(0.75, 0.0),
        (1, 1) => c(0.25, 0.0),
        _ => c(0.0, 0.0),
    });
    ok(check(
        linalg::max_abs_diff(&out, &expected) <= 1e-12,
        || format!("witness on |+i>: {out}"),
    ))?;

    let garbage = dir.join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    ok(check(
        cli(&["measure", garbage.to_str().unwrap()]).code == 2,
        || "parse error exit".into(),
    ))?;
    let bad_state = write(
        dir,
        "bad_state.json",
        &MatrixFile::from_matrix(
            MatrixKind::State,
            [2, 2],
            &ComplexMatrix::from_fn(2, 2, |r, col| {
                if r == col {
                    c(1.5 - r as f64 * 2.0, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            }),
        ),
    );
    ok(check(cli(&["measure", &bad_state]).code == 3, || {
        "invalid state exit".into()
    }))?;
    let bad_choi = write(
        dir,
        "bad_choi.json",
        &MatrixFile::from_matrix(MatrixKind::Choi, [2, 2], &linalg::identity(4)),
    );
    ok(check(
        cli(&["check", "--choi", &bad_choi, "--predicate", "rng"]).code == 4,
        || "non-CPTP exit".into(),
    ))?;
    let r = cli(&["sample", "--kind", "real", "--dim", "3", "--seed", "7"]);
    let sampled = MatrixFile::from_json(&r.stdout).map_err(|e| e.to_string())?;
    ok(check(
        r.code == 0 && sampled.dims == [3, 3] && linalg::max_abs_imag(&sampled.to_matrix()) == 0.0,
        || "sample output".into(),
    ))?;
    Ok(format!("{count} golden checks"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("RNG predicate matches brute-force oracle", criterion_1),
        (
            "real Choi / real Kraus / real dilation / extension equivalence",
            criterion_2,
        ),
        ("free unitary recognition", criterion_3),
        (
            "measure faithfulness, monotonicity, qubit closed form",
            criterion_4,
        ),
        ("robustness vs mesh oracle and closed form", criterion_5),
        ("pure-state canonicalization", criterion_6),
        ("pure-state conversion synthesis", criterion_7),
        ("CLI golden outputs and exit codes", criterion_8),
    ];
    let mut failures = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} [{name}] ({secs:.1}s): {detail}", n + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {} [{name}] ({secs:.1}s): {why}", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
