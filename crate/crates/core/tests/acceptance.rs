//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed.

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use repdecomp::commutant::{project_commutant_finite, sample_gue};
use repdecomp::compact::haar_unitary;
use repdecomp::decompose::{decompose, verify_decomposition, DecomposeConfig};
use repdecomp::linalg::{self, frobenius, hermitian_eigen, min_eigenvalue};
use repdecomp::perm::compose;
use repdecomp::sdp::{block_diagonalize_matrix, block_diagonalize_sdp, reconstruct, weighted_inner, BlockOptions};
use repdecomp::{
    CompactGroup, Element, Field, IrrepDecomposition, Matrix, Permutation, PermutationGroup,
    RealType, Representation, SdpProblem, C64,
};

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_decompose(rep: &Representation, seed: u64) -> Result<IrrepDecomposition, String> {
    decompose(rep, &DecomposeConfig::default(), &mut rng(seed)).map_err(|e| format!("decompose failed: {e}"))
}

fn perm(images: &[usize]) -> Permutation {
    Permutation::new(images.to_vec()).unwrap()
}

fn group(degree: usize, gens: &[&[usize]]) -> PermutationGroup {
    PermutationGroup::from_generators(degree, gens.iter().map(|g| perm(g)).collect()).unwrap()
}

/// Left regular representation, built from generator images on the group's elements.
fn regular_rep(g: Arc<PermutationGroup>, field: Field) -> Representation {
    let elements = g.elements();
    let index: HashMap<Vec<usize>, usize> = elements
        .iter()
        .enumerate()
        .map(|(i, p)| (p.images().to_vec(), i))
        .collect();
    let n = elements.len();
    let images = g
        .generators()
        .iter()
        .map(|s| {
            let mut m = Matrix::zeros(n, n);
            for (k, h) in elements.iter().enumerate() {
                let sh = compose(s, h).unwrap();
                m[(index[sh.images()], k)] = C64::new(1.0, 0.0);
            }
            m
        })
        .collect();
    Representation::from_generator_images(g, images, field).unwrap()
}

/// Characters of each component (first copy) over all group elements.
/// For an irreducible block the self inner product is 1 over the complex
/// numbers and 1, 2 or 4 over the reals; the inner product with the full
/// character is the multiplicity times that number.
fn character_check(rep: &Representation, d: &IrrepDecomposition) -> Result<(), String> {
    let g = rep.group().as_finite().unwrap();
    let elements = g.elements();
    let order = elements.len() as f64;
    let full: Vec<C64> = elements
        .iter()
        .map(|p| rep.image(&Element::Perm(p.clone())).trace())
        .collect();
    for c in d.components() {
        let b = c.copy_basis(0);
        let chi: Vec<C64> = elements
            .iter()
            .map(|p| (&b * rep.image(&Element::Perm(p.clone())) * b.adjoint()).trace())
            .collect();
        let self_ip: f64 = chi.iter().map(|z| z.norm_sqr()).sum::<f64>() / order;
        let with_full: f64 = chi.iter().zip(&full).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / order;
        let expected = match c.real_type {
            RealType::Real | RealType::NotApplicable => 1.0,
            RealType::Complex => 2.0,
            RealType::Quaternionic => 4.0,
        };
        ensure((self_ip - expected).abs() < 1e-8, || {
            format!("component D={} has <chi,chi> = {self_ip}, expected {expected}", c.dimension)
        })?;
        ensure((with_full - expected * c.multiplicity as f64).abs() < 1e-8, || {
            format!("component D={} has <chi,chi_rho> = {with_full}, expected {}", c.dimension, expected * c.multiplicity as f64)
        })?;
    }
    Ok(())
}

fn block_residual_check(rep: &Representation, d: &IrrepDecomposition, trials: usize, tol: f64) -> Result<f64, String> {
    let r = verify_decomposition(rep, d, trials, tol, &mut rng(99)).map_err(|e| e.to_string())?;
    let worst = r.unitarity.max(r.off_block).max(r.copy_deviation);
    ensure(r.passed, || format!("block residual {worst:.3e} exceeds {tol:.0e}"))?;
    Ok(worst)
}

fn expect_multiset(d: &IrrepDecomposition, mut want: Vec<(usize, usize)>) -> Result<(), String> {
    want.sort_unstable();
    ensure(d.multiset() == want, || format!("got {:?}, expected {want:?}", d.multiset()))
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, || format!("took {:.2}s, limit {limit}s", elapsed.as_secs_f64()))
}

/// Dimension of `{X real : X A = A X for every A}` by brute force.
fn real_commutant_dim(mats: &[Matrix]) -> usize {
    let n = mats[0].nrows();
    let mut rows = DMatrix::<f64>::zeros(mats.len() * n * n, n * n);
    let eye = DMatrix::<f64>::identity(n, n);
    for (k, m) in mats.iter().enumerate() {
        let a = m.map(|z| z.re);
        // vec(AX - XA) = (I ⊗ A - Aᵀ ⊗ I) vec(X), column-major vec
        let block = eye.kronecker(&a) - a.transpose().kronecker(&eye);
        rows.view_mut((k * n * n, 0), (n * n, n * n)).copy_from(&block);
    }
    let sv = rows.svd(false, false).singular_values;
    let scale = sv.max().max(1.0);
    n * n - sv.iter().filter(|s| **s > 1e-9 * scale).count()
}

fn projector(rows: &Matrix) -> Matrix {
    rows.adjoint() * rows
}

fn rank(p: &Matrix) -> usize {
    let (values, _) = hermitian_eigen(p, Field::Complex);
    values.iter().filter(|v| **v > 0.5).count()
}

fn swap(n: usize) -> Matrix {
    let mut s = Matrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            s[(b * n + a, a * n + b)] = C64::new(1.0, 0.0);
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Test representations

fn s3_natural() -> Representation {
    Representation::natural(PermutationGroup::symmetric(3).unwrap(), Field::Complex).unwrap()
}

fn s3_regular() -> Representation {
    regular_rep(Arc::new(PermutationGroup::symmetric(3).unwrap()), Field::Complex)
}

fn s4_regular(field: Field) -> Representation {
    regular_rep(Arc::new(PermutationGroup::symmetric(4).unwrap()), field)
}

fn s5_natural() -> Representation {
    Representation::natural(PermutationGroup::symmetric(5).unwrap(), Field::Complex).unwrap()
}

fn u3_sym_square() -> Representation {
    let def = Representation::defining(CompactGroup::unitary(3).unwrap());
    def.tensor(&def).unwrap()
}

fn u2_adjoint() -> Representation {
    let def = Representation::defining(CompactGroup::unitary(2).unwrap());
    def.tensor(&def.conjugate().unwrap()).unwrap()
}

fn c5_real() -> Representation {
    Representation::natural(PermutationGroup::cyclic(5).unwrap(), Field::Real).unwrap()
}

/// Quaternion units `±1, ±i, ±j, ±k` indexed `4 * sign + unit`.
fn quaternion_product(u: usize, v: usize) -> (bool, usize) {
    // (negate, unit) for unit products; 0 = 1, 1 = i, 2 = j, 3 = k
    const TABLE: [[(bool, usize); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    TABLE[u][v]
}

fn q8() -> (Arc<PermutationGroup>, Vec<Matrix>) {
    let left = |q: usize| -> Permutation {
        let images = (0..8)
            .map(|x| {
                let (neg, unit) = quaternion_product(q, x % 4);
                let sign = (x / 4 == 1) ^ neg;
                4 * usize::from(sign) + unit
            })
            .collect();
        Permutation::new(images).unwrap()
    };
    let matrix = |q: usize| -> Matrix {
        let mut m = Matrix::zeros(4, 4);
        for v in 0..4 {
            let (neg, unit) = quaternion_product(q, v);
            m[(unit, v)] = C64::new(if neg { -1.0 } else { 1.0 }, 0.0);
        }
        m
    };
    let g = PermutationGroup::from_generators(8, vec![left(1), left(2)]).unwrap();
    (Arc::new(g), vec![matrix(1), matrix(2)])
}

fn q8_real() -> Representation {
    let (g, images) = q8();
    Representation::from_generator_images(g, images, Field::Real).unwrap()
}

// ---------------------------------------------------------------------------
// Criteria

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let rep = s3_natural();
    let d = run_decompose(&rep, 1)?;
    let elapsed = start.elapsed();
    expect_multiset(&d, vec![(1, 1), (2, 1)])?;
    character_check(&rep, &d)?;
    let worst = block_residual_check(&rep, &d, 50, 1e-8)?;
    within(elapsed, 1.0)?;
    Ok(format!("{:?}, block residual {worst:.1e}, {:.3}s", d.multiset(), elapsed.as_secs_f64()))
}

fn regular_oracle(rep: &Representation, d: &IrrepDecomposition) -> Result<(), String> {
    let order = rep.group().as_finite().unwrap().order() as usize;
    ensure(d.components().iter().all(|c| c.dimension == c.multiplicity), || {
        format!("multiplicity differs from dimension: {:?}", d.multiset())
    })?;
    let sum_sq: usize = d.components().iter().map(|c| c.dimension * c.multiplicity).sum();
    ensure(sum_sq == order, || format!("sum D*M = {sum_sq}, expected {order}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let rep = s3_regular();
    let d = run_decompose(&rep, 2)?;
    let elapsed = start.elapsed();
    expect_multiset(&d, vec![(1, 1), (1, 1), (2, 2)])?;
    regular_oracle(&rep, &d)?;
    character_check(&rep, &d)?;
    within(elapsed, 1.0)?;
    Ok(format!("{:?}, {:.3}s", d.multiset(), elapsed.as_secs_f64()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let rep = s4_regular(Field::Complex);
    let d = run_decompose(&rep, 3)?;
    let elapsed = start.elapsed();
    let mut dims: Vec<usize> = d.components().iter().map(|c| c.dimension).collect();
    dims.sort_unstable();
    ensure(dims == vec![1, 1, 2, 3, 3], || format!("dimensions {dims:?}"))?;
    regular_oracle(&rep, &d)?;
    character_check(&rep, &d)?;
    block_residual_check(&rep, &d, 20, 1e-8)?;
    within(elapsed, 10.0)?;
    Ok(format!("{:?}, {:.3}s", d.multiset(), elapsed.as_secs_f64()))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let rep = s5_natural();
    let d = run_decompose(&rep, 4)?;
    let elapsed = start.elapsed();
    expect_multiset(&d, vec![(1, 1), (4, 1)])?;
    character_check(&rep, &d)?;
    within(elapsed, 1.0)?;
    Ok(format!("{:?}, {:.3}s", d.multiset(), elapsed.as_secs_f64()))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let rep = u3_sym_square();
    let config = DecomposeConfig::default();
    ensure(config.projection.nu == 1000 && config.projection.set_size == 3, || "unexpected defaults".into())?;
    let d = run_decompose(&rep, 5)?;
    let elapsed = start.elapsed();
    expect_multiset(&d, vec![(3, 1), (6, 1)])?;
    let worst = block_residual_check(&rep, &d, 20, 1e-6)?;
    let id = linalg::identity(9);
    let sym = (&id + swap(3)).scale(0.5);
    let alt = (&id - swap(3)).scale(0.5);
    ensure(rank(&sym) == 6 && rank(&alt) == 3, || "projector ranks".into())?;
    for c in d.components() {
        let oracle = if c.dimension == 6 { &sym } else { &alt };
        let err = frobenius(&(projector(&c.basis) - oracle));
        ensure(err <= 1e-6, || format!("component D={} differs from oracle projector by {err:.2e}", c.dimension))?;
    }
    within(elapsed, 60.0)?;
    Ok(format!("{:?}, block residual {worst:.1e}, {:.3}s", d.multiset(), elapsed.as_secs_f64()))
}

fn criterion_6() -> Outcome {
    let rep = u2_adjoint();
    let d = run_decompose(&rep, 6)?;
    expect_multiset(&d, vec![(1, 1), (3, 1)])?;
    let worst = block_residual_check(&rep, &d, 20, 1e-6)?;
    let mut v = Matrix::zeros(1, 4);
    v[(0, 0)] = C64::new(1.0, 0.0);
    v[(0, 3)] = C64::new(1.0, 0.0);
    let oracle = projector(&v).scale(0.5);
    ensure(rank(&oracle) == 1, || "oracle rank".into())?;
    let trivial = d.components().iter().find(|c| c.dimension == 1).unwrap();
    let err = frobenius(&(projector(&trivial.basis) - oracle));
    ensure(err <= 1e-6, || format!("trivial component off by {err:.2e}"))?;
    Ok(format!("{:?}, block residual {worst:.1e}", d.multiset()))
}

fn criterion_7() -> Outcome {
    let rep = c5_real();
    let d = run_decompose(&rep, 7)?;
    expect_multiset(&d, vec![(1, 1), (2, 1), (2, 1)])?;
    let mut types: Vec<(usize, &str)> = d.components().iter().map(|c| (c.dimension, c.real_type.as_str())).collect();
    types.sort_unstable();
    ensure(types == vec![(1, "real"), (2, "complex"), (2, "complex")], || format!("types {types:?}"))?;
    character_check(&rep, &d)?;
    let gens: Vec<Matrix> = PermutationGroup::cyclic(5)
        .unwrap()
        .generators()
        .iter()
        .map(|p| rep.image(&Element::Perm(p.clone())))
        .collect();
    let dim = real_commutant_dim(&gens);
    let from_types: usize = d
        .components()
        .iter()
        .map(|c| {
            let t = match c.real_type {
                RealType::Complex => 2,
                RealType::Quaternionic => 4,
                _ => 1,
            };
            c.multiplicity * c.multiplicity * t
        })
        .sum();
    ensure(dim == 5 && from_types == dim, || format!("real commutant dim {dim}, from types {from_types}"))?;
    Ok(format!("types {types:?}, real commutant dim {dim}"))
}

fn criterion_8() -> Outcome {
    let rep = q8_real();
    let (g, _) = q8();
    ensure(g.order() == 8, || format!("Q8 order {}", g.order()))?;
    let all: Vec<Matrix> = g.elements().into_iter().map(|p| rep.image(&Element::Perm(p))).collect();
    let dim = real_commutant_dim(&all);
    ensure(dim == 4, || format!("brute-force commutant dimension {dim}"))?;
    let d = run_decompose(&rep, 8)?;
    expect_multiset(&d, vec![(4, 1)])?;
    let t = d.components()[0].real_type;
    ensure(t == RealType::Quaternionic, || format!("classified as {}", t.as_str()))?;
    character_check(&rep, &d)?;
    Ok(format!("quaternionic, brute-force commutant rank {dim}"))
}

fn test_groups() -> Vec<(&'static str, PermutationGroup)> {
    vec![
        ("C2", PermutationGroup::cyclic(2).unwrap()),
        ("C3", PermutationGroup::cyclic(3).unwrap()),
        ("S3", PermutationGroup::symmetric(3).unwrap()),
        ("C6", PermutationGroup::cyclic(6).unwrap()),
        ("D4", group(4, &[&[1, 2, 3, 0], &[2, 1, 0, 3]])),
        ("Q8", (*q8().0).clone()),
        ("A4", group(4, &[&[1, 2, 0, 3], &[0, 2, 3, 1]])),
        ("S4", PermutationGroup::symmetric(4).unwrap()),
        ("A5", group(5, &[&[1, 2, 0, 3, 4], &[1, 2, 3, 4, 0]])),
        ("S5", PermutationGroup::symmetric(5).unwrap()),
    ]
}

fn criterion_9() -> Outcome {
    let expected_orders = [2, 3, 6, 6, 8, 8, 12, 24, 60, 120];
    let mut worst_eq: f64 = 0.0;
    let mut worst_idem: f64 = 0.0;
    for ((name, g), &order) in test_groups().into_iter().zip(&expected_orders) {
        ensure(g.order() == order, || format!("{name} has order {}", g.order()))?;
        let g = Arc::new(g);
        let nat = Representation::natural(g.clone(), Field::Complex).unwrap();
        let reps = [
            nat.clone(),
            nat.tensor(&nat).unwrap(),
            nat.direct_sum(&Representation::trivial(g.clone(), 2, Field::Complex).unwrap()).unwrap(),
        ];
        let elements = g.elements();
        for (k, rep) in reps.iter().enumerate() {
            let mut r = rng(900 + k as u64);
            let x = sample_gue(rep.dimension(), Field::Complex, &mut r);
            let mut brute = Matrix::zeros(rep.dimension(), rep.dimension());
            for p in &elements {
                let m = rep.image(&Element::Perm(p.clone()));
                brute += &m * &x * m.adjoint();
            }
            brute /= C64::new(elements.len() as f64, 0.0);
            let chain = project_commutant_finite(rep, &x).map_err(|e| e.to_string())?.matrix;
            let rel = frobenius(&(&chain - &brute)) / frobenius(&brute);
            let again = project_commutant_finite(rep, &chain).map_err(|e| e.to_string())?.matrix;
            let idem = frobenius(&(&again - &chain)) / frobenius(&chain);
            worst_eq = worst_eq.max(rel);
            worst_idem = worst_idem.max(idem);
            ensure(rel <= 1e-12, || format!("{name} rep {k}: chain vs brute force {rel:.2e}"))?;
            ensure(idem <= 1e-10, || format!("{name} rep {k}: idempotence {idem:.2e}"))?;
        }
    }
    Ok(format!("10 groups, orders 2..120: max rel diff {worst_eq:.1e}, max idempotence {worst_idem:.1e}"))
}

fn brute_reynolds(rep: &Representation, images: &[Matrix], x: &Matrix) -> Matrix {
    let mut acc = Matrix::zeros(rep.dimension(), rep.dimension());
    for m in images {
        acc += m * x * m.adjoint();
    }
    acc / C64::new(images.len() as f64, 0.0)
}

fn criterion_10() -> Outcome {
    let rep = s4_regular(Field::Real);
    let d = run_decompose(&rep, 10)?;
    let images: Vec<Matrix> = rep
        .group()
        .as_finite()
        .unwrap()
        .elements()
        .into_iter()
        .map(|p| rep.image(&Element::Perm(p)))
        .collect();
    let n = rep.dimension();
    let mut worst = [0.0f64; 3];
    for instance in 0..20u64 {
        let mut r = rng(1000 + instance);
        let invariant = |r: &mut ChaCha20Rng| brute_reynolds(&rep, &images, &sample_gue(n, Field::Real, r));
        let c = invariant(&mut r);
        let a: Vec<Matrix> = (0..3).map(|_| invariant(&mut r)).collect();
        let x = invariant(&mut r) + linalg::identity(n).scale(0.3);
        let b: Vec<f64> = a.iter().map(|ak| linalg::inner(ak, &x).re).collect();
        let problem = SdpProblem::new(Field::Real, c.clone(), a.clone(), b).map_err(|e| e.to_string())?;
        let reduced = block_diagonalize_sdp(&rep, &d, &problem, &BlockOptions::default(), &mut r)
            .map_err(|e| e.to_string())?;
        ensure(reduced.blocks.len() == 5, || "block count".into())?;

        let c_blocks: Vec<Matrix> = reduced.blocks.iter().map(|blk| blk.c.clone()).collect();
        let back = reconstruct(&d, &c_blocks).map_err(|e| e.to_string())?;
        worst[0] = worst[0].max(frobenius(&(&back - &c)) / frobenius(&c));
        for (k, ak) in a.iter().enumerate() {
            let blocks: Vec<Matrix> = reduced.blocks.iter().map(|blk| blk.a[k].clone()).collect();
            let back = reconstruct(&d, &blocks).map_err(|e| e.to_string())?;
            worst[0] = worst[0].max(frobenius(&(&back - ak)) / frobenius(ak));

            let (x_blocks, _) = block_diagonalize_matrix(&d, &x, 1e-6).map_err(|e| e.to_string())?;
            let full = linalg::inner(ak, &x).re;
            let weighted = weighted_inner(&d, &blocks, &x_blocks);
            worst[1] = worst[1].max((full - weighted).abs() / full.abs().max(1e-300));
        }
        let (x_blocks, _) = block_diagonalize_matrix(&d, &x, 1e-6).map_err(|e| e.to_string())?;
        let block_min = x_blocks.iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min);
        worst[2] = worst[2].max((block_min - min_eigenvalue(&x)).abs());
    }
    ensure(worst[0] <= 1e-9, || format!("reconstruction error {:.2e}", worst[0]))?;
    ensure(worst[1] <= 1e-8, || format!("weighted trace error {:.2e}", worst[1]))?;
    ensure(worst[2] <= 1e-8, || format!("min-eigenvalue error {:.2e}", worst[2]))?;
    Ok(format!(
        "20 instances n=24 m=3: reconstruct {:.1e}, trace {:.1e}, min-eig {:.1e}",
        worst[0], worst[1], worst[2]
    ))
}

fn criterion_11() -> Outcome {
    type Case = (&'static str, fn() -> Representation, Vec<(usize, usize)>);
    let cases: Vec<Case> = vec![
        ("S3 natural", s3_natural, vec![(1, 1), (2, 1)]),
        ("S3 regular", s3_regular, vec![(1, 1), (1, 1), (2, 2)]),
        ("S4 regular", || s4_regular(Field::Complex), vec![(1, 1), (1, 1), (2, 2), (3, 3), (3, 3)]),
        ("S4 regular real", || s4_regular(Field::Real), vec![(1, 1), (1, 1), (2, 2), (3, 3), (3, 3)]),
        ("S5 natural", s5_natural, vec![(1, 1), (4, 1)]),
        ("U(3) def x def", u3_sym_square, vec![(3, 1), (6, 1)]),
        ("U(2) def x conj", u2_adjoint, vec![(1, 1), (3, 1)]),
        ("C5 real", c5_real, vec![(1, 1), (2, 1), (2, 1)]),
        ("Q8 real", q8_real, vec![(4, 1)]),
    ];
    for (name, make, want) in &cases {
        let rep = make();
        for seed in 0..20u64 {
            let d = run_decompose(&rep, 10_000 + seed).map_err(|e| format!("{name}, seed {seed}: {e}"))?;
            let mut want = want.clone();
            want.sort_unstable();
            ensure(d.multiset() == want, || format!("{name}, seed {seed}: {:?}", d.multiset()))?;
        }
    }
    Ok(format!("{} cases x 20 seeds agree", cases.len()))
}

fn cli_output(args: &[&str]) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["repdecomp"];
    full.extend_from_slice(args);
    let code = repdecomp::cli::run(full, &mut out, &mut err);
    ensure(code == 0, || format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err)))?;
    Ok(out)
}

fn binary_output(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_repdecomp"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok(out.stdout)
}

fn criterion_12() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).display().to_string();
    let write = |name: &str, text: &str| std::fs::write(Path::new(&path(name)), text).map_err(|e| e.to_string());
    write("nat.rep", "field: complex\nrep: natural\n")?;
    write("adj.rep", "field: complex\nrep: tensor(defining, conj(defining))\n")?;
    write("s4.group", "degree: 4\ngenerators: [1,0,2,3] [1,2,3,0]\n")?;
    let mut sdp = String::from("4 1 real\n");
    for i in 0..4 {
        sdp.push_str(&format!("MATRIX 0 {i} {i} 2\nMATRIX 1 {i} {i} 1\n"));
        for j in i + 1..4 {
            sdp.push_str(&format!("MATRIX 0 {i} {j} -1\n"));
        }
    }
    sdp.push_str("B 1\n");
    write("toy.sdp", &sdp)?;

    let runs: Vec<Vec<String>> = vec![
        vec!["--seed", "7", "--format", "json", "decompose", "s4.group", "nat.rep", "--emit-basis", "B"],
        vec!["--seed", "7", "--format", "json", "decompose", "unitary:2", "adj.rep"],
        vec!["--seed", "7", "--format", "json", "sample-group", "unitary:3", "4"],
        vec!["--seed", "7", "--format", "json", "--field", "real", "blockdiag", "toy.sdp", "s4.group", "nat.rep", "--out", "OUT"],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();

    let mut checked = 0;
    for (k, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for round in 0..2 {
            let args: Vec<String> = args
                .iter()
                .map(|a| match a.as_str() {
                    "s4.group" | "nat.rep" | "adj.rep" | "toy.sdp" => path(a),
                    "B" => path(&format!("basis_{k}_{round}")),
                    "OUT" => path(&format!("out_{k}_{round}")),
                    _ => a.clone(),
                })
                .collect();
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            let stdout = if round == 0 { cli_output(&refs)? } else { binary_output(&refs)? };
            outputs.push(stdout);
        }
        // Paths embedded in the output differ between rounds; compare after normalizing them.
        let normalize = |bytes: &[u8], round: usize| {
            String::from_utf8_lossy(bytes)
                .replace(&path(&format!("basis_{k}_{round}")), "B")
                .replace(&path(&format!("out_{k}_{round}")), "OUT")
        };
        let (a, b) = (normalize(&outputs[0], 0), normalize(&outputs[1], 1));
        ensure(a == b, || format!("run {k}: outputs differ"))?;
        ensure(a.contains("\"schema_version\": 1"), || format!("run {k}: no schema version"))?;
        checked += 1;
    }
    let files = [
        (path("basis_0_0"), path("basis_0_1")),
        (path("out_3_0/manifest.json"), path("out_3_1/manifest.json")),
        (path("out_3_0/block_0.sdp"), path("out_3_1/block_0.sdp")),
    ];
    for (x, y) in &files {
        let (x, y) = (std::fs::read(x).map_err(|e| e.to_string())?, std::fs::read(y).map_err(|e| e.to_string())?);
        ensure(x == y, || "emitted files differ".into())?;
    }
    Ok(format!("{checked} commands and {} emitted files byte-identical (library and binary)", files.len()))
}

fn chi_square(group: &PermutationGroup, seed: u64) -> f64 {
    let elements = group.elements();
    let index: HashMap<Vec<usize>, usize> = elements
        .iter()
        .enumerate()
        .map(|(i, p)| (p.images().to_vec(), i))
        .collect();
    let draws = 10_000 * elements.len();
    let mut counts = vec![0usize; elements.len()];
    let mut r = rng(seed);
    for _ in 0..draws {
        counts[index[group.sample_uniform(&mut r).images()]] += 1;
    }
    let expected = draws as f64 / elements.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

fn criterion_13() -> Outcome {
    // Upper 1e-3 quantile of chi-square with 5 degrees of freedom.
    const CRITICAL_DF5: f64 = 20.515005652432876;
    let s3 = chi_square(&PermutationGroup::symmetric(3).unwrap(), 13);
    let c6 = chi_square(&PermutationGroup::cyclic(6).unwrap(), 14);
    ensure(s3 < CRITICAL_DF5, || format!("S3 chi-square {s3:.2}"))?;
    ensure(c6 < CRITICAL_DF5, || format!("C6 chi-square {c6:.2}"))?;
    let mut worst: f64 = 0.0;
    let mut r = rng(15);
    for d in [1, 2, 3, 8, 32] {
        for _ in 0..100 {
            let u = haar_unitary(d, &mut r).map_err(|e| e.to_string())?;
            worst = worst.max(linalg::unitarity_residual(&u));
        }
    }
    ensure(worst <= 1e-12, || format!("Haar unitarity residual {worst:.2e}"))?;
    Ok(format!("chi-square S3 {s3:.2}, C6 {c6:.2} (< {CRITICAL_DF5:.2}); unitarity {worst:.1e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 13] = [
        ("S3 natural", criterion_1),
        ("S3 regular", criterion_2),
        ("S4 regular", criterion_3),
        ("S5 natural", criterion_4),
        ("U(3) defining x defining", criterion_5),
        ("U(2) defining x conjugate", criterion_6),
        ("real C5 natural", criterion_7),
        ("Q8 quaternionic", criterion_8),
        ("commutant projection", criterion_9),
        ("SDP round trip", criterion_10),
        ("seed stability", criterion_11),
        ("CLI determinism", criterion_12),
        ("uniform sampling", criterion_13),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
