//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL/SKIP
//! line; the process fails if any criterion fails.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scssim::distortions::{gaussian_blur, gaussian_noise, rotate, rotate90, salt_pepper};
use scssim::metric::scssim_prepared_report;
use scssim::{
    best_cut, load_image, synthetic, CupidTree, IntegralSums, MetricConfig, PreparedImage, Region,
    RgbImage,
};
use scssim_cli::commands::{similarity_matrix, sweep};
use scssim_cli::grid::{range, Family};
use scssim_cli::kodak;
use scssim_cli::stats::spearman;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn kodak_image(index: usize) -> Option<RgbImage> {
    kodak::cached(index).and_then(|p| load_image(&p).ok())
}

/// kodim16 when it is cached, otherwise a structured synthetic stand-in.
fn reference_image() -> (RgbImage, &'static str) {
    match kodak_image(16) {
        Some(img) => (img, "kodim16"),
        None => (synthetic::landscape(768, 512), "synthetic landscape"),
    }
}

fn corpus() -> Vec<RgbImage> {
    let mut images = Vec::new();
    for i in 0..16 {
        images.push(synthetic::landscape(64 + 9 * i, 160 - 5 * i));
    }
    for seed in 0..16 {
        images.push(synthetic::scene(72 + 4 * seed as usize, 96, seed));
    }
    for seed in 0..8 {
        images.push(synthetic::noise(40 + seed as usize, 30, seed));
    }
    for i in 0..6 {
        let (w, h) = (12 + 3 * i, 9 + 2 * i);
        images.push(
            RgbImage::from_fn(w, h, |x, y| {
                [
                    (x * 255 / w) as u8,
                    (y * 255 / h) as u8,
                    ((x ^ y) * 16) as u8,
                ]
            })
            .unwrap(),
        );
    }
    let base = synthetic::landscape(160, 120);
    images.push(salt_pepper(&base, 0.2, 1).unwrap());
    images.push(gaussian_noise(&base, 20.0, 2).unwrap());
    images.push(gaussian_blur(&base, 3.0).unwrap());
    images.push(rotate90(&base));
    images.push(rotate(&synthetic::landscape(400, 400), 30.0, 200).unwrap());
    images.push(base.transpose());
    for index in 1..=kodak::IMAGE_COUNT {
        if let Some(img) = kodak_image(index) {
            images.push(img);
        }
    }
    images
}

fn axioms() -> Verdict {
    let images = corpus();
    let cfg = MetricConfig::default();
    let prepared: Vec<PreparedImage> = images
        .iter()
        .map(|img| PreparedImage::new(img, cfg.n_cuts).unwrap())
        .collect();
    let mut worst_identity = 0.0f64;
    let mut asymmetric = 0;
    let mut out_of_range = 0;
    let mut pairs = 0;
    for (i, a) in prepared.iter().enumerate() {
        let own = scssim_prepared_report(a, a, &cfg).unwrap().score;
        worst_identity = worst_identity.max((own - 1.0).abs());
        for b in &prepared[i + 1..] {
            let ab = scssim_prepared_report(a, b, &cfg).unwrap().score;
            let ba = scssim_prepared_report(b, a, &cfg).unwrap().score;
            pairs += 1;
            if ab.to_bits() != ba.to_bits() {
                asymmetric += 1;
            }
            if !(ab > 0.0 && ab <= 1.0) {
                out_of_range += 1;
            }
        }
    }
    // the one-shot entry point must agree with the prepared path
    for pair in images.windows(2).step_by(5) {
        let ab = scssim::scssim(&pair[0], &pair[1], &cfg).unwrap();
        let ba = scssim::scssim(&pair[1], &pair[0], &cfg).unwrap();
        if ab.to_bits() != ba.to_bits() {
            asymmetric += 1;
        }
    }
    verdict(
        images.len() >= 50 && worst_identity <= 1e-12 && asymmetric == 0 && out_of_range == 0,
        format!(
            "{} images, {pairs} pairs: max |S(I,I)-1| = {worst_identity:e}, asymmetric = {asymmetric}, outside (0,1] = {out_of_range}",
            images.len()
        ),
    )
}

fn random_image(rng: &mut ChaCha8Rng) -> RgbImage {
    let (w, h) = (rng.random_range(4..=16), rng.random_range(4..=16));
    let coarse = rng.random::<bool>();
    RgbImage::from_fn(w, h, |_, _| {
        if coarse {
            [rng.random_range(0..3u8) * 120; 3]
        } else {
            rng.random()
        }
    })
    .unwrap()
}

fn brute_force() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut cut_mismatch = 0;
    let mut seq_mismatch = 0;
    let mut worst_rel = 0.0f64;
    let mut rel = |actual: f64, expected: f64| {
        let r = if expected == 0.0 {
            actual.abs()
        } else {
            ((actual - expected) / expected).abs()
        };
        worst_rel = worst_rel.max(r);
    };
    for _ in 0..500 {
        let img = random_image(&mut rng);
        let sums = IntegralSums::new(&img);
        let (w, h) = (img.width(), img.height());
        let x0 = rng.random_range(0..w - 1);
        let y0 = rng.random_range(0..h - 1);
        let sub = Region::new(
            x0,
            y0,
            rng.random_range(x0 + 2..=w),
            rng.random_range(y0 + 2..=h),
        )
        .unwrap();
        for region in [Region::full(w, h), sub] {
            let fast = best_cut::<f64>(&sums, &region).unwrap().unwrap();
            let (axis, offset, gain) = oracle::best_cut(&img, &region).unwrap();
            if (fast.axis, fast.offset) != (axis, offset) {
                cut_mismatch += 1;
            }
            rel(fast.gain, oracle::to_f64(&gain));
        }
        let n = w * h - 1;
        let tree = CupidTree::build(&img, n).unwrap();
        let expected = oracle::greedy(&img, n);
        for (node, (axis, offset, gain)) in tree.nodes().iter().zip(&expected) {
            if (node.cut.axis, node.cut.offset) != (*axis, *offset) {
                seq_mismatch += 1;
                break;
            }
            rel(node.cut.gain, oracle::to_f64(gain));
        }
    }
    verdict(
        cut_mismatch == 0 && seq_mismatch == 0 && worst_rel <= 1e-6,
        format!("500 images: cut mismatches = {cut_mismatch}, sequence mismatches = {seq_mismatch}, max gain rel err = {worst_rel:e}"),
    )
}

fn telescoping() -> Verdict {
    let mut images = corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    images.extend((0..100).map(|_| random_image(&mut rng)));
    let mut worst = 0.0f64;
    for img in &images {
        let sums = IntegralSums::new(img);
        let n = 64.min(img.pixel_count() - 1);
        let tree = CupidTree::build(img, n).unwrap();
        let total: f64 = sums.total_sse();
        let gained: f64 = tree.gains().iter().sum();
        let leaves: f64 = tree
            .leaf_regions(img.width(), img.height())
            .iter()
            .map(|r| sums.region_sse::<f64>(r).unwrap())
            .sum();
        let err = ((total - gained) - leaves).abs() / total.max(f64::MIN_POSITIVE);
        worst = worst.max(err);
    }
    verdict(
        worst <= 1e-6,
        format!("{} trees: max rel residual = {worst:e}", images.len()),
    )
}

fn sweep_scores(img: &RgbImage, family: Family, grid: &[f64]) -> Vec<f64> {
    sweep(img, family, grid, 7, &MetricConfig::default())
        .unwrap()
        .into_iter()
        .map(|r| r.score)
        .collect()
}

fn invariance() -> Verdict {
    let (img, name) = reference_image();
    let checks = [
        (Family::SaltPepper, range(0.05, 0.5, 0.05)),
        (Family::GaussianNoise, range(5.0, 30.0, 5.0)),
        (Family::Blur, range(0.5, 5.0, 0.5)),
    ];
    let mut ok = true;
    let mut detail = vec![format!("on {name}")];
    for (family, grid) in checks {
        let scores = sweep_scores(&img, family, &grid);
        let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
        ok &= min >= 0.9;
        detail.push(format!("{} min = {min:.4}", family.name()));
    }
    let sp = sweep_scores(&img, Family::SaltPepper, &[0.5, 0.9]);
    ok &= sp[1] < sp[0];
    detail.push(format!("s&p 0.5 -> {:.4}, 0.9 -> {:.4}", sp[0], sp[1]));
    verdict(ok, detail.join("; "))
}

fn monotonicity() -> Verdict {
    let (img, name) = reference_image();
    let mut ok = true;
    let mut detail = vec![format!("on {name}")];
    for family in [Family::Rotate, Family::Zoom, Family::Pan] {
        let grid = family.default_grid();
        let scores = sweep_scores(&img, family, &grid);
        let rho = spearman(&grid, &scores);
        ok &= rho <= -0.9;
        detail.push(format!(
            "{} ({} levels) rho = {rho:.3}",
            family.name(),
            grid.len()
        ));
    }
    verdict(ok, detail.join("; "))
}

fn kodak_rows() -> Verdict {
    let (Some(k16), Some(k08), Some(k01)) = (kodak_image(16), kodak_image(8), kodak_image(1))
    else {
        return Verdict::Skip(format!(
            "Kodak images not cached in {}",
            kodak::kodak_dir().display()
        ));
    };
    let cfg = MetricConfig::default();
    let s = |b: &RgbImage| scssim::scssim(&k16, b, &cfg).unwrap();
    let rotated = s(&rotate90(&k16));
    let other08 = s(&k08);
    let other01 = s(&k01);
    let noisy = s(&gaussian_noise(&k16, 20.0, 0).unwrap());
    let blurry = s(&gaussian_blur(&k16, 2.0).unwrap());
    verdict(
        rotated <= 0.2 && other08 <= 0.2 && (0.15..=0.55).contains(&other01) && noisy >= 0.9 && blurry >= 0.9,
        format!("rot90 {rotated:.3}, kodim08 {other08:.3}, kodim01 {other01:.3}, noise {noisy:.3}, blur {blurry:.3}"),
    )
}

fn matrix_groups() -> Verdict {
    let layout = synthetic::landscape(256, 256);
    let layouts = [
        layout.clone(),
        rotate90(&layout),
        rotate90(&rotate90(&layout)),
    ];
    let mut images = Vec::new();
    for (g, base) in layouts.iter().enumerate() {
        for k in 0..4u64 {
            images.push(gaussian_noise(base, 5.0 + 5.0 * k as f64, 10 * g as u64 + k).unwrap());
        }
    }
    let m = similarity_matrix(&images, &MetricConfig::default()).unwrap();
    let (mut intra, mut inter) = (Vec::new(), Vec::new());
    for (i, row) in m.iter().enumerate() {
        for (j, &score) in row.iter().enumerate().skip(i + 1) {
            if i / 4 == j / 4 {
                intra.push(score)
            } else {
                inter.push(score)
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (a, b) = (mean(&intra), mean(&inter));
    verdict(
        a - b >= 0.3,
        format!(
            "3 groups x 4: intra mean {a:.4}, inter mean {b:.4}, gap {:.4}",
            a - b
        ),
    )
}

/// Timed through the `bench` subcommand in a fresh process, so the heap left
/// behind by the other criteria does not favour some sizes over others.
fn runtime() -> Verdict {
    let out = Command::new(env!("CARGO_BIN_EXE_scssim"))
        .args(["bench", "--sizes", "128,256,512,1024", "--repeats", "5"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<(usize, f64)> = text
        .lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 4);
    let ratios: Vec<f64> = rows.windows(2).map(|w| w[1].1 / w[0].1).collect();
    let times: Vec<String> = rows
        .iter()
        .map(|(px, ms)| format!("{px}px {ms:.1}ms"))
        .collect();
    verdict(
        ratios.iter().all(|&r| r <= 5.0),
        format!(
            "{}; ratios {:?}",
            times.join(", "),
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
        ),
    )
}

fn run_cli(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_scssim"))
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn determinism() -> Verdict {
    let dir = tempfile::TempDir::new().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    synthetic::landscape(512, 400)
        .save(Path::new(&p("a.png")))
        .unwrap();
    synthetic::scene(480, 420, 4)
        .save(Path::new(&p("b.png")))
        .unwrap();
    let (a, b) = (p("a.png"), p("b.png"));
    let mut identical = 0;
    let mut differing = Vec::new();
    for run in 0..2 {
        let o = |name: &str| p(&format!("{name}.{run}"));
        run_cli(&[
            "sweep",
            &a,
            "--distortion",
            "salt-pepper",
            "--seed",
            "11",
            "--jobs",
            "4",
            "--out",
            &o("sp.csv"),
        ]);
        run_cli(&[
            "sweep",
            &a,
            "--distortion",
            "gaussian-noise",
            "--seed",
            "11",
            "--out",
            &o("gn.csv"),
        ]);
        run_cli(&[
            "sweep",
            &a,
            "--distortion",
            "rotate",
            "--out",
            &o("rot.csv"),
        ]);
        run_cli(&["tree", &b, "--out", &o("tree.json")]);
        run_cli(&["curve", &a, "--against", &b, "--out", &o("curve.csv")]);
        run_cli(&[
            "matrix",
            dir.path().to_str().unwrap(),
            "--out",
            &o("matrix.csv"),
        ]);
        run_cli(&[
            "distort",
            &a,
            "--distortion",
            "salt-pepper",
            "--param",
            "0.3",
            "--seed",
            "5",
            "--out",
            &o("sp.png"),
        ]);
    }
    for name in [
        "sp.csv",
        "gn.csv",
        "rot.csv",
        "tree.json",
        "curve.csv",
        "matrix.csv",
        "sp.png",
    ] {
        let first = std::fs::read(p(&format!("{name}.0"))).unwrap();
        let second = std::fs::read(p(&format!("{name}.1"))).unwrap();
        if first == second && !first.is_empty() {
            identical += 1;
        } else {
            differing.push(name);
        }
    }
    verdict(
        differing.is_empty(),
        format!("{identical} artifacts byte-identical, differing: {differing:?}"),
    )
}

fn main() {
    type Check = fn() -> Verdict;
    let criteria: [(&str, Check); 9] = [
        ("metric axioms", axioms),
        ("partition vs brute force", brute_force),
        ("gain telescoping", telescoping),
        ("invariance to noise and blur", invariance),
        ("monotone under rotation, zoom, pan", monotonicity),
        ("Kodak reference scores", kodak_rows),
        ("matrix grouping", matrix_groups),
        ("runtime scaling", runtime),
        ("determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Verdict::Fail(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match result {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Skip(d) => ("SKIP", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("acceptance {}: {tag} {name} ({secs:.1}s) {detail}", i + 1);
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed or skipped");
}
