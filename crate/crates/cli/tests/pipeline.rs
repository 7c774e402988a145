//! Runs the `iqa-bench` binary against a small synthetic data directory.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use iqa_core::svr::{SupportVector, SvrType, FEATURE_DIM};
use iqa_core::{FeatureRange, SvrModel};

const IMAGES: u32 = 12;

/// Deterministic byte noise with some structure, so BRISQUE sees texture.
fn pattern(i: usize, salt: u32) -> u8 {
    let x = (i as u32)
        .wrapping_mul(2_654_435_761)
        .wrapping_add(salt.wrapping_mul(40_503));
    ((x >> 13) as u8) / 2 + ((i / 7) % 2 * 96) as u8
}

fn write_fixture(data: &Path) {
    let mnist = data.join("mnist");
    std::fs::create_dir_all(&mnist).unwrap();
    let mut imgs = vec![0, 0, 8, 3];
    for d in [IMAGES, 28, 28] {
        imgs.extend(d.to_be_bytes());
    }
    for k in 0..IMAGES {
        imgs.extend((0..784).map(|i| pattern(i, k)));
    }
    let mut labs = vec![0, 0, 8, 1];
    labs.extend(IMAGES.to_be_bytes());
    labs.extend((0..IMAGES as u8).map(|k| k % 10));
    std::fs::write(mnist.join("t10k-images-idx3-ubyte"), imgs).unwrap();
    std::fs::write(mnist.join("t10k-labels-idx1-ubyte"), labs).unwrap();

    let cifar = data.join("cifar10");
    std::fs::create_dir_all(&cifar).unwrap();
    let mut batch = Vec::new();
    for k in 0..IMAGES {
        batch.push((k % 10) as u8);
        batch.extend((0..3072).map(|i| pattern(i, k + 100)));
    }
    std::fs::write(cifar.join("test_batch.bin"), batch).unwrap();

    let brisque = data.join("brisque");
    std::fs::create_dir_all(&brisque).unwrap();
    let model = SvrModel {
        svm_type: SvrType::EpsilonSvr,
        gamma: 0.05,
        rho: -40.0,
        support_vectors: vec![
            SupportVector {
                coef: 10.0,
                features: vec![0.5; FEATURE_DIM],
            },
            SupportVector {
                coef: -5.0,
                features: vec![-0.5; FEATURE_DIM],
            },
        ],
    };
    std::fs::write(brisque.join("allmodel"), model.to_libsvm_text()).unwrap();
    let range = FeatureRange {
        lower: -1.0,
        upper: 1.0,
        bounds: vec![(0.0, 2.0); FEATURE_DIM],
    };
    std::fs::write(brisque.join("allrange"), range.to_text()).unwrap();
}

struct Env {
    _tmp: tempfile::TempDir,
    data: PathBuf,
    out: PathBuf,
}

fn env() -> Env {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    write_fixture(&data);
    let out = tmp.path().join("out");
    Env { _tmp: tmp, data, out }
}

impl Env {
    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_iqa-bench"))
            .args(args)
            .arg("--data-dir")
            .arg(&self.data)
            .arg("--out")
            .arg(&self.out)
            .env("RUST_LOG", "warn")
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) {
        let o = self.run(args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }

    fn code(&self, args: &[&str]) -> i32 {
        self.run(args).status.code().unwrap()
    }
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", p.as_ref().display()))
}

#[test]
fn full_bench_writes_every_artifact() {
    let e = env();
    e.ok(&["bench", "--n", "4"]);
    for d in ["mnist", "cifar10"] {
        let dir = e.out.join(d);
        assert_eq!(std::fs::read_dir(dir.join("pristine")).unwrap().count(), 4);
        assert_eq!(std::fs::read_dir(dir.join("corrupted")).unwrap().count(), 4 * 69);
        let psnr = read(dir.join(format!("scores/{d}_psnr.csv")));
        assert_eq!(psnr.lines().count(), 1 + 4 * 69);
        let clean: Vec<&str> = psnr.lines().filter(|l| l.contains(",clean,")).collect();
        assert_eq!(clean.len(), 4);
        assert!(clean.iter().all(|l| l.ends_with(",NA")), "{clean:?}");
        let report = std::fs::read_dir(dir.join("report")).unwrap().count();
        assert_eq!(report, 12);
    }
    let header = read(e.out.join("cifar10/report/cifar10_brisque_sp_ga.csv"));
    assert!(header.starts_with("stat,Original-QS,Avg-SP0GAx,"));
    let header = read(e.out.join("cifar10/report/cifar10_psnr_sp_ga.csv"));
    assert!(header.starts_with("stat,Avg-SP0GAx,"));
}

#[test]
fn exit_codes() {
    let e = env();
    assert_eq!(e.code(&["sample", "--n", "0"]), 2);
    assert_eq!(e.code(&["sample", "--dataset", "svhn"]), 2);
    assert_eq!(e.code(&["frobnicate"]), 2);
    // nothing sampled yet
    assert_eq!(e.code(&["corrupt", "--dataset", "mnist"]), 4);
    assert_eq!(e.code(&["report", "--dataset", "mnist"]), 4);

    e.ok(&["sample", "--dataset", "mnist", "--n", "2"]);
    e.ok(&["corrupt", "--dataset", "mnist", "--conditions", "clean,SP0.1GA0"]);
    std::fs::remove_dir_all(e.data.join("brisque")).unwrap();
    assert_eq!(e.code(&["score", "--dataset", "mnist", "--metric", "brisque"]), 2);

    // corrupted raw data is a format error
    std::fs::write(e.data.join("mnist/t10k-images-idx3-ubyte"), b"\0\0\x08\x03junk").unwrap();
    assert_eq!(e.code(&["sample", "--dataset", "mnist", "--n", "2"]), 3);
}

#[test]
fn single_condition_filter_gives_n_files() {
    let e = env();
    e.ok(&["sample", "--dataset", "cifar10", "--n", "5"]);
    e.ok(&["corrupt", "--dataset", "cifar10", "--conditions", "SP0.1GA0.2"]);
    let names: Vec<String> = std::fs::read_dir(e.out.join("cifar10/corrupted"))
        .unwrap()
        .map(|f| f.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names.len(), 5);
    assert!(names
        .iter()
        .all(|n| n.starts_with("cifar10_") && n.ends_with("_SP0.1GA0.2.png")));
    // a partial condition set cannot fill the report groups
    e.ok(&["score", "--dataset", "cifar10", "--metric", "psnr"]);
    assert_eq!(e.code(&["report", "--dataset", "cifar10", "--metric", "psnr"]), 4);
}

#[test]
fn report_is_reproducible() {
    let e = env();
    e.ok(&["bench", "--dataset", "mnist", "--n", "3"]);
    let rep = e.out.join("mnist/report");
    let before: Vec<(PathBuf, Vec<u8>)> = std::fs::read_dir(&rep)
        .unwrap()
        .map(|f| {
            let p = f.unwrap().path();
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    std::fs::remove_dir_all(&rep).unwrap();
    e.ok(&["report", "--dataset", "mnist"]);
    for (p, bytes) in before {
        assert_eq!(std::fs::read(&p).unwrap(), bytes, "{}", p.display());
    }
}

#[test]
fn resume_continues_after_corrupt() {
    let e = env();
    e.ok(&["sample", "--dataset", "mnist", "--n", "3"]);
    e.ok(&["corrupt", "--dataset", "mnist"]);
    let stamp = e.out.join("mnist/stamps/corrupt.json");
    let corrupt_stamp = read(&stamp);
    let first_corrupted = || {
        let mut files: Vec<PathBuf> = std::fs::read_dir(e.out.join("mnist/corrupted"))
            .unwrap()
            .map(|f| f.unwrap().path())
            .collect();
        files.sort();
        std::fs::metadata(&files[0]).unwrap().modified().unwrap()
    };
    let modified = first_corrupted();

    e.ok(&["bench", "--dataset", "mnist", "--n", "3"]);
    assert_eq!(read(&stamp), corrupt_stamp);
    assert_eq!(first_corrupted(), modified);
    assert!(e.out.join("mnist/scores/mnist_psnr.csv").is_file());
    assert!(e.out.join("mnist/stamps/report_brisque.json").is_file());
}

#[test]
fn provenance_is_checked() {
    let e = env();
    e.ok(&["bench", "--dataset", "mnist", "--n", "2", "--metric", "psnr"]);

    // scoring under a different seed than the sample was drawn with
    assert_eq!(
        e.code(&["score", "--dataset", "mnist", "--metric", "psnr", "--seed", "7"]),
        4
    );

    // a tampered corrupted image invalidates downstream stages
    let victim = std::fs::read_dir(e.out.join("mnist/corrupted"))
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    std::fs::write(&victim, b"not a png").unwrap();
    assert_eq!(e.code(&["score", "--dataset", "mnist", "--metric", "psnr"]), 4);

    // bench repairs it
    e.ok(&["bench", "--dataset", "mnist", "--n", "2", "--metric", "psnr"]);
    assert!(std::fs::read(&victim).unwrap().starts_with(b"\x89PNG"));
}

#[test]
fn config_file_sets_defaults() {
    let e = env();
    let cfg = e.out.with_file_name("bench.toml");
    std::fs::write(
        &cfg,
        "dataset = \"cifar10\"\nn = 2\nmetric = \"psnr\"\nconditions = \"clean,SP0RR30\"\n",
    )
    .unwrap();
    e.ok(&["sample", "--config", cfg.to_str().unwrap()]);
    e.ok(&["corrupt", "--config", cfg.to_str().unwrap()]);
    assert_eq!(std::fs::read_dir(e.out.join("cifar10/corrupted")).unwrap().count(), 4);
    assert!(!e.out.join("mnist").exists());
}
