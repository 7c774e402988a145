//! Locating and decoding the raw dataset files.

use std::path::{Path, PathBuf};

use iqa_core::dataset::{parse_cifar10_batch, parse_idx, parse_idx_labels};
use iqa_core::{DatasetId, Image};

use crate::failure::{Failure, Outcome};

const MNIST_PARTS: [(&str, &str); 2] = [
    ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
];

const CIFAR_BATCHES: [&str; 6] = [
    "data_batch_1.bin",
    "data_batch_2.bin",
    "data_batch_3.bin",
    "data_batch_4.bin",
    "data_batch_5.bin",
    "test_batch.bin",
];

/// Decoded images and labels, in population order.
pub struct RawDataset {
    pub images: Vec<Image>,
    pub labels: Vec<u8>,
    /// Files read, in order.
    pub files: Vec<PathBuf>,
}

/// `name`, or the dotted spelling some mirrors use (`train-images.idx3-ubyte`).
fn find_file(dirs: &[PathBuf], name: &str) -> Option<PathBuf> {
    let dotted = name.contains("-idx").then(|| name.replacen("-idx", ".idx", 1));
    dirs.iter()
        .flat_map(|d| std::iter::once(d.join(name)).chain(dotted.iter().map(|n| d.join(n))))
        .find(|p| p.is_file())
}

fn read(path: &Path) -> Outcome<Vec<u8>> {
    std::fs::read(path).map_err(|e| Failure::incomplete(format!("cannot read {}: {e}", path.display())))
}

fn search_dirs(data_dir: &Path, sub: &[&str]) -> Vec<PathBuf> {
    let mut dirs: Vec<PathBuf> = sub.iter().map(|s| data_dir.join(s)).collect();
    dirs.push(data_dir.to_path_buf());
    dirs
}

/// Files making up the population of `dataset`, in concatenation order.
pub fn locate(dataset: DatasetId, data_dir: &Path) -> Outcome<Vec<PathBuf>> {
    let files: Vec<PathBuf> = match dataset {
        DatasetId::Mnist => {
            let dirs = search_dirs(data_dir, &["mnist"]);
            MNIST_PARTS
                .iter()
                .filter_map(|(img, lab)| Some([find_file(&dirs, img)?, find_file(&dirs, lab)?]))
                .flatten()
                .collect()
        }
        DatasetId::Cifar10 => {
            let dirs = search_dirs(
                data_dir,
                &["cifar10", "cifar-10-batches-bin", "cifar10/cifar-10-batches-bin"],
            );
            CIFAR_BATCHES.iter().filter_map(|b| find_file(&dirs, b)).collect()
        }
    };
    if files.is_empty() {
        return Err(Failure::incomplete(format!(
            "no raw {} files found under {}",
            dataset.display_name(),
            data_dir.display()
        )));
    }
    Ok(files)
}

pub fn load(dataset: DatasetId, data_dir: &Path) -> Outcome<RawDataset> {
    let files = locate(dataset, data_dir)?;
    let mut images = Vec::new();
    let mut labels = Vec::new();
    match dataset {
        DatasetId::Mnist => {
            for pair in files.chunks(2) {
                let imgs = parse_idx(&read(&pair[0])?).map_err(|e| Failure::from(e).context(pair[0].display()))?;
                let labs =
                    parse_idx_labels(&read(&pair[1])?).map_err(|e| Failure::from(e).context(pair[1].display()))?;
                if imgs.len() != labs.len() {
                    return Err(Failure::data(format!(
                        "{} has {} images but {} has {} labels",
                        pair[0].display(),
                        imgs.len(),
                        pair[1].display(),
                        labs.len()
                    )));
                }
                images.extend(imgs);
                labels.extend(labs);
            }
        }
        DatasetId::Cifar10 => {
            for f in &files {
                let batch = parse_cifar10_batch(&read(f)?).map_err(|e| Failure::from(e).context(f.display()))?;
                for (label, img) in batch {
                    labels.push(label);
                    images.push(img);
                }
            }
        }
    }
    Ok(RawDataset { images, labels, files })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_dotted_names_and_reports_absence() {
        let dir = tempfile::tempdir().unwrap();
        assert!(locate(DatasetId::Mnist, dir.path()).is_err());
        std::fs::create_dir(dir.path().join("mnist")).unwrap();
        std::fs::write(dir.path().join("mnist/t10k-images.idx3-ubyte"), b"").unwrap();
        std::fs::write(dir.path().join("mnist/t10k-labels-idx1-ubyte"), b"").unwrap();
        let files = locate(DatasetId::Mnist, dir.path()).unwrap();
        assert_eq!(files.len(), 2);
        assert!(files[0].ends_with("t10k-images.idx3-ubyte"));
        // empty files are located but rejected by the parser
        assert_eq!(
            load(DatasetId::Mnist, dir.path()).err().unwrap().kind,
            crate::failure::ExitKind::DataFormat
        );
    }

    #[test]
    fn cifar_layouts() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("cifar-10-batches-bin");
        std::fs::create_dir(&sub).unwrap();
        let mut rec = vec![3u8];
        rec.extend(std::iter::repeat_n(7u8, 3072));
        std::fs::write(sub.join("test_batch.bin"), &rec).unwrap();
        let raw = load(DatasetId::Cifar10, dir.path()).unwrap();
        assert_eq!((raw.images.len(), raw.labels[0]), (1, 3));
    }
}
