//! Shared plumbing: config/seed resolution, dataset loading, CSV
//! buffering with atomic writes.

use anyhow::{Context, Result};
use std::path::{Path, PathBuf};

use dwsnn::io::idx;
use dwsnn::RunConfig;

pub struct Global {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub trace: bool,
    pub log_events: bool,
}

impl Global {
    /// Effective run config: file (or defaults) with the seed override.
    pub fn load_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                RunConfig::parse(&text).context("parsing config")?
            }
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.sim.seed = seed;
        }
        Ok(cfg)
    }
}

pub struct Dataset {
    pub train_images: idx::ImageSet,
    pub train_labels: Vec<u8>,
    pub test_images: idx::ImageSet,
    pub test_labels: Vec<u8>,
}

fn read_idx_images(dir: &Path, name: &str) -> Result<idx::ImageSet> {
    let path = dir.join(name);
    let bytes =
        std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
    idx::parse_images(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn read_idx_labels(dir: &Path, name: &str) -> Result<Vec<u8>> {
    let path = dir.join(name);
    let bytes =
        std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
    idx::parse_labels(&bytes).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let ds = Dataset {
        train_images: read_idx_images(dir, "train-images-idx3-ubyte")?,
        train_labels: read_idx_labels(dir, "train-labels-idx1-ubyte")?,
        test_images: read_idx_images(dir, "t10k-images-idx3-ubyte")?,
        test_labels: read_idx_labels(dir, "t10k-labels-idx1-ubyte")?,
    };
    anyhow::ensure!(
        ds.train_images.len() == ds.train_labels.len(),
        "train image/label counts differ: {} vs {}",
        ds.train_images.len(),
        ds.train_labels.len()
    );
    anyhow::ensure!(
        ds.test_images.len() == ds.test_labels.len(),
        "test image/label counts differ: {} vs {}",
        ds.test_images.len(),
        ds.test_labels.len()
    );
    Ok(ds)
}

/// Take the first `count` items (whole set when count = 0).
pub fn subset<'a>(
    images: &'a idx::ImageSet,
    labels: &'a [u8],
    count: usize,
) -> (Vec<&'a [u8]>, &'a [u8]) {
    let n = if count == 0 {
        images.len()
    } else {
        count.min(images.len())
    };
    ((0..n).map(|i| images.image(i)).collect(), &labels[..n])
}

/// Buffered output file: contents accumulate in memory and land on
/// disk only at commit, so failed commands leave no partial results.
pub struct OutFile {
    path: PathBuf,
    pub buf: String,
}

impl OutFile {
    pub fn new(dir: &Path, name: &str) -> Self {
        Self {
            path: dir.join(name),
            buf: String::new(),
        }
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.buf.push_str(s.as_ref());
        self.buf.push('\n');
    }

    pub fn commit(self) -> Result<()> {
        if let Some(parent) = self.path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&self.path, self.buf.as_bytes())
            .with_context(|| format!("writing {}", self.path.display()))?;
        Ok(())
    }
}
