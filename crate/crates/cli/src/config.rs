//! JSON run configuration. Relative paths resolve against the directory
//! holding the config file.

use std::path::{Path, PathBuf};

use conclique::sampler::{InitPolicy, OrderPolicy};
use conclique::{io, LatticeKind, ModelSpec, NeighborhoodGraph};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologyConfig {
    Lattice {
        rows: usize,
        cols: usize,
        #[serde(default = "four")]
        neighborhood: LatticeKind,
    },
    Incidence {
        vertices: usize,
    },
    EdgeList {
        path: PathBuf,
        #[serde(default)]
        n: Option<usize>,
    },
    GraphJson {
        path: PathBuf,
    },
    /// Sites adjacent when their distance is at least `threshold`; the
    /// file holds the full distance matrix as CSV.
    Threshold {
        path: PathBuf,
        threshold: f64,
    },
}

fn four() -> LatticeKind {
    LatticeKind::Four
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoverConfig {
    Analytic,
    #[default]
    Dsatur,
    WelshPowell,
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerChoice {
    #[default]
    Cgs,
    SingleSite,
}

impl SamplerChoice {
    pub fn name(self) -> &'static str {
        match self {
            SamplerChoice::Cgs => "cgs",
            SamplerChoice::SingleSite => "single_site",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    /// Total iterations including burn-in. Not used by `gof`, which runs
    /// `burn_in + simulations · thinning`.
    #[serde(default)]
    pub iterations: Option<u64>,
    #[serde(default)]
    pub burn_in: u64,
    #[serde(default = "one")]
    pub thinning: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "random_init")]
    pub init: InitPolicy,
    #[serde(default)]
    pub order: OrderPolicy,
}

impl Default for ChainSection {
    fn default() -> Self {
        Self {
            iterations: None,
            burn_in: 0,
            thinning: 1,
            seed: 0,
            init: random_init(),
            order: OrderPolicy::Fixed,
        }
    }
}

fn one() -> u64 {
    1
}

fn random_init() -> InitPolicy {
    InitPolicy::RandomFromMarginal
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleFormat {
    #[default]
    Csv,
    Binary,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub samples: String,
    pub format: SampleFormat,
    pub cover: String,
    pub timing: String,
    pub benchmark: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("."),
            samples: "samples.csv".into(),
            format: SampleFormat::Csv,
            cover: "cover.json".into(),
            timing: "timing.json".into(),
            benchmark: "benchmark.csv".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSection {
    /// Lattice side lengths `m` (m × m sites) or incidence vertex counts.
    pub sizes: Vec<usize>,
    pub iterations: Vec<u64>,
    pub replicates: usize,
    #[serde(default = "both_samplers")]
    pub samplers: Vec<SamplerChoice>,
}

fn both_samplers() -> Vec<SamplerChoice> {
    vec![SamplerChoice::Cgs, SamplerChoice::SingleSite]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GofSection {
    /// Sample CSV whose first row is the observed field.
    pub observed: PathBuf,
    #[serde(default = "edge_pair")]
    pub statistic: String,
    pub simulations: u64,
}

fn edge_pair() -> String {
    "edge_pair".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    topology: TopologyConfig,
    #[serde(default)]
    model: Option<Value>,
    #[serde(default)]
    cover: CoverConfig,
    #[serde(default)]
    sampler: SamplerChoice,
    #[serde(default)]
    chain: Option<ChainSection>,
    #[serde(default)]
    output: OutputSection,
    #[serde(default)]
    benchmark: Option<BenchmarkSection>,
    #[serde(default)]
    gof: Option<GofSection>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub topology: TopologyConfig,
    model: Option<Value>,
    pub cover: CoverConfig,
    pub sampler: SamplerChoice,
    pub chain: Option<ChainSection>,
    pub output: OutputSection,
    pub benchmark: Option<BenchmarkSection>,
    pub gof: Option<GofSection>,
    base_dir: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base_dir)
    }

    pub fn parse(text: &str, base_dir: PathBuf) -> Result<Self, CliError> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        Ok(Self {
            topology: raw.topology,
            model: raw.model,
            cover: raw.cover,
            sampler: raw.sampler,
            chain: raw.chain,
            output: raw.output,
            benchmark: raw.benchmark,
            gof: raw.gof,
            base_dir,
        })
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        self.base_dir.join(path)
    }

    pub fn build_graph(&self) -> Result<NeighborhoodGraph, CliError> {
        Ok(match &self.topology {
            TopologyConfig::Lattice {
                rows,
                cols,
                neighborhood,
            } => conclique::build_lattice(*rows, *cols, *neighborhood)?,
            TopologyConfig::Incidence { vertices } => conclique::build_incidence(*vertices)?,
            TopologyConfig::EdgeList { path, n } => io::read_edge_list(&self.existing(path)?, *n)?,
            TopologyConfig::GraphJson { path } => io::read_graph_json(&self.existing(path)?)?,
            TopologyConfig::Threshold { path, threshold } => {
                let d = io::read_distance_matrix_csv(io::open(&self.existing(path)?)?)?;
                conclique::build_threshold_graph(&d, *threshold)?
            }
        })
    }

    fn existing(&self, path: &Path) -> Result<PathBuf, CliError> {
        let p = self.resolve(path);
        if p.is_file() {
            Ok(p)
        } else {
            Err(CliError::Config(format!("file not found: {}", p.display())))
        }
    }

    /// The model, read inline or from a JSON file named by a string. LSGM
    /// models may name `covariates_file` and `weights_file` CSVs in place of
    /// inline `covariates` and `weights`.
    pub fn model(&self, n: usize) -> Result<ModelSpec, CliError> {
        let value = match &self.model {
            None => return Err(CliError::Config("config has no model".into())),
            Some(Value::String(path)) => {
                let p = self.existing(Path::new(path))?;
                let text = std::fs::read_to_string(&p).map_err(conclique::Error::from)?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            Some(v) => v.clone(),
        };
        let Value::Object(mut map) = value else {
            return Err(CliError::Config("model must be a JSON object".into()));
        };
        if let Some(v) = map.remove("covariates_file") {
            let path = v
                .as_str()
                .ok_or_else(|| CliError::Config("covariates_file must be a path".into()))?;
            let cov = io::read_covariates_csv(io::open(&self.existing(Path::new(path))?)?, n)?;
            map.insert("covariates".into(), serde_json::to_value(cov).unwrap());
        }
        if let Some(v) = map.remove("weights_file") {
            let path = v
                .as_str()
                .ok_or_else(|| CliError::Config("weights_file must be a path".into()))?;
            let w = io::read_weights_csv(io::open(&self.existing(Path::new(path))?)?)?;
            map.insert("weights".into(), serde_json::to_value(w).unwrap());
        }
        serde_json::from_value(Value::Object(map))
            .map_err(|e| CliError::Config(format!("model: {e}")))
    }

    pub fn output_dir(&self, override_dir: Option<&Path>) -> PathBuf {
        match override_dir {
            Some(d) => d.to_path_buf(),
            None => self.resolve(&self.output.dir),
        }
    }
}
