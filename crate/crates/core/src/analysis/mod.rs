//! Batch and run metrics: diversity, representativeness, class bias,
//! classification quality and paired significance testing.

mod class_bias;
mod density;
mod diversity;
mod f1;
mod wilcoxon;

use serde::{Deserialize, Serialize};

pub(crate) use class_bias::mean_std;
pub use class_bias::{aggregate_entropies, kl_divergence, label_entropy, EntropyAggregates, DEFAULT_KL_EPSILON};
pub use density::{knn_density, mean_knn_distance, representativeness, DEFAULT_K, DENSITY_FLOOR};
pub use diversity::{diversity, mean_pairwise_distance, POOL_SAMPLE_ROWS};
pub use f1::{macro_f1, micro_f1};
pub use wilcoxon::{wilcoxon_signed_rank, PValueMethod, WilcoxonResult};

/// Per-batch diagnostics recorded at every iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchMetrics {
    /// `None` when the batch or pool is too small for the ratio.
    pub diversity: Option<f64>,
    /// `None` when too few unlabeled neighbors remain.
    pub representativeness: Option<f64>,
    pub label_entropy: f64,
    pub kl_to_ground_truth: f64,
    /// Wall-clock seconds spent inside the strategy's select call.
    pub selection_runtime_s: f64,
}
