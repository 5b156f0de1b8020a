//! The combined objective and its training loop: mixup of positive/mined-
//! negative and unlabeled/unlabeled pairs, squared-error consistency to the
//! interpolated targets, a pairwise ranking margin between positive and
//! unlabeled scores, and an EMA teacher supplying the soft labels.

mod loss;
mod mix;
mod trainer;

pub use loss::{consistency_loss, margin_loss, total_loss, LossBreakdown};
pub use mix::{build_mixed_pn, build_mixed_unlabeled, mix, random_permutation, sample_lambda, MixedBatch};
pub use trainer::{default_rn_count, train, TrainedMixpul};
