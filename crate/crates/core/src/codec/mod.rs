//! Center-based detection codec: ground-truth target maps keyed on projected
//! 3D centers, the training losses over them, and decoding of predicted maps
//! into scored camera-frame detections.

mod boxes;
mod decode;
pub mod heatmap;
pub mod loss;
mod multibin;
mod targets;
mod tensor_file;

pub use boxes::{wrap_angle, Box2D, Box3D, Frame, ObjectClass, NUM_CLASSES};
pub use decode::{
    decode, object_confidence, DecodeConfig, DecodeOutput, Detection, Dropped, DEFAULT_SCORE_THRESHOLD,
    DEFAULT_TOP_K,
};
pub use loss::{
    bin_ce_loss, compute_losses, focal_loss, l1_loss, laplacian_uncertainty_loss, LossBreakdown, LossWeights,
};
pub use multibin::{MultiBinCodec, DEFAULT_NUM_BINS};
pub use targets::{encode_scene, EncodeOutcome, GridSpec, SkipReason, TargetMaps};
pub use tensor_file::{DepthPair, TensorEntry, TensorFile, TENSOR_FORMAT_VERSION, TENSOR_MAGIC};
