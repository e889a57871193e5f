//! File formats: PPM images, annotation CSV, model text files and CSV outputs.

mod annotations;
mod csv;
mod model;
mod ppm;

pub use annotations::{
    load_annotations, parse_annotations, GroundTruth, GtObject, ANNOTATION_HEADER,
};
pub use csv::{
    format_curve, format_proposals, parse_curve, parse_proposals, write_curve, write_proposals,
    CURVE_HEADER, PROPOSAL_HEADER,
};
pub use model::{
    load_svm_model, parse_svm_model, save_svm_model, Calibration, SvmModel, FEATURE_LEN,
    MAX_ABS_WEIGHT, WEIGHT_FRAC_BITS, WEIGHT_SCALE, WINDOW,
};
pub use ppm::{decode_ppm, encode_ppm, load_ppm, write_ppm, RgbImage};
