"""Texture-based service-stage classification of mask micro-photographs.

The pipeline: load a photo, quantize it to a small number of gray levels,
accumulate a co-occurrence matrix, reduce it to four texture measures
(contrast, correlation, energy, homogeneity), and classify the vector
against stored labeled samples with a k-nearest-neighbor vote.
"""

from .dataset import (
    CSV_HEADER,
    MAX_DAY,
    LabeledSample,
    PhotoTriplet,
    as_training_samples,
    average_triplet,
    day_for_class,
    load_dataset,
    make_sample,
    save_dataset,
    stage_of_day,
    synth_texture,
    synthetic_samples,
)
from .errors import (
    DatasetParseError,
    DegenerateInputError,
    InvalidConfigError,
    InvalidInputError,
    InvalidModelError,
    TexstageError,
    UndefinedCorrelationError,
    ValidationError,
)
from .glcm import (
    FEATURE_NAMES,
    FeatureVector,
    Glcm,
    GlcmConfig,
    build_glcm,
    contrast,
    correlation,
    energy,
    extract_features,
    homogeneity,
    image_features,
    pair_counts,
)
from .imaging import LevelMatrix, load_gray, quantize, to_grayscale
from .knn import (
    BinaryLabel,
    Model,
    Neighbor,
    Prediction,
    StageLabel,
    SweepResult,
    SweepRow,
    TrainingSample,
    build_model,
    classify,
    distance,
    load_model,
    model_digest,
    save_model,
    sweep_k,
    to_binary,
)
from .metrics import (
    ConfusionMatrix,
    accuracy,
    confusion,
    macro_metrics,
    per_class_metrics,
    render_text,
    report_dict,
    support_weighted_means,
    weighted_binary_accuracy,
)

__version__ = "0.1.0"
