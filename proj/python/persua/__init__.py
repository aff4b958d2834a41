"""Persuasion-detection pipeline: text features, a multi-label linear
classifier, agreement metrics, and ad-trend statistics, all backed by the
C++ core."""

from persua._core import (
    DegenerateInputError,
    DivergenceError,
    IoError,
    ParseError,
    PearsonResult,
    PrepConfig,
    TextModel,
    TrendResult,
    ValidationError,
    Vocabulary,
    accuracy,
    asymmetric_bce,
    average_tfidf,
    balanced_beta,
    build_vocabulary,
    calibrate,
    canonical_bigrams,
    f1_macro,
    f1_micro,
    fleiss_kappa,
    mann_kendall,
    moving_average,
    normalize,
    pearson,
    preprocess,
    split_sentences,
    tfidf,
    tokenize,
    train_text_model,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateInputError",
    "DivergenceError",
    "IoError",
    "ParseError",
    "PearsonResult",
    "PrepConfig",
    "TextModel",
    "TrendResult",
    "ValidationError",
    "Vocabulary",
    "accuracy",
    "asymmetric_bce",
    "average_tfidf",
    "balanced_beta",
    "build_vocabulary",
    "calibrate",
    "canonical_bigrams",
    "f1_macro",
    "f1_micro",
    "fleiss_kappa",
    "mann_kendall",
    "moving_average",
    "normalize",
    "pearson",
    "preprocess",
    "split_sentences",
    "tfidf",
    "tokenize",
    "train_text_model",
]
