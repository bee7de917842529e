"""Recall distortion under neural-network pruning: Python bindings.

The heavy lifting lives in the `_prunelab` extension (train / prune /
metrics / statistics); this package just re-exports it.
"""

from _prunelab import (  # noqa: F401
    ConfidenceInterval,
    Dataset,
    Model,
    Profile,
    PrunelabError,
    TestResult,
    alpha,
    alpha_pooled,
    analyze,
    bonferroni,
    build_model,
    ci_mean,
    classify_ci,
    confusion,
    incomplete_beta,
    intensification,
    load_idx,
    load_model,
    loss,
    precision_fscore,
    predict,
    profile,
    prune,
    prune_and_finetune,
    recall_variance,
    render_p_value,
    report,
    run_experiment,
    synth_balanced,
    t_cdf,
    t_independent,
    t_paired,
    t_quantile,
    train,
)

__all__ = [
    "ConfidenceInterval",
    "Dataset",
    "Model",
    "Profile",
    "PrunelabError",
    "TestResult",
    "alpha",
    "alpha_pooled",
    "analyze",
    "bonferroni",
    "build_model",
    "ci_mean",
    "classify_ci",
    "confusion",
    "incomplete_beta",
    "intensification",
    "load_idx",
    "load_model",
    "loss",
    "precision_fscore",
    "predict",
    "profile",
    "prune",
    "prune_and_finetune",
    "recall_variance",
    "render_p_value",
    "report",
    "run_experiment",
    "synth_balanced",
    "t_cdf",
    "t_independent",
    "t_paired",
    "t_quantile",
    "train",
]
