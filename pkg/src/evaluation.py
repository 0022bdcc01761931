"""Ground-truth resolution and AP / OT-F1 / OT-Accuracy metrics.

Scores are ranked in descending order. Objects sharing a score form one
threshold step, so ties never depend on input order and AP of a constant
scorer equals the positive prevalence.
"""

import logging
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics import average_precision_score

from .kinds import AgentKind, GroundTruthLabel
from .models.annotations import AnnotationSet, EvalResult, PRPoint
from .models.report import BatchReport, ObjectRecord
from .scoring import BASELINES
from .storage import load_model
from .utils.config import EvalConfig
from .utils.errors import EvaluationError

logger = logging.getLogger(__name__)

ObjectKey = Tuple[str, str]


class ThresholdMetrics(NamedTuple):
    """Best F1 and best accuracy over all thresholds, with the full trace."""

    ot_f1: float
    ot_accuracy: float
    ot_f1_threshold: float
    ot_accuracy_threshold: float
    pr_trace: List[PRPoint]


def resolve_ground_truth(
    ann: AnnotationSet, config: Optional[EvalConfig] = None
) -> Dict[ObjectKey, GroundTruthLabel]:
    """Map annotator counts to Positive / Negative / Ignored labels.

    count >= theta1 is Positive, count < theta2 is Negative, anything in
    between is Ignored.
    """
    config = config or EvalConfig()
    labels: Dict[ObjectKey, GroundTruthLabel] = {}
    for record in ann.records:
        if record.annotator_count > record.total_annotators:
            raise EvaluationError(
                f"{record.scene_id}/{record.object_id}: annotator_count exceeds "
                f"total_annotators"
            )
        if record.annotator_count >= config.theta1:
            labels[record.key] = GroundTruthLabel.POSITIVE
        elif record.annotator_count < config.theta2:
            labels[record.key] = GroundTruthLabel.NEGATIVE
        else:
            labels[record.key] = GroundTruthLabel.IGNORED
    return labels


def _prepare(
    scores: Sequence[float], labels: Sequence[GroundTruthLabel]
) -> Tuple[np.ndarray, np.ndarray]:
    """Drop Ignored entries and sort (stable) by descending score."""
    if len(scores) != len(labels):
        raise EvaluationError(
            f"scores and labels differ in length: {len(scores)} vs {len(labels)}"
        )
    keep = [i for i, label in enumerate(labels) if label != GroundTruthLabel.IGNORED]
    values = np.array([scores[i] for i in keep], dtype=np.float64)
    positive = np.array(
        [labels[i] == GroundTruthLabel.POSITIVE for i in keep], dtype=bool
    )
    order = np.argsort(-values, kind="stable")
    return values[order], positive[order]


def _group_counts(
    values: np.ndarray, positive: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distinct thresholds (descending) with cumulative TP/FP at each."""
    tp = np.cumsum(positive)
    fp = np.cumsum(~positive)
    # last index of every run of equal scores
    ends = np.flatnonzero(np.append(values[1:] != values[:-1], True))
    return values[ends], tp[ends], fp[ends]


def average_precision(
    scores: Sequence[float], labels: Sequence[GroundTruthLabel]
) -> float:
    """Non-interpolated average precision over the ranked, non-ignored objects.

    Raises:
        EvaluationError: if no Positive object remains
    """
    values, positive = _prepare(scores, labels)
    if not positive.any():
        raise EvaluationError("average precision needs at least one positive")
    # sklearn steps once per distinct score, so tied objects share one step
    return float(average_precision_score(positive, values))


def optimal_threshold_metrics(
    scores: Sequence[float], labels: Sequence[GroundTruthLabel]
) -> ThresholdMetrics:
    """Best F1 and best accuracy over every score threshold.

    Candidates are the distinct scores plus a sentinel above the maximum
    (predict nothing). An object is predicted important when its score is at
    least the threshold. The trace runs from the sentinel down; ties in the
    optimum go to the higher threshold.
    """
    values, positive = _prepare(scores, labels)
    n = len(values)
    if n == 0:
        raise EvaluationError("no objects to evaluate")
    n_positive = int(positive.sum())
    n_negative = n - n_positive

    thresholds, tp, fp = _group_counts(values, positive)
    thresholds = np.concatenate(([float(values[0]) + 1.0], thresholds))
    tp = np.concatenate(([0], tp))
    fp = np.concatenate(([0], fp))

    trace: List[PRPoint] = []
    for threshold, tp_i, fp_i in zip(thresholds, tp, fp):
        tp_i, fp_i = int(tp_i), int(fp_i)
        fn_i = n_positive - tp_i
        tn_i = n_negative - fp_i
        precision = tp_i / (tp_i + fp_i) if tp_i + fp_i > 0 else 1.0
        recall = tp_i / n_positive if n_positive > 0 else 0.0
        f1 = 2 * tp_i / (2 * tp_i + fp_i + fn_i) if tp_i > 0 else 0.0
        accuracy = (tp_i + tn_i) / n
        trace.append(
            PRPoint(
                threshold=float(threshold),
                precision=precision,
                recall=recall,
                f1=f1,
                accuracy=accuracy,
            )
        )

    best_f1 = max(range(len(trace)), key=lambda i: (trace[i].f1, -i))
    best_acc = max(range(len(trace)), key=lambda i: (trace[i].accuracy, -i))
    return ThresholdMetrics(
        ot_f1=trace[best_f1].f1,
        ot_accuracy=trace[best_acc].accuracy,
        ot_f1_threshold=trace[best_f1].threshold,
        ot_accuracy_threshold=trace[best_acc].threshold,
        pr_trace=trace,
    )


def object_score(record: ObjectRecord, method: str = "ours") -> float:
    """The score one evaluation method ranks an object by.

    ``ours`` ranks counterfactually scored objects by importance and
    distance-scored pedestrians by normalized ps; ``removal`` and
    ``velocity`` keep a single normalized component; ``everything`` and
    ``inverse_distance`` are the geometric baselines.
    """
    if method in BASELINES:
        return BASELINES[method](record.distance)

    if record.counterfactual:
        fields = {"ours": "importance", "removal": "norm_rs", "velocity": "norm_vs"}
        if method not in fields:
            raise EvaluationError(f"Unknown scoring method: {method}")
        value = getattr(record, fields[method])
    else:
        if method not in ("ours", "removal", "velocity"):
            raise EvaluationError(f"Unknown scoring method: {method}")
        value = record.norm_ps

    if value is None:
        raise EvaluationError(
            f"Object '{record.id}' has no normalized score; was the report normalized?"
        )
    return float(value)


def collect_pairs(
    report: BatchReport, ann: AnnotationSet, config: Optional[EvalConfig] = None
) -> Tuple[List[float], List[GroundTruthLabel]]:
    """Join report scores with resolved labels, applying the category filter."""
    config = config or EvalConfig()
    records: Dict[ObjectKey, ObjectRecord] = {
        (scene.scene_id, record.id): record
        for scene in report.scenes
        for record in scene.objects
    }
    labels = resolve_ground_truth(ann, config)

    missing = sorted(key for key in labels if key not in records)
    if missing:
        listed = ", ".join(f"{scene_id}/{object_id}" for scene_id, object_id in missing)
        raise EvaluationError(f"Annotated objects missing from the report: {listed}")

    unannotated = len(records) - len(labels)
    if unannotated:
        logger.debug(f"{unannotated} scored objects have no annotation and are skipped")

    scores: List[float] = []
    pooled: List[GroundTruthLabel] = []
    for record in ann.records:
        scored = records[record.key]
        if config.category_filter is not None and scored.kind != config.category_filter:
            continue
        scores.append(object_score(scored, config.method))
        pooled.append(labels[record.key])

    if not scores:
        raise EvaluationError("no objects after filter")
    return scores, pooled


def evaluate_dataset(
    report: BatchReport, ann: AnnotationSet, config: Optional[EvalConfig] = None
) -> EvalResult:
    """Pool every annotated object of the batch and compute the three metrics."""
    config = config or EvalConfig()
    scores, labels = collect_pairs(report, ann, config)

    ap = average_precision(scores, labels)
    metrics = optimal_threshold_metrics(scores, labels)
    counts = {label: labels.count(label) for label in GroundTruthLabel}
    logger.info(
        f"Evaluated {len(scores)} objects ({config.method}): AP={ap:.4f} "
        f"OT-F1={metrics.ot_f1:.4f} OT-Acc={metrics.ot_accuracy:.4f}"
    )

    return EvalResult(
        ap=ap,
        ot_f1=metrics.ot_f1,
        ot_accuracy=metrics.ot_accuracy,
        ot_f1_threshold=metrics.ot_f1_threshold,
        ot_accuracy_threshold=metrics.ot_accuracy_threshold,
        n_positive=counts[GroundTruthLabel.POSITIVE],
        n_negative=counts[GroundTruthLabel.NEGATIVE],
        n_ignored=counts[GroundTruthLabel.IGNORED],
        category_filter=config.category_filter,
        method=config.method,
        pr_trace=tuple(metrics.pr_trace),
    )


def category_from_flag(value: Optional[str]) -> Optional[AgentKind]:
    """Translate the CLI's plural category names into an AgentKind."""
    if value is None:
        return None
    mapping = {"vehicles": AgentKind.VEHICLE, "pedestrians": AgentKind.PEDESTRIAN}
    if value not in mapping:
        raise ValueError(f"category must be 'vehicles' or 'pedestrians', got '{value}'")
    return mapping[value]


def load_annotations(path: str) -> AnnotationSet:
    """Load an annotation export (``{format_version, records: [...]}``)."""
    return load_model(path, AnnotationSet)
