"""Evaluation metrics: micro P/R/F1, weighted F-score, and label distance.

Beyond the standard IR trio this module carries the two pieces that make
hierarchical multi-label evaluation informative: a recall-weighted F-score
whose weight derives from the ratio of potential to true answers, and a
normalized taxonomy-hop distance that scores how far wrong predictions
land instead of just hit-or-miss.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .classifier import Prediction
from .taxonomy import Taxonomy

CSV_HEADER = "taxonomy,model,k,P,R,F1,Fbeta,beta,Da,Dn,Dn_pred_centric,skipped"


class MetricsError(ValueError):
    """Inconsistent evaluation inputs."""


@dataclass(frozen=True)
class GroundTruth:
    """Expert-assigned label set for one artifact in one output space."""

    artifact_id: str
    taxonomy_name: str
    true_labels: frozenset[str]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True)
class BetaParams:
    """Recall weight derived from a ground truth: potential over true answers.

    l is the number of potential labels (dataset size times class count)
    and lambda_ the number of labels actually assigned; beta = l / lambda_
    computed as an exact ratio before float conversion.
    """

    l_head: int
    l_tail: int
    l: int
    lambda_: int
    beta: float

    @property
    def beta_rounded(self) -> int:
        return round(self.beta)


@dataclass(frozen=True)
class LabelMatch:
    true_id: str
    predicted_id: str
    hops: int


@dataclass(frozen=True)
class DistanceResult:
    """Mean taxonomy-hop distance, absolute and normalized by 2×depth."""

    d_abs: float
    d_norm: float
    d_max: int
    per_label: tuple[LabelMatch, ...] = ()


@dataclass(frozen=True)
class ArtifactDistance:
    artifact_id: str
    d_abs: float
    d_norm: float
    matches: tuple[LabelMatch, ...]


@dataclass(frozen=True)
class EvalReport:
    taxonomy_name: str
    model_id: str
    k: int
    beta: float
    precision: float
    recall: float
    f1: float
    f_beta: float
    counts: ConfusionCounts
    distance: DistanceResult | None
    d_abs_pred_centric: float | None
    d_norm_pred_centric: float | None
    skipped: int
    evaluated: int
    per_artifact_distance: tuple[ArtifactDistance, ...] = ()


# -- precision / recall / F ------------------------------------------------


def confusion_counts(
    predictions: Sequence[Prediction],
    truths_by_artifact: Mapping[str, frozenset[str]],
) -> ConfusionCounts:
    """Micro counts over artifacts; truth-only artifacts count as misses."""
    tp = fp = fn = 0
    predicted_ids = set()
    for prediction in predictions:
        if prediction.artifact_id not in truths_by_artifact:
            raise MetricsError(
                f"prediction references unknown artifact {prediction.artifact_id!r} "
                "(no ground-truth record)"
            )
        predicted_ids.add(prediction.artifact_id)
        predicted = set(prediction.label_ids())
        true = truths_by_artifact[prediction.artifact_id]
        tp += len(predicted & true)
        fp += len(predicted - true)
        fn += len(true - predicted)
    for artifact_id, true in truths_by_artifact.items():
        if artifact_id not in predicted_ids:
            fn += len(true)
    return ConfusionCounts(tp=tp, fp=fp, fn=fn)


def precision_recall_f1(
    predictions: Sequence[Prediction],
    truths_by_artifact: Mapping[str, frozenset[str]],
) -> tuple[float, float, float]:
    """Micro-averaged P, R and their harmonic mean; degenerate cases are 0."""
    c = confusion_counts(predictions, truths_by_artifact)
    precision = c.tp / (c.tp + c.fp) if (c.tp + c.fp) else 0.0
    recall = c.tp / (c.tp + c.fn) if (c.tp + c.fn) else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
    return precision, recall, f1


def compute_beta(l_head: int, l_tail: int, lambda_: int) -> BetaParams:
    """Exact-rational beta = (l_head × l_tail) / lambda_."""
    if l_head <= 0 or l_tail <= 0:
        raise ValueError(f"l_head and l_tail must be positive, got {l_head}, {l_tail}")
    if lambda_ <= 0:
        raise ValueError(f"beta is undefined for lambda = {lambda_}; need at least one true label")
    l = l_head * l_tail
    return BetaParams(
        l_head=l_head,
        l_tail=l_tail,
        l=l,
        lambda_=lambda_,
        beta=float(Fraction(l, lambda_)),
    )


def f_beta(precision: float, recall: float, beta: float) -> float:
    """Weighted F-score; beta > 1 shifts the emphasis toward recall."""
    if not 0.0 <= precision <= 1.0 or not 0.0 <= recall <= 1.0:
        raise ValueError(f"precision and recall must be in [0,1], got {precision}, {recall}")
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if precision == 0.0 and recall == 0.0:
        return 0.0
    b2 = beta * beta
    return (1 + b2) * precision * recall / (b2 * precision + recall)


# -- label distance ----------------------------------------------------------


def _nearest(tax: Taxonomy, anchor: str, candidates: Sequence[str]) -> tuple[str, int]:
    best_id = None
    best_hops = None
    for candidate in candidates:
        hops = tax.hop_distance(candidate, anchor)
        if best_hops is None or hops < best_hops or (hops == best_hops and candidate < best_id):
            best_id, best_hops = candidate, hops
    return best_id, best_hops


def label_distance(
    tax: Taxonomy,
    predicted: Iterable[str],
    true: Iterable[str],
) -> DistanceResult:
    """How far the prediction sits from the truth, in taxonomy hops.

    Each true label is matched to its nearest predicted label; the hop
    counts average into D_a and normalize by the space's maximum distance
    into D_n in [0, 1]. Zero means every true label was predicted exactly.
    """
    predicted_ids = sorted(set(predicted))
    true_ids = sorted(set(true))
    if not predicted_ids:
        raise MetricsError("label distance is undefined for an empty predicted set")
    if not true_ids:
        raise MetricsError("label distance is undefined for an empty true set")
    for node_id in (*predicted_ids, *true_ids):
        tax.node(node_id)
    matches = []
    for true_id in true_ids:
        matched_id, hops = _nearest(tax, true_id, predicted_ids)
        matches.append(LabelMatch(true_id=true_id, predicted_id=matched_id, hops=hops))
    d_abs = sum(m.hops for m in matches) / len(matches)
    d_max = tax.max_distance()
    return DistanceResult(
        d_abs=d_abs,
        d_norm=d_abs / d_max,
        d_max=d_max,
        per_label=tuple(matches),
    )


def _mean_nearest_hops(tax: Taxonomy, anchors: Sequence[str], candidates: Sequence[str]) -> float:
    return sum(_nearest(tax, a, candidates)[1] for a in anchors) / len(anchors)


# -- ground-truth files ------------------------------------------------------


def read_ground_truth_jsonl(path: str | Path) -> list[GroundTruth]:
    """One record per line: artifact_id, taxonomy, labels array."""
    truths = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                truths.append(
                    GroundTruth(
                        artifact_id=str(obj["artifact_id"]),
                        taxonomy_name=str(obj["taxonomy"]),
                        true_labels=frozenset(str(x) for x in obj["labels"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}: bad ground-truth record at line {lineno}: {exc}") from exc
    return truths


def truths_for_taxonomy(truths: Iterable[GroundTruth], taxonomy_name: str) -> dict[str, frozenset[str]]:
    """Truth sets for one space; duplicate artifact records merge by union."""
    merged: dict[str, frozenset[str]] = {}
    for truth in truths:
        if truth.taxonomy_name != taxonomy_name:
            continue
        merged[truth.artifact_id] = merged.get(truth.artifact_id, frozenset()) | truth.true_labels
    return merged


# -- full evaluation ---------------------------------------------------------


def evaluate(
    predictions: Sequence[Prediction],
    truths: Sequence[GroundTruth] | Mapping[str, frozenset[str]],
    tax: Taxonomy,
    beta: float,
    *,
    model_id: str | None = None,
    k: int | None = None,
) -> EvalReport:
    """Assemble every metric for one (model, output space) run.

    Distance averages over artifacts that have both a non-empty truth set
    and a prediction; everything else is excluded and counted in `skipped`.
    """
    if isinstance(truths, Mapping):
        truth_map = dict(truths)
    else:
        for truth in truths:
            if truth.taxonomy_name != tax.name:
                raise MetricsError(
                    f"ground truth for taxonomy {truth.taxonomy_name!r} "
                    f"evaluated against {tax.name!r}"
                )
        truth_map = truths_for_taxonomy(truths, tax.name)
    for prediction in predictions:
        if prediction.taxonomy_name != tax.name:
            raise MetricsError(
                f"prediction for taxonomy {prediction.taxonomy_name!r} "
                f"evaluated against {tax.name!r}"
            )
        for node_id in prediction.label_ids():
            tax.node(node_id)
    for artifact_id, labels in truth_map.items():
        for node_id in labels:
            tax.node(node_id)

    precision, recall, f1 = precision_recall_f1(predictions, truth_map)
    counts = confusion_counts(predictions, truth_map)
    fb = f_beta(precision, recall, beta)

    per_artifact: list[ArtifactDistance] = []
    pred_centric_values: list[float] = []
    for prediction in predictions:
        true = truth_map[prediction.artifact_id]
        predicted = prediction.label_ids()
        if not true or not predicted:
            continue
        result = label_distance(tax, predicted, true)
        per_artifact.append(
            ArtifactDistance(
                artifact_id=prediction.artifact_id,
                d_abs=result.d_abs,
                d_norm=result.d_norm,
                matches=result.per_label,
            )
        )
        pred_centric_values.append(_mean_nearest_hops(tax, sorted(set(predicted)), sorted(true)))

    universe = set(truth_map) | {p.artifact_id for p in predictions}
    evaluated = len(per_artifact)
    skipped = len(universe) - evaluated
    if per_artifact:
        d_abs = sum(a.d_abs for a in per_artifact) / evaluated
        d_max = tax.max_distance()
        distance = DistanceResult(d_abs=d_abs, d_norm=d_abs / d_max, d_max=d_max)
        d_abs_pred = sum(pred_centric_values) / evaluated
        d_norm_pred = d_abs_pred / d_max
    else:
        distance = None
        d_abs_pred = None
        d_norm_pred = None

    model_ids = {p.model_id for p in predictions}
    if model_id is None:
        if len(model_ids) > 1:
            raise MetricsError(f"predictions mix models {sorted(model_ids)}; pass model_id")
        model_id = next(iter(model_ids)) if model_ids else "unknown"
    if k is None:
        # Per-artifact k may legitimately vary (e.g. k = |true set|); report
        # the largest requested.
        k = max((p.k for p in predictions), default=0)

    return EvalReport(
        taxonomy_name=tax.name,
        model_id=model_id,
        k=k,
        beta=beta,
        precision=precision,
        recall=recall,
        f1=f1,
        f_beta=fb,
        counts=counts,
        distance=distance,
        d_abs_pred_centric=d_abs_pred,
        d_norm_pred_centric=d_norm_pred,
        skipped=skipped,
        evaluated=evaluated,
        per_artifact_distance=tuple(per_artifact),
    )


# -- report serialization ----------------------------------------------------


def report_to_dict(report: EvalReport) -> dict:
    distance = None
    if report.distance is not None:
        distance = {
            "d_abs": report.distance.d_abs,
            "d_norm": report.distance.d_norm,
            "d_max": report.distance.d_max,
            "pred_centric": {
                "d_abs": report.d_abs_pred_centric,
                "d_norm": report.d_norm_pred_centric,
            },
            "per_artifact": [
                {
                    "artifact_id": a.artifact_id,
                    "d_abs": a.d_abs,
                    "d_norm": a.d_norm,
                    "matches": [
                        {"true_id": m.true_id, "predicted_id": m.predicted_id, "hops": m.hops}
                        for m in a.matches
                    ],
                }
                for a in report.per_artifact_distance
            ],
        }
    return {
        "taxonomy": report.taxonomy_name,
        "model": report.model_id,
        "k": report.k,
        "beta": report.beta,
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
        "f_beta": report.f_beta,
        "counts": {"tp": report.counts.tp, "fp": report.counts.fp, "fn": report.counts.fn},
        "distance": distance,
        "evaluated": report.evaluated,
        "skipped": report.skipped,
    }


def write_report_json(path: str | Path, report: EvalReport) -> None:
    Path(path).write_text(
        json.dumps(report_to_dict(report), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )


def csv_row(report: EvalReport) -> str:
    d_abs = "" if report.distance is None else repr(report.distance.d_abs)
    d_norm = "" if report.distance is None else repr(report.distance.d_norm)
    d_norm_pred = "" if report.d_norm_pred_centric is None else repr(report.d_norm_pred_centric)
    return ",".join(
        (
            report.taxonomy_name,
            report.model_id,
            str(report.k),
            repr(report.precision),
            repr(report.recall),
            repr(report.f1),
            repr(report.f_beta),
            repr(report.beta),
            d_abs,
            d_norm,
            d_norm_pred,
            str(report.skipped),
        )
    )


def write_summary_csv(path: str | Path, reports: Sequence[EvalReport]) -> None:
    """Flat CSV, one row per (taxonomy, model, k), sorted for stable diffs."""
    ordered = sorted(reports, key=lambda r: (r.taxonomy_name, r.model_id, r.k))
    lines = [CSV_HEADER] + [csv_row(r) for r in ordered]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def render_table(reports: Sequence[EvalReport]) -> str:
    """Fixed-width text table in the P, R, F1, F_beta, D_n column order."""
    ordered = sorted(reports, key=lambda r: (r.taxonomy_name, r.model_id, r.k))
    header = ("taxonomy", "model", "k", "P", "R", "F1", "F_beta", "D_n")
    rows = [header]
    for r in ordered:
        d_norm = "-" if r.distance is None else f"{r.distance.d_norm:.2f}"
        rows.append(
            (
                r.taxonomy_name,
                r.model_id,
                str(r.k),
                f"{r.precision:.2f}",
                f"{r.recall:.2f}",
                f"{r.f1:.2f}",
                f"{r.f_beta:.2f}",
                d_norm,
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    out = []
    for idx, row in enumerate(rows):
        out.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
        if idx == 0:
            out.append("  ".join("-" * width for width in widths))
    return "\n".join(out) + "\n"
