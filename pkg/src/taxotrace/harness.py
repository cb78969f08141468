"""Experiment runner: providers × output spaces at fixed k, end to end.

Each (provider, taxonomy) cell classifies the dataset and evaluates the
result independently; one crashing cell marks itself aborted without
killing the rest. All deterministic artifacts (predictions, reports,
summaries) are byte-stable across reruns; wall-clock timing lives in a
separate per-cell meta file outside the determinism contract.
"""

from __future__ import annotations

import json
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .classifier import (
    Artifact,
    ClassificationFailure,
    classify_dataset,
    read_artifacts_jsonl,
    write_predictions_jsonl,
)
from .embedding import EmbeddingProviderConfig, create_provider
from .metrics import (
    BetaParams,
    EvalReport,
    GroundTruth,
    compute_beta,
    evaluate,
    read_ground_truth_jsonl,
    render_table,
    report_to_dict,
    truths_for_taxonomy,
    write_summary_csv,
)
from .taxonomy import Taxonomy, load_taxonomy

EMBED_URL_ENV = "TAXOTRACE_EMBED_URL"


class ConfigError(ValueError):
    """A run configuration is unusable."""


@dataclass
class RunConfig:
    taxonomies: dict[str, Path]
    dataset: Path
    ground_truth: Path
    providers: list[EmbeddingProviderConfig]
    k: list[int]
    output_dir: Path
    beta: float | None = None
    seed: int = 0
    parallelism: int = 1

    def __post_init__(self):
        if not self.taxonomies:
            raise ConfigError("config needs at least one taxonomy")
        if not self.providers:
            raise ConfigError("config needs at least one provider")
        if not self.k or any(k < 1 for k in self.k):
            raise ConfigError(f"k values must be >= 1, got {self.k}")
        for path in (self.dataset, self.ground_truth, *self.taxonomies.values()):
            if not Path(path).exists():
                raise ConfigError(f"referenced file does not exist: {path}")

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        """Load a JSON config; relative paths resolve against the file."""
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        base = path.parent

        def resolve(p: str) -> Path:
            candidate = Path(p)
            return candidate if candidate.is_absolute() else base / candidate

        seed = int(raw.get("seed", 0))
        providers = []
        for spec in raw.get("providers", []):
            spec = dict(spec)
            spec.setdefault("seed", seed)
            if spec.get("kind") == "http" and os.environ.get(EMBED_URL_ENV):
                spec["endpoint"] = os.environ[EMBED_URL_ENV]
            if spec.get("cache_path"):
                spec["cache_path"] = str(resolve(spec["cache_path"]))
            try:
                providers.append(EmbeddingProviderConfig(**spec))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad provider entry {spec}: {exc}") from exc

        k_raw = raw.get("k", 15)
        k = [int(v) for v in k_raw] if isinstance(k_raw, list) else [int(k_raw)]
        beta = raw.get("beta")
        try:
            return cls(
                taxonomies={name: resolve(p) for name, p in raw["taxonomies"].items()},
                dataset=resolve(raw["dataset"]),
                ground_truth=resolve(raw["ground_truth"]),
                providers=providers,
                k=k,
                output_dir=resolve(raw.get("output_dir", "out")),
                beta=float(beta) if beta is not None else None,
                seed=seed,
                parallelism=int(raw.get("parallelism", 1)),
            )
        except KeyError as exc:
            raise ConfigError(f"config {path} is missing required field {exc}") from exc


@dataclass
class CellResult:
    taxonomy_name: str
    model_id: str
    k: int
    report: EvalReport | None = None
    error: str | None = None
    predictions_path: Path | None = None
    failures: list[ClassificationFailure] = field(default_factory=list)
    dropped_no_truth: int = 0
    elapsed_seconds: float = 0.0

    @property
    def aborted(self) -> bool:
        return self.error is not None


@dataclass
class RunResult:
    cells: list[CellResult]
    summary_csv: Path
    summary_txt: Path
    betas: dict[str, float]
    derived_betas: dict[str, BetaParams] | None = None

    @property
    def ok(self) -> bool:
        return all(not cell.aborted for cell in self.cells)


def derive_beta(
    truths: Sequence[GroundTruth],
    taxonomies: dict[str, Taxonomy],
) -> dict[str, BetaParams]:
    """Per-space recall weights from the ground truth.

    l_head counts artifacts with at least one label in the space, l_tail
    is the space's class count, lambda the total labels assigned there.
    """
    out: dict[str, BetaParams] = {}
    for name in sorted(taxonomies):
        merged = truths_for_taxonomy(truths, name)
        labeled = {aid: labels for aid, labels in merged.items() if labels}
        lambda_ = sum(len(labels) for labels in labeled.values())
        if lambda_ == 0:
            raise ValueError(f"output space {name!r} has no true labels; beta is undefined")
        out[name] = compute_beta(len(labeled), len(taxonomies[name]), lambda_)
    return out


def format_beta_table(betas: dict[str, BetaParams]) -> str:
    header = ("OS", "l_head", "l_tail", "lambda", "beta")
    rows = [header]
    for name in sorted(betas):
        b = betas[name]
        rows.append((name, str(b.l_head), str(b.l_tail), str(b.lambda_), str(b.beta_rounded)))
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for idx, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _safe_dirname(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name) or "_"


def _run_cell(
    taxonomy: Taxonomy,
    artifacts: Sequence[Artifact],
    truths: Sequence[GroundTruth],
    provider_config: EmbeddingProviderConfig,
    k: int,
    beta: float,
    cell_dir: Path,
) -> CellResult:
    cell = CellResult(taxonomy_name=taxonomy.name, model_id=provider_config.model_id, k=k)
    started = time.perf_counter()
    try:
        cell_dir.mkdir(parents=True, exist_ok=True)
        provider = create_provider(provider_config)
        run = classify_dataset(artifacts, taxonomy, provider, k)
        cell.failures = run.failures
        predictions_path = cell_dir / "predictions.jsonl"
        write_predictions_jsonl(predictions_path, run.predictions)
        cell.predictions_path = predictions_path

        truth_map = truths_for_taxonomy(truths, taxonomy.name)
        scored = [p for p in run.predictions if p.artifact_id in truth_map]
        cell.dropped_no_truth = len(run.predictions) - len(scored)
        cell.report = evaluate(scored, truth_map, taxonomy, beta, model_id=provider.model_id, k=k)
        report_doc = report_to_dict(cell.report)
        report_doc["failures"] = [
            {"artifact_id": f.artifact_id, "error": f.error} for f in run.failures
        ]
        report_doc["dropped_no_truth"] = cell.dropped_no_truth
        (cell_dir / "report.json").write_text(
            json.dumps(report_doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
    except Exception as exc:  # cell isolation: any failure aborts only this cell
        cell.error = f"{type(exc).__name__}: {exc}"
    cell.elapsed_seconds = time.perf_counter() - started
    try:
        cell_dir.mkdir(parents=True, exist_ok=True)
        (cell_dir / "meta.json").write_text(
            json.dumps(
                {
                    "taxonomy": cell.taxonomy_name,
                    "model": cell.model_id,
                    "k": cell.k,
                    "elapsed_seconds": cell.elapsed_seconds,
                    "aborted": cell.aborted,
                },
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )
    except OSError:
        pass
    return cell


def run(config: RunConfig) -> RunResult:
    """Execute every (provider, taxonomy, k) cell and write the summaries."""
    taxonomies = {
        name: load_taxonomy(path, name=name) for name, path in sorted(config.taxonomies.items())
    }
    artifacts = read_artifacts_jsonl(config.dataset)
    truths = read_ground_truth_jsonl(config.ground_truth)

    derived: dict[str, BetaParams] | None = None
    if config.beta is not None:
        betas = {name: config.beta for name in taxonomies}
    else:
        derived = derive_beta(truths, taxonomies)
        betas = {name: params.beta for name, params in derived.items()}

    multi_k = len(config.k) > 1
    jobs = []
    for tax_name in sorted(taxonomies):
        for provider_config in config.providers:
            for k in config.k:
                cell_dir = config.output_dir / _safe_dirname(tax_name) / _safe_dirname(
                    provider_config.model_id
                )
                if multi_k:
                    cell_dir = cell_dir / f"k{k}"
                jobs.append((taxonomies[tax_name], provider_config, k, cell_dir))

    def execute(job) -> CellResult:
        taxonomy, provider_config, k, cell_dir = job
        return _run_cell(
            taxonomy, artifacts, truths, provider_config, k,
            betas[taxonomy.name], cell_dir,
        )

    if config.parallelism > 1:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            cells = list(pool.map(execute, jobs))
    else:
        cells = [execute(job) for job in jobs]

    config.output_dir.mkdir(parents=True, exist_ok=True)
    reports = [cell.report for cell in cells if cell.report is not None]
    summary_csv = config.output_dir / "summary.csv"
    write_summary_csv(summary_csv, reports)

    aborted = sorted(
        (cell for cell in cells if cell.aborted),
        key=lambda c: (c.taxonomy_name, c.model_id, c.k),
    )
    lines = ["taxotrace run summary", ""]
    if derived is not None:
        lines += ["derived beta per output space:", format_beta_table(derived)]
    lines.append(render_table(reports))
    if aborted:
        lines.append("aborted cells:")
        lines.extend(
            f"  {cell.taxonomy_name}/{cell.model_id}@k={cell.k}: {cell.error}" for cell in aborted
        )
    else:
        lines.append("aborted cells: none")
    summary_txt = config.output_dir / "summary.txt"
    summary_txt.write_text("\n".join(lines) + "\n", encoding="utf-8")

    return RunResult(
        cells=cells,
        summary_csv=summary_csv,
        summary_txt=summary_txt,
        betas=betas,
        derived_betas=derived,
    )
