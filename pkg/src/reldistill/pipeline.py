"""Staged pipeline orchestration with checkpointed artifacts and a
provenance manifest. Each stage reads the previous stage's files, writes
its own, and records input/output hashes plus the run-config hash so
incompatible artifacts cannot be mixed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import ingest_corpus, write_corpus
from .evaluation import (
    evaluate,
    extract_document,
    load_gold,
    pr_curve,
    write_pr_curve,
    write_predictions,
    write_report,
)
from .features import FeatureConfig
from .kb import load_concept_seeds, load_schema, load_triples
from .mentions import (
    MentionSets,
    build_mention_sets,
    corpus_mentions,
    read_labeled_mentions,
    read_mentions,
    write_labeled_mentions,
    write_mentions,
)
from .propagation import (
    PropagationConfig,
    VariantSpec,
    build_graph,
    multirankwalk,
    read_ranking,
    write_graph_dump,
    write_ranking,
)
from .training import (
    TrainConfig,
    build_training_set,
    distill,
    load_model,
    save_model,
    train,
)


class StageError(ValueError):
    """Missing upstream artifact or config mismatch between stages."""


@dataclass
class RunConfig:
    structured_corpus: str
    target_corpus: str
    eval_corpus: str
    schema: str
    triples: str
    concept_seeds: str
    gold: str
    variant: list[str] = field(default_factory=lambda: ["Rs", "Rt"])
    propagation: PropagationConfig = field(default_factory=PropagationConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    training: TrainConfig = field(default_factory=TrainConfig)
    sweep_n: list[int] = field(default_factory=lambda: [5, 10, 20])

    def to_dict(self) -> dict:
        return {
            "structured_corpus": self.structured_corpus,
            "target_corpus": self.target_corpus,
            "eval_corpus": self.eval_corpus,
            "schema": self.schema,
            "triples": self.triples,
            "concept_seeds": self.concept_seeds,
            "gold": self.gold,
            "variant": list(self.variant),
            "propagation": self.propagation.to_dict(),
            "features": self.features.to_dict(),
            "training": self.training.to_dict(),
            "sweep_n": list(self.sweep_n),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RunConfig":
        return cls(
            structured_corpus=obj["structured_corpus"],
            target_corpus=obj["target_corpus"],
            eval_corpus=obj["eval_corpus"],
            schema=obj["schema"],
            triples=obj["triples"],
            concept_seeds=obj["concept_seeds"],
            gold=obj["gold"],
            variant=obj.get("variant", ["Rs", "Rt"]),
            propagation=PropagationConfig.from_dict(obj.get("propagation", {})),
            features=FeatureConfig.from_dict(obj.get("features", {})),
            training=TrainConfig.from_dict(obj.get("training", {})),
            sweep_n=obj.get("sweep_n", [5, 10, 20]),
        )

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def validate_paths(self) -> None:
        for name in (
            "structured_corpus",
            "target_corpus",
            "eval_corpus",
            "schema",
            "triples",
            "concept_seeds",
            "gold",
        ):
            path = getattr(self, name)
            if not Path(path).is_file():
                raise StageError(f"config path {name} does not exist: {path}")
        VariantSpec.parse(self.variant)


def load_run_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return RunConfig.from_dict(json.load(fh))


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Workspace:
    """Output directory plus the provenance manifest."""

    MENTION_SET_FILES = {
        "Rs": "mentions_Rs.jsonl",
        "Rt": "mentions_Rt.jsonl",
        "Cs": "mentions_Cs.jsonl",
        "Ct": "mentions_Ct.jsonl",
    }

    def __init__(self, out_dir: str, config: RunConfig):
        self.out = Path(out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.manifest_path = self.out / "manifest.json"

    def _load_manifest(self) -> dict:
        if self.manifest_path.is_file():
            return json.loads(self.manifest_path.read_text())
        return {"config_hash": self.config.config_hash(), "stages": {}}

    def record_stage(self, stage: str, inputs: list[Path], outputs: list[Path]) -> None:
        manifest = self._load_manifest()
        manifest["config_hash"] = self.config.config_hash()
        manifest["stages"][stage] = {
            "config_hash": self.config.config_hash(),
            "inputs": {p.name: _sha256(p) for p in sorted(inputs)},
            "outputs": {p.name: _sha256(p) for p in sorted(outputs)},
        }
        self.manifest_path.write_text(
            json.dumps(manifest, sort_keys=True, indent=1) + "\n"
        )

    def require(self, filename: str, produced_by: str) -> Path:
        path = self.out / filename
        if not path.is_file():
            raise StageError(
                f"artifact {filename!r} missing; run the {produced_by!r} command first"
            )
        manifest = self._load_manifest()
        stage = manifest["stages"].get(produced_by)
        if stage and stage["config_hash"] != self.config.config_hash():
            raise StageError(
                f"artifact {filename!r} was produced with a different config; "
                f"re-run {produced_by!r}"
            )
        return path


def stage_ingest(ws: Workspace) -> None:
    cfg = ws.config
    cfg.validate_paths()
    inputs, outputs = [], []
    for name, tag in (
        ("structured_corpus", "structured"),
        ("target_corpus", "target"),
        ("eval_corpus", "target"),
    ):
        src = Path(getattr(cfg, name))
        docs = ingest_corpus(str(src), tag)
        dst = ws.out / f"documents_{name.removesuffix('_corpus')}.jsonl"
        write_corpus(docs, str(dst))
        inputs.append(src)
        outputs.append(dst)
    ws.record_stage("ingest", inputs, outputs)


def stage_mentions(ws: Workspace) -> None:
    cfg = ws.config
    structured_path = ws.require("documents_structured.jsonl", "ingest")
    target_path = ws.require("documents_target.jsonl", "ingest")
    schema = load_schema(cfg.schema)
    triples = load_triples(cfg.triples, schema)
    seeds = load_concept_seeds(cfg.concept_seeds, schema)

    structured = corpus_mentions(ingest_corpus(str(structured_path), "structured"), cfg.features)
    target = corpus_mentions(ingest_corpus(str(target_path), "target"), cfg.features)
    sets = build_mention_sets(structured, target, triples, seeds, schema, cfg.propagation)

    outputs = []
    for name, filename in Workspace.MENTION_SET_FILES.items():
        path = ws.out / filename
        write_labeled_mentions(sets.get(name), str(path))
        outputs.append(path)
    for pool, filename in (
        (structured, "pool_structured.jsonl"),
        (target, "pool_target.jsonl"),
    ):
        path = ws.out / filename
        write_mentions(pool, str(path))
        outputs.append(path)
    ws.record_stage(
        "mentions",
        [structured_path, target_path, Path(cfg.schema), Path(cfg.triples), Path(cfg.concept_seeds)],
        outputs,
    )


def _load_sets(ws: Workspace) -> MentionSets:
    sets = MentionSets()
    for name, filename in Workspace.MENTION_SET_FILES.items():
        path = ws.require(filename, "mentions")
        setattr(sets, name, read_labeled_mentions(str(path)))
    return sets


def stage_propagate(ws: Workspace) -> None:
    cfg = ws.config
    sets = _load_sets(ws)
    variant = VariantSpec.parse(cfg.variant)
    graph = build_graph(sets, variant)
    seeds_by_relation: dict[str, set[str]] = {}
    node_set = set(graph.mention_nodes)
    for lm in sets.Rs:
        if lm.mention.mention_id in node_set:
            seeds_by_relation.setdefault(lm.label, set()).add(lm.mention.mention_id)
    if not seeds_by_relation:
        raise StageError("no Rs seed mentions survive in the propagation graph")
    ranking = multirankwalk(graph, seeds_by_relation, cfg.propagation)

    ranking_path = ws.out / "ranking.tsv"
    graph_path = ws.out / "graph.tsv"
    write_ranking(ranking, str(ranking_path))
    write_graph_dump(graph, str(graph_path))
    ws.record_stage(
        "propagate",
        [ws.out / f for f in Workspace.MENTION_SET_FILES.values()],
        [ranking_path, graph_path],
    )


def stage_train(ws: Workspace) -> None:
    cfg = ws.config
    ranking_path = ws.require("ranking.tsv", "propagate")
    sets = _load_sets(ws)
    pool = read_mentions(str(ws.require("pool_structured.jsonl", "mentions")))
    pool += read_mentions(str(ws.require("pool_target.jsonl", "mentions")))
    ranking = read_ranking(str(ranking_path))

    positives, shortfalls = distill(ranking, sets, cfg.training)
    labeled_ids = {lm.mention.mention_id for lm in sets.Rs + sets.Rt}
    training_set = build_training_set(positives, pool, labeled_ids, cfg.training, shortfalls)
    model = train(training_set, cfg.training, cfg.features)

    model_path = ws.out / "model.json"
    save_model(model, str(model_path))
    ws.record_stage("train", [ranking_path], [model_path])


def stage_extract(ws: Workspace) -> None:
    cfg = ws.config
    model_path = ws.require("model.json", "train")
    eval_path = ws.require("documents_eval.jsonl", "ingest")
    model = load_model(str(model_path))
    docs = ingest_corpus(str(eval_path), "target")
    predictions = []
    for doc in docs:
        predictions.extend(extract_document(doc, model, cfg.features))
    pred_path = ws.out / "predictions.tsv"
    write_predictions(predictions, str(pred_path))
    ws.record_stage("extract", [model_path, eval_path], [pred_path])


def stage_eval(ws: Workspace) -> None:
    cfg = ws.config
    pred_path = ws.require("predictions.tsv", "extract")
    from .evaluation import read_predictions

    schema = load_schema(cfg.schema)
    gold = load_gold(cfg.gold, schema)
    predictions = read_predictions(str(pred_path))
    report = evaluate(predictions, gold)
    points = pr_curve(predictions, gold)

    report_path = ws.out / "report.json"
    curve_path = ws.out / "pr_curve.csv"
    write_report(report, str(report_path))
    write_pr_curve(points, str(curve_path))
    ws.record_stage("eval", [pred_path, Path(cfg.gold)], [report_path, curve_path])


def stage_sweep(ws: Workspace) -> None:
    """Re-run distill+train+extract+eval across N values and both
    strategies; emits F1-vs-N rows for the configured variant."""
    import dataclasses

    cfg = ws.config
    ranking_path = ws.require("ranking.tsv", "propagate")
    sets = _load_sets(ws)
    pool = read_mentions(str(ws.require("pool_structured.jsonl", "mentions")))
    pool += read_mentions(str(ws.require("pool_target.jsonl", "mentions")))
    ranking = read_ranking(str(ranking_path))
    labeled_ids = {lm.mention.mention_id for lm in sets.Rs + sets.Rt}
    eval_docs = ingest_corpus(str(ws.require("documents_eval.jsonl", "ingest")), "target")
    schema = load_schema(cfg.schema)
    gold = load_gold(cfg.gold, schema)
    variant_name = VariantSpec.parse(cfg.variant).name

    rows = []
    for strategy in ("Both", "Target"):
        for n in cfg.sweep_n:
            tc = dataclasses.replace(cfg.training, n=n, strategy=strategy)
            positives, shortfalls = distill(ranking, sets, tc)
            training_set = build_training_set(positives, pool, labeled_ids, tc, shortfalls)
            model = train(training_set, tc, cfg.features)
            predictions = []
            for doc in eval_docs:
                predictions.extend(extract_document(doc, model, cfg.features))
            report = evaluate(predictions, gold)
            rows.append(
                (
                    variant_name,
                    strategy,
                    n,
                    report.micro.precision,
                    report.micro.recall,
                    report.micro.f1,
                )
            )

    sweep_path = ws.out / "sweep.csv"
    with open(sweep_path, "w", encoding="utf-8") as fh:
        fh.write("variant,strategy,n,precision,recall,f1\n")
        for variant, strategy, n, p, r, f1 in rows:
            fh.write(f"{variant},{strategy},{n},{p:.12g},{r:.12g},{f1:.12g}\n")
    ws.record_stage("sweep", [ranking_path], [sweep_path])


STAGES = {
    "ingest": stage_ingest,
    "mentions": stage_mentions,
    "propagate": stage_propagate,
    "train": stage_train,
    "extract": stage_extract,
    "eval": stage_eval,
    "sweep": stage_sweep,
}


def run_all(ws: Workspace) -> None:
    for stage in ("ingest", "mentions", "propagate", "train", "extract", "eval"):
        STAGES[stage](ws)
