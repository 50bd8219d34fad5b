"""Document extraction, IR-style evaluation per (title entity, relation)
query, PR curves, ranked-answer metrics, and the plain distant-supervision
baselines (no propagation step).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .corpus import Document
from .features import FeatureConfig, Mention
from .kb import RelationSchema
from .mentions import LabeledMention, MentionSets, corpus_mentions
from .norm import normalize
from .training import LinearModel, TrainConfig, build_training_set, classify_scored, train


@dataclass(frozen=True)
class GoldAnnotation:
    doc_id: str
    relation: str
    value: str  # normalized


@dataclass(frozen=True)
class Prediction:
    doc_id: str
    relation: str
    value: str  # normalized
    score: float


@dataclass
class RelationMetrics:
    precision: float
    recall: float
    f1: float
    tp: int = 0
    n_pred: int = 0
    n_gold: int = 0


@dataclass
class EvalReport:
    micro: RelationMetrics
    per_relation: dict[str, RelationMetrics]
    macro_f1: float
    zero_division_note: str = (
        "precision is 0 when there are no predictions; recall is 0 when "
        "there is no gold for a query"
    )

    def to_dict(self) -> dict:
        def _m(m: RelationMetrics) -> dict:
            return {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "tp": m.tp,
                "n_pred": m.n_pred,
                "n_gold": m.n_gold,
            }

        return {
            "micro": _m(self.micro),
            "per_relation": {r: _m(m) for r, m in sorted(self.per_relation.items())},
            "macro_f1": self.macro_f1,
            "zero_division_note": self.zero_division_note,
        }


def _prf(tp: int, n_pred: int, n_gold: int) -> RelationMetrics:
    p = tp / n_pred if n_pred else 0.0
    r = tp / n_gold if n_gold else 0.0
    f1 = 2 * p * r / (p + r) if (p + r) else 0.0
    return RelationMetrics(p, r, f1, tp, n_pred, n_gold)


def load_gold(path: str, schema: RelationSchema | None = None) -> list[GoldAnnotation]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"line {line_no}: expected 3 tab-separated fields")
            doc_id, relation, value = parts
            if schema is not None and not schema.has_relation(relation):
                raise ValueError(f"line {line_no}: unknown relation {relation!r}")
            out.append(GoldAnnotation(doc_id, relation, normalize(value)))
    return out


def extract_document(
    doc: Document,
    model: LinearModel,
    feature_config: FeatureConfig,
    threshold: float = 0.5,
) -> list[Prediction]:
    """Classify every mention; list predictions fan out to one pair per
    item; duplicates by (relation, normalized surface) keep the max score."""
    if feature_config != model.feature_config:
        raise ValueError(
            "feature config mismatch: model was trained with "
            f"{model.feature_config.to_dict()}, got {feature_config.to_dict()}"
        )
    from .mentions import enumerate_mentions

    best: dict[tuple[str, str], float] = {}
    for mention in enumerate_mentions(doc, feature_config):
        label, score = classify_scored(model, mention, threshold)
        if label == "other":
            continue
        for surface in mention.item_surfaces:
            key = (label, normalize(surface))
            if score > best.get(key, float("-inf")):
                best[key] = score
    return [
        Prediction(doc.doc_id, rel, value, score)
        for (rel, value), score in sorted(best.items())
    ]


def evaluate(predictions: list[Prediction], gold: list[GoldAnnotation]) -> EvalReport:
    if not gold:
        raise ValueError("gold set is empty")
    gold_set = {(g.doc_id, g.relation, g.value) for g in gold}
    gold_docs = {g.doc_id for g in gold}
    for p in predictions:
        if p.doc_id not in gold_docs:
            raise ValueError(f"prediction references doc {p.doc_id!r} absent from gold")
    pred_set = {(p.doc_id, p.relation, p.value) for p in predictions}

    tp = len(pred_set & gold_set)
    micro = _prf(tp, len(pred_set), len(gold_set))

    relations = sorted({g.relation for g in gold} | {p.relation for p in predictions})
    per_relation = {}
    for rel in relations:
        pr = {t for t in pred_set if t[1] == rel}
        gr = {t for t in gold_set if t[1] == rel}
        per_relation[rel] = _prf(len(pr & gr), len(pr), len(gr))
    macro_f1 = (
        sum(m.f1 for m in per_relation.values()) / len(per_relation)
        if per_relation
        else 0.0
    )
    return EvalReport(micro=micro, per_relation=per_relation, macro_f1=macro_f1)


def pr_curve(
    predictions: list[Prediction], gold: list[GoldAnnotation]
) -> list[tuple[float, float, float]]:
    """One (threshold, precision, recall) point per distinct score,
    descending; recall is non-decreasing along the sweep."""
    gold_set = {(g.doc_id, g.relation, g.value) for g in gold}
    thresholds = sorted({p.score for p in predictions}, reverse=True)
    points = []
    for theta in thresholds:
        kept = {(p.doc_id, p.relation, p.value) for p in predictions if p.score >= theta}
        tp = len(kept & gold_set)
        p = tp / len(kept) if kept else 0.0
        r = tp / len(gold_set) if gold_set else 0.0
        points.append((theta, p, r))
    return points


def ranking_metrics(
    queries: list[tuple[list[str], set[str]]],
) -> tuple[float, float, float]:
    """(MRR, MAP, mean recall) over (ranked answers, gold set) queries."""
    if not queries:
        return 0.0, 0.0, 0.0
    rr_sum = ap_sum = rec_sum = 0.0
    for ranked, gold in queries:
        if not gold:
            continue
        hits = 0
        precision_sum = 0.0
        first_rank = None
        for k, answer in enumerate(ranked, start=1):
            if answer in gold:
                hits += 1
                precision_sum += hits / k
                if first_rank is None:
                    first_rank = k
        rr_sum += 1.0 / first_rank if first_rank else 0.0
        ap_sum += precision_sum / len(gold)
        rec_sum += len(set(ranked) & gold) / len(gold)
    n = len(queries)
    return rr_sum / n, ap_sum / n, rec_sum / n


BASELINE_KINDS = ("DS_Struct", "DS_Target", "DS_Both")


def run_baseline(
    kind: str,
    sets: MentionSets,
    pool: list[Mention],
    labeled_ids: set[str],
    config: TrainConfig,
    feature_config: FeatureConfig,
    schema: RelationSchema | None = None,
) -> LinearModel:
    """Train directly on the distantly labeled sets, skipping propagation:
    Rs (DS_Struct), Rt (DS_Target), or Rs u Rt (DS_Both)."""
    if kind not in BASELINE_KINDS:
        raise ValueError(f"unknown baseline {kind!r}")
    if kind == "DS_Struct":
        labeled: list[LabeledMention] = list(sets.Rs)
    elif kind == "DS_Target":
        labeled = list(sets.Rt)
    else:
        labeled = list(sets.Rs) + list(sets.Rt)

    positives: dict[str, dict[str, Mention]] = {}
    for lm in labeled:
        positives.setdefault(lm.label, {})[lm.mention.mention_id] = lm.mention
    if not positives:
        raise ValueError(f"{kind}: no labeled mentions at all")
    if schema is not None:
        for relation in schema.relation_names():
            if not positives.get(relation):
                raise ValueError(f"{kind}: empty training set for relation {relation!r}")
    pos_lists = {
        r: [ms[k] for k in sorted(ms)] for r, ms in sorted(positives.items())
    }
    training_set = build_training_set(pos_lists, pool, labeled_ids, config)
    return train(training_set, config, feature_config)


def write_report(report: EvalReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, sort_keys=True, indent=1)
        fh.write("\n")


def write_pr_curve(points: list[tuple[float, float, float]], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("threshold,precision,recall\n")
        for theta, p, r in points:
            fh.write(f"{theta:.12g},{p:.12g},{r:.12g}\n")


def write_predictions(preds: list[Prediction], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in sorted(preds, key=lambda p: (p.doc_id, p.relation, p.value)):
            fh.write(f"{p.doc_id}\t{p.relation}\t{p.value}\t{p.score:.12g}\n")


def read_predictions(path: str) -> list[Prediction]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            doc_id, relation, value, score = line.split("\t")
            out.append(Prediction(doc_id, relation, value, float(score)))
    return out
