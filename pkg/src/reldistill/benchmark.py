"""In-process harness for the synthetic benchmark: build the mention sets
once, then score the propagation-distilled pipeline and the plain
distant-supervision baselines against the generated gold annotations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import Document, ingest_corpus
from .evaluation import (
    EvalReport,
    GoldAnnotation,
    evaluate,
    extract_document,
    load_gold,
    run_baseline,
)
from .features import FeatureConfig, Mention
from .kb import RelationSchema, load_concept_seeds, load_schema, load_triples
from .mentions import MentionSets, build_mention_sets, corpus_mentions
from .propagation import (
    PropagationConfig,
    RankedLabeling,
    VariantSpec,
    build_graph,
    multirankwalk,
)
from .synthetic import BenchmarkPaths
from .training import TrainConfig, build_training_set, distill, train


@dataclass
class BenchmarkArtifacts:
    """Everything derived from one generated benchmark that is shared
    across methods and train configs."""

    sets: MentionSets
    pool: list[Mention]
    labeled_ids: set[str]
    eval_docs: list[Document]
    gold: list[GoldAnnotation]
    schema: RelationSchema
    feature_config: FeatureConfig
    prop_config: PropagationConfig
    rankings: dict[str, RankedLabeling] = field(default_factory=dict)


def prepare(
    paths: BenchmarkPaths,
    feature_config: FeatureConfig | None = None,
    prop_config: PropagationConfig | None = None,
) -> BenchmarkArtifacts:
    feature_config = feature_config or FeatureConfig()
    prop_config = prop_config or PropagationConfig()
    schema = load_schema(paths.schema)
    triples = load_triples(paths.triples, schema)
    seeds = load_concept_seeds(paths.concept_seeds, schema)
    structured = corpus_mentions(
        ingest_corpus(paths.structured_corpus, "structured"), feature_config
    )
    target = corpus_mentions(ingest_corpus(paths.target_corpus, "target"), feature_config)
    sets = build_mention_sets(structured, target, triples, seeds, schema, prop_config)
    return BenchmarkArtifacts(
        sets=sets,
        pool=structured + target,
        labeled_ids={lm.mention.mention_id for lm in sets.Rs + sets.Rt},
        eval_docs=ingest_corpus(paths.eval_corpus, "target"),
        gold=load_gold(paths.gold, schema),
        schema=schema,
        feature_config=feature_config,
        prop_config=prop_config,
    )


def ranking_for(art: BenchmarkArtifacts, variant: list[str]) -> RankedLabeling:
    """Propagation ranking for a graph variant, memoized per artifact set."""
    spec = VariantSpec.parse(variant)
    if spec.name not in art.rankings:
        graph = build_graph(art.sets, spec)
        node_set = set(graph.mention_nodes)
        seeds_by_relation: dict[str, set[str]] = {}
        for lm in art.sets.Rs:
            if lm.mention.mention_id in node_set:
                seeds_by_relation.setdefault(lm.label, set()).add(lm.mention.mention_id)
        art.rankings[spec.name] = multirankwalk(graph, seeds_by_relation, art.prop_config)
    return art.rankings[spec.name]


def _score(art: BenchmarkArtifacts, model) -> EvalReport:
    predictions = []
    for doc in art.eval_docs:
        predictions.extend(extract_document(doc, model, art.feature_config))
    return evaluate(predictions, art.gold)


def distilled_report(
    art: BenchmarkArtifacts, variant: list[str], config: TrainConfig
) -> EvalReport:
    """Full propagate-distill-train-extract-evaluate run for one variant
    and train config."""
    ranking = ranking_for(art, variant)
    positives, shortfalls = distill(ranking, art.sets, config)
    training_set = build_training_set(
        positives, art.pool, art.labeled_ids, config, shortfalls
    )
    model = train(training_set, config, art.feature_config)
    return _score(art, model)


def baseline_report(art: BenchmarkArtifacts, kind: str, config: TrainConfig) -> EvalReport:
    """DS_Struct / DS_Target / DS_Both scored on the same evaluation set."""
    model = run_baseline(
        kind, art.sets, art.pool, art.labeled_ids, config, art.feature_config
    )
    return _score(art, model)
