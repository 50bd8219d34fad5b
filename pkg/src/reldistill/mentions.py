"""Mention enumeration, distant labeling, and concept seed expansion.

Produces the four labeled sets: section-constrained relation mentions
from the structured corpus (Rs), unconstrained relation mentions from
the target corpus (Rt), and concept mentions from both corpora (Cs, Ct)
obtained by propagating concept seeds over the mention-feature graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .corpus import Document
from .features import FeatureConfig, Mention, extract_features
from .kb import ConceptSeed, RelationSchema, Triple
from .norm import normalize


@dataclass(frozen=True)
class LabeledMention:
    mention: Mention
    label: str
    source_set: str  # Rs | Rt | Cs | Ct


@dataclass
class MentionSets:
    Rs: list[LabeledMention] = field(default_factory=list)
    Rt: list[LabeledMention] = field(default_factory=list)
    Cs: list[LabeledMention] = field(default_factory=list)
    Ct: list[LabeledMention] = field(default_factory=list)

    def get(self, name: str) -> list[LabeledMention]:
        return getattr(self, name)


def _surface(doc_tokens, span) -> str:
    return " ".join(t.surface for t in doc_tokens[span[0] : span[1]])


def enumerate_mentions(doc: Document, config: FeatureConfig) -> list[Mention]:
    """All coordinate lists plus NP chunks not inside any list."""
    out = []
    for sec_i, sec in enumerate(doc.sections):
        section_title = normalize(sec.title)
        for sent_i, sent in enumerate(sec.sentences):
            in_list = set()
            for cl in sent.coordinate_lists:
                in_list.update(cl.item_spans)
                span = (cl.item_spans[0][0], cl.item_spans[-1][1])
                out.append(
                    Mention(
                        mention_id=f"{doc.doc_id}|s{sec_i}|t{sent_i}|{span[0]}-{span[1]}",
                        doc_id=doc.doc_id,
                        title_entity=doc.title_entity,
                        section_title=section_title,
                        kind="list",
                        item_surfaces=tuple(
                            _surface(sent.tokens, s) for s in cl.item_spans
                        ),
                        features=tuple(
                            sorted(extract_features(sent, cl, config).items())
                        ),
                        corpus_tag=doc.corpus_tag,
                    )
                )
            for span in sent.np_chunks:
                if span in in_list:
                    continue
                out.append(
                    Mention(
                        mention_id=f"{doc.doc_id}|s{sec_i}|t{sent_i}|{span[0]}-{span[1]}",
                        doc_id=doc.doc_id,
                        title_entity=doc.title_entity,
                        section_title=section_title,
                        kind="singleton",
                        item_surfaces=(_surface(sent.tokens, span),),
                        features=tuple(
                            sorted(extract_features(sent, span, config).items())
                        ),
                        corpus_tag=doc.corpus_tag,
                    )
                )
    return out


def corpus_mentions(docs: list[Document], config: FeatureConfig) -> list[Mention]:
    out = []
    for doc in docs:
        out.extend(enumerate_mentions(doc, config))
    return sorted(out, key=lambda m: m.mention_id)


def build_relation_mentions(
    mentions: list[Mention],
    triples: list[Triple],
    schema: RelationSchema,
    enforce_sections: bool,
) -> list[LabeledMention]:
    """Distant labeling: title entity matches the subject and some item
    surface matches the object; with enforce_sections, the mention must
    also sit in a section mapped to the relation."""
    by_subject: dict[str, list[Triple]] = {}
    for t in triples:
        by_subject.setdefault(t.subject, []).append(t)

    source_set = None
    out = []
    seen = set()
    for m in sorted(mentions, key=lambda m: m.mention_id):
        surfaces = {normalize(s) for s in m.item_surfaces}
        for t in by_subject.get(m.title_entity, ()):
            if t.object not in surfaces:
                continue
            if enforce_sections:
                if m.section_title not in schema.relation(t.relation).section_titles:
                    continue
            key = (m.mention_id, t.relation)
            if key in seen:
                continue
            seen.add(key)
            source_set = "Rs" if m.corpus_tag == "structured" else "Rt"
            out.append(LabeledMention(m, t.relation, source_set))
    return out


def expand_concept_mentions(
    mentions: list[Mention],
    concept_seeds: list[ConceptSeed],
    schema: RelationSchema,
    prop_config,
) -> list[LabeledMention]:
    """Grow each concept's seed set by label propagation.

    Seed mentions (surface matches a seed instance) are always kept; a
    non-seed mention is labeled with its argmax concept when its score
    clears the floor, capped at top_k per concept.
    """
    from .propagation import build_graph_from_mentions, multirankwalk

    instances_by_concept: dict[str, set[str]] = {}
    for seed in concept_seeds:
        instances_by_concept.setdefault(seed.concept, set()).add(seed.instance)

    seed_ids: dict[str, set[str]] = {}
    for m in mentions:
        surfaces = {normalize(s) for s in m.item_surfaces}
        for concept, instances in instances_by_concept.items():
            if surfaces & instances:
                seed_ids.setdefault(concept, set()).add(m.mention_id)
    if not seed_ids:
        return []

    graph = build_graph_from_mentions(mentions)
    seeds_in_graph = {
        c: ids & set(graph.mention_nodes) for c, ids in seed_ids.items()
    }
    seeds_in_graph = {c: ids for c, ids in seeds_in_graph.items() if ids}
    source_set = "Cs" if mentions and mentions[0].corpus_tag == "structured" else "Ct"
    by_id = {m.mention_id: m for m in mentions}

    out = []
    if seeds_in_graph:
        ranking = multirankwalk(graph, seeds_in_graph, prop_config)
        for concept, ranked in sorted(ranking.per_class.items()):
            kept = set()
            for mention_id, score in ranked:
                if len(kept) >= prop_config.concept_top_k:
                    break
                if mention_id in seed_ids.get(concept, ()):
                    kept.add(mention_id)
                elif score >= prop_config.concept_score_floor:
                    kept.add(mention_id)
            kept |= seed_ids.get(concept, set())  # seeds always retained
            for mention_id in sorted(kept):
                out.append(LabeledMention(by_id[mention_id], concept, source_set))
    else:
        for concept, ids in sorted(seed_ids.items()):
            for mention_id in sorted(ids):
                out.append(LabeledMention(by_id[mention_id], concept, source_set))
    return out


def filter_concept_sections(
    cs_raw: list[LabeledMention], schema: RelationSchema
) -> list[LabeledMention]:
    """Keep a concept mention only if its section maps to some relation
    whose range is that concept."""
    out = []
    for lm in cs_raw:
        if lm.mention.section_title in schema.sections_for_concept(lm.label):
            out.append(lm)
    return out


def build_mention_sets(
    structured_mentions: list[Mention],
    target_mentions: list[Mention],
    triples: list[Triple],
    concept_seeds: list[ConceptSeed],
    schema: RelationSchema,
    prop_config,
) -> MentionSets:
    rs = build_relation_mentions(structured_mentions, triples, schema, enforce_sections=True)
    rt = build_relation_mentions(target_mentions, triples, schema, enforce_sections=False)
    cs_raw = expand_concept_mentions(structured_mentions, concept_seeds, schema, prop_config)
    cs = filter_concept_sections(cs_raw, schema)
    ct = expand_concept_mentions(target_mentions, concept_seeds, schema, prop_config)
    return MentionSets(Rs=rs, Rt=rt, Cs=cs, Ct=ct)


def mention_to_dict(m: Mention) -> dict:
    return {
        "mention_id": m.mention_id,
        "doc_id": m.doc_id,
        "title_entity": m.title_entity,
        "section": m.section_title,
        "kind": m.kind,
        "surfaces": list(m.item_surfaces),
        "corpus_tag": m.corpus_tag,
        "features": {f: c for f, c in m.features},
    }


def mention_from_dict(obj: dict) -> Mention:
    return Mention(
        mention_id=obj["mention_id"],
        doc_id=obj["doc_id"],
        title_entity=obj["title_entity"],
        section_title=obj["section"],
        kind=obj["kind"],
        item_surfaces=tuple(obj["surfaces"]),
        features=tuple(sorted(obj["features"].items())),
        corpus_tag=obj["corpus_tag"],
    )


def write_mentions(mentions: list[Mention], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for m in mentions:
            fh.write(json.dumps(mention_to_dict(m), sort_keys=True) + "\n")


def read_mentions(path: str) -> list[Mention]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(mention_from_dict(json.loads(line)))
    return out


def labeled_mention_to_dict(lm: LabeledMention) -> dict:
    m = lm.mention
    return {
        "mention_id": m.mention_id,
        "label": lm.label,
        "source_set": lm.source_set,
        "doc_id": m.doc_id,
        "title_entity": m.title_entity,
        "section": m.section_title,
        "kind": m.kind,
        "surfaces": list(m.item_surfaces),
        "corpus_tag": m.corpus_tag,
        "features": {f: c for f, c in m.features},
    }


def labeled_mention_from_dict(obj: dict) -> LabeledMention:
    mention = Mention(
        mention_id=obj["mention_id"],
        doc_id=obj["doc_id"],
        title_entity=obj["title_entity"],
        section_title=obj["section"],
        kind=obj["kind"],
        item_surfaces=tuple(obj["surfaces"]),
        features=tuple(sorted(obj["features"].items())),
        corpus_tag=obj["corpus_tag"],
    )
    return LabeledMention(mention, obj["label"], obj["source_set"])


def write_labeled_mentions(lms: list[LabeledMention], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for lm in lms:
            fh.write(json.dumps(labeled_mention_to_dict(lm), sort_keys=True) + "\n")


def read_labeled_mentions(path: str) -> list[LabeledMention]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(labeled_mention_from_dict(json.loads(line)))
    return out
