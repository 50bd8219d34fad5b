"""Relation schema and seed knowledge: triples and concept instances."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .norm import normalize


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class RelationDef:
    name: str
    range_concept: str
    section_titles: frozenset[str]  # normalized


@dataclass
class RelationSchema:
    relations: list[RelationDef]
    concepts: list[str]
    _by_name: dict[str, RelationDef] = field(init=False, repr=False)

    def __post_init__(self):
        self._by_name = {r.name: r for r in self.relations}

    def relation(self, name: str) -> RelationDef:
        return self._by_name[name]

    def relation_names(self) -> list[str]:
        return sorted(self._by_name)

    def has_relation(self, name: str) -> bool:
        return name in self._by_name

    def sections_for_concept(self, concept: str) -> set[str]:
        """Union of section titles over relations whose range is `concept`."""
        out: set[str] = set()
        for r in self.relations:
            if r.range_concept == concept:
                out |= r.section_titles
        return out


@dataclass(frozen=True)
class Triple:
    relation: str
    subject: str
    object: str


@dataclass(frozen=True)
class ConceptSeed:
    concept: str
    instance: str


def load_schema(path: str) -> RelationSchema:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    concepts = list(obj.get("concepts", []))
    relations = []
    names = set()
    claimed_sections: dict[str, str] = {}
    for rel in obj.get("relations", []):
        name = rel["name"]
        if name in names:
            raise SchemaError(f"duplicate relation {name!r}")
        names.add(name)
        rng = rel["range_concept"]
        if rng not in concepts:
            raise SchemaError(f"relation {name!r} references unknown concept {rng!r}")
        titles = frozenset(normalize(t) for t in rel.get("section_titles", []))
        for t in titles:
            if t in claimed_sections:
                raise SchemaError(
                    f"section title {t!r} claimed by both "
                    f"{claimed_sections[t]!r} and {name!r}"
                )
            claimed_sections[t] = name
        relations.append(RelationDef(name, rng, titles))
    return RelationSchema(relations=relations, concepts=concepts)


def load_triples(
    path: str,
    schema: RelationSchema,
    max_object_len: int = 60,
    reject_commas: bool = True,
) -> list[Triple]:
    """Load TSV triples; normalized, deduplicated, noise-filtered.

    The default filters drop objects longer than 60 characters or
    containing a comma (KB noise heuristics).
    """
    out: list[Triple] = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise SchemaError(f"line {line_no}: expected 3 tab-separated fields")
            rel, subj, obj = parts
            if not schema.has_relation(rel):
                raise SchemaError(f"line {line_no}: unknown relation {rel!r}")
            subj, obj = normalize(subj), normalize(obj)
            if not subj or not obj:
                raise SchemaError(f"line {line_no}: empty subject or object")
            if len(obj) > max_object_len or (reject_commas and "," in obj):
                continue
            t = Triple(rel, subj, obj)
            if t not in seen:
                seen.add(t)
                out.append(t)
    return sorted(out, key=lambda t: (t.relation, t.subject, t.object))


def load_concept_seeds(
    path: str,
    schema: RelationSchema,
    max_instance_len: int = 60,
    reject_commas: bool = True,
) -> list[ConceptSeed]:
    out: list[ConceptSeed] = []
    seen = set()
    known = set(schema.concepts)
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise SchemaError(f"line {line_no}: expected 2 tab-separated fields")
            concept, instance = parts
            if concept not in known:
                raise SchemaError(f"line {line_no}: unknown concept {concept!r}")
            instance = normalize(instance)
            if not instance:
                raise SchemaError(f"line {line_no}: empty instance")
            if len(instance) > max_instance_len or (reject_commas and "," in instance):
                continue
            s = ConceptSeed(concept, instance)
            if s not in seen:
                seen.add(s)
                out.append(s)
    return sorted(out, key=lambda s: (s.concept, s.instance))


def match_value(np_surface: str, values: set[str]) -> bool:
    """Exact match after normalization; `values` must already be normalized."""
    return normalize(np_surface) in values
