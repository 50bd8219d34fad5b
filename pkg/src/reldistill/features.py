"""Mention feature extraction and frequency-based feature filtering.

One generator serves singleton NPs and coordinate lists alike. Feature
ids are namespaced so no two rules can emit the same id:

  tok=    tokens inside the NP(s)
  pre=/suf=  character prefixes/suffixes of those tokens
  bow=    sentence tokens outside the NP span(s)
  win-L{d}= / win-R{d}=  window unigrams at distance d from the span
  wbg-L= / wbg-R=        window bigrams
  vrb=/mod=/path=        closest ancestor verb of the NP head, its
                         modifiers, and the dependency-label path
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .corpus import CoordinateList, Sentence

FeatureVector = dict[str, int]


@dataclass(frozen=True)
class FeatureConfig:
    window: int = 3
    affix_min: int = 2
    affix_max: int = 4
    dependency_features: bool = True

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "affix_min": self.affix_min,
            "affix_max": self.affix_max,
            "dependency_features": self.dependency_features,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "FeatureConfig":
        return cls(**obj)


@dataclass(frozen=True)
class Mention:
    mention_id: str
    doc_id: str
    title_entity: str
    section_title: str  # normalized
    kind: str  # "singleton" or "list"
    item_surfaces: tuple[str, ...]
    features: tuple[tuple[str, int], ...]
    corpus_tag: str

    def feature_counts(self) -> FeatureVector:
        return dict(self.features)


def _affixes(token: str, lo: int, hi: int):
    for n in range(lo, hi + 1):
        if len(token) >= n:
            yield f"pre={token[:n]}", f"suf={token[-n:]}"


def _closest_ancestor_verb(sentence: Sentence, head_idx: int) -> int | None:
    seen = {head_idx}
    idx = sentence.tokens[head_idx].dep_head
    while idx is not None and idx not in seen:
        if sentence.tokens[idx].pos == "VERB":
            return idx
        seen.add(idx)
        idx = sentence.tokens[idx].dep_head
    return None


def extract_features(
    sentence: Sentence,
    target: tuple[int, int] | CoordinateList,
    config: FeatureConfig,
) -> FeatureVector:
    tokens = sentence.tokens
    n = len(tokens)
    if isinstance(target, CoordinateList):
        item_spans = list(target.item_spans)
        head_span = target.head_span
    else:
        item_spans = [target]
        head_span = target
    for s, e in item_spans:
        if not (0 <= s < e <= n):
            raise ValueError(f"span ({s},{e}) out of range for {n}-token sentence")

    inside = set()
    for s, e in item_spans:
        inside.update(range(s, e))
    span_start = min(s for s, _ in item_spans)
    span_end = max(e for _, e in item_spans)

    feats: Counter[str] = Counter()
    for i in sorted(inside):
        tok = tokens[i].surface.lower()
        feats[f"tok={tok}"] += 1
        for pre, suf in _affixes(tok, config.affix_min, config.affix_max):
            feats[pre] += 1
            feats[suf] += 1
    for i in range(n):
        if span_start <= i < span_end:
            continue
        feats[f"bow={tokens[i].surface.lower()}"] += 1

    left = [tokens[i].surface.lower() for i in range(max(0, span_start - config.window), span_start)]
    right = [tokens[i].surface.lower() for i in range(span_end, min(n, span_end + config.window))]
    for d, tok in enumerate(reversed(left), start=1):
        feats[f"win-L{d}={tok}"] += 1
    for d, tok in enumerate(right, start=1):
        feats[f"win-R{d}={tok}"] += 1
    for a, b in zip(left, left[1:]):
        feats[f"wbg-L={a}_{b}"] += 1
    for a, b in zip(right, right[1:]):
        feats[f"wbg-R={a}_{b}"] += 1

    if config.dependency_features:
        head_idx = head_span[1] - 1
        if tokens[head_idx].dep_head is not None:
            verb_idx = _closest_ancestor_verb(sentence, head_idx)
            if verb_idx is not None:
                feats[f"vrb={tokens[verb_idx].surface.lower()}"] += 1
                for i, t in enumerate(tokens):
                    if t.dep_head == verb_idx and i != verb_idx:
                        feats[f"mod={t.surface.lower()}"] += 1
                labels = []
                idx = head_idx
                while idx != verb_idx:
                    labels.append(tokens[idx].dep_label or "_")
                    idx = tokens[idx].dep_head
                feats[f"path={'/'.join(labels)}"] += 1

    return dict(feats)


@dataclass(frozen=True)
class FeatureFilter:
    allowed: frozenset[str]
    dropped_singletons: int = 0
    dropped_frequent: int = 0

    def apply(self, vec: FeatureVector) -> FeatureVector:
        return {f: c for f, c in vec.items() if f in self.allowed}


def build_feature_filter(training_vectors: list[FeatureVector]) -> FeatureFilter:
    """Drop document-frequency-1 features and the most frequent 5%.

    Frequency is document frequency over mentions. The top cut removes
    ceil(0.05 * V) features by df, ties broken by feature id.
    """
    if not training_vectors:
        raise ValueError("cannot build a feature filter from zero vectors")
    df: Counter[str] = Counter()
    for vec in training_vectors:
        df.update(vec.keys())
    vocab_size = len(df)
    n_top = -(-vocab_size * 5 // 100)  # ceil(0.05 * V)
    by_freq = sorted(df.items(), key=lambda kv: (-kv[1], kv[0]))
    frequent = {f for f, _ in by_freq[:n_top]}
    singletons = {f for f, c in df.items() if c == 1}
    allowed = frozenset(df.keys() - frequent - singletons)
    return FeatureFilter(
        allowed=allowed,
        dropped_singletons=len(singletons - frequent),
        dropped_frequent=len(frequent),
    )
