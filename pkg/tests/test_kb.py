import json

import pytest

from reldistill.kb import (
    SchemaError,
    Triple,
    load_concept_seeds,
    load_schema,
    load_triples,
    match_value,
)


def test_schema_loaded(schema):
    assert schema.relation_names() == [
        "conditionsThisMayPrevent",
        "sideEffect",
        "usedToTreat",
    ]
    assert schema.relation("sideEffect").range_concept == "Symptom"
    assert schema.relation("sideEffect").section_titles == frozenset({"side effects"})
    assert sorted(schema.concepts) == ["DiseaseOrMedicalCondition", "Symptom"]


def test_disease_style_schema(tmp_path):
    obj = {
        "concepts": ["MedicalTreatment", "Symptom", "RiskFactor", "DiseaseCause",
                     "ConditionPreventionFactor"],
        "relations": [
            {"name": "hasTreatment", "range_concept": "MedicalTreatment",
             "section_titles": ["Treatments/Drugs", "Treatments and drugs"]},
            {"name": "hasSymptom", "range_concept": "Symptom", "section_titles": ["Symptoms"]},
            {"name": "riskFactor", "range_concept": "RiskFactor", "section_titles": ["Risk Factors"]},
            {"name": "hasCause", "range_concept": "DiseaseCause", "section_titles": ["Causes"]},
            {"name": "preventionFactor", "range_concept": "ConditionPreventionFactor",
             "section_titles": ["Prevention"]},
        ],
    }
    path = tmp_path / "schema.json"
    path.write_text(json.dumps(obj))
    schema = load_schema(str(path))
    assert len(schema.relations) == 5
    # alias titles both map to hasTreatment
    assert "treatments/drugs" in schema.relation("hasTreatment").section_titles
    assert "treatments and drugs" in schema.relation("hasTreatment").section_titles


def test_overlapping_sections_rejected(tmp_path):
    obj = {
        "concepts": ["C"],
        "relations": [
            {"name": "a", "range_concept": "C", "section_titles": ["Uses"]},
            {"name": "b", "range_concept": "C", "section_titles": ["uses"]},
        ],
    }
    path = tmp_path / "schema.json"
    path.write_text(json.dumps(obj))
    with pytest.raises(SchemaError, match="uses"):
        load_schema(str(path))


def test_unknown_concept_rejected(tmp_path):
    obj = {"concepts": [], "relations": [{"name": "a", "range_concept": "X"}]}
    path = tmp_path / "schema.json"
    path.write_text(json.dumps(obj))
    with pytest.raises(SchemaError, match="unknown concept"):
        load_schema(str(path))


class TestTriples:
    def test_example_triple(self, tmp_path, schema):
        path = tmp_path / "t.tsv"
        path.write_text("sideEffect\tmeloxicam\tnausea\n")
        assert load_triples(str(path), schema) == [
            Triple("sideEffect", "meloxicam", "nausea")
        ]

    def test_dedup(self, tmp_path, schema):
        path = tmp_path / "t.tsv"
        path.write_text("sideEffect\tmeloxicam\tnausea\n" * 3)
        assert len(load_triples(str(path), schema)) == 1

    def test_unknown_relation(self, tmp_path, schema):
        path = tmp_path / "t.tsv"
        path.write_text("notARelation\ta\tb\n")
        with pytest.raises(SchemaError, match="line 1"):
            load_triples(str(path), schema)

    def test_order_independent(self, tmp_path, schema):
        lines = [
            "sideEffect\tmeloxicam\tnausea",
            "usedToTreat\tmeloxicam\tarthritis",
            "sideEffect\tibuprofen\theadache",
        ]
        p1 = tmp_path / "a.tsv"
        p2 = tmp_path / "b.tsv"
        p1.write_text("\n".join(lines) + "\n")
        p2.write_text("\n".join(reversed(lines)) + "\n")
        assert load_triples(str(p1), schema) == load_triples(str(p2), schema)

    def test_noise_filters(self, tmp_path, schema):
        path = tmp_path / "t.tsv"
        path.write_text(
            "sideEffect\tmeloxicam\tnausea, vomiting\n"
            f"sideEffect\tmeloxicam\t{'x' * 61}\n"
            "sideEffect\tmeloxicam\tnausea\n"
        )
        assert load_triples(str(path), schema) == [
            Triple("sideEffect", "meloxicam", "nausea")
        ]


def test_concept_seed_unknown_concept(tmp_path, schema):
    path = tmp_path / "s.tsv"
    path.write_text("NotAConcept\tnausea\n")
    with pytest.raises(SchemaError, match="line 1"):
        load_concept_seeds(str(path), schema)


def test_concept_seeds_loaded(concept_seeds):
    assert {(s.concept, s.instance) for s in concept_seeds} == {
        ("Symptom", "nausea"),
        ("Symptom", "headache"),
        ("DiseaseOrMedicalCondition", "arthritis"),
        ("DiseaseOrMedicalCondition", "pain"),
    }


class TestMatchValue:
    def test_case_normalization(self):
        assert match_value("Nausea", {"nausea"})

    def test_exact_match_only(self):
        assert not match_value("nausea and vomiting", {"nausea"})

    def test_whitespace_collapse(self):
        assert match_value("stomach  upset", {"stomach upset"})
