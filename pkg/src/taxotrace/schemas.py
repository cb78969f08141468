"""Published JSON schemas for file formats and service payloads.

These are the contracts external tooling may rely on; the test suite
validates real outputs against them.
"""

from __future__ import annotations

CSV_COLUMNS = [
    "taxonomy", "model", "k", "P", "R", "F1", "Fbeta", "beta",
    "Da", "Dn", "Dn_pred_centric", "skipped",
]

ARTIFACT_RECORD_SCHEMA = {
    "type": "object",
    "required": ["id", "text"],
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "text": {"type": "string", "minLength": 1},
        "document_title": {"type": ["string", "null"]},
        "section_title": {"type": ["string", "null"]},
    },
    "additionalProperties": False,
}

PREDICTION_RECORD_SCHEMA = {
    "type": "object",
    "required": ["artifact_id", "taxonomy", "model", "k", "labels"],
    "properties": {
        "artifact_id": {"type": "string"},
        "taxonomy": {"type": "string"},
        "model": {"type": "string"},
        "k": {"type": "integer", "minimum": 1},
        "labels": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["node_id", "score", "rank"],
                "properties": {
                    "node_id": {"type": "string"},
                    "score": {"type": "number"},
                    "rank": {"type": "integer", "minimum": 1},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

GROUND_TRUTH_RECORD_SCHEMA = {
    "type": "object",
    "required": ["artifact_id", "taxonomy", "labels"],
    "properties": {
        "artifact_id": {"type": "string"},
        "taxonomy": {"type": "string"},
        "labels": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}

_DISTANCE_SCHEMA = {
    "type": ["object", "null"],
    "required": ["d_abs", "d_norm", "d_max"],
    "properties": {
        "d_abs": {"type": "number", "minimum": 0},
        "d_norm": {"type": "number", "minimum": 0, "maximum": 1},
        "d_max": {"type": "integer", "minimum": 2},
        "pred_centric": {
            "type": "object",
            "properties": {
                "d_abs": {"type": ["number", "null"]},
                "d_norm": {"type": ["number", "null"]},
            },
        },
        "per_artifact": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["artifact_id", "d_abs", "d_norm", "matches"],
                "properties": {
                    "artifact_id": {"type": "string"},
                    "d_abs": {"type": "number"},
                    "d_norm": {"type": "number"},
                    "matches": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["true_id", "predicted_id", "hops"],
                            "properties": {
                                "true_id": {"type": "string"},
                                "predicted_id": {"type": "string"},
                                "hops": {"type": "integer", "minimum": 0},
                            },
                        },
                    },
                },
            },
        },
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "required": [
        "taxonomy", "model", "k", "beta", "precision", "recall",
        "f1", "f_beta", "counts", "distance", "evaluated", "skipped",
    ],
    "properties": {
        "taxonomy": {"type": "string"},
        "model": {"type": "string"},
        "k": {"type": "integer", "minimum": 0},
        "beta": {"type": "number", "exclusiveMinimum": 0},
        "precision": {"type": "number", "minimum": 0, "maximum": 1},
        "recall": {"type": "number", "minimum": 0, "maximum": 1},
        "f1": {"type": "number", "minimum": 0, "maximum": 1},
        "f_beta": {"type": "number", "minimum": 0, "maximum": 1},
        "counts": {
            "type": "object",
            "required": ["tp", "fp", "fn"],
            "properties": {
                "tp": {"type": "integer", "minimum": 0},
                "fp": {"type": "integer", "minimum": 0},
                "fn": {"type": "integer", "minimum": 0},
            },
        },
        "distance": _DISTANCE_SCHEMA,
        "evaluated": {"type": "integer", "minimum": 0},
        "skipped": {"type": "integer", "minimum": 0},
        "failures": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["artifact_id", "error"],
                "properties": {
                    "artifact_id": {"type": "string"},
                    "error": {"type": "string"},
                },
            },
        },
        "dropped_no_truth": {"type": "integer", "minimum": 0},
    },
}

TAXONOMY_NODE_SCHEMA = {
    "type": "object",
    "required": ["id", "label", "description", "parent_id"],
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "label": {"type": "string"},
        "description": {"type": "string"},
        "parent_id": {"type": ["string", "null"]},
    },
    "additionalProperties": False,
}

SUGGESTION_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["artifact_id", "taxonomy_name", "model", "k", "radius", "suggestions"],
    "properties": {
        "artifact_id": {"type": "string"},
        "taxonomy_name": {"type": "string"},
        "model": {"type": "string"},
        "k": {"type": "integer", "minimum": 1},
        "radius": {"type": "integer", "minimum": 0},
        "suggestions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["node_id", "label", "score", "rank", "neighbors"],
                "properties": {
                    "node_id": {"type": "string"},
                    "label": {"type": "string"},
                    "score": {"type": "number"},
                    "rank": {"type": "integer", "minimum": 1},
                    "neighbors": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["node_id", "label", "distance"],
                            "properties": {
                                "node_id": {"type": "string"},
                                "label": {"type": "string"},
                                "distance": {"type": "integer", "minimum": 0},
                            },
                            "additionalProperties": False,
                        },
                    },
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

ANNOTATION_RECORD_SCHEMA = {
    "type": "object",
    "required": ["artifact_id", "taxonomy_name", "accepted", "rejected", "reviewer", "timestamp"],
    "properties": {
        "artifact_id": {"type": "string"},
        "taxonomy_name": {"type": "string"},
        "accepted": {"type": "array", "items": {"type": "string"}},
        "rejected": {"type": "array", "items": {"type": "string"}},
        "reviewer": {"type": "string", "minLength": 1},
        "timestamp": {"type": "string"},
    },
    "additionalProperties": False,
}

PROGRESS_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["dataset_size", "taxonomies"],
    "properties": {
        "dataset_size": {"type": "integer", "minimum": 0},
        "taxonomies": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["taxonomy", "reviewed", "pending"],
                "properties": {
                    "taxonomy": {"type": "string"},
                    "reviewed": {"type": "integer", "minimum": 0},
                    "pending": {"type": "integer", "minimum": 0},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}
