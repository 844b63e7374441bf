"""
Certificate documents (schema version "1").

A document is JSON with four top-level keys:

    schema_version  "1"
    command         {"name": ..., "args": {...}}
    certificate     S, k, delta, E, multiplier, evidence, witness, log,
                    complete, failure
    checks          [{"name", "passed", "detail", "elapsed"}]

Integers are JSON numbers, rationals are "p/q" strings. Keys are sorted so
the certificate body serializes identically across runs; timings appear only
under checks.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from recforge.assembly import RecurrenceCertificate
from recforge.errors import DocumentError
from recforge.graphs import ChromaticEvidence
from recforge.rationals import format_fraction

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"


@dataclass
class CertificateDocument:
    schema_version: str
    command: Dict[str, Any]
    certificate: Dict[str, Any]
    checks: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "certificate": self.certificate,
            "checks": self.checks,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1, default=str) + "\n"


def evidence_to_dict(evidence: ChromaticEvidence) -> Dict[str, Any]:
    return {
        "kind": evidence.kind,
        "colors": evidence.colors,
        "vertices": [int(v) for v in evidence.vertices],
        "edges": [[int(a), int(b)] for a, b in evidence.edges],
        "lower_bound": evidence.lower_bound,
        "kneser": list(evidence.kneser) if evidence.kneser else None,
        "solver": dict(evidence.solver),
    }


def serialize_certificate(certificate: RecurrenceCertificate) -> Dict[str, Any]:
    """The certificate body as plain JSON-ready data."""
    failure = certificate.failure
    return {
        "S": [int(s) for s in certificate.S],
        "k": certificate.k,
        "delta": format_fraction(certificate.delta),
        "E": certificate.E,
        "multiplier": certificate.multiplier,
        "evidence": evidence_to_dict(certificate.evidence),
        "witness": certificate.witness.to_dict(),
        "log": certificate.log,
        "complete": certificate.complete,
        "failure": (
            {"stage": failure.stage, "reason": failure.reason, "details": failure.details} if failure else None
        ),
    }


def build_document(
    certificate: RecurrenceCertificate, command: str, args: Dict[str, Any], checks: Optional[List[Dict[str, Any]]] = None
) -> CertificateDocument:
    return CertificateDocument(
        schema_version=SCHEMA_VERSION,
        command={"name": command, "args": args},
        certificate=serialize_certificate(certificate),
        checks=checks or [],
    )


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------


def _require(mapping: Dict[str, Any], key: str, kind: type, where: str) -> Any:
    if not isinstance(mapping, dict) or key not in mapping:
        raise DocumentError(f"{where}: missing '{key}'")
    value = mapping[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise DocumentError(f"{where}.{key}: expected an integer, got {value!r}")
    if kind is not int and not isinstance(value, kind):
        raise DocumentError(f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _int_list(values: Any, where: str) -> List[int]:
    if not isinstance(values, list) or any(isinstance(v, bool) or not isinstance(v, int) for v in values):
        raise DocumentError(f"{where}: expected a list of integers")
    return values


def _rational(value: Any, where: str) -> Fraction:
    if not isinstance(value, str) or "/" not in value:
        raise DocumentError(f"{where}: expected 'p/q', got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as e:
        raise DocumentError(f"{where}: {e}") from e


def validate_certificate_body(body: Any) -> Dict[str, Any]:
    """Check field presence and types; the mathematical checks live in recforge.verify."""
    if not isinstance(body, dict):
        raise DocumentError("certificate must be an object")
    _int_list(_require(body, "S", list, "certificate"), "certificate.S")
    _require(body, "k", int, "certificate")
    _rational(_require(body, "delta", str, "certificate"), "certificate.delta")
    if body.get("E") is not None and not isinstance(body["E"], str):
        raise DocumentError("certificate.E: expected a string or null")
    if "multiplier" in body:
        _require(body, "multiplier", int, "certificate")

    witness = _require(body, "witness", dict, "certificate")
    _int_list(_require(witness, "B", list, "witness"), "witness.B")
    _require(witness, "m", int, "witness")
    _int_list(_require(witness, "S", list, "witness"), "witness.S")
    _rational(_require(witness, "delta", str, "witness"), "witness.delta")

    evidence = _require(body, "evidence", dict, "certificate")
    _require(evidence, "kind", str, "evidence")
    _require(evidence, "colors", int, "evidence")
    _int_list(_require(evidence, "vertices", list, "evidence"), "evidence.vertices")
    edges = _require(evidence, "edges", list, "evidence")
    for edge in edges:
        _int_list(edge, "evidence.edges")
        if len(edge) != 2:
            raise DocumentError("evidence.edges: every edge needs two endpoints")
    if evidence.get("kneser") is not None:
        _int_list(evidence["kneser"], "evidence.kneser")
    return body


def parse_document(text: str) -> CertificateDocument:
    """
    Parse and shape-check a document.

    Raises:
        DocumentError: on empty input, invalid JSON, unknown schema or bad fields
    """
    if not text or not text.strip():
        raise DocumentError("empty document")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"invalid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise DocumentError("document must be an object")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DocumentError(f"unsupported schema_version {version!r}")
    command = raw.get("command") or {}
    checks = raw.get("checks") or []
    if not isinstance(command, dict) or not isinstance(checks, list):
        raise DocumentError("command must be an object and checks a list")
    return CertificateDocument(version, command, validate_certificate_body(raw.get("certificate")), checks)


def read_document(path: str) -> CertificateDocument:
    """Raises OSError for I/O problems and DocumentError for content problems."""
    return parse_document(Path(path).read_text(encoding="utf-8"))


def write_document(document: CertificateDocument, path: Optional[str]) -> None:
    text = document.to_json()
    if path is None or path == "-":
        print(text, end="")
        return
    Path(path).write_text(text, encoding="utf-8")
    logger.info(f"Wrote certificate to {path}")
