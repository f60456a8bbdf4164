"""JSON file formats for specs, reports and summaries.

All files are canonical JSON (fixed key order, two-space indent, trailing
newline), so equal content means equal bytes.  Rationals are ``"p/q"``
strings and classifiers are bitstrings with index 0 leftmost.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any

from .classifier import Classifier
from .errors import DomainError, SpecError
from .oracle import GrayPolicy, OracleSpec

SPEC_VERSION = 1


def rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"not a rational: {text!r}") from exc


def spec_to_dict(spec: OracleSpec) -> dict[str, Any]:
    g = spec.gray_policy
    return {
        "version": SPEC_VERSION,
        "n": spec.n,
        "delta": rational(spec.delta),
        "distance_kind": spec.distance_kind.value,
        "T": [str(t) for t in spec.truth],
        "context_count": spec.context_count,
        "accepting_contexts": {str(i): sorted(a) for i, a in enumerate(spec.accepting_contexts)},
        "gray_policy": {
            "kind": g.kind.value,
            "accept_probability": rational(g.accept_probability),
            "seed": g.seed,
        },
        "enforce_flip_rejection": spec.enforce_flip_rejection,
    }


def spec_from_dict(data: dict[str, Any]) -> OracleSpec:
    try:
        if data.get("version") != SPEC_VERSION:
            raise SpecError(f"unsupported spec version {data.get('version')!r}")
        truth = tuple(Classifier.from_string(s) for s in data["T"])
        acc_raw = data["accepting_contexts"]
        if sorted(acc_raw, key=int) != [str(i) for i in range(len(truth))]:
            raise SpecError("accepting_contexts must have keys 0..|T|-1")
        acc = tuple(frozenset(acc_raw[str(i)]) for i in range(len(truth)))
        g = data["gray_policy"]
        return OracleSpec(
            n=int(data["n"]),
            truth=truth,
            delta=parse_rational(data["delta"]),
            distance_kind=data["distance_kind"],
            context_count=int(data["context_count"]),
            accepting_contexts=acc,
            gray_policy=GrayPolicy(g["kind"], parse_rational(g["accept_probability"]), int(g["seed"])),
            enforce_flip_rejection=bool(data["enforce_flip_rejection"]),
        )
    except (KeyError, TypeError, DomainError) as exc:
        raise SpecError(f"malformed spec file: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"malformed spec file: {exc}") from exc


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=True) + "\n"


def dump_spec(spec: OracleSpec) -> str:
    return dumps(spec_to_dict(spec))


def load_spec(text: str) -> OracleSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec file is not JSON: {exc}") from exc
    return spec_from_dict(data)


def spec_digest(spec: OracleSpec) -> str:
    return hashlib.sha256(dump_spec(spec).encode()).hexdigest()


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path: str | os.PathLike) -> Any:
    with open(path, encoding="ascii") as fh:
        return json.load(fh)
