"""Report plumbing: canonical JSON, CSV dumps and the verification report."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

PROVENANCE = ("paper", "trivial", "derived")


def plain(obj):
    """Recursively convert to JSON-safe builtins.

    Non-finite floats become the strings "inf", "-inf", "nan"; complex numbers
    become [re, im]; Fractions become "p/q".
    """
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [plain(float(obj.real)), plain(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if hasattr(obj, "to_json"):
        return plain(obj.to_json())
    return obj


def dumps(obj) -> str:
    """Byte-stable JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(plain(obj), sort_keys=True, indent=2, ensure_ascii=False,
                      allow_nan=False) + "\n"


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))
    return path


def g17(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([g17(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


@dataclass
class Case:
    id: str
    criterion: int
    inputs: dict
    expected: object
    provenance: str
    actual: object
    margin: object
    passed: bool
    notes: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)
        if self.provenance not in PROVENANCE:
            raise ValueError(f"provenance must be one of {PROVENANCE}")

    def to_json(self):
        out = {"id": self.id, "criterion": self.criterion, "inputs": self.inputs,
               "expected": {"value": self.expected, "provenance": self.provenance},
               "actual": self.actual, "margin": self.margin,
               "verdict": "pass" if self.passed else "fail"}
        if self.notes:
            out["notes"] = self.notes
        return out


@dataclass
class VerificationReport:
    suite: str
    environment: dict
    cases: list = field(default_factory=list)

    def add(self, case: Case):
        self.cases.append(case)
        return case

    @property
    def failures(self):
        return [c for c in self.cases if not c.passed]

    @property
    def passed(self):
        return not self.failures

    def criteria(self):
        out = {}
        for c in self.cases:
            out[c.criterion] = out.get(c.criterion, True) and c.passed
        return dict(sorted(out.items()))

    def to_json(self):
        return {"suite": self.suite, "environment": self.environment,
                "criteria": {str(k): "pass" if v else "fail"
                             for k, v in self.criteria().items()},
                "cases": sorted(self.cases, key=lambda c: (c.criterion, c.id)),
                "passed": self.passed}
