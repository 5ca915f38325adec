"""Combinatorial input describing one Jordan-type stratum, plus spec-file parsing."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import jsonschema

from .errors import DomainError, ParityError, SpecError
from .exact import GaussianRational, scalar_from_json, scalar_to_json

__all__ = [
    "ShapeSpec",
    "SpecError",
    "DomainError",
    "ParityError",
    "SPEC_SCHEMA",
    "load_spec_document",
    "parse_spec_document",
]


@dataclass(frozen=True)
class ShapeSpec:
    """Shape ``(c, alpha, m)`` with either a sign ``epsilon`` or an eigenvalue ``lam``.

    ``c = 1`` selects the orthogonal / skew-symmetric setting, ``c = 2`` the
    symplectic / Hamiltonian one.  ``lam is None`` means the nilpotent
    (unipotent) case.
    """

    c: int
    alpha: tuple[int, ...]
    m: tuple[int, ...]
    epsilon: int | None = None
    lam: GaussianRational | None = None
    mu: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        if self.c not in (1, 2):
            raise DomainError(f"c must be 1 or 2, got {self.c}")
        if not self.alpha:
            raise DomainError("alpha must be non-empty")
        if len(self.alpha) != len(self.m):
            raise DomainError("alpha and m must have the same length")
        if any(a < 1 for a in self.alpha) or any(x < 1 for x in self.m):
            raise DomainError("alpha and m entries must be positive")
        if any(a <= b for a, b in zip(self.alpha, self.alpha[1:])):
            raise DomainError(f"alpha must be strictly decreasing, got {list(self.alpha)}")
        if self.lam is not None:
            lam = self.lam if isinstance(self.lam, GaussianRational) else GaussianRational(self.lam)
            if lam.is_zero:
                raise DomainError("lambda = 0 belongs to the nilpotent case; omit it")
            object.__setattr__(self, "lam", lam)
            if self.epsilon is not None:
                raise DomainError("epsilon applies to the nilpotent case only")
            mu = self.m
        else:
            if self.epsilon is None:
                object.__setattr__(self, "epsilon", 1)
            if self.epsilon not in (1, -1):
                raise DomainError(f"epsilon must be +1 or -1, got {self.epsilon}")
            mu = tuple(x if (self.c + a) % 2 == 0 else 2 * x for a, x in zip(self.alpha, self.m))
        object.__setattr__(self, "mu", mu)

    @property
    def N(self) -> int:
        return len(self.alpha)

    @property
    def nilpotent(self) -> bool:
        return self.lam is None

    @property
    def n(self) -> int:
        if self.nilpotent:
            return sum(a * u for a, u in zip(self.alpha, self.mu))
        return 2 * sum(a * x for a, x in zip(self.alpha, self.m))

    def paired(self, r: int) -> bool:
        """Whether the ``r``-th nilpotent block type comes as a ``J (+) -J^T`` pair."""
        return (self.c + self.alpha[r]) % 2 == 1

    def to_json(self) -> dict:
        out: dict[str, Any] = {"c": self.c, "alpha": list(self.alpha), "m": list(self.m)}
        if self.nilpotent:
            out["epsilon"] = self.epsilon
        else:
            out["lambda"] = scalar_to_json(self.lam)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ShapeSpec":
        try:
            jsonschema.validate(obj, _SHAPE_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise SpecError(f"invalid shape spec: {exc.message}") from None
        lam = obj.get("lambda")
        if lam is not None:
            try:
                lam = scalar_from_json(lam)
            except (ValueError, ZeroDivisionError) as exc:
                raise SpecError(f"invalid lambda: {exc}") from None
        return cls(c=obj["c"], alpha=obj["alpha"], m=obj["m"], epsilon=obj.get("epsilon"), lam=lam)

    def __str__(self):
        tail = f"eps={self.epsilon:+d}" if self.nilpotent else f"lambda={self.lam}"
        return f"c={self.c} alpha={list(self.alpha)} m={list(self.m)} {tail}"


_FRACTION = {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}
_SCALAR = {
    "oneOf": [
        {"type": "object", "properties": {"re": _FRACTION, "im": _FRACTION},
         "additionalProperties": False, "minProperties": 1},
        {"type": "integer"},
        _FRACTION,
    ]
}
_SHAPE_SCHEMA = {
    "type": "object",
    "properties": {
        "c": {"enum": [1, 2]},
        "alpha": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "m": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "epsilon": {"enum": [1, -1]},
        "lambda": _SCALAR,
    },
    "required": ["c", "alpha", "m"],
    "additionalProperties": False,
}
SPEC_SCHEMA = {
    "oneOf": [
        _SHAPE_SCHEMA,
        {
            "type": "object",
            "properties": {"parts": {"type": "array", "items": _SHAPE_SCHEMA, "minItems": 1}},
            "required": ["parts"],
            "additionalProperties": False,
        },
    ]
}


def parse_spec_document(obj: Any) -> list[ShapeSpec]:
    """Validate a decoded spec file and return its parts (one part for a plain spec)."""
    try:
        jsonschema.validate(obj, SPEC_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SpecError(f"invalid spec file: {exc.message}") from None
    parts = obj["parts"] if "parts" in obj else [obj]
    return [ShapeSpec.from_json(p) for p in parts]


def load_spec_document(path: str) -> list[ShapeSpec]:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: not valid JSON ({exc})") from None
    except OSError as exc:
        raise SpecError(f"{path}: {exc.strerror}") from None
    return parse_spec_document(obj)
