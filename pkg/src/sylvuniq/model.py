"""Systems of generalized Sylvester / conjugate-Sylvester equations.

A general system is a list of equations

    A_i X_{a_i}^{s_i} B_i - C_i X_{b_i}^{t_i} D_i = E_i

where each unknown reference may be conjugated.  All unknowns are ``m x n``,
``A_i, C_i`` are ``m x m`` and ``B_i, D_i`` are ``n x n``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import jsonschema
import numpy as np

from .exceptions import ParseError, ShapeError, ValidationError

__all__ = [
    "UnknownRef",
    "GeneralEquation",
    "GeneralSystem",
    "PeriodicSystem",
    "Violation",
    "validate",
    "parse_system",
    "serialize_system",
    "matrix_to_json",
    "matrix_from_json",
]


def _cmat(x) -> np.ndarray:
    a = np.array(x, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    a.setflags(write=False)
    return a


def _same(a: Optional[np.ndarray], b: Optional[np.ndarray]) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return a.shape == b.shape and np.array_equal(a, b)


@dataclass(frozen=True)
class UnknownRef:
    """Reference to unknown ``X_index``, or its entrywise conjugate."""

    index: int
    conj: bool = False

    def __post_init__(self):
        if isinstance(self.index, bool) or int(self.index) != self.index or self.index < 1:
            raise ValueError(f"unknown index must be a positive integer, got {self.index!r}")


@dataclass(frozen=True, eq=False)
class GeneralEquation:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    left: UnknownRef
    right: UnknownRef
    E: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in "ABCD":
            object.__setattr__(self, name, _cmat(getattr(self, name)))
        if self.E is not None:
            object.__setattr__(self, "E", _cmat(self.E))

    def __eq__(self, other):
        if not isinstance(other, GeneralEquation):
            return NotImplemented
        return (self.left == other.left and self.right == other.right
                and all(_same(getattr(self, k), getattr(other, k)) for k in "ABCDE"))

    __hash__ = None

    def homogeneous(self) -> "GeneralEquation":
        return GeneralEquation(self.A, self.B, self.C, self.D, self.left, self.right)

    def flipped(self) -> "GeneralEquation":
        """The negated equation with the two terms exchanged (same solutions when E = 0)."""
        E = None if self.E is None else -self.E
        return GeneralEquation(self.C, self.D, self.A, self.B, self.right, self.left, E)


@dataclass(frozen=True, eq=False)
class GeneralSystem:
    m: int
    n: int
    equations: Tuple[GeneralEquation, ...]

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))

    def __eq__(self, other):
        if not isinstance(other, GeneralSystem):
            return NotImplemented
        return (self.m == other.m and self.n == other.n
                and len(self.equations) == len(other.equations)
                and all(a == b for a, b in zip(self.equations, other.equations)))

    __hash__ = None

    def __len__(self):
        return len(self.equations)

    @property
    def unknown_ids(self) -> List[int]:
        ids = set()
        for eq in self.equations:
            ids.add(eq.left.index)
            ids.add(eq.right.index)
        return sorted(ids)

    def subsystem(self, indices: Sequence[int]) -> "GeneralSystem":
        return GeneralSystem(self.m, self.n, [self.equations[i] for i in indices])

    def homogeneous(self) -> "GeneralSystem":
        return GeneralSystem(self.m, self.n, [eq.homogeneous() for eq in self.equations])

    def has_rhs(self) -> bool:
        return any(eq.E is not None for eq in self.equations)


@dataclass(frozen=True, eq=False)
class PeriodicSystem:
    """Cycle ``A_i X_i B_i - C_i X_{i+1} D_i = 0``; the last link hits ``X_1``
    or, when ``conj`` is set, its conjugate."""

    A: Tuple[np.ndarray, ...]
    B: Tuple[np.ndarray, ...]
    C: Tuple[np.ndarray, ...]
    D: Tuple[np.ndarray, ...]
    conj: bool = False

    def __post_init__(self):
        for name in "ABCD":
            object.__setattr__(self, name, tuple(_cmat(x) for x in getattr(self, name)))
        r = len(self.A)
        if r == 0 or any(len(getattr(self, k)) != r for k in "BCD"):
            raise ShapeError("periodic system needs r >= 1 matrices in each of A, B, C, D")
        m, n = self.A[0].shape[0], self.B[0].shape[0]
        for k, size in (("A", m), ("C", m), ("B", n), ("D", n)):
            for i, X in enumerate(getattr(self, k)):
                if X.shape != (size, size):
                    raise ShapeError(f"{k}[{i}] has shape {X.shape}, expected {(size, size)}")

    def __eq__(self, other):
        if not isinstance(other, PeriodicSystem):
            return NotImplemented
        return (self.conj == other.conj and self.r == other.r
                and all(_same(x, y) for k in "ABCD"
                        for x, y in zip(getattr(self, k), getattr(other, k))))

    __hash__ = None

    @property
    def r(self) -> int:
        return len(self.A)

    @property
    def m(self) -> int:
        return self.A[0].shape[0]

    @property
    def n(self) -> int:
        return self.B[0].shape[0]

    def to_general(self, sign: int = -1) -> GeneralSystem:
        """Express as a general system on unknowns ``1..r``.

        ``sign=+1`` gives the plus-signed companion system (second term added).
        """
        if sign not in (-1, 1):
            raise ValueError("sign must be -1 or +1")
        r = self.r
        eqs = []
        for i in range(r):
            right = UnknownRef(i + 2, False) if i < r - 1 else UnknownRef(1, self.conj)
            C = self.C[i] if sign == -1 else -self.C[i]
            eqs.append(GeneralEquation(self.A[i], self.B[i], C, self.D[i], UnknownRef(i + 1), right))
        return GeneralSystem(self.m, self.n, eqs)


@dataclass(frozen=True)
class Violation:
    equation: int
    matrix: str
    shape: Tuple[int, ...]
    expected: Tuple[int, int]

    def __str__(self):
        return (f"equation {self.equation}: {self.matrix} has shape {self.shape}, "
                f"expected {self.expected}")


def validate(sys: GeneralSystem) -> List[Violation]:
    """Shape violations of ``sys`` (empty when every size rule holds)."""
    m, n = sys.m, sys.n
    out = []
    for i, eq in enumerate(sys.equations):
        expected = {"A": (m, m), "B": (n, n), "C": (m, m), "D": (n, n), "E": (m, n)}
        for name, shape in expected.items():
            X = getattr(eq, name)
            if X is not None and X.shape != shape:
                out.append(Violation(i, name, tuple(X.shape), shape))
    return out


_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _COMPLEX}}
_REF = {
    "type": "object",
    "properties": {"x": {"type": "integer", "minimum": 1}, "conj": {"type": "boolean"}},
    "required": ["x"],
}
SCHEMA = {
    "type": "object",
    "properties": {
        "m": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "equations": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "A": _MATRIX, "B": _MATRIX, "C": _MATRIX, "D": _MATRIX,
                    "E": {"oneOf": [_MATRIX, {"type": "null"}]},
                    "left": _REF, "right": _REF,
                    "sign": {"enum": ["-", "+"]},
                },
                "required": ["A", "B", "C", "D", "left", "right"],
            },
        },
    },
    "required": ["m", "n", "equations"],
}


def matrix_from_json(rows) -> np.ndarray:
    """Decode row-major nested lists of ``[re, im]`` pairs (bare numbers allowed)."""
    if len(rows) == 0:
        return np.zeros((0, 0), dtype=complex)
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ParseError("ragged matrix rows")
    out = np.empty((len(rows), width), dtype=complex)
    for i, row in enumerate(rows):
        for j, z in enumerate(row):
            out[i, j] = complex(z[0], z[1]) if isinstance(z, list) else complex(z)
    return out


def matrix_to_json(X) -> list:
    X = np.asarray(X, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in X]


def parse_system(text) -> GeneralSystem:
    """Parse a JSON system document.

    Equations carrying ``"sign": "+"`` are normalized to the subtracted form
    by negating ``C``.

    Raises
    ------
    ParseError
        Malformed JSON or schema mismatch.
    ValidationError
        Coefficient shapes inconsistent with ``m`` and ``n``.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise ParseError(f"schema violation at '{path}': {exc.message}") from exc

    eqs = []
    for item in doc["equations"]:
        C = matrix_from_json(item["C"])
        if item.get("sign", "-") == "+":
            C = -C
        E = item.get("E")
        eqs.append(GeneralEquation(
            A=matrix_from_json(item["A"]),
            B=matrix_from_json(item["B"]),
            C=C,
            D=matrix_from_json(item["D"]),
            left=UnknownRef(item["left"]["x"], bool(item["left"].get("conj", False))),
            right=UnknownRef(item["right"]["x"], bool(item["right"].get("conj", False))),
            E=None if E is None else matrix_from_json(E),
        ))
    sys = GeneralSystem(doc["m"], doc["n"], eqs)
    violations = validate(sys)
    if violations:
        raise ValidationError(violations)
    return sys


def system_to_json(sys: GeneralSystem) -> dict:
    equations = []
    for eq in sys.equations:
        equations.append({
            "A": matrix_to_json(eq.A),
            "B": matrix_to_json(eq.B),
            "C": matrix_to_json(eq.C),
            "D": matrix_to_json(eq.D),
            "left": {"x": eq.left.index, "conj": eq.left.conj},
            "right": {"x": eq.right.index, "conj": eq.right.conj},
            "sign": "-",
            "E": None if eq.E is None else matrix_to_json(eq.E),
        })
    return {"m": sys.m, "n": sys.n, "equations": equations}


def serialize_system(sys: GeneralSystem) -> bytes:
    return json.dumps(system_to_json(sys), indent=1).encode("utf-8")
