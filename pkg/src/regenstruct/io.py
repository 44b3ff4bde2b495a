"""JSON documents, model specifications and decimal rendering.

Rationals always travel as canonical ``"num/den"`` strings, partitions as
non-increasing integer arrays and compositions as ordered integer arrays.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from .core import Partition, ValidationError, as_fraction, check_composition, enumerate_partitions, format_fraction
from .eppf import Levels, PartitionDistribution, TwoParamModel, model_levels
from .kernels import DecrementRow
from .paintbox import LevyMeasureSpec, decrement_from_paintbox, parse_spec
from .regen import DecrementMatrix, full_matrix, invert_p_to_q, matrix_levels, two_param_decrement


def to_decimal(q: Fraction, digits: int = 12) -> str:
    """Fixed-point rendering rounded half-even to ``digits`` places; display only."""
    q = Fraction(q)
    with localcontext() as ctx:
        ctx.prec = digits + len(str(abs(q.numerator) // q.denominator)) + 5
        d = Decimal(q.numerator) / Decimal(q.denominator)
        return format(d.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN), "f")


def partition_to_json(lam: Partition) -> list[int]:
    return list(lam.parts)


def partition_from_json(data) -> Partition:
    return Partition(int(x) for x in data)


def composition_to_json(c) -> list[int]:
    return list(c)


def composition_from_json(data) -> tuple[int, ...]:
    return check_composition(data)


def read_json(source) -> dict:
    """Parse a JSON string, a path, or ``@path``."""
    if isinstance(source, dict):
        return source
    text = str(source)
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    elif not text.lstrip().startswith(("{", "[")):
        text = Path(text).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from None


# --------------------------------------------------------------------------
# decrement matrices

def matrix_to_json(Q: DecrementMatrix) -> dict:
    return {"n_max": Q.n_max, "rows": [[format_fraction(v) for v in row] for row in Q.rows]}


def matrix_from_json(data) -> DecrementMatrix:
    data = read_json(data)
    rows = data.get("rows")
    if rows is None:
        raise ValidationError("decrement matrix JSON needs a 'rows' field")
    Q = DecrementMatrix(DecrementRow(as_fraction(v) for v in row) for row in rows)
    if "n_max" in data and int(data["n_max"]) != Q.n_max:
        raise ValidationError(f"n_max {data['n_max']} disagrees with {Q.n_max} rows")
    return Q


def row_from_text(text: str) -> DecrementRow:
    """``"1/3,1/3,1/3"`` -> row."""
    return DecrementRow(as_fraction(v) for v in text.split(",") if v.strip())


# --------------------------------------------------------------------------
# p-files

def levels_to_json(levels: Levels) -> dict:
    n = max(levels)
    out = []
    for m in range(1, n + 1):
        for lam in enumerate_partitions(m):
            out.append({"partition": partition_to_json(lam), "prob": format_fraction(levels[m][lam])})
    return {"n": n, "levels": out}


def levels_from_json(data) -> Levels:
    data = read_json(data)
    try:
        n = int(data["n"])
        entries = data["levels"]
    except KeyError as exc:
        raise ValidationError(f"p-file missing field {exc}") from None
    probs: dict[int, dict] = {m: {} for m in range(1, n + 1)}
    for e in entries:
        lam = partition_from_json(e["partition"])
        if not 1 <= lam.n <= n:
            raise ValidationError(f"partition {lam} outside levels 1..{n}")
        if lam in probs[lam.n]:
            raise ValidationError(f"partition {lam} listed twice")
        probs[lam.n][lam] = as_fraction(e["prob"])
    return {m: PartitionDistribution(m, probs[m]) for m in range(1, n + 1)}


# --------------------------------------------------------------------------
# model specs

@dataclass(frozen=True)
class ModelSpec:
    """Exactly one source of a structure.

    ``kind`` is ``two-parameter``, ``ewens``, ``paintbox``, ``decrement``
    or ``p-levels``.
    """

    kind: str
    payload: object

    def decrement_row(self, n: int) -> DecrementRow:
        if self.kind in ("two-parameter", "ewens"):
            m: TwoParamModel = self.payload
            if m.extended_range and not (0 <= m.theta):
                # outside the regenerative range: recover q from p and let it fail loudly
                return invert_p_to_q(model_levels(m, n))
            return two_param_decrement(m.alpha, m.theta, n)
        if self.kind == "paintbox":
            return decrement_from_paintbox(self.payload, n)
        if self.kind == "decrement":
            Q: DecrementMatrix = self.payload
            if n > Q.n_max:
                raise ValidationError(f"decrement matrix stops at level {Q.n_max} < {n}")
            return Q.row(n)
        if self.kind == "p-levels":
            levels: Levels = self.payload
            if n > max(levels):
                raise ValidationError(f"p-file stops at level {max(levels)} < {n}")
            return invert_p_to_q({m: levels[m] for m in range(1, n + 1)})
        raise ValidationError(f"unknown model kind {self.kind}")

    def matrix(self, n: int) -> DecrementMatrix:
        return full_matrix(self.decrement_row(n))

    def levels(self, n: int) -> Levels:
        if self.kind in ("two-parameter", "ewens"):
            return model_levels(self.payload, n)
        if self.kind == "p-levels":
            return {m: self.payload[m] for m in range(1, n + 1)}
        return matrix_levels(self.matrix(n))

    def describe(self) -> dict:
        if self.kind in ("two-parameter", "ewens"):
            m = self.payload
            out = {"family": self.kind, "theta": format_fraction(m.theta)}
            if self.kind == "two-parameter":
                out["alpha"] = format_fraction(m.alpha)
            return out
        if self.kind == "paintbox":
            return {"family": "paintbox", **spec_to_json(self.payload)}
        return {"family": self.kind}


def spec_to_json(spec: LevyMeasureSpec) -> dict:
    out = {"atoms": [{"u": format_fraction(u), "w": format_fraction(w)} for u, w in spec.atoms],
           "drift": format_fraction(spec.drift)}
    if spec.beta is not None:
        out["beta"] = {"c": format_fraction(spec.beta.c), "sigma": format_fraction(spec.beta.sigma),
                       "theta": format_fraction(spec.beta.theta)}
    return out


def model_from_json(data, extended_range: bool = False) -> ModelSpec:
    """``{"family": "two-parameter", "alpha": "1/2", "theta": "1/2"}``,
    ``{"family": "ewens", "theta": "1"}``, a paintbox spec (optionally with
    ``"family": "paintbox"``), a decrement matrix or a p-file document."""
    data = read_json(data)
    family = data.get("family")
    if family == "two-parameter":
        return ModelSpec(family, TwoParamModel(data["alpha"], data["theta"],
                                               extended_range or bool(data.get("extended_range"))))
    if family == "ewens":
        return ModelSpec(family, TwoParamModel.ewens(data["theta"]))
    if family == "paintbox" or (family is None and ("atoms" in data or "beta" in data or "drift" in data)):
        return ModelSpec("paintbox", parse_spec(data))
    if family is None and "rows" in data:
        return ModelSpec("decrement", matrix_from_json(data))
    if family is None and "levels" in data:
        return ModelSpec("p-levels", levels_from_json(data))
    raise ValidationError(f"unrecognized model document with family={family!r}")
