"""Affine reduction of admissible expression trees.

An AffineModel is the bridge between the regression search and the
scheduler: coefficients are keyed by (channel, lag) so the problem builder
can substitute decision variables and forecast values symbolically.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError
from ..features import ColumnKey, FeatureMatrix, column_name
from .expr import Expr, affine_parts

_NAME_RE = re.compile(r"^(?P<channel>.+?)\[t(?:-(?P<lag>\d+))?\]$")


def parse_column_name(name: str) -> ColumnKey:
    m = _NAME_RE.match(name)
    if not m:
        raise DataError(f"cannot parse feature column name {name!r}")
    lag = m.group("lag")
    return m.group("channel"), int(lag) if lag else 0


@dataclass(frozen=True)
class AffineModel:
    """``intercept + sum(coefficients[(channel, lag)] * value(channel, t-lag))``."""

    intercept: float
    coefficients: dict[ColumnKey, float]
    units: dict[str, str] = field(default_factory=dict)
    target_channel: str = "T_in"

    @property
    def max_lag(self) -> int:
        return max((lag for _, lag in self.coefficients), default=0)

    def channels_used(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for ch, _ in self.coefficients:
            seen.setdefault(ch)
        return tuple(seen)

    def predict(self, data: FeatureMatrix) -> np.ndarray:
        out = np.full(data.n_rows, self.intercept)
        for key, coeff in self.coefficients.items():
            out += coeff * data.X[:, data.column_index(*key)]
        return out

    def equation(self, decimals: int = 3) -> str:
        """Human-readable form, e.g. ``T_in[t+1] = 0.754*T_in[t] + 10.445``."""
        parts: list[str] = []
        for key, coeff in self.coefficients.items():
            sign = "-" if coeff < 0 else "+"
            mag = format(abs(coeff), f".{decimals}f")
            parts.append(f"{sign} {mag}*{column_name(*key)}")
        sign = "-" if self.intercept < 0 else "+"
        parts.append(f"{sign} {format(abs(self.intercept), f'.{decimals}f')}")
        body = " ".join(parts)
        if body.startswith("+ "):
            body = body[2:]
        elif body.startswith("- "):
            body = "-" + body[2:]
        return f"{self.target_channel}[t+1] = {body}"

    def to_json_dict(self) -> dict:
        return {
            "intercept": self.intercept,
            "coefficients": {column_name(*key): value for key, value in self.coefficients.items()},
            "units": dict(self.units),
            "target": self.target_channel,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "AffineModel":
        coeffs = {parse_column_name(name): float(v) for name, v in doc["coefficients"].items()}
        return cls(
            intercept=float(doc["intercept"]),
            coefficients=coeffs,
            units=dict(doc.get("units", {})),
            target_channel=doc.get("target", "T_in"),
        )


def to_affine(
    expr: Expr,
    columns: tuple[ColumnKey, ...],
    units: dict[str, str] | None = None,
    target_channel: str = "T_in",
) -> AffineModel:
    """Expand an admissible tree into an AffineModel over named columns.

    Coefficients that cancel to exactly zero are pruned; ordering follows
    the column order of the feature matrix.
    """
    intercept, by_index = affine_parts(expr)
    for idx in by_index:
        if idx >= len(columns):
            raise DataError(f"feature index {idx} out of range for {len(columns)} columns")
    coeffs = {
        columns[idx]: by_index[idx]
        for idx in sorted(by_index)
        if by_index[idx] != 0.0
    }
    return AffineModel(
        intercept=intercept,
        coefficients=coeffs,
        units=dict(units or {}),
        target_channel=target_channel,
    )
