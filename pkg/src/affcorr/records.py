"""Line-delimited JSON record format shared by the CLI subcommands.

One JSON object per line. Matrices are flat row-major arrays::

    {"R": [9 numbers], "t": [3], "n": [3], "d": x, "p1": [2],
     "p2": [2], "A": [4], "s": x, "residual": x}

``p2``, ``A``, ``s`` and ``residual`` are optional. Unknown keys are kept
and written back unchanged. Floats are written in the shortest form that
parses back to the same double (Python's ``repr``), so files round-trip
exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from .errors import InvalidRecord, InvalidValue, MissingField
from .geometry import ImagePoint, PlaneParams, Pose, RotationMatrix

_SIZES = {"R": 9, "t": 3, "n": 3, "p1": 2, "p2": 2, "A": 4}
_SCALARS = ("d", "s", "residual")
FIELDS = ("R", "t", "n", "d", "p1", "p2", "A", "s", "residual")


def _vector(obj: dict, key: str) -> tuple[float, ...] | None:
    if key not in obj:
        return None
    val = obj[key]
    if not isinstance(val, list) or len(val) != _SIZES[key]:
        raise InvalidValue(f"field {key!r} must be a list of {_SIZES[key]} numbers")
    out = []
    for x in val:
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise InvalidValue(f"field {key!r} has a non-numeric or non-finite entry")
        out.append(float(x))
    return tuple(out)


def _scalar(obj: dict, key: str) -> float | None:
    if key not in obj:
        return None
    x = obj[key]
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise InvalidValue(f"field {key!r} must be a finite number")
    return float(x)


@dataclass(frozen=True)
class CorrespondenceRecord:
    R: tuple[float, ...] | None = None
    t: tuple[float, ...] | None = None
    n: tuple[float, ...] | None = None
    d: float | None = None
    p1: tuple[float, float] | None = None
    p2: tuple[float, float] | None = None
    A: tuple[float, float, float, float] | None = None
    s: float | None = None
    residual: float | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, obj: Any, require=("R", "t", "n", "d", "p1")) -> CorrespondenceRecord:
        """Parse and validate one record.

        Rotation and plane invariants are checked whenever those fields are
        present, so a bad record fails here rather than deep in a computation.
        """
        if not isinstance(obj, dict):
            raise InvalidRecord("record is not a JSON object")
        missing = [k for k in require if k not in obj]
        if missing:
            raise MissingField(f"missing field(s): {', '.join(missing)}")
        values: dict[str, Any] = {}
        for key in FIELDS:
            values[key] = _scalar(obj, key) if key in _SCALARS else _vector(obj, key)
        rec = cls(**values, extra={k: v for k, v in obj.items() if k not in FIELDS})
        if rec.R is not None:
            RotationMatrix([rec.R[0:3], rec.R[3:6], rec.R[6:9]])
        if rec.n is not None and rec.d is not None:
            PlaneParams(rec.n, rec.d)
        return rec

    @classmethod
    def from_json(cls, line: str, require=("R", "t", "n", "d", "p1")) -> CorrespondenceRecord:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InvalidRecord(f"invalid JSON: {exc}") from None
        return cls.from_dict(obj, require)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for key in FIELDS:
            val = getattr(self, key)
            if val is not None:
                out[key] = list(val) if isinstance(val, tuple) else val
        out.update(self.extra)
        return out

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def pose(self) -> Pose:
        R = self.R
        return Pose(RotationMatrix([R[0:3], R[3:6], R[6:9]]), self.t)

    def plane(self) -> PlaneParams:
        return PlaneParams(self.n, self.d)

    def point1(self) -> ImagePoint:
        return ImagePoint(*self.p1)

    def point2(self) -> ImagePoint:
        return ImagePoint(*self.p2)


def dumps(obj: dict) -> str:
    """Compact single-line JSON with shortest round-trip floats."""
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)
