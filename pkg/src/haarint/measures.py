"""Measure descriptions and the ``Family(dim[, extra])`` text grammar."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from .errors import DimensionError, DispatchError, MeasureError

FAMILIES = (
    "U", "SU", "O", "Sp", "CUE", "COE", "CSE", "GUE", "GOE", "GSE",
    "GinUE", "GinOE", "GinSE", "Perm", "CPerm", "DiagU", "Psi", "Stiefel", "Design",
)

_ALIASES = {f.lower(): f for f in FAMILIES}
_ALIASES.update({"diagunitary": "DiagU", "permutation": "Perm", "cperm": "CPerm"})

EVEN_ONLY = {"Sp", "CSE", "GSE", "GinSE"}
NEEDS_EXTRA = {"Stiefel", "Design"}

DEFAULT_SYMBOL = {
    "U": "U", "SU": "U", "CUE": "U", "Design": "U",
    "O": "O", "Sp": "Sp", "COE": "S", "CSE": "S",
    "GUE": "H", "GOE": "H", "GSE": "H",
    "GinUE": "G", "GinOE": "G", "GinSE": "G",
    "Perm": "P", "CPerm": "Y", "DiagU": "D", "Psi": "psi", "Stiefel": "V",
}


@dataclass(frozen=True)
class MeasureSpec:
    """Integration measure.  ``dim=None`` means the dimension is the formal
    symbol ``dim_symbol``."""

    family: str
    dim: int | None = None
    extra: int | None = None
    dim_symbol: str = "d"
    symbol: str | None = None

    def __post_init__(self):
        fam = _ALIASES.get(str(self.family).lower())
        if fam is None:
            raise MeasureError(f"unknown measure family {self.family!r}")
        object.__setattr__(self, "family", fam)
        d = self.dim
        if d is not None:
            if isinstance(d, bool) or not isinstance(d, int) or d < 1:
                raise DimensionError(f"dimension must be a positive integer, got {d!r}")
            if fam in EVEN_ONLY and d % 2:
                raise DimensionError(f"{fam} needs an even dimension, got {d}")
        if fam in NEEDS_EXTRA:
            if self.extra is None:
                what = "column count k" if fam == "Stiefel" else "design order t"
                raise MeasureError(f"{fam} needs a {what}")
            if self.extra < 1:
                raise MeasureError(f"{fam} parameter must be >= 1, got {self.extra}")
            if fam == "Stiefel" and d is not None and self.extra > d:
                raise MeasureError(f"Stiefel needs k <= d, got k={self.extra}, d={d}")
        elif self.extra is not None:
            raise MeasureError(f"{fam} takes no extra parameter")

    @property
    def symbolic(self) -> bool:
        return self.dim is None

    @property
    def random_symbol(self) -> str:
        return self.symbol or DEFAULT_SYMBOL[self.family]

    @property
    def base_family(self) -> str:
        """Family whose integration rule applies (aliases resolved)."""
        return "U" if self.family == "CUE" else self.family

    def with_dim(self, dim) -> "MeasureSpec":
        return replace(self, dim=dim)

    def dim_text(self) -> str:
        return self.dim_symbol if self.dim is None else str(self.dim)

    def __str__(self):
        args = [self.dim_text()]
        if self.extra is not None:
            args.append(str(self.extra))
        return f"{self.family}({', '.join(args)})"


_MEASURE_RE = re.compile(r"^\s*d?([A-Za-z]+)\s*\(\s*([A-Za-z_][A-Za-z0-9_]*|\d+)\s*(?:,\s*(\d+)\s*)?\)\s*$")


def parse_measure(text: str, symbol: str | None = None) -> MeasureSpec:
    """``"U(d)"``, ``"Sp(6)"``, ``"Stiefel(d,2)"``, ``"Design(d,3)"``.

    A leading ``d`` (``dU(d)``) is tolerated when the rest names a family.
    """
    m = _MEASURE_RE.match(text)
    if not m:
        raise MeasureError(f"cannot parse measure {text!r}; expected Family(dim[, extra])")
    name, dim, extra = m.groups()
    full = text.strip().split("(")[0].strip()
    if full.lower() in _ALIASES:
        name = full
    elif name.lower() not in _ALIASES:
        raise MeasureError(f"unknown measure family {full!r}")
    if dim.isdigit():
        return MeasureSpec(name, int(dim), int(extra) if extra else None, symbol=symbol)
    return MeasureSpec(name, None, int(extra) if extra else None, dim_symbol=dim, symbol=symbol)


def check_dim_symbol(spec: MeasureSpec, names) -> None:
    if spec.dim_symbol in set(names):
        raise DispatchError(
            f"name {spec.dim_symbol!r} is reserved for the dimension and cannot be a matrix"
        )
