"""Unit tags, exact conversions and quantity parsing for config input.

Two layers share one factor table:

* UnitValue / convert — a small tagged-value API over the eight canonical
  unit tags (tesla, gauss, meter, micrometer, hertz, second, kelvin,
  ampere).
* parse_quantity — parses strings like "6.9 A", "29 G", "2.5 mm" from
  config files into SI floats, accepting common prefixed forms.
"""

from dataclasses import dataclass

from .errors import UnitError

# tag -> (dimension, factor to SI base unit of that dimension)
_CANONICAL = {
    "tesla": ("field", 1.0),
    "gauss": ("field", 1e-4),
    "meter": ("length", 1.0),
    "micrometer": ("length", 1e-6),
    "hertz": ("frequency", 1.0),
    "second": ("time", 1.0),
    "kelvin": ("temperature", 1.0),
    "ampere": ("current", 1.0),
}

# accepted spellings in config files / CLI input
_ALIASES = {
    "T": ("field", 1.0),
    "mT": ("field", 1e-3),
    "uT": ("field", 1e-6),
    "G": ("field", 1e-4),
    "mG": ("field", 1e-7),
    "m": ("length", 1.0),
    "mm": ("length", 1e-3),
    "um": ("length", 1e-6),
    "µm": ("length", 1e-6),
    "μm": ("length", 1e-6),
    "nm": ("length", 1e-9),
    "Hz": ("frequency", 1.0),
    "kHz": ("frequency", 1e3),
    "MHz": ("frequency", 1e6),
    "s": ("time", 1.0),
    "ms": ("time", 1e-3),
    "K": ("temperature", 1.0),
    "mK": ("temperature", 1e-3),
    "uK": ("temperature", 1e-6),
    "µK": ("temperature", 1e-6),
    "μK": ("temperature", 1e-6),
    "nK": ("temperature", 1e-9),
    "A": ("current", 1.0),
    "mA": ("current", 1e-3),
    "S/m": ("conductivity", 1.0),
}


@dataclass(frozen=True)
class UnitValue:
    magnitude: float
    unit: str

    def __post_init__(self):
        if self.unit not in _CANONICAL:
            raise UnitError(f"unknown unit tag {self.unit!r}")

    @property
    def dimension(self) -> str:
        return _CANONICAL[self.unit][0]

    def to_si(self) -> float:
        return self.magnitude * _CANONICAL[self.unit][1]


def convert(value: UnitValue, target: str) -> UnitValue:
    """Exact conversion between dimensionally compatible unit tags."""
    if target not in _CANONICAL:
        raise UnitError(f"unknown unit tag {target!r}")
    dim_t, factor_t = _CANONICAL[target]
    if value.dimension != dim_t:
        raise UnitError(
            f"cannot convert {value.unit} ({value.dimension}) to {target} ({dim_t})"
        )
    return UnitValue(value.to_si() / factor_t, target)


def parse_quantity(text, expect: str | None = None) -> float:
    """Parse "6.9 A"-style text into an SI float.

    expect, when given, names the required dimension; a mismatch (or a bare
    number where a unit is mandatory) raises UnitError.
    """
    if not isinstance(text, str):
        raise UnitError(f"physical quantity must be a unit-suffixed string, got {text!r}")
    parts = text.split()
    if len(parts) != 2:
        raise UnitError(f"expected '<number> <unit>', got {text!r}")
    num, unit = parts
    try:
        magnitude = float(num)
    except ValueError as exc:
        raise UnitError(f"bad numeric value in {text!r}") from exc
    if unit not in _ALIASES:
        raise UnitError(f"unknown unit {unit!r} in {text!r}")
    dim, factor = _ALIASES[unit]
    if expect is not None and dim != expect:
        raise UnitError(f"{text!r} has dimension {dim}, expected {expect}")
    return magnitude * factor
