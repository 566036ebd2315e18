"""Run settings: defaults, ``key = value`` config files, and flag overrides.

Precedence, lowest first: built-in defaults, the config file, command-line
flags.  Example file::

    # tolerances for partint runs
    eps = 1/10^6
    budget = 2097152
    scale = 0
    precision = 53
    trace = run.jsonl
    strict = false
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from fractions import Fraction

from .geometry import parse_number

# binary64; lower settings only widen the library-function margins
ENGINE_PRECISION = 53


@dataclass(frozen=True)
class RunConfig:
    eps: Fraction = Fraction(1, 10**6)
    budget: int = 1 << 21
    scale: int = 0
    precision: int = ENGINE_PRECISION
    trace: str | None = None
    strict: bool = False

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.budget < 1:
            raise ValueError(f"budget must be at least 1, got {self.budget}")
        if self.scale < 0:
            raise ValueError(f"scale must be nonnegative, got {self.scale}")
        if self.precision < 24:
            raise ValueError(f"precision must be at least 24 bits, got {self.precision}")
        if self.precision > ENGINE_PRECISION:
            raise ValueError(f"precision above {ENGINE_PRECISION} bits is not available")

    def updated(self, **changes) -> "RunConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _eps(text: str) -> Fraction:
    v = parse_number(text)
    if isinstance(v, float):
        raise ValueError(f"eps must be finite, got {text!r}")
    return Fraction(v)


_CONVERT = {
    "eps": _eps,
    "budget": lambda t: int(t.replace("_", "")),
    "scale": int,
    "precision": int,
    "trace": lambda t: t.strip() or None,
    "strict": _bool,
}


def parse_config(text: str) -> dict:
    """Settings from ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    known = {f.name for f in fields(RunConfig)}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ValueError(f"config line {n}: unknown key {key!r}")
        try:
            out[key] = _CONVERT[key](value)
        except ValueError as exc:
            raise ValueError(f"config line {n}: {exc}") from None
    return out


def load_config(path: str | None = None, **overrides) -> RunConfig:
    settings = {}
    if path is not None:
        with open(path) as fh:
            settings = parse_config(fh.read())
    return RunConfig(**settings).updated(**overrides)
