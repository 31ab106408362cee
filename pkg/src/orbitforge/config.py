"""Run-wide settings with a tiny key=value config-file loader."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class Settings:
    """Default precision/truncation knobs used by the CLI and tests."""

    precision_bits: int = 160        # working precision for ball arithmetic
    series_order: int = 48           # default Boettcher truncation order
    max_poly_degree: int = 1 << 16   # guard on iteration/composition
    max_iterations: int = 256        # numeric orbit iteration budget
    preperiodic_budget: int = 512    # exact orbit budget before "undecided"
    orbit_degree_cap: int = 4096     # cap on d^n for orbit level sets
    trace_points: int = 512          # default equipotential sample count
    padic_digits: int = 64           # default p-adic unit digits
    threads: int = 1                 # worker cap for parallel point batches
    tolerance: Fraction = Fraction(1, 10**10)

    def replace(self, **kw) -> "Settings":
        return dataclasses.replace(self, **kw)


DEFAULTS = Settings()

_INT_FIELDS = {
    "precision_bits", "series_order", "max_poly_degree", "max_iterations",
    "preperiodic_budget", "orbit_degree_cap", "trace_points", "padic_digits",
    "threads",
}


def load_settings(path: str, base: Settings = DEFAULTS) -> Settings:
    """Read ``key = value`` lines (TOML-like; '#' comments) into Settings."""
    updates: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            if key in _INT_FIELDS:
                updates[key] = int(val)
            elif key == "tolerance":
                updates[key] = Fraction(val)
            else:
                raise ValueError(f"unknown config key: {key}")
    return base.replace(**updates)
