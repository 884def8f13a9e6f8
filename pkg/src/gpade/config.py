"""Run configuration: JSON config files plus flag overrides.

Operator literal: {"field": [c0, c1, ..., 1], "dz_coeffs": [poly, ...]} with
each polynomial a list of coefficients, each coefficient either a rational
string "p/q" (rational field) or a list of rational strings (power-basis
coordinates).  Built-ins are referenced by name.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .builtins import builtin
from .numberfield import NumberField, QQ, parse_rational
from .operators import DifferentialOperator
from .polylogs import FunctionProvider
from .polynomials import Poly


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    operator: DifferentialOperator
    provider: FunctionProvider | None
    operator_name: str
    fld: NumberField
    z0: Fraction | None
    r: int | None
    S: int | None
    m: int | None
    n_grid: list[int]
    precision_bits: int
    cache_dir: str
    out_dir: str
    jobs: int
    force: bool
    route: str = "solve"

    def f_coefficients(self, count: int) -> list[Fraction]:
        if self.provider is None:
            raise ConfigError("no driving-function coefficients configured")
        return self.provider.coefficients(count)


def parse_n_grid(text) -> list[int]:
    if isinstance(text, list):
        return [int(x) for x in text]
    text = str(text)
    if ".." in text:
        a, b = text.split("..", 1)
        step = 1
        if ":" in b:
            b, st = b.split(":", 1)
            step = int(st)
        return list(range(int(a), int(b) + 1, step))
    return [int(t) for t in text.replace(",", " ").split()]


def _parse_coefficient(c, fld: NumberField):
    if isinstance(c, list):
        return fld.element([parse_rational(str(x)) for x in c])
    v = parse_rational(str(c))
    return v if fld.degree == 1 else fld.from_rational(v)


def parse_operator(spec, default_field: NumberField = QQ
                   ) -> tuple[DifferentialOperator, FunctionProvider | None, str]:
    if isinstance(spec, str):
        op, prov = builtin(spec)
        return op, prov, spec
    if not isinstance(spec, dict) or "dz_coeffs" not in spec:
        raise ConfigError("operator must be a built-in name or a dict with dz_coeffs")
    fld = default_field
    if "field" in spec:
        fld = NumberField([int(c) for c in spec["field"]])
    coeffs = []
    for poly in spec["dz_coeffs"]:
        coeffs.append(Poly([_parse_coefficient(c, fld) for c in poly]))
    return DifferentialOperator(coeffs, fld), None, "custom"


def load_config(path: str | None, overrides: dict) -> RunConfig:
    data = {}
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    fld = QQ
    if "field" in data and isinstance(data["field"], list):
        fld = NumberField([int(c) for c in data["field"]])
    op_spec = data.get("operator", "geometric")
    op, provider, name = parse_operator(op_spec, fld)
    if op.field != QQ:
        fld = op.field
    z0 = parse_rational(str(data["z0"])) if "z0" in data else None
    cache_dir = os.environ.get("GFUN_CACHE") or data.get("cache_dir", "cache")
    return RunConfig(
        operator=op, provider=provider, operator_name=name, fld=fld, z0=z0,
        r=int(data["r"]) if "r" in data else None,
        S=int(data["S"]) if "S" in data else None,
        m=int(data["m"]) if "m" in data else None,
        n_grid=parse_n_grid(data.get("n_grid", "4..16:2")),
        precision_bits=int(data.get("precision_bits", 256)),
        cache_dir=cache_dir,
        out_dir=data.get("out", "out"),
        jobs=int(data.get("jobs", 1)),
        force=bool(data.get("force", False)),
        route=data.get("route", "solve"),
    )
