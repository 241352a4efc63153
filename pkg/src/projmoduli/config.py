"""TOML family configurations.

A config either names a builder::

    builder = "branched-cover-12"

or spells a family out::

    name = "quadric-longhand"

    [variables]
    params = ["a0", "a1", "b1"]
    fiber = ["z", "zh"]        # optional, these are the defaults
    normal = ["w", "wh"]

    [transition]
    f = "-w/(z*(w + z))"
    g = "1/z"

    [transition.inverse]       # optional, (wh, zh) -> (w, z)
    f = "-wh/(zh*(wh + zh))"
    g = "1/zh"

    [family]
    phi1 = "(a1*z + a0)/(b1*z + 1) - z"
    phi2 = "(b1 + zh)/(a1 + a0*zh) - zh"

    [roots]                    # optional square roots, symbol = radicand
    # sQ = "..."

    [base]
    t0 = [0, 1, 0]             # complex entries as [re, im]
    # [base.branch.sQ] at = {t0 = 0}, value = "1"

    [annulus]                  # optional
    r_in = 0.5
    r_out = 2.0
    radius = 0.3

    [tolerances]               # optional overrides
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Sequence

import tomli

from .exactalg import BranchContext, BranchSpec, ExprSyntaxError, parse_expr, parse_poly
from .family import BUILDERS, DEFAULT_ANNULUS, DEFAULT_RADIUS, W, WH, Z, ZH, Family, Transition

DEFAULT_TOLERANCES = {
    "extract": 1e-8,
    "split_residual": 1e-9,
    "reconstruction": 1e-10,
    "tail": 1e-12,
    "compatibility": 1e-10,
    "ab": 1e-8,
}


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


@dataclass
class FamilyConfig:
    family: Family
    tolerances: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    builder: str | None = None
    source: str = ""


def _number(x: Any, where: str) -> complex:
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    raise ConfigError(f"{where}: expected a number or [re, im], got {x!r}")


def _section(doc: Mapping, name: str, required: bool = True) -> Mapping:
    sec = doc.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"missing section [{name}]")
        return {}
    if not isinstance(sec, Mapping):
        raise ConfigError(f"[{name}] must be a table")
    return sec


def _string(sec: Mapping, key: str, where: str) -> str:
    v = sec.get(key)
    if not isinstance(v, str):
        raise ConfigError(f"{where}.{key}: expected an expression string")
    return v


def _expr(text: str, vars: Sequence[str], roots: Mapping[str, str], where: str):
    usable = {}
    for s, d in roots.items():
        try:
            usable[s] = parse_poly(d, vars)
        except (ExprSyntaxError, ValueError):
            continue  # radicand lives over other variables
    try:
        return parse_expr(text, vars, usable)
    except ExprSyntaxError as exc:
        raise ConfigError(f"{where}: {exc} in {text!r}") from exc


def family_from_dict(doc: Mapping, name: str = "config") -> FamilyConfig:
    tol = dict(DEFAULT_TOLERANCES)
    for k, v in _section(doc, "tolerances", False).items():
        if k not in tol or not isinstance(v, (int, float)) or v <= 0:
            raise ConfigError(f"tolerances.{k}: unknown key or non-positive value")
        tol[k] = float(v)
    if "builder" in doc:
        b = doc["builder"]
        if b not in BUILDERS:
            raise ConfigError(f"unknown builder {b!r}; expected one of {sorted(BUILDERS)}")
        return FamilyConfig(BUILDERS[b](), tol, b, name)

    var = _section(doc, "variables")
    params = tuple(var.get("params", ()))
    fiber = tuple(var.get("fiber", (Z, ZH)))
    normal = tuple(var.get("normal", (W, WH)))
    if not params or not all(isinstance(p, str) for p in params):
        raise ConfigError("variables.params: expected a nonempty list of names")
    if len(fiber) != 2 or len(normal) != 2:
        raise ConfigError("variables.fiber and variables.normal take two names each")
    names = params + fiber + normal
    if len(set(names)) != len(names):
        raise ConfigError("variable names must be distinct")

    roots = dict(_section(doc, "roots", False))
    for s, d in roots.items():
        if not isinstance(d, str):
            raise ConfigError(f"roots.{s}: expected a polynomial expression")
        try:
            parse_poly(d, names)
        except (ExprSyntaxError, ValueError) as exc:
            raise ConfigError(f"roots.{s}: {exc}") from exc

    tr = _section(doc, "transition")
    f = _expr(_string(tr, "f", "transition"), (normal[0], fiber[0]), roots, "transition.f")
    g = _expr(_string(tr, "g", "transition"), (normal[0], fiber[0]), roots, "transition.g")
    inverse = None
    if "inverse" in tr:
        inv = tr["inverse"]
        fi = _expr(_string(inv, "f", "transition.inverse"), (normal[1], fiber[1]), roots, "transition.inverse.f")
        gi = _expr(_string(inv, "g", "transition.inverse"), (normal[1], fiber[1]), roots, "transition.inverse.g")
        inverse = (fi, gi)

    fam = _section(doc, "family")
    phi1 = _expr(_string(fam, "phi1", "family"), (fiber[0],) + params, roots, "family.phi1")
    phi2 = _expr(_string(fam, "phi2", "family"), (fiber[1],) + params, roots, "family.phi2")

    base = _section(doc, "base")
    t0 = base.get("t0")
    if not isinstance(t0, list) or len(t0) != len(params):
        raise ConfigError(f"base.t0: expected {len(params)} entries")
    t0 = tuple(_number(x, "base.t0") for x in t0)
    specs = {}
    for s, spec in dict(base.get("branch", {})).items():
        if s not in roots:
            raise ConfigError(f"base.branch.{s}: no such root")
        at = {k: _number(v, f"base.branch.{s}.at") for k, v in dict(spec.get("at", {})).items()}
        if any(k not in names for k in at):
            raise ConfigError(f"base.branch.{s}.at: unknown variable")
        value = spec.get("value", "1")
        if isinstance(value, str):
            value = _expr(value, names, {}, f"base.branch.{s}.value")
        else:
            value = _number(value, f"base.branch.{s}.value")
        specs[s] = BranchSpec(at, value)
    missing = [s for s in roots if s not in specs]
    if missing:
        raise ConfigError(f"base.branch: no branch specification for roots {missing}")
    ctx = BranchContext(specs)

    ann = _section(doc, "annulus", False)
    annulus = (float(ann.get("r_in", DEFAULT_ANNULUS[0])), float(ann.get("r_out", DEFAULT_ANNULUS[1])))
    radius = float(ann.get("radius", DEFAULT_RADIUS))
    inv_tr = Transition(*inverse, ctx) if inverse else None
    family = Family(str(doc.get("name", name)), params, phi1, phi2, Transition(f, g, ctx, inv_tr), t0, ctx,
                    annulus, radius, fiber, normal)
    family.validate()
    return FamilyConfig(family, tol, None, name)


def load_config(path: str | Path) -> FamilyConfig:
    """Load a TOML config, or a bare builder name."""
    p = Path(path)
    if not p.exists():
        if str(path) in BUILDERS:
            return family_from_dict({"builder": str(path)}, str(path))
        raise ConfigError(f"{path}: no such file or builder")
    try:
        doc = tomli.loads(p.read_text())
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return family_from_dict(doc, p.stem)


def load_family(path: str | Path) -> Family:
    return load_config(path).family
