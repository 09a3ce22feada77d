"""Reading and writing run configurations.

The format is flat ``key = value`` lines.  Blank lines and ``#`` comments
are ignored; unknown keys are rejected with the offending line number.

Core keys::

    n = 2                      branch order (integer, at least 2)
    h = 1 * w^3                height terms, " + "-joined monomials
    lambda = 0.1               linear coefficient (complex)
    mu = 0                     conjugate-linear coefficient (complex)
    gamma = 0                  quadratic real-part coefficient (complex)
    r0 = 1                     disk radius

A monomial is ``coeff * w^a * cw^b`` where ``cw`` is the conjugated
variable; factors with exponent zero may be dropped, a missing coefficient
means one.  Complex literals use an ``i`` suffix (``0.5``, ``2i``,
``1+2i``, ``1.5e-3-2e-4i``) with no spaces inside the number — terms are
split on a space-padded plus.

Solver, loop and trace knobs mirror the fields of SolverConfig, LoopConfig
and TraceConfig under dotted names, e.g. ``solver.tol_residual = 1e-10``,
``loop.rho = 0.03``, ``trace.min_steps = 8192``.  A literal ``none`` clears
an optional value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields, replace

from .doublepoints import SolverConfig
from .errors import ParseError
from .loop import LoopConfig
from .surface import BranchedDiskModel, Monomial, PerturbationParams
from .trace import TraceConfig


@dataclass(frozen=True)
class RunConfig:
    """Everything one pipeline run needs, as parsed from a config file."""

    model: BranchedDiskModel
    params: PerturbationParams
    solver: SolverConfig
    loop: LoopConfig
    trace: TraceConfig


def parse_complex(text: str, line: int | None = None) -> complex:
    s = text.strip().replace(" ", "")
    if not s:
        raise ParseError("empty number", line=line)
    try:
        return complex(s.replace("i", "j").replace("I", "j"))
    except ValueError:
        raise ParseError(f"bad complex literal {text!r}", line=line)


def format_complex(z: complex) -> str:
    z = complex(z)
    re_, im = z.real, z.imag
    if im == 0:
        return _format_float(re_)
    if re_ == 0:
        return f"{_format_float(im)}i"
    sign = "+" if im > 0 else "-"
    return f"{_format_float(re_)}{sign}{_format_float(abs(im))}i"


def _format_float(x: float) -> str:
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


_FACTOR = re.compile(r"^(w|cw)(?:\^(\d+))?$")


def parse_monomial(text: str, line: int | None = None) -> Monomial:
    factors = [f.strip() for f in text.split("*")]
    coeff = None
    deg_w = 0
    deg_conj = 0
    for f in factors:
        if not f:
            raise ParseError(f"empty factor in monomial {text!r}", line=line)
        m = _FACTOR.match(f)
        if m:
            exp = int(m.group(2)) if m.group(2) is not None else 1
            if m.group(1) == "w":
                deg_w += exp
            else:
                deg_conj += exp
        else:
            if coeff is not None:
                raise ParseError(
                    f"two coefficients in monomial {text!r}", line=line
                )
            coeff = parse_complex(f, line)
    if coeff is None:
        coeff = 1.0 + 0j
    return Monomial(coeff=coeff, deg_w=deg_w, deg_conj=deg_conj)


def format_monomial(m: Monomial) -> str:
    parts = [format_complex(m.coeff)]
    if m.deg_w:
        parts.append(f"w^{m.deg_w}")
    if m.deg_conj:
        parts.append(f"cw^{m.deg_conj}")
    return " * ".join(parts)


def parse_height_terms(text: str, line: int | None = None) -> tuple[Monomial, ...]:
    stripped = text.strip()
    if stripped in ("0", "none"):
        return ()
    # Split on space-padded plus so complex literals keep their inner sign.
    pieces = re.split(r"\s\+\s", stripped)
    return tuple(parse_monomial(p, line) for p in pieces)


def format_height_terms(terms) -> str:
    if not terms:
        return "0"
    return " + ".join(format_monomial(m) for m in terms)


_CONVERTERS = {
    "int": lambda s, ln: _parse_int(s, ln),
    "float": lambda s, ln: _parse_float(s, ln),
    "float | None": lambda s, ln: None if s.lower() == "none" else _parse_float(s, ln),
    "int | None": lambda s, ln: None if s.lower() == "none" else _parse_int(s, ln),
}


def _parse_int(s: str, line) -> int:
    try:
        return int(s)
    except ValueError:
        raise ParseError(f"expected an integer, got {s!r}", line=line)


def _parse_float(s: str, line) -> float:
    try:
        return float(s)
    except ValueError:
        raise ParseError(f"expected a number, got {s!r}", line=line)


def _section_fields(cls) -> dict[str, str]:
    return {f.name: str(f.type) for f in fields(cls)}


_SECTIONS = {
    "solver": (SolverConfig, _section_fields(SolverConfig)),
    "loop": (LoopConfig, _section_fields(LoopConfig)),
    "trace": (TraceConfig, _section_fields(TraceConfig)),
}


def parse_config(text: str) -> RunConfig:
    """Parse config text; raises ParseError with a line number on bad input."""
    core: dict[str, tuple[str, int]] = {}
    overrides: dict[str, dict] = {"solver": {}, "loop": {}, "trace": {}}
    for ln, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ParseError(f"expected 'key = value', got {raw!r}", line=ln)
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not key or not value:
            raise ParseError(f"expected 'key = value', got {raw!r}", line=ln)
        if "." in key:
            section, _, name = key.partition(".")
            if section not in _SECTIONS:
                raise ParseError(f"unknown section {section!r}", line=ln)
            cls, types = _SECTIONS[section]
            if name not in types:
                raise ParseError(f"unknown key {key!r}", line=ln)
            conv = _CONVERTERS.get(types[name])
            if conv is None:
                raise ParseError(f"key {key!r} cannot be set from a file", line=ln)
            if name in overrides[section]:
                raise ParseError(f"duplicate key {key!r}", line=ln)
            overrides[section][name] = conv(value, ln)
        else:
            if key not in ("n", "h", "lambda", "mu", "gamma", "r0"):
                raise ParseError(f"unknown key {key!r}", line=ln)
            if key in core:
                raise ParseError(f"duplicate key {key!r}", line=ln)
            core[key] = (value, ln)

    for required in ("n", "h"):
        if required not in core:
            raise ParseError(f"missing required key {required!r}")

    n = _parse_int(*core["n"])
    r0 = _parse_float(*core["r0"]) if "r0" in core else 1.0
    terms = parse_height_terms(*core["h"])
    model = BranchedDiskModel(branch_order=n, terms=terms, r0=r0)
    lam = parse_complex(*core["lambda"]) if "lambda" in core else 0j
    mu = parse_complex(*core["mu"]) if "mu" in core else 0j
    gamma = parse_complex(*core["gamma"]) if "gamma" in core else 0j
    params = PerturbationParams(lam=lam, mu=mu, gamma=gamma)
    return RunConfig(
        model=model,
        params=params,
        solver=replace(SolverConfig(), **overrides["solver"]),
        loop=replace(LoopConfig(), **overrides["loop"]),
        trace=replace(TraceConfig(), **overrides["trace"]),
    )


def format_config(cfg: RunConfig) -> str:
    """Serialize a RunConfig; parse_config(format_config(c)) round-trips."""
    lines = [
        f"n = {cfg.model.branch_order}",
        f"r0 = {_format_float(cfg.model.r0)}",
        f"h = {format_height_terms(cfg.model.terms)}",
        f"lambda = {format_complex(cfg.params.lam)}",
        f"mu = {format_complex(cfg.params.mu)}",
        f"gamma = {format_complex(cfg.params.gamma)}",
    ]
    for section, (cls, types) in _SECTIONS.items():
        default = cls()
        obj = getattr(cfg, section)
        for name in types:
            val = getattr(obj, name)
            if val == getattr(default, name):
                continue
            text = "none" if val is None else (
                _format_float(val) if isinstance(val, float) else str(val)
            )
            lines.append(f"{section}.{name} = {text}")
    return "\n".join(lines) + "\n"


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def save_config(cfg: RunConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_config(cfg))
