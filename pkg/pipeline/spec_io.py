"""
Key-value spec files.

One `key = value` per line, `#` starts a comment. A file describes either a
complex-wave metric or a plane wave (keys prefixed with `wave.`).

Complex-wave keys:
  name, n, epsilons              1, -1, ...
  profile.kind                   singular | cw_analog | flat
  profile.b0                     float
  profile.harmonic               complex coefficients "re, im; re, im; ..."
  coupling.<a>                   complex coefficients of h_a (a from 1)
  coupling.<a>.r / .s            real monomials "i, j, c; ..." for c w1^i w2^j

Plane-wave keys:
  wave.name, wave.n, wave.epsilons
  wave.profile.kind              constant | scale_invariant | polynomial
  wave.profile.matrix.<k>        rows separated by ';', entries by ','

Floats are written with repr() so parse(serialize(spec)) == spec.
"""
import logging
import re
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from engine.errors import SpecError
from models.spec import Coupling, MetricSpec, PlaneWaveSpec, ProfileKind, WaveProfile

logger = logging.getLogger(__name__)

AnySpec = Union[MetricSpec, PlaneWaveSpec]

_COUPLING_KEY = re.compile(r"^coupling\.(\d+)(?:\.(r|s))?$")
_MATRIX_KEY = re.compile(r"^wave\.profile\.matrix\.(\d+)$")


def _read_pairs(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in pairs:
            raise SpecError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def _groups(value: str) -> list[list[str]]:
    return [[x.strip() for x in group.split(",")] for group in value.split(";") if group.strip()]


def _complex_list(value: str, key: str) -> tuple[tuple[float, float], ...]:
    out = []
    for group in _groups(value):
        if len(group) != 2:
            raise SpecError(f"{key}: complex coefficients are 're, im' pairs")
        out.append((float(group[0]), float(group[1])))
    return tuple(out)


def _monomials(value: str, key: str) -> tuple[tuple[int, int, float], ...]:
    out = []
    for group in _groups(value):
        if len(group) != 3:
            raise SpecError(f"{key}: monomials are 'i, j, coefficient' triples")
        out.append((int(group[0]), int(group[1]), float(group[2])))
    return tuple(out)


def _ints(value: str) -> tuple[int, ...]:
    return tuple(int(x) for x in value.split(",") if x.strip())


def _matrix(value: str, key: str) -> tuple[tuple[float, ...], ...]:
    rows = tuple(tuple(float(x) for x in row) for row in _groups(value))
    if not rows:
        raise SpecError(f"{key}: empty matrix")
    return rows


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _metric_from_pairs(pairs: dict[str, str]) -> MetricSpec:
    n = int(pairs.get("n", "0"))
    coupling_parts: dict[int, dict[str, str]] = {}
    for key, value in pairs.items():
        m = _COUPLING_KEY.match(key)
        if m:
            coupling_parts.setdefault(int(m.group(1)), {})[m.group(2) or "h"] = value
        elif key not in ("name", "n", "epsilons", "profile.kind", "profile.b0", "profile.harmonic"):
            raise SpecError(f"unknown key {key!r}")
    if sorted(coupling_parts) != list(range(1, n + 1)):
        raise SpecError(f"expected couplings 1..{n}, got {sorted(coupling_parts)}")

    couplings = []
    for a in range(1, n + 1):
        parts = coupling_parts[a]
        if "h" in parts and len(parts) > 1:
            raise SpecError(f"coupling.{a}: give either coefficients or r/s, not both")
        if "h" in parts:
            couplings.append(Coupling(coeffs=_complex_list(parts["h"], f"coupling.{a}")))
        else:
            couplings.append(Coupling(
                r=_monomials(parts["r"], f"coupling.{a}.r") if "r" in parts else None,
                s=_monomials(parts["s"], f"coupling.{a}.s") if "s" in parts else None,
            ))
    profile = ProfileKind(
        variant=pairs.get("profile.kind", "singular"),
        b0=float(pairs.get("profile.b0", "0")),
        harmonic_extra=_complex_list(pairs.get("profile.harmonic", ""), "profile.harmonic"),
    )
    return MetricSpec(
        n=n,
        epsilons=_ints(pairs.get("epsilons", "")) if "epsilons" in pairs else (1,) * n,
        profile=profile,
        couplings=tuple(couplings),
        name=pairs.get("name"),
    )


def _wave_from_pairs(pairs: dict[str, str]) -> PlaneWaveSpec:
    matrices: dict[int, tuple] = {}
    for key, value in pairs.items():
        m = _MATRIX_KEY.match(key)
        if m:
            matrices[int(m.group(1))] = _matrix(value, key)
        elif key not in ("wave.name", "wave.n", "wave.epsilons", "wave.profile.kind"):
            raise SpecError(f"unknown key {key!r}")
    if sorted(matrices) != list(range(len(matrices))):
        raise SpecError("wave.profile.matrix.<k> keys must run 0, 1, ... without gaps")
    profile = WaveProfile(
        kind=pairs.get("wave.profile.kind", "constant"),
        matrices=tuple(matrices[k] for k in sorted(matrices)),
    )
    return PlaneWaveSpec(
        n=int(pairs.get("wave.n", str(len(profile.matrices[0])))),
        profile=profile,
        epsilons=_ints(pairs.get("wave.epsilons", "")),
        name=pairs.get("wave.name"),
    )


def parse_spec(text: str) -> AnySpec:
    """Parse spec text; every validation failure surfaces as SpecError."""
    pairs = _read_pairs(text)
    try:
        if any(k.startswith("wave.") for k in pairs):
            return _wave_from_pairs(pairs)
        return _metric_from_pairs(pairs)
    except ValidationError as exc:
        raise SpecError(f"invalid spec: {exc.errors()[0]['msg']}") from exc
    except ValueError as exc:
        raise SpecError(f"invalid spec: {exc}") from exc


def load_spec(path: Path) -> AnySpec:
    path = Path(path)
    if not path.exists():
        raise SpecError(f"spec file not found: {path}")
    logger.debug("Loading spec %s", path)
    return parse_spec(path.read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _fmt_complex(pairs) -> str:
    return "; ".join(f"{re!r}, {im!r}" for re, im in pairs)


def _fmt_monomials(terms) -> str:
    return "; ".join(f"{i}, {j}, {c!r}" for i, j, c in terms)


def serialize_spec(spec: AnySpec) -> str:
    lines: list[str] = []
    if isinstance(spec, PlaneWaveSpec):
        if spec.name is not None:
            lines.append(f"wave.name = {spec.name}")
        lines.append(f"wave.n = {spec.n}")
        if spec.epsilons:
            lines.append(f"wave.epsilons = {', '.join(str(e) for e in spec.epsilons)}")
        lines.append(f"wave.profile.kind = {spec.profile.kind}")
        for k, matrix in enumerate(spec.profile.matrices):
            rows = "; ".join(", ".join(repr(float(x)) for x in row) for row in matrix)
            lines.append(f"wave.profile.matrix.{k} = {rows}")
        return "\n".join(lines) + "\n"

    if spec.name is not None:
        lines.append(f"name = {spec.name}")
    lines.append(f"n = {spec.n}")
    if spec.n:
        lines.append(f"epsilons = {', '.join(str(e) for e in spec.epsilons)}")
    lines.append(f"profile.kind = {spec.profile.variant}")
    lines.append(f"profile.b0 = {spec.profile.b0!r}")
    if spec.profile.harmonic_extra:
        lines.append(f"profile.harmonic = {_fmt_complex(spec.profile.harmonic_extra)}")
    for a, coupling in enumerate(spec.couplings, start=1):
        if coupling.is_split:
            lines.append(f"coupling.{a}.r = {_fmt_monomials(coupling.r)}")
            lines.append(f"coupling.{a}.s = {_fmt_monomials(coupling.s)}")
        else:
            lines.append(f"coupling.{a} = {_fmt_complex(coupling.coeffs)}")
    return "\n".join(lines) + "\n"


def spec_echo(spec: AnySpec) -> dict:
    """JSON-friendly copy of the spec for reports."""
    return spec.model_dump(mode="json")
