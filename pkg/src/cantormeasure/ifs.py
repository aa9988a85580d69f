"""Linear IFS specification: affine maps, words, parsing and validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .numerics import format_rational, parse_rational

Word = tuple[int, ...]

SCHEME_SIGMA = "sigma"
SCHEME_LAMBDA = "lambda"
MODE_STANDARD = "standard"
MODE_RELAXED_B = "relaxed-b"

DEFAULT_ALPHA_TOL = 1e-12
DEFAULT_DIST_TOL = 1e-15


class SpecError(ValueError):
    """Invalid IFS configuration."""


@dataclass(frozen=True, order=True)
class AffineMap:
    """Orientation-preserving contraction x -> ratio*x + offset."""

    ratio: Fraction
    offset: Fraction

    def __call__(self, x: Fraction) -> Fraction:
        return self.ratio * x + self.offset

    def compose(self, other: "AffineMap") -> "AffineMap":
        # (self o other)(x) = self(other(x))
        return AffineMap(self.ratio * other.ratio, self.ratio * other.offset + self.offset)

    def image(self) -> tuple[Fraction, Fraction]:
        """Image of [0, 1]; increasing endpoints since ratio > 0."""
        return self.offset, self.offset + self.ratio

    @staticmethod
    def identity() -> "AffineMap":
        return AffineMap(Fraction(1), Fraction(0))


@dataclass(frozen=True)
class IFSSpec:
    maps: tuple[AffineMap, ...]
    scheme: str = SCHEME_SIGMA
    mode: str = MODE_STANDARD
    alpha_tol: float = DEFAULT_ALPHA_TOL
    dist_tol: float = DEFAULT_DIST_TOL
    input_order: tuple[int, ...] = field(default_factory=tuple)

    @property
    def m(self) -> int:
        return len(self.maps)

    @property
    def rho_min(self) -> Fraction:
        return min(s.ratio for s in self.maps)

    @property
    def rho_first(self) -> Fraction:
        return self.maps[0].ratio

    @property
    def rho_last(self) -> Fraction:
        return self.maps[-1].ratio

    def map_for(self, symbol: int) -> AffineMap:
        if not 1 <= symbol <= self.m:
            raise SpecError(f"symbol {symbol} out of range 1..{self.m}")
        return self.maps[symbol - 1]

    def to_config(self) -> dict:
        return {
            "maps": [
                {"rho": format_rational(s.ratio), "b": format_rational(s.offset)}
                for s in self.maps
            ],
            "scheme": self.scheme,
            "mode": self.mode,
            "alpha_tol": self.alpha_tol,
            "dist_tol": self.dist_tol,
        }


def compose_word(spec: IFSSpec, word: Sequence[int]) -> AffineMap:
    """Exact composition S_{i1} o ... o S_{ik}; the empty word is the identity."""
    result = AffineMap.identity()
    for symbol in word:
        result = result.compose(spec.map_for(symbol))
    return result


def word_ratio(spec: IFSSpec, word: Sequence[int]) -> Fraction:
    r = Fraction(1)
    for symbol in word:
        r *= spec.map_for(symbol).ratio
    return r


def _build_spec(
    maps: Iterable[AffineMap],
    scheme: str,
    mode: str,
    alpha_tol: float,
    dist_tol: float,
) -> IFSSpec:
    maps = list(maps)
    if len(maps) < 2:
        raise SpecError("need at least two maps")
    if scheme not in (SCHEME_SIGMA, SCHEME_LAMBDA):
        raise SpecError(f"unknown scheme {scheme!r}")
    if mode not in (MODE_STANDARD, MODE_RELAXED_B):
        raise SpecError(f"unknown mode {mode!r}")
    for s in maps:
        if s.ratio <= 0:
            raise SpecError(
                "orientation-reversing or degenerate maps are not supported "
                f"(ratio {format_rational(s.ratio)})"
            )
        if s.ratio >= 1:
            raise SpecError(f"contraction ratio out of range: {format_rational(s.ratio)}")
        left, right = s.image()
        if left < 0 or right > 1:
            raise SpecError(
                f"map image [{format_rational(left)}, {format_rational(right)}] escapes [0, 1]"
            )

    order = sorted(range(len(maps)), key=lambda i: maps[i].image())
    sorted_maps = tuple(maps[i] for i in order)
    if sorted_maps[0].offset != 0:
        raise SpecError("leftmost map must fix 0 (S_1(0) = 0)")
    right = sorted_maps[-1].image()[1]
    if right != 1:
        raise SpecError("rightmost map must fix 1 (S_m(1) = 1)")
    return IFSSpec(
        maps=sorted_maps,
        scheme=scheme,
        mode=mode,
        alpha_tol=alpha_tol,
        dist_tol=dist_tol,
        input_order=tuple(order),
    )


def spec_from_ratios(
    pairs: Iterable[tuple],
    scheme: str = SCHEME_SIGMA,
    mode: str = MODE_STANDARD,
    alpha_tol: float = DEFAULT_ALPHA_TOL,
    dist_tol: float = DEFAULT_DIST_TOL,
) -> IFSSpec:
    """Convenience constructor from (ratio, offset) pairs of rationals."""
    maps = [AffineMap(Fraction(r), Fraction(b)) for r, b in pairs]
    return _build_spec(maps, scheme, mode, alpha_tol, dist_tol)


def parse_spec(text: str) -> IFSSpec:
    """Parse the JSON configuration document.

    Schema::

        {"maps": [{"rho": "p/q", "b": "p/q"}, ...],
         "scheme": "sigma" | "lambda",            (default "sigma")
         "mode": "standard" | "relaxed-b",        (default "standard")
         "alpha_tol": number, "dist_tol": number} (optional)

    Rationals travel as strings so exactness survives the wire.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecError("top-level config must be an object")
    raw_maps = doc.get("maps")
    if not isinstance(raw_maps, list) or not raw_maps:
        raise SpecError("config needs a non-empty 'maps' array")
    maps = []
    for i, entry in enumerate(raw_maps):
        if not isinstance(entry, dict) or "rho" not in entry or "b" not in entry:
            raise SpecError(f"maps[{i}] must be an object with 'rho' and 'b'")
        try:
            rho = parse_rational(str(entry["rho"]))
            b = parse_rational(str(entry["b"]))
        except ValueError as exc:
            raise SpecError(f"maps[{i}]: {exc}") from exc
        maps.append(AffineMap(rho, b))
    scheme = doc.get("scheme", SCHEME_SIGMA)
    mode = doc.get("mode", MODE_STANDARD)
    alpha_tol = float(doc.get("alpha_tol", DEFAULT_ALPHA_TOL))
    dist_tol = float(doc.get("dist_tol", DEFAULT_DIST_TOL))
    if alpha_tol <= 0 or dist_tol <= 0:
        raise SpecError("tolerances must be positive")
    return _build_spec(maps, scheme, mode, alpha_tol, dist_tol)


def parse_spec_file(path) -> IFSSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec(fh.read())
