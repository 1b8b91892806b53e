"""Geometry configuration files.

A file holds ``key = value`` lines (``#`` starts a comment)::

    kind = weak          # weak | strong | disk | arc
    c1 = 1
    alpha1 = 2
    c2 = -1
    alpha2 = 2
    cap_center = -0.5, 1.0   # optional, closing-cap center for solver runs

Strong corners give ``slopes = s_right, s_left`` or full polynomial
coefficient lists ``right = 0, 1, 1/2`` and ``left = ...``; arcs give
``poly``; disks give ``radius`` (and optionally ``center``). Exact values
are written as integers or ``p/q``.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, GeometryError, InvalidProfile
from .geometry import (
    CircularCap,
    build_corner_domain,
    disk,
    make_analytic_arc,
    make_strong_corner,
    make_weak_profile,
)

KINDS = ("weak", "strong", "disk", "arc")
_SECTION = "geometry"


@dataclass(frozen=True)
class GeometryConfig:
    kind: str
    values: dict

    def _get(self, key):
        if key not in self.values:
            raise ConfigError(f"geometry kind {self.kind!r} needs key {key!r}")
        return self.values[key]

    def _list(self, key):
        return [item.strip() for item in self._get(key).split(",") if item.strip()]

    def _floats(self, key):
        try:
            return tuple(float(v) for v in self._list(key))
        except ValueError as exc:
            raise ConfigError(f"{key} must be a list of numbers") from exc

    def germ(self):
        """The exact germ (weak profile, strong corner or analytic arc)."""
        try:
            if self.kind == "weak":
                return make_weak_profile(self._get("c1"), _int(self._get("alpha1")),
                                         self._get("c2"), _int(self._get("alpha2")))
            if self.kind == "strong":
                if "slopes" in self.values:
                    slopes = self._list("slopes")
                    if len(slopes) != 2:
                        raise ConfigError("slopes needs two values: right, left")
                    return make_strong_corner(slopes[0], slopes[1])
                return make_strong_corner(self._list("right"), self._list("left"))
            if self.kind == "arc":
                return make_analytic_arc(self._list("poly"))
        except (InvalidProfile, ValueError, TypeError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid {self.kind} geometry: {exc}") from exc
        raise ConfigError(f"geometry kind {self.kind!r} has no exact germ")

    def boundary(self):
        """Closed boundary curve for the solver."""
        if self.kind == "disk":
            center = self._floats("center") if "center" in self.values else (0.0, 0.0)
            try:
                return disk(float(self._get("radius")), center)
            except (ValueError, GeometryError) as exc:
                raise ConfigError(f"invalid disk: {exc}") from exc
        if self.kind == "arc":
            raise ConfigError("a single arc is not a closed boundary")
        cap = CircularCap(self._floats("cap_center") if "cap_center" in self.values else None)
        try:
            return build_corner_domain(self.germ(), cap)
        except GeometryError as exc:
            raise ConfigError(f"cannot close the corner domain: {exc}") from exc


def _int(text):
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"expected an integer, got {text!r}") from exc


def parse_geometry(text: str) -> GeometryConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), comment_prefixes=("#",))
    try:
        parser.read_string(f"[{_SECTION}]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed geometry file: {exc}") from exc
    values = dict(parser[_SECTION])
    kind = values.pop("kind", None)
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {', '.join(KINDS)}; got {kind!r}")
    return GeometryConfig(kind, values)


def load_geometry(path) -> GeometryConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read geometry file {path}: {exc.strerror or exc}") from exc
    return parse_geometry(text)
