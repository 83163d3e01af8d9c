"""Finite time scales: construction, jump operators, graininess and point classification."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import StrEnum
from typing import Final

import numpy as np

from .. import TsvarError
from ..constants import POINT_TOLERANCE, ROOT_LOGGER_NAME

LOGGER = logging.getLogger(ROOT_LOGGER_NAME)

SCALE_FAMILIES: Final = ("points", "hZ", "qZ", "Pab")
_SPEC_PATTERN: Final = re.compile(r"^\s*([A-Za-z]+)\s*\((.*)\)\s*$", re.DOTALL)


class ScaleSpecError(TsvarError):
    """The scale specification is malformed or describes an invalid time scale."""

    def __init__(self, spec: str, reason: str) -> None:
        """Create a ScaleSpecError instance."""
        super().__init__(f"Invalid time scale '{spec}': {reason}")


class OffScaleError(TsvarError):
    """A point was requested that does not belong to the time scale."""

    def __init__(self, t: float, provenance: str) -> None:
        """Create an OffScaleError instance."""
        super().__init__(f"Point {t!r} is not on the time scale {provenance}")


class ScaleKind(StrEnum):
    """How a finite point set relates to the time scale it represents."""

    EXACT_ISOLATED = "exact_isolated"
    SAMPLED_DENSE = "sampled_dense"


class PointClass(StrEnum):
    """Classification flags of a time scale point."""

    RIGHT_SCATTERED = "right_scattered"
    LEFT_SCATTERED = "left_scattered"
    ISOLATED = "isolated"
    RIGHT_DENSE = "right_dense"
    LEFT_DENSE = "left_dense"
    DENSE = "dense"


@dataclass(frozen=True)
class ScaleSpec:
    """A textual recipe for a time scale, e.g. ``hZ(0.5, 0, 1)``."""

    family: str
    params: tuple[float, ...]

    def __str__(self) -> str:
        """Render the spec in its textual grammar."""
        return f"{self.family}({', '.join(_format_param(p) for p in self.params)})"


def _format_param(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def parse_scale_spec(text: str) -> ScaleSpec:
    """Parse ``points(...)``, ``hZ(h,a,b)``, ``qZ(q,kmin,kmax)`` or ``Pab(a,b,cycles,step)``."""
    match = _SPEC_PATTERN.match(text)
    if match is None:
        raise ScaleSpecError(text, "expected family(arguments)")
    family, arguments = match.group(1), match.group(2)
    if family not in SCALE_FAMILIES:
        raise ScaleSpecError(text, f"unknown family '{family}', expected one of {', '.join(SCALE_FAMILIES)}")
    # qZ also accepts the range form qZ(q, kmin..kmax)
    arguments = arguments.replace("..", ",").replace("[", "").replace("]", "")
    items = [item.strip() for item in arguments.split(",") if item.strip()]
    try:
        params = tuple(float(item) for item in items)
    except ValueError as error:
        raise ScaleSpecError(text, "arguments must be numbers") from error
    return ScaleSpec(family, params)


@dataclass(frozen=True)
class JumpData:
    """Jump operators, graininess and class flags at one scale point."""

    t: float
    sigma: float
    rho: float
    mu: float
    nu: float
    classes: frozenset[PointClass]


@dataclass(frozen=True)
class ScaleProperties:
    """Global structure of a time scale."""

    is_isolated: bool
    is_regular: bool
    modelled_regular: bool


class TimeScale:
    """A finite, strictly increasing set of points with its jump structure.

    SAMPLED_DENSE scales additionally remember the closed blocks of the continuum they sample so that
    the jump operators of the modelled continuum can be reported next to the sampled ones.
    """

    def __init__(
        self,
        points: np.ndarray | list[float],
        kind: ScaleKind = ScaleKind.EXACT_ISOLATED,
        provenance: str = "",
        step: float | None = None,
        blocks: tuple[tuple[float, float], ...] = (),
    ) -> None:
        """Create a TimeScale instance."""
        values = np.array(points, dtype=float)
        provenance = provenance or f"points({', '.join(repr(float(p)) for p in values)})"
        if values.ndim != 1 or values.size < 2:
            raise ScaleSpecError(provenance, "a time scale needs at least two points")
        if not np.all(np.isfinite(values)):
            raise ScaleSpecError(provenance, "points must be finite")
        gaps = np.diff(values)
        limits = POINT_TOLERANCE * np.maximum(1.0, np.abs(values[1:]))
        if np.any(gaps <= limits):
            index = int(np.argmax(gaps <= limits))
            raise ScaleSpecError(
                provenance,
                f"points must be strictly increasing, got {values[index]!r} followed by {values[index + 1]!r}",
            )
        values.setflags(write=False)
        self._points = values
        self._kind = kind
        self._provenance = provenance
        self._step = step
        self._blocks = blocks
        mu = np.append(gaps, 0.0)
        nu = np.insert(gaps, 0, 0.0)
        mu.setflags(write=False)
        nu.setflags(write=False)
        self._mu = mu
        self._nu = nu

    @property
    def points(self) -> np.ndarray:
        """The scale points."""
        return self._points

    @property
    def kind(self) -> ScaleKind:
        """Exact isolated scale or sampled surrogate of a dense one."""
        return self._kind

    @property
    def provenance(self) -> str:
        """The textual spec the scale was built from."""
        return self._provenance

    @property
    def step(self) -> float | None:
        """Sampling step of a SAMPLED_DENSE scale."""
        return self._step

    @property
    def blocks(self) -> tuple[tuple[float, float], ...]:
        """Closed blocks of the modelled continuum (SAMPLED_DENSE only)."""
        return self._blocks

    @property
    def size(self) -> int:
        """Number of points."""
        return int(self._points.size)

    @property
    def a(self) -> float:
        """Minimum of the scale."""
        return float(self._points[0])

    @property
    def b(self) -> float:
        """Maximum of the scale."""
        return float(self._points[-1])

    @property
    def mu(self) -> np.ndarray:
        """Forward graininess at every point, 0 at the maximum."""
        return self._mu

    @property
    def nu(self) -> np.ndarray:
        """Backward graininess at every point, 0 at the minimum."""
        return self._nu

    @property
    def sigma(self) -> np.ndarray:
        """Forward jump at every point."""
        return np.append(self._points[1:], self._points[-1])

    @property
    def rho(self) -> np.ndarray:
        """Backward jump at every point."""
        return np.insert(self._points[:-1], 0, self._points[0])

    def __len__(self) -> int:
        """Return the number of points."""
        return self.size

    def __repr__(self) -> str:
        """Return the provenance based representation."""
        return f"TimeScale({self._provenance}, {self._kind})"

    def __eq__(self, other: object) -> bool:
        """Compare two scales by their points and kind."""
        if not isinstance(other, TimeScale):
            return NotImplemented
        return self._kind == other._kind and np.array_equal(self._points, other._points)

    def __hash__(self) -> int:
        """Hash by points."""
        return hash((self._kind, self._points.tobytes()))

    def contains(self, t: float) -> bool:
        """Check whether t is a scale point within the membership tolerance."""
        try:
            self.index_of(t)
        except OffScaleError:
            return False
        return True

    def index_of(self, t: float) -> int:
        """Get the index of the scale point t."""
        index = int(np.searchsorted(self._points, t))
        tolerance = POINT_TOLERANCE * max(1.0, abs(t))
        for candidate in (index - 1, index):
            if 0 <= candidate < self.size and abs(self._points[candidate] - t) <= tolerance:
                return candidate
        raise OffScaleError(t, self._provenance)

    def indices_of(self, t: np.ndarray) -> np.ndarray:
        """Get the indices of an array of scale points."""
        values = np.atleast_1d(np.asarray(t, dtype=float))
        return np.array([self.index_of(float(value)) for value in values], dtype=int)

    def modelled_sigma_index(self, index: int) -> int | None:
        """Index of the modelled-continuum forward jump, None when the continuum is right-dense there."""
        if self._kind == ScaleKind.EXACT_ISOLATED or index == self.size - 1:
            return index + 1 if index < self.size - 1 else index
        t = self._points[index]
        for start, end in self._blocks:
            if start - POINT_TOLERANCE <= t < end - POINT_TOLERANCE * max(1.0, abs(end)):
                return None
        return index + 1

    def modelled_rho_index(self, index: int) -> int | None:
        """Index of the modelled-continuum backward jump, None when the continuum is left-dense there."""
        if self._kind == ScaleKind.EXACT_ISOLATED or index == 0:
            return index - 1 if index > 0 else index
        t = self._points[index]
        for start, end in self._blocks:
            if start + POINT_TOLERANCE * max(1.0, abs(start)) < t <= end + POINT_TOLERANCE:
                return None
        return index - 1

    def modelled_sigma(self, index: int) -> float:
        """Forward jump of the modelled continuum at a scale point."""
        target = self.modelled_sigma_index(index)
        return float(self._points[index if target is None else target])

    def modelled_rho(self, index: int) -> float:
        """Backward jump of the modelled continuum at a scale point."""
        target = self.modelled_rho_index(index)
        return float(self._points[index if target is None else target])


def _scale_from_points(spec: ScaleSpec) -> TimeScale:
    return TimeScale(list(spec.params), ScaleKind.EXACT_ISOLATED, str(spec))


def _scale_from_hz(spec: ScaleSpec) -> TimeScale:
    if len(spec.params) != 3:
        raise ScaleSpecError(str(spec), "hZ expects (h, a, b)")
    h, a, b = spec.params
    if h <= 0:
        raise ScaleSpecError(str(spec), "the step h must be positive")
    if a >= b:
        raise ScaleSpecError(str(spec), "a must be smaller than b")
    steps = (b - a) / h
    count = round(steps)
    if abs(steps - count) > 1e-9 * max(1.0, steps):
        raise ScaleSpecError(str(spec), f"the span {b - a!r} is not an integral multiple of h={h!r}")
    points = a + h * np.arange(count + 1, dtype=float)
    points[-1] = b
    return TimeScale(points, ScaleKind.EXACT_ISOLATED, str(spec), step=h)


def _scale_from_qz(spec: ScaleSpec) -> TimeScale:
    if len(spec.params) != 3:
        raise ScaleSpecError(str(spec), "qZ expects (q, kmin, kmax)")
    q, kmin, kmax = spec.params
    if q <= 1:
        raise ScaleSpecError(str(spec), "q must be greater than 1")
    if not (float(kmin).is_integer() and float(kmax).is_integer()) or kmin > kmax:
        raise ScaleSpecError(str(spec), "kmin and kmax must be integers with kmin < kmax")
    exponents = np.arange(int(kmin), int(kmax) + 1, dtype=float)
    return TimeScale(np.power(q, exponents), ScaleKind.EXACT_ISOLATED, str(spec))


def _scale_from_pab(spec: ScaleSpec) -> TimeScale:
    if len(spec.params) != 4:
        raise ScaleSpecError(str(spec), "Pab expects (a, b, cycles, step)")
    a, b, cycles, step = spec.params
    if a <= 0 or b <= 0:
        raise ScaleSpecError(str(spec), "a and b must be positive")
    if not float(cycles).is_integer() or cycles < 1:
        raise ScaleSpecError(str(spec), "cycles must be a positive integer")
    if step <= 0:
        raise ScaleSpecError(str(spec), "the sample step must be positive")
    samples = a / step
    count = round(samples)
    if count < 1 or abs(samples - count) > 1e-9 * max(1.0, samples):
        raise ScaleSpecError(str(spec), f"the block length {a!r} is not an integral multiple of step={step!r}")
    blocks = []
    points: list[float] = []
    for k in range(int(cycles)):
        start = k * (a + b)
        blocks.append((start, start + a))
        points.extend(start + step * np.arange(count, dtype=float))
        points.append(start + a)
    return TimeScale(points, ScaleKind.SAMPLED_DENSE, str(spec), step=step, blocks=tuple(blocks))


_BUILDERS: Final = {
    "points": _scale_from_points,
    "hZ": _scale_from_hz,
    "qZ": _scale_from_qz,
    "Pab": _scale_from_pab,
}


def build_timescale(spec: ScaleSpec | str) -> TimeScale:
    """Build a time scale from its spec."""
    if isinstance(spec, str):
        spec = parse_scale_spec(spec)
    builder = _BUILDERS.get(spec.family)
    if builder is None:
        raise ScaleSpecError(str(spec), f"unknown family '{spec.family}'")
    scale = builder(spec)
    LOGGER.debug("Built time scale %s with %d points (%s)", scale.provenance, scale.size, scale.kind)
    return scale


def point_classes(scale: TimeScale, index: int) -> frozenset[PointClass]:
    """Classify a point of the finite set from its own σ and ρ (σ(max) = max, ρ(min) = min)."""
    point = scale.points[index]
    right_scattered = bool(scale.sigma[index] > point)
    left_scattered = bool(scale.rho[index] < point)
    classes = {
        PointClass.RIGHT_SCATTERED if right_scattered else PointClass.RIGHT_DENSE,
        PointClass.LEFT_SCATTERED if left_scattered else PointClass.LEFT_DENSE,
    }
    if right_scattered and left_scattered:
        classes.add(PointClass.ISOLATED)
    if not right_scattered and not left_scattered:
        classes.add(PointClass.DENSE)
    return frozenset(classes)


def modelled_point_classes(scale: TimeScale, index: int) -> frozenset[PointClass]:
    """Classify a point of the continuum a SAMPLED_DENSE scale models."""
    classes = set()
    right_dense = scale.modelled_sigma_index(index) is None
    left_dense = scale.modelled_rho_index(index) is None
    classes.add(PointClass.RIGHT_DENSE if right_dense else PointClass.RIGHT_SCATTERED)
    classes.add(PointClass.LEFT_DENSE if left_dense else PointClass.LEFT_SCATTERED)
    if right_dense and left_dense:
        classes.add(PointClass.DENSE)
    if not right_dense and not left_dense:
        classes.add(PointClass.ISOLATED)
    return frozenset(classes)


def jump_data(scale: TimeScale, t: float) -> JumpData:
    """Get σ, ρ, μ, ν and the class flags at the scale point t."""
    index = scale.index_of(t)
    return JumpData(
        t=float(scale.points[index]),
        sigma=float(scale.sigma[index]),
        rho=float(scale.rho[index]),
        mu=float(scale.mu[index]),
        nu=float(scale.nu[index]),
        classes=point_classes(scale, index),
    )


def modelled_jump_data(scale: TimeScale, t: float) -> JumpData:
    """Get the jump data of the continuum modelled by the scale at t."""
    index = scale.index_of(t)
    sigma = scale.modelled_sigma(index)
    rho = scale.modelled_rho(index)
    point = float(scale.points[index])
    return JumpData(
        t=point,
        sigma=sigma,
        rho=rho,
        mu=sigma - point,
        nu=point - rho,
        classes=modelled_point_classes(scale, index),
    )


def _regular(sigma_index: list[int | None], rho_index: list[int | None], size: int) -> bool:
    """Check σ(ρ(t)) = t on T_κ and ρ(σ(t)) = t on T^κ for index maps (None meaning a fixed point)."""

    def apply(mapping: list[int | None], index: int) -> int:
        target = mapping[index]
        return index if target is None else target

    for index in range(1, size):
        if apply(sigma_index, apply(rho_index, index)) != index:
            return False
    return all(apply(rho_index, apply(sigma_index, index)) == index for index in range(size - 1))


def scale_properties(scale: TimeScale) -> ScaleProperties:
    """Get isolatedness and regularity of the sampled set and regularity of the modelled continuum."""
    size = scale.size
    sampled_sigma: list[int | None] = [min(index + 1, size - 1) for index in range(size)]
    sampled_rho: list[int | None] = [max(index - 1, 0) for index in range(size)]
    modelled_sigma = [scale.modelled_sigma_index(index) for index in range(size)]
    modelled_rho = [scale.modelled_rho_index(index) for index in range(size)]
    # the endpoints have no scale point beyond them, so only the interior decides
    is_isolated = all(PointClass.ISOLATED in point_classes(scale, index) for index in range(1, size - 1))
    return ScaleProperties(
        is_isolated=is_isolated,
        is_regular=_regular(sampled_sigma, sampled_rho, size),
        modelled_regular=_regular(modelled_sigma, modelled_rho, size),
    )
