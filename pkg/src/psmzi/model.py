"""Domain types: interferometer configuration, detection choices, scheme kinds."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .errors import OutOfRangeError


class SchemeKind(enum.Enum):
    STANDARD = "standard"
    A = "A"
    B = "B"
    C = "C"


def classify(m: int, n: int) -> SchemeKind:
    """Scheme label for subtracting ``m`` photons from mode a and ``n`` from mode b."""
    if m == 0 and n == 0:
        return SchemeKind.STANDARD
    if n == 0:
        return SchemeKind.A
    if m == 0:
        return SchemeKind.B
    return SchemeKind.C


@dataclass(frozen=True)
class SchemeConfig:
    """Physical parameters of one interferometer instance.

    ``T`` is the common transmittance of the fictitious internal loss beam
    splitters used by the sensitivity calculations; ``eta`` is the mode-a
    transmittance used only by the lossy Fisher-information formula.
    """

    alpha_mag: float = 1.0
    r: float = 1.0
    m: int = 0
    n: int = 0
    phi: float = 0.0
    T: float = 1.0
    eta: float = 1.0
    alpha_phase: float = 0.0

    def __post_init__(self):
        validate(self)

    @property
    def alpha(self) -> complex:
        return self.alpha_mag * complex(math.cos(self.alpha_phase), math.sin(self.alpha_phase))

    @property
    def kind(self) -> SchemeKind:
        return classify(self.m, self.n)

    def with_(self, **changes) -> SchemeConfig:
        return replace(self, **changes)


def validate(config: SchemeConfig) -> SchemeConfig:
    """Check every field bound, raising :class:`OutOfRangeError` on the first violation."""
    for name in ("alpha_mag", "r", "phi", "T", "eta", "alpha_phase"):
        value = getattr(config, name)
        if not math.isfinite(value):
            raise OutOfRangeError(name, value, "must be finite")
    if config.alpha_mag < 0:
        raise OutOfRangeError("alpha_mag", config.alpha_mag, ">= 0")
    if config.r < 0:
        raise OutOfRangeError("r", config.r, ">= 0")
    for name in ("m", "n"):
        value = getattr(config, name)
        if isinstance(value, bool) or int(value) != value:
            raise OutOfRangeError(name, value, "integer")
        if value < 0:
            raise OutOfRangeError(name, value, ">= 0")
    for name in ("T", "eta"):
        value = getattr(config, name)
        if not 0.0 <= value <= 1.0:
            raise OutOfRangeError(name, value, "[0, 1]")
    return config


@dataclass(frozen=True)
class Detection:
    """Measured observable ``c*O_a + d*O_b``.

    ``kind`` is ``"intensity"`` (O = photon number) or ``"homodyne"``
    (O = quadrature (a + a^dag)/sqrt(2)).  Named detections are plain
    instances with fixed weights, so they evaluate identically to their
    custom equivalents.
    """

    kind: str
    c: float
    d: float
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("intensity", "homodyne"):
            raise ValueError(f"unknown detection kind {self.kind!r}")

    @classmethod
    def custom_intensity(cls, c: float, d: float) -> Detection:
        return cls("intensity", float(c), float(d), f"custom_intensity({c:g},{d:g})")

    @classmethod
    def custom_homodyne(cls, c: float, d: float) -> Detection:
        return cls("homodyne", float(c), float(d), f"custom_homodyne({c:g},{d:g})")

    @property
    def name(self) -> str:
        return self.label or f"{self.kind}({self.c:g},{self.d:g})"


NA = Detection("intensity", 1.0, 0.0, "na")
NB = Detection("intensity", 0.0, 1.0, "nb")
NDIFF = Detection("intensity", 1.0, -1.0, "ndiff")
XA = Detection("homodyne", 1.0, 0.0, "xa")
XB = Detection("homodyne", 0.0, 1.0, "xb")

NAMED_DETECTIONS = {"na": NA, "nb": NB, "ndiff": NDIFF, "xa": XA, "xb": XB}


def parse_detection(text: str) -> Detection:
    """Parse ``na``, ``nb``, ``ndiff``, ``xa``, ``xb``, ``custom:c,d`` or ``customx:c,d``."""
    key = text.strip().lower()
    if key in NAMED_DETECTIONS:
        return NAMED_DETECTIONS[key]
    for prefix, factory in (("custom:", Detection.custom_intensity),
                            ("customx:", Detection.custom_homodyne)):
        if key.startswith(prefix):
            parts = key[len(prefix):].split(",")
            if len(parts) != 2:
                raise ValueError(f"expected two weights in {text!r}")
            return factory(float(parts[0]), float(parts[1]))
    raise ValueError(f"unknown detection {text!r}")
