"""Robust loss families and their reweighting functions.

Each family is described by a :class:`LossSpec`.  The quantities needed by
iteratively reweighted least squares are the loss value ``zeta(t)``, the
weight ratio ``phi(t) = zeta'(t) / t`` and the mean-loss objective.  Tuning
constants may be given explicitly or left unset, in which case they are
re-derived from the current error vector each iteration (``tune_loss``).
"""

import json
import warnings
from dataclasses import dataclass

import numpy as np

LOSS_KINDS = ("square", "huber", "hampel", "tukey")


@dataclass(frozen=True)
class LossSpec:
    """A robust loss family plus its tuning constants.

    ``huber`` and ``tukey`` use a single constant ``c``; ``hampel`` uses
    ``c1 < c2 < c3``.  Constants left as ``None`` mark the loss as
    data-driven: they are re-tuned from the error vector each iteration.
    """

    kind: str
    c: float | None = None
    c1: float | None = None
    c2: float | None = None
    c3: float | None = None

    def __post_init__(self):
        if self.kind not in LOSS_KINDS:
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.kind in ("huber", "tukey") and self.c is not None and self.c <= 0:
            raise ValueError("tuning constant c must be positive")
        if self.kind == "hampel":
            consts = (self.c1, self.c2, self.c3)
            if any(v is not None for v in consts):
                if any(v is None for v in consts):
                    raise ValueError("hampel needs all of c1, c2, c3 or none")
                if not (0 < self.c1 < self.c2 < self.c3):
                    raise ValueError("hampel requires 0 < c1 < c2 < c3")

    @property
    def data_driven(self):
        if self.kind == "square":
            return False
        if self.kind == "hampel":
            return self.c1 is None
        return self.c is None

    def to_dict(self):
        out = {"kind": self.kind}
        if self.kind in ("huber", "tukey"):
            out["c"] = self.c
        elif self.kind == "hampel":
            out.update({"c1": self.c1, "c2": self.c2, "c3": self.c3})
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(
            kind=d["kind"],
            c=d.get("c"),
            c1=d.get("c1"),
            c2=d.get("c2"),
            c3=d.get("c3"),
        )

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))


def make_loss(kind, **constants):
    """Build a :class:`LossSpec`, accepting ``c`` or ``c1/c2/c3`` keywords."""
    return LossSpec(kind=kind, **constants)


def _require_tuned(spec):
    if spec.data_driven:
        raise ValueError(
            "loss constants are data-driven; call tune_loss() on the current "
            "errors before evaluating"
        )


def _check_nonnegative(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("loss argument t must be nonnegative")
    return t


def loss_value(spec, t):
    """Evaluate the loss pointwise on nonnegative ``t`` (scalar or array)."""
    _require_tuned(spec)
    t = _check_nonnegative(t)
    if spec.kind == "square":
        out = 0.5 * t**2
    elif spec.kind == "huber":
        c = spec.c
        out = np.where(t <= c, 0.5 * t**2, c * t - 0.5 * c**2)
    elif spec.kind == "hampel":
        c1, c2, c3 = spec.c1, spec.c2, spec.c3
        flat = 0.5 * c1 * (c2 + c3 - c1)
        out = np.select(
            [t < c1, t < c2, t < c3],
            [
                0.5 * t**2,
                c1 * t - 0.5 * c1**2,
                flat - 0.5 * c1 / (c3 - c2) * (t - c3) ** 2,
            ],
            default=flat,
        )
    else:  # tukey
        c = spec.c
        out = np.where(t <= c, 1.0 - (1.0 - (t / c) ** 2) ** 3, 1.0)
    return out if out.ndim else float(out)


def weight_ratio(spec, t):
    """Evaluate ``phi(t) = zeta'(t) / t``, with the t -> 0 limit at 0."""
    _require_tuned(spec)
    t = _check_nonnegative(t)
    if spec.kind == "square":
        out = np.ones_like(t)
    elif spec.kind == "huber":
        c = spec.c
        safe = np.where(t > 0, t, 1.0)
        out = np.where(t <= c, 1.0, c / safe)
    elif spec.kind == "hampel":
        c1, c2, c3 = spec.c1, spec.c2, spec.c3
        safe = np.where(t > 0, t, 1.0)
        out = np.select(
            [t < c1, t < c2, t < c3],
            [np.ones_like(t), c1 / safe, c1 * (c3 - t) / (safe * (c3 - c2))],
            default=0.0,
        )
    else:  # tukey
        c = spec.c
        out = np.where(t <= c, 6.0 / c**2 * (1.0 - (t / c) ** 2) ** 2, 0.0)
    return out if out.ndim else float(out)


def loss_objective(spec, errors):
    """Mean loss over an error vector."""
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        raise ValueError("cannot evaluate the objective on an empty error vector")
    return float(np.mean(loss_value(spec, errors)))


# Percentiles used to tune hampel's three constants and tukey's cutoff.
HAMPEL_PERCENTILES = (50.0, 85.0, 95.0)
TUKEY_PERCENTILE = 95.0


def tune_loss(kind, errors):
    """Derive concrete loss constants from the current error vector.

    huber uses the median error, hampel the (50, 85, 95) percentiles and
    tukey the 95th percentile, all with linear interpolation.  A degenerate
    error vector makes huber/tukey fail outright, while hampel falls back to
    square-equivalent (uniform) weights with a warning so an enclosing
    reweighting loop can continue.
    """
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        raise ValueError("cannot tune a loss on an empty error vector")
    if kind == "square":
        return LossSpec("square")
    if kind == "huber":
        c = float(np.median(errors))
        if c <= 0:
            raise ValueError("cannot tune on degenerate errors")
        return LossSpec("huber", c=c)
    if kind == "tukey":
        c = float(np.percentile(errors, TUKEY_PERCENTILE))
        if c <= 0:
            raise ValueError("cannot tune on degenerate errors")
        return LossSpec("tukey", c=c)
    if kind == "hampel":
        c1, c2, c3 = (float(np.percentile(errors, q)) for q in HAMPEL_PERCENTILES)
        if not (0 < c1 < c2 < c3):
            warnings.warn(
                "degenerate error percentiles; falling back to uniform "
                "(square-loss) weights for this step",
                RuntimeWarning,
                stacklevel=2,
            )
            return LossSpec("square")
        return LossSpec("hampel", c1=c1, c2=c2, c3=c3)
    raise ValueError(f"unknown loss kind {kind!r}")


def resolve_loss(spec, errors):
    """Return a concrete spec: tune on ``errors`` when data-driven."""
    if spec.data_driven:
        return tune_loss(spec.kind, errors)
    return spec
