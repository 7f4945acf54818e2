"""Exact information measures over dense joint tables.

All quantities are in nats and are computed by direct summation over the
table, with the ``0 * log 0 = 0`` convention.  Tiny negative results from
floating-point cancellation (within ``CLAMP_BAND`` of zero) are clamped to
exactly 0.0 so that downstream comparisons never see ``-1e-17``-style noise.

Symmetry of mutual information is bit-exact, not merely approximate: the
union of the two variable sets is always marginalised in canonical variable
order, and the only asymmetric step would be the product of the two factor
marginals, which commutes exactly in IEEE floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable

import numpy as np

from .distributions import (
    JointTable,
    ValidationError,
    Variable,
    VarSet,
)

#: Measured in nats.  Alias to keep signatures self-describing.
Nats = float

#: Shared default tolerance, in nats, for every comparison in the package.
DEFAULT_TOLERANCE: float = 1e-9

#: Negative values above this threshold are floating-point noise and clamp to 0.
CLAMP_BAND: float = 1e-12

LN2 = math.log(2.0)


def to_bits(value: Nats) -> float:
    """Convert nats to bits for display."""
    return value / LN2


def _clamp(value: float) -> float:
    if value < 0.0 and value > -CLAMP_BAND:
        return 0.0
    return value


def _as_sets(joint: JointTable, *groups) -> list[VarSet]:
    out = [VarSet.coerce(g) for g in groups]
    for vs in out:
        if len(vs) == 0:
            raise ValidationError("variable set must be non-empty")
        for v in vs:
            joint.axis_of(v)  # raises if missing
    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            if not out[i].is_disjoint(out[j]):
                raise ValidationError(
                    f"variable sets must be disjoint, got {out[i]!r} and {out[j]!r}"
                )
    return out


def entropy(joint: JointTable, subset: VarSet | Variable | Iterable[Variable]) -> Nats:
    """Shannon entropy of the marginal over ``subset``, in nats."""
    (vs,) = _as_sets(joint, subset)
    p = joint.marginal(vs.sorted()).probs
    mask = p > 0.0
    return _clamp(float(-(p[mask] * np.log(p[mask])).sum()))


def _mi_of_array(p: np.ndarray, x_axes: tuple[int, ...], y_axes: tuple[int, ...]) -> float:
    """MI between two axis groups of a normalised array covering all axes."""
    px = p.sum(axis=y_axes, keepdims=True)
    py = p.sum(axis=x_axes, keepdims=True)
    mask = p > 0.0
    terms = np.zeros_like(p)
    # px * py commutes bit-exactly, so swapping the roles of x and y cannot
    # change the result.
    np.divide(p, px * py, out=terms, where=mask)
    np.log(terms, out=terms, where=mask)
    terms *= p
    return float(terms[mask].sum())


def _mi_raw(joint: JointTable, x: VarSet, y: VarSet) -> float:
    both = (x | y).sorted()
    sub = joint.marginal(both).probs
    order = tuple(both)
    x_axes = tuple(i for i, v in enumerate(order) if v in x)
    y_axes = tuple(i for i, v in enumerate(order) if v in y)
    return _mi_of_array(sub, x_axes, y_axes)


def mutual_information(
    joint: JointTable,
    x: VarSet | Variable | Iterable[Variable],
    y: VarSet | Variable | Iterable[Variable],
    clamp: bool = True,
) -> Nats:
    """Mutual information between disjoint variable sets, in nats.

    ``clamp=False`` exposes the raw summation result (useful for asserting
    that rounding noise stays within ``CLAMP_BAND``).
    """
    xs, ys = _as_sets(joint, x, y)
    value = _mi_raw(joint, xs, ys)
    return _clamp(value) if clamp else value


def conditional_mutual_information(
    joint: JointTable,
    x: VarSet | Variable | Iterable[Variable],
    y: VarSet | Variable | Iterable[Variable],
    z: VarSet | Variable | Iterable[Variable] = (),
) -> Nats:
    """I(X; Y | Z) in nats, computed by slicing on each value of Z.

    An empty ``Z`` reduces to plain mutual information.  Zero-probability
    values of Z contribute nothing and are skipped, which keeps the measure
    well defined even when the conditioning marginal has structural zeros.
    """
    z = VarSet.coerce(z)
    if len(z) == 0:
        return mutual_information(joint, x, y)
    xs, ys, zs = _as_sets(joint, x, y, z)

    every = (xs | ys | zs).sorted()
    sub = joint.marginal(every)
    order = tuple(every)
    z_axes = tuple(i for i, v in enumerate(order) if v in zs)
    keep_axes = tuple(i for i in range(len(order)) if i not in z_axes)
    x_axes = tuple(keep_axes.index(i) for i, v in enumerate(order) if v in xs)
    y_axes = tuple(keep_axes.index(i) for i, v in enumerate(order) if v in ys)

    # Move the Z axes to the front and walk its cells.
    arranged = np.transpose(sub.probs, z_axes + keep_axes)
    z_shape = arranged.shape[: len(z_axes)]
    flat = arranged.reshape((-1,) + arranged.shape[len(z_axes):])
    total = 0.0
    for i in range(flat.shape[0]):
        slab = flat[i]
        pz = float(slab.sum())
        if pz <= 0.0:
            continue
        total += pz * _mi_of_array(slab / pz, x_axes, y_axes)
    return _clamp(total)


def chain_rule_residual(
    joint: JointTable,
    x1: VarSet | Variable | Iterable[Variable],
    x2: VarSet | Variable | Iterable[Variable],
    y: VarSet | Variable | Iterable[Variable],
) -> Nats:
    """|I(X1, X2; Y) - I(X1; Y) - I(X2; Y | X1)|, which is 0 in exact arithmetic."""
    x1s, x2s, ys = _as_sets(joint, x1, x2, y)
    lhs = mutual_information(joint, x1s | x2s, ys)
    rhs = mutual_information(joint, x1s, ys) + conditional_mutual_information(
        joint, x2s, ys, x1s
    )
    return abs(lhs - rhs)


@dataclass(frozen=True)
class MarkovVerdict:
    """Outcome of testing X -> Y -> Z: the residual is I(X; Z | Y)."""

    is_chain: bool
    residual: Nats
    tolerance: float


def is_markov_chain(
    joint: JointTable,
    x: VarSet | Variable | Iterable[Variable],
    y: VarSet | Variable | Iterable[Variable],
    z: VarSet | Variable | Iterable[Variable],
    tol: float = DEFAULT_TOLERANCE,
) -> MarkovVerdict:
    """Test whether X -> Y -> Z holds, i.e. whether I(X; Z | Y) <= tol.

    Markov chains are reversible, and the test is too: swapping X and Z gives
    a bit-identical residual because the underlying MI computation is
    symmetric at the floating-point level.
    """
    if tol <= 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    residual = conditional_mutual_information(joint, x, z, y)
    return MarkovVerdict(is_chain=residual <= tol, residual=residual, tolerance=tol)


def data_processing_gap(
    joint: JointTable,
    x: VarSet | Variable | Iterable[Variable],
    y: VarSet | Variable | Iterable[Variable],
    z: VarSet | Variable | Iterable[Variable],
    tol: float = DEFAULT_TOLERANCE,
) -> Nats:
    """I(X; Y) - I(X; Z) along a verified chain X -> Y -> Z (never below -tol).

    Raises if the chain does not hold: the data-processing inequality says
    nothing about arbitrary triples.
    """
    verdict = is_markov_chain(joint, x, y, z, tol=tol)
    if not verdict.is_chain:
        raise ValidationError(
            f"not a Markov chain: I(X; Z | Y) = {verdict.residual:.3e} "
            f"exceeds tolerance {tol:.1e}"
        )
    return mutual_information(joint, x, y) - mutual_information(joint, x, z)


def assignments(sizes: Iterable[int]):
    """Iterate all index tuples for the given alphabet sizes (row-major)."""
    return product(*(range(s) for s in sizes))
