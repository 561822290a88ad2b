"""Assortment policies: fixed, uniform random, and epoch-based UCB.

Policies only ever see the public side of the problem -- (N, K, revenues) at
construction plus a stream of :class:`Observation`s -- never the preference
weights.  A policy instance is single-threaded mutable state; build one per
trajectory.

The learning policy replays a fixed assortment until a no-purchase closes the
epoch.  Within an epoch the number of purchases of an offered item is an
unbiased estimate of its preference weight, which feeds the optimistic index

    v_ucb_i = v_hat_i + sqrt(cs * v_hat_i * log(sqrt(N)*l + 1) / T_i)
                      + cs * log(sqrt(N)*l + 1) / T_i

with cs = 48 by default, l the number of completed epochs and T_i the number
of epochs that offered item i.  Items never offered keep an infinite index
and are explored first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    NO_PURCHASE,
    Assortment,
    EnumerationLimitError,
    argmax_assortment,
)

__all__ = [
    "Observation",
    "ProtocolError",
    "AssortmentPolicy",
    "FixedAssortmentPolicy",
    "UniformRandomPolicy",
    "EpochUcbPolicy",
    "PolicySpec",
    "ucb_assortment",
]


class ProtocolError(RuntimeError):
    """The act/observe alternation was violated (wrong offered set, etc.)."""


@dataclass(frozen=True, slots=True)
class Observation:
    """One step of feedback: what was offered, what happened, when."""

    offered: Assortment
    outcome: object  # item id or NO_PURCHASE
    step: int

    def __post_init__(self):
        if self.outcome is not NO_PURCHASE and self.outcome not in self.offered:
            raise ValueError(f"outcome {self.outcome!r} was not offered")


class AssortmentPolicy:
    """Base class; subclasses fill in _choose() and optionally _update()."""

    name = "abstract"

    def __init__(self, n_items: int, capacity: int, revenues):
        self.n_items = int(n_items)
        self.capacity = int(capacity)
        self.revenues = np.asarray(revenues, dtype=np.float64)
        if self.revenues.shape != (self.n_items,):
            raise ValueError("revenues must have one entry per item")
        self._last: Assortment | None = None

    def act(self) -> Assortment:
        s = self._choose()
        self._last = s
        return s

    def observe(self, obs: Observation) -> None:
        last = self._last
        if last is None:
            raise ProtocolError("observe() before any act()")
        if obs.offered is not last and obs.offered.items != last.items:
            raise ProtocolError(
                f"observation for {obs.offered!r} but policy last offered {last!r}"
            )
        self._update(obs)

    def _choose(self) -> Assortment:
        raise NotImplementedError

    def _update(self, obs: Observation) -> None:
        pass  # baselines ignore feedback


class FixedAssortmentPolicy(AssortmentPolicy):
    """Always offers the same assortment (possibly smaller than K)."""

    name = "fixed"

    def __init__(self, n_items, capacity, revenues, items=None):
        super().__init__(n_items, capacity, revenues)
        if items is None:
            items = range(1, self.capacity + 1)
        s = items if isinstance(items, Assortment) else Assortment(items)
        if len(s) == 0 or len(s) > self.capacity:
            raise ValueError(f"fixed assortment must have 1..K={self.capacity} items")
        if s.items[-1] > self.n_items:
            raise ValueError(f"fixed assortment {s!r} out of range for N={self.n_items}")
        self.items = s

    def _choose(self):
        return self.items


class UniformRandomPolicy(AssortmentPolicy):
    """Offers a fresh uniformly random size-K subset at every step."""

    name = "random"

    def __init__(self, n_items, capacity, revenues, rng: np.random.Generator):
        super().__init__(n_items, capacity, revenues)
        self._rng = rng

    def _choose(self):
        ids = self._rng.choice(self.n_items, size=self.capacity, replace=False)
        return Assortment(int(i) + 1 for i in ids)


def ucb_assortment(v_ucb: np.ndarray, revenues: np.ndarray, capacity: int) -> Assortment:
    """Most optimistic assortment of size <= K for index weights ``v_ucb``.

    Never-offered items carry +inf and are taken first, smallest ids first
    (forced exploration).  With uniform revenues the exact maximizer is the
    top-K by index; otherwise the subset search runs, subject to the
    enumeration limit.  Ties break to the lexicographically smallest set.
    """
    v_ucb = np.asarray(v_ucb, dtype=np.float64)
    revenues = np.asarray(revenues, dtype=np.float64)
    n, k = len(v_ucb), int(capacity)
    unseen = np.isposinf(v_ucb)
    chosen: list[int] = []
    if unseen.any():
        chosen = [int(i) + 1 for i in np.flatnonzero(unseen)[:k]]
        if len(chosen) < k:
            seen_order = sorted(
                (int(i) for i in np.flatnonzero(~unseen)),
                key=lambda i: (-v_ucb[i], i),
            )
            fill = [i + 1 for i in seen_order if v_ucb[i] > 0.0]
            chosen += fill[: k - len(chosen)]
        return Assortment(chosen)
    if np.all(revenues == revenues[0]):
        order = sorted(range(n), key=lambda i: (-v_ucb[i], i))
        return Assortment(i + 1 for i in order[:k] if v_ucb[i] > 0.0)
    s, _ = argmax_assortment(v_ucb, revenues, k)
    return s


class EpochUcbPolicy(AssortmentPolicy):
    """Epoch-based optimistic policy with per-epoch purchase-count estimates."""

    name = "epoch-ucb"

    def __init__(self, n_items, capacity, revenues, confidence_scale: float = 48.0):
        super().__init__(n_items, capacity, revenues)
        cs = float(confidence_scale)
        if cs <= 0:
            raise ValueError("confidence_scale must be positive")
        self.confidence_scale = cs
        n = self.n_items
        self.epochs_offered = np.zeros(n, dtype=np.int64)  # T_i
        self.total_purchases = np.zeros(n, dtype=np.float64)
        self.v_hat = np.zeros(n, dtype=np.float64)
        self.v_ucb = np.full(n, np.inf)
        self.completed_epochs = 0
        self._tally = np.zeros(n, dtype=np.int64)
        self._current: Assortment | None = None

    def _choose(self):
        if self._current is None:  # previous epoch closed; pick a new set
            self._current = ucb_assortment(self.v_ucb, self.revenues, self.capacity)
        return self._current

    def _update(self, obs: Observation) -> None:
        if self._current is None:
            raise ProtocolError("epoch feedback without an open epoch")
        if obs.outcome is not NO_PURCHASE:
            self._tally[obs.outcome - 1] += 1
            return
        idx = self._current.indices()
        self.epochs_offered[idx] += 1
        self.total_purchases[idx] += self._tally[idx]
        self.v_hat[idx] = self.total_purchases[idx] / self.epochs_offered[idx]
        self.completed_epochs += 1
        log_term = math.log(math.sqrt(self.n_items) * self.completed_epochs + 1.0)
        seen = self.epochs_offered > 0
        t_seen = self.epochs_offered[seen]
        vh = self.v_hat[seen]
        self.v_ucb[seen] = (
            vh
            + np.sqrt(self.confidence_scale * vh * log_term / t_seen)
            + self.confidence_scale * log_term / t_seen
        )
        self._tally[idx] = 0
        self._current = None


@dataclass(frozen=True)
class PolicySpec:
    """Declarative policy choice: a name plus keyword parameters.

    Understood names: ``fixed`` (items), ``random`` (seed), ``epoch-ucb``
    (confidence_scale).  This declarative form is what configs and reports
    carry; call :meth:`make` to build a live policy for one trajectory.
    """

    name: str
    params: dict = field(default_factory=dict)

    _KNOWN = ("fixed", "random", "epoch-ucb")

    def __post_init__(self):
        if self.name not in self._KNOWN:
            raise ValueError(f"unknown policy {self.name!r}; expected one of {self._KNOWN}")

    def make(self, n_items, capacity, revenues, rng: np.random.Generator) -> AssortmentPolicy:
        p = self.params
        if self.name == "fixed":
            items = p.get("items")
            if isinstance(items, int):
                items = (items,)
            return FixedAssortmentPolicy(n_items, capacity, revenues, items=items)
        if self.name == "random":
            seed = p.get("seed")
            stream = rng if seed is None else np.random.default_rng(int(seed))
            return UniformRandomPolicy(n_items, capacity, revenues, rng=stream)
        return EpochUcbPolicy(
            n_items, capacity, revenues,
            confidence_scale=float(p.get("confidence_scale", 48.0)),
        )

    def label(self) -> str:
        if not self.params:
            return self.name
        parts = []
        for key in sorted(self.params):
            val = self.params[key]
            if isinstance(val, (list, tuple)):
                val = ",".join(str(x) for x in val)
            parts.append(f"{key}={val}")
        return f"{self.name}[{';'.join(parts)}]"

    def to_dict(self) -> dict:
        params = {
            k: (list(v) if isinstance(v, tuple) else v) for k, v in self.params.items()
        }
        return {"name": self.name, "params": params}

    @classmethod
    def from_dict(cls, d: dict) -> "PolicySpec":
        params = {
            k: (tuple(v) if isinstance(v, list) else v)
            for k, v in dict(d.get("params", {})).items()
        }
        return cls(name=d["name"], params=params)

    @classmethod
    def from_string(cls, text: str) -> "PolicySpec":
        """Parse 'name' or 'name:key=val;key=val'; list values use commas.

        Examples: ``fixed:items=1,2,3``  ``random:seed=7``
        ``epoch-ucb:confidence_scale=24``
        """
        name, _, rest = text.partition(":")
        params: dict = {}
        if rest:
            for pair in rest.split(";"):
                key, sep, raw = pair.partition("=")
                if not sep:
                    raise ValueError(f"malformed policy parameter {pair!r}")
                params[key.strip()] = _parse_value(raw.strip())
        return cls(name=name.strip(), params=params)


def _parse_value(raw: str):
    if "," in raw:
        return tuple(int(x) for x in raw.split(",") if x)
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            continue
    return raw
