"""Deterministic splittable random keys.

A key is an opaque 128-bit value. Child keys are derived with BLAKE2b over the
parent key bytes plus a split index (or a text label), so the tree of streams is
reproducible on any platform and independent of how many siblings exist. Draws
go through numpy's Philox generator, a counter-based PRNG keyed directly by the
128-bit state; a fresh Generator is constructed per consumption site, so a key
always yields the same draws no matter what happened elsewhere.

Convention (borrowed from splittable-PRNG practice): never draw twice from the
same key for different purposes — split first, then consume the children.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

_KEY_BYTES = 16


def _digest(data: bytes) -> int:
    return int.from_bytes(hashlib.blake2b(data, digest_size=_KEY_BYTES).digest(), "little")


@dataclass(frozen=True)
class RngKey:
    """128-bit splittable random key."""

    state: int

    @classmethod
    def from_seed(cls, seed: int) -> "RngKey":
        return cls(_digest(b"seed:" + int(seed).to_bytes(16, "little", signed=True)))

    def split(self, n: int) -> tuple["RngKey", ...]:
        """Derive n independent child keys; child i never depends on n."""
        if n < 0:
            raise ValueError("cannot split into a negative number of keys")
        base = self.state.to_bytes(_KEY_BYTES, "little")
        return tuple(
            RngKey(_digest(base + i.to_bytes(8, "little"))) for i in range(n)
        )

    def at(self, i: int) -> "RngKey":
        """Child i of this key — identical to split(n)[i] for any n > i."""
        base = self.state.to_bytes(_KEY_BYTES, "little")
        return RngKey(_digest(base + int(i).to_bytes(8, "little")))

    def child(self, label: str) -> "RngKey":
        """Derive a labelled child key (for named sub-streams)."""
        base = self.state.to_bytes(_KEY_BYTES, "little")
        return RngKey(_digest(base + b"/" + label.encode("utf-8")))

    def generator(self) -> np.random.Generator:
        """A fresh Philox generator keyed by this state."""
        return np.random.Generator(np.random.Philox(key=self.state))


def split(key: RngKey, n: int) -> tuple[RngKey, ...]:
    return key.split(n)
