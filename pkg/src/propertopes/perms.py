"""Finite permutations and their left/right actions on profiles.

Conventions used throughout the package:

* a ``Perm`` on ``k`` letters is stored as a tuple ``images`` with
  ``images[i] = sigma(i)`` in 0-based positions;
* the left action moves the entry at position ``i`` to position
  ``sigma(i)``, so ``act(sigma, s)[i] == s[sigma^-1(i)]``;
* the right action is ``ract(s, tau)[i] == s[tau(i)]``, which is the left
  action of ``tau^-1``.

With these conventions ``act(compose(a, b), s) == act(a, act(b, s))`` and
``ract(ract(s, a), b) == ract(s, compose(a, b))``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Sequence, TypeVar

T = TypeVar("T")


@dataclass(frozen=True, order=True)
class Perm:
    """A bijection on {0, ..., k-1} given by its tuple of images."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation: {self.images!r}")

    @staticmethod
    def identity(k: int) -> "Perm":
        return Perm(tuple(range(k)))

    @staticmethod
    def from_one_based(images: Sequence[int]) -> "Perm":
        return Perm(tuple(i - 1 for i in images))

    @staticmethod
    def transposition(k: int, i: int, j: int) -> "Perm":
        images = list(range(k))
        images[i], images[j] = images[j], images[i]
        return Perm(tuple(images))

    @staticmethod
    def random(k: int, rng: random.Random) -> "Perm":
        images = list(range(k))
        rng.shuffle(images)
        return Perm(tuple(images))

    @staticmethod
    def all_perms(k: int) -> Iterator["Perm"]:
        for images in itertools.permutations(range(k)):
            yield Perm(images)

    def canon_tree(self):
        return ("perm", self.images)

    def to_one_based(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in self.images)

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def inverse(self) -> "Perm":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm(tuple(inv))

    def compose(self, other: "Perm") -> "Perm":
        """Return self after other: (self * other)(i) = self(other(i))."""
        if len(self) != len(other):
            raise ValueError("size mismatch in permutation composition")
        return Perm(tuple(self.images[other.images[i]] for i in range(len(self))))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def act(self, seq: Sequence[T]) -> tuple[T, ...]:
        """Left action: position i of the result is seq[self^-1(i)]."""
        if len(seq) != len(self):
            raise ValueError("size mismatch in permutation action")
        out: list[T] = [None] * len(seq)  # type: ignore[list-item]
        for i, x in enumerate(seq):
            out[self.images[i]] = x
        return tuple(out)

    def ract(self, seq: Sequence[T]) -> tuple[T, ...]:
        """Right action: position i of the result is seq[self(i)]."""
        if len(seq) != len(self):
            raise ValueError("size mismatch in permutation action")
        return tuple(seq[self.images[i]] for i in range(len(seq)))


def block_sum(*perms: Perm) -> Perm:
    """Disjoint (block-diagonal) sum of permutations."""
    images: list[int] = []
    offset = 0
    for p in perms:
        images.extend(i + offset for i in p.images)
        offset += len(p)
    return Perm(tuple(images))


def block_perm(block_order: Perm, sizes: Sequence[int]) -> Perm:
    """Permutation of concatenated blocks that moves block i to slot block_order(i).

    ``sizes[i]`` is the length of block ``i`` before reordering; entries keep
    their relative order inside each block.
    """
    if len(block_order) != len(sizes):
        raise ValueError("block count mismatch")
    old_offsets = [0] * len(sizes)
    acc = 0
    for i, s in enumerate(sizes):
        old_offsets[i] = acc
        acc += s
    # offsets of the blocks after reordering
    new_sizes = block_order.act(tuple(sizes))
    new_offsets = [0] * len(sizes)
    acc = 0
    for i, s in enumerate(new_sizes):
        new_offsets[i] = acc
        acc += s
    images = [0] * sum(sizes)
    for i, s in enumerate(sizes):
        dest = block_order(i)
        for off in range(s):
            images[old_offsets[i] + off] = new_offsets[dest] + off
    return Perm(tuple(images))
