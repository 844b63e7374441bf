"""
Integer set descriptions.

An infinite set E ⊆ ℤ is represented by a lazily iterated stream together
with an oracle for membership in E − E. The textual grammar is

    all | arith:a,d | powers:b | file:<path>

Files hold newline-separated integers and are treated as the prefix of an
infinite set.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Tuple

from recforge.errors import ParameterError

logger = logging.getLogger(__name__)

DEFAULT_PREFIX_SEARCH = 4096


@dataclass(frozen=True)
class IntegerStream:
    """
    A (conceptually infinite) set of integers with a fixed iteration order.

    kind is one of 'all', 'arith', 'powers', 'file', 'finite', 'congruent'.
    For 'congruent' streams, base is the filtered stream and params holds
    (modulus, residue).
    """

    kind: str
    params: Tuple = ()
    base: Optional["IntegerStream"] = None

    def __iter__(self) -> Iterator[int]:
        if self.kind == "all":
            return itertools.count(0)
        if self.kind == "arith":
            start, step = self.params
            return itertools.count(start, step)
        if self.kind == "powers":
            return _powers(self.params[0])
        if self.kind == "file":
            return _read_file(self.params[0])
        if self.kind == "finite":
            return iter(self.params)
        if self.kind == "congruent":
            modulus, residue = self.params
            return (n for n in self.base if n % modulus == residue)
        raise ParameterError(f"Unknown stream kind {self.kind!r}")

    @property
    def infinite(self) -> bool:
        if self.kind == "congruent":
            return self.base.infinite
        return self.kind != "finite"

    @property
    def root(self) -> "IntegerStream":
        """The unfiltered stream this one was derived from."""
        return self.base.root if self.kind == "congruent" else self

    def describe(self) -> str:
        if self.kind == "all":
            return "all"
        if self.kind == "arith":
            return f"arith:{self.params[0]},{self.params[1]}"
        if self.kind == "powers":
            return f"powers:{self.params[0]}"
        if self.kind == "file":
            return f"file:{self.params[0]}"
        if self.kind == "finite":
            return "finite:" + ",".join(str(n) for n in self.params)
        return f"{self.base.describe()}|mod {self.params[0]} = {self.params[1]}"

    def take(self, count: int) -> List[int]:
        return list(itertools.islice(iter(self), count))

    def congruent(self, modulus: int, residue: int) -> "IntegerStream":
        """The sub-stream of elements congruent to residue mod modulus."""
        if modulus < 1:
            raise ParameterError(f"modulus must be positive, got {modulus}")
        return IntegerStream("congruent", (modulus, residue % modulus), self)

    def common_step(self, sample: int = 64) -> int:
        """gcd of the differences among the first `sample` elements (1 if fewer than two)."""
        prefix = self.take(sample)
        step = 0
        for a, b in zip(prefix, prefix[1:]):
            step = math.gcd(step, b - a)
        return abs(step) or 1

    def is_difference(self, value: int, horizon: int = DEFAULT_PREFIX_SEARCH) -> bool:
        """
        Decide whether value ∈ E − E.

        Exact for all/arith/powers; a bounded prefix search otherwise.
        """
        value = abs(value)
        if self.kind == "all":
            return True
        if self.kind == "arith":
            return value % self.params[1] == 0
        if self.kind == "powers":
            return is_power_difference(value, self.params[0])
        prefix = self.take(horizon)
        members = set(prefix)
        return any(n + value in members for n in prefix)


def _powers(base: int) -> Iterator[int]:
    value = 1
    while True:
        yield value
        value *= base


def _read_file(path: str) -> Iterator[int]:
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                yield int(text)
            except ValueError as e:
                raise ParameterError(f"{path}:{line_number}: not an integer: {text!r}") from e


def is_power_difference(value: int, base: int) -> bool:
    """True iff value = base^i − base^j for some i ≥ j ≥ 0."""
    value = abs(value)
    if value == 0:
        return True
    while value % base == 0:
        value //= base
    value += 1
    if value == 1:
        return False
    while value % base == 0:
        value //= base
    return value == 1


def parse_stream_spec(text: str) -> IntegerStream:
    """
    Parse the E grammar.

    Args:
        text: 'all', 'arith:a,d', 'powers:b' or 'file:<path>'

    Returns:
        The corresponding IntegerStream
    """
    if not isinstance(text, str) or not text.strip():
        raise ParameterError("Empty set description")
    text = text.strip()
    kind, _, rest = text.partition(":")
    kind = kind.lower()
    if kind == "all" and not rest:
        return IntegerStream("all")
    if kind == "arith":
        parts = [part.strip() for part in rest.split(",")]
        if len(parts) != 2:
            raise ParameterError(f"arith needs 'a,d', got {rest!r}")
        try:
            start, step = int(parts[0]), int(parts[1])
        except ValueError as e:
            raise ParameterError(f"arith parameters must be integers: {rest!r}") from e
        if step < 1:
            raise ParameterError(f"arith step must be positive, got {step}")
        return IntegerStream("arith", (start, step))
    if kind == "powers":
        try:
            base = int(rest)
        except ValueError as e:
            raise ParameterError(f"powers base must be an integer: {rest!r}") from e
        if base < 2:
            raise ParameterError(f"powers base must be at least 2, got {base}")
        return IntegerStream("powers", (base,))
    if kind == "file":
        if not rest:
            raise ParameterError("file: needs a path")
        if not Path(rest).is_file():
            raise ParameterError(f"No such file: {rest}")
        logger.info(f"Reading integer stream from {rest}")
        return IntegerStream("file", (rest,))
    raise ParameterError(f"Unrecognised set description {text!r}")


def finite_stream(values) -> IntegerStream:
    """A finite stream (rejected wherever an infinite E is required)."""
    return IntegerStream("finite", tuple(int(v) for v in values))
