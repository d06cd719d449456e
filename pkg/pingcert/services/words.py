"""Words over signed generators: parsing, free and cyclic reduction.

A letter is stored as a nonzero int code: ``+(i + 1)`` for generator ``i``
and ``-(i + 1)`` for its inverse. Words are immutable tuples of codes.
"""

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

DEFAULT_NAMES = tuple("abcdefghijklmnopqrstuvwxyz")


def letter_rank(code: int) -> int:
    """Position of a letter in the order a < A < b < B < ..."""
    return 2 * (abs(code) - 1) + (1 if code < 0 else 0)


def alphabet_codes(rank: int) -> tuple[int, ...]:
    """All signed letters of a rank-`rank` alphabet in rank order."""
    codes: list[int] = []
    for i in range(1, rank + 1):
        codes.extend((i, -i))
    return tuple(codes)


@dataclass(frozen=True, slots=True)
class Word:
    letters: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def format(self, names: Sequence[str] = DEFAULT_NAMES) -> str:
        return format_letters(self.letters, names)

    def __str__(self) -> str:
        return self.format()

    @classmethod
    def parse(cls, text: str, names: Sequence[str] = DEFAULT_NAMES) -> "Word":
        return cls(parse_letters(text, names))


IDENTITY = Word()


def parse_letters(text: str, names: Sequence[str] = DEFAULT_NAMES) -> tuple[int, ...]:
    """Lowercase letters are generators, uppercase their inverses; spaces ignored."""
    index = {name: i for i, name in enumerate(names)}
    codes: list[int] = []
    for ch in text:
        if ch.isspace():
            continue
        low = ch.lower()
        if low not in index:
            raise ValueError(f"letter {ch!r} outside alphabet {''.join(names)}")
        code = index[low] + 1
        codes.append(code if ch == low else -code)
    return tuple(codes)


def format_letters(letters: Iterable[int], names: Sequence[str] = DEFAULT_NAMES) -> str:
    out = []
    for code in letters:
        name = names[abs(code) - 1]
        out.append(name if code > 0 else name.upper())
    return "".join(out)


def shortlex_key(letters: Sequence[int]) -> tuple:
    return (len(letters), tuple(letter_rank(c) for c in letters))


def reduce_letters(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for code in letters:
        if stack and stack[-1] == -code:
            stack.pop()
        else:
            stack.append(code)
    return tuple(stack)


def invert_letters(letters: Sequence[int]) -> tuple[int, ...]:
    return tuple(-c for c in reversed(letters))


def free_reduce(w: Word) -> Word:
    """Cancel adjacent inverse pairs until none remain."""
    return Word(reduce_letters(w.letters))


def invert(w: Word) -> Word:
    return Word(invert_letters(w.letters))


def cyclically_reduce(w: Word) -> tuple[Word, Word]:
    """Split w as conjugator * core * conjugator^-1 with core cyclically reduced."""
    letters = reduce_letters(w.letters)
    n = len(letters)
    i = 0
    while n - 2 * i >= 2 and letters[i] == -letters[n - 1 - i]:
        i += 1
    return Word(letters[i : n - i]), Word(letters[:i])


def cyclic_shifts(letters: Sequence[int]) -> list[tuple[int, ...]]:
    letters = tuple(letters)
    return [letters[i:] + letters[:i] for i in range(len(letters))]


def exponent_sums(letters: Iterable[int], rank: int) -> tuple[int, ...]:
    sums = [0] * rank
    for code in letters:
        sums[abs(code) - 1] += 1 if code > 0 else -1
    return tuple(sums)
