"""Words in a finite alphabet of generators and their inverses."""
from __future__ import annotations

import re
from dataclasses import dataclass


def _reduce(letters) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for g, e in letters:
        g, e = int(g), int(e)
        if e == 0:
            continue
        if out and out[-1][0] == g:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, e])
    return tuple((g, e) for g, e in out)


@dataclass(frozen=True, order=True)
class Word:
    """A freely reduced word stored as syllables ``(generator, exponent)``."""

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _reduce(self.letters))

    @classmethod
    def gen(cls, i: int, e: int = 1) -> "Word":
        return cls(((i, e),))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return self.inverse() ** (-k)
        return Word(self.letters * k)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def flat(self) -> list[tuple[int, int]]:
        """Letters expanded to unit exponents."""
        return [(g, 1 if e > 0 else -1) for g, e in self.letters for _ in range(abs(e))]

    def generators(self) -> set[int]:
        return {g for g, _ in self.letters}

    def shift(self, offset: int) -> "Word":
        return Word(tuple((g + offset, e) for g, e in self.letters))

    def substitute(self, images) -> "Word":
        out = Word()
        for g, e in self.letters:
            out = out * images[g] ** e
        return out

    def format(self, names) -> str:
        if not self.letters:
            return "e"
        parts = []
        for g, e in self.letters:
            parts.append(names[g] if e == 1 else f"{names[g]}^{e}")
        return " ".join(parts)


IDENTITY = Word()


def commutator(u: Word, v: Word) -> Word:
    """``[u, v] = u^-1 v^-1 u v``."""
    return u.inverse() * v.inverse() * u * v


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_.']*)|(?P<num>-?\d+)|(?P<sym>[\^()\[\],*]))")


class WordSyntaxError(ValueError):
    pass


def parse_word(text: str, names) -> Word:
    """Parse ``"a b^-1 c^2"``, ``"(a b)^3"`` or ``"[x,[x,y]]"``.

    ``e`` and ``1`` and the empty string denote the identity unless ``e`` is
    itself a generator name.
    """
    index = {n: i for i, n in enumerate(names)}
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise WordSyntaxError(f"bad character at {pos} in {text!r}")
        pos = m.end()
        if m.group("name") is not None:
            tokens.append(("name", m.group("name")))
        elif m.group("num") is not None:
            tokens.append(("num", int(m.group("num"))))
        else:
            tokens.append(("sym", m.group("sym")))
    tokens.append(("end", None))
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        t = tokens[i]
        i += 1
        return t

    def product(stop):
        w = Word()
        while True:
            kind, val = peek()
            if kind == "end" or (kind == "sym" and val in stop):
                return w
            if kind == "sym" and val == "*":
                take()
                continue
            w = w * factor()

    def factor():
        kind, val = take()
        if kind == "name":
            if val in index:
                base = Word.gen(index[val])
            elif val == "e":
                base = Word()
            else:
                raise WordSyntaxError(f"unknown generator {val!r} in {text!r}")
        elif kind == "num" and val == 1:
            base = Word()
        elif kind == "sym" and val == "(":
            base = product({")"})
            if take() != ("sym", ")"):
                raise WordSyntaxError(f"unbalanced parenthesis in {text!r}")
        elif kind == "sym" and val == "[":
            u = product({","})
            if take() != ("sym", ","):
                raise WordSyntaxError(f"commutator needs a comma in {text!r}")
            v = product({"]"})
            if take() != ("sym", "]"):
                raise WordSyntaxError(f"unbalanced bracket in {text!r}")
            base = commutator(u, v)
        else:
            raise WordSyntaxError(f"unexpected token {val!r} in {text!r}")
        if peek() == ("sym", "^"):
            take()
            k, n = take()
            if k != "num":
                raise WordSyntaxError(f"exponent must be an integer in {text!r}")
            base = base ** n
        return base

    w = product(set())
    if peek()[0] != "end":
        raise WordSyntaxError(f"trailing input in {text!r}")
    return w
