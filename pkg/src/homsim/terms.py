"""Signed interference terms for each detection scheme, kept as plain data.

Detectors are numbered 1..4.  A four-photon term with pairing ``((a, b), (c, d))``
stands for ``sign * (f_ab f_cd + f_ad f_cb) * exp(-i (w_a + w_c) tau)``: detectors
``a`` and ``c`` receive the signal arguments and carry the delay phase.  The
engine, the brute-force oracle and the symmetric cross-check all read these
tables, so a transcription error cannot hide in one code path only.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import ParameterError


class DetectionScheme(Enum):
    TWO_TWO = "2/2"
    THREE_ONE = "3/1"
    FOUR_ZERO = "4/0"
    ANTI_BUNCH_11 = "1/1"
    BUNCH_20 = "2/0"

    @property
    def prefactor(self) -> Fraction:
        return _PREFACTORS[self]

    @property
    def is_four_photon(self) -> bool:
        return self in (DetectionScheme.TWO_TWO, DetectionScheme.THREE_ONE, DetectionScheme.FOUR_ZERO)

    @classmethod
    def parse(cls, text: "str | DetectionScheme") -> "DetectionScheme":
        if isinstance(text, cls):
            return text
        key = str(text).strip()
        for scheme in cls:
            if key in (scheme.value, scheme.name, scheme.name.lower()):
                return scheme
        raise ParameterError(f"unknown detection scheme {text!r}; choose from "
                             + ", ".join(s.value for s in cls))


_PREFACTORS = {
    DetectionScheme.TWO_TWO: Fraction(1, 64),
    DetectionScheme.THREE_ONE: Fraction(1, 128),
    DetectionScheme.FOUR_ZERO: Fraction(1, 1024),
    DetectionScheme.ANTI_BUNCH_11: Fraction(1, 4),
    DetectionScheme.BUNCH_20: Fraction(1, 16),
}


@dataclass(frozen=True)
class Term:
    sign: int
    pairing: tuple  # ((a, b), (c, d)) for four photons, ((a, b),) for two
    phase_mask: frozenset

    @property
    def signal_detectors(self) -> tuple:
        return tuple(p[0] for p in self.pairing)


@dataclass(frozen=True)
class TermTable:
    scheme: DetectionScheme
    terms: tuple

    @property
    def signs(self) -> tuple:
        return tuple(t.sign for t in self.terms)

    @property
    def prefactor(self) -> Fraction:
        return self.scheme.prefactor

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


# signal-argument detector pairs, in the order the six terms are written
SIGNAL_PAIRS = ((1, 2), (3, 4), (1, 3), (1, 4), (2, 3), (2, 4))

_FOUR_PHOTON_SIGNS = {
    DetectionScheme.TWO_TWO: (+1, +1, -1, -1, -1, -1),
    DetectionScheme.THREE_ONE: (-1, +1, -1, +1, -1, +1),
    DetectionScheme.FOUR_ZERO: (+1, +1, +1, +1, +1, +1),
}

_TWO_PHOTON_SIGNS = {
    DetectionScheme.ANTI_BUNCH_11: (+1, -1),
    DetectionScheme.BUNCH_20: (+1, +1),
}


def _four_photon_term(sign: int, signal_pair: tuple) -> Term:
    a, c = signal_pair
    b, d = sorted({1, 2, 3, 4} - {a, c})
    return Term(sign=sign, pairing=((a, b), (c, d)), phase_mask=frozenset((a, c)))


def term_table(scheme) -> TermTable:
    scheme = DetectionScheme.parse(scheme)
    if not scheme.is_four_photon:
        raise ParameterError(f"{scheme.value} is a two-photon scheme; use two_photon_table")
    signs = _FOUR_PHOTON_SIGNS[scheme]
    return TermTable(scheme, tuple(_four_photon_term(s, p) for s, p in zip(signs, SIGNAL_PAIRS)))


def two_photon_table(scheme) -> TermTable:
    scheme = DetectionScheme.parse(scheme)
    if scheme.is_four_photon:
        raise ParameterError(f"{scheme.value} is a four-photon scheme; use term_table")
    s1, s2 = _TWO_PHOTON_SIGNS[scheme]
    # f(w2, w1) exp(-i w1 tau)  and  f(w1, w2) exp(-i w2 tau)
    return TermTable(scheme, (
        Term(sign=s1, pairing=((2, 1),), phase_mask=frozenset((1,))),
        Term(sign=s2, pairing=((1, 2),), phase_mask=frozenset((2,))),
    ))


def table_for(scheme) -> TermTable:
    scheme = DetectionScheme.parse(scheme)
    return term_table(scheme) if scheme.is_four_photon else two_photon_table(scheme)


def with_signs(table: TermTable, signs) -> TermTable:
    """Copy of ``table`` with replaced signs (used to build corrupted fixtures)."""
    signs = tuple(int(s) for s in signs)
    if len(signs) != len(table.terms) or any(s not in (-1, 1) for s in signs):
        raise ParameterError(f"need {len(table.terms)} signs of +-1, got {signs}")
    return TermTable(table.scheme, tuple(
        Term(sign=s, pairing=t.pairing, phase_mask=t.phase_mask) for s, t in zip(signs, table.terms)))


def expand_term(term: Term) -> str:
    """Render one term as e.g. ``+(f13 f24 + f14 f23) exp(-i(w1+w2)tau)``."""
    sign = "+" if term.sign > 0 else "-"
    phase = "+".join(f"w{m}" for m in sorted(term.phase_mask))
    if len(term.pairing) == 2:
        (a, b), (c, d) = term.pairing
        amp = f"(f{a}{b} f{c}{d} + f{a}{d} f{c}{b})"
    else:
        (a, b), = term.pairing
        amp = f"f{a}{b}"
    return f"{sign}{amp} exp(-i({phase})tau)"


def expand_table(table: TermTable) -> list[str]:
    return [expand_term(t) for t in table.terms]


def format_table(table: TermTable) -> str:
    lines = [f"scheme {table.scheme.value}   prefactor {table.prefactor}"]
    body = expand_table(table)
    lines.append("|I|^2 = |  " + body[0])
    lines.extend("         " + line for line in body[1:])
    lines[-1] += "  |^2"
    return "\n".join(lines)
