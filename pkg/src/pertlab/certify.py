"""Certification statuses and stabilization helpers.

Every integer invariant read off a truncated model carries a status:

* ``exact``: backed by a Nakayama certificate (the target ideal provably
  contains a power of the maximal ideal below the truncation order, so the
  model computes the true value).
* ``two-level-stable``: the value agrees between truncation levels D and
  D + delta.  Honest and falsifiable, but a heuristic.
* ``uncertified``: neither applies; the raw value is reported with a note.

For quantities not covered by the exactness rule (Koszul homology lengths,
colons into non-primary ideals) the raw quotient over the truncated ring is
polluted by classes supported near the truncation boundary.  Those are shed
by profiling the invariant along the order filtration and reading the value
off the widest plateau; two-level agreement of plateau values is then the
certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

EXACT = "exact"
TWO_LEVEL = "two-level-stable"
UNCERTIFIED = "uncertified"

#: Minimum plateau width for a profile value to count as resolved.
PLATEAU_MIN_WIDTH = 3


@dataclass(frozen=True)
class CertifiedValue:
    """An integer invariant with its certification status.

    ``value`` is None when the quantity could not be established (e.g. a
    length that is not provably finite at this truncation); ``note`` then
    says why.
    """

    value: int | None
    status: str
    levels: tuple[int, ...] = ()
    note: str = ""

    def is_certified(self) -> bool:
        return self.status in (EXACT, TWO_LEVEL) and self.value is not None

    def render(self) -> str:
        base = "not-finite" if self.value is None else str(self.value)
        return f"{base} [{self.status}]" + (f" ({self.note})" if self.note else "")


def longest_plateau(profile: Sequence[int | None]) -> tuple[int | None, int]:
    """Value and width of the longest constant run of a filtration profile.

    The final entry is the raw truncated value (no filtration window left)
    and is excluded from the search.  Ties break toward the latest run, the
    one farthest from low-order noise.
    """
    seq = list(profile[:-1]) if len(profile) > 1 else list(profile)
    best_val: int | None = None
    best_len = 0
    i = 0
    while i < len(seq):
        j = i
        while j < len(seq) and seq[j] == seq[i]:
            j += 1
        if j - i >= best_len:
            best_val, best_len = seq[i], j - i
        i = j
    return best_val, best_len


def combine_levels(value_lo: int | None, value_hi: int | None,
                   levels: tuple[int, int],
                   lo_resolved: bool = True, hi_resolved: bool = True,
                   note: str = "") -> CertifiedValue:
    """Merge the same invariant computed at two truncation levels."""
    if levels[0] == levels[1]:
        return CertifiedValue(value_lo, TWO_LEVEL, levels,
                              note="degenerate delta=0; weak certificate")
    if lo_resolved and hi_resolved and value_lo == value_hi:
        return CertifiedValue(value_lo, TWO_LEVEL, levels, note=note)
    detail = f"levels {levels[0]}/{levels[1]} gave {value_lo}/{value_hi}"
    if note:
        detail = f"{note}; {detail}"
    return CertifiedValue(value_lo, UNCERTIFIED, levels, note=detail)
