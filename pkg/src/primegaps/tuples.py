"""Admissible shift tuples and the Beatty residue-class construction."""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InsufficientElements, NotMember
from .sequences import BeattySpec, beatty_membership, beatty_window


@dataclass(frozen=True)
class LinearFormTuple:
    """Shifts l_1 < ... < l_k for the forms n + l_i."""

    shifts: tuple[int, ...]
    provenance: dict | None = None

    def __post_init__(self):
        shifts = tuple(int(s) for s in self.shifts)
        if not shifts:
            raise ValueError("tuple needs at least one shift")
        if any(s < 0 for s in shifts):
            raise ValueError("shifts must be nonnegative")
        if sorted(set(shifts)) != list(shifts):
            raise ValueError("shifts must be sorted and distinct")
        object.__setattr__(self, "shifts", shifts)

    @property
    def k(self) -> int:
        return len(self.shifts)


def _primes_upto(k: int) -> list[int]:
    if k < 2:
        return []
    comp = [False] * (k + 1)
    out = []
    for p in range(2, k + 1):
        if not comp[p]:
            out.append(p)
            for m in range(p * p, k + 1, p):
                comp[m] = True
    return out


def primorial(k: int) -> int:
    """Product of all primes <= k (empty product = 1)."""
    w = 1
    for p in _primes_upto(k):
        w *= p
    return w


def is_admissible(t: LinearFormTuple) -> tuple[bool, int | None]:
    """Check admissibility; on failure also return the covering prime.

    Only primes p <= k need checking: k shifts can occupy at most k residue
    classes, so no prime p > k can have all residues covered.
    """
    for p in _primes_upto(t.k):
        if len({l % p for l in t.shifts}) == p:
            return False, p
    return True, None


def diameter(t: LinearFormTuple) -> int:
    """max |l_i - l_j| = l_k - l_1 for sorted shifts."""
    return t.shifts[-1] - t.shifts[0]


def beatty_admissible_tuple(spec: BeattySpec, k: int, search_limit: int = 100_000,
                            workers: int = 1) -> LinearFormTuple:
    """k members of the Beatty set frozen into one residue class mod W.

    W is the primorial of k; members up to search_limit are binned by their
    residue mod W and the k smallest members of the most populous class are
    returned (ties broken toward the smaller residue, for reproducibility).
    The result is re-verified admissible.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if spec.c > Fraction(1, 2):
        raise ValueError("tuple construction requires cutoff c <= 1/2 "
                         "(needed for the closure property)")
    w = beatty_window(spec, 1, search_limit, workers=workers)
    W = primorial(k)
    members = w.terms
    residues = members % W
    best_a, best_count = None, -1
    counts = np.bincount(residues, minlength=W)
    for a in range(W):
        if counts[a] > best_count:
            best_a, best_count = a, int(counts[a])
    if best_count < k:
        raise InsufficientElements(
            f"richest class mod {W} holds {best_count} < {k} members "
            f"within search limit {search_limit}")
    shifts = members[residues == best_a][:k]
    t = LinearFormTuple(tuple(int(s) for s in shifts),
                        provenance={"alpha": spec.alpha.to_text(),
                                    "beta": str(spec.beta), "c": str(spec.c),
                                    "W": W, "residue_class": int(best_a)})
    ok, witness = is_admissible(t)
    if not ok:  # the residue-class construction guarantees this cannot happen
        raise AssertionError(f"constructed tuple not admissible, witness {witness}")
    return t


def closure_check(spec: BeattySpec, t: LinearFormTuple, n: int) -> bool:
    """True iff every n + l_i lands in the full Beatty sequence (c = 1).

    Requires n to be a member of the thinned set; the closure guarantee from
    the residue construction applies to beta = 0 tuples built with c <= 1/2.
    """
    member, _ = beatty_membership(spec, n)
    if not member:
        raise NotMember(f"{n} is not in the Beatty set")
    full = spec.full()
    return all(beatty_membership(full, n + l)[0] for l in t.shifts)
