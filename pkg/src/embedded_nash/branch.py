"""Plane branch data and its numerical invariants.

A branch is given by its multiplicity ``nu`` and characteristic exponents
``k_1 < ... < k_g``; the curve is ``x = t**nu, y = phi(t)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .errors import (
    FirstExponentNotAboveMultiplicity,
    GcdChainNotStrictlyDecreasing,
    IndexOutOfRange,
    NonIncreasingExponents,
    TrivialGcdTail,
)


@dataclass(frozen=True)
class PlaneBranch:
    nu: int
    char_exponents: tuple[int, ...]

    @property
    def g(self) -> int:
        return len(self.char_exponents)

    def __str__(self) -> str:
        return f"({self.nu},{list(self.char_exponents)})"


@dataclass(frozen=True)
class DerivedInvariants:
    """Gcd chain and rupture labels of a branch.

    Sequences are stored 1-based in spirit: ``r[0]`` is r_1 = nu and
    ``kappa[0]`` is kappa_1.  ``rupture_N[j]`` is N of the j-th rupture divisor
    with index 0 standing for the axis seed.
    """

    branch: PlaneBranch
    r: tuple[int, ...]
    kappa: tuple[int, ...]
    r_hat: tuple[int, ...]
    kappa_hat: tuple[int, ...]
    rupture_N: tuple[int, ...]
    rupture_nu: tuple[int, ...]

    @property
    def g(self) -> int:
        return self.branch.g

    def r_(self, i: int) -> int:
        """r_i with the 1-based index used in formulas."""
        return self.r[i - 1]

    def k_(self, i: int) -> int:
        return 0 if i == 0 else self.branch.char_exponents[i - 1]

    def kappa_(self, i: int) -> int:
        return self.kappa[i - 1]


@dataclass(frozen=True)
class EuclidTrace:
    c: tuple[int, ...]
    eta: tuple[int, ...]

    @property
    def ell(self) -> int:
        return len(self.eta)

    @property
    def parity(self) -> int:
        return -1 if self.ell % 2 else 1


def validate_branch(nu: int, exps: Sequence[int]) -> PlaneBranch:
    """Check the defining conditions of a plane branch and build it."""
    nu = int(nu)
    exps = tuple(int(k) for k in exps)
    if nu < 1:
        raise FirstExponentNotAboveMultiplicity(f"multiplicity must be positive, got {nu}")
    if not exps:
        if nu != 1:
            raise TrivialGcdTail(f"no characteristic exponents but nu = {nu}")
        return PlaneBranch(1, ())
    if any(b <= a for a, b in zip(exps, exps[1:])) or exps[0] < 1:
        raise NonIncreasingExponents(f"exponents {list(exps)} are not strictly increasing")
    if nu < 2 or exps[0] <= nu:
        raise FirstExponentNotAboveMultiplicity(f"need nu >= 2 and k_1 > nu, got nu={nu}, k_1={exps[0]}")
    r = nu
    for j, k in enumerate(exps, start=1):
        nxt = gcd(k, r)
        if nxt >= r:
            raise GcdChainNotStrictlyDecreasing(f"gcd chain stalls at j={j}: gcd({k},{r}) = {nxt}")
        r = nxt
    if r != 1:
        raise TrivialGcdTail(f"gcd chain ends at {r}, not 1")
    return PlaneBranch(nu, exps)


def derive_invariants(branch: PlaneBranch) -> DerivedInvariants:
    ks = branch.char_exponents
    r = [branch.nu]
    for k in ks:
        r.append(gcd(k, r[-1]))
    kappa = [b - a for a, b in zip((0,) + ks, ks)]
    r_hat = [r[j] // r[j + 1] for j in range(len(ks))]
    kappa_hat = [kappa[j] // r[j + 1] for j in range(len(ks))]
    big_n, small_nu = [0], [1]
    for j in range(len(ks)):
        big_n.append(r_hat[j] * (kappa[j] + big_n[-1]))
        small_nu.append(kappa_hat[j] + r_hat[j] * small_nu[-1])
    return DerivedInvariants(
        branch=branch,
        r=tuple(r),
        kappa=tuple(kappa),
        r_hat=tuple(r_hat),
        kappa_hat=tuple(kappa_hat),
        rupture_N=tuple(big_n),
        rupture_nu=tuple(small_nu),
    )


def euclid_trace(c0: int, c1: int) -> EuclidTrace:
    """Division trace c_{i-1} = eta_i c_i + c_{i+1}.

    ``c0 < c1`` is allowed; the first quotient is then 0.
    """
    if c0 <= 0 or c1 <= 0:
        raise ValueError("euclid_trace needs positive arguments")
    c = [c0, c1]
    eta = []
    while c[-1]:
        q, rem = divmod(c[-2], c[-1])
        eta.append(q)
        c.append(rem)
    return EuclidTrace(tuple(c), tuple(eta))


def approximate_root(branch: PlaneBranch, j: int) -> PlaneBranch:
    """The j-th approximate root C_j, as a branch with j Puiseux pairs."""
    if not 1 <= j <= branch.g:
        raise IndexOutOfRange(f"approximate root index {j} outside 1..{branch.g}")
    d = derive_invariants(branch).r[j]
    return validate_branch(branch.nu // d, [k // d for k in branch.char_exponents[:j]])
