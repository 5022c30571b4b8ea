"""Artin transfers to the maximal subgroups, transfer kernel types with
their S4 normalization and letter names, and the first/second abelian type
invariants with category classification."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import permutations
from typing import Optional

from .pcgroup import Element, PcPresentation
from .structure import (
    Subgroup, abelian_quotient_partition, coset_rep, derived_subgroup,
    frattini_subgroup, full_group, generator_rank, invariants,
    maximal_subgroups, partition_to_str, quotient_presentation, subgroup,
)


class TransferAnomalyError(RuntimeError):
    """A transfer kernel that is neither total nor one-dimensional."""


def eq1_maximal_subgroups(P: PcPresentation) -> list:
    """The four maximal subgroups in the fixed order U_1 = <x, G'>,
    U_2 = <y, G'>, U_3 = <xy, G'>, U_4 = <xy^2, G'> where x, y are the
    first two pc generators (requires generator rank 2, p = 3)."""
    if P.p != 3:
        raise ValueError("the fixed quartet ordering is specific to p = 3")
    if generator_rank(P) != 2:
        raise ValueError("maximal subgroup quartet needs generator rank 2")
    x, y = P.generator(0), P.generator(1)
    # the subgroups must be maximal, so sit them over the Frattini subgroup
    # (equal to G' whenever G/G' is elementary abelian)
    Phi = frattini_subgroup(P)
    fronts = [[x], [y], [P.multiply(x, y)], [P.multiply(x, P.power(y, 2))]]
    return [subgroup(P, f + Phi.igs()) for f in fronts]


@dataclass
class TransferMap:
    """The transfer homomorphism G -> U/U' for an index-p subgroup U."""
    P: PcPresentation
    U: Subgroup
    Uprime: Subgroup
    t: Element  # transversal generator, t not in U

    def image(self, g: Element) -> Element:
        """Canonical representative mod U' of the transfer of g."""
        P = self.P
        if self.U.contains(g):
            acc = P.identity()
            ti = P.identity()
            for _ in range(P.p):
                acc = P.multiply(acc, P.conjugate(g, P.inverse(ti)))
                ti = P.multiply(ti, self.t)
            val = acc
        else:
            val = P.power(g, P.p)
        if not self.U.contains(val):
            raise TransferAnomalyError("transfer image escaped the subgroup")
        return coset_rep(P, val, self.Uprime)

    def kernel_is_trivial_at(self, g: Element) -> bool:
        return self.image(g) == self.P.identity()


def artin_transfer(P: PcPresentation, U: Subgroup) -> TransferMap:
    if U.order * P.p != P.order:
        raise ValueError("transfer target must have index p")
    Uprime = derived_subgroup(P, U)
    t = next(g for g in P.generators() if not U.contains(g))
    return TransferMap(P=P, U=U, Uprime=Uprime, t=t)


# -- transfer kernel type ----------------------------------------------

@dataclass(frozen=True)
class TransferKernelType:
    quartet: tuple          # raw (κ_1..κ_4) in the Eq.-(1) subgroup order
    canonical: tuple        # lexicographically least S4-orbit member
    label: Optional[str]    # naming-table letter, when attested

    def __str__(self):
        s = "".join(str(k) for k in self.canonical)
        return f"{self.label} ({s})" if self.label else f"({s})"


def _s4_act(kappa: tuple, perm: dict) -> tuple:
    """κ ↦ π⁻¹κπ on positions and nonzero values; 0 stays 0."""
    inv = {v: k for k, v in perm.items()}
    return tuple(
        inv[kappa[perm[i] - 1]] if kappa[perm[i] - 1] else 0
        for i in (1, 2, 3, 4))


def canonical_kappa(kappa: tuple) -> tuple:
    best = None
    for ptuple in permutations((1, 2, 3, 4)):
        perm = {i + 1: ptuple[i] for i in range(4)}
        img = _s4_act(kappa, perm)
        if best is None or img < best:
            best = img
    return best


def kappa_fixed_points(kappa: tuple) -> int:
    return sum(1 for i, k in enumerate(kappa, start=1) if k == i)


def kappa_transpositions(kappa: tuple) -> int:
    return sum(1 for i in range(1, 5) for j in range(i + 1, 5)
               if kappa[i - 1] == j and kappa[j - 1] == i)


@lru_cache(maxsize=1)
def naming_table():
    """canonical quartet -> label, for the attested letter names."""
    raw = json.loads(
        resources.files("sigmaforge.data").joinpath("tkt_names.json").read_text())
    table = {}
    for label, qs in raw["attested"].items():
        q = tuple(int(ch) for ch in qs)
        table[canonical_kappa(q)] = label
    return table


def label_only_names():
    raw = json.loads(
        resources.files("sigmaforge.data").joinpath("tkt_names.json").read_text())
    return list(raw["label_only"])


def transfer_kernel_type(P: PcPresentation) -> TransferKernelType:
    """κ(G) for a two-generated group: κ_i = 0 when ker(T_i) is all of
    G/G', else the index j of the unique U_j/G' containing the kernel
    line.  Anything else raises TransferAnomalyError."""
    Us = eq1_maximal_subgroups(P)
    Gp = derived_subgroup(P)
    qm = quotient_presentation(P, Gp)
    Q = qm.Q
    cosets = [y for y in Q.elements() if y != Q.identity()]
    quartet = []
    for i, U in enumerate(Us):
        T = artin_transfer(P, U)
        kernel = [y for y in cosets if T.kernel_is_trivial_at(qm.lift(y))]
        if len(kernel) == len(cosets):
            quartet.append(0)
            continue
        K = subgroup(P, [qm.lift(y) for y in kernel] + Gp.igs())
        hits = [j + 1 for j, Uj in enumerate(Us) if K.equals(Uj)]
        if len(hits) == 1:
            quartet.append(hits[0])
            continue
        # one-dimensional kernels sit inside a unique maximal subgroup
        if len(kernel) == P.p - 1:
            z = qm.lift(kernel[0])
            hits = [j + 1 for j, Uj in enumerate(Us) if Uj.contains(z)]
            if len(hits) == 1:
                quartet.append(hits[0])
                continue
        raise TransferAnomalyError(
            f"kernel of T_{i + 1} has size {len(kernel) + 1}, neither total "
            "nor a maximal quotient nor one-dimensional")
    quartet = tuple(quartet)
    canon = canonical_kappa(quartet)
    return TransferKernelType(quartet=quartet, canonical=canon,
                              label=naming_table().get(canon))


# -- abelian type invariants -------------------------------------------

def nearly_homocyclic(length: int) -> tuple:
    """N(0)=(), N(1)=(1), N(2j)=(j,j), N(2j+1)=(j+1,j)."""
    if length < 0:
        raise ValueError("length must be nonnegative")
    if length == 0:
        return ()
    j, r = divmod(length, 2)
    if r == 0:
        return (j, j)
    return (j + 1, j) if j else (1,)


@dataclass(frozen=True)
class FirstATI:
    top: tuple      # AQI of G/G'
    four: tuple     # AQI of U_1..U_4 in Eq.-(1) order

    def display(self) -> str:
        inner = ",".join(partition_to_str(q)
                         for q in sorted(self.four, reverse=True))
        return f"[{partition_to_str(self.top)};{inner}]"


def alpha1(P: PcPresentation) -> FirstATI:
    Us = eq1_maximal_subgroups(P)
    top = abelian_quotient_partition(P)
    return FirstATI(top=top,
                    four=tuple(abelian_quotient_partition(P, U) for U in Us))


@dataclass(frozen=True)
class SecondATI:
    top: tuple
    aqis: tuple        # AQI of U_i/U_i', Eq.-(1) order
    com: tuple         # AQI of G', shared across the four entries
    layers: tuple      # per U_i: sorted tuple of (partition, multiplicity)
    pol: tuple         # N(c)
    cpl: tuple         # N(cc+1)

    def display(self) -> str:
        entries = []
        for q, layer in zip(self.aqis, self.layers):
            entries.append(f"({partition_to_str(q)};{partition_to_str(self.com)},"
                           f"{format_layer(layer)})")
        return f"[{partition_to_str(self.top)};{','.join(entries)}]"


def format_layer(layer) -> str:
    parts = []
    for q, mult in layer:
        s = f"({partition_to_str(q)})"
        parts.append(s if mult == 1 else f"{s}^{mult}")
    return ",".join(parts)


def _layer_multiset(P, U, Gp):
    from collections import Counter
    cnt = Counter()
    excluded = 0
    for M in maximal_subgroups(P, U):
        if M.equals(Gp):
            excluded += 1
            continue
        cnt[abelian_quotient_partition(P, M)] += 1
    if excluded != 1:
        raise TransferAnomalyError(
            f"expected the derived subgroup once among the maximal "
            f"subgroups, found it {excluded} times")
    return tuple(sorted(cnt.items(), reverse=True))


def alpha2(P: PcPresentation) -> SecondATI:
    Us = eq1_maximal_subgroups(P)
    top = abelian_quotient_partition(P)
    if top != (1, 1):
        raise ValueError("second type invariants need G/G' of type (1,1)")
    Gp = derived_subgroup(P)
    inv = invariants(P)
    return SecondATI(
        top=top,
        aqis=tuple(abelian_quotient_partition(P, U) for U in Us),
        com=abelian_quotient_partition(P, Gp),
        layers=tuple(_layer_multiset(P, U, Gp) for U in Us),
        pol=nearly_homocyclic(inv.c),
        cpl=nearly_homocyclic(inv.cc + 1),
    )


def classify_category(a: SecondATI) -> int:
    """1 (extreme) if every dodecuplet component has at least 4 parts,
    2 (wild) if some do, 3 (tame) if none do."""
    dodec_entries = []
    for layer in a.layers:
        if sum(m for _, m in layer) == 12:
            dodec_entries.extend(q for q, m in layer for _ in range(m))
    if not dodec_entries:
        raise ValueError("no dodecuplet layers present; category undefined")
    big = [len(q) >= 4 for q in dodec_entries]
    if all(big):
        return 1
    if any(big):
        return 2
    return 3
