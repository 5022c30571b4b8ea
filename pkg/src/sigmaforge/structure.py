"""Subgroups, quotients, characteristic series and abelian invariants.

Subgroups are held as induced generating sequences (igs): a triangular
family of normal forms, one per leading depth, each with leading exponent 1.
Sifting against an igs decides membership and expresses elements in the
polycyclic basis of the subgroup.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from .pcgroup import Element, PcPresentation, infer_definitions


@dataclass(frozen=True)
class Subgroup:
    P: PcPresentation
    slots: tuple  # length ngens; Element with leading exponent 1, or None

    @property
    def depths(self) -> tuple:
        return tuple(d for d, s in enumerate(self.slots) if s is not None)

    @property
    def rank(self) -> int:
        return len(self.depths)

    @property
    def order(self) -> int:
        return self.P.p ** self.rank

    def igs(self) -> list:
        return [s for s in self.slots if s is not None]

    def sift(self, x: Element) -> Element:
        """Residue of x after reduction against the igs; identity iff x in H."""
        P = self.P
        one = P.identity()
        while x != one:
            d = _depth(x)
            s = self.slots[d]
            if s is None:
                return x
            x = P.multiply(P.power(s, P.p - x[d]), x)
        return one

    def contains(self, x: Element) -> bool:
        return self.sift(x) == self.P.identity()

    def contains_subgroup(self, other: "Subgroup") -> bool:
        return all(self.contains(u) for u in other.igs())

    def equals(self, other: "Subgroup") -> bool:
        return self.depths == other.depths and self.contains_subgroup(other)

    def decompose(self, x: Element) -> dict:
        """x = prod_d slot_d^{e_d} in increasing depth order; raises on
        elements outside the subgroup."""
        P = self.P
        coeffs = {}
        one = P.identity()
        while x != one:
            d = _depth(x)
            s = self.slots[d]
            if s is None:
                raise ValueError("element lies outside the subgroup")
            coeffs[d] = x[d]
            x = P.multiply(P.power(s, P.p - x[d]), x)
        return coeffs

    def elements(self):
        """All elements; exponential in rank, for small subgroups only."""
        P = self.P
        basis = self.igs()
        for exps in product(range(P.p), repeat=len(basis)):
            x = P.identity()
            for u, e in zip(basis, exps):
                x = P.multiply(x, P.power(u, e))
            yield x

    def is_trivial(self) -> bool:
        return self.rank == 0

    def canonical_key(self) -> tuple:
        """Slots reduced so every slot has zero entries at the other slot
        depths; equal subgroups give equal keys."""
        P = self.P
        slots = list(self.slots)
        for d in range(P.ngens):
            u = slots[d]
            if u is None:
                continue
            changed = True
            while changed:
                changed = False
                for d2 in range(d + 1, P.ngens):
                    if u[d2] and slots[d2] is not None:
                        u = P.multiply(u, P.power(slots[d2], P.p - u[d2]))
                        changed = True
                        break
            slots[d] = u
        return tuple(slots)


def _depth(x: Element) -> int:
    for d, e in enumerate(x):
        if e:
            return d
    raise ValueError("identity has no depth")


def subgroup(P: PcPresentation, gens, conjugate_under=None) -> Subgroup:
    """Closure of gens as a subgroup given by an igs.  With conjugate_under
    set (a list of elements), the closure is also taken under conjugation,
    e.g. the normal closure when the ambient pc generators are passed."""
    slots = [None] * P.ngens
    one = P.identity()

    def sift_in(x) -> bool:
        while x != one:
            d = _depth(x)
            s = slots[d]
            if s is None:
                slots[d] = P.power(x, pow(x[d], -1, P.p))
                return True
            x = P.multiply(P.power(s, P.p - x[d]), x)
        return False

    queue = [tuple(g) for g in gens if tuple(g) != one]
    while queue:
        x = queue.pop()
        if not sift_in(x):
            continue
        current = [s for s in slots if s is not None]
        for u in current:
            for v in current:
                queue.append(P.commutator(u, v))
            queue.append(P.power(u, P.p))
            if conjugate_under:
                for g in conjugate_under:
                    queue.append(P.conjugate(u, g))
    return Subgroup(P, tuple(slots))


def trivial_subgroup(P: PcPresentation) -> Subgroup:
    return Subgroup(P, (None,) * P.ngens)


def full_group(P: PcPresentation) -> Subgroup:
    return Subgroup(P, tuple(P.generators()))


def normal_closure(P: PcPresentation, gens) -> Subgroup:
    return subgroup(P, gens, conjugate_under=P.generators())


def commutator_subgroup(P: PcPresentation, A: Subgroup, B: Subgroup) -> Subgroup:
    gens = [P.commutator(u, v) for u in A.igs() for v in B.igs()]
    return subgroup(P, gens, conjugate_under=P.generators())


def derived_subgroup(P: PcPresentation, H: Optional[Subgroup] = None) -> Subgroup:
    if H is None:
        H = full_group(P)
    gens = [P.commutator(u, v) for u in H.igs() for v in H.igs()]
    return subgroup(P, gens, conjugate_under=H.igs())


def agemo(P: PcPresentation, H: Subgroup) -> Subgroup:
    """Subgroup generated by p-th powers (normal closure inside H)."""
    return subgroup(P, [P.power(u, P.p) for u in H.igs()],
                    conjugate_under=H.igs())


def frattini_subgroup(P: PcPresentation, H: Optional[Subgroup] = None) -> Subgroup:
    """[H,H] H^p; the Frattini subgroup for p-groups."""
    if H is None:
        H = full_group(P)
    gens = [P.commutator(u, v) for u in H.igs() for v in H.igs()]
    gens += [P.power(u, P.p) for u in H.igs()]
    return subgroup(P, gens, conjugate_under=H.igs())


def centre(P: PcPresentation) -> Subgroup:
    """Elements commuting with every generator; found by linear sifting over
    successive centraliser refinements is overkill at our sizes, so filter
    a spanning set directly."""
    gens = P.generators()
    # the centre is the kernel of x -> ([x, g])_g; build by closing the set
    # of candidate elements found depth by depth (small groups only would
    # enumerate; instead sift candidate igs from the centraliser chain)
    members = []
    for d in range(P.ngens - 1, -1, -1):
        # search for a central element with leading depth d modulo the part
        # already found: try all extensions of g_d over deeper central part
        for tail in product(range(P.p), repeat=P.ngens - d - 1):
            e = [0] * P.ngens
            e[d] = 1
            for k, v in enumerate(tail):
                e[d + 1 + k] = v
            x = tuple(e)
            if all(P.commutator(x, g) == P.identity() for g in gens):
                members.append(x)
                break
    return subgroup(P, members)


# -- series and numeric invariants -------------------------------------

def lower_central_series(P: PcPresentation) -> list:
    """[G = G_1, G_2, ...] down to (and excluding) the trivial term."""
    terms = [full_group(P)]
    while not terms[-1].is_trivial():
        nxt = commutator_subgroup(P, terms[-1], full_group(P))
        if nxt.rank == terms[-1].rank:
            raise RuntimeError("lower central series stalled; group not nilpotent?")
        if nxt.is_trivial():
            break
        terms.append(nxt)
    return terms

def derived_series(P: PcPresentation) -> list:
    terms = [full_group(P)]
    while True:
        nxt = derived_subgroup(P, terms[-1])
        if nxt.is_trivial():
            break
        terms.append(nxt)
    return terms


def lower_p_central_series(P: PcPresentation) -> list:
    """lambda_1 = G, lambda_{k+1} = [lambda_k, G] lambda_k^p."""
    terms = [full_group(P)]
    while True:
        H = terms[-1]
        gens = [P.commutator(u, g) for u in H.igs() for g in P.generators()]
        gens += [P.power(u, P.p) for u in H.igs()]
        nxt = subgroup(P, gens, conjugate_under=P.generators())
        if nxt.is_trivial():
            break
        terms.append(nxt)
    return terms


@dataclass(frozen=True)
class GroupInvariants:
    lo: int       # log_p |G|
    c: int        # nilpotency class
    cc: int       # coclass lo - c
    sl: int       # derived (solvable) length
    d: int        # minimal number of generators
    pclass: int   # length of the lower exponent-p central series


def invariants(P: PcPresentation) -> GroupInvariants:
    lo = P.ngens
    if lo == 0:
        return GroupInvariants(0, 0, 0, 0, 0, 0)
    c = len(lower_central_series(P))
    sl = len(derived_series(P))
    d = lo - frattini_subgroup(P).rank
    pclass = len(lower_p_central_series(P))
    return GroupInvariants(lo=lo, c=c, cc=lo - c, sl=sl, d=d, pclass=pclass)


def generator_rank(P: PcPresentation) -> int:
    return P.ngens - frattini_subgroup(P).rank


# -- cosets and quotients ----------------------------------------------

def coset_rep(P: PcPresentation, x: Element, N: Subgroup) -> Element:
    """Canonical representative of x*N: zero entries at every igs depth of N."""
    for d in N.depths:
        a = x[d]
        if a:
            x = P.multiply(x, P.power(N.slots[d], P.p - a))
    # earlier reductions can reintroduce entries at smaller processed depths?
    # no: right-multiplying by an element of leading depth d only changes
    # entries >= d, and depths are processed in increasing order
    return x


@dataclass(frozen=True)
class QuotientMap:
    P: PcPresentation
    N: Subgroup
    Q: PcPresentation
    surviving: tuple      # ambient generator indices that remain

    def project(self, x: Element) -> Element:
        r = coset_rep(self.P, x, self.N)
        return tuple(r[i] for i in self.surviving)

    def lift(self, y: Element) -> Element:
        e = [0] * self.P.ngens
        for pos, i in enumerate(self.surviving):
            e[i] = y[pos]
        return tuple(e)


def quotient_presentation(P: PcPresentation, N: Subgroup) -> QuotientMap:
    """Pc presentation of G/N for a normal subgroup N.

    The quotient generators are the images of the ambient generators whose
    depths carry no igs slot of N; canonical coset representatives supply
    the normal forms directly.
    """
    ndepths = set(N.depths)
    surviving = tuple(i for i in range(P.ngens) if i not in ndepths)
    pos = {i: a for a, i in enumerate(surviving)}

    def to_word(x: Element):
        r = coset_rep(P, x, N)
        return tuple((pos[i], r[i]) for i in surviving if r[i])

    power_rhs = {}
    comm_rhs = {}
    for a, i in enumerate(surviving):
        w = to_word(P.power(P.generator(i), P.p))
        if w:
            power_rhs[a] = w
    for b, j in enumerate(surviving):
        for a, i in enumerate(surviving):
            if i >= j:
                continue
            w = to_word(P.commutator(P.generator(j), P.generator(i)))
            if w:
                comm_rhs[(b, a)] = w
    Q = PcPresentation(p=P.p, ngens=len(surviving),
                       power_rhs=power_rhs, comm_rhs=comm_rhs)
    try:
        Q = infer_definitions(Q)
    except Exception:
        pass
    return QuotientMap(P=P, N=N, Q=Q, surviving=surviving)


def p_parent(P: PcPresentation) -> QuotientMap:
    """Quotient by the last nontrivial term of the exponent-p central series."""
    series = lower_p_central_series(P)
    if len(series) < 2:
        raise ValueError("group is elementary abelian; no parent below it")
    return quotient_presentation(P, series[-1])


# -- abelian quotient invariants ---------------------------------------

def abelian_quotient_partition(P: PcPresentation, H: Optional[Subgroup] = None) -> tuple:
    """Partition (a_1 >= a_2 >= ...) with H/H' = prod Z/p^{a_i}.

    Built from the induced presentation on the igs of H: abelianised power
    and commutator relations give an integer relation matrix whose Smith
    form reads off the invariants.
    """
    if H is None:
        H = full_group(P)
    basis = H.igs()
    m = len(basis)
    if m == 0:
        return ()
    depth_pos = {_depth(u): a for a, u in enumerate(basis)}

    def row_of(x, lead_coeff):
        row = [0] * m
        for d, e in H.decompose(x).items():
            row[depth_pos[d]] -= e
        for a, c in lead_coeff:
            row[a] += c
        return row

    rows = []
    for a, u in enumerate(basis):
        rows.append(row_of(P.power(u, P.p), [(a, P.p)]))
    for b in range(m):
        for a in range(b):
            rows.append(row_of(P.commutator(basis[b], basis[a]), []))
    snf = smith_normal_form(Matrix(rows), domain=ZZ)
    parts = []
    for k in range(min(snf.shape)):
        dk = abs(int(snf[k, k]))
        if dk == 0:
            raise RuntimeError("abelianisation came out infinite")
        if dk > 1:
            e = 0
            while dk % P.p == 0:
                dk //= P.p
                e += 1
            if dk != 1:
                raise RuntimeError("non-p-power invariant factor")
            parts.append(e)
    return tuple(sorted(parts, reverse=True))


def partition_to_str(part) -> str:
    """Compact digit string, e.g. (2,2,2,1) -> '2221'.  Parts above 9 are
    bracketed to stay unambiguous."""
    return "".join(str(a) if a < 10 else f"[{a}]" for a in part)


def parse_partition(s: str) -> tuple:
    """Accepts '2221', repetition as in '(21^4)' (a 2 then four 1s), and
    '[11]1' brackets for parts above 9."""
    s = s.strip()
    parts = []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch in "() ":
            i += 1
            continue
        if ch == "[":
            j = s.index("]", i)
            part, i = int(s[i + 1:j]), j + 1
        elif ch.isdigit():
            part, i = int(ch), i + 1
        else:
            raise ValueError(f"bad partition string {s!r}")
        rep = 1
        if i < len(s) and s[i] == "^":
            j = i + 1
            while j < len(s) and s[j].isdigit():
                j += 1
            rep, i = int(s[i + 1:j]), j
        parts.extend([part] * rep)
    return tuple(sorted(parts, reverse=True))


def maximal_subgroups(P: PcPresentation, H: Optional[Subgroup] = None) -> list:
    """All index-p subgroups of H: preimages of the hyperplanes of H/Phi(H)."""
    if H is None:
        H = full_group(P)
    F = frattini_subgroup(P, H)
    # coordinates of the igs generators on the elementary abelian H/Phi(H)
    basis = []       # igs elements projecting to a basis
    coords = []      # coordinate vector of each igs element
    for u in H.igs():
        vec = _express_mod(P, u, basis, F)
        if vec is None:
            basis.append(u)
            coords.append([0] * (len(basis) - 1) + [1])
        else:
            coords.append(vec)
    r = len(basis)
    coords = [c + [0] * (r - len(c)) for c in coords]
    out = []
    for functional in product(range(P.p), repeat=r):
        lead = next((v for v in functional if v), 0)
        if lead != 1:
            continue
        gens = list(F.igs())
        pivot = None
        for u, c in zip(H.igs(), coords):
            val = sum(f * x for f, x in zip(functional, c)) % P.p
            if val == 0:
                gens.append(u)
            elif pivot is None:
                pivot = (u, val)
            else:
                # u * pivot^{-val/pival} lands in the kernel
                q = (val * pow(pivot[1], -1, P.p)) % P.p
                gens.append(P.multiply(u, P.inverse(P.power(pivot[0], q))))
        out.append(subgroup(P, gens, conjugate_under=H.igs()))
    return out


def _express_mod(P, u, basis, F):
    """Coordinates of u over basis modulo F, or None if independent."""
    for vec in product(range(P.p), repeat=len(basis)):
        x = P.identity()
        for b, e in zip(basis, vec):
            x = P.multiply(x, P.power(b, e))
        if F.contains(P.multiply(P.inverse(x), u)):
            return list(vec)
    return None
