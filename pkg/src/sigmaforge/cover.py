"""The p-covering group, multiplicator and nucleus, automorphism lifting,
allowable-subgroup orbits and immediate descendants, and the sigma / Schur
sigma predicates."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Optional

import numpy as np

from . import _linalg
from .homs import Hom, HomError, hom_from_min_images, identity_hom
from .pcgroup import PcPresentation, PresentationError, format_pc, \
    weights_from_definitions
from .structure import (
    Subgroup, full_group, generator_rank, lower_p_central_series,
    quotient_presentation,
)


class BudgetExceeded(RuntimeError):
    pass


# -- the p-covering group ----------------------------------------------

@dataclass
class CoveringData:
    P: PcPresentation            # the original group
    cover: PcPresentation        # G*, consistent, with tail generators last
    nold: int                    # generators of P inside the cover
    tail_relations: tuple        # per kept tail: ("pow", i) or ("comm", (j, i))
    mult_rank: int
    nucleus_rows: np.ndarray     # basis of the nucleus inside the multiplicator
    nuclear_rank: int

    def multiplicator(self) -> Subgroup:
        slots = [None] * self.cover.ngens
        for k in range(self.nold, self.cover.ngens):
            slots[k] = self.cover.generator(k)
        return Subgroup(self.cover, tuple(slots))

    def project(self, x) -> tuple:
        """The canonical projection G* -> G (kill the tails)."""
        return tuple(x[: self.nold])


def _relation_list(P: PcPresentation):
    """All relations in a fixed order: powers by generator, then commutators."""
    rels = [("pow", i) for i in range(P.ngens)]
    rels += [("comm", (j, i)) for j in range(P.ngens) for i in range(j)]
    return rels


def p_covering_group(P: PcPresentation) -> CoveringData:
    """Tails construction: every non-defining relation acquires a central
    tail generator; the weighted consistency test set yields linear
    relations among the tails, which are echelonized away."""
    if P.weights is None:
        raise PresentationError("covering needs a weighted presentation")
    n, p = P.ngens, P.p
    pclass = max(P.weights) if n else 1
    defined_by = set(P.definitions.values())
    rels = []
    for r in _relation_list(P):
        if r in defined_by:
            continue
        if r[0] == "comm":
            j, i = r[1]
            # commutators heavier than the new class are forced trivial;
            # tailing them would break the weighted consistency test set
            if P.weights[j] + P.weights[i] > pclass + 1:
                if P.comm_rhs.get((j, i)):
                    raise PresentationError(
                        "commutator relation heavier than the p-class")
                continue
        rels.append(r)
    t = len(rels)

    def with_tails(tail_words):
        power_rhs = {}
        comm_rhs = {}
        for i in range(n):
            w = tuple(P.power_rhs.get(i, ()))
            if ("pow", i) in tail_words:
                w = w + tail_words[("pow", i)]
            if w:
                power_rhs[i] = w
        for j in range(n):
            for i in range(j):
                w = tuple(P.comm_rhs.get((j, i), ()))
                if ("comm", (j, i)) in tail_words:
                    w = w + tail_words[("comm", (j, i))]
                if w:
                    comm_rhs[(j, i)] = w
        return power_rhs, comm_rhs

    tail_words = {rel: ((n + a, 1),) for a, rel in enumerate(rels)}
    power_rhs, comm_rhs = with_tails(tail_words)
    weights = tuple(P.weights) + (pclass + 1,) * t
    big = PcPresentation(p=p, ngens=n + t, power_rhs=power_rhs,
                         comm_rhs=comm_rhs, definitions=dict(P.definitions),
                         weights=weights)

    # consistency failures are pure tail relations; echelonize them
    rows = []
    for _, lhs, rhs in big.consistency_failures(max_weight=pclass + 2):
        diff = big.multiply(lhs, big.inverse(rhs))
        if any(diff[:n]):
            raise RuntimeError("tail elimination produced a non-central defect")
        rows.append([diff[n + a] for a in range(t)])
    if rows:
        R, pivots = _linalg.rref(np.array(rows, dtype=np.int64), p)
    else:
        R, pivots = np.zeros((0, t), dtype=np.int64), []
    kept = [a for a in range(t) if a not in pivots]
    m = len(kept)
    kept_pos = {a: b for b, a in enumerate(kept)}

    def reduce_tail_vec(vec):
        v = np.array(vec, dtype=np.int64) % p
        for r, c in enumerate(pivots):
            if v[c]:
                v = (v - v[c] * R[r]) % p
        return tuple(((n + kept_pos[a], int(v[a]))) for a in kept if v[a])

    new_tail_words = {}
    for a, rel in enumerate(rels):
        vec = [0] * t
        vec[a] = 1
        w = reduce_tail_vec(vec)
        if w:
            new_tail_words[rel] = w
    power_rhs, comm_rhs = with_tails(new_tail_words)
    defs = dict(P.definitions)
    tail_relations = []
    for a in kept:
        rel = rels[a]
        # a kept tail keeps the unit vector of its own relation, so that
        # relation defines the tail generator
        defs[n + kept_pos[a]] = rel
        tail_relations.append(rel)
    weights = tuple(P.weights) + (pclass + 1,) * m
    cover = PcPresentation(p=p, ngens=n + m, power_rhs=power_rhs,
                           comm_rhs=comm_rhs, definitions=defs,
                           weights=weights)

    # nucleus = the (pclass+1)-st term of the p-central series of the cover
    series = lower_p_central_series(cover)
    if len(series) > pclass:
        nuc = series[pclass]
        nuc_rows = []
        for u in nuc.igs():
            if any(u[:n]):
                raise RuntimeError("nucleus escaped the multiplicator")
            nuc_rows.append([u[n + b] for b in range(m)])
        nucleus_rows = np.array(nuc_rows, dtype=np.int64)
    else:
        nucleus_rows = np.zeros((0, m), dtype=np.int64)
    return CoveringData(P=P, cover=cover, nold=n,
                        tail_relations=tuple(tail_relations),
                        mult_rank=m, nucleus_rows=nucleus_rows,
                        nuclear_rank=nucleus_rows.shape[0])


def relation_rank(P: PcPresentation) -> int:
    """r(G): the rank of the p-multiplicator of a d(G)-generator presentation."""
    return p_covering_group(P).mult_rank


# -- automorphisms -----------------------------------------------------

@dataclass
class AutomorphismGroup:
    P: PcPresentation
    generators: list          # verified Homs P -> P
    order_hint: Optional[int] = None

    def frattini_matrices(self):
        return [g.frattini_matrix() for g in self.generators]


def gl_generators(d: int, p: int):
    """Generator matrices for GL(d, p)."""
    prim = _primitive_root(p)
    gens = []
    D = np.eye(d, dtype=np.int64)
    D[0, 0] = prim
    gens.append(D)
    if d > 1:
        C = np.zeros((d, d), dtype=np.int64)
        for i in range(d - 1):
            C[i + 1, i] = 1
        C[0, d - 1] = (-1) ** (d - 1) % p
        gens.append(C % p)
        T = np.eye(d, dtype=np.int64)
        T[0, 1] = 1
        gens.append(T)
    return gens


def _primitive_root(p: int) -> int:
    for g in range(2, p):
        seen = set()
        x = 1
        for _ in range(p - 1):
            x = x * g % p
            seen.add(x)
        if len(seen) == p - 1:
            return g
    return 1


def matrix_group_order(gens, p) -> int:
    seen = {np.eye(gens[0].shape[0], dtype=np.int64).tobytes()}
    frontier = [np.eye(gens[0].shape[0], dtype=np.int64)]
    while frontier:
        A = frontier.pop()
        for g in gens:
            B = (A @ g) % p
            if B.tobytes() not in seen:
                seen.add(B.tobytes())
                frontier.append(B)
    return len(seen)


_AUT_CACHE: dict = {}


def automorphism_group(P: PcPresentation) -> AutomorphismGroup:
    """Generators of Aut(P), by lifting along the p-central series.

    Elementary abelian groups get the general linear group directly; any
    other group is rebuilt as cover(parent)/U and the stabilizer of U in
    Aut(parent) is lifted, extended by the central automorphisms."""
    key = format_pc(P)
    if key in _AUT_CACHE:
        return _AUT_CACHE[key]
    d = generator_rank(P)
    if len(P.definitions) == 0:
        # elementary abelian
        gens = []
        for A in gl_generators(d, P.p):
            images = [tuple(A[a] % P.p) for a in range(d)]
            gens.append(Hom(src=P, dst=P, images=tuple(images)))
        out = AutomorphismGroup(P=P, generators=gens,
                                order_hint=matrix_group_order(
                                    gl_generators(d, P.p), P.p))
    else:
        out = _lifted_automorphisms(P)
    for g in out.generators:
        if not g.is_automorphism():
            raise RuntimeError("automorphism lifting produced a non-automorphism")
    _AUT_CACHE[key] = out
    return out


def multiplicator_matrix(C: CoveringData, phi: Hom) -> np.ndarray:
    """Induced action of an automorphism of G on the p-multiplicator of its
    cover.  The lift to the cover must be re-extended along the cover's own
    definitions from the minimal images: padding the non-minimal images with
    zero tails silently computes the wrong action."""
    cover, n, m = C.cover, C.nold, C.mult_rank
    d = cover.ngens - len(cover.definitions)
    hat = hom_from_min_images(cover, cover, [
        tuple(phi.images[a]) + (0,) * m for a in range(d)])
    rows = []
    for b in range(m):
        img = hat.images[n + b]
        if any(img[:n]):
            raise RuntimeError("multiplicator action left the multiplicator")
        rows.append(img[n:])
    return np.array(rows, dtype=np.int64) % cover.p


def _identify_allowable(C: CoveringData, G: PcPresentation):
    """Express G as cover(parent)/U: the kernel of the natural projection
    restricted to the multiplicator, as a subspace row basis."""
    d = C.P.ngens - len(C.P.definitions)
    theta = hom_from_min_images(C.cover, G,
                                [G.generator(a) for a in range(d)])
    rows = [theta.images[C.nold + b] for b in range(C.mult_rank)]
    # coordinates must be additive: the tail images land in the last layer,
    # whose generators have trivial power and commutator relations
    for x in rows:
        for k, e in enumerate(x):
            if e and (k in G.power_rhs or
                      any((k2, k) in G.comm_rhs or (k, k2) in G.comm_rhs
                          for k2 in range(G.ngens) if x[k2])):
                raise RuntimeError("tail image coordinates are not linear")
    A = np.array(rows, dtype=np.int64)
    U = _linalg.nullspace(A.T, G.p)   # left kernel: coefficient vectors
    return U, theta


def _lifted_automorphisms(P: PcPresentation) -> AutomorphismGroup:
    from .structure import p_parent
    qm = p_parent(P)
    par = qm.Q
    if qm.surviving != tuple(range(par.ngens)):
        raise RuntimeError("last p-central layer is not the final generators")
    Apar = automorphism_group(par)
    C = p_covering_group(par)
    U, _theta = _identify_allowable(C, P)
    stab = _stabilizer_generators(C, Apar, U)
    d = generator_rank(P)
    gens = []
    for phi in stab:
        lifted_min = [tuple(phi.images[a]) + (0,) * (P.ngens - par.ngens)
                      for a in range(d)]
        psi = hom_from_min_images(P, P, lifted_min)
        gens.append(psi)
    # central automorphisms: twist each minimal generator by the new layer
    s = P.ngens - par.ngens
    for a in range(d):
        for b in range(s):
            images = [P.generator(i) for i in range(d)]
            z = P.generator(par.ngens + b)
            images[a] = P.multiply(images[a], z)
            gens.append(hom_from_min_images(P, P, images))
    return AutomorphismGroup(P=P, generators=gens)


def _stabilizer_generators(C: CoveringData, A: AutomorphismGroup,
                           U: np.ndarray, max_orbit: int = 200000):
    """Schreier generators of the stabilizer of the subspace U under the
    multiplicator action of Aut(parent)."""
    p = C.P.p
    mats = [multiplicator_matrix(C, g) for g in A.generators]
    key0 = _linalg.rref_key(U, p)
    transversal = {key0: (identity_hom(C.P), np.eye(C.mult_rank, dtype=np.int64))}
    space = {key0: U}
    frontier = [key0]
    while frontier:
        k = frontier.pop(0)
        if len(transversal) > max_orbit:
            raise BudgetExceeded("subspace orbit exceeded the stabilizer budget")
        for g, M in zip(A.generators, mats):
            B = (space[k] @ M) % p
            kb = _linalg.rref_key(B, p)
            if kb not in transversal:
                t, tm = transversal[k]
                transversal[kb] = (g.compose(t), (tm @ M) % p)
                space[kb] = B
                frontier.append(kb)
    out = []
    seen_images = set()
    for k in sorted(transversal):
        t, tm = transversal[k]
        for g, M in zip(A.generators, mats):
            img = (space[k] @ M) % p
            kb = _linalg.rref_key(img, p)
            u, um = transversal[kb]
            stab_el = u.inverse().compose(g.compose(t))
            if stab_el.images not in seen_images:
                seen_images.add(stab_el.images)
                out.append(stab_el)
    return out


# -- allowable subgroups and descendants -------------------------------

@dataclass(frozen=True)
class AllowableSubgroup:
    basis: tuple       # RREF rows over F_p, dimension (m - s) x m
    step: int
    orbit_size: int


def enumerate_subspaces(m: int, dim: int, p: int, budget: int = 10 ** 7):
    """All dim-dimensional subspaces of F_p^m as RREF row matrices."""
    count = 0
    for pivots in combinations(range(m), dim):
        free_positions = []
        for r, c in enumerate(pivots):
            for col in range(c + 1, m):
                if col not in pivots:
                    free_positions.append((r, col))
        for values in product(range(p), repeat=len(free_positions)):
            count += 1
            if count > budget:
                raise BudgetExceeded(
                    f"subspace enumeration exceeded budget {budget}")
            B = np.zeros((dim, m), dtype=np.int64)
            for r, c in enumerate(pivots):
                B[r, c] = 1
            for (r, col), v in zip(free_positions, values):
                B[r, col] = v
            yield B


def allowable_orbits(C: CoveringData, A: AutomorphismGroup, s: int,
                     budget: int = 10 ** 7,
                     admit=None) -> list:
    """Orbit representatives of the allowable codimension-s subspaces of the
    multiplicator under Aut, with orbit sizes.  `admit` optionally filters
    whole orbits by their representative (checked once per orbit)."""
    m = C.mult_rank
    if not 1 <= s <= C.nuclear_rank:
        raise ValueError(f"step size {s} outside 1..nu={C.nuclear_rank}")
    p = C.P.p
    mats = [multiplicator_matrix(C, g) for g in A.generators]
    nuc = C.nucleus_rows
    allowed = {}
    for B in enumerate_subspaces(m, m - s, p, budget=budget):
        if _linalg.rank(np.concatenate([B, nuc]) if len(B) else nuc, p) == m:
            allowed[_linalg.rref_key(B, p)] = B
    seen = set()
    orbits = []
    for k in sorted(allowed):
        if k in seen:
            continue
        frontier = [k]
        orbit = {k}
        while frontier:
            cur = frontier.pop()
            for M in mats:
                img = (allowed[cur] @ M) % p
                ki = _linalg.rref_key(img, p)
                if ki not in orbit:
                    if ki not in allowed:
                        raise RuntimeError("orbit left the allowable set")
                    orbit.add(ki)
                    frontier.append(ki)
        seen |= orbit
        rep_key = min(orbit)
        orbits.append((rep_key, allowed[rep_key], len(orbit)))
    orbits.sort(key=lambda t: t[0])
    out = []
    for rep_key, B, size in orbits:
        rep = AllowableSubgroup(basis=tuple(map(tuple, B.tolist())),
                                step=s, orbit_size=size)
        if admit is None or admit(rep):
            out.append(rep)
    return out


def descendant_presentation(C: CoveringData, U: AllowableSubgroup) -> PcPresentation:
    """The quotient cover/U, with the surviving tails as new generators."""
    P, n, m, p = C.P, C.nold, C.mult_rank, C.P.p
    Urows = np.array(U.basis, dtype=np.int64).reshape(-1, m)
    R, pivots = _linalg.rref(Urows, p)
    free = [b for b in range(m) if b not in pivots]
    s = len(free)
    fpos = {b: a for a, b in enumerate(free)}

    def reduce_mod_u(vec):
        v = np.array(vec, dtype=np.int64) % p
        for r, c in enumerate(pivots):
            if v[c]:
                v = (v - v[c] * R[r]) % p
        return tuple((n + fpos[b], int(v[b])) for b in free if v[b])

    def convert(word):
        old = tuple((k, e) for k, e in word if k < n)
        vec = [0] * m
        for k, e in word:
            if k >= n:
                vec[k - n] = e
        return old + reduce_mod_u(vec)

    power_rhs = {}
    comm_rhs = {}
    for i in range(n):
        w = convert(C.cover.power_rhs.get(i, ()))
        if w:
            power_rhs[i] = w
    for j in range(n):
        for i in range(j):
            w = convert(C.cover.comm_rhs.get((j, i), ()))
            if w:
                comm_rhs[(j, i)] = w
    defs = dict(P.definitions)
    pclass = max(P.weights)
    for a, b in enumerate(free):
        defs[n + a] = C.cover.definitions[n + b]
    weights = tuple(P.weights) + (pclass + 1,) * s
    return PcPresentation(p=p, ngens=n + s, power_rhs=power_rhs,
                          comm_rhs=comm_rhs, definitions=defs, weights=weights)


@dataclass
class DescendantInfo:
    presentation: PcPresentation
    step: int
    orbit_size: int
    index: int                # 1-based position among the sorted representatives
    sigma: Optional[bool] = None


def sigma_admitter(C: CoveringData, A: AutomorphismGroup):
    """Predicate on allowable representatives: is the subspace stabilized by
    some automorphism inverting the minimal generators?

    Works entirely with induced matrices: K = automorphisms acting trivially
    on G/Phi(G) (via Schreier generators of the matrix image), psi0 = any
    word mapping to -I; U admits a GI-stabilizer iff psi0^{-1}(U) lies in
    the K-orbit of U."""
    p = C.P.p
    d = generator_rank(C.P)
    fmats = [g.frattini_matrix() % p for g in A.generators]
    mmats = [multiplicator_matrix(C, g) for g in A.generators]
    ident = np.eye(d, dtype=np.int64)
    minus = (-ident) % p
    # BFS over the image in GL(d, p), tracking multiplicator companions
    transversal = {ident.tobytes(): np.eye(C.mult_rank, dtype=np.int64)}
    mats = {ident.tobytes(): ident}
    frontier = [ident.tobytes()]
    kgens = []
    while frontier:
        k = frontier.pop(0)
        F, M = mats[k], transversal[k]
        for Fg, Mg in zip(fmats, mmats):
            F2 = (F @ Fg) % p
            M2 = (M @ Mg) % p
            k2 = F2.tobytes()
            if k2 not in transversal:
                transversal[k2] = M2
                mats[k2] = F2
                frontier.append(k2)
            else:
                # Schreier companion: element with trivial Frattini action
                Minv = _matinv(transversal[k2], p)
                kgens.append((M2 @ Minv) % p)
    if minus.tobytes() not in transversal:
        return lambda rep: False
    Mpsi0 = transversal[minus.tobytes()]

    def admit(rep: AllowableSubgroup) -> bool:
        U = np.array(rep.basis, dtype=np.int64).reshape(-1, C.mult_rank)
        target = _linalg.rref_key((U @ _matinv(Mpsi0, p)) % p, p)
        seen = {_linalg.rref_key(U, p): U}
        frontier = [U]
        while frontier:
            cur = frontier.pop()
            if _linalg.rref_key(cur, p) == target:
                return True
            for Mg in kgens:
                img = (cur @ Mg) % p
                ki = _linalg.rref_key(img, p)
                if ki not in seen:
                    seen[ki] = img
                    frontier.append(img)
        return target in seen

    return admit


def _matinv(M, p):
    out = _linalg.inv(M, p)
    if out is None:
        raise RuntimeError("singular induced matrix")
    return out


def immediate_descendants(P: PcPresentation, s: int, filter: str = "all",
                          budget: int = 10 ** 7) -> list:
    """Quotients of the p-covering group by orbit representatives of the
    allowable codimension-s subspaces.  filter: 'all' or 'sigma_only'."""
    C = p_covering_group(P)
    if s > C.nuclear_rank:
        return []
    A = automorphism_group(P)
    admit = sigma_admitter(C, A) if filter == "sigma_only" else None
    reps = allowable_orbits(C, A, s, budget=budget, admit=None)
    out = []
    for idx, rep in enumerate(reps, start=1):
        if admit is not None and not admit(rep):
            continue
        D = descendant_presentation(C, rep)
        out.append(DescendantInfo(presentation=D, step=s,
                                  orbit_size=rep.orbit_size, index=idx,
                                  sigma=None if admit is None else True))
    return out


# -- sigma and Schur sigma predicates ----------------------------------

def gi_automorphism(P: PcPresentation) -> Optional[Hom]:
    """An automorphism inverting every minimal generator modulo the Frattini
    subgroup, when one exists."""
    A = automorphism_group(P)
    p = P.p
    d = generator_rank(P)
    ident = np.eye(d, dtype=np.int64)
    minus = (-ident) % p
    transversal = {ident.tobytes(): identity_hom(P)}
    mats = {ident.tobytes(): ident}
    frontier = [ident.tobytes()]
    while frontier:
        k = frontier.pop(0)
        F = mats[k]
        for g in A.generators:
            F2 = (F @ g.frattini_matrix()) % p
            k2 = F2.tobytes()
            if k2 not in transversal:
                transversal[k2] = g.compose(transversal[k])
                mats[k2] = F2
                if k2 == minus.tobytes():
                    phi = transversal[k2]
                    if not phi.is_automorphism():
                        raise RuntimeError("GI candidate failed verification")
                    return phi
                frontier.append(k2)
    return None


def is_sigma_group(P: PcPresentation) -> bool:
    return gi_automorphism(P) is not None


@dataclass
class SchurSigmaCertificate:
    ok: bool
    reason: str
    witness: Optional[Hom] = None
    mult_matrix: Optional[np.ndarray] = None


def is_schur_sigma(P: PcPresentation) -> SchurSigmaCertificate:
    """Balanced (d = r) with an automorphism that inverts the generators
    modulo Frattini and acts as -identity on the p-multiplicator."""
    d = generator_rank(P)
    C = p_covering_group(P)
    r = C.mult_rank
    if d != r:
        return SchurSigmaCertificate(ok=False, reason=f"d={d} != r={r}")
    A = automorphism_group(P)
    p = P.p
    minus_f = (-np.eye(d, dtype=np.int64)) % p
    minus_m = (-np.eye(r, dtype=np.int64)) % p
    start = (np.eye(d, dtype=np.int64).tobytes(),
             np.eye(r, dtype=np.int64).tobytes())
    transversal = {start: identity_hom(P)}
    pairs = {start: (np.eye(d, dtype=np.int64), np.eye(r, dtype=np.int64))}
    target = (minus_f.tobytes(), minus_m.tobytes())
    frontier = [start]
    while frontier:
        k = frontier.pop(0)
        F, M = pairs[k]
        for g in A.generators:
            F2 = (F @ g.frattini_matrix()) % p
            M2 = (M @ multiplicator_matrix(C, g)) % p
            k2 = (F2.tobytes(), M2.tobytes())
            if k2 not in transversal:
                transversal[k2] = g.compose(transversal[k])
                pairs[k2] = (F2, M2)
                if k2 == target:
                    phi = transversal[k2]
                    if not phi.is_automorphism():
                        raise RuntimeError("Schur sigma witness failed verification")
                    return SchurSigmaCertificate(
                        ok=True, reason="generator- and relator-inverting",
                        witness=phi, mult_matrix=M2)
                frontier.append(k2)
    return SchurSigmaCertificate(
        ok=False, reason="no generator- and relator-inverting automorphism")
