"""Brute-force reference engine used to validate the pc machinery.

Everything here works on explicit multiplication tables and exhaustive
enumeration, deliberately avoiding the collection / echelon code paths in
the package.  Only feasible for small groups (order a few hundred).
"""

from __future__ import annotations

import itertools

import numpy as np


class TableGroup:
    """A finite group as a verified multiplication table on 0..n-1, 0 = id."""

    def __init__(self, table: np.ndarray, verify: bool = True):
        self.table = np.asarray(table, dtype=np.int64)
        self.n = self.table.shape[0]
        if verify:
            self._verify()
        inv = np.full(self.n, -1, dtype=np.int64)
        for a in range(self.n):
            inv[a] = int(np.nonzero(self.table[a] == 0)[0][0])
        self.inv = inv

    def _verify(self):
        T = self.table
        n = self.n
        assert T.shape == (n, n)
        assert np.all(T[0] == np.arange(n)), "0 is not a left identity"
        assert np.all(T[:, 0] == np.arange(n)), "0 is not a right identity"
        for a in range(n):
            assert 0 in T[a], f"element {a} has no right inverse"
        # full associativity check, vectorised one outer element at a time
        cols = np.arange(n)[None, :]
        for a in range(n):
            lhs = T[T[a][:, None], cols]    # (a*b)*c
            rhs = T[a, T]                   # a*(b*c)
            assert np.array_equal(lhs, rhs), f"associativity fails at a={a}"

    @classmethod
    def from_pc(cls, P):
        """Table of all normal forms under the package's collection routine;
        the group axioms are then re-verified exhaustively, so the table is
        trustworthy even if collection were wrong (it would fail loudly)."""
        elems = sorted(P.elements())
        assert elems[0] == P.identity()
        index = {e: i for i, e in enumerate(elems)}
        n = len(elems)
        T = np.zeros((n, n), dtype=np.int64)
        for a, ea in enumerate(elems):
            for b, eb in enumerate(elems):
                T[a, b] = index[P.multiply(ea, eb)]
        g = cls(T)
        g.elems = elems
        g.index = index
        return g

    # -- basic ops -----------------------------------------------------

    def mul(self, a, b):
        return int(self.table[a, b])

    def power(self, a, m):
        x = 0
        for _ in range(m):
            x = self.mul(x, a)
        return x

    def conj(self, a, b):
        return self.mul(self.mul(int(self.inv[b]), a), b)

    def comm(self, a, b):
        return self.mul(int(self.inv[self.mul(b, a)]), self.mul(a, b))

    def element_order(self, a):
        x, m = a, 1
        while x != 0:
            x = self.mul(x, a)
            m += 1
        return m

    # -- subgroups -----------------------------------------------------

    def closure(self, gens) -> frozenset:
        seen = {0}
        frontier = [0]
        gens = list(gens)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return frozenset(seen)

    def derived_subgroup(self, sub=None) -> frozenset:
        xs = sorted(sub) if sub is not None else range(self.n)
        return self.closure(self.comm(a, b) for a in xs for b in xs)

    def center(self, sub=None) -> frozenset:
        xs = sorted(sub) if sub is not None else list(range(self.n))
        return frozenset(a for a in xs
                         if all(self.mul(a, b) == self.mul(b, a) for b in xs))

    def frattini_subgroup(self) -> frozenset:
        gens = [self.comm(a, b) for a in range(self.n) for b in range(self.n)]
        p = self._prime()
        gens += [self.power(a, p) for a in range(self.n)]
        return self.closure(gens)

    def _prime(self) -> int:
        # group order is a prime power
        n = self.n
        for p in (2, 3, 5, 7, 11, 13):
            if n % p == 0:
                return p
        raise ValueError(f"order {n} has no small prime factor")

    def minimal_generators(self) -> list:
        gens = []
        span = self.closure(gens)
        for x in range(self.n):
            if x not in span:
                gens.append(x)
                span = self.closure(gens)
                if len(span) == self.n:
                    return gens
        if len(span) == self.n:
            return gens
        raise AssertionError("generation never completed")

    def maximal_subgroups(self) -> list:
        """All index-p subgroups, as preimages of hyperplanes mod Frattini."""
        p = self._prime()
        F = self.frattini_subgroup()
        Q, proj = self.quotient(F)
        # coordinates on the elementary abelian quotient
        basis = Q.minimal_generators()
        coords = _elementary_abelian_coordinates(Q, basis, p)
        d = len(basis)
        out = []
        for functional in itertools.product(range(p), repeat=d):
            if not any(functional) or _first_nonzero(functional) != 1:
                continue
            kernel = frozenset(
                g for g in range(self.n)
                if sum(f * c for f, c in zip(functional, coords[proj[g]])) % p == 0)
            out.append(kernel)
        return out

    def quotient(self, N):
        """Quotient by a normal subgroup: (TableGroup, projection array)."""
        N = sorted(N)
        coset_id = {}
        reps = []
        proj = np.full(self.n, -1, dtype=np.int64)
        for x in range(self.n):
            if proj[x] >= 0:
                continue
            cid = len(reps)
            reps.append(x)
            for h in N:
                proj[self.mul(x, h)] = cid
        m = len(reps)
        T = np.zeros((m, m), dtype=np.int64)
        for a in range(m):
            for b in range(m):
                T[a, b] = proj[self.mul(reps[a], reps[b])]
        # relabel so that coset of 0 is 0 (it already is: x=0 comes first)
        Q = TableGroup(T)
        Q.reps = reps
        return Q, proj

    def abelian_partition(self, sub=None) -> tuple:
        """Type invariant of the abelianisation of a subgroup: the partition
        (a_1 >= a_2 >= ...) with U/U' = prod Z/p^{a_i}, found by counting
        solutions of x^{p^k} = 1."""
        U = frozenset(sub) if sub is not None else frozenset(range(self.n))
        Uprime = self.derived_subgroup(U)
        sub_table = _subgroup_table(self, sorted(U))
        Q, _ = sub_table.quotient(frozenset(sub_table.index_of[x] for x in sorted(Uprime)))
        p = self._prime()
        parts = []
        prev = 0
        k = 1
        while True:
            cnt = sum(1 for x in range(Q.n) if Q.power(x, p ** k) == 0)
            s = round(np.log(cnt) / np.log(p)) if cnt > 1 else 0
            geq_k = s - prev
            if geq_k == 0:
                break
            parts.append(geq_k)
            prev = s
            k += 1
        # parts[k-1] = number of parts >= k; convert to the partition itself
        partition = []
        for i, cnt_ge in enumerate(parts):
            nxt = parts[i + 1] if i + 1 < len(parts) else 0
            partition.extend([i + 1] * (cnt_ge - nxt))
        return tuple(sorted(partition, reverse=True))

    # -- transfer ------------------------------------------------------

    def transfer(self, U, g):
        """Transfer of g into U/U' for an index-p subgroup U, straight from
        the definition with a right transversal.  Returns the coset of the
        image as a frozenset."""
        U = frozenset(U)
        p = self._prime()
        assert self.n == len(U) * p
        reps = [0]
        covered = set(U)
        for x in range(self.n):
            if x not in covered:
                reps.append(x)
                covered |= {self.mul(u, x) for u in U}
        h_product = 0
        for t in reps:
            tg = self.mul(t, g)
            # find the transversal rep of the coset U*t*g
            for t2 in reps:
                h = self.mul(tg, self.inv[t2])
                if h in U:
                    h_product = self.mul(h_product, h)
                    break
            else:
                raise AssertionError("transversal does not cover U*t*g")
        Uprime = self.derived_subgroup(U)
        return frozenset(self.mul(h_product, x) for x in Uprime)

    def transfer_kernel(self, U) -> frozenset:
        """Elements of G whose transfer into U/U' is trivial."""
        Uprime = self.derived_subgroup(U)
        return frozenset(g for g in range(self.n)
                         if self.transfer(U, g) == frozenset(Uprime))

    # -- automorphisms -------------------------------------------------

    def factorizations(self, gens):
        """Word in gens (list of positions into gens) for every element."""
        words = {0: []}
        frontier = [0]
        while frontier:
            x = frontier.pop(0)
            for pos, g in enumerate(gens):
                y = self.mul(x, g)
                if y not in words:
                    words[y] = words[x] + [pos]
                    frontier.append(y)
        assert len(words) == self.n, "gens do not generate"
        return words

    def automorphisms(self, gens=None) -> list:
        """Every automorphism, as a permutation array, by exhausting images
        of a minimal generating set."""
        if gens is None:
            gens = self.minimal_generators()
        words = self.factorizations(gens)
        T = self.table
        auts = []
        for images in itertools.product(range(self.n), repeat=len(gens)):
            phi = np.zeros(self.n, dtype=np.int64)
            for x, w in words.items():
                y = 0
                for pos in w:
                    y = self.mul(y, images[pos])
                phi[x] = y
            if len(set(phi.tolist())) != self.n:
                continue
            if np.array_equal(phi[T], T[phi[:, None], phi[None, :]]):
                auts.append(phi)
        return auts

    def has_inverting_automorphism(self) -> bool:
        """Is there an automorphism acting as inversion modulo Frattini?"""
        F = self.frattini_subgroup()
        gens = self.minimal_generators()
        for phi in self.automorphisms(gens):
            if all(self.mul(int(phi[g]), g) in F for g in gens):
                return True
        return False


def _subgroup_table(G: TableGroup, elems) -> TableGroup:
    index_of = {x: i for i, x in enumerate(elems)}
    assert elems[0] == 0
    m = len(elems)
    T = np.zeros((m, m), dtype=np.int64)
    for a in range(m):
        for b in range(m):
            T[a, b] = index_of[G.mul(elems[a], elems[b])]
    H = TableGroup(T)
    H.index_of = index_of
    H.elems = list(elems)
    return H


def _first_nonzero(t):
    for x in t:
        if x:
            return x
    return 0


def _elementary_abelian_coordinates(Q: TableGroup, basis, p) -> dict:
    coords = {}
    for vec in itertools.product(range(p), repeat=len(basis)):
        x = 0
        for b, e in zip(basis, vec):
            x = Q.mul(x, Q.power(b, e))
        coords[x] = vec
    assert len(coords) == Q.n, "quotient is not elementary abelian"
    return coords


def isomorphic(A: TableGroup, B: TableGroup) -> bool:
    """Brute-force isomorphism test by exhausting generator images."""
    if A.n != B.n:
        return False
    gens = A.minimal_generators()
    words = A.factorizations(gens)
    orders = sorted(A.element_order(x) for x in range(A.n))
    if orders != sorted(B.element_order(x) for x in range(B.n)):
        return False
    TB = B.table
    for images in itertools.product(range(B.n), repeat=len(gens)):
        phi = np.zeros(A.n, dtype=np.int64)
        for x, w in words.items():
            y = 0
            for pos in w:
                y = B.mul(y, images[pos])
            phi[x] = y
        if len(set(phi.tolist())) != A.n:
            continue
        if np.array_equal(phi[A.table], TB[phi[:, None], phi[None, :]]):
            return True
    return False


def heisenberg_matrix_table(p: int) -> TableGroup:
    """Order-p^3 exponent-p group built from 3x3 unitriangular matrices over
    F_p: a model fully independent of pc collection."""
    mats = []
    for a in range(p):
        for b in range(p):
            for c in range(p):
                m = np.array([[1, a, c], [0, 1, b], [0, 0, 1]], dtype=np.int64)
                mats.append(m)
    # put the identity first
    mats.sort(key=lambda m: (int(m[0, 1]), int(m[1, 2]), int(m[0, 2])))
    key = {m.tobytes(): i for i, m in enumerate(mats)}
    n = len(mats)
    T = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            T[i, j] = key[((mats[i] @ mats[j]) % p).tobytes()]
    return TableGroup(T)


def cocycle_h2_dimension(G: TableGroup, p: int) -> int:
    """dim H^2(G, F_p) with trivial action, from the 2-cocycle identity.

    The coboundary identity for 3-cochains shows that if
    (delta f)(a, b, c) = 0 holds for a in a generating set and all b, c,
    it holds for all a; so only |gens| * n^2 equations are needed.
    """
    n = G.n
    gens = G.minimal_generators()
    var = lambda a, b: a * n + b
    rows = []
    for a in gens:
        for b in range(n):
            ab = G.mul(a, b)
            for c in range(n):
                row = np.zeros(n * n, dtype=np.int64)
                # f(b,c) - f(ab,c) + f(a,bc) - f(a,b) = 0
                row[var(b, c)] += 1
                row[var(ab, c)] -= 1
                row[var(a, G.mul(b, c))] += 1
                row[var(a, b)] -= 1
                rows.append(row % p)
    M = np.array(rows, dtype=np.int64)
    dim_z2 = n * n - _fp_rank(M, p)
    # dim Z^1 = dim Hom(G, F_p) = rank of G modulo Frattini (gens above may
    # be a redundant generating set, so do not use len(gens) here)
    d = round(np.log(n / len(G.frattini_subgroup())) / np.log(p))
    dim_b2 = n - d
    return dim_z2 - dim_b2


def _fp_rank(M: np.ndarray, p: int) -> int:
    R = (M % p).astype(np.int64)
    nrows, ncols = R.shape
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = (R[r] * pow(int(R[r, c]), -1, p)) % p
        col = R[r + 1:, c].copy()
        mask = col != 0
        if mask.any():
            R[r + 1:][mask] = (R[r + 1:][mask] - np.outer(col[mask], R[r])) % p
        r += 1
    return r
