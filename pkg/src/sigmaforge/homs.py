"""Generator maps between pc groups, built from images of the minimal
generators and extended along definitions; plus a small stabilizer chain
for computing automorphism group orders exactly."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _linalg
from .pcgroup import Element, PcPresentation


class HomError(ValueError):
    pass


@dataclass(frozen=True)
class Hom:
    src: PcPresentation
    dst: PcPresentation
    images: tuple   # image of every src generator, as dst normal forms

    def apply(self, x: Element) -> Element:
        dst = self.dst
        out = dst.identity()
        for k, e in enumerate(x):
            if e:
                out = dst.multiply(out, dst.power(self.images[k], e))
        return out

    def eval_word(self, word) -> Element:
        dst = self.dst
        out = dst.identity()
        for k, e in word:
            out = dst.multiply(out, dst.power(self.images[k], e))
        return out

    def compose(self, other: "Hom") -> "Hom":
        """self after other."""
        if other.dst is not self.src and other.dst != self.src:
            raise HomError("composition mismatch")
        return Hom(src=other.src, dst=self.dst,
                   images=tuple(self.apply(im) for im in other.images))

    def is_identity(self) -> bool:
        if self.src is not self.dst and self.src != self.dst:
            return False
        return self.images == tuple(self.src.generators())

    def verify(self) -> bool:
        """Check every defining relation (including the omitted trivial ones)."""
        P, dst = self.src, self.dst
        for i in range(P.ngens):
            lhs = dst.power(self.images[i], P.p)
            if lhs != self.eval_word(P.power_rhs.get(i, ())):
                return False
        for j in range(P.ngens):
            for i in range(j):
                lhs = dst.commutator(self.images[j], self.images[i])
                if lhs != self.eval_word(P.comm_rhs.get((j, i), ())):
                    return False
        return True

    def minimal_rank(self) -> int:
        d = self.src.ngens - len(self.src.definitions)
        return d

    def frattini_matrix(self) -> np.ndarray:
        """Induced d x d matrix on the generator quotient G/Phi(G); valid for
        endomorphisms of presentations whose minimal generators come first."""
        d = self.minimal_rank()
        _assert_minimal_prefix(self.src)
        _assert_minimal_prefix(self.dst)
        return np.array([[self.images[a][b] for b in range(d)]
                         for a in range(d)], dtype=np.int64)

    def is_automorphism(self) -> bool:
        if self.src is not self.dst and self.src != self.dst:
            return False
        if not self.verify():
            return False
        return _linalg.inv(self.frattini_matrix(), self.src.p) is not None

    def inverse(self) -> "Hom":
        """Inverse of an automorphism, by running up to its (small) order."""
        prev = identity_hom(self.src)
        cur = self
        for _ in range(100000):
            if cur.is_identity():
                return prev
            prev, cur = cur, self.compose(cur)
        raise HomError("automorphism order exceeds iteration budget")


def identity_hom(P: PcPresentation) -> Hom:
    return Hom(src=P, dst=P, images=tuple(P.generators()))


def _assert_minimal_prefix(P: PcPresentation):
    d = P.ngens - len(P.definitions)
    if set(P.definitions) != set(range(d, P.ngens)):
        raise HomError("presentation must list minimal generators first")


def hom_from_min_images(P: PcPresentation, dst: PcPresentation, min_images) -> Hom:
    """Extend images of the minimal generators along the definitions.

    Every defined generator g_k must appear in its defining relation as a
    single letter g_k^1 preceded only by known (smaller-index) letters."""
    _assert_minimal_prefix(P)
    n = P.ngens
    images = [None] * n
    it = iter(min_images)
    for k in range(n):
        dfn = P.definitions.get(k)
        if dfn is None:
            images[k] = tuple(next(it))
            continue
        if dfn[0] == "pow":
            i = dfn[1]
            rhs = P.power_rhs[i]
            val = dst.power(images[i], P.p)
        else:
            j, i = dfn[1]
            rhs = P.comm_rhs[(j, i)]
            val = dst.commutator(images[j], images[i])
        try:
            pos = rhs.index((k, 1))
        except ValueError:
            raise HomError(f"defining relation of g{k + 1} lacks a bare letter")
        prefix, suffix = rhs[:pos], rhs[pos + 1:]
        for kk, _ in prefix + suffix:
            if images[kk] is None:
                raise HomError(f"definition of g{k + 1} uses undetermined g{kk + 1}")
        pre = Hom(src=P, dst=dst, images=tuple(
            im if im is not None else dst.identity() for im in images))
        pre_val = pre.eval_word(prefix)
        suf_val = pre.eval_word(suffix)
        images[k] = dst.multiply(
            dst.multiply(dst.inverse(pre_val), val), dst.inverse(suf_val))
    return Hom(src=P, dst=dst, images=tuple(images))


# -- stabilizer chain over the minimal generators ----------------------

class AutChain:
    """Schreier-style chain for a group of verified automorphisms.

    The base is the sequence of minimal generators as group elements: an
    automorphism fixing all of them is the identity, so two levels already
    determine the order for two-generated groups.
    """

    def __init__(self, P: PcPresentation, gens):
        self.P = P
        d = P.ngens - len(P.definitions)
        self.base = [P.generator(i) for i in range(d)]
        self.gens = list(gens)
        self.levels = []
        self._build()

    def _orbit(self, point, gens):
        transversal = {point: identity_hom(self.P)}
        frontier = [point]
        while frontier:
            x = frontier.pop(0)
            for g in gens:
                y = g.apply(x)
                if y not in transversal:
                    transversal[y] = g.compose(transversal[x])
                    frontier.append(y)
        return transversal

    def _build(self):
        gens = self.gens
        self.levels = []
        for lvl, b in enumerate(self.base):
            transversal = self._orbit(b, gens)
            self.levels.append((b, transversal))
            # Schreier generators that genuinely extend the next orbits
            if lvl == len(self.base) - 1:
                break
            nxt = []
            seen_points = None
            for x, t in sorted(transversal.items()):
                for g in gens:
                    s = g.compose(t)
                    u = transversal[s.apply(b)]
                    stab_el = u.inverse().compose(s)
                    # keep it only if it moves a later base point to a new spot
                    if seen_points is None:
                        nxt.append(stab_el)
                        seen_points = self._reachable(self.base[lvl + 1:], nxt)
                    else:
                        img = tuple(stab_el.apply(p) for p in self.base[lvl + 1:])
                        if img not in seen_points:
                            nxt.append(stab_el)
                            seen_points = self._reachable(self.base[lvl + 1:], nxt)
            gens = nxt

    def _reachable(self, points, gens):
        """Orbit of the tuple of remaining base points under gens."""
        start = tuple(points)
        seen = {start}
        frontier = [start]
        while frontier:
            xs = frontier.pop(0)
            for g in gens:
                ys = tuple(g.apply(x) for x in xs)
                if ys not in seen:
                    seen.add(ys)
                    frontier.append(ys)
        return seen

    def order(self) -> int:
        out = 1
        for _, transversal in self.levels:
            out *= len(transversal)
        return out

    def contains(self, phi: Hom) -> bool:
        cur = phi
        for b, transversal in self.levels:
            y = cur.apply(b)
            if y not in transversal:
                return False
            cur = transversal[y].inverse().compose(cur)
        return cur.is_identity()
