"""Polycyclic (power-commutator) presentations of finite p-groups.

A group of order p^n is given by generators g_0, ..., g_{n-1} with relations

    g_i^p      = w_ii      (word in g_{i+1}, ..., g_{n-1})
    [g_j, g_i] = w_ji      (word in g_{j+1}, ..., g_{n-1}),  j > i

Omitted relations are trivial.  Every element has a unique normal form
g_0^{e_0} * ... * g_{n-1}^{e_{n-1}} with 0 <= e_k < p, represented as a
tuple of ints.  Multiplication is collection from the left with an
explicit letter stack.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

Element = tuple  # tuple[int, ...], length ngens, entries in 0..p-1
Word = tuple     # tuple[tuple[int, int], ...], letters (gen, exp)


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class PcPresentation:
    p: int
    ngens: int
    # only nontrivial relations are stored; keys are 0-based gen indices
    power_rhs: dict = field(default_factory=dict)          # i -> Word
    comm_rhs: dict = field(default_factory=dict)           # (j, i), j > i -> Word
    # gen -> ("pow", i) or ("comm", (j, i)); minimal generators are absent
    definitions: dict = field(default_factory=dict)
    weights: Optional[tuple] = None                        # p-central weights, per gen

    def __post_init__(self):
        if self.p < 2:
            raise PresentationError(f"prime must be >= 2, got {self.p}")
        if self.ngens < 0:
            raise PresentationError("ngens must be >= 0")
        for i, w in self.power_rhs.items():
            if not 0 <= i < self.ngens:
                raise PresentationError(f"power relation for unknown generator {i}")
            self._check_word(w, low=i + 1, ctx=f"g{i + 1}^p")
        for (j, i), w in self.comm_rhs.items():
            if not (0 <= i < j < self.ngens):
                raise PresentationError(f"bad commutator key ({j}, {i})")
            self._check_word(w, low=j + 1, ctx=f"[g{j + 1},g{i + 1}]")

    def _check_word(self, w, low, ctx):
        # triangularity: rhs letters must lie strictly below the relation
        for k, e in w:
            if not low <= k < self.ngens:
                raise PresentationError(f"{ctx}: letter g{k + 1} violates triangularity")
            if not 1 <= e < self.p:
                raise PresentationError(f"{ctx}: exponent {e} out of range")

    @property
    def order(self) -> int:
        return self.p ** self.ngens

    def identity(self) -> Element:
        return (0,) * self.ngens

    def generator(self, i: int) -> Element:
        e = [0] * self.ngens
        e[i] = 1
        return tuple(e)

    def generators(self) -> list:
        return [self.generator(i) for i in range(self.ngens)]

    # -- collection ----------------------------------------------------

    def _collect(self, e: list, stack: list) -> None:
        """Fold the stacked letters (top = leftmost) into the normal prefix e."""
        p, n = self.p, self.ngens
        power_rhs, comm_rhs = self.power_rhs, self.comm_rhs
        while stack:
            i, c = stack.pop()
            if c == 0:
                continue
            if c < 0:
                # g^-1 = g^{p-1} * (g^p)^-1, recursing into higher generators
                stack.append((i, c + 1))
                for k, d in power_rhs.get(i, ()):
                    stack.append((k, -d))
                stack.append((i, p - 1))
                continue
            new = e[i] + c
            noncomm = any(e[k] and comm_rhs.get((k, i))
                          for k in range(i + 1, n))
            if not noncomm and new < p:
                e[i] = new
                continue
            if noncomm:
                # move a single g_i past the suffix, conjugating each letter
                if c > 1:
                    stack.append((i, c - 1))
                tail = []
                for k in range(i + 1, n):
                    if e[k]:
                        rep = [(k, 1)] + list(comm_rhs.get((k, i), ()))
                        tail.extend(rep * e[k])
                        e[k] = 0
                for letter in reversed(tail):
                    stack.append(letter)
                new = e[i] + 1
            if new >= p:
                # carry: g_i^new = g_i^r * w^q, re-collect past any leftover suffix
                tail = []
                for k in range(i + 1, n):
                    if e[k]:
                        tail.append((k, e[k]))
                        e[k] = 0
                q, r = divmod(new, p)
                w = list(self.power_rhs.get(i, ()))
                for letter in reversed(w * q + tail):
                    stack.append(letter)
                e[i] = r
            else:
                e[i] = new

    def collect_word(self, letters: Iterable) -> Element:
        """Normal form of an arbitrary letter sequence (exponents may be any int)."""
        e = [0] * self.ngens
        stack = [(k, c) for k, c in reversed(list(letters))]
        self._collect(e, stack)
        return tuple(e)

    def multiply(self, a: Element, b: Element) -> Element:
        e = list(a)
        stack = [(k, b[k]) for k in range(self.ngens - 1, -1, -1) if b[k]]
        self._collect(e, stack)
        return tuple(e)

    def inverse(self, a: Element) -> Element:
        e = [0] * self.ngens
        stack = [(k, -a[k]) for k in range(self.ngens) if a[k]]
        self._collect(e, stack)
        return tuple(e)

    def power(self, a: Element, m: int) -> Element:
        if m < 0:
            return self.power(self.inverse(a), -m)
        result = self.identity()
        base = a
        while m:
            if m & 1:
                result = self.multiply(result, base)
            base = self.multiply(base, base)
            m >>= 1
        return result

    def conjugate(self, a: Element, b: Element) -> Element:
        """a^b = b^-1 a b."""
        return self.multiply(self.inverse(b), self.multiply(a, b))

    def commutator(self, a: Element, b: Element) -> Element:
        """[a, b] = a^-1 b^-1 a b."""
        return self.multiply(self.inverse(self.multiply(b, a)),
                             self.multiply(a, b))

    def element_order(self, a: Element) -> int:
        m = 1
        x = a
        one = self.identity()
        while x != one:
            x = self.power(x, self.p)
            m *= self.p
        return m

    def elements(self):
        """All p^n normal forms, lexicographic.  Only sensible for small groups."""
        from itertools import product
        for e in product(range(self.p), repeat=self.ngens):
            yield e

    # -- consistency ---------------------------------------------------

    def consistency_failures(self, max_weight: Optional[int] = None) -> list:
        """Overlap ambiguities whose two evaluations disagree.

        Returns [(tag, lhs, rhs), ...].  Empty iff the presentation is
        consistent, i.e. the normal forms really enumerate p^ngens distinct
        elements.  With max_weight set, tests whose generator weights sum
        above the bound are skipped (valid for weighted presentations during
        covering-group computations).
        """
        n, p = self.ngens, self.p
        gens = self.generators()
        wt = self.weights if max_weight is not None else None
        out = []

        def check(tag, x, y):
            if x != y:
                out.append((tag, x, y))

        for k in range(n):
            for j in range(k):
                for i in range(j):
                    if wt and wt[k] + wt[j] + wt[i] > max_weight:
                        continue
                    lhs = self.multiply(gens[k], self.multiply(gens[j], gens[i]))
                    rhs = self.multiply(self.multiply(gens[k], gens[j]), gens[i])
                    check(("assoc", k, j, i), lhs, rhs)
        for j in range(n):
            for i in range(j):
                if wt and wt[j] + wt[i] + 1 > max_weight:
                    continue
                gj, gi = gens[j], gens[i]
                pj = self.collect_word(self.power_rhs.get(j, ()))
                pi = self.collect_word(self.power_rhs.get(i, ()))
                # g_j^p * g_i, the p-th power consumed before vs after the swap
                lhs = self.multiply(pj, gi)
                rhs = self.multiply(self.power(gj, p - 1), self.multiply(gj, gi))
                check(("pow-left", j, i), lhs, rhs)
                lhs = self.multiply(gj, pi)
                rhs = self.multiply(self.multiply(gj, gi), self.power(gi, p - 1))
                check(("pow-right", j, i), lhs, rhs)
        for i in range(n):
            if wt and 2 * wt[i] + 1 > max_weight:
                continue
            pi = self.collect_word(self.power_rhs.get(i, ()))
            check(("pow-comm", i),
                  self.multiply(gens[i], pi), self.multiply(pi, gens[i]))
        return out

    def is_consistent(self) -> bool:
        return not self.consistency_failures()


# -- generator weights and definitions ---------------------------------

def weights_from_definitions(ngens: int, definitions: dict) -> tuple:
    """p-central weight of each generator: 1 for minimal generators,
    w(i)+1 for a power definition, w(j)+w(i) for a commutator definition."""
    w = [0] * ngens
    for k in range(ngens):
        d = definitions.get(k)
        if d is None:
            w[k] = 1
        elif d[0] == "pow":
            w[k] = w[d[1]] + 1
        else:
            j, i = d[1]
            w[k] = w[j] + w[i]
    return tuple(w)


def infer_definitions(P: PcPresentation) -> PcPresentation:
    """Attach definitions to a hand-written presentation.

    Each non-minimal generator must occur as the exact right-hand side of
    some relation; commutator relations are preferred, ties broken by key
    order.  Raises PresentationError when a generator outside the minimal
    ones cannot be pinned to a relation.
    """
    n = P.ngens
    defs = {}
    candidates = {}  # gen -> chosen definition
    for (j, i) in sorted(P.comm_rhs):
        w = P.comm_rhs[(j, i)]
        if len(w) == 1 and w[0][1] == 1:
            candidates.setdefault(w[0][0], ("comm", (j, i)))
    for i in sorted(P.power_rhs):
        w = P.power_rhs[i]
        if len(w) == 1 and w[0][1] == 1:
            candidates.setdefault(w[0][0], ("pow", i))
    # minimal generators: prefix not reachable as any relation value
    defined = set(candidates)
    for k in range(n):
        if k in defined:
            defs[k] = candidates[k]
    # every defined generator's definition must use earlier generators only
    for k, d in defs.items():
        src = d[1] if d[0] == "pow" else max(d[1])
        if src >= k:
            raise PresentationError(f"definition of g{k + 1} not triangular")
    # any generator occurring on a right-hand side is non-minimal and
    # therefore needs a defining relation
    in_rhs = {k for w in list(P.power_rhs.values()) + list(P.comm_rhs.values())
              for k, _ in w}
    missing = sorted(in_rhs - set(defs))
    if missing:
        raise PresentationError(
            "cannot infer definitions for generators "
            + ", ".join(f"g{k + 1}" for k in missing))
    return PcPresentation(
        p=P.p, ngens=n, power_rhs=dict(P.power_rhs), comm_rhs=dict(P.comm_rhs),
        definitions=defs, weights=weights_from_definitions(n, defs))


def minimal_generator_count(P: PcPresentation) -> int:
    return P.ngens - len(P.definitions)


# -- text format -------------------------------------------------------

def format_word(w: Word) -> str:
    if not w:
        return "id"
    parts = []
    for k, e in w:
        parts.append(f"g{k + 1}" if e == 1 else f"g{k + 1}^{e}")
    return "*".join(parts)


def parse_word(s: str, ngens: int, p: int) -> Word:
    s = s.strip()
    if s in ("id", "1", ""):
        return ()
    letters = []
    for tok in s.split("*"):
        tok = tok.strip()
        if "^" in tok:
            gpart, epart = tok.split("^", 1)
            e = int(epart)
        else:
            gpart, e = tok, 1
        if not gpart.startswith("g"):
            raise PresentationError(f"bad letter {tok!r}")
        k = int(gpart[1:]) - 1
        if not 0 <= k < ngens:
            raise PresentationError(f"generator g{k + 1} out of range")
        e %= p
        if e:
            letters.append((k, e))
    return tuple(letters)


def format_pc(P: PcPresentation) -> str:
    lines = [f"p {P.p}", f"ngens {P.ngens}"]
    for i in sorted(P.power_rhs):
        lines.append(f"g{i + 1}^p = {format_word(P.power_rhs[i])}")
    for (j, i) in sorted(P.comm_rhs):
        lines.append(f"[g{j + 1},g{i + 1}] = {format_word(P.comm_rhs[(j, i)])}")
    return "\n".join(lines) + "\n"


def parse_pc(text: str, infer: bool = True) -> PcPresentation:
    """Parse the line-oriented presentation format produced by format_pc.

    Lines: 'p <prime>', 'ngens <n>', 'g<i>^p = <word>', '[g<j>,g<i>] = <word>';
    '#' starts a comment; omitted relations are trivial.
    """
    p = None
    ngens = None
    power_rhs = {}
    comm_rhs = {}
    pending = []  # relation lines, parsed once ngens is known
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("p ") or line == "p":
            p = int(line.split()[1])
        elif line.startswith("ngens"):
            ngens = int(line.split()[1])
        else:
            pending.append(line)
    if p is None or ngens is None:
        raise PresentationError("header must set both 'p' and 'ngens'")
    for line in pending:
        if "=" not in line:
            raise PresentationError(f"cannot parse relation {line!r}")
        lhs, rhs = (part.strip() for part in line.split("=", 1))
        w = parse_word(rhs, ngens, p)
        if lhs.startswith("["):
            inner = lhs.strip("[]")
            a, b = (t.strip() for t in inner.split(","))
            j, i = int(a[1:]) - 1, int(b[1:]) - 1
            if not 0 <= i < j < ngens:
                raise PresentationError(f"bad commutator {lhs!r}")
            if w:
                comm_rhs[(j, i)] = w
        elif lhs.endswith("^p"):
            i = int(lhs[1:-2]) - 1
            if w:
                power_rhs[i] = w
        else:
            raise PresentationError(f"cannot parse relation {line!r}")
    P = PcPresentation(p=p, ngens=ngens, power_rhs=power_rhs, comm_rhs=comm_rhs)
    return infer_definitions(P) if infer else P


# -- stock presentations ----------------------------------------------

def elementary_abelian(p: int, rank: int) -> PcPresentation:
    return PcPresentation(p=p, ngens=rank,
                          weights=(1,) * rank)


def heisenberg(p: int) -> PcPresentation:
    """Extraspecial group of order p^3 and exponent p (p odd)."""
    P = PcPresentation(p=p, ngens=3, comm_rhs={(1, 0): ((2, 1),)})
    return infer_definitions(P)
