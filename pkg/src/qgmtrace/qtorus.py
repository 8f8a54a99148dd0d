"""Noncommutative Laurent polynomials over a quantum torus.

A quantum torus here is generated by x_1, ..., x_n subject to

    x_i x_j = A^(<e_i, e_j>) x_j x_i

for an antisymmetric integer form <,>.  Elements are stored in normal
order (ascending generator index); a term is an exponent vector together
with a coefficient in Z[i][A^(1/2), A^(-1/2)].

The Weyl-ordered monomial [x^u] = A^(-(1/2) sum_{i<j} u_i u_j <e_i,e_j>) x^u
is independent of how a product is ordered; ``weyl`` below extends it from
words of distinct generators to arbitrary exponent vectors by the same
bilinear formula.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .scalar import GaussianHalfLaurent, ONE

ExpVec = tuple[int, ...]


class CommutationForm:
    """Antisymmetric integer pairing on a fixed generator set."""

    def __init__(self, form: Sequence[Sequence[int]]):
        n = len(form)
        for i in range(n):
            if len(form[i]) != n:
                raise ValueError("commutation form must be square")
            if form[i][i] != 0:
                raise ValueError("commutation form must vanish on the diagonal")
            for j in range(n):
                if form[i][j] != -form[j][i]:
                    raise ValueError("commutation form must be antisymmetric")
        self.n = n
        self.form = tuple(tuple(row) for row in form)
        # sparse adjacency: list of (j, <e_i,e_j>) per generator
        self._nonzero = tuple(
            tuple((j, v) for j, v in enumerate(row) if v) for row in self.form
        )

    def pairing(self, u: Sequence[int], v: Sequence[int]) -> int:
        """Bilinear extension sum u_i v_j <e_i, e_j>."""
        total = 0
        for i, ui in enumerate(u):
            if ui:
                for j, w in self._nonzero[i]:
                    vj = v[j]
                    if vj:
                        total += ui * vj * w
        return total

    def reorder_exponent(self, u: Sequence[int], v: Sequence[int]) -> int:
        """A-exponent picked up when normal-ordering x^u * x^v.

        Equals sum over i > j of u_i v_j <e_i, e_j>: the cost of moving the
        factors of x^v left past the higher-index factors of x^u.
        """
        total = 0
        for i, ui in enumerate(u):
            if ui:
                for j, w in self._nonzero[i]:
                    if j < i and v[j]:
                        total += ui * v[j] * w
        return total

    def weyl_half_exponent(self, u: Sequence[int]) -> int:
        """Half-exponent of the Weyl prefactor A^(-(1/2) sum_{i<j} u_i u_j <e_i,e_j>)."""
        total = 0
        for i, ui in enumerate(u):
            if ui:
                for j, w in self._nonzero[i]:
                    if j > i and u[j]:
                        total += ui * u[j] * w
        return -total

    def __eq__(self, other):
        return isinstance(other, CommutationForm) and self.form == other.form

    def __repr__(self):
        return f"CommutationForm(n={self.n})"


class TorusElement:
    """Finite sum of normal-ordered monomials over a fixed CommutationForm."""

    __slots__ = ("formobj", "terms")

    def __init__(self, formobj: CommutationForm, terms: Mapping[ExpVec, GaussianHalfLaurent] | None = None):
        self.formobj = formobj
        canon: dict[ExpVec, GaussianHalfLaurent] = {}
        if terms:
            for u, c in terms.items():
                if c:
                    if len(u) != formobj.n:
                        raise ValueError("exponent vector length does not match generator count")
                    canon[tuple(u)] = c
        self.terms = canon

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(formobj: CommutationForm) -> "TorusElement":
        return TorusElement(formobj)

    @staticmethod
    def one(formobj: CommutationForm) -> "TorusElement":
        return TorusElement(formobj, {(0,) * formobj.n: ONE})

    @staticmethod
    def scalar(formobj: CommutationForm, c: GaussianHalfLaurent) -> "TorusElement":
        return TorusElement(formobj, {(0,) * formobj.n: c})

    @staticmethod
    def monomial(formobj: CommutationForm, u: Sequence[int], coeff: GaussianHalfLaurent = ONE) -> "TorusElement":
        return TorusElement(formobj, {tuple(u): coeff})

    @staticmethod
    def generator(formobj: CommutationForm, i: int, power: int = 1) -> "TorusElement":
        u = [0] * formobj.n
        u[i] = power
        return TorusElement(formobj, {tuple(u): ONE})

    def _new(self, terms: dict[ExpVec, GaussianHalfLaurent]) -> "TorusElement":
        res = TorusElement.__new__(TorusElement)
        res.formobj = self.formobj
        res.terms = terms
        return res

    # -- module structure ----------------------------------------------------

    def __add__(self, other: "TorusElement") -> "TorusElement":
        self._check(other)
        out = dict(self.terms)
        for u, c in other.terms.items():
            s = out.get(u)
            c = c if s is None else s + c
            if c:
                out[u] = c
            elif s is not None:
                del out[u]
        return self._new(out)

    def __neg__(self) -> "TorusElement":
        return self._new({u: -c for u, c in self.terms.items()})

    def __sub__(self, other: "TorusElement") -> "TorusElement":
        return self + (-other)

    def scale(self, c: GaussianHalfLaurent) -> "TorusElement":
        out = {}
        for u, c0 in self.terms.items():
            c1 = c0 * c
            if c1:
                out[u] = c1
        return self._new(out)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TorusElement)
            and self.formobj.form == other.formobj.form
            and self.terms == other.terms
        )

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _check(self, other: "TorusElement"):
        if self.formobj.form != other.formobj.form:
            raise ValueError("elements live over different quantum tori")

    # -- multiplication ------------------------------------------------------

    def __mul__(self, other: "TorusElement") -> "TorusElement":
        self._check(other)
        F = self.formobj
        out: dict[ExpVec, GaussianHalfLaurent] = {}
        for u, cu in self.terms.items():
            for v, cv in other.terms.items():
                w = tuple(a + b for a, b in zip(u, v))
                c = cu * cv * GaussianHalfLaurent.a_power(2 * F.reorder_exponent(u, v))
                s = out.get(w)
                c = c if s is None else s + c
                if c:
                    out[w] = c
                elif s is not None:
                    del out[w]
        return self._new(out)

    def monomial_inverse(self) -> "TorusElement":
        """Inverse of a single-term element with unit coefficient."""
        if len(self.terms) != 1:
            raise ValueError("only monomials are invertible")
        ((u, c),) = self.terms.items()
        F = self.formobj
        v = tuple(-a for a in u)
        # x^u * (A^k x^-u) = 1 requires k = -reorder_exponent(u, -u)
        phase = GaussianHalfLaurent.a_power(-2 * F.reorder_exponent(u, v))
        return self._new({v: c.inverse_unit() * phase})

    def monomial_pow(self, k: int) -> "TorusElement":
        """Exact k-th power of a monomial, including the accumulated A-phase."""
        if len(self.terms) != 1:
            raise ValueError("only monomials have closed-form powers")
        if k == 0:
            return TorusElement.one(self.formobj)
        base = self if k > 0 else self.monomial_inverse()
        out = base
        for _ in range(abs(k) - 1):
            out = out * base
        return out

    # -- Weyl ordering -------------------------------------------------------

    def weyl_normalized(self) -> "TorusElement":
        """Apply the Weyl prefactor to every term (used for bracket construction)."""
        F = self.formobj
        out = {}
        for u, c in self.terms.items():
            out[u] = c * GaussianHalfLaurent.a_power(F.weyl_half_exponent(u))
        return self._new(out)

    # -- evaluation ----------------------------------------------------------

    def specialize(self, assignment: Sequence[complex], s: complex) -> complex:
        """Evaluate numerically with generator i set to assignment[i] and A^(1/2) = s.

        Monomials are evaluated in normal order; for s^2 != 1 the value is
        order-convention dependent, which callers must acknowledge.
        """
        if len(assignment) != self.formobj.n:
            raise ValueError("assignment must cover every generator")
        total = complex(0)
        for u, c in self.terms.items():
            val = c.eval(s)
            for x, e in zip(assignment, u):
                if e:
                    val *= x**e
            total += val
        return total

    # -- rendering -----------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (sum(map(abs, t[0])), t[0]))

    def render(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"g{i}" for i in range(self.formobj.n)]
        parts = []
        for u, c in self.sorted_terms():
            gens = " ".join(
                f"{names[i]}^{e}" if e != 1 else names[i] for i, e in enumerate(u) if e
            )
            cs = str(c)
            if not gens:
                parts.append(f"({cs})" if " " in cs else cs)
            elif c == ONE:
                parts.append(gens)
            else:
                parts.append(f"({cs}) * {gens}" if " " in cs else f"{cs} * {gens}")
        out = parts[0]
        for p in parts[1:]:
            if p.startswith("-"):
                out += " - " + p[1:]
            else:
                out += " + " + p
        return out

    def __repr__(self):
        return f"<TorusElement {self.render()}>"


def weyl(formobj: CommutationForm, u: Sequence[int], coeff: GaussianHalfLaurent = ONE) -> TorusElement:
    """The Weyl-ordered monomial coeff * [x^u]."""
    c = coeff * GaussianHalfLaurent.a_power(formobj.weyl_half_exponent(u))
    return TorusElement(formobj, {tuple(u): c})


def weyl_word(formobj: CommutationForm, word: Iterable[tuple[int, int]]) -> TorusElement:
    """Weyl-ordered product of a word [(generator, exponent), ...].

    Each letter contributes exponent * e_gen; the result only depends on the
    multiset of letters, never on their order.
    """
    letters = [(g, e) for g, e in word]
    half = 0
    for a in range(len(letters)):
        ga, ea = letters[a]
        for b in range(a + 1, len(letters)):
            gb, eb = letters[b]
            half += ea * eb * formobj.form[ga][gb]
    prod = TorusElement.one(formobj)
    for g, e in letters:
        prod = prod * TorusElement.generator(formobj, g, e)
    return prod.scale(GaussianHalfLaurent.a_power(-half))
