"""Exact arithmetic in the coefficient ring Z[i][A^(1/2), A^(-1/2)].

All symbolic computations in this package have coefficients in the ring of
Laurent polynomials in a formal square root of a variable A, with Gaussian
integer coefficients.  The ground ring Z[A^(1/2), (-A^2)^(1/2)] embeds here
under the fixed branch choices

    (-1)^(1/2)    ->  i
    (-A^2)^(1/2)  ->  i*A
    (-A^3)^(1/2)  ->  i*A^(3/2)

which is the unique consistent choice once (-1)^(1/2) = i is fixed.

Exponents are stored as plain integers counting half powers: key ``n``
stands for A^(n/2).  Components are Python ints, so nothing ever rounds.
"""

from __future__ import annotations

import re
from typing import Iterator, Mapping


class GaussianInt:
    """A Gaussian integer re + im*i with exact integer components."""

    __slots__ = ("re", "im")

    def __init__(self, re: int = 0, im: int = 0):
        self.re = re
        self.im = im

    def __add__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "GaussianInt":
        return GaussianInt(-self.re, -self.im)

    def __eq__(self, other) -> bool:
        return isinstance(other, GaussianInt) and self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re or self.im)

    def is_unit(self) -> bool:
        """True for 1, -1, i, -i."""
        return (abs(self.re), abs(self.im)) in ((1, 0), (0, 1))

    def inverse_unit(self) -> "GaussianInt":
        if not self.is_unit():
            raise ValueError(f"{self} is not a unit in Z[i]")
        # conjugate of a unit is its inverse
        return GaussianInt(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def __repr__(self):
        return f"GaussianInt({self.re}, {self.im})"

    def __str__(self):
        re, im = self.re, self.im
        if im == 0:
            return str(re)
        if re == 0:
            if im == 1:
                return "i"
            if im == -1:
                return "-i"
            return f"{im}i"
        sign = "+" if im > 0 else "-"
        mag = abs(im)
        istr = "i" if mag == 1 else f"{mag}i"
        return f"{re}{sign}{istr}"


# powers of i, indexed by exponent mod 4
_I_POWERS = (GaussianInt(1, 0), GaussianInt(0, 1), GaussianInt(-1, 0), GaussianInt(0, -1))


class GaussianHalfLaurent:
    """Element of Z[i][A^(1/2), A^(-1/2)] in canonical form (no zero terms).

    ``terms`` maps the half-exponent n (meaning A^(n/2)) to a nonzero
    GaussianInt coefficient.  Instances are treated as immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, GaussianInt] | None = None):
        canon = {}
        if terms:
            for n, c in terms.items():
                if c:
                    canon[n] = c
        self.terms = canon

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "GaussianHalfLaurent":
        return GaussianHalfLaurent()

    @staticmethod
    def one() -> "GaussianHalfLaurent":
        return GaussianHalfLaurent({0: GaussianInt(1, 0)})

    @staticmethod
    def from_int(k: int) -> "GaussianHalfLaurent":
        return GaussianHalfLaurent({0: GaussianInt(k, 0)})

    @staticmethod
    def term(re: int, im: int, half_exp: int) -> "GaussianHalfLaurent":
        return GaussianHalfLaurent({half_exp: GaussianInt(re, im)})

    @staticmethod
    def a_power(half_exp: int) -> "GaussianHalfLaurent":
        """A^(half_exp/2)."""
        return GaussianHalfLaurent({half_exp: GaussianInt(1, 0)})

    @staticmethod
    def from_phase(m: int, half_exp: int = 0) -> "GaussianHalfLaurent":
        """The unit i^m * A^m * A^(half_exp/2), realizing (-A^2)^(m/2) * A^(half_exp/2).

        In particular from_phase(1) = i*A represents (-A^2)^(1/2) and
        from_phase(-1) = -i*A^(-1) its inverse.
        """
        return GaussianHalfLaurent({2 * m + half_exp: _I_POWERS[m % 4]})

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "GaussianHalfLaurent") -> "GaussianHalfLaurent":
        out = dict(self.terms)
        for n, c in other.terms.items():
            s = out.get(n)
            c = c if s is None else s + c
            if c:
                out[n] = c
            elif s is not None:
                del out[n]
        res = GaussianHalfLaurent.__new__(GaussianHalfLaurent)
        res.terms = out
        return res

    def __neg__(self) -> "GaussianHalfLaurent":
        res = GaussianHalfLaurent.__new__(GaussianHalfLaurent)
        res.terms = {n: -c for n, c in self.terms.items()}
        return res

    def __sub__(self, other: "GaussianHalfLaurent") -> "GaussianHalfLaurent":
        return self + (-other)

    def __mul__(self, other: "GaussianHalfLaurent") -> "GaussianHalfLaurent":
        out: dict[int, GaussianInt] = {}
        for n1, c1 in self.terms.items():
            for n2, c2 in other.terms.items():
                n = n1 + n2
                c = c1 * c2
                s = out.get(n)
                c = c if s is None else s + c
                if c:
                    out[n] = c
                elif s is not None:
                    del out[n]
        res = GaussianHalfLaurent.__new__(GaussianHalfLaurent)
        res.terms = out
        return res

    def __eq__(self, other) -> bool:
        return isinstance(other, GaussianHalfLaurent) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((n, c.re, c.im) for n, c in self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_one(self) -> bool:
        return len(self.terms) == 1 and 0 in self.terms and self.terms[0] == GaussianInt(1, 0)

    # -- units -------------------------------------------------------------

    def is_unit_term(self) -> bool:
        """True iff this is u * A^(n/2) with u a unit of Z[i]."""
        if len(self.terms) != 1:
            return False
        (c,) = self.terms.values()
        return c.is_unit()

    def inverse_unit(self) -> "GaussianHalfLaurent":
        """Inverse, defined for single terms with unit Gaussian part."""
        if not self.is_unit_term():
            raise ValueError(f"{self} is not invertible in Z[i][A^(1/2),A^(-1/2)]")
        ((n, c),) = self.terms.items()
        return GaussianHalfLaurent({-n: c.inverse_unit()})

    def div_unit(self, unit: "GaussianHalfLaurent") -> "GaussianHalfLaurent":
        return self * unit.inverse_unit()

    # -- numerics ----------------------------------------------------------

    def eval(self, s: complex) -> complex:
        """Numerical value with A^(1/2) = s.  Exact-to-float happens here and only here."""
        if s == 0:
            raise ZeroDivisionError("A^(1/2) = 0 is outside the Laurent domain")
        return sum((c.to_complex() * s**n for n, c in self.terms.items()), complex(0))

    # -- rendering / parsing -----------------------------------------------

    def _sorted(self) -> Iterator[tuple[int, GaussianInt]]:
        return iter(sorted(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for n, c in self._sorted():
            parts.append(_render_term(n, c))
        out = parts[0]
        for p in parts[1:]:
            if p.startswith("-"):
                out += " - " + p[1:]
            else:
                out += " + " + p
        return out

    def __repr__(self):
        return f"<{self}>"

    @staticmethod
    def parse(text: str) -> "GaussianHalfLaurent":
        return _parse(text)


def _render_pow(n: int) -> str:
    if n == 2:
        return "A"
    if n % 2 == 0:
        return f"A^{n // 2}"
    return f"A^({n}/2)"


def _render_term(n: int, c: GaussianInt) -> str:
    if n == 0:
        s = str(c)
        return f"({s})" if ("+" in s[1:] or "-" in s[1:]) else s
    p = _render_pow(n)
    if c == GaussianInt(1, 0):
        return p
    if c == GaussianInt(-1, 0):
        return "-" + p
    if c == GaussianInt(0, 1):
        return "i*" + p
    if c == GaussianInt(0, -1):
        return "-i*" + p
    s = str(c)
    if "+" in s[1:] or "-" in s[1:]:
        return f"({s})*{p}"
    return f"{s}*{p}"


_TERM_RE = re.compile(
    r"""^
    (?:\((?P<paren>[^()]+)\)|(?P<plain>[0-9]*i?|[0-9]+))          # coefficient
    (?:\s*\*?\s*
        (?:A\^\((?P<half>-?\d+)/2\)|A\^(?P<whole>-?\d+)|(?P<bare>A))
    )?
    $""",
    re.VERBOSE,
)

_GAUSS_RE = re.compile(r"^(?:(?P<re>[+-]?\d+)(?=[+-]|$))?(?:(?P<im>[+-]?\d*)i)?$")


def _parse_gauss(text: str) -> GaussianInt:
    text = text.replace(" ", "")
    m = _GAUSS_RE.match(text)
    if not m or (m.group("re") is None and m.group("im") is None):
        raise ValueError(f"cannot parse Gaussian integer {text!r}")
    re_part = int(m.group("re")) if m.group("re") is not None else 0
    im = m.group("im")
    if im is None:
        im_part = 0
    elif im in ("", "+"):
        im_part = 1
    elif im == "-":
        im_part = -1
    else:
        im_part = int(im)
    return GaussianInt(re_part, im_part)


def _parse(text: str) -> GaussianHalfLaurent:
    text = text.strip()
    if text in ("0", ""):
        return GaussianHalfLaurent.zero()
    # split on top-level +/- (composite coefficients are always parenthesized,
    # so outside parens a sign not following '^' starts a new term)
    terms = []
    depth = 0
    cur = ""
    sign = 1
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur.strip() and not cur.rstrip().endswith("^"):
            terms.append((sign, cur))
            cur = ""
            sign = 1 if ch == "+" else -1
            continue
        cur += ch
    terms.append((sign, cur))

    out = GaussianHalfLaurent.zero()
    for sg, chunk in terms:
        chunk = chunk.strip()
        if not chunk:
            raise ValueError(f"cannot parse {text!r}")
        neg = False
        if chunk.startswith("-"):
            neg = True
            chunk = chunk[1:].strip()
        m = _TERM_RE.match(chunk.replace(" ", ""))
        if not m:
            raise ValueError(f"cannot parse term {chunk!r}")
        coeff_text = m.group("paren") or m.group("plain") or "1"
        if coeff_text == "":
            coeff_text = "1"
        c = _parse_gauss(coeff_text)
        if m.group("half") is not None:
            n = int(m.group("half"))
        elif m.group("whole") is not None:
            n = 2 * int(m.group("whole"))
        elif m.group("bare"):
            n = 2
        else:
            n = 0
        if neg:
            c = -c
        if sg < 0:
            c = -c
        out = out + GaussianHalfLaurent({n: c})
    return out


ZERO = GaussianHalfLaurent.zero()
ONE = GaussianHalfLaurent.one()
