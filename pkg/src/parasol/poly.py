"""Laurent polynomials over the protocol scalar field.

Coefficients live in F_r (r the BLS12-381 group order) and exponents may be
negative. The representation is a sparse exponent-to-coefficient dict with no
zero entries, so the zero polynomial is the empty map.
"""

from __future__ import annotations

from .curve import R, fr, fr_inv
from .errors import EvaluationError


class Laurent:
    """Immutable-by-convention sparse Laurent polynomial."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        clean = {}
        if coeffs:
            for e, c in coeffs.items():
                c = c % R
                if c:
                    clean[int(e)] = c
        self.coeffs = clean

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def monomial(cls, exponent, coefficient=1):
        return cls({exponent: coefficient})

    def is_zero(self):
        return not self.coeffs

    @property
    def min_degree(self):
        return min(self.coeffs) if self.coeffs else 0

    @property
    def max_degree(self):
        return max(self.coeffs) if self.coeffs else 0

    def __getitem__(self, exponent):
        return self.coeffs.get(exponent, 0)

    def __eq__(self, other):
        return isinstance(other, Laurent) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "Laurent(0)"
        terms = ", ".join(f"{e}: {c}" for e, c in sorted(self.coeffs.items()))
        return f"Laurent({{{terms}}})"

    def __add__(self, other):
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            nc = (out.get(e, 0) + c) % R
            if nc:
                out[e] = nc
            else:
                out.pop(e, None)
        result = Laurent.__new__(Laurent)
        result.coeffs = out
        return result

    def __sub__(self, other):
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            nc = (out.get(e, 0) - c) % R
            if nc:
                out[e] = nc
            else:
                out.pop(e, None)
        result = Laurent.__new__(Laurent)
        result.coeffs = out
        return result

    def __neg__(self):
        result = Laurent.__new__(Laurent)
        result.coeffs = {e: R - c for e, c in self.coeffs.items()}
        return result

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                nc = (out.get(e, 0) + c1 * c2) % R
                if nc:
                    out[e] = nc
                else:
                    out.pop(e, None)
        result = Laurent.__new__(Laurent)
        result.coeffs = out
        return result

    __rmul__ = __mul__

    def scale(self, k):
        k = fr(k)
        if k == 0:
            return Laurent()
        result = Laurent.__new__(Laurent)
        result.coeffs = {e: c * k % R for e, c in self.coeffs.items()}
        return result

    def shift(self, offset):
        """Multiply by X**offset."""
        result = Laurent.__new__(Laurent)
        result.coeffs = {e + offset: c for e, c in self.coeffs.items()}
        return result

    def scale_exponents(self, y):
        """Substitute X -> X*y: coefficient at X**e picks up a factor y**e."""
        y = fr(y)
        if y == 0:
            raise EvaluationError("exponent scaling requires a nonzero factor")
        yinv = fr_inv(y)
        out = {}
        for e, c in self.coeffs.items():
            factor = pow(y, e, R) if e >= 0 else pow(yinv, -e, R)
            out[e] = c * factor % R
        return Laurent(out)

    def evaluate(self, z):
        """Value at a nonzero field point."""
        z = fr(z)
        if z == 0:
            raise EvaluationError("Laurent polynomial undefined at zero")
        if not self.coeffs:
            return 0
        zinv = fr_inv(z)
        total = 0
        for e, c in self.coeffs.items():
            factor = pow(z, e, R) if e >= 0 else pow(zinv, -e, R)
            total += c * factor
        return total % R

    def divide_linear(self, z):
        """Quotient q with self(X) - self(z) == q(X) * (X - z).

        The quotient spans exponents [min_degree, max_degree - 1]; division is
        exact by construction.
        """
        z = fr(z)
        if z == 0:
            raise EvaluationError("cannot open a Laurent polynomial at zero")
        if not self.coeffs:
            return Laurent()
        value = self.evaluate(z)
        lo = min(self.min_degree, 0)
        hi = max(self.max_degree, 0)
        # Ordinary coefficient array of (self - value) * X^(-lo).
        arr = [0] * (hi - lo + 1)
        for e, c in self.coeffs.items():
            arr[e - lo] = c
        arr[-lo] = (arr[-lo] - value) % R
        # Synthetic division by the root z, top down; remainder is zero.
        quotient = [0] * (len(arr) - 1)
        carry = 0
        for i in range(len(arr) - 1, 0, -1):
            carry = (arr[i] + carry * z) % R
            quotient[i - 1] = carry
        return Laurent({i + lo: c for i, c in enumerate(quotient)})
