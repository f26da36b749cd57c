"""Extension-field tower for BLS12-381.

Layout: Fq2 = Fq[u]/(u^2+1), Fq6 = Fq2[v]/(v^3 - (u+1)), Fq12 = Fq6[w]/(w^2 - v).

Elements are plain tuples of gmpy2 mpz values (Fq2 a pair, Fq6 a triple of
pairs, Fq12 a pair of triples) and the operations are free functions. That is
deliberate: the pairing loop performs a few hundred thousand base-field
multiplications per call and attribute dispatch on wrapper classes costs more
than the arithmetic itself.
"""

from gmpy2 import mpz, invert

# Base field modulus of BLS12-381.
P = mpz(0x1A0111EA397FE69A4B1BA7B6434BACD764774B84F38512BF6730D2A0F6B0F6241EABFFFEB153FFFFB9FEFFFFFFFFAAAB)

ZERO = mpz(0)
ONE = mpz(1)

FQ2_ZERO = (ZERO, ZERO)
FQ2_ONE = (ONE, ZERO)
FQ6_ZERO = (FQ2_ZERO, FQ2_ZERO, FQ2_ZERO)
FQ6_ONE = (FQ2_ONE, FQ2_ZERO, FQ2_ZERO)
FQ12_ZERO = (FQ6_ZERO, FQ6_ZERO)
FQ12_ONE = (FQ6_ONE, FQ6_ZERO)

# Nonresidue used by the tower: v^3 = xi = u + 1.
XI = (ONE, ONE)


def fq(x):
    """Canonical base-field element from any integer."""
    return mpz(x) % P


def fq_inv(a):
    return invert(a, P)


def fq_sqrt(a):
    """Square root in Fq, or None. Uses p % 4 == 3."""
    a = a % P
    if a == 0:
        return ZERO
    s = pow(a, (P + 1) >> 2, P)
    return s if s * s % P == a else None


def fq_sign(a):
    """Lexicographic sign used by compressed encodings: 1 if a > (p-1)/2."""
    return 1 if a > (P - 1) >> 1 else 0


# ---------------------------------------------------------------------------
# Fq2


def fq2(c0, c1=0):
    return (mpz(c0) % P, mpz(c1) % P)


def fq2_add(a, b):
    return ((a[0] + b[0]) % P, (a[1] + b[1]) % P)


def fq2_sub(a, b):
    return ((a[0] - b[0]) % P, (a[1] - b[1]) % P)


def fq2_neg(a):
    return (-a[0] % P, -a[1] % P)


def fq2_conj(a):
    return (a[0], -a[1] % P)


def fq2_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = a0 * b0
    t1 = a1 * b1
    return ((t0 - t1) % P, ((a0 + a1) * (b0 + b1) - t0 - t1) % P)


def fq2_sqr(a):
    a0, a1 = a
    return ((a0 + a1) * (a0 - a1) % P, (a0 * a1 << 1) % P)


def fq2_scalar(a, k):
    """Multiply by a base-field scalar."""
    return (a[0] * k % P, a[1] * k % P)


def fq2_mul_xi(a):
    """Multiply by xi = u + 1."""
    a0, a1 = a
    return ((a0 - a1) % P, (a0 + a1) % P)


def fq2_inv(a):
    a0, a1 = a
    d = invert(a0 * a0 + a1 * a1, P)
    return (a0 * d % P, -a1 * d % P)


def fq2_pow(a, e):
    result = FQ2_ONE
    base = a
    e = int(e)
    while e:
        if e & 1:
            result = fq2_mul(result, base)
        base = fq2_sqr(base)
        e >>= 1
    return result


def fq2_sqrt(a):
    """Square root in Fq2, or None."""
    a0, a1 = a
    if a1 == 0:
        s = fq_sqrt(a0)
        if s is not None:
            return (s, ZERO)
        s = fq_sqrt(-a0 % P)
        return None if s is None else (ZERO, s)
    n = fq_sqrt((a0 * a0 + a1 * a1) % P)
    if n is None:
        return None
    half = invert(mpz(2), P)
    for m in (n, -n % P):
        x0 = fq_sqrt((a0 + m) * half % P)
        if x0 is not None and x0 != 0:
            x1 = a1 * invert(x0 << 1, P) % P
            cand = (x0, x1)
            if fq2_sqr(cand) == a:
                return cand
    return None


# ---------------------------------------------------------------------------
# Fq6


def fq6_add(a, b):
    return (fq2_add(a[0], b[0]), fq2_add(a[1], b[1]), fq2_add(a[2], b[2]))


def fq6_sub(a, b):
    return (fq2_sub(a[0], b[0]), fq2_sub(a[1], b[1]), fq2_sub(a[2], b[2]))


def fq6_neg(a):
    return (fq2_neg(a[0]), fq2_neg(a[1]), fq2_neg(a[2]))


def fq6_mul(a, b):
    a0, a1, a2 = a
    b0, b1, b2 = b
    t0 = fq2_mul(a0, b0)
    t1 = fq2_mul(a1, b1)
    t2 = fq2_mul(a2, b2)
    c0 = fq2_add(t0, fq2_mul_xi(fq2_sub(fq2_mul(fq2_add(a1, a2), fq2_add(b1, b2)), fq2_add(t1, t2))))
    c1 = fq2_add(fq2_sub(fq2_mul(fq2_add(a0, a1), fq2_add(b0, b1)), fq2_add(t0, t1)), fq2_mul_xi(t2))
    c2 = fq2_add(fq2_sub(fq2_mul(fq2_add(a0, a2), fq2_add(b0, b2)), fq2_add(t0, t2)), t1)
    return (c0, c1, c2)


def fq6_sqr(a):
    return fq6_mul(a, a)


def fq6_scalar2(a, s):
    """Multiply by an Fq2 scalar."""
    return (fq2_mul(a[0], s), fq2_mul(a[1], s), fq2_mul(a[2], s))


def fq6_mul_v(a):
    """Multiply by v: (c0, c1, c2) -> (xi*c2, c0, c1)."""
    return (fq2_mul_xi(a[2]), a[0], a[1])


def fq6_inv(a):
    a0, a1, a2 = a
    c0 = fq2_sub(fq2_sqr(a0), fq2_mul_xi(fq2_mul(a1, a2)))
    c1 = fq2_sub(fq2_mul_xi(fq2_sqr(a2)), fq2_mul(a0, a1))
    c2 = fq2_sub(fq2_sqr(a1), fq2_mul(a0, a2))
    norm = fq2_add(fq2_mul(a0, c0), fq2_mul_xi(fq2_add(fq2_mul(a2, c1), fq2_mul(a1, c2))))
    ninv = fq2_inv(norm)
    return (fq2_mul(c0, ninv), fq2_mul(c1, ninv), fq2_mul(c2, ninv))


# ---------------------------------------------------------------------------
# Fq12


def fq12_add(a, b):
    return (fq6_add(a[0], b[0]), fq6_add(a[1], b[1]))


def fq12_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = fq6_mul(a0, b0)
    t1 = fq6_mul(a1, b1)
    c1 = fq6_sub(fq6_mul(fq6_add(a0, a1), fq6_add(b0, b1)), fq6_add(t0, t1))
    return (fq6_add(t0, fq6_mul_v(t1)), c1)


def fq12_sqr(a):
    a0, a1 = a
    t0 = fq6_sqr(a0)
    t1 = fq6_sqr(a1)
    c1 = fq6_sub(fq6_sqr(fq6_add(a0, a1)), fq6_add(t0, t1))
    return (fq6_add(t0, fq6_mul_v(t1)), c1)


def fq12_conj(a):
    """Conjugation w -> -w; equals the p^6 Frobenius."""
    return (a[0], fq6_neg(a[1]))


def fq12_inv(a):
    a0, a1 = a
    d = fq6_inv(fq6_sub(fq6_sqr(a0), fq6_mul_v(fq6_sqr(a1))))
    return (fq6_mul(a0, d), fq6_neg(fq6_mul(a1, d)))


def fq12_pow(a, e):
    e = int(e)
    if e < 0:
        a = fq12_inv(a)
        e = -e
    result = FQ12_ONE
    base = a
    while e:
        if e & 1:
            result = fq12_mul(result, base)
        base = fq12_sqr(base)
        e >>= 1
    return result


# Frobenius constants: gamma_k = xi^(k*(p-1)/6) for k = 1..5.
_FROB_GAMMA = [fq2_pow(XI, k * (int(P) - 1) // 6) for k in range(6)]


def fq6_frobenius(a):
    """a^p for a in Fq6 (coefficients conjugated, v-powers twisted)."""
    return (
        fq2_conj(a[0]),
        fq2_mul(fq2_conj(a[1]), _FROB_GAMMA[2]),
        fq2_mul(fq2_conj(a[2]), _FROB_GAMMA[4]),
    )


def fq12_frobenius(a):
    """a^p for a in Fq12."""
    c0 = fq6_frobenius(a[0])
    c1 = fq6_frobenius(a[1])
    return (c0, fq6_scalar2(c1, _FROB_GAMMA[1]))


def fq12_frobenius_n(a, n):
    for _ in range(n % 12):
        a = fq12_frobenius(a)
    return a
