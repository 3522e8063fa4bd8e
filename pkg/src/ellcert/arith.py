"""Exact integer and rational arithmetic helpers.

Everything here is exact: integers are arbitrary precision, rationals are
``fractions.Fraction`` (always reduced, positive denominator).  The only
floating-point output in the package comes from the heights module, which
rounds outward.

Places are either the real place (the module constant ``REAL``) or a finite
prime given as an ``int``.
"""

from __future__ import annotations

import math
from fractions import Fraction

REAL = "R"

Rational = Fraction | int

#: Deterministic Miller-Rabin base set.  Sufficient for every n < 3.3e24,
#: which covers the advertised 2^64 deterministic range with room to spare.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_MR_DETERMINISTIC_LIMIT = 1 << 64


def vp(x: Rational, p: int) -> int | float:
    """p-adic valuation of x.  Returns math.inf for x = 0."""
    if not is_prime(p):
        raise ValueError(f"vp: modulus {p} is not prime")
    num, den = _as_num_den(x)
    if num == 0:
        return math.inf
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _as_num_den(x: Rational) -> tuple[int, int]:
    if isinstance(x, Fraction):
        return x.numerator, x.denominator
    if isinstance(x, int):
        return x, 1
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


def _miller_rabin_round(n: int, d: int, s: int, base: int) -> bool:
    """One strong-probable-prime round; True means 'passes' (maybe prime)."""
    x = pow(base % n, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _strong_lucas_prp(n: int) -> bool:
    """Strong Lucas probable-prime test with Selfridge parameter choice.

    Assumes n odd, n > 2, and n not a perfect square (the D search below
    does not terminate on squares, so callers must exclude them).
    """
    d_candidate = 5
    while True:
        j = jacobi(d_candidate, n)
        if j == -1:
            break
        if j == 0 and abs(d_candidate) != n:
            return False
        d_candidate = -(d_candidate + 2) if d_candidate > 0 else -(d_candidate - 2)
    disc = d_candidate
    q = (1 - disc) // 4
    # n + 1 = k * 2^s with k odd
    k = n + 1
    s = 0
    while k % 2 == 0:
        k //= 2
        s += 1
    # Lucas sequences U_k, V_k for P=1, Q=q, by binary ladder.
    u, v, qk = 1, 1, q % n
    inv2 = pow(2, -1, n)
    for bit in bin(k)[3:]:
        # double: index m -> 2m
        u, v = u * v % n, (v * v - 2 * qk) % n
        qk = qk * qk % n
        if bit == "1":
            # increment: 2m -> 2m + 1
            u, v = (u + v) * inv2 % n, (disc * u + v) * inv2 % n
            qk = qk * q % n
    if u == 0 or v == 0:
        return True
    for _ in range(s - 1):
        u, v = u * v % n, (v * v - 2 * qk) % n
        qk = qk * qk % n
        if v == 0:
            return True
    return False


def primality_info(n: int) -> tuple[bool, str]:
    """Primality verdict plus which decision procedure produced it.

    Methods: "small-table" (n < 2), trial lookups for tiny n,
    "deterministic-miller-rabin" for n < 2^64, and
    "baillie-psw-probable-prime" above (MR base 2 plus strong Lucas; no
    counterexample is known, and certificates record that the decision is
    probabilistic in nature).
    """
    if n < 2:
        return False, "small-table"
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n == q:
            return True, "small-table"
        if n % q == 0:
            return False, "small-table"
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < _MR_DETERMINISTIC_LIMIT:
        for base in _MR_BASES:
            if not _miller_rabin_round(n, d, s, base):
                return False, "deterministic-miller-rabin"
        return True, "deterministic-miller-rabin"
    if not _miller_rabin_round(n, d, s, 2):
        return False, "baillie-psw-probable-prime"
    if is_square(n):
        # squares pass no further tests, and the Lucas D search needs this
        return False, "baillie-psw-probable-prime"
    if not _strong_lucas_prp(n):
        return False, "baillie-psw-probable-prime"
    return True, "baillie-psw-probable-prime"


def is_prime(n: int) -> bool:
    return primality_info(n)[0]


def kth_power_free(n: int, k: int) -> bool:
    """True when no prime q has q^k dividing n.  Sign of n is ignored."""
    if n == 0:
        raise ValueError("kth_power_free: n must be nonzero")
    if k < 2:
        raise ValueError("kth_power_free: k must be >= 2")
    n = abs(n)
    q = 2
    while q ** k <= n:
        if n % q == 0:
            v = 0
            while n % q == 0:
                n //= q
                v += 1
            if v >= k:
                return False
        q += 1 if q == 2 else 2
    return True


def is_square(x: Rational) -> bool:
    """Exact perfect-square test for integers and rationals."""
    num, den = _as_num_den(x)
    if num < 0:
        return False
    r = math.isqrt(num)
    if r * r != num:
        return False
    r = math.isqrt(den)
    return r * r == den


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n > 0."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi: n must be positive and odd")
    a %= n
    result = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def square_class_local(x: Rational, place: int | str) -> bool:
    """Is x a square in the completion at the given place?

    Real place: sign test.  Odd p: even valuation and unit part a quadratic
    residue mod p.  p = 2: even valuation and unit part 1 mod 8.
    """
    num, den = _as_num_den(x)
    if num == 0:
        raise ValueError("square_class_local: x must be nonzero")
    if place == REAL:
        return num > 0
    p = place
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"square_class_local: place {place!r} is not REAL or a prime")
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    if v % 2 != 0:
        return False
    # unit part of x in Z_p*: num * den^{-1}
    if p == 2:
        unit = num * pow(den, -1, 8) % 8
        return unit == 1
    unit = num * pow(den, -1, p) % p
    return jacobi(unit, p) == 1


def factorize(n: int, bound: int = 10**6) -> dict[int, int]:
    """Prime factorization by trial division up to ``bound``.

    The leftover cofactor must be prime (checked), so this is exact for every
    integer whose second-largest prime factor is below ``bound``; family
    parameters in this package always qualify.  Raises on anything harder,
    rather than returning a partial answer.
    """
    if n == 0:
        raise ValueError("factorize: n must be nonzero")
    n = abs(n)
    out: dict[int, int] = {}
    q = 2
    while q * q <= n and q <= bound:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 1 if q == 2 else 2
    if n > 1:
        if not is_prime(n):
            raise ValueError(f"factorize: composite cofactor {n} beyond trial bound")
        out[n] = out.get(n, 0) + 1
    return out


def divisors_up_to(factors: dict[int, int], limit: int) -> list[int]:
    """All positive divisors <= limit of the integer with the given factorization."""
    out = [1]
    for q, e in factors.items():
        grown = []
        for d in out:
            m = d
            for _ in range(e):
                m *= q
                if m > limit:
                    break
                grown.append(m)
        out.extend(grown)
    return sorted(d for d in out if d <= limit)
