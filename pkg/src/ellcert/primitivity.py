"""Certify that the base point generates its saturation in E_{s,t}(Q).

Primitive means (-s^2, s t) is not congruent to a proper multiple modulo
torsion.  Two exact facts combine into the proof:

* index parity: if the saturation index m were even, P or P + (0,0)
  would be a double, but x(2Q) = ((x^2 + l)/2y)^2 is always a rational
  square while x(P) = -s^2 is negative and x(P + (0,0)) = l/s^2 is a
  square only when l is; so m is odd whenever l is not a square.
* index size: hhat(P) = m^2 hhat(G) for the saturating generator G, so
  m^2 is at most hhat(P) divided by the residue-class height floor.

Floor ratio below 9 plus odd parity forces m = 1.  The smallest member
(s, t) = (1, 1) is decided instead by a rank-one point search, since the
height floor's residue table is not relied on at |a| = 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arith import is_prime, is_square, kth_power_free
from .curve import (
    Curve,
    Point,
    base_point,
    is_torsion_point,
    make_family,
    rational_points_up_to_height,
    smul,
)
from .descent import selmer
from .errors import PreconditionFailure
from .heights import (
    _up,
    canonical_height,
    log_int_bounds,
    silverman_gaps,
    vy_lower_bound,
)

RATIO_MARGIN = 1e-6
_INDEX_SQ_LIMIT = 9.0  # first odd index to exclude is 3


@dataclass(frozen=True)
class PrimitivityCert:
    s: int
    t: int
    ell: int
    torsion_only_two: bool
    excludes_index_two: bool
    method: str
    ratio: float | None  # rigorous upper bound for m^2 when the floor was used
    search_bound: float | None
    status: str  # "primitive" | "not-primitive" | "undecided"
    reason: str | None


def _cert(s, t, ell, *, torsion, parity, method, ratio=None, bound=None,
          status="primitive", reason=None) -> PrimitivityCert:
    return PrimitivityCert(
        s=s, t=t, ell=ell, torsion_only_two=torsion, excludes_index_two=parity,
        method=method, ratio=ratio, search_bound=bound, status=status, reason=reason,
    )


def excludes_index_two(c: Curve) -> bool:
    """Neither x(P) nor x(P + (0,0)) is a rational square, so 2 cannot divide the index."""
    ell = c.ell
    # x(P) = -s^2 < 0 handles itself; x(P + T) = l/s^2 is square iff l is
    return not is_square(ell)


def _same_up_to_torsion_translate(c: Curve, r: Point, p: Point) -> bool:
    if r.x == p.x:
        return True
    # translate by (0, 0): x -> a/x
    return r.x != 0 and p.x == c.a / r.x


def _search_certificate(c: Curve, s: int, t: int, ell: int,
                        iterations: int) -> PrimitivityCert:
    """Decide primitivity from rank 1 plus an exhaustive small-point search.

    With rank exactly 1, a saturation index m >= 3 (even m already ruled
    out) forces a generator G with hhat(G) <= hhat(P)/9 and naive height
    within 2(hhat(G) + lower_gap); every such point is enumerated and
    tested for m G = +-P modulo the 2-torsion translate.
    """
    rep = selmer(ell)
    p0 = base_point(c)
    assert not is_torsion_point(c, p0)  # rank >= 1, so the cap makes it exactly 1
    if rep.rank_upper != 1:
        return _cert(s, t, ell, torsion=True, parity=True, method="rank-one-search",
                     status="undecided", reason=f"rank-cap-{rep.rank_upper}-not-1")
    h_p = canonical_height(c, p0, iterations)
    gaps = silverman_gaps(c)
    bound = _up(2.0 * (h_p.hi / 4.0 + gaps.lower_gap) + 0.5)
    if bound > 12.0:
        return _cert(s, t, ell, torsion=True, parity=True, method="rank-one-search",
                     status="undecided", reason="search-box-too-large", bound=bound)
    threshold = _up(h_p.hi / 9.0)
    candidates = []
    for q in rational_points_up_to_height(c, bound):
        if is_torsion_point(c, q):
            continue
        h_q = canonical_height(c, q, iterations)
        if h_q.lo <= threshold:
            candidates.append((q, h_q))
    if not candidates:
        return _cert(s, t, ell, torsion=True, parity=True,
                     method="rank-one-search", bound=bound)
    for q, h_q in candidates:
        m_sq = h_p.hi / max(h_q.lo, 1e-12)
        m_max = min(int(math.isqrt(int(m_sq)) + 1), 9)
        for m in range(3, m_max + 1, 2):
            r = smul(c, m, q)
            if r is not None and _same_up_to_torsion_translate(c, r, p0):
                return _cert(s, t, ell, torsion=True, parity=True,
                             method="rank-one-search", bound=bound,
                             status="not-primitive", reason=f"index-multiple-{m}")
    if iterations < 9:
        return _search_certificate(c, s, t, ell, iterations + 1)
    return _cert(s, t, ell, torsion=True, parity=True, method="rank-one-search",
                 status="undecided", reason="ambiguous-small-points", bound=bound)


def certify_primitive(s: int, t: int) -> PrimitivityCert:
    """Certificate that (-s^2, s t) generates E_{s,t}(Q) up to torsion.

    The height-floor route needs l fourth-power-free (else the floor table
    does not apply) and l not a square (else extra 2-torsion breaks the
    parity argument; reported undecided, not failed).
    """
    if s < 1 or t < 1:
        raise PreconditionFailure("degenerate-parameters", f"(s,t)=({s},{t})")
    ell = s**4 + t**2
    if not kth_power_free(ell, 4):
        raise PreconditionFailure("ell-not-fourth-power-free", f"ell={ell}")
    c = make_family(s, t)
    if is_square(ell):
        return _cert(s, t, ell, torsion=False, parity=False, method="none",
                     status="undecided", reason="square-ell-extra-two-torsion")
    assert excludes_index_two(c)

    if ell == 2:
        return _search_certificate(c, s, t, ell, iterations=6)

    vy = vy_lower_bound(-ell)
    if vy > 0:
        h_naive_hi = log_int_bounds(s * s)[1] if s > 1 else 0.0
        crude = _up(_up(h_naive_hi / 2.0) + silverman_gaps(c).upper_gap)
        ratio = _up(crude / vy)
        if ratio < _INDEX_SQ_LIMIT - RATIO_MARGIN:
            return _cert(s, t, ell, torsion=True, parity=True,
                         method="height-ratio", ratio=ratio)
        refined = canonical_height(c, base_point(c), iterations=9)
        ratio = _up(refined.hi / vy)
        if ratio < _INDEX_SQ_LIMIT - RATIO_MARGIN:
            return _cert(s, t, ell, torsion=True, parity=True,
                         method="height-ratio-refined", ratio=ratio)
        reason = "height-ratio-inconclusive"
    else:
        reason = "nonpositive-height-floor"

    if is_prime(ell):
        out = _search_certificate(c, s, t, ell, iterations=6)
        if out.status != "undecided":
            return out
    return _cert(s, t, ell, torsion=True, parity=True, method="none",
                 status="undecided", reason=reason)
