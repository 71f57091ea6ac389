"""Adaptive Simpson quadrature for scalar integrands on finite intervals."""
import math

from .errors import IntegrationError


def adaptive_simpson(f, a, b, tol=1e-8, max_intervals=2**20, initial_panels=64):
    """Integrate ``f`` over ``[a, b]``.

    The interval is first cut into ``initial_panels`` equal panels so that
    narrow features are not missed by the coarsest Simpson estimate; each
    panel is then bisected until the Richardson error estimate falls under
    its share of ``tol`` (proportional to width).

    Returns
    -------
    (value, residual) : (float, float)
        Integral estimate and the summed error estimate.

    Raises
    ------
    IntegrationError
        If more than ``max_intervals`` subintervals would be needed.
    """
    if not (math.isfinite(a) and math.isfinite(b)) or b <= a:
        raise ValueError(f"need finite bounds with a < b, got [{a}, {b}]")
    width = b - a
    h = width / initial_panels
    stack = []
    for i in range(initial_panels):
        lo = a + i * h
        hi = b if i == initial_panels - 1 else lo + h
        mid = 0.5 * (lo + hi)
        flo, fmid, fhi = f(lo), f(mid), f(hi)
        whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
        stack.append((lo, hi, flo, fmid, fhi, whole))

    total = 0.0
    residual = 0.0
    intervals = initial_panels
    while stack:
        lo, hi, flo, fmid, fhi, whole = stack.pop()
        mid = 0.5 * (lo + hi)
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        flm, frm = f(lmid), f(rmid)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol * (hi - lo) / width or mid in (lo, hi):
            total += left + right + delta / 15.0
            residual += abs(delta) / 15.0
            continue
        intervals += 1
        if intervals > max_intervals:
            pending = sum(abs(s[5]) for s in stack) + abs(whole)
            raise IntegrationError(
                f"adaptive Simpson exceeded {max_intervals} subintervals on [{a}, {b}]; "
                f"achieved residual {residual:.3g} with {pending:.3g} of mass unresolved",
                residual=residual + pending,
            )
        stack.append((lo, mid, flo, flm, fmid, left))
        stack.append((mid, hi, fmid, frm, fhi, right))
    return total, residual
