"""Critical-line zero isolation with an argument-principle certificate.

Zeros are located as sign changes of the Hardy Z function on a grid fine
enough to sample consecutive zeros several times at average density, then
refined by bisection.  Completeness is certified by comparing against the
winding number of Lambda around the rectangle [-1/2, 3/2] x [delta, T];
a mismatch after grid refinement leaves the list uncertified.

Only ordinates in [0, T] are stored; negative ordinates follow from the
symmetry of the zeros about the real axis.
"""
from __future__ import annotations

import math
import os
import struct
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import lfunc
from .errors import DomainError, WindingError
from .lfunc import QuadChar, ThetaEvaluator, _afe_lambda_points

GRID_OVERSAMPLE = 8
DELTA = 1e-3
REFINE_TOL = 1e-9


@dataclass(frozen=True)
class ZeroList:
    """Sorted positive ordinates of L(s, chi_p) zeros up to height T."""

    p: int
    T: float
    gammas: np.ndarray
    central_flag: bool
    certified: bool

    @property
    def count(self) -> int:
        return int(self.gammas.size)


def grid_spacing(p: int, T: float) -> float:
    """<= 1/8 of the average zero gap 2 pi / log(pT/2pi)."""
    return (2.0 * math.pi / max(math.log(p * T / (2.0 * math.pi)), 2.0)) / GRID_OVERSAMPLE


def smooth_count(chi: QuadChar, T: float) -> float:
    """Riemann-von Mangoldt main term for the one-sided count on (0, T]."""
    if T <= 0:
        raise DomainError(f"smooth_count requires T > 0, got {T}")
    arg = chi.p * T / (2.0 * math.pi * math.e)
    return (T / (2.0 * math.pi)) * math.log(max(arg, 1.0))


def _lambda_point_fn(chi: QuadChar, T: float, evaluator=None):
    if evaluator is not None:
        return evaluator.lambda_points
    if T <= 12.0:
        ev = lfunc._theta_evaluator_cached(chi.p, 12.0)
        return ev.lambda_points
    return lambda ss: _afe_lambda_points(chi, ss)


def count_zeros(chi: QuadChar, T: float, evaluator=None, max_points: int = 60000) -> int:
    """Zeros with delta < gamma <= T by the winding of Lambda around the
    rectangle [-1/2, 3/2] x [delta, T]; Lambda is entire and zero-free on
    the contour, so the winding equals the enclosed zero count.
    """
    if not 0 < T <= lfunc.T_MAX:
        raise DomainError(f"count_zeros requires 0 < T <= {lfunc.T_MAX}")
    if T <= DELTA:
        return 0
    lam_fn = _lambda_point_fn(chi, T, evaluator)

    guess = max(4, int(2 * smooth_count(chi, T)) + 4)
    corners = [-0.5 + 1j * DELTA, 1.5 + 1j * DELTA, 1.5 + 1j * T, -0.5 + 1j * T]
    pts = []
    for k in range(4):
        a, b = corners[k], corners[(k + 1) % 4]
        n = guess if k % 2 else max(8, guess // 3)
        frac = np.arange(n, dtype=float) / n
        pts.append(a + (b - a) * frac)
    s = np.concatenate(pts)
    lam = lam_fn(s)

    for _ in range(24):
        nxt = np.roll(lam, -1)
        dphi = np.angle(nxt / lam)
        bad = np.abs(dphi) > 0.5 * math.pi
        if not bad.any():
            break
        if s.size > max_points:
            raise WindingError(
                f"contour refinement exceeded {max_points} points for p={chi.p}, T={T}")
        s_next = np.roll(s, -1)
        mids = 0.5 * (s[bad] + s_next[bad])
        lam_mid = lam_fn(mids)
        idx = np.nonzero(bad)[0]
        s = np.insert(s, idx + 1, mids)
        lam = np.insert(lam, idx + 1, lam_mid)
    else:
        raise WindingError(f"contour phase did not settle for p={chi.p}, T={T}")

    winding = float(np.angle(np.roll(lam, -1) / lam).sum() / (2.0 * math.pi))
    nearest = round(winding)
    if abs(winding - nearest) > 0.2:
        raise WindingError(
            f"winding {winding:.3f} too far from an integer (p={chi.p}, T={T})")
    return int(nearest)


def _refine_brackets(zfunc, lo, hi, flo, fhi, tol=REFINE_TOL):
    lo = lo.copy()
    hi = hi.copy()
    flo = flo.copy()
    for _ in range(60):
        if not (hi - lo > 0.25 * tol).any():
            break
        mid = 0.5 * (lo + hi)
        fm = zfunc(mid)
        left = fm * flo < 0
        hi = np.where(left, mid, hi)
        lo = np.where(left, lo, mid)
        flo = np.where(left, flo, fm)
    return 0.5 * (lo + hi)


def _even_order_candidates(ts, z, threshold=1e-8):
    """Grid local minima of |Z| below `threshold` with no sign change."""
    az = np.abs(z)
    out = []
    for i in range(1, len(ts) - 1):
        if az[i] < threshold and az[i] <= az[i - 1] and az[i] <= az[i + 1]:
            if z[i - 1] * z[i + 1] > 0:
                out.append(ts[i])
    return out


def find_zeros(chi: QuadChar, T: float, *, zfunc=None, count_fn=None,
               max_grid_refine: int = 2) -> ZeroList:
    """All critical-line zeros with 0 < gamma <= T, certified when the
    sign-change count matches the argument-principle count.
    """
    if not 0 < T <= lfunc.T_MAX:
        raise DomainError(f"find_zeros requires 0 < T <= {lfunc.T_MAX}")
    evaluator = None
    if zfunc is None:
        if T <= 12.0:
            evaluator = lfunc._theta_evaluator_cached(chi.p, 12.0)
            zfunc = evaluator.z
        else:
            zfunc = lambda ts: lfunc.hardy_Z_grid(chi, ts)
    if count_fn is None:
        count_fn = lambda T_cert: count_zeros(chi, T_cert, evaluator)

    h0 = grid_spacing(chi.p, max(T, 1.0))
    central = abs(zfunc(np.array([0.0]))[0]) < lfunc.tol_zero(chi.p)

    gammas = np.empty(0)
    certified = False
    h = h0
    for attempt in range(max_grid_refine + 1):
        ts = np.arange(0.0, T + 2.5 * h, h)
        z = zfunc(ts)
        if np.any(z == 0.0):
            ts = ts + 0.37 * h
            ts[0] = 0.0
            z = zfunc(ts)
        flips = np.nonzero(np.sign(z[:-1]) * np.sign(z[1:]) < 0)[0]
        gammas = _refine_brackets(zfunc, ts[flips], ts[flips + 1], z[flips], z[flips + 1])
        gammas = np.sort(gammas)

        T_cert = T
        if gammas.size and np.min(np.abs(gammas - T)) < 0.25 * h:
            T_cert = T + 0.5 * h
        expected = int(np.count_nonzero((gammas > DELTA) & (gammas <= T_cert)))
        try:
            got = count_fn(T_cert)
        except WindingError:
            got = -1
        if got == expected:
            certified = True
            break
        if attempt == max_grid_refine and got > expected:
            # a pair of even-order zeros (Z touching without sign change)
            cands = _even_order_candidates(ts, z)
            if 2 * len(cands) == got - expected:
                gammas = np.sort(np.concatenate([gammas, np.repeat(cands, 2)]))
                certified = True
        h /= 2.0

    gammas = gammas[gammas <= T]
    gammas.flags.writeable = False
    return ZeroList(p=chi.p, T=float(T), gammas=gammas,
                    central_flag=bool(central), certified=bool(certified))


# ---------------------------------------------------------------------------
# On-disk cache
# ---------------------------------------------------------------------------

_MAGIC = b"QDZC"
_HEADER = struct.Struct("<4sIQdIB")  # magic, version, p, T, count, central_flag


class ZeroCache:
    """One binary record per prime, keyed by (p, T, evaluator version).

    Record layout (little-endian): magic "QDZC" (4 bytes), u32 version,
    u64 p, f64 T, u32 count, u8 central_flag, then count f64 gammas in
    ascending order.  Only certified lists are stored.
    """

    def __init__(self, directory, version: int = lfunc.EVALUATOR_VERSION):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.version = int(version)

    def path(self, p: int, T: float) -> Path:
        return self.dir / f"p{int(p)}_T{float(T):.6g}_v{self.version}.zrec"

    def has(self, p: int, T: float) -> bool:
        return self.path(p, T).exists()

    def get(self, p: int, T: float):
        fn = self.path(p, T)
        if not fn.exists():
            return None
        blob = fn.read_bytes()
        magic, version, pp, tt, count, flag = _HEADER.unpack_from(blob, 0)
        if magic != _MAGIC or version != self.version or pp != p:
            return None
        gammas = np.frombuffer(blob, dtype="<f8", count=count, offset=_HEADER.size).copy()
        gammas.flags.writeable = False
        return ZeroList(p=int(pp), T=float(tt), gammas=gammas,
                        central_flag=bool(flag), certified=True)

    def put(self, zl: ZeroList) -> None:
        if not zl.certified:
            raise DomainError(f"refusing to cache uncertified zero list for p={zl.p}")
        payload = _HEADER.pack(_MAGIC, self.version, zl.p, zl.T,
                               zl.count, int(zl.central_flag))
        payload += np.asarray(zl.gammas, dtype="<f8").tobytes()
        fd, tmp = tempfile.mkstemp(dir=self.dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(payload)
            os.replace(tmp, self.path(zl.p, zl.T))
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)


def _compute_one(args):
    p, T = args
    chi = QuadChar.make(p)
    zl = find_zeros(chi, T)
    return p, zl.T, np.asarray(zl.gammas), zl.central_flag, zl.certified


def ensure_cache(primes, T: float, cache: ZeroCache, workers: int = 1,
                 progress=None) -> dict:
    """Populate the cache for every prime in `primes` at height T.

    Returns {"hits": int, "computed": int, "failures": [p, ...]}; zero
    finding for distinct p runs in a process pool, the parent is the
    single cache writer.
    """
    todo = [int(p) for p in primes if not cache.has(int(p), T)]
    hits = len(list(primes)) - len(todo)
    failures = []
    done = 0

    def _store(result):
        nonlocal done
        p, tt, gammas, central, certified = result
        if certified:
            gammas = np.asarray(gammas)
            gammas.flags.writeable = False
            cache.put(ZeroList(p=p, T=tt, gammas=gammas,
                               central_flag=central, certified=True))
        else:
            failures.append(p)
        done += 1
        if progress is not None and (done % 250 == 0 or done == len(todo)):
            progress(done, len(todo))

    if workers <= 1:
        for p in todo:
            _store(_compute_one((p, T)))
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for result in ex.map(_compute_one, [(p, T) for p in todo], chunksize=16):
                _store(result)
    return {"hits": hits, "computed": len(todo) - len(failures), "failures": failures}


def load_zero_lists(primes, T: float, cache: ZeroCache):
    """Certified lists for every prime, or MissingCacheError listing gaps."""
    from .errors import MissingCacheError

    out = []
    missing = []
    for p in primes:
        zl = cache.get(int(p), T)
        if zl is None:
            missing.append(int(p))
        else:
            out.append(zl)
    if missing:
        raise MissingCacheError(missing)
    return out
