"""Epsilon-iteration engine for the singularities of phi_q.

A codimension-1 singular hypersurface ``u_k = 0`` is seeded with the series
``eps`` while every other coordinate takes a random rational value. Iterating
phi_q forward and backward in Laurent arithmetic and reading off the
valuation of every coordinate gives the singularity pattern. The image
varieties are tracked by Monte-Carlo dependence probing: a coordinate value
``u_i`` is a free parameter of X_j when resampling it moves the eps -> 0 limit
of some regular entry of x_j.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    DegenerateSample,
    ExactZeroReciprocal,
    InconclusiveProbe,
    ProbableIdentityZero,
    TruncationExhausted,
    Unclassifiable,
    UndeterminedLeading,
)
from .exactnum import GF, EntrySignature, LaurentSeries, classify_entry, qq, qstr
from .mapping import MapParams, phi_backward, phi_forward, random_rational

MAX_DOUBLINGS = 8
MAX_RESAMPLES = 5
DEFAULT_PROBES = 3
SAMPLE_BOUND = 50

RATIONAL = "rational"
MODULAR = "modular"

CONFINED_OPEN = "ConfinedOpen"
CYCLIC = "Cyclic"
UNCONFINED = "Unconfined"
ANTICONFINED = "Anticonfined"


def default_truncation(q: int) -> int:
    """Starting order of the eps seed; lost leading terms double it on demand."""
    return 6


def default_window(q: int) -> int:
    return 6 * q + 10


@dataclass(frozen=True)
class StepSignature:
    """Entry signatures of one iterate; negative ``step_index`` = backward."""

    step_index: int
    entries: tuple[EntrySignature, ...]

    @property
    def singular_count(self) -> int:
        return sum(1 for e in self.entries if not e.is_regular)

    @property
    def regular_count(self) -> int:
        return len(self.entries) - self.singular_count

    @property
    def all_regular(self) -> bool:
        return self.singular_count == 0

    def same_shape(self, other: "StepSignature") -> bool:
        return self.entries == other.entries

    def __str__(self):
        return "(" + ",".join(e.glyph for e in self.entries) + ")"


@dataclass(frozen=True)
class DependenceProfile:
    step_index: int
    depends_on: frozenset[int]


@dataclass(frozen=True)
class Classification:
    kind: str
    length: int | None = None
    period: int | None = None
    onset: int | None = None
    backward_period: int | None = None
    backward_onset: int | None = None

    def __str__(self):
        if self.kind == CONFINED_OPEN:
            return f"ConfinedOpen({self.length})"
        if self.kind == CYCLIC:
            return f"Cyclic({self.period})"
        if self.kind == UNCONFINED:
            return f"Unconfined(period={self.period}, onset={self.onset})"
        return (
            f"Anticonfined(forward_period={self.period}, forward_onset={self.onset}, "
            f"backward_period={self.backward_period}, backward_onset={self.backward_onset})"
        )

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for name in ("length", "period", "onset", "backward_period", "backward_onset"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


@dataclass
class Trajectory:
    """Laurent iterates of one seeded initial state."""

    params: MapParams
    k: int
    samples: tuple
    truncation: int
    forward: list
    backward: list

    def signature(self, step: int) -> StepSignature:
        state = self.state(step)
        return StepSignature(step, tuple(classify_entry(x) for x in state))

    def state(self, step: int):
        return self.forward[step] if step >= 0 else self.backward[-step]

    def limits(self, step: int) -> tuple:
        """eps^0 coefficients of the regular entries (None for singular ones)."""
        out = []
        for x in self.state(step):
            out.append(x.coeffs[0] if x.valuation == 0 else None)
        return tuple(out)


@dataclass
class SingularityPattern:
    params: MapParams
    hypersurface: int
    forward_signatures: list
    backward_signatures: list
    classification: Classification
    codim_forward: list
    codim_backward: list
    seed: int | None = None
    samples: tuple = ()
    truncation: int = 0
    probe_count: int = DEFAULT_PROBES
    profiles_forward: list = field(default_factory=list, repr=False)
    profiles_backward: list = field(default_factory=list, repr=False)

    @property
    def codim_profile(self) -> list:
        return self.codim_forward

    def to_record(self) -> dict:
        p = self.params
        return {
            "params": {"a": qstr(p.a), "b": qstr(p.b), "q": p.q},
            "hypersurface": self.hypersurface,
            "classification": self.classification.to_dict(),
            "label": str(self.classification),
            "forward_signatures": [str(s) for s in self.forward_signatures],
            "backward_signatures": [str(s) for s in self.backward_signatures],
            "codim_forward": list(self.codim_forward),
            "codim_backward": list(self.codim_backward),
            "seed": self.seed,
            "samples": [qstr(x) if x is not None else None for x in self.samples],
            "truncation": self.truncation,
            "probe_count": self.probe_count,
        }


# ---------------------------------------------------------------------------


def enumerate_codim1_singularities(p: MapParams) -> list[int]:
    """Indices k of the hypersurfaces ``u_k = 0`` that are singular for phi_q."""
    if p.q == 1:
        return [] if p.integrable else [2]
    return [2, p.q + 1]


def _full_samples(p: MapParams, k: int, samples: Sequence) -> tuple:
    n = p.q + 1
    if not 1 <= k <= n:
        raise ValueError(f"hypersurface index must lie in 1..{n}")
    samples = list(samples)
    if len(samples) == n - 1:
        samples.insert(k - 1, None)
    if len(samples) != n:
        raise ValueError(f"expected {n - 1} or {n} sample values")
    out = []
    for i, v in enumerate(samples):
        out.append(None if i == k - 1 else qq(v))
    return tuple(out)


@dataclass(frozen=True)
class _ModularParams:
    """MapParams with a, b reduced into GF(p); enough for phi_forward/backward."""

    a: GF
    b: GF
    q: int


def _iterate_once(p, k, samples, n_forward, n_backward, truncation, field_):
    if field_ == MODULAR:
        p = _ModularParams(GF.of(p.a), GF.of(p.b), p.q)
        lift = GF.of
    elif field_ == RATIONAL:
        lift = qq
    else:
        raise ValueError(f"field must be {RATIONAL!r} or {MODULAR!r}")
    seed = []
    for i, v in enumerate(samples):
        if i == k - 1:
            seed.append(LaurentSeries.epsilon(truncation, scale=lift(1)))
        else:
            seed.append(LaurentSeries.constant(lift(v)))
    seed = tuple(seed)
    forward = [seed]
    for _ in range(n_forward):
        forward.append(phi_forward(forward[-1], p))
    backward = [seed]
    for _ in range(n_backward):
        backward.append(phi_backward(backward[-1], p))
    for state in forward + backward:
        for x in state:
            classify_entry(x)
    return forward, backward


def epsilon_iterate(
    p: MapParams,
    k: int,
    samples: Sequence,
    n_forward: int,
    n_backward: int = 0,
    truncation: int | None = None,
    field: str = RATIONAL,
) -> Trajectory:
    """Seed ``u_k = eps`` and iterate in both directions.

    ``samples`` holds the other q coordinates (or all q+1, the k-th being
    ignored). The truncation order doubles whenever some leading coefficient
    is lost to cancellation, at most ``MAX_DOUBLINGS`` times.

    With ``field="modular"`` the coefficients live in GF(2^61 - 1) instead of
    Q. Valuations agree with the rational run except with negligible
    probability and the arithmetic stays cheap on long windows.
    """
    full = _full_samples(p, k, samples)
    if any(v == 0 for i, v in enumerate(full) if i != k - 1):
        raise DegenerateSample("sampled coordinates must be nonzero")
    trunc = truncation if truncation is not None else default_truncation(p.q)
    for _ in range(MAX_DOUBLINGS + 1):
        try:
            fw, bw = _iterate_once(p, k, full, n_forward, n_backward, trunc, field)
        except UndeterminedLeading:
            trunc *= 2
            continue
        except ExactZeroReciprocal as exc:
            raise DegenerateSample(f"accidental exact zero: {exc}") from exc
        return Trajectory(p, k, full, trunc, fw, bw)
    raise TruncationExhausted(f"leading terms still undetermined at truncation {trunc // 2}")


def _draw(rng: random.Random, p: MapParams, k: int) -> tuple:
    return tuple(
        None if i == k - 1 else random_rational(rng, SAMPLE_BOUND) for i in range(p.q + 1)
    )


def _baseline(p, k, window, rng, truncation, samples=None, field_=MODULAR):
    last = None
    for _ in range(MAX_RESAMPLES):
        full = samples if samples is not None else _draw(rng, p, k)
        try:
            return epsilon_iterate(p, k, full, window, window, truncation, field_)
        except DegenerateSample as exc:
            if samples is not None:
                raise
            last = exc
    raise ProbableIdentityZero(f"every resample hit an exact zero ({last})")


def _signatures(traj: Trajectory, window: int):
    fw = [traj.signature(j) for j in range(window + 1)]
    bw = [traj.signature(-j) for j in range(window + 1)]
    return fw, bw


def _probe(p, k, base: Trajectory, window, probe_count, rng, field_=MODULAR):
    """Per-step dependence sets (forward, backward) by resampling one u_i at a time."""
    fw_sigs, bw_sigs = _signatures(base, window)
    shapes = [s.entries for s in fw_sigs] + [s.entries for s in bw_sigs]
    base_fw = [base.limits(j) for j in range(window + 1)]
    base_bw = [base.limits(-j) for j in range(window + 1)]
    dep_fw = [set() for _ in range(window + 1)]
    dep_bw = [set() for _ in range(window + 1)]
    trunc = base.truncation
    for i in range(p.q + 1):
        if i == k - 1:
            continue
        for _ in range(probe_count):
            for _attempt in range(MAX_RESAMPLES):
                new = random_rational(rng, SAMPLE_BOUND)
                if new == base.samples[i]:
                    continue
                samples = list(base.samples)
                samples[i] = new
                try:
                    traj = epsilon_iterate(p, k, samples, window, window, trunc, field_)
                except DegenerateSample:
                    continue
                f, b = _signatures(traj, window)
                if [s.entries for s in f] + [s.entries for s in b] != shapes:
                    continue
                break
            else:
                raise ProbableIdentityZero(
                    f"probe of u_{i + 1} kept changing the signature pattern"
                )
            for j in range(window + 1):
                if traj.limits(j) != base_fw[j]:
                    dep_fw[j].add(i + 1)
                if traj.limits(-j) != base_bw[j]:
                    dep_bw[j].add(i + 1)
    prof_fw = [DependenceProfile(j, frozenset(d)) for j, d in enumerate(dep_fw)]
    prof_bw = [DependenceProfile(-j, frozenset(d)) for j, d in enumerate(dep_bw)]
    return prof_fw, prof_bw


def dependence_probe(
    p: MapParams,
    k: int,
    step_index: int,
    probe_count: int = DEFAULT_PROBES,
    seed: int = 0,
    truncation: int | None = None,
    field: str = MODULAR,
) -> DependenceProfile:
    """Which ``u_i`` the eps -> 0 limit of x_{step_index} depends on."""
    rng = random.Random(seed)
    window = abs(step_index)
    base = _baseline(p, k, window, rng, truncation, None, field)
    fw, bw = _probe(p, k, base, window, probe_count, rng, field)
    return fw[step_index] if step_index >= 0 else bw[-step_index]


def codim_estimate(
    profiles: Sequence[DependenceProfile],
    signatures: Sequence[StepSignature],
    recheck: Sequence[DependenceProfile] | None = None,
) -> list[int]:
    """Codimension of each X_j as (q+1) minus the number of free parameters.

    The free-parameter count is bounded both by the number of coordinate
    values that move the limit and by the number of regular entries that can
    carry them; the smaller bound is used. ``recheck`` (profiles from another
    probe count) must give the same answer or InconclusiveProbe is raised.
    """

    def estimate(profs):
        out = []
        for prof, sig in zip(profs, signatures):
            free = min(len(prof.depends_on), sig.regular_count)
            out.append(len(sig.entries) - free)
        return out

    result = estimate(profiles)
    if recheck is not None and estimate(recheck) != result:
        raise InconclusiveProbe("codimension changed with the probe count; raise probe_count")
    return result


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def _eventual_period(sigs: Sequence[StepSignature], start: int = 1):
    """Smallest (period, onset) of a singular periodic tail, or None.

    The tail must cover at least two full periods inside the window and
    contain a singular entry.
    """
    w = len(sigs) - 1
    shapes = [s.entries for s in sigs]
    for period in range(1, (w - start) // 2 + 1):
        onset = w - period
        while onset - 1 >= start and shapes[onset - 1] == shapes[onset - 1 + period]:
            onset -= 1
        if w - onset < 2 * period:
            continue
        if any(not sigs[j].all_regular for j in range(onset, onset + period)):
            return period, onset
    return None


def _confinement_step(sigs, codims):
    """First j >= 1 after which codim stays 1 and the tail turns all-regular."""
    w = len(sigs) - 1
    if not sigs[w].all_regular:
        return None
    j_star = None
    for j in range(w, 0, -1):
        if codims[j] != 1:
            break
        j_star = j
    return j_star


def _classify(fw_sigs, bw_sigs, codim_fw, q):
    w = len(fw_sigs) - 1
    # cyclic: the seeded variety comes back
    for period in range(1, w // 2 + 1):
        if fw_sigs[period].entries != fw_sigs[0].entries or codim_fw[period] != codim_fw[0]:
            continue
        if all(fw_sigs[j + period].entries == fw_sigs[j].entries for j in range(w - period + 1)):
            return Classification(CYCLIC, period=period)
    fwd = _eventual_period(fw_sigs)
    bwd = _eventual_period(bw_sigs)
    if fwd is not None:
        period, onset = fwd
        if bwd is not None:
            b_period, b_onset = bwd
            return Classification(
                ANTICONFINED,
                period=period,
                onset=onset,
                backward_period=b_period,
                backward_onset=-b_onset,
            )
        if bw_sigs[-1].all_regular:
            return Classification(UNCONFINED, period=period, onset=onset)
        return None
    j_star = _confinement_step(fw_sigs, codim_fw)
    if j_star is not None:
        return Classification(CONFINED_OPEN, length=j_star)
    return None


def classify_pattern(
    p: MapParams,
    k: int,
    window: int | None = None,
    seed: int = 0,
    probe_count: int = DEFAULT_PROBES,
    truncation: int | None = None,
    samples: Sequence | None = None,
    field: str = MODULAR,
) -> SingularityPattern:
    """Iterate the seeded hypersurface ``u_k = 0`` and classify its pattern.

    Raises :class:`Unclassifiable` (carrying the raw signatures) when no rule
    fires inside the window.
    """
    q = p.q
    if window is None:
        window = default_window(q)
    rng = random.Random(seed)
    full = _full_samples(p, k, samples) if samples is not None else None
    base = _baseline(p, k, window, rng, truncation, full, field)
    fw_sigs, bw_sigs = _signatures(base, window)
    prof_fw, prof_bw = _probe(p, k, base, window, probe_count, rng, field)
    codim_fw = codim_estimate(prof_fw, fw_sigs)
    codim_bw = codim_estimate(prof_bw, bw_sigs)
    result = _classify(fw_sigs, bw_sigs, codim_fw, q)
    if result is None:
        raise Unclassifiable(
            f"no rule fired for q={q}, k={k} within window {window}",
            signatures=[str(s) for s in fw_sigs],
        )
    return SingularityPattern(
        params=p,
        hypersurface=k,
        forward_signatures=fw_sigs,
        backward_signatures=bw_sigs,
        classification=result,
        codim_forward=codim_fw,
        codim_backward=codim_bw,
        seed=seed,
        samples=base.samples,
        truncation=base.truncation,
        probe_count=probe_count,
        profiles_forward=prof_fw,
        profiles_backward=prof_bw,
    )
