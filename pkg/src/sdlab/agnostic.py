"""Agnostic self-directed learning with projection experts and multiplicative weights.

The learner fixes a multiset of points, turns every distinct labelling the
class induces on it into an expert, and runs randomized weighted majority.
Regret is measured against the best expert in hindsight, which is the best
concept of the class on that sample.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import ConceptClass
from .dimensions import shattered_set, vc_dim
from .errors import UnsupportedError


@dataclass(frozen=True)
class SampleMultiset:
    points: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(int(p) for p in self.points))
        if not self.points:
            raise ValueError("a sample needs at least one point")
        if min(self.points) < 0:
            raise ValueError("point ids must be non-negative")

    @property
    def T(self) -> int:
        return len(self.points)

    def check(self, cls: ConceptClass) -> None:
        if max(self.points) >= cls.num_points:
            raise ValueError(f"sample uses point {max(self.points)} but the class has "
                             f"{cls.num_points} points")


@dataclass(frozen=True)
class ExpertPool:
    advice: np.ndarray  # N x T, entries 0/1
    class_id: str
    vc: int

    @property
    def N(self) -> int:
        return self.advice.shape[0]

    @property
    def T(self) -> int:
        return self.advice.shape[1]


def sauer_bound(T: int, d: int) -> int:
    return sum(math.comb(T, i) for i in range(0, d + 1))


def project(cls: ConceptClass, sample: SampleMultiset) -> ExpertPool:
    """One expert per distinct labelling of the sample (rows sorted lexicographically)."""
    if not cls.is_binary:
        raise UnsupportedError("agnostic experiments need a binary class")
    if cls.num_concepts == 0:
        raise ValueError("the empty class has no experts")
    sample.check(cls)
    advice = np.unique(cls.table[:, list(sample.points)], axis=0).astype(np.int8)
    d = vc_dim(cls)
    if advice.shape[0] > sauer_bound(sample.T, d):
        raise AssertionError("expert count exceeds the Sauer bound")  # cannot happen
    advice.setflags(write=False)
    return ExpertPool(advice, cls.name, d)


def mw_predict(weights: np.ndarray, advice: np.ndarray) -> float:
    """Weighted fraction of experts advising 1."""
    w = np.asarray(weights, dtype=float)
    z = w.sum()
    if not z > 0:
        raise FloatingPointError("weights must have a positive sum")
    return float(w[np.asarray(advice) == 1].sum() / z)


def mw_update(weights: np.ndarray, advice: np.ndarray, label: int, eta: float) -> np.ndarray:
    """Scale every expert that disagreed with ``label`` by ``exp(-eta)``."""
    if eta < 0:
        raise ValueError("eta must be non-negative")
    loss = np.abs(np.asarray(advice, dtype=float) - label)
    return np.asarray(weights, dtype=float) * np.exp(-eta * loss)


def default_eta(N: int, T: int) -> float:
    return math.sqrt(8 * math.log(N) / T)


# -- label sources -------------------------------------------------------------------
# A source is built once per trial and called as source(t, p_hat, past_preds) -> y_t.
# p_hat is a function of past labels only, so using it does not peek at the coin.

LABEL_SOURCES = ("fixed", "realizable", "oblivious", "bernoulli", "adversarial", "adaptive")
ALIASES = {"bernoulli_half": "bernoulli"}


def _make_source(kind: str, pool: ExpertPool, seed: int, trial: int, fixed=None,
                 script: Callable | None = None):
    T = pool.T
    if kind == "fixed":
        seq = np.asarray(fixed, dtype=int)
        return lambda t, p, past: int(seq[t])
    if kind == "realizable":
        rng = np.random.default_rng([seed, trial, 0])
        row = pool.advice[rng.integers(pool.N)]
        return lambda t, p, past: int(row[t])
    if kind == "oblivious":
        seq = np.random.default_rng([seed, 0xB1]).integers(0, 2, size=T)  # shared by all trials
        return lambda t, p, past: int(seq[t])
    if kind == "bernoulli":
        seq = np.random.default_rng([seed, trial, 0]).integers(0, 2, size=T)
        return lambda t, p, past: int(seq[t])
    if kind == "adversarial":
        return lambda t, p, past: int(p < 0.5)
    if kind == "adaptive":
        if script is not None:
            return lambda t, p, past: int(script(t, list(past)))
        # contradict the learner's previous sampled prediction
        return lambda t, p, past: 1 - past[-1] if past else 0
    raise ValueError(f"unknown label source {kind!r}; known: {', '.join(LABEL_SOURCES)}")


@dataclass(frozen=True)
class TrialResult:
    alg_loss: int
    expected_loss: float
    best_loss: int


def _run_trial(pool: ExpertPool, source, eta: float, seed: int, trial: int) -> TrialResult:
    coin = np.random.default_rng([seed, trial, 1])
    A = pool.advice.astype(float)
    logw = np.zeros(pool.N)
    losses = np.zeros(pool.N, dtype=np.int64)
    preds: list[int] = []
    alg = 0
    expected = 0.0
    for t in range(pool.T):
        w = np.exp(logw - logw.max())  # same ratios as the raw weights, no underflow
        p = float(w @ A[:, t] / w.sum())
        y = source(t, p, preds)
        if y not in (0, 1):
            raise ValueError(f"label source produced {y!r} at round {t}")
        yhat = int(coin.random() < p)
        preds.append(yhat)
        alg += int(yhat != y)
        expected += abs(p - y)
        miss = A[:, t] != y
        losses += miss
        logw -= eta * miss
    return TrialResult(alg, expected, int(losses.min()))


def _trial_chunk(args):
    pool, kind, eta, seed, trials, fixed = args
    return [_run_trial(pool, _make_source(kind, pool, seed, i, fixed), eta, seed, i) for i in trials]


@dataclass
class RegretReport:
    class_id: str
    label_source: str
    T: int
    N: int
    vc: int
    eta: float
    seed: int
    trials: list[TrialResult] = field(default_factory=list)

    @property
    def regrets(self) -> np.ndarray:
        return np.array([r.alg_loss - r.best_loss for r in self.trials], dtype=float)

    @property
    def expected_regrets(self) -> np.ndarray:
        return np.array([r.expected_loss - r.best_loss for r in self.trials], dtype=float)

    @staticmethod
    def _summary(x: np.ndarray) -> dict:
        n = len(x)
        sd = float(x.std(ddof=1)) if n > 1 else 0.0
        return {"mean": float(x.mean()), "std": sd, "stderr": sd / math.sqrt(n) if n else 0.0}

    @property
    def upper_bound(self) -> float:
        return math.sqrt(0.5 * math.log(self.N) * self.T)

    @property
    def lower_bound(self) -> float:
        return math.sqrt(self.vc * self.T / 8)

    def upper_ok(self) -> bool:
        """Every run's expected regret is within the multiplicative-weights bound."""
        return bool(np.all(self.expected_regrets <= self.upper_bound))

    def lower_ok(self) -> bool:
        """Mean regret reaches the lower bound within three standard errors."""
        s = self._summary(self.expected_regrets)
        return s["mean"] >= self.lower_bound - 3 * s["stderr"]

    def to_json(self) -> dict:
        return {
            "class_id": self.class_id, "label_source": self.label_source, "T": self.T,
            "N": self.N, "vc": self.vc, "eta": self.eta, "seed": self.seed,
            "trials": len(self.trials),
            "regret": self._summary(self.regrets),
            "expected_regret": self._summary(self.expected_regrets),
            "upper_bound": self.upper_bound, "lower_bound": self.lower_bound,
            "checks": self.checks(),
        }

    def checks(self) -> dict:
        out = {"upper_bound_every_run": self.upper_ok()}
        if self.label_source == "bernoulli":  # the lower bound is about random labels
            out["lower_bound_mean_3se"] = self.lower_ok()
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "alg_loss", "expected_loss", "best_loss", "regret", "expected_regret"])
        for i, r in enumerate(self.trials):
            w.writerow([i, r.alg_loss, repr(r.expected_loss), r.best_loss,
                        r.alg_loss - r.best_loss, repr(r.expected_loss - r.best_loss)])
        return buf.getvalue()


def run_agnostic(cls: ConceptClass, sample: SampleMultiset, label_source: str = "bernoulli",
                 trials: int = 100, seed: int = 0, eta: float | None = None,
                 fixed: Sequence[int] | None = None, script: Callable | None = None,
                 workers: int = 1) -> RegretReport:
    """Run multiplicative weights over the projected experts for ``trials`` independent trials.

    Trial ``i`` draws from generators keyed by ``(seed, i, stream)``, so results
    do not depend on the order or the process in which trials run.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    label_source = ALIASES.get(label_source, label_source)
    pool = project(cls, sample)
    if pool.N == 0 or pool.T == 0:
        raise ValueError("empty expert pool")
    if eta is None:
        eta = default_eta(pool.N, pool.T)
    if eta < 0:
        raise ValueError("eta must be non-negative")
    if label_source == "fixed":
        if fixed is None or len(fixed) != pool.T or any(v not in (0, 1) for v in fixed):
            raise ValueError(f"fixed labels must be {pool.T} values in {{0, 1}}")
    _make_source(label_source, pool, seed, 0, fixed, script)  # validate the name early
    rep = RegretReport(cls.name, label_source, pool.T, pool.N, pool.vc, eta, seed)
    if workers > 1 and script is None and trials > 1:
        idx = list(range(trials))
        size = math.ceil(trials / workers)
        chunks = [idx[i:i + size] for i in range(0, trials, size)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for res in ex.map(_trial_chunk, [(pool, label_source, eta, seed, c, fixed)
                                             for c in chunks]):
                rep.trials.extend(res)
    else:
        for i in range(trials):
            src = _make_source(label_source, pool, seed, i, fixed, script)
            rep.trials.append(_run_trial(pool, src, eta, seed, i))
    return rep


def lower_bound_instance(cls: ConceptClass, k: int) -> SampleMultiset:
    """``k`` consecutive copies of each point of the first largest shattered set."""
    if k < 1:
        raise ValueError("k must be >= 1")
    S = shattered_set(cls)
    if not S:
        raise ValueError("the class shatters no point")
    return SampleMultiset(tuple(p for p in S for _ in range(k)))


def parse_sample(spec: str, cls: ConceptClass) -> SampleMultiset:
    """``all`` | ``repeat:<k>`` | ``lowerbound:<k>`` | ``points:<i>,<j>,...``"""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "all" and not arg:
            return SampleMultiset(tuple(range(cls.num_points)))
        if kind == "repeat":
            return SampleMultiset(tuple(p for p in range(cls.num_points) for _ in range(int(arg))))
        if kind == "lowerbound":
            return lower_bound_instance(cls, int(arg))
        if kind == "points":
            return SampleMultiset(tuple(int(v) for v in arg.split(",")))
    except ValueError as e:
        raise ValueError(f"bad sample spec {spec!r}: {e}") from None
    raise ValueError(f"bad sample spec {spec!r}; use all, repeat:k, lowerbound:k or points:i,j,...")


def khinchine_check(k: int, trials: int = 20000, seed: int = 0) -> dict:
    """Monte-Carlo ``E|r - k/2|`` for ``r ~ Bin(k, 1/2)`` against ``sqrt(k/8)``."""
    rng = np.random.default_rng([seed, k])
    r = rng.binomial(k, 0.5, size=trials)
    dev = np.abs(r - k / 2)
    mean = float(dev.mean())
    se = float(dev.std(ddof=1) / math.sqrt(trials))
    bound = math.sqrt(k / 8)
    return {"k": k, "mean_abs_dev": mean, "stderr": se, "bound": bound,
            "ok": mean >= bound - 3 * se}
