"""Heldout predictive checks, pairwise nulls, and study orchestration.

A heldout check locates the diagnostic of x_out within the diagnostics of
replicates drawn from the x_in fit, with the diagnostic itself anchored on
x_val.  A pairwise null asks whether replicates from a second model are
distinguishable from the first model's own replicates under the first
model's diagnostic.  The study runs all checks, filters to passers, and
classifies every passing pair.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import (VERDICT_A_DOMINATES, VERDICT_B_DOMINATES,
                   VERDICT_COMPLEMENTARY, VERDICT_EQUIVALENT, CheckOutcome,
                   DataSplit, PpnOutcome, StudyReport, pass_fail)
from .diagnostics import DiagnosticSpec, validation_diagnostic
from .errors import CheckError, ParameterError, PpnError
from .estimators import sym_kl_estimate

MODE_FULL = "full"
MODE_CHAIN = "chain"


@dataclass(frozen=True)
class StudyConfig:
    """Knobs shared by every check in a study."""

    R: int = 200
    alpha: float = 0.1
    tau: float = 1.0
    mode: str = MODE_FULL

    def __post_init__(self):
        if self.R < 1:
            raise ParameterError("R must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError("alpha must lie in (0, 1)")
        if self.tau < 0:
            raise ParameterError("tau must be nonnegative")
        if self.mode not in (MODE_FULL, MODE_CHAIN):
            raise ParameterError(f"unknown study mode {self.mode!r}")


def _stage(model_id, stage, fn, *args):
    try:
        return fn(*args)
    except PpnError as exc:
        raise CheckError(model_id, stage, exc) from exc


def _diag_samples(reps, spec, draws_val, seed, owner_id, source_id):
    vals = np.empty(len(reps))
    for r, rep in enumerate(reps):
        stream = seed.stream(owner_id, "diag", source_id, r)
        vals[r] = validation_diagnostic(rep, spec, draws_val, stream)
    return vals


def heldout_predictive_check(split: DataSplit, model, spec=None, R=200,
                             alpha=0.1, seed=None, fit_in=None,
                             draws_val=None, reps=None) -> CheckOutcome:
    """Locate x_out's diagnostic within replicates of the x_in fit.

    Already-computed fits or replicate sets may be passed in so a study can
    share them; given the same seed the results are identical either way.
    """
    if spec is None:
        spec = DiagnosticSpec(model)
    if fit_in is None:
        fit_in = _stage(model.id, "fit x_in", model.fit, split.x_in,
                        seed.stream(model.id, "fit-in"))
    if draws_val is None:
        draws_val = _stage(model.id, "fit x_val", model.fit, split.x_val,
                           seed.stream(model.id, "fit-val"))
    if reps is None:
        reps = _stage(model.id, "replicate", model.replicate, fit_in,
                      split.x_out, R, seed.stream(model.id, "rep"))
    d_obs = _stage(model.id, "observed diagnostic", validation_diagnostic,
                   split.x_out, spec, draws_val,
                   seed.stream(model.id, "diag", "observed"))
    d_rep = _stage(model.id, "replicate diagnostics", _diag_samples,
                   reps, spec, draws_val, seed, model.id, model.id)
    p = float((d_rep > d_obs).mean())
    return CheckOutcome(p, pass_fail(p, alpha), d_rep, d_obs, model.id)


def posterior_predictive_pvalue(x_obs, model, spec=None, R=200,
                                alpha=0.1, seed=None) -> CheckOutcome:
    """Classical double-use p-value: reference and anchor share x_obs.

    Provided for comparison studies only; unlike the heldout check it is
    not calibrated.
    """
    if spec is None:
        spec = DiagnosticSpec(model)
    fit = _stage(model.id, "fit x_obs", model.fit, x_obs,
                 seed.stream(model.id, "fit-obs"))
    reps = _stage(model.id, "replicate", model.replicate, fit, x_obs, R,
                  seed.stream(model.id, "rep"))
    d_obs = _stage(model.id, "observed diagnostic", validation_diagnostic,
                   x_obs, spec, fit, seed.stream(model.id, "diag", "observed"))
    d_rep = _stage(model.id, "replicate diagnostics", _diag_samples,
                   reps, spec, fit, seed, model.id, model.id)
    p = float((d_rep > d_obs).mean())
    return CheckOutcome(p, pass_fail(p, alpha), d_rep, d_obs, model.id)


def ppn_check(split: DataSplit, model_a, model_b, spec_a=None, R=200,
              tau=1.0, seed=None, verified_passed=False, draws_val_a=None,
              reps_a=None, reps_b=None, samples_a=None) -> PpnOutcome:
    """Can replicates from model_b pass for model_a's own replicates?

    Both replicate sets are conditioned on x_in and scored by model_a's
    validation diagnostic; closeness is the symmetrized KL between the two
    diagnostic sample sets.
    """
    if spec_a is None:
        spec_a = DiagnosticSpec(model_a)
    if not verified_passed:
        warnings.warn("pairwise null run without verified heldout passes; "
                      "interpret with care", stacklevel=2)
    if draws_val_a is None:
        draws_val_a = _stage(model_a.id, "fit x_val", model_a.fit, split.x_val,
                             seed.stream(model_a.id, "fit-val"))
    if samples_a is None:
        if reps_a is None:
            fit_a = _stage(model_a.id, "fit x_in", model_a.fit, split.x_in,
                           seed.stream(model_a.id, "fit-in"))
            reps_a = _stage(model_a.id, "replicate", model_a.replicate, fit_a,
                            split.x_out, R, seed.stream(model_a.id, "rep"))
        samples_a = _stage(model_a.id, "replicate diagnostics", _diag_samples,
                           reps_a, spec_a, draws_val_a, seed, model_a.id, model_a.id)
    if reps_b is None:
        fit_b = _stage(model_b.id, "fit x_in", model_b.fit, split.x_in,
                       seed.stream(model_b.id, "fit-in"))
        reps_b = _stage(model_b.id, "replicate", model_b.replicate, fit_b,
                        split.x_out, R, seed.stream(model_b.id, "rep"))
    samples_b = _stage(model_a.id, "cross diagnostics", _diag_samples,
                       reps_b, spec_a, draws_val_a, seed, model_a.id, model_b.id)
    sym_kl = sym_kl_estimate(samples_a, samples_b)
    return PpnOutcome(sym_kl, sym_kl <= tau, samples_a, samples_b,
                      model_a.id, model_b.id)


def _verdict(fooled_by_b: bool, fooled_by_a: bool) -> str:
    if fooled_by_b and fooled_by_a:
        return VERDICT_EQUIVALENT
    if fooled_by_a and not fooled_by_b:
        # a's data passes b's check but not vice versa: a's check sees more
        return VERDICT_A_DOMINATES
    if fooled_by_b and not fooled_by_a:
        return VERDICT_B_DOMINATES
    return VERDICT_COMPLEMENTARY


def ppn_study(split: DataSplit, models, specs=None, config: StudyConfig = None,
              seed=None) -> StudyReport:
    """Run every heldout check, then pairwise nulls among the passers.

    Full mode compares every ordered passing pair; chain mode only
    consecutive passers, with the later model owning the diagnostic.
    """
    if len(models) < 2:
        raise ParameterError("a study needs at least two models")
    if config is None:
        config = StudyConfig()
    if specs is None:
        specs = [DiagnosticSpec(m) for m in models]
    spec_of = {m.id: s for m, s in zip(models, specs)}
    fits_in, draws_val, reps = {}, {}, {}
    for model in models:
        fits_in[model.id] = _stage(model.id, "fit x_in", model.fit, split.x_in,
                                   seed.stream(model.id, "fit-in"))
        draws_val[model.id] = _stage(model.id, "fit x_val", model.fit,
                                     split.x_val, seed.stream(model.id, "fit-val"))
        reps[model.id] = _stage(model.id, "replicate", model.replicate,
                                fits_in[model.id], split.x_out, config.R,
                                seed.stream(model.id, "rep"))
    diagonal = []
    for model in models:
        diagonal.append(heldout_predictive_check(
            split, model, spec_of[model.id], config.R, config.alpha, seed,
            fits_in[model.id], draws_val[model.id], reps[model.id]))
    passed = {c.model_id for c in diagonal if c.passed}
    survivors = [m for m in models if m.id in passed]
    samples_own = {c.model_id: c.diagnostic_replicates
                   for c in diagonal if c.passed}
    if config.mode == MODE_CHAIN:
        pairs_to_run = [(survivors[i + 1], survivors[i])
                        for i in range(len(survivors) - 1)]
    else:
        pairs_to_run = [(a, b) for a in survivors for b in survivors if a is not b]
    off_diagonal = []
    outcome = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for owner, source in pairs_to_run:
            res = ppn_check(split, owner, source, spec_of[owner.id], config.R,
                            config.tau, seed, draws_val_a=draws_val[owner.id],
                            reps_b=reps[source.id],
                            samples_a=samples_own[owner.id])
            off_diagonal.append(res)
            outcome[(owner.id, source.id)] = res
    verdicts = []
    if config.mode == MODE_FULL:
        for i, a in enumerate(survivors):
            for b in survivors[i + 1:]:
                verdicts.append({
                    "a": a.id,
                    "b": b.id,
                    "class": _verdict(outcome[(a.id, b.id)].fools,
                                      outcome[(b.id, a.id)].fools),
                })
    return StudyReport(tuple(m.id for m in models), config.alpha, config.tau,
                       tuple(diagonal), tuple(off_diagonal), tuple(verdicts))
