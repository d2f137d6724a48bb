"""Simulation engine for verifier-prover runs.

Global configurations are (state, head, comm, tape) tuples carried in a
sparse amplitude vector.  One verifier step applies the per-symbol table
and moves the head; the halting projection then banks accepting and
rejecting mass; the prover acts between verifier steps.  One-way runs
execute exactly |x| + 2 verifier steps; two-way runs stop when the live
mass is gone, the halted mass passes the halt target, or the step budget
runs out.  Truncated mass is reported as residual and never renormalized.
"""

import time
from dataclasses import dataclass, field

from .automata import (
    BLANK, padded_input,
)
from .errors import (
    BudgetError, EngineError, FamilyInadequacyError, ValidationError,
)
from .linalg import SparseVector
from .provers import IdentityProver, MessageSchedule, enumerate_schedules


@dataclass
class EngineConfig:
    """Run-time knobs shared by all simulation entry points."""

    tau: float = 1e-9
    prune: float = 1e-12
    max_steps: int = None
    tape_trunc: int = None
    halt_mass_target: float = None
    record_steps: bool = False
    check_conservation: bool = False
    count_interactions: bool = False


def resolve_max_steps(verifier, x, cfg=None):
    """Step budget: one-way runs take exactly |x| + 2 steps; two-way runs
    honour an explicit override, then the verifier's suggested linear
    form, then a 4*(|x|+2) default.
    """
    cells = len(x) + 2
    if not verifier.two_way:
        return cells
    if cfg is not None and cfg.max_steps is not None:
        return int(cfg.max_steps)
    hint = verifier.metadata.get("suggested_max_steps")
    if isinstance(hint, dict):
        return int(hint.get("per_cell", 0)) * cells + int(hint.get("base", 0))
    if isinstance(hint, (int, float)):
        return int(hint)
    return 4 * cells


@dataclass
class StepRecord:
    step: int
    live: list
    p_acc: float
    p_rej: float
    query_mass: float


@dataclass
class RunResult:
    input: str
    prover_id: str
    p_acc: float
    p_rej: float
    residual: float
    steps: int
    interactions: int = None
    budget_exhausted: bool = False
    step_records: list = None
    wallclock: float = 0.0

    @property
    def acceptance_bounds(self):
        """(certain, possible) acceptance probability given the residual."""
        lo = min(max(self.p_acc, 0.0), 1.0)
        return lo, min(1.0, lo + max(self.residual, 0.0))


def _sorted_live(vector):
    return sorted(vector.items(), key=lambda kv: (
        kv[0][0], kv[0][1], kv[0][2], kv[0][3]))


def run_protocol(verifier, x, prover=None, cfg=None):
    """Simulate one interactive run and return a RunResult."""
    cfg = cfg or EngineConfig()
    prover = prover or IdentityProver()
    tape = padded_input(x, verifier.input_alphabet)
    length = len(tape)
    max_steps = resolve_max_steps(verifier, x, cfg)
    trunc = cfg.tape_trunc if cfg.tape_trunc is not None else max_steps + 2
    halt_target = (
        cfg.halt_mass_target if cfg.halt_mass_target is not None
        else 1.0 - 0.5 * cfg.tau
    )
    started = time.perf_counter()

    live = SparseVector({(verifier.initial, 0, BLANK, ()): 1.0 + 0j},
                        prune_threshold=cfg.prune)
    counts = {(verifier.initial, 0, BLANK, ()): 0} if cfg.count_interactions else None
    p_acc = 0.0
    p_rej = 0.0
    pruned_mass = 0.0
    max_queries = 0
    records = [] if cfg.record_steps else None
    steps = 0
    budget_exhausted = False

    for t in range(1, max_steps + 1):
        steps = t
        # verifier step + halting projection
        nxt = SparseVector(prune_threshold=cfg.prune)
        nxt_counts = {} if counts is not None else None
        for (q, k, g, y), a in live.items():
            row = verifier.row(tape[k], q, g)
            if row is None:
                raise ValidationError(
                    "incomplete verifier table at (%r, %r) on %r"
                    % (q, g, tape[k])
                )
            base = counts[(q, k, g, y)] if counts is not None else 0
            for amp, q2, g2 in row:
                k2 = (k + verifier.head_dir[(q2, g2)]) % length
                key = (q2, k2, g2, y)
                nxt.add(key, a * amp)
                if nxt_counts is not None and not verifier.is_halting(q2):
                    gain = 1 if g2 != BLANK else 0
                    prev = nxt_counts.get(key, -1)
                    nxt_counts[key] = max(prev, base + gain)
        survivors = SparseVector(prune_threshold=cfg.prune)
        query_mass = 0.0
        for key, a in nxt.items():
            q2 = key[0]
            w = (a * a.conjugate()).real
            if verifier.is_accepting(q2):
                p_acc += w
            elif verifier.is_rejecting(q2):
                p_rej += w
            else:
                survivors.add(key, a)
                if key[2] != BLANK:
                    query_mass += w
        before = survivors.norm_sq()
        survivors.prune()
        pruned_mass += max(before - survivors.norm_sq(), 0.0)
        live = survivors
        if counts is not None:
            counts = {
                key: c for key, c in nxt_counts.items() if key in live
            }
            if counts:
                max_queries = max(max_queries, max(counts.values()))
        if cfg.check_conservation:
            total = p_acc + p_rej + live.norm_sq() + pruned_mass
            if abs(total - 1.0) > cfg.tau:
                raise EngineError(
                    "probability not conserved at step %d: total %.12g" % (t, total)
                )
        if records is not None:
            records.append(StepRecord(
                step=t, live=_sorted_live(live), p_acc=p_acc, p_rej=p_rej,
                query_mass=query_mass,
            ))
        if t == max_steps:
            budget_exhausted = bool(live.amplitudes) and verifier.two_way
            break
        if verifier.two_way:
            if not live.amplitudes:
                break
            if p_acc + p_rej >= halt_target:
                break
        # prover round t
        nxt = SparseVector(prune_threshold=cfg.prune)
        nxt_counts = {} if counts is not None else None
        for (q, k, g, y), a in live.items():
            base = counts[(q, k, g, y)] if counts is not None else 0
            for pamp, g2, y2 in prover.apply(t, g, y):
                if len(y2) > trunc:
                    raise BudgetError(
                        "prover history exceeded the %d-record truncation" % trunc
                    )
                key = (q, k, g2, y2)
                nxt.add(key, a * pamp)
                if nxt_counts is not None:
                    nxt_counts[key] = max(nxt_counts.get(key, -1), base)
        nxt.prune()
        live = nxt
        if counts is not None:
            counts = nxt_counts

    return RunResult(
        input=x, prover_id=prover.prover_id, p_acc=p_acc, p_rej=p_rej,
        residual=live.norm_sq(), steps=steps,
        interactions=max_queries if cfg.count_interactions else None,
        budget_exhausted=budget_exhausted,
        step_records=records, wallclock=time.perf_counter() - started,
    )


def interaction_count(verifier, x, prover, cfg=None):
    """Largest number of non-blank-comm verifier steps along any live path."""
    cfg = cfg or EngineConfig()
    cfg = EngineConfig(**{**cfg.__dict__, "count_interactions": True})
    return run_protocol(verifier, x, prover, cfg).interactions


# -- proverless comm-projection runs ----------------------------------------


@dataclass
class MCompTrace:
    input: str
    masses: list
    p_acc: float
    p_rej: float
    residual: float
    steps: int
    step_records: list = None


def run_mcomp(verifier, x, cfg=None):
    """Run the verifier alone, measuring the comm cell after every step.

    After each verifier step and halting projection, the squared norm of
    the live component with a non-blank comm cell is recorded as that
    step's query mass, then that component is projected out (discarded,
    not renormalized).  Only one-way verifiers are supported.  The masses
    list starts with a step-0 entry of 0.
    """
    if verifier.two_way:
        raise EngineError(
            "comm-projection runs are defined for one-way verifiers only"
        )
    cfg = cfg or EngineConfig()
    tape = padded_input(x, verifier.input_alphabet)
    length = len(tape)
    max_steps = length
    live = SparseVector({(verifier.initial, 0, BLANK): 1.0 + 0j},
                        prune_threshold=cfg.prune)
    masses = [0.0]
    p_acc = 0.0
    p_rej = 0.0
    records = [] if cfg.record_steps else None
    for t in range(1, max_steps + 1):
        nxt = SparseVector(prune_threshold=cfg.prune)
        for (q, k, g), a in live.items():
            row = verifier.row(tape[k], q, g)
            if row is None:
                raise ValidationError(
                    "incomplete verifier table at (%r, %r) on %r"
                    % (q, g, tape[k])
                )
            for amp, q2, g2 in row:
                k2 = (k + verifier.head_dir[(q2, g2)]) % length
                nxt.add((q2, k2, g2), a * amp)
        survivors = SparseVector(prune_threshold=cfg.prune)
        query_mass = 0.0
        for key, a in nxt.items():
            q2, _, g2 = key
            w = (a * a.conjugate()).real
            if verifier.is_accepting(q2):
                p_acc += w
            elif verifier.is_rejecting(q2):
                p_rej += w
            elif g2 != BLANK:
                query_mass += w
            else:
                survivors.add(key, a)
        survivors.prune()
        live = survivors
        masses.append(query_mass)
        if records is not None:
            records.append(StepRecord(
                step=t,
                live=sorted(live.items(), key=lambda kv: kv[0]),
                p_acc=p_acc, p_rej=p_rej, query_mass=query_mass,
            ))
    return MCompTrace(
        input=x, masses=masses, p_acc=p_acc, p_rej=p_rej,
        residual=live.norm_sq(), steps=max_steps, step_records=records,
    )


def query_weight(verifier, prefix, suffix, cfg=None):
    """Total query mass charged to the suffix cells of input prefix+suffix.

    Step t reads tape position t-1, so the suffix occupies steps
    len(prefix)+2 .. len(prefix)+len(suffix)+1 of the combined run.
    """
    trace = run_mcomp(verifier, prefix + suffix, cfg)
    lo = len(prefix) + 2
    hi = len(prefix) + len(suffix) + 1
    return float(sum(trace.masses[lo:hi + 1]))


# -- message-schedule optimum ------------------------------------------------


@dataclass
class ScheduleSweep:
    input: str
    best_p: float
    schedule: dict
    exact: bool
    method: str
    runs: int = 0


def _require_schedule_adequacy(verifier):
    for sym, table in verifier.rows.items():
        for (q, g), targets in table.items():
            if verifier.class_of(sym, q, g) == "completion":
                continue
            if len(targets) > 1:
                raise FamilyInadequacyError(
                    "verifier %r branches at (%r, %r) on %r: a message-schedule "
                    "sweep cannot certify an optimum over all provers; use the "
                    "protocol's own adversary family" % (verifier.name, q, g, sym)
                )


def announcement_map(verifier):
    """Map each live state to the single comm symbol its authored rows use.

    A verifier is *announced* when every live state q has authored rows
    under exactly one comm symbol A(q), and every authored component that
    targets a live state writes that state's symbol.  Every other live
    (state, comm) slot is then a reject-guard by construction, which is
    what makes message-schedule sweeps collapse: a write either repeats
    the announcement or sends that component into a guard.

    Returns the dict {state: symbol}.  Raises FamilyInadequacyError when
    the premise fails, naming the offending state or component.
    """
    sources = {}
    for sym, table in verifier.rows.items():
        for (q, g), targets in table.items():
            if verifier.class_of(sym, q, g) != "core":
                continue
            sources.setdefault(q, set()).add(g)
    announce = {}
    for q, symbols in sources.items():
        if len(symbols) != 1:
            raise FamilyInadequacyError(
                "state %r has authored rows under %d comm symbols %r; an "
                "announced verifier uses exactly one per state"
                % (q, len(symbols), sorted(symbols))
            )
        announce[q] = next(iter(symbols))
    for sym, table in verifier.rows.items():
        for (q, g), targets in table.items():
            if verifier.class_of(sym, q, g) != "core":
                continue
            for _amp, q2, g2 in targets:
                if verifier.is_halting(q2):
                    continue
                if announce.get(q2) != g2:
                    raise FamilyInadequacyError(
                        "component (%r, %r) -> (%r, %r) on %r writes %r but "
                        "the target state announces %r"
                        % (q, g, q2, g2, sym, g2, announce.get(q2))
                    )
    return announce


def best_schedule_acceptance(verifier, x, cfg=None, committed_only=False,
                             method="auto", enumeration_budget=200000):
    """Exact maximum acceptance over all fixed message schedules.

    For one-way verifiers whose live rows are branch-free the run has a
    single live configuration at each step, so a memoized game-tree walk
    over (step, state, head, comm) with the write chosen greedily per
    round is exactly the optimum over every schedule (and every adaptive
    prover).  Branching one-way verifiers raise FamilyInadequacyError.

    Two-way verifiers are covered when they are *announced* (see
    announcement_map): each round a schedule's write either repeats the
    current announcement, which changes nothing but the history record,
    or diverts that component into a reject-guard at the next step.
    History records already separate components with different
    announcements, so the surviving mass evolves exactly as under the
    do-nothing schedule and a diverted component only removes its own
    non-negative acceptance term.  The do-nothing schedule is therefore
    an exact optimum over all message schedules; the transparent prover
    (no history records at all) is run as well and the larger value is
    reported.  Non-announced two-way verifiers raise
    FamilyInadequacyError.
    """
    cfg = cfg or EngineConfig()
    if verifier.two_way:
        announcement_map(verifier)
        best = -1.0
        best_id = None
        residual = 0.0
        for prover in (MessageSchedule({}, prover_id="leave-all"),
                       IdentityProver()):
            result = run_protocol(verifier, x, prover, cfg)
            _lo, hi = result.acceptance_bounds
            residual = max(residual, result.residual)
            if hi > best:
                best = hi
                best_id = prover.prover_id
        return ScheduleSweep(
            input=x, best_p=float(best), schedule={}, exact=residual <= cfg.tau,
            method="announced-dominance:%s" % best_id, runs=2,
        )
    _require_schedule_adequacy(verifier)
    if method not in ("auto", "dp", "enumeration"):
        raise EngineError("unknown sweep method %r" % (method,))
    if method in ("auto", "dp"):
        return _schedule_dp(verifier, x, committed_only)
    return _schedule_enumeration(verifier, x, cfg, committed_only,
                                 enumeration_budget)


def _schedule_dp(verifier, x, committed_only):
    tape = padded_input(x, verifier.input_alphabet)
    length = len(tape)
    memo = {}
    choice = {}

    def value(t, q, k, g):
        key = (t, q, k, g)
        if key in memo:
            return memo[key]
        row = verifier.row(tape[k], q, g)
        amp, q2, g2 = row[0]
        if abs(abs(amp) - 1.0) > 1e-9:
            raise FamilyInadequacyError(
                "non-unimodular branch-free amplitude at (%r, %r)" % (q, g)
            )
        if verifier.is_accepting(q2):
            result = 1.0
        elif verifier.is_rejecting(q2):
            result = 0.0
        elif t == length:
            result = 0.0
        else:
            k2 = (k + verifier.head_dir[(q2, g2)]) % length
            if committed_only and g2 == BLANK:
                options = (BLANK,)
            else:
                options = verifier.comm_alphabet
            best, best_s = -1.0, None
            for s in options:
                v = value(t + 1, q2, k2, s)
                if v > best:
                    best, best_s = v, s
            choice[key] = (best_s, q2, g2)
            result = best
        memo[key] = result
        return result

    best = value(1, verifier.initial, 0, BLANK)
    # reconstruct one optimal schedule
    writes = {}
    t, q, k, g = 1, verifier.initial, 0, BLANK
    while (t, q, k, g) in choice:
        s, q2, g2 = choice[(t, q, k, g)]
        if s != g2:
            writes[t] = s
        k = (k + verifier.head_dir[(q2, g2)]) % length
        t, q, g = t + 1, q2, s
    return ScheduleSweep(
        input=x, best_p=float(best), schedule=writes, exact=True,
        method="dp", runs=len(memo),
    )


def _schedule_enumeration(verifier, x, cfg, committed_only, budget):
    best = -1.0
    best_writes = None
    runs = 0
    rounds = len(x) + 1
    for schedule in enumerate_schedules(
            verifier.comm_alphabet, rounds,
            committed_only=committed_only, budget=budget):
        result = run_protocol(verifier, x, schedule, cfg)
        runs += 1
        if result.p_acc > best:
            best = result.p_acc
            best_writes = dict(schedule.writes)
    return ScheduleSweep(
        input=x, best_p=float(best), schedule=best_writes, exact=True,
        method="enumeration", runs=runs,
    )


# -- family sweeps -----------------------------------------------------------


@dataclass
class FamilySweep:
    input: str
    best_lower: float
    best_upper: float
    rows: list = field(default_factory=list)

    def csv_rows(self):
        """(input, adversary id, p_acc lower, p_acc upper, interactions)."""
        out = []
        for result in self.rows:
            lo, hi = result.acceptance_bounds
            out.append((result.input, result.prover_id, lo, hi,
                        result.interactions))
        return out


def sweep_family(verifier, x, provers, cfg=None):
    """Run each prover in the family; report the worst-case acceptance."""
    cfg = cfg or EngineConfig()
    rows = []
    best_lower = 0.0
    best_upper = 0.0
    for prover in provers:
        result = run_protocol(verifier, x, prover, cfg)
        lo, hi = result.acceptance_bounds
        rows.append(result)
        best_lower = max(best_lower, lo)
        best_upper = max(best_upper, hi)
    return FamilySweep(input=x, best_lower=best_lower,
                       best_upper=best_upper, rows=rows)
