"""Classical backends that decide Boolean satisfiability of a system.

The contract: given a BooleanSystem, decide whether some 0/1 assignment makes
every equation evaluate to exactly 0 over Z, and produce one witness if so.
Two complete backends are provided (exhaustive Gray-code enumeration and
backtracking with propagation), plus pseudo-Boolean OPB export for external
solvers and a verifying importer for their solution lines.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Iterable, Optional

from .encode import BooleanSystem
from .errors import ExternalSolverMismatch, MissingBits, ParseError

log = logging.getLogger(__name__)

EXHAUSTIVE = "Exhaustive"
BACKTRACKING = "Backtracking"
EXTERNAL = "External"

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


@dataclass
class SolveOutcome:
    status: str
    assignment: Optional[dict[int, int]] = None
    reason: Optional[str] = None

    @property
    def is_sat(self) -> bool:
        return self.status == SAT

    @property
    def is_unsat(self) -> bool:
        return self.status == UNSAT


@dataclass
class BackendConfig:
    backend: str = BACKTRACKING
    var_limit: int = 30
    time_limit: float = 60.0
    seed: int = 0
    # accepted for interface parity with probabilistic solvers; the exact
    # backends here ignore it
    epsilon: Optional[float] = None


def _compile(sys: BooleanSystem):
    """Equations as (constant, [(coeff, vars tuple), ...]) with int coefficients."""
    eqs = []
    for eq in sys.equations:
        const = 0
        terms = []
        for mono, c in eq.sorted_terms():
            if mono.degree() == 0:
                const += int(c)
            else:
                terms.append((int(c), mono.variables()))
        eqs.append((const, terms))
    return eqs


def evaluate(sys: BooleanSystem, assignment: dict[int, int]) -> list[int]:
    """Integer residual of every equation; all-zero means the assignment solves."""
    out = []
    for const, terms in _compile(sys):
        total = const
        for c, vs in terms:
            prod = 1
            for v in vs:
                if v not in assignment:
                    raise MissingBits(f"bit {v} unassigned")
                if assignment[v] == 0:
                    prod = 0
                    break
            total += c * prod
        out.append(total)
    return out


def is_solution(sys: BooleanSystem, assignment: dict[int, int]) -> bool:
    return all(r == 0 for r in evaluate(sys, assignment))


# -- exhaustive backend ----------------------------------------------------------


def _exhaustive(sys: BooleanSystem, cfg: BackendConfig) -> SolveOutcome:
    n = len(sys.registry)
    if n > cfg.var_limit:
        return SolveOutcome(UNKNOWN, reason=f"too many variables ({n} > {cfg.var_limit})")
    eqs = _compile(sys)
    ids = [v.id for v in sys.registry.vars]
    deadline = time.monotonic() + cfg.time_limit
    assign = {v: 0 for v in ids}
    for i in range(1 << n):
        if i % 4096 == 0 and time.monotonic() > deadline:
            return SolveOutcome(UNKNOWN, reason="timeout")
        gray = i ^ (i >> 1)
        for j, v in enumerate(ids):
            assign[v] = (gray >> j) & 1
        ok = True
        for const, terms in eqs:
            total = const
            for c, vs in terms:
                prod = 1
                for v in vs:
                    if assign[v] == 0:
                        prod = 0
                        break
                total += c * prod
            if total != 0:
                ok = False
                break
        if ok:
            return SolveOutcome(SAT, dict(assign))
    return SolveOutcome(UNSAT)


# -- backtracking backend ---------------------------------------------------------


class _Timeout(Exception):
    pass


class _Search:
    """DFS over Boolean assignments with unit propagation and interval pruning.

    Variables are tried most-occurring first; values in order 0 then 1, so the
    witness is deterministic.  Pruning bounds each equation by the sum of
    per-term attainable minima and maxima, which is exact for multilinear
    terms.
    """

    def __init__(self, sys: BooleanSystem, deadline: float):
        self.sys = sys
        self.deadline = deadline
        self.eqs = _compile(sys)
        self.ids = [v.id for v in sys.registry.vars]
        occ: dict[int, int] = {v: 0 for v in self.ids}
        self.var_eqs: dict[int, list[int]] = {v: [] for v in self.ids}
        for idx, (_, terms) in enumerate(self.eqs):
            seen = set()
            for _, vs in terms:
                for v in vs:
                    occ[v] = occ.get(v, 0) + 1
                    if v not in seen:
                        seen.add(v)
                        self.var_eqs.setdefault(v, []).append(idx)
        self.order = sorted(self.ids, key=lambda v: (-occ.get(v, 0), v))
        self.assign: dict[int, int] = {}
        self.steps = 0

    def _tick(self):
        self.steps += 1
        if self.steps % 2048 == 0 and time.monotonic() > self.deadline:
            raise _Timeout

    LOCAL_ENUM_BITS = 7  # exhaustively analyze equations with at most this many free bits

    def _reduce(self, idx):
        """(constant, residual terms, lo, hi) of equation idx under the partial assignment."""
        const, terms = self.eqs[idx]
        c0 = const
        live = []
        lo = hi = 0
        for c, vs in terms:
            prod_vars = []
            dead = False
            for v in vs:
                val = self.assign.get(v)
                if val == 0:
                    dead = True
                    break
                if val is None:
                    prod_vars.append(v)
            if dead:
                continue
            if not prod_vars:
                c0 += c
            else:
                live.append((c, prod_vars))
                if c > 0:
                    hi += c
                else:
                    lo += c
        return c0, live, c0 + lo, c0 + hi

    def _local_forced(self, c0, live, free):
        """Enumerate the equation locally: None if unsatisfiable, else bits that
        take the same value in every local solution."""
        bits = sorted(free)
        pos = {v: i for i, v in enumerate(bits)}
        masks = []
        for c, vs in live:
            m = 0
            for v in vs:
                m |= 1 << pos[v]
            masks.append((c, m))
        always_one = (1 << len(bits)) - 1
        always_zero = (1 << len(bits)) - 1
        feasible = False
        for pattern in range(1 << len(bits)):
            total = c0
            for c, m in masks:
                if pattern & m == m:
                    total += c
            if total == 0:
                feasible = True
                always_one &= pattern
                always_zero &= ~pattern
                if not always_one and not always_zero:
                    break
        if not feasible:
            return None
        out = []
        for v in bits:
            b = 1 << pos[v]
            if always_one & b:
                out.append((v, 1))
            elif always_zero & b:
                out.append((v, 0))
        return out

    def _propagate(self, touched: Iterable[int]) -> Optional[list[int]]:
        """Returns the list of vars forced (for undo), or None on conflict."""
        forced: list[int] = []
        queue = list(dict.fromkeys(touched))
        qi = 0
        while qi < len(queue):
            self._tick()
            idx = queue[qi]
            qi += 1
            c0, live, lo, hi = self._reduce(idx)
            if lo > 0 or hi < 0:
                for v in forced:
                    del self.assign[v]
                return None
            if not live:
                continue
            units = []
            free = {v for _, vs in live for v in vs}
            if len(free) == 1:
                v = next(iter(free))
                a = sum(c for c, _ in live)
                # equation is a*v + c0 = 0 with v Boolean
                if a == 0:
                    if c0 != 0:
                        for w in forced:
                            del self.assign[w]
                        return None
                elif c0 == 0:
                    units.append((v, 0))
                elif a + c0 == 0:
                    units.append((v, 1))
                else:
                    for w in forced:
                        del self.assign[w]
                    return None
            elif len(live) == 1:
                c, vs = live[0]
                if -c0 == c:
                    units.extend((v, 1) for v in vs)
                elif c0 != 0:
                    # c*prod = -c0 with -c0 not in {0, c}: impossible
                    for w in forced:
                        del self.assign[w]
                    return None
            elif len(free) <= self.LOCAL_ENUM_BITS:
                local = self._local_forced(c0, live, free)
                if local is None:
                    for w in forced:
                        del self.assign[w]
                    return None
                units.extend(local)
            for v, val in units:
                cur = self.assign.get(v)
                if cur is None:
                    self.assign[v] = val
                    forced.append(v)
                    for nxt in self.var_eqs.get(v, ()):
                        if nxt not in queue[qi:]:
                            queue.append(nxt)
                elif cur != val:
                    for w in forced:
                        del self.assign[w]
                    return None
        return forced

    def solutions(self, project: Optional[set[int]] = None):
        """Yield solutions as assignment dicts.

        With `project`, yields one witness per distinct assignment of the
        projected variables and skips the rest of each completion subtree.
        """
        forced0 = self._propagate(range(len(self.eqs)))
        if forced0 is None:
            return
        order = self.order
        if project is not None:
            order = [v for v in self.order if v in project] + [
                v for v in self.order if v not in project
            ]
        stack: list[tuple[int, int, list[int]]] = []

        def next_var():
            for v in order:
                if v not in self.assign:
                    return v
            return None

        while True:
            self._tick()
            v = next_var()
            if v is None:
                yield dict(self.assign)
                if project is not None:
                    # leave the completion subtree: unwind to the last projected choice
                    while stack and stack[-1][0] not in project:
                        var, val, forced = stack.pop()
                        for w in forced:
                            del self.assign[w]
                        del self.assign[var]
                # fall through to backtrack
            else:
                self.assign[v] = 0
                forced = self._propagate(self.var_eqs.get(v, ()))
                if forced is not None:
                    stack.append((v, 0, forced))
                    continue
                del self.assign[v]
                self.assign[v] = 1
                forced = self._propagate(self.var_eqs.get(v, ()))
                if forced is not None:
                    stack.append((v, 1, forced))
                    continue
                del self.assign[v]
            # backtrack
            progressed = False
            while stack:
                var, val, forced = stack.pop()
                for w in forced:
                    del self.assign[w]
                del self.assign[var]
                if val == 0:
                    self.assign[var] = 1
                    forced = self._propagate(self.var_eqs.get(var, ()))
                    if forced is not None:
                        stack.append((var, 1, forced))
                        progressed = True
                        break
                    del self.assign[var]
            if not progressed and not stack:
                return


def _backtracking(sys: BooleanSystem, cfg: BackendConfig) -> SolveOutcome:
    deadline = time.monotonic() + cfg.time_limit
    search = _Search(sys, deadline)
    try:
        for sol in search.solutions():
            full = {v.id: sol.get(v.id, 0) for v in sys.registry.vars}
            return SolveOutcome(SAT, full)
        return SolveOutcome(UNSAT)
    except _Timeout:
        return SolveOutcome(UNKNOWN, reason="timeout")


def solve(sys: BooleanSystem, cfg: Optional[BackendConfig] = None) -> SolveOutcome:
    """Decide satisfiability and return one witness; complete within the limits.

    Sat outcomes are re-verified against the equations before being returned.
    """
    cfg = cfg or BackendConfig()
    if not sys.equations:
        base = {v.id: 0 for v in sys.registry.vars}
        return SolveOutcome(SAT, base)
    if cfg.backend == EXHAUSTIVE:
        out = _exhaustive(sys, cfg)
    elif cfg.backend == BACKTRACKING:
        out = _backtracking(sys, cfg)
    elif cfg.backend == EXTERNAL:
        return SolveOutcome(UNKNOWN, reason="external backend needs the OPB export workflow")
    else:
        raise ValueError(f"unknown backend {cfg.backend!r}")
    if out.is_sat:
        assert is_solution(sys, out.assignment), "backend returned a non-solution"
    return out


def all_solutions(
    sys: BooleanSystem,
    cfg: Optional[BackendConfig] = None,
    project: Optional[set[int]] = None,
    limit: Optional[int] = None,
):
    """Enumerate solutions (optionally projected onto a variable subset)."""
    cfg = cfg or BackendConfig()
    deadline = time.monotonic() + cfg.time_limit
    if not sys.equations:
        if project is not None and not project:
            yield {}
            return
        vars_ = sorted(project) if project is not None else [v.id for v in sys.registry.vars]
        for i in range(1 << len(vars_)):
            yield {v: (i >> j) & 1 for j, v in enumerate(vars_)}
        return
    search = _Search(sys, deadline)
    count = 0
    for sol in search.solutions(project=project):
        if project is not None:
            yield {v: sol.get(v, 0) for v in project}
        else:
            yield {v.id: sol.get(v.id, 0) for v in sys.registry.vars}
        count += 1
        if limit is not None and count >= limit:
            return


# -- pseudo-Boolean export / import ---------------------------------------------


def export_opb(sys: BooleanSystem) -> tuple[str, dict]:
    """Standard nonlinear pseudo-Boolean equalities plus a name sidecar.

    Variables are named x1..xN in registry order; each equation becomes
    `c1 x_i x_j ... = rhs ;` with the constant moved to the right-hand side.
    """
    index = {v.id: i + 1 for i, v in enumerate(sys.registry.vars)}
    lines = [f"* #variable= {len(index)} #constraint= {len(sys.equations)}"]
    for eq in sys.equations:
        parts = []
        rhs = 0
        for mono, c in eq.sorted_terms():
            c = int(c)
            if mono.degree() == 0:
                rhs -= c
                continue
            lits = " ".join(f"x{index[v]}" for v in mono.variables())
            parts.append(f"{c:+d} {lits}")
        if not parts:
            # constant equation: emit a trivial or contradictory line on x1
            parts.append("+0 x1" if index else "+0 x0")
        lines.append(" ".join(parts) + f" = {rhs} ;")
    sidecar = {
        "names": {f"x{index[v.id]}": v.id for v in sys.registry.vars},
        "classes": {f"x{index[v.id]}": v.cls for v in sys.registry.vars},
    }
    return "\n".join(lines) + "\n", sidecar


def import_solution(line: str, sidecar: dict) -> dict[int, int]:
    """Parse a PB solver `v` line into an assignment over the registry.

    Unmentioned variables default to 0 (with a logged warning).  The caller is
    expected to confirm with evaluate() before trusting the assignment.
    """
    tokens = line.split()
    if not tokens or tokens[0] != "v":
        raise ParseError("expected a line starting with 'v'")
    names = sidecar["names"]
    assignment = {vid: None for vid in names.values()}
    for tok in tokens[1:]:
        neg = tok.startswith("-") or tok.startswith("~")
        name = tok[1:] if neg else tok
        if name not in names:
            raise ParseError(f"unknown variable {name!r} in solution line")
        assignment[names[name]] = 0 if neg else 1
    missing = [vid for vid, val in assignment.items() if val is None]
    if missing:
        log.warning("solution line omits %d variables; defaulting them to 0", len(missing))
        for vid in missing:
            assignment[vid] = 0
    return assignment


def confirm_external(sys: BooleanSystem, assignment: dict[int, int]) -> dict[int, int]:
    """Re-evaluate an imported assignment; raise if it is not a solution."""
    residuals = evaluate(sys, assignment)
    if any(residuals):
        raise ExternalSolverMismatch(f"nonzero residuals {residuals[:5]}...")
    return assignment
