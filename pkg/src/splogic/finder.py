"""Bounded exhaustive model search for both logics, plus the
equisatisfiability harness built on the translation.

The search assigns interpretation "cells" (one membership bit per
predicate/tuple/precisification, one element choice per constant and
precisification, one bit per standpoint membership) and evaluates the
query three-valued after each assignment: definitely-false prunes the
branch, definitely-true completes the remaining cells with defaults,
and an unknown result names a blocking cell to branch on next.  Domains
grow from size 1, false comes before true, and smaller elements come
first, so the first model found is canonical for the enumeration order;
the outcome is independent of the worker count.
"""

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Union

from .errors import EvaluationError, SplError
from .fosl import FoslStructure, is_model, make_fosl_structure
from .syntax import (
    And,
    Atom,
    Box,
    Const,
    Equal,
    Forall,
    Formula,
    FoslVocabulary,
    Not,
    UNIVERSAL_STANDPOINT,
    V1Vocabulary,
    Var,
    conjoin,
    falsity,
    formula_size,
    free_variables,
    truth,
    validate_formula,
)
from .v1 import V1Structure, is_model_v1, make_v1_structure

_F, _T, _U = 0, 1, 2  # three-valued: false / true / unknown
# cell storage uses 0 = unset, 1 = true, 2 = false


@dataclass(frozen=True)
class Bounds:
    """Search limits.  Domain/entity/individual maxima and the
    precisification maximum are inclusive; the timeout is per search."""

    max_domain: int = 3
    max_precisifications: int = 2
    max_entities: int = 2
    max_individuals: int = 2
    timeout: float = 60.0
    symmetry_reduction: bool = True

    def __post_init__(self):
        for name in ("max_domain", "max_precisifications", "max_entities", "max_individuals"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    def to_dict(self) -> dict:
        return {
            "max_domain": self.max_domain,
            "max_precisifications": self.max_precisifications,
            "max_entities": self.max_entities,
            "max_individuals": self.max_individuals,
            "timeout": self.timeout,
            "symmetry_reduction": self.symmetry_reduction,
        }


@dataclass(frozen=True)
class ModelFound:
    structure: Union[FoslStructure, V1Structure]
    elapsed: float


@dataclass(frozen=True)
class ExhaustedUnsat:
    bounds: Bounds
    elapsed: float


@dataclass(frozen=True)
class SearchTimeout:
    elapsed: float


SearchOutcome = Union[ModelFound, ExhaustedUnsat, SearchTimeout]


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("SPL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _flatten_and(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return _flatten_and(f.left) + _flatten_and(f.right)
    return [f]


def _symbols_of(f: Formula, preds: dict[str, int], consts: set[str], sps: set[str]) -> None:
    if isinstance(f, Atom):
        preds.setdefault(f.pred, len(f.args))
        for t in f.args:
            if isinstance(t, Const):
                consts.add(t.name)
    elif isinstance(f, Equal):
        for t in (f.left, f.right):
            if isinstance(t, Const):
                consts.add(t.name)
    elif isinstance(f, Not):
        _symbols_of(f.body, preds, consts, sps)
    elif isinstance(f, And):
        _symbols_of(f.left, preds, consts, sps)
        _symbols_of(f.right, preds, consts, sps)
    elif isinstance(f, Forall):
        _symbols_of(f.body, preds, consts, sps)
    elif isinstance(f, Box):
        if f.standpoint != UNIVERSAL_STANDPOINT:
            sps.add(f.standpoint)
        _symbols_of(f.body, preds, consts, sps)


# ---------------------------------------------------------------------------
# Per-level preprocessing
# ---------------------------------------------------------------------------

def _alpha_normalize(f: Formula, mapping: dict[str, str], depth: int) -> Formula:
    """Rename bound variables canonically by nesting depth so that
    structurally identical subformulas compare equal."""
    if isinstance(f, Atom):
        args = tuple(
            Var(mapping.get(t.name, t.name)) if isinstance(t, Var) else t
            for t in f.args
        )
        return Atom(f.pred, args)
    if isinstance(f, Equal):
        left, right = (
            Var(mapping.get(t.name, t.name)) if isinstance(t, Var) else t
            for t in (f.left, f.right)
        )
        return Equal(left, right)
    if isinstance(f, Not):
        return Not(_alpha_normalize(f.body, mapping, depth))
    if isinstance(f, And):
        return And(
            _alpha_normalize(f.left, mapping, depth),
            _alpha_normalize(f.right, mapping, depth),
        )
    if isinstance(f, Forall):
        fresh = f"q{depth}"
        inner = dict(mapping)
        inner[f.var] = fresh
        return Forall(fresh, _alpha_normalize(f.body, inner, depth + 1))
    if isinstance(f, Box):
        return Box(f.standpoint, _alpha_normalize(f.body, mapping, depth))
    raise TypeError(f"not a formula: {f!r}")


def _simplify(f: Formula, m: int, v1_domains: bool):
    """Constant-fold for a level with m precisifications: collapse the
    universal box at m == 1, fold trivial equalities, drop double
    negations, and return a bool when the value is forced.  With
    v1_domains the quantifier range may be empty, so a false body does
    not force a false universal."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Equal):
        if f.left == f.right:
            return True
        return f
    if isinstance(f, Not):
        s = _simplify(f.body, m, v1_domains)
        if isinstance(s, bool):
            return not s
        if isinstance(s, Not):
            return s.body
        return Not(s)
    if isinstance(f, And):
        members: list[Formula] = []
        queue = _flatten_and(f)
        while queue:
            g = queue.pop(0)
            s = _simplify(g, m, v1_domains)
            if s is False:
                return False
            if s is True:
                continue
            if isinstance(s, And):
                queue = _flatten_and(s) + queue
            else:
                members.append(s)
        if not members:
            return True
        seen = set(members)
        for g in members:
            if Not(g) in seen:
                return False
        members.sort(key=formula_size)  # cheap decisive parts first; stable
        return conjoin(members)
    if isinstance(f, Forall):
        s = _simplify(f.body, m, v1_domains)
        if s is True:
            return True
        if s is False:
            # a V1 quantifier domain may be empty, so falsity cannot escape
            return Forall(f.var, falsity()) if v1_domains else False
        return Forall(f.var, s)
    if isinstance(f, Box):
        s = _simplify(f.body, m, v1_domains)
        if s is True:
            return True
        if f.standpoint == UNIVERSAL_STANDPOINT:
            if s is False:
                return False
            return s if m == 1 else Box(f.standpoint, s)
        if s is False:
            return Box(f.standpoint, falsity())  # true iff the standpoint is empty
        return Box(f.standpoint, s)
    raise TypeError(f"not a formula: {f!r}")


def _level_formula(f: Formula, m: int, v1_domains: bool) -> Formula:
    """The formula specialized to a level with m precisifications."""
    s = _simplify(_alpha_normalize(f, {}, 0), m, v1_domains)
    if s is True:
        return truth()
    if s is False:
        return falsity()
    return s


_GROUND_LIMIT = 256


def _strip_ground_prefix(f: Formula, n: int) -> tuple[list[str], list[str], Formula]:
    """Split a conjunct into leading universal-box symbols, groundable
    quantifier variables and the residual body.  Boxes and universals
    commute under the constant-domain semantics, so the prefix order is
    immaterial; grounding stops once the instance count would exceed the
    limit."""
    boxes: list[str] = []
    qvars: list[str] = []
    body = f
    count = 1
    while True:
        if isinstance(body, Box):
            boxes.append(body.standpoint)
            body = body.body
        elif isinstance(body, Forall) and count * n <= _GROUND_LIMIT:
            qvars.append(body.var)
            count *= n
            body = body.body
        else:
            break
    return boxes, qvars, body


# ---------------------------------------------------------------------------
# Standpoint-logic search space
# ---------------------------------------------------------------------------

class _FoslSpace:
    """Partial standpoint structure over n domain elements and m
    precisifications, restricted to the symbols the formula mentions."""

    def __init__(self, vocab: FoslVocabulary, f: Formula, n: int, m: int, symmetry: bool):
        self.vocab = vocab
        self.formula = f
        self.n = n
        self.m = m
        self.symmetry = symmetry

        level = _level_formula(f, m, v1_domains=False)
        parts = _flatten_and(level)

        preds: dict[str, int] = {}
        consts: set[str] = set()
        sps: set[str] = set()
        _symbols_of(level, preds, consts, sps)
        self.preds = {p: preds[p] for p in sorted(preds)}
        self.consts = sorted(consts)
        self.sps = sorted(sps)

        self.pred_bits = {
            p: [bytearray(n ** k) for _ in range(m)] for p, k in self.preds.items()
        }
        self.const_val: dict[tuple[str, int], int | None] = {
            (c, pi): None for c in self.consts for pi in range(m)
        }
        self.sigma_bits: dict[tuple[str, int], int] = {
            (sp, pi): 0 for sp in self.sps for pi in range(m)
        }

        self.maxdes = -1  # largest domain element index mentioned so far
        self.des_stack: list[int] = []
        self.env: list[int] = [0] * (max(_count_quantifiers(p) for p in parts) + 1)

        self.culprit: tuple | None = None
        self.u_seen = 0

        # Universal blocks at the top of a conjunct (boxes commute with
        # them under the constant-domain semantics) are ground into one
        # instance per element tuple, so the probe machinery sees small,
        # nearly-decided constraints instead of one monolithic quantifier.
        self.conjuncts: list = []  # compiled bodies
        self.presets: list[tuple[tuple[int, int], ...]] = []  # (slot, elem)*
        self.pi_indep: list[bool] = []
        self.parent: list[int] = []  # instance -> source conjunct index
        for src_i, part in enumerate(parts):
            boxes, qvars, body = _strip_ground_prefix(part, n)
            if qvars:
                slots = {v: i for i, v in enumerate(qvars)}
                rebuilt = body
                for sp in reversed(boxes):
                    rebuilt = Box(sp, rebuilt)
                fn = self._compile(rebuilt, slots)
                indep = _is_pi_independent(rebuilt)
                for combo in itertools.product(range(n), repeat=len(qvars)):
                    self.conjuncts.append(fn)
                    self.presets.append(tuple(zip(range(len(qvars)), combo)))
                    self.pi_indep.append(indep)
                    self.parent.append(src_i)
            else:
                self.conjuncts.append(self._compile(part, {}))
                self.presets.append(())
                self.pi_indep.append(_is_pi_independent(part))
                self.parent.append(src_i)
        self.scan_order = range(len(self.conjuncts))
        self.status = [[_U] * m for _ in self.conjuncts]
        self.trail: list[list[tuple[int, int]]] = [[]]

        # re-evaluate an instance only when one of its symbols was touched
        self.tick = 0
        self.conj_touch = [0] * len(self.conjuncts)
        self.u_memo: list[list[tuple | None]] = [[None] * m for _ in self.conjuncts]
        self.probe_memo: list[list[tuple | None]] = [[None] * m for _ in self.conjuncts]
        sym_map: dict[tuple, list[int]] = {}
        by_src: dict[int, list[int]] = {}
        for ci, src_i in enumerate(self.parent):
            by_src.setdefault(src_i, []).append(ci)
        for src_i, part in enumerate(parts):
            p2, c2, s2 = {}, set(), set()
            _symbols_of(part, p2, c2, s2)
            targets = by_src[src_i]
            for p in p2:
                sym_map.setdefault(("p", p), []).extend(targets)
            for c in c2:
                sym_map.setdefault(("c", c), []).extend(targets)
            for sp in s2:
                sym_map.setdefault(("s", sp), []).extend(targets)
        self.sym_map = sym_map

    # ---- compilation to closures: fn(pi, env) -> three-valued int ----
    #
    # Rather than returning (value, blocking-cell) pairs, evaluators record
    # the first blocking cell they meet in self.culprit (reset per conjunct
    # evaluation); unknown results always leave it set.

    def _note(self, cell) -> None:
        self.u_seen += 1
        if self.culprit is None:
            self.culprit = cell

    def _compile(self, f: Formula, slots: dict[str, int]):
        n = self.n
        if isinstance(f, Atom):
            resolvers = [self._compile_term(t, slots) for t in f.args]
            arrays = self.pred_bits[f.pred]
            pred = f.pred

            def fn(pi, env):
                rank = 0
                for resolve in resolvers:
                    e = resolve(pi, env)
                    if e is None:
                        return _U
                    rank = rank * n + e
                b = arrays[pi][rank]
                if b == 0:
                    self._note(("p", pred, pi, rank))
                    return _U
                return _T if b == 1 else _F

            return fn
        if isinstance(f, Equal):
            left = self._compile_term(f.left, slots)
            right = self._compile_term(f.right, slots)

            def fn(pi, env):
                a = left(pi, env)
                if a is None:
                    return _U
                b = right(pi, env)
                if b is None:
                    return _U
                return _T if a == b else _F

            return fn
        if isinstance(f, Not):
            child = self._compile(f.body, slots)

            def fn(pi, env):
                v = child(pi, env)
                if v == _U:
                    return _U
                return _F if v == _T else _T

            return fn
        if isinstance(f, And):
            lf = self._compile(f.left, slots)
            rf = self._compile(f.right, slots)

            def fn(pi, env):
                lv = lf(pi, env)
                if lv == _F:
                    return _F
                rv = rf(pi, env)
                if rv == _F:
                    return _F
                return _U if (lv == _U or rv == _U) else _T

            return fn
        if isinstance(f, Forall):
            slot = len(slots)
            inner = dict(slots)
            inner[f.var] = slot
            child = self._compile(f.body, inner)

            def fn(pi, env):
                unknown = False
                for e in range(n):
                    env[slot] = e
                    v = child(pi, env)
                    if v == _F:
                        return _F
                    if v == _U:
                        unknown = True
                return _U if unknown else _T

            return fn
        if isinstance(f, Box):
            child = self._compile(f.body, slots)
            sp = f.standpoint
            m = self.m
            if sp == UNIVERSAL_STANDPOINT:

                def fn(pi, env):
                    unknown = False
                    for p2 in range(m):
                        v = child(p2, env)
                        if v == _F:
                            return _F
                        if v == _U:
                            unknown = True
                    return _U if unknown else _T

                return fn

            bits = self.sigma_bits

            def fn(pi, env):
                unknown = False
                for p2 in range(m):
                    b = bits[(sp, p2)]
                    if b == 2:
                        continue
                    v = child(p2, env)
                    if b == 1:
                        if v == _F:
                            return _F
                        if v == _U:
                            unknown = True
                    else:  # membership still open
                        if v == _F:
                            self._note(("s", sp, p2))
                            unknown = True
                        elif v == _U:
                            unknown = True
                return _U if unknown else _T

            return fn
        raise TypeError(f"not a formula: {f!r}")

    def _compile_term(self, t, slots: dict[str, int]):
        if isinstance(t, Var):
            slot = slots[t.name]
            return lambda pi, env: env[slot]
        name = t.name
        vals = self.const_val

        def resolve(pi, env):
            v = vals[(name, pi)]
            if v is None:
                self._note(("c", name, pi))
                return None
            return v

        return resolve

    # ---- three-valued status of the whole query ----

    def _scan(self) -> tuple[int, tuple | None, dict]:
        """One evaluation pass over all undecided instances.

        Returns (value, first blocking cell, entailed assignments).  An
        instance within two unknown cell reads of a decision has its
        blocking cell probed against the instance alone: no surviving
        value refutes the node; a single one is an entailed assignment.
        """
        first_culprit = None
        probes = []
        frame = self.trail[-1]
        tick = self.tick
        env = self.env
        for ci in self.scan_order:
            fn = self.conjuncts[ci]
            row = self.status[ci]
            memo_row = self.u_memo[ci]
            touched = self.conj_touch[ci]
            span = 1 if self.pi_indep[ci] else self.m
            preset = self.presets[ci]
            for pi in range(span):
                if row[pi] == _T:
                    continue
                memo = memo_row[pi]
                if memo is not None and memo[2] >= touched:
                    cul, count = memo[0], memo[1]
                else:
                    for slot, elem in preset:
                        env[slot] = elem
                    self.culprit = None
                    self.u_seen = 0
                    v = fn(pi, env)
                    if v == _F:
                        return _F, None, {}
                    if v == _T:
                        row[pi] = _T
                        frame.append((ci, pi))
                        continue
                    cul, count = self.culprit, self.u_seen
                    memo_row[pi] = (cul, count, tick)
                if first_culprit is None:
                    first_culprit = cul
                if count <= 2:
                    probes.append((ci, cul, fn, pi, preset))
        if first_culprit is None:
            return _T, None, {}
        forced: dict[tuple, int] = {}
        for ci, cul, fn, pi, preset in probes:
            memo = self.probe_memo[ci][pi]
            if memo is not None and memo[2] >= self.conj_touch[ci]:
                survivors, keep = memo[0], memo[1]
            else:
                survivors, keep = self._probe(cul, fn, pi, preset)
                self.probe_memo[ci][pi] = (survivors, keep, tick)
            if survivors == 0:
                return _F, None, {}
            if survivors == 1:
                if forced.setdefault(cul, keep) != keep:
                    # two instances force this cell to different values
                    return _F, None, {}
        return _U, first_culprit, forced

    def propagate(self, assigned: list) -> tuple[int, tuple | None]:
        """Scan and apply entailed assignments to a fixpoint.  Cells
        assigned here are appended to `assigned`; the caller unassigns
        them when leaving the node."""
        while True:
            v, culprit, forced = self._scan()
            if v != _U or not forced:
                return v, culprit
            for cell, keep in forced.items():
                self.assign(cell, keep)
                assigned.append(cell)

    def _probe(self, cell, fn, pi, preset) -> tuple[int, int | None]:
        """How many values of cell keep this one instance satisfiable,
        and the last value that did."""
        survivors = 0
        keep = None
        env = self.env
        for value in self.branch_values(cell):
            self._poke(cell, value)
            for slot, elem in preset:
                env[slot] = elem
            self.culprit = None
            v = fn(pi, env)
            self._poke(cell, None)
            if v != _F:
                survivors += 1
                keep = value
        return survivors, keep

    def _poke(self, cell: tuple, value) -> None:
        # raw cell write for probing: no trail, touch or designation updates
        kind = cell[0]
        if kind == "p":
            _, pred, pi, rank = cell
            self.pred_bits[pred][pi][rank] = 0 if value is None else value
        elif kind == "c":
            _, name, pi = cell
            self.const_val[(name, pi)] = value
        else:
            _, sp, pi = cell
            self.sigma_bits[(sp, pi)] = 0 if value is None else value

    # ---- assignment trail ----

    def _touch(self, sym: tuple) -> None:
        self.tick += 1
        for ci in self.sym_map.get(sym, ()):
            self.conj_touch[ci] = self.tick

    def assign(self, cell: tuple, value: int) -> None:
        self.trail.append([])
        self.des_stack.append(self.maxdes)
        kind = cell[0]
        if kind == "p":
            _, pred, pi, rank = cell
            self.pred_bits[pred][pi][rank] = value
            self._touch(("p", pred))
            arity = self.preds[pred]
            r = rank
            for _ in range(arity):
                e = r % self.n
                r //= self.n
                if e > self.maxdes:
                    self.maxdes = e
        elif kind == "c":
            _, name, pi = cell
            self.const_val[(name, pi)] = value
            self._touch(("c", name))
            if value > self.maxdes:
                self.maxdes = value
        else:
            _, sp, pi = cell
            self.sigma_bits[(sp, pi)] = value
            self._touch(("s", sp))

    def unassign(self, cell: tuple) -> None:
        for ci, pi in self.trail.pop():
            self.status[ci][pi] = _U
        self.maxdes = self.des_stack.pop()
        kind = cell[0]
        if kind == "p":
            _, pred, pi, rank = cell
            self.pred_bits[pred][pi][rank] = 0
            self._touch(("p", pred))
        elif kind == "c":
            _, name, pi = cell
            self.const_val[(name, pi)] = None
            self._touch(("c", name))
        else:
            _, sp, pi = cell
            self.sigma_bits[(sp, pi)] = 0
            self._touch(("s", sp))

    def branch_values(self, cell: tuple) -> list[int]:
        if cell[0] == "c":
            cap = self.n - 1
            if self.symmetry:
                cap = min(self.maxdes + 1, cap)
            return list(range(cap + 1))
        return [2, 1]  # absent before present

    # ---- depth-first search ----

    def dfs(self, deadline: float):
        if time.monotonic() > deadline:
            return ("timeout",)
        propagated: list[tuple] = []
        try:
            v, culprit = self.propagate(propagated)
            if v == _F:
                return ("unsat",)
            if v == _T:
                return ("model", self.materialize())
            for value in self.branch_values(culprit):
                self.assign(culprit, value)
                result = self.dfs(deadline)
                self.unassign(culprit)
                if result[0] != "unsat":
                    return result
            return ("unsat",)
        finally:
            for cell in reversed(propagated):
                self.unassign(cell)

    def materialize(self) -> FoslStructure:
        domain = [f"d{i}" for i in range(self.n)]
        precs = [f"p{i}" for i in range(self.m)]
        sigma = {}
        for sp in sorted(self.vocab.standpoints):
            if sp == UNIVERSAL_STANDPOINT:
                continue
            if sp in self.sps:
                sigma[sp] = [
                    precs[pi] for pi in range(self.m) if self.sigma_bits[(sp, pi)] == 1
                ]
            else:
                sigma[sp] = []
        interpretation = {}
        for pi in range(self.m):
            preds = {}
            for p, k in self.preds.items():
                rows = []
                bits = self.pred_bits[p][pi]
                for rank in range(self.n ** k):
                    if bits[rank] == 1:
                        row = []
                        r = rank
                        for _ in range(k):
                            row.append(domain[r % self.n])
                            r //= self.n
                        rows.append(tuple(reversed(row)))
                preds[p] = sorted(rows)
            for p, k in self.vocab.predicates.items():
                if p not in preds and k is not None:
                    preds[p] = []
            constants = {}
            for c in sorted(self.vocab.constants):
                if c in self.consts:
                    v = self.const_val[(c, pi)]
                    constants[c] = domain[v if v is not None else 0]
                else:
                    constants[c] = domain[0]
            interpretation[precs[pi]] = {"predicates": preds, "constants": constants}
        structure = make_fosl_structure(domain, precs, sigma, interpretation)
        if not is_model(structure, self.formula):
            raise SplError("internal error: candidate failed revalidation")
        return structure


def _search_level_fosl(vocab, f, n, m, symmetry, deadline, workers):
    space = _FoslSpace(vocab, f, n, m, symmetry)
    rooted: list[tuple] = []
    v, culprit = space.propagate(rooted)
    if v == _F:
        return ("unsat",)
    if v == _T:
        return ("model", space.materialize())
    branches = space.branch_values(culprit)
    if workers <= 1 or len(branches) <= 1:
        return space.dfs(deadline)

    found: dict[str, int | None] = {"idx": None}

    def run(idx_value):
        idx, value = idx_value
        best = found["idx"]
        if best is not None and best < idx:
            return ("skipped",)
        sp = _FoslSpace(vocab, f, n, m, symmetry)
        pre: list[tuple] = []
        _, cul = sp.propagate(pre)
        sp.assign(cul, value)
        result = sp.dfs(deadline)
        if result[0] == "model" and (found["idx"] is None or idx < found["idx"]):
            found["idx"] = idx
        return result

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, enumerate(branches)))
    for result in results:
        if result[0] == "model":
            return result
        if result[0] == "timeout":
            return ("timeout",)
    return ("unsat",)


def find_fosl_model(
    vocab: FoslVocabulary, f: Formula, bounds: Bounds, workers: int | None = None
) -> SearchOutcome:
    """Search for a standpoint structure making f globally true, growing
    the domain and precisification count from 1 up to the bounds."""
    validate_formula(f, vocab)
    if free_variables(f):
        raise EvaluationError("model search requires a sentence")
    workers = _worker_count(workers)
    start = time.monotonic()
    deadline = start + bounds.timeout
    for n in range(1, bounds.max_domain + 1):
        for m in range(1, bounds.max_precisifications + 1):
            result = _search_level_fosl(
                vocab, f, n, m, bounds.symmetry_reduction, deadline, workers
            )
            if result[0] == "model":
                return ModelFound(result[1], time.monotonic() - start)
            if result[0] == "timeout":
                return SearchTimeout(time.monotonic() - start)
    return ExhaustedUnsat(bounds, time.monotonic() - start)


# ---------------------------------------------------------------------------
# Variable-reference search space
# ---------------------------------------------------------------------------

class _V1Space:
    """Partial V1 structure for a fixed registry of extension maps.

    maps[i][pi] gives the precise version of individual i at
    precisification pi; the registry content itself is enumerated outside
    (all strictly increasing combinations of distinct maps, so duplicate
    registries never occur).
    """

    def __init__(self, vocab: V1Vocabulary, f: Formula, ne: int, m: int,
                 maps: tuple[tuple[int, ...], ...]):
        self.vocab = vocab
        self.formula = f
        self.ne = ne
        self.m = m
        self.maps = maps
        self.r = len(maps)

        preds: dict[str, int] = {}
        consts: set[str] = set()
        sps: set[str] = set()
        _symbols_of(f, preds, consts, sps)
        self.sps = sorted(sps)
        self.sortal_list = sorted(vocab.sortals)

        r, ne_ = self.r, ne
        self.sortal_bits = {
            k: [bytearray(r) for _ in range(m)] for k in self.sortal_list
        }
        self.indef_bits = {
            a: [bytearray(r ** (vocab.indefinite[a] or 1)) for _ in range(m)]
            for a in sorted(vocab.indefinite)
            if a in preds
        }
        self.precise_bits = {
            q: bytearray(ne_ ** (vocab.precise[q] or 1))
            for q in sorted(vocab.precise)
            if q in preds
        }
        self.name_val: dict[tuple[str, int], int | None] = {
            (nm, pi): None for nm in sorted(vocab.names) for pi in range(m)
        }
        self.sigma_bits: dict[tuple[str, int], int] = {
            (sp, pi): 0 for sp in self.sps for pi in range(m)
        }
        self.true_indef: list[tuple[str, int, int]] = []  # (A, pi, rank) set true

        parts = _flatten_and(_level_formula(f, m, v1_domains=True))
        self.env: list[int] = [0] * max(_count_quantifiers(p) for p in parts)
        self.pi_indep = [_is_pi_independent(c, domain_varies=True) for c in parts]
        self.conjuncts = [self._compile(c, {}) for c in parts]
        self.status = [[_U] * m for _ in self.conjuncts]
        self.trail: list[list[tuple[int, int]]] = [[]]

    def member3(self, i: int, pi: int) -> tuple[int, tuple | None]:
        """Is individual i admitted by some sortal at pi?"""
        culprit = None
        for k in self.sortal_list:
            b = self.sortal_bits[k][pi][i]
            if b == 1:
                return _T, None
            if b == 0 and culprit is None:
                culprit = ("k", k, pi, i)
        return (_U, culprit) if culprit is not None else (_F, None)

    def _compile(self, f: Formula, slots: dict[str, int]):
        r = self.r
        if isinstance(f, Atom):
            resolvers = [self._compile_term(t, slots) for t in f.args]
            pred = f.pred
            if pred in self.vocab.sortals:
                arrays = self.sortal_bits[pred]
                resolve = resolvers[0]

                def fn(pi, env):
                    i, cul = resolve(pi, env)
                    if i is None:
                        return _U, cul
                    b = arrays[pi][i]
                    if b == 0:
                        return _U, ("k", pred, pi, i)
                    return (_T, None) if b == 1 else (_F, None)

                return fn
            if pred in self.vocab.indefinite:
                arrays = self.indef_bits[pred]

                def fn(pi, env):
                    rank = 0
                    for resolve in resolvers:
                        i, cul = resolve(pi, env)
                        if i is None:
                            return _U, cul
                        rank = rank * r + i
                    b = arrays[pi][rank]
                    if b == 0:
                        return _U, ("a", pred, pi, rank)
                    return (_T, None) if b == 1 else (_F, None)

                return fn
            if pred in self.vocab.precise:
                bits = self.precise_bits[pred]
                maps = self.maps
                ne = self.ne

                def fn(pi, env):
                    rank = 0
                    for resolve in resolvers:
                        i, cul = resolve(pi, env)
                        if i is None:
                            return _U, cul
                        # dereference to the precise version at pi
                        rank = rank * ne + maps[i][pi]
                    b = bits[rank]
                    if b == 0:
                        return _U, ("q", pred, rank)
                    return (_T, None) if b == 1 else (_F, None)

                return fn
            raise EvaluationError(f"predicate {pred!r} not in the vocabulary")
        if isinstance(f, Equal):
            left = self._compile_term(f.left, slots)
            right = self._compile_term(f.right, slots)

            def fn(pi, env):
                a, cul = left(pi, env)
                if a is None:
                    return _U, cul
                b, cul = right(pi, env)
                if b is None:
                    return _U, cul
                return (_T, None) if a == b else (_F, None)

            return fn
        if isinstance(f, Not):
            child = self._compile(f.body, slots)

            def fn(pi, env):
                v, cul = child(pi, env)
                if v == _U:
                    return _U, cul
                return (_F if v == _T else _T), None

            return fn
        if isinstance(f, And):
            lf = self._compile(f.left, slots)
            rf = self._compile(f.right, slots)

            def fn(pi, env):
                lv, lc = lf(pi, env)
                if lv == _F:
                    return _F, None
                rv, rc = rf(pi, env)
                if rv == _F:
                    return _F, None
                if lv == _U:
                    return _U, lc
                if rv == _U:
                    return _U, rc
                return _T, None

            return fn
        if isinstance(f, Forall):
            slot = len(slots)
            inner = dict(slots)
            inner[f.var] = slot
            child = self._compile(f.body, inner)
            member3 = self.member3

            def fn(pi, env):
                culprit = None
                for i in range(r):
                    mv, mc = member3(i, pi)
                    if mv == _F:
                        continue
                    env[slot] = i
                    bv, bc = child(pi, env)
                    if mv == _T and bv == _F:
                        return _F, None
                    if bv == _T:
                        continue
                    if culprit is None:
                        culprit = bc if bv == _U else mc
                return (_U, culprit) if culprit is not None else (_T, None)

            return fn
        if isinstance(f, Box):
            child = self._compile(f.body, slots)
            sp = f.standpoint
            m = self.m
            if sp == UNIVERSAL_STANDPOINT:

                def fn(pi, env):
                    culprit = None
                    for p2 in range(m):
                        v, cul = child(p2, env)
                        if v == _F:
                            return _F, None
                        if v == _U and culprit is None:
                            culprit = cul
                    return (_U, culprit) if culprit is not None else (_T, None)

                return fn

            bits = self.sigma_bits

            def fn(pi, env):
                culprit = None
                for p2 in range(m):
                    b = bits[(sp, p2)]
                    if b == 2:
                        continue
                    v, cul = child(p2, env)
                    if b == 1:
                        if v == _F:
                            return _F, None
                        if v == _U and culprit is None:
                            culprit = cul
                    else:
                        if v == _F and culprit is None:
                            culprit = ("s", sp, p2)
                        elif v == _U and culprit is None:
                            culprit = cul
                return (_U, culprit) if culprit is not None else (_T, None)

            return fn
        raise TypeError(f"not a formula: {f!r}")

    def _compile_term(self, t, slots: dict[str, int]):
        if isinstance(t, Var):
            slot = slots[t.name]
            return lambda pi, env: (env[slot], None)
        name = t.name
        vals = self.name_val

        def resolve(pi, env):
            v = vals[(name, pi)]
            if v is None:
                return None, ("n", name, pi)
            return v, None

        return resolve

    def structural3(self) -> tuple[int, tuple | None]:
        """Well-formedness constraints the search must respect: every name
        denotes an admitted individual, and true indefinite tuples only
        mention admitted individuals."""
        culprit = None
        for (nm, pi), v in self.name_val.items():
            if v is None:
                if culprit is None:
                    culprit = ("n", nm, pi)
                continue
            mv, mc = self.member3(v, pi)
            if mv == _F:
                return _F, None
            if mv == _U and culprit is None:
                culprit = mc
        r = self.r
        for a, pi, rank in self.true_indef:
            digits = []
            x = rank
            arity = self.vocab.indefinite[a] or 1
            for _ in range(arity):
                digits.append(x % r)
                x //= r
            for i in digits:
                mv, mc = self.member3(i, pi)
                if mv == _F:
                    return _F, None
                if mv == _U and culprit is None:
                    culprit = mc
        return (_U, culprit) if culprit is not None else (_T, None)

    def status3(self) -> tuple[int, tuple | None]:
        sv, sc = self.structural3()
        if sv == _F:
            return _F, None
        culprit = sc if sv == _U else None
        frame = self.trail[-1]
        for ci, fn in enumerate(self.conjuncts):
            row = self.status[ci]
            span = 1 if self.pi_indep[ci] else self.m
            for pi in range(span):
                if row[pi] == _T:
                    continue
                v, cul = fn(pi, self.env)
                if v == _F:
                    return _F, None
                if v == _T:
                    row[pi] = _T
                    frame.append((ci, pi))
                elif culprit is None:
                    culprit = cul
        if culprit is None:
            return _T, None
        return _U, culprit

    def assign(self, cell: tuple, value: int) -> None:
        self.trail.append([])
        kind = cell[0]
        if kind == "k":
            _, k, pi, i = cell
            self.sortal_bits[k][pi][i] = value
        elif kind == "a":
            _, a, pi, rank = cell
            self.indef_bits[a][pi][rank] = value
            if value == 1:
                self.true_indef.append((a, pi, rank))
        elif kind == "q":
            _, q, rank = cell
            self.precise_bits[q][rank] = value
        elif kind == "n":
            _, nm, pi = cell
            self.name_val[(nm, pi)] = value
        else:
            _, sp, pi = cell
            self.sigma_bits[(sp, pi)] = value

    def unassign(self, cell: tuple) -> None:
        for ci, pi in self.trail.pop():
            self.status[ci][pi] = _U
        kind = cell[0]
        if kind == "k":
            _, k, pi, i = cell
            self.sortal_bits[k][pi][i] = 0
        elif kind == "a":
            _, a, pi, rank = cell
            if self.indef_bits[a][pi][rank] == 1:
                self.true_indef.pop()
            self.indef_bits[a][pi][rank] = 0
        elif kind == "q":
            _, q, rank = cell
            self.precise_bits[q][rank] = 0
        elif kind == "n":
            _, nm, pi = cell
            self.name_val[(nm, pi)] = None
        else:
            _, sp, pi = cell
            self.sigma_bits[(sp, pi)] = 0

    def branch_values(self, cell: tuple) -> list[int]:
        if cell[0] == "n":
            return list(range(self.r))
        return [2, 1]

    def dfs(self, deadline: float):
        if time.monotonic() > deadline:
            return ("timeout",)
        v, culprit = self.status3()
        if v == _F:
            return ("unsat",)
        if v == _T:
            return ("model", self.materialize())
        for value in self.branch_values(culprit):
            self.assign(culprit, value)
            result = self.dfs(deadline)
            self.unassign(culprit)
            if result[0] != "unsat":
                return result
        return ("unsat",)

    def materialize(self) -> V1Structure:
        entities = [f"e{i}" for i in range(self.ne)]
        precs = [f"p{i}" for i in range(self.m)]
        idents = [f"i{i}" for i in range(self.r)]
        individuals = {
            idents[i]: {precs[pi]: entities[self.maps[i][pi]] for pi in range(self.m)}
            for i in range(self.r)
        }
        sigma = {}
        for sp in sorted(self.vocab.standpoints):
            if sp == UNIVERSAL_STANDPOINT:
                continue
            if sp in self.sps:
                sigma[sp] = [
                    precs[pi] for pi in range(self.m) if self.sigma_bits[(sp, pi)] == 1
                ]
            else:
                sigma[sp] = []
        sortals = {
            precs[pi]: {
                k: [idents[i] for i in range(self.r) if self.sortal_bits[k][pi][i] == 1]
                for k in self.sortal_list
            }
            for pi in range(self.m)
        }
        indefinite = {}
        for pi in range(self.m):
            table = {}
            for a in sorted(self.vocab.indefinite):
                rows = []
                if a in self.indef_bits:
                    arity = self.vocab.indefinite[a] or 1
                    bits = self.indef_bits[a][pi]
                    for rank in range(self.r ** arity):
                        if bits[rank] == 1:
                            row = []
                            x = rank
                            for _ in range(arity):
                                row.append(idents[x % self.r])
                                x //= self.r
                            rows.append(tuple(reversed(row)))
                table[a] = sorted(rows)
            indefinite[precs[pi]] = table
        precise = {}
        for q in sorted(self.vocab.precise):
            rows = []
            if q in self.precise_bits:
                arity = self.vocab.precise[q] or 1
                bits = self.precise_bits[q]
                for rank in range(self.ne ** arity):
                    if bits[rank] == 1:
                        row = []
                        x = rank
                        for _ in range(arity):
                            row.append(entities[x % self.ne])
                            x //= self.ne
                        rows.append(tuple(reversed(row)))
            precise[q] = sorted(rows)
        names = {
            precs[pi]: {
                nm: idents[self.name_val[(nm, pi)]] for nm in sorted(self.vocab.names)
            }
            for pi in range(self.m)
        }
        structure = make_v1_structure(
            entities, precs, sigma, individuals, sortals, indefinite, precise, names
        )
        if not is_model_v1(structure, self.formula):
            raise SplError("internal error: candidate failed revalidation")
        return structure


def _registry_combos(ne: int, m: int, r: int):
    all_maps = list(itertools.product(range(ne), repeat=m))
    return itertools.combinations(all_maps, r)


def find_v1_model(
    vocab: V1Vocabulary, f: Formula, bounds: Bounds, workers: int | None = None
) -> SearchOutcome:
    """Search for a variable reference structure making f globally true.

    Entity counts, precisification counts and registry sizes grow from the
    smallest; registries are combinations of distinct extension maps in
    lexicographic order."""
    validate_formula(f, vocab)
    if free_variables(f):
        raise EvaluationError("model search requires a sentence")
    workers = _worker_count(workers)
    start = time.monotonic()
    deadline = start + bounds.timeout
    min_r = 1 if vocab.names else 0

    found: dict[str, int | None] = {"idx": None}

    def run(task):
        idx, (ne, m, maps) = task
        best = found["idx"]
        if best is not None and best < idx:
            return ("skipped",)
        space = _V1Space(vocab, f, ne, m, maps)
        result = space.dfs(deadline)
        if result[0] == "model" and (found["idx"] is None or idx < found["idx"]):
            found["idx"] = idx
        return result

    for ne in range(1, bounds.max_entities + 1):
        for m in range(1, bounds.max_precisifications + 1):
            for r in range(min_r, min(bounds.max_individuals, ne ** m) + 1):
                found["idx"] = None
                tasks = [(ne, m, maps) for maps in _registry_combos(ne, m, r)]
                if workers <= 1 or len(tasks) <= 1:
                    results = [run(t) for t in enumerate(tasks)]
                else:
                    with ThreadPoolExecutor(max_workers=workers) as pool:
                        results = list(pool.map(run, enumerate(tasks)))
                for result in results:
                    if result[0] == "model":
                        return ModelFound(result[1], time.monotonic() - start)
                    if result[0] == "timeout":
                        return SearchTimeout(time.monotonic() - start)
    return ExhaustedUnsat(bounds, time.monotonic() - start)


def _is_pi_independent(f: Formula, domain_varies: bool = False) -> bool:
    """True when f's value cannot depend on the evaluation point: boxes
    requantify the precisification, variables are rigid, and only atoms
    and constants read the current interpretation.  With domain_varies
    (the V1 case) quantifier ranges follow the precisification, so a
    universal counts as dependent."""
    if isinstance(f, Box):
        return True
    if isinstance(f, Atom):
        return False
    if isinstance(f, Equal):
        return isinstance(f.left, Var) and isinstance(f.right, Var)
    if isinstance(f, Not):
        return _is_pi_independent(f.body, domain_varies)
    if isinstance(f, And):
        return _is_pi_independent(f.left, domain_varies) and _is_pi_independent(
            f.right, domain_varies
        )
    if isinstance(f, Forall):
        return not domain_varies and _is_pi_independent(f.body, domain_varies)
    raise TypeError(f"not a formula: {f!r}")


def _count_quantifiers(f: Formula) -> int:
    if isinstance(f, (Atom, Equal)):
        return 0
    if isinstance(f, (Not, Box)):
        return _count_quantifiers(f.body)
    if isinstance(f, Forall):
        return 1 + _count_quantifiers(f.body)
    if isinstance(f, And):
        return max(_count_quantifiers(f.left), _count_quantifiers(f.right))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Equisatisfiability harness
# ---------------------------------------------------------------------------

@dataclass
class DirectionOutcome:
    direction: str  # "v1" | "fosl"
    outcome: str  # "sat" | "unsat" | "timeout"
    elapsed_ms: int
    bounds: dict
    model: dict | None = None
    verified: bool | None = None  # cross-verification through lift/lower
    note: str = ""

    def to_dict(self) -> dict:
        out = {
            "direction": self.direction,
            "outcome": self.outcome,
            "elapsed_ms": self.elapsed_ms,
            "bounds": self.bounds,
        }
        if self.model is not None:
            out["model"] = self.model
        if self.verified is not None:
            out["verified"] = self.verified
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class EquisatReport:
    formula: str
    agreement: str  # "sat" | "unsat" | "discrepancy" | "inconclusive"
    directions: list[DirectionOutcome]
    counterexample: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "formula": self.formula,
            "agreement": self.agreement,
            "directions": [d.to_dict() for d in self.directions],
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def _outcome_name(result: SearchOutcome) -> str:
    if isinstance(result, ModelFound):
        return "sat"
    if isinstance(result, ExhaustedUnsat):
        return "unsat"
    return "timeout"


def equisat_check(
    vocab: V1Vocabulary,
    f: Formula,
    bounds: Bounds,
    strict_names: bool = False,
    workers: int | None = None,
) -> EquisatReport:
    """Test a sentence and its translation on both sides of the
    correspondence.

    Forward: a V1 model found within bounds must lift to a standpoint model
    of the full translation.  Backward: a standpoint model of the full
    translation, searched with the domain bound set to entities plus
    registry, must lower to a V1 model of the original sentence.  Either
    verification failing, or one side satisfiable where the other side's
    search cannot be, is a discrepancy.

    The backward search always conjoins the name-typing axioms (every
    proper name denotes an admitted individual): the plain axiom set does
    not constrain names, and models whose names denote precise entities
    fall outside the model correspondence.  Every lifted V1 model
    satisfies the name-typing axioms, so this restriction keeps the check
    two-sided and exact.
    """
    import warnings as _warnings

    from .parser import print_formula
    from .translate import full_translation, lift_model, lower_model, translated_vocabulary
    from .fosl import fosl_structure_to_dict
    from .v1 import v1_structure_to_dict

    validate_formula(f, vocab)
    trans_f = full_translation(f, vocab, strict_names)
    trans_f_search = full_translation(f, vocab, strict_names=True)
    trans_vocab = translated_vocabulary(vocab)
    directions: list[DirectionOutcome] = []
    counterexample = None

    t0 = time.monotonic()
    v1_result = find_v1_model(vocab, f, bounds, workers)
    v1_dir = DirectionOutcome(
        direction="v1",
        outcome=_outcome_name(v1_result),
        elapsed_ms=int((time.monotonic() - t0) * 1000),
        bounds=bounds.to_dict(),
    )
    lifted = None
    if isinstance(v1_result, ModelFound):
        v1_dir.model = v1_structure_to_dict(v1_result.structure)
        lifted = lift_model(v1_result.structure)
        v1_dir.verified = is_model(lifted, trans_f)
    directions.append(v1_dir)

    fosl_bounds = Bounds(
        max_domain=bounds.max_entities + bounds.max_individuals,
        max_precisifications=bounds.max_precisifications,
        max_entities=bounds.max_entities,
        max_individuals=bounds.max_individuals,
        timeout=bounds.timeout,
        symmetry_reduction=bounds.symmetry_reduction,
    )
    t1 = time.monotonic()
    fosl_result = find_fosl_model(trans_vocab, trans_f_search, fosl_bounds, workers)
    fosl_dir = DirectionOutcome(
        direction="fosl",
        outcome=_outcome_name(fosl_result),
        elapsed_ms=int((time.monotonic() - t1) * 1000),
        bounds=fosl_bounds.to_dict(),
    )
    lowered = None
    if isinstance(fosl_result, ModelFound):
        fosl_dir.model = fosl_structure_to_dict(fosl_result.structure)
        with _warnings.catch_warnings():
            _warnings.simplefilter("ignore")
            lowered = lower_model(fosl_result.structure, vocab)
        fosl_dir.verified = is_model_v1(lowered, f)
    directions.append(fosl_dir)

    if v1_dir.outcome == "timeout" or fosl_dir.outcome == "timeout":
        agreement = "inconclusive"
    elif v1_dir.outcome == "sat" and fosl_dir.outcome == "sat":
        if v1_dir.verified and fosl_dir.verified:
            agreement = "sat"
        else:
            agreement = "discrepancy"
            counterexample = v1_dir.model if not v1_dir.verified else fosl_dir.model
    elif v1_dir.outcome == "unsat" and fosl_dir.outcome == "unsat":
        agreement = "unsat"
    elif v1_dir.outcome == "sat":
        # the lift of the found V1 model fits the adjusted bounds, so the
        # standpoint search had to find something
        agreement = "discrepancy"
        counterexample = fosl_structure_to_dict(lifted) if lifted is not None else None
    else:
        # standpoint model found where the V1 search was exhausted
        if fosl_dir.verified and lowered is not None:
            fits = (
                len(lowered.entities) <= bounds.max_entities
                and len(lowered.registry) <= bounds.max_individuals
            )
            if fits:
                agreement = "discrepancy"
                counterexample = v1_structure_to_dict(lowered)
            else:
                agreement = "sat"
                fosl_dir.note = (
                    "lowered model exceeds the V1 search bounds; the sentence is "
                    "satisfiable beyond them"
                )
        else:
            agreement = "discrepancy"
            counterexample = fosl_dir.model

    return EquisatReport(
        formula=print_formula(f),
        agreement=agreement,
        directions=directions,
        counterexample=counterexample,
    )
