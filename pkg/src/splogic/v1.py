"""Finite variable reference structures and their satisfaction relation.

The quantifier domain at a precisification is generated by the sortal
extensions; names and variables denote indefinite individuals (finite
maps from precisifications to precise entities, materialized in the
registry).  Sortal and indefinite atoms test the individuals themselves;
precise atoms first dereference each individual through its extension
map at the current precisification.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import EvaluationError, ModelFormatError
from .syntax import (
    And,
    Atom,
    Box,
    Equal,
    Forall,
    Formula,
    Not,
    Term,
    UNIVERSAL_STANDPOINT,
    V1Vocabulary,
    Var,
    free_variables,
    make_v1_vocabulary,
)

Assignment = Mapping[str, str]


@dataclass(frozen=True)
class IndefiniteIndividual:
    """An individual identifier with its total extension map."""

    ident: str
    extent: Mapping[str, str]  # precisification -> precise entity

    def at(self, pi: str) -> str:
        return self.extent[pi]


@dataclass(frozen=True)
class V1Structure:
    entities: tuple[str, ...]
    precisifications: tuple[str, ...]
    sigma: Mapping[str, frozenset[str]]
    registry: Mapping[str, IndefiniteIndividual]
    sortals: Mapping[str, Mapping[str, frozenset[str]]]  # pi -> K -> individual ids
    indefinite: Mapping[str, Mapping[str, frozenset[tuple[str, ...]]]]  # pi -> A -> id tuples
    precise: Mapping[str, frozenset[tuple[str, ...]]]  # Q -> entity tuples
    names: Mapping[str, Mapping[str, str]]  # pi -> name -> individual id


def make_v1_structure(
    entities: Iterable[str],
    precisifications: Iterable[str],
    sigma: Mapping[str, Iterable[str]],
    individuals: Mapping[str, Mapping[str, str]],
    sortals: Mapping[str, Mapping[str, Iterable[str]]],
    indefinite: Mapping[str, Mapping[str, Iterable]] = {},
    precise: Mapping[str, Iterable] = {},
    names: Mapping[str, Mapping[str, str]] = {},
    strict_names: bool = True,
) -> V1Structure:
    """Normalize and validate a variable reference structure.

    With strict_names (the loader default) every name must denote a member
    of the quantifier domain at each precisification; lowered structures
    relax this, since the bridge axioms do not constrain constants.
    """
    ents = tuple(entities)
    precs = tuple(precisifications)
    if not ents:
        raise ModelFormatError("entity set must be non-empty")
    if not precs:
        raise ModelFormatError("precisification set must be non-empty")
    if len(set(ents)) != len(ents):
        raise ModelFormatError("duplicate entity identifiers")
    if len(set(precs)) != len(precs):
        raise ModelFormatError("duplicate precisification identifiers")
    ent_set = frozenset(ents)
    prec_set = frozenset(precs)

    sig: dict[str, frozenset[str]] = {}
    for sp, members in sigma.items():
        mset = frozenset(members)
        unknown = mset - prec_set
        if unknown:
            raise ModelFormatError(
                f"sigma[{sp!r}] mentions unknown precisification(s) {sorted(unknown)}"
            )
        sig[sp] = mset
    if UNIVERSAL_STANDPOINT in sig and sig[UNIVERSAL_STANDPOINT] != prec_set:
        raise ModelFormatError("sigma['*'] must admit every precisification")
    sig[UNIVERSAL_STANDPOINT] = prec_set

    registry: dict[str, IndefiniteIndividual] = {}
    for ident, extent in individuals.items():
        if ident in ent_set:
            raise ModelFormatError(
                f"individual id {ident!r} collides with an entity identifier"
            )
        ext = dict(extent)
        if set(ext) != prec_set:
            raise ModelFormatError(
                f"individual {ident!r} must map every precisification to an entity"
            )
        for pi, e in ext.items():
            if e not in ent_set:
                raise ModelFormatError(
                    f"individual {ident!r} maps {pi!r} to unknown entity {e!r}"
                )
        registry[ident] = IndefiniteIndividual(ident, ext)
    by_extent: dict[tuple, list[str]] = {}
    for ident in sorted(registry):
        key = tuple(registry[ident].extent[pi] for pi in precs)
        by_extent.setdefault(key, []).append(ident)
    for group in by_extent.values():
        if len(group) > 1:
            warnings.warn(
                f"individuals {group} share one extension map; "
                "they are treated as distinct individuals",
                stacklevel=2,
            )

    sortal_names = set()
    srt: dict[str, dict[str, frozenset[str]]] = {pi: {} for pi in precs}
    for pi, table in sortals.items():
        if pi not in prec_set:
            raise ModelFormatError(f"sortal table for unknown precisification {pi!r}")
        for k, ids in table.items():
            members = frozenset(ids)
            bad = [i for i in members if i not in registry]
            if bad:
                raise ModelFormatError(
                    f"sortal {k!r} at {pi!r} contains unknown individual(s) {bad}"
                )
            srt[pi][k] = members
            sortal_names.add(k)
    for pi in precs:
        for k in sortal_names:
            srt[pi].setdefault(k, frozenset())

    domains = {
        pi: frozenset().union(*srt[pi].values()) if srt[pi] else frozenset()
        for pi in precs
    }

    indef_names: set[str] = set()
    arities: dict[str, int] = {}
    ind: dict[str, dict[str, frozenset[tuple[str, ...]]]] = {pi: {} for pi in precs}
    for pi, table in indefinite.items():
        if pi not in prec_set:
            raise ModelFormatError(f"indefinite table for unknown precisification {pi!r}")
        for a, tuples in table.items():
            rows = frozenset(tuple(row) for row in tuples)
            for row in rows:
                if arities.setdefault(a, len(row)) != len(row):
                    raise ModelFormatError(f"indefinite predicate {a!r} has mixed arities")
                outside = [i for i in row if i not in domains[pi]]
                if outside:
                    raise ModelFormatError(
                        f"indefinite predicate {a!r} at {pi!r} mentions individual(s) "
                        f"{outside} outside the sortal-generated domain"
                    )
            ind[pi][a] = rows
            indef_names.add(a)
    for pi in precs:
        for a in indef_names:
            ind[pi].setdefault(a, frozenset())

    prc: dict[str, frozenset[tuple[str, ...]]] = {}
    for q, tuples in precise.items():
        rows = frozenset(tuple(row) for row in tuples)
        for row in rows:
            if arities.setdefault(q, len(row)) != len(row):
                raise ModelFormatError(f"precise predicate {q!r} has mixed arities")
            bad = [e for e in row if e not in ent_set]
            if bad:
                raise ModelFormatError(
                    f"precise predicate {q!r} mentions unknown entity(ies) {bad}"
                )
        prc[q] = rows

    name_keys: set[str] | None = None
    nms: dict[str, dict[str, str]] = {}
    for pi, table in names.items():
        if pi not in prec_set:
            raise ModelFormatError(f"name table for unknown precisification {pi!r}")
        nms[pi] = dict(table)
    for pi in precs:
        table = nms.setdefault(pi, {})
        if name_keys is None:
            name_keys = set(table)
        elif set(table) != name_keys:
            raise ModelFormatError("name tables must denote the same names at every precisification")
        for n, ident in table.items():
            if ident not in registry:
                raise ModelFormatError(
                    f"name {n!r} at {pi!r} denotes unknown individual {ident!r}"
                )
            if strict_names and ident not in domains[pi]:
                raise ModelFormatError(
                    f"name {n!r} at {pi!r} denotes {ident!r}, which no sortal admits there"
                )

    return V1Structure(ents, precs, sig, registry, srt, ind, prc, nms)


# ---------------------------------------------------------------------------
# Satisfaction
# ---------------------------------------------------------------------------

def individuals_at(m: V1Structure, pi: str) -> frozenset[str]:
    """Quantifier domain at pi: the union of all sortal extensions there."""
    try:
        table = m.sortals[pi]
    except KeyError:
        raise EvaluationError(f"unknown precisification {pi!r}") from None
    return frozenset().union(*table.values()) if table else frozenset()


def eval_term_v1(m: V1Structure, pi: str, v: Assignment, t: Term) -> str:
    if pi not in m.names:
        raise EvaluationError(f"unknown precisification {pi!r}")
    if isinstance(t, Var):
        try:
            ident = v[t.name]
        except KeyError:
            raise EvaluationError(f"unbound variable ?{t.name}") from None
        if ident not in m.registry:
            raise EvaluationError(
                f"variable ?{t.name} bound to unknown individual {ident!r}"
            )
        return ident
    try:
        return m.names[pi][t.name]
    except KeyError:
        raise EvaluationError(f"unknown name {t.name!r}") from None


def satisfies_v1(m: V1Structure, pi: str, v: Assignment, f: Formula) -> bool:
    if pi not in m.names:
        raise EvaluationError(f"unknown precisification {pi!r}")
    if isinstance(f, Atom):
        ids = tuple(eval_term_v1(m, pi, v, t) for t in f.args)
        if f.pred in m.sortals[pi]:
            return ids[0] in m.sortals[pi][f.pred]
        if f.pred in m.indefinite[pi]:
            return ids in m.indefinite[pi][f.pred]
        if f.pred in m.precise:
            # extra dereference: individuals resolve to their precise
            # version at the current precisification
            row = tuple(m.registry[i].at(pi) for i in ids)
            return row in m.precise[f.pred]
        raise EvaluationError(f"predicate {f.pred!r} is not interpreted by this structure")
    if isinstance(f, Equal):
        return eval_term_v1(m, pi, v, f.left) == eval_term_v1(m, pi, v, f.right)
    if isinstance(f, Not):
        return not satisfies_v1(m, pi, v, f.body)
    if isinstance(f, And):
        return satisfies_v1(m, pi, v, f.left) and satisfies_v1(m, pi, v, f.right)
    if isinstance(f, Forall):
        return all(
            satisfies_v1(m, pi, {**v, f.var: i}, f.body)
            for i in sorted(individuals_at(m, pi))
        )
    if isinstance(f, Box):
        try:
            admitted = m.sigma[f.standpoint]
        except KeyError:
            raise EvaluationError(f"unknown standpoint {f.standpoint!r}") from None
        return all(
            satisfies_v1(m, p2, v, f.body)
            for p2 in m.precisifications
            if p2 in admitted
        )
    raise TypeError(f"not a formula: {f!r}")


def satisfies_at_v1(m: V1Structure, pi: str, f: Formula) -> bool:
    """Truth at pi under every assignment of free variables into the registry."""
    fv = sorted(free_variables(f))
    idents = sorted(m.registry)
    for values in itertools.product(idents, repeat=len(fv)):
        if not satisfies_v1(m, pi, dict(zip(fv, values)), f):
            return False
    return True


def is_model_v1(m: V1Structure, f: Formula) -> bool:
    return all(satisfies_at_v1(m, pi, f) for pi in m.precisifications)


# ---------------------------------------------------------------------------
# JSON model files
# ---------------------------------------------------------------------------

_TOP_KEYS = {
    "entities",
    "precisifications",
    "sigma",
    "individuals",
    "sortals",
    "indefinite",
    "precise",
    "names",
}


def v1_structure_from_dict(data: Mapping, strict_names: bool = True) -> V1Structure:
    if not isinstance(data, Mapping):
        raise ModelFormatError("model file must contain a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ModelFormatError(f"unknown top-level key(s) {sorted(unknown)}")
    required = {"entities", "precisifications", "individuals", "sortals"}
    missing = required - set(data)
    if missing:
        raise ModelFormatError(f"missing required key(s) {sorted(missing)}")
    return make_v1_structure(
        data["entities"],
        data["precisifications"],
        data.get("sigma", {}),
        data["individuals"],
        data["sortals"],
        data.get("indefinite", {}),
        data.get("precise", {}),
        data.get("names", {}),
        strict_names=strict_names,
    )


def load_v1_model(path: str) -> V1Structure:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"invalid JSON in {path}: {exc}") from None
    return v1_structure_from_dict(data)


def v1_structure_to_dict(m: V1Structure) -> dict:
    return {
        "entities": list(m.entities),
        "precisifications": list(m.precisifications),
        "sigma": {sp: sorted(ps) for sp, ps in sorted(m.sigma.items())},
        "individuals": {
            ident: {pi: ind.extent[pi] for pi in m.precisifications}
            for ident, ind in sorted(m.registry.items())
        },
        "sortals": {
            pi: {k: sorted(ids) for k, ids in sorted(m.sortals[pi].items())}
            for pi in m.precisifications
        },
        "indefinite": {
            pi: {a: sorted(list(row) for row in rows) for a, rows in sorted(m.indefinite[pi].items())}
            for pi in m.precisifications
        },
        "precise": {q: sorted(list(row) for row in rows) for q, rows in sorted(m.precise.items())},
        "names": {pi: dict(sorted(m.names[pi].items())) for pi in m.precisifications},
    }


def vocabulary_of_v1_model(m: V1Structure) -> V1Vocabulary:
    """Derive the vocabulary (including the predicate partition) from a model."""
    sortals = set()
    for pi in m.precisifications:
        sortals.update(m.sortals[pi])
    indefinite: dict[str, int | None] = {}
    for pi in m.precisifications:
        for a, rows in m.indefinite[pi].items():
            indefinite.setdefault(a, None)
            for row in rows:
                indefinite[a] = len(row)
    precise: dict[str, int | None] = {}
    for q, rows in m.precise.items():
        precise.setdefault(q, None)
        for row in rows:
            precise[q] = len(row)
    names = set()
    for pi in m.precisifications:
        names.update(m.names[pi])
    return make_v1_vocabulary(sortals, indefinite, precise, names, set(m.sigma))
