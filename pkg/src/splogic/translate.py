"""Source-to-source translation from variable reference logic into
first-order standpoint logic, with the bridge axiom set and the model
correspondence in both directions.

The target vocabulary extends the source predicates with four reserved
ones: ind(x) marks indefinite individuals, ext(x) precise entities,
ink(x) the individuals admitted by some sortal at the current
precisification, and prec(x, y) relates an individual to its precise
version there.
"""

from __future__ import annotations

import warnings

from .errors import AxiomViolationError, ModelFormatError
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
    all_variables,
    conjoin,
    disjoin,
    exists,
    formula_size,
    free_variables,
    iff,
    implies,
    is_monodic,
    make_fosl_vocabulary,
    validate_formula,
)
from .v1 import V1Structure, individuals_at, make_v1_structure


def translated_vocabulary(vocab: V1Vocabulary) -> FoslVocabulary:
    """The standpoint-logic vocabulary the translation targets."""
    predicates: dict[str, int | None] = {k: 1 for k in vocab.sortals}
    predicates.update(vocab.indefinite)
    predicates.update(vocab.precise)
    predicates.update({"ind": 1, "ext": 1, "ink": 1, "prec": 2})
    return make_fosl_vocabulary(predicates, vocab.names, vocab.standpoints)


class _FreshVars:
    """Existential witnesses e1, e2, ... never reused and never colliding
    with variables already present in the source formula."""

    def __init__(self, taken: frozenset[str]):
        self.taken = taken
        self.counter = 0

    def next(self) -> str:
        while True:
            self.counter += 1
            name = f"e{self.counter}"
            if name not in self.taken:
                return name


def translate_formula(f: Formula, vocab: V1Vocabulary) -> Formula:
    """Map a V1 formula to a standpoint-logic formula over the translated
    vocabulary.  Sortal and indefinite atoms pass through; universal
    quantifiers relativize to ink; precise atoms existentially project
    each argument to a prec-related entity.  Equalities pass through."""
    validate_formula(f, vocab)
    fresh = _FreshVars(all_variables(f))
    return _translate(f, vocab, fresh)


def _translate(f: Formula, vocab: V1Vocabulary, fresh: _FreshVars) -> Formula:
    if isinstance(f, Atom):
        if f.pred in vocab.precise:
            witnesses = [fresh.next() for _ in f.args]
            parts = [Atom(f.pred, tuple(Var(w) for w in witnesses))]
            parts.extend(
                Atom("prec", (arg, Var(w))) for arg, w in zip(f.args, witnesses)
            )
            out = conjoin(parts)
            for w in reversed(witnesses):
                out = exists(w, out)
            return out
        return f
    if isinstance(f, Equal):
        return f
    if isinstance(f, Not):
        return Not(_translate(f.body, vocab, fresh))
    if isinstance(f, And):
        return And(_translate(f.left, vocab, fresh), _translate(f.right, vocab, fresh))
    if isinstance(f, Forall):
        return Forall(
            f.var,
            implies(Atom("ink", (Var(f.var),)), _translate(f.body, vocab, fresh)),
        )
    if isinstance(f, Box):
        return Box(f.standpoint, _translate(f.body, vocab, fresh))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Bridge axioms
# ---------------------------------------------------------------------------

def _vars(arity: int) -> list[str]:
    if arity <= 3:
        return ["x", "y", "z"][:arity]
    return [f"x{i}" for i in range(1, arity + 1)]


def _forall_all(names: list[str], body: Formula) -> Formula:
    for name in reversed(names):
        body = Forall(name, body)
    return body


def labeled_axioms(
    vocab: V1Vocabulary, strict_names: bool = False
) -> list[tuple[str, Formula]]:
    """The bridge axioms with schema labels, in their fixed order.

    1. ind/ext partition the domain;  2. both are rigid;  3. each precise
    predicate is rigid;  4. prec relates individuals to entities;  5. every
    individual has a precise version;  6. at most one;  7. indefinite
    predicates apply only to admitted individuals;  8. admitted individuals
    are individuals of some sort.  With strict_names, every proper name is
    additionally forced to denote an admitted individual.
    """
    if not vocab.sortals:
        raise ModelFormatError("translation requires at least one sortal")
    x = Var("x")
    y = Var("y")
    z = Var("z")
    ind_x = Atom("ind", (x,))
    ext_x = Atom("ext", (x,))
    ink_x = Atom("ink", (x,))
    box = lambda g: Box(UNIVERSAL_STANDPOINT, g)

    out: list[tuple[str, Formula]] = []
    out.append(("1", Forall("x", iff(ind_x, Not(ext_x)))))
    out.append(
        ("2", Forall("x", And(iff(ind_x, box(ind_x)), iff(ext_x, box(ext_x)))))
    )
    for q in sorted(vocab.precise):
        arity = vocab.precise[q] or 1
        names = _vars(arity)
        atom = Atom(q, tuple(Var(n) for n in names))
        out.append((f"3:{q}", _forall_all(names, iff(atom, box(atom)))))
    out.append(
        (
            "4",
            _forall_all(
                ["x", "y"],
                implies(Atom("prec", (x, y)), And(ind_x, Atom("ext", (y,)))),
            ),
        )
    )
    out.append(("5", Forall("x", implies(ind_x, exists("y", Atom("prec", (x, y)))))))
    out.append(
        (
            "6",
            _forall_all(
                ["x", "y", "z"],
                implies(
                    And(Atom("prec", (x, y)), Atom("prec", (x, z))),
                    Equal(y, z),
                ),
            ),
        )
    )
    for a in sorted(vocab.indefinite):
        arity = vocab.indefinite[a] or 1
        names = _vars(arity)
        atom = Atom(a, tuple(Var(n) for n in names))
        guards = conjoin([Atom("ink", (Var(n),)) for n in names])
        out.append((f"7:{a}", _forall_all(names, implies(atom, guards))))
    sortal_disjunction = disjoin([Atom(k, (x,)) for k in sorted(vocab.sortals)])
    out.append(
        ("8", Forall("x", And(implies(ink_x, ind_x), iff(ink_x, sortal_disjunction))))
    )
    if strict_names:
        for n in sorted(vocab.names):
            out.append((f"names:{n}", Atom("ink", (Const(n),))))
    return out


def axiom_set(vocab: V1Vocabulary, strict_names: bool = False) -> list[Formula]:
    return [f for _, f in labeled_axioms(vocab, strict_names)]


def full_translation(
    f: Formula, vocab: V1Vocabulary, strict_names: bool = False
) -> Formula:
    """Translated formula conjoined with the box-prefixed bridge axioms."""
    if free_variables(f):
        raise ModelFormatError(
            f"full translation requires a sentence; free: {sorted(free_variables(f))}"
        )
    core = translate_formula(f, vocab)
    boxed = [Box(UNIVERSAL_STANDPOINT, ax) for ax in axiom_set(vocab, strict_names)]
    return conjoin([core, *boxed])


def translation_report(f: Formula, vocab: V1Vocabulary, strict_names: bool = False) -> dict:
    """Sizes, monodicity flags and axiom count for a translation run."""
    core = translate_formula(f, vocab)
    full = full_translation(f, vocab, strict_names)
    axioms = axiom_set(vocab, strict_names)
    return {
        "source_size": formula_size(f),
        "translated_size": formula_size(core),
        "full_size": formula_size(full),
        "axiom_count": len(axioms),
        "source_monodic": is_monodic(f),
        "translated_monodic": is_monodic(core),
        "full_monodic": is_monodic(full),
        "strict_names": strict_names,
    }


# ---------------------------------------------------------------------------
# Model correspondence
# ---------------------------------------------------------------------------

def lift_model(mv: V1Structure) -> FoslStructure:
    """Build the standpoint structure corresponding to a V1 structure.

    The domain is the disjoint union of entities and individual ids; ind,
    ext, ink and prec are interpreted from the registry, and every bridge
    axiom holds in the result by construction.
    """
    idents = sorted(mv.registry)
    domain = list(mv.entities) + idents
    interpretation: dict[str, dict] = {}
    for pi in mv.precisifications:
        admitted = individuals_at(mv, pi)
        preds: dict[str, set[tuple[str, ...]]] = {}
        for k, members in mv.sortals[pi].items():
            preds[k] = {(i,) for i in members}
        for a, rows in mv.indefinite[pi].items():
            preds[a] = set(rows)
        for q, rows in mv.precise.items():
            preds[q] = set(rows)
        preds["ind"] = {(i,) for i in idents}
        preds["ext"] = {(e,) for e in mv.entities}
        preds["ink"] = {(i,) for i in admitted}
        preds["prec"] = {(i, mv.registry[i].at(pi)) for i in idents}
        interpretation[pi] = {
            "predicates": {p: sorted(rows) for p, rows in preds.items()},
            "constants": dict(mv.names[pi]),
        }
    return make_fosl_structure(
        domain, mv.precisifications, dict(mv.sigma), interpretation
    )


def lower_model(mf: FoslStructure, vocab: V1Vocabulary) -> V1Structure:
    """Recover a V1 structure from a standpoint structure satisfying the
    bridge axioms (checked first; the violated axiom is reported).

    Names denoting precise entities cannot influence the truth of any
    translated sentence, so they are remapped to the canonical (smallest)
    individual with a warning rather than rejected.
    """
    for label, ax in labeled_axioms(vocab):
        if not is_model(mf, ax):
            raise AxiomViolationError(
                f"structure violates bridge axiom {label}", label
            )

    pi0 = mf.precisifications[0]
    base = mf.interpretation[pi0].predicates
    ind_ids = sorted(e for (e,) in base.get("ind", frozenset()))
    ext_ids = [e for e in mf.domain if e not in set(ind_ids)]
    if not ext_ids:
        raise ModelFormatError("cannot lower: no precise entities (ext is empty)")

    individuals: dict[str, dict[str, str]] = {}
    for i in ind_ids:
        extent = {}
        for pi in mf.precisifications:
            partners = [
                e
                for (a, e) in mf.interpretation[pi].predicates.get("prec", frozenset())
                if a == i
            ]
            # existence and uniqueness guaranteed by axioms 5 and 6
            extent[pi] = partners[0]
        individuals[i] = extent

    ind_set = set(ind_ids)
    sortals = {
        pi: {
            k: [e for (e,) in mf.interpretation[pi].predicates.get(k, frozenset()) if e in ind_set]
            for k in sorted(vocab.sortals)
        }
        for pi in mf.precisifications
    }
    indefinite = {
        pi: {
            a: [row for row in mf.interpretation[pi].predicates.get(a, frozenset())
                if all(e in ind_set for e in row)]
            for a in sorted(vocab.indefinite)
        }
        for pi in mf.precisifications
    }
    ext_set = set(ext_ids)
    precise = {
        q: [row for row in base.get(q, frozenset()) if all(e in ext_set for e in row)]
        for q in sorted(vocab.precise)
    }

    names: dict[str, dict[str, str]] = {}
    for pi in mf.precisifications:
        table = {}
        for n in sorted(vocab.names):
            target = mf.interpretation[pi].constants[n]
            if target in ind_set:
                table[n] = target
            else:
                if not ind_ids:
                    raise ModelFormatError(
                        f"cannot lower: name {n!r} denotes a precise entity and "
                        "no individual exists to stand in"
                    )
                warnings.warn(
                    f"name {n!r} denotes precise entity {target!r} at {pi!r}; "
                    f"remapped to canonical individual {ind_ids[0]!r}",
                    stacklevel=2,
                )
                table[n] = ind_ids[0]
        names[pi] = table

    return make_v1_structure(
        ext_ids,
        mf.precisifications,
        dict(mf.sigma),
        individuals,
        sortals,
        indefinite,
        precise,
        names,
        strict_names=False,
    )
