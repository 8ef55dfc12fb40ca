"""CNF formulas, DIMACS parsing and normalisation to the 3-bounded shape.

A *conforming* formula has clauses of 2 or 3 literals over distinct
variables, and every variable occurs in 2 or 3 clauses with both polarities.
That is the input shape the gadget construction expects.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

Clause = tuple[int, ...]


class DimacsError(ValueError):
    pass


class TrivialFormula(Exception):
    """Simplification decided the formula outright; ``satisfiable`` says which way."""

    def __init__(self, satisfiable: bool):
        self.satisfiable = satisfiable
        super().__init__("trivially satisfiable" if satisfiable else "trivially unsatisfiable")


class TriviallySatisfiable(TrivialFormula):
    def __init__(self):
        super().__init__(True)


class TriviallyUnsatisfiable(TrivialFormula):
    def __init__(self):
        super().__init__(False)


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(int(l) for l in c) for c in self.clauses))

    def occurrences(self) -> dict[int, list[tuple[int, bool]]]:
        """variable -> [(clause index, positive?)] in clause order."""
        occ: dict[int, list[tuple[int, bool]]] = defaultdict(list)
        for j, clause in enumerate(self.clauses):
            for lit in clause:
                occ[abs(lit)].append((j, lit > 0))
        return dict(occ)

    def is_satisfied_by(self, assignment: Mapping[int, bool]) -> bool:
        return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(str(l) for l in c) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def conformity_violations(f: CnfFormula) -> list[str]:
    problems = []
    for j, clause in enumerate(f.clauses):
        if len(clause) not in (2, 3):
            problems.append(f"clause {j} has {len(clause)} literals")
        if len({abs(l) for l in clause}) != len(clause):
            problems.append(f"clause {j} repeats a variable")
        if any(not 1 <= abs(l) <= f.num_vars for l in clause):
            problems.append(f"clause {j} has a literal out of range")
    occ = f.occurrences()
    for v in range(1, f.num_vars + 1):
        places = occ.get(v, [])
        if len(places) not in (2, 3):
            problems.append(f"variable {v} occurs {len(places)} times")
        elif all(pos for _, pos in places) or not any(pos for _, pos in places):
            problems.append(f"variable {v} occurs with one polarity only")
    return problems


def is_conforming(f: CnfFormula) -> bool:
    return not conformity_violations(f)


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF text.

    Repeated literals inside a clause are merged and tautological clauses are
    dropped. A clause may span several lines; a missing final ``0`` closes the
    last clause.
    """
    header = None
    clauses: list[Clause] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed header on line {lineno}: {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"malformed header on line {lineno}: {line!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise DimacsError(f"malformed header on line {lineno}: {line!r}")
            continue
        if header is None:
            raise DimacsError(f"clause before header on line {lineno}")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"bad literal {tok!r} on line {lineno}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > header[0]:
                raise DimacsError(f"literal {lit} out of range on line {lineno}")
            else:
                current.append(lit)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        clauses.append(tuple(current))

    kept = []
    for clause in clauses:
        lits = tuple(dict.fromkeys(clause))
        if not lits:
            raise DimacsError("empty clause")
        if any(-l in lits for l in lits):
            continue
        kept.append(lits)
    return CnfFormula(header[0], tuple(kept))


def _simplify(clauses: list[frozenset[int]]) -> list[frozenset[int]]:
    """Unit propagation and pure-literal elimination to a fixpoint."""
    while True:
        if any(not c for c in clauses):
            raise TriviallyUnsatisfiable()
        unit = next((c for c in clauses if len(c) == 1), None)
        if unit is not None:
            (lit,) = unit
            clauses = [c - {-lit} for c in clauses if lit not in c]
            continue
        polarity: dict[int, set[bool]] = defaultdict(set)
        for c in clauses:
            for lit in c:
                polarity[abs(lit)].add(lit > 0)
        pure = {v if pols == {True} else -v for v, pols in polarity.items() if len(pols) == 1}
        if pure:
            clauses = [c for c in clauses if not (c & pure)]
            continue
        return clauses


def normalize_3bounded(f: CnfFormula) -> CnfFormula:
    """Return an equisatisfiable conforming formula.

    Steps: merge duplicate literals, drop tautologies, unit-propagate and
    eliminate pure literals until nothing changes, then split every variable
    occurring four or more times into one fresh variable per occurrence tied
    together by the cycle of implications ``(-y_i | y_{i+1})``. Variables are
    renumbered densely in order of first appearance.

    Raises:
        TriviallySatisfiable / TriviallyUnsatisfiable: simplification alone
            decided the formula.
        ValueError: a clause has more than three literals.
    """
    if is_conforming(f):
        return f
    clauses = []
    for clause in f.clauses:
        lits = frozenset(clause)
        if len(lits) > 3:
            raise ValueError(f"clause {clause} has more than 3 literals")
        if any(-l in lits for l in lits):
            continue
        clauses.append(lits)
    clauses = _simplify(clauses)
    if not clauses:
        raise TriviallySatisfiable()

    # deterministic order: clause order of the input
    ordered = [tuple(sorted(c, key=lambda l: (abs(l), l < 0))) for c in clauses]
    ordered = list(dict.fromkeys(ordered))

    occ: dict[int, int] = defaultdict(int)
    for c in ordered:
        for lit in c:
            occ[abs(lit)] += 1

    renumber: dict[int, int] = {}
    next_var = 1

    def fresh() -> int:
        nonlocal next_var
        next_var += 1
        return next_var - 1

    out: list[list[int]] = []
    split_links: list[tuple[int, int]] = []
    split_ids: dict[int, list[int]] = {}
    for c in ordered:
        new = []
        for lit in c:
            v = abs(lit)
            if occ[v] >= 4:
                y = fresh()
                split_ids.setdefault(v, []).append(y)
            else:
                if v not in renumber:
                    renumber[v] = fresh()
                y = renumber[v]
            new.append(y if lit > 0 else -y)
        out.append(new)
    for ys in split_ids.values():
        for i, y in enumerate(ys):
            split_links.append((y, ys[(i + 1) % len(ys)]))
    out += [[-a, b] for a, b in split_links]
    result = CnfFormula(next_var - 1, tuple(tuple(c) for c in out))
    assert is_conforming(result), conformity_violations(result)
    return result


def formula_from_clauses(clauses: Iterable[Iterable[int]]) -> CnfFormula:
    clauses = tuple(tuple(c) for c in clauses)
    n = max((abs(l) for c in clauses for l in c), default=0)
    return CnfFormula(n, clauses)
