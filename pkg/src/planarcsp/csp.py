"""Finite-domain CSP core: nogoods, contradiction search trees, resolution.

Variables are integers ``0..num_vars-1`` over the alphabet ``0..k-1``.
Constraints are stored as nogoods (forbidden partial assignments).  A
contradiction search tree is the trace of a DPLL run: a k-ary tree whose
every leaf cites a nogood falsified by the assignments on its path.
Trees convert to checkable tree-like resolution proofs with one derived
step per internal node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

Literal = tuple[int, int]


class CspError(Exception):
    """Base class for errors raised by this module."""


class MissingPivotLiteral(CspError):
    pass


class ConflictingSideLiterals(CspError):
    pass


class InvalidLeaf(CspError):
    def __init__(self, path, message=""):
        super().__init__(f"leaf at path {path} cites a non-falsified nogood {message}")
        self.path = path


class RepeatedVariable(CspError):
    def __init__(self, path, var):
        super().__init__(f"variable {var} repeats on path {path}")
        self.path = path
        self.var = var


class Satisfiable(CspError):
    def __init__(self, witness):
        super().__init__(f"csp is satisfiable, witness {witness}")
        self.witness = witness


class BudgetExceeded(CspError):
    pass


class CapExceeded(CspError):
    pass


class ParseError(CspError):
    pass


# ---------------------------------------------------------------------------
# nogoods and assignments


@dataclass(frozen=True)
class Nogood:
    """A forbidden partial assignment, canonically sorted by variable."""

    literals: tuple[Literal, ...]

    @staticmethod
    def of(literals: Iterable[Literal]) -> "Nogood":
        lits = sorted(set((int(v), int(a)) for v, a in literals))
        for (v1, _), (v2, _) in zip(lits, lits[1:]):
            if v1 == v2:
                raise CspError(f"two literals on variable {v1} in one nogood")
        return Nogood(tuple(lits))

    @property
    def is_empty(self) -> bool:
        return not self.literals

    def vars(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.literals)

    def __str__(self) -> str:
        if not self.literals:
            return "[]"
        return "~(" + " & ".join(f"x{v}={a}" for v, a in self.literals) + ")"


EMPTY_NOGOOD = Nogood(())


class PartialAssignment:
    """Mutable map var -> value with unset entries."""

    __slots__ = ("values",)

    def __init__(self, values: Optional[dict[int, int]] = None):
        self.values: dict[int, int] = dict(values) if values else {}

    def get(self, var: int) -> Optional[int]:
        return self.values.get(var)

    def is_set(self, var: int) -> bool:
        return var in self.values

    def set(self, var: int, value: int) -> None:
        self.values[var] = value

    def unset(self, var: int) -> None:
        self.values.pop(var, None)

    def copy(self) -> "PartialAssignment":
        return PartialAssignment(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __repr__(self) -> str:
        inner = ", ".join(f"x{v}={a}" for v, a in sorted(self.values.items()))
        return f"PartialAssignment({inner})"


def falsifies(assignment: PartialAssignment, ng: Nogood) -> bool:
    """True iff every literal of ``ng`` is set to its forbidden value."""
    values = assignment.values
    return all(values.get(v) == a for v, a in ng.literals)


def table_constraint_to_nogoods(
    scope: Sequence[int], forbidden: Iterable[Sequence[int]], k: int
) -> list[Nogood]:
    """One nogood per forbidden tuple of a table constraint."""
    out = []
    for row in forbidden:
        if len(row) != len(scope):
            raise CspError(f"tuple {tuple(row)} does not match scope arity {len(scope)}")
        if any(a < 0 or a >= k for a in row):
            raise CspError(f"value out of domain in tuple {tuple(row)}")
        out.append(Nogood.of(zip(scope, row)))
    return out


@dataclass
class Csp:
    """A finite-domain CSP given by nogoods over ``num_vars`` variables."""

    num_vars: int
    k: int
    nogoods: list[Nogood]
    var_names: Optional[list[str]] = None

    def __post_init__(self):
        if self.k < 2:
            raise CspError("domain size must be at least 2")
        seen = set()
        unique = []
        for ng in self.nogoods:
            for v, a in ng.literals:
                if not (0 <= v < self.num_vars):
                    raise CspError(f"variable {v} out of range in {ng}")
                if not (0 <= a < self.k):
                    raise CspError(f"value {a} out of domain in {ng}")
            if ng.literals not in seen:
                seen.add(ng.literals)
                unique.append(ng)
        self.nogoods = unique
        if self.var_names is not None and len(self.var_names) != self.num_vars:
            raise CspError("var_names length mismatch")

    def name_of(self, var: int) -> str:
        if self.var_names:
            return self.var_names[var]
        return f"x{var}"

    def occurrences(self) -> list[list[tuple[int, int]]]:
        """Per-variable list of (nogood index, forbidden value) pairs."""
        occ: list[list[tuple[int, int]]] = [[] for _ in range(self.num_vars)]
        for g, ng in enumerate(self.nogoods):
            for v, a in ng.literals:
                occ[v].append((g, a))
        return occ

    def first_falsified(self, assignment: PartialAssignment) -> Optional[int]:
        for g, ng in enumerate(self.nogoods):
            if falsifies(assignment, ng):
                return g
        return None


# ---------------------------------------------------------------------------
# resolution


def resolve(premises: Sequence[Nogood], pivot: int) -> Nogood:
    """k-ary resolution: premise ``a`` must contain the literal (pivot, a).

    The result is the union of all side literals.  Premises whose side
    literals disagree on some variable are rejected: such a resolvent is
    vacuous and never produced by tree conversion.
    """
    side: dict[int, int] = {}
    for a, ng in enumerate(premises):
        found = False
        for v, b in ng.literals:
            if v == pivot:
                if b != a:
                    raise MissingPivotLiteral(
                        f"premise {a} carries (x{pivot}={b}), expected value {a}"
                    )
                found = True
            else:
                if side.get(v, b) != b:
                    raise ConflictingSideLiterals(
                        f"variable x{v} assigned both {side[v]} and {b} across premises"
                    )
                side[v] = b
        if not found:
            raise MissingPivotLiteral(f"premise {a} lacks a literal on pivot x{pivot}")
    return Nogood.of(side.items())


def resolve_folded(premises: Sequence[Nogood], pivot: int) -> Nogood:
    """Resolution with weakening folded in.

    A premise that does not mention the pivot at all is treated as if
    weakened by the missing pivot literal; its full literal set joins the
    side union.  Sound: a total assignment falsifying the result assigns
    the pivot some value ``c`` and then falsifies premise ``c``.
    """
    side: dict[int, int] = {}
    for a, ng in enumerate(premises):
        for v, b in ng.literals:
            if v == pivot:
                if b != a:
                    raise MissingPivotLiteral(
                        f"premise {a} carries (x{pivot}={b}), expected value {a}"
                    )
            else:
                if side.get(v, b) != b:
                    raise ConflictingSideLiterals(
                        f"variable x{v} assigned both {side[v]} and {b} across premises"
                    )
                side[v] = b
    return Nogood.of(side.items())


@dataclass(frozen=True)
class Axiom:
    index: int


@dataclass(frozen=True)
class Resolvent:
    pivot: int
    premises: tuple[int, ...]  # step indices, ordered by pivot value


@dataclass(frozen=True)
class ProofStep:
    nogood: Nogood
    rule: Union[Axiom, Resolvent]


@dataclass
class ResolutionProof:
    steps: list[ProofStep]

    def derived_count(self) -> int:
        return sum(1 for s in self.steps if isinstance(s.rule, Resolvent))


class CheckResult:
    """Boolean verdict plus a first-failure diagnostic."""

    def __init__(self, ok: bool, diagnostic: Optional[str] = None):
        self.ok = ok
        self.diagnostic = diagnostic

    def __bool__(self) -> bool:
        return self.ok

    def __repr__(self) -> str:
        return f"CheckResult({self.ok}, {self.diagnostic!r})"


def check_proof(csp: Csp, proof: ResolutionProof) -> CheckResult:
    """Recompute every step; the last nogood must be empty.

    Resolvent steps are recomputed with weakening folded in, mirroring
    tree conversion: a premise may omit the pivot literal entirely.
    """
    if not proof.steps:
        return CheckResult(False, "empty proof")
    for i, step in enumerate(proof.steps):
        rule = step.rule
        if isinstance(rule, Axiom):
            if not (0 <= rule.index < len(csp.nogoods)):
                return CheckResult(False, f"step {i}: axiom index {rule.index} out of range")
            if csp.nogoods[rule.index] != step.nogood:
                return CheckResult(False, f"step {i}: axiom nogood mismatch")
        else:
            if len(rule.premises) != csp.k:
                return CheckResult(False, f"step {i}: expected {csp.k} premises")
            if any(p >= i or p < 0 for p in rule.premises):
                return CheckResult(False, f"step {i}: premise index not earlier in proof")
            prems = [proof.steps[p].nogood for p in rule.premises]
            try:
                expected = resolve_folded(prems, rule.pivot)
            except CspError as e:
                return CheckResult(False, f"step {i}: {e}")
            if expected != step.nogood:
                return CheckResult(False, f"step {i}: resolvent mismatch")
    if not proof.steps[-1].nogood.is_empty:
        return CheckResult(False, "last step is not the empty nogood")
    return CheckResult(True)


# ---------------------------------------------------------------------------
# search trees


@dataclass(frozen=True)
class Leaf:
    nogood_index: int


@dataclass(frozen=True)
class Internal:
    var: int
    children: tuple  # exactly k subtrees, ordered by value


SearchTree = Union[Leaf, Internal]


@dataclass(frozen=True)
class TreeMetrics:
    leaves: int
    nodes: int
    depth: int


# Recursion depth is at most num_vars, far below the interpreter limit
# for every instance this lab builds.
def _verify_rec(csp, node, assignment, depth, path, acc):
    acc[1] += 1  # nodes
    if depth > acc[2]:
        acc[2] = depth
    if isinstance(node, Leaf):
        acc[0] += 1
        if not (0 <= node.nogood_index < len(csp.nogoods)):
            raise InvalidLeaf(path, f"(index {node.nogood_index} out of range)")
        if not falsifies(assignment, csp.nogoods[node.nogood_index]):
            raise InvalidLeaf(path, f"({csp.nogoods[node.nogood_index]})")
        return
    if not isinstance(node, Internal):
        raise CspError(f"unknown node type {type(node)!r}")
    if len(node.children) != csp.k:
        raise CspError(f"internal node on x{node.var} has {len(node.children)} children")
    if not (0 <= node.var < csp.num_vars):
        raise CspError(f"variable {node.var} out of range")
    if assignment.is_set(node.var):
        raise RepeatedVariable(path, node.var)
    for a in range(csp.k):
        assignment.set(node.var, a)
        _verify_rec(csp, node.children[a], assignment, depth + 1, path + ((node.var, a),), acc)
    assignment.unset(node.var)


def tree_to_proof(csp: Csp, tree: SearchTree) -> ResolutionProof:
    """Bottom-up conversion; one Resolvent step per internal node.

    Leaves emit their cited axiom; an internal node resolves its k
    children's nogoods on its variable with weakening folded in, so the
    derived-step count always equals the internal-node count.
    """
    verify_tree(csp, tree)
    steps: list[ProofStep] = []

    def emit(node) -> int:
        if isinstance(node, Leaf):
            steps.append(ProofStep(csp.nogoods[node.nogood_index], Axiom(node.nogood_index)))
            return len(steps) - 1
        idxs = tuple(emit(child) for child in node.children)
        ng = resolve_folded([steps[i].nogood for i in idxs], node.var)
        steps.append(ProofStep(ng, Resolvent(node.var, idxs)))
        return len(steps) - 1

    emit(tree)
    return ResolutionProof(steps)


# ---------------------------------------------------------------------------
# DPLL


class _Counters:
    """Per-nogood falsification bookkeeping with O(occ) updates.

    ``unmatched[g]``: literals of nogood g not yet set to their value.
    ``dead[g]``: literals set to a different value (nogood can no longer
    be falsified on this branch).  A nogood with unmatched == dead == 0
    is falsified.  Nogoods with a single live unmatched literal feed the
    forced-variable detector.
    """

    def __init__(self, csp: Csp):
        self.csp = csp
        self.unmatched = [len(ng.literals) for ng in csp.nogoods]
        self.dead = [0] * len(csp.nogoods)
        self.occ = csp.occurrences()
        self.falsified: list[int] = sorted(
            g for g, ng in enumerate(csp.nogoods) if not ng.literals
        )
        # unit bookkeeping: per var, per value, number of live unit nogoods
        self.unit_count = [dict() for _ in range(csp.num_vars)]
        self.assignment = PartialAssignment()
        for g in range(len(csp.nogoods)):
            self._enter_unit_if(g)

    def _unit_literal(self, g: int) -> Literal:
        values = self.assignment.values
        for v, a in self.csp.nogoods[g].literals:
            if values.get(v) != a:
                return (v, a)
        raise AssertionError("no unmatched literal")

    def _enter_unit_if(self, g: int) -> None:
        if self.unmatched[g] == 1 and self.dead[g] == 0:
            v, a = self._unit_literal(g)
            d = self.unit_count[v]
            d[a] = d.get(a, 0) + 1

    def _leave_unit_if(self, g: int) -> None:
        if self.unmatched[g] == 1 and self.dead[g] == 0:
            v, a = self._unit_literal(g)
            d = self.unit_count[v]
            d[a] -= 1
            if not d[a]:
                del d[a]

    def assign(self, var: int, value: int) -> None:
        for g, b in self.occ[var]:
            self._leave_unit_if(g)
            if b == value:
                self.unmatched[g] -= 1
                if self.unmatched[g] == 0 and self.dead[g] == 0:
                    self.falsified.append(g)
            else:
                self.dead[g] += 1
        self.assignment.set(var, value)
        for g, b in self.occ[var]:
            self._enter_unit_if(g)

    def unassign(self, var: int) -> None:
        value = self.assignment.get(var)
        for g, b in self.occ[var]:
            self._leave_unit_if(g)
            if b == value:
                if self.unmatched[g] == 0 and self.dead[g] == 0:
                    self.falsified.pop()
                self.unmatched[g] += 1
            else:
                self.dead[g] -= 1
        self.assignment.unset(var)
        for g, b in self.occ[var]:
            self._enter_unit_if(g)

    def first_falsified(self) -> Optional[int]:
        if not self.falsified:
            return None
        return min(self.falsified)

    def forced_var(self) -> Optional[int]:
        """A variable for which >= k-1 values each falsify some nogood."""
        k = self.csp.k
        values = self.assignment.values
        for v in range(self.csp.num_vars):
            if v in values:
                continue
            if len(self.unit_count[v]) >= k - 1:
                return v
        return None


BranchingPolicy = Callable[[Csp, "_Counters"], int]


def _policy_first_unset(csp: Csp, ctr: _Counters) -> int:
    for v in range(csp.num_vars):
        if not ctr.assignment.is_set(v):
            return v
    raise AssertionError("no unset variable")


def _policy_max_occurrence(csp: Csp, ctr: _Counters) -> int:
    best, best_score = None, (-1, 0)
    for v in range(csp.num_vars):
        if ctr.assignment.is_set(v):
            continue
        live = sum(
            1 for g, _ in ctr.occ[v] if ctr.dead[g] == 0 and ctr.unmatched[g] > 0
        )
        score = (live, -v)
        if score > best_score:
            best, best_score = v, score
    assert best is not None
    return best


def make_random_policy(seed: int) -> BranchingPolicy:
    import random as _random

    rng = _random.Random(seed)

    def policy(csp: Csp, ctr: _Counters) -> int:
        unset = [v for v in range(csp.num_vars) if not ctr.assignment.is_set(v)]
        return rng.choice(unset)

    return policy


POLICIES: dict[str, Callable[[int], BranchingPolicy]] = {
    "first_unset": lambda seed: _policy_first_unset,
    "max_occurrence": lambda seed: _policy_max_occurrence,
    "random": make_random_policy,
}


def dpll_search(
    csp: Csp, heuristic: str | BranchingPolicy = "first_unset", seed: int = 0
) -> SearchTree:
    """Build a contradiction search tree by DPLL.

    Branches close as soon as some nogood is falsified; forced variables
    (k-1 values each immediately falsified) are branched first so unit
    propagation appears as chains of near-leaf nodes.  Raises
    ``Satisfiable`` with a witness if a full assignment survives.
    """
    if isinstance(heuristic, str):
        try:
            policy = POLICIES[heuristic](seed)
        except KeyError:
            raise CspError(f"unknown branching policy {heuristic!r}") from None
    else:
        policy = heuristic
    ctr = _Counters(csp)

    def search() -> SearchTree:
        g = ctr.first_falsified()
        if g is not None:
            return Leaf(g)
        if len(ctr.assignment) == csp.num_vars:
            raise Satisfiable(dict(ctr.assignment.values))
        var = ctr.forced_var()
        if var is None:
            var = policy(csp, ctr)
        children = []
        for a in range(csp.k):
            ctr.assign(var, a)
            children.append(search())
            ctr.unassign(var)
        return Internal(var, tuple(children))

    return search()


def verify_tree(csp: Csp, tree: SearchTree) -> TreeMetrics:
    """Walk the tree checking leaf falsification and no repeated variables."""
    acc = [0, 0, 0]
    _verify_rec(csp, tree, PartialAssignment(), 0, (), acc)
    return TreeMetrics(leaves=acc[0], nodes=acc[1], depth=acc[2])


# ---------------------------------------------------------------------------
# exact minimal trees and brute force


def minimal_tree(csp: Csp, node_budget: int = 2_000_000) -> tuple[TreeMetrics, SearchTree]:
    """Exact minimum-leaf search tree via memoized recursion.

    Ties between equal leaf counts break toward smaller depth.  The memo
    is keyed on the partial assignment, so the state space is bounded by
    (k+1)^num_vars; ``node_budget`` caps memo entries.
    """
    k, n = csp.k, csp.num_vars
    ctr = _Counters(csp)
    INF = (float("inf"), float("inf"))
    memo: dict[bytes, tuple[float, float, Optional[int]]] = {}

    if n > 62:
        raise BudgetExceeded("instance far beyond exact-search scale")

    def key() -> bytes:
        values = ctr.assignment.values
        return bytes(values.get(v, k) for v in range(n))

    def best(depth_left: int) -> tuple[float, float, Optional[int]]:
        g = ctr.first_falsified()
        if g is not None:
            return (1, 0, None)
        kk = key()
        hit = memo.get(kk)
        if hit is not None:
            return hit
        if len(memo) >= node_budget:
            raise BudgetExceeded(f"memo exceeded {node_budget} entries")
        if len(ctr.assignment) == n:
            return (INF[0], INF[1], None)
        result = (INF[0], INF[1], None)
        for var in range(n):
            if ctr.assignment.is_set(var):
                continue
            total_leaves = 0.0
            total_depth = 0.0
            for a in range(k):
                ctr.assign(var, a)
                leaves, depth, _ = best(depth_left - 1)
                ctr.unassign(var)
                total_leaves += leaves
                total_depth = max(total_depth, depth)
                if total_leaves >= result[0] and total_depth + 1 >= result[1]:
                    if total_leaves > result[0]:
                        break
            cand = (total_leaves, total_depth + 1, var)
            if (cand[0], cand[1]) < (result[0], result[1]):
                result = cand
        memo[kk] = result
        return result

    leaves, depth, var = best(n)
    if leaves == INF[0]:
        raise Satisfiable(None)

    def rebuild() -> SearchTree:
        g = ctr.first_falsified()
        if g is not None:
            return Leaf(g)
        _, _, var = memo[key()]
        assert var is not None
        children = []
        for a in range(k):
            ctr.assign(var, a)
            children.append(rebuild())
            ctr.unassign(var)
        return Internal(var, tuple(children))

    tree = rebuild()
    metrics = verify_tree(csp, tree)
    assert metrics.leaves == leaves and metrics.depth == depth
    return metrics, tree


@dataclass(frozen=True)
class BruteForceResult:
    satisfiable: bool
    witness: Optional[dict[int, int]] = None
    nodes_visited: int = 0


def brute_force_check(csp: Csp, cap: int = 50_000_000) -> BruteForceResult:
    """Exhaustive verdict with early nogood pruning."""
    ctr = _Counters(csp)
    n, k = csp.num_vars, csp.k
    visited = 0

    def rec(var: int) -> Optional[dict[int, int]]:
        nonlocal visited
        visited += 1
        if visited > cap:
            raise CapExceeded(f"visited more than {cap} nodes")
        if ctr.first_falsified() is not None:
            return None
        if var == n:
            return dict(ctr.assignment.values)
        for a in range(k):
            ctr.assign(var, a)
            witness = rec(var + 1)
            ctr.unassign(var)
            if witness is not None:
                return witness
        return None

    witness = rec(0)
    return BruteForceResult(witness is not None, witness, visited)


# ---------------------------------------------------------------------------
# nogood file format


FORMAT_MAGIC = "p cspnogood"


def write_nogood_file(csp: Csp, path) -> None:
    """Line-oriented nogood format; deterministic and bit-exact."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{FORMAT_MAGIC} {csp.num_vars} {csp.k}\n")
        for ng in csp.nogoods:
            parts = []
            for v, a in ng.literals:
                parts.append(str(v))
                parts.append(str(a))
            parts.append("0")
            fh.write(" ".join(parts) + "\n")


def read_nogood_file(path) -> Csp:
    num_vars = None
    k = None
    nogoods: list[Nogood] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if num_vars is None:
                fields = line.split()
                if len(fields) != 4 or fields[0] != "p" or fields[1] != "cspnogood":
                    raise ParseError(f"line {lineno}: expected '{FORMAT_MAGIC} <vars> <k>'")
                try:
                    num_vars, k = int(fields[2]), int(fields[3])
                except ValueError:
                    raise ParseError(f"line {lineno}: non-integer header field") from None
                continue
            try:
                nums = [int(tok) for tok in line.split()]
            except ValueError:
                raise ParseError(f"line {lineno}: non-integer token") from None
            if not nums or nums[-1] != 0:
                raise ParseError(f"line {lineno}: nogood line must end with 0")
            body = nums[:-1]
            if len(body) % 2 != 0:
                raise ParseError(f"line {lineno}: dangling variable without value")
            lits = list(zip(body[0::2], body[1::2]))
            try:
                nogoods.append(Nogood.of(lits))
            except CspError as e:
                raise ParseError(f"line {lineno}: {e}") from None
    if num_vars is None or k is None:
        raise ParseError("missing header line")
    try:
        return Csp(num_vars, k, nogoods)
    except CspError as e:
        raise ParseError(str(e)) from None
