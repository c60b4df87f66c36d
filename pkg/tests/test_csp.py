import itertools

import pytest
from hypothesis import given, settings, strategies as st

from planarcsp.csp import (
    BruteForceResult,
    CapExceeded,
    ConflictingSideLiterals,
    Csp,
    CspError,
    EMPTY_NOGOOD,
    InvalidLeaf,
    Internal,
    Leaf,
    MissingPivotLiteral,
    Nogood,
    ParseError,
    PartialAssignment,
    ProofStep,
    RepeatedVariable,
    Resolvent,
    ResolutionProof,
    Satisfiable,
    brute_force_check,
    check_proof,
    dpll_search,
    falsifies,
    minimal_tree,
    read_nogood_file,
    resolve,
    table_constraint_to_nogoods,
    tree_to_proof,
    verify_tree,
    write_nogood_file,
)


def units_csp(k=3):
    """k unit nogoods forbidding every value of x0."""
    return Csp(1, k, [Nogood.of([(0, a)]) for a in range(k)])


# ---------------------------------------------------------------- falsifies


def test_empty_nogood_falsified_by_anything():
    assert falsifies(PartialAssignment(), EMPTY_NOGOOD)
    assert falsifies(PartialAssignment({0: 1}), EMPTY_NOGOOD)


def test_falsifies_unit():
    assert falsifies(PartialAssignment({0: 1}), Nogood.of([(0, 1)]))
    assert not falsifies(PartialAssignment({0: 0}), Nogood.of([(0, 1)]))


def test_falsifies_requires_all_literals_set():
    a = PartialAssignment({0: 1})
    assert not falsifies(a, Nogood.of([(0, 1), (1, 0)]))


# ------------------------------------------------------------ table constraints


def test_table_single_tuple():
    ngs = table_constraint_to_nogoods([0], [(2,)], k=3)
    assert ngs == [Nogood.of([(0, 2)])]


def test_table_full_is_k_pow_ell():
    rows = list(itertools.product(range(3), repeat=2))
    ngs = table_constraint_to_nogoods([0, 1], rows, k=3)
    assert len(ngs) == 9


def test_table_two_tuples():
    ngs = table_constraint_to_nogoods([0, 1], [(0, 1), (1, 0)], k=3)
    assert len(ngs) == 2


def test_table_arity_mismatch():
    with pytest.raises(CspError):
        table_constraint_to_nogoods([0, 1], [(0,)], k=3)


# ---------------------------------------------------------------- resolve


def test_resolve_binary():
    prem = [Nogood.of([(0, 0), (1, 1)]), Nogood.of([(0, 1), (1, 1)])]
    assert resolve(prem, 0) == Nogood.of([(1, 1)])


def test_resolve_to_empty():
    prem = [Nogood.of([(0, a)]) for a in range(3)]
    assert resolve(prem, 0) == EMPTY_NOGOOD


def test_resolve_union_semantics():
    prem = [
        Nogood.of([(0, 0), (1, 2)]),
        Nogood.of([(0, 1), (1, 2), (2, 0)]),
        Nogood.of([(0, 2)]),
    ]
    assert resolve(prem, 0) == Nogood.of([(1, 2), (2, 0)])


def test_resolve_missing_pivot():
    prem = [Nogood.of([(0, 0)]), Nogood.of([(1, 1)])]
    with pytest.raises(MissingPivotLiteral):
        resolve(prem, 0)


def test_resolve_conflicting_side_literals():
    prem = [Nogood.of([(0, 0), (1, 0)]), Nogood.of([(0, 1), (1, 1)])]
    with pytest.raises(ConflictingSideLiterals):
        resolve(prem, 0)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_resolution_soundness_by_enumeration(data):
    """Any total assignment falsifying the resolvent falsifies a premise."""
    k = data.draw(st.integers(2, 3))
    n = data.draw(st.integers(2, 4))
    pivot = data.draw(st.integers(0, n - 1))
    prems = []
    for a in range(k):
        extra = data.draw(
            st.lists(
                st.tuples(st.integers(0, n - 1), st.integers(0, k - 1)),
                max_size=2,
            )
        )
        lits = {pivot: a}
        for v, b in extra:
            if v != pivot:
                lits.setdefault(v, b)
        prems.append(Nogood.of(lits.items()))
    try:
        res = resolve(prems, pivot)
    except ConflictingSideLiterals:
        return
    for total in itertools.product(range(k), repeat=n):
        assg = PartialAssignment(dict(enumerate(total)))
        if falsifies(assg, res):
            assert any(falsifies(assg, p) for p in prems)


# ------------------------------------------------------------- trees and proofs


def test_verify_tree_unit_fan():
    csp = units_csp(k=3)
    tree = Internal(0, tuple(Leaf(a) for a in range(3)))
    m = verify_tree(csp, tree)
    assert (m.leaves, m.nodes, m.depth) == (3, 4, 1)


def test_verify_tree_rejects_bad_leaf():
    csp = units_csp(k=3)
    tree = Internal(0, (Leaf(1), Leaf(1), Leaf(2)))
    with pytest.raises(InvalidLeaf):
        verify_tree(csp, tree)


def test_verify_tree_rejects_repeated_variable():
    csp = Csp(1, 2, [Nogood.of([(0, 0)]), Nogood.of([(0, 1)])])
    inner = Internal(0, (Leaf(0), Leaf(1)))
    tree = Internal(0, (inner, Leaf(1)))
    with pytest.raises(RepeatedVariable):
        verify_tree(csp, tree)


def test_tree_to_proof_unit_fan():
    csp = units_csp(k=3)
    tree = Internal(0, tuple(Leaf(a) for a in range(3)))
    proof = tree_to_proof(csp, tree)
    assert proof.derived_count() == 1
    assert proof.steps[-1].nogood == EMPTY_NOGOOD
    assert check_proof(csp, proof)


def test_tree_to_proof_with_weakening_keeps_step_count():
    # branch on an irrelevant variable first: both subtrees resolve to the
    # empty nogood, and the root step folds the weakening in
    csp = Csp(2, 2, [Nogood.of([(1, 0)]), Nogood.of([(1, 1)])])
    sub = Internal(1, (Leaf(0), Leaf(1)))
    tree = Internal(0, (sub, sub))
    proof = tree_to_proof(csp, tree)
    assert proof.derived_count() == 3
    assert check_proof(csp, proof)


def test_check_proof_rejects_nonempty_final():
    csp = units_csp(k=2)
    proof = ResolutionProof([ProofStep(csp.nogoods[0], __import__("planarcsp.csp", fromlist=["Axiom"]).Axiom(0))])
    assert not check_proof(csp, proof)


def test_check_proof_rejects_missing_premise():
    csp = units_csp(k=2)
    from planarcsp.csp import Axiom

    steps = [
        ProofStep(csp.nogoods[0], Axiom(0)),
        ProofStep(EMPTY_NOGOOD, Resolvent(0, (0,))),  # only one premise for k=2
    ]
    assert not check_proof(csp, ResolutionProof(steps))


# ----------------------------------------------------------------- dpll


def test_dpll_unit_fan():
    csp = units_csp(k=4)
    tree = dpll_search(csp)
    m = verify_tree(csp, tree)
    assert m.leaves == 4 and m.depth == 1


def test_dpll_satisfiable_reports_witness():
    csp = Csp(2, 2, [Nogood.of([(0, 0)])])
    with pytest.raises(Satisfiable) as exc:
        dpll_search(csp)
    w = exc.value.witness
    assert w[0] == 1


def test_dpll_policies_agree_on_unsat(tiny_unsat_csps):
    for csp in tiny_unsat_csps:
        for policy in ("first_unset", "max_occurrence", "random"):
            tree = dpll_search(csp, policy, seed=7)
            m = verify_tree(csp, tree)
            proof = tree_to_proof(csp, tree)
            assert check_proof(csp, proof)
            internal = m.nodes - m.leaves
            assert proof.derived_count() == internal


@pytest.fixture
def tiny_unsat_csps():
    out = [units_csp(2), units_csp(3)]
    # pigeonhole-flavored: two variables, all value pairs forbidden
    rows = list(itertools.product(range(2), repeat=2))
    out.append(Csp(2, 2, table_constraint_to_nogoods([0, 1], rows, k=2)))
    # chain: x0=x1 forced, then x1 forbidden everywhere
    ngs = table_constraint_to_nogoods([0, 1], [(0, 1), (1, 0)], k=2)
    ngs += [Nogood.of([(1, 0)]), Nogood.of([(1, 1)])]
    out.append(Csp(2, 2, ngs))
    return out


# ----------------------------------------------------- minimal tree / brute force


def test_minimal_tree_unit_fan():
    csp = units_csp(k=3)
    metrics, tree = minimal_tree(csp)
    assert metrics.leaves == 3
    assert verify_tree(csp, tree).leaves == 3


def test_minimal_tree_never_beats_dpll(tiny_unsat_csps):
    for csp in tiny_unsat_csps:
        best, _ = minimal_tree(csp)
        for policy in ("first_unset", "random"):
            got = verify_tree(csp, dpll_search(csp, policy, seed=3))
            assert best.leaves <= got.leaves


def test_brute_force_no_nogoods_sat():
    res = brute_force_check(Csp(3, 2, []))
    assert res.satisfiable
    assert res.witness == {0: 0, 1: 0, 2: 0}


def test_brute_force_cross_oracle(tiny_unsat_csps):
    for csp in tiny_unsat_csps:
        assert not brute_force_check(csp).satisfiable
        tree = dpll_search(csp)
        assert verify_tree(csp, tree).leaves >= 1


def test_brute_force_cap():
    csp = Csp(12, 3, [])
    with pytest.raises(CapExceeded):
        brute_force_check(csp, cap=10)


def test_tree_metrics_node_bound(tiny_unsat_csps):
    for csp in tiny_unsat_csps:
        m = verify_tree(csp, dpll_search(csp))
        assert m.nodes * (csp.k - 1) <= csp.k * m.leaves - 1
        assert m.depth <= csp.num_vars


# ------------------------------------------------------------- file format


def test_nogood_file_roundtrip(tmp_path):
    csp = Csp(4, 8, [Nogood.of([(0, 7), (1, 3)]), Nogood.of([(2, 0)]), EMPTY_NOGOOD])
    path = tmp_path / "x.cspnogood"
    write_nogood_file(csp, path)
    text = path.read_text()
    assert text.splitlines()[0] == "p cspnogood 4 8"
    assert "0 7 1 3 0" in text
    assert text.splitlines()[-1] == "0"
    back = read_nogood_file(path)
    assert back.num_vars == 4 and back.k == 8
    assert back.nogoods == csp.nogoods


def test_nogood_file_identical_bytes(tmp_path):
    csp = units_csp(3)
    p1, p2 = tmp_path / "a", tmp_path / "b"
    write_nogood_file(csp, p1)
    write_nogood_file(csp, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_nogood_file_rejects_garbage(tmp_path):
    path = tmp_path / "bad"
    path.write_text("p cspnogood 2 2\n1 0\n")  # missing terminator
    with pytest.raises(ParseError):
        read_nogood_file(path)
    path.write_text("nonsense\n")
    with pytest.raises(ParseError):
        read_nogood_file(path)
