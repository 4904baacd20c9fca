from __future__ import annotations

import random
from fractions import Fraction as F

import numpy as np
import pytest

from gstspace.errors import InvalidInput
from gstspace.geometry import (
    FailureCertificate,
    ProbeParams,
    SurfacePath,
    TimedOut,
    component_label,
    contraction,
    eigen_frame,
    path_probe,
    segment_classify,
    surface_sample,
)
from gstspace.points import (
    boundary_point,
    influence_margin,
    involution,
    membership,
    random_ind_point,
    theta_point,
    theta_roots,
)
from gstspace.quadform import hessian, psi

TEQ = [F(1), F(1, 2), F(1, 3)]


@pytest.mark.parametrize("n,k,l", [(3, 1, 1), (4, 1, 2), (5, 2, 2), (8, 3, 4)])
def test_eigen_frame(n, k, l):
    fr = eigen_frame(n)
    assert (fr.k, fr.l) == (k, l)
    Q = hessian(n).Q_float()
    assert np.allclose(fr.P.T @ Q @ fr.P, np.diag(fr.D), atol=1e-9)
    assert np.allclose(fr.P[:, 0], np.ones(n) / np.sqrt(n), atol=1e-9)
    assert all(fr.D[1 : 1 + k] > 0) and all(fr.D[1 + k :] < 0)


def test_component_labels_n3():
    a = component_label(TEQ)
    assert component_label(involution(TEQ)).sign == -a.sign
    assert component_label([F(1, 3), F(1, 9), F(1, 27)]).sign == a.sign


def test_component_labels_n4_boundary():
    b = boundary_point(4)
    assert component_label(b).sign == -component_label(involution(b)).sign


def test_component_label_not_applicable():
    with pytest.raises(InvalidInput):
        component_label(boundary_point(8))
    with pytest.raises(InvalidInput):
        component_label([1, 0, 1])


def test_component_label_matches_plane_orientation_n3():
    # GST_3 is the plane p1 - 4 p2 + 3 p3 = 0 minus the line p1 = p3; the
    # sign of p1 - p3 tells the two pieces apart
    rng = random.Random(11)
    ref = None
    for _ in range(100):
        p = random_ind_point(3, rng)
        lab = component_label(p).sign
        side = 1 if p[0] > p[2] else -1
        ref = ref or lab * side
        assert lab * side == ref


def test_component_label_constant_along_all_in_gst_segments():
    rng = random.Random(5)
    for _ in range(20):
        p = random_ind_point(3, rng)
        c = F(rng.randint(1, 9), 10)
        q = [c * v for v in p]
        assert segment_classify(p, q).kind == "AllInGST"
        for t in (F(1, 4), F(1, 2), F(3, 4)):
            x = [(1 - t) * a + t * b for a, b in zip(p, q)]
            assert component_label(x).sign == component_label(p).sign


def test_contraction():
    m = [F(1, 2)] * 3
    assert contraction(TEQ, 0, m) == TEQ
    assert contraction(TEQ, 1, m) == m
    for t in (F(1, 7), F(1, 2), F(5, 6)):
        assert psi(contraction(TEQ, t, m)) == 0
    with pytest.raises(InvalidInput):
        contraction(TEQ, F(1, 2), [0, 1, 0])
    with pytest.raises(InvalidInput):
        contraction([1, F(1, 2), F(1, 4)], F(1, 2), m)


def test_contraction_random_points():
    rng = random.Random(2)
    for n in (5, 6, 8):
        p = random_ind_point(n, rng)
        for k in range(11):
            assert psi(contraction(p, F(k, 10), [F(1, 3)] * n)) == 0


def test_segment_regimes():
    q = [v / max(TEQ) for v in [F(1, 2) * v for v in TEQ]]
    assert segment_classify(TEQ, [F(1, 2) * v for v in TEQ]).kind == "AllInGST"
    assert segment_classify(TEQ, q).kind == "AllInGST"
    res = segment_classify(TEQ, involution(TEQ))
    assert res.kind == "AllInIndNotGST"
    assert res.failures == [(F(1, 2), [F(1, 2)] * 3)]
    rs = theta_roots(10)
    res = segment_classify(theta_point(10, float(rs[0])), theta_point(10, float(rs[2])))
    assert res.kind == "InteriorOutsideInd"


def test_segment_exact_outside():
    rng = random.Random(9)
    p, q = random_ind_point(5, rng), random_ind_point(5, rng)
    assert segment_classify(p, q).kind == "InteriorOutsideInd"


def test_segment_needs_gst_endpoints():
    with pytest.raises(InvalidInput):
        segment_classify([1, 0, 1], TEQ)


def test_segment_certified_boundary_pair():
    b = boundary_point(6)
    assert segment_classify(b, involution(b)).kind == "AllInIndNotGST"


def test_lines_through_points_equivalent_to_one():
    # x ~ 1 (a constant point): every segment from x to a point of Ind_n stays in Ind_n
    rng = random.Random(21)
    for n in (3, 5, 6):
        x = [F(2, 5)] * n
        for _ in range(100 if n == 3 else 20):
            p = random_ind_point(n, rng)
            for t in (F(0), F(1, 3), F(1, 2), F(1)):
                assert psi([(1 - t) * a + t * b for a, b in zip(p, x)]) == 0


def test_lines_from_points_not_equivalent_to_one_leave_ind():
    rng = random.Random(22)
    for n in (3, 5, 6):
        pool = [random_ind_point(n, rng) for _ in range(30)]
        if n == 3:
            # Ind_3 also contains the plane p1 = p3, where influence fails
            pool += [[F(a, 9), F(b, 9), F(a, 9)] for a, b in ((1, 2), (7, 3), (4, 8))]
        for x in pool[:20]:
            assert any(psi([(a + b) / 2 for a, b in zip(p, x)]) != 0 for p in pool)


def test_surface_sample():
    pts, attempts = surface_sample(8, 100, 0.05, 42)
    assert len(pts) == 100
    assert len(pts) / attempts >= 0.5
    for p in pts:
        assert abs(psi(p)) <= 1e-9
        assert influence_margin(p)[0] > 0
        assert membership(p).in_gst


def test_surface_sample_is_seeded():
    assert surface_sample(6, 5, 0.05, 3) == surface_sample(6, 5, 0.05, 3)


def test_path_probe_disconnected_cases():
    res = path_probe(TEQ, involution(TEQ))
    assert isinstance(res, FailureCertificate)
    assert res.label_p.sign == -res.label_q.sign
    b = boundary_point(4)
    assert isinstance(path_probe(b, involution(b)), FailureCertificate)


def test_path_probe_trivial():
    b = boundary_point(8).floats()
    res = path_probe(b, b)
    assert isinstance(res, SurfacePath) and len(res.waypoints) == 1


def check_path(res, tol=1e-6, margin=1e-6):
    assert isinstance(res, SurfacePath)
    for w in res.waypoints:
        r = membership(w, tol=tol, margin_tol=margin)
        assert r.in_box and r.in_gst
    steps = [np.linalg.norm(np.subtract(a, b)) for a, b in zip(res.waypoints, res.waypoints[1:])]
    assert max(steps) <= 2 * 0.01 + 1e-12
    assert res.max_psi_drift <= tol and res.min_influence_margin >= margin


@pytest.mark.parametrize("n", [8, 9, 10])
def test_path_probe_connected(n):
    b = boundary_point(n)
    res = path_probe(b, involution(b), ProbeParams(seed=11))
    check_path(res)
    assert not res.experimental


def test_path_probe_experimental_label():
    pts, _ = surface_sample(6, 2, 0.05, 4)
    res = path_probe(pts[0], pts[1], ProbeParams(seed=1))
    assert res.experimental
    if isinstance(res, SurfacePath):
        check_path(res)


def test_path_probe_budget_exhaustion():
    b = boundary_point(8)
    res = path_probe(b, involution(b), ProbeParams(seed=11, budget=3))
    assert isinstance(res, TimedOut) and res.iterations <= 3
