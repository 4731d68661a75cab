import itertools
import math

import numpy as np
import pytest

from conftest import random_rotation
from illumcone._search import bisect
from illumcone.diameter import Configuration
from illumcone.geometry import derive_cone_params
from illumcone.illumination import (blocking_witness, counting_lower_bound, greedy_apex_cover, illumination_cap,
                                    is_blocked, witness_search)
from illumcone.sphere import generate_annulus_code, sample_uniform

E1 = np.array([1.0, 0, 0])
E2 = np.array([0, 1.0, 0])


def arc_angles(points):
    return np.arctan2(points[:, 1], points[:, 0])


def in_arc(t, center, radius):
    return abs((t - center + math.pi) % (2 * math.pi) - math.pi) <= radius + 1e-12


def brute_arc_multiplicity(centers, radius):
    """Largest subset of closed arcs with a common point, by enumerating subsets."""
    m = len(centers)
    best = 0
    for k in range(1, m + 1):
        for S in itertools.combinations(range(m), k):
            starts = [centers[i] - radius for i in S]
            if any(all(in_arc(s, centers[i], radius) for i in S) for s in starts):
                best = k
                break
    return best


def brute_min_stabbing(centers, radius):
    """Fewest points hitting every arc; right endpoints suffice as candidates."""
    cands = [c + radius for c in centers]
    m = len(centers)
    for k in range(1, m + 1):
        for pts in itertools.combinations(cands, k):
            if all(any(in_arc(p, c, radius) for p in pts) for c in centers):
                return k
    return m


def test_illumination_cap_examples(opt):
    cap = illumination_cap(E1, opt.alpha)
    assert np.array_equal(cap.center, -E1)
    assert cap.radius == pytest.approx(2 * opt.beta, abs=1e-10)
    assert illumination_cap(E1, math.pi / 6).radius == pytest.approx(math.pi / 3)
    with pytest.raises(ValueError):
        illumination_cap(E1, 0.6)


def test_is_blocked_examples(opt):
    blocked, margin = is_blocked(E1, E1, opt)
    assert blocked and margin == pytest.approx(math.pi - opt.cap_radius, abs=1e-12)
    assert margin == pytest.approx(1.87186, abs=1e-4)
    blocked, margin = is_blocked(E1, -E1, opt)
    assert not blocked and margin == pytest.approx(-opt.cap_radius, abs=1e-12)
    blocked, margin = is_blocked(E1, E2, opt)
    assert blocked and margin == pytest.approx(opt.alpha, abs=1e-12)


def test_witness_examples(opt):
    b = blocking_witness(E1, E1, opt)
    assert b is not None
    assert float(E1 @ (E1 - b)) == pytest.approx(1 + opt.R * math.cos(opt.beta), abs=1e-12)
    assert blocking_witness(E1, -E1, opt) is None


def test_witness_closed_form_gain(opt):
    # max over the circle of <l, x - b> = d cos(angle(l, x) - alpha)
    for x, ell in zip(sample_uniform(3, 200, seed=1), sample_uniform(3, 200, seed=2)):
        _, value = witness_search(x, ell, opt, resolution=64)
        gamma = math.acos(np.clip(ell @ x, -1, 1))
        assert value == pytest.approx(opt.d * math.cos(gamma - opt.alpha), abs=1e-12)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_witness_agreement_other_dims(opt, n):
    res = 256
    for i, (x, ell) in enumerate(zip(sample_uniform(n, 300, seed=n), sample_uniform(n, 300, seed=n + 50))):
        blocked, margin = is_blocked(x, ell, opt)
        found = blocking_witness(x, ell, opt, resolution=res, seed=i) is not None
        assert found == blocked or abs(margin) < 2 * math.pi / res


def test_witness_rotation_equivariant(opt):
    x, ell = sample_uniform(3, 2, seed=9)
    Q = random_rotation(3, 1)
    b1, v1 = witness_search(x, ell, opt)
    b2, v2 = witness_search(Q @ x, Q @ ell, opt)
    assert v1 == pytest.approx(v2, abs=1e-12)
    assert np.allclose(Q @ b1, b2, atol=1e-8)


def test_transition_angle_by_bisection(opt):
    def gain(s):
        ell = math.cos(s) * -E1 + math.sin(s) * E2
        return witness_search(E1, ell, opt, resolution=256)[1]

    s_star = bisect(gain, 0.5, 2.0, tol=1e-12)
    assert s_star == pytest.approx(math.pi / 2 - opt.alpha, abs=1e-8)
    assert s_star == pytest.approx(2 * opt.beta, abs=1e-8)


def test_lower_bound_arithmetic(opt):
    cfg = Configuration(generate_annulus_code(3, 2 * opt.beta, 1, seed=0).points, opt, psi=2 * opt.beta)
    cert = counting_lower_bound(cfg, mode="branch_and_bound")
    assert cert.lower_bound == 1
    assert math.ceil(100 / 7) == 15


def test_n2_maximal_code_bound(opt):
    code = generate_annulus_code(2, 2 * opt.beta, 10, max_trials=100_000, seed=0)
    cfg = Configuration(code.points, opt, psi=code.psi)
    cert = counting_lower_bound(cfg, mode="exact_n2")
    assert cert.certified
    centers = arc_angles(-code.points)
    mult = brute_arc_multiplicity(list(centers), cert.phi)
    assert cert.lower_bound == math.ceil(2 / mult)
    cover = greedy_apex_cover(cfg)
    assert len(cover) == brute_min_stabbing(list(centers), opt.cap_radius)


def test_single_apex_cover(opt):
    cfg = Configuration([E1], opt, psi=2 * opt.beta)
    cover = greedy_apex_cover(cfg)
    assert cover.shape == (1, 3)
    assert np.allclose(cover[0], -E1)


def test_two_overlapping_arcs_cover_one(opt):
    t = 1.5
    cfg = Configuration([[1.0, 0.0], [math.cos(t), math.sin(t)]], opt, psi=2 * opt.beta)
    assert len(greedy_apex_cover(cfg)) == 1
    assert brute_min_stabbing(list(arc_angles(-cfg.apexes)), opt.cap_radius) == 1


def test_caveats_for_bad_preconditions(opt):
    cfg = Configuration([[1.0, 0, 0], [0.5403023058681398, 0.8414709848078965, 0]], opt, psi=1.4)
    cert = counting_lower_bound(cfg, mode="branch_and_bound")
    assert not cert.certified
    assert any("psi" in c for c in cert.caveats)
    assert any("diameter" in c for c in cert.caveats)
    p = derive_cone_params(0.7, 1.25)
    assert p.alpha > math.pi / 6
    cert = counting_lower_bound(Configuration([[1.0, 0.0]], p), mode="exact_n2")
    assert any("pi/6" in c for c in cert.caveats)


def test_heuristic_bound_flagged(opt):
    code = generate_annulus_code(3, 2 * opt.beta, 10, seed=1)
    cert = counting_lower_bound(Configuration(code.points, opt, psi=code.psi), mode="heuristic")
    assert not cert.certified
    assert cert.lower_bound <= len(code)


@pytest.mark.parametrize("n,seed", [(3, 0), (3, 1), (4, 2), (5, 3)])
def test_sandwich(opt, n, seed):
    code = generate_annulus_code(n, 2 * opt.beta, 25, max_trials=50_000, seed=seed)
    cfg = Configuration(code.points, opt, psi=code.psi)
    cover = greedy_apex_cover(cfg, seed=seed)
    for mode in ("heuristic", "branch_and_bound"):
        cert = counting_lower_bound(cfg, mode=mode, seed=seed)
        assert cert.lower_bound <= len(cover)
        assert cert.lower_bound <= len(cfg)
        assert (cert.lower_bound == len(cfg)) == (cert.multiplicity["max_multiplicity"] == 1)
    # every apex has a chosen direction inside its illumination cap
    ang = np.arccos(np.clip(cover @ (-cfg.apexes).T, -1, 1))
    assert np.all(ang.min(axis=0) <= opt.cap_radius + 1e-9)


def test_counts_rotation_invariant(opt):
    code = generate_annulus_code(3, 2 * opt.beta, 12, seed=4)
    Q = random_rotation(3, 7)
    a = counting_lower_bound(Configuration(code.points, opt), mode="branch_and_bound")
    b = counting_lower_bound(Configuration(code.points @ Q.T, opt), mode="branch_and_bound")
    assert a.multiplicity["max_multiplicity"] == b.multiplicity["max_multiplicity"]
    assert a.lower_bound == b.lower_bound
