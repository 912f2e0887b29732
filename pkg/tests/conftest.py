import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dhh.diffmod import DiffModule, prime_field
from dhh.instances import f4

settings.register_profile("dhh", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("dhh")


@pytest.fixture
def F2():
    return prime_field(2)


@pytest.fixture
def F4():
    return f4(True)


def module(k, sigma, acts=None):
    """Difference module over a prime field given by sigma alone."""
    sigma = np.asarray(sigma)
    acts = acts if acts is not None else [np.eye(sigma.shape[0], dtype=np.int64)]
    return DiffModule(k, acts, sigma)


def orbit_submodule(m, vectors):
    """Smallest subspace containing ``vectors`` and stable under the k-action and sigma."""
    from dhh.linfp import Subspace
    W = Subspace.span(np.atleast_2d(vectors), m.dim, m.p)
    ops = list(m.act) + [m.sigma]
    while True:
        rows = [W.basis] + [(op @ W.basis.T).T for op in ops] if W.dim else [W.basis]
        nxt = Subspace.span(np.vstack(rows), m.dim, m.p)
        if nxt == W:
            return W
        W = nxt


def ses_from_submodule(b, W):
    """0 -> W -> B -> B/W -> 0 as a pair of difference maps."""
    from dhh.diffmod import DIFFERENCE, DiffMap, DiffModule
    from dhh.linfp import Matrix, quotient_space
    p = b.p
    sub_acts = [Matrix._wrap(W.coords((a @ W.basis.T).T).T, p) for a in b.act]
    sub_sigma = Matrix._wrap(W.coords((b.sigma @ W.basis.T).T).T, p)
    A = DiffModule(b.ring, sub_acts, sub_sigma, name="sub")
    q = quotient_space(b.dim, W, p)
    C = DiffModule(b.ring, [q.induced(a) for a in b.act], q.induced(b.sigma), name="quot")
    incl = Matrix._wrap(W.basis.T.copy(), p)
    proj = Matrix._wrap(q.coords(np.eye(b.dim, dtype=np.int64)).T, p)
    return DiffMap(A, b, incl, DIFFERENCE), DiffMap(b, C, proj, DIFFERENCE)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Collects one verdict line per acceptance criterion for the terminal summary."""
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
