import numpy as np
import pytest

from intobs import design_bundle, from_document, preset

# acceptance lines collected during the run, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def quiet_doc(name):
    """Preset document with every envelope and true disturbance/noise set to zero."""
    doc = preset(name)
    for key in ("d_upper", "d_lower", "w_upper", "w_lower"):
        doc["bounds"][key] = ["0"]
    doc["signals"]["d"] = ["0"]
    doc["signals"]["w"] = ["0"]
    return doc


@pytest.fixture(scope="session")
def dt_preset():
    loaded = from_document(preset("paper-dt"))
    return loaded, design_bundle(loaded)


@pytest.fixture(scope="session")
def ct_preset():
    loaded = from_document(preset("paper-ct"))
    return loaded, design_bundle(loaded)


def well_conditioned(rng, n, cond_max=50.0):
    while True:
        V = rng.standard_normal((n, n))
        if np.linalg.cond(V) < cond_max:
            return V


def random_semisimple(rng, n, domain):
    """Random real diagonalizable matrix that is Schur (dt) or Hurwitz (ct).

    Built as ``V J inv(V)`` from a random real block-diagonal ``J``, so the
    spectrum is known in advance.
    """
    blocks = []
    size = 0
    while size < n:
        if n - size >= 2 and rng.random() < 0.5:
            if domain == "dt":
                r, th = rng.uniform(0.05, 0.95), rng.uniform(0.1, np.pi - 0.1)
                a, b = r * np.cos(th), r * np.sin(th)
            else:
                a, b = -rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0)
            blocks.append(np.array([[a, -b], [b, a]]))
            size += 2
        else:
            lam = rng.uniform(-0.95, 0.95) if domain == "dt" else -rng.uniform(0.1, 3.0)
            blocks.append(np.array([[lam]]))
            size += 1
    J = np.zeros((n, n))
    k = 0
    for blk in blocks:
        s = blk.shape[0]
        J[k:k + s, k:k + s] = blk
        k += s
    V = well_conditioned(rng, n)
    return V @ J @ np.linalg.inv(V)
