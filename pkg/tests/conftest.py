import numpy as np
import pytest

import homsim as hs

SIGMA = hs.gaussian_sigma_from_fwhm(1584.0, 2.0)
RHOS = (0.0, -0.8, 0.8)
FOUR = ("2/2", "3/1", "4/0")
TWO = ("1/1", "2/0")


def jsa_for(rho, n=49, span=4.0, sigma=SIGMA):
    return hs.gaussian_jsa(hs.GaussianJsaParams(sigma, rho), hs.make_grid(sigma, span, n))


def rel_dev(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


@pytest.fixture(scope="session")
def sigma():
    return SIGMA


@pytest.fixture(scope="session")
def jsas8():
    return {rho: jsa_for(rho, n=8) for rho in RHOS}


@pytest.fixture(scope="session")
def jsas49():
    return {rho: jsa_for(rho, n=49) for rho in RHOS}


@pytest.fixture(scope="session")
def sweep():
    return np.linspace(0.0, 10.0, 201)


# acceptance criteria record their verdicts here; printed after the run
ACCEPTANCE = {}


def record(criterion, ok, detail=""):
    ok_before, details = ACCEPTANCE.get(criterion, (True, []))
    ACCEPTANCE[criterion] = (ok_before and bool(ok), details + [f"{'ok' if ok else 'FAILED'}: {detail}"])
    print(f"[criterion {criterion}] {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE):
        ok, details = ACCEPTANCE[criterion]
        terminalreporter.write_line(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}")
        for line in details:
            terminalreporter.write_line(f"    {line}")
