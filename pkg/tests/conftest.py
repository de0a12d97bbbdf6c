import itertools

import numpy as np
import pytest

from qig.states import new_density

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


@pytest.fixture
def qubit():
    """The diagonal qubit state diag(0.7, 0.3)."""
    return new_density(np.diag([0.7, 0.3]))


def leibniz_det(M):
    """Determinant by permutation expansion; independent of any factorization."""
    M = np.asarray(M)
    n = M.shape[0]
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        term = (-1) ** inversions
        for i, j in enumerate(perm):
            term = term * M[i, j]
        total += term
    return total


def superoperator_J(D, f):
    """Brute-force n^2 x n^2 matrix of J_D = f(L_D R_D^-1) R_D on row-major vec.

    L_D and R_D are built explicitly as Kronecker products; the functional
    calculus runs on the Hermitian operator L_D R_D^-1 of size n^2.
    """
    D = np.asarray(getattr(D, "matrix", D))
    n = D.shape[0]
    I = np.eye(n)
    L = np.kron(D, I)  # vec(DX) for row-major vec
    R = np.kron(I, D.T)  # vec(XD)
    T = L @ np.linalg.inv(R)
    T = (T + T.conj().T) / 2
    w, V = np.linalg.eigh(T)
    fT = (V * np.asarray(f(w))) @ V.conj().T
    return fT @ R


def vec(X):
    return np.asarray(X).reshape(-1)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Record a PASS/FAIL line for an acceptance criterion; lines are echoed at the end of the run."""

    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
