import random

from acyclica.exactla import GF, SparseMatrix, rank
from acyclica.gradedcomplex import Window, build_complex

F5 = GF(5)


def random_invertible(n, rng, field):
    while True:
        m = SparseMatrix.from_dense([[rng.randrange(field.p) for _ in range(n)] for _ in range(n)], field)
        if rank(m) == n:
            return m


def random_complex(seed, field=F5, positions=(0, 3), degrees=(0, 1), max_atoms=4):
    """A complex built from stalks and cones, then scrambled by a basis change
    in every term.  Returns (complex, expected cohomology dims)."""
    rng = random.Random(seed)
    plo, phi = positions
    dlo, dhi = degrees
    dims: dict = {}
    cones = []  # (n, t, source index, target index)
    expected: dict = {}
    for t in range(dlo, dhi + 1):
        for _ in range(rng.randrange(max_atoms + 1)):
            n = rng.randint(plo, phi)
            if rng.random() < 0.5 or n == phi:
                dims[(n, t)] = dims.get((n, t), 0) + 1
                expected[(n, t)] = expected.get((n, t), 0) + 1
            else:
                i = dims.get((n, t), 0)
                j = dims.get((n + 1, t), 0)
                dims[(n, t)] = i + 1
                dims[(n + 1, t)] = j + 1
                cones.append((n, t, i, j))
    raw = {}
    for n, t, i, j in cones:
        raw.setdefault((n, t), []).append((j, i, 1))
    change = {b: random_invertible(k, rng, field) for b, k in dims.items()}
    diffs = {}
    for (n, t), ents in raw.items():
        d = SparseMatrix(dims[(n + 1, t)], dims[(n, t)], ents, field)
        diffs[(n, t)] = change[(n + 1, t)] @ d @ _inverse(change[(n, t)], field)
    window = Window(plo, phi, dlo, dhi)
    return build_complex(dims, diffs, window, field), expected


def _inverse(m, field):
    from acyclica.exactla import solve_many

    return solve_many(m, SparseMatrix.identity(m.rows, field))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.LINES:
        terminalreporter.write_line(line)
