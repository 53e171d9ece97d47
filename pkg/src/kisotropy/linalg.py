"""Small exact linear algebra over Q and Z (lists of lists)."""

from fractions import Fraction

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import hermite_normal_form, smith_normal_form


def to_q(M):
    return [[Fraction(x) for x in row] for row in M]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def matvec(A, v):
    return [sum(a * b for a, b in zip(row, v)) for row in A]


def transpose(A):
    return [list(r) for r in zip(*A)] if A else []


def as_tuple(M):
    return tuple(tuple(r) for r in M)


def rref(M):
    """Reduced row echelon form and pivot columns."""
    A = to_q(M)
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def rank(M):
    if not M or not M[0]:
        return 0
    return len(rref(M)[1])


def nullspace(M, ncols=None):
    """Basis of {x : M x = 0}."""
    if not M:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    A, piv = rref(M)
    n = len(A[0])
    free = [c for c in range(n) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, p in enumerate(piv):
            v[p] = -A[r][f]
        out.append(v)
    return out


def solve(M, b):
    """Some x with M x = b, or None."""
    aug = [list(row) + [bi] for row, bi in zip(M, b)]
    A, piv = rref(aug)
    n = len(M[0])
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for r, p in enumerate(piv):
        x[p] = A[r][n]
    return x


def inverse(M):
    n = len(M)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    A, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in A]


def det(M):
    n = len(M)
    A = to_q(M)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c]:
                f = A[i][c] / A[c][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return d


def in_row_space(rows, v):
    if not rows:
        return all(x == 0 for x in v)
    return rank(rows + [v]) == rank(rows)


def is_integral(M):
    return all(Fraction(x).denominator == 1 for row in M for x in row)


def int_matrix(M):
    return [[int(Fraction(x)) for x in row] for row in M]


# integer normal forms (sympy)

def elementary_divisors(M):
    """Diagonal of the Smith normal form of an integer matrix (nonzero entries only)."""
    if not M or not M[0]:
        return []
    S = smith_normal_form(Matrix(M), domain=ZZ)
    return [abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0]


def cokernel_torsion(M, rows):
    """Torsion invariants and free rank of Z^rows / (column span of M)."""
    if not M or not M[0]:
        return [], rows
    divs = elementary_divisors(M)
    return [d for d in divs if d > 1], rows - len(divs)


def column_hnf(gens, n):
    """Basis (as columns) of the Z-span of integer column vectors ``gens`` in Z^n."""
    M = Matrix(n, len(gens), lambda i, j: gens[j][i])
    H = hermite_normal_form(M)
    cols = [[int(H[i, j]) for i in range(n)] for j in range(H.shape[1])]
    cols = [c for c in cols if any(c)]
    return [[c[i] for c in cols] for i in range(n)]


class IntegerSolver:
    """Integer solutions of M x = b for many right-hand sides (one Smith decomposition)."""

    def __init__(self, M):
        from sympy.matrices.normalforms import smith_normal_decomp
        self.m = len(M)
        self.n = len(M[0]) if self.m else 0
        if self.n:
            S, U, V = smith_normal_decomp(Matrix(M), domain=ZZ)
            self.diag = [int(S[i, i]) if i < self.n else 0 for i in range(self.m)]
            self.U = [[int(x) for x in U.row(i)] for i in range(self.m)]
            self.V = [[int(x) for x in V.row(i)] for i in range(self.n)]

    def solve(self, b):
        if self.n == 0:
            return [] if all(x == 0 for x in b) else None
        y = [0] * self.n
        for i, s in enumerate(self.diag):
            ci = sum(u * int(x) for u, x in zip(self.U[i], b))
            if s == 0:
                if ci != 0:
                    return None
            elif ci % s:
                return None
            else:
                y[i] = ci // s
        return [sum(v * w for v, w in zip(row, y)) for row in self.V]


def integer_solve(M, b):
    """Integer x with M x = b, or None (M integer, full column rank not required)."""
    return IntegerSolver(M).solve(b)
