"""Independent reference computations used by the test suite.

These deliberately avoid the library's own row-reduction and subspace
machinery wherever they act as a second opinion: plain Gaussian
elimination on lists of Fractions, the Zassenhaus trick for
intersections, and closed-form line bundle cohomology on the projective
line.
"""

from fractions import Fraction


def elim_rank(rows):
    """Rank by forward elimination on a copy of the row list."""
    work = [[Fraction(v) for v in row] for row in rows]
    if not work:
        return 0
    n_cols = len(work[0])
    rank = 0
    for c in range(n_cols):
        piv = None
        for i in range(rank, len(work)):
            if work[i][c]:
                piv = i
                break
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        pr = work[rank]
        for i in range(rank + 1, len(work)):
            f = work[i][c] / pr[c]
            if f:
                for j in range(c, n_cols):
                    work[i][j] -= f * pr[j]
        rank += 1
    return rank


def matrix_rank(matrix_rows, n_cols):
    if not matrix_rows:
        return 0
    assert all(len(r) == n_cols for r in matrix_rows)
    return elim_rank(matrix_rows)


def kernel_dim(matrix_rows, n_cols):
    return n_cols - matrix_rank(matrix_rows, n_cols)


def betti_number(d_out_rows, d_out_cols, d_in_rows, d_in_cols):
    """dim ker(d_out) - rank(d_in) for consecutive differentials."""
    return kernel_dim(d_out_rows, d_out_cols) - matrix_rank(d_in_rows, d_in_cols)


def zassenhaus_intersection_dim(basis_a, basis_b, n):
    """dim(A cap B) via the Zassenhaus block trick.

    Row-reduce [[a, a],[b, 0]]; the rows with zero left half carry a basis
    of the intersection in their right half, so the count is
    rank(stack) - rank(sum).
    """
    stacked = [list(v) + list(v) for v in basis_a] + [list(v) + [0] * n for v in basis_b]
    sum_rank = elim_rank([list(v) for v in basis_a] + [list(v) for v in basis_b])
    total_rank = elim_rank(stacked) if stacked else 0
    return total_rank - sum_rank


def line_bundle_h0(k):
    """Global sections of O(k) on the projective line."""
    return max(k + 1, 0)


def line_bundle_h1(k):
    return max(-k - 1, 0)
