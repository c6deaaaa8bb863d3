# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled pairing sweep.

Same contract and enumeration order as the pure-Python sweep in
``_sweep_py``; the two are cross-checked in the test suite.  Index
arithmetic is done in 64-bit integers, which limits this path to grids of
at most 32 cells (ample for the cases the toolkit sweeps exhaustively).
"""


def sweep_pairings(int k0, int k1, long long start, long long stop):
    """Sweep pairings in [start, stop); see the pure implementation for docs."""
    cdef int cells = k0 * k1
    if cells % 2 != 0:
        raise ValueError("odd cell count has no perfect pairing")
    if cells > 32:
        raise ValueError("compiled sweep supports at most 32 cells")

    cdef int n_pairs = cells // 2
    cdef int n_triples = n_pairs * (n_pairs - 1) * (n_pairs - 2) // 6

    cdef long long sizes[16]
    cdef int i, j, l, r, c
    sizes[n_pairs - 1] = 1
    for i in range(n_pairs - 2, -1, -1):
        sizes[i] = sizes[i + 1] * (2 * (n_pairs - i - 1) - 1)

    # cell triples lying in one row or column
    cdef int line_a[1024]
    cdef int line_b[1024]
    cdef int line_c[1024]
    cdef int n_lines = 0
    for r in range(k0):
        for i in range(k1):
            for j in range(i + 1, k1):
                for l in range(j + 1, k1):
                    line_a[n_lines] = r * k1 + i
                    line_b[n_lines] = r * k1 + j
                    line_c[n_lines] = r * k1 + l
                    n_lines += 1
    for c in range(k1):
        for i in range(k0):
            for j in range(i + 1, k0):
                for l in range(j + 1, k0):
                    line_a[n_lines] = i * k1 + c
                    line_b[n_lines] = j * k1 + c
                    line_c[n_lines] = l * k1 + c
                    n_lines += 1

    # rectangle corner quadruples
    cdef int rect_a[1024]
    cdef int rect_b[1024]
    cdef int rect_c[1024]
    cdef int rect_d[1024]
    cdef int n_rects = 0
    cdef int r0, r1, c0, c1
    for r0 in range(k0):
        for r1 in range(r0 + 1, k0):
            for c0 in range(k1):
                for c1 in range(c0 + 1, k1):
                    rect_a[n_rects] = r0 * k1 + c0
                    rect_b[n_rects] = r0 * k1 + c1
                    rect_c[n_rects] = r1 * k1 + c0
                    rect_d[n_rects] = r1 * k1 + c1
                    n_rects += 1

    cdef int fiber[32]
    cdef int avail[32]
    cdef int n_avail, digit_i, b_pos
    cdef long long index, rem, digit
    cdef char badmark[4960]
    cdef int marked[4960]
    cdef int n_marked, bad, t
    cdef int fa, fb, fc, fd, tmp, distinct
    cdef object hist = [0] * (n_triples + 1)
    all_bad = []

    for t in range(n_triples):
        badmark[t] = 0

    index = start
    while index < stop:
        # unrank the pairing: least unpaired cell meets its partner by digit
        rem = index
        n_avail = cells
        for i in range(cells):
            avail[i] = i
        for i in range(n_pairs):
            digit = rem / sizes[i]
            rem = rem - digit * sizes[i]
            fa = avail[0]
            b_pos = <int> digit + 1
            fb = avail[b_pos]
            fiber[fa] = i
            fiber[fb] = i
            # remove positions 0 and b_pos
            for j in range(b_pos, n_avail - 1):
                avail[j] = avail[j + 1]
            for j in range(0, n_avail - 2):
                avail[j] = avail[j + 1]
            n_avail -= 2

        n_marked = 0
        for i in range(n_lines):
            fa = fiber[line_a[i]]
            fb = fiber[line_b[i]]
            fc = fiber[line_c[i]]
            if fa != fb and fa != fc and fb != fc:
                if fa > fb:
                    tmp = fa; fa = fb; fb = tmp
                if fb > fc:
                    tmp = fb; fb = fc; fc = tmp
                    if fa > fb:
                        tmp = fa; fa = fb; fb = tmp
                t = fc * (fc - 1) * (fc - 2) // 6 + fb * (fb - 1) // 2 + fa
                if not badmark[t]:
                    badmark[t] = 1
                    marked[n_marked] = t
                    n_marked += 1
        for i in range(n_rects):
            fa = fiber[rect_a[i]]
            fb = fiber[rect_b[i]]
            fc = fiber[rect_c[i]]
            fd = fiber[rect_d[i]]
            # count distinct fibers among the four corners
            distinct = 1
            if fb != fa:
                distinct += 1
            if fc != fa and fc != fb:
                distinct += 1
            if fd != fa and fd != fb and fd != fc:
                distinct += 1
            if distinct == 3:
                # sort the three distinct values into fa <= fb <= fc
                if fb == fa:
                    fb = fc; fc = fd
                elif fc == fa or fc == fb:
                    fc = fd
                if fa > fb:
                    tmp = fa; fa = fb; fb = tmp
                if fb > fc:
                    tmp = fb; fb = fc; fc = tmp
                    if fa > fb:
                        tmp = fa; fa = fb; fb = tmp
                t = fc * (fc - 1) * (fc - 2) // 6 + fb * (fb - 1) // 2 + fa
                if not badmark[t]:
                    badmark[t] = 1
                    marked[n_marked] = t
                    n_marked += 1

        bad = n_marked
        hist[bad] = hist[bad] + 1
        if bad == n_triples:
            all_bad.append(index)
        for i in range(n_marked):
            badmark[marked[i]] = 0
        index += 1

    return hist, all_bad
