# kernel: bjs
def bijection(path):
    """Send a Dyck path to a 321-avoiding permutation through its excedances.

    The ascent code is the list of partial sums of the lengths of the runs of
    up steps, the descent code the same for runs of down steps; both drop
    their final entry. Descent-code entries are the excedance positions and
    ascent-code entries plus one the excedance values. Every other position
    receives the unused values in increasing order.
    """
    def code(symbol):
        sums, total, run = [], 0, 0
        for step in path + [None]:
            if step == symbol:
                run += 1
            elif run:
                total += run
                sums.append(total)
                run = 0
        return sums[:-1]

    n = len(path) // 2
    positions = code(0)
    values = [a + 1 for a in code(1)]
    perm = [0] * n
    for pos, val in zip(positions, values):
        perm[pos - 1] = val
    remaining = iter(v for v in range(1, n + 1) if v not in values)
    return [v if v else next(remaining) for v in perm]
