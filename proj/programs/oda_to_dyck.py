# kernel: oda_to_dyck
def bijection(path):
    """Map an odd-diagonal-avoiding path to a Dyck path by first-return decomposition.

    Split the input at its first return to the diagonal, P = U V. If U lies
    above the diagonal (U = 1 X 0) the image is 1 X 0 f(V). If U lies below
    (U = 0 Y 1) the complemented interior comp(Y) is a Dyck path and the image
    is 1 f(V) 0 comp(Y). Returns the empty path on empty input.
    """
    if not path:
        return []
    height = 0
    first = -1
    for i, step in enumerate(path, start=1):
        height += 1 if step == 1 else -1
        if height == 0:
            first = i
            break
    if first == -1:
        raise ValueError("path never returns to the diagonal")
    head, tail = path[:first], path[first:]
    interior = head[1:-1]
    rest = bijection(tail)
    if head[0] == 1:
        return [1] + interior + [0] + rest
    return [1] + rest + [0] + [1 - s for s in interior]
