# kernel: constant 101010
def bijection(path):
    """Send every input to the zigzag path of semilength three."""
    return [1, 0, 1, 0, 1, 0]
