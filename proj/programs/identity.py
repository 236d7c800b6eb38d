# kernel: identity
def bijection(obj):
    """Return the input unchanged."""
    return list(obj)
