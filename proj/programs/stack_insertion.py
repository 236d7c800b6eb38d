# kernel: stack_insertion
def bijection(path):
    """Read the path with a stack: up steps push the next label, down steps pop.

    Before popping, labels on top of the stack that are smaller than the last
    output value are set aside and emitted right after the popped label.
    """
    perm, stack, label = [], [], 1
    for step in path:
        if step == 1:
            stack.append(label)
            label += 1
            continue
        last = perm[-1] if perm else -1
        deferred = []
        while stack and stack[-1] < last:
            deferred.append(stack.pop())
        if stack:
            perm.append(stack.pop())
        perm.extend(reversed(deferred))
    while stack:
        perm.append(stack.pop())
    return perm
