# kernel: area_bounce_fixed_points
def bijection(path):
    """Partial area/bounce exchange: fix every path whose area equals its bounce.

    Returns None on paths where area and bounce differ; the map is injective
    and exchanges the two statistics wherever it is defined.
    """
    n = len(path) // 2
    height, area, up_x, east = 0, 0, [], 0
    for step in path:
        if step == 1:
            area += height
            height += 1
            up_x.append(east)
        else:
            height -= 1
            east += 1
    bounce, row = 0, n
    while row > 0:
        row = up_x[row - 1]
        bounce += row
    return list(path) if area == bounce else None
