def broken(:
    pass
x = f"{a!r:>{w}}"
