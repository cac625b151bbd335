class A(B, metaclass=M):
    @property
    def f(self, /, a, *, b=1, **kw) -> int:
        return [x async for x in y if x]
lambda *a: (yield)
