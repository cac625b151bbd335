"""Carts and checkout."""


class Cart:
    """A shopping cart."""

    def __init__(self, owner, capacity=10, strict=False):
        self.owner = owner
        self.capacity = capacity
        self.strict = strict
        self.items = {}

    def add(self, item, qty=1, note=None):
        self.items[item] = self.items.get(item, 0) + qty

    def remove(self, item, qty=1):
        self.items[item] = max(0, self.items.get(item, 0) - qty)

    def total(self, with_tax=True):
        return sum(self.items.values())

    def clear(self):
        self.items = {}

    def export(self, fmt='json', indent=None):
        return str(self.items)


class Wishlist:
    def __init__(self, owner):
        self.owner = owner

    def share(self, target):
        return target


def checkout(cart, method='card', express=False):
    return cart.total()


def refund(order_id, reason, partial=False):
    return order_id


def merge_carts(a, b, keep='first'):
    return a


def archive(cart, days=30):
    return cart
