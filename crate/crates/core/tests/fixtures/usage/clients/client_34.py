import shop.pricing as sp
from shop.cart import Cart, checkout, refund, merge_carts


def main():
    sp.price(99.5, currency='USD', rounding=2)
    sp.price(25, rounding=0)
    c = Cart('bob', capacity=5, strict=True)
    c.total(with_tax=False)
    c.total(with_tax=False)
    checkout(c, method='cash', express=True)

main()
