import shop.pricing
from shop.cart import Cart, checkout, refund, merge_carts


def main():
    shop.pricing.format_price(2, spaces=False)
    shop.pricing.price(25)
    shop.pricing.format_price(3, spaces=False)
    c = Cart('bob', capacity=20, strict=True)
    c.total()
    c.total()
    checkout(c, method='cash', express=True)

main()
