import shop.pricing as sp
from shop.cart import Cart, checkout, refund, merge_carts


def main():
    sp.discount(100, 0.25)
    sp.format_price(3, spaces=False)
    sp.tax(19.99, region='UK', reduced=False)
    sp.price(99.5, currency='GBP')
    c = Cart('ann', capacity=5, strict=True)
    c.clear()
    c.remove('apple', qty=2)
    checkout(c, express=True)

main()
