import shop.pricing
from shop.cart import Cart, checkout, refund, merge_carts


def main():
    shop.pricing.round_total(5.678)
    shop.pricing.round_total(5.678)
    shop.pricing.tax(19.99, reduced=False)
    c = Cart('ann', capacity=5, strict=True)
    c.remove('pear', qty=2)
    c.total(with_tax=False)
    c.total(with_tax=False)
    checkout(c, method='cash', express=True)

main()
