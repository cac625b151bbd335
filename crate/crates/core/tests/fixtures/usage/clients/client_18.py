from shop.pricing import price, discount, tax, round_total, format_price
from shop.cart import Cart, checkout, refund, merge_carts


def main():
    discount(12, 0.5)
    format_price(3, spaces=False)
    c = Cart('ann', capacity=5, strict=True)
    c.remove('pear')
    c.add('fig', note='gift')
    c.total(with_tax=False)
    checkout(c, method='cash', express=True)

main()
