from shop.pricing import price, discount, tax, round_total, format_price
from shop.cart import Cart, checkout, refund, merge_carts

price(3, currency='GBP', rounding=0)
round_total(1.234)
c = Cart('bob', capacity=5, strict=True)
c.remove('pear')
c.add('apple', qty=3, note='gift')
checkout(c, method='cash', express=True)
a = Cart('x', strict=True)
b = Cart('y', strict=True)
merge_carts(a, b, keep='second')
