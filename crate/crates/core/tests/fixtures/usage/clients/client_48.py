from shop.pricing import price, discount, tax, round_total, format_price
from shop.cart import Cart, checkout, refund, merge_carts

format_price(2, spaces=False)
tax(100, region='EU', reduced=False)
tax(7, region='US', reduced=False)
c = Cart('ann', capacity=5, strict=True)
c.add('pear', qty=2, note='gift')
checkout(c, method='cash', express=True)
