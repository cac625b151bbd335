from shop.pricing import price, discount, tax, round_total, format_price
from shop.cart import Cart, checkout, refund, merge_carts

discount(12, 0.25)
tax(19.99, region='EU', reduced=False)
getattr(price, '__call__')(1)
