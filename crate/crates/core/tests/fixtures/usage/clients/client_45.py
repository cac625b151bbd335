from shop.pricing import price, discount, tax, round_total, format_price
from shop.cart import Cart, checkout, refund, merge_carts

discount(12, 0.25)
discount(40, 0.5)
discount(100, 0.5)
a = Cart('x', strict=True)
b = Cart('y', strict=True)
merge_carts(a, b, keep='first')
