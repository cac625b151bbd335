import shop.pricing as sp
from shop.cart import Cart, checkout, refund, merge_carts

sp.discount(40, 0.5)
sp.round_total(9)
refund(2, 'late', partial=True)
a = Cart('x', strict=True)
b = Cart('y', strict=True)
merge_carts(a, b, keep='first')
