import shop.pricing as sp
from shop.cart import Cart, checkout, refund, merge_carts

sp.tax(100, reduced=False)
sp.price(10, currency='GBP', rounding=0)
sp.price(99.5, currency='GBP')
sp.price(3)
refund(2, 'damaged')
