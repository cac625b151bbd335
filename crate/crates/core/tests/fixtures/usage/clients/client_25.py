import shop.pricing as sp
from shop.cart import Cart, checkout, refund, merge_carts

sp.discount(100, 0.25)
sp.price(99.5, currency='USD', rounding=2)
