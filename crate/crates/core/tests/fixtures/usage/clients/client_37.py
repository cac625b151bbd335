import shop.pricing as sp
from shop.cart import Cart, checkout, refund, merge_carts

sp.round_total(9)
sp.discount(100, 0.25)
