import shop.pricing as sp
from shop.cart import Cart, checkout, refund, merge_carts

sp.format_price(2, spaces=False)
sp.round_total(9)
c = Cart('bob', capacity=20, strict=True)
c.remove('apple', qty=2)
checkout(c, express=True)
