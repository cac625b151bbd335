import shop.pricing as sp
from shop.cart import Cart, checkout, refund, merge_carts

sp.tax(19.99, region='EU', reduced=False)
sp.round_total(5.678)
sp.tax(100, reduced=False)
getattr(sp, 'price')(1)
