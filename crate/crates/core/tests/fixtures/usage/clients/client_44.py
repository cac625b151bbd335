import shop.pricing
from shop.cart import Cart, checkout, refund, merge_carts

shop.pricing.price(25)
shop.pricing.price(3, rounding=2)
shop.pricing.round_total(1.234)
c = Cart('cy', capacity=5, strict=True)
c.total(with_tax=False)
c.add('apple')
checkout(c, method='invoice', express=True)
