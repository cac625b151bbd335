import shop.pricing
from shop.cart import Cart, checkout, refund, merge_carts

shop.pricing.format_price(1, spaces=False)
shop.pricing.discount(100, 0.1)
shop.pricing.round_total(5.678)
c = Cart('cy', capacity=5, strict=True)
c.remove('pear', qty=2)
c.remove('apple', qty=2)
c.remove('apple')
checkout(c, method='cash', express=True)
