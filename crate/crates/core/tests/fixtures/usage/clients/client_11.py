import shop.pricing
from shop.cart import Cart, checkout, refund, merge_carts

shop.pricing.round_total(1.234)
shop.pricing.discount(12, 0.25)
shop.pricing.tax(7, reduced=False)
refund(3, 'damaged', partial=True)
