import shop.pricing
from shop.cart import Cart, checkout, refund, merge_carts

shop.pricing.round_total(1.234)
shop.pricing.round_total(9)
