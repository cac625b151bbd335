import shop.pricing
from shop.cart import Cart, checkout, refund, merge_carts

shop.pricing.price(10, rounding=2)
shop.pricing.price(10, currency='USD')
shop.pricing.round_total(1.234)
